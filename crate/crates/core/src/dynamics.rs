//! Time evolution of density vectors and the stationary-state solver.
//!
//! The exact propagator is the dense matrix exponential of `L * dt` (the
//! generators never exceed dimension 10); an embedded Dormand-Prince 5(4)
//! integrator serves as an independent cross-check route. The stationary
//! state comes from replacing one redundant population row of `L` with the
//! trace constraint and solving the square system, with an SVD check that
//! the kernel is one-dimensional.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::models::{Liouvillian, StateSpace};

/// Real-embedded density vector on one of the model state spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityVector {
    values: DVector<f64>,
    space: StateSpace,
}

impl DensityVector {
    /// The turn-on state: everything empty, `sigma_aa = 1`.
    pub fn all_empty(space: &StateSpace) -> Self {
        let mut values = DVector::zeros(space.dim_real());
        values[0] = 1.0;
        DensityVector { values, space: space.clone() }
    }

    /// State with the given populations and all coherences zero.
    pub fn from_populations(space: &StateSpace, pops: &[(&str, f64)]) -> Result<Self> {
        let mut values = DVector::zeros(space.dim_real());
        for &(label, v) in pops {
            values[space.pop_index(label)?] = v;
        }
        Ok(DensityVector { values, space: space.clone() })
    }

    pub fn from_raw(space: &StateSpace, values: DVector<f64>) -> Result<Self> {
        if values.len() != space.dim_real() {
            return Err(Error::InvalidGrid(format!(
                "state length {} does not match space dimension {}",
                values.len(),
                space.dim_real()
            )));
        }
        Ok(DensityVector { values, space: space.clone() })
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn population(&self, label: &str) -> Result<f64> {
        Ok(self.values[self.space.pop_index(label)?])
    }

    /// `(Re, Im)` of the coherence between the two labels.
    pub fn coherence(&self, pair: (&str, &str)) -> Result<(f64, f64)> {
        let k = self.space.coherence_pair_index(pair)?;
        Ok((self.values[self.space.re_slot(k)], self.values[self.space.im_slot(k)]))
    }

    pub fn set_coherence(&mut self, pair: (&str, &str), re: f64, im: f64) -> Result<()> {
        let k = self.space.coherence_pair_index(pair)?;
        self.values[self.space.re_slot(k)] = re;
        self.values[self.space.im_slot(k)] = im;
        Ok(())
    }

    /// Sum of the population entries.
    pub fn trace(&self) -> f64 {
        (0..self.space.n_pop()).map(|i| self.values[i]).sum()
    }

    /// Check the physical-state requirements: unit trace (1e-12), population
    /// nonnegativity up to -1e-9, and the coherence bound
    /// `|sigma_ij|^2 <= sigma_ii sigma_jj + 1e-8`.
    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParam {
                name: "trace",
                reason: format!("trace deviates from 1 by {:.3e}", tr - 1.0),
            });
        }
        for i in 0..self.space.n_pop() {
            if self.values[i] < -1e-9 {
                return Err(Error::InvalidParam {
                    name: "population",
                    reason: format!(
                        "sigma_{0}{0} = {1:.3e} is negative",
                        self.space.labels()[i],
                        self.values[i]
                    ),
                });
            }
        }
        for k in 0..self.space.n_coherences() {
            let re = self.values[self.space.re_slot(k)];
            let im = self.values[self.space.im_slot(k)];
            let (i, j) = {
                let pair = self.space.coherence_pairs().nth(k).unwrap();
                (self.space.pop_index(pair.0)?, self.space.pop_index(pair.1)?)
            };
            let bound = self.values[i] * self.values[j] + 1e-8;
            if re * re + im * im > bound {
                return Err(Error::InvalidParam {
                    name: "coherence",
                    reason: format!(
                        "|sigma|^2 = {:.3e} exceeds population product {:.3e}",
                        re * re + im * im,
                        bound
                    ),
                });
            }
        }
        Ok(())
    }
}

/// States on a strictly increasing time grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DensityVector>,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityVector] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &DensityVector {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityVector)> {
        self.times.iter().copied().zip(self.states.iter())
    }
}

/// Propagation route for [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Dense matrix exponential per grid segment.
    Exact,
    /// Embedded Dormand-Prince 5(4) with adaptive steps.
    RkAdaptive,
}

impl Method {
    pub fn from_label(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "rk-adaptive" => Ok(Method::RkAdaptive),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

/// Uniform grid of `n` points covering `[0, t_max]`.
pub fn time_grid(t_max: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && t_max > 0.0, "need at least two points and t_max > 0");
    (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect()
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty time grid".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("times must be strictly increasing".into()));
    }
    Ok(())
}

/// Propagate `sigma0` (the state at `grid[0]`) across the grid.
pub fn evolve(
    l: &Liouvillian,
    sigma0: &DensityVector,
    grid: &[f64],
    method: Method,
    tol: f64,
) -> Result<Trajectory> {
    if sigma0.space() != l.space() {
        return Err(Error::SpaceMismatch {
            expected: l.space().kind().name(),
            got: sigma0.space().kind().name(),
        });
    }
    check_grid(grid)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParam {
            name: "tol",
            reason: format!("tolerance must be positive, got {tol}"),
        });
    }

    let mut states = Vec::with_capacity(grid.len());
    states.push(sigma0.clone());
    let mut current = sigma0.values().clone();

    // Uniform grids reuse one propagator.
    let mut cached: Option<(f64, DMatrix<f64>)> = None;

    for w in grid.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let dt = t1 - t0;
        match method {
            Method::Exact => {
                let propagator = match &cached {
                    Some((cached_dt, p)) if *cached_dt == dt => p.clone(),
                    _ => {
                        let p = (l.matrix() * dt).exp();
                        cached = Some((dt, p.clone()));
                        p
                    }
                };
                current = &propagator * &current;
            }
            Method::RkAdaptive => {
                rk_segment(l.matrix(), &mut current, t0, t1, tol)?;
            }
        }
        states.push(DensityVector::from_raw(l.space(), current.clone())?);
    }

    Ok(Trajectory { times: grid.to_vec(), states })
}

// Dormand-Prince 5(4) coefficients.
const DP_C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [&[f64]; 6] = [
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
    &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Difference between the 5th- and 4th-order solutions.
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate `y' = m y` from `t0` to `t1` in place. The controller targets a
/// local error two orders below `tol` so that the accumulated error stays
/// within the documented `10 * tol` agreement with the exact propagator.
fn rk_segment(m: &DMatrix<f64>, y: &mut DVector<f64>, t0: f64, t1: f64, tol: f64) -> Result<()> {
    let local_tol = tol * 1e-2;
    let mut t = t0;
    let mut h = (t1 - t0).min(0.1 / m.norm().max(1e-30)).max(1e-12);
    let mut k: Vec<DVector<f64>> = vec![DVector::zeros(y.len()); 7];
    k[0] = m * &*y;

    let max_steps = 2_000_000;
    for _ in 0..max_steps {
        if t >= t1 {
            return Ok(());
        }
        h = h.min(t1 - t);
        if h < f64::EPSILON * t1.abs().max(1.0) {
            return Err(Error::IntegrationFailure {
                t,
                reason: format!("step size underflow (h = {h:.3e})"),
            });
        }

        for stage in 0..6 {
            let mut acc = y.clone();
            for (j, &a) in DP_A[stage].iter().enumerate() {
                if a != 0.0 {
                    acc.axpy(h * a, &k[j], 1.0);
                }
            }
            k[stage + 1] = m * acc;
            let _ = DP_C[stage];
        }

        // 5th-order candidate (FSAL: the b-row equals the last a-row).
        let mut y_new = y.clone();
        for (j, &b) in DP_A[5].iter().enumerate() {
            if b != 0.0 {
                y_new.axpy(h * b, &k[j], 1.0);
            }
        }

        // Embedded error estimate, componentwise scaled.
        let mut err: f64 = 0.0;
        for i in 0..y.len() {
            let e: f64 = (0..7).map(|j| DP_E[j] * k[j][i]).sum::<f64>() * h;
            let scale = local_tol + local_tol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / scale).abs());
        }

        if err <= 1.0 {
            t += h;
            *y = y_new;
            k[0] = m * &*y;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Err(Error::IntegrationFailure {
        t,
        reason: "step budget exhausted".into(),
    })
}

/// Solve `L x = 0` with unit trace.
///
/// The kernel must be one-dimensional under the tolerance
/// `1e-9 * ||L||_2`; otherwise the state space is disconnected (for example
/// all widths zero) and the error names the degenerate directions. The
/// returned vector satisfies `||L x||_inf <= 1e-12 * max(1, ||L||_inf)`.
pub fn steady_state(l: &Liouvillian) -> Result<DensityVector> {
    let n = l.dim();
    let m = l.matrix();

    let svd = m.clone().svd(false, true);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let threshold = 1e-9 * sigma_max;
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let mut kernel_dims: Vec<usize> = (0..n)
        .filter(|&i| svd.singular_values[i] <= threshold)
        .collect();
    if sigma_max == 0.0 {
        kernel_dims = (0..n).collect();
    }

    if kernel_dims.len() != 1 {
        let directions = kernel_dims
            .iter()
            .map(|&i| {
                let row = v_t.row(i);
                let dominant = (0..n)
                    .max_by(|&a, &b| row[a].abs().partial_cmp(&row[b].abs()).unwrap())
                    .unwrap_or(0);
                l.space().slot_name(dominant)
            })
            .collect::<Vec<_>>()
            .join(", ");
        return Err(Error::NoUniqueSteadyState {
            directions: if directions.is_empty() { "none (no kernel)".into() } else { directions },
        });
    }

    // Replace the last population row (implied by the others plus the trace)
    // with the trace constraint.
    let trace_row = l.space().n_pop() - 1;
    let mut a = m.clone();
    for j in 0..n {
        a[(trace_row, j)] = if j < l.space().n_pop() { 1.0 } else { 0.0 };
    }
    let mut b = DVector::zeros(n);
    b[trace_row] = 1.0;

    let lu = a.clone().lu();
    let mut x = lu
        .solve(&b)
        .ok_or_else(|| Error::NoUniqueSteadyState { directions: "singular trace system".into() })?;
    // One round of iterative refinement.
    let r = &b - &a * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }

    let tr: f64 = (0..l.space().n_pop()).map(|i| x[i]).sum();
    if tr.abs() < 1e-300 {
        return Err(Error::NoUniqueSteadyState { directions: "traceless kernel".into() });
    }
    x /= tr;

    let residual = (m * &x).amax();
    let limit = 1e-12 * l.matrix().amax().max(1.0) * (n as f64);
    if residual > limit {
        return Err(Error::SolveFailed { residual, limit });
    }

    DensityVector::from_raw(l.space(), x)
}

/// Fit window `[0.1, 1.0] / rate` where the rate is read off the coherence
/// row diagonal of the generator.
pub fn default_fit_window(l: &Liouvillian, pair: (&str, &str)) -> Result<(f64, f64)> {
    let k = l.space().coherence_pair_index(pair)?;
    let rate = -l.matrix()[(l.space().re_slot(k), l.space().re_slot(k))];
    if rate <= 0.0 {
        return Err(Error::UnreliableFit(format!(
            "coherence ({}, {}) has no decay (diagonal rate {rate})",
            pair.0, pair.1
        )));
    }
    Ok((0.1 / rate, 1.0 / rate))
}

/// Least-squares decay rate of `log |sigma_pair(t)|` over the window,
/// returned positive.
pub fn decoherence_rate(
    traj: &Trajectory,
    pair: (&str, &str),
    window: (f64, f64),
) -> Result<f64> {
    if window.0.is_nan() || window.1.is_nan() || window.0 >= window.1 || !window.0.is_finite() || !window.1.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "fit window [{}, {}] is not an increasing finite interval",
            window.0, window.1
        )));
    }
    let mut ts = Vec::new();
    let mut logs = Vec::new();
    for (t, state) in traj.iter() {
        if t < window.0 || t > window.1 {
            continue;
        }
        let (re, im) = state.coherence(pair)?;
        let mag = re.hypot(im);
        if mag < 1e-14 {
            return Err(Error::UnreliableFit(format!(
                "|sigma| = {mag:.3e} at t = {t} is below the fit floor"
            )));
        }
        ts.push(t);
        logs.push(mag.ln());
    }
    if ts.len() < 3 {
        return Err(Error::UnreliableFit(format!(
            "only {} grid points fall inside the window",
            ts.len()
        )));
    }

    let n = ts.len() as f64;
    let mean_t = ts.iter().sum::<f64>() / n;
    let mean_l = logs.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, lg) in ts.iter().zip(&logs) {
        num += (t - mean_t) * (lg - mean_l);
        den += (t - mean_t) * (t - mean_t);
    }
    let slope = num / den;
    if slope.is_nan() || slope >= 0.0 {
        return Err(Error::UnreliableFit(format!(
            "coherence does not decay over the window (slope {slope:.3e})"
        )));
    }
    Ok(-slope)
}
