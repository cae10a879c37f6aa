//! Currents, accumulated collector charge and coherence envelopes.
//!
//! A collector current is `I = sum_c sigma_cc * width_c` over the states in
//! which the well adjacent to that collector is occupied, in units of
//! `e * Gamma0`.

use crate::dynamics::{DensityVector, Trajectory};
use crate::error::{Error, Result};
use crate::models::{
    DoubleDotDetectorParams, DoubleDotParams, ModelKind, SingleDotDetectorParams, StateSpace,
};

/// Which reservoir collects the current.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Collector {
    System,
    Detector,
}

impl Collector {
    pub fn label(self) -> &'static str {
        match self {
            Collector::System => "system",
            Collector::Detector => "detector",
        }
    }
}

/// The `(state, partial width)` pairs defining one collector current.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentSpec {
    space: StateSpace,
    collector: Collector,
    terms: Vec<(usize, f64)>,
}

impl CurrentSpec {
    pub fn new(space: &StateSpace, collector: Collector, terms: &[(&str, f64)]) -> Result<Self> {
        let mut resolved = Vec::with_capacity(terms.len());
        for &(label, width) in terms {
            if width < 0.0 || !width.is_finite() {
                return Err(Error::InvalidParam {
                    name: "width",
                    reason: format!("partial width for {label:?} must be nonnegative, got {width}"),
                });
            }
            resolved.push((space.pop_index(label)?, width));
        }
        Ok(CurrentSpec { space: space.clone(), collector, terms: resolved })
    }

    pub fn collector(&self) -> Collector {
        self.collector
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    /// `I_S = Gamma_R sigma_bb + Gamma_R' sigma_b'b'`.
    pub fn system_single_dot(p: &SingleDotDetectorParams) -> Self {
        let space = StateSpace::for_model(ModelKind::SingleDotDetector);
        CurrentSpec::new(&space, Collector::System, &[("b", p.Gamma_R), ("b'", p.Gamma_Rp)])
            .expect("labels are fixed")
    }

    /// `I_D = gamma_R sigma_a'a' + gamma_R' sigma_b'b'`.
    pub fn detector_single_dot(p: &SingleDotDetectorParams) -> Self {
        let space = StateSpace::for_model(ModelKind::SingleDotDetector);
        CurrentSpec::new(&space, Collector::Detector, &[("a'", p.gamma_R), ("b'", p.gamma_Rp)])
            .expect("labels are fixed")
    }

    /// `I_S = Gamma_R sigma_cc` for the bare double dot.
    pub fn system_double_dot(p: &DoubleDotParams) -> Self {
        let space = StateSpace::for_model(ModelKind::DoubleDot);
        CurrentSpec::new(&space, Collector::System, &[("c", p.Gamma_R)]).expect("labels are fixed")
    }

    /// `I_S = Gamma_R sigma_cc` on the reduced space.
    pub fn system_reduced(p: &DoubleDotParams) -> Self {
        let space = StateSpace::for_model(ModelKind::ReducedDoubleDot);
        CurrentSpec::new(&space, Collector::System, &[("c", p.Gamma_R)]).expect("labels are fixed")
    }

    /// `I_S = Gamma_R (sigma_cc + sigma_c'c')`.
    pub fn system_double_dot_detector(p: &DoubleDotDetectorParams) -> Self {
        let space = StateSpace::for_model(ModelKind::DoubleDotDetector);
        CurrentSpec::new(
            &space,
            Collector::System,
            &[("c", p.Gamma_R), ("c'", p.Gamma_R)],
        )
        .expect("labels are fixed")
    }

    /// Detector current from the exit widths of the detector-occupied states:
    /// `gamma_R` out of `a'` and `c'`, `gamma_R'` out of `b'`.
    pub fn detector_double_dot_detector(p: &DoubleDotDetectorParams) -> Self {
        let space = StateSpace::for_model(ModelKind::DoubleDotDetector);
        CurrentSpec::new(
            &space,
            Collector::Detector,
            &[("a'", p.gamma_R), ("b'", p.gamma_Rp), ("c'", p.gamma_R)],
        )
        .expect("labels are fixed")
    }
}

/// Collector current of a single state, `sum_c sigma_cc * width_c`.
pub fn current(state: &DensityVector, spec: &CurrentSpec) -> Result<f64> {
    if state.space() != &spec.space {
        return Err(Error::SpaceMismatch {
            expected: spec.space.kind().name(),
            got: state.space().kind().name(),
        });
    }
    Ok(spec
        .terms
        .iter()
        .map(|&(idx, width)| state.values()[idx] * width)
        .sum())
}

/// Collector charge `Q(t) = integral of I` by the trapezoid rule on the
/// trajectory grid, starting at zero.
pub fn accumulated_charge(traj: &Trajectory, spec: &CurrentSpec) -> Result<Vec<f64>> {
    let mut q = Vec::with_capacity(traj.len());
    let mut acc = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for (t, state) in traj.iter() {
        let i = current(state, spec)?;
        if let Some((t0, i0)) = prev {
            acc += 0.5 * (i0 + i) * (t - t0);
        }
        q.push(acc);
        prev = Some((t, i));
    }
    Ok(q)
}

/// `|sigma_pair(t)|` per grid point.
pub fn coherence_envelope(traj: &Trajectory, pair: (&str, &str)) -> Result<Vec<f64>> {
    traj.states()
        .iter()
        .map(|s| s.coherence(pair).map(|(re, im)| re.hypot(im)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve, steady_state, time_grid, DensityVector, Method};
    use crate::models::{build_double_dot, build_single_dot_detector};
    use approx::assert_abs_diff_eq;

    fn dd(gl: f64, gr: f64, om: f64, eps: f64) -> DoubleDotParams {
        DoubleDotParams { Gamma_L: gl, Gamma_R: gr, Omega: om, epsilon: eps }
    }

    #[test]
    fn current_vanishes_without_collector_occupation() {
        let p = dd(1.0, 1.0, 1.0, 0.0);
        let space = StateSpace::for_model(ModelKind::DoubleDot);
        let spec = CurrentSpec::system_double_dot(&p);
        let state = DensityVector::from_populations(&space, &[("a", 0.5), ("b", 0.5)]).unwrap();
        assert_eq!(current(&state, &spec).unwrap(), 0.0);
    }

    #[test]
    fn resonant_steady_current_value() {
        let p = dd(1.0, 1.0, 1.0, 0.0);
        let l = build_double_dot(&p).unwrap();
        let spec = CurrentSpec::system_double_dot(&p);
        let i = current(&steady_state(&l).unwrap(), &spec).unwrap();
        assert_abs_diff_eq!(i, 1.0 / 3.25, epsilon = 1e-12);
    }

    #[test]
    fn fast_detector_reads_out_the_system_current() {
        let p = SingleDotDetectorParams::symmetric(1.0, 1.0, 1.0, 100.0);
        let l = build_single_dot_detector(&p).unwrap();
        let s = steady_state(&l).unwrap();
        let i_s = current(&s, &CurrentSpec::system_single_dot(&p)).unwrap();
        let i_d = current(&s, &CurrentSpec::detector_single_dot(&p)).unwrap();
        assert!((i_s - 0.5).abs() < 0.01, "I_S = {i_s}");
        assert!((i_d / i_s - 1.0).abs() < 0.02, "I_D/I_S = {}", i_d / i_s);
    }

    #[test]
    fn current_is_linear_in_the_state() {
        let p = dd(1.0, 2.0, 1.0, 0.1);
        let space = StateSpace::for_model(ModelKind::DoubleDot);
        let spec = CurrentSpec::system_double_dot(&p);
        let x = DensityVector::from_populations(&space, &[("a", 0.2), ("c", 0.8)]).unwrap();
        let y = DensityVector::from_populations(&space, &[("b", 0.3), ("c", 0.7)]).unwrap();
        let (alpha, beta) = (0.35, 0.65);
        let mixed = DensityVector::from_raw(&space, x.values() * alpha + y.values() * beta).unwrap();
        let lhs = current(&mixed, &spec).unwrap();
        let rhs = alpha * current(&x, &spec).unwrap() + beta * current(&y, &spec).unwrap();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-15);
    }

    #[test]
    fn current_rejects_wrong_space() {
        let p = dd(1.0, 1.0, 1.0, 0.0);
        let spec = CurrentSpec::system_double_dot(&p);
        let wrong = DensityVector::all_empty(&StateSpace::for_model(ModelKind::ReducedDoubleDot));
        assert!(matches!(
            current(&wrong, &spec),
            Err(Error::SpaceMismatch { .. })
        ));
        let space = StateSpace::for_model(ModelKind::DoubleDot);
        assert!(CurrentSpec::new(&space, Collector::System, &[("c'", 1.0)]).is_err());
    }

    #[test]
    fn charge_accumulates_at_the_dc_rate_past_the_transient() {
        let p = dd(1.0, 1.0, 1.0, 0.0);
        let l = build_double_dot(&p).unwrap();
        let spec = CurrentSpec::system_double_dot(&p);
        let traj = evolve(
            &l,
            &DensityVector::all_empty(l.space()),
            &time_grid(80.0, 3201),
            Method::Exact,
            1e-10,
        )
        .unwrap();
        let q = accumulated_charge(&traj, &spec).unwrap();
        assert!(q.windows(2).all(|w| w[1] >= w[0]), "Q must be nondecreasing");

        let times = traj.times();
        let (k1, k2) = (traj.len() / 2, traj.len() - 1);
        let i_dc = 1.0 / 3.25;
        let measured = (q[k2] - q[k1]) / (times[k2] - times[k1]);
        assert!(
            (measured - i_dc).abs() / i_dc < 1e-3,
            "dQ/dt = {measured}, expected {i_dc}"
        );
        // Late-time finite-difference slope against the dc value.
        let dq = (q[k2] - q[k2 - 1]) / (times[k2] - times[k2 - 1]);
        assert!((dq - i_dc).abs() / i_dc < 5e-3);
    }

    #[test]
    fn charge_is_zero_for_a_zero_current_trajectory() {
        let l = build_double_dot(&dd(0.0, 0.0, 0.5, 0.0)).unwrap();
        let p = dd(0.0, 0.0, 0.5, 0.0);
        let spec = CurrentSpec::system_double_dot(&p);
        let sigma0 = DensityVector::from_populations(l.space(), &[("b", 1.0)]).unwrap();
        let traj = evolve(&l, &sigma0, &time_grid(5.0, 21), Method::Exact, 1e-9).unwrap();
        // Populations oscillate b <-> c but nothing reaches the collector.
        let q = accumulated_charge(&traj, &spec).unwrap();
        assert!(q.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn envelope_of_a_closed_superposition_peaks_at_half() {
        let l = build_double_dot(&dd(0.0, 0.0, 1.0, 0.0)).unwrap();
        let sigma0 = DensityVector::from_populations(l.space(), &[("b", 1.0)]).unwrap();
        let traj = evolve(&l, &sigma0, &time_grid(6.3, 631), Method::Exact, 1e-10).unwrap();
        let env = coherence_envelope(&traj, ("b", "c")).unwrap();
        let max = env.iter().cloned().fold(0.0, f64::max);
        assert_abs_diff_eq!(max, 0.5, epsilon = 1e-4);
        // A pure population state carries no envelope at t = 0.
        assert_eq!(env[0], 0.0);
    }
}
