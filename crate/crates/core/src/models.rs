//! State spaces, parameter sets, Coulomb-blockade regime logic and the
//! Liouvillian generators for the three dot/detector systems plus the
//! detector-traced (reduced) double dot.
//!
//! Conventions used throughout the crate: `hbar = 1`, `e = 1`, every rate
//! and energy is expressed in units of a reference width `Gamma0`, and the
//! real embedding of a density vector stores populations first (in the
//! label order of the state space) followed by an `(Re, Im)` pair for each
//! coherence.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Which of the four generator families a state space belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Single dot measured by a single-dot charge detector: populations
    /// `a, b, a', b'`, no coherences.
    SingleDotDetector,
    /// Bare coupled double dot: populations `a, b, c` plus the `(b, c)`
    /// coherence.
    DoubleDot,
    /// Double dot plus detector: populations `a, b, c, a', b', c'` plus
    /// the `(b, c)` and `(b', c')` coherences.
    DoubleDotDetector,
    /// Double dot with detector-induced dephasing, i.e. the double-dot
    /// equations with the coherence decay widened to `(Gamma_R + gamma_L)/2`.
    ReducedDoubleDot,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::SingleDotDetector => "single_dot_detector",
            ModelKind::DoubleDot => "double_dot",
            ModelKind::DoubleDotDetector => "double_dot_detector",
            ModelKind::ReducedDoubleDot => "reduced",
        }
    }
}

/// Ordered basis of a model: population labels first, then complex
/// coherences stored as `(Re, Im)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    kind: ModelKind,
    labels: &'static [&'static str],
    coherence_pairs: &'static [(usize, usize)],
}

impl StateSpace {
    pub fn for_model(kind: ModelKind) -> Self {
        match kind {
            ModelKind::SingleDotDetector => StateSpace {
                kind,
                labels: &["a", "b", "a'", "b'"],
                coherence_pairs: &[],
            },
            ModelKind::DoubleDot => StateSpace {
                kind,
                labels: &["a", "b", "c"],
                coherence_pairs: &[(1, 2)],
            },
            ModelKind::DoubleDotDetector => StateSpace {
                kind,
                labels: &["a", "b", "c", "a'", "b'", "c'"],
                coherence_pairs: &[(1, 2), (4, 5)],
            },
            ModelKind::ReducedDoubleDot => StateSpace {
                kind,
                labels: &["a", "b", "c"],
                coherence_pairs: &[(1, 2)],
            },
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Population labels in basis order.
    pub fn labels(&self) -> &'static [&'static str] {
        self.labels
    }

    pub fn n_pop(&self) -> usize {
        self.labels.len()
    }

    /// Coherence pairs as `(label, label)` in basis order.
    pub fn coherence_pairs(&self) -> impl Iterator<Item = (&'static str, &'static str)> + '_ {
        self.coherence_pairs
            .iter()
            .map(|&(i, j)| (self.labels[i], self.labels[j]))
    }

    pub fn n_coherences(&self) -> usize {
        self.coherence_pairs.len()
    }

    /// Length of the real embedding: populations plus two slots per coherence.
    pub fn dim_real(&self) -> usize {
        self.n_pop() + 2 * self.coherence_pairs.len()
    }

    pub fn pop_index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Index of a coherence pair among the pairs of this space.
    pub fn coherence_pair_index(&self, pair: (&str, &str)) -> Result<usize> {
        let i = self.pop_index(pair.0)?;
        let j = self.pop_index(pair.1)?;
        self.coherence_pairs
            .iter()
            .position(|&(a, b)| (a, b) == (i, j))
            .ok_or_else(|| Error::UnknownLabel(format!("({}, {})", pair.0, pair.1)))
    }

    /// Slot of `Re` of the `k`-th coherence in the real embedding.
    pub fn re_slot(&self, k: usize) -> usize {
        self.n_pop() + 2 * k
    }

    /// Slot of `Im` of the `k`-th coherence in the real embedding.
    pub fn im_slot(&self, k: usize) -> usize {
        self.n_pop() + 2 * k + 1
    }

    /// Human-readable name of a slot of the real embedding.
    pub fn slot_name(&self, slot: usize) -> String {
        if slot < self.n_pop() {
            format!("sigma_{0}{0}", self.labels[slot])
        } else {
            let k = (slot - self.n_pop()) / 2;
            let (i, j) = self.coherence_pairs[k];
            let part = if (slot - self.n_pop()).is_multiple_of(2) { "Re" } else { "Im" };
            format!("{}_sigma_{}{}", part, self.labels[i], self.labels[j])
        }
    }
}

/// Real linear generator of `d sigma / dt = L sigma` in the real embedding
/// of a state space.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    matrix: DMatrix<f64>,
    space: StateSpace,
}

impl Liouvillian {
    fn new(matrix: DMatrix<f64>, space: StateSpace) -> Self {
        debug_assert_eq!(matrix.nrows(), space.dim_real());
        debug_assert_eq!(matrix.ncols(), space.dim_real());
        Liouvillian { matrix, space }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim_real()
    }

    /// Largest absolute column sum over population rows: the off-diagonal
    /// inflow of each column against its diagonal outflow, plus the pairwise
    /// cancellation of coherence-driven population flow. Exactly zero for a
    /// probability-conserving generator.
    pub fn trace_defect(&self) -> f64 {
        let n_pop = self.space.n_pop();
        (0..self.dim())
            .map(|j| {
                let inflow: f64 = (0..n_pop).filter(|&i| i != j).map(|i| self.matrix[(i, j)]).sum();
                let outflow = if j < n_pop { self.matrix[(j, j)] } else { 0.0 };
                (inflow + outflow).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn check_width(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::InvalidParam {
            name,
            reason: format!("must be finite, got {value}"),
        });
    }
    if value < 0.0 {
        return Err(Error::InvalidParam {
            name,
            reason: format!("width must be nonnegative, got {value}"),
        });
    }
    Ok(())
}

fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::InvalidParam {
            name,
            reason: format!("must be finite, got {value}"),
        });
    }
    Ok(())
}

/// Level energies, Coulomb shifts and reservoir Fermi energies.
///
/// `U1` (`U2`) raises the detector level `E0` while dot 1 (dot 2) of the
/// measured system is occupied; `EF_det` is the Fermi energy of the
/// detector's emitter reservoir and `EF_sys` the one of the system's
/// emitter. Everything shares one energy unit.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyConfig {
    pub E0: f64,
    pub E1: f64,
    pub E2: f64,
    pub U1: f64,
    pub U2: f64,
    pub EF_det: f64,
    pub EF_sys: f64,
}

impl EnergyConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("E0", self.E0),
            ("E1", self.E1),
            ("E2", self.E2),
            ("EF_det", self.EF_det),
            ("EF_sys", self.EF_sys),
        ] {
            check_finite(name, v)?;
        }
        check_width("U1", self.U1)?;
        check_width("U2", self.U2)?;
        if self.E0 >= self.EF_det {
            return Err(Error::InvalidParam {
                name: "E0",
                reason: format!(
                    "resonant level must lie below the detector Fermi energy ({} >= {})",
                    self.E0, self.EF_det
                ),
            });
        }
        if self.E1 >= self.EF_sys {
            return Err(Error::InvalidParam {
                name: "E1",
                reason: format!(
                    "resonant level must lie below the system Fermi energy ({} >= {})",
                    self.E1, self.EF_sys
                ),
            });
        }
        // Dot 1 sits closer to the detector; the regime taxonomy assumes its
        // shift dominates.
        if self.U1 < self.U2 {
            return Err(Error::InvalidParam {
                name: "U1",
                reason: format!("requires U1 >= U2, got U1 = {}, U2 = {}", self.U1, self.U2),
            });
        }
        Ok(())
    }

    /// Detuning of the double dot, `epsilon = E2 - E1`.
    pub fn detuning(&self) -> f64 {
        self.E2 - self.E1
    }
}

/// Whether a detector electron may enter while the measured system occupies
/// dot 1 / dot 2. Entry from the empty system is open in every regime except
/// `AlwaysBlocked` (where no entry term exists at all).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetectorRegime {
    /// The detector fills no matter where the system electron sits.
    NeverBlocked,
    /// Entry is forbidden exactly while dot 1 is occupied; this is the
    /// configuration in which the detector distinguishes the dots.
    BlockedByDot1,
    /// Entry is forbidden regardless of the system state.
    AlwaysBlocked,
}

impl DetectorRegime {
    pub fn open_when_dot1(self) -> bool {
        matches!(self, DetectorRegime::NeverBlocked)
    }

    pub fn open_when_dot2(self) -> bool {
        !matches!(self, DetectorRegime::AlwaysBlocked)
    }

    pub fn label(self) -> &'static str {
        match self {
            DetectorRegime::NeverBlocked => "never_blocked",
            DetectorRegime::BlockedByDot1 => "blocked_by_dot1",
            DetectorRegime::AlwaysBlocked => "always_blocked",
        }
    }

    pub fn from_label(s: &str) -> Result<Self> {
        match s {
            "never_blocked" => Ok(DetectorRegime::NeverBlocked),
            "blocked_by_dot1" => Ok(DetectorRegime::BlockedByDot1),
            "always_blocked" => Ok(DetectorRegime::AlwaysBlocked),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

/// Classify the detector-entry regime from the shifted detector level
/// against its reservoir Fermi energy.
///
/// At zero temperature the Fermi step is sharp, so the comparison is exact:
/// entry while dot `i` is occupied is open iff `EF_det > E0 + Ui`. A Fermi
/// energy exactly at a threshold counts as blocked.
pub fn classify_regime(cfg: &EnergyConfig) -> DetectorRegime {
    classify_regime_energies(cfg.E0, cfg.U1, cfg.U2, cfg.EF_det)
}

/// Same classification from the four quantities it actually depends on.
pub fn classify_regime_energies(e0: f64, u1: f64, u2: f64, ef_det: f64) -> DetectorRegime {
    if ef_det <= e0 + u2 {
        DetectorRegime::AlwaysBlocked
    } else if ef_det <= e0 + u1 {
        DetectorRegime::BlockedByDot1
    } else {
        DetectorRegime::NeverBlocked
    }
}

/// Widths of the single dot + detector system. Primed values apply while
/// the other subsystem is occupied (level shifted by the Coulomb energy).
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleDotDetectorParams {
    pub Gamma_L: f64,
    pub Gamma_R: f64,
    pub Gamma_Lp: f64,
    pub Gamma_Rp: f64,
    pub gamma_L: f64,
    pub gamma_R: f64,
    pub gamma_Lp: f64,
    pub gamma_Rp: f64,
}

impl SingleDotDetectorParams {
    /// All primed widths equal to the unprimed ones.
    #[allow(non_snake_case)]
    pub fn symmetric(Gamma_L: f64, Gamma_R: f64, gamma_L: f64, gamma_R: f64) -> Self {
        SingleDotDetectorParams {
            Gamma_L,
            Gamma_R,
            Gamma_Lp: Gamma_L,
            Gamma_Rp: Gamma_R,
            gamma_L,
            gamma_R,
            gamma_Lp: gamma_L,
            gamma_Rp: gamma_R,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_width("Gamma_L", self.Gamma_L)?;
        check_width("Gamma_R", self.Gamma_R)?;
        check_width("Gamma_Lp", self.Gamma_Lp)?;
        check_width("Gamma_Rp", self.Gamma_Rp)?;
        check_width("gamma_L", self.gamma_L)?;
        check_width("gamma_R", self.gamma_R)?;
        check_width("gamma_Lp", self.gamma_Lp)?;
        check_width("gamma_Rp", self.gamma_Rp)?;
        if self.Gamma_L == 0.0 && self.Gamma_R == 0.0 {
            return Err(Error::InvalidParam {
                name: "Gamma_L",
                reason: "system sector is frozen: Gamma_L and Gamma_R are both zero".into(),
            });
        }
        Ok(())
    }
}

/// Bare double-dot parameters: emitter/collector widths, interdot hopping
/// and level detuning `epsilon = E2 - E1`.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleDotParams {
    pub Gamma_L: f64,
    pub Gamma_R: f64,
    pub Omega: f64,
    pub epsilon: f64,
}

impl DoubleDotParams {
    pub fn validate(&self) -> Result<()> {
        check_width("Gamma_L", self.Gamma_L)?;
        check_width("Gamma_R", self.Gamma_R)?;
        check_finite("Omega", self.Omega)?;
        check_finite("epsilon", self.epsilon)?;
        Ok(())
    }
}

/// Double dot plus detector. The system widths are not modified by the
/// detector charge (the dot-2 shift is small); the hopping may be
/// (`Omega_p`), and the detector widths carry primed variants for the
/// raised level `E0 + U1`.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleDotDetectorParams {
    pub Gamma_L: f64,
    pub Gamma_R: f64,
    pub Omega: f64,
    pub Omega_p: f64,
    pub epsilon: f64,
    pub gamma_L: f64,
    pub gamma_R: f64,
    pub gamma_Lp: f64,
    pub gamma_Rp: f64,
    pub U1: f64,
    pub U2: f64,
    pub regime: DetectorRegime,
}

impl DoubleDotDetectorParams {
    /// Detector widths unmodified by the system charge, hopping unmodified
    /// by the detector charge, no shift detuning, printed-equations regime.
    #[allow(non_snake_case)]
    pub fn symmetric(dot: DoubleDotParams, gamma_L: f64, gamma_R: f64) -> Self {
        DoubleDotDetectorParams {
            Gamma_L: dot.Gamma_L,
            Gamma_R: dot.Gamma_R,
            Omega: dot.Omega,
            Omega_p: dot.Omega,
            epsilon: dot.epsilon,
            gamma_L,
            gamma_R,
            gamma_Lp: gamma_L,
            gamma_Rp: gamma_R,
            U1: 0.0,
            U2: 0.0,
            regime: DetectorRegime::BlockedByDot1,
        }
    }

    /// The bare double-dot restriction of these parameters.
    pub fn double_dot(&self) -> DoubleDotParams {
        DoubleDotParams {
            Gamma_L: self.Gamma_L,
            Gamma_R: self.Gamma_R,
            Omega: self.Omega,
            epsilon: self.epsilon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.double_dot().validate()?;
        check_finite("Omega_p", self.Omega_p)?;
        check_width("gamma_L", self.gamma_L)?;
        check_width("gamma_R", self.gamma_R)?;
        check_width("gamma_Lp", self.gamma_Lp)?;
        check_width("gamma_Rp", self.gamma_Rp)?;
        check_width("U1", self.U1)?;
        check_width("U2", self.U2)?;
        if self.U1 < self.U2 {
            return Err(Error::InvalidParam {
                name: "U1",
                reason: format!("requires U1 >= U2, got U1 = {}, U2 = {}", self.U1, self.U2),
            });
        }
        Ok(())
    }

    /// Derive the regime from level energies instead of setting the flag
    /// directly; the flag is then consistent with the energies by
    /// construction.
    pub fn with_energies(mut self, cfg: &EnergyConfig) -> Result<Self> {
        cfg.validate()?;
        self.U1 = cfg.U1;
        self.U2 = cfg.U2;
        self.regime = classify_regime(cfg);
        self.validate()?;
        Ok(self)
    }
}

// Basis slots of the single dot + detector model.
mod m1 {
    pub const A: usize = 0; // system empty, detector empty
    pub const B: usize = 1; // system occupied, detector empty
    pub const AP: usize = 2; // system empty, detector occupied
    pub const BP: usize = 3; // system occupied, detector occupied
}

/// Rate matrix of the single dot + detector in the ordering
/// `(aa, bb, a'a', b'b')`:
///
/// ```text
/// d sigma_aa   / dt = -(gamma_L + Gamma_L) sigma_aa + gamma_R sigma_a'a' + Gamma_R sigma_bb
/// d sigma_bb   / dt = -Gamma_R sigma_bb + Gamma_L sigma_aa + (gamma_L' + gamma_R') sigma_b'b'
/// d sigma_a'a' / dt = -(gamma_R + Gamma_L') sigma_a'a' + gamma_L sigma_aa + Gamma_R' sigma_b'b'
/// d sigma_b'b' / dt = -(gamma_L' + gamma_R' + Gamma_R') sigma_b'b' + Gamma_L' sigma_a'a'
/// ```
///
/// While the system dot is occupied the detector level sits above its
/// emitter's Fermi energy, so the detector electron in `b'` escapes through
/// both barriers; no entry term feeds `b'` from `b`.
pub fn build_single_dot_detector(p: &SingleDotDetectorParams) -> Result<Liouvillian> {
    p.validate()?;
    let space = StateSpace::for_model(ModelKind::SingleDotDetector);
    let mut m = DMatrix::<f64>::zeros(4, 4);
    use m1::*;

    m[(A, A)] = -(p.gamma_L + p.Gamma_L);
    m[(A, B)] = p.Gamma_R;
    m[(A, AP)] = p.gamma_R;

    m[(B, A)] = p.Gamma_L;
    m[(B, B)] = -p.Gamma_R;
    m[(B, BP)] = p.gamma_Lp + p.gamma_Rp;

    m[(AP, A)] = p.gamma_L;
    m[(AP, AP)] = -(p.gamma_R + p.Gamma_Lp);
    m[(AP, BP)] = p.Gamma_Rp;

    m[(BP, AP)] = p.Gamma_Lp;
    m[(BP, BP)] = -(p.gamma_Lp + p.gamma_Rp + p.Gamma_Rp);

    Ok(Liouvillian::new(m, space))
}

// Basis slots of the bare double dot.
mod m2 {
    pub const A: usize = 0; // both dots empty
    pub const B: usize = 1; // dot 1 occupied
    pub const C: usize = 2; // dot 2 occupied
    pub const RE: usize = 3; // Re sigma_bc
    pub const IM: usize = 4; // Im sigma_bc
}

/// Bloch generator of the bare double dot in the ordering
/// `(aa, bb, cc, Re sigma_bc, Im sigma_bc)`:
///
/// ```text
/// d sigma_aa / dt = -Gamma_L sigma_aa + Gamma_R sigma_cc
/// d sigma_bb / dt =  Gamma_L sigma_aa - 2 Omega Im sigma_bc
/// d sigma_cc / dt = -Gamma_R sigma_cc + 2 Omega Im sigma_bc
/// d Re sigma_bc / dt = -epsilon Im sigma_bc - (Gamma_R/2) Re sigma_bc
/// d Im sigma_bc / dt =  epsilon Re sigma_bc + Omega (sigma_bb - sigma_cc)
///                       - (Gamma_R/2) Im sigma_bc
/// ```
///
/// The population rows are the real form of `+-i Omega (sigma_bc - sigma_cb)`;
/// only the collector-coupled state `c` decays, hence the `Gamma_R / 2`
/// coherence damping.
pub fn build_double_dot(p: &DoubleDotParams) -> Result<Liouvillian> {
    p.validate()?;
    let space = StateSpace::for_model(ModelKind::DoubleDot);
    let m = double_dot_matrix(p, 0.5 * p.Gamma_R);
    Ok(Liouvillian::new(m, space))
}

/// Double-dot equations with the coherence damping widened to
/// `(Gamma_R + gamma_L)/2`: the possibility of detector entry from dot 2
/// adds `gamma_L` to the decay channels of state `c` without moving any
/// population.
pub fn build_reduced_double_dot(p: &DoubleDotParams, gamma_l: f64) -> Result<Liouvillian> {
    p.validate()?;
    check_width("gamma_L", gamma_l)?;
    let space = StateSpace::for_model(ModelKind::ReducedDoubleDot);
    let m = double_dot_matrix(p, 0.5 * (p.Gamma_R + gamma_l));
    Ok(Liouvillian::new(m, space))
}

fn double_dot_matrix(p: &DoubleDotParams, dephasing: f64) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::zeros(5, 5);
    use m2::*;

    m[(A, A)] = -p.Gamma_L;
    m[(A, C)] = p.Gamma_R;

    m[(B, A)] = p.Gamma_L;
    m[(B, IM)] = -2.0 * p.Omega;

    m[(C, C)] = -p.Gamma_R;
    m[(C, IM)] = 2.0 * p.Omega;

    m[(RE, RE)] = -dephasing;
    m[(RE, IM)] = -p.epsilon;

    m[(IM, B)] = p.Omega;
    m[(IM, C)] = -p.Omega;
    m[(IM, RE)] = p.epsilon;
    m[(IM, IM)] = -dephasing;

    m
}

// Basis slots of the double dot + detector model.
mod m3 {
    pub const A: usize = 0;
    pub const B: usize = 1;
    pub const C: usize = 2;
    pub const AP: usize = 3;
    pub const BP: usize = 4;
    pub const CP: usize = 5;
    pub const RE1: usize = 6; // Re sigma_bc
    pub const IM1: usize = 7; // Im sigma_bc
    pub const RE2: usize = 8; // Re sigma_b'c'
    pub const IM2: usize = 9; // Im sigma_b'c'
}

/// Generator of the double dot + detector in the ordering
/// `(aa, bb, cc, a'a', b'b', c'c', Re/Im sigma_bc, Re/Im sigma_b'c')`.
///
/// In the `BlockedByDot1` regime this is, row by row,
///
/// ```text
/// d sigma_aa   / dt = -(Gamma_L + gamma_L) sigma_aa + gamma_R sigma_a'a' + Gamma_R sigma_cc
/// d sigma_a'a' / dt = -(Gamma_L + gamma_R) sigma_a'a' + gamma_L sigma_aa + Gamma_R sigma_c'c'
/// d sigma_bb   / dt =  Gamma_L sigma_aa + i Omega (sigma_bc - sigma_cb)
///                      + (gamma_L' + gamma_R') sigma_b'b'
/// d sigma_b'b' / dt =  Gamma_L sigma_a'a' + i Omega' (sigma_b'c' - sigma_c'b')
///                      - (gamma_L' + gamma_R') sigma_b'b'
/// d sigma_cc   / dt = -(Gamma_R + gamma_L) sigma_cc - i Omega (sigma_bc - sigma_cb)
///                      + gamma_R sigma_c'c'
/// d sigma_c'c' / dt = -(Gamma_R + gamma_R) sigma_c'c' - i Omega' (sigma_b'c' - sigma_c'b')
///                      + gamma_L sigma_cc
/// d sigma_bc   / dt =  i epsilon sigma_bc + i Omega (sigma_bb - sigma_cc)
///                      - (Gamma_R + gamma_L)/2 sigma_bc + (gamma_R + gamma_R')/2 sigma_b'c'
/// d sigma_b'c' / dt =  i (epsilon - U1 + U2) sigma_b'c' + i Omega' (sigma_b'b' - sigma_c'c')
///                      - (Gamma_R + gamma_R + gamma_L' + gamma_R')/2 sigma_b'c'
/// ```
///
/// The other regimes toggle the detector-entry channel per system state:
/// `NeverBlocked` adds the `b -> b'` entry at `gamma_L` together with the
/// coherent pair transfer `sigma_bc -> sigma_b'c'` (entry then carries no
/// which-path information), and `AlwaysBlocked` removes every entry term,
/// which also removes the `gamma_L` piece of the coherence damping. Exit
/// terms never toggle: an occupied detector always drains.
pub fn build_double_dot_detector(p: &DoubleDotDetectorParams) -> Result<Liouvillian> {
    p.validate()?;
    let space = StateSpace::for_model(ModelKind::DoubleDotDetector);
    let mut m = DMatrix::<f64>::zeros(10, 10);
    use m3::*;

    // Entry rates per system state, toggled by the regime.
    let entry_a = if p.regime == DetectorRegime::AlwaysBlocked { 0.0 } else { p.gamma_L };
    let entry_b = if p.regime.open_when_dot1() { p.gamma_L } else { 0.0 };
    let entry_c = if p.regime.open_when_dot2() { p.gamma_L } else { 0.0 };
    // Entry preserves the system state, so when both members of the (b, c)
    // pair admit it the coherence transfers instead of dephasing.
    let entry_pair = if p.regime.open_when_dot1() && p.regime.open_when_dot2() {
        p.gamma_L
    } else {
        0.0
    };

    let dephasing_bare = 0.5 * (p.Gamma_R + entry_b + entry_c);
    let dephasing_primed = 0.5 * (p.Gamma_R + p.gamma_R + p.gamma_Lp + p.gamma_Rp);
    let exit_pair = 0.5 * (p.gamma_R + p.gamma_Rp);
    let detuning_primed = p.epsilon - p.U1 + p.U2;

    m[(A, A)] = -(p.Gamma_L + entry_a);
    m[(A, AP)] = p.gamma_R;
    m[(A, C)] = p.Gamma_R;

    m[(AP, AP)] = -(p.Gamma_L + p.gamma_R);
    m[(AP, A)] = entry_a;
    m[(AP, CP)] = p.Gamma_R;

    m[(B, A)] = p.Gamma_L;
    m[(B, B)] = -entry_b;
    m[(B, BP)] = p.gamma_Lp + p.gamma_Rp;
    m[(B, IM1)] = -2.0 * p.Omega;

    m[(BP, AP)] = p.Gamma_L;
    m[(BP, B)] = entry_b;
    m[(BP, BP)] = -(p.gamma_Lp + p.gamma_Rp);
    m[(BP, IM2)] = -2.0 * p.Omega_p;

    m[(C, C)] = -(p.Gamma_R + entry_c);
    m[(C, CP)] = p.gamma_R;
    m[(C, IM1)] = 2.0 * p.Omega;

    m[(CP, CP)] = -(p.Gamma_R + p.gamma_R);
    m[(CP, C)] = entry_c;
    m[(CP, IM2)] = 2.0 * p.Omega_p;

    m[(RE1, RE1)] = -dephasing_bare;
    m[(RE1, IM1)] = -p.epsilon;
    m[(RE1, RE2)] = exit_pair;

    m[(IM1, B)] = p.Omega;
    m[(IM1, C)] = -p.Omega;
    m[(IM1, RE1)] = p.epsilon;
    m[(IM1, IM1)] = -dephasing_bare;
    m[(IM1, IM2)] = exit_pair;

    m[(RE2, RE2)] = -dephasing_primed;
    m[(RE2, IM2)] = -detuning_primed;
    m[(RE2, RE1)] = entry_pair;

    m[(IM2, BP)] = p.Omega_p;
    m[(IM2, CP)] = -p.Omega_p;
    m[(IM2, RE2)] = detuning_primed;
    m[(IM2, IM2)] = -dephasing_primed;
    m[(IM2, IM1)] = entry_pair;

    Ok(Liouvillian::new(m, space))
}
