//! Closed-form dc currents used as oracles by the tests and sweeps.

use crate::error::{Error, Result};
use crate::models::DoubleDotParams;

/// Resonant dc current through a single dot,
/// `I = Gamma_L Gamma_R / (Gamma_L + Gamma_R)`.
pub fn single_dot_dc(gamma_l: f64, gamma_r: f64) -> Result<f64> {
    if gamma_l < 0.0 || gamma_r < 0.0 {
        return Err(Error::InvalidParam {
            name: "Gamma",
            reason: format!("widths must be nonnegative, got ({gamma_l}, {gamma_r})"),
        });
    }
    if gamma_l == 0.0 && gamma_r == 0.0 {
        return Err(Error::UndefinedCurrent(
            "both widths vanish; no transport channel".into(),
        ));
    }
    Ok(gamma_l * gamma_r / (gamma_l + gamma_r))
}

/// Resonant dc current through the bare double dot,
/// `I = Gamma_R Omega^2 / (epsilon^2 + Gamma_R^2/4 + Omega^2 (2 + Gamma_R/Gamma_L))`.
pub fn double_dot_dc(p: &DoubleDotParams) -> Result<f64> {
    dephased_double_dot_dc(p, 0.0)
}

/// Dc current of the double dot with the coherence damping widened to
/// `Gamma_d = (Gamma_R + gamma_L)/2` by the detector entry channel:
///
/// ```text
/// I = Gamma_R / (2 + Gamma_R/Gamma_L + Gamma_R (Gamma_d^2 + epsilon^2) / (2 Omega^2 Gamma_d))
/// ```
///
/// At `gamma_L = 0` this reduces to [`double_dot_dc`]. The expression is
/// validated against the stationary solution of the reduced generator by the
/// test suite on every run.
pub fn dephased_double_dot_dc(p: &DoubleDotParams, gamma_l: f64) -> Result<f64> {
    p.validate()?;
    if gamma_l < 0.0 {
        return Err(Error::InvalidParam {
            name: "gamma_L",
            reason: format!("width must be nonnegative, got {gamma_l}"),
        });
    }
    if p.Gamma_L == 0.0 {
        return Err(Error::BlockedEmitter(
            "Gamma_L = 0: no carriers enter and the closed form divides by Gamma_L".into(),
        ));
    }
    if p.Omega == 0.0 {
        return Ok(0.0);
    }
    if p.Gamma_R == 0.0 {
        // Nothing reaches the collector; the dephasing width stays positive
        // whenever gamma_L > 0, and at gamma_L = 0 the current vanishes with
        // Gamma_R anyway.
        return Ok(0.0);
    }
    let gamma_d = 0.5 * (p.Gamma_R + gamma_l);
    let denom = 2.0 + p.Gamma_R / p.Gamma_L
        + p.Gamma_R * (gamma_d * gamma_d + p.epsilon * p.epsilon)
            / (2.0 * p.Omega * p.Omega * gamma_d);
    Ok(p.Gamma_R / denom)
}
