//! On-shell and dressed-shell momenta under the correlation η = p₀ − v_a p₃.

use serde::{Deserialize, Serialize};

use crate::algebra::{FourVector, MASS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Negative,
    Positive,
    #[default]
    Auto,
}

impl Branch {
    /// Auto picks the negative root for |v_a| ≤ 1 and the positive root otherwise.
    pub fn resolve(self, v_a: f64) -> Branch {
        match self {
            Branch::Auto if v_a.abs() <= 1.0 => Branch::Negative,
            Branch::Auto => Branch::Positive,
            b => b,
        }
    }

    pub fn other(self) -> Branch {
        match self {
            Branch::Negative => Branch::Positive,
            Branch::Positive => Branch::Negative,
            Branch::Auto => Branch::Auto,
        }
    }

    fn sign(self, v_a: f64) -> f64 {
        match self.resolve(v_a) {
            Branch::Positive => 1.0,
            _ => -1.0,
        }
    }
}

/// The correlation between η and the momentum, anchored at the expectation point
/// p₋ = 𝒫₋, p⊥ = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationSpec {
    pub v_a: f64,
    pub branch: Branch,
    pub p_minus_ref: f64,
}

/// On-axis momentum with p₋ = 𝒫₋ and the η it has under a given v_a.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferencePoint {
    pub p3: f64,
    pub energy: f64,
    pub eta: f64,
}

impl ReferencePoint {
    pub fn p3_over_e(&self) -> f64 {
        self.p3 / self.energy
    }
}

impl CorrelationSpec {
    pub fn new(v_a: f64, branch: Branch, p_minus_ref: f64) -> Self {
        CorrelationSpec {
            v_a,
            branch,
            p_minus_ref,
        }
    }

    /// 𝒫₃, ℰ and ⟨η⟩ = ℰ − v_a𝒫₃.
    pub fn reference(&self) -> ReferencePoint {
        let (p3, energy) = on_axis(self.p_minus_ref);
        ReferencePoint {
            p3,
            energy,
            eta: energy - self.v_a * p3,
        }
    }
}

/// (p₃, E) of the on-axis on-shell momentum with the given p₋.
pub fn on_axis(p_minus: f64) -> (f64, f64) {
    let p3 = (MASS * MASS - p_minus * p_minus) / (2.0 * p_minus);
    let e = (MASS * MASS + p_minus * p_minus) / (2.0 * p_minus);
    (p3, e)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnShellMomentum {
    pub eta: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub energy: f64,
}

impl OnShellMomentum {
    pub fn p_minus(&self) -> f64 {
        if self.p3 > 0.0 {
            (MASS * MASS + self.p1 * self.p1 + self.p2 * self.p2) / (self.energy + self.p3)
        } else {
            self.energy - self.p3
        }
    }

    pub fn four_vector(&self) -> FourVector {
        FourVector::new(self.energy, self.p1, self.p2, self.p3)
    }

    /// |p₃/E − v_a|, the inverse of |dη/dp₃|·E. Vanishes at the double root of the slice,
    /// where it only survives as rounding noise of order √ε, hence the 1e-6 floor.
    pub fn velocity_gap(&self, v_a: f64) -> Result<f64> {
        let g = (self.p3 / self.energy - v_a).abs();
        if g < 1e-6 {
            return Err(Error::SingularSlice { v_a, eta: self.eta });
        }
        Ok(g)
    }
}

/// p₃ on the η-slice from the mass-shell quadratic, or the single finite root when |v_a| = 1.
pub fn longitudinal_momentum(spec: &CorrelationSpec, eta: f64, p_perp: f64) -> Result<f64> {
    let v = spec.v_a;
    let mt2 = MASS * MASS + p_perp * p_perp;
    if (v.abs() - 1.0).abs() < 1e-12 {
        let rad = eta * eta - mt2;
        if eta <= 0.0 || rad <= 0.0 {
            return Err(Error::EvanescentMode {
                eta,
                p_perp,
                radicand: rad,
            });
        }
        return Ok(-v.signum() * rad / (2.0 * eta));
    }
    let g2 = 1.0 / (1.0 - v * v);
    let lead = eta * g2;
    let scale = (lead * lead).max(g2.abs() * mt2);
    let mut rad = lead * lead - g2 * mt2;
    if rad < 0.0 {
        if rad < -1e-12 * scale {
            return Err(Error::EvanescentMode {
                eta,
                p_perp,
                radicand: rad,
            });
        }
        rad = 0.0;
    }
    Ok(lead * v + spec.branch.sign(v) * rad.sqrt())
}

/// Full on-shell momentum at (η, p₁) with p₂ = 0.
pub fn on_shell(spec: &CorrelationSpec, eta: f64, p1: f64) -> Result<OnShellMomentum> {
    let p3 = longitudinal_momentum(spec, eta, p1)?;
    Ok(OnShellMomentum {
        eta,
        p1,
        p2: 0.0,
        p3,
        energy: (MASS * MASS + p1 * p1 + p3 * p3).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedMomentum {
    pub q: FourVector,
    pub p: FourVector,
    pub xi_star: f64,
}

impl DressedMomentum {
    /// q₀² − |q|² − m² − e²ξ*²/2, which should vanish.
    pub fn shell_residual(&self) -> f64 {
        self.q.dot(&self.q) - MASS * MASS - 0.5 * self.xi_star * self.xi_star
    }
}

/// q = p + [e²ξ*²/(4p₋)] n.
pub fn dressed_momentum(p: &FourVector, xi_star: f64) -> Result<DressedMomentum> {
    let pm = p.minus();
    if pm <= 0.0 {
        return Err(Error::NonPositiveMinus(pm));
    }
    let shift = xi_star * xi_star / (4.0 * pm);
    let q = FourVector::new(p.t + shift, p.x1, p.x2, p.x3 + shift);
    Ok(DressedMomentum {
        q,
        p: *p,
        xi_star,
    })
}

/// λ(η, q₋) = (1 − v_f*)/(1 − v_a)·η − (v_a − v_f*)/(1 − v_a)·q₋ + (1 − v_f*)ξ*²/(4q₋).
pub fn lambda_surface(eta: f64, q_minus: f64, v_a: f64, v_fstar: f64, xi_star: f64) -> Result<f64> {
    if v_a == 1.0 {
        return Err(Error::LuminalVa);
    }
    if q_minus <= 0.0 {
        return Err(Error::NonPositiveMinus(q_minus));
    }
    let d = 1.0 - v_a;
    Ok((1.0 - v_fstar) / d * eta - (v_a - v_fstar) / d * q_minus
        + (1.0 - v_fstar) * xi_star * xi_star / (4.0 * q_minus))
}

/// v_a that yields peak velocity v_f* at field strength ξ*.
pub fn design_va(v_fstar: f64, xi_star: f64, p_minus: f64) -> Result<f64> {
    let x = xi_star * xi_star / (4.0 * p_minus * p_minus);
    let den = 1.0 - (1.0 - v_fstar) * x;
    if den.abs() < 1e-12 {
        return Err(Error::DesignerSingular { v_fstar });
    }
    Ok((v_fstar - (1.0 - v_fstar) * x) / den)
}

/// Cycle-averaged peak velocity at local field strength ξ.
pub fn peak_velocity_infield(v_a: f64, xi: f64, p_minus: f64) -> f64 {
    let y = (1.0 - v_a) * xi * xi / (4.0 * p_minus * p_minus);
    (v_a + y) / (1.0 + y)
}

/// Drift velocity of a planar wavepacket: the peak velocity with v_a replaced by 𝒫₃/ℰ.
pub fn drift_velocity_1d(p3_over_e: f64, xi: f64, p_minus: f64) -> f64 {
    peak_velocity_infield(p3_over_e, xi, p_minus)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeCheck {
    pub free_slope: f64,
    pub dressed_slope: f64,
}

/// Secant slopes (dE/dp₃ and dq₀/dq₃) along the η0 slice next to p⊥ = 0.
///
/// The slice is symmetric in p₁, so both quantities are stationary at p₁ = 0; the secant
/// uses p₁ = h and p₁ = 2h.
pub fn slope_check(spec: &CorrelationSpec, eta0: f64, xi_star: f64) -> Result<SlopeCheck> {
    let h = 1e-3;
    let a = on_shell(spec, eta0, h)?;
    let b = on_shell(spec, eta0, 2.0 * h)?;
    let free_slope = (b.energy - a.energy) / (b.p3 - a.p3);
    let qa = dressed_momentum(&a.four_vector(), xi_star)?.q;
    let qb = dressed_momentum(&b.four_vector(), xi_star)?.q;
    let dressed_slope = (qb.t - qa.t) / (qb.x3 - qa.x3);
    Ok(SlopeCheck {
        free_slope,
        dressed_slope,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingularityDiagnostic {
    /// v_a equals p₃/E on the η slice (double root of the slice quadratic).
    pub singular: bool,
    /// |v_a| = 1, where the slice quadratic collapses to a single finite branch.
    pub luminal: bool,
}

impl SingularityDiagnostic {
    pub fn is_clean(&self) -> bool {
        !self.singular && !self.luminal
    }
}

/// The slice η has a double root (v_a = p₃/E) exactly when η² = m²(1 − v_a²).
pub fn singularity_guard(v_a: f64, eta: f64) -> SingularityDiagnostic {
    let luminal = (v_a.abs() - 1.0).abs() < 1e-12;
    let target = MASS * MASS * (1.0 - v_a * v_a);
    let singular = !luminal && target > 0.0 && (eta * eta - target).abs() <= 1e-9 * target.max(eta * eta);
    SingularityDiagnostic { singular, luminal }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_point_at_three() {
        let r = CorrelationSpec::new(0.0, Branch::Auto, 3.0).reference();
        assert!((r.p3 + 4.0 / 3.0).abs() < 1e-15);
        assert!((r.energy - 5.0 / 3.0).abs() < 1e-15);
        assert!((r.p3_over_e() + 0.8).abs() < 1e-15);
    }

    #[test]
    fn stable_minus_component_for_forward_momenta() {
        let spec = CorrelationSpec::new(0.0, Branch::Positive, 3.0);
        let p = on_shell(&spec, 1e4, 0.0).unwrap();
        assert!((p.p_minus() * (p.energy + p.p3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn luminal_branch_rejects_counter_propagating_content() {
        let spec = CorrelationSpec::new(1.0, Branch::Auto, 3.0);
        assert!(matches!(
            longitudinal_momentum(&spec, 1.5, 2.0),
            Err(Error::EvanescentMode { .. })
        ));
    }

    #[test]
    fn lambda_rejects_luminal_va() {
        assert_eq!(lambda_surface(1.0, 3.0, 1.0, 0.0, 3.0), Err(Error::LuminalVa));
    }
}
