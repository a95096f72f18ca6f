//! The η weight N(η), the transverse weight T(p₁) and the modal distribution built
//! from them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::Spin;
use crate::error::{Error, Result};
use crate::kinematics::{dressed_momentum, on_shell, CorrelationSpec, OnShellMomentum};
use crate::quadrature::{composite, GaussLegendre};

/// How N(η) is built from its order n and width Δη.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralShape {
    /// N ∝ exp(−|(η − ⟨η⟩)/Δη|ⁿ).
    SuperGaussian,
    /// N is the cosine transform of exp(−|uΔη|ⁿ), so the envelope in x₃ is a flat-topped
    /// super-Gaussian of order n.
    #[default]
    FlatTopEnvelope,
}

const FLAT_TOP_REACH: f64 = 40.0;

#[derive(Debug, Clone, PartialEq)]
pub struct EtaWeight {
    pub center: f64,
    pub width: f64,
    pub order: f64,
    pub shape: SpectralShape,
    norm: f64,
}

impl EtaWeight {
    pub fn new(center: f64, width: f64, order: f64, shape: SpectralShape) -> Self {
        let mut n = EtaWeight {
            center,
            width,
            order,
            shape,
            norm: 1.0,
        };
        let (lo, hi) = n.support();
        let total = composite(|eta| n.raw(eta).powi(2), lo, hi, 64, 16);
        n.norm = 1.0 / total.sqrt();
        n
    }

    fn raw(&self, eta: f64) -> f64 {
        let z = (eta - self.center) / self.width;
        match self.shape {
            SpectralShape::SuperGaussian => (-z.abs().powf(self.order)).exp(),
            SpectralShape::FlatTopEnvelope => {
                let reach = 39.0_f64.powf(1.0 / self.order);
                let n = self.order;
                2.0 * composite(|s| (-s.powf(n)).exp() * (z * s).cos(), 0.0, reach, 8, 16)
            }
        }
    }

    /// Normalized amplitude, ∫N² dη = 1 over [`EtaWeight::support`].
    pub fn amplitude(&self, eta: f64) -> f64 {
        self.norm * self.raw(eta)
    }

    /// Interval carrying the weight: |N| < 1e-16 max outside for the super-Gaussian,
    /// ±40Δη for the flat-top envelope.
    pub fn support(&self) -> (f64, f64) {
        let reach = match self.shape {
            SpectralShape::SuperGaussian => (16.0 * std::f64::consts::LN_10).powf(1.0 / self.order),
            SpectralShape::FlatTopEnvelope => FLAT_TOP_REACH,
        };
        (self.center - reach * self.width, self.center + reach * self.width)
    }

    pub fn relative_width(&self) -> f64 {
        self.width / self.center.abs()
    }

    /// (η − ⟨η⟩, weight·N) on a composite Gauss–Legendre rule over the support.
    fn tabulate(&self) -> Vec<(f64, f64)> {
        let (lo, hi) = self.support();
        let rule = GaussLegendre::new(16);
        let panels = 64;
        let h = (hi - lo) / panels as f64;
        let mut out = Vec::with_capacity(panels * rule.len());
        for k in 0..panels {
            let mid = lo + h * (k as f64 + 0.5);
            for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                let eta = mid + 0.5 * h * t;
                out.push((eta - self.center, 0.5 * h * w * self.amplitude(eta)));
            }
        }
        out
    }

    /// ∫N(η)e^{i(η−⟨η⟩)u}dη, the envelope seen along u.
    pub fn envelope_profile(&self, u: f64) -> Complex64 {
        profile_from_table(&self.tabulate(), u)
    }

    /// u at which |envelope_profile|² falls to half its value at u = 0.
    pub fn half_width_u(&self) -> f64 {
        let table = self.tabulate();
        let peak = profile_from_table(&table, 0.0).norm_sqr();
        let f = |u: f64| profile_from_table(&table, u).norm_sqr() - 0.5 * peak;
        let step = 0.02 / self.width;
        let mut a = 0.0;
        let mut b = step;
        while f(b) > 0.0 {
            a = b;
            b += step;
            assert!(b < 1e3 / self.width, "envelope never reaches half maximum");
        }
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if f(m) > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    /// c_N = Δη × (half width at half maximum in u). Depends only on shape and order.
    pub fn calibration_constant(&self) -> f64 {
        self.half_width_u() * self.width
    }
}

fn profile_from_table(table: &[(f64, f64)], u: f64) -> Complex64 {
    table
        .iter()
        .map(|&(d, a)| Complex64::from_polar(a, d * u))
        .sum()
}

pub fn eta_weight(n: &EtaWeight, eta: f64) -> Complex64 {
    Complex64::from(n.amplitude(eta))
}

/// Width Δη giving a half-length Δx₃ along x₃ for the given kinematic factor |v_a − 𝒫₃/ℰ|.
pub fn width_for_envelope(shape: SpectralShape, order: f64, delta_x3: f64, kinematic: f64) -> f64 {
    let c = EtaWeight::new(0.0, 1.0, order, shape).calibration_constant();
    c * kinematic / delta_x3
}

/// T(p₁) with |T|² = (w/√(2π)) exp(−w²p₁²/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseWeight {
    pub w: f64,
}

impl TransverseWeight {
    pub fn amplitude(&self, p1: f64) -> f64 {
        (self.w / (2.0 * PI).sqrt()).sqrt() * (-0.25 * self.w * self.w * p1 * p1).exp()
    }

    pub fn support(&self) -> (f64, f64) {
        (-6.0 / self.w, 6.0 / self.w)
    }
}

/// |p₃/E − v_a|^{1/2} at (η, p⊥).
pub fn jacobian_factor(spec: &CorrelationSpec, eta: f64, p_perp: f64) -> Result<f64> {
    let p = on_shell(spec, eta, p_perp)?;
    Ok(p.velocity_gap(spec.v_a)?.sqrt())
}

/// One quadrature node of the modal distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub momentum: OnShellMomentum,
    /// Quadrature weight times N(η) T(p₁) |p₃/E − v_a|^{−1/2}.
    pub amplitude: f64,
    /// Quadrature weight times |N(η)|²|T(p₁)|².
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModalDistribution {
    pub spec: CorrelationSpec,
    pub eta: EtaWeight,
    pub transverse: TransverseWeight,
    pub spin: Spin,
}

impl ModalDistribution {
    /// Gauss–Legendre nodes over the η and p₁ supports, η-major. Nodes whose weight is
    /// below 1e-14 of the peak and that fall outside the real-root region are dropped;
    /// anywhere else an evanescent or singular node is an error.
    pub fn modes(&self, n_eta: usize, n_p1: usize) -> Result<Vec<Mode>> {
        let (elo, ehi) = self.eta.support();
        let (plo, phi) = self.transverse.support();
        let ge = GaussLegendre::on_interval(n_eta, elo, ehi);
        let gp = GaussLegendre::on_interval(n_p1, plo, phi);
        let peak = self.eta.amplitude(self.eta.center).abs() * self.transverse.amplitude(0.0);
        let mut out = Vec::with_capacity(n_eta * n_p1);
        for (&eta, &we) in ge.nodes.iter().zip(&ge.weights) {
            let n = self.eta.amplitude(eta);
            for (&p1, &wp) in gp.nodes.iter().zip(&gp.weights) {
                let t = self.transverse.amplitude(p1);
                let p = match on_shell(&self.spec, eta, p1) {
                    Ok(p) => p,
                    Err(_) if (n * t).abs() <= 1e-14 * peak => continue,
                    Err(e) => return Err(e),
                };
                let j = match p.velocity_gap(self.spec.v_a) {
                    Ok(j) => j,
                    Err(_) if (n * t).abs() <= 1e-14 * peak => continue,
                    Err(e) => return Err(e),
                };
                out.push(Mode {
                    momentum: p,
                    amplitude: we * wp * n * t / j.sqrt(),
                    probability: we * wp * n * n * t * t,
                });
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapRow {
    pub eta: f64,
    pub p1: f64,
    pub q3_over_qminus: f64,
    pub weight: f64,
}

/// Momentum-density map: every (η, p₁) point dressed at ξ*, with its weight |N|²|T|².
/// Returns the rows and the number of skipped evanescent points.
pub fn momentum_density_map(
    dist: &ModalDistribution,
    xi_star: f64,
    etas: &[f64],
    p1s: &[f64],
) -> (Vec<MapRow>, usize) {
    let mut rows = Vec::with_capacity(etas.len() * p1s.len());
    let mut skipped = 0;
    for &eta in etas {
        let n = dist.eta.amplitude(eta);
        for &p1 in p1s {
            match ridge_value(&dist.spec, eta, p1, xi_star) {
                Ok(r) => {
                    let t = dist.transverse.amplitude(p1);
                    rows.push(MapRow {
                        eta,
                        p1,
                        q3_over_qminus: r,
                        weight: n * n * t * t,
                    })
                }
                Err(_) => skipped += 1,
            }
        }
    }
    (rows, skipped)
}

/// q₃/q₋ of the dressed momentum at (η, p₁).
pub fn ridge_value(spec: &CorrelationSpec, eta: f64, p1: f64, xi_star: f64) -> Result<f64> {
    let p = on_shell(spec, eta, p1)?;
    let q = dressed_momentum(&p.four_vector(), xi_star)?.q;
    Ok(q.x3 / q.minus())
}

/// Checks that every mode is subluminal, as any superposition of massive modes must be.
pub fn assert_subluminal(modes: &[Mode]) -> Result<()> {
    for m in modes {
        let v = m.momentum.p3 / m.momentum.energy;
        if !(v.abs() < 1.0) {
            return Err(Error::invalid("modes", format!("mode with |p3/E| = {v} >= 1")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_top_calibration_matches_closed_form() {
        let n = EtaWeight::new(1.0, 1e-3, 10.0, SpectralShape::FlatTopEnvelope);
        let expected = (std::f64::consts::LN_2 / 2.0).powf(0.1);
        let c = n.calibration_constant();
        assert!((c - expected).abs() < 1e-4, "c_N = {c}, closed form {expected}");
    }

    #[test]
    fn transverse_support_is_six_over_w() {
        let t = TransverseWeight { w: 170.0 };
        assert_eq!(t.support(), (-6.0 / 170.0, 6.0 / 170.0));
    }
}
