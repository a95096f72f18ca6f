//! How long the density peak stays inside the envelope that follows the expectation
//! trajectory.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{CachedFieldIntegrals, FieldProfile};
use crate::kinematics::{drift_velocity_1d, peak_velocity_infield, CorrelationSpec};
use crate::spectral::EtaWeight;
use crate::trajectory::{envelope_center_at, peak_track_at};

/// Δx₃ = c_N |v_a − 𝒫₃/ℰ| / Δη, with c_N fixed by the shape of N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeModel {
    pub delta_x3: f64,
    pub delta_eta: f64,
    pub kinematic: f64,
    pub c_n: f64,
}

impl EnvelopeModel {
    pub fn new(spec: &CorrelationSpec, n: &EtaWeight) -> Self {
        let kinematic = (spec.v_a - spec.reference().p3_over_e()).abs();
        let c_n = n.calibration_constant();
        EnvelopeModel {
            delta_x3: c_n * kinematic / n.width,
            delta_eta: n.width,
            kinematic,
            c_n,
        }
    }
}

pub fn envelope_length(spec: &CorrelationSpec, n: &EtaWeight) -> f64 {
    EnvelopeModel::new(spec, n).delta_x3
}

/// Rising and falling edges ⟨x̃₃⟩_centre ± Δx₃/(1 − 𝒫₃/ℰ).
pub fn edge_trajectories(
    spec: &CorrelationSpec,
    cache: &CachedFieldIntegrals,
    env: &EnvelopeModel,
    x_minus: f64,
) -> Result<(f64, f64)> {
    if spec.v_a == 1.0 {
        return Err(Error::LuminalVa);
    }
    let c = envelope_center_at(spec, cache, x_minus)?;
    let half = env.delta_x3 / (1.0 - spec.reference().p3_over_e());
    Ok((c + half, c - half))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LifetimeReport {
    pub delta_x3: f64,
    /// Closed form for a constant profile or no field, absent otherwise.
    pub delta_x0_analytic: Option<f64>,
    pub delta_x0_numeric: f64,
    /// x₋ of the exits nearest x₋ = 0, earlier one first.
    pub roots: (f64, f64),
    /// x₀ = x₋ + x̃_f3 at the two roots.
    pub x0_roots: (f64, f64),
}

/// Constant field: 2Δx₃/|1 − 𝒫₃/ℰ| · |(1 − v_1D)/(v_f* − v_1D)|.
pub fn lifetime_constant_field(delta_x3: f64, p3_over_e: f64, v_fstar: f64, v_1d: f64) -> f64 {
    2.0 * delta_x3 / (1.0 - p3_over_e).abs() * ((1.0 - v_1d) / (v_fstar - v_1d)).abs()
}

/// No field: 2Δx₃/|v_a − v_1D| with v_1D = 𝒫₃/ℰ.
pub fn lifetime_field_free(delta_x3: f64, v_a: f64, p3_over_e: f64) -> f64 {
    2.0 * delta_x3 / (v_a - p3_over_e).abs()
}

/// Roots of x̃_f3 − edge within the cache range, searched outward from x₋ = 0, and the
/// resulting duration Δx₀.
pub fn peak_lifetime(spec: &CorrelationSpec, cache: &CachedFieldIntegrals, env: &EnvelopeModel) -> Result<LifetimeReport> {
    let (lo, hi) = cache.range();
    let gap = |x: f64, rising: bool| -> Result<f64> {
        let (r, f) = edge_trajectories(spec, cache, env, x)?;
        let p = peak_track_at(spec, cache, x)?;
        Ok(p - if rising { r } else { f })
    };
    let exit = |dir: f64| -> Result<f64> {
        let limit = if dir > 0.0 { hi } else { lo };
        if limit == 0.0 {
            return Err(Error::NoIntersection { lo, hi });
        }
        let n = 4096;
        let h = limit / n as f64;
        let mut prev = [gap(0.0, true)?, gap(0.0, false)?];
        for k in 1..=n {
            let x = h * k as f64;
            for (j, rising) in [true, false].into_iter().enumerate() {
                let g = gap(x, rising)?;
                if g == 0.0 || g.signum() != prev[j].signum() {
                    return bisect(|t| gap(t, rising), x - h, x);
                }
                prev[j] = g;
            }
        }
        Err(Error::NoIntersection { lo, hi })
    };
    let late = exit(1.0)?;
    let early = exit(-1.0)?;
    let x0 = |x: f64| -> Result<f64> { Ok(x + peak_track_at(spec, cache, x)?) };
    let x0_roots = (x0(early)?, x0(late)?);
    let field = cache.field();
    let r = spec.reference().p3_over_e();
    let pm = spec.p_minus_ref;
    let analytic = if field.is_off() {
        Some(lifetime_field_free(env.delta_x3, spec.v_a, r))
    } else if let FieldProfile::Constant { xi_star } = field.profile {
        let vf = peak_velocity_infield(spec.v_a, xi_star, pm);
        Some(lifetime_constant_field(env.delta_x3, r, vf, drift_velocity_1d(r, xi_star, pm)))
    } else {
        None
    };
    Ok(LifetimeReport {
        delta_x3: env.delta_x3,
        delta_x0_analytic: analytic,
        delta_x0_numeric: (x0_roots.1 - x0_roots.0).abs(),
        roots: (early, late),
        x0_roots,
    })
}

fn bisect(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<f64> {
    let mut fa = f(a)?;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        if (b - a).abs() <= 1e-13 * a.abs().max(b.abs()).max(1.0) {
            break;
        }
    }
    Ok(0.5 * (a + b))
}
