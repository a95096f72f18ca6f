//! Peak and expectation-value trajectories in the light-front variable x₋.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::CachedFieldIntegrals;
use crate::kinematics::{drift_velocity_1d, peak_velocity_infield, CorrelationSpec};
use crate::spectral::ModalDistribution;
use crate::synthesis::{Axis, WavepacketModel};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct TrajectorySample {
    pub x_minus: f64,
    pub xf1: f64,
    pub xf2: f64,
    pub xf3: f64,
    pub xf3_tilde: f64,
    pub ex1: f64,
    pub ex2: f64,
    pub ex3: f64,
    pub ex3_tilde: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub samples: Vec<TrajectorySample>,
    /// Velocity of the co-moving frame the x₃ columns are measured in (0 = lab).
    pub frame_velocity: f64,
}

fn check_va(spec: &CorrelationSpec) -> Result<()> {
    if spec.v_a == 1.0 {
        Err(Error::LuminalVa)
    } else {
        Ok(())
    }
}

/// Cycle-averaged peak position x̃_f3 = [v_a/(1−v_a)]x₋ + Ĩ₂/(2𝒫₋²).
pub fn peak_track_at(spec: &CorrelationSpec, cache: &CachedFieldIntegrals, x_minus: f64) -> Result<f64> {
    check_va(spec)?;
    let pm = spec.p_minus_ref;
    let fi = cache.integrals(x_minus)?;
    Ok(spec.v_a / (1.0 - spec.v_a) * x_minus + fi.i2_avg / (2.0 * pm * pm))
}

/// Envelope centre (𝒫₃/𝒫₋)x₋ + Ĩ₂/(2𝒫₋²).
pub fn envelope_center_at(spec: &CorrelationSpec, cache: &CachedFieldIntegrals, x_minus: f64) -> Result<f64> {
    let pm = spec.p_minus_ref;
    let r = spec.reference();
    let fi = cache.integrals(x_minus)?;
    Ok(r.p3 / pm * x_minus + fi.i2_avg / (2.0 * pm * pm))
}

pub fn peak_track(model: &WavepacketModel, x_minus: f64) -> Result<f64> {
    peak_track_at(&model.dist.spec, &model.cache, x_minus)
}

pub fn envelope_center(model: &WavepacketModel, x_minus: f64) -> Result<f64> {
    envelope_center_at(&model.dist.spec, &model.cache, x_minus)
}

/// x_f(x₋) = (−I₁/𝒫₋, 0, v_a x₋/(1 − v_a) + I₂/(2𝒫₋²)) with x_f(0) = 0; expectation columns are left at zero.
pub fn peak_trajectory(spec: &CorrelationSpec, cache: &CachedFieldIntegrals, x_minus: &Axis) -> Result<TrajectoryRecord> {
    check_va(spec)?;
    let pm = spec.p_minus_ref;
    let slope = spec.v_a / (1.0 - spec.v_a);
    let mut samples = Vec::with_capacity(x_minus.steps);
    for x in x_minus.values() {
        let fi = cache.integrals(x)?;
        samples.push(TrajectorySample {
            x_minus: x,
            xf1: -fi.i1 / pm,
            xf3: slope * x + fi.i2 / (2.0 * pm * pm),
            xf3_tilde: slope * x + fi.i2_avg / (2.0 * pm * pm),
            ..Default::default()
        });
    }
    Ok(TrajectoryRecord {
        samples,
        frame_velocity: 0.0,
    })
}

/// d x̃_f3/dx₋ = v_f/(1 − v_f) at the local field strength.
pub fn cycle_averaged_peak_velocity(spec: &CorrelationSpec, cache: &CachedFieldIntegrals, x_minus: f64) -> Result<f64> {
    check_va(spec)?;
    let xi = cache.field().profile.envelope(x_minus);
    let pm = spec.p_minus_ref;
    Ok(spec.v_a / (1.0 - spec.v_a) + xi * xi / (4.0 * pm * pm))
}

/// Averages over |N|²|T|² of the quantities entering ⟨x⟩(x₋). p₋ is conserved, so the
/// trajectory is these moments times the cumulative field integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpectationMoments {
    pub inv_pm: f64,
    pub inv_pm_sq: f64,
    pub p3_over_pm: f64,
    pub p1_over_pm: f64,
    pub p1_sq: f64,
}

impl ExpectationMoments {
    pub fn from_distribution(dist: &ModalDistribution, n_eta: usize, n_p1: usize) -> Result<Self> {
        let modes = dist.modes(n_eta, n_p1)?;
        let total: f64 = modes.iter().map(|m| m.probability).sum();
        let avg = |f: &dyn Fn(&crate::kinematics::OnShellMomentum) -> f64| {
            modes.iter().map(|m| m.probability * f(&m.momentum)).sum::<f64>() / total
        };
        Ok(ExpectationMoments {
            inv_pm: avg(&|p| 1.0 / p.p_minus()),
            inv_pm_sq: avg(&|p| 1.0 / (p.p_minus() * p.p_minus())),
            p3_over_pm: avg(&|p| p.p3 / p.p_minus()),
            p1_over_pm: avg(&|p| p.p1 / p.p_minus()),
            p1_sq: avg(&|p| p.p1 * p.p1),
        })
    }

    /// Cycle-averaged d⟨x̃₃⟩/dx₋ at field strength ξ.
    pub fn light_front_velocity(&self, xi: f64) -> f64 {
        self.p3_over_pm + 0.25 * xi * xi * self.inv_pm_sq
    }
}

/// ⟨x⟩(x₋) = ⟨(p₁x₋ − I₁)/p₋⟩, ⟨p₃/p₋⟩x₋ + ⟨I₂/(2p₋²)⟩ with ⟨x(0)⟩ = 0; peak columns are left at zero.
pub fn expectation_trajectory(moments: &ExpectationMoments, cache: &CachedFieldIntegrals, x_minus: &Axis) -> Result<TrajectoryRecord> {
    let mut samples = Vec::with_capacity(x_minus.steps);
    for x in x_minus.values() {
        let fi = cache.integrals(x)?;
        samples.push(TrajectorySample {
            x_minus: x,
            ex1: -moments.inv_pm * fi.i1 + moments.p1_over_pm * x,
            ex3: moments.p3_over_pm * x + 0.5 * moments.inv_pm_sq * fi.i2,
            ex3_tilde: moments.p3_over_pm * x + 0.5 * moments.inv_pm_sq * fi.i2_avg,
            ..Default::default()
        });
    }
    Ok(TrajectoryRecord {
        samples,
        frame_velocity: 0.0,
    })
}

/// Peak and expectation trajectories on the same samples.
pub fn trajectories(
    spec: &CorrelationSpec,
    moments: &ExpectationMoments,
    cache: &CachedFieldIntegrals,
    x_minus: &Axis,
) -> Result<TrajectoryRecord> {
    let mut rec = peak_trajectory(spec, cache, x_minus)?;
    let ex = expectation_trajectory(moments, cache, x_minus)?;
    for (s, e) in rec.samples.iter_mut().zip(ex.samples) {
        s.ex1 = e.ex1;
        s.ex3 = e.ex3;
        s.ex3_tilde = e.ex3_tilde;
    }
    Ok(rec)
}

/// Small-spread estimate v_1D/(1 − v_1D) + (1 − v_f v_1D)/(2𝒫₋²(v_f − v_1D)) ⟨p₁²⟩, with ⟨p₁²⟩ = 1/w².
pub fn expectation_velocity_approx(spec: &CorrelationSpec, w: f64, xi: f64) -> Result<f64> {
    let pm = spec.p_minus_ref;
    let r = spec.reference();
    let v1 = drift_velocity_1d(r.p3_over_e(), xi, pm);
    let vf = peak_velocity_infield(spec.v_a, xi, pm);
    if (vf - v1).abs() < 1e-12 {
        return Err(Error::SingularSlice { v_a: spec.v_a, eta: r.eta });
    }
    Ok(v1 / (1.0 - v1) + (1.0 - vf * v1) / (2.0 * pm * pm * (vf - v1)) / (w * w))
}

/// Shifts the x₃ columns to x₃ − v·x₀, taking x₀ = x₋ + x̃₃ from the cycle-averaged
/// column of the same trajectory (the guiding centre), so the carrier-frequency
/// oscillation keeps its lab-frame amplitude. The input is expected in the lab frame.
pub fn comoving_transform(record: &TrajectoryRecord, v: f64) -> TrajectoryRecord {
    let samples = record
        .samples
        .iter()
        .map(|s| {
            let tp = s.x_minus + s.xf3_tilde;
            let te = s.x_minus + s.ex3_tilde;
            TrajectorySample {
                xf3: s.xf3 - v * tp,
                xf3_tilde: s.xf3_tilde - v * tp,
                ex3: s.ex3 - v * te,
                ex3_tilde: s.ex3_tilde - v * te,
                ..*s
            }
        })
        .collect();
    TrajectoryRecord {
        samples,
        frame_velocity: v,
    }
}
