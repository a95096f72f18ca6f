//! Partial and total wavepackets and their light-front density on space–time grids.
//!
//! The three delta functions of the momentum-space construction (on-shell energy, the
//! η correlation and δ(p₂)) are integrated out analytically, leaving
//!
//! Φ(x, η) = (2π)⁻¹ ∫dp₁ T(p₁) |p₃/E − v_a|^{−1/2} V(p, x₋)/√(2p₋) e^{iS(p, x)}
//!
//! and ψ = Z^{−1/2} ∫dη N(η) Φ(x, η), where Z makes the light-front norm per unit x₂
//! equal to one.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{free_spinor, lightfront_density, minus_gamma1, Bispinor, FourVector};
use crate::error::{Error, Result};
use crate::field::CachedFieldIntegrals;
use crate::kinematics::{on_shell, CorrelationSpec, ReferencePoint};
use crate::quadrature::GaussLegendre;
use crate::spectral::{assert_subluminal, ModalDistribution, TransverseWeight};
use crate::trajectory::{envelope_center, peak_track};

/// Φ(x, η) by Gauss–Legendre quadrature over p₁ ∈ ±6/w. Without a field cache the
/// free spinor and S = −p·x are used.
pub fn partial_wavepacket(
    x: &FourVector,
    eta: f64,
    spec: &CorrelationSpec,
    transverse: &TransverseWeight,
    field: Option<&CachedFieldIntegrals>,
    spin: crate::algebra::Spin,
    n_p1: usize,
) -> Result<Bispinor> {
    PartialWavepacket::new(eta, spec, transverse, spin, n_p1)?.at(x, field)
}

/// The p₁ nodes of one η slice, prepared once for evaluation at many points.
#[derive(Debug, Clone)]
pub struct PartialWavepacket {
    pub eta: f64,
    nodes: Vec<(FourVector, Bispinor, Bispinor, f64)>,
}

impl PartialWavepacket {
    pub fn new(
        eta: f64,
        spec: &CorrelationSpec,
        transverse: &TransverseWeight,
        spin: crate::algebra::Spin,
        n_p1: usize,
    ) -> Result<Self> {
        let (lo, hi) = transverse.support();
        let rule = GaussLegendre::on_interval(n_p1, lo, hi);
        let mut nodes = Vec::with_capacity(n_p1);
        for (&p1, &w) in rule.nodes.iter().zip(&rule.weights) {
            let p = on_shell(spec, eta, p1)?;
            let pm = p.p_minus();
            let fv = p.four_vector();
            let u = free_spinor(&fv, spin)?;
            let j = p.velocity_gap(spec.v_a)?;
            let a = w * transverse.amplitude(p1) / (j.sqrt() * (2.0 * pm).sqrt() * 2.0 * PI);
            let g = minus_gamma1(&u).scale(Complex64::from(-1.0 / (2.0 * pm)));
            nodes.push((fv, u, g, a));
        }
        Ok(PartialWavepacket { eta, nodes })
    }

    pub fn at(&self, x: &FourVector, field: Option<&CachedFieldIntegrals>) -> Result<Bispinor> {
        let xm = x.minus();
        let (e_a1, ints) = match field {
            Some(c) if !c.field().is_off() && xm != 0.0 => (c.field().e_potential(xm), Some(c.integrals(xm)?)),
            Some(c) => (c.field().e_potential(xm), None),
            None => (0.0, None),
        };
        let mut psi = Bispinor::zero();
        for (fv, u, g, a) in &self.nodes {
            let mut s = -fv.dot(x);
            if let Some(r) = &ints {
                s += (fv.x1 * r.i1 - 0.5 * r.i2) / fv.minus();
            }
            let v = *u + g.scale(Complex64::from(e_a1));
            psi = psi + v.scale(Complex64::from_polar(*a, s));
        }
        Ok(psi)
    }
}

#[derive(Debug, Clone, Copy)]
struct PreparedMode {
    p1: f64,
    inv_pm: f64,
    d_energy: f64,
    d_pm: f64,
    d_inv_pm: f64,
    amp_u: Bispinor,
    amp_g: Bispinor,
}

/// A modal distribution discretized on fixed (η, p₁) nodes together with the field.
#[derive(Debug, Clone)]
pub struct WavepacketModel {
    pub dist: ModalDistribution,
    pub cache: CachedFieldIntegrals,
    pub n_eta: usize,
    pub n_p1: usize,
    reference: ReferencePoint,
    norm: f64,
    pm_spread: f64,
    modes: Vec<PreparedMode>,
}

impl WavepacketModel {
    pub fn new(dist: ModalDistribution, cache: CachedFieldIntegrals, n_eta: usize, n_p1: usize) -> Result<Self> {
        let modes = dist.modes(n_eta, n_p1)?;
        assert_subluminal(&modes)?;
        let reference = dist.spec.reference();
        let pm_ref = dist.spec.p_minus_ref;
        let prob: f64 = modes.iter().map(|m| m.probability).sum();
        let norm: f64 = modes
            .iter()
            .map(|m| m.probability * m.momentum.energy / m.momentum.p_minus())
            .sum();
        let mean_pm: f64 = modes.iter().map(|m| m.probability * m.momentum.p_minus()).sum::<f64>() / prob;
        let var: f64 = modes
            .iter()
            .map(|m| m.probability * (m.momentum.p_minus() - mean_pm).powi(2))
            .sum::<f64>()
            / prob;
        let scale = 1.0 / (2.0 * PI * norm.sqrt());
        let mut prepared = Vec::with_capacity(modes.len());
        for m in &modes {
            let p = m.momentum;
            let pm = p.p_minus();
            let u = free_spinor(&p.four_vector(), dist.spin)?;
            let a = Complex64::from(m.amplitude * scale / (2.0 * pm).sqrt());
            prepared.push(PreparedMode {
                p1: p.p1,
                inv_pm: 1.0 / pm,
                d_energy: p.energy - reference.energy,
                d_pm: pm - pm_ref,
                d_inv_pm: 1.0 / pm - 1.0 / pm_ref,
                amp_u: u.scale(a),
                amp_g: minus_gamma1(&u).scale(a * (0.5 / pm)),
            });
        }
        Ok(WavepacketModel {
            dist,
            cache,
            n_eta,
            n_p1,
            reference,
            norm,
            pm_spread: var.sqrt(),
            modes: prepared,
        })
    }

    pub fn reference(&self) -> ReferencePoint {
        self.reference
    }

    /// Z = ∫|N|²|T|²(E/p₋) dη dp₁, the norm before rescaling.
    pub fn norm_factor(&self) -> f64 {
        self.norm
    }

    /// Weighted standard deviation of p₋ over the nodes.
    pub fn p_minus_spread(&self) -> f64 {
        self.pm_spread
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    /// ψ(x), up to a global phase that depends only on x (the reference-mode phase is
    /// removed).
    pub fn wavefunction(&self, x: &FourVector) -> Result<Bispinor> {
        let xm = x.minus();
        let fi = self.cache.integrals(xm)?;
        let e_a1 = self.cache.field().e_potential(xm);
        let mut acc = [Complex64::new(0.0, 0.0); 4];
        for m in &self.modes {
            let phase = -m.d_energy * xm - m.d_pm * x.x3 + m.p1 * (x.x1 + fi.i1 * m.inv_pm)
                - 0.5 * fi.i2 * m.d_inv_pm;
            let z = Complex64::from_polar(1.0, phase);
            for k in 0..4 {
                acc[k] += z * (m.amp_u.0[k] - m.amp_g.0[k] * e_a1);
            }
        }
        Ok(Bispinor(acc))
    }

    pub fn density(&self, x: &FourVector) -> Result<f64> {
        Ok(lightfront_density(&self.wavefunction(x)?))
    }

    /// Densities at x₃ = x3_start + k·x3_step, k < n, on one x₋ slice at fixed x₁.
    pub fn slice(&self, x_minus: f64, x1: f64, x3_start: f64, x3_step: f64, n: usize) -> Result<Vec<f64>> {
        let fi = self.cache.integrals(x_minus)?;
        let e_a1 = Complex64::from(self.cache.field().e_potential(x_minus));
        let mut acc = vec![[Complex64::new(0.0, 0.0); 4]; n];
        for m in &self.modes {
            let theta = -m.d_energy * x_minus + m.p1 * (x1 + fi.i1 * m.inv_pm) - 0.5 * fi.i2 * m.d_inv_pm;
            let b: [Complex64; 4] = std::array::from_fn(|k| m.amp_u.0[k] - m.amp_g.0[k] * e_a1);
            let step = Complex64::from_polar(1.0, -m.d_pm * x3_step);
            let mut z = Complex64::new(0.0, 0.0);
            for (k, a) in acc.iter_mut().enumerate() {
                if k % 128 == 0 {
                    z = Complex64::from_polar(1.0, theta - m.d_pm * (x3_start + x3_step * k as f64));
                }
                for c in 0..4 {
                    a[c] += z * b[c];
                }
                z *= step;
            }
        }
        Ok(acc.iter().map(|a| lightfront_density(&Bispinor(*a))).collect())
    }

    /// ∫ψ̄γ₋ψ dx₁dx₃ at fixed x₋ by the trapezoid rule over the given rectangle, whose
    /// x₃ side is measured from the envelope centre.
    pub fn transverse_norm(&self, x_minus: f64, x1: &Axis, x3: &Axis) -> Result<f64> {
        let centre = envelope_center(self, x_minus)?;
        let rows: Result<Vec<Vec<f64>>> = x1
            .values()
            .par_iter()
            .map(|&a| self.slice(x_minus, a, centre + x3.min, x3.step(), x3.steps))
            .collect();
        let rows = rows?;
        let row_int: Vec<f64> = rows.iter().map(|r| trapezoid(r, x3.step())).collect();
        Ok(trapezoid(&row_int, x1.step()))
    }
}

fn trapezoid(v: &[f64], h: f64) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    h * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[v.len() - 1]))
}

/// ψ at x for a prepared model.
pub fn total_wavepacket(x: &FourVector, model: &WavepacketModel) -> Result<Bispinor> {
    model.wavefunction(x)
}

/// Inclusive uniform axis with `steps` samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, steps: usize) -> Self {
        Axis { min, max, steps }
    }

    pub fn step(&self) -> f64 {
        if self.steps < 2 {
            0.0
        } else {
            (self.max - self.min) / (self.steps - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.steps).map(|k| self.min + h * k as f64).collect()
    }
}

/// What the x₃ axis of a grid is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum X3Frame {
    /// Absolute x₃.
    #[default]
    Fixed,
    /// Offsets from the envelope centre (𝒫₃/𝒫₋)x₋ + Ĩ₂/(2𝒫₋²).
    Envelope,
    /// Offsets from the cycle-averaged peak x̃_f3(x₋).
    Peak,
}

/// Where each x₋ slice cuts the transverse coordinate x₁.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransverseSlice {
    /// x₁ = x_f1(x₋) = −I₁(x₋)/𝒫₋.
    Peak,
    Constant(f64),
}

impl Default for TransverseSlice {
    fn default() -> Self {
        TransverseSlice::Peak
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeGrid {
    pub x_minus: Axis,
    pub x3: Axis,
    #[serde(default)]
    pub frame: X3Frame,
    #[serde(default)]
    pub transverse: TransverseSlice,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityMeta {
    pub n_eta: usize,
    pub n_p1: usize,
    pub norm_factor: f64,
    /// ∫ψ̄γ₋ψ dx₃ along each slice.
    pub line_integrals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityField {
    pub grid: SpacetimeGrid,
    pub x_minus: Vec<f64>,
    /// x₁ used on each slice.
    pub x1: Vec<f64>,
    /// Absolute x₃ of the first sample on each slice; samples are `grid.x3.step()` apart.
    pub x3_start: Vec<f64>,
    /// Row-major: slice index, then x₃ index.
    pub samples: Vec<f64>,
    pub meta: DensityMeta,
}

impl DensityField {
    pub fn slice(&self, i: usize) -> &[f64] {
        let n = self.grid.x3.steps;
        &self.samples[i * n..(i + 1) * n]
    }

    pub fn x3_values(&self, i: usize) -> Vec<f64> {
        let h = self.grid.x3.step();
        (0..self.grid.x3.steps).map(|k| self.x3_start[i] + h * k as f64).collect()
    }

    pub fn slice_index(&self, x_minus: f64) -> Option<usize> {
        let tol = 1e-9 * self.grid.x_minus.step().abs().max(1.0);
        self.x_minus.iter().position(|&v| (v - x_minus).abs() <= tol)
    }
}

/// Largest x₃ step allowed: 2π/(8σ) with σ the spread of p₋ over the nodes.
pub fn resolution_bound(model: &WavepacketModel) -> f64 {
    2.0 * PI / (8.0 * model.p_minus_spread())
}

/// x₁ and the x₃ origin of the slice at x₋.
pub fn slice_origin(model: &WavepacketModel, grid: &SpacetimeGrid, x_minus: f64) -> Result<(f64, f64)> {
    let fi = model.cache.integrals(x_minus)?;
    let x1 = match grid.transverse {
        TransverseSlice::Peak => -fi.i1 / model.dist.spec.p_minus_ref,
        TransverseSlice::Constant(v) => v,
    };
    let origin = match grid.frame {
        X3Frame::Fixed => 0.0,
        X3Frame::Envelope => envelope_center(model, x_minus)?,
        X3Frame::Peak => peak_track(model, x_minus)?,
    };
    Ok((x1, origin))
}

/// Density on every grid point. Slices are evaluated in parallel and written by index,
/// so the result does not depend on the number of workers.
pub fn density_grid(model: &WavepacketModel, grid: &SpacetimeGrid) -> Result<DensityField> {
    let step = grid.x3.step().abs();
    let bound = resolution_bound(model);
    if step > bound {
        return Err(Error::Resolution { step, bound });
    }
    let xs = grid.x_minus.values();
    let rows: Result<Vec<(f64, f64, Vec<f64>)>> = xs
        .par_iter()
        .map(|&xm| {
            let (x1, origin) = slice_origin(model, grid, xm)?;
            let start = origin + grid.x3.min;
            let row = model.slice(xm, x1, start, grid.x3.step(), grid.x3.steps)?;
            Ok((x1, start, row))
        })
        .collect();
    let rows = rows?;
    let mut field = DensityField {
        grid: *grid,
        x_minus: xs,
        x1: Vec::with_capacity(rows.len()),
        x3_start: Vec::with_capacity(rows.len()),
        samples: Vec::with_capacity(rows.len() * grid.x3.steps),
        meta: DensityMeta {
            n_eta: model.n_eta,
            n_p1: model.n_p1,
            norm_factor: model.norm_factor(),
            line_integrals: Vec::with_capacity(rows.len()),
        },
    };
    for (x1, start, row) in rows {
        field.x1.push(x1);
        field.x3_start.push(start);
        field.meta.line_integrals.push(trapezoid(&row, grid.x3.step()));
        field.samples.extend(row);
    }
    Ok(field)
}

/// Closed-form p₁ integral of the action expanded to second order in p₁, summed over
/// the η nodes. Its squared modulus approximates the density.
pub fn paraxial_envelope(model: &WavepacketModel, x: &FourVector) -> Result<Complex64> {
    let spec = &model.dist.spec;
    let n = &model.dist.eta;
    let w = model.dist.transverse.w;
    let r = model.reference();
    let g2 = 1.0 / (1.0 - spec.v_a * spec.v_a);
    let p1_sq = 1.0 / (w * w);
    if g2 > 0.0 {
        let bound = r.eta * r.eta * g2 - 1.0;
        if p1_sq > 0.01 * bound {
            return Err(Error::ParaxialInvalid { p1_sq, bound });
        }
    }
    let xm = x.minus();
    let fi = model.cache.integrals(xm)?;
    let pm_ref = spec.p_minus_ref;
    let (lo, hi) = n.support();
    let rule = GaussLegendre::on_interval(model.n_eta, lo, hi);
    let t0 = (w / (2.0 * PI).sqrt()).sqrt();
    let mut total = Complex64::new(0.0, 0.0);
    for (&eta, &we) in rule.nodes.iter().zip(&rule.weights) {
        let amp = n.amplitude(eta);
        if amp == 0.0 {
            continue;
        }
        let p = on_shell(spec, eta, 0.0)?;
        let pm = p.p_minus();
        let j = p.velocity_gap(spec.v_a)?;
        let s0 = -(p.energy - r.energy) * xm - (pm - pm_ref) * x.x3 - 0.5 * fi.i2 * (1.0 / pm - 1.0 / pm_ref);
        let s1 = x.x1 + fi.i1 / pm;
        let zeta = x.x3 - spec.v_a * x.t - (1.0 - spec.v_a) * fi.i2 / (2.0 * pm * pm);
        let s2 = zeta / (p.energy * spec.v_a - p.p3);
        let alpha = Complex64::new(0.25 * w * w, -0.5 * s2);
        let gauss = (Complex64::from(PI) / alpha).sqrt() * (-(s1 * s1) / (4.0 * alpha)).exp();
        total += Complex64::from_polar(we * amp / j.sqrt(), s0) * gauss;
    }
    Ok(total * (t0 / (2.0 * PI * model.norm_factor().sqrt())))
}

/// Sub-grid location of the maximum of one slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakLocation {
    pub x3: f64,
    pub value: f64,
    pub index: usize,
}

/// max/median below which a slice counts as flat. A focused peak inside its envelope stands
/// 30 to 70 times above the slice median; the defocused remainder after it leaves reaches 2 to 8.
pub const PEAK_CONTRAST: f64 = 10.0;

/// Argmax refined by a parabola through the three samples around it. A slice is flat when
/// max/median < [`PEAK_CONTRAST`] or when the maximum sits on either end of the slice.
pub fn locate_peak(x3_start: f64, step: f64, values: &[f64]) -> Option<PeakLocation> {
    let n = values.len();
    if n < 3 {
        return None;
    }
    let (k, &vmax) = values
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |best, (i, v)| if *v > *best.1 { (i, v) } else { best });
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    if !(vmax >= PEAK_CONTRAST * median) || vmax <= 0.0 || k == 0 || k == n - 1 {
        return None;
    }
    let (a, b, c) = (values[k - 1], vmax, values[k + 1]);
    let den = a - 2.0 * b + c;
    let delta = if den < 0.0 { 0.5 * (a - c) / den } else { 0.0 };
    Some(PeakLocation {
        x3: x3_start + step * (k as f64 + delta),
        value: b - 0.25 * (a - c) * delta,
        index: k,
    })
}

pub fn peak_locate(field: &DensityField, x_minus: f64) -> Result<PeakLocation> {
    let i = field
        .slice_index(x_minus)
        .ok_or_else(|| Error::invalid("x_minus", format!("no slice at {x_minus}")))?;
    locate_peak(field.x3_start[i], field.grid.x3.step(), field.slice(i)).ok_or(Error::FlatSlice { x_minus })
}
