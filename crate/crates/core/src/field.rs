//! Linearly polarized plane wave A₁(x₋) = ξ(x₋)cos(ωx₋ + φ) and its cumulative integrals.
//!
//! Field amplitudes are given as |e|ξ/m, so `potential` is already the product of the
//! charge magnitude and the vector potential. The sign of the charge enters through
//! [`PlaneWaveField::charge_sign`].

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::algebra::FourVector;
use crate::error::{Error, Result};
use crate::quadrature::{composite, GaussLegendre};

/// Envelope ξ(x₋), in units of |e|ξ/m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldProfile {
    Off,
    Constant {
        xi_star: f64,
    },
    /// ξ* exp(−ln2 |2(x − center)/fwhm|^order).
    SuperGaussian {
        xi_star: f64,
        fwhm: f64,
        order: f64,
        center: f64,
    },
    /// Linear interpolation between samples, zero outside the table.
    Tabulated {
        x: Vec<f64>,
        xi: Vec<f64>,
    },
}

impl FieldProfile {
    pub fn envelope(&self, x: f64) -> f64 {
        match self {
            FieldProfile::Off => 0.0,
            FieldProfile::Constant { xi_star } => *xi_star,
            FieldProfile::SuperGaussian {
                xi_star,
                fwhm,
                order,
                center,
            } => {
                let z = (2.0 * (x - center) / fwhm).abs();
                xi_star * (-LN_2 * z.powf(*order)).exp()
            }
            FieldProfile::Tabulated { x: xs, xi } => {
                if xs.is_empty() || x < xs[0] || x > xs[xs.len() - 1] {
                    return 0.0;
                }
                let k = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
                let (x0, x1) = (xs[k - 1], xs[k]);
                if x1 == x0 {
                    return xi[k];
                }
                let t = (x - x0) / (x1 - x0);
                xi[k - 1] + t * (xi[k] - xi[k - 1])
            }
        }
    }

    /// Peak amplitude ξ*.
    pub fn peak(&self) -> f64 {
        match self {
            FieldProfile::Off => 0.0,
            FieldProfile::Constant { xi_star } | FieldProfile::SuperGaussian { xi_star, .. } => {
                *xi_star
            }
            FieldProfile::Tabulated { xi, .. } => xi.iter().cloned().fold(0.0, f64::max),
        }
    }

    /// Interval outside which ξ vanishes (below 1e-18 ξ*); `None` when unbounded.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            FieldProfile::Off => Some((0.0, 0.0)),
            FieldProfile::Constant { .. } => None,
            FieldProfile::SuperGaussian {
                fwhm,
                order,
                center,
                ..
            } => {
                let z = (18.0 * std::f64::consts::LN_10 / LN_2).powf(1.0 / order);
                let half = 0.5 * fwhm.abs() * z;
                Some((center - half, center + half))
            }
            FieldProfile::Tabulated { x, .. } => {
                if x.is_empty() {
                    Some((0.0, 0.0))
                } else {
                    Some((x[0], x[x.len() - 1]))
                }
            }
        }
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        match self {
            FieldProfile::Off => Ok(()),
            FieldProfile::Constant { xi_star } => check_nonnegative(path, "xi_star", *xi_star),
            FieldProfile::SuperGaussian {
                xi_star,
                fwhm,
                order,
                ..
            } => {
                check_nonnegative(path, "xi_star", *xi_star)?;
                if !(*fwhm > 0.0) {
                    return Err(Error::invalid(&format!("{path}.fwhm"), "must be positive"));
                }
                if !(*order > 0.0) {
                    return Err(Error::invalid(&format!("{path}.order"), "must be positive"));
                }
                Ok(())
            }
            FieldProfile::Tabulated { x, xi } => {
                if x.len() != xi.len() || x.len() < 2 {
                    return Err(Error::invalid(
                        path,
                        "tabulated profile needs at least two (x, xi) samples of equal length",
                    ));
                }
                if x.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::invalid(&format!("{path}.x"), "must be increasing"));
                }
                if xi.iter().any(|v| !(*v >= 0.0)) {
                    return Err(Error::invalid(&format!("{path}.xi"), "must be nonnegative"));
                }
                Ok(())
            }
        }
    }
}

fn check_nonnegative(path: &str, key: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(&format!("{path}.{key}"), "must be finite and nonnegative"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneWaveField {
    pub omega: f64,
    pub phase: f64,
    /// Sign of the charge, −1 for an electron.
    pub charge_sign: f64,
    pub profile: FieldProfile,
}

impl PlaneWaveField {
    pub fn new(omega: f64, phase: f64, profile: FieldProfile) -> Self {
        PlaneWaveField {
            omega,
            phase,
            charge_sign: -1.0,
            profile,
        }
    }

    pub fn off() -> Self {
        PlaneWaveField::new(0.01, 0.0, FieldProfile::Off)
    }

    pub fn is_off(&self) -> bool {
        matches!(self.profile, FieldProfile::Off) || self.profile.peak() == 0.0
    }

    /// ξ(x₋)cos(ωx₋ + φ).
    pub fn potential(&self, x: f64) -> f64 {
        self.profile.envelope(x) * (self.omega * x + self.phase).cos()
    }

    /// Signed eA₁(x₋).
    pub fn e_potential(&self, x: f64) -> f64 {
        self.charge_sign * self.potential(x)
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    /// Largest |dξ/dx₋|·(2π/ω)/ξ* over the profile, when it exceeds 0.2.
    pub fn slowly_varying_violation(&self) -> Option<f64> {
        let peak = self.profile.peak();
        if peak == 0.0 {
            return None;
        }
        let (lo, hi) = self.profile.support()?;
        let n = 4096;
        let h = (hi - lo) / n as f64;
        if h <= 0.0 {
            return None;
        }
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let x = lo + h * (k as f64 + 0.5);
            let d = (self.profile.envelope(x + 0.5 * h) - self.profile.envelope(x - 0.5 * h)) / h;
            worst = worst.max(d.abs() * self.period() / peak);
        }
        (worst > 0.2).then_some(worst)
    }
}

/// Cumulative integrals from 0 to x₋.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldIntegrals {
    /// I₁ = ∫ eA₁
    pub i1: f64,
    /// I₂ = ∫ e²A₁²
    pub i2: f64,
    /// Ĩ₂ = ∫ e²ξ²/2, the cycle-averaged I₂.
    pub i2_avg: f64,
}

/// I₁, I₂ and Ĩ₂ tabulated on a uniform grid and interpolated by cubic Hermite
/// polynomials using the exact integrands as derivatives.
#[derive(Debug, Clone)]
pub struct CachedFieldIntegrals {
    field: PlaneWaveField,
    lo: f64,
    hi: f64,
    start: f64,
    step: f64,
    values: Vec<[f64; 3]>,
    slopes: Vec<[f64; 3]>,
    offset: [f64; 3],
}

impl CachedFieldIntegrals {
    pub fn new(field: &PlaneWaveField, lo: f64, hi: f64) -> Self {
        Self::with_resolution(field, lo, hi, 256)
    }

    pub fn with_resolution(
        field: &PlaneWaveField,
        lo: f64,
        hi: f64,
        samples_per_period: usize,
    ) -> Self {
        let (lo, hi) = (lo.min(hi).min(0.0), hi.max(lo).max(0.0));
        let step = field.period() / samples_per_period.max(64) as f64;
        let mut cache = CachedFieldIntegrals {
            field: field.clone(),
            lo,
            hi,
            start: 0.0,
            step,
            values: Vec::new(),
            slopes: Vec::new(),
            offset: [0.0; 3],
        };
        if field.is_off() {
            return cache;
        }
        let (a, b) = match field.profile.support() {
            Some((s, e)) => (s.max(lo), e.min(hi)),
            None => (lo, hi),
        };
        if b <= a {
            return cache;
        }
        let cells = ((b - a) / step).ceil().max(1.0) as usize;
        cache.start = a;
        let rule = GaussLegendre::new(6);
        let mut acc = [0.0; 3];
        cache.values.reserve(cells + 1);
        cache.values.push(acc);
        cache.slopes.push(integrands(field, a));
        for k in 0..cells {
            let x0 = a + step * k as f64;
            let mid = x0 + 0.5 * step;
            for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                let f = integrands(field, mid + 0.5 * step * t);
                for j in 0..3 {
                    acc[j] += 0.5 * step * w * f[j];
                }
            }
            cache.values.push(acc);
            cache.slopes.push(integrands(field, a + step * (k + 1) as f64));
        }
        cache.offset = cache.raw(0.0_f64.clamp(a, cache.end()));
        cache
    }

    pub fn field(&self) -> &PlaneWaveField {
        &self.field
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    fn end(&self) -> f64 {
        self.start + self.step * (self.values.len().saturating_sub(1)) as f64
    }

    fn raw(&self, x: f64) -> [f64; 3] {
        if self.values.is_empty() {
            return [0.0; 3];
        }
        if x <= self.start {
            return self.values[0];
        }
        let last = self.values.len() - 1;
        if x >= self.end() {
            return self.values[last];
        }
        let u = (x - self.start) / self.step;
        let k = (u.floor() as usize).min(last - 1);
        let t = u - k as f64;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let (v0, v1) = (&self.values[k], &self.values[k + 1]);
        let (d0, d1) = (&self.slopes[k], &self.slopes[k + 1]);
        let mut out = [0.0; 3];
        for j in 0..3 {
            out[j] = h00 * v0[j]
                + h10 * self.step * d0[j]
                + h01 * v1[j]
                + h11 * self.step * d1[j];
        }
        out
    }

    pub fn integrals(&self, x: f64) -> Result<FieldIntegrals> {
        let tol = 1e-9 * (self.hi - self.lo).abs().max(1.0);
        if x < self.lo - tol || x > self.hi + tol || !x.is_finite() {
            return Err(Error::OutOfRange {
                x,
                lo: self.lo,
                hi: self.hi,
            });
        }
        let r = self.raw(x);
        Ok(FieldIntegrals {
            i1: r[0] - self.offset[0],
            i2: r[1] - self.offset[1],
            i2_avg: r[2] - self.offset[2],
        })
    }
}

fn integrands(field: &PlaneWaveField, x: f64) -> [f64; 3] {
    let xi = field.profile.envelope(x);
    let ea = field.charge_sign * xi * (field.omega * x + field.phase).cos();
    [ea, ea * ea, 0.5 * xi * xi]
}

pub fn potential(field: &PlaneWaveField, x_minus: f64) -> f64 {
    field.potential(x_minus)
}

pub fn field_integrals(cache: &CachedFieldIntegrals, x_minus: f64) -> Result<(f64, f64)> {
    let r = cache.integrals(x_minus)?;
    Ok((r.i1, r.i2))
}

/// S = −p·x + [p₁I₁(x₋) − I₂(x₋)/2]/p₋.
pub fn action(p: &FourVector, x: &FourVector, cache: &CachedFieldIntegrals) -> Result<f64> {
    let pm = p.minus();
    if pm <= 0.0 {
        return Err(Error::NonPositiveMinus(pm));
    }
    let free = -p.dot(x);
    let x_minus = x.minus();
    if x_minus == 0.0 || cache.field().is_off() {
        return Ok(free);
    }
    let r = cache.integrals(x_minus)?;
    Ok(free + (p.x1 * r.i1 - 0.5 * r.i2) / pm)
}

/// (ω/2π) ∫ f over the carrier period centred on x₋.
pub fn cycle_average(f: impl Fn(f64) -> f64, x_minus: f64, omega: f64) -> f64 {
    let half = PI / omega;
    composite(f, x_minus - half, x_minus + half, 4, 16) * omega / (2.0 * PI)
}
