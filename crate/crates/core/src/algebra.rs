//! Four-vectors, Dirac matrices and bispinors in the metric (+,−,−,−).
//!
//! Everything is in units of the lepton mass (`MASS = 1`). The gamma matrices are in
//! the standard Dirac representation, so every entry is one of 0, ±1, ±i.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MASS: f64 = 1.0;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourVector {
    pub t: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl FourVector {
    pub const fn new(t: f64, x1: f64, x2: f64, x3: f64) -> Self {
        FourVector { t, x1, x2, x3 }
    }

    /// The plane-wave direction n = (1, 0, 0, 1).
    pub const fn lightlike() -> Self {
        FourVector::new(1.0, 0.0, 0.0, 1.0)
    }

    /// Positive-energy on-shell momentum with the given spatial part.
    pub fn on_shell(p1: f64, p2: f64, p3: f64) -> Self {
        let e = (MASS * MASS + p1 * p1 + p2 * p2 + p3 * p3).sqrt();
        FourVector::new(e, p1, p2, p3)
    }

    /// The minus component t − x3.
    pub fn minus(&self) -> f64 {
        self.t - self.x3
    }

    pub fn spatial_norm_sq(&self) -> f64 {
        self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3
    }

    pub fn dot(&self, other: &FourVector) -> f64 {
        minkowski_dot(self, other)
    }

    pub fn components(&self) -> [f64; 4] {
        [self.t, self.x1, self.x2, self.x3]
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, o: FourVector) -> FourVector {
        FourVector::new(self.t + o.t, self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, o: FourVector) -> FourVector {
        FourVector::new(self.t - o.t, self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl Mul<FourVector> for f64 {
    type Output = FourVector;
    fn mul(self, v: FourVector) -> FourVector {
        FourVector::new(self * v.t, self * v.x1, self * v.x2, self * v.x3)
    }
}

pub fn minkowski_dot(a: &FourVector, b: &FourVector) -> f64 {
    a.t * b.t - a.x1 * b.x1 - a.x2 * b.x2 - a.x3 * b.x3
}

pub type Mat4 = [[Complex64; 4]; 4];

pub fn mat_identity() -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut c = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut s = ZERO;
            for k in 0..4 {
                s += a[i][k] * b[k][j];
            }
            c[i][j] = s;
        }
    }
    c
}

pub fn mat_add(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut c = *a;
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] += b[i][j];
        }
    }
    c
}

pub fn mat_scale(a: &Mat4, s: Complex64) -> Mat4 {
    let mut c = *a;
    for row in c.iter_mut() {
        for v in row.iter_mut() {
            *v *= s;
        }
    }
    c
}

/// γ⁰..γ³ with upper indices, in the Dirac representation.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaBasis {
    pub gamma: [Mat4; 4],
}

impl GammaBasis {
    pub fn dirac() -> Self {
        let z = ZERO;
        let o = ONE;
        let g0 = [
            [o, z, z, z],
            [z, o, z, z],
            [z, z, -o, z],
            [z, z, z, -o],
        ];
        // γ^k = [[0, σ_k], [−σ_k, 0]]
        let g1 = [
            [z, z, z, o],
            [z, z, o, z],
            [z, -o, z, z],
            [-o, z, z, z],
        ];
        let g2 = [
            [z, z, z, -I],
            [z, z, I, z],
            [z, I, z, z],
            [-I, z, z, z],
        ];
        let g3 = [
            [z, z, o, z],
            [z, z, z, -o],
            [-o, z, z, z],
            [z, o, z, z],
        ];
        GammaBasis {
            gamma: [g0, g1, g2, g3],
        }
    }

    /// γ₋ = γ⁰ − γ³.
    pub fn minus(&self) -> Mat4 {
        mat_add(&self.gamma[0], &mat_scale(&self.gamma[3], -ONE))
    }

    /// The slash γ·p = γ⁰p₀ − γ¹p₁ − γ²p₂ − γ³p₃.
    pub fn slash(&self, p: &FourVector) -> Mat4 {
        let c = p.components();
        let mut m = mat_scale(&self.gamma[0], Complex64::from(c[0]));
        for k in 1..4 {
            m = mat_add(&m, &mat_scale(&self.gamma[k], Complex64::from(-c[k])));
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    #[default]
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Bispinor(pub [Complex64; 4]);

impl Bispinor {
    pub fn zero() -> Self {
        Bispinor([ZERO; 4])
    }

    /// Components of the Dirac adjoint ψ̄ = ψ†γ⁰ (as a row).
    pub fn adjoint(&self) -> [Complex64; 4] {
        let c = &self.0;
        [c[0].conj(), c[1].conj(), -c[2].conj(), -c[3].conj()]
    }

    /// ψ̄ M φ.
    pub fn bilinear(&self, m: &Mat4, other: &Bispinor) -> Complex64 {
        let bar = self.adjoint();
        let mphi = apply(m, other);
        (0..4).map(|i| bar[i] * mphi.0[i]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Bispinor {
        Bispinor(self.0.map(|c| c * s))
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }
}

impl Add for Bispinor {
    type Output = Bispinor;
    fn add(self, o: Bispinor) -> Bispinor {
        let mut c = self.0;
        for i in 0..4 {
            c[i] += o.0[i];
        }
        Bispinor(c)
    }
}

impl Sub for Bispinor {
    type Output = Bispinor;
    fn sub(self, o: Bispinor) -> Bispinor {
        self + (-o)
    }
}

impl Neg for Bispinor {
    type Output = Bispinor;
    fn neg(self) -> Bispinor {
        Bispinor(self.0.map(|c| -c))
    }
}

pub fn apply(m: &Mat4, v: &Bispinor) -> Bispinor {
    let mut out = [ZERO; 4];
    for (i, row) in m.iter().enumerate() {
        out[i] = (0..4).map(|k| row[k] * v.0[k]).sum();
    }
    Bispinor(out)
}

/// Positive-energy solution u(p) normalized to ūγ^μu = 2p^μ, spin quantized along x3
/// in the rest frame.
pub fn free_spinor(p: &FourVector, spin: Spin) -> Result<Bispinor> {
    let energy = (MASS * MASS + p.spatial_norm_sq()).sqrt();
    if (p.t - energy).abs() > 1e-9 * energy {
        return Err(Error::OffShell { p0: p.t, energy });
    }
    if p.minus() <= 0.0 {
        return Err(Error::NonPositiveMinus(p.minus()));
    }
    let chi = match spin {
        Spin::Up => [ONE, ZERO],
        Spin::Down => [ZERO, ONE],
    };
    let norm = (energy + MASS).sqrt();
    let inv = 1.0 / (energy + MASS);
    // σ·p χ
    let sp = [
        Complex64::from(p.x3) * chi[0] + Complex64::new(p.x1, -p.x2) * chi[1],
        Complex64::new(p.x1, p.x2) * chi[0] - Complex64::from(p.x3) * chi[1],
    ];
    Ok(Bispinor([
        chi[0] * norm,
        chi[1] * norm,
        sp[0] * (inv * norm),
        sp[1] * (inv * norm),
    ]))
}

/// γ₋γ¹ applied to ψ. In the Dirac representation this maps
/// (a, b, c, d) to (b + d, c − a, b + d, a − c).
pub fn minus_gamma1(psi: &Bispinor) -> Bispinor {
    let [a, b, c, d] = psi.0;
    Bispinor([b + d, c - a, b + d, a - c])
}

/// V = [1 − γ₋γ¹ eA₁/(2p₋)] u.
pub fn dressed_bispinor(u: &Bispinor, p_minus: f64, e_a1: f64) -> Result<Bispinor> {
    if p_minus <= 0.0 {
        return Err(Error::NonPositiveMinus(p_minus));
    }
    let k = Complex64::from(e_a1 / (2.0 * p_minus));
    Ok(*u - minus_gamma1(u).scale(k))
}

/// The light-front form ψ̄γ₋φ.
pub fn lightfront_form(psi: &Bispinor, phi: &Bispinor) -> Complex64 {
    psi.bilinear(&GammaBasis::dirac().minus(), phi)
}

/// ψ†(1 − γ⁰γ³)ψ = |ψ₀ − ψ₂|² + |ψ₁ + ψ₃|², manifestly nonnegative.
pub fn lightfront_density(psi: &Bispinor) -> f64 {
    let c = &psi.0;
    (c[0] - c[2]).norm_sqr() + (c[1] + c[3]).norm_sqr()
}
