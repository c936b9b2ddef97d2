//! Dense complex linear algebra for small qudit systems.
//!
//! Everything here works on `d`-dimensional Hilbert spaces with `d` up to a
//! few dozen. Values are immutable once built; all functions are pure.

mod basis;
mod eigen;

pub(crate) use basis::third_mub_phase;
pub use basis::{
    computational_basis, fourier_basis, mub_overlap_check, outcome_prob, third_mub, Basis,
};
pub use eigen::{eigh, HermitianEigen};

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

pub use num_complex::Complex64 as C64;

use crate::error::{QracError, Result};

/// Orthonormality tolerance for bases.
pub const ORTHO_TOL: f64 = 1e-10;
/// Tolerance for unitarity and Weyl relations.
pub const UNITARY_TOL: f64 = 1e-12;
/// Largest dimension supported by the quantum modules.
pub const MAX_DIM: usize = 64;

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(QracError::InvalidDimension(d))
    } else {
        Ok(())
    }
}

/// `ω = exp(2πi/d)`.
pub fn omega(d: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI / d as f64)
}

/// `ω^k`, with the exponent reduced modulo `d` first.
pub fn omega_pow(d: usize, k: i64) -> C64 {
    let e = k.rem_euclid(d as i64);
    C64::from_polar(1.0, 2.0 * PI * e as f64 / d as f64)
}

/// Trial-division primality test restricted to odd primes.
pub fn is_odd_prime(d: usize) -> bool {
    if d < 3 || d.is_multiple_of(2) {
        return false;
    }
    let mut p = 3;
    while p * p <= d {
        if d.is_multiple_of(p) {
            return false;
        }
        p += 2;
    }
    true
}

/// The chirp multiplier `1 + δ_d` used by the third basis (2 for odd primes, 1 otherwise).
pub fn chirp_factor(d: usize) -> usize {
    if is_odd_prime(d) {
        2
    } else {
        1
    }
}

/// Non-negative representative of `x mod d`.
pub fn modulo(x: i64, d: usize) -> usize {
    x.rem_euclid(d as i64) as usize
}

/// A unit-norm state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amps: Vec<C64>,
}

impl Ket {
    /// Builds a ket from raw amplitudes, normalizing them.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(QracError::InvalidDimension(0));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm.is_nan() || norm <= 1e-300 || !norm.is_finite() {
            return Err(QracError::Numerical(
                "cannot normalize a zero vector".into(),
            ));
        }
        Ok(Ket {
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    /// Computational basis state `|k⟩`.
    pub fn basis_state(d: usize, k: usize) -> Result<Self> {
        check_dim(d)?;
        if k >= d {
            return Err(QracError::OutOfRange { symbol: k, d });
        }
        let mut amps = vec![C64::new(0.0, 0.0); d];
        amps[k] = C64::new(1.0, 0.0);
        Ok(Ket { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &Ket) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Applies an operator and renormalizes (exact for unitaries up to rounding).
    pub fn apply(&self, op: &Operator) -> Result<Ket> {
        if op.dim() != self.dim() {
            return Err(QracError::DimensionMismatch {
                expected: op.dim(),
                got: self.dim(),
            });
        }
        Ket::new(op.apply(&self.amps))
    }

    /// `|self⟩⟨self|`.
    pub fn projector(&self) -> Operator {
        Operator::outer(&self.amps, &self.amps)
    }
}

/// A dense `d × d` complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<C64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Operator {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| {
            if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Operator { dim, data }
    }

    /// Diagonal operator with real entries.
    pub fn diagonal(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        let dim = u.len();
        Self::from_fn(dim, |i, j| u[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.dim + j] = value;
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        Operator {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        (0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `Uᵏ` by repeated squaring.
    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Operator::identity(self.dim);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `⟨ψ|A|ψ⟩`, real part only (exact for Hermitian `A`).
    pub fn expectation(&self, psi: &Ket) -> f64 {
        let av = self.apply(psi.amps());
        psi.amps()
            .iter()
            .zip(&av)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    /// `Re tr(self · other)`.
    pub fn trace_product(&self, other: &Operator) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for i in 0..d {
            for k in 0..d {
                acc += (self.get(i, k) * other.get(k, i)).re;
            }
        }
        acc
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&Operator::identity(self.dim))
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        let d = self.dim;
        let mut out = Operator::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Shift operator `X = Σ_k |k+1⟩⟨k|`.
pub fn weyl_x(d: usize) -> Result<Operator> {
    check_dim(d)?;
    Ok(Operator::from_fn(d, |i, j| {
        if i == (j + 1) % d {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// Clock operator `Z = Σ_k ω^k |k⟩⟨k|`.
pub fn weyl_z(d: usize) -> Result<Operator> {
    check_dim(d)?;
    Ok(Operator::from_fn(d, |i, j| {
        if i == j {
            omega_pow(d, i as i64)
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// Applies `X^a Z^b` to raw amplitudes without forming matrices.
///
/// `(X^a Z^b ψ)[k] = ω^{b(k-a)} ψ[k-a]`.
pub fn apply_weyl(d: usize, a: usize, b: usize, amps: &[C64]) -> Vec<C64> {
    (0..d)
        .map(|k| {
            let src = modulo(k as i64 - a as i64, d);
            omega_pow(d, (b * src) as i64) * amps[src]
        })
        .collect()
}
