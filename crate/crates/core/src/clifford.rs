//! Pauli and gamma matrices in the Dirac (standard) representation.
//!
//! Entries are `Complex<S>` for any signed ring `S`, so the algebra can be
//! checked exactly with `S = i64` and used numerically with `S = f64`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{Num, Signed};

use crate::error::{Error, Result};

/// Ring the matrix entries are built over.
pub trait Entry: Num + Copy + Neg<Output = Self> {}
impl<S: Num + Copy + Neg<Output = S>> Entry for S {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareMatrix<S, const N: usize>(pub [[Complex<S>; N]; N]);

pub type Matrix2<S> = SquareMatrix<S, 2>;
pub type Matrix4<S> = SquareMatrix<S, 4>;

impl<S: Entry, const N: usize> SquareMatrix<S, N> {
    pub fn zero() -> Self {
        Self([[Complex::new(S::zero(), S::zero()); N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            m.0[i][i] = Complex::new(S::one(), S::zero());
        }
        m
    }

    pub fn scale(&self, s: Complex<S>) -> Self {
        Self(self.0.map(|row| row.map(|z| z * s)))
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[Complex<S>; N]) -> [Complex<S>; N] {
        std::array::from_fn(|i| (0..N).fold(Complex::new(S::zero(), S::zero()), |acc, j| acc + self.0[i][j] * v[j]))
    }

    /// Row vector times matrix.
    pub fn apply_left(&self, row: &[Complex<S>; N]) -> [Complex<S>; N] {
        std::array::from_fn(|j| (0..N).fold(Complex::new(S::zero(), S::zero()), |acc, i| acc + row[i] * self.0[i][j]))
    }

    /// `{A, B} = AB + BA`
    pub fn anticommutator(&self, other: &Self) -> Self {
        *self * *other + *other * *self
    }

    pub fn map<U>(&self, f: impl Fn(S) -> U) -> SquareMatrix<U, N> {
        SquareMatrix(self.0.map(|row| row.map(|z| Complex::new(f(z.re), f(z.im)))))
    }
}

impl<S: Entry + Signed + PartialOrd, const N: usize> SquareMatrix<S, N> {
    /// Largest absolute real or imaginary part over all entries.
    pub fn max_norm(&self) -> S {
        let mut m = S::zero();
        for row in &self.0 {
            for z in row {
                for part in [z.re.abs(), z.im.abs()] {
                    if part > m {
                        m = part;
                    }
                }
            }
        }
        m
    }
}

impl<S: Entry, const N: usize> Mul for SquareMatrix<S, N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..N).fold(Complex::new(S::zero(), S::zero()), |acc, k| acc + self.0[i][k] * rhs.0[k][j]))
        }))
    }
}

impl<S: Entry, const N: usize> Add for SquareMatrix<S, N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j] + rhs.0[i][j])))
    }
}

impl<S: Entry, const N: usize> Sub for SquareMatrix<S, N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j] - rhs.0[i][j])))
    }
}

fn c<S: Entry>(re: i8, im: i8) -> Complex<S> {
    let lift = |v: i8| match v {
        0 => S::zero(),
        1 => S::one(),
        -1 => -S::one(),
        _ => unreachable!("entries are 0, ±1, ±i"),
    };
    Complex::new(lift(re), lift(im))
}

/// Pauli matrix σ^i, `i ∈ {1, 2, 3}`.
pub fn pauli<S: Entry>(i: usize) -> Result<Matrix2<S>> {
    let (o, l, ni, pi, nl) = (c(0, 0), c(1, 0), c(0, -1), c(0, 1), c(-1, 0));
    match i {
        1 => Ok(SquareMatrix([[o, l], [l, o]])),
        2 => Ok(SquareMatrix([[o, ni], [pi, o]])),
        3 => Ok(SquareMatrix([[l, o], [o, nl]])),
        _ => Err(Error::IndexOutOfRange { what: "pauli", index: i }),
    }
}

/// Gamma matrix γ^μ: `γ⁰ = diag(I₂, −I₂)`, `γ^i = ((0, σ^i), (−σ^i, 0))`.
pub fn gamma<S: Entry>(mu: usize) -> Result<Matrix4<S>> {
    let mut g = Matrix4::<S>::zero();
    match mu {
        0 => {
            for k in 0..4 {
                g.0[k][k] = if k < 2 { c(1, 0) } else { c(-1, 0) };
            }
        }
        1..=3 => {
            let s = pauli::<S>(mu)?;
            for r in 0..2 {
                for col in 0..2 {
                    g.0[r][col + 2] = s.0[r][col];
                    g.0[r + 2][col] = -s.0[r][col];
                }
            }
        }
        _ => return Err(Error::IndexOutOfRange { what: "gamma", index: mu }),
    }
    Ok(g)
}

/// η^{μν} with signature (+, −, −, −).
pub fn metric<S: Entry>(mu: usize, nu: usize) -> S {
    match (mu, nu) {
        (0, 0) => S::one(),
        (a, b) if a == b => -S::one(),
        _ => S::zero(),
    }
}

/// Deviation of `{γ^μ, γ^ν}` from `2 η^{μν} I₄` for one pair.
pub fn anticommutator_defect<S: Entry>(mu: usize, nu: usize) -> Result<Matrix4<S>> {
    let (a, b) = (gamma::<S>(mu)?, gamma::<S>(nu)?);
    let two_eta = metric::<S>(mu, nu) + metric::<S>(mu, nu);
    Ok(a.anticommutator(&b) - Matrix4::identity().scale(Complex::new(two_eta, S::zero())))
}

/// Max over all 16 pairs of the max-norm of [`anticommutator_defect`].
pub fn anticommutation_deviation<S: Entry + Signed + PartialOrd>() -> S {
    let mut worst = S::zero();
    for mu in 0..4 {
        for nu in 0..4 {
            let d = anticommutator_defect::<S>(mu, nu).expect("indices in range").max_norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Dirac adjoint `Ψ̄ = Ψ† γ⁰` as a row spinor.
pub fn dirac_adjoint<S: Entry>(psi: &[Complex<S>; 4]) -> [Complex<S>; 4] {
    let dagger = psi.map(|z| z.conj());
    gamma::<S>(0).expect("γ⁰ exists").apply_left(&dagger)
}

/// Bilinear `Ψ̄ M Ψ` for a 4×4 matrix `M`.
pub fn bilinear<S: Entry>(psi: &[Complex<S>; 4], m: &Matrix4<S>) -> Complex<S> {
    let bar = dirac_adjoint(psi);
    let mv = m.apply(psi);
    bar.iter().zip(&mv).fold(Complex::new(S::zero(), S::zero()), |acc, (a, b)| acc + *a * *b)
}
