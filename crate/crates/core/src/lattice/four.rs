use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::Grid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Diagonal of the Minkowski metric, signature (+, −, −, −).
pub const METRIC_SIGNS: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexPosition {
    Upper,
    Lower,
}

impl IndexPosition {
    pub fn flipped(self) -> Self {
        match self {
            Self::Upper => Self::Lower,
            Self::Lower => Self::Upper,
        }
    }
}

/// Four real components, index 0 along `x0 = c t`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FourVector<T>(pub [T; 4]);

impl<T: Real> FourVector<T> {
    pub fn zero() -> Self {
        Self([T::zero(); 4])
    }

    pub fn new(t: T, x: T, y: T, z: T) -> Self {
        Self([t, x, y, z])
    }

    /// `a⁰b⁰ − a¹b¹ − a²b² − a³b³` for two vectors with the same index position.
    #[inline]
    pub fn dot(&self, other: &Self) -> T {
        let [a0, a1, a2, a3] = self.0;
        let [b0, b1, b2, b3] = other.0;
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3
    }

    /// Minkowski square `a·a`.
    #[inline]
    pub fn square(&self) -> T {
        self.dot(self)
    }

    /// Sum of squared components, the conditioning scale of [`Self::square`].
    #[inline]
    pub fn euclidean_square(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, &x| acc + x * x)
    }

    /// Raising or lowering with η: spatial components change sign.
    #[inline]
    pub fn flip_index(&self) -> Self {
        let [a0, a1, a2, a3] = self.0;
        Self([a0, -a1, -a2, -a3])
    }

    pub fn spatial_norm(&self) -> T {
        let [_, a1, a2, a3] = self.0;
        (a1 * a1 + a2 * a2 + a3 * a3).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl<T> Index<usize> for FourVector<T> {
    type Output = T;
    fn index(&self, mu: usize) -> &T {
        &self.0[mu]
    }
}

impl<T> IndexMut<usize> for FourVector<T> {
    fn index_mut(&mut self, mu: usize) -> &mut T {
        &mut self.0[mu]
    }
}

impl<T: Real> Add for FourVector<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl<T: Real> Sub for FourVector<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl<T: Real> Mul<T> for FourVector<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self(self.0.map(|x| x * s))
    }
}

impl<T: Real> Neg for FourVector<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|x| -x))
    }
}

/// A four-vector per lattice point, tagged with its index position.
#[derive(Debug, Clone, PartialEq)]
pub struct FourVectorField<T> {
    grid: Grid<T>,
    data: Vec<FourVector<T>>,
    position: IndexPosition,
}

impl<T: Real> FourVectorField<T> {
    pub fn new(grid: &Grid<T>, data: Vec<FourVector<T>>, position: IndexPosition) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid: *grid, data, position })
    }

    pub fn uniform(grid: &Grid<T>, v: FourVector<T>, position: IndexPosition) -> Self {
        Self { grid: *grid, data: vec![v; grid.len()], position }
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn position(&self) -> IndexPosition {
        self.position
    }

    #[inline]
    pub fn values(&self) -> &[FourVector<T>] {
        &self.data
    }

    pub fn component(&self, mu: usize) -> Vec<T> {
        self.data.iter().map(|v| v.0[mu]).collect()
    }

    /// Same vectors with the other index position.
    pub fn flip_index(&self) -> Self {
        Self { grid: self.grid, data: self.data.iter().map(FourVector::flip_index).collect(), position: self.position.flipped() }
    }

    pub fn raised(&self) -> Self {
        match self.position {
            IndexPosition::Upper => self.clone(),
            IndexPosition::Lower => self.flip_index(),
        }
    }

    pub fn lowered(&self) -> Self {
        match self.position {
            IndexPosition::Lower => self.clone(),
            IndexPosition::Upper => self.flip_index(),
        }
    }

    /// Cyclic shift of the lattice by `shift` cells along `axis`.
    pub fn shifted(&self, axis: usize, shift: isize) -> Self {
        let n = self.grid.points()[axis] as isize;
        let mut data = self.data.clone();
        for (idx, v) in self.data.iter().enumerate() {
            let mut mi = self.grid.multi_index(idx);
            mi[axis] = ((mi[axis] as isize + shift).rem_euclid(n)) as usize;
            data[self.grid.index(mi)] = *v;
        }
        Self { data, ..self.clone() }
    }
}

/// Pointwise contraction of two four-vector fields.
///
/// Equal index positions contract through η; mixed positions (`a_μ b^μ`) are a plain sum.
pub fn minkowski_dot<T: Real>(a: &FourVectorField<T>, b: &FourVectorField<T>) -> Result<Vec<T>> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let same = a.position == b.position;
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| if same { x.dot(y) } else { x.dot(&y.flip_index()) }).collect())
}
