use num_complex::Complex;
use num_traits::Zero;

use super::{integrate_volume, Grid};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `n` complex components per lattice point, stored component-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField<T> {
    grid: Grid<T>,
    comps: Vec<Vec<Complex<T>>>,
}

impl<T: Real> ComplexField<T> {
    pub fn zeros(grid: &Grid<T>, n: usize) -> Self {
        assert!(matches!(n, 1 | 2 | 4), "component count must be 1, 2 or 4");
        Self { grid: *grid, comps: vec![vec![Complex::zero(); grid.len()]; n] }
    }

    pub fn from_components(grid: &Grid<T>, comps: Vec<Vec<Complex<T>>>) -> Result<Self> {
        if !matches!(comps.len(), 1 | 2 | 4) {
            return Err(Error::ComponentCount { expected: 2, got: comps.len() });
        }
        if comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid: *grid, comps })
    }

    /// Samples `f(coordinate)` at every point.
    pub fn from_fn<const N: usize>(grid: &Grid<T>, f: impl Fn([T; 3]) -> [Complex<T>; N]) -> Self {
        let mut out = Self::zeros(grid, N);
        for idx in 0..grid.len() {
            let v = f(grid.coordinate(idx));
            for (c, z) in v.into_iter().enumerate() {
                out.comps[c][idx] = z;
            }
        }
        out
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn n_components(&self) -> usize {
        self.comps.len()
    }

    #[inline]
    pub fn component(&self, c: usize) -> &[Complex<T>] {
        &self.comps[c]
    }

    #[inline]
    pub fn component_mut(&mut self, c: usize) -> &mut [Complex<T>] {
        &mut self.comps[c]
    }

    pub fn components(&self) -> &[Vec<Complex<T>>] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Vec<Complex<T>>> {
        self.comps
    }

    /// Values of all components at one point.
    pub fn at(&self, idx: usize) -> Vec<Complex<T>> {
        self.comps.iter().map(|c| c[idx]).collect()
    }

    pub fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid && self.comps.len() == other.comps.len() {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Componentwise `f(self, other)`.
    pub fn zip_map(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        debug_assert!(self.same_grid(other).is_ok());
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()).collect();
        Self { grid: self.grid, comps }
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        let comps = self.comps.iter().map(|a| a.iter().map(|&x| f(x)).collect()).collect();
        Self { grid: self.grid, comps }
    }

    /// `self + a * other`
    pub fn axpy(&self, a: T, other: &Self) -> Self {
        self.zip_map(other, |x, y| x + y * a)
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        self.map(|x| x * s)
    }

    /// Pointwise sum of squared moduli over components.
    pub fn density(&self) -> Vec<T> {
        (0..self.grid.len()).map(|i| self.comps.iter().fold(T::zero(), |acc, c| acc + c[i].norm_sqr())).collect()
    }

    pub fn max_abs(&self) -> T {
        self.comps.iter().flat_map(|c| c.iter()).fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().flat_map(|c| c.iter()).all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `sqrt(∫ Σ|ψ_c|²)`
    pub fn l2_norm(&self) -> T {
        integrate_volume(&self.grid, &self.density()).sqrt()
    }

    /// Largest componentwise modulus of `self - other`.
    pub fn sup_distance(&self, other: &Self) -> T {
        self.comps
            .iter()
            .zip(&other.comps)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
            .fold(T::zero(), T::max)
    }

    pub fn l2_distance(&self, other: &Self) -> T {
        self.zip_map(other, |x, y| x - y).l2_norm()
    }

    /// Cyclic shift by `shift` cells along `axis`: `out[i] = self[i - shift]`.
    pub fn shifted(&self, axis: usize, shift: isize) -> Self {
        let n = self.grid.points()[axis] as isize;
        let mut out = Self::zeros(&self.grid, self.comps.len());
        for idx in 0..self.grid.len() {
            let mut mi = self.grid.multi_index(idx);
            mi[axis] = ((mi[axis] as isize + shift).rem_euclid(n)) as usize;
            let dst = self.grid.index(mi);
            for c in 0..self.comps.len() {
                out.comps[c][dst] = self.comps[c][idx];
            }
        }
        out
    }
}

/// One real value per lattice point.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField<T> {
    grid: Grid<T>,
    data: Vec<T>,
}

impl<T: Real> RealField<T> {
    pub fn new(grid: &Grid<T>, data: Vec<T>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid: *grid, data })
    }

    pub fn from_fn(grid: &Grid<T>, f: impl Fn([T; 3]) -> T) -> Self {
        let data = (0..grid.len()).map(|i| f(grid.coordinate(i))).collect();
        Self { grid: *grid, data }
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.data
    }

    pub fn into_values(self) -> Vec<T> {
        self.data
    }

    pub fn integrate(&self) -> T {
        integrate_volume(&self.grid, &self.data)
    }
}
