//! ψ₁ together with its four-gradient, the input of the fluid map and of the
//! Lagrangian diagnostics.
//!
//! Gradients are lower-index `∂_μ` with `μ = 0` along `x0`. They come either
//! from stencils on lattice data or from closed forms supplied by the caller,
//! so every identity can be checked both ways.

use num_complex::Complex;

use crate::dirac::{DiracSolver, DiracState};
use crate::error::{Error, Result};
use crate::lattice::{spatial_derivative, ComplexField, DerivativeOrder, Grid};
use crate::scalar::Real;
use crate::spinor::expect_two;

/// `(ψ↑, ψ↓)` and `∂_μ` of each at one spacetime point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorSample<T> {
    pub psi: [Complex<T>; 2],
    /// `grad[s][μ] = ∂_μ ψ_s`
    pub grad: [[Complex<T>; 4]; 2],
}

impl<T: Real> SpinorSample<T> {
    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self { psi: [z; 2], grad: [[z; 4]; 2] }
    }
}

/// Samples for every lattice point of one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorJet<T> {
    grid: Grid<T>,
    samples: Vec<SpinorSample<T>>,
}

impl<T: Real> SpinorJet<T> {
    /// Uses `rate = ∂₀ψ` as given and stencils for the spatial components.
    pub fn from_rate(psi: &ComplexField<T>, rate: &ComplexField<T>, order: DerivativeOrder) -> Result<Self> {
        expect_two(psi)?;
        psi.same_grid(rate)?;
        let grid = *psi.grid();
        let mut samples = vec![SpinorSample::zero(); grid.len()];
        for s in 0..2 {
            for (i, smp) in samples.iter_mut().enumerate() {
                smp.psi[s] = psi.component(s)[i];
                smp.grad[s][0] = rate.component(s)[i];
            }
            for axis in 0..grid.dims() {
                let d = spatial_derivative(&grid, psi.component(s), axis, order)?;
                for (smp, v) in samples.iter_mut().zip(d) {
                    smp.grad[s][axis + 1] = v;
                }
            }
        }
        Ok(Self { grid, samples })
    }

    /// Central difference in time across `prev` and `next`, which sit `h` before and after `cur`.
    pub fn from_window(
        prev: &ComplexField<T>,
        cur: &ComplexField<T>,
        next: &ComplexField<T>,
        h: T,
        order: DerivativeOrder,
    ) -> Result<Self> {
        prev.same_grid(cur)?;
        next.same_grid(cur)?;
        let w = T::one() / (T::two() * h);
        let rate = next.zip_map(prev, |a, b| (a - b) * w);
        Self::from_rate(cur, &rate, order)
    }

    /// Time derivative taken from the semi-discrete Dirac equation itself.
    pub fn from_dirac(state: &DiracState<T>, solver: &DiracSolver<T>) -> Result<Self> {
        let (rate, _) = solver.rhs(&state.psi1, &state.psi2);
        Self::from_rate(&state.psi1, &rate, solver.order)
    }

    /// Jets at every interior level of equally spaced ψ₁ levels.
    pub fn from_levels(levels: &[ComplexField<T>], h: T, order: DerivativeOrder) -> Result<Vec<Self>> {
        if levels.len() < 3 {
            return Err(Error::InsufficientLevels { needed: 3, got: levels.len() });
        }
        levels.windows(3).map(|w| Self::from_window(&w[0], &w[1], &w[2], h, order)).collect()
    }

    /// Closed-form samples: `f(coordinate) -> sample`.
    pub fn from_fn(grid: &Grid<T>, f: impl Fn([T; 3]) -> SpinorSample<T>) -> Self {
        Self { grid: *grid, samples: (0..grid.len()).map(|i| f(grid.coordinate(i))).collect() }
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn samples(&self) -> &[SpinorSample<T>] {
        &self.samples
    }
}
