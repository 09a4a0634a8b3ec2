//! Two-spinor operators shared by the Dirac and reduced solvers.

use num_complex::Complex;

use crate::clifford::pauli;
use crate::error::{Error, Result};
use crate::lattice::{spatial_derivative, ComplexField, DerivativeOrder};
use crate::scalar::Real;

pub(crate) fn expect_two(f: &ComplexField<impl Real>) -> Result<()> {
    if f.n_components() == 2 {
        Ok(())
    } else {
        Err(Error::ComponentCount { expected: 2, got: f.n_components() })
    }
}

/// Discrete `σ^i ∂_i ψ` over the grid's active axes.
pub fn sigma_dot_grad<T: Real>(psi: &ComplexField<T>, order: DerivativeOrder) -> ComplexField<T> {
    debug_assert_eq!(psi.n_components(), 2);
    let grid = psi.grid();
    let mut out = ComplexField::zeros(grid, 2);
    for axis in 0..grid.dims() {
        let sigma = pauli::<T>(axis + 1).expect("axis < 3");
        let d: Vec<Vec<Complex<T>>> =
            (0..2).map(|c| spatial_derivative(grid, psi.component(c), axis, order).expect("axis < dims")).collect();
        for r in 0..2 {
            let (s0, s1) = (sigma.0[r][0], sigma.0[r][1]);
            let dst = out.component_mut(r);
            for idx in 0..dst.len() {
                dst[idx] = dst[idx] + s0 * d[0][idx] + s1 * d[1][idx];
            }
        }
    }
    out
}

/// Componentwise `a * f + b * g`.
pub(crate) fn lin2<T: Real>(a: Complex<T>, f: &ComplexField<T>, b: Complex<T>, g: &ComplexField<T>) -> ComplexField<T> {
    f.zip_map(g, |x, y| a * x + b * y)
}

/// Unit phase `e^{iφ}`.
#[inline]
pub fn phase<T: Real>(phi: T) -> Complex<T> {
    Complex::new(phi.cos(), phi.sin())
}
