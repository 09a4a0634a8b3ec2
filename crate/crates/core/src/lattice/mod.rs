//! Periodic lattice substrate: grid geometry, multi-component complex fields,
//! central-difference stencils, Minkowski four-vectors and snapshot I/O.

mod field;
mod four;
mod grid;
pub mod io;
mod stencil;

pub use field::{ComplexField, RealField};
pub use four::{minkowski_dot, FourVector, FourVectorField, IndexPosition, METRIC_SIGNS};
pub use grid::{make_grid, Grid, GridSpec, MIN_POINTS};
pub use stencil::{laplacian, spatial_derivative, DerivativeOrder};

use std::ops::{Add, Mul};

use num_traits::Zero;

use crate::scalar::Real;

/// `∂_μ f` (lower index) of a real field from three levels spaced `h` in `x0`:
/// central difference in time, stencils in space.
pub fn four_gradient<T: Real>(grid: &Grid<T>, levels: [&[T]; 3], h: T, order: DerivativeOrder) -> Vec<FourVector<T>> {
    let [prev, cur, next] = levels;
    let w = T::one() / (T::two() * h);
    let mut out: Vec<FourVector<T>> =
        prev.iter().zip(next).map(|(a, b)| FourVector::new((*b - *a) * w, T::zero(), T::zero(), T::zero())).collect();
    for axis in 0..grid.dims() {
        let d = spatial_derivative(grid, cur, axis, order).expect("axis < dims");
        for (v, x) in out.iter_mut().zip(d) {
            v[axis + 1] = x;
        }
    }
    out
}

/// Riemann sum of `values` times the cell volume.
pub fn integrate_volume<T, S>(grid: &Grid<T>, values: &[S]) -> S
where
    T: Real,
    S: Copy + Zero + Add<Output = S> + Mul<T, Output = S>,
{
    debug_assert_eq!(values.len(), grid.len());
    let sum = values.iter().fold(S::zero(), |acc, &v| acc + v);
    sum * grid.cell_volume()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_gradient_of_a_travelling_wave() {
        // f = sin(x − 0.5 x0): ∂₀f = −0.5 cos, ∂₁f = cos
        let grid = make_grid(&GridSpec::uniform(1, 2.0 * std::f64::consts::PI, 128), 1.0).unwrap();
        let h = 1e-3;
        let level = |x0: f64| -> Vec<f64> { (0..grid.len()).map(|i| (grid.coordinate(i)[0] - 0.5 * x0).sin()).collect() };
        let (a, b, c) = (level(-h), level(0.0), level(h));
        let g = four_gradient(&grid, [&a, &b, &c], h, DerivativeOrder::Fourth);
        for (i, v) in g.iter().enumerate() {
            let cos = grid.coordinate(i)[0].cos();
            assert!((v[0] + 0.5 * cos).abs() < 1e-7);
            assert!((v[1] - cos).abs() < 1e-6);
            assert_eq!((v[2], v[3]), (0.0, 0.0));
        }
    }
}
