use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use super::Grid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Accuracy order of the central first-derivative stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum DerivativeOrder {
    #[default]
    Second,
    Fourth,
}

impl DerivativeOrder {
    pub fn as_u8(self) -> u8 {
        match self {
            Self::Second => 2,
            Self::Fourth => 4,
        }
    }
}

impl TryFrom<u8> for DerivativeOrder {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            2 => Ok(Self::Second),
            4 => Ok(Self::Fourth),
            other => Err(format!("derivative order must be 2 or 4, got {other}")),
        }
    }
}

impl From<DerivativeOrder> for u8 {
    fn from(o: DerivativeOrder) -> u8 {
        o.as_u8()
    }
}

/// Periodic central difference along `axis`.
///
/// Works for any value type that is a module over `T` (reals, complex numbers).
pub fn spatial_derivative<T, S>(grid: &Grid<T>, values: &[S], axis: usize, order: DerivativeOrder) -> Result<Vec<S>>
where
    T: Real,
    S: Copy + Add<Output = S> + Sub<Output = S> + Mul<T, Output = S>,
{
    if axis >= grid.dims() {
        return Err(Error::IndexOutOfRange { what: "axis", index: axis });
    }
    debug_assert_eq!(values.len(), grid.len());
    let n = grid.points()[axis];
    let stride = grid.stride(axis);
    let dx = grid.spacing()[axis];
    // offset of the point `shift` cells away along `axis`, wrapped
    let neighbour = |idx: usize, shift: isize| -> usize {
        let i = (idx / stride) % n;
        let j = (i as isize + shift).rem_euclid(n as isize) as usize;
        idx + j * stride - i * stride
    };
    let out = match order {
        DerivativeOrder::Second => {
            let w = T::one() / (T::two() * dx);
            (0..values.len()).map(|idx| (values[neighbour(idx, 1)] - values[neighbour(idx, -1)]) * w).collect()
        }
        DerivativeOrder::Fourth => {
            let w = T::one() / (T::of(12.0) * dx);
            let eight = T::of(8.0);
            (0..values.len())
                .map(|idx| {
                    let near = (values[neighbour(idx, 1)] - values[neighbour(idx, -1)]) * eight;
                    let far = values[neighbour(idx, 2)] - values[neighbour(idx, -2)];
                    (near - far) * w
                })
                .collect()
        }
    };
    Ok(out)
}

/// Sum over axes of the first-derivative stencil applied twice.
///
/// This is the exact square of the discrete `σ·∇` used by the Dirac solver,
/// so the discrete second-order equation is an algebraic consequence of the
/// discrete first-order system.
pub fn laplacian<T, S>(grid: &Grid<T>, values: &[S], order: DerivativeOrder) -> Vec<S>
where
    T: Real,
    S: Copy + Add<Output = S> + Sub<Output = S> + Mul<T, Output = S>,
{
    let mut acc: Option<Vec<S>> = None;
    for axis in 0..grid.dims() {
        let d = spatial_derivative(grid, values, axis, order).expect("axis < dims");
        let dd = spatial_derivative(grid, &d, axis, order).expect("axis < dims");
        acc = Some(match acc {
            None => dd,
            Some(a) => a.into_iter().zip(dd).map(|(x, y)| x + y).collect(),
        });
    }
    acc.expect("grid has at least one axis")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_grid, GridSpec};
    use num_complex::Complex64;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Grid<f64> {
        make_grid(&GridSpec::uniform(1, 2.0 * PI, n), 1.0).unwrap()
    }

    fn sup_err(n: usize, order: DerivativeOrder) -> f64 {
        let g = grid(n);
        let k = 3.0;
        let f: Vec<f64> = (0..n).map(|i| (k * g.coordinate(i)[0]).sin()).collect();
        let d = spatial_derivative(&g, &f, 0, order).unwrap();
        (0..n).map(|i| (d[i] - k * (k * g.coordinate(i)[0]).cos()).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn constant_has_zero_derivative() {
        let g = grid(16);
        let d = spatial_derivative(&g, &[2.5; 16], 0, DerivativeOrder::Fourth).unwrap();
        assert!(d.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn axis_must_exist() {
        assert!(spatial_derivative(&grid(8), &[0.0; 8], 1, DerivativeOrder::Second).is_err());
    }

    #[test]
    fn convergence_order() {
        for (order, p) in [(DerivativeOrder::Second, 2.0), (DerivativeOrder::Fourth, 4.0)] {
            let slope = (sup_err(64, order) / sup_err(128, order)).log2();
            assert!((slope - p).abs() < 0.1 * p, "order {p}: slope {slope}");
        }
    }

    #[test]
    fn complex_exponential() {
        let n = 128;
        let g = grid(n);
        let k = 2.0;
        let f: Vec<Complex64> = (0..n).map(|i| Complex64::from_polar(1.0, k * g.coordinate(i)[0])).collect();
        let d = spatial_derivative(&g, &f, 0, DerivativeOrder::Second).unwrap();
        let dx = g.spacing()[0];
        // a central difference maps e^{ikx} to i sin(k dx)/dx e^{ikx}
        for i in 0..n {
            let exact = Complex64::new(0.0, k) * f[i];
            assert!((d[i] - exact).norm() < k.powi(3) * dx * dx / 6.0 * 1.01);
            assert!((d[i] - Complex64::new(0.0, (k * dx).sin() / dx) * f[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn laplacian_is_squared_derivative_in_2d() {
        let g = make_grid(&GridSpec::uniform(2, 2.0 * PI, 16), 1.0).unwrap();
        let f: Vec<f64> = (0..g.len())
            .map(|i| {
                let x = g.coordinate(i);
                x[0].sin() * (2.0 * x[1]).cos()
            })
            .collect();
        let lap = laplacian(&g, &f, DerivativeOrder::Second);
        let h = g.spacing()[0];
        // eigenvalue of D_a D_a on e^{ikx} is −sin²(k h)/h²
        let ev = -((h).sin() / h).powi(2) - ((2.0 * h).sin() / h).powi(2);
        for i in 0..g.len() {
            assert!((lap[i] - ev * f[i]).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn shift_commutes_with_derivative(seed in proptest::collection::vec(-1.0f64..1.0, 16), shift in -20isize..20) {
            let g = grid(16);
            let f = crate::lattice::ComplexField::from_components(
                &g, vec![seed.iter().map(|&x| Complex64::new(x, -x * x)).collect()]).unwrap();
            let d = |fld: &crate::lattice::ComplexField<f64>| spatial_derivative(&g, fld.component(0), 0, DerivativeOrder::Fourth).unwrap();
            let a = d(&f.shifted(0, shift));
            let b = crate::lattice::ComplexField::from_components(&g, vec![d(&f)]).unwrap().shifted(0, shift);
            for (x, y) in a.iter().zip(b.component(0)) {
                prop_assert!((x - y).norm() <= 1e-15);
            }
        }
    }
}
