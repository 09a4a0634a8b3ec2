use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MIN_POINTS: usize = 8;

/// User-facing description of a lattice. Spacings and the default time step
/// are derived by [`make_grid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec<T> {
    pub extents: Vec<T>,
    pub points: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfl_factor: Option<T>,
}

impl<T: Real> GridSpec<T> {
    pub fn uniform(dims: usize, extent: T, points: usize) -> Self {
        Self { extents: vec![extent; dims], points: vec![points; dims], dt: None, cfl_factor: None }
    }

    pub fn with_dt(mut self, dt: T) -> Self {
        self.dt = Some(dt);
        self
    }
}

/// Uniform periodic lattice with 1 to 3 spatial axes. Axes beyond `dims`
/// carry a single point and do not contribute to derivatives or volumes.
///
/// Linear index: `i0 + n0 * (i1 + n1 * i2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid<T> {
    dims: usize,
    extents: [T; 3],
    points: [usize; 3],
    spacing: [T; 3],
    dt: T,
    cfl_factor: T,
}

/// Builds a grid, filling `dt = 0.25 * min(dx) / c` and `cfl_factor = 1` when absent.
pub fn make_grid<T: Real>(spec: &GridSpec<T>, c: T) -> Result<Grid<T>> {
    let dims = spec.extents.len();
    if !(1..=3).contains(&dims) {
        return Err(Error::InvalidGrid(format!("dims must be 1..=3, got {dims}")));
    }
    if spec.points.len() != dims {
        return Err(Error::InvalidGrid(format!("{} extents but {} point counts", dims, spec.points.len())));
    }
    if !(c > T::zero()) {
        return Err(Error::InvalidGrid("c must be positive".into()));
    }
    let mut extents = [T::one(); 3];
    let mut points = [1usize; 3];
    let mut spacing = [T::one(); 3];
    for a in 0..dims {
        let (l, n) = (spec.extents[a], spec.points[a]);
        if !(l > T::zero() && l.is_finite()) {
            return Err(Error::InvalidGrid(format!("extent on axis {a} must be positive, got {l}")));
        }
        if n < MIN_POINTS {
            return Err(Error::InvalidGrid(format!("axis {a} has {n} points, need at least {MIN_POINTS}")));
        }
        extents[a] = l;
        points[a] = n;
        spacing[a] = l / T::of_usize(n);
    }
    let min_dx = spacing[..dims].iter().copied().fold(T::infinity(), T::min);
    let cfl_factor = spec.cfl_factor.unwrap_or_else(T::one);
    if !(cfl_factor > T::zero() && cfl_factor <= T::one()) {
        return Err(Error::InvalidGrid(format!("cfl_factor must lie in (0, 1], got {cfl_factor}")));
    }
    let limit = cfl_factor * min_dx / c;
    let dt = spec.dt.unwrap_or_else(|| T::of(0.25) * min_dx / c);
    if !(dt > T::zero()) {
        return Err(Error::InvalidGrid(format!("dt must be positive, got {dt}")));
    }
    if dt > limit {
        return Err(Error::CflViolation { dt: dt.to_f64().unwrap_or(f64::NAN), limit: limit.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(Grid { dims, extents, points, spacing, dt, cfl_factor })
}

impl<T: Real> Grid<T> {
    #[inline]
    pub fn dims(&self) -> usize {
        self.dims
    }

    #[inline]
    pub fn points(&self) -> [usize; 3] {
        self.points
    }

    #[inline]
    pub fn extents(&self) -> [T; 3] {
        self.extents
    }

    #[inline]
    pub fn spacing(&self) -> [T; 3] {
        self.spacing
    }

    #[inline]
    pub fn dt(&self) -> T {
        self.dt
    }

    #[inline]
    pub fn cfl_factor(&self) -> T {
        self.cfl_factor
    }

    /// Total number of lattice points.
    #[inline]
    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn min_spacing(&self) -> T {
        self.spacing[..self.dims].iter().copied().fold(T::infinity(), T::min)
    }

    pub fn cell_volume(&self) -> T {
        self.spacing[..self.dims].iter().copied().fold(T::one(), |a, b| a * b)
    }

    /// Same lattice with a different time step. The CFL gate is re-checked.
    pub fn with_dt(&self, dt: T, c: T) -> Result<Self> {
        let limit = self.cfl_factor * self.min_spacing() / c;
        if !(dt > T::zero()) || dt > limit {
            return Err(Error::CflViolation { dt: dt.to_f64().unwrap_or(f64::NAN), limit: limit.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(Self { dt, ..*self })
    }

    /// Spec that reproduces this grid through [`make_grid`].
    pub fn spec(&self) -> GridSpec<T> {
        GridSpec {
            extents: self.extents[..self.dims].to_vec(),
            points: self.points[..self.dims].to_vec(),
            dt: Some(self.dt),
            cfl_factor: Some(self.cfl_factor),
        }
    }

    #[inline]
    pub fn index(&self, i: [usize; 3]) -> usize {
        i[0] + self.points[0] * (i[1] + self.points[1] * i[2])
    }

    #[inline]
    pub fn multi_index(&self, idx: usize) -> [usize; 3] {
        let i0 = idx % self.points[0];
        let rest = idx / self.points[0];
        [i0, rest % self.points[1], rest / self.points[1]]
    }

    /// Physical coordinate of a lattice point; unused axes report 0.
    pub fn coordinate(&self, idx: usize) -> [T; 3] {
        let mi = self.multi_index(idx);
        let mut x = [T::zero(); 3];
        for a in 0..self.dims {
            x[a] = T::of_usize(mi[a]) * self.spacing[a];
        }
        x
    }

    /// Linear stride of `axis` in the flat storage.
    #[inline]
    pub(crate) fn stride(&self, axis: usize) -> usize {
        self.points[..axis].iter().product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn spacing_from_extent_and_points() {
        let g = make_grid(&GridSpec::uniform(1, 2.0 * PI, 8).with_dt(0.1 * PI / 4.0), 1.0).unwrap();
        assert_eq!(g.spacing()[0], PI / 4.0);
        assert_eq!(g.len(), 8);
        assert!((g.dt() - 0.1 * PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_cfl_violation() {
        let dx = 2.0 * PI / 8.0;
        let err = make_grid(&GridSpec::uniform(1, 2.0 * PI, 8).with_dt(1.01 * dx), 1.0).unwrap_err();
        assert!(matches!(err, Error::CflViolation { .. }));
        // the limit scales with c
        assert!(make_grid(&GridSpec::uniform(1, 2.0 * PI, 8).with_dt(0.9 * dx), 1.0).is_ok());
        assert!(make_grid(&GridSpec::uniform(1, 2.0 * PI, 8).with_dt(0.9 * dx), 2.0).is_err());
    }

    #[test]
    fn rejects_small_or_bad_specs() {
        assert!(matches!(make_grid(&GridSpec::uniform(1, 1.0, 7), 1.0), Err(Error::InvalidGrid(_))));
        assert!(make_grid(&GridSpec::uniform(1, -1.0, 8), 1.0).is_err());
        assert!(make_grid(&GridSpec::<f64>::uniform(4, 1.0, 8), 1.0).is_err());
        let mut spec = GridSpec::uniform(2, 1.0, 8);
        spec.cfl_factor = Some(1.5);
        assert!(make_grid(&spec, 1.0).is_err());
    }

    #[test]
    fn cube_grid_and_default_dt() {
        let g = make_grid(&GridSpec::uniform(3, 2.0 * PI, 16), 1.0).unwrap();
        assert_eq!(g.len(), 16 * 16 * 16);
        assert_eq!(g.dt(), 0.25 * g.min_spacing());
        assert!((g.cell_volume() - (2.0 * PI / 16.0).powi(3)).abs() < 1e-15);
    }

    #[test]
    fn index_round_trip() {
        let g = make_grid(&GridSpec { extents: vec![1.0, 2.0, 3.0], points: vec![8, 9, 10], dt: None, cfl_factor: None }, 1.0)
            .unwrap();
        for idx in [0, 1, 71, 72, 719] {
            assert_eq!(g.index(g.multi_index(idx)), idx);
        }
        assert_eq!(g.coordinate(g.index([1, 2, 3]))[2], 3.0 * 0.3);
    }

    #[test]
    fn spec_round_trip() {
        let g = make_grid(&GridSpec::uniform(2, 4.0, 16), 1.0).unwrap();
        assert_eq!(make_grid(&g.spec(), 1.0).unwrap(), g);
    }
}
