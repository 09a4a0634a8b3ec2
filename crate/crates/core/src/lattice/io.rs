//! Field snapshot CSV.
//!
//! Complex fields: `axis0,axis1,axis2,component,re,im`, one row per point and
//! component. Real fields use a single `value` column instead of `re,im`.
//! Numbers are written with 17 significant digits so they round-trip `f64`.

use std::io::{Read, Write};

use num_complex::Complex;

use super::{ComplexField, Grid};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const COMPLEX_HEADER: [&str; 6] = ["axis0", "axis1", "axis2", "component", "re", "im"];
pub const REAL_HEADER: [&str; 5] = ["axis0", "axis1", "axis2", "component", "value"];

/// Full-precision text form of a scalar.
pub fn fmt_num<T: Real>(x: T) -> String {
    format!("{:.16e}", x)
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Snapshot(e.to_string())
}

pub fn write_complex<T: Real, W: Write>(out: W, field: &ComplexField<T>) -> Result<()> {
    let grid = field.grid();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COMPLEX_HEADER).map_err(csv_err)?;
    for idx in 0..grid.len() {
        let [i0, i1, i2] = grid.multi_index(idx);
        for c in 0..field.n_components() {
            let z = field.component(c)[idx];
            w.write_record([i0.to_string(), i1.to_string(), i2.to_string(), c.to_string(), fmt_num(z.re), fmt_num(z.im)])
                .map_err(csv_err)?;
        }
    }
    w.flush().map_err(csv_err)
}

/// Writes one or more real components (component index = position in `comps`).
pub fn write_real<T: Real, W: Write>(out: W, grid: &Grid<T>, comps: &[&[T]]) -> Result<()> {
    if comps.iter().any(|c| c.len() != grid.len()) {
        return Err(Error::GridMismatch);
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REAL_HEADER).map_err(csv_err)?;
    for idx in 0..grid.len() {
        let [i0, i1, i2] = grid.multi_index(idx);
        for (c, values) in comps.iter().enumerate() {
            w.write_record([i0.to_string(), i1.to_string(), i2.to_string(), c.to_string(), fmt_num(values[idx])])
                .map_err(csv_err)?;
        }
    }
    w.flush().map_err(csv_err)
}

/// Reads a complex snapshot onto `grid`. Every (point, component) pair must appear exactly once.
pub fn read_complex<T: Real, R: Read>(input: R, grid: &Grid<T>) -> Result<ComplexField<T>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != COMPLEX_HEADER {
        return Err(Error::Snapshot(format!("unexpected header {:?}", header)));
    }
    let mut rows: Vec<([usize; 4], Complex<T>)> = Vec::new();
    let mut n_comp = 0usize;
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let int = |k: usize| -> Result<usize> {
            rec[k].trim().parse::<usize>().map_err(|e| Error::Snapshot(format!("column {}: {e}", COMPLEX_HEADER[k])))
        };
        let real = |k: usize| -> Result<T> {
            let v = rec[k].trim().parse::<f64>().map_err(|e| Error::Snapshot(format!("column {}: {e}", COMPLEX_HEADER[k])))?;
            if !v.is_finite() {
                return Err(Error::Snapshot(format!("non-finite value in column {}", COMPLEX_HEADER[k])));
            }
            Ok(T::of(v))
        };
        let key = [int(0)?, int(1)?, int(2)?, int(3)?];
        n_comp = n_comp.max(key[3] + 1);
        rows.push((key, Complex::new(real(4)?, real(5)?)));
    }
    if !matches!(n_comp, 1 | 2 | 4) {
        return Err(Error::ComponentCount { expected: 4, got: n_comp });
    }
    let mut field = ComplexField::zeros(grid, n_comp);
    let mut seen = vec![false; grid.len() * n_comp];
    let pts = grid.points();
    for ([i0, i1, i2, c], z) in rows {
        if i0 >= pts[0] || i1 >= pts[1] || i2 >= pts[2] {
            return Err(Error::Snapshot(format!("point ({i0},{i1},{i2}) outside grid")));
        }
        let idx = grid.index([i0, i1, i2]);
        if std::mem::replace(&mut seen[c * grid.len() + idx], true) {
            return Err(Error::Snapshot(format!("duplicate entry for point ({i0},{i1},{i2}) component {c}")));
        }
        field.component_mut(c)[idx] = z;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Snapshot("snapshot does not cover the whole grid".into()));
    }
    Ok(field)
}
