//! Lagrangian-density forms, the probability four-current, and residuals
//! between forms that must agree.

use num_complex::Complex;
use serde::Serialize;

use crate::clifford::{bilinear, gamma};
use crate::dirac::DiracState;
use crate::error::{Error, Result};
use crate::fluid::{FluidState, Mask};
use crate::jet::SpinorSample;
use crate::lattice::{
    integrate_volume, io::fmt_num, spatial_derivative, DerivativeOrder, FourVector, FourVectorField, IndexPosition,
};
use crate::params::PhysParams;
use crate::scalar::Real;

/// `m[(ħ²/m²) Σ_s ∂^μψ_s* ∂_μψ_s − c² Σ_s |ψ_s|²]`
pub fn lagrangian_spinor<T: Real>(samples: &[SpinorSample<T>], params: &PhysParams<T>) -> Vec<T> {
    let (hbar, m, c) = (params.hbar, params.m, params.c);
    let k = hbar * hbar / m;
    let mc2 = m * c * c;
    samples
        .iter()
        .map(|s| {
            let mut kinetic = T::zero();
            let mut dens = T::zero();
            for comp in 0..2 {
                let g = &s.grad[comp];
                kinetic = kinetic + g[0].norm_sqr() - g[1].norm_sqr() - g[2].norm_sqr() - g[3].norm_sqr();
                dens = dens + s.psi[comp].norm_sqr();
            }
            k * kinetic - mc2 * dens
        })
        .collect()
}

/// Magnitude of the terms summed in [`lagrangian_spinor`].
fn spinor_term_scale<T: Real>(s: &SpinorSample<T>, params: &PhysParams<T>) -> T {
    let k = params.hbar * params.hbar / params.m;
    let mc2 = params.m * params.c * params.c;
    (0..2).fold(T::zero(), |acc, comp| {
        let g = s.grad[comp].iter().fold(T::zero(), |a, z| a + z.norm_sqr());
        acc + k * g + mc2 * s.psi[comp].norm_sqr()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitLagrangian<T> {
    /// `(ħ²/m)[(∂R↑)² + (∂R↓)²]`
    pub quantum: Vec<T>,
    /// `m[R↑²((∂ν↑)² − c²) + R↓²((∂ν↓)² − c²)]`
    pub classical: Vec<T>,
}

/// Quantum/classical partition from amplitude and phase four-gradients.
pub fn lagrangian_split<T: Real>(
    r_up: &[T],
    r_down: &[T],
    grad_r_up: &[FourVector<T>],
    grad_r_down: &[FourVector<T>],
    grad_nu_up: &[FourVector<T>],
    grad_nu_down: &[FourVector<T>],
    params: &PhysParams<T>,
) -> SplitLagrangian<T> {
    let k = params.hbar * params.hbar / params.m;
    let c2 = params.c * params.c;
    let n = r_up.len();
    let mut quantum = Vec::with_capacity(n);
    let mut classical = Vec::with_capacity(n);
    for i in 0..n {
        quantum.push(k * (grad_r_up[i].square() + grad_r_down[i].square()));
        classical.push(
            params.m
                * (r_up[i] * r_up[i] * (grad_nu_up[i].square() - c2) + r_down[i] * r_down[i] * (grad_nu_down[i].square() - c2)),
        );
    }
    SplitLagrangian { quantum, classical }
}

/// Split evaluated from a fluid state's own gradients.
pub fn lagrangian_split_of<T: Real>(fluid: &FluidState<T>, params: &PhysParams<T>) -> SplitLagrangian<T> {
    let (a, g) = (&fluid.amplitudes, &fluid.gradients);
    lagrangian_split(&a.r_up, &a.r_down, &g.grad_r_up, &g.grad_r_down, &g.grad_nu_up, &g.grad_nu_down, params)
}

/// `ρ̄ (v_C·v_C − c²)`
pub fn lagrangian_classical_clebsch<T: Real>(rho_bar: &[T], v_c: &[FourVector<T>], params: &PhysParams<T>) -> Vec<T> {
    let c2 = params.c * params.c;
    rho_bar.iter().zip(v_c).map(|(&r, v)| r * (v.square() - c2)).collect()
}

/// `c ρ₀ (√(v_C·v_C) − c)`; zero where `v_C` is spacelike.
pub fn lagrangian_classical_fluid<T: Real>(rho_0: &[T], v_c: &[FourVector<T>], params: &PhysParams<T>) -> Vec<T> {
    let c = params.c;
    rho_0
        .iter()
        .zip(v_c)
        .map(|(&r, v)| {
            let vv = v.square();
            if vv < T::zero() {
                T::zero()
            } else {
                c * r * (vv.sqrt() - c)
            }
        })
        .collect()
}

/// Total amplitude `R` and mixing angle θ with their four-gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarSample<T> {
    pub r: T,
    pub grad_r: FourVector<T>,
    pub theta: T,
    pub grad_theta: FourVector<T>,
}

impl<T: Real> PolarSample<T> {
    /// Chain rule from `(R↑, R↓)`: `∂R = (R↑∂R↑ + R↓∂R↓)/R`, `∂θ = (R↑∂R↓ − R↓∂R↑)/R²`.
    pub fn from_components(r_up: T, r_down: T, grad_up: FourVector<T>, grad_down: FourVector<T>) -> Self {
        let r = r_up.hypot(r_down);
        if r == T::zero() {
            return Self { r, grad_r: FourVector::zero(), theta: T::zero(), grad_theta: FourVector::zero() };
        }
        Self {
            r,
            grad_r: (grad_up * r_up + grad_down * r_down) * (T::one() / r),
            theta: r_down.atan2(r_up),
            grad_theta: (grad_down * r_up - grad_up * r_down) * (T::one() / (r * r)),
        }
    }
}

pub fn polar_samples<T: Real>(fluid: &FluidState<T>) -> Vec<PolarSample<T>> {
    let (a, g) = (&fluid.amplitudes, &fluid.gradients);
    (0..fluid.len()).map(|i| PolarSample::from_components(a.r_up[i], a.r_down[i], g.grad_r_up[i], g.grad_r_down[i])).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumForms<T> {
    /// `(ħ²/m)[(∂R)² + R²(∂θ)²]`
    pub polar: Vec<T>,
    /// `(ħ²/2m)(∂a₀)²` with `a₀ = √2 R` substituted exactly.
    pub fisher_amplitude: Vec<T>,
    /// `(ħ²/2m) a₀² (∂θ)²` with `a₀ = √2 R` substituted exactly.
    pub fisher_angle: Vec<T>,
    /// `(ħ²/2m)(∂a₀)²` with the measured `a₀ = √(ρ₀/m)`.
    pub rf_quantum: Vec<T>,
    /// `(ħ²/2m) a₀² (∂θ)²` with the measured `a₀`: what `rf_quantum` lacks.
    pub gap: Vec<T>,
}

/// Quantum Lagrangian forms. `a0` and `grad_a0` are the measured rest-frame
/// amplitude and its four-gradient (any source).
pub fn lagrangian_quantum_forms<T: Real>(
    polar: &[PolarSample<T>],
    a0: &[T],
    grad_a0: &[FourVector<T>],
    params: &PhysParams<T>,
) -> QuantumForms<T> {
    let k = params.hbar * params.hbar / params.m;
    let half_k = k * T::half();
    let sqrt2 = T::two().sqrt();
    let n = polar.len();
    let mut out = QuantumForms {
        polar: Vec::with_capacity(n),
        fisher_amplitude: Vec::with_capacity(n),
        fisher_angle: Vec::with_capacity(n),
        rf_quantum: Vec::with_capacity(n),
        gap: Vec::with_capacity(n),
    };
    for i in 0..n {
        let p = &polar[i];
        let th2 = p.grad_theta.square();
        out.polar.push(k * (p.grad_r.square() + p.r * p.r * th2));
        let a_exact = p.r * sqrt2;
        let grad_a_exact = p.grad_r * sqrt2;
        out.fisher_amplitude.push(half_k * grad_a_exact.square());
        out.fisher_angle.push(half_k * a_exact * a_exact * th2);
        out.rf_quantum.push(half_k * grad_a0[i].square());
        out.gap.push(half_k * a0[i] * a0[i] * th2);
    }
    out
}

/// Relative residual between two evaluations of the same quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResidual {
    /// `‖A − B‖₂ / ‖scale‖₂` over included points.
    pub l2: f64,
    /// `max |A − B| / scale` over included points.
    pub sup: f64,
    pub masked_fraction: f64,
    pub checked: usize,
}

impl IdentityResidual {
    /// `scale[i]` is a local magnitude; it is floored by `max(|A|, |B|)` and
    /// the smallest positive normal number so zero Lagrangians do not divide by zero.
    pub fn evaluate<T: Real>(a: &[T], b: &[T], scale: &[T], include: &[bool]) -> Self {
        let (mut num2, mut den2, mut sup, mut checked) = (0.0f64, 0.0f64, 0.0f64, 0usize);
        for i in 0..a.len() {
            if !include[i] {
                continue;
            }
            let diff = (a[i] - b[i]).abs().to_f64().unwrap_or(f64::INFINITY);
            let s = scale[i].max(a[i].abs()).max(b[i].abs()).max(T::min_positive_value());
            let s = s.to_f64().unwrap_or(f64::MIN_POSITIVE).max(f64::MIN_POSITIVE);
            num2 += diff * diff;
            den2 += s * s;
            sup = sup.max(diff / s);
            checked += 1;
        }
        let l2 = if checked == 0 { 0.0 } else { (num2 / den2).sqrt() };
        let masked_fraction = if a.is_empty() { 0.0 } else { 1.0 - checked as f64 / a.len() as f64 };
        Self { l2, sup, masked_fraction, checked }
    }
}

/// Every Lagrangian form at a set of points plus residuals between forms.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianBreakdown<T> {
    pub spinor: Vec<T>,
    pub kg_quantum: Vec<T>,
    pub kg_classical: Vec<T>,
    pub classical_clebsch: Vec<T>,
    pub classical_fluid: Vec<T>,
    pub quantum: QuantumForms<T>,
    pub residuals: Vec<(&'static str, IdentityResidual)>,
}

pub const SPLIT: &str = "split_spinor_vs_quantum_plus_classical";
pub const CLEBSCH_SQUARE: &str = "clebsch_square_vs_mixed_phases";
pub const CLEBSCH_LAGRANGIAN: &str = "classical_clebsch_vs_classical";
pub const FLUID_FORM: &str = "classical_fluid_vs_classical_clebsch";
pub const POLAR: &str = "polar_quantum_vs_quantum";
pub const FISHER_PAIR: &str = "fisher_pair_exact_a0_vs_polar";

impl<T: Real> LagrangianBreakdown<T> {
    /// Evaluates every form. `polar` supplies `(R, θ)` gradients and
    /// `grad_a0` the gradient of the measured `a₀` (any source).
    pub fn evaluate(
        samples: &[SpinorSample<T>],
        fluid: &FluidState<T>,
        polar: &[PolarSample<T>],
        grad_a0: &[FourVector<T>],
        params: &PhysParams<T>,
    ) -> Self {
        let n = samples.len();
        let spinor = lagrangian_spinor(samples, params);
        let split = lagrangian_split_of(fluid, params);
        let clebsch = lagrangian_classical_clebsch(&fluid.amplitudes.rho_bar, &fluid.v_c, params);
        let fluid_form = lagrangian_classical_fluid(&fluid.rest.rho_0, &fluid.v_c, params);
        let quantum = lagrangian_quantum_forms(polar, &fluid.rest.a_0, grad_a0, params);
        let c2 = params.c * params.c;
        let k = params.hbar * params.hbar / params.m;

        let not_low: Vec<bool> = fluid.mask.iter().map(|m| *m != Mask::LowDensity).collect();
        let velocity: Vec<bool> = fluid.mask.iter().map(|m| m.has_velocity()).collect();
        let rest: Vec<bool> = fluid.mask.iter().map(|m| m.has_rest_frame()).collect();
        let g = &fluid.gradients;
        let a = &fluid.amplitudes;

        let sum_split: Vec<T> = split.quantum.iter().zip(&split.classical).map(|(q, c)| *q + *c).collect();
        let split_scale: Vec<T> = samples.iter().map(|s| spinor_term_scale(s, params)).collect();

        let vv = fluid.velocity_square();
        let mixed = fluid.mixed_phase_square();
        let sq_scale: Vec<T> = (0..n)
            .map(|i| {
                let (s, c) = a.theta[i].sin_cos();
                fluid.v_c[i].euclidean_square()
                    + c * c * g.grad_nu_up[i].euclidean_square()
                    + s * s * g.grad_nu_down[i].euclidean_square()
            })
            .collect();
        let lag_scale: Vec<T> = (0..n).map(|i| a.rho_bar[i] * (fluid.v_c[i].euclidean_square() + sq_scale[i] + c2)).collect();

        let polar_scale: Vec<T> =
            polar.iter().map(|p| k * (p.grad_r.euclidean_square() + p.r * p.r * p.grad_theta.euclidean_square())).collect();
        let fisher_sum: Vec<T> = quantum.fisher_amplitude.iter().zip(&quantum.fisher_angle).map(|(x, y)| *x + *y).collect();

        let residuals = vec![
            (SPLIT, IdentityResidual::evaluate(&spinor, &sum_split, &split_scale, &not_low)),
            (CLEBSCH_SQUARE, IdentityResidual::evaluate(&vv, &mixed, &sq_scale, &velocity)),
            (CLEBSCH_LAGRANGIAN, IdentityResidual::evaluate(&clebsch, &split.classical, &lag_scale, &velocity)),
            (FLUID_FORM, IdentityResidual::evaluate(&fluid_form, &clebsch, &lag_scale, &rest)),
            (POLAR, IdentityResidual::evaluate(&quantum.polar, &split.quantum, &polar_scale, &not_low)),
            (FISHER_PAIR, IdentityResidual::evaluate(&fisher_sum, &quantum.polar, &polar_scale, &not_low)),
        ];
        Self {
            spinor,
            kg_quantum: split.quantum,
            kg_classical: split.classical,
            classical_clebsch: clebsch,
            classical_fluid: fluid_form,
            quantum,
            residuals,
        }
    }

    pub fn residual(&self, name: &str) -> Option<IdentityResidual> {
        self.residuals.iter().find(|(n, _)| *n == name).map(|(_, r)| *r)
    }
}

/// Row of the identity report CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRow {
    pub identity_name: String,
    pub grid_tag: String,
    pub branch: String,
    pub residual_l2: f64,
    pub residual_sup: f64,
    pub masked_fraction: f64,
}

pub fn write_identity_csv<W: std::io::Write>(out: W, rows: &[IdentityRow]) -> Result<()> {
    let err = |e: csv::Error| Error::Snapshot(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["identity_name", "grid_tag", "branch", "residual_l2", "residual_sup", "masked_fraction"]).map_err(err)?;
    for r in rows {
        w.write_record([
            r.identity_name.clone(),
            r.grid_tag.clone(),
            r.branch.clone(),
            fmt_num(r.residual_l2),
            fmt_num(r.residual_sup),
            fmt_num(r.masked_fraction),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::Snapshot(e.to_string()))
}

/// `J^μ = Ψ̄ γ^μ Ψ` at one point (upper index).
pub fn current_at<T: Real>(psi: &[Complex<T>; 4]) -> FourVector<T> {
    FourVector(std::array::from_fn(|mu| bilinear(psi, &gamma::<T>(mu).expect("mu < 4")).re))
}

/// Probability four-current of a Dirac state (upper index).
pub fn probability_current<T: Real>(state: &DiracState<T>) -> FourVectorField<T> {
    let grid = state.grid();
    let data = (0..grid.len())
        .map(|i| {
            let psi =
                [state.psi1.component(0)[i], state.psi1.component(1)[i], state.psi2.component(0)[i], state.psi2.component(1)[i]];
            current_at(&psi)
        })
        .collect();
    FourVectorField::new(grid, data, IndexPosition::Upper).expect("one vector per point")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConservationRow<T> {
    pub x0: T,
    /// `∫J⁰`
    pub charge: T,
    /// `(Q − Q₀)/Q₀`
    pub relative_drift: T,
    /// L² norm of the discrete `∂_μJ^μ`; absent at the first and last level.
    pub divergence_l2: Option<T>,
}

/// L² norm of the discrete `∂_μJ^μ` at `cur`, with `prev` and `next` a step `h` away in `x0`.
pub fn divergence_l2<T: Real>(
    prev: &DiracState<T>,
    cur: &DiracState<T>,
    next: &DiracState<T>,
    h: T,
    order: DerivativeOrder,
) -> Result<T> {
    let grid = cur.grid();
    let (jp, jc, jn) = (probability_current(prev), probability_current(cur), probability_current(next));
    let w = T::one() / (T::two() * h);
    let mut div: Vec<T> = jn.component(0).iter().zip(jp.component(0)).map(|(a, b)| (*a - b) * w).collect();
    for axis in 0..grid.dims() {
        let d = spatial_derivative(grid, &jc.component(axis + 1), axis, order)?;
        for (x, y) in div.iter_mut().zip(d) {
            *x = *x + y;
        }
    }
    let sq: Vec<T> = div.iter().map(|x| *x * *x).collect();
    Ok(integrate_volume(grid, &sq).sqrt())
}

/// Charge drift and discrete divergence for consecutive states spaced `h` apart in `x0`.
pub fn conservation_report<T: Real>(states: &[DiracState<T>], h: T, order: DerivativeOrder) -> Result<Vec<ConservationRow<T>>> {
    if states.len() < 3 {
        return Err(Error::InsufficientLevels { needed: 3, got: states.len() });
    }
    let q0 = states[0].total_probability();
    let mut rows = Vec::with_capacity(states.len());
    for (n, st) in states.iter().enumerate() {
        let divergence_l2 = if n == 0 || n + 1 == states.len() {
            None
        } else {
            Some(divergence_l2(&states[n - 1], st, &states[n + 1], h, order)?)
        };
        rows.push(ConservationRow {
            x0: st.x0,
            charge: st.total_probability(),
            relative_drift: relative_drift(st.total_probability(), q0),
            divergence_l2,
        });
    }
    Ok(rows)
}

/// `(Q − Q₀)/Q₀`, or the plain difference when `Q₀ = 0`.
pub fn relative_drift<T: Real>(q: T, q0: T) -> T {
    if q0 > T::zero() {
        (q - q0) / q0
    } else {
        q - q0
    }
}
