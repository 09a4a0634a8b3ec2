//! Reduction of the Dirac pair to one second-order equation for ψ̂₁:
//!
//! `∂₀²ψ̂₁ + 2iκ ∂₀ψ̂₁ − ∇²ψ̂₁ = 0`,
//!
//! with ψ̂₂ recovered from the running integral `intψ̂₁ = ∫₀^{x0} ψ̂₁`:
//! `ψ̂₂ = ψ̂₂(0) − σ·∇ intψ̂₁`.
//!
//! Time discretization: three-level central scheme
//! `(ψⁿ⁺¹ − 2ψⁿ + ψⁿ⁻¹)/h² + iκ(ψⁿ⁺¹ − ψⁿ⁻¹)/h − ∇²ψⁿ = 0`, solved pointwise
//! for ψⁿ⁺¹; the first level comes from a second-order Taylor step. The
//! integral is accumulated with the trapezoidal rule.

use num_complex::Complex;
use serde::Serialize;

use crate::dirac::{check_growth, step_plan, DiracSolver, DiracState};
use crate::error::{Error, Result};
use crate::lattice::{laplacian, ComplexField, DerivativeOrder};
use crate::params::PhysParams;
use crate::scalar::Real;
use crate::spinor::{expect_two, lin2, phase, sigma_dot_grad};

/// State of the reduced pipeline at level `x0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState<T> {
    pub psi1hat: ComplexField<T>,
    /// Previous level; `None` before the bootstrap step.
    pub psi1hat_prev: Option<ComplexField<T>>,
    pub int_psi1hat: ComplexField<T>,
    /// `W = −σ·∇ψ̂₂(0)`, fixed for the whole run.
    pub w: ComplexField<T>,
    pub psi2hat0: ComplexField<T>,
    pub x0: T,
    /// Initial `∂₀ψ̂₁`, consumed by the bootstrap.
    initial_rate: ComplexField<T>,
    /// `x0` increment of the steps taken so far.
    step: Option<T>,
}

/// `W = −σ^k ∂_k ψ₂₀`.
pub fn build_w<T: Real>(psi20: &ComplexField<T>, order: DerivativeOrder) -> ComplexField<T> {
    sigma_dot_grad(psi20, order).scale(Complex::new(-T::one(), T::zero()))
}

/// Which second-order problem the initial rate belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateForm {
    /// `∂₀ψ̂₁|₀ = (2mc/iħ)ψ₁₀ − σ·∇ψ₂₀`
    Hatted,
    /// `∂₀ψ₁|₀ = (mc/iħ)ψ₁₀ − σ·∇ψ₂₀` (Klein–Gordon form for the plain ψ₁)
    KleinGordon,
}

pub fn initial_time_derivative<T: Real>(
    psi10: &ComplexField<T>,
    psi20: &ComplexField<T>,
    params: &PhysParams<T>,
    order: DerivativeOrder,
    form: RateForm,
) -> ComplexField<T> {
    let mass = match form {
        RateForm::Hatted => T::two() * params.kappa(),
        RateForm::KleinGordon => params.kappa(),
    };
    // mc/(iħ) = −iκ
    lin2(Complex::new(T::zero(), -mass), psi10, Complex::new(T::one(), T::zero()), &build_w(psi20, order))
}

#[derive(Debug, Clone, Copy)]
pub struct ReducedSolver<T> {
    pub params: PhysParams<T>,
    pub order: DerivativeOrder,
}

impl<T: Real> ReducedSolver<T> {
    pub fn new(params: PhysParams<T>, order: DerivativeOrder) -> Self {
        Self { params, order }
    }

    /// Level `x0 = 0`: hatted and plain variables coincide there.
    pub fn initial_state(&self, psi10: &ComplexField<T>, psi20: &ComplexField<T>) -> Result<ReducedState<T>> {
        expect_two(psi10)?;
        expect_two(psi20)?;
        psi10.same_grid(psi20)?;
        Ok(ReducedState {
            psi1hat: psi10.clone(),
            psi1hat_prev: None,
            int_psi1hat: ComplexField::zeros(psi10.grid(), 2),
            w: build_w(psi20, self.order),
            psi2hat0: psi20.clone(),
            x0: T::zero(),
            initial_rate: initial_time_derivative(psi10, psi20, &self.params, self.order, RateForm::Hatted),
            step: None,
        })
    }

    /// Advances ψ̂₁ and `intψ̂₁` by `c·dt` in `x0`. All steps of one run must share `dt`.
    pub fn reduced_step(&self, state: &ReducedState<T>, dt: T) -> Result<ReducedState<T>> {
        let h = self.params.c * dt;
        if let Some(prev_h) = state.step {
            if (prev_h - h).abs() > T::of(1e-12) * h {
                return Err(Error::InvalidParameter("three-level scheme needs a constant step".into()));
            }
        }
        let k = self.params.kappa();
        let lap = laplacian(state.psi1hat.grid(), state.psi1hat.components()[0].as_slice(), self.order);
        let lap1 = laplacian(state.psi1hat.grid(), state.psi1hat.components()[1].as_slice(), self.order);
        let lap = ComplexField::from_components(state.psi1hat.grid(), vec![lap, lap1])?;
        let h2 = h * h;
        let next = match &state.psi1hat_prev {
            None => {
                // ψ¹ = ψ⁰ + h ψ'⁰ + h²/2 ψ''⁰ with ψ'' = ∇²ψ − 2iκψ'
                let rate = &state.initial_rate;
                let accel = lin2(Complex::new(T::one(), T::zero()), &lap, Complex::new(T::zero(), -T::two() * k), rate);
                let mut out = state.psi1hat.axpy(h, rate);
                out = out.axpy(h2 * T::half(), &accel);
                out
            }
            Some(prev) => {
                let kh = Complex::new(T::zero(), k * h);
                let one = Complex::new(T::one(), T::zero());
                let inv = one / (one + kh);
                let back = one - kh;
                let mut out = state.psi1hat.clone();
                for c in 0..2 {
                    let (cur, prv, lp) = (state.psi1hat.component(c), prev.component(c), lap.component(c));
                    let dst = out.component_mut(c);
                    for i in 0..dst.len() {
                        dst[i] = (cur[i] * T::two() - back * prv[i] + lp[i] * h2) * inv;
                    }
                }
                out
            }
        };
        let x0 = state.x0 + h;
        check_growth(state.psi1hat.max_abs(), next.max_abs(), x0, &self.params, next.is_finite())?;
        let int_next = state.int_psi1hat.zip_map(&state.psi1hat.zip_map(&next, |a, b| a + b), |acc, s| acc + s * (h * T::half()));
        Ok(ReducedState {
            psi1hat: next,
            psi1hat_prev: Some(state.psi1hat.clone()),
            int_psi1hat: int_next,
            w: state.w.clone(),
            psi2hat0: state.psi2hat0.clone(),
            x0,
            initial_rate: state.initial_rate.clone(),
            step: Some(h),
        })
    }

    /// `ψ̂₂ = ψ̂₂(0) − σ·∇ intψ̂₁`.
    pub fn reconstruct_psi2(&self, state: &ReducedState<T>) -> ComplexField<T> {
        let grad = sigma_dot_grad(&state.int_psi1hat, self.order);
        state.psi2hat0.zip_map(&grad, |a, b| a - b)
    }

    /// Plain-frame `(ψ₁, ψ₂)` recovered from the reduced state.
    pub fn unhatted(&self, state: &ReducedState<T>) -> DiracState<T> {
        let p = phase(self.params.kappa() * state.x0);
        DiracState { psi1: state.psi1hat.scale(p), psi2: self.reconstruct_psi2(state).scale(p), x0: state.x0 }
    }

    /// Runs the reduced pipeline from `(ψ₁₀, ψ₂₀)`, recording plain-frame states.
    pub fn evolve(
        &self,
        initial: &DiracState<T>,
        duration: T,
        record_every: usize,
    ) -> Result<crate::dirac::Trajectory<DiracState<T>, T>> {
        let (n, dt) = step_plan(duration, initial.grid().dt())?;
        let every = record_every.max(1);
        let mut cur = self.initial_state(&initial.psi1, &initial.psi2)?;
        let mut states = vec![self.unhatted(&cur)];
        for s in 1..=n {
            cur = self.reduced_step(&cur, dt)?;
            if s % every == 0 || s == n {
                states.push(self.unhatted(&cur));
            }
        }
        let h = self.params.c * dt;
        Ok(crate::dirac::Trajectory { states, record_spacing: h * T::of_usize(every), step: h })
    }
}

fn relative<T: Real>(residual: T, scale: T) -> T {
    if scale > T::zero() {
        residual / scale
    } else {
        residual
    }
}

/// Relative L² residual of `(∂^μ∂_μ + κ²)ψ₁ = 0` at the middle of three
/// consecutive plain-frame levels spaced `h` apart in `x0`.
///
/// Normalized by the sum of the norms of the three terms.
pub fn kg_residual<T: Real>(levels: [&ComplexField<T>; 3], h: T, params: &PhysParams<T>, order: DerivativeOrder) -> T {
    let [prev, cur, next] = levels;
    let grid = cur.grid();
    let inv_h2 = T::one() / (h * h);
    let dtt = next.zip_map(prev, |a, b| a + b).zip_map(cur, |s, c| (s - c * T::two()) * inv_h2);
    let lap =
        ComplexField::from_components(grid, (0..cur.n_components()).map(|c| laplacian(grid, cur.component(c), order)).collect())
            .expect("same grid");
    let k2 = params.kappa() * params.kappa();
    let mass = cur.map(|z| z * k2);
    let res = dtt.zip_map(&lap, |a, b| a - b).zip_map(&mass, |a, b| a + b);
    relative(res.l2_norm(), dtt.l2_norm() + lap.l2_norm() + mass.l2_norm())
}

/// Same measure for `(∂^μ∂_μ + 2iκ∂₀)ψ̂₁ = 0` on hatted levels.
pub fn hatted_residual<T: Real>(levels: [&ComplexField<T>; 3], h: T, params: &PhysParams<T>, order: DerivativeOrder) -> T {
    let [prev, cur, next] = levels;
    let grid = cur.grid();
    let inv_h2 = T::one() / (h * h);
    let dtt = next.zip_map(prev, |a, b| a + b).zip_map(cur, |s, c| (s - c * T::two()) * inv_h2);
    let coef = Complex::new(T::zero(), params.kappa() / h);
    let drift = next.zip_map(prev, |a, b| (a - b) * coef);
    let lap =
        ComplexField::from_components(grid, (0..cur.n_components()).map(|c| laplacian(grid, cur.component(c), order)).collect())
            .expect("same grid");
    let res = dtt.zip_map(&drift, |a, b| a + b).zip_map(&lap, |a, b| a - b);
    relative(res.l2_norm(), dtt.l2_norm() + drift.l2_norm() + lap.l2_norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceRow<T> {
    pub x0: T,
    pub sup_discrepancy: T,
    pub l2_discrepancy: T,
    /// KG residual of the reduced ψ₁ at the latest level with both neighbours (`x0 − h`).
    pub kg_residual: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport<T> {
    pub rows: Vec<EquivalenceRow<T>>,
    pub max_sup: T,
    pub max_l2: T,
    pub step: T,
}

/// Runs the full Dirac solver and the reduced pipeline from the same data and
/// compares `(ψ₁, ψ₂)` with the un-hatted reconstruction every `report_every` steps.
pub fn equivalence_report<T: Real>(
    initial: &DiracState<T>,
    duration: T,
    report_every: usize,
    params: &PhysParams<T>,
    order: DerivativeOrder,
) -> Result<EquivalenceReport<T>> {
    let dirac = DiracSolver::new(*params, order);
    let reduced = ReducedSolver::new(*params, order);
    let (n, dt) = step_plan(duration, initial.grid().dt())?;
    let h = params.c * dt;
    let every = report_every.max(1);

    let mut full = initial.clone();
    let mut red = reduced.initial_state(&initial.psi1, &initial.psi2)?;
    let mut window: Vec<ComplexField<T>> = vec![initial.psi1.clone()];
    let row = |full: &DiracState<T>, plain: &DiracState<T>, window: &[ComplexField<T>]| EquivalenceRow {
        x0: full.x0,
        sup_discrepancy: full.sup_distance(plain),
        l2_discrepancy: full.l2_distance(plain),
        kg_residual: (window.len() == 3).then(|| kg_residual([&window[0], &window[1], &window[2]], h, params, order)),
    };
    let mut rows = vec![row(&full, &reduced.unhatted(&red), &window)];
    for s in 1..=n {
        full = dirac.step(&full, dt)?;
        red = reduced.reduced_step(&red, dt)?;
        let plain = reduced.unhatted(&red);
        window.push(plain.psi1.clone());
        if window.len() > 3 {
            window.remove(0);
        }
        if s % every == 0 || s == n {
            rows.push(row(&full, &plain, &window));
        }
    }
    let max_sup = rows.iter().map(|r| r.sup_discrepancy).fold(T::zero(), T::max);
    let max_l2 = rows.iter().map(|r| r.l2_discrepancy).fold(T::zero(), T::max);
    Ok(EquivalenceReport { rows, max_sup, max_l2, step: h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::{gaussian_packet, plane_wave, rest_state, EnergyBranch, GaussianPacket, SpinMixture};
    use crate::lattice::{make_grid, Grid, GridSpec};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    const ORDER: DerivativeOrder = DerivativeOrder::Second;

    fn grid(dims: usize, n: usize, extent: f64) -> Grid<f64> {
        make_grid(&GridSpec::uniform(dims, extent, n), 1.0).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn w_examples() {
        let g = grid(1, 32, 2.0 * PI);
        assert_eq!(build_w(&ComplexField::from_fn(&g, |_| [c(1.0, 2.0), c(-3.0, 0.5)]), ORDER).max_abs(), 0.0);

        let dx = g.spacing()[0];
        let k = 2.0;
        let k_lat = (k * dx).sin() / dx;
        let f = ComplexField::from_fn(&g, |x| [Complex64::from_polar(1.0, k * x[0]), c(0.0, 0.0)]);
        let w = build_w(&f, ORDER);
        // σ¹ moves the x-derivative of the upper entry into the lower one
        assert_eq!(w.component(0).iter().map(|z| z.norm()).fold(0.0, f64::max), 0.0);
        for i in 0..g.len() {
            assert!((w.component(1)[i] - c(0.0, -k_lat) * f.component(0)[i]).norm() < 1e-13);
        }

        let g3 = grid(3, 8, 2.0 * PI);
        let dz = g3.spacing()[2];
        let kz_lat = dz.sin() / dz;
        let f = ComplexField::from_fn(&g3, |x| [c(0.0, 0.0), Complex64::from_polar(1.0, x[2])]);
        let w = build_w(&f, ORDER);
        for i in 0..g3.len() {
            assert!(w.component(0)[i].norm() < 1e-15);
            assert!((w.component(1)[i] - c(0.0, kz_lat) * f.component(1)[i]).norm() < 1e-13);
        }
    }

    #[test]
    fn initial_rate_examples() {
        let p = PhysParams::new(1.0, 2.0, 1.5);
        let g = grid(1, 8, 1.0);
        let up = ComplexField::from_fn(&g, |_| [c(1.0, 0.0), c(0.0, 0.0)]);
        let zero = ComplexField::zeros(&g, 2);
        let hat = initial_time_derivative(&up, &zero, &p, ORDER, RateForm::Hatted);
        let kg = initial_time_derivative(&up, &zero, &p, ORDER, RateForm::KleinGordon);
        assert!(hat.component(0).iter().all(|z| *z == c(0.0, -2.0 * p.kappa())));
        assert!(kg.component(0).iter().all(|z| *z == c(0.0, -p.kappa())));
        let rest = initial_time_derivative(&zero, &up, &p, ORDER, RateForm::Hatted);
        assert_eq!(rest.max_abs(), 0.0);
    }

    #[test]
    fn rate_forms_differ_by_the_mass_term() {
        let p = PhysParams::natural();
        let g = grid(1, 64, 20.0);
        let packet = GaussianPacket {
            center: [7.0, 0.0, 0.0],
            width: 1.3,
            k: [0.8, 0.0, 0.0],
            spin: SpinMixture { angle: 0.7, phase: 2.0 },
        };
        let st = gaussian_packet(&g, &packet, &p, ORDER).unwrap();
        let hat = initial_time_derivative(&st.psi1, &st.psi2, &p, ORDER, RateForm::Hatted);
        let kg = initial_time_derivative(&st.psi1, &st.psi2, &p, ORDER, RateForm::KleinGordon);
        // KG = hatted − (mc/iħ)ψ₁₀ = hatted + iκψ₁₀
        let back = hat.zip_map(&st.psi1, |a, b| a + c(0.0, p.kappa()) * b);
        assert!(kg.sup_distance(&back) <= 4.0 * f64::EPSILON * hat.max_abs());
    }

    #[test]
    fn reconstruction_at_start_is_exact() {
        let p = PhysParams::natural();
        let g = grid(1, 64, 20.0);
        let packet = GaussianPacket { center: [10.0, 0.0, 0.0], width: 1.0, k: [1.0, 0.0, 0.0], spin: SpinMixture::up() };
        let st = gaussian_packet(&g, &packet, &p, ORDER).unwrap();
        let r = ReducedSolver::new(p, ORDER);
        let s0 = r.initial_state(&st.psi1, &st.psi2).unwrap();
        assert_eq!(r.reconstruct_psi2(&s0), st.psi2);
        assert_eq!(r.unhatted(&s0), st);
    }

    #[test]
    fn rest_reconstruction_stays_zero() {
        let p = PhysParams::natural();
        let g = grid(2, 8, 1.0);
        let r = ReducedSolver::new(p, ORDER);
        let traj = r.evolve(&rest_state(&g), 1.0, 1).unwrap();
        assert!(traj.states.iter().all(|s| s.psi2.max_abs() == 0.0));
    }

    fn uniform_phase_error(dt: f64) -> f64 {
        let p = PhysParams::natural();
        let g = make_grid(&GridSpec::uniform(1, 1.0, 8).with_dt(dt), 1.0).unwrap();
        let st = rest_state(&g);
        let r = ReducedSolver::new(p, ORDER);
        let end = r.evolve(&st, 1.0, usize::MAX).unwrap().states.pop().unwrap();
        // plain-frame rest solution: e^{−iκx0}
        end.psi1.sup_distance(&st.psi1.scale(crate::spinor::phase(-end.x0))) / st.psi1.max_abs()
    }

    #[test]
    fn uniform_oscillation_is_second_order() {
        let (e1, e2) = (uniform_phase_error(0.02), uniform_phase_error(0.01));
        // per-step phase 2·atan(κh) drifts by 2κ³h²T/3; the Taylor start adds
        // an error of the same order
        assert!(e1 < 3.0 * 2.0 / 3.0 * 0.02f64.powi(2), "{e1}");
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "{ratio}");
    }

    fn branch_frequency(n: usize, branch: EnergyBranch) -> f64 {
        let p = PhysParams::natural();
        let g = grid(1, n, 8.0 * PI);
        let r = ReducedSolver::new(p, ORDER);
        let st = plane_wave(&g, [0.5, 0.0, 0.0], SpinMixture::up(), branch, &p).unwrap();
        let end = r.evolve(&st, 2.0, usize::MAX).unwrap().states.pop().unwrap();
        let overlap: Complex64 =
            (0..2).flat_map(|comp| st.psi1.component(comp).iter().zip(end.psi1.component(comp))).map(|(a, b)| a.conj() * b).sum();
        overlap.arg() / end.x0
    }

    #[test]
    fn plane_wave_branches() {
        let e = PhysParams::<f64>::natural().energy(0.5);
        for (branch, expect) in [(EnergyBranch::Positive, -e), (EnergyBranch::Negative, e)] {
            let (coarse, fine) = (branch_frequency(128, branch), branch_frequency(256, branch));
            let ratio = (coarse - expect) / (fine - expect);
            assert!((fine - expect).abs() < 2e-3 * e, "{branch:?}: {fine} vs {expect}");
            assert!((3.0..5.0).contains(&ratio), "{branch:?}: ratio {ratio}");
        }
    }

    #[test]
    fn step_size_must_not_change() {
        let p = PhysParams::natural();
        let g = grid(1, 8, 1.0);
        let r = ReducedSolver::new(p, ORDER);
        let s0 = r.initial_state(&rest_state(&g).psi1, &ComplexField::zeros(&g, 2)).unwrap();
        let s1 = r.reduced_step(&s0, 0.01).unwrap();
        assert!(r.reduced_step(&s1, 0.01).is_ok());
        assert!(matches!(r.reduced_step(&s1, 0.02), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn kg_residual_detects_dispersion() {
        let p = PhysParams::natural();
        let g = grid(1, 128, 8.0 * PI);
        let k = 0.5;
        let h = 0.01;
        let wave =
            |omega: f64, t: f64| ComplexField::from_fn(&g, |x| [Complex64::from_polar(1.0, k * x[0] - omega * t), c(0.0, 0.0)]);
        let good = p.energy(k);
        let lv = |w: f64| [wave(w, -h), wave(w, 0.0), wave(w, h)];
        let [a, b, cc] = lv(good);
        assert!(kg_residual([&a, &b, &cc], h, &p, ORDER) < 1e-3);
        let [a, b, cc] = lv(2.0);
        assert!(kg_residual([&a, &b, &cc], h, &p, ORDER) > 0.1);
    }

    #[test]
    fn residuals_of_reduced_trajectory() {
        let p = PhysParams::natural();
        let g = grid(1, 128, 20.0);
        let packet = GaussianPacket { center: [10.0, 0.0, 0.0], width: 1.0, k: [1.0, 0.0, 0.0], spin: SpinMixture::up() };
        let st = gaussian_packet(&g, &packet, &p, ORDER).unwrap();
        let rep = equivalence_report(&st, 2.0, 1, &p, ORDER).unwrap();
        let res: Vec<f64> = rep.rows.iter().filter_map(|r| r.kg_residual).collect();
        assert!(res.len() > 10);
        let (early, late) = (res[1], *res.last().unwrap());
        assert!(early < 1e-3 && late < 1e-3 && late < 10.0 * early, "{early} {late}");

        // the hatted equation holds on the hatted levels to the same accuracy
        let r = ReducedSolver::new(p, ORDER);
        let mut s = r.initial_state(&st.psi1, &st.psi2).unwrap();
        let mut levels = Vec::new();
        for _ in 0..3 {
            s = r.reduced_step(&s, g.dt()).unwrap();
            levels.push((s.psi1hat.clone(), r.unhatted(&s).psi1));
        }
        let hat = hatted_residual([&levels[0].0, &levels[1].0, &levels[2].0], g.dt(), &p, ORDER);
        let plain = kg_residual([&levels[0].1, &levels[1].1, &levels[2].1], g.dt(), &p, ORDER);
        assert!(hat < 1e-12, "{hat}");
        assert!(plain < 1e-3, "{plain}");
    }

    #[test]
    fn equivalence_for_trivial_data() {
        let p = PhysParams::natural();
        let g = make_grid(&GridSpec::uniform(1, 1.0, 8).with_dt(5e-5), 1.0).unwrap();
        let rest = equivalence_report(&rest_state(&g), 0.5, 1000, &p, ORDER).unwrap();
        assert!(rest.max_sup < 1e-8, "{}", rest.max_sup);
        let zero = equivalence_report(&DiracState::zeros(&grid(1, 8, 1.0)), 0.5, 1, &p, ORDER).unwrap();
        assert_eq!(zero.max_sup, 0.0);
    }
}
