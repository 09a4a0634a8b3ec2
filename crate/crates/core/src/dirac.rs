//! Full Dirac dynamics for the pair of two-spinors `(ψ₁, ψ₂)`, evolved in
//! `x0 = c t` with a classical fourth-order Runge–Kutta step.
//!
//! Plain frame:  `∂₀ψ₁ = −iκψ₁ − σ·∇ψ₂`, `∂₀ψ₂ = +iκψ₂ − σ·∇ψ₁`.
//! Hatted frame: `∂₀ψ̂₁ = −2iκψ̂₁ − σ·∇ψ̂₂`, `∂₀ψ̂₂ = −σ·∇ψ̂₁`,
//! with `κ = mc/ħ` and `ψ̂ = e^{−iκx0} ψ`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::lattice::{integrate_volume, ComplexField, DerivativeOrder, Grid};
use crate::params::PhysParams;
use crate::scalar::Real;
use crate::spinor::{expect_two, lin2, phase, sigma_dot_grad};

/// Upper and lower two-spinors of a Dirac bispinor at time coordinate `x0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracState<T> {
    pub psi1: ComplexField<T>,
    pub psi2: ComplexField<T>,
    pub x0: T,
}

/// The same pair after multiplication by `e^{−iκx0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HattedState<T> {
    pub psi1: ComplexField<T>,
    pub psi2: ComplexField<T>,
    pub x0: T,
}

impl<T: Real> DiracState<T> {
    pub fn new(psi1: ComplexField<T>, psi2: ComplexField<T>, x0: T) -> Result<Self> {
        expect_two(&psi1)?;
        expect_two(&psi2)?;
        psi1.same_grid(&psi2)?;
        Ok(Self { psi1, psi2, x0 })
    }

    pub fn zeros(grid: &Grid<T>) -> Self {
        Self { psi1: ComplexField::zeros(grid, 2), psi2: ComplexField::zeros(grid, 2), x0: T::zero() }
    }

    pub fn grid(&self) -> &Grid<T> {
        self.psi1.grid()
    }

    /// Bispinor `Ψ = (ψ₁, ψ₂)` as a four-component field.
    pub fn bispinor(&self) -> ComplexField<T> {
        let mut comps = self.psi1.components().to_vec();
        comps.extend_from_slice(self.psi2.components());
        ComplexField::from_components(self.grid(), comps).expect("two two-spinors on one grid")
    }

    pub fn from_bispinor(psi: &ComplexField<T>, x0: T) -> Result<Self> {
        if psi.n_components() != 4 {
            return Err(Error::ComponentCount { expected: 4, got: psi.n_components() });
        }
        let c = psi.components();
        let grid = psi.grid();
        Ok(Self {
            psi1: ComplexField::from_components(grid, c[..2].to_vec())?,
            psi2: ComplexField::from_components(grid, c[2..].to_vec())?,
            x0,
        })
    }

    /// `∫ J⁰ = ∫ (ψ₁†ψ₁ + ψ₂†ψ₂)`.
    pub fn total_probability(&self) -> T {
        let d: Vec<T> = self.psi1.density().into_iter().zip(self.psi2.density()).map(|(a, b)| a + b).collect();
        integrate_volume(self.grid(), &d)
    }

    pub fn max_abs(&self) -> T {
        self.psi1.max_abs().max(self.psi2.max_abs())
    }

    pub fn is_finite(&self) -> bool {
        self.psi1.is_finite() && self.psi2.is_finite()
    }

    /// Largest componentwise difference over both spinors.
    pub fn sup_distance(&self, other: &Self) -> T {
        self.psi1.sup_distance(&other.psi1).max(self.psi2.sup_distance(&other.psi2))
    }

    pub fn l2_distance(&self, other: &Self) -> T {
        let a = self.psi1.l2_distance(&other.psi1);
        let b = self.psi2.l2_distance(&other.psi2);
        (a * a + b * b).sqrt()
    }
}

/// Multiplies both spinors by `e^{−iκx0}`. Identity at `x0 = 0`.
pub fn to_hatted<T: Real>(state: &DiracState<T>, params: &PhysParams<T>) -> HattedState<T> {
    let p = phase(-params.kappa() * state.x0);
    HattedState { psi1: state.psi1.scale(p), psi2: state.psi2.scale(p), x0: state.x0 }
}

/// Inverse of [`to_hatted`].
pub fn from_hatted<T: Real>(state: &HattedState<T>, params: &PhysParams<T>) -> DiracState<T> {
    let p = phase(params.kappa() * state.x0);
    DiracState { psi1: state.psi1.scale(p), psi2: state.psi2.scale(p), x0: state.x0 }
}

/// States recorded during an evolution, `record_spacing` apart in `x0`
/// (the last record may be closer if the run length is not a multiple).
#[derive(Debug, Clone)]
pub struct Trajectory<S, T> {
    pub states: Vec<S>,
    pub record_spacing: T,
    /// `x0` increment of a single integrator step.
    pub step: T,
}

#[derive(Debug, Clone, Copy)]
pub struct DiracSolver<T> {
    pub params: PhysParams<T>,
    pub order: DerivativeOrder,
}

type Pair<T> = (ComplexField<T>, ComplexField<T>);

fn rk4<T: Real>(
    y: (&ComplexField<T>, &ComplexField<T>),
    h: T,
    f: impl Fn(&ComplexField<T>, &ComplexField<T>) -> Pair<T>,
) -> Pair<T> {
    let half = h * T::half();
    let k1 = f(y.0, y.1);
    let y2 = (y.0.axpy(half, &k1.0), y.1.axpy(half, &k1.1));
    let k2 = f(&y2.0, &y2.1);
    let y3 = (y.0.axpy(half, &k2.0), y.1.axpy(half, &k2.1));
    let k3 = f(&y3.0, &y3.1);
    let y4 = (y.0.axpy(h, &k3.0), y.1.axpy(h, &k3.1));
    let k4 = f(&y4.0, &y4.1);
    let w = h / T::of(6.0);
    let combine = |y: &ComplexField<T>, a: &ComplexField<T>, b: &ComplexField<T>, c: &ComplexField<T>, d: &ComplexField<T>| {
        let mut out = y.clone();
        for comp in 0..out.n_components() {
            let dst = out.component_mut(comp);
            let (a, b, c, d) = (a.component(comp), b.component(comp), c.component(comp), d.component(comp));
            for i in 0..dst.len() {
                dst[i] = dst[i] + (a[i] + (b[i] + c[i]) * T::two() + d[i]) * w;
            }
        }
        out
    };
    (combine(y.0, &k1.0, &k2.0, &k3.0, &k4.0), combine(y.1, &k1.1, &k2.1, &k3.1, &k4.1))
}

/// Number of steps of size at most `dt` covering `duration`, and the uniform step used.
pub fn step_plan<T: Real>(duration: T, dt: T) -> Result<(usize, T)> {
    if !(duration > T::zero() && duration.is_finite()) {
        return Err(Error::InvalidParameter(format!("duration must be positive, got {duration}")));
    }
    let ratio = duration / dt;
    let mut n = ratio.round();
    if n < ratio * (T::one() - T::of(1e-12)) {
        n = n + T::one();
    }
    let n = n.max(T::one()).to_usize().expect("step count fits usize");
    Ok((n, duration / T::of_usize(n)))
}

pub(crate) fn check_growth<T: Real>(before: T, after: T, x0: T, params: &PhysParams<T>, finite: bool) -> Result<()> {
    let x0f = x0.to_f64().unwrap_or(f64::NAN);
    if !finite {
        return Err(Error::NonFinite { x0: x0f });
    }
    if before > T::zero() && after > before * params.tolerances.instability_growth {
        return Err(Error::NumericalInstability { x0: x0f, growth: (after / before).to_f64().unwrap_or(f64::INFINITY) });
    }
    Ok(())
}

impl<T: Real> DiracSolver<T> {
    pub fn new(params: PhysParams<T>, order: DerivativeOrder) -> Self {
        Self { params, order }
    }

    /// `(∂₀ψ₁, ∂₀ψ₂)` in the plain frame.
    pub fn rhs(&self, psi1: &ComplexField<T>, psi2: &ComplexField<T>) -> Pair<T> {
        let k = self.params.kappa();
        let minus_one = Complex::new(-T::one(), T::zero());
        let d1 = lin2(Complex::new(T::zero(), -k), psi1, minus_one, &sigma_dot_grad(psi2, self.order));
        let d2 = lin2(Complex::new(T::zero(), k), psi2, minus_one, &sigma_dot_grad(psi1, self.order));
        (d1, d2)
    }

    /// `(∂₀ψ̂₁, ∂₀ψ̂₂)` in the hatted frame.
    pub fn hatted_rhs(&self, psi1: &ComplexField<T>, psi2: &ComplexField<T>) -> Pair<T> {
        let k = self.params.kappa();
        let minus_one = Complex::new(-T::one(), T::zero());
        let d1 = lin2(Complex::new(T::zero(), -T::two() * k), psi1, minus_one, &sigma_dot_grad(psi2, self.order));
        let d2 = sigma_dot_grad(psi1, self.order).scale(minus_one);
        (d1, d2)
    }

    /// One RK4 step of length `dt` in time (`c·dt` in `x0`).
    pub fn step(&self, state: &DiracState<T>, dt: T) -> Result<DiracState<T>> {
        let h = self.params.c * dt;
        let (psi1, psi2) = rk4((&state.psi1, &state.psi2), h, |a, b| self.rhs(a, b));
        let next = DiracState { psi1, psi2, x0: state.x0 + h };
        check_growth(state.max_abs(), next.max_abs(), next.x0, &self.params, next.is_finite())?;
        Ok(next)
    }

    pub fn step_hatted(&self, state: &HattedState<T>, dt: T) -> Result<HattedState<T>> {
        let h = self.params.c * dt;
        let (psi1, psi2) = rk4((&state.psi1, &state.psi2), h, |a, b| self.hatted_rhs(a, b));
        let before = state.psi1.max_abs().max(state.psi2.max_abs());
        let next = HattedState { psi1, psi2, x0: state.x0 + h };
        let after = next.psi1.max_abs().max(next.psi2.max_abs());
        check_growth(before, after, next.x0, &self.params, next.psi1.is_finite() && next.psi2.is_finite())?;
        Ok(next)
    }

    /// Evolves for `duration` (time units) with the grid's `dt`, recording every
    /// `record_every` steps plus the initial and final states.
    pub fn evolve(&self, initial: &DiracState<T>, duration: T, record_every: usize) -> Result<Trajectory<DiracState<T>, T>> {
        let (n, dt) = step_plan(duration, initial.grid().dt())?;
        let every = record_every.max(1);
        let mut states = vec![initial.clone()];
        let mut cur = initial.clone();
        for s in 1..=n {
            cur = self.step(&cur, dt)?;
            if s % every == 0 || s == n {
                states.push(cur.clone());
            }
        }
        let h = self.params.c * dt;
        Ok(Trajectory { states, record_spacing: h * T::of_usize(every), step: h })
    }

    pub fn evolve_hatted(
        &self,
        initial: &HattedState<T>,
        duration: T,
        record_every: usize,
    ) -> Result<Trajectory<HattedState<T>, T>> {
        let (n, dt) = step_plan(duration, initial.psi1.grid().dt())?;
        let every = record_every.max(1);
        let mut states = vec![initial.clone()];
        let mut cur = initial.clone();
        for s in 1..=n {
            cur = self.step_hatted(&cur, dt)?;
            if s % every == 0 || s == n {
                states.push(cur.clone());
            }
        }
        let h = self.params.c * dt;
        Ok(Trajectory { states, record_spacing: h * T::of_usize(every), step: h })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::{plane_wave, rest_state, EnergyBranch, SpinMixture};
    use crate::lattice::{make_grid, GridSpec};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn natural() -> PhysParams<f64> {
        PhysParams::natural()
    }

    fn grid(n: usize, extent: f64) -> Grid<f64> {
        make_grid(&GridSpec::uniform(1, extent, n), 1.0).unwrap()
    }

    fn uniform(g: &Grid<f64>, a: Complex64, b: Complex64) -> ComplexField<f64> {
        ComplexField::from_fn(g, |_| [a, b])
    }

    #[test]
    fn rhs_of_uniform_fields() {
        let p = PhysParams::new(1.0, 2.0, 3.0);
        let k = p.kappa();
        let g = grid(8, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let s = DiracSolver::new(p, DerivativeOrder::Second);
        let (d1, d2) = s.rhs(&uniform(&g, one, zero), &ComplexField::zeros(&g, 2));
        assert!(d1.component(0).iter().all(|z| *z == Complex64::new(0.0, -k)));
        assert!(d2.max_abs() == 0.0);
        let (d1, d2) = s.rhs(&ComplexField::zeros(&g, 2), &uniform(&g, one, zero));
        assert!(d1.max_abs() == 0.0);
        assert!(d2.component(0).iter().all(|z| *z == Complex64::new(0.0, k)));
    }

    #[test]
    fn plane_wave_is_an_eigenvector_of_the_rhs() {
        let p = natural();
        let n = 64;
        let k = 2.0 * PI * 3.0 / 20.0;
        let g = grid(n, 20.0);
        let s = DiracSolver::new(p, DerivativeOrder::Second);
        // closure with the lattice wavenumber makes the discrete pair exact
        let dx = g.spacing()[0];
        let k_lat = (k * dx).sin() / dx;
        let mut st = plane_wave(&g, [k, 0.0, 0.0], SpinMixture { angle: 0.4, phase: 1.0 }, EnergyBranch::Positive, &p).unwrap();
        let ratio = k_lat / (p.energy(k_lat) + 1.0);
        let chi = [st.psi1.component(0).to_vec(), st.psi1.component(1).to_vec()];
        // σ¹ swaps components
        st.psi2 = ComplexField::from_components(
            &g,
            vec![chi[1].iter().map(|z| z * ratio).collect(), chi[0].iter().map(|z| z * ratio).collect()],
        )
        .unwrap();
        let (d1, d2) = s.rhs(&st.psi1, &st.psi2);
        let w = Complex64::new(0.0, -p.energy(k_lat));
        assert!(d1.sup_distance(&st.psi1.scale(w)) < 1e-13);
        assert!(d2.sup_distance(&st.psi2.scale(w)) < 1e-13);
        // and the lattice frequency is within O(dx²) of the continuum one
        assert!((p.energy(k_lat) - p.energy(k)).abs() < k * k * k * k * dx * dx / 6.0);
    }

    #[test]
    fn rest_phase_after_one_step() {
        let p = natural();
        let g = grid(8, 1.0);
        let s = DiracSolver::new(p, DerivativeOrder::Second);
        let st = rest_state(&g);
        let err = |dt: f64| {
            let next = s.step(&st, dt).unwrap();
            next.psi1.sup_distance(&st.psi1.scale(phase(-dt)))
        };
        let (e1, e2) = (err(0.1), err(0.05));
        // local error (κh)^5/120 times the amplitude
        let amp = st.psi1.max_abs();
        assert!(e1 < 1.1 * 0.1f64.powi(5) / 120.0 * amp);
        assert!(e1 / e2 > 16.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn zero_stays_zero() {
        let g = grid(16, 4.0);
        let s = DiracSolver::new(natural(), DerivativeOrder::Fourth);
        let traj = s.evolve(&DiracState::zeros(&g), 1.0, 3).unwrap();
        assert!(traj.states.iter().all(|st| st.max_abs() == 0.0));
        assert!((traj.states.last().unwrap().x0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hatted_transform() {
        let p = PhysParams::new(1.0, 1.5, 2.0);
        let g = grid(8, 1.0);
        let mut st = rest_state(&g);
        assert_eq!(to_hatted(&st, &p).psi1, st.psi1);
        let psi0 = st.psi1.clone();
        st.x0 = 0.7;
        st.psi1 = psi0.scale(phase(-p.kappa() * 0.7));
        let hat = to_hatted(&st, &p);
        assert!(hat.psi1.sup_distance(&psi0.scale(phase(-2.0 * p.kappa() * 0.7))) < 1e-15);
        assert!(from_hatted(&hat, &p).sup_distance(&st) < 1e-15);
    }

    #[test]
    fn rest_state_is_periodic() {
        let p = natural();
        let g = make_grid(&GridSpec::uniform(1, 1.0, 8).with_dt(0.01), 1.0).unwrap();
        let s = DiracSolver::new(p, DerivativeOrder::Second);
        let st = rest_state(&g);
        let period = 2.0 * PI * p.hbar / (p.m * p.c * p.c);
        let end = s.evolve(&st, period, usize::MAX).unwrap().states.pop().unwrap();
        let rel = end.sup_distance(&st) / st.max_abs();
        assert!(rel < 1e-8, "{rel}");
    }

    #[test]
    fn blow_up_is_reported() {
        let g = grid(8, 1.0);
        let s = DiracSolver::new(natural(), DerivativeOrder::Second);
        let err = s.step(&rest_state(&g), 10.0).unwrap_err();
        assert!(matches!(err, Error::NumericalInstability { .. }));
    }

    #[test]
    fn bispinor_round_trip() {
        let p = natural();
        let g = grid(16, 4.0 * PI);
        let st = plane_wave(&g, [0.5, 0.0, 0.0], SpinMixture { angle: 0.3, phase: 0.2 }, EnergyBranch::Negative, &p).unwrap();
        assert_eq!(DiracState::from_bispinor(&st.bispinor(), 0.0).unwrap(), st);
        assert!((st.total_probability() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn step_plan_covers_duration() {
        assert_eq!(step_plan(1.0, 0.25).unwrap(), (4, 0.25));
        let (n, dt) = step_plan(1.0, 0.3).unwrap();
        assert_eq!(n, 4);
        assert!(dt <= 0.3 && (dt * n as f64 - 1.0).abs() < 1e-15);
        assert!(step_plan(0.0, 0.1).is_err());
    }
}
