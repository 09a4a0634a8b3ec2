//! Pointwise map from the upper two-spinor ψ₁ = (ψ↑, ψ↓) to relativistic
//! fluid variables.
//!
//! With `ψ_s = R_s e^{i(m/ħ)ν_s}`:
//! `ρ̄ = m(R↑² + R↓²)`, `tanθ = R↓/R↑`, `ν = ν↑`, `β = ν↓ − ν↑`, and the
//! Clebsch four-velocity `v_C = α∂β + ∂ν` where α is a root of
//! `d α² + 2b α − sin²θ e = 0` (`b = ∂ν·∂β`, `d = ∂β·∂β`, `e = ∂β·(2∂ν + ∂β)`).
//! The rest-frame density is `ρ₀ = (ρ̄/c)(√(v_C·v_C) + c)` and `a₀ = √(ρ₀/m)`.
//!
//! Phase gradients are taken as `(ħ/m) Im(ψ*∂ψ)/|ψ|²`, so the potentials ν, β
//! themselves never appear and there is no phase unwrapping.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::jet::SpinorSample;
use crate::lattice::{io::fmt_num, FourVector, Grid};
use crate::params::PhysParams;
use crate::scalar::Real;

/// Validity of the fluid variables at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Mask {
    Ok,
    /// `ρ̄` below the density floor.
    LowDensity,
    /// β undefined (one spin component empty) or `∂β·∂β` numerically zero;
    /// the velocity falls back to the gradient of the populated phase.
    DegenerateBeta,
    /// Negative discriminant: α is not real.
    ComplexAlpha,
    /// `v_C·v_C < 0`: no rest frame, ρ₀ undefined.
    Spacelike,
}

impl Mask {
    /// Whether a (real) Clebsch velocity exists at the point.
    pub fn has_velocity(self) -> bool {
        matches!(self, Mask::Ok | Mask::DegenerateBeta | Mask::Spacelike)
    }

    /// Whether ρ₀ and a₀ are defined.
    pub fn has_rest_frame(self) -> bool {
        matches!(self, Mask::Ok | Mask::DegenerateBeta)
    }

    pub fn code(self) -> &'static str {
        match self {
            Mask::Ok => "OK",
            Mask::LowDensity => "LOW_DENSITY",
            Mask::DegenerateBeta => "DEGENERATE_BETA",
            Mask::ComplexAlpha => "COMPLEX_ALPHA",
            Mask::Spacelike => "SPACELIKE",
        }
    }
}

/// Which root of the α quadratic to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Plus,
    Minus,
    /// Per point, the root with the smaller magnitude.
    #[default]
    Smallest,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
            Branch::Smallest => "smallest",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Amplitudes<T> {
    pub r_up: Vec<T>,
    pub r_down: Vec<T>,
    pub r: Vec<T>,
    pub rho_bar: Vec<T>,
    /// `atan2(R↓, R↑) ∈ [0, π/2]`
    pub theta: Vec<T>,
    pub low_density: Vec<bool>,
    /// Density floor `ε_ρ = density_rel · max ρ̄`.
    pub eps_rho: T,
}

pub fn amplitudes<T: Real>(psi: impl IntoIterator<Item = [Complex<T>; 2]>, params: &PhysParams<T>) -> Amplitudes<T> {
    let (mut r_up, mut r_down, mut r, mut rho_bar, mut theta) = (vec![], vec![], vec![], vec![], vec![]);
    for [up, down] in psi {
        let (a, b) = (up.norm(), down.norm());
        r_up.push(a);
        r_down.push(b);
        r.push(a.hypot(b));
        rho_bar.push(params.m * (up.norm_sqr() + down.norm_sqr()));
        theta.push(b.atan2(a));
    }
    let eps_rho = params.tolerances.density_rel * rho_bar.iter().copied().fold(T::zero(), T::max);
    let low_density = rho_bar.iter().map(|&p| p < eps_rho || p == T::zero()).collect();
    Amplitudes { r_up, r_down, r, rho_bar, theta, low_density, eps_rho }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGradients<T> {
    pub grad_nu_up: Vec<FourVector<T>>,
    pub grad_nu_down: Vec<FourVector<T>>,
    /// `∂ν = ∂ν↑`
    pub grad_nu: Vec<FourVector<T>>,
    /// `∂β = ∂ν↓ − ∂ν↑`
    pub grad_beta: Vec<FourVector<T>>,
    pub grad_r_up: Vec<FourVector<T>>,
    pub grad_r_down: Vec<FourVector<T>>,
    pub up_empty: Vec<bool>,
    pub down_empty: Vec<bool>,
}

/// `(∂R_s, ∂ν_s)` of one component; `None` when `|ψ_s|²` is below `floor`.
fn component_gradients<T: Real>(
    psi: Complex<T>,
    grad: &[Complex<T>; 4],
    floor: T,
    hbar_over_m: T,
) -> Option<(FourVector<T>, FourVector<T>)> {
    let n2 = psi.norm_sqr();
    if !(n2 > floor) || n2 == T::zero() {
        return None;
    }
    let n = n2.sqrt();
    let mut dr = FourVector::zero();
    let mut dnu = FourVector::zero();
    for mu in 0..4 {
        let p = psi.conj() * grad[mu];
        dr[mu] = p.re / n;
        dnu[mu] = hbar_over_m * p.im / n2;
    }
    Some((dr, dnu))
}

/// Amplitude and phase four-gradients (lower index, velocity units for phases).
/// Components with `m|ψ_s|² < eps_rho` are flagged empty and get zero gradients.
pub fn phase_gradients<T: Real>(samples: &[SpinorSample<T>], params: &PhysParams<T>, eps_rho: T) -> PhaseGradients<T> {
    let floor = eps_rho / params.m;
    let hm = params.hbar / params.m;
    let n = samples.len();
    let mut out = PhaseGradients {
        grad_nu_up: Vec::with_capacity(n),
        grad_nu_down: Vec::with_capacity(n),
        grad_nu: Vec::with_capacity(n),
        grad_beta: Vec::with_capacity(n),
        grad_r_up: Vec::with_capacity(n),
        grad_r_down: Vec::with_capacity(n),
        up_empty: Vec::with_capacity(n),
        down_empty: Vec::with_capacity(n),
    };
    for s in samples {
        let up = component_gradients(s.psi[0], &s.grad[0], floor, hm);
        let down = component_gradients(s.psi[1], &s.grad[1], floor, hm);
        let (ru, nu_u) = up.unwrap_or((FourVector::zero(), FourVector::zero()));
        let (rd, nu_d) = down.unwrap_or((FourVector::zero(), FourVector::zero()));
        out.grad_r_up.push(ru);
        out.grad_r_down.push(rd);
        out.grad_nu_up.push(nu_u);
        out.grad_nu_down.push(nu_d);
        out.grad_nu.push(nu_u);
        out.grad_beta.push(nu_d - nu_u);
        out.up_empty.push(up.is_none());
        out.down_empty.push(down.is_none());
    }
    out
}

/// Both roots of `d α² + 2b α − s e = 0`, `s = sin²θ`, evaluated without
/// cancellation. `None` if the discriminant is negative or `d = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaRoots<T> {
    /// `(−b + √(b² + s d e)) / d`
    pub plus: T,
    /// `(−b − √(b² + s d e)) / d`
    pub minus: T,
}

pub fn alpha_roots<T: Real>(b: T, d: T, e: T, sin2: T) -> Option<AlphaRoots<T>> {
    if d == T::zero() {
        return None;
    }
    let disc = b * b + sin2 * d * e;
    if disc < T::zero() {
        return None;
    }
    let sq = disc.sqrt();
    let c = -sin2 * e;
    // q has the sign of −b, so −b ∓ √disc never cancels in q.
    let (plus, minus) = if b >= T::zero() {
        let q = -(b + sq);
        let minus = q / d;
        let plus = if q == T::zero() { T::zero() } else { c / q };
        (plus, minus)
    } else {
        let q = -b + sq;
        (q / d, c / q)
    };
    Some(AlphaRoots { plus, minus })
}

impl<T: Real> AlphaRoots<T> {
    pub fn select(&self, branch: Branch) -> T {
        match branch {
            Branch::Plus => self.plus,
            Branch::Minus => self.minus,
            Branch::Smallest => {
                if self.minus.abs() < self.plus.abs() {
                    self.minus
                } else {
                    self.plus
                }
            }
        }
    }
}

/// Quadratic coefficients `(b, d, e)` from `∂ν`, `∂β`.
#[inline]
pub fn alpha_coefficients<T: Real>(grad_nu: &FourVector<T>, grad_beta: &FourVector<T>) -> (T, T, T) {
    let b = grad_nu.dot(grad_beta);
    let d = grad_beta.square();
    let e = grad_beta.dot(&(*grad_nu * T::two() + *grad_beta));
    (b, d, e)
}

/// Clebsch coefficient α per point.
///
/// `prior` carries masks already decided (low density, empty spin components);
/// only `Ok` entries are examined. `|∂β·∂β|` below `beta_rel` times the largest
/// squared gradient component seen anywhere is degenerate. Degenerate points
/// get α = 0, except where ψ↑ is empty (ν undefined) where α = 1 makes
/// `v_C = ∂ν↓`.
pub fn clebsch_alpha<T: Real>(
    grad_nu: &[FourVector<T>],
    grad_beta: &[FourVector<T>],
    theta: &[T],
    prior: &[Mask],
    branch: Branch,
    params: &PhysParams<T>,
) -> (Vec<T>, Vec<Mask>) {
    let scale = grad_nu
        .iter()
        .zip(grad_beta)
        .zip(prior)
        .filter(|(_, m)| **m != Mask::LowDensity)
        .map(|((n, b), _)| n.euclidean_square().max(b.euclidean_square()).max((*n + *b).euclidean_square()))
        .fold(T::zero(), T::max);
    let eps_d = params.tolerances.beta_rel * scale;
    let mut alpha = Vec::with_capacity(theta.len());
    let mut mask = Vec::with_capacity(theta.len());
    for i in 0..theta.len() {
        if prior[i] != Mask::Ok {
            // up-empty points arrive as DegenerateBeta with ∂ν = 0
            let a = if prior[i] == Mask::DegenerateBeta && grad_nu[i] == FourVector::zero() { T::one() } else { T::zero() };
            alpha.push(a);
            mask.push(prior[i]);
            continue;
        }
        let (b, d, e) = alpha_coefficients(&grad_nu[i], &grad_beta[i]);
        if !(d.abs() >= eps_d) || d == T::zero() {
            alpha.push(T::zero());
            mask.push(Mask::DegenerateBeta);
            continue;
        }
        let s = theta[i].sin();
        match alpha_roots(b, d, e, s * s) {
            Some(r) => {
                alpha.push(r.select(branch));
                mask.push(Mask::Ok);
            }
            None => {
                alpha.push(T::zero());
                mask.push(Mask::ComplexAlpha);
            }
        }
    }
    (alpha, mask)
}

/// `v_C = α∂β + ∂ν` (lower index) where the mask admits a velocity, zero elsewhere.
pub fn clebsch_velocity<T: Real>(
    alpha: &[T],
    grad_beta: &[FourVector<T>],
    grad_nu: &[FourVector<T>],
    mask: &[Mask],
) -> Vec<FourVector<T>> {
    alpha
        .iter()
        .zip(grad_beta)
        .zip(grad_nu)
        .zip(mask)
        .map(|(((&a, &gb), &gn), m)| if m.has_velocity() { gb * a + gn } else { FourVector::zero() })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestDensity<T> {
    pub rho_0: Vec<T>,
    pub a_0: Vec<T>,
    /// `ρ₀ / ρ̄`
    pub ratio: Vec<T>,
    pub valid: Vec<bool>,
}

/// `ρ₀ = (ρ̄/c)(√(v_C·v_C) + c)`, `a₀ = √(ρ₀/m)`; only where `valid_in` and `v_C·v_C ≥ 0`.
pub fn rest_density<T: Real>(rho_bar: &[T], v_c: &[FourVector<T>], valid_in: &[bool], params: &PhysParams<T>) -> RestDensity<T> {
    let c = params.c;
    let n = rho_bar.len();
    let mut out =
        RestDensity { rho_0: vec![T::zero(); n], a_0: vec![T::zero(); n], ratio: vec![T::zero(); n], valid: vec![false; n] };
    for i in 0..n {
        let vv = v_c[i].square();
        if !valid_in[i] || vv < T::zero() {
            continue;
        }
        let rho0 = rho_bar[i] / c * (vv.sqrt() + c);
        out.rho_0[i] = rho0;
        out.a_0[i] = (rho0 / params.m).sqrt();
        out.ratio[i] = if rho_bar[i] > T::zero() { rho0 / rho_bar[i] } else { T::zero() };
        out.valid[i] = true;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct LorentzReport<T> {
    /// Largest `|√(v·v) − |v⁰|√(1 − |v⃗|²/(v⁰)²)| / |v⁰|` over checked points.
    pub identity_residual: T,
    /// `√(v_C·v_C)/c − 1` at every checked point.
    pub closeness: Vec<T>,
    pub median_abs_closeness: T,
    pub max_abs_closeness: T,
    pub checked: usize,
}

/// Checks `√(v·v) = |v⁰|√(1 − |v⃗|²/(v⁰)²)` on timelike points with `v⁰ ≠ 0`
/// and collects the distance of `√(v·v)` from `c`.
pub fn lorentz_factor_check<T: Real>(v_c: &[FourVector<T>], valid: &[bool], params: &PhysParams<T>) -> LorentzReport<T> {
    let mut identity_residual = T::zero();
    let mut closeness = Vec::new();
    for (v, &ok) in v_c.iter().zip(valid) {
        let v0 = v[0].abs();
        let vv = v.square();
        if !ok || v0 == T::zero() || vv < T::zero() {
            continue;
        }
        let lhs = vv.sqrt();
        let ratio = v.spatial_norm() / v0;
        let rhs = v0 * (T::one() - ratio * ratio).max(T::zero()).sqrt();
        identity_residual = identity_residual.max((lhs - rhs).abs() / v0);
        closeness.push(lhs / params.c - T::one());
    }
    let mut abs: Vec<T> = closeness.iter().map(|x| x.abs()).collect();
    abs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    LorentzReport {
        identity_residual,
        median_abs_closeness: median_sorted(&abs),
        max_abs_closeness: abs.last().copied().unwrap_or(T::zero()),
        checked: closeness.len(),
        closeness,
    }
}

pub(crate) fn median_sorted<T: Real>(sorted: &[T]) -> T {
    match sorted.len() {
        0 => T::zero(),
        n if n % 2 == 1 => sorted[n / 2],
        n => (sorted[n / 2 - 1] + sorted[n / 2]) * T::half(),
    }
}

/// All fluid variables for a set of spinor samples.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidState<T> {
    pub amplitudes: Amplitudes<T>,
    pub gradients: PhaseGradients<T>,
    pub alpha: Vec<T>,
    /// Lower-index Clebsch velocity.
    pub v_c: Vec<FourVector<T>>,
    pub rest: RestDensity<T>,
    pub mask: Vec<Mask>,
    pub branch: Branch,
}

impl<T: Real> FluidState<T> {
    pub fn compute(samples: &[SpinorSample<T>], params: &PhysParams<T>, branch: Branch) -> Self {
        let amplitudes = amplitudes(samples.iter().map(|s| s.psi), params);
        let gradients = phase_gradients(samples, params, amplitudes.eps_rho);
        let prior: Vec<Mask> = (0..samples.len())
            .map(|i| {
                if amplitudes.low_density[i] {
                    Mask::LowDensity
                } else if gradients.up_empty[i] || gradients.down_empty[i] {
                    Mask::DegenerateBeta
                } else {
                    Mask::Ok
                }
            })
            .collect();
        let (alpha, mut mask) =
            clebsch_alpha(&gradients.grad_nu, &gradients.grad_beta, &amplitudes.theta, &prior, branch, params);
        let v_c = clebsch_velocity(&alpha, &gradients.grad_beta, &gradients.grad_nu, &mask);
        let has_v: Vec<bool> = mask.iter().map(|m| m.has_velocity()).collect();
        let rest = rest_density(&amplitudes.rho_bar, &v_c, &has_v, params);
        for (m, &ok) in mask.iter_mut().zip(&rest.valid) {
            if m.has_velocity() && !ok {
                *m = Mask::Spacelike;
            }
        }
        Self { amplitudes, gradients, alpha, v_c, rest, mask, branch }
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    /// Fraction of points whose mask is not `Ok`.
    pub fn masked_fraction(&self) -> f64 {
        if self.mask.is_empty() {
            return 0.0;
        }
        self.mask.iter().filter(|m| **m != Mask::Ok).count() as f64 / self.mask.len() as f64
    }

    pub fn count(&self, m: Mask) -> usize {
        self.mask.iter().filter(|x| **x == m).count()
    }

    /// `v_C·v_C` on velocity-carrying points.
    pub fn velocity_square(&self) -> Vec<T> {
        self.v_c.iter().map(FourVector::square).collect()
    }

    /// `cos²θ (∂ν↑)² + sin²θ (∂ν↓)²`, the mixture the Clebsch square must reproduce.
    pub fn mixed_phase_square(&self) -> Vec<T> {
        let g = &self.gradients;
        self.amplitudes
            .theta
            .iter()
            .zip(g.grad_nu_up.iter().zip(&g.grad_nu_down))
            .map(|(th, (u, d))| {
                let (s, c) = th.sin_cos();
                c * c * u.square() + s * s * d.square()
            })
            .collect()
    }

    pub fn lorentz_check(&self, params: &PhysParams<T>) -> LorentzReport<T> {
        lorentz_factor_check(&self.v_c, &self.rest.valid, params)
    }

    /// Snapshot CSV: `axis0,axis1,axis2,rho_bar,theta,alpha,vC0,vC1,vC2,vC3,rho_0,a_0,mask`
    /// with upper-index `v_C^μ`.
    pub fn write_csv<W: std::io::Write>(&self, out: W, grid: &Grid<T>) -> crate::error::Result<()> {
        let err = |e: csv::Error| crate::error::Error::Snapshot(e.to_string());
        if grid.len() != self.len() {
            return Err(crate::error::Error::GridMismatch);
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "axis0", "axis1", "axis2", "rho_bar", "theta", "alpha", "vC0", "vC1", "vC2", "vC3", "rho_0", "a_0", "mask",
        ])
        .map_err(err)?;
        for i in 0..self.len() {
            let [i0, i1, i2] = grid.multi_index(i);
            let v = self.v_c[i].flip_index();
            let mut rec = vec![i0.to_string(), i1.to_string(), i2.to_string()];
            for x in [
                self.amplitudes.rho_bar[i],
                self.amplitudes.theta[i],
                self.alpha[i],
                v[0],
                v[1],
                v[2],
                v[3],
                self.rest.rho_0[i],
                self.rest.a_0[i],
            ] {
                rec.push(fmt_num(x));
            }
            rec.push(self.mask[i].code().to_string());
            w.write_record(&rec).map_err(err)?;
        }
        w.flush().map_err(|e| crate::error::Error::Snapshot(e.to_string()))
    }
}
