//! Initial data: rest state, plane waves and Gaussian packets, all
//! normalized to unit total probability `∫ J⁰ = 1`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dirac::DiracState;
use crate::error::{Error, Result};
use crate::lattice::{ComplexField, DerivativeOrder, Grid};
use crate::params::PhysParams;
use crate::scalar::Real;
use crate::spinor::{phase, sigma_dot_grad};

/// Which sign of the free-particle energy the initial data occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyBranch {
    #[default]
    Positive,
    Negative,
}

/// Unit two-spinor `(cos a, e^{iφ} sin a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real"))]
pub struct SpinMixture<T> {
    pub angle: T,
    #[serde(default = "num_traits::Zero::zero")]
    pub phase: T,
}

impl<T: Real> Default for SpinMixture<T> {
    fn default() -> Self {
        Self { angle: T::zero(), phase: T::zero() }
    }
}

impl<T: Real> SpinMixture<T> {
    pub fn up() -> Self {
        Self::default()
    }

    pub fn spinor(&self) -> [Complex<T>; 2] {
        let (s, c) = self.angle.sin_cos();
        [Complex::new(c, T::zero()), phase(self.phase) * s]
    }
}

fn k_dot_sigma<T: Real>(k: [T; 3], chi: [Complex<T>; 2]) -> [Complex<T>; 2] {
    // σ·k = [[k3, k1 − i k2], [k1 + i k2, −k3]]
    let a = Complex::new(k[0], -k[1]);
    let b = Complex::new(k[0], k[1]);
    [chi[0] * k[2] + a * chi[1], b * chi[0] - chi[1] * k[2]]
}

fn normalize<T: Real>(mut state: DiracState<T>) -> Result<DiracState<T>> {
    let q = state.total_probability();
    if !(q > T::zero() && q.is_finite()) {
        return Err(Error::InvalidParameter("initial data has zero or non-finite norm".into()));
    }
    let s = Complex::new(T::one() / q.sqrt(), T::zero());
    state.psi1 = state.psi1.scale(s);
    state.psi2 = state.psi2.scale(s);
    Ok(state)
}

/// Uniform spin-up upper spinor, `ψ₂ = 0`.
pub fn rest_state<T: Real>(grid: &Grid<T>) -> DiracState<T> {
    let psi1 = ComplexField::from_fn(grid, |_| [Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero())]);
    normalize(DiracState::new(psi1, ComplexField::zeros(grid, 2), T::zero()).expect("two-spinors")).expect("nonzero")
}

/// Checks that `k` fits the periodic box: an integer number of periods
/// along active axes and zero along inactive ones.
pub fn check_periodic_k<T: Real>(grid: &Grid<T>, k: [T; 3]) -> Result<()> {
    let tol = T::of(1e-9);
    for (axis, &ka) in k.iter().enumerate() {
        if axis >= grid.dims() {
            if ka != T::zero() {
                return Err(Error::InvalidParameter(format!("k[{axis}] must be 0 on a {}-d grid", grid.dims())));
            }
            continue;
        }
        let turns = ka * grid.extents()[axis] / T::TAU();
        if (turns - turns.round()).abs() > tol * turns.abs().max(T::one()) {
            return Err(Error::InvalidParameter(format!("k[{axis}] = {ka} is not a multiple of 2π/L")));
        }
    }
    Ok(())
}

/// Free plane wave `e^{ik·x}` with the spinor closure of the chosen energy branch.
pub fn plane_wave<T: Real>(
    grid: &Grid<T>,
    k: [T; 3],
    spin: SpinMixture<T>,
    branch: EnergyBranch,
    params: &PhysParams<T>,
) -> Result<DiracState<T>> {
    check_periodic_k(grid, k)?;
    let kmag = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    let factor = params.c * params.hbar / (params.energy(kmag) + params.rest_energy());
    let chi = spin.spinor();
    let closed = k_dot_sigma(k, chi).map(|z| z * factor);
    let (big, small) = match branch {
        EnergyBranch::Positive => (chi, closed),
        EnergyBranch::Negative => (chi, closed.map(|z| -z)),
    };
    let wave = |x: [T; 3]| phase(k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
    let f_big = ComplexField::from_fn(grid, |x| big.map(|z| z * wave(x)));
    let f_small = ComplexField::from_fn(grid, |x| small.map(|z| z * wave(x)));
    let state = match branch {
        EnergyBranch::Positive => DiracState::new(f_big, f_small, T::zero())?,
        EnergyBranch::Negative => DiracState::new(f_small, f_big, T::zero())?,
    };
    normalize(state)
}

/// Gaussian packet parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real"))]
pub struct GaussianPacket<T> {
    pub center: [T; 3],
    pub width: T,
    #[serde(default = "zero3")]
    pub k: [T; 3],
    #[serde(default)]
    pub spin: SpinMixture<T>,
}

fn zero3<T: Real>() -> [T; 3] {
    [T::zero(); 3]
}

/// Minimum-image displacement on a periodic axis.
fn wrap<T: Real>(d: T, l: T) -> T {
    d - l * (d / l).round()
}

/// Positive-energy Gaussian packet. The upper spinor is
/// `χ exp(−|x−x_c|²/(2w²)) e^{ik·(x−x_c)}` with minimum-image distances;
/// the lower one is `−i cħ/(E₀+mc²) σ·Dψ₁` with `E₀ = E(|k|)` and `D` the
/// lattice derivative, which reproduces the plane-wave closure at the carrier.
pub fn gaussian_packet<T: Real>(
    grid: &Grid<T>,
    packet: &GaussianPacket<T>,
    params: &PhysParams<T>,
    order: DerivativeOrder,
) -> Result<DiracState<T>> {
    if !(packet.width > T::zero()) {
        return Err(Error::InvalidParameter("packet width must be positive".into()));
    }
    for axis in grid.dims()..3 {
        if packet.k[axis] != T::zero() {
            return Err(Error::InvalidParameter(format!("k[{axis}] must be 0 on a {}-d grid", grid.dims())));
        }
    }
    let chi = packet.spin.spinor();
    let ext = grid.extents();
    let dims = grid.dims();
    let inv = T::one() / (T::two() * packet.width * packet.width);
    let psi1 = ComplexField::from_fn(grid, |x| {
        let (mut r2, mut kd) = (T::zero(), T::zero());
        for a in 0..dims {
            let d = wrap(x[a] - packet.center[a], ext[a]);
            r2 = r2 + d * d;
            kd = kd + packet.k[a] * d;
        }
        let env = phase(kd) * (-r2 * inv).exp();
        chi.map(|z| z * env)
    });
    let k = packet.k;
    let kmag = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    let factor = params.c * params.hbar / (params.energy(kmag) + params.rest_energy());
    let psi2 = sigma_dot_grad(&psi1, order).scale(Complex::new(T::zero(), -factor));
    normalize(DiracState::new(psi1, psi2, T::zero())?)
}
