use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Physical constants. Natural units (`hbar = m = c = 1`) by default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real"))]
pub struct PhysParams<T> {
    pub hbar: T,
    pub m: T,
    pub c: T,
    #[serde(default)]
    pub tolerances: Tolerances<T>,
}

/// Scale-relative thresholds used when masking and when detecting blow-up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real"))]
pub struct Tolerances<T> {
    /// Points with `rho_bar < density_rel * max(rho_bar)` are `LowDensity`.
    pub density_rel: T,
    /// Points with `|dβ·dβ| < beta_rel * gradient scale²` are `DegenerateBeta`.
    pub beta_rel: T,
    /// A single step may not grow `max |psi|` by more than this factor.
    pub instability_growth: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self { density_rel: T::of(1e-12), beta_rel: T::of(1e-12), instability_growth: T::of(10.0) }
    }
}

impl<T: Real> Default for PhysParams<T> {
    fn default() -> Self {
        Self::natural()
    }
}

impl<T: Real> PhysParams<T> {
    pub fn natural() -> Self {
        Self::new(T::one(), T::one(), T::one())
    }

    pub fn new(hbar: T, m: T, c: T) -> Self {
        Self { hbar, m, c, tolerances: Tolerances::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("hbar", self.hbar), ("m", self.m), ("c", self.c)] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        let t = &self.tolerances;
        if !(t.density_rel >= T::zero() && t.beta_rel >= T::zero() && t.instability_growth > T::one()) {
            return Err(Error::InvalidParameter("tolerances out of range".into()));
        }
        Ok(())
    }

    /// Inverse reduced Compton length `m c / hbar`: the mass term per unit of `x0`.
    #[inline]
    pub fn kappa(&self) -> T {
        self.m * self.c / self.hbar
    }

    /// Rest energy `m c²`.
    #[inline]
    pub fn rest_energy(&self) -> T {
        self.m * self.c * self.c
    }

    /// Relativistic energy of a free particle with wave vector magnitude `k`.
    #[inline]
    pub fn energy(&self, k: T) -> T {
        let pc = self.c * self.hbar * k;
        let mc2 = self.rest_energy();
        (pc * pc + mc2 * mc2).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let p = PhysParams::<f64>::new(2.0, 3.0, 4.0);
        assert_eq!(p.kappa(), 6.0);
        assert_eq!(p.rest_energy(), 48.0);
        assert_eq!(p.energy(0.0), 48.0);
        assert!((PhysParams::<f64>::natural().energy(0.5) - 1.25f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(PhysParams::<f64>::natural().validate().is_ok());
        assert!(PhysParams::<f64>::new(0.0, 1.0, 1.0).validate().is_err());
        assert!(PhysParams::<f64>::new(1.0, f64::NAN, 1.0).validate().is_err());
        let mut p = PhysParams::<f64>::natural();
        p.tolerances.instability_growth = 1.0;
        assert!(p.validate().is_err());
    }
}
