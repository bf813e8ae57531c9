//! Scalar test maps on `[0, 1]`.

use std::f64::consts::E;

use super::ProblemError;
use crate::fixedpoint::LipschitzData;

/// `x ↦ e^{γx}/4` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarMapSpec {
    gamma: f64,
}

impl ScalarMapSpec {
    pub fn new(gamma: f64) -> Result<Self, ProblemError> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(ProblemError::InvalidParameter(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.gamma * x).exp() / 4.0
    }

    /// `γ e^γ / 4`, the maximum slope on `[0, 1]`.
    pub fn lipschitz(&self) -> f64 {
        self.gamma * self.gamma.exp() / 4.0
    }
}

/// The map on length-1 vectors and its analytic Lipschitz constant.
pub fn scalar_map(spec: ScalarMapSpec) -> (impl Fn(&[f64]) -> Vec<f64> + Copy, LipschitzData) {
    (
        move |x: &[f64]| vec![spec.eval(x[0])],
        LipschitzData::analytic(spec.lipschitz()),
    )
}

/// `S(x) = 0.25 γ₁ e^x`, `F(x) = γ₂ x²` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NestedScalarSpec {
    gamma1: f64,
    gamma2: f64,
}

impl NestedScalarSpec {
    /// Accepts `γ ≥ 0`; zero gives the trivial maps `S ≡ 0`, `F ≡ 0`.
    pub fn new(gamma1: f64, gamma2: f64) -> Result<Self, ProblemError> {
        for g in [gamma1, gamma2] {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(ProblemError::InvalidParameter(format!(
                    "gamma must be non-negative, got {g}"
                )));
            }
        }
        Ok(Self { gamma1, gamma2 })
    }

    /// Picks `γ₁ = 4 L_S / e` and `γ₂ = L_F / 2`.
    pub fn from_lipschitz(l_s: f64, l_f: f64) -> Result<Self, ProblemError> {
        Self::new(4.0 * l_s / E, l_f / 2.0)
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }

    /// `0.25 γ₁ e`
    pub fn l_s(&self) -> f64 {
        0.25 * self.gamma1 * E
    }

    /// `2 γ₂`
    pub fn l_f(&self) -> f64 {
        2.0 * self.gamma2
    }

    pub fn s(&self, x: f64) -> f64 {
        0.25 * self.gamma1 * x.exp()
    }

    pub fn f(&self, x: f64) -> f64 {
        self.gamma2 * x * x
    }
}

pub type VectorMap = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// The pair `(S, F)` on length-1 vectors.
pub struct NestedScalar {
    pub s: VectorMap,
    pub f: VectorMap,
    pub l_s: f64,
    pub l_f: f64,
}

pub fn nested_scalar(spec: NestedScalarSpec) -> NestedScalar {
    NestedScalar {
        s: Box::new(move |x| vec![spec.s(x[0])]),
        f: Box::new(move |x| vec![spec.f(x[0])]),
        l_s: spec.l_s(),
        l_f: spec.l_f(),
    }
}

/// Fixed point of `x = S(F(x))` by plain iteration from 0.
pub fn nested_fixed_point(spec: NestedScalarSpec) -> f64 {
    let mut x = 0.0;
    for _ in 0..100_000 {
        let next = spec.s(spec.f(x));
        if next == x {
            break;
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lipschitz_labels() {
        for (gamma, label) in [(0.3, 0.101239), (1.145, 0.899524), (1.2, 0.996035)] {
            let (_, l) = scalar_map(ScalarMapSpec::new(gamma).unwrap());
            assert!(
                (l.constant - label).abs() <= 5e-7,
                "{gamma}: {}",
                l.constant
            );
        }
        assert!(ScalarMapSpec::new(0.0).is_err());
    }

    #[test]
    fn nested_constants() {
        let s = NestedScalarSpec::from_lipschitz(0.9, 0.99).unwrap();
        assert!((s.gamma1() - 3.6 / E).abs() <= 1e-15);
        assert!((s.gamma1() - 1.32436).abs() <= 1e-5);
        assert_eq!(s.gamma2(), 0.495);
        assert!((s.l_s() - 0.9).abs() <= 1e-15);
        assert!((s.l_f() - 0.99).abs() <= 1e-15);
    }

    #[test]
    fn zero_gammas_give_zero_maps() {
        let spec = NestedScalarSpec::new(0.0, 0.0).unwrap();
        let p = nested_scalar(spec);
        assert_eq!((p.s)(&[0.7]), vec![0.0]);
        assert_eq!((p.f)(&[0.7]), vec![0.0]);
        assert_eq!(nested_fixed_point(spec), 0.0);
    }
}
