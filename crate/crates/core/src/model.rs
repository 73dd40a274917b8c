//! Confining potential, quadratic interaction and scalar model parameters.
//!
//! The state space is the real line. Particles feel an even polynomial
//! potential `V` and are pulled towards their barycenter with strength
//! `kappa`, the noise amplitude being `sigma`.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Shape of the confining potential.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    /// `V(x) = x^4/4 - x^2/2`.
    DoubleWell,
    /// `V(x) = c_1 x^2 + c_2 x^4 + ... + c_k x^{2k}`.
    EvenPolynomial,
}

/// An even polynomial confining potential.
///
/// For [`PotentialKind::EvenPolynomial`] the coefficients multiply the even
/// powers `x^2, x^4, ...` in that order. The double well ignores them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    #[serde(default)]
    pub coefficients: Vec<f64>,
}

impl PotentialSpec {
    pub fn double_well() -> Self {
        Self {
            kind: PotentialKind::DoubleWell,
            coefficients: vec![-0.5, 0.25],
        }
    }

    pub fn even_polynomial(coefficients: Vec<f64>) -> Self {
        Self {
            kind: PotentialKind::EvenPolynomial,
            coefficients,
        }
    }

    /// `V(x)`.
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        let x2 = x * x;
        match self.kind {
            PotentialKind::DoubleWell => 0.25 * x2 * x2 - 0.5 * x2,
            PotentialKind::EvenPolynomial => {
                // Horner in x^2: sum_k c_k (x^2)^(k+1)
                let mut acc = 0.0;
                for &c in self.coefficients.iter().rev() {
                    acc = (acc + c) * x2;
                }
                acc
            }
        }
    }

    /// `V'(x)`. Written as `x * p(x^2)` so that oddness holds bit for bit.
    #[inline]
    pub fn grad(&self, x: f64) -> f64 {
        match self.kind {
            PotentialKind::DoubleWell => x * (x * x - 1.0),
            PotentialKind::EvenPolynomial => {
                let x2 = x * x;
                let mut acc = 0.0;
                for (k, &c) in self.coefficients.iter().enumerate().rev() {
                    acc = acc * x2 + 2.0 * (k as f64 + 1.0) * c;
                }
                x * acc
            }
        }
    }

    /// Degree of the polynomial.
    pub fn degree(&self) -> usize {
        match self.kind {
            PotentialKind::DoubleWell => 4,
            PotentialKind::EvenPolynomial => 2 * self.coefficients.len(),
        }
    }
}

/// Free function form of [`PotentialSpec::value`].
pub fn potential_value(spec: &PotentialSpec, x: f64) -> f64 {
    spec.value(x)
}

/// Free function form of [`PotentialSpec::grad`].
pub fn potential_grad(spec: &PotentialSpec, x: f64) -> f64 {
    spec.grad(x)
}

/// Physical problem definition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Noise amplitude; the particle SDE has diffusion `sqrt(2) * sigma`.
    pub sigma: f64,
    /// Strength of the quadratic attraction to the barycenter.
    pub kappa: f64,
    pub potential: PotentialSpec,
}

impl ModelParams {
    pub fn double_well(sigma: f64) -> Self {
        Self {
            sigma,
            kappa: 1.0,
            potential: PotentialSpec::double_well(),
        }
    }

    pub fn with_sigma(&self, sigma: f64) -> Self {
        Self { sigma, ..self.clone() }
    }

    /// `sigma^2`.
    pub fn temperature(&self) -> f64 {
        self.sigma * self.sigma
    }

    /// Interaction strength in units where the temperature is one,
    /// `kappa / sigma^2`. This is the slope factor in `f'(m) = kappa_eff Var(nu_m)`
    /// and the scaling used by the modified-drift construction.
    pub fn kappa_eff(&self) -> f64 {
        self.kappa / self.temperature()
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }
}

/// A single failed structural check.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NonPositiveSigma(f64),
    NonPositiveKappa(f64),
    /// Degree of the polynomial is below 4.
    DegreeTooLow(usize),
    NonPositiveLeadingCoefficient(f64),
    NonFiniteCoefficient(usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveSigma(s) => write!(f, "sigma must be positive (got {s})"),
            Violation::NonPositiveKappa(k) => write!(f, "kappa must be positive (got {k})"),
            Violation::DegreeTooLow(d) => {
                write!(f, "potential degree must be at least 4 (got {d})")
            }
            Violation::NonPositiveLeadingCoefficient(c) => {
                write!(f, "leading coefficient must be positive (got {c})")
            }
            Violation::NonFiniteCoefficient(i) => write!(f, "coefficient {i} is not finite"),
        }
    }
}

/// Outcome of [`validate`]; empty means the parameters are admissible.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<(), crate::Error> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(crate::Error::InvalidParams(
                self.violations.iter().map(|v| v.to_string()).collect(),
            ))
        }
    }
}

/// Structural checks that make `exp(-(V(x) + kappa |x-m|^2/2) / sigma^2)`
/// integrable for every `m` and the potential confining.
///
/// Odd powers cannot be expressed in [`PotentialSpec`], so evenness holds by
/// construction.
pub fn validate(params: &ModelParams) -> ValidationReport {
    let mut violations = Vec::new();
    if !(params.sigma > 0.0 && params.sigma.is_finite()) {
        violations.push(Violation::NonPositiveSigma(params.sigma));
    }
    if !(params.kappa > 0.0 && params.kappa.is_finite()) {
        violations.push(Violation::NonPositiveKappa(params.kappa));
    }
    if params.potential.kind == PotentialKind::EvenPolynomial {
        let coeffs = &params.potential.coefficients;
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_finite() {
                violations.push(Violation::NonFiniteCoefficient(i));
            }
        }
        let degree = params.potential.degree();
        if degree < 4 {
            violations.push(Violation::DegreeTooLow(degree));
        }
        if let Some(&lead) = coeffs.last() {
            if !(lead > 0.0) {
                violations.push(Violation::NonPositiveLeadingCoefficient(lead));
            }
        }
    }
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_well_values() {
        let v = PotentialSpec::double_well();
        assert_eq!(v.value(0.0), 0.0);
        assert_eq!(v.value(1.0), -0.25);
        assert_eq!(v.value(-1.0), -0.25);
        assert_eq!(v.grad(0.0), 0.0);
        assert_eq!(v.grad(1.0), 0.0);
        assert_eq!(v.grad(2.0), 6.0);
    }

    #[test]
    fn grad_matches_central_differences() {
        let specs = [
            PotentialSpec::double_well(),
            PotentialSpec::even_polynomial(vec![-1.0, 0.1, 0.02]),
        ];
        for v in &specs {
            for i in 0..=200 {
                let x = -5.0 + 0.05 * i as f64;
                let h = 1e-5 * (1.0 + x.abs());
                let fd = (v.value(x + h) - v.value(x - h)) / (2.0 * h);
                let g = v.grad(x);
                let err = (fd - g).abs() / g.abs().max(1.0);
                assert!(err < 1e-6, "x={x} fd={fd} g={g}");
            }
        }
    }

    #[test]
    fn evenness_is_exact() {
        let specs = [
            PotentialSpec::double_well(),
            PotentialSpec::even_polynomial(vec![-0.5, 0.25]),
            PotentialSpec::even_polynomial(vec![0.3, -0.7, 0.05]),
        ];
        for v in &specs {
            for i in 0..1000 {
                let x = 0.0137 * i as f64 - 6.0;
                assert_eq!(v.value(x), v.value(-x));
                assert_eq!(v.grad(x), -v.grad(-x));
            }
        }
    }

    #[test]
    fn even_polynomial_reproduces_double_well() {
        let dw = PotentialSpec::double_well();
        let poly = PotentialSpec::even_polynomial(vec![-0.5, 0.25]);
        for i in 0..=100 {
            let x = -3.0 + 0.06 * i as f64;
            assert!((dw.value(x) - poly.value(x)).abs() < 1e-12);
            assert!((dw.grad(x) - poly.grad(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn validation() {
        assert!(validate(&ModelParams::double_well(0.5)).is_ok());

        let report = validate(&ModelParams::double_well(-1.0));
        assert_eq!(report.violations, vec![Violation::NonPositiveSigma(-1.0)]);
        assert!(report.violations[0].to_string().contains("sigma must be positive"));

        let p = ModelParams {
            sigma: 0.5,
            kappa: 1.0,
            potential: PotentialSpec::even_polynomial(vec![-1.0, 0.25]),
        };
        assert!(validate(&p).is_ok());

        let p = ModelParams {
            sigma: 0.5,
            kappa: 0.0,
            potential: PotentialSpec::even_polynomial(vec![1.0]),
        };
        let r = validate(&p);
        assert!(r.violations.contains(&Violation::NonPositiveKappa(0.0)));
        assert!(r.violations.contains(&Violation::DegreeTooLow(2)));

        let p = ModelParams {
            sigma: 0.5,
            kappa: 1.0,
            potential: PotentialSpec::even_polynomial(vec![1.0, -0.25]),
        };
        assert_eq!(
            validate(&p).violations,
            vec![Violation::NonPositiveLeadingCoefficient(-0.25)]
        );
    }
}
