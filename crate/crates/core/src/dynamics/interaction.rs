use serde::{Deserialize, Serialize};

use super::potential::{softened_interval, PotentialSpec};
use crate::constants::InfoConstants;
use crate::error::{Error, Result};
use crate::kinematics::{beta_four, four_velocity, lorentz_factor, minkowski_dot, FourVector};

/// Two interacting emotions and their 3-velocities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionParams {
    pub q1: f64,
    pub q2: f64,
    #[serde(default)]
    pub beta1: [f64; 3],
    #[serde(default)]
    pub beta2: [f64; 3],
}

impl InteractionParams {
    /// From dimensionless counts and emotions, `Q_i = Q_c n_i q_i`.
    pub fn from_dimensionless(
        (n1, q1): (f64, f64),
        (n2, q2): (f64, f64),
        beta1: [f64; 3],
        beta2: [f64; 3],
        consts: &InfoConstants,
    ) -> Self {
        InteractionParams {
            q1: consts.q_c * n1 * q1,
            q2: consts.q_c * n2 * q2,
            beta1,
            beta2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q1.is_finite() && self.q2.is_finite()) {
            return Err(Error::invalid("InteractionParams", "non-finite emotion"));
        }
        if self.q1 + self.q2 == 0.0 {
            return Err(Error::invalid("InteractionParams", "Q1 + Q2 = 0"));
        }
        lorentz_factor(&self.beta1)?;
        lorentz_factor(&self.beta2)?;
        Ok(())
    }

    pub fn with_beta1(mut self, beta: [f64; 3]) -> Self {
        self.beta1 = beta;
        self
    }

    /// `beta_+ = beta_1 + beta_2` as 4-vectors `v_i / nu_c`.
    pub fn beta_plus(&self) -> Result<FourVector> {
        Ok(beta_four(self.beta1)? + beta_four(self.beta2)?)
    }

    /// `beta_- = beta_1 - beta_2`.
    pub fn beta_minus(&self) -> Result<FourVector> {
        Ok(beta_four(self.beta1)? - beta_four(self.beta2)?)
    }
}

pub(crate) fn combine_gie_values(q1: f64, q2: f64) -> Result<f64> {
    let s = q1 + q2;
    if s == 0.0 || !s.is_finite() {
        return Err(Error::invalid("combine_gie", format!("Q1 + Q2 = {s}")));
    }
    Ok(q1 * q2 / s)
}

/// `Q12 = Q1 Q2 / (Q1 + Q2)`.
pub fn combine_gie(params: &InteractionParams) -> Result<f64> {
    combine_gie_values(params.q1, params.q2)
}

/// `f = (1/2) [1 + (Q1 - Q2)/(Q1 + Q2) * u.v / nu_c^2]` with
/// `v = v1 + v2`, `u = v1 - v2`.
///
/// Both 4-velocities have norm `nu_c`, so `u.v` vanishes and `f = 1/2` up
/// to rounding.
pub fn interaction_factor_f(params: &InteractionParams, consts: &InfoConstants) -> Result<f64> {
    params.validate()?;
    let v1 = four_velocity(params.beta1, consts)?;
    let v2 = four_velocity(params.beta2, consts)?;
    let uv = minkowski_dot(&(v1 - v2), &(v1 + v2));
    let asym = (params.q1 - params.q2) / (params.q1 + params.q2);
    Ok(0.5 * (1.0 + asym * uv / (consts.nu_c * consts.nu_c)))
}

/// `p = Q v`.
pub fn momentum(gie: f64, beta: [f64; 3], consts: &InfoConstants) -> Result<FourVector> {
    Ok(four_velocity(beta, consts)? * gie)
}

/// Effective momentum `P = Q_c nu_c n_+ q_+ [f beta_+ + q12 a / s^2]`.
///
/// `Q_c n_+ q_+ = Q1 + Q2` and `q12 = Q12 / Q_c`.
pub fn effective_momentum(
    params: &InteractionParams,
    spec: &PotentialSpec,
    x: &FourVector,
    consts: &InfoConstants,
) -> Result<FourVector> {
    let (kinetic, potential) = effective_momentum_parts(params, spec, x, consts)?;
    Ok(kinetic + potential)
}

/// Kinetic and potential parts of the effective momentum.
pub fn effective_momentum_parts(
    params: &InteractionParams,
    spec: &PotentialSpec,
    x: &FourVector,
    consts: &InfoConstants,
) -> Result<(FourVector, FourVector)> {
    params.validate()?;
    spec.validate()?;
    let total = params.q1 + params.q2;
    let f = interaction_factor_f(params, consts)?;
    let q12 = combine_gie(params)? / consts.q_c;
    let kinetic = params.beta_plus()? * (consts.nu_c * total * f);
    let potential = if q12 == 0.0 {
        FourVector::ZERO
    } else {
        let s2 = softened_interval(x, spec.regularizer, consts)?;
        spec.direction * (consts.nu_c * total * q12 / s2)
    };
    Ok((kinetic, potential))
}

/// `L0 = -Q nu_c^2`.
pub fn lagrangian_free(gie: f64, beta: [f64; 3], consts: &InfoConstants) -> Result<f64> {
    lorentz_factor(&beta)?;
    Ok(-gie * consts.nu_c * consts.nu_c)
}

/// `L = -(Q1 + Q2) [f v_a + A_a] v^a` with `v = v1 + v2` and
/// `A = Q12 a / x^2`.
pub fn lagrangian_interaction(
    params: &InteractionParams,
    spec: &PotentialSpec,
    x: &FourVector,
    consts: &InfoConstants,
) -> Result<f64> {
    params.validate()?;
    let total = params.q1 + params.q2;
    if total == 0.0 {
        return Ok(0.0);
    }
    let f = interaction_factor_f(params, consts)?;
    let v = params.beta_plus()? * consts.nu_c;
    let q12 = combine_gie(params)?;
    let a = if q12 == 0.0 {
        FourVector::ZERO
    } else {
        let d = softened_interval(x, spec.regularizer, consts)?;
        spec.direction * (q12 / (consts.lambda_c * consts.lambda_c * d))
    };
    Ok(-total * minkowski_dot(&(v * f + a), &v))
}

#[cfg(test)]
mod tests {
    use super::*;

    const K: InfoConstants = InfoConstants::NATURAL;

    fn params(q1: f64, q2: f64) -> InteractionParams {
        InteractionParams {
            q1,
            q2,
            beta1: [0.0; 3],
            beta2: [0.0; 3],
        }
    }

    #[test]
    fn combine_examples() {
        assert_eq!(combine_gie(&params(3.0, 3.0)).unwrap(), 1.5);
        assert!((combine_gie(&params(2.0, 1.0)).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(combine_gie(&params(1.0, -1.0)).is_err());
    }

    #[test]
    fn factor_f_is_one_half() {
        let p = params(2.0, 2.0).with_beta1([0.3, 0.1, 0.0]);
        assert!((interaction_factor_f(&p, &K).unwrap() - 0.5).abs() < 1e-15);
        let p = InteractionParams {
            q1: 5.0,
            q2: 1.0,
            beta1: [0.2, -0.4, 0.1],
            beta2: [0.2, -0.4, 0.1],
        };
        assert_eq!(interaction_factor_f(&p, &K).unwrap(), 0.5);
        // u.v = v1.v1 - v2.v2 = 1 - 1 with gamma = 1/sqrt(0.75)
        let p = params(2.0, 1.0).with_beta1([0.5, 0.0, 0.0]);
        let g = 1.0 / 0.75f64.sqrt();
        let uv = (g - 1.0) * (g + 1.0) - (g * 0.5) * (g * 0.5);
        let want = 0.5 * (1.0 + (1.0 / 3.0) * uv);
        assert!((interaction_factor_f(&p, &K).unwrap() - want).abs() < 1e-15);
        assert!((want - 0.5).abs() < 1e-15);
    }

    #[test]
    fn momentum_examples() {
        assert_eq!(momentum(1.0, [0.0; 3], &K).unwrap(), FourVector::new(1.0, 0.0, 0.0, 0.0));
        let p = momentum(2.0, [0.6, 0.0, 0.0], &K).unwrap();
        assert!((p[0] - 2.5).abs() < 1e-15 && (p[1] - 1.5).abs() < 1e-15);
        let p = momentum(1.7, [0.1, 0.5, -0.3], &K).unwrap();
        assert!((p.interval() - 1.7 * 1.7).abs() < 1e-12);
        assert!(momentum(1.0, [1.0, 0.0, 0.0], &K).is_err());
    }

    #[test]
    fn effective_momentum_limits() {
        let spec = PotentialSpec::single(0.0, FourVector::new(1.0, 0.0, 0.0, 0.0));
        let x = FourVector::new(1e9, 0.0, 0.0, 0.0);
        let p = InteractionParams {
            q1: 1.0,
            q2: 1.0,
            beta1: [0.3, 0.0, 0.0],
            beta2: [0.3, 0.0, 0.0],
        };
        let (kin, pot) = effective_momentum_parts(&p, &spec, &x, &K).unwrap();
        assert!(pot.euclidean_norm() < 1e-17);
        // n+ q+ = 2, f = 1/2, beta_+ = 2 beta_1
        let b1 = beta_four([0.3, 0.0, 0.0]).unwrap();
        for a in 0..4 {
            assert!((kin[a] - 2.0 * b1[a]).abs() < 1e-15);
        }
        let zero = params(0.0, 1.0);
        assert_eq!(effective_momentum(&zero, &spec, &x, &K).unwrap().euclidean_norm(), 1.0 * 2.0 * 0.5 * 2.0 / 2.0);
    }

    #[test]
    fn free_lagrangian() {
        assert_eq!(lagrangian_free(1.0, [0.0; 3], &K).unwrap(), -1.0);
        assert_eq!(lagrangian_free(0.0, [0.0; 3], &K).unwrap(), 0.0);
        assert_eq!(
            lagrangian_free(1.0, [0.0; 3], &K).unwrap(),
            lagrangian_free(1.0, [0.9, 0.0, 0.0], &K).unwrap()
        );
        assert!(lagrangian_free(1.0, [1.0, 0.0, 0.0], &K).is_err());
    }

    #[test]
    fn interaction_lagrangian_rest_value() {
        let spec = PotentialSpec::single(0.0, FourVector::ZERO);
        let l = lagrangian_interaction(&params(1.0, 1.0), &spec, &FourVector::new(5.0, 0.0, 0.0, 0.0), &K).unwrap();
        // -(Q1 + Q2) f (2 nu_c)^2 = -2 * 0.5 * 4
        assert_eq!(l, -4.0);
    }

    #[test]
    fn interaction_lagrangian_matches_momentum_form() {
        let spec = PotentialSpec::single(0.0, FourVector::new(1.0, 0.2, -0.1, 0.0));
        let p = InteractionParams {
            q1: 1.3,
            q2: 0.4,
            beta1: [0.2, 0.1, 0.0],
            beta2: [-0.1, 0.3, 0.2],
        };
        let x = FourVector::new(4.0, 1.0, 0.5, -0.5);
        let l = lagrangian_interaction(&p, &spec, &x, &K).unwrap();
        let big_p = effective_momentum(&p, &spec, &x, &K).unwrap();
        let v = p.beta_plus().unwrap() * K.nu_c;
        assert!((l + minkowski_dot(&big_p, &v)).abs() < 1e-12);
    }
}
