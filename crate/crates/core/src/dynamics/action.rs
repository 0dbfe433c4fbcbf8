use serde::{Deserialize, Serialize};

use super::interaction::{combine_gie, interaction_factor_f, lagrangian_free, lagrangian_interaction, InteractionParams};
use super::path::Path4;
use super::potential::{softened_interval, PotentialSpec};
use crate::constants::InfoConstants;
use crate::error::{Error, Result};
use crate::kinematics::{beta_four, lorentz_factor, minkowski_dot, FourVector, METRIC};
use crate::reduce;

/// A Lagrangian evaluated at a position and a 3-velocity.
pub trait Lagrangian {
    fn value(&self, x: &FourVector, beta: [f64; 3], consts: &InfoConstants) -> Result<f64>;

    /// `(dL/dx^a, dL/dbeta^i)`.
    fn gradient(&self, x: &FourVector, beta: [f64; 3], consts: &InfoConstants) -> Result<([f64; 4], [f64; 3])>;
}

/// `L0 = -Q nu_c^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeLagrangian {
    pub gie: f64,
}

impl Lagrangian for FreeLagrangian {
    fn value(&self, _x: &FourVector, beta: [f64; 3], consts: &InfoConstants) -> Result<f64> {
        lagrangian_free(self.gie, beta, consts)
    }

    fn gradient(&self, _x: &FourVector, beta: [f64; 3], _consts: &InfoConstants) -> Result<([f64; 4], [f64; 3])> {
        lorentz_factor(&beta)?;
        Ok(([0.0; 4], [0.0; 3]))
    }
}

/// Two-emotion Lagrangian with the path carrying emotion 1.
///
/// The path velocity replaces `beta1`; `beta2` stays fixed. The potential
/// is evaluated at `x - source`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionLagrangian {
    pub params: InteractionParams,
    pub potential: PotentialSpec,
    #[serde(default = "zero_vector")]
    pub source: FourVector,
    /// Multiplies the Lagrangian by -1.
    #[serde(default)]
    pub flip_sign: bool,
}

fn zero_vector() -> FourVector {
    FourVector::ZERO
}

impl InteractionLagrangian {
    pub fn new(params: InteractionParams, potential: PotentialSpec) -> Self {
        InteractionLagrangian {
            params,
            potential,
            source: FourVector::ZERO,
            flip_sign: false,
        }
    }

    fn sign(&self) -> f64 {
        if self.flip_sign {
            -1.0
        } else {
            1.0
        }
    }
}

impl Lagrangian for InteractionLagrangian {
    fn value(&self, x: &FourVector, beta: [f64; 3], consts: &InfoConstants) -> Result<f64> {
        let params = self.params.with_beta1(beta);
        let l = lagrangian_interaction(&params, &self.potential, &(*x - self.source), consts)?;
        Ok(self.sign() * l)
    }

    fn gradient(&self, x: &FourVector, beta: [f64; 3], consts: &InfoConstants) -> Result<([f64; 4], [f64; 3])> {
        let params = self.params.with_beta1(beta);
        params.validate()?;
        let total = params.q1 + params.q2;
        let nu = consts.nu_c;
        let lam2 = consts.lambda_c * consts.lambda_c;
        let f = interaction_factor_f(&params, consts)?;
        let b1 = beta_four(beta)?;
        let bp = params.beta_plus()?;
        let q12 = combine_gie(&params)?;
        let rel = *x - self.source;
        let (a, d) = if q12 == 0.0 {
            (FourVector::ZERO, 1.0)
        } else {
            let d = softened_interval(&rel, self.potential.regularizer, consts)?;
            (self.potential.direction * (q12 / (lam2 * d)), d)
        };

        // d(gamma beta^a)/d beta^i, a = 0..3
        let g = b1[0];
        let db1 = |i: usize| -> FourVector {
            let mut col = FourVector([g * g * g * beta[i], 0.0, 0.0, 0.0]);
            for j in 0..3 {
                col.0[j + 1] = g * g * g * beta[i] * beta[j] + if i == j { g } else { 0.0 };
            }
            col
        };
        let mut d_beta = [0.0; 3];
        for (i, out) in d_beta.iter_mut().enumerate() {
            let col = db1(i);
            *out = -total * (2.0 * f * nu * nu * minkowski_dot(&bp, &col) + nu * minkowski_dot(&a, &col));
        }

        let av = minkowski_dot(&a, &bp);
        let mut d_x = [0.0; 4];
        if q12 != 0.0 {
            for (k, out) in d_x.iter_mut().enumerate() {
                *out = -total * nu * av * (-2.0 * METRIC[k] * rel[k] / (lam2 * d));
            }
        }
        let s = self.sign();
        Ok((d_x.map(|v| s * v), d_beta.map(|v| s * v)))
    }
}

/// Proper time and 3-velocity of one segment.
fn segment_kinematics(delta: &FourVector, consts: &InfoConstants) -> (f64, [f64; 3]) {
    let tau = delta.interval().sqrt() / consts.nu_c;
    let beta = std::array::from_fn(|i| delta[i + 1] / delta[0]);
    (tau, beta)
}

/// Midpoint-rule action `sum_k L(x_mid, beta_k) dtau_k`.
pub fn action<L: Lagrangian + ?Sized>(path: &Path4, lagrangian: &L, consts: &InfoConstants) -> Result<f64> {
    path.check_timelike("action")?;
    let terms = (0..path.segments())
        .map(|k| {
            let (tau, beta) = segment_kinematics(&path.delta(k), consts);
            let mid = (path.nodes()[k] + path.nodes()[k + 1]) * 0.5;
            Ok(lagrangian.value(&mid, beta, consts)? * tau)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(reduce::compensated_sum(&terms))
}

/// Gradient of the discrete action with respect to every node.
pub fn action_gradient<L: Lagrangian + ?Sized>(
    path: &Path4,
    lagrangian: &L,
    consts: &InfoConstants,
) -> Result<Vec<FourVector>> {
    path.check_timelike("action_gradient")?;
    let nodes = path.nodes();
    let mut grad = vec![FourVector::ZERO; nodes.len()];
    for k in 0..path.segments() {
        let delta = path.delta(k);
        let (tau, beta) = segment_kinematics(&delta, consts);
        let mid = (nodes[k] + nodes[k + 1]) * 0.5;
        let l = lagrangian.value(&mid, beta, consts)?;
        let (dl_dx, dl_db) = lagrangian.gradient(&mid, beta, consts)?;
        let root = delta.interval().sqrt();
        let mut d_delta = FourVector::ZERO;
        for a in 0..4 {
            d_delta.0[a] = l * METRIC[a] * delta[a] / (consts.nu_c * root);
        }
        let d0 = delta[0];
        for i in 0..3 {
            d_delta.0[0] -= tau * dl_db[i] * delta[i + 1] / (d0 * d0);
            d_delta.0[i + 1] += tau * dl_db[i] / d0;
        }
        let half = FourVector(dl_dx) * (0.5 * tau);
        grad[k + 1] = grad[k + 1] + d_delta + half;
        grad[k] = grad[k] - d_delta + half;
    }
    Ok(grad)
}

/// Signals that a path failed validation for the action.
pub(crate) fn require_distinct(a: &FourVector, b: &FourVector, op: &'static str) -> Result<()> {
    if a == b {
        return Err(Error::Degenerate {
            op,
            msg: "endpoints coincide".into(),
        });
    }
    Ok(())
}
