//! Special-relativistic kinematics with the information velocity `nu_c`
//! playing the role of `c`. Metric signature (+, -, -, -).

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::constants::InfoConstants;
use crate::error::{Error, Result};

/// Diagonal of the metric `g = diag(+1, -1, -1, -1)`.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// A contravariant 4-component quantity `(x^0, x^1, x^2, x^3)`.
///
/// The physical role (position, velocity, momentum, potential, current) is
/// fixed by the function that produced the vector.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub const ZERO: FourVector = FourVector([0.0; 4]);

    pub fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        FourVector([x0, x1, x2, x3])
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    /// Minkowski product with another vector.
    pub fn dot(&self, other: &FourVector) -> f64 {
        minkowski_dot(self, other)
    }

    /// Self-product `x . x`.
    pub fn interval(&self) -> f64 {
        minkowski_dot(self, self)
    }

    /// Covariant components `x_alpha = g_{alpha alpha} x^alpha`.
    pub fn lowered(&self) -> FourVector {
        FourVector(std::array::from_fn(|a| METRIC[a] * self.0[a]))
    }

    /// Euclidean length of the coordinate tuple.
    pub fn euclidean_norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Index<usize> for FourVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for FourVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, o: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|a| self.0[a] + o.0[a]))
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, o: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|a| self.0[a] - o.0[a]))
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, s: f64) -> FourVector {
        FourVector(self.0.map(|v| v * s))
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector(self.0.map(|v| -v))
    }
}

/// `a^0 b^0 - a^1 b^1 - a^2 b^2 - a^3 b^3`.
pub fn minkowski_dot(a: &FourVector, b: &FourVector) -> f64 {
    a.0[0] * b.0[0] - a.0[1] * b.0[1] - a.0[2] * b.0[2] - a.0[3] * b.0[3]
}

fn beta_norm_sq(beta: &[f64; 3]) -> f64 {
    beta.iter().map(|b| b * b).sum()
}

fn check_subluminal(op: &'static str, beta: &[f64; 3]) -> Result<f64> {
    let b2 = beta_norm_sq(beta);
    if !b2.is_finite() || b2 >= 1.0 {
        return Err(Error::Superluminal {
            op,
            beta: b2.sqrt(),
        });
    }
    Ok(b2)
}

/// Lorentz factor `1/sqrt(1 - beta^2)`.
pub fn lorentz_factor(beta: &[f64; 3]) -> Result<f64> {
    let b2 = check_subluminal("lorentz_factor", beta)?;
    Ok(1.0 / (1.0 - b2).sqrt())
}

/// A Poincare map `x -> Lambda x + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzMap {
    lambda: [[f64; 4]; 4],
    translation: FourVector,
}

impl LorentzMap {
    pub const IDENTITY: LorentzMap = LorentzMap {
        lambda: [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
        translation: FourVector::ZERO,
    };

    /// Builds a map after checking `Lambda^T g Lambda = g`.
    ///
    /// The per-entry tolerance is `1e-12` scaled by the largest squared
    /// matrix entry, so strongly boosted maps are not rejected for rounding.
    pub fn new(lambda: [[f64; 4]; 4], translation: FourVector) -> Result<Self> {
        let map = LorentzMap {
            lambda,
            translation,
        };
        let scale = lambda
            .iter()
            .flatten()
            .fold(1.0f64, |m, v| m.max(v * v));
        let dev = map.metric_deviation();
        if !dev.is_finite() || dev > 1e-12 * scale || !translation.is_finite() {
            return Err(Error::InvalidMap {
                op: "poincare_apply",
                deviation: dev,
            });
        }
        Ok(map)
    }

    pub fn lambda(&self) -> &[[f64; 4]; 4] {
        &self.lambda
    }

    pub fn translation(&self) -> FourVector {
        self.translation
    }

    pub fn with_translation(mut self, b: FourVector) -> Self {
        self.translation = b;
        self
    }

    /// `max |Lambda^T g Lambda - g|` over all entries.
    pub fn metric_deviation(&self) -> f64 {
        let l = &self.lambda;
        let mut dev = 0.0f64;
        for a in 0..4 {
            for b in 0..4 {
                let v: f64 = (0..4).map(|m| l[m][a] * METRIC[m] * l[m][b]).sum();
                let target = if a == b { METRIC[a] } else { 0.0 };
                dev = dev.max((v - target).abs());
            }
        }
        dev
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &LorentzMap) -> LorentzMap {
        let mut lambda = [[0.0; 4]; 4];
        for (a, row) in lambda.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v = (0..4).map(|m| self.lambda[a][m] * other.lambda[m][b]).sum();
            }
        }
        let translation = self.linear(&other.translation) + self.translation;
        LorentzMap {
            lambda,
            translation,
        }
    }

    fn linear(&self, x: &FourVector) -> FourVector {
        FourVector(std::array::from_fn(|a| {
            (0..4).map(|b| self.lambda[a][b] * x.0[b]).sum()
        }))
    }

    /// Applies only the homogeneous part, as for velocities or tensors.
    pub fn apply_linear(&self, x: &FourVector) -> FourVector {
        self.linear(x)
    }
}

/// `Lambda x + b`.
pub fn poincare_apply(map: &LorentzMap, x: &FourVector) -> FourVector {
    map.linear(x) + map.translation
}

/// Pure boost with velocity `beta * nu_c`, no translation.
pub fn boost_from_beta(beta: [f64; 3]) -> Result<LorentzMap> {
    let b2 = check_subluminal("boost_from_beta", &beta)?;
    let gamma = 1.0 / (1.0 - b2).sqrt();
    let mut lambda = LorentzMap::IDENTITY.lambda;
    lambda[0][0] = gamma;
    for i in 0..3 {
        lambda[0][i + 1] = -gamma * beta[i];
        lambda[i + 1][0] = -gamma * beta[i];
    }
    if b2 > 0.0 {
        // (gamma - 1)/beta^2 written as gamma^2/(1 + gamma) to stay accurate at small beta
        let k = gamma * gamma / (1.0 + gamma);
        for i in 0..3 {
            for j in 0..3 {
                lambda[i + 1][j + 1] += k * beta[i] * beta[j];
            }
        }
    }
    Ok(LorentzMap {
        lambda,
        translation: FourVector::ZERO,
    })
}

/// `(nu_c, nu_c beta) / sqrt(1 - beta^2)`.
pub fn four_velocity(beta: [f64; 3], consts: &InfoConstants) -> Result<FourVector> {
    let b2 = check_subluminal("four_velocity", &beta)?;
    let g = consts.nu_c / (1.0 - b2).sqrt();
    Ok(FourVector([g, g * beta[0], g * beta[1], g * beta[2]]))
}

/// Dimensionless 4-velocity `beta^alpha = v^alpha / nu_c`.
pub fn beta_four(beta: [f64; 3]) -> Result<FourVector> {
    four_velocity(beta, &InfoConstants::NATURAL)
}

/// `dt * sqrt(1 - beta^2)`.
pub fn proper_time(dt: f64, beta: [f64; 3]) -> Result<f64> {
    let b2 = check_subluminal("proper_time", &beta)?;
    if !(dt >= 0.0) {
        return Err(Error::invalid("proper_time", format!("dt = {dt} must be >= 0")));
    }
    Ok(dt * (1.0 - b2).sqrt())
}

/// Spatial 4-velocity magnitude squared, `nu_c^2 beta^2 / (1 - beta^2)`.
pub fn mean_speed_sq_from_beta(beta: [f64; 3], consts: &InfoConstants) -> Result<f64> {
    let b2 = check_subluminal("mean_speed_sq_from_beta", &beta)?;
    Ok(consts.nu_c * consts.nu_c * b2 / (1.0 - b2))
}

/// Mean displacement expressed as an integer number of bits per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizedDisplacement {
    #[serde(rename = "N")]
    pub n: [i64; 3],
    pub mean_dt: f64,
    /// `raw_i - N_i lambda_c`.
    pub residuals: [f64; 3],
}

/// Rounds each spatial component of `raw_mean` to the nearest whole number
/// of `lambda_c` (ties to even) and derives the mean time interval
/// `(lambda_c / sqrt(<v^2>)) sqrt(N1^2 + N2^2 + N3^2)`.
pub fn quantize_displacement(
    raw_mean: &FourVector,
    mean_speed_sq: f64,
    consts: &InfoConstants,
) -> Result<QuantizedDisplacement> {
    if !(mean_speed_sq > 0.0) || !mean_speed_sq.is_finite() {
        return Err(Error::invalid(
            "quantize_displacement",
            format!("mean squared speed {mean_speed_sq} must be positive"),
        ));
    }
    if !raw_mean.is_finite() {
        return Err(Error::invalid("quantize_displacement", "non-finite displacement"));
    }
    let lambda = consts.lambda_c;
    let mut n = [0i64; 3];
    let mut residuals = [0.0; 3];
    for i in 0..3 {
        let raw = raw_mean.0[i + 1];
        let k = (raw / lambda).round_ties_even();
        n[i] = k as i64;
        residuals[i] = raw - k * lambda;
    }
    let count: f64 = n.iter().map(|&k| (k * k) as f64).sum();
    let mean_dt = lambda / mean_speed_sq.sqrt() * count.sqrt();
    Ok(QuantizedDisplacement {
        n,
        mean_dt,
        residuals,
    })
}
