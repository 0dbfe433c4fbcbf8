use serde::{Deserialize, Serialize};

use crate::constants::InfoConstants;
use crate::error::{Error, Result};
use crate::kinematics::FourVector;
use crate::lattice::{dual_tensor, field_tensor, four_divergence, Lattice4, TensorField, Variance};

/// Source strength of an inverse-square potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialSource {
    /// One emotion `Q`.
    Single { gie: f64 },
    /// Two emotions combined as `Q1 Q2 / (Q1 + Q2)`.
    Pair { q1: f64, q2: f64 },
}

impl PotentialSource {
    pub fn strength(&self) -> Result<f64> {
        match *self {
            PotentialSource::Single { gie } => Ok(gie),
            PotentialSource::Pair { q1, q2 } => super::combine_gie_values(q1, q2),
        }
    }
}

/// `A^a = Q a^a / (lambda_c^2 (s^2 + sigma))` with `s^2 = x.x / lambda_c^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub source: PotentialSource,
    /// Dimensionless direction `a^a`.
    pub direction: FourVector,
    /// Softening added to `s^2`.
    #[serde(default)]
    pub regularizer: f64,
}

impl PotentialSpec {
    pub fn single(gie: f64, direction: FourVector) -> Self {
        PotentialSpec {
            source: PotentialSource::Single { gie },
            direction,
            regularizer: 0.0,
        }
    }

    pub fn with_regularizer(mut self, sigma: f64) -> Self {
        self.regularizer = sigma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.direction.is_finite() {
            return Err(Error::invalid("PotentialSpec", "non-finite direction"));
        }
        if !(self.regularizer >= 0.0 && self.regularizer.is_finite()) {
            return Err(Error::invalid("PotentialSpec", "regularizer must be finite and >= 0"));
        }
        Ok(())
    }
}

/// `s(x)^2 + sigma`, erroring when it is not positive.
pub(crate) fn softened_interval(x: &FourVector, sigma: f64, consts: &InfoConstants) -> Result<f64> {
    let d = x.interval() / (consts.lambda_c * consts.lambda_c) + sigma;
    if !(d > 0.0) {
        return Err(Error::SingularPotential {
            op: "potential",
            value: d,
        });
    }
    Ok(d)
}

/// Inverse-square potential at `x`, measured from the source.
pub fn potential_single(spec: &PotentialSpec, x: &FourVector, consts: &InfoConstants) -> Result<FourVector> {
    spec.validate()?;
    let q = spec.source.strength()?;
    let d = softened_interval(x, spec.regularizer, consts)?;
    Ok(spec.direction * (q / (consts.lambda_c * consts.lambda_c * d)))
}

/// Potential sampled at every site of a lattice.
pub fn potential_field(spec: &PotentialSpec, lattice: &Lattice4, consts: &InfoConstants) -> Result<TensorField> {
    let mut data = Vec::with_capacity(lattice.sites() * 4);
    for site in 0..lattice.sites() {
        data.extend(potential_single(spec, &lattice.position(site), consts)?.0);
    }
    TensorField::from_data(*lattice, vec![Variance::Contra], data)
}

/// Emotion current: a density times dimensionless components.
#[derive(Debug, Clone)]
pub struct CurrentDensity {
    /// `dQ / d^4x`.
    pub rho: TensorField,
    /// Contravariant components `(j^0, j^1, j^2, j^3)`.
    pub components: TensorField,
}

impl CurrentDensity {
    pub fn zero(lattice: Lattice4) -> Self {
        CurrentDensity {
            rho: TensorField::scalar_constant(lattice, 0.0),
            components: TensorField::contravariant_zeros(lattice, 1),
        }
    }

    /// `j^a = rho * (j^0, ..., j^3)`.
    pub fn assembled(&self) -> Result<TensorField> {
        if self.rho.rank() != 0 || self.components.rank() != 1 {
            return Err(Error::shape("CurrentDensity", "expected scalar rho and rank-1 components"));
        }
        self.components.to_contravariant().mul_scalar_field(&self.rho)
    }
}

/// Residuals of the field equations for a potential and a current.
#[derive(Debug, Clone)]
pub struct MaxwellResiduals {
    /// `(1/2) d_a G^{ab} - 4 pi j^b`
    pub source: TensorField,
    /// `(1/2) d_a G~^{ab}`
    pub dual: TensorField,
    /// `d^a j_a`
    pub continuity: TensorField,
}

pub fn maxwell_residuals(
    potential: &TensorField,
    current: &CurrentDensity,
    _consts: &InfoConstants,
) -> Result<MaxwellResiduals> {
    let j = current.assembled()?;
    if j.lattice() != potential.lattice() {
        return Err(Error::shape("maxwell_residuals", "potential and current lattices differ"));
    }
    let g = field_tensor(potential)?;
    let dual = four_divergence(&dual_tensor(&g)?, 0, 0.5)?;
    let source = four_divergence(&g, 0, 0.5)?.lincomb(1.0, &j, -4.0 * std::f64::consts::PI)?;
    let continuity = four_divergence(&j, 0, 1.0)?;
    Ok(MaxwellResiduals {
        source,
        dual,
        continuity,
    })
}
