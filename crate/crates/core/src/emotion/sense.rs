use rayon::prelude::*;

use super::algebra::{dot, mul, scaled_gradient, sum, wave};
use super::StreamSet;
use crate::constants::InfoConstants;
use crate::error::{Error, Result};
use crate::kinematics::METRIC;
use crate::lattice::{Lattice4, TensorField};

#[derive(Debug, Clone)]
pub struct GammaTerms {
    pub gamma_mu: TensorField,
    pub gamma_psi: TensorField,
    pub gamma_mupsi: TensorField,
    pub gamma_x: TensorField,
}

impl GammaTerms {
    pub fn entries(&self) -> [(&'static str, &TensorField); 4] {
        [
            ("gamma_mu", &self.gamma_mu),
            ("gamma_psi", &self.gamma_psi),
            ("gamma_mupsi", &self.gamma_mupsi),
            ("gamma_x", &self.gamma_x),
        ]
    }
}

/// `box s + (l ds).(l ds) + (box s)^2` for a scalar field.
fn scalar_self(s: &TensorField, l: f64) -> Result<TensorField> {
    let w = wave(s, l);
    let g = scaled_gradient(s, l)?;
    sum(&[&w, &dot(&g, &g)?, &mul(&w, &w)?])
}

/// Symmetrized gradient and wave cross term of two scalar fields.
fn scalar_cross(a: &TensorField, b: &TensorField, l: f64) -> Result<TensorField> {
    let (ga, gb) = (scaled_gradient(a, l)?, scaled_gradient(b, l)?);
    let (wa, wb) = (wave(a, l), wave(b, l));
    let grad = dot(&ga, &gb)?.lincomb(0.5, &dot(&gb, &ga)?, 0.5)?;
    let box_ = mul(&wa, &wb)?.lincomb(0.5, &mul(&wb, &wa)?, 0.5)?;
    grad.add(&box_)
}

/// Position moments: `(1/2)(x_a/l) V^a + (1/2) V_a (x^a/l) + (x_a/l) M^{ab} (x_b/l)`
/// with `V = l dmu + l dpsi + I + B` and `M = J + J~ + H + H~`.
fn position_moments(
    mu: &TensorField,
    psi: &TensorField,
    streams: &StreamSet,
    lattice: &Lattice4,
    l: f64,
) -> Result<TensorField> {
    let v = sum(&[
        &scaled_gradient(mu, l)?,
        &scaled_gradient(psi, l)?,
        &streams.text,
        &streams.context,
    ])?;
    let m = sum(&[
        &streams.text_tensor,
        &streams.text_tensor_dual,
        &streams.context_tensor,
        &streams.context_tensor_dual,
    ])?;
    let data = (0..lattice.sites())
        .into_par_iter()
        .map(|site| {
            let x = lattice.position(site);
            let xl: [f64; 4] = std::array::from_fn(|a| METRIC[a] * x[a] / l);
            let vs = v.site(site);
            let ms = m.site(site);
            let linear: f64 = (0..4).map(|a| xl[a] * vs[a]).sum();
            let mut quad = 0.0;
            for a in 0..4 {
                for b in 0..4 {
                    quad += xl[a] * ms[4 * a + b] * xl[b];
                }
            }
            0.5 * linear + 0.5 * linear + quad
        })
        .collect();
    TensorField::from_data(*lattice, vec![], data)
}

/// Implied-sense terms and their sum.
pub fn implied_sense(
    mu: &TensorField,
    psi: &TensorField,
    streams: &StreamSet,
    lattice: &Lattice4,
    consts: &InfoConstants,
) -> Result<(GammaTerms, TensorField)> {
    for f in [mu, psi, &streams.text] {
        if f.lattice() != lattice {
            return Err(Error::shape("implied_sense", "fields live on different lattices"));
        }
    }
    if mu.rank() != 0 || psi.rank() != 0 {
        return Err(Error::shape("implied_sense", "mu and psi must be scalar fields"));
    }
    let l = consts.lambda_c;
    let terms = GammaTerms {
        gamma_mu: scalar_self(mu, l)?,
        gamma_psi: scalar_self(psi, l)?,
        gamma_mupsi: scalar_cross(mu, psi, l)?,
        gamma_x: position_moments(mu, psi, streams, lattice, l)?,
    };
    let gamma = sum(&[&terms.gamma_mu, &terms.gamma_psi, &terms.gamma_mupsi, &terms.gamma_x])?;
    Ok((terms, gamma))
}
