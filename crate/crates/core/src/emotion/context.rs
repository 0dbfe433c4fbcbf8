//! Context emotion `psi` as the sum of eleven named terms.
//!
//! A dummy index repeated in the same position across two factors is read
//! as two independent contractions, e.g. `(l d^s J_{s r})(l d^s J_s^r)` is
//! the Minkowski square of the divergence vector `l d_s J^{s r}`.

use super::algebra::{ddot, divergence, dot, mul, sandwich, sum, tensor_divergence, wave};
use super::{StreamSet, TextPair};
use crate::constants::InfoConstants;
use crate::error::{Error, Result};
use crate::lattice::TensorField;

#[derive(Debug, Clone)]
pub struct PsiTerms {
    pub psi_0: TensorField,
    pub psi_i: TensorField,
    pub psi_b: TensorField,
    pub psi_j: TensorField,
    pub psi_h: TensorField,
    pub psi_ib: TensorField,
    pub psi_ij: TensorField,
    pub psi_bj: TensorField,
    pub psi_ih: TensorField,
    pub psi_bh: TensorField,
    pub psi_jh: TensorField,
}

impl PsiTerms {
    pub fn entries(&self) -> [(&'static str, &TensorField); 11] {
        [
            ("psi_0", &self.psi_0),
            ("psi_I", &self.psi_i),
            ("psi_B", &self.psi_b),
            ("psi_J", &self.psi_j),
            ("psi_H", &self.psi_h),
            ("psi_IB", &self.psi_ib),
            ("psi_IJ", &self.psi_ij),
            ("psi_BJ", &self.psi_bj),
            ("psi_IH", &self.psi_ih),
            ("psi_BH", &self.psi_bh),
            ("psi_JH", &self.psi_jh),
        ]
    }
}

/// Derived quantities of one stream vector.
struct VectorParts {
    v: TensorField,
    div: TensorField,
    wave: TensorField,
}

impl VectorParts {
    fn new(v: &TensorField, l: f64) -> Result<Self> {
        Ok(VectorParts {
            v: v.clone(),
            div: divergence(v, l)?,
            wave: wave(v, l),
        })
    }
}

/// Derived quantities of one antisymmetric tensor and its dual.
struct TensorParts {
    t: TensorField,
    dual: TensorField,
    /// `l d_b T^{b s}`
    div_first: TensorField,
    /// `l d_b T^{s b}`
    div_second: TensorField,
    dual_div_first: TensorField,
    dual_div_second: TensorField,
}

impl TensorParts {
    fn new(t: &TensorField, dual: &TensorField, l: f64) -> Result<Self> {
        Ok(TensorParts {
            t: t.clone(),
            dual: dual.clone(),
            div_first: tensor_divergence(t, 0, l)?,
            div_second: tensor_divergence(t, 1, l)?,
            dual_div_first: tensor_divergence(dual, 0, l)?,
            dual_div_second: tensor_divergence(dual, 1, l)?,
        })
    }
}

/// `X.X + l d.X + (l d.X)^2 + (box X).(box X)`.
fn self_vector(x: &VectorParts) -> Result<TensorField> {
    sum(&[
        &dot(&x.v, &x.v)?,
        &x.div,
        &mul(&x.div, &x.div)?,
        &dot(&x.wave, &x.wave)?,
    ])
}

/// Symmetrized cross term of two stream vectors.
fn cross_vector(x: &VectorParts, y: &VectorParts) -> Result<TensorField> {
    let half = |a: TensorField, b: TensorField| a.lincomb(0.5, &b, 0.5);
    sum(&[
        &half(dot(&x.v, &y.v)?, dot(&y.v, &x.v)?)?,
        &half(mul(&x.div, &y.div)?, mul(&y.div, &x.div)?)?,
        &half(dot(&x.wave, &y.wave)?, dot(&y.wave, &x.wave)?)?,
    ])
}

/// Self term of an antisymmetric tensor with its dual.
fn self_tensor(t: &TensorParts) -> Result<TensorField> {
    let half = |a: TensorField, b: TensorField| a.lincomb(0.5, &b, 0.5);
    sum(&[
        &ddot(&t.t, &t.t)?,
        &ddot(&t.dual, &t.dual)?,
        &half(ddot(&t.t, &t.dual)?, ddot(&t.dual, &t.t)?)?,
        &dot(&t.div_first, &t.div_first)?,
        &dot(&t.dual_div_first, &t.dual_div_first)?,
        &dot(&t.dual_div_first, &t.div_first)?.scale(0.5),
        &dot(&t.div_first, &t.dual_div_first)?.scale(0.5),
    ])
}

/// Vector/tensor interaction, every line carrying the multiplier `k`.
/// The dual divergences contracted with the vector appear only when
/// `with_dual_divergence` is set.
fn vector_tensor(
    x: &VectorParts,
    t: &TensorParts,
    k: &TensorField,
    with_dual_divergence: bool,
) -> Result<TensorField> {
    let sym = |a: &TensorField, b: &TensorField| -> Result<TensorField> {
        dot(a, b)?.lincomb(0.5, &dot(b, a)?, 0.5)
    };
    let mut lines = vec![
        sandwich(&x.v, &t.t, &x.v)?.add(&sandwich(&x.v, &t.dual, &x.v)?)?,
        sym(&t.div_first, &x.v)?,
        sym(&t.div_second, &x.v)?,
    ];
    if with_dual_divergence {
        lines.push(sym(&t.dual_div_first, &x.v)?);
        lines.push(sym(&t.dual_div_second, &x.v)?);
    }
    lines.push(sandwich(&x.wave, &t.t, &x.wave)?);
    lines.push(sandwich(&x.wave, &t.dual, &x.wave)?);
    lines.push(dot(&t.dual_div_first, &t.div_first)?.scale(0.5));
    lines.push(dot(&t.dual_div_second, &t.div_first)?.scale(0.5));
    let refs: Vec<&TensorField> = lines.iter().collect();
    mul(k, &sum(&refs)?)
}

/// Cross term of two antisymmetric tensors and their duals.
fn cross_tensor(a: &TensorParts, b: &TensorParts) -> Result<TensorField> {
    let sym = |x: &TensorField, y: &TensorField| -> Result<TensorField> {
        ddot(x, y)?.lincomb(0.5, &ddot(y, x)?, 0.5)
    };
    sum(&[
        &sym(&a.t, &b.t)?,
        &sym(&a.dual, &b.dual)?,
        &sym(&a.dual, &b.t)?,
        &sym(&a.t, &b.dual)?,
    ])
}

/// Evaluates every context-emotion term and their pointwise sum.
pub fn context_emotion(
    pair: &TextPair,
    streams: &StreamSet,
    psi0: &TensorField,
    consts: &InfoConstants,
) -> Result<(PsiTerms, TensorField)> {
    if streams.text.lattice() != pair.lattice() || psi0.lattice() != pair.lattice() {
        return Err(Error::shape("context_emotion", "streams built on a different lattice"));
    }
    let l = consts.lambda_c;
    let i = VectorParts::new(&streams.text, l)?;
    let b = VectorParts::new(&streams.context, l)?;
    let j = TensorParts::new(&streams.text_tensor, &streams.text_tensor_dual, l)?;
    let h = TensorParts::new(&streams.context_tensor, &streams.context_tensor_dual, l)?;

    let terms = PsiTerms {
        psi_0: psi0.clone(),
        psi_i: self_vector(&i)?,
        psi_b: self_vector(&b)?,
        psi_j: self_tensor(&j)?,
        psi_h: self_tensor(&h)?,
        psi_ib: cross_vector(&i, &b)?,
        psi_ij: vector_tensor(&i, &j, &streams.k_text, true)?,
        psi_bj: vector_tensor(&b, &j, &streams.k_context, true)?,
        psi_ih: vector_tensor(&i, &h, &streams.k_text, false)?,
        psi_bh: vector_tensor(&b, &h, &streams.k_context, false)?,
        psi_jh: cross_tensor(&j, &h)?,
    };
    let all: Vec<&TensorField> = terms.entries().iter().map(|(_, f)| *f).collect();
    let psi = sum(&all)?;
    Ok((terms, psi))
}
