//! Generalized information emotion of a text/perception tensor pair.
//!
//! The pipeline runs text emotion `mu`, then the text and context streams
//! `I`, `B` with their field tensors `J`, `H`, then the context emotion
//! `psi` (eleven named terms) and the implied sense `gamma` (four terms).
//! The scalar `q = mu + gamma + psi` is checked against `|q| <= 1` and
//! scaled to `Q = Q_c n q`.

pub mod algebra;
mod context;
mod sense;

pub use context::{context_emotion, PsiTerms};
pub use sense::{implied_sense, GammaTerms};

use serde::Serialize;

use crate::constants::InfoConstants;
use crate::error::{Error, Result};
use crate::lattice::{
    contract, dual_tensor, field_tensor, full_contraction, heterogeneity, raise_lower, DerivativeSlot,
    FieldStats, Lattice4, TensorField,
};

/// Reference value of `q` for a true statement.
pub const LOGIC_TRUE: f64 = 1.0;
/// Reference value of `q` for a false statement.
pub const LOGIC_FALSE: f64 = -1.0;
/// Reference value of `q` for an uncertain statement.
pub const LOGIC_UNCERTAIN: f64 = 0.0;

/// Largest tensor rank accepted by [`TextPair::new`].
pub const DEFAULT_MAX_RANK: usize = 4;

/// Text tensor, perception tensor and elementary-volume count on one lattice.
#[derive(Debug, Clone)]
pub struct TextPair {
    text: TensorField,
    perception: TensorField,
    volumes: TensorField,
}

impl TextPair {
    pub fn new(text: TensorField, perception: TensorField, volumes: TensorField) -> Result<Self> {
        Self::with_rank_cap(text, perception, volumes, DEFAULT_MAX_RANK)
    }

    pub fn with_rank_cap(
        text: TensorField,
        perception: TensorField,
        volumes: TensorField,
        max_rank: usize,
    ) -> Result<Self> {
        const OP: &str = "TextPair";
        if text.rank() != perception.rank() {
            return Err(Error::shape(
                OP,
                format!("text rank {} != perception rank {}", text.rank(), perception.rank()),
            ));
        }
        if text.rank() == 0 {
            return Err(Error::Rank {
                op: OP,
                msg: "text and perception tensors need rank >= 1".into(),
            });
        }
        if text.rank() > max_rank {
            return Err(Error::Rank {
                op: OP,
                msg: format!("rank {} exceeds the configured cap {max_rank}", text.rank()),
            });
        }
        if volumes.rank() != 0 {
            return Err(Error::shape(OP, "volume count must be a scalar field"));
        }
        if text.lattice() != perception.lattice() || text.lattice() != volumes.lattice() {
            return Err(Error::shape(OP, "text, perception and volume count must share a lattice"));
        }
        if let Some(site) = volumes.data().iter().position(|&n| n < 1.0 || n.fract() != 0.0) {
            return Err(Error::invalid(
                OP,
                format!("volume count {} at site {site} is not a positive integer", volumes.data()[site]),
            ));
        }
        Ok(TextPair {
            text: text.to_contravariant(),
            perception: perception.to_contravariant(),
            volumes,
        })
    }

    /// Pair with `n = 1` everywhere.
    pub fn unit_volumes(text: TensorField, perception: TensorField) -> Result<Self> {
        let n = TensorField::scalar_constant(*text.lattice(), 1.0);
        Self::new(text, perception, n)
    }

    pub fn text(&self) -> &TensorField {
        &self.text
    }

    pub fn perception(&self) -> &TensorField {
        &self.perception
    }

    pub fn volumes(&self) -> &TensorField {
        &self.volumes
    }

    pub fn rank(&self) -> usize {
        self.text.rank()
    }

    pub fn lattice(&self) -> &Lattice4 {
        self.text.lattice()
    }

    /// Same pair with text and perception exchanged.
    pub fn swapped(&self) -> TextPair {
        TextPair {
            text: self.perception.clone(),
            perception: self.text.clone(),
            volumes: self.volumes.clone(),
        }
    }

    /// `2^-(2m+1) / (n Q_c)` at every site.
    pub fn prefactor(&self, consts: &InfoConstants) -> TensorField {
        let c = 0.5f64.powi(2 * self.rank() as i32 + 1) / consts.q_c;
        self.volumes.map(|n| c / n)
    }
}

/// `mu = c_m [D^A T_A + T_A D^A]`.
pub fn text_emotion(pair: &TextPair, consts: &InfoConstants) -> Result<TensorField> {
    let dt = full_contraction(pair.perception(), pair.text())?;
    let td = full_contraction(pair.text(), pair.perception())?;
    dt.add(&td)?.zip_map(&pair.prefactor(consts), |s, c| s * c)
}

/// Stream of `het(a)` against `b`, summed over the slot carrying the
/// derivative and over both written orderings, then raised.
fn stream(a: &TensorField, b: &TensorField, pre: &TensorField, lambda_c: f64) -> Result<TensorField> {
    let m = a.rank();
    let mut b_low = b.clone();
    for slot in 0..m {
        b_low = raise_lower(&b_low, slot)?;
    }
    let mut acc: Option<TensorField> = None;
    for k in 0..m {
        let het = heterogeneity(a, lambda_c, DerivativeSlot::At(k))?;
        // original slots of `het` skip position k
        let pairing: Vec<(usize, usize)> = (0..m)
            .map(|s| (if s < k { s } else { s + 1 }, s))
            .collect();
        let ab = contract(&het, &b_low, &pairing)?;
        let ba = contract(&b_low, &het, &pairing.iter().map(|&(x, y)| (y, x)).collect::<Vec<_>>())?;
        let term = ab.add(&ba)?;
        acc = Some(match acc {
            None => term,
            Some(s) => s.add(&term)?,
        });
    }
    let covariant = acc.expect("rank >= 1");
    raise_lower(&covariant, 0)?.mul_scalar_field(pre)
}

/// Text stream `I^nu`.
pub fn text_stream(pair: &TextPair, consts: &InfoConstants) -> Result<TensorField> {
    stream(pair.text(), pair.perception(), &pair.prefactor(consts), consts.lambda_c)
}

/// Context stream `B^nu`: the text stream with the roles of the tensors exchanged.
pub fn context_stream(pair: &TextPair, consts: &InfoConstants) -> Result<TensorField> {
    text_stream(&pair.swapped(), consts)
}

/// `psi_0`: heterogeneities of text and perception contracted over all slots.
pub fn psi_base(pair: &TextPair, consts: &InfoConstants) -> Result<TensorField> {
    let m = pair.rank();
    let mut acc = TensorField::scalar_constant(*pair.lattice(), 0.0);
    for k in 0..m {
        let ht = heterogeneity(pair.text(), consts.lambda_c, DerivativeSlot::At(k))?;
        let hd = heterogeneity(pair.perception(), consts.lambda_c, DerivativeSlot::At(k))?;
        acc = acc.add(&full_contraction(&ht, &hd)?)?;
        acc = acc.add(&full_contraction(&hd, &ht)?)?;
    }
    acc.zip_map(&pair.prefactor(consts), |s, c| s * c)
}

/// Streams, their field tensors and duals, and the `k` multipliers.
#[derive(Debug, Clone)]
pub struct StreamSet {
    pub text: TensorField,
    pub context: TensorField,
    pub text_tensor: TensorField,
    pub text_tensor_dual: TensorField,
    pub context_tensor: TensorField,
    pub context_tensor_dual: TensorField,
    pub k_text: TensorField,
    pub k_context: TensorField,
}

/// `k = 1 + X.X + lambda d.X + (box X).(box X) + (lambda d.X)^2`.
fn multiplier(x: &TensorField, lambda_c: f64) -> Result<TensorField> {
    let xx = algebra::dot(x, x)?;
    let div = algebra::divergence(x, lambda_c)?;
    let w = algebra::wave(x, lambda_c);
    let ww = algebra::dot(&w, &w)?;
    let div2 = algebra::mul(&div, &div)?;
    Ok(algebra::sum(&[&xx, &div, &ww, &div2])?.map(|v| 1.0 + v))
}

pub fn build_streamset(pair: &TextPair, consts: &InfoConstants) -> Result<StreamSet> {
    let l = consts.lambda_c;
    let text = text_stream(pair, consts)?;
    let context = context_stream(pair, consts)?;
    let text_tensor = field_tensor(&text)?.scale(l);
    let context_tensor = field_tensor(&context)?.scale(l);
    Ok(StreamSet {
        text_tensor_dual: dual_tensor(&text_tensor)?,
        context_tensor_dual: dual_tensor(&context_tensor)?,
        k_text: multiplier(&text, l)?,
        k_context: multiplier(&context, l)?,
        text,
        context,
        text_tensor,
        context_tensor,
    })
}

/// Full pipeline output.
#[derive(Debug, Clone)]
pub struct EmotionBreakdown {
    pub mu: TensorField,
    pub psi_terms: PsiTerms,
    pub psi: TensorField,
    pub gamma_terms: GammaTerms,
    pub gamma: TensorField,
    pub q: TensorField,
    /// `Q = Q_c n q`.
    pub gie: TensorField,
    /// Sites where `|q| > 1`.
    pub violations: Vec<usize>,
}

impl EmotionBreakdown {
    pub fn bound_ok(&self) -> bool {
        self.violations.is_empty()
    }

    /// Named scalar fields in report order.
    pub fn named_fields(&self) -> Vec<(&'static str, &TensorField)> {
        let mut out = vec![("mu", &self.mu)];
        out.extend(self.psi_terms.entries());
        out.push(("psi", &self.psi));
        out.extend(self.gamma_terms.entries());
        out.extend([("gamma", &self.gamma), ("q", &self.q), ("Q", &self.gie)]);
        out
    }

    pub fn summary(&self) -> EmotionSummary {
        let lat = self.q.lattice();
        EmotionSummary {
            stats: self
                .named_fields()
                .into_iter()
                .map(|(k, f)| (k.to_string(), FieldStats::of(f)))
                .collect(),
            bound_ok: self.bound_ok(),
            violations: self
                .violations
                .iter()
                .map(|&s| BoundViolation {
                    site: s,
                    position: lat.position(s).0,
                    q: self.q.value(s),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundViolation {
    pub site: usize,
    pub position: [f64; 4],
    pub q: f64,
}

/// Serializable digest of an [`EmotionBreakdown`].
#[derive(Debug, Clone, Serialize)]
pub struct EmotionSummary {
    pub stats: std::collections::BTreeMap<String, FieldStats>,
    pub bound_ok: bool,
    pub violations: Vec<BoundViolation>,
}

/// Runs `mu -> streams -> psi -> gamma -> q -> Q`. Sites with `|q| > 1`
/// are listed in `violations`; values are never clamped.
pub fn assemble_gie(pair: &TextPair, consts: &InfoConstants) -> Result<EmotionBreakdown> {
    let mu = text_emotion(pair, consts)?;
    let streams = build_streamset(pair, consts)?;
    let psi0 = psi_base(pair, consts)?;
    let (psi_terms, psi) = context_emotion(pair, &streams, &psi0, consts)?;
    let (gamma_terms, gamma) = implied_sense(&mu, &psi, &streams, pair.lattice(), consts)?;
    let q = algebra::sum(&[&mu, &gamma, &psi])?;
    let gie = q.zip_map(pair.volumes(), |q, n| consts.q_c * n * q)?;
    let violations = q
        .data()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > 1.0)
        .map(|(s, _)| s)
        .collect();
    Ok(EmotionBreakdown {
        mu,
        psi_terms,
        psi,
        gamma_terms,
        gamma,
        q,
        gie,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Variance;

    fn lat() -> Lattice4 {
        Lattice4::spanning(5, -1.0, 1.0).unwrap()
    }

    fn constant(c: [f64; 4]) -> TensorField {
        TensorField::constant(lat(), vec![Variance::Contra], &c).unwrap()
    }

    fn linear_x1() -> TensorField {
        TensorField::from_fn(lat(), vec![Variance::Contra], |x, i| if i[0] == 0 { x[1] } else { 0.0 })
    }

    const K: InfoConstants = InfoConstants::NATURAL;

    #[test]
    fn text_emotion_examples() {
        let p = TextPair::unit_volumes(constant([1., 0., 0., 0.]), constant([1., 0., 0., 0.])).unwrap();
        assert!(text_emotion(&p, &K).unwrap().data().iter().all(|&v| v == 0.25));
        let p = TextPair::unit_volumes(constant([0., 1., 0., 0.]), constant([0., 1., 0., 0.])).unwrap();
        assert!(text_emotion(&p, &K).unwrap().data().iter().all(|&v| v == -0.25));
        let p = TextPair::unit_volumes(constant([0.; 4]), constant([0., 1., 0., 0.])).unwrap();
        assert_eq!(text_emotion(&p, &K).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn pair_validation() {
        let r2 = TensorField::contravariant_zeros(lat(), 2);
        assert!(matches!(
            TextPair::unit_volumes(constant([1.; 4]), r2),
            Err(Error::Shape { .. })
        ));
        let n = TensorField::scalar_constant(lat(), 0.5);
        assert!(TextPair::new(constant([1.; 4]), constant([1.; 4]), n).is_err());
        let r3 = TensorField::contravariant_zeros(lat(), 3);
        assert!(TextPair::with_rank_cap(r3.clone(), r3, TensorField::scalar_constant(lat(), 1.0), 2).is_err());
    }

    #[test]
    fn stream_of_linear_text() {
        let p = TextPair::unit_volumes(linear_x1(), constant([1., 0., 0., 0.])).unwrap();
        let i = text_stream(&p, &K).unwrap();
        for s in 0..lat().sites() {
            // 2^-3 * (1/2) * 2, lowered-to-raised sign of the spatial slot
            assert!((i.get(s, &[1]) + 0.125).abs() < 1e-14);
            for a in [0, 2, 3] {
                assert_eq!(i.get(s, &[a]), 0.0);
            }
        }
        let mirrored = TextPair::unit_volumes(constant([1., 0., 0., 0.]), linear_x1()).unwrap();
        assert_eq!(context_stream(&mirrored, &K).unwrap(), i);
    }

    #[test]
    fn psi_base_of_linear_pair() {
        let p = TextPair::unit_volumes(linear_x1(), linear_x1()).unwrap();
        let psi0 = psi_base(&p, &K).unwrap();
        assert!(psi0.data().iter().all(|v| (v + 1.0 / 16.0).abs() < 1e-14));
        let scaled = TextPair::unit_volumes(linear_x1().scale(2.0), linear_x1().scale(-3.0)).unwrap();
        let s = psi_base(&scaled, &K).unwrap();
        for (a, b) in s.data().iter().zip(psi0.data()) {
            assert!((a + 6.0 * b).abs() < 1e-14);
        }
    }

    #[test]
    fn uniform_streams_are_trivial() {
        let p = TextPair::unit_volumes(constant([1., 2., 0., -1.]), constant([0.5, 0., 1., 0.])).unwrap();
        let s = build_streamset(&p, &K).unwrap();
        for f in [&s.text, &s.context, &s.text_tensor, &s.context_tensor] {
            assert_eq!(f.max_abs(), 0.0);
        }
        assert!(s.k_text.data().iter().all(|&v| v == 1.0));
        assert!(s.k_context.data().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn linear_text_gives_vanishing_field_tensor() {
        let p = TextPair::unit_volumes(linear_x1(), constant([1., 0., 0., 0.])).unwrap();
        let s = build_streamset(&p, &K).unwrap();
        assert!(s.text_tensor.max_abs() < 1e-14);
        assert_eq!(s.text_tensor.antisymmetry_defect(), 0.0);
    }

    #[test]
    fn assembly_examples() {
        let p = TextPair::unit_volumes(constant([1., 0., 0., 0.]), constant([1., 0., 0., 0.])).unwrap();
        let b = assemble_gie(&p, &K).unwrap();
        assert!(b.q.data().iter().all(|&v| v == 0.25));
        assert!(b.gie.data().iter().all(|&v| v == 0.25));
        assert!(b.bound_ok());

        let p = TextPair::unit_volumes(constant([0.; 4]), constant([1., 0., 0., 0.])).unwrap();
        let b = assemble_gie(&p, &K).unwrap();
        assert!(b.q.data().iter().all(|&v| v == LOGIC_UNCERTAIN));

        let p = TextPair::unit_volumes(constant([3., 0., 0., 0.]), constant([3., 0., 0., 0.])).unwrap();
        let b = assemble_gie(&p, &K).unwrap();
        assert!(b.mu.data().iter().all(|&v| v == 2.25));
        assert_eq!(b.violations.len(), lat().sites());
        assert!(!b.summary().bound_ok);
    }

    #[test]
    fn text_emotion_is_boost_invariant_for_constant_tensors() {
        use crate::lattice::transform_components;
        let l = Lattice4::cube(3, 1.0).unwrap();
        let t = TensorField::from_fn(l, vec![Variance::Contra; 2], |_, i| 0.1 * (i[0] as f64) - 0.07 * (i[1] as f64) + 0.2);
        let d = TensorField::from_fn(l, vec![Variance::Contra; 2], |_, i| 0.3 - 0.05 * ((i[0] * i[1]) as f64));
        let base = text_emotion(&TextPair::unit_volumes(t.clone(), d.clone()).unwrap(), &K).unwrap().value(0);
        for beta in [[0.6, 0.0, 0.0], [0.1, -0.4, 0.3], [0.0, 0.0, -0.9]] {
            let map = crate::kinematics::boost_from_beta(beta).unwrap();
            let p = TextPair::unit_volumes(transform_components(&t, &map), transform_components(&d, &map)).unwrap();
            let mu = text_emotion(&p, &K).unwrap().value(0);
            assert!(((mu - base) / base).abs() < 1e-9);
        }
    }
}
