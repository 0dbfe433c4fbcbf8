//! Pointwise Minkowski products on lattice fields.
//!
//! Vector and rank-2 arguments are expected fully contravariant; every
//! product lowers the second factor through the metric.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kinematics::METRIC;
use crate::lattice::{dalembertian, four_divergence, gradient, DerivativeSlot, TensorField, Variance};

fn expect(field: &TensorField, rank: usize, op: &'static str) -> Result<()> {
    if field.rank() != rank || field.variance().iter().any(|v| *v != Variance::Contra) {
        return Err(Error::shape(
            op,
            format!("expected a contravariant rank-{rank} field, got {:?}", field.variance()),
        ));
    }
    Ok(())
}

fn pointwise<const A: usize, const B: usize>(
    a: &TensorField,
    b: &TensorField,
    op: &'static str,
    f: impl Fn(&[f64], &[f64]) -> f64 + Sync,
) -> Result<TensorField> {
    if a.lattice() != b.lattice() {
        return Err(Error::shape(op, "fields live on different lattices"));
    }
    let data = a
        .data()
        .par_chunks(A)
        .zip(b.data().par_chunks(B))
        .map(|(x, y)| f(x, y))
        .collect();
    Ok(TensorField::from_parts(*a.lattice(), vec![], data))
}

/// `u^a w_a`.
pub fn dot(u: &TensorField, w: &TensorField) -> Result<TensorField> {
    expect(u, 1, "dot")?;
    expect(w, 1, "dot")?;
    pointwise::<4, 4>(u, w, "dot", |x, y| (0..4).map(|a| METRIC[a] * x[a] * y[a]).sum())
}

/// `X^{ab} Y_{ab}`.
pub fn ddot(x: &TensorField, y: &TensorField) -> Result<TensorField> {
    expect(x, 2, "ddot")?;
    expect(y, 2, "ddot")?;
    pointwise::<16, 16>(x, y, "ddot", |p, q| {
        let mut s = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                s += METRIC[a] * METRIC[b] * p[4 * a + b] * q[4 * a + b];
            }
        }
        s
    })
}

/// `u_a M^{ab} w_b`.
pub fn sandwich(u: &TensorField, m: &TensorField, w: &TensorField) -> Result<TensorField> {
    expect(u, 1, "sandwich")?;
    expect(m, 2, "sandwich")?;
    expect(w, 1, "sandwich")?;
    let uw: Vec<f64> = u
        .data()
        .par_chunks(4)
        .zip(w.data().par_chunks(4))
        .flat_map_iter(|(x, y)| {
            let mut out = [0.0; 16];
            for a in 0..4 {
                for b in 0..4 {
                    out[4 * a + b] = METRIC[a] * x[a] * METRIC[b] * y[b];
                }
            }
            out
        })
        .collect();
    let uw = TensorField::from_parts(*u.lattice(), vec![Variance::Contra; 2], uw);
    pointwise::<16, 16>(m, &uw, "sandwich", |p, q| p.iter().zip(q).map(|(a, b)| a * b).sum())
}

/// Pointwise product of two scalar fields.
pub fn mul(a: &TensorField, b: &TensorField) -> Result<TensorField> {
    a.zip_map(b, |x, y| x * y)
}

/// Sum of same-shaped fields.
pub fn sum(fields: &[&TensorField]) -> Result<TensorField> {
    let (first, rest) = fields
        .split_first()
        .ok_or_else(|| Error::invalid("sum", "no fields to add"))?;
    rest.iter().try_fold((*first).clone(), |acc, f| acc.add(f))
}

/// `lambda_c d^a s` of a scalar field, contravariant.
pub fn scaled_gradient(s: &TensorField, lambda_c: f64) -> Result<TensorField> {
    Ok(gradient(s, DerivativeSlot::Last)?.to_contravariant().scale(lambda_c))
}

/// `lambda_c d_a X^a`.
pub fn divergence(x: &TensorField, lambda_c: f64) -> Result<TensorField> {
    four_divergence(x, 0, lambda_c)
}

/// `lambda_c d_b X^{b s}` (`slot = 0`) or `lambda_c d_b X^{s b}` (`slot = 1`).
pub fn tensor_divergence(x: &TensorField, slot: usize, lambda_c: f64) -> Result<TensorField> {
    four_divergence(x, slot, lambda_c)
}

/// `lambda_c^2 box X`.
pub fn wave(x: &TensorField, lambda_c: f64) -> TensorField {
    dalembertian(x, lambda_c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice4;

    fn lat() -> Lattice4 {
        Lattice4::cube(3, 1.0).unwrap()
    }

    fn vec_field(c: [f64; 4]) -> TensorField {
        TensorField::constant(lat(), vec![Variance::Contra], &c).unwrap()
    }

    #[test]
    fn dot_and_sandwich_signs() {
        let u = vec_field([1.0, 2.0, 0.0, 0.0]);
        let w = vec_field([3.0, 1.0, 0.0, 0.0]);
        assert_eq!(dot(&u, &w).unwrap().value(0), 1.0);
        let mut m = [0.0; 16];
        m[1] = 1.0; // M^{01}
        let m = TensorField::constant(lat(), vec![Variance::Contra; 2], &m).unwrap();
        // u_0 M^{01} w_1 = 1 * 1 * (-1)
        assert_eq!(sandwich(&u, &m, &w).unwrap().value(0), -1.0);
        assert_eq!(ddot(&m, &m).unwrap().value(0), -1.0);
    }

    #[test]
    fn rejects_covariant_arguments() {
        let u = vec_field([1.0, 0.0, 0.0, 0.0]);
        let l = crate::lattice::raise_lower(&u, 0).unwrap();
        assert!(dot(&u, &l).is_err());
    }
}
