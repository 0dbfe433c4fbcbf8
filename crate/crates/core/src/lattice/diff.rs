//! Finite-difference operators.
//!
//! Interior sites use second-order central differences. Boundary sites use
//! second-order one-sided stencils, so every site gets a value but only
//! interior sites carry the clean O(h^2) error constant. Stencils are
//! written in difference form so constants differentiate to exactly zero.

use rayon::prelude::*;

use super::{component_count, component_indices, component_offset, TensorField, Variance};
use crate::error::{Error, Result};
use crate::kinematics::METRIC;

#[derive(Clone, Copy)]
enum Order {
    First,
    Second,
}

/// Applies a 1D stencil along `axis` to every component.
fn stencil(field: &TensorField, axis: usize, order: Order) -> TensorField {
    let lat = *field.lattice();
    let nc = field.components_per_site();
    let n = lat.extents()[axis];
    let h = lat.spacing()[axis];
    let step = lat.strides()[axis] * nc;
    let src = field.data();
    let mut out = vec![0.0; src.len()];
    out.par_chunks_mut(nc).enumerate().for_each(|(site, dst)| {
        let i = lat.coords(site)[axis];
        let base = site * nc;
        let at = |k: isize, c: usize| src[(base as isize + k * step as isize) as usize + c];
        for (c, v) in dst.iter_mut().enumerate() {
            *v = match order {
                Order::First => {
                    if i == 0 {
                        (3.0 * (at(1, c) - at(0, c)) - (at(2, c) - at(1, c))) / (2.0 * h)
                    } else if i == n - 1 {
                        (3.0 * (at(0, c) - at(-1, c)) - (at(-1, c) - at(-2, c))) / (2.0 * h)
                    } else {
                        (at(1, c) - at(-1, c)) / (2.0 * h)
                    }
                }
                Order::Second => {
                    let h2 = h * h;
                    if i == 0 {
                        if n >= 4 {
                            (2.0 * (at(0, c) - at(1, c)) - 3.0 * (at(1, c) - at(2, c)) + (at(2, c) - at(3, c))) / h2
                        } else {
                            ((at(2, c) - at(1, c)) - (at(1, c) - at(0, c))) / h2
                        }
                    } else if i == n - 1 {
                        if n >= 4 {
                            (2.0 * (at(0, c) - at(-1, c)) - 3.0 * (at(-1, c) - at(-2, c)) + (at(-2, c) - at(-3, c))) / h2
                        } else {
                            ((at(0, c) - at(-1, c)) - (at(-1, c) - at(-2, c))) / h2
                        }
                    } else {
                        ((at(1, c) - at(0, c)) - (at(0, c) - at(-1, c))) / h2
                    }
                }
            };
        }
    });
    TensorField::from_parts(lat, field.variance().to_vec(), out)
}

/// Coordinate derivative `d_axis` of every component.
pub fn partial(field: &TensorField, axis: usize) -> TensorField {
    assert!(axis < 4, "axis out of range");
    stencil(field, axis, Order::First)
}

/// Second coordinate derivative `d_axis d_axis` of every component.
pub fn second_partial(field: &TensorField, axis: usize) -> TensorField {
    assert!(axis < 4, "axis out of range");
    stencil(field, axis, Order::Second)
}

/// Where the new derivative slot goes in a gradient-type result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeSlot {
    First,
    #[default]
    Last,
    /// Zero-based position among the `rank + 1` output slots.
    At(usize),
}

impl DerivativeSlot {
    fn position(self, rank: usize) -> Result<usize> {
        match self {
            DerivativeSlot::First => Ok(0),
            DerivativeSlot::Last => Ok(rank),
            DerivativeSlot::At(k) if k <= rank => Ok(k),
            DerivativeSlot::At(k) => Err(Error::Rank {
                op: "gradient",
                msg: format!("derivative slot {k} out of range for output rank {}", rank + 1),
            }),
        }
    }
}

/// Stacks four same-shaped fields into one with a new covariant slot.
fn stack(parts: [TensorField; 4], slot: usize) -> TensorField {
    let lat = *parts[0].lattice();
    let rank = parts[0].rank();
    let nc_in = component_count(rank);
    let nc_out = component_count(rank + 1);
    let mut variance = parts[0].variance().to_vec();
    variance.insert(slot, Variance::Co);
    // output component -> (axis, input component)
    let map: Vec<(usize, usize)> = (0..nc_out)
        .map(|c| {
            let mut idx = component_indices(c, rank + 1);
            let axis = idx.remove(slot);
            (axis, component_offset(&idx))
        })
        .collect();
    let mut data = vec![0.0; lat.sites() * nc_out];
    data.par_chunks_mut(nc_out).enumerate().for_each(|(site, out)| {
        for (v, &(axis, ci)) in out.iter_mut().zip(&map) {
            *v = parts[axis].data()[site * nc_in + ci];
        }
    });
    TensorField::from_parts(lat, variance, data)
}

/// Coordinate gradient `d_nu T` with `nu` inserted as a covariant slot.
pub fn gradient(field: &TensorField, slot: DerivativeSlot) -> Result<TensorField> {
    let pos = slot.position(field.rank())?;
    let parts = [0, 1, 2, 3].map(|a| partial(field, a));
    Ok(stack(parts, pos))
}

/// Tensor heterogeneity `T_{;nu} = (1/2) lambda_c d_nu T`.
pub fn heterogeneity(field: &TensorField, lambda_c: f64, slot: DerivativeSlot) -> Result<TensorField> {
    Ok(gradient(field, slot)?.scale(0.5 * lambda_c))
}

/// Same as [`heterogeneity`] with the derivative at zero-based slot `k`.
pub fn heterogeneity_at(field: &TensorField, lambda_c: f64, k: usize) -> Result<TensorField> {
    heterogeneity(field, lambda_c, DerivativeSlot::At(k))
}

/// `scale * d_a F^{..a..}` contracted on `slot`.
///
/// A covariant slot is contracted against `d^a = g^{aa} d_a`. Pass
/// `scale = lambda_c` for the dimensionless form.
pub fn four_divergence(field: &TensorField, slot: usize, scale: f64) -> Result<TensorField> {
    let rank = field.rank();
    if rank == 0 {
        return Err(Error::Rank {
            op: "four_divergence",
            msg: "divergence of a scalar field".into(),
        });
    }
    if slot >= rank {
        return Err(Error::Rank {
            op: "four_divergence",
            msg: format!("slot {slot} out of range for rank {rank}"),
        });
    }
    let lat = *field.lattice();
    let nc_in = component_count(rank);
    let nc_out = component_count(rank - 1);
    let sign_of = |a: usize| match field.variance()[slot] {
        Variance::Contra => 1.0,
        Variance::Co => METRIC[a],
    };
    let mut variance = field.variance().to_vec();
    variance.remove(slot);
    let mut data = vec![0.0; lat.sites() * nc_out];
    for a in 0..4 {
        let d = partial(field, a);
        let w = scale * sign_of(a);
        // result component -> input component with index `a` in `slot`
        let map: Vec<usize> = (0..nc_out)
            .map(|c| {
                let mut idx = component_indices(c, rank - 1);
                idx.insert(slot, a);
                component_offset(&idx)
            })
            .collect();
        data.par_chunks_mut(nc_out).enumerate().for_each(|(site, out)| {
            let src = &d.data()[site * nc_in..(site + 1) * nc_in];
            for (v, &ci) in out.iter_mut().zip(&map) {
                *v += w * src[ci];
            }
        });
    }
    Ok(TensorField::from_parts(lat, variance, data))
}

/// `lambda_c^2 (d_0^2 - d_1^2 - d_2^2 - d_3^2)` applied componentwise.
pub fn dalembertian(field: &TensorField, lambda_c: f64) -> TensorField {
    let l2 = lambda_c * lambda_c;
    let mut acc = second_partial(field, 0);
    for a in 1..4 {
        let d = second_partial(field, a);
        acc.data_mut()
            .par_iter_mut()
            .zip(d.data().par_iter())
            .for_each(|(x, y)| *x -= y);
    }
    acc.scale(l2)
}

/// `G^{ab} = d^a A^b - d^b A^a` from a rank-1 potential.
///
/// A covariant input is raised first. The lower triangle is written as the
/// exact negation of the upper one, so the result is antisymmetric to the bit.
pub fn field_tensor(potential: &TensorField) -> Result<TensorField> {
    if potential.rank() != 1 {
        return Err(Error::Rank {
            op: "field_tensor",
            msg: format!("expected a rank-1 potential, got rank {}", potential.rank()),
        });
    }
    let a = potential.to_contravariant();
    let lat = *a.lattice();
    // d^alpha A^beta, indexed [alpha] -> field of A^beta components
    let grads: Vec<TensorField> = (0..4).map(|al| partial(&a, al).scale(METRIC[al])).collect();
    let mut data = vec![0.0; lat.sites() * 16];
    data.par_chunks_mut(16).enumerate().for_each(|(site, g)| {
        for al in 0..4 {
            for be in al + 1..4 {
                let v = grads[al].data()[site * 4 + be] - grads[be].data()[site * 4 + al];
                g[4 * al + be] = v;
                g[4 * be + al] = -v;
            }
        }
    });
    Ok(TensorField::from_parts(lat, vec![Variance::Contra; 2], data))
}
