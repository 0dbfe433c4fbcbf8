use rayon::prelude::*;

use super::{TensorField, Variance};
use crate::error::{Error, Result};
use crate::kinematics::METRIC;

/// Totally antisymmetric symbol with `eps^{0123} = +1`.
///
/// Lowering all four indices with the (+,-,-,-) metric gives
/// `eps_{0123} = -1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LeviCivita;

impl LeviCivita {
    /// Contravariant component `eps^{abcd}`.
    pub fn get(a: usize, b: usize, c: usize, d: usize) -> i8 {
        let p = [a, b, c, d];
        if p.iter().any(|&i| i > 3) {
            return 0;
        }
        let mut sign = 1i8;
        for i in 0..4 {
            for j in i + 1..4 {
                match p[i].cmp(&p[j]) {
                    std::cmp::Ordering::Equal => return 0,
                    std::cmp::Ordering::Greater => sign = -sign,
                    std::cmp::Ordering::Less => {}
                }
            }
        }
        sign
    }

    /// Covariant component `eps_{abcd}`.
    pub fn lowered(a: usize, b: usize, c: usize, d: usize) -> i8 {
        -Self::get(a, b, c, d)
    }

    /// The 24 nonzero entries as `([a, b, c, d], sign)`.
    pub fn nonzero() -> Vec<([usize; 4], i8)> {
        let mut out = Vec::with_capacity(24);
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let s = Self::get(a, b, c, d);
                        if s != 0 {
                            out.push(([a, b, c, d], s));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Dual `G~^{ab} = (1/2) eps^{abrs} G_{rs}` of an antisymmetric rank-2 field.
pub fn dual_tensor(g: &TensorField) -> Result<TensorField> {
    if g.rank() != 2 {
        return Err(Error::Rank {
            op: "dual_tensor",
            msg: format!("expected rank 2, got rank {}", g.rank()),
        });
    }
    let g = g.to_contravariant();
    let defect = g.antisymmetry_defect();
    if defect > 1e-12 * g.max_abs().max(1.0) {
        return Err(Error::NotAntisymmetric {
            op: "dual_tensor",
            deviation: defect,
        });
    }
    let eps = LeviCivita::nonzero();
    let lat = *g.lattice();
    let mut data = vec![0.0; lat.sites() * 16];
    data.par_chunks_mut(16)
        .zip(g.data().par_chunks(16))
        .for_each(|(out, gs)| {
            for &([a, b, r, s], sign) in &eps {
                out[4 * a + b] += 0.5 * sign as f64 * METRIC[r] * METRIC[s] * gs[4 * r + s];
            }
        });
    Ok(TensorField::from_parts(lat, vec![Variance::Contra; 2], data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice4;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lat() -> Lattice4 {
        Lattice4::cube(3, 0.5).unwrap()
    }

    #[test]
    fn symbol_properties() {
        assert_eq!(LeviCivita::get(0, 1, 2, 3), 1);
        assert_eq!(LeviCivita::get(1, 0, 2, 3), -1);
        assert_eq!(LeviCivita::get(2, 3, 0, 1), 1);
        assert_eq!(LeviCivita::get(0, 0, 2, 3), 0);
        assert_eq!(LeviCivita::lowered(0, 1, 2, 3), -1);
        let nz = LeviCivita::nonzero();
        assert_eq!(nz.len(), 24);
        for ([a, b, c, d], s) in nz {
            assert_eq!(LeviCivita::get(b, a, c, d), -s);
            assert_eq!(LeviCivita::get(a, c, b, d), -s);
            assert_eq!(LeviCivita::get(a, b, d, c), -s);
        }
    }

    /// Brute force over all 256 index tuples with explicit metric lowering.
    fn dual_oracle(g: &[f64; 16]) -> [f64; 16] {
        let eta = |i: usize, j: usize| if i != j { 0.0 } else if i == 0 { 1.0 } else { -1.0 };
        let mut lower = [0.0; 16];
        for r in 0..4 {
            for s in 0..4 {
                for x in 0..4 {
                    for y in 0..4 {
                        lower[4 * r + s] += eta(r, x) * eta(s, y) * g[4 * x + y];
                    }
                }
            }
        }
        let mut out = [0.0; 16];
        for a in 0..4 {
            for b in 0..4 {
                for r in 0..4 {
                    for s in 0..4 {
                        out[4 * a + b] += 0.5 * LeviCivita::get(a, b, r, s) as f64 * lower[4 * r + s];
                    }
                }
            }
        }
        out
    }

    fn random_antisym(rng: &mut ChaCha8Rng) -> [f64; 16] {
        let mut g = [0.0; 16];
        for a in 0..4 {
            for b in a + 1..4 {
                let v = rng.gen_range(-2.0..2.0);
                g[4 * a + b] = v;
                g[4 * b + a] = -v;
            }
        }
        g
    }

    #[test]
    fn dual_of_unit_01_lands_in_23_block() {
        let mut g = [0.0; 16];
        g[1] = 1.0;
        g[4] = -1.0;
        let f = TensorField::constant(lat(), vec![Variance::Contra; 2], &g).unwrap();
        let d = dual_tensor(&f).unwrap();
        let want = dual_oracle(&g);
        for c in 0..16 {
            assert_eq!(d.site(0)[c], want[c]);
        }
        // G_{01} = -1, so G~^{23} = eps^{2301} G_{01} = -1
        assert_eq!(d.get(0, &[2, 3]), -1.0);
        assert_eq!(d.get(0, &[3, 2]), 1.0);
        let nonzero = d.site(0).iter().filter(|v| **v != 0.0).count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn dual_of_zero_is_zero() {
        let f = TensorField::contravariant_zeros(lat(), 2);
        assert_eq!(dual_tensor(&f).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn double_dual_is_minus_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let g = random_antisym(&mut rng);
            let f = TensorField::constant(lat(), vec![Variance::Contra; 2], &g).unwrap();
            let d = dual_tensor(&f).unwrap();
            let want = dual_oracle(&g);
            for c in 0..16 {
                assert!((d.site(0)[c] - want[c]).abs() < 1e-14);
            }
            let dd = dual_tensor(&d).unwrap();
            for c in 0..16 {
                assert!((dd.site(0)[c] + g[c]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_symmetric_input() {
        let mut g = [0.0; 16];
        g[1] = 1.0;
        g[4] = 1.0;
        let f = TensorField::constant(lat(), vec![Variance::Contra; 2], &g).unwrap();
        assert!(matches!(dual_tensor(&f), Err(Error::NotAntisymmetric { .. })));
    }
}
