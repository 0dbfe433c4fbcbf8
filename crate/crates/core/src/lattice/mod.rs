//! Dense rank-m tensor fields on a uniform 4D lattice.
//!
//! Storage is site-major: all `4^m` components of a site are contiguous,
//! and the component index tuple `(i_1, ..., i_m)` is read as a big-endian
//! base-4 number. Sites are ordered with axis 0 slowest.

mod diff;
mod io;
mod levi_civita;

pub use diff::{
    dalembertian, field_tensor, four_divergence, gradient, heterogeneity, heterogeneity_at,
    partial, second_partial, DerivativeSlot,
};
pub use io::{component_label, read_field, write_csv, write_field, FieldFormat, FieldHeader};
pub use levi_civita::{dual_tensor, LeviCivita};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::FourVector;

/// Hard ceiling on stored tensor rank (4^8 components per site).
pub const MAX_STORED_RANK: usize = 8;

/// Uniform 4D lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice4 {
    extents: [usize; 4],
    spacing: [f64; 4],
    origin: FourVector,
}

impl Lattice4 {
    pub fn new(extents: [usize; 4], spacing: [f64; 4], origin: FourVector) -> Result<Self> {
        if let Some(a) = extents.iter().position(|&n| n < 3) {
            return Err(Error::invalid(
                "Lattice4::new",
                format!("axis {a} has {} points; at least 3 are required", extents[a]),
            ));
        }
        if let Some(a) = spacing.iter().position(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::invalid(
                "Lattice4::new",
                format!("axis {a} spacing {} must be positive", spacing[a]),
            ));
        }
        if !origin.is_finite() {
            return Err(Error::invalid("Lattice4::new", "non-finite origin"));
        }
        Ok(Lattice4 {
            extents,
            spacing,
            origin,
        })
    }

    /// `n^4` points with spacing `h`, origin at zero.
    pub fn cube(n: usize, h: f64) -> Result<Self> {
        Self::new([n; 4], [h; 4], FourVector::ZERO)
    }

    /// `n^4` points spanning `[lo, hi]` on every axis, endpoints included.
    pub fn spanning(n: usize, lo: f64, hi: f64) -> Result<Self> {
        let h = (hi - lo) / (n as f64 - 1.0);
        Self::new([n; 4], [h; 4], FourVector([lo; 4]))
    }

    pub fn extents(&self) -> [usize; 4] {
        self.extents
    }

    pub fn spacing(&self) -> [f64; 4] {
        self.spacing
    }

    pub fn origin(&self) -> FourVector {
        self.origin
    }

    pub fn sites(&self) -> usize {
        self.extents.iter().product()
    }

    /// Site stride of each axis.
    pub fn strides(&self) -> [usize; 4] {
        let e = self.extents;
        [e[1] * e[2] * e[3], e[2] * e[3], e[3], 1]
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn index(&self, coords: [usize; 4]) -> usize {
        let s = self.strides();
        (0..4).map(|a| coords[a] * s[a]).sum()
    }

    pub fn coords(&self, site: usize) -> [usize; 4] {
        let s = self.strides();
        let mut rem = site;
        std::array::from_fn(|a| {
            let c = rem / s[a];
            rem %= s[a];
            c
        })
    }

    pub fn position(&self, site: usize) -> FourVector {
        let c = self.coords(site);
        FourVector(std::array::from_fn(|a| {
            self.origin.0[a] + c[a] as f64 * self.spacing[a]
        }))
    }

    /// True when the site is at least `depth` points away from every face.
    pub fn is_interior(&self, site: usize, depth: usize) -> bool {
        let c = self.coords(site);
        (0..4).all(|a| c[a] >= depth && c[a] + depth < self.extents[a])
    }

    pub(crate) fn same_as(&self, other: &Lattice4) -> bool {
        self.extents == other.extents
            && self.spacing == other.spacing
            && self.origin == other.origin
    }
}

/// Index position of a tensor slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Contra,
    Co,
}

impl Variance {
    pub fn flipped(self) -> Self {
        match self {
            Variance::Contra => Variance::Co,
            Variance::Co => Variance::Contra,
        }
    }
}

/// Number of components of a rank-`m` tensor.
pub fn component_count(rank: usize) -> usize {
    1 << (2 * rank)
}

/// Index tuple of component `comp` of a rank-`rank` tensor.
pub fn component_indices(comp: usize, rank: usize) -> Vec<usize> {
    (0..rank)
        .map(|k| (comp >> (2 * (rank - 1 - k))) & 3)
        .collect()
}

/// Component offset of an index tuple.
pub fn component_offset(indices: &[usize]) -> usize {
    indices.iter().fold(0, |acc, &i| (acc << 2) | i)
}

/// A tensor field sampled on a [`Lattice4`].
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    lattice: Lattice4,
    variance: Vec<Variance>,
    data: Vec<f64>,
}

impl TensorField {
    pub fn from_data(lattice: Lattice4, variance: Vec<Variance>, data: Vec<f64>) -> Result<Self> {
        let rank = variance.len();
        if rank > MAX_STORED_RANK {
            return Err(Error::Rank {
                op: "TensorField",
                msg: format!("rank {rank} exceeds the storage ceiling {MAX_STORED_RANK}"),
            });
        }
        let expected = lattice.sites() * component_count(rank);
        if data.len() != expected {
            return Err(Error::shape(
                "TensorField",
                format!("data length {} != sites * 4^rank = {expected}", data.len()),
            ));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("TensorField", "non-finite component"));
        }
        Ok(TensorField {
            lattice,
            variance,
            data,
        })
    }

    pub(crate) fn from_parts(lattice: Lattice4, variance: Vec<Variance>, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), lattice.sites() * component_count(variance.len()));
        TensorField {
            lattice,
            variance,
            data,
        }
    }

    pub fn zeros(lattice: Lattice4, variance: Vec<Variance>) -> Self {
        let n = lattice.sites() * component_count(variance.len());
        Self::from_parts(lattice, variance, vec![0.0; n])
    }

    /// Fully contravariant field of the given rank.
    pub fn contravariant_zeros(lattice: Lattice4, rank: usize) -> Self {
        Self::zeros(lattice, vec![Variance::Contra; rank])
    }

    pub fn scalar_constant(lattice: Lattice4, value: f64) -> Self {
        Self::from_parts(lattice, vec![], vec![value; lattice.sites()])
    }

    /// Same components at every site.
    pub fn constant(lattice: Lattice4, variance: Vec<Variance>, components: &[f64]) -> Result<Self> {
        let nc = component_count(variance.len());
        if components.len() != nc {
            return Err(Error::shape(
                "TensorField::constant",
                format!("{} components given, 4^rank = {nc}", components.len()),
            ));
        }
        let data = components.repeat(lattice.sites());
        Self::from_data(lattice, variance, data)
    }

    /// Builds a field from `f(position, component_indices)`.
    pub fn from_fn<F>(lattice: Lattice4, variance: Vec<Variance>, f: F) -> Self
    where
        F: Fn(&FourVector, &[usize]) -> f64 + Sync,
    {
        let rank = variance.len();
        let nc = component_count(rank);
        let idx: Vec<Vec<usize>> = (0..nc).map(|c| component_indices(c, rank)).collect();
        let mut data = vec![0.0; lattice.sites() * nc];
        data.par_chunks_mut(nc).enumerate().for_each(|(site, out)| {
            let x = lattice.position(site);
            for (c, v) in out.iter_mut().enumerate() {
                *v = f(&x, &idx[c]);
            }
        });
        Self::from_parts(lattice, variance, data)
    }

    pub fn lattice(&self) -> &Lattice4 {
        &self.lattice
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn components_per_site(&self) -> usize {
        component_count(self.rank())
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn site(&self, site: usize) -> &[f64] {
        let nc = self.components_per_site();
        &self.data[site * nc..(site + 1) * nc]
    }

    pub fn get(&self, site: usize, indices: &[usize]) -> f64 {
        self.site(site)[component_offset(indices)]
    }

    /// Scalar-field value at a site.
    pub fn value(&self, site: usize) -> f64 {
        debug_assert_eq!(self.rank(), 0);
        self.data[site]
    }

    pub fn scale(&self, a: f64) -> TensorField {
        self.map(|v| a * v)
    }

    pub fn map<F: Fn(f64) -> f64 + Sync>(&self, f: F) -> TensorField {
        let data = self.data.par_iter().map(|&v| f(v)).collect();
        Self::from_parts(self.lattice, self.variance.clone(), data)
    }

    fn check_compatible(&self, other: &TensorField, op: &'static str) -> Result<()> {
        if !self.lattice.same_as(&other.lattice) {
            return Err(Error::shape(op, "fields live on different lattices"));
        }
        if self.variance != other.variance {
            return Err(Error::shape(
                op,
                format!("variance {:?} vs {:?}", self.variance, other.variance),
            ));
        }
        Ok(())
    }

    /// Componentwise `f(self, other)`.
    pub fn zip_map<F: Fn(f64, f64) -> f64 + Sync>(
        &self,
        other: &TensorField,
        f: F,
    ) -> Result<TensorField> {
        self.check_compatible(other, "zip_map")?;
        let data = self
            .data
            .par_iter()
            .zip(other.data.par_iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self::from_parts(self.lattice, self.variance.clone(), data))
    }

    pub fn add(&self, other: &TensorField) -> Result<TensorField> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &TensorField) -> Result<TensorField> {
        self.zip_map(other, |a, b| a - b)
    }

    /// `a * self + b * other`.
    pub fn lincomb(&self, a: f64, other: &TensorField, b: f64) -> Result<TensorField> {
        self.zip_map(other, |x, y| a * x + b * y)
    }

    /// Multiplies every component by a scalar field.
    pub fn mul_scalar_field(&self, s: &TensorField) -> Result<TensorField> {
        if s.rank() != 0 || !self.lattice.same_as(&s.lattice) {
            return Err(Error::shape("mul_scalar_field", "expected a scalar field on the same lattice"));
        }
        let nc = self.components_per_site();
        let mut data = self.data.clone();
        data.par_chunks_mut(nc)
            .zip(s.data.par_iter())
            .for_each(|(out, &w)| out.iter_mut().for_each(|v| *v *= w));
        Ok(Self::from_parts(self.lattice, self.variance.clone(), data))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Max |component| over sites at least `depth` points from the boundary.
    pub fn max_abs_interior(&self, depth: usize) -> f64 {
        let nc = self.components_per_site();
        (0..self.lattice.sites())
            .into_par_iter()
            .filter(|&s| self.lattice.is_interior(s, depth))
            .map(|s| self.data[s * nc..(s + 1) * nc].iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .reduce(|| 0.0, f64::max)
    }

    /// Scalar field holding one component.
    pub fn component(&self, indices: &[usize]) -> TensorField {
        let nc = self.components_per_site();
        let off = component_offset(indices);
        let data = (0..self.lattice.sites()).map(|s| self.data[s * nc + off]).collect();
        Self::from_parts(self.lattice, vec![], data)
    }

    /// Max `|F^{ab} + F^{ba}|` for a rank-2 field.
    pub fn antisymmetry_defect(&self) -> f64 {
        assert_eq!(self.rank(), 2, "antisymmetry_defect needs rank 2");
        let mut dev = 0.0f64;
        for site in self.data.chunks(16) {
            for a in 0..4 {
                for b in a..4 {
                    dev = dev.max((site[4 * a + b] + site[4 * b + a]).abs());
                }
            }
        }
        dev
    }

    /// Returns a copy with every slot contravariant.
    pub fn to_contravariant(&self) -> TensorField {
        let mut f = self.clone();
        for slot in 0..self.rank() {
            if f.variance[slot] == Variance::Co {
                f = raise_lower(&f, slot).expect("slot in range");
            }
        }
        f
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

/// Summary statistics of a scalar field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Discrete L2 norm, `sqrt(sum v^2 * cell_volume)`.
    pub l2: f64,
}

impl FieldStats {
    /// Statistics over every stored component. Sums use the fixed
    /// reduction tree so the result does not depend on thread count.
    pub fn of(field: &TensorField) -> FieldStats {
        let d = field.data();
        let (min, max) = d
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let mean = crate::reduce::sum(d) / d.len() as f64;
        let sq = crate::reduce::sum_map(d.len(), |i| d[i] * d[i]);
        FieldStats {
            min,
            max,
            mean,
            l2: (sq * field.lattice().cell_volume()).sqrt(),
        }
    }
}

/// Applies `Lambda` to every slot of a field: `T'^{a..} = Lambda^a_b ... T^{b..}`.
///
/// Covariant slots are raised first, so the result is fully contravariant.
/// Only the components change; the lattice is not moved.
pub fn transform_components(field: &TensorField, map: &crate::kinematics::LorentzMap) -> TensorField {
    let lam = map.lambda();
    let mut f = field.to_contravariant();
    let rank = f.rank();
    let nc = component_count(rank);
    for slot in 0..rank {
        let shift = 2 * (rank - 1 - slot);
        let mut data = vec![0.0; f.data.len()];
        data.par_chunks_mut(nc)
            .zip(f.data.par_chunks(nc))
            .for_each(|(out, src)| {
                for c in 0..nc {
                    let a = (c >> shift) & 3;
                    let base = c & !(3 << shift);
                    out[c] = (0..4).map(|b| lam[a][b] * src[base | (b << shift)]).sum();
                }
            });
        f.data = data;
    }
    f
}

/// Flips the variance of one slot by applying the diagonal metric.
pub fn raise_lower(field: &TensorField, slot: usize) -> Result<TensorField> {
    let rank = field.rank();
    if slot >= rank {
        return Err(Error::Rank {
            op: "raise_lower",
            msg: format!("slot {slot} out of range for rank {rank}"),
        });
    }
    let nc = component_count(rank);
    let shift = 2 * (rank - 1 - slot);
    let signs: Vec<f64> = (0..nc)
        .map(|c| if (c >> shift) & 3 == 0 { 1.0 } else { -1.0 })
        .collect();
    let mut data = field.data.clone();
    data.par_chunks_mut(nc).for_each(|site| {
        for (v, s) in site.iter_mut().zip(&signs) {
            *v *= s;
        }
    });
    let mut variance = field.variance.clone();
    variance[slot] = variance[slot].flipped();
    Ok(TensorField::from_parts(field.lattice, variance, data))
}

/// Pointwise Einstein contraction over the listed `(slot_a, slot_b)` pairs.
///
/// Free slots of `a` come first in the result, then free slots of `b`.
pub fn contract(a: &TensorField, b: &TensorField, pairing: &[(usize, usize)]) -> Result<TensorField> {
    const OP: &str = "contract";
    if !a.lattice.same_as(&b.lattice) {
        return Err(Error::shape(OP, "fields live on different lattices"));
    }
    let (ra, rb) = (a.rank(), b.rank());
    let mut used_a = vec![false; ra];
    let mut used_b = vec![false; rb];
    for &(sa, sb) in pairing {
        if sa >= ra || sb >= rb {
            return Err(Error::Rank {
                op: OP,
                msg: format!("pair ({sa}, {sb}) out of range for ranks ({ra}, {rb})"),
            });
        }
        if used_a[sa] || used_b[sb] {
            return Err(Error::Rank {
                op: OP,
                msg: format!("slot repeated in pairing ({sa}, {sb})"),
            });
        }
        used_a[sa] = true;
        used_b[sb] = true;
        if a.variance[sa] == b.variance[sb] {
            return Err(Error::Variance {
                op: OP,
                slot_a: sa,
                slot_b: sb,
            });
        }
    }
    let free_a: Vec<usize> = (0..ra).filter(|&s| !used_a[s]).collect();
    let free_b: Vec<usize> = (0..rb).filter(|&s| !used_b[s]).collect();
    let variance: Vec<Variance> = free_a
        .iter()
        .map(|&s| a.variance[s])
        .chain(free_b.iter().map(|&s| b.variance[s]))
        .collect();
    let rr = variance.len();
    let p = pairing.len();
    let nc_r = component_count(rr);

    // Precompute (offset_a, offset_b) lists for every result component.
    let mut plan: Vec<Vec<(usize, usize)>> = Vec::with_capacity(nc_r);
    let mut ia = vec![0usize; ra];
    let mut ib = vec![0usize; rb];
    for rc in 0..nc_r {
        let ridx = component_indices(rc, rr);
        for (k, &s) in free_a.iter().enumerate() {
            ia[s] = ridx[k];
        }
        for (k, &s) in free_b.iter().enumerate() {
            ib[s] = ridx[free_a.len() + k];
        }
        let mut terms = Vec::with_capacity(1 << (2 * p));
        for dummy in 0..component_count(p) {
            let didx = component_indices(dummy, p);
            for (k, &(sa, sb)) in pairing.iter().enumerate() {
                ia[sa] = didx[k];
                ib[sb] = didx[k];
            }
            terms.push((component_offset(&ia), component_offset(&ib)));
        }
        plan.push(terms);
    }

    let (nca, ncb) = (a.components_per_site(), b.components_per_site());
    let mut data = vec![0.0; a.lattice.sites() * nc_r];
    data.par_chunks_mut(nc_r).enumerate().for_each(|(site, out)| {
        let sa = &a.data[site * nca..(site + 1) * nca];
        let sb = &b.data[site * ncb..(site + 1) * ncb];
        for (v, terms) in out.iter_mut().zip(&plan) {
            *v = terms.iter().map(|&(oa, ob)| sa[oa] * sb[ob]).sum();
        }
    });
    Ok(TensorField::from_parts(a.lattice, variance, data))
}

/// Full metric contraction of two fields of equal rank and equal variance
/// pattern: `A^{a..} B^{b..} g_{ab} ...`, or the analogue for any
/// variance mix.
pub fn full_contraction(a: &TensorField, b: &TensorField) -> Result<TensorField> {
    if a.rank() != b.rank() {
        return Err(Error::shape(
            "full_contraction",
            format!("ranks {} and {}", a.rank(), b.rank()),
        ));
    }
    let mut bl = b.clone();
    for slot in 0..b.rank() {
        if bl.variance[slot] == a.variance[slot] {
            bl = raise_lower(&bl, slot)?;
        }
    }
    let pairing: Vec<(usize, usize)> = (0..a.rank()).map(|s| (s, s)).collect();
    contract(a, &bl, &pairing)
}
