//! Transition amplitudes as midpoint-rule momentum integrals, their
//! normalization over a finite end-point domain, probability densities
//! and mean displacements.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::constants::InfoConstants;
use crate::dynamics::{combine_gie, interaction_factor_f, InteractionParams, PotentialSpec};
use crate::error::{Error, Result};
use crate::kinematics::{mean_speed_sq_from_beta, quantize_displacement, FourVector, QuantizedDisplacement, METRIC};
use crate::lattice::{partial, Lattice4, TensorField};
use crate::reduce;

/// Region of momentum space kept by the cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CutoffShape {
    /// `|p^a| <= P_a` on every axis.
    #[default]
    Box,
    /// `sum_a (p^a / P_a)^2 <= 1`.
    Ball,
}

/// Uniform midpoint grid over `[-P_a, P_a]` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumGrid {
    pub cutoff: [f64; 4],
    pub points: [usize; 4],
    #[serde(default)]
    pub shape: CutoffShape,
}

impl MomentumGrid {
    pub fn boxed(cutoff: [f64; 4], points: [usize; 4]) -> Result<Self> {
        let g = MomentumGrid {
            cutoff,
            points,
            shape: CutoffShape::Box,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(a) = self.points.iter().position(|&n| n < 2) {
            return Err(Error::invalid("MomentumGrid", format!("axis {a} needs at least 2 points")));
        }
        if let Some(a) = self.cutoff.iter().position(|&p| !(p > 0.0 && p.is_finite())) {
            return Err(Error::invalid("MomentumGrid", format!("axis {a} cutoff must be positive and finite")));
        }
        Ok(())
    }

    /// `d^4p / (8 pi^4)`.
    pub fn measure_factor() -> f64 {
        let p2 = PI * PI;
        1.0 / (8.0 * p2 * p2)
    }

    pub fn step(&self, axis: usize) -> f64 {
        2.0 * self.cutoff[axis] / self.points[axis] as f64
    }

    pub fn node(&self, axis: usize, j: usize) -> f64 {
        -self.cutoff[axis] + (j as f64 + 0.5) * self.step(axis)
    }

    pub fn cell_volume(&self) -> f64 {
        (0..4).map(|a| self.step(a)).product()
    }

    /// Largest phase change between neighbouring grid points for a
    /// displacement `dx`.
    pub fn phase_step(&self, dx: &FourVector, consts: &InfoConstants) -> f64 {
        (0..4)
            .map(|a| self.step(a) * dx[a].abs() / consts.hbar_c)
            .fold(0.0, f64::max)
    }

    /// Fails when neighbouring samples differ in phase by more than pi.
    pub fn check_sampling(&self, dx: &FourVector, consts: &InfoConstants, op: &'static str) -> Result<f64> {
        let step = self.phase_step(dx, consts);
        if !(step <= PI) {
            return Err(Error::Undersampled { op, phase_step: step });
        }
        Ok(step)
    }

    /// `sum_p exp(-i p_a y^a / hbar) dp / (8 pi^4)` without normalization.
    pub fn sum(&self, y: &FourVector, consts: &InfoConstants) -> Complex64 {
        let hbar = consts.hbar_c;
        match self.shape {
            CutoffShape::Box => {
                let mut out = Complex64::new(Self::measure_factor(), 0.0);
                for a in 0..4 {
                    let k = METRIC[a] * y[a] / hbar;
                    let h = self.step(a);
                    let s = reduce::sum_map_complex(self.points[a], |j| Complex64::from_polar(h, -k * self.node(a, j)));
                    out *= s;
                }
                out
            }
            CutoffShape::Ball => {
                let n = self.points;
                let total = n.iter().product();
                let dv = self.cell_volume();
                let s = reduce::sum_map_complex(total, |i| {
                    let idx = [i / (n[1] * n[2] * n[3]), (i / (n[2] * n[3])) % n[1], (i / n[3]) % n[2], i % n[3]];
                    let p: [f64; 4] = std::array::from_fn(|a| self.node(a, idx[a]));
                    let r2: f64 = (0..4).map(|a| (p[a] / self.cutoff[a]).powi(2)).sum();
                    if r2 > 1.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let phase: f64 = (0..4).map(|a| METRIC[a] * p[a] * y[a]).sum::<f64>() / hbar;
                    Complex64::from_polar(dv, -phase)
                });
                s * Self::measure_factor()
            }
        }
    }
}

/// Closed-form box-cutoff integral
/// `prod_a 2 hbar sin(P_a y^a / hbar) / y^a / (8 pi^4)`, `2 P_a` where `y^a = 0`.
pub fn box_closed_form(cutoff: &[f64; 4], y: &FourVector, consts: &InfoConstants) -> f64 {
    let hbar = consts.hbar_c;
    let mut out = MomentumGrid::measure_factor();
    for a in 0..4 {
        out *= if y[a] == 0.0 {
            2.0 * cutoff[a]
        } else {
            2.0 * hbar * (cutoff[a] * y[a] / hbar).sin() / y[a]
        };
    }
    out
}

/// How the potential term of the effective momentum enters the
/// interacting amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PotentialBranch {
    /// Kinetic part only.
    #[default]
    Off,
    /// Potential evaluated once at a fixed event.
    Fixed { at: FourVector },
    /// Potential evaluated at the midpoint of each transfer (experimental).
    PositionDependent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransferKind {
    Free,
    /// The grid samples the dimensionless kinetic variable `w`, mapped to
    /// `P = (Q1 + Q2) nu_c [f w + q12 a / s^2]`.
    Interacting {
        params: InteractionParams,
        potential: PotentialSpec,
        branch: PotentialBranch,
    },
}

/// How the probability density is formed from `Omega`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DensityMode {
    /// `rho = Omega`, normalized so that `sum rho dV = 1`.
    #[default]
    Omega,
    /// Central-difference derivative of `Omega` along the cell diagonal,
    /// divided by the cell volume.
    Derivative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferProblem {
    pub kind: TransferKind,
    pub x_a: FourVector,
    pub x_b: FourVector,
    pub grid: MomentumGrid,
    /// End-point domain used for normalization, densities and means.
    pub end_lattice: Option<Lattice4>,
    /// Velocity that fixes `<v^2>` for displacement quantization.
    pub beta: [f64; 3],
    pub density: DensityMode,
}

impl TransferProblem {
    pub fn free(x_a: FourVector, x_b: FourVector, grid: MomentumGrid) -> Self {
        TransferProblem {
            kind: TransferKind::Free,
            x_a,
            x_b,
            grid,
            end_lattice: None,
            beta: [0.0; 3],
            density: DensityMode::Omega,
        }
    }

    pub fn with_end_lattice(mut self, lattice: Lattice4) -> Self {
        self.end_lattice = Some(lattice);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if !(self.x_a.is_finite() && self.x_b.is_finite()) {
            return Err(Error::invalid("TransferProblem", "non-finite end point"));
        }
        if self.x_a == self.x_b && self.end_lattice.is_none() {
            return Err(Error::invalid("TransferProblem", "x_a = x_b needs an end-point lattice"));
        }
        if let TransferKind::Interacting { params, potential, .. } = &self.kind {
            params.validate()?;
            potential.validate()?;
        }
        Ok(())
    }

    /// Scale from grid variable to momentum, and the momentum shift.
    fn momentum_map(&self, dx: &FourVector, consts: &InfoConstants) -> Result<(f64, FourVector)> {
        match &self.kind {
            TransferKind::Free => Ok((1.0, FourVector::ZERO)),
            TransferKind::Interacting {
                params,
                potential,
                branch,
            } => {
                let total = params.q1 + params.q2;
                let scale = total * consts.nu_c * interaction_factor_f(params, consts)?;
                let at = match branch {
                    PotentialBranch::Off => return Ok((scale, FourVector::ZERO)),
                    PotentialBranch::Fixed { at } => *at,
                    PotentialBranch::PositionDependent => self.x_a + *dx * 0.5,
                };
                let q12 = combine_gie(params)? / consts.q_c;
                if q12 == 0.0 {
                    return Ok((scale, FourVector::ZERO));
                }
                let s2 = at.interval() / (consts.lambda_c * consts.lambda_c) + potential.regularizer;
                if !(s2 > 0.0) {
                    return Err(Error::SingularPotential {
                        op: "amplitude_interacting",
                        value: s2,
                    });
                }
                Ok((scale, potential.direction * (total * consts.nu_c * q12 / s2)))
            }
        }
    }

    /// Phase change per grid cell for the transfer `dx`.
    pub fn phase_step(&self, dx: &FourVector, consts: &InfoConstants) -> Result<f64> {
        let (scale, _) = self.momentum_map(dx, consts)?;
        Ok(self.grid.phase_step(&(*dx * scale), consts))
    }

    /// Amplitude for the displacement `dx` before division by `N`.
    pub fn kernel(&self, dx: &FourVector, consts: &InfoConstants) -> Result<Complex64> {
        let (scale, shift) = self.momentum_map(dx, consts)?;
        let y = *dx * scale;
        self.grid.check_sampling(&y, consts, "amplitude")?;
        let s2 = scale * scale;
        let base = self.grid.sum(&y, consts) * (s2 * s2);
        if shift == FourVector::ZERO {
            return Ok(base);
        }
        let phase = shift.dot(dx) / consts.hbar_c;
        Ok(base * Complex64::from_polar(1.0, -phase))
    }

    fn n_norm(&self, consts: &InfoConstants) -> Result<f64> {
        match &self.end_lattice {
            Some(lat) => normalize(self, lat, consts),
            None => Ok(1.0),
        }
    }
}

fn amplitude(problem: &TransferProblem, consts: &InfoConstants) -> Result<Complex64> {
    problem.validate()?;
    let k = problem.kernel(&(problem.x_b - problem.x_a), consts)?;
    Ok(k / problem.n_norm(consts)?)
}

/// Free amplitude `K(b, a)`, divided by `N` when an end-point lattice is set.
pub fn amplitude_free(problem: &TransferProblem, consts: &InfoConstants) -> Result<Complex64> {
    if !matches!(problem.kind, TransferKind::Free) {
        return Err(Error::invalid("amplitude_free", "problem is not a free transfer"));
    }
    amplitude(problem, consts)
}

/// Interacting amplitude over the effective-momentum grid.
pub fn amplitude_interacting(problem: &TransferProblem, consts: &InfoConstants) -> Result<Complex64> {
    if !matches!(problem.kind, TransferKind::Interacting { .. }) {
        return Err(Error::invalid("amplitude_interacting", "problem is not an interacting transfer"));
    }
    amplitude(problem, consts)
}

/// `N` with `sum_k |K_k / N|^2 dV = 1`.
pub fn normalization_constant(values: &[Complex64], cell_volume: f64) -> Result<f64> {
    let total = reduce::sum_map(values.len(), |i| values[i].norm_sqr()) * cell_volume;
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Degenerate {
            op: "normalize",
            msg: format!("total |K|^2 over the domain is {total}"),
        });
    }
    Ok(total.sqrt())
}

fn kernel_over(problem: &TransferProblem, domain: &Lattice4, consts: &InfoConstants) -> Result<Vec<Complex64>> {
    (0..domain.sites())
        .into_par_iter()
        .map(|s| problem.kernel(&(domain.position(s) - problem.x_a), consts))
        .collect()
}

/// Normalization over a finite end-point domain.
pub fn normalize(problem: &TransferProblem, domain: &Lattice4, consts: &InfoConstants) -> Result<f64> {
    problem.grid.validate()?;
    normalization_constant(&kernel_over(problem, domain, consts)?, domain.cell_volume())
}

/// `Omega = |K|^2`.
pub fn probability(k: Complex64) -> f64 {
    k.norm_sqr()
}

/// Probability density over the end-point lattice.
pub fn probability_density(
    problem: &TransferProblem,
    end_lattice: &Lattice4,
    consts: &InfoConstants,
) -> Result<TensorField> {
    problem.grid.validate()?;
    let k = kernel_over(problem, end_lattice, consts)?;
    let n = normalization_constant(&k, end_lattice.cell_volume())?;
    let omega: Vec<f64> = k.iter().map(|z| probability(z / n)).collect();
    let omega = TensorField::from_data(*end_lattice, vec![], omega)?;
    match problem.density {
        DensityMode::Omega => Ok(omega),
        DensityMode::Derivative => {
            let h = end_lattice.spacing();
            let mut rho = TensorField::scalar_constant(*end_lattice, 0.0);
            for (a, &ha) in h.iter().enumerate() {
                rho = rho.lincomb(1.0, &partial(&omega, a), ha)?;
            }
            Ok(rho.scale(1.0 / end_lattice.cell_volume()))
        }
    }
}

/// `sum (x - x_a) rho dV`.
pub fn mean_from_density(rho: &TensorField, x_a: &FourVector) -> Result<FourVector> {
    if rho.rank() != 0 {
        return Err(Error::shape("mean_displacement", "density must be a scalar field"));
    }
    let lat = rho.lattice();
    let dv = lat.cell_volume();
    let mut out = FourVector::ZERO;
    for a in 0..4 {
        out[a] = reduce::sum_map(lat.sites(), |s| (lat.position(s)[a] - x_a[a]) * rho.value(s)) * dv;
    }
    Ok(out)
}

/// Mean displacement and its quantized form.
pub fn mean_displacement(
    problem: &TransferProblem,
    end_lattice: &Lattice4,
    consts: &InfoConstants,
) -> Result<(FourVector, QuantizedDisplacement)> {
    let rho = probability_density(problem, end_lattice, consts)?;
    let mean = mean_from_density(&rho, &problem.x_a)?;
    let v2 = mean_speed_sq_from_beta(problem.beta, consts)?;
    Ok((mean, quantize_displacement(&mean, v2, consts)?))
}

#[derive(Debug, Clone)]
pub struct TransferResult {
    pub k: Complex64,
    pub omega: f64,
    pub n_norm: f64,
    pub rho: TensorField,
    pub mean_disp: FourVector,
    pub quantized: QuantizedDisplacement,
    /// Phase change per grid cell at `x_b - x_a`.
    pub phase_step: f64,
    /// `sum rho dV`.
    pub total_probability: f64,
}

/// Amplitude at `x_b`, density and mean displacement over the end-point
/// lattice.
pub fn solve_transfer(problem: &TransferProblem, consts: &InfoConstants) -> Result<TransferResult> {
    problem.validate()?;
    let lat = problem
        .end_lattice
        .ok_or_else(|| Error::invalid("solve_transfer", "an end-point lattice is required"))?;
    let dx = problem.x_b - problem.x_a;
    let phase_step = problem.phase_step(&dx, consts)?;
    let n_norm = normalize(problem, &lat, consts)?;
    let k = problem.kernel(&dx, consts)? / n_norm;
    let rho = probability_density(problem, &lat, consts)?;
    let mean_disp = mean_from_density(&rho, &problem.x_a)?;
    let v2 = mean_speed_sq_from_beta(problem.beta, consts)?;
    let quantized = quantize_displacement(&mean_disp, v2, consts)?;
    let total_probability = reduce::sum(rho.data()) * lat.cell_volume();
    Ok(TransferResult {
        k,
        omega: probability(k),
        n_norm,
        rho,
        mean_disp,
        quantized,
        phase_step,
        total_probability,
    })
}
