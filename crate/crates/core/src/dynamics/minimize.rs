use serde::{Deserialize, Serialize};

use super::action::{action, action_gradient, require_distinct, Lagrangian};
use super::path::Path4;
use crate::constants::InfoConstants;
use crate::error::{Error, Result};
use crate::kinematics::FourVector;

/// Which node coordinates the minimizer moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NodeFreedom {
    /// Interior nodes keep their time coordinate; only spatial parts move.
    /// Removes the reparametrization zero mode.
    #[default]
    Spatial,
    /// All four coordinates of interior nodes move.
    All,
}

/// Gradient descent settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MinimizeOptions {
    /// Stop when the interior gradient max-norm is at most `tol`.
    pub tol: f64,
    pub max_iters: usize,
    /// Step tried on the first iteration.
    pub initial_step: f64,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo: f64,
    /// Backtracking factor.
    pub shrink: f64,
    pub max_backtracks: usize,
    /// Number of recent action values the sufficient-decrease test
    /// compares against; 1 gives the monotone Armijo rule.
    pub memory: usize,
    /// Transverse bump applied to the straight initial path, relative to
    /// the chord length.
    pub perturbation: f64,
    pub freedom: NodeFreedom,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            tol: 1e-8,
            max_iters: 20_000,
            initial_step: 1.0,
            armijo: 1e-4,
            shrink: 0.5,
            max_backtracks: 60,
            memory: 10,
            perturbation: 0.0,
            freedom: NodeFreedom::Spatial,
        }
    }
}

impl MinimizeOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = self.tol > 0.0
            && self.initial_step > 0.0
            && self.armijo > 0.0
            && self.armijo < 1.0
            && self.shrink > 0.0
            && self.shrink < 1.0
            && self.memory >= 1
            && self.perturbation.is_finite();
        if !ok {
            return Err(Error::invalid("MinimizeOptions", "settings out of range"));
        }
        Ok(())
    }
}

/// Result of a converged minimization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinimizeOutcome {
    pub path: Path4,
    pub action: f64,
    pub initial_action: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    pub tol: f64,
    pub max_iters: usize,
    /// Action after each accepted step, starting with the initial path.
    pub trace: Vec<f64>,
}

fn interior_grad<L: Lagrangian + ?Sized>(
    path: &Path4,
    l: &L,
    freedom: NodeFreedom,
    consts: &InfoConstants,
) -> Result<Vec<FourVector>> {
    let mut g = action_gradient(path, l, consts)?;
    let n = g.len();
    g[0] = FourVector::ZERO;
    g[n - 1] = FourVector::ZERO;
    if freedom == NodeFreedom::Spatial {
        for v in &mut g {
            v[0] = 0.0;
        }
    }
    Ok(g)
}

fn max_norm(g: &[FourVector]) -> f64 {
    g.iter().flat_map(|v| v.0).fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[FourVector], b: &[FourVector]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (0..4).map(|i| x[i] * y[i]).sum::<f64>()).sum()
}

/// Straight chord with a transverse sine bump of relative size `amp`.
pub fn initial_path(a: FourVector, b: FourVector, segments: usize, amp: f64) -> Result<Path4> {
    let chord = Path4::straight(a, b, segments)?;
    if amp == 0.0 {
        return Ok(chord);
    }
    let d = b - a;
    let len = d.euclidean_norm();
    let axis = (1..4)
        .min_by(|&i, &j| d[i].abs().total_cmp(&d[j].abs()))
        .unwrap_or(1);
    let mut e = FourVector::ZERO;
    e[axis] = 1.0;
    let e = e - d * (d[axis] / (len * len));
    let e = e * (1.0 / e.euclidean_norm());
    let m = segments as f64;
    let nodes = chord
        .nodes()
        .iter()
        .enumerate()
        .map(|(k, x)| *x + e * (amp * len * (std::f64::consts::PI * k as f64 / m).sin()))
        .collect::<Vec<_>>();
    let mut nodes = nodes;
    nodes[segments] = b;
    let path = Path4::new(nodes)?;
    path.check_timelike("initial_path")?;
    Ok(path)
}

/// Minimizes the discrete action over interior nodes, starting from a
/// straight chord of `segments` pieces bumped by `opts.perturbation`.
pub fn minimize_action<L: Lagrangian + ?Sized>(
    a: FourVector,
    b: FourVector,
    lagrangian: &L,
    segments: usize,
    opts: &MinimizeOptions,
    consts: &InfoConstants,
) -> Result<MinimizeOutcome> {
    require_distinct(&a, &b, "minimize_action")?;
    if segments < 2 {
        return Err(Error::invalid("minimize_action", "need at least 2 segments"));
    }
    if !((b - a).interval() > 0.0 && b[0] > a[0]) {
        return Err(Error::NonTimelikePath {
            op: "minimize_action",
            segment: 0,
            interval: (b - a).interval(),
        });
    }
    let start = initial_path(a, b, segments, opts.perturbation)?;
    minimize_action_from(start, lagrangian, opts, consts)
}

/// Gradient descent with Barzilai-Borwein trial steps and nonmonotone
/// Armijo backtracking. Endpoints stay fixed.
pub fn minimize_action_from<L: Lagrangian + ?Sized>(
    start: Path4,
    lagrangian: &L,
    opts: &MinimizeOptions,
    consts: &InfoConstants,
) -> Result<MinimizeOutcome> {
    opts.validate()?;
    let mut path = start;
    let mut s = action(&path, lagrangian, consts)?;
    let initial_action = s;
    let mut g = interior_grad(&path, lagrangian, opts.freedom, consts)?;
    let mut trace = vec![s];
    let mut step = opts.initial_step;
    let mut iterations = 0;

    loop {
        let gn = max_norm(&g);
        if gn <= opts.tol {
            return Ok(MinimizeOutcome {
                path,
                action: s,
                initial_action,
                iterations,
                grad_norm: gn,
                tol: opts.tol,
                max_iters: opts.max_iters,
                trace,
            });
        }
        if iterations >= opts.max_iters {
            return Err(Error::Convergence {
                iterations,
                grad_norm: gn,
                best_action: s,
                best_path: Box::new(path),
            });
        }

        let g2 = dot(&g, &g);
        // rounding allowance on the action comparison near the optimum
        let slack = 16.0 * f64::EPSILON * s.abs().max(1.0);
        let reference = trace.iter().rev().take(opts.memory).fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        let mut alpha = step;
        let mut accepted = None;
        for _ in 0..=opts.max_backtracks {
            let nodes: Vec<FourVector> = path.nodes().iter().zip(&g).map(|(x, d)| *x - *d * alpha).collect();
            if let Ok(trial) = Path4::new(nodes) {
                if trial.check_timelike("minimize_action").is_ok() {
                    let st = action(&trial, lagrangian, consts)?;
                    if st <= reference - opts.armijo * alpha * g2 + slack {
                        accepted = Some((trial, st));
                        break;
                    }
                }
            }
            alpha *= opts.shrink;
        }
        let Some((next, s_next)) = accepted else {
            return Err(Error::Convergence {
                iterations,
                grad_norm: gn,
                best_action: s,
                best_path: Box::new(path),
            });
        };

        let g_next = interior_grad(&next, lagrangian, opts.freedom, consts)?;
        let ds: Vec<FourVector> = next.nodes().iter().zip(path.nodes()).map(|(x, y)| *x - *y).collect();
        let dg: Vec<FourVector> = g_next.iter().zip(&g).map(|(x, y)| *x - *y).collect();
        let sy = dot(&ds, &dg);
        step = if sy > 0.0 { dot(&ds, &ds) / sy } else { opts.initial_step };

        path = next;
        s = s_next;
        g = g_next;
        trace.push(s);
        iterations += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{FreeLagrangian, InteractionLagrangian, InteractionParams, PotentialSpec};

    const K: InfoConstants = InfoConstants::NATURAL;

    #[test]
    fn free_minimizer_recovers_chord() {
        let a = FourVector::ZERO;
        let b = FourVector::new(10.0, 3.0, 0.0, 0.0);
        let opts = MinimizeOptions {
            perturbation: 0.05,
            ..Default::default()
        };
        let free = FreeLagrangian { gie: 1.0 };
        let out = minimize_action(a, b, &free, 8, &opts, &K).unwrap();
        assert!(out.grad_norm <= opts.tol);
        assert!(out.action <= out.initial_action);
        assert!(out.initial_action > -(91f64.sqrt()) + 1e-3);
        assert!((out.action + 91f64.sqrt()).abs() < 1e-12);
        assert!(out.path.chord_deviation() <= 1e-6 * (b - a).euclidean_norm());
        assert_eq!(out.trace.len(), out.iterations + 1);
    }

    #[test]
    fn free_minimizer_with_all_coordinates() {
        let a = FourVector::ZERO;
        let b = FourVector::new(10.0, 3.0, 0.0, 0.0);
        let opts = MinimizeOptions {
            perturbation: 0.05,
            freedom: NodeFreedom::All,
            ..Default::default()
        };
        let out = minimize_action(a, b, &FreeLagrangian { gie: 1.0 }, 8, &opts, &K).unwrap();
        assert!(out.grad_norm <= opts.tol);
        assert!((out.action + 91f64.sqrt()).abs() < 1e-12);
        assert!(out.path.chord_deviation() <= 1e-6 * (b - a).euclidean_norm());
    }

    #[test]
    fn deterministic() {
        let a = FourVector::ZERO;
        let b = FourVector::new(6.0, 1.0, 1.0, 0.0);
        let opts = MinimizeOptions {
            perturbation: 0.1,
            ..Default::default()
        };
        let free = FreeLagrangian { gie: 2.0 };
        let x = minimize_action(a, b, &free, 5, &opts, &K).unwrap();
        let y = minimize_action(a, b, &free, 5, &opts, &K).unwrap();
        assert_eq!(x.path, y.path);
        assert_eq!(x.trace, y.trace);
    }

    #[test]
    fn rejects_degenerate_endpoints() {
        let a = FourVector::new(1.0, 0.0, 0.0, 0.0);
        let free = FreeLagrangian { gie: 1.0 };
        let opts = MinimizeOptions::default();
        assert!(matches!(minimize_action(a, a, &free, 4, &opts, &K), Err(Error::Degenerate { .. })));
        let spacelike = FourVector::new(1.0, 5.0, 0.0, 0.0);
        assert!(matches!(
            minimize_action(a, spacelike, &free, 4, &opts, &K),
            Err(Error::NonTimelikePath { .. })
        ));
    }

    #[test]
    fn iteration_cap_reports_best_path() {
        let opts = MinimizeOptions {
            perturbation: 0.1,
            max_iters: 1,
            ..Default::default()
        };
        let r = minimize_action(FourVector::ZERO, FourVector::new(10.0, 3.0, 0.0, 0.0), &FreeLagrangian { gie: 1.0 }, 6, &opts, &K);
        match r {
            Err(Error::Convergence { iterations, best_path, .. }) => {
                assert_eq!(iterations, 1);
                assert_eq!(best_path.segments(), 6);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn weak_interaction_converges() {
        let params = InteractionParams {
            q1: 1.0,
            q2: 1e-3,
            beta1: [0.0; 3],
            beta2: [0.0; 3],
        };
        let spec = PotentialSpec {
            source: crate::dynamics::PotentialSource::Pair { q1: 1.0, q2: 1e-3 },
            direction: FourVector::new(1.0, 0.0, 0.0, 0.0),
            regularizer: 0.0,
        };
        let mut l = InteractionLagrangian::new(params, spec);
        l.source = FourVector::new(-4.0, 0.0, 0.0, 0.0);
        let a = FourVector::ZERO;
        let b = FourVector::new(10.0, 3.0, 0.0, 0.0);
        let straight = action(&Path4::straight(a, b, 8).unwrap(), &l, &K).unwrap();
        let out = minimize_action(a, b, &l, 8, &MinimizeOptions::default(), &K).unwrap();
        assert!(out.grad_norm <= 1e-8);
        assert!(out.action <= straight);
    }
}
