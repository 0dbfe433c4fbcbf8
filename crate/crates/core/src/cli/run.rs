use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::scenario::{
    FieldGenerator, InteractionSpec, KinematicsSpec, LagrangianSpec, LoadedScenario, MaxwellSpec, MinimizeSpec,
    Mode, Scenario, TransferSpec,
};
use crate::constants::{binary_exponent_form, derive_constants, InfoConstants, PhysicalConstants, UnitMode};
use crate::dynamics::{
    action, combine_gie, effective_momentum_parts, interaction_factor_f, lagrangian_free, lagrangian_interaction,
    maxwell_residuals, minimize_action, momentum, CurrentDensity, FreeLagrangian, Lagrangian, MinimizeOutcome, Path4,
};
use crate::emotion::{assemble_gie, TextPair};
use crate::error::{Error, Result};
use crate::kinematics::{boost_from_beta, four_velocity, minkowski_dot, poincare_apply, FourVector};
use crate::lattice::{field_tensor, Lattice4, TensorField};
use crate::path_integral::{box_closed_form, solve_transfer, CutoffShape, DensityMode, TransferKind, TransferProblem};

/// A pass/fail check tied to a named invariant.
#[derive(Debug, Clone, Serialize)]
pub struct Gate {
    pub name: String,
    pub invariant: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

impl Gate {
    /// Passes when `value <= threshold`.
    pub fn at_most(name: &str, invariant: &str, value: f64, threshold: f64) -> Self {
        Gate {
            name: name.into(),
            invariant: invariant.into(),
            passed: value <= threshold,
            value,
            threshold,
        }
    }
}

/// Rows of numbers dumped as one CSV file.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario: Scenario,
    pub constants: InfoConstants,
    pub results: Value,
    pub gates: Vec<Gate>,
    pub fields: Vec<(String, TensorField)>,
    pub tables: Vec<Table>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.gates.iter().all(|g| g.passed)
    }

    pub fn failed_gates(&self) -> Vec<&Gate> {
        self.gates.iter().filter(|g| !g.passed).collect()
    }

    /// Report document; wall time is left out so reruns are byte-identical.
    pub fn to_value(&self) -> Result<Value> {
        let constants: serde_json::Map<String, Value> = self
            .constants
            .entries()
            .iter()
            .map(|(k, v)| (k.to_string(), json!({"value": v, "units": self.constants.units(k)})))
            .collect();
        Ok(json!({
            "tool": {"name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION")},
            "scenario": serde_json::to_value(&self.scenario)?,
            "unit_mode": self.constants.unit_mode.to_string(),
            "constants": constants,
            "mode": self.scenario.mode.name(),
            "results": self.results,
            "gates": serde_json::to_value(&self.gates)?,
            "passed": self.passed(),
        }))
    }
}

/// Run settings taken from the command line.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOverrides {
    pub units: Option<UnitMode>,
    pub seed: Option<u64>,
}

/// Executes the scenario's mode and collects its diagnostics.
pub fn run(loaded: &LoadedScenario, overrides: &RunOverrides) -> Result<RunReport> {
    let mut scenario = loaded.scenario.clone();
    if let Some(u) = overrides.units {
        scenario.unit_mode = u;
    }
    if let (Some(seed), Some(k)) = (overrides.seed, scenario.kinematics.as_mut()) {
        k.seed = seed;
    }
    let consts = derive_constants(&PhysicalConstants::CODATA_2002, scenario.unit_mode)?;
    let mut out = Outcome::default();
    let base = loaded.base_dir.as_path();
    let need = |name: &str| Error::Scenario(format!("{name}: required for mode `{}`", scenario.mode.name()));
    match scenario.mode {
        Mode::Constants => run_constants(&consts, &mut out),
        Mode::Kinematics => run_kinematics(scenario.kinematics.as_ref().ok_or_else(|| need("kinematics"))?, &consts, &mut out)?,
        Mode::Emotion => run_emotion(&scenario, base, &consts, &mut out)?,
        Mode::FreeTransfer => {
            let t = scenario.transfer.as_ref().ok_or_else(|| need("transfer"))?;
            run_transfer(t, TransferKind::Free, &consts, &mut out)?
        }
        Mode::Interaction => run_interaction(scenario.interaction.as_ref().ok_or_else(|| need("interaction"))?, &consts, &mut out)?,
        Mode::MinimizeAction => run_minimize(scenario.minimize.as_ref().ok_or_else(|| need("minimize"))?, &consts, &mut out)?,
        Mode::MaxwellCheck => {
            let lat = scenario.lattice.as_ref().ok_or_else(|| need("lattice"))?.build()?;
            run_maxwell(scenario.maxwell.as_ref().ok_or_else(|| need("maxwell"))?, &lat, base, &consts, &mut out)?
        }
    }
    Ok(RunReport {
        scenario,
        constants: consts,
        results: Value::Object(out.results),
        gates: out.gates,
        fields: out.fields,
        tables: out.tables,
    })
}

#[derive(Default)]
struct Outcome {
    results: serde_json::Map<String, Value>,
    gates: Vec<Gate>,
    fields: Vec<(String, TensorField)>,
    tables: Vec<Table>,
}

impl Outcome {
    fn put(&mut self, key: &str, v: impl Serialize) -> Result<()> {
        self.results.insert(key.into(), serde_json::to_value(v)?);
        Ok(())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn run_constants(consts: &InfoConstants, out: &mut Outcome) {
    let mut table = serde_json::Map::new();
    for (k, v) in consts.entries() {
        let (m, e) = binary_exponent_form(v);
        table.insert(k.into(), json!({"value": v, "mantissa": m, "exponent": e, "units": consts.units(k)}));
    }
    out.results.insert("binary_forms".into(), Value::Object(table));
    match consts.unit_mode {
        UnitMode::Si => {
            let published = [
                ("nu_c", consts.nu_c, 1.6637 * 2f64.powi(143)),
                ("Q_c", consts.q_c, 1.6637 * 2f64.powi(143)),
                ("hbar_c", consts.hbar_c, 1.7621 * 2f64.powi(284)),
            ];
            for (name, got, want) in published {
                out.gates.push(Gate::at_most(
                    &format!("{name}_published_value"),
                    "derived constant matches its published binary form",
                    rel(got, want),
                    5e-3,
                ));
            }
        }
        UnitMode::Natural => {
            let dev = [consts.lambda_c, consts.nu_c, consts.q_c, consts.t_p]
                .iter()
                .map(|v| (v - 1.0).abs())
                .fold((consts.hbar_c * 2.0 * PI - 1.0).abs(), f64::max);
            out.gates.push(Gate::at_most(
                "natural_normalization",
                "lambda_c = t_P = nu_c = Q_c = 1 and hbar_c = 1/(2 pi)",
                dev,
                0.0,
            ));
        }
    }
}

/// Largest errors of the random kinematic checks.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KinematicsCheck {
    pub samples: usize,
    /// `|x'.x' - x.x| / |x|_E^2`.
    pub interval_error: f64,
    /// `|v.v - nu_c^2| / nu_c^2`.
    pub velocity_norm_error: f64,
    /// Metric deviation of a composed boost over its largest squared entry.
    pub composition_error: f64,
}

fn random_beta(rng: &mut ChaCha8Rng, max: f64) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-12 && n2 <= 1.0 {
            let s = max * rng.gen_range(0.0..=1.0f64) / n2.sqrt();
            return v.map(|x| x * s);
        }
    }
}

/// Interval invariance, velocity normalization and boost closure over
/// random events and velocities.
pub fn kinematics_check(spec: &KinematicsSpec, consts: &InfoConstants) -> Result<KinematicsCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut check = KinematicsCheck {
        samples: spec.samples,
        interval_error: 0.0,
        velocity_norm_error: 0.0,
        composition_error: 0.0,
    };
    for _ in 0..spec.samples {
        let x = FourVector(std::array::from_fn(|_| rng.gen_range(-10.0..10.0)));
        let b1 = random_beta(&mut rng, spec.max_beta);
        let b2 = random_beta(&mut rng, spec.max_beta);
        let l1 = boost_from_beta(b1)?;
        let l2 = boost_from_beta(b2)?;
        let y = poincare_apply(&l1, &x);
        let scale = x.euclidean_norm().powi(2).max(f64::MIN_POSITIVE);
        check.interval_error = check.interval_error.max((y.interval() - x.interval()).abs() / scale);
        let v = four_velocity(b1, consts)?;
        let nu2 = consts.nu_c * consts.nu_c;
        check.velocity_norm_error = check.velocity_norm_error.max((v.interval() - nu2).abs() / nu2);
        let c = l1.compose(&l2);
        let big = c.lambda().iter().flatten().fold(1.0f64, |m, v| m.max(v * v));
        check.composition_error = check.composition_error.max(c.metric_deviation() / big);
    }
    Ok(check)
}

fn run_kinematics(spec: &KinematicsSpec, consts: &InfoConstants, out: &mut Outcome) -> Result<()> {
    let c = kinematics_check(spec, consts)?;
    out.put("check", c)?;
    out.put("seed", spec.seed)?;
    out.gates.push(Gate::at_most("interval_invariance", "boosts preserve x.x", c.interval_error, 1e-9));
    out.gates.push(Gate::at_most(
        "velocity_normalization",
        "v.v = nu_c^2",
        c.velocity_norm_error,
        1e-12,
    ));
    out.gates.push(Gate::at_most(
        "boost_composition",
        "composed boosts preserve the metric",
        c.composition_error,
        1e-10,
    ));
    Ok(())
}

fn run_emotion(s: &Scenario, base: &Path, consts: &InfoConstants, out: &mut Outcome) -> Result<()> {
    let lat = s
        .lattice
        .as_ref()
        .ok_or_else(|| Error::Scenario("lattice: required for mode `emotion`".into()))?
        .build()?;
    let spec = s
        .emotion
        .as_ref()
        .ok_or_else(|| Error::Scenario("emotion: required for mode `emotion`".into()))?;
    let text = spec.text.build(&lat, base)?;
    let perception = spec.perception.build(&lat, base)?;
    let volumes = match &spec.volumes {
        Some(g) => g.build(&lat, base)?,
        None => TensorField::scalar_constant(lat, 1.0),
    };
    let pair = TextPair::with_rank_cap(text, perception, volumes, spec.max_rank)?;
    let b = assemble_gie(&pair, consts)?;
    let summary = b.summary();
    out.put("summary", &summary)?;
    out.put("rank", pair.rank())?;
    out.gates.push(Gate::at_most(
        "q_bound",
        "|q| <= 1 at every site",
        b.q.max_abs(),
        1.0,
    ));
    let uniform = spec.text.is_uniform()
        && spec.perception.is_uniform()
        && spec.volumes.as_ref().is_none_or(FieldGenerator::is_uniform);
    if uniform {
        for (name, f) in b.psi_terms.entries().into_iter().chain(b.gamma_terms.entries()) {
            out.gates.push(Gate::at_most(
                &format!("uniform_{name}"),
                "uniform inputs give vanishing context and implied-sense terms",
                f.max_abs(),
                spec.uniform_tol,
            ));
        }
        let dq = b.q.sub(&b.mu)?.max_abs();
        out.gates.push(Gate::at_most("uniform_q_equals_mu", "uniform inputs give q = mu", dq, spec.uniform_tol));
    }
    for (name, f) in b.named_fields() {
        out.fields.push((name.to_string(), f.clone()));
    }
    Ok(())
}

fn transfer_problem(t: &TransferSpec, kind: TransferKind) -> Result<TransferProblem> {
    Ok(TransferProblem {
        kind,
        x_a: FourVector(t.x_a),
        x_b: FourVector(t.x_b),
        grid: t.grid.build()?,
        end_lattice: Some(t.end_lattice.build()?),
        beta: t.beta,
        density: t.density,
    })
}

fn run_transfer(t: &TransferSpec, kind: TransferKind, consts: &InfoConstants, out: &mut Outcome) -> Result<()> {
    let problem = transfer_problem(t, kind)?;
    problem.validate()?;
    let lat = t.end_lattice.build()?;
    let mut worst = problem.phase_step(&(problem.x_b - problem.x_a), consts)?;
    for s in 0..lat.sites() {
        worst = worst.max(problem.phase_step(&(lat.position(s) - problem.x_a), consts)?);
    }
    let sampling = Gate::at_most(
        "phase_sampling",
        "momentum grid resolves the phase (at most pi per cell)",
        worst,
        PI,
    );
    let sampled = sampling.passed;
    out.gates.push(sampling);
    if !sampled {
        out.put("skipped", "momentum grid undersamples the phase")?;
        return Ok(());
    }
    let r = solve_transfer(&problem, consts)?;
    out.put("K", json!({"re": r.k.re, "im": r.k.im}))?;
    out.put("Omega", r.omega)?;
    out.put("N_norm", r.n_norm)?;
    out.put("mean_disp", r.mean_disp)?;
    out.put("quantized", r.quantized)?;
    out.put("phase_step", r.phase_step)?;
    out.put("total_probability", r.total_probability)?;
    if matches!(kind, TransferKind::Free) && problem.grid.shape == CutoffShape::Box {
        let exact = box_closed_form(&problem.grid.cutoff, &(problem.x_b - problem.x_a), consts) / r.n_norm;
        out.put(
            "closed_form",
            json!({"K": exact, "relative_error": ((r.k.re - exact).hypot(r.k.im) / exact.abs())}),
        )?;
    }
    if t.density == DensityMode::Omega {
        out.gates.push(Gate::at_most(
            "normalization",
            "total probability over the end-point domain is 1",
            (r.total_probability - 1.0).abs(),
            t.normalization_tol,
        ));
    }
    out.fields.push(("rho".into(), r.rho));
    Ok(())
}

fn run_interaction(spec: &InteractionSpec, consts: &InfoConstants, out: &mut Outcome) -> Result<()> {
    let p = &spec.params;
    let x = FourVector(spec.x);
    let q12 = combine_gie(p)?;
    let f = interaction_factor_f(p, consts)?;
    let (kin, pot) = effective_momentum_parts(p, &spec.potential, &x, consts)?;
    let big_p = kin + pot;
    let v = p.beta_plus()? * consts.nu_c;
    let l_int = lagrangian_interaction(p, &spec.potential, &x, consts)?;
    out.put("Q12", q12)?;
    out.put("f", f)?;
    out.put("momentum_1", momentum(p.q1, p.beta1, consts)?)?;
    out.put("momentum_2", momentum(p.q2, p.beta2, consts)?)?;
    out.put("effective_momentum", json!({"kinetic": kin, "potential": pot, "total": big_p}))?;
    out.put("lagrangian_free_1", lagrangian_free(p.q1, p.beta1, consts)?)?;
    out.put("lagrangian_free_2", lagrangian_free(p.q2, p.beta2, consts)?)?;
    out.put("lagrangian_interaction", l_int)?;
    // v = v1 + v2 is not normalized to nu_c
    out.put("total_velocity_sq", json!({"value": minkowski_dot(&v, &v), "normalized": false}))?;
    let defect = (l_int + minkowski_dot(&big_p, &v)).abs();
    out.gates.push(Gate::at_most(
        "lagrangian_momentum_consistency",
        "L_int = -P.v",
        defect,
        1e-12 * l_int.abs().max(1.0),
    ));
    if let Some(t) = &spec.transfer {
        let mut sub = Outcome::default();
        let kind = TransferKind::Interacting {
            params: *p,
            potential: spec.potential,
            branch: t.branch,
        };
        run_transfer(t, kind, consts, &mut sub)?;
        out.results.insert("transfer".into(), Value::Object(sub.results));
        out.gates.extend(sub.gates);
        out.fields.extend(sub.fields);
    }
    Ok(())
}

fn path_table(name: &str, path: &Path4) -> Table {
    Table {
        name: name.into(),
        header: ["k", "x0", "x1", "x2", "x3"].map(String::from).to_vec(),
        rows: path
            .nodes()
            .iter()
            .enumerate()
            .map(|(k, x)| {
                let mut row = vec![k as f64];
                row.extend(x.0);
                row
            })
            .collect(),
    }
}

fn run_minimize(spec: &MinimizeSpec, consts: &InfoConstants, out: &mut Outcome) -> Result<()> {
    let (a, b) = (FourVector(spec.start), FourVector(spec.end));
    let lagrangian: Box<dyn Lagrangian> = match spec.lagrangian {
        LagrangianSpec::Free { gie } => Box::new(FreeLagrangian { gie }),
        LagrangianSpec::Interaction(l) => Box::new(l),
    };
    let straight = action(&Path4::straight(a, b, spec.segments)?, lagrangian.as_ref(), consts)?;
    out.put("straight_action", straight)?;
    if let LagrangianSpec::Free { gie } = spec.lagrangian {
        out.put("closed_form_action", -gie * consts.nu_c * (b - a).interval().sqrt())?;
    }
    let opts = &spec.options;
    let res = minimize_action(a, b, lagrangian.as_ref(), spec.segments, opts, consts);
    let (o, converged): (MinimizeOutcome, bool) = match res {
        Ok(o) => (o, true),
        Err(Error::Convergence {
            iterations,
            grad_norm,
            best_action,
            best_path,
        }) => {
            out.put("convergence_failure", json!({"iterations": iterations, "grad_norm": grad_norm}))?;
            let o = MinimizeOutcome {
                path: *best_path,
                action: best_action,
                initial_action: f64::NAN,
                iterations,
                grad_norm,
                tol: opts.tol,
                max_iters: opts.max_iters,
                trace: Vec::new(),
            };
            (o, false)
        }
        Err(e) => return Err(e),
    };
    out.put("converged", converged)?;
    out.put("action", o.action)?;
    if converged {
        out.put("initial_action", o.initial_action)?;
    }
    out.put("iterations", o.iterations)?;
    out.put("grad_norm", o.grad_norm)?;
    out.put("options", opts)?;
    out.put("trace", &o.trace)?;
    out.put("chord_deviation", o.path.chord_deviation())?;
    out.put("path", o.path.nodes())?;
    out.gates.push(Gate::at_most(
        "stationarity",
        "gradient max-norm of the discrete action is at most tol",
        o.grad_norm,
        opts.tol,
    ));
    if converged {
        out.gates.push(Gate::at_most(
            "descent",
            "returned action does not exceed the initial action",
            o.action - o.initial_action,
            0.0,
        ));
    }
    out.tables.push(path_table("path", &o.path));
    Ok(())
}

fn dual_residual_max(spec: &MaxwellSpec, lat: &Lattice4, base: &Path, consts: &InfoConstants) -> Result<(f64, f64)> {
    let a = spec.potential.build(lat, base)?;
    let r = maxwell_residuals(&a, &CurrentDensity::zero(*lat), consts)?;
    Ok((r.dual.max_abs(), field_tensor(&a)?.max_abs()))
}

fn run_maxwell(
    spec: &MaxwellSpec,
    lat: &Lattice4,
    base: &Path,
    consts: &InfoConstants,
    out: &mut Outcome,
) -> Result<()> {
    let a = spec.potential.build(lat, base)?;
    if a.rank() != 1 {
        return Err(Error::Scenario("maxwell.potential: rank must be 1".into()));
    }
    let current = match &spec.current {
        Some(c) => CurrentDensity {
            rho: c.rho.build(lat, base)?,
            components: c.components.build(lat, base)?,
        },
        None => CurrentDensity::zero(*lat),
    };
    let r = maxwell_residuals(&a, &current, consts)?;
    let g_max = field_tensor(&a)?.max_abs();
    out.put(
        "residuals",
        json!({
            "source_max": r.source.max_abs(),
            "source_max_interior": r.source.max_abs_interior(1),
            "dual_max": r.dual.max_abs(),
            "continuity_max_interior": r.continuity.max_abs_interior(1),
            "field_tensor_max": g_max,
        }),
    )?;
    out.gates.push(Gate::at_most(
        "dual_residual",
        "(1/2) d_a G~^{ab} vanishes for a potential-derived field tensor",
        r.dual.max_abs() / g_max.max(1.0),
        spec.dual_tol,
    ));
    if let Some(rf) = &spec.refinement {
        let mut levels = Vec::new();
        for &n in &rf.extents {
            let l = Lattice4::spanning(n, rf.lo, rf.hi)?;
            let (d, g) = dual_residual_max(spec, &l, base, consts)?;
            levels.push(json!({"extent": n, "spacing": l.spacing()[0], "dual_max": d, "field_tensor_max": g}));
        }
        let orders: Vec<f64> = levels
            .windows(2)
            .map(|w| {
                let (d0, d1) = (w[0]["dual_max"].as_f64().unwrap_or(0.0), w[1]["dual_max"].as_f64().unwrap_or(0.0));
                let (h0, h1) = (w[0]["spacing"].as_f64().unwrap_or(1.0), w[1]["spacing"].as_f64().unwrap_or(1.0));
                (d0 / d1).ln() / (h0 / h1).ln()
            })
            .collect();
        out.put("refinement", json!({"levels": levels, "observed_orders": orders}))?;
    }
    out.fields.push(("residual_source".into(), r.source));
    out.fields.push(("residual_dual".into(), r.dual));
    out.fields.push(("residual_continuity".into(), r.continuity));
    Ok(())
}
