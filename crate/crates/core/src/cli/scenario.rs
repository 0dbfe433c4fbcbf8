use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::constants::UnitMode;
use crate::dynamics::{InteractionLagrangian, InteractionParams, MinimizeOptions, PotentialSpec};
use crate::error::{Error, Result};
use crate::kinematics::FourVector;
use crate::lattice::{component_count, component_offset, read_field, Lattice4, TensorField, Variance};
use crate::path_integral::{CutoffShape, DensityMode, MomentumGrid, PotentialBranch};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Constants,
    Kinematics,
    Emotion,
    FreeTransfer,
    Interaction,
    MinimizeAction,
    MaxwellCheck,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Constants => "constants",
            Mode::Kinematics => "kinematics",
            Mode::Emotion => "emotion",
            Mode::FreeTransfer => "free_transfer",
            Mode::Interaction => "interaction",
            Mode::MinimizeAction => "minimize_action",
            Mode::MaxwellCheck => "maxwell_check",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputOptions {
    /// Report file name inside the output directory.
    #[serde(default)]
    pub json: Option<String>,
    /// Write CSV dumps of fields and tables.
    #[serde(default)]
    pub csv: bool,
    /// Suppress CSV dumps even when requested on the command line.
    #[serde(default)]
    pub stats_only: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub extents: [usize; 4],
    pub spacing: [f64; 4],
    #[serde(default)]
    pub origin: [f64; 4],
}

impl LatticeSpec {
    pub fn build(&self) -> Result<Lattice4> {
        Lattice4::new(self.extents, self.spacing, FourVector(self.origin))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearTerm {
    /// Index tuple of the component.
    #[serde(default)]
    pub component: Vec<usize>,
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub gradient: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    #[serde(default)]
    pub component: Vec<usize>,
    pub coeff: f64,
    /// Powers of `x^0 .. x^3`.
    #[serde(default)]
    pub powers: [u32; 4],
}

/// Contravariant tensor field source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldGenerator {
    /// One value per component, or a single value for a scalar.
    Constant { rank: usize, values: Vec<f64> },
    /// `constant + gradient . x` per listed component.
    Linear { rank: usize, terms: Vec<LinearTerm> },
    /// Sum of monomials per listed component.
    Polynomial { rank: usize, terms: Vec<Monomial> },
    /// Serialized field header, relative to the scenario file.
    File { path: String },
}

impl FieldGenerator {
    fn check_component(rank: usize, comp: &[usize], path: &str, errs: &mut Vec<String>) {
        if comp.len() != rank || comp.iter().any(|&i| i > 3) {
            errs.push(format!("{path}.component: expected {rank} indices in 0..=3, got {comp:?}"));
        }
    }

    pub fn validate(&self, path: &str, base: &Path, errs: &mut Vec<String>) {
        let finite = |v: f64, p: String, errs: &mut Vec<String>| {
            if !v.is_finite() {
                errs.push(format!("{p}: non-finite value {v}"));
            }
        };
        let rank = match self {
            FieldGenerator::Constant { rank, .. }
            | FieldGenerator::Linear { rank, .. }
            | FieldGenerator::Polynomial { rank, .. } => *rank,
            FieldGenerator::File { path: file } => {
                if !base.join(file).is_file() {
                    errs.push(format!("{path}.path: file `{file}` not found"));
                }
                return;
            }
        };
        if rank > 4 {
            errs.push(format!("{path}.rank: {rank} exceeds 4"));
            return;
        }
        match self {
            FieldGenerator::Constant { values, .. } => {
                if values.len() != component_count(rank) {
                    errs.push(format!(
                        "{path}.values: expected {} values, got {}",
                        component_count(rank),
                        values.len()
                    ));
                }
                for (i, v) in values.iter().enumerate() {
                    finite(*v, format!("{path}.values[{i}]"), errs);
                }
            }
            FieldGenerator::Linear { terms, .. } => {
                for (i, t) in terms.iter().enumerate() {
                    let p = format!("{path}.terms[{i}]");
                    Self::check_component(rank, &t.component, &p, errs);
                    finite(t.constant, format!("{p}.constant"), errs);
                    for (a, g) in t.gradient.iter().enumerate() {
                        finite(*g, format!("{p}.gradient[{a}]"), errs);
                    }
                }
            }
            FieldGenerator::Polynomial { terms, .. } => {
                for (i, t) in terms.iter().enumerate() {
                    let p = format!("{path}.terms[{i}]");
                    Self::check_component(rank, &t.component, &p, errs);
                    finite(t.coeff, format!("{p}.coeff"), errs);
                }
            }
            FieldGenerator::File { .. } => {}
        }
    }

    /// Whether the field is the same at every site.
    pub fn is_uniform(&self) -> bool {
        match self {
            FieldGenerator::Constant { .. } => true,
            FieldGenerator::Linear { terms, .. } => terms.iter().all(|t| t.gradient == [0.0; 4]),
            FieldGenerator::Polynomial { terms, .. } => terms.iter().all(|t| t.powers == [0; 4]),
            FieldGenerator::File { .. } => false,
        }
    }

    /// Samples the generator on `lattice`.
    pub fn build(&self, lattice: &Lattice4, base: &Path) -> Result<TensorField> {
        match self {
            FieldGenerator::Constant { rank, values } => {
                TensorField::constant(*lattice, vec![Variance::Contra; *rank], values)
            }
            FieldGenerator::Linear { rank, terms } => {
                let nc = component_count(*rank);
                let mut table = vec![(0.0, [0.0; 4]); nc];
                for t in terms {
                    let e = &mut table[component_offset(&t.component)];
                    e.0 += t.constant;
                    for a in 0..4 {
                        e.1[a] += t.gradient[a];
                    }
                }
                Ok(TensorField::from_fn(*lattice, vec![Variance::Contra; *rank], |x, idx| {
                    let (c, g) = table[component_offset(idx)];
                    c + (0..4).map(|a| g[a] * x[a]).sum::<f64>()
                }))
            }
            FieldGenerator::Polynomial { rank, terms } => {
                let nc = component_count(*rank);
                let mut table: Vec<Vec<(f64, [u32; 4])>> = vec![Vec::new(); nc];
                for t in terms {
                    table[component_offset(&t.component)].push((t.coeff, t.powers));
                }
                Ok(TensorField::from_fn(*lattice, vec![Variance::Contra; *rank], |x, idx| {
                    table[component_offset(idx)]
                        .iter()
                        .map(|(c, p)| c * (0..4).map(|a| x[a].powi(p[a] as i32)).product::<f64>())
                        .sum()
                }))
            }
            FieldGenerator::File { path } => {
                let field = read_field(&base.join(path))?.to_contravariant();
                if field.lattice() != lattice {
                    return Err(Error::Scenario(format!("field file `{path}` lives on a different lattice")));
                }
                Ok(field)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmotionSpec {
    pub text: FieldGenerator,
    pub perception: FieldGenerator,
    /// Elementary-volume count `n`; defaults to 1 everywhere.
    #[serde(default)]
    pub volumes: Option<FieldGenerator>,
    #[serde(default = "default_max_rank")]
    pub max_rank: usize,
    /// Tolerance of the uniform-input collapse gates.
    #[serde(default = "default_uniform_tol")]
    pub uniform_tol: f64,
}

fn default_max_rank() -> usize {
    crate::emotion::DEFAULT_MAX_RANK
}

fn default_uniform_tol() -> f64 {
    1e-12
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KinematicsSpec {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_max_beta")]
    pub max_beta: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_samples() -> usize {
    10_000
}

fn default_max_beta() -> f64 {
    0.99
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub cutoff: [f64; 4],
    pub points: [usize; 4],
    #[serde(default)]
    pub shape: CutoffShape,
}

impl GridSpec {
    pub fn build(&self) -> Result<MomentumGrid> {
        let g = MomentumGrid {
            cutoff: self.cutoff,
            points: self.points,
            shape: self.shape,
        };
        g.validate()?;
        Ok(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferSpec {
    pub x_a: [f64; 4],
    pub x_b: [f64; 4],
    pub grid: GridSpec,
    pub end_lattice: LatticeSpec,
    /// Velocity fixing `<v^2>` for quantization.
    pub beta: [f64; 3],
    #[serde(default)]
    pub density: DensityMode,
    /// Interacting transfers only.
    #[serde(default)]
    pub branch: PotentialBranch,
    #[serde(default = "default_normalization_tol")]
    pub normalization_tol: f64,
}

fn default_normalization_tol() -> f64 {
    1e-9
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionSpec {
    pub params: InteractionParams,
    pub potential: PotentialSpec,
    /// Event at which momenta and Lagrangians are evaluated.
    pub x: [f64; 4],
    #[serde(default)]
    pub transfer: Option<TransferSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LagrangianSpec {
    Free { gie: f64 },
    Interaction(InteractionLagrangian),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimizeSpec {
    pub start: [f64; 4],
    pub end: [f64; 4],
    pub segments: usize,
    pub lagrangian: LagrangianSpec,
    #[serde(default)]
    pub options: MinimizeOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurrentSpec {
    pub rho: FieldGenerator,
    pub components: FieldGenerator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefinementSpec {
    /// Points per axis on each level.
    pub extents: Vec<usize>,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxwellSpec {
    pub potential: FieldGenerator,
    #[serde(default)]
    pub current: Option<CurrentSpec>,
    /// Bound on `max |(1/2) d_a G~^{ab}|` relative to `max(1, max |G|)`.
    #[serde(default = "default_dual_tol")]
    pub dual_tol: f64,
    #[serde(default)]
    pub refinement: Option<RefinementSpec>,
}

fn default_dual_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub mode: Mode,
    #[serde(default)]
    pub unit_mode: UnitMode,
    #[serde(default)]
    pub output: OutputOptions,
    #[serde(default)]
    pub lattice: Option<LatticeSpec>,
    #[serde(default)]
    pub kinematics: Option<KinematicsSpec>,
    #[serde(default)]
    pub emotion: Option<EmotionSpec>,
    #[serde(default)]
    pub transfer: Option<TransferSpec>,
    #[serde(default)]
    pub interaction: Option<InteractionSpec>,
    #[serde(default)]
    pub minimize: Option<MinimizeSpec>,
    #[serde(default)]
    pub maxwell: Option<MaxwellSpec>,
}

/// A scenario together with the directory its relative paths resolve from.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub base_dir: PathBuf,
}

/// Parses JSON, or TOML when `toml` is set, reporting the failing path.
pub fn parse_scenario(text: &str, toml: bool) -> Result<Scenario> {
    let parsed: std::result::Result<Scenario, String> = if toml {
        let de = ::toml::Deserializer::new(text);
        serde_path_to_error::deserialize(de).map_err(|e| format!("{}: {}", e.path(), e.inner().message()))
    } else {
        let mut de = serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(&mut de).map_err(|e| format!("{}: {}", e.path(), e.inner()))
    };
    let scenario = parsed.map_err(Error::Scenario)?;
    Ok(scenario)
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<LoadedScenario> {
    let text = std::fs::read_to_string(path)?;
    let is_toml = path.extension().is_some_and(|e| e == "toml");
    let scenario = parse_scenario(&text, is_toml)?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let errs = scenario.violations(&base_dir);
    if !errs.is_empty() {
        return Err(Error::Scenario(errs.join("\n")));
    }
    Ok(LoadedScenario { scenario, base_dir })
}

fn check_finite(values: &[f64], path: &str, errs: &mut Vec<String>) {
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() {
            errs.push(format!("{path}[{i}]: non-finite value {v}"));
        }
    }
}

fn check_lattice(spec: &LatticeSpec, path: &str, errs: &mut Vec<String>) {
    if let Err(e) = spec.build() {
        errs.push(format!("{path}: {e}"));
    }
}

fn check_transfer(t: &TransferSpec, path: &str, errs: &mut Vec<String>) {
    check_finite(&t.x_a, &format!("{path}.x_a"), errs);
    check_finite(&t.x_b, &format!("{path}.x_b"), errs);
    check_finite(&t.beta, &format!("{path}.beta"), errs);
    if let Err(e) = t.grid.build() {
        errs.push(format!("{path}.grid: {e}"));
    }
    check_lattice(&t.end_lattice, &format!("{path}.end_lattice"), errs);
    if t.beta.iter().map(|b| b * b).sum::<f64>() >= 1.0 {
        errs.push(format!("{path}.beta: |beta| must be < 1"));
    }
    if t.beta == [0.0; 3] {
        errs.push(format!("{path}.beta: a nonzero velocity is needed for displacement quantization"));
    }
}

impl Scenario {
    /// A scenario with only the mode and unit system set.
    pub fn bare(mode: Mode, unit_mode: UnitMode) -> Self {
        Scenario {
            schema_version: SCHEMA_VERSION,
            mode,
            unit_mode,
            output: OutputOptions::default(),
            lattice: None,
            kinematics: None,
            emotion: None,
            transfer: None,
            interaction: None,
            minimize: None,
            maxwell: None,
        }
    }

    /// Every semantic problem, each prefixed with its document path.
    pub fn violations(&self, base: &Path) -> Vec<String> {
        let mut errs = Vec::new();
        if self.schema_version != SCHEMA_VERSION {
            errs.push(format!(
                "schema_version: unsupported version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        let missing = |name: &str, errs: &mut Vec<String>| {
            errs.push(format!("{name}: required for mode `{}`", self.mode.name()));
        };
        match self.mode {
            Mode::Constants => {}
            Mode::Kinematics => match &self.kinematics {
                None => missing("kinematics", &mut errs),
                Some(k) => {
                    if !(k.max_beta >= 0.0 && k.max_beta < 1.0) {
                        errs.push("kinematics.max_beta: must lie in [0, 1)".into());
                    }
                    if k.samples == 0 {
                        errs.push("kinematics.samples: must be positive".into());
                    }
                }
            },
            Mode::Emotion => {
                match &self.lattice {
                    None => missing("lattice", &mut errs),
                    Some(l) => check_lattice(l, "lattice", &mut errs),
                }
                match &self.emotion {
                    None => missing("emotion", &mut errs),
                    Some(e) => {
                        e.text.validate("emotion.text", base, &mut errs);
                        e.perception.validate("emotion.perception", base, &mut errs);
                        if let Some(v) = &e.volumes {
                            v.validate("emotion.volumes", base, &mut errs);
                        }
                    }
                }
            }
            Mode::FreeTransfer => match &self.transfer {
                None => missing("transfer", &mut errs),
                Some(t) => check_transfer(t, "transfer", &mut errs),
            },
            Mode::Interaction => match &self.interaction {
                None => missing("interaction", &mut errs),
                Some(i) => {
                    check_finite(&i.x, "interaction.x", &mut errs);
                    if let Err(e) = i.params.validate() {
                        errs.push(format!("interaction.params: {e}"));
                    }
                    if let Err(e) = i.potential.validate() {
                        errs.push(format!("interaction.potential: {e}"));
                    }
                    if let Some(t) = &i.transfer {
                        check_transfer(t, "interaction.transfer", &mut errs);
                    }
                }
            },
            Mode::MinimizeAction => match &self.minimize {
                None => missing("minimize", &mut errs),
                Some(m) => {
                    check_finite(&m.start, "minimize.start", &mut errs);
                    check_finite(&m.end, "minimize.end", &mut errs);
                    if m.segments < 2 {
                        errs.push("minimize.segments: at least 2 segments are required".into());
                    }
                    if let Err(e) = m.options.validate() {
                        errs.push(format!("minimize.options: {e}"));
                    }
                }
            },
            Mode::MaxwellCheck => {
                match &self.lattice {
                    None => missing("lattice", &mut errs),
                    Some(l) => check_lattice(l, "lattice", &mut errs),
                }
                match &self.maxwell {
                    None => missing("maxwell", &mut errs),
                    Some(m) => {
                        m.potential.validate("maxwell.potential", base, &mut errs);
                        if let Some(c) = &m.current {
                            c.rho.validate("maxwell.current.rho", base, &mut errs);
                            c.components.validate("maxwell.current.components", base, &mut errs);
                        }
                        if let Some(r) = &m.refinement {
                            if r.extents.iter().any(|&n| n < 3) || !(r.hi > r.lo) {
                                errs.push("maxwell.refinement: extents must be >= 3 and hi > lo".into());
                            }
                            if matches!(m.potential, FieldGenerator::File { .. }) {
                                errs.push("maxwell.refinement: file potentials cannot be resampled".into());
                            }
                        }
                    }
                }
            }
        }
        errs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_constants_document() {
        let s = parse_scenario(r#"{"schema_version": 1, "mode": "constants", "unit_mode": "SI"}"#, false).unwrap();
        assert_eq!(s.mode, Mode::Constants);
        assert_eq!(s.unit_mode, UnitMode::Si);
        assert!(s.violations(Path::new(".")).is_empty());
    }

    #[test]
    fn unknown_mode_is_named() {
        let e = parse_scenario(r#"{"schema_version": 1, "mode": "teleport"}"#, false).unwrap_err();
        assert!(e.to_string().starts_with("mode:"), "{e}");
    }

    #[test]
    fn missing_cutoff_names_path() {
        let doc = r#"{"schema_version": 1, "mode": "free_transfer", "transfer": {
            "x_a": [0,0,0,0], "x_b": [1,0,0,0], "beta": [0.5,0,0],
            "grid": {"points": [8,8,8,8]},
            "end_lattice": {"extents": [3,3,3,3], "spacing": [1,1,1,1]}}}"#;
        let e = parse_scenario(doc, false).unwrap_err().to_string();
        assert!(e.contains("transfer.grid") && e.contains("cutoff"), "{e}");
    }

    #[test]
    fn missing_section_is_reported() {
        let s = parse_scenario(r#"{"schema_version": 1, "mode": "free_transfer"}"#, false).unwrap();
        let errs = s.violations(Path::new("."));
        assert_eq!(errs, vec!["transfer: required for mode `free_transfer`".to_string()]);
    }

    #[test]
    fn non_finite_polynomial_is_rejected() {
        let g = FieldGenerator::Polynomial {
            rank: 1,
            terms: vec![Monomial {
                component: vec![0],
                coeff: f64::NAN,
                powers: [1, 0, 0, 0],
            }],
        };
        let mut errs = Vec::new();
        g.validate("emotion.text", Path::new("."), &mut errs);
        assert_eq!(errs.len(), 1);
        assert!(errs[0].starts_with("emotion.text.terms[0].coeff"));
    }

    #[test]
    fn toml_documents_parse() {
        let doc = "schema_version = 1\nmode = \"kinematics\"\n[kinematics]\nsamples = 10\n";
        let s = parse_scenario(doc, true).unwrap();
        assert_eq!(s.kinematics.unwrap().samples, 10);
    }

    #[test]
    fn generators_sample_expected_values() {
        let lat = Lattice4::spanning(3, -1.0, 1.0).unwrap();
        let lin = FieldGenerator::Linear {
            rank: 1,
            terms: vec![LinearTerm {
                component: vec![2],
                constant: 0.5,
                gradient: [0.0, 2.0, 0.0, 0.0],
            }],
        };
        let f = lin.build(&lat, Path::new(".")).unwrap();
        let s = lat.sites() - 1;
        assert_eq!(f.site(s), &[0.0, 0.0, 2.5, 0.0]);
        let poly = FieldGenerator::Polynomial {
            rank: 0,
            terms: vec![Monomial {
                component: vec![],
                coeff: 3.0,
                powers: [0, 2, 0, 1],
            }],
        };
        let f = poly.build(&lat, Path::new(".")).unwrap();
        assert_eq!(f.value(0), -3.0);
        assert!(!poly.is_uniform());
    }
}
