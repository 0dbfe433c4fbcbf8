//! Python bindings for the infospace library.

#[pyo3::pymodule]
mod pyinfospace {
    use std::collections::BTreeMap;
    use std::path::PathBuf;

    use pyo3::exceptions::{PyRuntimeError, PyValueError};
    use pyo3::prelude::*;

    use infospace::cli::emit::canonical_json;
    use infospace::cli::run::{run, RunOverrides};
    use infospace::cli::scenario::load_scenario;
    use infospace::constants::{derive_constants, InfoConstants, PhysicalConstants, UnitMode};
    use infospace::dynamics::{minimize_action, FreeLagrangian, MinimizeOptions};
    use infospace::emotion::{assemble_gie, TextPair};
    use infospace::error::Error;
    use infospace::kinematics as kin;
    use infospace::lattice::{Lattice4, TensorField as CoreField, Variance};
    use infospace::path_integral::{solve_transfer, MomentumGrid, TransferProblem};

    fn err(e: Error) -> PyErr {
        match e {
            Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
            _ => PyValueError::new_err(e.to_string()),
        }
    }

    fn unit_mode(units: &str) -> PyResult<UnitMode> {
        units.parse().map_err(err)
    }

    type Fields = BTreeMap<String, Vec<f64>>;

    fn consts_for(units: &str) -> PyResult<InfoConstants> {
        derive_constants(&PhysicalConstants::CODATA_2002, unit_mode(units)?).map_err(err)
    }

    /// Derived information constants.
    #[pyclass(frozen, name = "Constants", from_py_object)]
    #[derive(Clone)]
    pub struct Constants {
        inner: InfoConstants,
    }

    #[pymethods]
    impl Constants {
        #[new]
        #[pyo3(signature = (units = "natural"))]
        fn new(units: &str) -> PyResult<Self> {
            Ok(Constants { inner: consts_for(units)? })
        }

        #[getter]
        fn lambda_c(&self) -> f64 {
            self.inner.lambda_c
        }

        #[getter]
        fn nu_c(&self) -> f64 {
            self.inner.nu_c
        }

        #[getter]
        fn q_c(&self) -> f64 {
            self.inner.q_c
        }

        #[getter]
        fn hbar_c(&self) -> f64 {
            self.inner.hbar_c
        }

        #[getter]
        fn t_p(&self) -> f64 {
            self.inner.t_p
        }

        #[getter]
        fn l_p(&self) -> f64 {
            self.inner.l_p
        }

        #[getter]
        fn unit_mode(&self) -> String {
            self.inner.unit_mode.to_string()
        }

        fn as_dict(&self) -> BTreeMap<&'static str, f64> {
            self.inner.entries().into_iter().collect()
        }

        fn __repr__(&self) -> String {
            format!("Constants(units={:?})", self.inner.unit_mode.to_string())
        }
    }

    /// Contravariant 4-vector with metric (+,-,-,-).
    #[pyclass(frozen, name = "FourVector", from_py_object)]
    #[derive(Clone)]
    pub struct FourVector {
        inner: kin::FourVector,
    }

    #[pymethods]
    impl FourVector {
        #[new]
        fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
            FourVector { inner: kin::FourVector::new(x0, x1, x2, x3) }
        }

        fn components(&self) -> [f64; 4] {
            self.inner.0
        }

        fn dot(&self, other: &FourVector) -> f64 {
            self.inner.dot(&other.inner)
        }

        fn interval(&self) -> f64 {
            self.inner.interval()
        }

        fn lowered(&self) -> FourVector {
            FourVector { inner: self.inner.lowered() }
        }

        fn __add__(&self, other: &FourVector) -> FourVector {
            FourVector { inner: self.inner + other.inner }
        }

        fn __sub__(&self, other: &FourVector) -> FourVector {
            FourVector { inner: self.inner - other.inner }
        }

        fn __repr__(&self) -> String {
            let [a, b, c, d] = self.inner.0;
            format!("FourVector({a}, {b}, {c}, {d})")
        }
    }

    /// Poincare map `x -> Lambda x + b`.
    #[pyclass(frozen, name = "LorentzMap", from_py_object)]
    #[derive(Clone)]
    pub struct LorentzMap {
        inner: kin::LorentzMap,
    }

    #[pymethods]
    impl LorentzMap {
        #[new]
        #[pyo3(signature = (matrix, translation = None))]
        fn new(matrix: [[f64; 4]; 4], translation: Option<FourVector>) -> PyResult<Self> {
            let b = translation.map_or(kin::FourVector::ZERO, |t| t.inner);
            Ok(LorentzMap { inner: kin::LorentzMap::new(matrix, b).map_err(err)? })
        }

        #[staticmethod]
        fn boost(beta: [f64; 3]) -> PyResult<Self> {
            Ok(LorentzMap { inner: kin::boost_from_beta(beta).map_err(err)? })
        }

        fn apply(&self, x: &FourVector) -> FourVector {
            FourVector { inner: kin::poincare_apply(&self.inner, &x.inner) }
        }

        fn compose(&self, other: &LorentzMap) -> LorentzMap {
            LorentzMap { inner: self.inner.compose(&other.inner) }
        }

        fn matrix(&self) -> [[f64; 4]; 4] {
            *self.inner.lambda()
        }

        fn metric_deviation(&self) -> f64 {
            self.inner.metric_deviation()
        }
    }

    /// Regular 4D lattice.
    #[pyclass(frozen, name = "Lattice", from_py_object)]
    #[derive(Clone)]
    pub struct Lattice {
        inner: Lattice4,
    }

    #[pymethods]
    impl Lattice {
        #[new]
        #[pyo3(signature = (extents, spacing, origin = [0.0; 4]))]
        fn new(extents: [usize; 4], spacing: [f64; 4], origin: [f64; 4]) -> PyResult<Self> {
            let inner = Lattice4::new(extents, spacing, kin::FourVector(origin)).map_err(err)?;
            Ok(Lattice { inner })
        }

        #[getter]
        fn sites(&self) -> usize {
            self.inner.sites()
        }

        #[getter]
        fn extents(&self) -> [usize; 4] {
            self.inner.extents()
        }

        fn position(&self, site: usize) -> PyResult<[f64; 4]> {
            if site >= self.inner.sites() {
                return Err(PyValueError::new_err(format!("site {site} out of range")));
            }
            Ok(self.inner.position(site).0)
        }
    }

    /// Contravariant tensor field stored site-major.
    #[pyclass(frozen, name = "TensorField", from_py_object)]
    #[derive(Clone)]
    pub struct TensorField {
        inner: CoreField,
    }

    #[pymethods]
    impl TensorField {
        #[staticmethod]
        fn constant(lattice: &Lattice, rank: usize, components: Vec<f64>) -> PyResult<Self> {
            let inner = CoreField::constant(lattice.inner, vec![Variance::Contra; rank], &components).map_err(err)?;
            Ok(TensorField { inner })
        }

        #[staticmethod]
        fn from_data(lattice: &Lattice, rank: usize, data: Vec<f64>) -> PyResult<Self> {
            let inner = CoreField::from_data(lattice.inner, vec![Variance::Contra; rank], data).map_err(err)?;
            Ok(TensorField { inner })
        }

        #[getter]
        fn rank(&self) -> usize {
            self.inner.rank()
        }

        fn data(&self) -> Vec<f64> {
            self.inner.data().to_vec()
        }

        fn site(&self, site: usize) -> PyResult<Vec<f64>> {
            if site >= self.inner.lattice().sites() {
                return Err(PyValueError::new_err(format!("site {site} out of range")));
            }
            Ok(self.inner.site(site).to_vec())
        }
    }

    #[pyfunction]
    #[pyo3(signature = (units = "natural"))]
    fn constants(units: &str) -> PyResult<Constants> {
        Constants::new(units)
    }

    #[pyfunction]
    fn lorentz_factor(beta: [f64; 3]) -> PyResult<f64> {
        kin::lorentz_factor(&beta).map_err(err)
    }

    #[pyfunction]
    fn proper_time(dt: f64, beta: [f64; 3]) -> PyResult<f64> {
        kin::proper_time(dt, beta).map_err(err)
    }

    /// Returns `(N, mean_dt, residuals)`.
    #[pyfunction]
    #[pyo3(signature = (raw_mean, mean_speed_sq, units = "natural"))]
    fn quantize_displacement(
        raw_mean: &FourVector,
        mean_speed_sq: f64,
        units: &str,
    ) -> PyResult<([i64; 3], f64, [f64; 3])> {
        let q = kin::quantize_displacement(&raw_mean.inner, mean_speed_sq, &consts_for(units)?).map_err(err)?;
        Ok((q.n, q.mean_dt, q.residuals))
    }

    /// Runs the emotion pipeline with unit volumes and returns every named
    /// scalar field plus the sites where `|q| > 1`.
    #[pyfunction]
    #[pyo3(signature = (text, perception, units = "natural"))]
    fn emotion_breakdown(
        text: &TensorField,
        perception: &TensorField,
        units: &str,
    ) -> PyResult<(Fields, Vec<usize>)> {
        let pair = TextPair::unit_volumes(text.inner.clone(), perception.inner.clone()).map_err(err)?;
        let b = assemble_gie(&pair, &consts_for(units)?).map_err(err)?;
        let fields = b
            .named_fields()
            .into_iter()
            .map(|(k, f)| (k.to_string(), f.data().to_vec()))
            .collect();
        Ok((fields, b.violations.clone()))
    }

    /// Minimizes the free action between `a` and `b`. Returns
    /// `(action, iterations, grad_norm, nodes)`.
    #[pyfunction]
    #[pyo3(signature = (a, b, gie, segments, perturbation = 0.0, tol = 1e-8, max_iters = 20000, units = "natural"))]
    #[allow(clippy::too_many_arguments)]
    fn minimize_free(
        a: &FourVector,
        b: &FourVector,
        gie: f64,
        segments: usize,
        perturbation: f64,
        tol: f64,
        max_iters: usize,
        units: &str,
    ) -> PyResult<(f64, usize, f64, Vec<[f64; 4]>)> {
        let opts = MinimizeOptions {
            tol,
            max_iters,
            perturbation,
            ..MinimizeOptions::default()
        };
        let out = minimize_action(a.inner, b.inner, &FreeLagrangian { gie }, segments, &opts, &consts_for(units)?)
            .map_err(err)?;
        let nodes = out.path.nodes().iter().map(|n| n.0).collect();
        Ok((out.action, out.iterations, out.grad_norm, nodes))
    }

    /// Free transfer on a box momentum grid with an end-point lattice.
    /// Returns a dict of the amplitude, normalization and mean displacement.
    #[pyfunction]
    #[pyo3(signature = (x_a, x_b, cutoff, points, end_lattice, beta, units = "natural"))]
    fn free_transfer(
        x_a: &FourVector,
        x_b: &FourVector,
        cutoff: [f64; 4],
        points: [usize; 4],
        end_lattice: &Lattice,
        beta: [f64; 3],
        units: &str,
    ) -> PyResult<BTreeMap<&'static str, Vec<f64>>> {
        let grid = MomentumGrid::boxed(cutoff, points).map_err(err)?;
        let mut problem = TransferProblem::free(x_a.inner, x_b.inner, grid).with_end_lattice(end_lattice.inner);
        problem.beta = beta;
        let r = solve_transfer(&problem, &consts_for(units)?).map_err(err)?;
        Ok(BTreeMap::from([
            ("K", vec![r.k.re, r.k.im]),
            ("Omega", vec![r.omega]),
            ("N_norm", vec![r.n_norm]),
            ("mean_disp", r.mean_disp.0.to_vec()),
            ("N", r.quantized.n.iter().map(|&n| n as f64).collect()),
            ("phase_step", vec![r.phase_step]),
            ("total_probability", vec![r.total_probability]),
        ]))
    }

    /// Runs a scenario file and returns `(report_json, passed)`.
    #[pyfunction]
    #[pyo3(signature = (path, units = None, seed = None))]
    fn run_scenario(path: PathBuf, units: Option<&str>, seed: Option<u64>) -> PyResult<(String, bool)> {
        let loaded = load_scenario(&path).map_err(err)?;
        let overrides = RunOverrides {
            units: units.map(unit_mode).transpose()?,
            seed,
        };
        let report = run(&loaded, &overrides).map_err(err)?;
        let text = canonical_json(&report.to_value().map_err(err)?);
        Ok((text, report.passed()))
    }
}
