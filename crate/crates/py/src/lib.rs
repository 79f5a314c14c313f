//! Python bindings: a `Quiver` object holding a cache of realized modules,
//! with Hom/Ext dimensions, stratifying-system checks and the searches
//! behind the classification.

use apq_core::catalog::{self, parse_sequence, CatalogError, Descriptor};
use apq_core::exactnum::parse_rational;
use apq_core::homcalc;
use apq_core::quiverrep::{self, Representation};
use apq_core::strata::{self, ModuleBank, Side, StrataError, VerificationReport};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn catalog_err(e: CatalogError) -> PyErr {
    match e {
        CatalogError::CertificationFailed { .. } | CatalogError::Hom(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn strata_err(e: StrataError) -> PyErr {
    match e {
        StrataError::Catalog(c) => catalog_err(c),
        StrataError::UnknownSide(_) | StrataError::OutsideFamilies(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Result of a stratifying-system or classification check.
#[pyclass(frozen, get_all)]
struct Report {
    passed: bool,
    /// (kind, j, i, dim, witness)
    violations: Vec<(String, usize, usize, usize, Option<String>)>,
    found: Vec<String>,
    expected: Vec<String>,
    json: String,
}

impl From<VerificationReport> for Report {
    fn from(r: VerificationReport) -> Self {
        Report {
            passed: r.passed,
            violations: r
                .violations
                .iter()
                .map(|v| (v.kind.to_string(), v.j, v.i, v.dim, v.witness.clone()))
                .collect(),
            found: r.found.clone(),
            expected: r.expected.clone(),
            json: serde_json::to_string(&r).expect("report serializes"),
        }
    }
}

#[pymethods]
impl Report {
    fn __bool__(&self) -> bool {
        self.passed
    }

    fn __repr__(&self) -> String {
        format!("Report(passed={}, violations={})", self.passed, self.violations.len())
    }
}

/// A realized catalog module.
#[pyclass(frozen)]
struct Module {
    descriptor: String,
    rep: Representation,
    retries: usize,
}

#[pymethods]
impl Module {
    #[getter]
    fn descriptor(&self) -> String {
        self.descriptor.clone()
    }

    #[getter]
    fn dims(&self) -> Vec<i64> {
        self.rep.dim_vector()
    }

    #[getter]
    fn retries(&self) -> usize {
        self.retries
    }

    fn supp(&self) -> Vec<usize> {
        self.rep.supp().into_iter().collect()
    }

    fn sincere(&self) -> bool {
        self.rep.sincere()
    }

    fn end_dim(&self) -> usize {
        homcalc::end_dim(&self.rep)
    }

    fn self_ext(&self) -> usize {
        homcalc::self_ext(&self.rep)
    }

    /// The representation as JSON (dimensions and exact matrices).
    fn to_json(&self) -> String {
        serde_json::to_string(&self.rep.to_json()).expect("representation serializes")
    }

    fn __repr__(&self) -> String {
        format!("Module({}, dims={:?})", self.descriptor, self.rep.dim_vector())
    }
}

/// The quiver Ã(p,q) together with a realization seed and a cache.
#[pyclass(frozen)]
struct Quiver {
    bank: ModuleBank,
}

impl Quiver {
    fn desc(&self, text: &str) -> PyResult<Descriptor> {
        let d: Descriptor = text.parse().map_err(catalog_err)?;
        d.validate(self.bank.quiver()).map_err(catalog_err)?;
        Ok(d)
    }

    fn tau_max(&self, tau_max: Option<usize>) -> usize {
        tau_max.unwrap_or_else(|| strata::default_tau_max(self.bank.quiver()))
    }
}

#[pymethods]
impl Quiver {
    #[new]
    #[pyo3(signature = (p, q, seed = 0, lambda_ = "1"))]
    fn new(p: usize, q: usize, seed: u64, lambda_: &str) -> PyResult<Self> {
        let quiver = quiverrep::Quiver::new(p, q).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let lambda = parse_rational(lambda_).map_err(|e| PyValueError::new_err(e.to_string()))?;
        if lambda == apq_core::exactnum::rat(0) {
            return Err(PyValueError::new_err("lambda must be nonzero"));
        }
        Ok(Quiver {
            bank: ModuleBank::new(&quiver, seed).with_lambda(lambda),
        })
    }

    #[getter]
    fn p(&self) -> usize {
        self.bank.quiver().p()
    }

    #[getter]
    fn q(&self) -> usize {
        self.bank.quiver().q()
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.bank.quiver().num_vertices()
    }

    fn cartan(&self) -> Vec<Vec<i64>> {
        homcalc::cartan(self.bank.quiver())
    }

    fn coxeter(&self) -> Vec<Vec<i64>> {
        homcalc::coxeter(self.bank.quiver())
    }

    fn null_root(&self) -> Vec<i64> {
        homcalc::null_root(self.bank.quiver())
    }

    fn euler_form(&self, x: Vec<i64>, y: Vec<i64>) -> PyResult<i64> {
        homcalc::euler_form(self.bank.quiver(), &x, &y).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Dimension vector of a descriptor, without realizing it.
    fn dim(&self, desc: &str) -> PyResult<Vec<i64>> {
        self.bank.dim(&self.desc(desc)?).map_err(catalog_err)
    }

    fn realize(&self, desc: &str) -> PyResult<Module> {
        let d = self.desc(desc)?;
        let r = self.bank.get(&d).map_err(catalog_err)?;
        Ok(Module {
            descriptor: d.to_string(),
            rep: r.rep.clone(),
            retries: r.cert.retries,
        })
    }

    /// Symbolic τ^k of a descriptor.
    fn tau(&self, desc: &str, k: i64) -> PyResult<String> {
        let d = self.desc(desc)?;
        catalog::tau_desc(&d, k, self.bank.quiver())
            .map(|d| d.to_string())
            .map_err(catalog_err)
    }

    fn hom_dim(&self, py: Python<'_>, left: &str, right: &str) -> PyResult<usize> {
        let (l, r) = (self.desc(left)?, self.desc(right)?);
        py.detach(|| self.bank.hom(&l, &r)).map_err(strata_err)
    }

    fn ext_dim(&self, py: Python<'_>, left: &str, right: &str) -> PyResult<usize> {
        let (l, r) = (self.desc(left)?, self.desc(right)?);
        py.detach(|| self.bank.ext(&l, &r)).map_err(strata_err)
    }

    fn is_isomorphic(&self, a: &Module, b: &Module) -> PyResult<bool> {
        homcalc::is_isomorphic(&a.rep, &b.rep, self.bank.seed())
            .map(|v| v.isomorphic)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Checks a comma-separated sequence such as "S(4),F*,G*,P(0)".
    fn is_stratifying(&self, py: Python<'_>, sequence: &str) -> PyResult<Report> {
        let seq = parse_sequence(sequence, self.bank.quiver()).map_err(catalog_err)?;
        for d in &seq {
            d.validate(self.bank.quiver()).map_err(catalog_err)?;
        }
        py.detach(|| strata::is_stratifying(&seq, &self.bank))
            .map(Report::from)
            .map_err(strata_err)
    }

    #[pyo3(signature = (side, tau_max = None, jobs = 1))]
    fn enumerate_y(&self, py: Python<'_>, side: &str, tau_max: Option<usize>, jobs: usize) -> PyResult<Vec<String>> {
        let side: Side = side.parse().map_err(strata_err)?;
        let t = self.tau_max(tau_max);
        let found = py
            .detach(|| strata::enumerate_y(side, t, &self.bank, jobs.max(1)))
            .map_err(strata_err)?;
        Ok(found.iter().map(ToString::to_string).collect())
    }

    #[pyo3(signature = (side, tau_max = None))]
    fn predicted_y(&self, side: &str, tau_max: Option<usize>) -> PyResult<Vec<String>> {
        let side: Side = side.parse().map_err(strata_err)?;
        let t = self.tau_max(tau_max);
        Ok(strata::predicted_y(side, t, self.bank.quiver())
            .iter()
            .map(ToString::to_string)
            .collect())
    }

    #[pyo3(signature = (y, tau_max = None, jobs = 1))]
    fn find_completion(&self, py: Python<'_>, y: &str, tau_max: Option<usize>, jobs: usize) -> PyResult<Vec<String>> {
        let y = self.desc(y)?;
        let t = self.tau_max(tau_max);
        let found = py
            .detach(|| strata::find_completion(&y, t, &self.bank, jobs.max(1)))
            .map_err(strata_err)?;
        Ok(found.iter().map(ToString::to_string).collect())
    }

    fn predicted_completion(&self, y: &str) -> PyResult<String> {
        let y = self.desc(y)?;
        strata::predicted_completion(&y, self.bank.quiver())
            .map(|d| d.to_string())
            .map_err(strata_err)
    }

    #[pyo3(signature = (tau_max = None, jobs = 1))]
    fn check_theorem(&self, py: Python<'_>, tau_max: Option<usize>, jobs: usize) -> PyResult<Report> {
        let t = self.tau_max(tau_max);
        py.detach(|| strata::check_theorem(t, &self.bank, jobs.max(1)))
            .map(Report::from)
            .map_err(strata_err)
    }

    fn __repr__(&self) -> String {
        format!("Quiver(p={}, q={}, seed={})", self.p(), self.q(), self.bank.seed())
    }
}

#[pymodule]
fn apq(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Quiver>()?;
    m.add_class::<Module>()?;
    m.add_class::<Report>()?;
    Ok(())
}
