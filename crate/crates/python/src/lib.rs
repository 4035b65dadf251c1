use std::collections::BTreeMap;

use coopregen::field::{FieldElement, PrimeField as CorePrimeField};
use coopregen::mbcr::{MbcrCodebook, MbcrParams};
use coopregen::mscr::{MscrCodebook, MscrOptions};
use coopregen::simulator::{
    self, extract_encoding_matrix, probe_transcript, run_scenario, verify_reconstruction,
    verify_transcript, HelperPolicy, StorageCluster,
};
use coopregen::tradeoff;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn values(v: &[FieldElement]) -> Vec<u32> {
    v.iter().map(|x| x.value()).collect()
}

fn elems(field: CorePrimeField, v: &[i64]) -> Vec<FieldElement> {
    v.iter().map(|&x| field.elem(x)).collect()
}

fn policy(helper_seed: Option<u64>) -> HelperPolicy {
    helper_seed.map_or(HelperPolicy::LowestIndex, HelperPolicy::Random)
}

/// Integers modulo a prime.
#[pyclass(frozen)]
struct PrimeField(CorePrimeField);

#[pymethods]
impl PrimeField {
    #[new]
    fn new(q: u64) -> PyResult<Self> {
        CorePrimeField::new(q).map(Self).map_err(err)
    }

    #[getter]
    fn q(&self) -> u32 {
        self.0.modulus()
    }

    fn add(&self, a: i64, b: i64) -> u32 {
        (self.0.elem(a) + self.0.elem(b)).value()
    }

    fn mul(&self, a: i64, b: i64) -> u32 {
        (self.0.elem(a) * self.0.elem(b)).value()
    }

    fn inv(&self, a: i64) -> PyResult<u32> {
        self.0.elem(a).inv().map(|x| x.value()).map_err(err)
    }

    fn pow(&self, a: i64, e: u64) -> u32 {
        self.0.elem(a).pow(e).value()
    }

    fn rank(&self, rows: Vec<Vec<i64>>) -> PyResult<usize> {
        coopregen::field::FieldMatrix::from_literal(self.0, &rows)
            .map(|m| m.rank())
            .map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("PrimeField({})", self.0.modulus())
    }
}

/// Named operating points as `{label: (alpha, gamma, beta1, beta2)}` with
/// exact fractions rendered as strings.
#[pyfunction]
#[pyo3(signature = (b, k, d, t=1))]
fn operating_points(b: u64, k: u64, d: u64, t: u64) -> PyResult<BTreeMap<String, [String; 4]>> {
    let points = [
        tradeoff::msr_point(b, k, d),
        tradeoff::mbr_point(b, k, d),
        tradeoff::mscr_point(b, k, d, t),
        tradeoff::mbcr_point(b, k, d, t),
    ];
    let mut out = BTreeMap::new();
    for p in points {
        let p = p.map_err(err)?;
        out.insert(
            p.label.to_string(),
            [p.alpha, p.gamma, p.beta1, p.beta2].map(|r| r.to_string()),
        );
    }
    Ok(out)
}

/// A cooperative regenerating code of either family.
#[pyclass(frozen)]
struct Code(simulator::Code);

#[pymethods]
impl Code {
    #[staticmethod]
    #[pyo3(signature = (q, n, k, d, t, points=None))]
    fn mbcr(q: u64, n: usize, k: usize, d: usize, t: usize, points: Option<Vec<i64>>) -> PyResult<Self> {
        let field = CorePrimeField::new(q).map_err(err)?;
        let points = points.map(|p| elems(field, &p));
        let cb = MbcrCodebook::build(field, MbcrParams { n, k, d, t }, points.as_deref()).map_err(err)?;
        Ok(Self(simulator::Code::Mbcr(cb)))
    }

    #[staticmethod]
    fn mscr(q: u64, k: usize, t: usize) -> PyResult<Self> {
        let field = CorePrimeField::new(q).map_err(err)?;
        let cb = MscrCodebook::build(field, k, t, MscrOptions::default()).map_err(err)?;
        Ok(Self(simulator::Code::Mscr(cb)))
    }

    #[getter]
    fn family(&self) -> &'static str {
        match self.0 {
            simulator::Code::Mbcr(_) => "mbcr",
            simulator::Code::Mscr(_) => "mscr",
        }
    }

    #[getter]
    fn q(&self) -> u32 {
        self.0.field().modulus()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    #[getter]
    fn t(&self) -> usize {
        self.0.t()
    }

    #[getter]
    fn alpha(&self) -> usize {
        self.0.alpha()
    }

    #[getter]
    fn file_size(&self) -> usize {
        self.0.file_size()
    }

    fn encode(&self, source: Vec<i64>) -> PyResult<Vec<Vec<u32>>> {
        let nodes = self.0.encode(&elems(self.0.field(), &source)).map_err(err)?;
        Ok(nodes.iter().map(|n| values(n)).collect())
    }

    /// Decodes from `{node: contents}` using the first k entries.
    fn decode(&self, nodes: BTreeMap<usize, Vec<i64>>) -> PyResult<Vec<u32>> {
        let field = self.0.field();
        let nodes: Vec<_> = nodes.into_iter().map(|(i, v)| (i, elems(field, &v))).collect();
        self.0.decode(&nodes).map(|v| values(&v)).map_err(err)
    }

    /// Every k-subset (or a sample) spans the source space.
    fn verify_reconstruction(&self) -> bool {
        verify_reconstruction(&extract_encoding_matrix(&self.0), self.0.k()).passed()
    }

    /// Subspace audit of one repair; returns the list of violations.
    #[pyo3(signature = (failed, helper_seed=None))]
    fn audit_repair(&self, failed: Vec<usize>, helper_seed: Option<u64>) -> PyResult<Vec<String>> {
        let helpers = self.0.helper_sets(&failed, &policy(helper_seed)).map_err(err)?;
        let vt = probe_transcript(&self.0, &failed, &helpers).map_err(err)?;
        let (b1, b2) = self.0.betas();
        Ok(verify_transcript(&vt, &extract_encoding_matrix(&self.0), b1, b2).violations)
    }

    fn __repr__(&self) -> String {
        format!(
            "Code({}, q={}, n={}, k={}, d={}, t={})",
            self.family(),
            self.q(),
            self.n(),
            self.k(),
            self.d(),
            self.t()
        )
    }
}

/// Result of one repair round.
#[pyclass(frozen, get_all)]
struct RepairReport {
    total: usize,
    per_node: BTreeMap<usize, usize>,
    predicted: String,
    optimal: bool,
    helpers: BTreeMap<usize, Vec<usize>>,
    messages: Vec<(u8, usize, usize, Vec<u32>)>,
}

#[pymethods]
impl RepairReport {
    fn __repr__(&self) -> String {
        format!(
            "RepairReport(total={}, per_node={:?}, predicted={}, optimal={})",
            self.total, self.per_node, self.predicted, self.optimal
        )
    }
}

/// An in-memory set of storage nodes holding one encoded stripe.
#[pyclass]
struct Cluster(StorageCluster);

#[pymethods]
impl Cluster {
    #[new]
    fn new(code: &Code, source: Vec<i64>) -> PyResult<Self> {
        let source = elems(code.0.field(), &source);
        StorageCluster::new(code.0.clone(), &source).map(Self).map_err(err)
    }

    fn nodes(&self) -> BTreeMap<usize, Vec<u32>> {
        self.0.nodes().iter().map(|(&i, v)| (i, values(v))).collect()
    }

    fn failed(&self) -> Vec<usize> {
        self.0.failed().iter().copied().collect()
    }

    fn fail(&mut self, nodes: Vec<usize>) -> PyResult<()> {
        self.0.fail(&nodes).map_err(err)
    }

    #[pyo3(signature = (failures, helper_seed=None))]
    fn repair(&mut self, failures: Vec<usize>, helper_seed: Option<u64>) -> PyResult<RepairReport> {
        let out = run_scenario(&mut self.0, &failures, &policy(helper_seed)).map_err(err)?;
        Ok(RepairReport {
            total: out.report.total,
            per_node: out.report.per_node,
            predicted: out.report.predicted.to_string(),
            optimal: out.report.optimal,
            helpers: out.helpers,
            messages: out
                .transcript
                .entries()
                .iter()
                .map(|e| (e.phase.number(), e.from, e.to, values(&e.symbols)))
                .collect(),
        })
    }

    #[pyo3(signature = (nodes=None))]
    fn decode(&self, nodes: Option<Vec<usize>>) -> PyResult<Vec<u32>> {
        self.0.decode(nodes.as_deref()).map(|v| values(&v)).map_err(err)
    }
}

#[pymodule]
fn coopregen_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PrimeField>()?;
    m.add_class::<Code>()?;
    m.add_class::<Cluster>()?;
    m.add_class::<RepairReport>()?;
    m.add_function(wrap_pyfunction!(operating_points, m)?)?;
    Ok(())
}
