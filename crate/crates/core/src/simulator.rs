//! Cluster-level failure and repair simulation.
//!
//! A [`StorageCluster`] holds one stripe of either code. Failures are
//! injected, repaired with a pluggable helper policy, and the resulting
//! traffic is checked against the linear repair model: every transmitted
//! symbol is a linear functional of the source, recovered here by probing the
//! code with unit source vectors.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::{
    for_each_subset, CheckMode, EnumerationConfig, FieldElement, FieldMatrix, PrimeField,
};
use crate::mbcr::{MbcrCodebook, MbcrError, MbcrShard};
use crate::mscr::{MscrCodebook, MscrError};
use crate::tradeoff::{mbcr_point, mscr_point, Rational, TradeoffError};
use crate::transcript::{Phase, RepairTranscript};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error(transparent)]
    Mbcr(#[from] MbcrError),
    #[error(transparent)]
    Mscr(#[from] MscrError),
    #[error(transparent)]
    Tradeoff(#[from] TradeoffError),
    #[error("bad failure set: {0}")]
    BadFailureSet(String),
    #[error("failure set mixes systematic and parity nodes")]
    MixedFailureUnsupported,
    #[error("need {need} live nodes, {got} available")]
    NotEnoughNodes { need: usize, got: usize },
}

impl SimError {
    /// Folds the per-family variants of common failure kinds together.
    fn normalize(self) -> Self {
        match self {
            SimError::Mscr(MscrError::MixedFailureUnsupported) => SimError::MixedFailureUnsupported,
            SimError::Mscr(MscrError::BadFailureSet(m)) => SimError::BadFailureSet(m),
            SimError::Mscr(MscrError::TooManyFailures { t, k }) => {
                SimError::BadFailureSet(format!("{t} failures exceed k = {k}"))
            }
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, SimError>;

/// Which helpers each new node downloads from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HelperPolicy {
    LowestIndex,
    Random(u64),
    Explicit(BTreeMap<usize, Vec<usize>>),
}

/// Either code family behind one interface. Node contents are plain symbol
/// vectors of length `alpha`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Code {
    Mbcr(MbcrCodebook),
    Mscr(MscrCodebook),
}

impl Code {
    pub fn field(&self) -> PrimeField {
        match self {
            Code::Mbcr(cb) => cb.field(),
            Code::Mscr(cb) => cb.field(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Code::Mbcr(cb) => cb.params().n,
            Code::Mscr(cb) => cb.n(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            Code::Mbcr(cb) => cb.params().k,
            Code::Mscr(cb) => cb.k(),
        }
    }

    pub fn d(&self) -> usize {
        match self {
            Code::Mbcr(cb) => cb.params().d,
            Code::Mscr(cb) => cb.d(),
        }
    }

    pub fn t(&self) -> usize {
        match self {
            Code::Mbcr(cb) => cb.params().t,
            Code::Mscr(cb) => cb.t(),
        }
    }

    pub fn alpha(&self) -> usize {
        match self {
            Code::Mbcr(cb) => cb.alpha(),
            Code::Mscr(cb) => cb.alpha(),
        }
    }

    pub fn file_size(&self) -> usize {
        match self {
            Code::Mbcr(cb) => cb.file_size(),
            Code::Mscr(cb) => cb.file_size(),
        }
    }

    /// `(beta1, beta2)` of the construction.
    pub fn betas(&self) -> (usize, usize) {
        match self {
            Code::Mbcr(_) => (2, 1),
            Code::Mscr(_) => (1, 1),
        }
    }

    pub fn encode(&self, source: &[FieldElement]) -> Result<Vec<Vec<FieldElement>>> {
        Ok(match self {
            Code::Mbcr(cb) => cb.encode(source)?.iter().map(MbcrShard::symbols).collect(),
            Code::Mscr(cb) => {
                let state = cb.encode(source)?;
                (0..cb.n()).map(|i| state.node_content(i)).collect()
            }
        })
    }

    /// Decodes from the first `k` of `nodes`.
    pub fn decode(&self, nodes: &[(usize, Vec<FieldElement>)]) -> Result<Vec<FieldElement>> {
        match self {
            Code::Mbcr(cb) => {
                let shards = nodes
                    .iter()
                    .map(|(i, syms)| MbcrShard::from_symbols(cb, *i, syms))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                Ok(cb.decode(&shards)?)
            }
            Code::Mscr(cb) => Ok(cb.decode(nodes)?),
        }
    }

    /// Resolves a helper policy into per-new-node helper sets. MSCR always
    /// uses every survivor.
    pub fn helper_sets(
        &self,
        failed: &[usize],
        policy: &HelperPolicy,
    ) -> Result<BTreeMap<usize, Vec<usize>>> {
        let n = self.n();
        let survivors: Vec<usize> = (0..n).filter(|i| !failed.contains(i)).collect();
        let d = match self {
            Code::Mbcr(cb) => cb.params().d,
            Code::Mscr(_) => survivors.len(),
        };
        if let (Code::Mbcr(_), HelperPolicy::Explicit(map)) = (self, policy) {
            return Ok(map.clone());
        }
        if survivors.len() < d {
            return Err(SimError::NotEnoughNodes {
                need: d,
                got: survivors.len(),
            });
        }
        let mut sets = BTreeMap::new();
        for &f in failed {
            let set = match policy {
                HelperPolicy::Random(seed) if matches!(self, Code::Mbcr(_)) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(f as u64));
                    let mut chosen: Vec<usize> =
                        survivors.choose_multiple(&mut rng, d).copied().collect();
                    chosen.sort_unstable();
                    chosen
                }
                _ => survivors[..d].to_vec(),
            };
            sets.insert(f, set);
        }
        Ok(sets)
    }

    /// Runs one cooperative repair and returns the rebuilt contents in the
    /// order of `failed`.
    pub fn repair(
        &self,
        failed: &[usize],
        helpers: &BTreeMap<usize, Vec<usize>>,
        nodes: &BTreeMap<usize, Vec<FieldElement>>,
    ) -> Result<(Vec<(usize, Vec<FieldElement>)>, RepairTranscript)> {
        match self {
            Code::Mbcr(cb) => {
                let mut shards = BTreeMap::new();
                for (&i, syms) in nodes {
                    shards.insert(i, MbcrShard::from_symbols(cb, i, syms)?);
                }
                let (repaired, tr) = cb.repair(failed, helpers, &shards)?;
                let cols = repaired.iter().map(|s| (s.node, s.symbols())).collect();
                Ok((cols, tr))
            }
            Code::Mscr(cb) => {
                if let Some((&node, set)) = helpers.iter().find(|(node, set)| {
                    set.len() != nodes.len() || set.iter().any(|h| !nodes.contains_key(h))
                        || !failed.contains(node)
                }) {
                    return Err(SimError::BadFailureSet(format!(
                        "MSCR repair of node {node} needs every survivor as helper, got {set:?}"
                    )));
                }
                let rep = cb.repair(failed, nodes).map_err(|e| SimError::from(e).normalize())?;
                Ok((rep.columns, rep.transcript))
            }
        }
    }

    /// Symbols per new node predicted by the cut-set bound for this repair.
    pub fn predicted_per_node(&self, t: usize) -> Result<Rational> {
        let b = self.file_size() as u64;
        let k = self.k() as u64;
        Ok(match self {
            Code::Mbcr(cb) => mbcr_point(b, k, cb.params().d as u64, t as u64)?.gamma,
            Code::Mscr(cb) => {
                let d = (cb.n() - t) as u64;
                mscr_point(b, k, d, t as u64)?.gamma
            }
        })
    }

    /// Number of symbols a repair of `t` nodes transmits.
    pub fn expected_total(&self, t: usize) -> usize {
        let (b1, b2) = self.betas();
        let d = match self {
            Code::Mbcr(cb) => cb.params().d,
            Code::Mscr(cb) => cb.n() - t,
        };
        t * (d * b1 + (t - 1) * b2)
    }

    fn check_failures(&self, failed: &[usize]) -> Result<()> {
        let distinct: BTreeSet<_> = failed.iter().collect();
        if failed.is_empty() || distinct.len() != failed.len() {
            return Err(SimError::BadFailureSet(format!(
                "need a non-empty set of distinct nodes, got {failed:?}"
            )));
        }
        if let Some(bad) = failed.iter().find(|&&f| f >= self.n()) {
            return Err(SimError::BadFailureSet(format!("node {bad} out of range")));
        }
        if let Code::Mscr(cb) = self {
            let k = cb.k();
            if failed.iter().any(|&f| f < k) && failed.iter().any(|&f| f >= k) {
                return Err(SimError::MixedFailureUnsupported);
            }
        }
        Ok(())
    }
}

fn unit_source(field: PrimeField, len: usize, j: usize) -> Vec<FieldElement> {
    (0..len)
        .map(|i| if i == j { field.one() } else { field.zero() })
        .collect()
}

/// `(n * alpha) x B` matrix whose row `node * alpha + slot` is the functional
/// applied to the source by that stored symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingMatrix {
    matrix: FieldMatrix,
    n: usize,
    alpha: usize,
}

impl EncodingMatrix {
    /// Wraps an `(n * alpha) x B` matrix; `None` if the row count is wrong.
    pub fn new(matrix: FieldMatrix, n: usize, alpha: usize) -> Option<Self> {
        (matrix.rows() == n * alpha).then_some(Self { matrix, n, alpha })
    }

    pub fn matrix(&self) -> &FieldMatrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn row_index(&self, node: usize, slot: usize) -> usize {
        node * self.alpha + slot
    }

    /// The rows spanning `W_node`.
    pub fn node_rows(&self, node: usize) -> FieldMatrix {
        self.nodes_rows(&[node])
    }

    pub fn nodes_rows(&self, nodes: &[usize]) -> FieldMatrix {
        let rows: Vec<usize> = nodes
            .iter()
            .flat_map(|&i| (0..self.alpha).map(move |s| i * self.alpha + s))
            .collect();
        self.matrix.select_rows(&rows)
    }
}

/// Builds the encoding matrix by encoding each unit source vector.
pub fn extract_encoding_matrix(code: &Code) -> EncodingMatrix {
    let field = code.field();
    let b = code.file_size();
    let (n, alpha) = (code.n(), code.alpha());
    let columns: Vec<Vec<Vec<FieldElement>>> = (0..b)
        .map(|j| {
            code.encode(&unit_source(field, b, j))
                .expect("unit vector has the source length")
        })
        .collect();
    let matrix =
        FieldMatrix::from_fn(field, n * alpha, b, |r, j| columns[j][r / alpha][r % alpha].value());
    EncodingMatrix { matrix, n, alpha }
}

/// Encoding matrix of the current cluster contents, probing each stored
/// position of a unit-source cluster put through the same repairs.
fn encoding_matrix_of(columns: &[BTreeMap<usize, Vec<FieldElement>>], n: usize, alpha: usize) -> EncodingMatrix {
    let field = columns[0][&0][0].field();
    let b = columns.len();
    let matrix = FieldMatrix::from_fn(field, n * alpha, b, |r, j| {
        columns[j][&(r / alpha)][r % alpha].value()
    });
    EncodingMatrix { matrix, n, alpha }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconstructionReport {
    pub mode: CheckMode,
    pub checked: usize,
    pub failures: Vec<Vec<usize>>,
}

impl ReconstructionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that every `k`-subset of nodes (or a seeded sample above the
/// enumeration cap) spans the whole source space.
pub fn verify_reconstruction(em: &EncodingMatrix, k: usize) -> ReconstructionReport {
    verify_reconstruction_with(em, k, &EnumerationConfig::default())
}

pub fn verify_reconstruction_with(
    em: &EncodingMatrix,
    k: usize,
    cfg: &EnumerationConfig,
) -> ReconstructionReport {
    let b = em.matrix.cols();
    let mut failures = Vec::new();
    let mut checked = 0;
    let (mode, _) = for_each_subset(em.n, k, cfg, |subset| {
        checked += 1;
        if em.nodes_rows(subset).rank() != b {
            failures.push(subset.to_vec());
        }
        true
    });
    ReconstructionReport {
        mode,
        checked,
        failures,
    }
}

/// A transcript entry with the encoding vector of each symbol as a row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorEntry {
    pub phase: Phase,
    pub from: usize,
    pub to: usize,
    pub vectors: FieldMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorTranscript {
    pub failed: Vec<usize>,
    pub entries: Vec<VectorEntry>,
}

impl VectorTranscript {
    /// Appends a copy of one of entry `index`'s vectors to it; the resulting
    /// transcript claims one more symbol than the protocol sends.
    pub fn inject_extra_symbol(&mut self, index: usize) {
        let entry = &mut self.entries[index];
        let dup = entry.vectors.select_rows(&[0]);
        entry.vectors = entry.vectors.vstack(&dup).expect("same width");
    }
}

/// Re-runs the repair on every unit source and collects, for each
/// transmitted symbol, its encoding vector over the source.
pub fn probe_transcript(
    code: &Code,
    failed: &[usize],
    helpers: &BTreeMap<usize, Vec<usize>>,
) -> Result<VectorTranscript> {
    let field = code.field();
    let b = code.file_size();
    let mut runs = Vec::with_capacity(b);
    for j in 0..b {
        let all = code.encode(&unit_source(field, b, j))?;
        let live: BTreeMap<usize, Vec<FieldElement>> = all
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !failed.contains(i))
            .collect();
        runs.push(code.repair(failed, helpers, &live)?.1);
    }
    let template = runs[0].shape();
    debug_assert!(runs.iter().all(|r| r.shape() == template));
    let entries = template
        .iter()
        .enumerate()
        .map(|(e, &(phase, from, to, count))| VectorEntry {
            phase,
            from,
            to,
            vectors: FieldMatrix::from_fn(field, count, b, |s, j| {
                runs[j].entries()[e].symbols[s].value()
            }),
        })
        .collect();
    Ok(VectorTranscript {
        failed: failed.to_vec(),
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TranscriptReport {
    pub violations: Vec<String>,
}

impl TranscriptReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn in_span(base: &FieldMatrix, rows: &FieldMatrix) -> bool {
    if rows.rows() == 0 {
        return true;
    }
    if base.rows() == 0 {
        return rows.is_zero();
    }
    base.vstack(rows).expect("same width").rank() == base.rank()
}

fn stack(field: PrimeField, width: usize, parts: &[&FieldMatrix]) -> FieldMatrix {
    parts
        .iter()
        .fold(FieldMatrix::zeros(field, 0, width), |acc, m| {
            acc.vstack(m).expect("same width")
        })
}

/// Checks a probed transcript against the linear repair model with
/// per-link limits `beta1` (helper to new node) and `beta2` (new node to new
/// node).
pub fn verify_transcript(
    tr: &VectorTranscript,
    em: &EncodingMatrix,
    beta1: usize,
    beta2: usize,
) -> TranscriptReport {
    let mut violations = Vec::new();
    let field = em.matrix.field();
    let width = em.matrix.cols();
    let failed: BTreeSet<usize> = tr.failed.iter().copied().collect();

    for node in 0..em.n {
        let rank = em.node_rows(node).rank();
        if rank != em.alpha {
            violations.push(format!("node {node} stores a {rank}-dimensional subspace, not {}", em.alpha));
        }
    }

    let mut phase1: BTreeMap<(usize, usize), Vec<&FieldMatrix>> = BTreeMap::new();
    let mut phase2: BTreeMap<(usize, usize), Vec<&FieldMatrix>> = BTreeMap::new();
    for e in &tr.entries {
        match e.phase {
            Phase::Download => {
                if failed.contains(&e.from) {
                    violations.push(format!("phase-1 symbol from failed node {}", e.from));
                }
                if !failed.contains(&e.to) {
                    violations.push(format!("phase-1 symbol to surviving node {}", e.to));
                }
                phase1.entry((e.to, e.from)).or_default().push(&e.vectors);
            }
            Phase::Exchange => {
                if !failed.contains(&e.from) || !failed.contains(&e.to) {
                    violations.push(format!(
                        "phase-2 symbol {} -> {} is not between new nodes",
                        e.from, e.to
                    ));
                }
                phase2.entry((e.from, e.to)).or_default().push(&e.vectors);
            }
        }
    }

    let mut received1: BTreeMap<usize, Vec<&FieldMatrix>> = BTreeMap::new();
    for (&(to, from), parts) in &phase1 {
        let sent = stack(field, width, parts);
        if sent.rows() > beta1 {
            violations.push(format!(
                "helper {from} sent {} symbols to new node {to}, beta1 = {beta1}",
                sent.rows()
            ));
        }
        if from < em.n && !in_span(&em.node_rows(from), &sent) {
            violations.push(format!("helper {from} sent symbols outside its stored subspace"));
        }
        received1.entry(to).or_default().extend(parts.iter().copied());
    }
    let mut received_all = received1.clone();
    for (&(from, to), parts) in &phase2 {
        let sent = stack(field, width, parts);
        if sent.rows() > beta2 {
            violations.push(format!(
                "new node {from} sent {} symbols to new node {to}, beta2 = {beta2}",
                sent.rows()
            ));
        }
        let known = stack(field, width, received1.get(&from).map_or(&[][..], |v| v.as_slice()));
        if !in_span(&known, &sent) {
            violations.push(format!(
                "new node {from} forwarded symbols it could not compute from phase 1"
            ));
        }
        received_all.entry(to).or_default().extend(parts.iter().copied());
    }
    for &node in &failed {
        let got = stack(field, width, received_all.get(&node).map_or(&[][..], |v| v.as_slice()));
        if node < em.n && !in_span(&got, &em.node_rows(node)) {
            violations.push(format!("new node {node} cannot rebuild its content"));
        }
    }
    TranscriptReport { violations }
}

/// True when every phase-1 symbol is, as a functional, one of the sender's
/// stored symbols or one of `extra[sender]` (for example a symbol the
/// sender can reconstruct without arithmetic on several stored values).
pub fn is_repair_by_transfer(
    tr: &VectorTranscript,
    em: &EncodingMatrix,
    extra: &BTreeMap<usize, FieldMatrix>,
) -> bool {
    tr.entries
        .iter()
        .filter(|e| e.phase == Phase::Download)
        .all(|e| {
            let stored = em.node_rows(e.from);
            let stored_rows: Vec<Vec<FieldElement>> =
                (0..stored.rows()).map(|r| stored.row(r)).collect();
            let extra_rows: Vec<Vec<FieldElement>> = extra
                .get(&e.from)
                .map(|m| (0..m.rows()).map(|r| m.row(r)).collect())
                .unwrap_or_default();
            (0..e.vectors.rows()).all(|s| {
                let v = e.vectors.row(s);
                stored_rows.contains(&v) || extra_rows.contains(&v)
            })
        })
}

/// Encoding vector of each MBCR node's dropped component of `M v_i`.
pub fn mbcr_dropped_functionals(cb: &MbcrCodebook) -> BTreeMap<usize, FieldMatrix> {
    let field = cb.field();
    let b = cb.file_size();
    let n = cb.params().n;
    let values: Vec<Vec<FieldElement>> = (0..b)
        .map(|j| {
            cb.encode(&unit_source(field, b, j))
                .expect("unit vector has the source length")
                .iter()
                .map(|s| cb.missing_component(s).expect("encoder output is consistent"))
                .collect()
        })
        .collect();
    (0..n)
        .map(|i| (i, FieldMatrix::from_fn(field, 1, b, |_, j| values[j][i].value())))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BandwidthReport {
    pub total: usize,
    pub per_node: BTreeMap<usize, usize>,
    /// Cut-set prediction of the symbols sent to each new node.
    #[serde(serialize_with = "serialize_rational")]
    pub predicted: Rational,
    pub optimal: bool,
}

fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl BandwidthReport {
    pub fn from_transcript(tr: &RepairTranscript, predicted: &Rational) -> Self {
        let per_node = tr.per_node_totals();
        let optimal = !per_node.is_empty()
            && per_node
                .values()
                .all(|&v| Rational::from_integer((v as i64).into()) == *predicted);
        Self {
            total: tr.grand_total(),
            per_node,
            predicted: predicted.clone(),
            optimal,
        }
    }

    /// The same report with node indices shifted to 1-based numbering.
    pub fn one_based(&self) -> Self {
        Self {
            per_node: self.per_node.iter().map(|(&k, &v)| (k + 1, v)).collect(),
            ..self.clone()
        }
    }

    /// Sums the reports of independent stripes.
    pub fn merge(reports: &[BandwidthReport]) -> Option<Self> {
        if reports.is_empty() {
            return None;
        }
        let mut per_node = BTreeMap::new();
        for r in reports {
            for (&k, &v) in &r.per_node {
                *per_node.entry(k).or_insert(0) += v;
            }
        }
        Some(Self {
            total: reports.iter().map(|r| r.total).sum(),
            per_node,
            predicted: reports.iter().map(|r| &r.predicted).sum(),
            optimal: reports.iter().all(|r| r.optimal),
        })
    }
}

/// One stripe of a storage system: the code plus the content of each live
/// node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StorageCluster {
    code: Code,
    nodes: BTreeMap<usize, Vec<FieldElement>>,
    failed: BTreeSet<usize>,
}

impl StorageCluster {
    pub fn new(code: Code, source: &[FieldElement]) -> Result<Self> {
        let nodes = code.encode(source)?.into_iter().enumerate().collect();
        Ok(Self {
            code,
            nodes,
            failed: BTreeSet::new(),
        })
    }

    /// A cluster holding already-encoded contents, some possibly missing.
    pub fn from_nodes(code: Code, nodes: BTreeMap<usize, Vec<FieldElement>>) -> Result<Self> {
        let n = code.n();
        if let Some(bad) = nodes.keys().find(|&&i| i >= n) {
            return Err(SimError::BadFailureSet(format!("node {bad} out of range")));
        }
        let failed = (0..n).filter(|i| !nodes.contains_key(i)).collect();
        Ok(Self {
            code,
            nodes,
            failed,
        })
    }

    pub fn code(&self) -> &Code {
        &self.code
    }

    pub fn nodes(&self) -> &BTreeMap<usize, Vec<FieldElement>> {
        &self.nodes
    }

    pub fn failed(&self) -> &BTreeSet<usize> {
        &self.failed
    }

    pub fn fail(&mut self, nodes: &[usize]) -> Result<()> {
        self.code.check_failures(nodes)?;
        for &i in nodes {
            self.nodes.remove(&i);
            self.failed.insert(i);
        }
        Ok(())
    }

    pub fn decode(&self, use_nodes: Option<&[usize]>) -> Result<Vec<FieldElement>> {
        let k = self.code.k();
        let chosen: Vec<usize> = match use_nodes {
            Some(list) => list.to_vec(),
            None => self.nodes.keys().copied().collect(),
        };
        let picked: Vec<(usize, Vec<FieldElement>)> = chosen
            .iter()
            .filter_map(|i| self.nodes.get(i).map(|c| (*i, c.clone())))
            .collect();
        if picked.len() < k {
            return Err(SimError::NotEnoughNodes {
                need: k,
                got: picked.len(),
            });
        }
        self.code.decode(&picked)
    }
}

/// Output of [`run_scenario`].
#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub helpers: BTreeMap<usize, Vec<usize>>,
    pub transcript: RepairTranscript,
    pub report: BandwidthReport,
}

/// Fails `failures` (on top of any nodes already missing), repairs them
/// together and reinstalls the rebuilt contents.
pub fn run_scenario(
    cluster: &mut StorageCluster,
    failures: &[usize],
    policy: &HelperPolicy,
) -> Result<ScenarioOutcome> {
    let code = cluster.code.clone();
    code.check_failures(failures)?;
    let failed: Vec<usize> = {
        let mut all: BTreeSet<usize> = cluster.failed.clone();
        all.extend(failures.iter().copied());
        all.into_iter().collect()
    };
    code.check_failures(&failed)?;
    for &i in &failed {
        cluster.nodes.remove(&i);
    }
    cluster.failed = failed.iter().copied().collect();
    let helpers = code.helper_sets(&failed, policy)?;
    let (columns, transcript) = code.repair(&failed, &helpers, &cluster.nodes)?;
    for (i, content) in columns {
        cluster.nodes.insert(i, content);
        cluster.failed.remove(&i);
    }
    let predicted = code.predicted_per_node(failed.len())?;
    let report = BandwidthReport::from_transcript(&transcript, &predicted);
    Ok(ScenarioOutcome {
        helpers,
        transcript,
        report,
    })
}

/// Encoding matrix of a cluster after repairing `failed` from an intact
/// encoding, obtained by repeating the repair on each unit source.
pub fn encoding_matrix_after_repair(
    code: &Code,
    failed: &[usize],
    policy: &HelperPolicy,
) -> Result<EncodingMatrix> {
    let field = code.field();
    let b = code.file_size();
    let mut columns = Vec::with_capacity(b);
    for j in 0..b {
        let mut cluster = StorageCluster::new(code.clone(), &unit_source(field, b, j))?;
        run_scenario(&mut cluster, failed, policy)?;
        columns.push(cluster.nodes);
    }
    Ok(encoding_matrix_of(&columns, code.n(), code.alpha()))
}
