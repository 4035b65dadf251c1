//! Minimum-bandwidth cooperative regenerating code built on a bilinear form.
//!
//! The `B = k(2d+t-k)` source symbols fill a `d x (d+t)` matrix
//! `M = [[A, B], [C, 0]]`. Node `i` owns the two linear maps `x -> x^T M v_i`
//! and `y -> u_i^T M y`, i.e. the vectors `M v_i` and `u_i^T M`. One component
//! of `M v_i` is implied by the others through `u_i^T (M v_i) = (u_i^T M) v_i`,
//! so each node stores `2d + t - 1` symbols.
//!
//! Node indices are 0-based throughout.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::field::{
    check_mbcr_conditions, vandermonde, ConditionReport, FieldElement, FieldError, FieldMatrix,
    PrimeField,
};
use crate::transcript::{Phase, RepairTranscript};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MbcrError {
    #[error("parameters out of range: {0}")]
    ParamsOutOfRange(String),
    #[error("field of size {q} is too small for {n} nodes")]
    FieldTooSmall { q: u32, n: usize },
    #[error("U/V regularity conditions failed: {0:?}")]
    ConditionsFailed(ConditionReport),
    #[error("expected {expected} symbols, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("symbol from F_{got} given to a code over F_{expected}")]
    WrongField { expected: u32, got: u32 },
    #[error("inconsistent shard: {0}")]
    InconsistentShard(String),
    #[error("bad helper set: {0}")]
    BadHelperSet(String),
    #[error("need {need} shards, got {got}")]
    NotEnoughShards { need: usize, got: usize },
    #[error("shard for node {0} supplied twice")]
    DuplicateShard(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type Result<T> = std::result::Result<T, MbcrError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MbcrParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub t: usize,
}

impl MbcrParams {
    pub fn validate(&self) -> Result<()> {
        let MbcrParams { n, k, d, t } = *self;
        if k == 0 || t == 0 || k > d || d + t > n {
            return Err(MbcrError::ParamsOutOfRange(format!(
                "need n - t >= d >= k >= 1 and t >= 1, got n={n} k={k} d={d} t={t}"
            )));
        }
        Ok(())
    }

    /// `B = k (2d + t - k)`.
    pub fn file_size(&self) -> usize {
        self.k * (2 * self.d + self.t - self.k)
    }

    /// Symbols per node, `2d + t - 1`.
    pub fn alpha(&self) -> usize {
        2 * self.d + self.t - 1
    }
}

/// Public description of an MBCR code: the encoding matrices and the index of
/// the component of `M v_i` each node leaves out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MbcrCodebook {
    field: PrimeField,
    params: MbcrParams,
    u: FieldMatrix,
    v: FieldMatrix,
    drop_index: Vec<usize>,
    conditions: ConditionReport,
}

/// The default evaluation points `1, 2, ..., n-1, 0`.
pub fn default_points(field: PrimeField, n: usize) -> Vec<FieldElement> {
    (1..=n).map(|i| field.elem((i % n) as i64)).collect()
}

impl MbcrCodebook {
    /// Vandermonde `U` (d rows) and `V` (d+t rows) over shared evaluation
    /// points, `1, 2, ..., n-1, 0` unless given.
    pub fn build(
        field: PrimeField,
        params: MbcrParams,
        points: Option<&[FieldElement]>,
    ) -> Result<Self> {
        params.validate()?;
        let points = match points {
            Some(p) => {
                if p.len() != params.n {
                    return Err(MbcrError::WrongLength {
                        expected: params.n,
                        got: p.len(),
                    });
                }
                p.to_vec()
            }
            None => {
                if (field.modulus() as usize) < params.n {
                    return Err(MbcrError::FieldTooSmall {
                        q: field.modulus(),
                        n: params.n,
                    });
                }
                default_points(field, params.n)
            }
        };
        let u = vandermonde(field, params.d, &points)?;
        let v = vandermonde(field, params.d + params.t, &points)?;
        Self::from_matrices(field, params.k, params.t, u, v)
    }

    /// Uses explicit `U` (d x n) and `V` ((d+t) x n), checking all four
    /// regularity conditions.
    pub fn from_matrices(
        field: PrimeField,
        k: usize,
        t: usize,
        u: FieldMatrix,
        v: FieldMatrix,
    ) -> Result<Self> {
        let (d, n) = u.shape();
        let params = MbcrParams { n, k, d, t };
        params.validate()?;
        if u.field() != field || v.field() != field {
            return Err(MbcrError::WrongField {
                expected: field.modulus(),
                got: if u.field() != field { u.field() } else { v.field() }.modulus(),
            });
        }
        if v.shape() != (d + t, n) {
            return Err(MbcrError::ParamsOutOfRange(format!(
                "V must be {}x{n}, got {:?}",
                d + t,
                v.shape()
            )));
        }
        let conditions = check_mbcr_conditions(&u, &v, k)?;
        if !conditions.all_hold() {
            return Err(MbcrError::ConditionsFailed(conditions));
        }
        let drop_index = (0..n)
            .map(|i| {
                (0..d)
                    .find(|&r| u.value(r, i) != 0)
                    .ok_or(MbcrError::ConditionsFailed(conditions))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            field,
            params,
            u,
            v,
            drop_index,
            conditions,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn params(&self) -> MbcrParams {
        self.params
    }

    pub fn u(&self) -> &FieldMatrix {
        &self.u
    }

    pub fn v(&self) -> &FieldMatrix {
        &self.v
    }

    pub fn drop_index(&self, node: usize) -> usize {
        self.drop_index[node]
    }

    pub fn conditions(&self) -> &ConditionReport {
        &self.conditions
    }

    pub fn file_size(&self) -> usize {
        self.params.file_size()
    }

    pub fn alpha(&self) -> usize {
        self.params.alpha()
    }

    fn u_col(&self, i: usize) -> Vec<FieldElement> {
        self.u.column(i)
    }

    fn v_col(&self, i: usize) -> Vec<FieldElement> {
        self.v.column(i)
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node >= self.params.n {
            return Err(MbcrError::InconsistentShard(format!(
                "node {node} outside 0..{}",
                self.params.n
            )));
        }
        Ok(())
    }

    /// `B(x, y) = x^T M y` evaluated directly from a source matrix.
    pub fn bilinear(&self, source: &MbcrSource, x: &[FieldElement], y: &[FieldElement]) -> Result<FieldElement> {
        let my = source.m.mul_vec(y)?;
        Ok(dot(self.field, x, &my))
    }

    pub fn encode(&self, source: &[FieldElement]) -> Result<Vec<MbcrShard>> {
        let src = MbcrSource::from_symbols(self, source)?;
        (0..self.params.n).map(|i| self.encode_node(&src, i)).collect()
    }

    fn encode_node(&self, src: &MbcrSource, node: usize) -> Result<MbcrShard> {
        let full_col = src.m.mul_vec(&self.v_col(node))?;
        let row_part = src.m.vec_mul(&self.u_col(node))?;
        Ok(MbcrShard::from_parts(self, node, &full_col, row_part))
    }

    /// Recovers the omitted component of `M v_i` from the identity
    /// `u_i^T (M v_i) = (u_i^T M) v_i`.
    pub fn missing_component(&self, shard: &MbcrShard) -> Result<FieldElement> {
        self.check_shard(shard)?;
        let i = shard.node;
        let r = shard.drop_index;
        let u_i = self.u_col(i);
        let rhs = dot(self.field, &shard.row_part, &self.v_col(i));
        let known: FieldElement = shard
            .col_part
            .iter()
            .zip((0..self.params.d).filter(|&s| s != r))
            .fold(self.field.zero(), |acc, (&val, s)| acc + u_i[s] * val);
        Ok((rhs - known).div(u_i[r])?)
    }

    /// The full `M v_i` held implicitly by a shard.
    pub fn full_column(&self, shard: &MbcrShard) -> Result<Vec<FieldElement>> {
        let missing = self.missing_component(shard)?;
        let mut col = shard.col_part.clone();
        col.insert(shard.drop_index, missing);
        Ok(col)
    }

    fn check_shard(&self, shard: &MbcrShard) -> Result<()> {
        self.check_node(shard.node)?;
        let d = self.params.d;
        if shard.col_part.len() != d - 1 || shard.row_part.len() != d + self.params.t {
            return Err(MbcrError::InconsistentShard(format!(
                "node {} holds {}+{} symbols, expected {}+{}",
                shard.node,
                shard.col_part.len(),
                shard.row_part.len(),
                d - 1,
                d + self.params.t
            )));
        }
        if shard.drop_index != self.drop_index[shard.node] {
            return Err(MbcrError::InconsistentShard(format!(
                "node {} drops component {}, codebook says {}",
                shard.node, shard.drop_index, self.drop_index[shard.node]
            )));
        }
        if let Some(bad) = shard.symbols_iter().find(|s| s.field() != self.field) {
            return Err(MbcrError::WrongField {
                expected: self.field.modulus(),
                got: bad.field().modulus(),
            });
        }
        Ok(())
    }

    /// Phase-1 message from a helper to a new node:
    /// `(B(u_new, v_helper), B(u_helper, v_new))`, computed from the helper's
    /// shard alone.
    pub fn helper_message(
        &self,
        helper: &MbcrShard,
        new_node: usize,
    ) -> Result<(FieldElement, FieldElement)> {
        self.check_node(new_node)?;
        let m_v_helper = self.full_column(helper)?;
        let first = dot(self.field, &self.u_col(new_node), &m_v_helper);
        let second = dot(self.field, &helper.row_part, &self.v_col(new_node));
        Ok((first, second))
    }

    /// The d lowest-indexed survivors for every failed node.
    pub fn default_helpers(&self, failed: &[usize]) -> BTreeMap<usize, Vec<usize>> {
        let survivors: Vec<usize> = (0..self.params.n)
            .filter(|i| !failed.contains(i))
            .take(self.params.d)
            .collect();
        failed.iter().map(|&f| (f, survivors.clone())).collect()
    }

    fn check_repair_request(
        &self,
        failed: &[usize],
        helpers: &BTreeMap<usize, Vec<usize>>,
        shards: &BTreeMap<usize, MbcrShard>,
    ) -> Result<()> {
        let MbcrParams { n, d, t, .. } = self.params;
        let failed_set: BTreeSet<usize> = failed.iter().copied().collect();
        if failed.len() != t || failed_set.len() != t {
            return Err(MbcrError::BadHelperSet(format!(
                "expected {t} distinct failed nodes, got {failed:?}"
            )));
        }
        if let Some(&bad) = failed.iter().find(|&&f| f >= n) {
            return Err(MbcrError::BadHelperSet(format!("failed node {bad} out of range")));
        }
        for &f in failed {
            let hs = helpers
                .get(&f)
                .ok_or_else(|| MbcrError::BadHelperSet(format!("no helper set for node {f}")))?;
            let distinct: BTreeSet<usize> = hs.iter().copied().collect();
            if hs.len() != d || distinct.len() != d {
                return Err(MbcrError::BadHelperSet(format!(
                    "node {f} needs {d} distinct helpers, got {hs:?}"
                )));
            }
            if let Some(h) = hs.iter().find(|h| failed_set.contains(h) || **h >= n) {
                return Err(MbcrError::BadHelperSet(format!(
                    "helper {h} of node {f} is failed or out of range"
                )));
            }
            for h in hs {
                let shard = shards.get(h).ok_or_else(|| {
                    MbcrError::BadHelperSet(format!("helper {h} has no shard"))
                })?;
                if shard.node != *h {
                    return Err(MbcrError::InconsistentShard(format!(
                        "shard keyed {h} claims node {}",
                        shard.node
                    )));
                }
                self.check_shard(shard)?;
            }
        }
        Ok(())
    }

    /// Two-phase cooperative repair of the `t` nodes in `failed`.
    ///
    /// Phase 1: every helper `j` of new node `i` sends `B(u_i, v_j)` and
    /// `B(u_j, v_i)`; node `i` solves `[u_j^T] (M v_i) = (B(u_j, v_i))_j`.
    /// Phase 2: node `i` sends `B(u_l, v_i)` to each other new node `l`, after
    /// which `u_i^T M` follows from its values on the `d + t` vectors
    /// `v_s, s in H_i + failed`.
    pub fn repair(
        &self,
        failed: &[usize],
        helpers: &BTreeMap<usize, Vec<usize>>,
        shards: &BTreeMap<usize, MbcrShard>,
    ) -> Result<(Vec<MbcrShard>, RepairTranscript)> {
        self.check_repair_request(failed, helpers, shards)?;
        let field = self.field;
        let mut transcript = RepairTranscript::new();

        // Phase 1.
        let mut m_v = Vec::with_capacity(failed.len());
        let mut row_values = Vec::with_capacity(failed.len());
        for &i in failed {
            let hs = &helpers[&i];
            let mut for_row = Vec::with_capacity(hs.len());
            let mut for_col = Vec::with_capacity(hs.len());
            for &j in hs {
                let (b_ui_vj, b_uj_vi) = self.helper_message(&shards[&j], i)?;
                transcript.record(Phase::Download, j, i, vec![b_ui_vj, b_uj_vi]);
                for_row.push(b_ui_vj);
                for_col.push(b_uj_vi);
            }
            let u_h = self.u.select_columns(hs).transpose();
            let rhs = FieldMatrix::column_vector(field, &for_col)?;
            m_v.push(u_h.solve(&rhs)?.column(0));
            row_values.push(for_row);
        }

        // Phase 2.
        for (pos, &i) in failed.iter().enumerate() {
            for (other_pos, &l) in failed.iter().enumerate() {
                if other_pos == pos {
                    continue;
                }
                let value = dot(field, &self.u_col(l), &m_v[pos]);
                transcript.record(Phase::Exchange, i, l, vec![value]);
            }
        }

        let mut repaired = Vec::with_capacity(failed.len());
        for (pos, &i) in failed.iter().enumerate() {
            let mut support = helpers[&i].clone();
            support.extend_from_slice(failed);
            let mut values = row_values[pos].clone();
            // B(u_i, v_l): computed locally for l = i, received in phase 2
            // otherwise.
            for mv_l in &m_v {
                values.push(dot(field, &self.u_col(i), mv_l));
            }
            // u_i^T M  V_S = values  =>  u_i^T M = values V_S^{-1}
            let v_s = self.v.select_columns(&support);
            let row_part = v_s.inverse()?.vec_mul(&values)?;
            repaired.push(MbcrShard::from_parts(self, i, &m_v[pos], row_part));
        }
        Ok((repaired, transcript))
    }

    /// Recovers the source from any `k` distinct shards (extra shards beyond
    /// the first `k` are ignored).
    pub fn decode(&self, shards: &[MbcrShard]) -> Result<Vec<FieldElement>> {
        let MbcrParams { k, d, t, .. } = self.params;
        let mut seen = BTreeSet::new();
        for s in shards {
            if !seen.insert(s.node) {
                return Err(MbcrError::DuplicateShard(s.node));
            }
            self.check_shard(s)?;
        }
        if shards.len() < k {
            return Err(MbcrError::NotEnoughShards {
                need: k,
                got: shards.len(),
            });
        }
        let chosen = &shards[..k];
        let nodes: Vec<usize> = chosen.iter().map(|s| s.node).collect();
        let field = self.field;
        let top: Vec<usize> = (0..k).collect();

        // Columns: M v_i for each chosen node (d x k); rows: u_i^T M (k x (d+t)).
        let cols: Vec<Vec<FieldElement>> =
            chosen.iter().map(|s| self.full_column(s)).collect::<Result<_>>()?;
        let mv = FieldMatrix::from_fn(field, d, k, |r, c| cols[c][r].value());
        let um = FieldMatrix::from_fn(field, k, d + t, |r, c| chosen[r].row_part[c].value());

        let v_sel = self.v.select_columns(&nodes);
        let v1 = v_sel.select_rows(&top);
        let v1_inv = v1.inverse()?;
        let u1 = self.u.select_columns(&nodes).select_rows(&top);

        // C V1 = bottom d-k rows of [M v_i].
        let c = mv.block(k, 0, d - k, k).mul(&v1_inv)?;
        // U1^T Bblk = last d+t-k columns of [u_i^T M].
        let b_blk = u1.transpose().solve(&um.block(0, k, k, d + t - k))?;
        // A V1 = top k rows of [M v_i] - Bblk V2.
        let v2 = v_sel.block(k, 0, d + t - k, k);
        let a = mv.block(0, 0, k, k).sub(&b_blk.mul(&v2)?)?.mul(&v1_inv)?;

        Ok(MbcrSource::from_blocks(self, &a, &b_blk, &c)?.to_symbols())
    }
}

fn dot(field: PrimeField, x: &[FieldElement], y: &[FieldElement]) -> FieldElement {
    debug_assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y)
        .fold(field.zero(), |acc, (&a, &b)| acc + a * b)
}

/// The `d x (d+t)` source matrix `[[A, B], [C, 0]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MbcrSource {
    m: FieldMatrix,
    k: usize,
}

impl MbcrSource {
    /// Packs `A` row-major, then `B` row-major, then `C` row-major.
    pub fn from_symbols(cb: &MbcrCodebook, source: &[FieldElement]) -> Result<Self> {
        let MbcrParams { k, d, t, .. } = cb.params;
        if source.len() != cb.file_size() {
            return Err(MbcrError::WrongLength {
                expected: cb.file_size(),
                got: source.len(),
            });
        }
        if let Some(bad) = source.iter().find(|s| s.field() != cb.field) {
            return Err(MbcrError::WrongField {
                expected: cb.field.modulus(),
                got: bad.field().modulus(),
            });
        }
        let w = d + t - k;
        let a_end = k * k;
        let b_end = a_end + k * w;
        let m = FieldMatrix::from_fn(cb.field, d, d + t, |r, c| {
            if r < k && c < k {
                source[r * k + c].value()
            } else if r < k {
                source[a_end + r * w + (c - k)].value()
            } else if c < k {
                source[b_end + (r - k) * k + c].value()
            } else {
                0
            }
        });
        Ok(Self { m, k })
    }

    fn from_blocks(
        cb: &MbcrCodebook,
        a: &FieldMatrix,
        b: &FieldMatrix,
        c: &FieldMatrix,
    ) -> Result<Self> {
        let MbcrParams { k, d, t, .. } = cb.params;
        let m = FieldMatrix::from_fn(cb.field, d, d + t, |r, col| {
            if r < k && col < k {
                a.value(r, col)
            } else if r < k {
                b.value(r, col - k)
            } else if col < k {
                c.value(r - k, col)
            } else {
                0
            }
        });
        Ok(Self { m, k })
    }

    pub fn matrix(&self) -> &FieldMatrix {
        &self.m
    }

    pub fn a(&self) -> FieldMatrix {
        self.m.block(0, 0, self.k, self.k)
    }

    pub fn b(&self) -> FieldMatrix {
        self.m.block(0, self.k, self.k, self.m.cols() - self.k)
    }

    pub fn c(&self) -> FieldMatrix {
        self.m.block(self.k, 0, self.m.rows() - self.k, self.k)
    }

    pub fn to_symbols(&self) -> Vec<FieldElement> {
        let mut out = Vec::new();
        for block in [self.a(), self.b(), self.c()] {
            for r in 0..block.rows() {
                out.extend(block.row(r));
            }
        }
        out
    }
}

/// One node's content: `M v_i` minus component `drop_index`, then `u_i^T M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MbcrShard {
    pub node: usize,
    pub col_part: Vec<FieldElement>,
    pub row_part: Vec<FieldElement>,
    pub drop_index: usize,
}

impl MbcrShard {
    fn from_parts(
        cb: &MbcrCodebook,
        node: usize,
        full_col: &[FieldElement],
        row_part: Vec<FieldElement>,
    ) -> Self {
        let drop = cb.drop_index[node];
        let col_part = full_col
            .iter()
            .enumerate()
            .filter(|&(r, _)| r != drop)
            .map(|(_, &v)| v)
            .collect();
        Self {
            node,
            col_part,
            row_part,
            drop_index: drop,
        }
    }

    /// Rebuilds a shard from its flat symbol list (layout of [`Self::symbols`]).
    pub fn from_symbols(cb: &MbcrCodebook, node: usize, symbols: &[FieldElement]) -> Result<Self> {
        cb.check_node(node)?;
        if symbols.len() != cb.alpha() {
            return Err(MbcrError::WrongLength {
                expected: cb.alpha(),
                got: symbols.len(),
            });
        }
        let split = cb.params.d - 1;
        let shard = Self {
            node,
            col_part: symbols[..split].to_vec(),
            row_part: symbols[split..].to_vec(),
            drop_index: cb.drop_index[node],
        };
        cb.check_shard(&shard)?;
        Ok(shard)
    }

    fn symbols_iter(&self) -> impl Iterator<Item = &FieldElement> {
        self.col_part.iter().chain(&self.row_part)
    }

    /// The `2d + t - 1` stored symbols: the kept entries of `M v_i` followed
    /// by `u_i^T M`.
    pub fn symbols(&self) -> Vec<FieldElement> {
        self.symbols_iter().copied().collect()
    }
}
