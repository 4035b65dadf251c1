//! Minimum-storage cooperative regenerating code on the MISER layout.
//!
//! `n = 2k` nodes: nodes `0..k` are systematic and hold the columns of `X`,
//! nodes `k..2k` are parity and hold the columns of
//! `Y = a Û Xᵀ V + e X P`, where `V = U P`, `Û = (U⁻¹)ᵀ` and
//! `[[a, e], [e, a]]` is inverted by `[[b, f], [f, b]]`. Any `t <= k`
//! systematic nodes, or any `t <= k` parity nodes, are repaired jointly from
//! the remaining `d = 2k - t` nodes with `d + t - 1` symbols per new node.
//!
//! Node indices are 0-based throughout.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::field::{
    cauchy, is_superregular, FieldElement, FieldError, FieldMatrix, PrimeField,
    DEFAULT_SUPERREGULAR_CAP,
};
use crate::transcript::{Phase, RepairTranscript};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MscrError {
    #[error("scalars need a != 0, e != 0 and a^2 != e^2")]
    BadScalars,
    #[error("P is not super-regular")]
    NotSuperRegular,
    #[error("U is singular")]
    SingularU,
    #[error("field of size {q} too small for the default {k}x{k} Cauchy matrix")]
    FieldTooSmall { q: u32, k: usize },
    #[error("parameters out of range: {0}")]
    ParamsOutOfRange(String),
    #[error("expected {expected} symbols, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("symbol from F_{got} given to a code over F_{expected}")]
    WrongField { expected: u32, got: u32 },
    #[error("bad failure set: {0}")]
    BadFailureSet(String),
    #[error("{t} failures exceed k = {k}")]
    TooManyFailures { t: usize, k: usize },
    #[error("failure set mixes systematic and parity nodes")]
    MixedFailureUnsupported,
    #[error("need {need} shards, got {got}")]
    NotEnoughShards { need: usize, got: usize },
    #[error("shard for node {0} supplied twice")]
    DuplicateShard(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type Result<T> = std::result::Result<T, MscrError>;

/// Optional overrides for [`MscrCodebook::build`].
#[derive(Debug, Clone, Default)]
pub struct MscrOptions {
    pub u: Option<FieldMatrix>,
    pub p: Option<FieldMatrix>,
    pub a: Option<FieldElement>,
    pub e: Option<FieldElement>,
}

/// The 4x4 Cauchy-form matrix over F_11 used by the worked rate-1/2 example.
pub fn example_p() -> FieldMatrix {
    let field = PrimeField::new(11).expect("11 is prime");
    FieldMatrix::from_literal(
        field,
        &[[1, 4, 9, 8], [10, 1, 4, 9], [7, 10, 1, 4], [2, 7, 10, 1]],
    )
    .expect("literal is rectangular")
}

/// Default `P`: the worked example matrix for `(F_11, k = 4)`, otherwise the
/// Cauchy matrix on points `(2, 4, ..., 2k)` and `(1, 3, ..., 2k - 1)`.
pub fn default_p(field: PrimeField, k: usize) -> Result<FieldMatrix> {
    if field.modulus() == 11 && k == 4 {
        return Ok(example_p());
    }
    if (field.modulus() as usize) < 2 * k + 1 {
        return Err(MscrError::FieldTooSmall {
            q: field.modulus(),
            k,
        });
    }
    let a: Vec<_> = (1..=k).map(|i| field.elem(2 * i as i64)).collect();
    let b: Vec<_> = (1..=k).map(|i| field.elem(2 * i as i64 - 1)).collect();
    Ok(cauchy(field, &a, &b)?)
}

/// Public description of an MSCR code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MscrCodebook {
    field: PrimeField,
    k: usize,
    t: usize,
    u: FieldMatrix,
    p: FieldMatrix,
    q: FieldMatrix,
    v: FieldMatrix,
    u_hat: FieldMatrix,
    v_hat: FieldMatrix,
    a: FieldElement,
    e: FieldElement,
    b: FieldElement,
    f: FieldElement,
}

impl MscrCodebook {
    /// `t` is the nominal number of jointly repaired nodes (so `d = 2k - t`);
    /// repairs of any size `1..=k` are accepted later.
    pub fn build(field: PrimeField, k: usize, t: usize, opts: MscrOptions) -> Result<Self> {
        if k == 0 || t == 0 || t > k {
            return Err(MscrError::ParamsOutOfRange(format!(
                "need 1 <= t <= k, got k={k} t={t}"
            )));
        }
        let a = opts.a.unwrap_or_else(|| field.elem(2));
        let e = opts.e.unwrap_or_else(|| field.elem(1));
        for s in [a, e] {
            if s.field() != field {
                return Err(MscrError::WrongField {
                    expected: field.modulus(),
                    got: s.field().modulus(),
                });
            }
        }
        let det = a * a - e * e;
        if a.is_zero() || e.is_zero() || det.is_zero() {
            return Err(MscrError::BadScalars);
        }
        let b = a.div(det)?;
        let f = (-e).div(det)?;
        debug_assert!(!b.is_zero());

        let u = opts.u.unwrap_or_else(|| FieldMatrix::identity(field, k));
        let p = match opts.p {
            Some(p) => p,
            None => default_p(field, k)?,
        };
        for m in [&u, &p] {
            if m.field() != field {
                return Err(MscrError::WrongField {
                    expected: field.modulus(),
                    got: m.field().modulus(),
                });
            }
            if m.shape() != (k, k) {
                return Err(MscrError::ParamsOutOfRange(format!(
                    "U and P must be {k}x{k}, got {:?}",
                    m.shape()
                )));
            }
        }
        let u_inv = u.inverse().map_err(|_| MscrError::SingularU)?;
        let superregular = if k <= DEFAULT_SUPERREGULAR_CAP {
            is_superregular(&p)?
        } else {
            p.is_nonsingular()
        };
        if !superregular {
            return Err(MscrError::NotSuperRegular);
        }
        let q = p.inverse()?;
        let v = u.mul(&p)?;
        let v_hat = v.inverse()?.transpose();
        Ok(Self {
            field,
            k,
            t,
            u_hat: u_inv.transpose(),
            u,
            p,
            q,
            v,
            v_hat,
            a,
            e,
            b,
            f,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        2 * self.k
    }

    /// Nominal number of jointly repaired nodes.
    pub fn t(&self) -> usize {
        self.t
    }

    /// Repair degree for the nominal `t`.
    pub fn d(&self) -> usize {
        2 * self.k - self.t
    }

    pub fn file_size(&self) -> usize {
        self.k * self.k
    }

    pub fn alpha(&self) -> usize {
        self.k
    }

    pub fn u(&self) -> &FieldMatrix {
        &self.u
    }

    pub fn p(&self) -> &FieldMatrix {
        &self.p
    }

    pub fn q(&self) -> &FieldMatrix {
        &self.q
    }

    pub fn v(&self) -> &FieldMatrix {
        &self.v
    }

    pub fn u_hat(&self) -> &FieldMatrix {
        &self.u_hat
    }

    pub fn v_hat(&self) -> &FieldMatrix {
        &self.v_hat
    }

    /// `(a, e, b, f)`.
    pub fn scalars(&self) -> (FieldElement, FieldElement, FieldElement, FieldElement) {
        (self.a, self.e, self.b, self.f)
    }

    fn check_symbols(&self, symbols: &[FieldElement], expected: usize) -> Result<()> {
        if symbols.len() != expected {
            return Err(MscrError::WrongLength {
                expected,
                got: symbols.len(),
            });
        }
        if let Some(bad) = symbols.iter().find(|s| s.field() != self.field) {
            return Err(MscrError::WrongField {
                expected: self.field.modulus(),
                got: bad.field().modulus(),
            });
        }
        Ok(())
    }

    /// Systematic node `i` holds source symbols `i*k .. (i+1)*k` as column `i`
    /// of `X`.
    pub fn source_to_x(&self, source: &[FieldElement]) -> Result<FieldMatrix> {
        self.check_symbols(source, self.file_size())?;
        let k = self.k;
        Ok(FieldMatrix::from_fn(self.field, k, k, |r, c| source[c * k + r].value()))
    }

    pub fn x_to_source(&self, x: &FieldMatrix) -> Vec<FieldElement> {
        (0..self.k).flat_map(|c| x.column(c)).collect()
    }

    /// `Y = a Û Xᵀ V + e X P`.
    pub fn parity_of(&self, x: &FieldMatrix) -> Result<FieldMatrix> {
        self.check_square(x)?;
        let first = self.u_hat.mul(&x.transpose())?.mul(&self.v)?.scale(self.a);
        let second = x.mul(&self.p)?.scale(self.e);
        Ok(first.add(&second)?)
    }

    pub fn encode(&self, source: &[FieldElement]) -> Result<MscrState> {
        let x = self.source_to_x(source)?;
        let y = self.parity_of(&x)?;
        Ok(MscrState { x, y })
    }

    /// The dual encoding `X = b V̂ Yᵀ U + f Y Q`.
    pub fn encode_dual(&self, y: &FieldMatrix) -> Result<FieldMatrix> {
        self.check_square(y)?;
        let first = self.v_hat.mul(&y.transpose())?.mul(&self.u)?.scale(self.b);
        let second = y.mul(&self.q)?.scale(self.f);
        Ok(first.add(&second)?)
    }

    fn check_square(&self, m: &FieldMatrix) -> Result<()> {
        if m.shape() != (self.k, self.k) {
            return Err(FieldError::DimensionMismatch {
                op: "mscr encode",
                left: m.shape(),
                right: (self.k, self.k),
            }
            .into());
        }
        if m.field() != self.field {
            return Err(MscrError::WrongField {
                expected: self.field.modulus(),
                got: m.field().modulus(),
            });
        }
        Ok(())
    }

    fn check_failures(&self, failed: &[usize]) -> Result<()> {
        let distinct: BTreeSet<_> = failed.iter().collect();
        if failed.is_empty() || distinct.len() != failed.len() {
            return Err(MscrError::BadFailureSet(format!(
                "need a non-empty set of distinct nodes, got {failed:?}"
            )));
        }
        if let Some(bad) = failed.iter().find(|&&f| f >= self.n()) {
            return Err(MscrError::BadFailureSet(format!("node {bad} out of range")));
        }
        if failed.len() > self.k {
            return Err(MscrError::TooManyFailures {
                t: failed.len(),
                k: self.k,
            });
        }
        Ok(())
    }

    fn live_content<'a>(
        &self,
        nodes: &'a BTreeMap<usize, Vec<FieldElement>>,
        node: usize,
    ) -> Result<&'a [FieldElement]> {
        let content = nodes.get(&node).ok_or_else(|| {
            MscrError::BadFailureSet(format!("helper node {node} is unavailable"))
        })?;
        self.check_symbols(content, self.k)?;
        Ok(content)
    }

    /// Repairs `failed` (all systematic or all parity) from the surviving
    /// `nodes`, which map node index to the node's `k` symbols.
    pub fn repair(
        &self,
        failed: &[usize],
        nodes: &BTreeMap<usize, Vec<FieldElement>>,
    ) -> Result<MscrRepair> {
        self.check_failures(failed)?;
        let k = self.k;
        if failed.iter().all(|&f| f < k) {
            self.repair_systematic(failed, nodes)
        } else if failed.iter().all(|&f| f >= k) {
            let parity: Vec<usize> = failed.iter().map(|f| f - k).collect();
            self.repair_parity(&parity, nodes)
        } else {
            Err(MscrError::MixedFailureUnsupported)
        }
    }

    /// Cooperative repair of systematic nodes `failed ⊂ 0..k`.
    ///
    /// Every survivor sends `u_iᵀ (content)` to new node `i`. With `Z = Y Q`
    /// the systematic symbols become `u_iᵀ x_m = b u_mᵀ z_i + f u_iᵀ z_m`, so
    /// node `i` learns `u_mᵀ z_i` for surviving `m`, receives `u_lᵀ z_i` from
    /// the other new nodes, and rebuilds `x_i = b Û Zᵀ u_i + f z_i`.
    pub fn repair_systematic(
        &self,
        failed: &[usize],
        nodes: &BTreeMap<usize, Vec<FieldElement>>,
    ) -> Result<MscrRepair> {
        self.check_failures(failed)?;
        if failed.iter().any(|&f| f >= self.k) {
            return Err(MscrError::BadFailureSet(format!(
                "{failed:?} are not all systematic"
            )));
        }
        let k = self.k;
        let surviving: Vec<usize> = (0..k).filter(|m| !failed.contains(m)).collect();
        let basis: Vec<Vec<FieldElement>> = (0..k).map(|i| self.u.column(i)).collect();
        let mut contents = BTreeMap::new();
        for &m in &surviving {
            contents.insert(m, self.live_content(nodes, m)?);
        }
        for j in 0..k {
            contents.insert(k + j, self.live_content(nodes, k + j)?);
        }
        let plan = DualPlan {
            field: self.field,
            k,
            offset_same: 0,
            offset_other: k,
            basis: &basis,
            basis_t: &self.u.transpose(),
            hat: &self.u_hat,
            change: &self.q,
            mix: (self.b, self.f),
        };
        plan.run(failed, &surviving, &contents)
    }

    /// Cooperative repair of parity nodes `k + j` for `j` in `failed ⊂ 0..k`;
    /// the mirror image of [`Self::repair_systematic`] with `V`, `Z' = X P`
    /// and `Y = a V̂ Z'ᵀ V + e Z'`.
    pub fn repair_parity(
        &self,
        failed: &[usize],
        nodes: &BTreeMap<usize, Vec<FieldElement>>,
    ) -> Result<MscrRepair> {
        let k = self.k;
        if failed.iter().any(|&f| f >= k) {
            return Err(MscrError::BadFailureSet(format!(
                "parity offsets {failed:?} must lie in 0..{k}"
            )));
        }
        self.check_failures(failed)?;
        let surviving: Vec<usize> = (0..k).filter(|m| !failed.contains(m)).collect();
        let basis: Vec<Vec<FieldElement>> = (0..k).map(|i| self.v.column(i)).collect();
        let mut contents = BTreeMap::new();
        for &m in &surviving {
            contents.insert(k + m, self.live_content(nodes, k + m)?);
        }
        for l in 0..k {
            contents.insert(l, self.live_content(nodes, l)?);
        }
        let plan = DualPlan {
            field: self.field,
            k,
            offset_same: k,
            offset_other: 0,
            basis: &basis,
            basis_t: &self.v.transpose(),
            hat: &self.v_hat,
            change: &self.p,
            mix: (self.a, self.e),
        };
        plan.run(failed, &surviving, &contents)
    }

    pub fn decode(&self, shards: &[(usize, Vec<FieldElement>)]) -> Result<Vec<FieldElement>> {
        Ok(self.decode_with_trace(shards)?.0)
    }

    /// Recovers the source from any `k` distinct nodes; also reports the
    /// number `s` of parity nodes used and the `s x s` block `π₁` of `P`
    /// (rows of the missing systematic nodes, columns of the downloaded
    /// parity nodes).
    pub fn decode_with_trace(
        &self,
        shards: &[(usize, Vec<FieldElement>)],
    ) -> Result<(Vec<FieldElement>, DecodeTrace)> {
        let k = self.k;
        let field = self.field;
        let mut seen = BTreeSet::new();
        for (node, content) in shards {
            if *node >= self.n() {
                return Err(MscrError::BadFailureSet(format!("node {node} out of range")));
            }
            if !seen.insert(*node) {
                return Err(MscrError::DuplicateShard(*node));
            }
            self.check_symbols(content, k)?;
        }
        if shards.len() < k {
            return Err(MscrError::NotEnoughShards {
                need: k,
                got: shards.len(),
            });
        }
        let mut chosen: Vec<&(usize, Vec<FieldElement>)> = shards[..k].iter().collect();
        chosen.sort_by_key(|(node, _)| *node);

        let mut x_cols: Vec<Option<Vec<FieldElement>>> = vec![None; k];
        let mut parity: Vec<(usize, &[FieldElement])> = Vec::new();
        for (node, content) in &chosen {
            if *node < k {
                x_cols[*node] = Some(content.clone());
            } else {
                parity.push((node - k, content));
            }
        }
        let present: Vec<usize> = (0..k).filter(|&m| x_cols[m].is_some()).collect();
        let missing: Vec<usize> = (0..k).filter(|&m| x_cols[m].is_none()).collect();
        let s = missing.len();
        if s == 0 {
            let x = FieldMatrix::from_fn(field, k, k, |r, c| {
                x_cols[c].as_ref().expect("all present")[r].value()
            });
            return Ok((self.x_to_source(&x), DecodeTrace { s: 0, pi1: None }));
        }
        let j_idx: Vec<usize> = parity.iter().map(|(j, _)| *j).collect();

        // W = Uᵀ X, with the columns of surviving systematic nodes known.
        let u_t = self.u.transpose();
        let mut w_known = BTreeMap::new();
        for &m in &present {
            w_known.insert(m, u_t.mul_vec(x_cols[m].as_ref().expect("present"))?);
        }
        let y_j = FieldMatrix::from_fn(field, k, s, |r, c| parity[c].1[r].value());
        // Uᵀ Y_J = a Wᵀ P_J + e W P_J.
        let lhs = u_t.mul(&y_j)?;
        let p = &self.p;
        let (a, e, b, f) = self.scalars();
        let mut reduced: Vec<Vec<FieldElement>> = (0..k).map(|r| lhs.row(r)).collect();
        for (col, &j) in j_idx.iter().enumerate() {
            for r in 0..k {
                let mut known = field.zero();
                if let Some(w_r) = w_known.get(&r) {
                    // a (column r of W)ᵀ P[:, j], fully known.
                    for l in 0..k {
                        known = known + a * w_r[l] * p.get(l, j);
                    }
                }
                for &c in &present {
                    known = known + e * w_known[&c][r] * p.get(c, j);
                }
                reduced[r][col] = reduced[r][col] - known;
            }
        }
        let pi1 = p.submatrix(&missing, &j_idx);
        let pi1_inv = pi1.inverse()?;
        let e_inv = e.inv()?;

        // Rows of surviving nodes: e W2 π₁.
        let w2 = FieldMatrix::from_fn(field, present.len(), s, |r, c| reduced[present[r]][c].value())
            .mul(&pi1_inv)?
            .scale(e_inv);
        // Rows of missing nodes: a W1ᵀ π₁ + e W1 π₁ + a W2ᵀ π₂.
        let pi2 = p.submatrix(&present, &j_idx);
        let w2t_pi2 = w2.transpose().mul(&pi2)?.scale(a);
        let g = FieldMatrix::from_fn(field, s, s, |r, c| reduced[missing[r]][c].value())
            .sub(&w2t_pi2)?
            .mul(&pi1_inv)?;
        // G = a W1ᵀ + e W1.
        let sum_inv = (a + e).inv()?;
        let mut w1 = vec![vec![field.zero(); s]; s];
        for i in 0..s {
            w1[i][i] = g.get(i, i) * sum_inv;
            for j in (i + 1)..s {
                w1[i][j] = b * g.get(j, i) + f * g.get(i, j);
                w1[j][i] = f * g.get(j, i) + b * g.get(i, j);
            }
        }
        // Unknown columns of W: rows `missing` from W1, rows `present` from W2.
        let w_unknown = FieldMatrix::from_fn(field, k, s, |r, c| {
            match missing.iter().position(|&m| m == r) {
                Some(pos) => w1[pos][c].value(),
                None => {
                    let pos = present.iter().position(|&m| m == r).expect("partition");
                    w2.value(pos, c)
                }
            }
        });
        let x_missing = u_t.solve(&w_unknown)?;
        for (c, &m) in missing.iter().enumerate() {
            x_cols[m] = Some(x_missing.column(c));
        }
        let x = FieldMatrix::from_fn(field, k, k, |r, c| {
            x_cols[c].as_ref().expect("recovered")[r].value()
        });
        Ok((
            self.x_to_source(&x),
            DecodeTrace {
                s,
                pi1: Some(pi1),
            },
        ))
    }
}

/// Generic body of the two repair procedures. "Same" nodes are the family
/// being repaired (systematic or parity), "other" nodes the opposite family.
/// For systematic repair: basis = columns of U, hat = Û, change = Q (so the
/// other family's projections become `u_iᵀ z`), mix = (b, f). For parity
/// repair: basis = columns of V, hat = V̂, change = P, mix = (a, e).
struct DualPlan<'a> {
    field: PrimeField,
    k: usize,
    offset_same: usize,
    offset_other: usize,
    basis: &'a [Vec<FieldElement>],
    basis_t: &'a FieldMatrix,
    hat: &'a FieldMatrix,
    change: &'a FieldMatrix,
    mix: (FieldElement, FieldElement),
}

impl DualPlan<'_> {
    fn run(
        &self,
        failed: &[usize],
        surviving: &[usize],
        contents: &BTreeMap<usize, &[FieldElement]>,
    ) -> Result<MscrRepair> {
        let field = self.field;
        let k = self.k;
        let (mix_main, mix_cross) = self.mix;
        let main_inv = mix_main.inv()?;
        let mut transcript = RepairTranscript::new();
        let mut derived = BTreeMap::new();
        let mut projected = Vec::with_capacity(failed.len());
        let mut unpacked = Vec::with_capacity(failed.len());

        // Phase 1: each survivor sends one projection to each new node.
        for &i in failed {
            let new_node = self.offset_same + i;
            let proj = |content: &[FieldElement]| dot(field, &self.basis[i], content);
            let mut same_syms = Vec::with_capacity(surviving.len());
            for &m in surviving {
                let sym = proj(contents[&(self.offset_same + m)]);
                transcript.record(Phase::Download, self.offset_same + m, new_node, vec![sym]);
                same_syms.push(sym);
            }
            let mut other_syms = Vec::with_capacity(k);
            for j in 0..k {
                let sym = proj(contents[&(self.offset_other + j)]);
                transcript.record(Phase::Download, self.offset_other + j, new_node, vec![sym]);
                other_syms.push(sym);
            }
            // (basis_iᵀ z_ν)_ν after the change of variables.
            let z_proj = self.change.vec_mul(&other_syms)?;
            // basis_mᵀ z_i = (sym_m - cross * basis_iᵀ z_m) / main
            let from_survivors: Vec<FieldElement> = surviving
                .iter()
                .zip(&same_syms)
                .map(|(&m, &sym)| (sym - mix_cross * z_proj[m]) * main_inv)
                .collect();
            let mut knowledge = same_syms;
            knowledge.extend_from_slice(&z_proj);
            derived.insert(new_node, knowledge);
            projected.push(z_proj);
            unpacked.push(from_survivors);
        }

        // Phase 2: new node i sends basis_iᵀ z_{i'} to new node i'.
        for (pos, &i) in failed.iter().enumerate() {
            for (other_pos, &i2) in failed.iter().enumerate() {
                if other_pos != pos {
                    transcript.record(
                        Phase::Exchange,
                        self.offset_same + i,
                        self.offset_same + i2,
                        vec![projected[pos][i2]],
                    );
                }
            }
        }

        let mut columns = Vec::with_capacity(failed.len());
        for (pos, &i) in failed.iter().enumerate() {
            // basis_lᵀ z_i for every l.
            let mut w = vec![field.zero(); k];
            for (&m, &val) in surviving.iter().zip(&unpacked[pos]) {
                w[m] = val;
            }
            for (other_pos, &l) in failed.iter().enumerate() {
                w[l] = projected[other_pos][i];
            }
            let z_i = self
                .basis_t
                .solve(&FieldMatrix::column_vector(field, &w)?)?
                .column(0);
            let hat_part = self.hat.mul_vec(&projected[pos])?;
            let content: Vec<FieldElement> = hat_part
                .iter()
                .zip(&z_i)
                .map(|(&h, &z)| mix_main * h + mix_cross * z)
                .collect();
            columns.push((self.offset_same + i, content));
        }
        Ok(MscrRepair {
            columns,
            transcript,
            derived,
        })
    }
}

fn dot(field: PrimeField, x: &[FieldElement], y: &[FieldElement]) -> FieldElement {
    x.iter()
        .zip(y)
        .fold(field.zero(), |acc, (&a, &b)| acc + a * b)
}

/// Full code state: `X` (systematic columns) and `Y` (parity columns).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MscrState {
    pub x: FieldMatrix,
    pub y: FieldMatrix,
}

impl MscrState {
    pub fn node_content(&self, node: usize) -> Vec<FieldElement> {
        let k = self.x.cols();
        if node < k {
            self.x.column(node)
        } else {
            self.y.column(node - k)
        }
    }

    pub fn nodes(&self) -> BTreeMap<usize, Vec<FieldElement>> {
        (0..2 * self.x.cols())
            .map(|i| (i, self.node_content(i)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MscrRepair {
    /// `(node, rebuilt content)` in the order of the failure list.
    pub columns: Vec<(usize, Vec<FieldElement>)>,
    pub transcript: RepairTranscript,
    /// What each new node can compute after phase 1: the projections received
    /// from surviving same-family nodes followed by the `k` transformed
    /// projections of the other family.
    pub derived: BTreeMap<usize, Vec<FieldElement>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeTrace {
    pub s: usize,
    pub pi1: Option<FieldMatrix>,
}
