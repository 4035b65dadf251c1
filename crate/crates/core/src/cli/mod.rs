//! `coopregen` command-line front end.
//!
//! Node numbers on the command line and in printed reports are 1-based.

pub mod format;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use itertools::Itertools;
use serde::Serialize;

use crate::field::{CheckMode, FieldElement, FieldMatrix, PrimeField};
use crate::mbcr::{default_points, MbcrCodebook, MbcrParams};
use crate::mscr::{MscrCodebook, MscrOptions};
use crate::simulator::{
    encoding_matrix_after_repair, extract_encoding_matrix, probe_transcript, run_scenario,
    verify_reconstruction, verify_transcript, BandwidthReport, Code, HelperPolicy, SimError,
    StorageCluster,
};
use crate::tradeoff::{
    csv_row, mbcr_point, mbr_point, mscr_point, msr_point, tradeoff_table, CSV_HEADER,
};
use format::{
    read_shard, shard_file_name, symbol_width, write_shard, Family, Manifest, ShardHeader,
    FORMAT_VERSION, MANIFEST_NAME,
};

pub const EXIT_PARAMS: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;
pub const EXIT_INSUFFICIENT: i32 = 5;
pub const EXIT_VERIFY: i32 = 6;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn params(message: impl Into<String>) -> Self {
        Self::new(EXIT_PARAMS, message)
    }

    fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        Self::new(EXIT_IO, format!("{}: {err}", path.display()))
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        let code = match &e {
            SimError::MixedFailureUnsupported => EXIT_UNSUPPORTED,
            SimError::NotEnoughNodes { .. } => EXIT_INSUFFICIENT,
            SimError::Mbcr(crate::mbcr::MbcrError::NotEnoughShards { .. })
            | SimError::Mscr(crate::mscr::MscrError::NotEnoughShards { .. }) => EXIT_INSUFFICIENT,
            SimError::Mscr(crate::mscr::MscrError::TooManyFailures { .. }) => EXIT_UNSUPPORTED,
            _ => EXIT_PARAMS,
        };
        Self::new(code, e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "coopregen", version, about = "Cooperative regenerating codes: encode, repair, decode")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the MSR, MBR, MSCR and MBCR operating points as CSV.
    Params(ParamsArgs),
    /// Encode a file into shard files plus a manifest.
    Encode(EncodeArgs),
    /// Rebuild failed nodes cooperatively and print the bandwidth report.
    Repair(RepairArgs),
    /// Reconstruct the original file from any k shards.
    Decode(DecodeArgs),
    /// Check a shard directory for consistency and reconstructability.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct ParamsArgs {
    #[arg(short = 'B', value_name = "SYMBOLS")]
    b: u64,
    #[arg(short)]
    k: u64,
    #[arg(short)]
    d: u64,
    #[arg(short, default_value_t = 1)]
    t: u64,
    /// Points on the single-failure curve (t = 1 only).
    #[arg(long, default_value_t = 11)]
    samples: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Mbcr,
    Mscr,
}

#[derive(Debug, Args)]
struct EncodeArgs {
    file: PathBuf,
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, default_value_t = 257)]
    q: u64,
    /// Node count; MSCR always uses n = 2k.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: usize,
    /// Repair degree; MSCR always uses d = n - t.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    t: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RepairArgs {
    dir: PathBuf,
    /// Comma-separated 1-based node numbers.
    #[arg(long, value_delimiter = ',', required = true)]
    failed: Vec<usize>,
    /// Helper nodes used by every new node (MBCR); defaults to the lowest-indexed survivors.
    #[arg(long, value_delimiter = ',', conflicts_with = "helper_seed")]
    helpers: Option<Vec<usize>>,
    /// Pick helpers at random with this seed (MBCR).
    #[arg(long)]
    helper_seed: Option<u64>,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    dir: PathBuf,
    /// Comma-separated 1-based node numbers to read from.
    #[arg(long, value_delimiter = ',')]
    nodes: Option<Vec<usize>>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    dir: PathBuf,
    /// Also sweep every repairable failure pattern and audit its transcript.
    #[arg(long)]
    repair_audit: bool,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Output goes to `out`, errors to `err`.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            let first = first.strip_prefix("error: ").unwrap_or(first);
            let _ = writeln!(err, "error: {first}");
            return EXIT_PARAMS;
        }
    };
    let result = match cli.command {
        Command::Params(a) => cmd_params(&a, out),
        Command::Encode(a) => cmd_encode(&a, out),
        Command::Repair(a) => cmd_repair(&a, out),
        Command::Decode(a) => cmd_decode(&a, out, err),
        Command::Verify(a) => cmd_verify(&a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message.replace('\n', " "));
            e.code
        }
    }
}

pub fn main() -> i32 {
    run(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}

fn write_out(out: &mut impl Write, text: &str) -> CliResult<()> {
    writeln!(out, "{text}").map_err(|e| CliError::new(EXIT_IO, format!("stdout: {e}")))
}

fn cmd_params(a: &ParamsArgs, out: &mut impl Write) -> CliResult<()> {
    let p = |e: crate::tradeoff::TradeoffError| CliError::params(e.to_string());
    let named = [
        msr_point(a.b, a.k, a.d).map_err(p)?,
        mbr_point(a.b, a.k, a.d).map_err(p)?,
        mscr_point(a.b, a.k, a.d, a.t).map_err(p)?,
        mbcr_point(a.b, a.k, a.d, a.t).map_err(p)?,
    ];
    let table = tradeoff_table(a.b, a.k, a.d, a.t, a.samples).map_err(p)?;
    write_out(out, CSV_HEADER)?;
    for point in &named {
        write_out(out, &csv_row(&point.alpha, &point.gamma, &point.label.to_string()))?;
    }
    if table.interior_specified {
        for row in &table.rows {
            write_out(out, &csv_row(&row.alpha, &row.gamma, "curve"))?;
        }
    }
    Ok(())
}

fn parse_prime(q: u64) -> CliResult<PrimeField> {
    if q < 257 {
        return Err(CliError::params(format!(
            "q = {q} cannot hold byte values; use a prime q >= 257"
        )));
    }
    PrimeField::new(q).map_err(|e| CliError::params(format!("q = {q}: {e}")))
}

fn matrix_literal(m: &FieldMatrix) -> String {
    m.to_rows().iter().map(|r| r.iter().join(",")).join("/")
}

fn parse_matrix_literal(field: PrimeField, text: &str) -> Option<FieldMatrix> {
    let rows: Vec<Vec<i64>> = text
        .split('/')
        .map(|r| r.split(',').map(|v| v.trim().parse().ok()).collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()?;
    FieldMatrix::from_literal(field, &rows).ok()
}

/// Canonical text for the matrices a code was built from.
fn describe_code(code: &Code) -> String {
    match code {
        Code::Mbcr(cb) => {
            let points = cb.v().row(1.min(cb.v().rows() - 1));
            format!("points={}", points.iter().map(|p| p.value()).join(","))
        }
        Code::Mscr(cb) => {
            let (a, e, _, _) = cb.scalars();
            format!(
                "a={};e={};U={};P={}",
                a.value(),
                e.value(),
                matrix_literal(cb.u()),
                matrix_literal(cb.p())
            )
        }
    }
}

fn code_from_manifest(m: &Manifest) -> CliResult<Code> {
    if m.format_version != FORMAT_VERSION {
        return Err(CliError::params(format!(
            "unsupported manifest format_version {}",
            m.format_version
        )));
    }
    let field = PrimeField::new(u64::from(m.q)).map_err(|e| CliError::params(e.to_string()))?;
    let bad = || CliError::params(format!("cannot parse matrix_seed_or_literal {:?}", m.matrix_seed_or_literal));
    let code = match m.code_family {
        Family::Mbcr => {
            let list = m.matrix_seed_or_literal.strip_prefix("points=").ok_or_else(bad)?;
            let points = list
                .split(',')
                .map(|v| v.trim().parse::<i64>().ok().map(|v| field.elem(v)))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(bad)?;
            let params = MbcrParams {
                n: m.n,
                k: m.k,
                d: m.d,
                t: m.t,
            };
            Code::Mbcr(
                MbcrCodebook::build(field, params, Some(&points))
                    .map_err(|e| CliError::params(e.to_string()))?,
            )
        }
        Family::Mscr => {
            let mut opts = MscrOptions::default();
            for part in m.matrix_seed_or_literal.split(';') {
                let (key, value) = part.split_once('=').ok_or_else(bad)?;
                match key {
                    "a" => opts.a = Some(field.elem(value.parse().map_err(|_| bad())?)),
                    "e" => opts.e = Some(field.elem(value.parse().map_err(|_| bad())?)),
                    "U" => opts.u = Some(parse_matrix_literal(field, value).ok_or_else(bad)?),
                    "P" => opts.p = Some(parse_matrix_literal(field, value).ok_or_else(bad)?),
                    _ => return Err(bad()),
                }
            }
            if m.n != 2 * m.k || m.d + m.t != m.n {
                return Err(CliError::params("MSCR manifest needs n = 2k and d = n - t"));
            }
            Code::Mscr(
                MscrCodebook::build(field, m.k, m.t, opts)
                    .map_err(|e| CliError::params(e.to_string()))?,
            )
        }
    };
    if code.file_size() != m.b {
        return Err(CliError::params(format!(
            "manifest B = {} but the code stores {} symbols",
            m.b,
            code.file_size()
        )));
    }
    Ok(code)
}

fn build_code(a: &EncodeArgs, field: PrimeField) -> CliResult<Code> {
    let p = |e: String| CliError::params(e);
    match a.family {
        FamilyArg::Mbcr => {
            let n = a.n.ok_or_else(|| p("--n is required for mbcr".into()))?;
            let d = a.d.ok_or_else(|| p("--d is required for mbcr".into()))?;
            let params = MbcrParams { n, k: a.k, d, t: a.t };
            let points = default_points(field, n);
            MbcrCodebook::build(field, params, Some(&points))
                .map(Code::Mbcr)
                .map_err(|e| p(e.to_string()))
        }
        FamilyArg::Mscr => {
            let n = 2 * a.k;
            if a.n.is_some_and(|given| given != n) {
                return Err(p(format!("mscr needs n = 2k = {n}")));
            }
            if a.d.is_some_and(|given| given + a.t != n) {
                return Err(p(format!("mscr needs d = n - t = {}", n.saturating_sub(a.t))));
            }
            MscrCodebook::build(field, a.k, a.t, MscrOptions::default())
                .map(Code::Mscr)
                .map_err(|e| p(e.to_string()))
        }
    }
}

fn write_shards(
    dir: &Path,
    manifest: &Manifest,
    contents: &BTreeMap<usize, Vec<u32>>,
) -> CliResult<()> {
    for (&node, symbols) in contents {
        let header = ShardHeader {
            format_version: FORMAT_VERSION,
            family: manifest.code_family,
            node,
            q: manifest.q,
            symbol_width: symbol_width(manifest.q),
            symbol_count: symbols.len() as u64,
        };
        let path = dir.join(shard_file_name(node));
        let mut buf = Vec::new();
        write_shard(&mut buf, &header, symbols).map_err(|e| CliError::io(&path, e))?;
        fs::write(&path, buf).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(())
}

fn cmd_encode(a: &EncodeArgs, out: &mut impl Write) -> CliResult<()> {
    let field = parse_prime(a.q)?;
    let code = build_code(a, field)?;
    let bytes = fs::read(&a.file).map_err(|e| CliError::io(&a.file, e))?;
    let b = code.file_size();
    let stripe_count = bytes.len().div_ceil(b).max(1);
    let mut contents: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for s in 0..stripe_count {
        let source: Vec<FieldElement> = (0..b)
            .map(|j| field.elem(i64::from(bytes.get(s * b + j).copied().unwrap_or(0))))
            .collect();
        let nodes = code.encode(&source)?;
        for (i, content) in nodes.into_iter().enumerate() {
            contents
                .entry(i)
                .or_default()
                .extend(content.iter().map(|x| x.value()));
        }
    }
    let family = match a.family {
        FamilyArg::Mbcr => Family::Mbcr,
        FamilyArg::Mscr => Family::Mscr,
    };
    let manifest = Manifest {
        code_family: family,
        q: field.modulus(),
        n: code.n(),
        k: code.k(),
        d: code.d(),
        t: code.t(),
        b,
        original_length_bytes: bytes.len() as u64,
        stripe_count,
        matrix_seed_or_literal: describe_code(&code),
        format_version: FORMAT_VERSION,
    };
    fs::create_dir_all(&a.out).map_err(|e| CliError::io(&a.out, e))?;
    write_shards(&a.out, &manifest, &contents)?;
    let path = a.out.join(MANIFEST_NAME);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
    write_out(
        out,
        &format!(
            "encoded {} bytes into {} stripes on {} nodes ({} symbols per node)",
            bytes.len(),
            stripe_count,
            code.n(),
            code.alpha() * stripe_count
        ),
    )
}

/// A loaded shard directory: the manifest, its code, every readable shard
/// that matches the manifest, and the reason each other node was rejected.
struct Store {
    dir: PathBuf,
    manifest: Manifest,
    code: Code,
    shards: BTreeMap<usize, Vec<u32>>,
    problems: BTreeMap<usize, String>,
}

impl Store {
    fn load(dir: &Path) -> CliResult<Self> {
        let path = dir.join(MANIFEST_NAME);
        let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let manifest: Manifest =
            serde_json::from_str(&text).map_err(|e| CliError::new(EXIT_IO, format!("{}: {e}", path.display())))?;
        let code = code_from_manifest(&manifest)?;
        let mut shards = BTreeMap::new();
        let mut problems = BTreeMap::new();
        let expected_count = (code.alpha() * manifest.stripe_count) as u64;
        for node in 0..code.n() {
            let path = dir.join(shard_file_name(node));
            let checked = fs::File::open(&path)
                .map_err(|e| e.to_string())
                .and_then(|f| read_shard(std::io::BufReader::new(f)).map_err(|e| e.to_string()))
                .and_then(|(h, syms)| {
                    if h.family != manifest.code_family
                        || h.q != manifest.q
                        || h.node != node
                        || h.symbol_width != symbol_width(manifest.q)
                    {
                        Err("header does not match the manifest".to_string())
                    } else if h.symbol_count != expected_count {
                        Err(format!(
                            "holds {} symbols, expected {expected_count}",
                            h.symbol_count
                        ))
                    } else {
                        Ok(syms)
                    }
                });
            match checked {
                Ok(syms) => {
                    shards.insert(node, syms);
                }
                Err(reason) => {
                    problems.insert(node, reason);
                }
            }
        }
        Ok(Self {
            dir: dir.to_path_buf(),
            manifest,
            code,
            shards,
            problems,
        })
    }

    fn field(&self) -> PrimeField {
        self.code.field()
    }

    fn stripe_nodes(&self, stripe: usize, nodes: &[usize]) -> BTreeMap<usize, Vec<FieldElement>> {
        let alpha = self.code.alpha();
        let field = self.field();
        nodes
            .iter()
            .filter_map(|i| self.shards.get(i).map(|s| (*i, s)))
            .map(|(i, syms)| {
                let part = syms[stripe * alpha..(stripe + 1) * alpha]
                    .iter()
                    .map(|&v| field.elem(i64::from(v)))
                    .collect();
                (i, part)
            })
            .collect()
    }
}

fn to_zero_based(list: &[usize], n: usize, what: &str) -> CliResult<Vec<usize>> {
    list.iter()
        .map(|&i| {
            if i == 0 || i > n {
                Err(CliError::params(format!("{what} node {i} is not in 1..={n}")))
            } else {
                Ok(i - 1)
            }
        })
        .collect()
}

#[derive(Serialize)]
struct RepairOutput {
    stripes: usize,
    failed: Vec<usize>,
    #[serde(flatten)]
    report: BandwidthReport,
    per_node_per_stripe: BTreeMap<usize, usize>,
}

fn cmd_repair(a: &RepairArgs, out: &mut impl Write) -> CliResult<()> {
    let store = Store::load(&a.dir)?;
    let n = store.code.n();
    let failed = to_zero_based(&a.failed, n, "failed")?;
    let policy = match (&a.helpers, a.helper_seed) {
        (Some(list), _) => {
            let helpers = to_zero_based(list, n, "helper")?;
            HelperPolicy::Explicit(failed.iter().map(|&f| (f, helpers.clone())).collect())
        }
        (None, Some(seed)) => HelperPolicy::Random(seed),
        (None, None) => HelperPolicy::LowestIndex,
    };
    let live: Vec<usize> = store
        .shards
        .keys()
        .copied()
        .filter(|i| !failed.contains(i))
        .collect();
    let mut rebuilt: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    let mut reports = Vec::new();
    let mut repaired_nodes = Vec::new();
    for stripe in 0..store.manifest.stripe_count {
        let mut cluster = StorageCluster::from_nodes(store.code.clone(), store.stripe_nodes(stripe, &live))?;
        let outcome = run_scenario(&mut cluster, &failed, &policy)?;
        repaired_nodes = outcome.report.per_node.keys().copied().collect();
        for &node in &repaired_nodes {
            rebuilt
                .entry(node)
                .or_default()
                .extend(cluster.nodes()[&node].iter().map(|x| x.value()));
        }
        reports.push(outcome.report);
    }
    write_shards(&store.dir, &store.manifest, &rebuilt)?;
    let per_stripe = reports[0].one_based().per_node;
    let merged = BandwidthReport::merge(&reports).expect("at least one stripe");
    let output = RepairOutput {
        stripes: reports.len(),
        failed: repaired_nodes.iter().map(|i| i + 1).collect(),
        report: merged.one_based(),
        per_node_per_stripe: per_stripe,
    };
    write_out(out, &serde_json::to_string(&output).expect("report serializes"))
}

fn symbols_to_bytes(symbols: &[FieldElement]) -> CliResult<Vec<u8>> {
    symbols
        .iter()
        .map(|s| {
            u8::try_from(s.value()).map_err(|_| {
                CliError::new(EXIT_VERIFY, format!("decoded symbol {} is not a byte", s.value()))
            })
        })
        .collect()
}

fn cmd_decode(a: &DecodeArgs, out: &mut impl Write, err: &mut impl Write) -> CliResult<()> {
    let store = Store::load(&a.dir)?;
    let k = store.code.k();
    for (node, reason) in &store.problems {
        let _ = writeln!(err, "warning: skipping node {}: {reason}", node + 1);
    }
    let chosen: Vec<usize> = match &a.nodes {
        Some(list) => to_zero_based(list, store.code.n(), "requested")?
            .into_iter()
            .unique()
            .collect(),
        None => store.shards.keys().copied().collect(),
    };
    let usable: Vec<usize> = chosen
        .into_iter()
        .filter(|i| store.shards.contains_key(i))
        .take(k)
        .collect();
    if usable.len() < k {
        return Err(CliError::new(
            EXIT_INSUFFICIENT,
            format!("need {k} readable shards, found {}", usable.len()),
        ));
    }
    let mut bytes = Vec::with_capacity(store.manifest.b * store.manifest.stripe_count);
    for stripe in 0..store.manifest.stripe_count {
        let nodes: Vec<(usize, Vec<FieldElement>)> =
            store.stripe_nodes(stripe, &usable).into_iter().collect();
        bytes.extend(symbols_to_bytes(&store.code.decode(&nodes)?)?);
    }
    let len = store.manifest.original_length_bytes as usize;
    if len > bytes.len() {
        return Err(CliError::new(EXIT_VERIFY, "manifest length exceeds the decoded data"));
    }
    bytes.truncate(len);
    fs::write(&a.out, &bytes).map_err(|e| CliError::io(&a.out, e))?;
    write_out(
        out,
        &format!(
            "decoded {len} bytes from nodes {}",
            usable.iter().map(|i| i + 1).join(",")
        ),
    )
}

fn cmd_verify(a: &VerifyArgs, out: &mut impl Write) -> CliResult<()> {
    let store = Store::load(&a.dir)?;
    let code = &store.code;
    let (n, k) = (code.n(), code.k());
    let mut failures = 0usize;
    let mut say = |out: &mut dyn Write, ok: bool, line: String| {
        if !ok {
            failures += 1;
        }
        let _ = writeln!(out, "{} {line}", if ok { "ok  " } else { "FAIL" });
    };

    for node in 0..n {
        match store.problems.get(&node) {
            Some(reason) => say(out, false, format!("shard {}: {reason}", node + 1)),
            None => say(out, true, format!("shard {}: readable", node + 1)),
        }
    }

    let em = extract_encoding_matrix(code);
    let rec = verify_reconstruction(&em, k);
    say(
        out,
        rec.passed(),
        format!(
            "reconstruction: {}/{} node subsets of size {k} have full rank ({})",
            rec.checked - rec.failures.len(),
            rec.checked,
            match rec.mode {
                CheckMode::Exhaustive { .. } => "exhaustive",
                CheckMode::Sampled { .. } => "sampled",
            }
        ),
    );

    if store.problems.is_empty() {
        let all: Vec<usize> = (0..n).collect();
        let mut consistent = true;
        for stripe in 0..store.manifest.stripe_count {
            let nodes = store.stripe_nodes(stripe, &all);
            let first_k: Vec<(usize, Vec<FieldElement>)> =
                nodes.iter().take(k).map(|(i, c)| (*i, c.clone())).collect();
            let ok = code
                .decode(&first_k)
                .and_then(|src| code.encode(&src))
                .map(|enc| enc.iter().enumerate().all(|(i, c)| nodes[&i] == *c))
                .unwrap_or(false);
            consistent &= ok;
        }
        say(
            out,
            consistent,
            format!(
                "consistency: all {} stripes re-encode to the stored shards",
                store.manifest.stripe_count
            ),
        );
    }

    if a.repair_audit {
        let patterns = repair_patterns(code);
        let (beta1, beta2) = code.betas();
        let mut passed = 0;
        for failed in &patterns {
            let ok = audit_one(code, failed, &em, beta1, beta2);
            if ok {
                passed += 1;
            } else {
                say(
                    out,
                    false,
                    format!("repair audit: failure set {{{}}}", failed.iter().map(|i| i + 1).join(",")),
                );
            }
        }
        say(
            out,
            passed == patterns.len(),
            format!("repair audit: {passed}/{} failure sets repair exactly within (beta1, beta2) = ({beta1}, {beta2})", patterns.len()),
        );
    }

    if failures > 0 {
        return Err(CliError::new(EXIT_VERIFY, format!("{failures} checks failed")));
    }
    Ok(())
}

/// Every failure pattern of the nominal size `t` the code can repair.
fn repair_patterns(code: &Code) -> Vec<Vec<usize>> {
    let (n, k, t) = (code.n(), code.k(), code.t());
    match code {
        Code::Mbcr(_) => (0..n).combinations(t).collect(),
        Code::Mscr(_) => (0..k)
            .combinations(t)
            .chain((k..n).combinations(t))
            .collect(),
    }
}

fn audit_one(
    code: &Code,
    failed: &[usize],
    em: &crate::simulator::EncodingMatrix,
    beta1: usize,
    beta2: usize,
) -> bool {
    let policy = HelperPolicy::LowestIndex;
    let Ok(helpers) = code.helper_sets(failed, &policy) else {
        return false;
    };
    let Ok(vt) = probe_transcript(code, failed, &helpers) else {
        return false;
    };
    let total: usize = vt.entries.iter().map(|e| e.vectors.rows()).sum();
    verify_transcript(&vt, em, beta1, beta2).passed()
        && total == code.expected_total(failed.len())
        && encoding_matrix_after_repair(code, failed, &policy).is_ok_and(|after| after == *em)
}
