mod common;

use std::collections::BTreeMap;

use coopregen::field::{FieldMatrix, PrimeField};
use coopregen::mbcr::{MbcrCodebook, MbcrParams};
use coopregen::mscr::{MscrCodebook, MscrOptions};
use coopregen::simulator::{
    encoding_matrix_after_repair, extract_encoding_matrix, probe_transcript, run_scenario,
    verify_reconstruction, verify_transcript, Code, HelperPolicy, SimError, StorageCluster,
};
use coopregen::tradeoff::Rational;
use coopregen::transcript::Phase;
use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rational(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

#[test]
fn golden_scenarios() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut cluster =
        StorageCluster::new(Code::Mbcr(mbcr_example()), &random_symbols(f7(), 24, &mut rng)).unwrap();
    let before = cluster.nodes().clone();
    let out = run_scenario(&mut cluster, &[4, 5, 6], &HelperPolicy::LowestIndex).unwrap();
    assert_eq!(out.report.total, 30);
    assert!(out.report.per_node.values().all(|&v| v == 10));
    assert_eq!(out.report.predicted, rational(10));
    assert!(out.report.optimal);
    assert_eq!(cluster.nodes(), &before);
    assert!(cluster.failed().is_empty());

    let mut cluster =
        StorageCluster::new(Code::Mscr(mscr_example()), &random_symbols(f11(), 16, &mut rng)).unwrap();
    let before = cluster.nodes().clone();
    let out = run_scenario(&mut cluster, &[0, 1, 2], &HelperPolicy::LowestIndex).unwrap();
    assert_eq!(out.report.total, 21);
    assert!(out.report.per_node.values().all(|&v| v == 7));
    assert_eq!(out.report.predicted, rational(7));
    assert!(out.report.optimal);
    assert_eq!(cluster.nodes(), &before);
    assert_eq!(
        run_scenario(&mut cluster, &[0, 4], &HelperPolicy::LowestIndex).unwrap_err(),
        SimError::MixedFailureUnsupported
    );
}

#[test]
fn report_serializes_to_json() {
    let mut cluster = StorageCluster::new(Code::Mscr(mscr_example()), &vec![f11().zero(); 16]).unwrap();
    let out = run_scenario(&mut cluster, &[5, 6, 7], &HelperPolicy::LowestIndex).unwrap();
    let json = serde_json::to_value(out.report.one_based()).unwrap();
    assert_eq!(json["total"], 21);
    assert_eq!(json["per_node"]["6"], 7);
    assert_eq!(json["predicted"], "7");
    assert_eq!(json["optimal"], true);
}

#[test]
fn decode_after_failures() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let src = random_symbols(f7(), 24, &mut rng);
    let mut cluster = StorageCluster::new(Code::Mbcr(mbcr_example()), &src).unwrap();
    cluster.fail(&[0, 2, 4]).unwrap();
    assert_eq!(cluster.decode(None).unwrap(), src);
    assert_eq!(cluster.decode(Some(&[1, 5, 6])).unwrap(), src);
    assert!(matches!(
        cluster.decode(Some(&[0, 1, 3])),
        Err(SimError::NotEnoughNodes { need: 3, got: 2 })
    ));
}

#[test]
fn counts_do_not_depend_on_data() {
    for code in [Code::Mbcr(mbcr_example()), Code::Mscr(mscr_example())] {
        let mut shapes = Vec::new();
        for seed in [10, 11] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let src = random_symbols(code.field(), code.file_size(), &mut rng);
            let mut cluster = StorageCluster::new(code.clone(), &src).unwrap();
            let out = run_scenario(&mut cluster, &[4, 5, 6], &HelperPolicy::LowestIndex).unwrap();
            shapes.push(out.transcript.shape());
        }
        assert_eq!(shapes[0], shapes[1]);
    }
}

#[test]
fn random_helpers_keep_the_encoding() {
    let code = Code::Mbcr(MbcrCodebook::build(f11(), MbcrParams { n: 10, k: 3, d: 5, t: 2 }, None).unwrap());
    let em = extract_encoding_matrix(&code);
    for seed in 0..5 {
        let policy = HelperPolicy::Random(seed);
        let failed = [seed as usize, 9 - seed as usize];
        let after = encoding_matrix_after_repair(&code, &failed, &policy).unwrap();
        assert_eq!(after, em);
        let helpers = code.helper_sets(&failed, &policy).unwrap();
        let vt = probe_transcript(&code, &failed, &helpers).unwrap();
        assert!(verify_transcript(&vt, &em, 2, 1).passed());
    }
}

#[test]
fn explicit_helpers_for_mbcr() {
    let code = Code::Mbcr(mbcr_example());
    let map = BTreeMap::from([(0, vec![3, 4, 5, 6]), (1, vec![3, 4, 5, 6]), (2, vec![3, 4, 5, 6])]);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut cluster = StorageCluster::new(code, &random_symbols(f7(), 24, &mut rng)).unwrap();
    let before = cluster.nodes().clone();
    let out = run_scenario(&mut cluster, &[0, 1, 2], &HelperPolicy::Explicit(map.clone())).unwrap();
    assert_eq!(out.helpers, map);
    assert_eq!(cluster.nodes(), &before);
    let bad = BTreeMap::from([(0, vec![1, 4, 5, 6]), (1, vec![3, 4, 5, 6]), (2, vec![3, 4, 5, 6])]);
    assert!(run_scenario(&mut cluster, &[0, 1, 2], &HelperPolicy::Explicit(bad)).is_err());
}

#[test]
fn verifier_flags_tampering() {
    let code = Code::Mbcr(mbcr_example());
    let em = extract_encoding_matrix(&code);
    let failed = vec![4, 5, 6];
    let helpers = code.helper_sets(&failed, &HelperPolicy::LowestIndex).unwrap();
    let vt = probe_transcript(&code, &failed, &helpers).unwrap();
    assert!(verify_transcript(&vt, &em, 2, 1).passed());
    assert!(!verify_transcript(&vt, &em, 1, 1).passed());
    assert!(!verify_transcript(&vt, &em, 2, 0).passed());

    let mut extra = vt.clone();
    let first = extra.entries.iter().position(|e| e.phase == Phase::Download).unwrap();
    extra.inject_extra_symbol(first);
    let report = verify_transcript(&extra, &em, 2, 1);
    assert!(report.violations.iter().any(|v| v.contains("beta1")));

    // A helper that sends a functional of another node's data.
    let mut foreign = vt.clone();
    let entry = &mut foreign.entries[first];
    let other = (0..7).find(|n| *n != entry.from && !failed.contains(n)).unwrap();
    entry.vectors = em.node_rows(other).select_rows(&[0, 1]);
    assert!(!verify_transcript(&foreign, &em, 2, 1).passed());

    // A new node that forwards something it never received.
    let mut forward = vt.clone();
    let idx = forward.entries.iter().position(|e| e.phase == Phase::Exchange).unwrap();
    let width = em.matrix().cols();
    forward.entries[idx].vectors = FieldMatrix::from_fn(f7(), 1, width, |_, c| u32::from(c == 0));
    assert!(!verify_transcript(&forward, &em, 2, 1).passed());
}

/// Every MBCR parameter set with n <= 8 over F_7, F_11 and F_13 yields a
/// code whose every k nodes recover the file.
#[test]
fn mbcr_parameter_sweep() {
    let mut built = 0;
    for q in [7u64, 11, 13] {
        let field = PrimeField::new(q).unwrap();
        for n in 2..=8usize.min(q as usize) {
            for t in 1..n {
                for d in 1..=n - t {
                    for k in 1..=d {
                        let cb = MbcrCodebook::build(field, MbcrParams { n, k, d, t }, None).unwrap();
                        let em = extract_encoding_matrix(&Code::Mbcr(cb));
                        assert!(verify_reconstruction(&em, k).passed(), "q={q} n={n} k={k} d={d} t={t}");
                        built += 1;
                    }
                }
            }
        }
    }
    assert!(built > 500);
}

#[test]
fn mscr_parameter_sweep() {
    for q in [7u64, 11, 13] {
        let field = PrimeField::new(q).unwrap();
        for k in 1..=5usize {
            if (q as usize) < 2 * k + 1 {
                continue;
            }
            for t in 1..=k {
                let cb = MscrCodebook::build(field, k, t, MscrOptions::default()).unwrap();
                let em = extract_encoding_matrix(&Code::Mscr(cb));
                assert!(verify_reconstruction(&em, k).passed(), "q={q} k={k}");
            }
        }
    }
}
