mod common;

use std::collections::BTreeMap;

use coopregen::field::FieldMatrix;
use coopregen::mbcr::{MbcrCodebook, MbcrError, MbcrParams, MbcrShard};
use coopregen::simulator::{
    encoding_matrix_after_repair, extract_encoding_matrix, is_repair_by_transfer,
    mbcr_dropped_functionals, probe_transcript, verify_reconstruction, Code, EncodingMatrix,
    HelperPolicy,
};
use common::*;
use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn example_nodes_store_printed_formulas() {
    let cb = mbcr_example();
    let em = extract_encoding_matrix(&Code::Mbcr(cb.clone()));
    assert_eq!(em.matrix().shape(), (70, 24));
    for node in 0..7 {
        let forms = mbcr_z_forms(((node + 1) % 7) as i64);
        let rows = em.node_rows(node);
        for (slot, want) in forms.iter().enumerate() {
            assert_eq!(rows.row(slot), *want, "node {} z{}", node + 1, slot + 1);
        }
    }
}

#[test]
fn unit_sources_probe_columns() {
    let cb = mbcr_example();
    let em = extract_encoding_matrix(&Code::Mbcr(cb.clone()));
    for j in [0, 9, 23] {
        let shards = cb.encode(&form(f7(), 24, &[(j, 1)])).unwrap();
        let flat: Vec<_> = shards.iter().flat_map(MbcrShard::symbols).collect();
        assert_eq!(flat, em.matrix().column(j));
    }
}

#[test]
fn dropped_symbol_combination() {
    let cb = mbcr_example();
    let dropped = mbcr_dropped_functionals(&cb);
    for node in 0..7 {
        assert_eq!(dropped[&node].row(0), mbcr_missing_form(((node + 1) % 7) as i64));
    }
}

#[test]
fn any_three_nodes_span_the_file() {
    let em = extract_encoding_matrix(&Code::Mbcr(mbcr_example()));
    let report = verify_reconstruction(&em, 3);
    assert!(report.passed());
    assert_eq!(report.checked, 35);
    for subset in (0..7).combinations(3) {
        assert_eq!(em.nodes_rows(&subset).rank(), 24);
    }
}

#[test]
fn duplicated_node_breaks_reconstruction() {
    let em = extract_encoding_matrix(&Code::Mbcr(mbcr_example()));
    let m = em.matrix();
    let corrupted = FieldMatrix::from_fn(m.field(), 70, 24, |r, c| {
        let src = if (20..30).contains(&r) { r - 10 } else { r };
        m.value(src, c)
    });
    let em = EncodingMatrix::new(corrupted, 7, 10).unwrap();
    let report = verify_reconstruction(&em, 3);
    assert!(!report.passed());
    assert!(report.failures.contains(&vec![0, 1, 2]));
    assert!(!report.failures.contains(&vec![0, 1, 3]));
}

#[test]
fn duplicate_point_is_rejected_at_build() {
    let f = f7();
    let pts: Vec<_> = [1, 2, 2, 4, 5, 6, 0].iter().map(|&v| f.elem(v)).collect();
    let params = MbcrParams { n: 7, k: 3, d: 4, t: 3 };
    assert!(MbcrCodebook::build(f, params, Some(&pts)).is_err());
    let cb = mbcr_example();
    let dup = |m: &FieldMatrix| FieldMatrix::from_fn(f, m.rows(), m.cols(), |r, c| m.value(r, if c == 2 { 1 } else { c }));
    assert!(matches!(
        MbcrCodebook::from_matrices(f, 3, 3, dup(cb.u()), dup(cb.v())),
        Err(MbcrError::ConditionsFailed(_))
    ));
}

#[test]
fn every_triple_repairs_to_identical_encoding() {
    let code = Code::Mbcr(mbcr_example());
    let em = extract_encoding_matrix(&code);
    for failed in (0..7).combinations(3) {
        let after = encoding_matrix_after_repair(&code, &failed, &HelperPolicy::LowestIndex).unwrap();
        assert_eq!(after, em, "failed {failed:?}");
    }
}

#[test]
fn arbitrary_helper_sets_repair_exactly() {
    let f = f11();
    let params = MbcrParams { n: 9, k: 3, d: 4, t: 3 };
    let cb = MbcrCodebook::build(f, params, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let src = random_symbols(f, cb.file_size(), &mut rng);
    let shards = cb.encode(&src).unwrap();
    let failed = [0, 4, 8];
    let live: BTreeMap<usize, MbcrShard> = shards
        .iter()
        .filter(|s| !failed.contains(&s.node))
        .map(|s| (s.node, s.clone()))
        .collect();
    let survivors: Vec<usize> = live.keys().copied().collect();
    for (n, helpers) in survivors.iter().copied().combinations(4).enumerate() {
        let mut map = cb.default_helpers(&failed);
        map.insert(0, helpers.clone());
        let rotated: Vec<usize> = survivors.iter().cycle().skip(n % 6).take(4).copied().collect();
        map.insert(8, rotated);
        let (rep, tr) = cb.repair(&failed, &map, &live).unwrap();
        assert!(rep.iter().all(|r| *r == shards[r.node]), "helpers {map:?}");
        assert_eq!(tr.grand_total(), 2 * 4 * 3 + 3 * 2);
    }
}

#[test]
fn zero_file_repairs_with_same_counts() {
    let cb = mbcr_example();
    let shards = cb.encode(&vec![f7().zero(); 24]).unwrap();
    let failed = [1, 3, 5];
    let live = shards
        .iter()
        .filter(|s| !failed.contains(&s.node))
        .map(|s| (s.node, s.clone()))
        .collect();
    let (rep, tr) = cb.repair(&failed, &cb.default_helpers(&failed), &live).unwrap();
    assert!(rep.iter().all(|r| r.symbols().iter().all(|s| s.is_zero())));
    assert_eq!(tr.grand_total(), 30);
}

/// Helpers send combinations of their stored symbols, not stored symbols, so
/// this code is not repair-by-transfer. The property holds for the MSCR
/// example instead; see `golden_mscr`.
#[test]
fn example_is_not_repair_by_transfer() {
    let cb = mbcr_example();
    let code = Code::Mbcr(cb.clone());
    let em = extract_encoding_matrix(&code);
    let failed = vec![4, 5, 6];
    let helpers = code.helper_sets(&failed, &HelperPolicy::LowestIndex).unwrap();
    let vt = probe_transcript(&code, &failed, &helpers).unwrap();
    assert!(!is_repair_by_transfer(&vt, &em, &mbcr_dropped_functionals(&cb)));
}

#[test]
fn second_parameter_set_round_trips() {
    let f = f7();
    let params = MbcrParams { n: 6, k: 2, d: 3, t: 3 };
    let cb = MbcrCodebook::build(f, params, None).unwrap();
    assert_eq!(cb.file_size(), 2 * (6 + 3 - 2));
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let src = random_symbols(f, cb.file_size(), &mut rng);
    let shards = cb.encode(&src).unwrap();
    for pair in (0..6).combinations(2) {
        let pick: Vec<_> = pair.iter().map(|&i| shards[i].clone()).collect();
        assert_eq!(cb.decode(&pick).unwrap(), src);
    }
    for failed in (0..6).combinations(3) {
        let live = shards
            .iter()
            .filter(|s| !failed.contains(&s.node))
            .map(|s| (s.node, s.clone()))
            .collect();
        let (rep, tr) = cb.repair(&failed, &cb.default_helpers(&failed), &live).unwrap();
        assert!(rep.iter().all(|r| *r == shards[r.node]));
        assert_eq!(tr.grand_total(), 2 * 3 * 3 + 3 * 2);
    }
}
