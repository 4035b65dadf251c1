mod common;

use coopregen::field::{cauchy, is_superregular, vandermonde, FieldMatrix, PrimeField};
use coopregen::mbcr::{MbcrCodebook, MbcrParams};
use coopregen::tradeoff::{
    feasible_single, mbcr_point, mbr_point, min_alpha_single, mscr_point, msr_point,
    tradeoff_table, Rational,
};
use common::*;
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PRIMES: [u64; 4] = [7, 11, 13, 257];

fn field_strategy() -> impl Strategy<Value = PrimeField> {
    prop::sample::select(PRIMES.to_vec()).prop_map(|q| PrimeField::new(q).unwrap())
}

fn matrix(field: PrimeField, rows: usize, cols: usize, seed: u64) -> FieldMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals = random_symbols(field, rows * cols, &mut rng);
    FieldMatrix::from_elements(field, rows, cols, &vals).unwrap()
}

fn int(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Independent evaluation of the single-failure min-sum.
fn min_sum(k: u64, d: u64, alpha: &Rational, beta: &Rational) -> Rational {
    (0..k)
        .map(|i| {
            let cap = int(d - i) * beta;
            if cap < *alpha { cap } else { alpha.clone() }
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn element_inverse(field in field_strategy(), v in 1i64..10_000) {
        let x = field.elem(v);
        prop_assume!(!x.is_zero());
        prop_assert_eq!(x * x.inv().unwrap(), field.one());
        prop_assert_eq!(x.pow(field.modulus() as u64 - 1), field.one());
    }

    #[test]
    fn matrix_inverse_round_trip(field in field_strategy(), n in 1usize..6, seed: u64) {
        let m = matrix(field, n, n, seed);
        match m.inverse() {
            Ok(inv) => {
                prop_assert_eq!(m.mul(&inv).unwrap(), FieldMatrix::identity(field, n));
                prop_assert_eq!(inv.mul(&m).unwrap(), FieldMatrix::identity(field, n));
                prop_assert_eq!(m.rank(), n);
            }
            Err(_) => prop_assert!(m.rank() < n),
        }
    }

    #[test]
    fn rank_of_transpose(field in field_strategy(), r in 1usize..6, c in 1usize..6, seed: u64) {
        let m = matrix(field, r, c, seed);
        prop_assert_eq!(m.rank(), m.transpose().rank());
        prop_assert!(m.rank() <= r.min(c));
    }

    #[test]
    fn product_rank_bound(field in field_strategy(), n in 1usize..5, seed: u64) {
        let a = matrix(field, n, n, seed);
        let b = matrix(field, n, n, seed.wrapping_add(1));
        let ab = a.mul(&b).unwrap();
        prop_assert!(ab.rank() <= a.rank().min(b.rank()));
        prop_assert_eq!(ab.transpose(), b.transpose().mul(&a.transpose()).unwrap());
    }

    #[test]
    fn cauchy_is_superregular(q in prop::sample::select(vec![13u64, 257]), k in 1usize..=6, seed: u64) {
        let field = PrimeField::new(q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pts: Vec<u32> = (0..q as u32).collect();
        pts.shuffle(&mut rng);
        let xs: Vec<_> = pts[..k].iter().map(|&v| field.elem(v as i64)).collect();
        let ys: Vec<_> = pts[k..2 * k].iter().map(|&v| field.elem(v as i64)).collect();
        prop_assert!(is_superregular(&cauchy(field, &xs, &ys).unwrap()).unwrap());
    }

    #[test]
    fn vandermonde_on_distinct_points_is_nonsingular(field in field_strategy(), n in 1usize..7, seed: u64) {
        prop_assume!(n <= field.modulus() as usize);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pts: Vec<u32> = (0..field.modulus()).collect();
        pts.shuffle(&mut rng);
        let pts: Vec<_> = pts[..n].iter().map(|&v| field.elem(v as i64)).collect();
        prop_assert!(vandermonde(field, n, &pts).unwrap().is_nonsingular());
    }

    #[test]
    fn mscr_duality(idx in 0usize..15, seed: u64) {
        let (q, k) = duality_grid()[idx];
        let field = PrimeField::new(q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cb = random_mscr(field, k, &mut rng);
        let x = matrix(field, k, k, seed ^ 1);
        let y = cb.parity_of(&x).unwrap();
        prop_assert_eq!(cb.encode_dual(&y).unwrap(), x);
        let y2 = matrix(field, k, k, seed ^ 2);
        prop_assert_eq!(cb.parity_of(&cb.encode_dual(&y2).unwrap()).unwrap(), y2);
    }

    #[test]
    fn mscr_random_code_repairs_and_decodes(idx in 0usize..15, seed: u64) {
        let (q, k) = duality_grid()[idx];
        let field = PrimeField::new(q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cb = random_mscr(field, k, &mut rng);
        let src = random_symbols(field, k * k, &mut rng);
        let state = cb.encode(&src).unwrap();
        let mut nodes: Vec<usize> = (0..2 * k).collect();
        nodes.shuffle(&mut rng);
        let pick: Vec<_> = nodes[..k].iter().map(|&i| (i, state.node_content(i))).collect();
        prop_assert_eq!(cb.decode(&pick).unwrap(), src);
        let t = 1 + (seed as usize % k);
        let offset = if seed % 2 == 0 { 0 } else { k };
        let mut family: Vec<usize> = (offset..offset + k).collect();
        family.shuffle(&mut rng);
        let failed = &family[..t];
        let live = state.nodes().into_iter().filter(|(i, _)| !failed.contains(i)).collect();
        let rep = cb.repair(failed, &live).unwrap();
        for (node, content) in &rep.columns {
            prop_assert_eq!(content, &state.node_content(*node));
        }
        prop_assert_eq!(rep.transcript.grand_total(), t * (2 * k - t) + t * (t - 1));
    }

    #[test]
    fn mbcr_round_trip(q in prop::sample::select(vec![7u64, 11, 13]), n in 2usize..=7, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = 1 + seed as usize % (n - 1);
        let d = 1 + (seed as usize / 7) % (n - t);
        let k = 1 + (seed as usize / 49) % d;
        let field = PrimeField::new(q).unwrap();
        let cb = MbcrCodebook::build(field, MbcrParams { n, k, d, t }, None).unwrap();
        prop_assert_eq!(cb.file_size(), k * (2 * d + t - k));
        let src = random_symbols(field, cb.file_size(), &mut rng);
        let shards = cb.encode(&src).unwrap();
        prop_assert!(shards.iter().all(|s| s.symbols().len() == 2 * d + t - 1));
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let pick: Vec<_> = order[..k].iter().map(|&i| shards[i].clone()).collect();
        prop_assert_eq!(cb.decode(&pick).unwrap(), src);
        let failed = &order[..t];
        let live = shards.iter().filter(|s| !failed.contains(&s.node)).map(|s| (s.node, s.clone())).collect();
        let (rep, tr) = cb.repair(failed, &cb.default_helpers(failed), &live).unwrap();
        prop_assert!(rep.iter().all(|r| *r == shards[r.node]));
        prop_assert_eq!(tr.grand_total(), 2 * d * t + t * (t - 1));
    }

    #[test]
    fn named_points_meet_the_bound_with_equality(b in 1u64..200, k in 1u64..8, extra in 0u64..6) {
        let d = k + extra;
        for p in [msr_point(b, k, d).unwrap(), mbr_point(b, k, d).unwrap()] {
            let beta = &p.gamma / int(d);
            prop_assert_eq!(min_sum(k, d, &p.alpha, &beta), int(b));
            prop_assert!(feasible_single(b, k, d, &p.alpha, &beta).unwrap());
            prop_assert!(p.bandwidth_identity_holds());
        }
    }

    #[test]
    fn cooperation_beats_independent_repair(b in 1u64..100, k in 2u64..8, extra in 0u64..6, t in 2u64..6) {
        let d = k + extra;
        let coop = mscr_point(b, k, d, t).unwrap();
        let single = msr_point(b, k, d).unwrap();
        prop_assert!(coop.gamma < single.gamma);
        prop_assert!(coop.bandwidth_identity_holds());
        prop_assert!(mbcr_point(b, k, d, t).unwrap().bandwidth_identity_holds());
    }

    #[test]
    fn t1_reductions(b in 1u64..100, k in 1u64..8, extra in 0u64..6) {
        let d = k + extra;
        let (m1, m2) = (mscr_point(b, k, d, 1).unwrap(), msr_point(b, k, d).unwrap());
        prop_assert_eq!(m1.values(), m2.values());
        let (n1, n2) = (mbcr_point(b, k, d, 1).unwrap(), mbr_point(b, k, d).unwrap());
        prop_assert_eq!(n1.values(), n2.values());
    }

    #[test]
    fn curve_rows_are_minimal(b in 1u64..50, k in 1u64..6, extra in 0u64..4, samples in 2usize..8) {
        let d = k + extra;
        let table = tradeoff_table(b, k, d, 1, samples).unwrap();
        prop_assert_eq!(table.rows.len(), samples);
        for row in &table.rows {
            let beta = &row.gamma / int(d);
            prop_assert!(min_sum(k, d, &row.alpha, &beta) >= int(b));
            let smaller = &row.alpha - Rational::new(BigInt::from(1), BigInt::from(1_000_000));
            prop_assert!(min_sum(k, d, &smaller, &beta) < int(b));
            prop_assert_eq!(min_alpha_single(b, k, d, &beta).unwrap(), Some(row.alpha.clone()));
        }
    }
}
