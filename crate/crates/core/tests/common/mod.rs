//! Oracles shared by the integration tests: symbolic source layouts for the
//! worked examples and random instance generators.

#![allow(dead_code)]

use std::collections::BTreeMap;

use coopregen::field::{cauchy, FieldElement, FieldMatrix, PrimeField};
use coopregen::mbcr::{MbcrCodebook, MbcrParams};
use coopregen::mscr::{MscrCodebook, MscrOptions};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn f7() -> PrimeField {
    PrimeField::new(7).unwrap()
}

pub fn f11() -> PrimeField {
    PrimeField::new(11).unwrap()
}

pub fn mbcr_example() -> MbcrCodebook {
    let params = MbcrParams { n: 7, k: 3, d: 4, t: 3 };
    MbcrCodebook::build(f7(), params, None).unwrap()
}

pub fn mscr_example() -> MscrCodebook {
    MscrCodebook::build(f11(), 4, 3, MscrOptions::default()).unwrap()
}

pub fn random_symbols(field: PrimeField, len: usize, rng: &mut impl Rng) -> Vec<FieldElement> {
    (0..len)
        .map(|_| field.elem(rng.gen_range(0..field.modulus()) as i64))
        .collect()
}

/// A linear form over the source, as `(source index, coefficient)` terms.
pub fn form(field: PrimeField, len: usize, terms: &[(usize, i64)]) -> Vec<FieldElement> {
    let mut v = vec![field.zero(); len];
    for &(idx, c) in terms {
        v[idx] = v[idx] + field.elem(c);
    }
    v
}

/// Source positions of the named entries of the MBCR example message matrix
/// (1-based subscripts, packing A, then B, then C, each row-major).
pub fn a(r: usize, c: usize) -> usize {
    (r - 1) * 3 + (c - 1)
}

pub fn b(r: usize, c: usize) -> usize {
    9 + (r - 1) * 4 + (c - 1)
}

pub fn c(r: usize, c: usize) -> usize {
    assert_eq!(r, 1);
    21 + (c - 1)
}

/// The ten stored symbols of MBCR example node `i`, written out term by term
/// with `i` the node's evaluation point.
pub fn mbcr_z_forms(i: i64) -> Vec<Vec<FieldElement>> {
    let f = f7();
    let p = |e: u32| i.pow(e);
    let rows: Vec<Vec<(usize, i64)>> = vec![
        vec![(a(2, 1), 1), (a(2, 2), p(1)), (a(2, 3), p(2)), (b(2, 1), p(3)), (b(2, 2), p(4)), (b(2, 3), p(5)), (b(2, 4), p(6))],
        vec![(a(3, 1), 1), (a(3, 2), p(1)), (a(3, 3), p(2)), (b(3, 1), p(3)), (b(3, 2), p(4)), (b(3, 3), p(5)), (b(3, 4), p(6))],
        vec![(c(1, 1), 1), (c(1, 2), p(1)), (c(1, 3), p(2))],
        vec![(a(1, 1), 1), (a(2, 1), p(1)), (a(3, 1), p(2)), (c(1, 1), p(3))],
        vec![(a(1, 2), 1), (a(2, 2), p(1)), (a(3, 2), p(2)), (c(1, 2), p(3))],
        vec![(a(1, 3), 1), (a(2, 3), p(1)), (a(3, 3), p(2)), (c(1, 3), p(3))],
        vec![(b(1, 1), 1), (b(2, 1), p(1)), (b(3, 1), p(2))],
        vec![(b(1, 2), 1), (b(2, 2), p(1)), (b(3, 2), p(2))],
        vec![(b(1, 3), 1), (b(2, 3), p(1)), (b(3, 3), p(2))],
        vec![(b(1, 4), 1), (b(2, 4), p(1)), (b(3, 4), p(2))],
    ];
    rows.iter().map(|terms| form(f, 24, terms)).collect()
}

/// The dropped entry of `M v_i` as the combination
/// `-i z1 - i^2 z2 - i^3 z3 + z4 + i z5 + ... + i^6 z10`.
pub fn mbcr_missing_form(i: i64) -> Vec<FieldElement> {
    let f = f7();
    let z = mbcr_z_forms(i);
    let coeffs: Vec<i64> = vec![
        -i,
        -i.pow(2),
        -i.pow(3),
        1,
        i,
        i.pow(2),
        i.pow(3),
        i.pow(4),
        i.pow(5),
        i.pow(6),
    ];
    let mut out = vec![f.zero(); 24];
    for (zj, cj) in z.iter().zip(coeffs) {
        for (o, &v) in out.iter_mut().zip(zj) {
            *o = *o + f.elem(cj) * v;
        }
    }
    out
}

/// Source position of `x_{ij}` in the MSCR example (node `i` holds
/// `x_{i1}..x_{i4}`).
pub fn x(i: usize, j: usize) -> usize {
    (i - 1) * 4 + (j - 1)
}

/// Parity entry in row `r`, column `j` of the rate-1/2 table:
/// `(2 x_{r l} + x_{l r})_l . p_j`.
pub fn mscr_table_form(p: &FieldMatrix, r: usize, j: usize) -> Vec<FieldElement> {
    let f = p.field();
    let mut terms = Vec::new();
    for l in 1..=4 {
        let pl = p.value(l - 1, j - 1) as i64;
        terms.push((x(r, l), 2 * pl));
        terms.push((x(l, r), pl));
    }
    form(f, 16, &terms)
}

/// A super-regular 4x4 matrix over F_7 (found by exhaustive search; a 4x4
/// Cauchy matrix would need eight distinct points).
pub fn superregular_f7_k4() -> FieldMatrix {
    FieldMatrix::from_literal(f7(), &[[3, 6, 6, 1], [1, 5, 3, 3], [2, 5, 1, 5], [3, 2, 1, 3]]).unwrap()
}

/// A random super-regular `k x k` matrix over `field`: a Cauchy matrix on
/// random distinct points, or for `(F_7, 4)` a row/column scaled and
/// permuted copy of [`superregular_f7_k4`].
pub fn random_superregular(field: PrimeField, k: usize, rng: &mut impl Rng) -> FieldMatrix {
    let q = field.modulus() as usize;
    if 2 * k <= q {
        let mut pts: Vec<usize> = (0..q).collect();
        pts.shuffle(rng);
        let xs: Vec<_> = pts[..k].iter().map(|&v| field.elem(v as i64)).collect();
        let ys: Vec<_> = pts[k..2 * k].iter().map(|&v| field.elem(v as i64)).collect();
        return cauchy(field, &xs, &ys).unwrap();
    }
    assert_eq!((q, k), (7, 4), "no super-regular matrix of this size is generated");
    let base = superregular_f7_k4();
    let mut rows: Vec<usize> = (0..k).collect();
    let mut cols: Vec<usize> = (0..k).collect();
    rows.shuffle(rng);
    cols.shuffle(rng);
    let rs: Vec<i64> = (0..k).map(|_| rng.gen_range(1..7)).collect();
    let cs: Vec<i64> = (0..k).map(|_| rng.gen_range(1..7)).collect();
    FieldMatrix::from_fn(field, k, k, |r, c| {
        field
            .elem(base.value(rows[r], cols[c]) as i64 * rs[r] * cs[c])
            .value()
    })
}

pub fn random_nonsingular(field: PrimeField, k: usize, rng: &mut impl Rng) -> FieldMatrix {
    loop {
        let m = FieldMatrix::from_fn(field, k, k, |_, _| rng.gen_range(0..field.modulus()));
        if m.is_nonsingular() {
            return m;
        }
    }
}

/// Random scalars with `a, e != 0` and `a^2 != e^2`.
pub fn random_scalars(field: PrimeField, rng: &mut impl Rng) -> (FieldElement, FieldElement) {
    loop {
        let a = field.elem(rng.gen_range(1..field.modulus()) as i64);
        let e = field.elem(rng.gen_range(1..field.modulus()) as i64);
        if !(a * a - e * e).is_zero() {
            return (a, e);
        }
    }
}

/// A random MSCR code: random nonsingular `U`, random valid scalars and a
/// random super-regular `P`.
pub fn random_mscr(field: PrimeField, k: usize, rng: &mut impl Rng) -> MscrCodebook {
    let (a, e) = random_scalars(field, rng);
    let opts = MscrOptions {
        u: Some(random_nonsingular(field, k, rng)),
        p: Some(random_superregular(field, k, rng)),
        a: Some(a),
        e: Some(e),
    };
    MscrCodebook::build(field, k, k.min(2), opts).unwrap()
}

/// `(q, k)` pairs with k in 2..=5 and q in {7, 11, 13, 257} for which a
/// super-regular k x k matrix exists over F_q (F_7 has none of size 5).
pub fn duality_grid() -> Vec<(u64, usize)> {
    let mut out = Vec::new();
    for q in [7u64, 11, 13, 257] {
        for k in 2..=5usize {
            if !(q == 7 && k == 5) {
                out.push((q, k));
            }
        }
    }
    out
}

pub fn node_map(contents: Vec<Vec<FieldElement>>) -> BTreeMap<usize, Vec<FieldElement>> {
    contents.into_iter().enumerate().collect()
}
