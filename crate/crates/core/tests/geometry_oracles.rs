use std::collections::BTreeSet;

use proptest::prelude::*;
use simplicial_core::geometry::{
    count_representations, enumerate_simplex_copies, enumerate_sphere, verify_isometry, CopySet,
    SimplexConfig,
};

fn jacobi_r4(m: u64) -> u64 {
    8 * (1..=m).filter(|d| m % d == 0 && d % 4 != 0).sum::<u64>()
}

/// All integer vectors in `[-r, r]^n` with squared norm `m`, by a full box scan.
fn sphere_box(n: usize, m: i64) -> Vec<Vec<i64>> {
    let r = (m as f64).sqrt() as i64 + 1;
    let side = (2 * r + 1) as usize;
    let mut out = Vec::new();
    for code in 0..side.pow(n as u32) {
        let mut c = code;
        let p: Vec<i64> = (0..n)
            .map(|_| {
                let v = (c % side) as i64 - r;
                c /= side;
                v
            })
            .collect();
        if p.iter().map(|x| x * x).sum::<i64>() == m {
            out.push(p);
        }
    }
    out.sort();
    out
}

fn dist_sq(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y).pow(2)).sum()
}

/// Copies from per-vertex sphere scans, checked pairwise.
fn copies_box(s: &SimplexConfig, lambda_sq: i64) -> BTreeSet<Vec<i64>> {
    let d = s.dist_sq();
    let k = s.k();
    let spheres: Vec<Vec<Vec<i64>>> = (1..=k)
        .map(|i| sphere_box(s.n(), lambda_sq * d[0][i]))
        .collect();
    let mut out = BTreeSet::new();
    let mut idx = vec![0usize; k];
    if spheres.iter().any(|v| v.is_empty()) {
        return out;
    }
    loop {
        let pts: Vec<&Vec<i64>> = (0..k).map(|i| &spheres[i][idx[i]]).collect();
        let ok = (0..k)
            .all(|i| (i + 1..k).all(|j| dist_sq(pts[i], pts[j]) == lambda_sq * d[i + 1][j + 1]));
        if ok {
            out.insert(pts.iter().flat_map(|p| p.iter().copied()).collect());
        }
        let Some(pos) = (0..k).rev().find(|&i| idx[i] + 1 < spheres[i].len()) else {
            break;
        };
        idx[pos] += 1;
        idx[pos + 1..].iter_mut().for_each(|v| *v = 0);
    }
    out
}

fn as_set(c: &CopySet) -> BTreeSet<Vec<i64>> {
    c.points().map(|p| p.to_vec()).collect()
}

#[test]
fn four_squares_match_jacobi() {
    for m in 1..=200 {
        assert_eq!(
            count_representations(4, m).unwrap(),
            jacobi_r4(m),
            "m = {m}"
        );
    }
    assert_eq!(count_representations(4, 0).unwrap(), 1);
}

#[test]
fn sphere_enumeration_matches_box_scan() {
    for n in 1..=4 {
        for m in 0..=20 {
            let set = enumerate_sphere(n, m).unwrap();
            let oracle = sphere_box(n, m as i64);
            assert_eq!(
                set.points().map(|p| p.to_vec()).collect::<Vec<_>>(),
                oracle,
                "n={n} m={m}"
            );
            assert_eq!(set.count() as u64, count_representations(n, m).unwrap());
        }
    }
}

fn test_simplices() -> Vec<SimplexConfig> {
    vec![
        SimplexConfig::unit(2).unwrap(),
        SimplexConfig::new(3, vec![vec![1, 1, 0]]).unwrap(),
        SimplexConfig::new(2, vec![vec![1, 0], vec![0, 1]]).unwrap(),
        SimplexConfig::new(3, vec![vec![1, 0, 0], vec![0, 1, 0]]).unwrap(),
        SimplexConfig::new(3, vec![vec![1, 1, 0], vec![0, 1, 1]]).unwrap(),
        SimplexConfig::new(4, vec![vec![1, 0, 0, 0], vec![1, 1, 0, 0]]).unwrap(),
    ]
}

#[test]
fn simplex_enumeration_matches_box_scan() {
    for s in test_simplices() {
        for lambda_sq in 1..=9 {
            let set = enumerate_simplex_copies(&s, lambda_sq).unwrap();
            assert_eq!(
                as_set(&set),
                copies_box(&s, lambda_sq as i64),
                "{s:?} lambda^2 = {lambda_sq}"
            );
            assert!(set
                .points()
                .all(|p| verify_isometry(&s, lambda_sq, p).unwrap()));
        }
    }
}

#[test]
fn copy_sets_are_closed_under_signed_permutations() {
    for s in test_simplices() {
        let n = s.n();
        let set = enumerate_simplex_copies(&s, 4).unwrap();
        let members = as_set(&set);
        for p in &members {
            // Reverse the coordinate order and negate the first coordinate of every vertex.
            let image: Vec<i64> = p
                .chunks(n)
                .flat_map(|m| {
                    let mut r: Vec<i64> = m.iter().rev().copied().collect();
                    r[0] = -r[0];
                    r
                })
                .collect();
            assert!(members.contains(&image));
            let negated: Vec<i64> = p.iter().map(|x| -x).collect();
            assert!(members.contains(&negated));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn count_agrees_with_enumeration(n in 1usize..5, m in 0u64..40) {
        prop_assert_eq!(enumerate_sphere(n, m).unwrap().count() as u64, count_representations(n, m).unwrap());
    }

    #[test]
    fn cache_format_round_trips(m in 1u64..30) {
        let s = SimplexConfig::new(3, vec![vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        let set = enumerate_simplex_copies(&s, m).unwrap();
        let mut buf = Vec::new();
        set.write_to(&mut buf).unwrap();
        let back = CopySet::read_from(buf.as_slice()).unwrap();
        prop_assert_eq!(back, set);
    }
}
