//! Acceptance suite: one line per criterion.
//!
//! Criteria known to be unattainable are still run as stated and print
//! `FAIL (expected, see ledger)`. The process exits nonzero when any other
//! criterion fails or when an expected failure unexpectedly passes.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simplicial_core::averaging::{smoothed_kernel, DirectEnumeration};
use simplicial_core::geometry::{
    count_representations, enumerate_simplex_copies, enumerate_sphere, SimplexConfig,
};
use simplicial_core::grid::{lp_norm_dense, random_test_function, GeneratorSpec, GridShape};
use simplicial_core::littlewood_paley::Increment;
use simplicial_core::martingale::DyadicScheme;
use simplicial_core::variation::{jump_count, v_r, Exponent};
use simplicial_experiments::experiments::{
    run_jump_theorem, run_lemma_decay, run_local_sup, run_prop_square_multiplier, run_scaling,
    run_theorem_variation,
};
use simplicial_experiments::{Context, ExperimentConfig, ExperimentError, Report};

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Expect {
    Pass,
    Fail,
}

struct Criterion {
    id: u32,
    name: &'static str,
    expect: Expect,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "sum-of-four-squares oracle",
            expect: Expect::Pass,
            run: sum_of_squares,
        },
        Criterion {
            id: 2,
            name: "enumeration matches box oracles",
            expect: Expect::Pass,
            run: enumeration,
        },
        Criterion {
            id: 3,
            name: "cardinality scaling",
            expect: Expect::Pass,
            run: scaling,
        },
        Criterion {
            id: 4,
            name: "variation and jump exactness",
            expect: Expect::Pass,
            run: sequence_oracles,
        },
        Criterion {
            id: 5,
            name: "definitional inequalities",
            expect: Expect::Pass,
            run: sequence_inequalities,
        },
        Criterion {
            id: 6,
            name: "multiplier telescoping",
            expect: Expect::Pass,
            run: telescoping,
        },
        Criterion {
            id: 7,
            name: "plateau and support exactness",
            expect: Expect::Pass,
            run: plateau,
        },
        Criterion {
            id: 8,
            name: "square sums at desk scale",
            expect: Expect::Fail,
            run: square_sums,
        },
        Criterion {
            id: 9,
            name: "smoothed kernel mass",
            expect: Expect::Pass,
            run: kernel_mass,
        },
        Criterion {
            id: 10,
            name: "martingale suite",
            expect: Expect::Pass,
            run: martingale,
        },
        Criterion {
            id: 11,
            name: "decay of smoothed averages",
            expect: Expect::Fail,
            run: decay,
        },
        Criterion {
            id: 12,
            name: "variation and jump stability",
            expect: Expect::Pass,
            run: stability,
        },
        Criterion {
            id: 13,
            name: "local supremum trend",
            expect: Expect::Fail,
            run: local_sup,
        },
        Criterion {
            id: 14,
            name: "command line end to end",
            expect: Expect::Pass,
            run: cli_end_to_end,
        },
    ];

    // `ACCEPTANCE_ONLY=2,11` runs a subset.
    let only: Option<Vec<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    let mut bad = 0;
    for c in criteria
        .iter()
        .filter(|c| only.as_ref().is_none_or(|o| o.contains(&c.id)))
    {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::new(false, format!("panicked: {msg}"))
        });
        let status = match (outcome.passed, c.expect) {
            (true, Expect::Pass) => "PASS",
            (false, Expect::Fail) => "FAIL (expected, see ledger)",
            (false, Expect::Pass) => {
                bad += 1;
                "FAIL"
            }
            (true, Expect::Fail) => {
                bad += 1;
                "XPASS (unexpected pass)"
            }
        };
        println!(
            "criterion {:>2} {}: {status} [{}; {:.1} s]",
            c.id,
            c.name,
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if bad > 0 {
        println!("{bad} criteria did not meet expectations");
        std::process::exit(1);
    }
}

fn run_with(
    config: &ExperimentConfig,
    f: fn(&Context<'_>) -> Result<Report, ExperimentError>,
) -> Result<Report, ExperimentError> {
    let ctx = Context {
        config,
        source: &DirectEnumeration,
        stable: true,
    };
    f(&ctx)
}

fn agg(report: &Report, name: &str) -> f64 {
    report.aggregate(name).unwrap_or(f64::NAN)
}

// Sums of squares and enumeration.

fn jacobi_r4(m: u64) -> u64 {
    8 * (1..=m).filter(|d| m.is_multiple_of(*d) && d % 4 != 0).sum::<u64>()
}

fn sum_of_squares() -> Outcome {
    let start = Instant::now();
    let mismatches = (1..=200u64)
        .filter(|&m| count_representations(4, m).unwrap() != jacobi_r4(m))
        .count();
    let origin = count_representations(4, 0).unwrap() == 1;
    let t = start.elapsed();
    Outcome::new(
        mismatches == 0 && origin && t < Duration::from_secs(10),
        format!("1 <= m <= 200: {mismatches} mismatches, r_4(0) = 1: {origin}"),
    )
}

/// Widest dimension the box oracle handles; shorter points are zero-padded.
const MAX_N: usize = 6;

type Point = [i32; MAX_N];

/// Points of the box `[-r, r]^n` bucketed by squared norm up to `m_max`,
/// each bucket in lexicographic order.
fn sphere_buckets(n: usize, m_max: usize) -> Vec<Vec<Point>> {
    let r = (m_max as f64).sqrt().floor() as i32;
    let mut buckets = vec![Vec::new(); m_max + 1];
    let mut x = [0; MAX_N];
    x[..n].iter_mut().for_each(|c| *c = -r);
    loop {
        let q = x.iter().map(|c| c * c).sum::<i32>() as usize;
        if q <= m_max {
            buckets[q].push(x);
        }
        let Some(pos) = (0..n).rev().find(|&i| x[i] < r) else {
            break;
        };
        x[pos] += 1;
        x[pos + 1..n].iter_mut().for_each(|c| *c = -r);
    }
    buckets
}

/// Coordinates are at most 8 in absolute value, so wrapping arithmetic is
/// exact; it lets the compiler vectorise the pair scan.
fn dist_sq(a: &Point, b: &Point) -> i32 {
    a.iter().zip(b).fold(0i32, |acc, (x, y)| {
        let d = x.wrapping_sub(*y);
        acc.wrapping_add(d.wrapping_mul(d))
    })
}

fn same(got: &[i64], want: &[i32]) -> bool {
    got.len() == want.len() && got.iter().zip(want).all(|(&g, &w)| g == w as i64)
}

/// Streams the oracle's copies in lexicographic order against the
/// enumerator's output; returns the number of copies when they agree.
fn copies_agree(simplex: &SimplexConfig, buckets: &[Vec<Point>], lambda_sq: u64) -> Option<usize> {
    let set = enumerate_simplex_copies(simplex, lambda_sq).unwrap();
    let d = simplex.dist_sq();
    let n = simplex.n();
    let lam = lambda_sq as i64;
    let sphere = |i: usize| &buckets[(lam * d[0][i]) as usize];
    let mut got = set.points();
    match simplex.k() {
        1 => {
            for p in sphere(1) {
                if !same(got.next()?, &p[..n]) {
                    return None;
                }
            }
        }
        2 => {
            let target = (lam * d[1][2]) as i32;
            for p in sphere(1) {
                for q in sphere(2) {
                    if dist_sq(p, q) == target {
                        let c = got.next()?;
                        if !same(&c[..n], &p[..n]) || !same(&c[n..], &q[..n]) {
                            return None;
                        }
                    }
                }
            }
        }
        k => panic!("oracle covers k <= 2, got {k}"),
    }
    got.next().is_none().then_some(set.count())
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn enumeration() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    let mut copies = 0usize;
    let mut failures = Vec::new();
    for n in 1..=6 {
        let buckets = sphere_buckets(n, 72);
        for m in 0..=36u64 {
            let set = enumerate_sphere(n, m).unwrap();
            cases += 1;
            let sphere = &buckets[m as usize];
            if set.count() != sphere.len()
                || !set.points().zip(sphere).all(|(g, w)| same(g, &w[..n]))
            {
                failures.push(format!("sphere n={n} m={m}"));
            }
        }
        let e1 = unit(n, 0);
        let mut simplices = vec![SimplexConfig::new(n, vec![e1.clone()]).unwrap()];
        if n >= 2 {
            let e2 = unit(n, 1);
            let diag: Vec<i64> = e1.iter().zip(&e2).map(|(a, b)| a + b).collect();
            simplices.push(SimplexConfig::new(n, vec![diag.clone()]).unwrap());
            simplices.push(SimplexConfig::new(n, vec![e1.clone(), e2]).unwrap());
            if n <= 4 {
                simplices.push(SimplexConfig::new(n, vec![e1.clone(), diag]).unwrap());
            }
        }
        for s in &simplices {
            for lambda_sq in 1..=36 {
                cases += 1;
                match copies_agree(s, &buckets, lambda_sq) {
                    Some(c) => copies += c,
                    None => failures.push(format!(
                        "copies n={n} {:?} lambda^2={lambda_sq}",
                        s.vertices()
                    )),
                }
            }
        }
    }
    let t = start.elapsed();
    Outcome::new(
        failures.is_empty() && t < Duration::from_secs(60),
        format!(
            "{cases} cases, {copies} copies, {} mismatches{}",
            failures.len(),
            failures
                .first()
                .map(|f| format!(", first: {f}"))
                .unwrap_or_default()
        ),
    )
}

fn scaling() -> Outcome {
    let mut config = ExperimentConfig::bundled();
    config.scaling.lambdas = vec![2, 4, 8, 16];
    config.scaling.band = 8.0;
    let report = run_with(&config, run_scaling).unwrap();
    let spread = agg(&report, "spread");
    Outcome::new(
        report.passed && spread <= 8.0,
        format!("n = 5, s = e1: max/min = {spread:.3}"),
    )
}

// Sequences.

const EXPONENTS: [f64; 5] = [1.0, 2.0, 2.5, 3.0, f64::INFINITY];

struct SequenceCase {
    values: Vec<f64>,
    lams: Vec<f64>,
}

fn sequence_cases() -> Vec<SequenceCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f5e9);
    (0..10_000)
        .map(|i| {
            let len = rng.random_range(1..=12);
            let values: Vec<f64> = if i % 2 == 0 {
                (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
            } else {
                (0..len).map(|_| rng.random_range(0..4) as f64).collect()
            };
            let mut lams = vec![rng.random_range(0.01..2.5)];
            let (a, b) = (rng.random_range(0..len), rng.random_range(0..len));
            let gap = (values[a] - values[b]).abs();
            if gap > 0.0 {
                lams.push(gap);
            }
            SequenceCase { values, lams }
        })
        .collect()
}

fn pow(d: f64, r: f64) -> f64 {
    if r == 2.5 {
        d * d * d.sqrt()
    } else {
        d.powi(r as i32)
    }
}

/// Variations for every exponent in `EXPONENTS` and jump counts for every
/// `lam`, by maximising over all index subsets: consecutive elements of a
/// subset are exactly the chains the definitions allow.
fn exhaustive(values: &[f64], lams: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let len = values.len();
    let mut sums = [0.0f64; EXPONENTS.len()];
    let mut jumps = vec![0usize; lams.len()];
    let mut idx = Vec::with_capacity(len);
    for mask in 1u32..(1 << len) {
        idx.clear();
        idx.extend((0..len).filter(|i| mask >> i & 1 == 1));
        let mut acc = [0.0f64; EXPONENTS.len()];
        let mut count = vec![0usize; lams.len()];
        for w in idx.windows(2) {
            let d = (values[w[1]] - values[w[0]]).abs();
            for (a, &r) in acc.iter_mut().zip(&EXPONENTS) {
                if r.is_infinite() {
                    *a = a.max(d);
                } else {
                    *a += pow(d, r);
                }
            }
            for (c, &lam) in count.iter_mut().zip(lams) {
                if d > lam {
                    *c += 1;
                }
            }
        }
        for (s, a) in sums.iter_mut().zip(acc) {
            *s = s.max(a);
        }
        for (j, c) in jumps.iter_mut().zip(count) {
            *j = (*j).max(c);
        }
    }
    let v = sums
        .iter()
        .zip(&EXPONENTS)
        .map(|(&s, &r)| if r.is_infinite() { s } else { s.powf(1.0 / r) })
        .collect();
    (v, jumps)
}

fn sequence_oracles() -> Outcome {
    let cases = sequence_cases();
    let mut worst = 0.0f64;
    let mut jump_mismatches = 0;
    for case in &cases {
        let (oracle_v, oracle_j) = exhaustive(&case.values, &case.lams);
        for (&r, &o) in EXPONENTS.iter().zip(&oracle_v) {
            let v = v_r(&case.values, Exponent::new(r).unwrap());
            worst = worst.max((v - o).abs() / o.max(1.0));
        }
        for (&lam, &o) in case.lams.iter().zip(&oracle_j) {
            if jump_count(&case.values, lam).unwrap() != o {
                jump_mismatches += 1;
            }
        }
    }
    Outcome::new(
        worst <= 1e-12 && jump_mismatches == 0,
        format!(
            "{} sequences, L <= 12: worst v_r deviation {worst:.1e}, {jump_mismatches} jump mismatches",
            cases.len()
        ),
    )
}

fn sequence_inequalities() -> Outcome {
    let cases = sequence_cases();
    let tol = 1e-12;
    let (mut monotone, mut jump_bound, mut square_bound) = (0, 0, 0);
    for case in &cases {
        let v: Vec<f64> = EXPONENTS
            .iter()
            .map(|&r| v_r(&case.values, Exponent::new(r).unwrap()))
            .collect();
        for i in 0..v.len() {
            for k in i + 1..v.len() {
                if v[i] < v[k] * (1.0 - tol) {
                    monotone += 1;
                }
            }
        }
        let energy = case.values.iter().map(|a| a * a).sum::<f64>().sqrt();
        for &lam in &case.lams {
            let j = jump_count(&case.values, lam).unwrap() as f64;
            for (&r, &vr) in EXPONENTS.iter().zip(&v) {
                if r.is_finite() && vr < lam * j.powf(1.0 / r) * (1.0 - tol) {
                    jump_bound += 1;
                }
            }
            if lam * j.sqrt() > 2.0 * energy * (1.0 + tol) {
                square_bound += 1;
            }
        }
    }
    Outcome::new(
        monotone + jump_bound + square_bound == 0,
        format!(
            "{} sequences: violations v_r1 >= v_r2 {monotone}, v_r >= lam J^(1/r) {jump_bound}, lam sqrt(J) <= 2|a|_2 {square_bound}",
            cases.len()
        ),
    )
}

// Multipliers.

fn small_multiplier_config() -> ExperimentConfig {
    let mut config = ExperimentConfig::bundled();
    let m = &mut config.multiplier_check;
    m.bands = vec![0];
    m.dims = vec![1];
    m.points_per_axis = 64;
    m.l_span = 2;
    m.l_extension = 1;
    config
}

fn telescoping() -> Outcome {
    let report = run_with(&small_multiplier_config(), run_prop_square_multiplier).unwrap();
    let tele = &report.tables["telescoping"];
    let (m, d) = (
        agg(&report, "max_telescoping_error"),
        agg(&report, "max_decomposition_error"),
    );
    Outcome::new(
        m <= 1e-12 && d <= 1e-12,
        format!(
            "{} scales on Z_24^2: multiplier sum error {m:.1e}, f1 + f2 + f3 - f error {d:.1e}",
            tele.rows.len()
        ),
    )
}

fn plateau() -> Outcome {
    let report = run_with(&small_multiplier_config(), run_prop_square_multiplier).unwrap();
    let cases = report.tables["plateau"].rows.len();
    let (p, s, d) = (
        agg(&report, "max_plateau_deviation"),
        agg(&report, "max_off_arc_value"),
        agg(&report, "max_delta_on_inner_arcs"),
    );
    Outcome::new(
        cases > 0 && p == 0.0 && s == 0.0 && d == 0.0,
        format!("{cases} cases: |Psi - 1| on plateaus {p:e}, |Psi| off arcs {s:e}, |Delta Psi| on inner half-arcs {d:e}"),
    )
}

fn square_sums() -> Outcome {
    let mut config = ExperimentConfig::bundled();
    let m = &mut config.multiplier_check;
    m.bands = vec![1, 2];
    m.dims = vec![1, 2];
    m.points_per_axis = 2048;
    m.l_span = 16;
    m.l_extension = 8;
    m.tail_tolerance = 0.01;
    m.increment = Increment::Scale;
    m.record_other_increment = false;
    let report = run_with(&config, run_prop_square_multiplier).unwrap();
    let max = agg(&report, "max_constant");
    let tail = agg(&report, "max_tail_change");
    let (u1, u2) = (
        agg(&report, "scale_uniformity_ratio_kn1"),
        agg(&report, "scale_uniformity_ratio_kn2"),
    );
    Outcome::new(
        max.is_finite() && tail < 0.01 && u1 <= 4.0 && u2 <= 4.0,
        format!(
            "max sum {max:.4}, tail change {tail:.1e}, max/min over j: kn=1 {u1:.3}, kn=2 {u2:.3}"
        ),
    )
}

// Kernels and martingales.

fn kernel_mass() -> Outcome {
    let simplex = SimplexConfig::new(5, vec![unit(5, 0)]).unwrap();
    let shape = GridShape::new(16, 5).unwrap();
    let errors: Vec<f64> = (0..=2)
        .map(|l| {
            (smoothed_kernel(&simplex, l, shape, &DirectEnumeration)
                .unwrap()
                .mass()
                - 1.0)
                .abs()
        })
        .collect();
    let worst = errors.iter().copied().fold(0.0, f64::max);
    Outcome::new(
        worst <= 1e-8,
        format!(
            "l = 0, 1, 2 on Z_16^5: |mass - 1| = {}",
            errors
                .iter()
                .map(|e| format!("{e:.1e}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

fn martingale() -> Outcome {
    let shape = GridShape::new(16, 3).unwrap();
    let scheme = DyadicScheme::new(2, 3).unwrap();
    let top = scheme.max_level(16);
    let (mut tower, mut energy) = (0.0f64, 0.0f64);
    for seed in 0..100 {
        let f = random_test_function(seed, shape, &GeneratorSpec::named("gaussian-iid"))
            .unwrap()
            .into_dense()
            .unwrap();
        let scale = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let levels: Vec<_> = (0..=top)
            .map(|l| scheme.expect_dense(&f, l).unwrap())
            .collect();
        for l1 in 0..=top {
            for l2 in 0..=top {
                let nested = scheme.expect_dense(&levels[l1 as usize], l2).unwrap();
                tower = tower.max(nested.max_abs_diff(&levels[l1.max(l2) as usize]) / scale);
            }
        }
        let total = lp_norm_dense(&f, 2.0).unwrap().powi(2);
        let mut sum = lp_norm_dense(&levels[top as usize], 2.0).unwrap().powi(2);
        for m in 1..=top {
            let d = levels[m as usize].sub(&levels[m as usize - 1]);
            sum += lp_norm_dense(&d, 2.0).unwrap().powi(2);
        }
        energy = energy.max((sum - total).abs() / total);
    }
    Outcome::new(
        tower <= 1e-12 && energy <= 1e-10,
        format!("100 functions on Z_16^3, B = 2: tower deviation {tower:.1e}, energy identity error {energy:.1e}"),
    )
}

fn decay() -> Outcome {
    let start = Instant::now();
    let mut config = ExperimentConfig::bundled();
    config.decay.levels = vec![0, 1, 2, 3];
    config.decay.differences = vec![1, 2, 3];
    let report = run_with(&config, run_lemma_decay).unwrap();
    let t = start.elapsed();
    let positive = report
        .check("decay rate positive")
        .is_some_and(|c| c.passed);
    Outcome::new(
        positive && t < Duration::from_secs(300),
        format!(
            "l in 0..=3, m in 1..=3: slope {:.3}, residual {:.3}; one-sided slopes l >= m {:.3}, l < m {:.3}",
            agg(&report, "slope"),
            agg(&report, "residual"),
            agg(&report, "slope_coarse"),
            agg(&report, "slope_fine")
        ),
    )
}

fn stability() -> Outcome {
    let mut config = ExperimentConfig::bundled();
    config.variation.trials = 50;
    config.variation.scales = vec![1, 2];
    config.variation.extended_scales = vec![1, 2, 4];
    config.variation.r = vec![Exponent::new(3.0).unwrap()];
    config.variation.growth_limit = 1.25;
    config.jump.trials = 50;
    config.jump.scales = vec![1, 2, 4];
    let variation = run_with(&config, run_theorem_variation).unwrap();
    let jump = run_with(&config, run_jump_theorem).unwrap();
    Outcome::new(
        variation.passed && jump.passed,
        format!(
            "50 trials on Z_16^5, r = 3: growth {:.4}; jump margin {:.4}, pointwise violations {}",
            agg(&variation, "growth_r3"),
            agg(&jump, "max_margin"),
            agg(&jump, "max_pointwise_violations")
        ),
    )
}

fn local_sup() -> Outcome {
    let mut config = ExperimentConfig::bundled();
    config.local_sup.bands = vec![1, 2, 3];
    match run_with(&config, run_local_sup) {
        Ok(report) => Outcome::new(report.passed, format!("l = {}", config.local_sup.l)),
        Err(e) => Outcome::new(false, format!("error[{}]: {e}", e.kind())),
    }
}

// Command line.

fn cache_line(stderr: &str) -> Option<(u64, u64)> {
    let line = stderr.lines().find_map(|l| l.strip_prefix("cache: "))?;
    let mut parts = line.split(", ");
    let hits = parts.next()?.strip_suffix(" hits")?.parse().ok()?;
    let misses = parts.next()?.strip_suffix(" misses")?.parse().ok()?;
    Some((hits, misses))
}

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

fn cli_end_to_end() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_simplicial");
    let work = tempfile::tempdir().unwrap();
    let cache = work.path().join("cache");
    let mut problems = Vec::new();
    let mut second_run = (0, 0);
    for run in 1..=2 {
        let out = work.path().join(format!("run{run}"));
        for exp in ["scaling", "multiplier-check", "variation", "decay"] {
            let output = Command::new(bin)
                .arg(exp)
                .arg("--stable")
                .arg("--out")
                .arg(&out)
                .arg("--cache-dir")
                .arg(&cache)
                .env("SIMPLICIAL_LOG", "warn")
                .output()
                .unwrap();
            if output.status.code() != Some(0) {
                problems.push(format!(
                    "{exp} exited {:?} on run {run}",
                    output.status.code()
                ));
            }
            match cache_line(&String::from_utf8_lossy(&output.stderr)) {
                Some((h, m)) if run == 2 => {
                    second_run.0 += h;
                    second_run.1 += m;
                }
                Some(_) => {}
                None => problems.push(format!("{exp}: no cache summary on run {run}")),
            }
        }
    }
    let (first, second) = (
        read_dir(&work.path().join("run1")),
        read_dir(&work.path().join("run2")),
    );
    let mut reports = 0;
    for name in first.keys().filter(|n| n.ends_with(".json")) {
        reports += 1;
        match Report::read(&work.path().join("run1").join(name)) {
            Ok(r) => {
                if let Err(e) = r.validate_schema() {
                    problems.push(format!("{name}: {e}"));
                }
                if !r.verify().is_empty() {
                    problems.push(format!("{name}: stored aggregates do not recompute"));
                }
            }
            Err(e) => problems.push(format!("{name}: {e}")),
        }
    }
    if reports != 4 {
        problems.push(format!("{reports} reports written, expected 4"));
    }
    if first != second {
        problems.push("repeated run is not byte-identical".into());
    }
    let (hits, misses) = second_run;
    if hits == 0 || misses > 0 {
        problems.push(format!("second run: {hits} hits, {misses} misses"));
    }
    Outcome::new(
        problems.is_empty(),
        if problems.is_empty() {
            format!(
                "{} files identical across runs, second run {hits} cache hits, 0 misses",
                first.len()
            )
        } else {
            problems.join("; ")
        },
    )
}
