use std::collections::BTreeMap;

use serde_json::json;
use simplicial_core::averaging::{smoothed_kernel, SmoothedKernel};
use simplicial_core::grid::lp_norm_dense;
use simplicial_core::martingale::DyadicScheme;

use super::{echo, max_of, require, run_trials, Context, Experiment};
use crate::error::{ExperimentError, Result};
use crate::report::{eq, num, AggregateOp, Comparison, Condition, Report, ReportBuilder, Table};

/// Below this fraction of `|f|_2` a martingale difference counts as zero.
const ZERO_DIFFERENCE: f64 = 1e-12;

/// `rho(l, m) = |K_l D_m f - E_l D_m f|_2 / |D_m f|_2` with the smoothed
/// kernel `K_l = Psi_{l,0} * w_{2^l S}`, and a least-squares fit of
/// `log2 rho` against `|l - m|`. The one-sided fits (`l >= m` coarse, `l < m`
/// fine) are recorded without a check.
pub fn run_lemma_decay(ctx: &Context<'_>) -> Result<Report> {
    let cfg = &ctx.config.decay;
    let simplex = ctx.config.simplex()?;
    let shape = ctx.config.shape()?;
    require(
        !cfg.levels.is_empty() && !cfg.differences.is_empty(),
        || "decay: levels and differences must be non-empty".into(),
    )?;
    require(cfg.differences.iter().all(|&m| m >= 1), || {
        "decay: martingale differences start at m = 1".into()
    })?;
    let scheme = DyadicScheme::for_norm_sq(simplex.norm_sq() as u64, shape.dim())?;
    let top = scheme.max_level(shape.period());
    let deepest = cfg
        .levels
        .iter()
        .chain(&cfg.differences)
        .copied()
        .max()
        .unwrap_or(0);
    require(deepest <= top, || {
        format!(
            "decay: level {deepest} needs {}^{deepest} to divide N = {}",
            scheme.base(),
            shape.period()
        )
    })?;

    let mut kernels: BTreeMap<u32, SmoothedKernel> = BTreeMap::new();
    for &l in cfg.levels.iter().chain(&cfg.mass_levels) {
        if let std::collections::btree_map::Entry::Vacant(e) = kernels.entry(l) {
            e.insert(smoothed_kernel(&simplex, l, shape, ctx.source)?);
        }
    }

    let mut mass = Table::new(&["l", "mass", "mass_error", "wraparound"]);
    for &l in &cfg.mass_levels {
        let m = kernels[&l].mass();
        mass.push(vec![
            json!(l),
            num(m),
            num((m - 1.0).abs()),
            json!(kernels[&l].wraparound),
        ]);
    }

    let per_trial = run_trials(
        cfg.trials,
        ctx.config.seed,
        shape,
        &cfg.generator,
        |i, seed, f, norm| {
            let f = f.into();
            let mut rows = Vec::new();
            let mut skipped = Vec::new();
            for &m in &cfg.differences {
                let d = scheme
                    .martingale_difference(&f, m)?
                    .into_dense()
                    .ok_or_else(|| ExperimentError::Internal("dense difference".into()))?;
                let nd = lp_norm_dense(&d, 2.0)?;
                if nd <= ZERO_DIFFERENCE * norm {
                    skipped.push(vec![json!(i), json!(seed), json!(m)]);
                    continue;
                }
                for &l in &cfg.levels {
                    let smoothed = kernels[&l].apply(&d);
                    let expected = scheme.expect_dense(&d, l)?;
                    let rho = lp_norm_dense(&smoothed.sub(&expected), 2.0)? / nd;
                    rows.push(vec![
                        json!(i),
                        json!(seed),
                        json!(l),
                        json!(m),
                        json!(l.abs_diff(m)),
                        json!(if l >= m { "coarse" } else { "fine" }),
                        num(rho),
                        num(rho.log2()),
                    ]);
                }
            }
            Ok((rows, skipped))
        },
    )?;
    let mut rho = Table::new(&[
        "trial", "seed", "l", "m", "distance", "side", "rho", "log2_rho",
    ]);
    let mut skipped = Table::new(&["trial", "seed", "m"]);
    for (rows, skips) in per_trial {
        rows.into_iter().for_each(|r| rho.push(r));
        skips.into_iter().for_each(|r| skipped.push(r));
    }
    let any_skipped = !skipped.rows.is_empty();

    let fit = |op: fn(String, String, String, Vec<Condition>) -> AggregateOp,
               filter: Vec<Condition>| {
        op("rho".into(), "distance".into(), "log2_rho".into(), filter)
    };
    let mut b = ReportBuilder::new("decay", echo(ctx.config, "decay", cfg));
    b.table("rho", rho)
        .table("skipped", skipped)
        .table("kernel_mass", mass)
        .aggregate(
            "slope",
            fit(
                |table, x, y, filter| AggregateOp::FitSlope {
                    table,
                    x,
                    y,
                    filter,
                },
                vec![],
            ),
        )
        .aggregate(
            "intercept",
            fit(
                |table, x, y, filter| AggregateOp::FitIntercept {
                    table,
                    x,
                    y,
                    filter,
                },
                vec![],
            ),
        )
        .aggregate(
            "residual",
            fit(
                |table, x, y, filter| AggregateOp::FitResidual {
                    table,
                    x,
                    y,
                    filter,
                },
                vec![],
            ),
        )
        .aggregate(
            "delta_hat",
            AggregateOp::Scaled {
                of: "slope".into(),
                factor: -1.0,
            },
        )
        .aggregate(
            "slope_coarse",
            fit(
                |table, x, y, filter| AggregateOp::FitSlope {
                    table,
                    x,
                    y,
                    filter,
                },
                vec![eq("side", "coarse")],
            ),
        )
        .aggregate(
            "slope_fine",
            fit(
                |table, x, y, filter| AggregateOp::FitSlope {
                    table,
                    x,
                    y,
                    filter,
                },
                vec![eq("side", "fine")],
            ),
        )
        .aggregate("max_rho", max_of("rho", "rho", vec![]))
        .aggregate(
            "max_mass_error",
            max_of("kernel_mass", "mass_error", vec![]),
        )
        .check("decay rate positive", "delta_hat", Comparison::Gt, 0.0)
        .check(
            "smoothed kernels have unit mass",
            "max_mass_error",
            Comparison::Le,
            cfg.mass_tolerance,
        )
        .plot("decay", "rho", "distance", "log2_rho")
        .note(format!(
            "cube base B = ceil(2|s|) = {} replaces the real base 2|s| = {}",
            scheme.base(),
            2.0 * simplex.norm()
        ));
    if kernels.values().any(|k| k.wraparound) {
        b.note("some smoothed kernels are not separated from their periodic images");
    }
    if any_skipped {
        b.note("trials with a vanishing martingale difference are listed in the skipped table");
    }
    Ok(b.finish(ctx.stable))
}

pub struct DecayExperiment;

impl Experiment for DecayExperiment {
    fn name(&self) -> &'static str {
        "decay"
    }

    fn about(&self) -> &'static str {
        "Distance between smoothed averages and cube averages of martingale differences"
    }

    fn run(&self, ctx: &Context<'_>) -> Result<Report> {
        run_lemma_decay(ctx)
    }
}
