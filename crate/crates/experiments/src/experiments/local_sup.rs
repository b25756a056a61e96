use serde_json::json;
use simplicial_core::averaging::local_sup_average;
use simplicial_core::geometry::SimplexConfig;
use simplicial_core::grid::{
    dft_forward, lp_norm, random_test_function, trial_seed, DenseFunction, GeneratorSpec,
};
use simplicial_core::littlewood_paley::{lcm_t, ArcScale, FrequencyArcs};

use super::{echo, max_of, quotient, ratio, require, Context, Experiment};
use crate::error::{ExperimentError, Result};
use crate::report::{eq, num, AggregateOp, Comparison, Report, ReportBuilder, Table};

fn arcs_for(simplex: &SimplexConfig, l: u32, j: u32) -> Result<FrequencyArcs> {
    Ok(FrequencyArcs::new(
        simplex.norm_sq() as u64,
        l,
        j,
        lcm_t(j)?,
    ))
}

/// Rejects `f` unless its spectrum vanishes on the arcs, up to rounding.
pub fn check_support_off_arcs(f: &DenseFunction, arcs: &FrequencyArcs) -> Result<()> {
    let shape = f.shape();
    let spectrum = dft_forward(f);
    let coefficients = spectrum.coefficients();
    let scale = coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let inside = arcs.grid_indices(shape, ArcScale::OUTER, true);
    let tolerance = 1e-10 * scale.max(f64::MIN_POSITIVE);
    if let Some(&a) = inside.iter().find(|&&a| coefficients[a].norm() > tolerance) {
        return Err(ExperimentError::config(format!(
            "local-sup: test function has spectrum at frequency {:?} / {} inside the arcs (l = {}, j = {})",
            shape.point(a),
            shape.period(),
            arcs.l,
            arcs.j
        )));
    }
    Ok(())
}

/// `|sup_{4^l <= lambda^2 <= 4^{l+1}} |A_{lambda S} f||_2 / |f|_2` for test
/// functions with spectrum off the arcs of band `j`, for each configured `j`.
pub fn run_local_sup(ctx: &Context<'_>) -> Result<Report> {
    let cfg = &ctx.config.local_sup;
    let simplex = ctx.config.simplex()?;
    let shape = ctx.config.shape()?;
    require(!cfg.bands.is_empty(), || {
        "local_sup: empty band list".into()
    })?;
    require(cfg.bands.iter().all(|&j| j >= 1), || {
        "local_sup: bands start at j = 1".into()
    })?;
    require(cfg.bands.windows(2).all(|w| w[0] < w[1]), || {
        "local_sup: bands must be strictly increasing".into()
    })?;

    let mut complements = Vec::new();
    let mut infeasible = Vec::new();
    for &j in &cfg.bands {
        let arcs = arcs_for(&simplex, cfg.l, j)?;
        let outside = arcs.grid_indices(shape, ArcScale::OUTER, false);
        if outside.is_empty() {
            infeasible.push(format!("j = {j} (half-width {})", arcs.half_width()));
        }
        complements.push((j, arcs, outside));
    }
    if !infeasible.is_empty() {
        return Err(ExperimentError::Infeasible(format!(
            "local-sup: at l = {} the arcs cover every frequency of Z_{}^{} for {}; no test function has spectrum off them",
            cfg.l,
            shape.period(),
            shape.dim(),
            infeasible.join(", ")
        )));
    }

    let mut table = Table::new(&[
        "trial",
        "seed",
        "j",
        "norm",
        "ratio",
        "bound",
        "ratio_over_bound",
        "dilations",
    ]);
    for (j, arcs, outside) in &complements {
        for i in 0..cfg.trials {
            let seed = trial_seed(ctx.config.seed, i as u64);
            let f =
                random_test_function(seed, shape, &GeneratorSpec::fourier_band(outside.clone()))?;
            check_support_off_arcs(f.as_dense().expect("dense generator"), arcs)?;
            let norm = lp_norm(&f, 2.0)?;
            let sup = local_sup_average(&f, &simplex, cfg.l, cfg.stride, ctx.source)?;
            require(!sup.is_empty(), || {
                format!("local-sup: no admissible dilation at l = {}", cfg.l)
            })?;
            let r = ratio(lp_norm(&sup.output, 2.0)?, norm);
            let jf = *j as f64;
            let bound = 2f64.powf(-jf / 2.0) / jf;
            table.push(vec![
                json!(i),
                json!(seed),
                json!(j),
                num(norm),
                num(r),
                num(bound),
                num(r / bound),
                json!(sup.lambda_sq_used.len()),
            ]);
        }
    }

    let mut b = ReportBuilder::new("local-sup", echo(ctx.config, "local_sup", cfg));
    b.table("trials", table).aggregate(
        "fitted_constant",
        max_of("trials", "ratio_over_bound", vec![]),
    );
    for &j in &cfg.bands {
        b.aggregate(
            &format!("mean_ratio_j{j}"),
            AggregateOp::Mean {
                table: "trials".into(),
                column: "ratio".into(),
                filter: vec![eq("j", j)],
            },
        );
    }
    for w in cfg.bands.windows(2) {
        let name = format!("step_j{}_to_j{}", w[0], w[1]);
        b.aggregate(
            &name,
            quotient(
                &format!("mean_ratio_j{}", w[1]),
                &format!("mean_ratio_j{}", w[0]),
            ),
        )
        .check(
            &format!("non-increasing from j = {} to {}", w[0], w[1]),
            &name,
            Comparison::Le,
            1.0,
        );
    }
    b.plot("ratios", "trials", "j", "ratio");
    Ok(b.finish(ctx.stable))
}

pub struct LocalSupExperiment;

impl Experiment for LocalSupExperiment {
    fn name(&self) -> &'static str {
        "local-sup"
    }

    fn about(&self) -> &'static str {
        "Local maximal averages of functions with spectrum off the major arcs"
    }

    fn run(&self, ctx: &Context<'_>) -> Result<Report> {
        run_local_sup(ctx)
    }
}
