use serde_json::json;
use simplicial_core::geometry::{cardinality_scaling_report, ScalingRow};

use super::{check_scales, echo, max_of, min_of, quotient, Context, Experiment};
use crate::error::Result;
use crate::report::{num, Comparison, Report, ReportBuilder, Table};

/// Exact copy counts `|S_{lambda S}|` normalised by `lambda^(nk - k(k+1))`;
/// checks that their max/min stays within the configured band.
pub fn run_scaling(ctx: &Context<'_>) -> Result<Report> {
    let cfg = &ctx.config.scaling;
    let simplex = ctx.config.simplex()?;
    check_scales("scaling.lambdas", &cfg.lambdas)?;

    let rows: Vec<ScalingRow> = if simplex.k() == 1 {
        cardinality_scaling_report(&simplex, &cfg.lambdas)?
    } else {
        // Enumerated through the copy source so the sets are cached.
        let exponent = simplex.scaling_exponent() as i32;
        cfg.lambdas
            .iter()
            .map(|&lambda| {
                let count = ctx.source.copies(&simplex, lambda * lambda)?.count() as u64;
                Ok(ScalingRow {
                    lambda,
                    lambda_sq: lambda * lambda,
                    count,
                    normalized: count as f64 / (lambda as f64).powi(exponent),
                    regime_ok: simplex.regime_ok(),
                })
            })
            .collect::<Result<_>>()?
    };

    let mut table = Table::new(&["lambda", "lambda_sq", "count", "normalized"]);
    for r in &rows {
        table.push(vec![
            json!(r.lambda),
            json!(r.lambda_sq),
            json!(r.count),
            num(r.normalized),
        ]);
    }
    let mut b = ReportBuilder::new("scaling", echo(ctx.config, "scaling", cfg));
    b.table("counts", table)
        .aggregate("max_normalized", max_of("counts", "normalized", vec![]))
        .aggregate("min_normalized", min_of("counts", "normalized", vec![]))
        .aggregate("spread", quotient("max_normalized", "min_normalized"))
        .check(
            "normalized counts within band",
            "spread",
            Comparison::Le,
            cfg.band,
        )
        .plot("normalized", "counts", "lambda", "normalized")
        .note(format!(
            "exponent nk - k(k+1) = {}",
            simplex.scaling_exponent()
        ));
    if !simplex.regime_ok() {
        b.note("n < 2k + 3: the two-sided growth bound is not known in this dimension");
    }
    Ok(b.finish(ctx.stable))
}

pub struct ScalingExperiment;

impl Experiment for ScalingExperiment {
    fn name(&self) -> &'static str {
        "scaling"
    }

    fn about(&self) -> &'static str {
        "Copy counts against the predicted power of the dilation"
    }

    fn run(&self, ctx: &Context<'_>) -> Result<Report> {
        run_scaling(ctx)
    }
}
