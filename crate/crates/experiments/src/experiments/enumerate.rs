use serde_json::json;
use simplicial_core::geometry::verify_isometry;

use super::{echo, min_of, require, Context, Experiment};
use crate::error::Result;
use crate::report::{num, Comparison, Report, ReportBuilder, Table};

/// Enumerates the configured copy sets through the cache and re-verifies
/// every copy against the defining distances.
pub fn run_enumerate(ctx: &Context<'_>) -> Result<Report> {
    let cfg = &ctx.config.enumerate;
    let simplex = ctx.config.simplex()?;
    require(!cfg.lambda_sq.is_empty(), || {
        "enumerate: empty lambda_sq list".into()
    })?;
    require(cfg.lambda_sq.iter().all(|&l| l > 0), || {
        "enumerate: lambda_sq must be positive".into()
    })?;

    let mut table = Table::new(&["lambda_sq", "count", "verified_fraction"]);
    for &lambda_sq in &cfg.lambda_sq {
        let set = ctx.source.copies(&simplex, lambda_sq)?;
        let mut verified = 0usize;
        for p in set.points() {
            verified += usize::from(verify_isometry(&simplex, lambda_sq, p)?);
        }
        let fraction = if set.is_empty() {
            1.0
        } else {
            verified as f64 / set.count() as f64
        };
        table.push(vec![json!(lambda_sq), json!(set.count()), num(fraction)]);
    }

    let mut b = ReportBuilder::new("enumerate", echo(ctx.config, "enumerate", cfg));
    b.table("copies", table)
        .aggregate(
            "min_verified_fraction",
            min_of("copies", "verified_fraction", vec![]),
        )
        .check(
            "every copy is isometric",
            "min_verified_fraction",
            Comparison::Ge,
            1.0,
        )
        .plot("counts", "copies", "lambda_sq", "count");
    Ok(b.finish(ctx.stable))
}

pub struct EnumerateExperiment;

impl Experiment for EnumerateExperiment {
    fn name(&self) -> &'static str {
        "enumerate"
    }

    fn about(&self) -> &'static str {
        "Enumerate isometric copies of the dilated simplex and populate the cache"
    }

    fn run(&self, ctx: &Context<'_>) -> Result<Report> {
        run_enumerate(ctx)
    }
}
