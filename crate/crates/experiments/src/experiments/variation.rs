use serde_json::json;
use simplicial_core::averaging::KernelBank;
use simplicial_core::grid::{lp_norm, lp_norm_dense};
use simplicial_core::variation::{jump_field, square_function_field, variation_field, Family};

use super::{
    check_scales, echo, max_of, quotient, ratio, require, run_trials, Context, Experiment,
};
use crate::error::{ExperimentError, Result};
use crate::report::{eq, num, Comparison, Report, ReportBuilder, Table};

/// `|V_r|_2 / |f|_2` over the base scales and over the extended scales, per
/// trial, with the growth of the maximum under the extension.
pub fn run_theorem_variation(ctx: &Context<'_>) -> Result<Report> {
    let cfg = &ctx.config.variation;
    let simplex = ctx.config.simplex.check_regime()?;
    check_scales("variation.scales", &cfg.scales)?;
    check_scales("variation.extended_scales", &cfg.extended_scales)?;
    require(cfg.extended_scales.starts_with(&cfg.scales), || {
        "variation: extended_scales must start with scales".into()
    })?;
    require(!cfg.r.is_empty(), || "variation: empty r list".into())?;
    require(cfg.r.iter().all(|r| r.value() > 2.0), || {
        "variation: every r must exceed 2".into()
    })?;

    let shape = ctx.config.shape()?;
    let bank = KernelBank::new(&simplex, &cfg.extended_scales, shape, ctx.source)?;
    let base_len = bank
        .scales_used
        .iter()
        .filter(|s| cfg.scales.contains(s))
        .count();

    let per_trial = run_trials(
        cfg.trials,
        ctx.config.seed,
        shape,
        &cfg.generator,
        |i, seed, f, norm| {
            let family = Family::from_bank(&f, &bank)?;
            let base = family.truncated(base_len);
            cfg.r
                .iter()
                .map(|&r| {
                    let v_base = lp_norm(&variation_field(&base, r), 2.0)?;
                    let v_ext = lp_norm(&variation_field(&family, r), 2.0)?;
                    Ok(vec![
                        json!(i),
                        json!(seed),
                        json!(r.to_string()),
                        num(norm),
                        num(ratio(v_base, norm)),
                        num(ratio(v_ext, norm)),
                    ])
                })
                .collect::<Result<Vec<_>>>()
        },
    )?;
    let mut table = Table::new(&["trial", "seed", "r", "norm", "ratio_base", "ratio_extended"]);
    per_trial
        .into_iter()
        .flatten()
        .for_each(|row| table.push(row));

    let mut b = ReportBuilder::new("variation", echo(ctx.config, "variation", cfg));
    b.table("trials", table);
    for r in &cfg.r {
        let r = r.to_string();
        let (base, ext, growth) = (
            format!("max_ratio_base_r{r}"),
            format!("max_ratio_extended_r{r}"),
            format!("growth_r{r}"),
        );
        b.aggregate(
            &base,
            max_of("trials", "ratio_base", vec![eq("r", r.as_str())]),
        )
        .aggregate(
            &ext,
            max_of("trials", "ratio_extended", vec![eq("r", r.as_str())]),
        )
        .aggregate(&growth, quotient(&ext, &base))
        .check(
            &format!("growth bounded (r = {r})"),
            &growth,
            Comparison::Le,
            cfg.growth_limit,
        );
    }
    b.plot("ratios", "trials", "ratio_base", "ratio_extended");
    b.note(format!(
        "scales used {:?}, base uses the first {base_len}",
        bank.scales_used
    ));
    if !bank.skipped.is_empty() {
        b.note(format!(
            "scales without copies, skipped: {:?}",
            bank.skipped
        ));
    }
    if bank.wraparound {
        b.note("some kernel spans a full grid period; averages wrap around the torus");
    }
    if !simplex.regime_ok() {
        b.note("run outside n >= 2k + 3 by explicit override");
    }
    Ok(b.finish(ctx.stable))
}

pub struct VariationExperiment;

impl Experiment for VariationExperiment {
    fn name(&self) -> &'static str {
        "variation"
    }

    fn about(&self) -> &'static str {
        "r-variation of lacunary simplicial averages on random functions"
    }

    fn run(&self, ctx: &Context<'_>) -> Result<Report> {
        run_theorem_variation(ctx)
    }
}

/// `sup_lam |lam sqrt(J_lam)|_2 / |f|_2` per trial against twice the square
/// function, both in norm and pointwise.
pub fn run_jump_theorem(ctx: &Context<'_>) -> Result<Report> {
    let cfg = &ctx.config.jump;
    let simplex = ctx.config.simplex.check_regime()?;
    check_scales("jump.scales", &cfg.scales)?;
    match &cfg.lams {
        Some(lams) => require(
            !lams.is_empty() && lams.iter().all(|l| l.is_finite() && *l > 0.0),
            || "jump: lams must be positive and finite".into(),
        )?,
        None => require(cfg.lam_count > 0 && cfg.lam_ratio > 1.0, || {
            "jump: lam_count must be positive and lam_ratio above 1".into()
        })?,
    }

    let shape = ctx.config.shape()?;
    let bank = KernelBank::new(&simplex, &cfg.scales, shape, ctx.source)?;

    let per_trial = run_trials(
        cfg.trials,
        ctx.config.seed,
        shape,
        &cfg.generator,
        |i, seed, f, norm| {
            let family = Family::from_bank(&f, &bank)?;
            let square = square_function_field(&family);
            let square_norm = lp_norm(&square, 2.0)?;
            let sup_f = lp_norm_dense(&f, f64::INFINITY)?;
            let lams: Vec<f64> = match &cfg.lams {
                Some(l) => l.clone(),
                None => (0..cfg.lam_count)
                    .map(|k| 2.0 * sup_f * cfg.lam_ratio.powi(-(k as i32)))
                    .filter(|l| *l > 0.0)
                    .collect(),
            };
            let square_values = square
                .as_dense()
                .map(|d| d.values().iter().map(|v| v.re).collect::<Vec<_>>())
                .ok_or_else(|| {
                    ExperimentError::Internal("dense family gives a dense field".into())
                })?;
            let mut rows = Vec::with_capacity(lams.len());
            for lam in lams {
                let jf = jump_field(&family, lam)?;
                let jn = lp_norm(&jf.scaled, 2.0)?;
                let scaled = jf
                    .scaled
                    .as_dense()
                    .ok_or_else(|| ExperimentError::Internal("dense jump field".into()))?;
                let violations = scaled
                    .values()
                    .iter()
                    .zip(&square_values)
                    .filter(|(j, s)| j.re > 2.0 * **s * (1.0 + 1e-12))
                    .count();
                rows.push(vec![
                    json!(i),
                    json!(seed),
                    num(lam),
                    num(ratio(jn, norm)),
                    num(ratio(square_norm, norm)),
                    num(ratio(jn, norm) - 2.0 * ratio(square_norm, norm)),
                    json!(violations),
                ]);
            }
            Ok(rows)
        },
    )?;
    let mut table = Table::new(&[
        "trial",
        "seed",
        "lam",
        "jump_ratio",
        "square_ratio",
        "margin",
        "pointwise_violations",
    ]);
    per_trial
        .into_iter()
        .flatten()
        .for_each(|row| table.push(row));

    let mut b = ReportBuilder::new("jump", echo(ctx.config, "jump", cfg));
    b.table("jumps", table)
        .aggregate("sup_jump_ratio", max_of("jumps", "jump_ratio", vec![]))
        .aggregate("max_square_ratio", max_of("jumps", "square_ratio", vec![]))
        .aggregate("max_margin", max_of("jumps", "margin", vec![]))
        .aggregate(
            "max_pointwise_violations",
            max_of("jumps", "pointwise_violations", vec![]),
        )
        .check(
            "norm domination in every trial",
            "max_margin",
            Comparison::Le,
            0.0,
        )
        .check(
            "pointwise domination",
            "max_pointwise_violations",
            Comparison::Le,
            0.0,
        )
        .plot("jump_ratio", "jumps", "lam", "jump_ratio")
        .note(format!("scales used {:?}", bank.scales_used));
    if !bank.skipped.is_empty() {
        b.note(format!(
            "scales without copies, skipped: {:?}",
            bank.skipped
        ));
    }
    if bank.wraparound {
        b.note("some kernel spans a full grid period; averages wrap around the torus");
    }
    Ok(b.finish(ctx.stable))
}

pub struct JumpExperiment;

impl Experiment for JumpExperiment {
    fn name(&self) -> &'static str {
        "jump"
    }

    fn about(&self) -> &'static str {
        "lambda-jumps of lacunary simplicial averages against the square function"
    }

    fn run(&self, ctx: &Context<'_>) -> Result<Report> {
        run_jump_theorem(ctx)
    }
}
