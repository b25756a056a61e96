use serde_json::json;
use simplicial_core::grid::{random_test_function, trial_seed, GeneratorSpec, GridShape};
use simplicial_core::littlewood_paley::{
    band_count, decompose, decomposition_multipliers, delta_psi_multiplier_grid,
    psi_multiplier_grid, square_sum_delta_grid, ArcScale, Increment, MultiplierSpec,
};

use super::{echo, max_of, min_of, quotient, require, Context, Experiment};
use crate::error::{ExperimentError, Result};
use crate::report::{eq, num, Comparison, Report, ReportBuilder, Table};

fn increment_name(i: Increment) -> &'static str {
    match i {
        Increment::Band => "band",
        Increment::Scale => "scale",
    }
}

/// Square sums of multiplier increments over `l >= 2^j`, with a tail check,
/// plus telescoping and plateau/support exactness of the multipliers.
pub fn run_prop_square_multiplier(ctx: &Context<'_>) -> Result<Report> {
    let cfg = &ctx.config.multiplier_check;
    let simplex = ctx.config.simplex()?;
    let norm_sq = simplex.norm_sq() as u64;
    require(!cfg.bands.is_empty() && !cfg.dims.is_empty(), || {
        "multiplier_check: bands and dims must be non-empty".into()
    })?;
    require(cfg.l_extension > 0, || {
        "multiplier_check: l_extension must be positive".into()
    })?;

    let mut increments = vec![cfg.increment];
    if cfg.record_other_increment {
        increments.push(match cfg.increment {
            Increment::Band => Increment::Scale,
            Increment::Scale => Increment::Band,
        });
    }

    let mut sums = Table::new(&[
        "dim",
        "j",
        "increment",
        "range",
        "l_start",
        "l_end",
        "constant",
    ]);
    let mut tail = Table::new(&[
        "dim",
        "j",
        "increment",
        "base",
        "extended",
        "relative_change",
    ]);
    for &dim in &cfg.dims {
        let shape = GridShape::new(cfg.points_per_axis, dim)
            .map_err(|e| ExperimentError::config(e.to_string()))?;
        for &j in &cfg.bands {
            let start = 1u32
                .checked_shl(j)
                .filter(|s| s.checked_add(cfg.l_span + cfg.l_extension).is_some())
                .ok_or_else(|| {
                    ExperimentError::config(format!("multiplier_check: band {j} too large"))
                })?;
            for &inc in &increments {
                let sup = |l_end: u32| -> Result<f64> {
                    let grid = square_sum_delta_grid(norm_sq, j, shape, l_end, inc)?;
                    Ok(grid.into_iter().fold(0.0, f64::max))
                };
                let base_end = start + cfg.l_span;
                let ext_end = base_end + cfg.l_extension;
                let base = sup(base_end)?;
                let extended = sup(ext_end)?;
                let name = increment_name(inc);
                for (range, end, value) in
                    [("base", base_end, base), ("extended", ext_end, extended)]
                {
                    sums.push(vec![
                        json!(dim),
                        json!(j),
                        json!(name),
                        json!(range),
                        json!(start),
                        json!(end),
                        num(value),
                    ]);
                }
                let change = if base == 0.0 {
                    0.0
                } else {
                    (extended - base).abs() / base
                };
                tail.push(vec![
                    json!(dim),
                    json!(j),
                    json!(name),
                    num(base),
                    num(extended),
                    num(change),
                ]);
            }
        }
    }

    let tele_shape = GridShape::new(cfg.telescoping_period, cfg.telescoping_dim)
        .map_err(|e| ExperimentError::config(e.to_string()))?;
    let f = random_test_function(
        trial_seed(ctx.config.seed, 0),
        tele_shape,
        &GeneratorSpec::named("gaussian-iid"),
    )?
    .into_dense()
    .ok_or_else(|| ExperimentError::Internal("dense generator".into()))?;
    let mut tele = Table::new(&["l", "bands", "multiplier_error", "decomposition_error"]);
    for &l in &cfg.telescoping_scales {
        let bands = band_count(l)?;
        let [a, b, c] = decomposition_multipliers(norm_sq, l, tele_shape)?;
        let m_err = (0..tele_shape.len())
            .map(|i| (a[i] + b[i] + c[i] - 1.0).abs())
            .fold(0.0, f64::max);
        let d = decompose(&f, norm_sq, l)?;
        let d_err = d.f1.add(&d.f2).add(&d.f3).max_abs_diff(&f);
        tele.push(vec![json!(l), json!(bands), num(m_err), num(d_err)]);
    }

    let mut plateau = Table::new(&[
        "l",
        "j",
        "period",
        "overlap",
        "delta_overlap",
        "plateau_points",
        "plateau_deviation",
        "support_max",
        "delta_plateau_max",
    ]);
    for &[l, j, n] in &cfg.plateau_cases {
        let (l, j, n) = (
            u32::try_from(l).map_err(|_| ExperimentError::config("plateau l out of range"))?,
            u32::try_from(j).map_err(|_| ExperimentError::config("plateau j out of range"))?,
            n as usize,
        );
        let spec = MultiplierSpec::new(norm_sq, l, j)?;
        let next = MultiplierSpec::new(norm_sq, l, j + 1)?;
        let shape = GridShape::new(n, 1).map_err(|e| ExperimentError::config(e.to_string()))?;
        let psi = psi_multiplier_grid(norm_sq, l, j, shape)?;
        let delta = delta_psi_multiplier_grid(norm_sq, l, j, shape)?;
        let arcs = spec.arcs();
        let (mut points, mut dev, mut support, mut delta_max) = (0usize, 0.0f64, 0.0f64, 0.0f64);
        for a in 0..n {
            if arcs.within_grid(&[a], n, ArcScale::PLATEAU) {
                points += 1;
                dev = dev.max((psi[a] - 1.0).abs());
            }
            if !arcs.contains_grid(&[a], n) {
                support = support.max(psi[a].abs());
            }
            if arcs.within_grid(&[a], n, ArcScale::DELTA_PLATEAU) {
                delta_max = delta_max.max(delta[a].abs());
            }
        }
        plateau.push(vec![
            json!(l),
            json!(j),
            json!(n),
            json!(spec.arcs_overlap()),
            json!(next.arcs_overlap()),
            json!(points),
            num(dev),
            num(support),
            num(delta_max),
        ]);
    }

    let checked = increment_name(cfg.increment);
    let mut b = ReportBuilder::new(
        "multiplier-check",
        echo(ctx.config, "multiplier_check", cfg),
    );
    b.table("square_sums", sums)
        .table("tail", tail)
        .table("telescoping", tele)
        .table("plateau", plateau);
    b.aggregate(
        "max_constant",
        max_of("square_sums", "constant", vec![eq("increment", checked)]),
    )
    .aggregate(
        "max_tail_change",
        max_of("tail", "relative_change", vec![eq("increment", checked)]),
    );
    for inc in &increments {
        let name = increment_name(*inc);
        for &dim in &cfg.dims {
            let filter = || vec![eq("dim", dim), eq("increment", name), eq("range", "base")];
            let (hi, lo, q) = (
                format!("{name}_max_over_j_kn{dim}"),
                format!("{name}_min_over_j_kn{dim}"),
                format!("{name}_uniformity_ratio_kn{dim}"),
            );
            b.aggregate(&hi, max_of("square_sums", "constant", filter()))
                .aggregate(&lo, min_of("square_sums", "constant", filter()))
                .aggregate(&q, quotient(&hi, &lo));
        }
    }
    b.aggregate(
        "max_telescoping_error",
        max_of("telescoping", "multiplier_error", vec![]),
    )
    .aggregate(
        "max_decomposition_error",
        max_of("telescoping", "decomposition_error", vec![]),
    )
    .aggregate(
        "max_plateau_deviation",
        max_of("plateau", "plateau_deviation", vec![eq("overlap", false)]),
    )
    .aggregate(
        "max_off_arc_value",
        max_of("plateau", "support_max", vec![]),
    )
    .aggregate(
        "max_delta_on_inner_arcs",
        max_of(
            "plateau",
            "delta_plateau_max",
            vec![eq("delta_overlap", false)],
        ),
    );
    b.check(
        "square sums finite",
        "max_constant",
        Comparison::Le,
        f64::MAX,
    )
    .check(
        "tail stable",
        "max_tail_change",
        Comparison::Lt,
        cfg.tail_tolerance,
    )
    .check(
        "multipliers telescope",
        "max_telescoping_error",
        Comparison::Le,
        cfg.telescoping_tolerance,
    )
    .check(
        "decomposition reassembles",
        "max_decomposition_error",
        Comparison::Le,
        cfg.telescoping_tolerance,
    )
    .check(
        "plateau exact",
        "max_plateau_deviation",
        Comparison::Le,
        0.0,
    )
    .check("support exact", "max_off_arc_value", Comparison::Le, 0.0)
    .check(
        "increment vanishes on inner arcs",
        "max_delta_on_inner_arcs",
        Comparison::Le,
        0.0,
    )
    .plot("constants", "square_sums", "j", "constant")
    .note(format!("checked increment: {checked}"));
    if increments.contains(&Increment::Band) && cfg.increment != Increment::Band {
        b.note("band increments are recorded for comparison and not checked");
    }
    Ok(b.finish(ctx.stable))
}

pub struct MultiplierCheckExperiment;

impl Experiment for MultiplierCheckExperiment {
    fn name(&self) -> &'static str {
        "multiplier-check"
    }

    fn about(&self) -> &'static str {
        "Square sums of multiplier increments, telescoping and plateau exactness"
    }

    fn run(&self, ctx: &Context<'_>) -> Result<Report> {
        run_prop_square_multiplier(ctx)
    }
}
