use std::io::Write;

use macrospin::coarse::cat_state;
use macrospin::csv::{fmt_f64, row};
use macrospin::phase_space::{build_grid, p_function_with_cap, state_from_p, SphereMap};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{j_label, prepare, Ctx};
use crate::config::ExperimentConfig;
use crate::run::{CheckKind, RunError};

const ROUND_TRIP_TOL: f64 = 1e-6;

pub(super) fn run(config: &ExperimentConfig, ctx: &mut Ctx) -> Result<Value, RunError> {
    let mut rows = Vec::new();
    let mut cats = Vec::new();
    for (i, j) in config.spins().into_iter().enumerate() {
        let grid = build_grid(config.l_max.unwrap_or(2 * j.twice_j() as usize));
        let samples: Vec<(usize, f64, f64, f64)> = (0..config.samples)
            .into_par_iter()
            .map(|s| {
                let stream = (i * config.samples + s) as u64;
                let rho = prepare(&config.state, j, config.seed, stream)?.density();
                let p = p_function_with_cap(&rho, &grid, config.p_cap)?;
                let back = state_from_p(&p)?;
                Ok((s, rho.trace_distance(&back)?, p.integral(), p.min_value()))
            })
            .collect::<Result<_, RunError>>()?;
        let label = j_label(j);
        let worst = samples.iter().map(|r| r.1).fold(0.0, f64::max);
        let norm = samples.iter().map(|r| (r.2 - 1.0).abs()).fold(0.0, f64::max);
        ctx.check_le(CheckKind::Invariant, format!("p_round_trip_j{label}"), worst, ROUND_TRIP_TOL);
        ctx.check_le(CheckKind::Invariant, format!("p_normalized_j{label}"), norm, 1e-8);
        rows.extend(samples.into_iter().map(|(s, d, n, m)| (j.j(), s, d, n, m)));

        let cat = p_function_with_cap(&cat_state(j).to_density(), &grid, config.p_cap)?;
        ctx.write_file(&format!("pmap_cat_j{label}.csv"), |w| cat.write_csv(w))?;
        if j.twice_j() >= 2 {
            ctx.check_le(
                CheckKind::Regime,
                format!("cat_p_has_negative_values_j{label}"),
                cat.min_value(),
                -f64::EPSILON,
            );
        }
        cats.push(json!({ "j": j.j(), "p_min": cat.min_value(), "p_max": cat.max_value() }));
    }
    ctx.write_file("pround.csv", |w| {
        writeln!(w, "j,sample,trace_distance,p_integral,p_min")?;
        for (j, s, d, n, m) in &rows {
            writeln!(w, "{}", row([fmt_f64(*j), s.to_string(), fmt_f64(*d), fmt_f64(*n), fmt_f64(*m)]))?;
        }
        Ok(())
    })?;
    let worst = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    Ok(json!({ "max_trace_distance": worst, "cat": cats }))
}
