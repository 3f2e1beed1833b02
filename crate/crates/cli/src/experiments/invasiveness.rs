use std::io::Write;

use macrospin::coarse::{invasiveness, make_partition, mixture_residual};
use macrospin::csv::{fmt_f64, row};
use macrospin::phase_space::{build_grid, Metric};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{j_label, non_increasing, prepare, Ctx};
use crate::config::ExperimentConfig;
use crate::run::{CheckKind, RunError};

pub(super) fn run(config: &ExperimentConfig, ctx: &mut Ctx) -> Result<Value, RunError> {
    let metric: Metric = config.metric.into();
    let mut per_j = Vec::new();
    for (i, j) in config.spins().into_iter().enumerate() {
        let rho = prepare(&config.state, j, config.seed, i as u64)?.density();
        let grid = build_grid(config.l_max.unwrap_or(j.twice_j() as usize));
        let mut dms = config.delta_ms(j);
        dms.sort_unstable();
        dms.dedup();
        let rows: Vec<(usize, usize, f64, f64, f64)> = dms
            .par_iter()
            .map(|&dm| {
                let part = make_partition(j, dm)?;
                let value = invasiveness(&rho, &part, &grid, metric)?;
                let sup = invasiveness(&rho, &part, &grid, Metric::Sup)?;
                let residual = mixture_residual(&rho, &part, &grid)?;
                Ok((dm, part.len(), value, sup, residual))
            })
            .collect::<Result<_, macrospin::Error>>()?;
        let label = j_label(j);
        ctx.write_file(&format!("invasiveness_j{label}.csv"), |w| {
            writeln!(w, "delta_m,slots,invasiveness,invasiveness_sup,mixture_residual")?;
            for &(dm, n, v, s, r) in &rows {
                writeln!(w, "{}", row([dm.to_string(), n.to_string(), fmt_f64(v), fmt_f64(s), fmt_f64(r)]))?;
            }
            Ok(())
        })?;
        let identity_gap = rows.iter().map(|r| (r.3 - r.4).abs()).fold(0.0, f64::max);
        ctx.check_le(
            CheckKind::Invariant,
            format!("mixture_residual_equals_sup_invasiveness_j{label}"),
            identity_gap,
            1e-13,
        );
        let values: Vec<f64> = rows.iter().map(|r| r.2).collect();
        if values.len() > 1 {
            ctx.check_true(
                CheckKind::Regime,
                format!("invasiveness_non_increasing_j{label}"),
                non_increasing(&values, 0.0),
            );
        }
        let entries: Vec<Value> = rows
            .iter()
            .map(|&(dm, n, v, s, r)| json!({"delta_m": dm, "slots": n, "invasiveness": v, "invasiveness_sup": s, "mixture_residual": r}))
            .collect();
        per_j.push(json!({ "j": j.j(), "metric": config.metric, "delta_m": entries }));
    }
    Ok(json!({ "invasiveness": per_j }))
}
