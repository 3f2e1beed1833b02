use macrospin::coarse::{approx_slot_probs_via_q, band_grid, exact_slot_probs, make_partition, write_slot_table};
use macrospin::phase_space::q_function;
use serde_json::{json, Value};

use super::{j_label, non_increasing, prepare, Ctx, Prepared};
use crate::config::ExperimentConfig;
use crate::run::{CheckKind, RunError};

/// Max-slot error regarded as "small" once `Δm >= 5√j`.
pub(crate) const COARSE_SLOT_ERROR_BOUND: f64 = 0.02;

pub(super) fn run(config: &ExperimentConfig, ctx: &mut Ctx) -> Result<Value, RunError> {
    let mut per_j = Vec::new();
    for (i, j) in config.spins().into_iter().enumerate() {
        let state = prepare(&config.state, j, config.seed, i as u64)?;
        let label = j_label(j);
        let mut dms = config.delta_ms(j);
        dms.sort_unstable();
        dms.dedup();
        let mut entries = Vec::new();
        let mut errs = Vec::new();
        for dm in dms {
            let part = make_partition(j, dm)?;
            let grid = band_grid(&part);
            let (exact, q) = match &state {
                Prepared::Pure(p) => (exact_slot_probs(p, &part)?, q_function(p, &grid)),
                Prepared::Mixed(r) => (exact_slot_probs(r, &part)?, q_function(r, &grid)),
            };
            let approx = approx_slot_probs_via_q(&q, &part)?;
            ctx.write_file(&format!("slots_j{label}_dm{dm}.csv"), |w| write_slot_table(w, &exact, &approx))?;
            let err = exact.max_abs_diff(&approx);
            let sum: f64 = exact.probabilities().iter().sum();
            ctx.check_le(
                CheckKind::Invariant,
                format!("exact_probs_sum_to_one_j{label}_dm{dm}"),
                (sum - 1.0).abs(),
                1e-12,
            );
            ctx.check_le(
                CheckKind::Invariant,
                format!("q_band_total_is_one_j{label}_dm{dm}"),
                (approx.raw_total() - 1.0).abs(),
                1e-10,
            );
            if dm as f64 >= 5.0 * j.j().sqrt() {
                ctx.check_le(
                    CheckKind::Regime,
                    format!("coarse_slot_error_j{label}_dm{dm}"),
                    err,
                    COARSE_SLOT_ERROR_BOUND,
                );
            }
            errs.push(err);
            entries.push(json!({
                "delta_m": dm,
                "slots": part.len(),
                "max_abs_err": err,
                "q_raw_total": approx.raw_total(),
            }));
        }
        if errs.len() > 1 {
            ctx.check_true(
                CheckKind::Regime,
                format!("max_abs_err_non_increasing_j{label}"),
                non_increasing(&errs, 0.0),
            );
        }
        per_j.push(json!({ "j": j.j(), "delta_m": entries }));
    }
    Ok(json!({ "slots": per_j }))
}
