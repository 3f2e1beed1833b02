use macrospin::phase_space::{build_grid, q_function, SphereMap};
use serde_json::{json, Value};

use super::{j_label, prepare, Ctx, Prepared};
use crate::config::ExperimentConfig;
use crate::run::{CheckKind, RunError};

pub(super) fn run(config: &ExperimentConfig, ctx: &mut Ctx) -> Result<Value, RunError> {
    let mut rows = Vec::new();
    for (i, j) in config.spins().into_iter().enumerate() {
        let l = config.l_max.unwrap_or(j.twice_j() as usize);
        let grid = build_grid(l);
        let q = match prepare(&config.state, j, config.seed, i as u64)? {
            Prepared::Pure(p) => q_function(&p, &grid),
            Prepared::Mixed(r) => q_function(&r, &grid),
        };
        let label = j_label(j);
        ctx.write_file(&format!("qmap_j{label}.csv"), |w| q.write_csv(w))?;
        let integral = q.integral();
        let exact = grid.exact_degree() >= j.twice_j() as usize;
        ctx.check_le(CheckKind::Invariant, format!("q_nonnegative_j{label}"), -q.min_value(), 1e-12);
        if exact {
            ctx.check_le(CheckKind::Invariant, format!("q_normalized_j{label}"), (integral - 1.0).abs(), 1e-10);
        }
        rows.push(json!({
            "j": j.j(),
            "l_max": l,
            "nodes": grid.len(),
            "exact_normalization_grid": exact,
            "integral": integral,
            "min": q.min_value(),
            "max": q.max_value(),
        }));
    }
    Ok(json!({ "maps": rows }))
}
