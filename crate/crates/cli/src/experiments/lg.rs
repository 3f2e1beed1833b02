use macrospin::coarse::make_partition;
use macrospin::dynamics::{lg_sweep, write_lg_csv, PrecessionSpec};
use serde_json::{json, Value};

use super::{j_label, prepare, Ctx};
use crate::config::{ExperimentConfig, StateSpec};
use crate::run::{CheckKind, RunError};

/// Largest `K` still counted as macrorealist once slots are coarse.
pub(crate) const COARSE_K_BOUND: f64 = 1.05;

pub(super) fn run(config: &ExperimentConfig, ctx: &mut Ctx) -> Result<Value, RunError> {
    let spec = PrecessionSpec::new(config.axis, config.omega)?;
    let omega_taus = config.omega_tau.values();
    let taus: Vec<f64> = omega_taus.iter().map(|x| x / config.omega).collect();
    let mut per_j = Vec::new();
    for (i, j) in config.spins().into_iter().enumerate() {
        let rho = prepare(&config.state, j, config.seed, i as u64)?.density();
        let label = j_label(j);
        let mut entries = Vec::new();
        for dm in config.delta_ms(j) {
            let part = make_partition(j, dm)?;
            let results = lg_sweep(&rho, &spec, &taus, &part)?;
            ctx.write_file(&format!("lg_j{label}_dm{dm}.csv"), |w| write_lg_csv(w, dm, &results))?;
            let largest_c = results.iter().flat_map(|r| [r.c12, r.c23, r.c13]).map(f64::abs).fold(0.0, f64::max);
            ctx.check_le(CheckKind::Invariant, format!("correlators_bounded_j{label}_dm{dm}"), largest_c, 1.0 + 1e-12);
            let best = results.iter().copied().max_by(|a, b| a.k.total_cmp(&b.k));
            let (max_k, argmax) = best.map_or((f64::NAN, f64::NAN), |r| (r.k, r.omega_tau));

            // spin 1/2 from the mixed state, measured along z and precessing about
            // an axis in the xy-plane: C(t) = cos(ω t)
            let axis = spec.axis();
            if j.twice_j() == 1 && matches!(config.state, StateSpec::Mixed) && axis[2].abs() < 1e-15 {
                let dev = results
                    .iter()
                    .map(|r| (r.k - (2.0 * r.omega_tau.cos() - (2.0 * r.omega_tau).cos())).abs())
                    .fold(0.0, f64::max);
                ctx.check_le(CheckKind::Invariant, "spin_half_matches_two_cos_minus_cos_two", dev, 1e-10);
            }
            if dm > 1 && dm as f64 >= j.j().sqrt() {
                ctx.check_le(
                    CheckKind::Regime,
                    format!("macrorealism_restored_j{label}_dm{dm}"),
                    max_k,
                    COARSE_K_BOUND,
                );
            }
            entries.push(json!({ "delta_m": dm, "slots": part.len(), "max_k": max_k, "argmax_omega_tau": argmax }));
        }
        per_j.push(json!({ "j": j.j(), "delta_m": entries }));
    }
    Ok(json!({ "lg": per_j }))
}
