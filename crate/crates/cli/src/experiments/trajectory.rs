use macrospin::coarse::make_partition;
use macrospin::dynamics::{quantum_trajectory, PrecessionSpec, TrajectoryMode, TrajectoryRecord};
use macrospin::spin::PureState;
use serde_json::{json, Value};

use super::{j_label, prepare, stream_rng, Ctx, Prepared};
use crate::config::{ExperimentConfig, Mode};
use crate::run::{CheckKind, RunError};

/// Unitary precession of a coherent state is rigid rotation.
const UNITARY_ANGLE_TOL: f64 = 1e-10;

fn summary(record: &TrajectoryRecord) -> Value {
    let mean_len = record.quantum_len.iter().sum::<f64>() / record.quantum_len.len() as f64;
    json!({
        "max_angle_error": record.max_angle_error(),
        "degenerate_points": record.degenerate_points(),
        "final_length": record.quantum_len.last(),
        "mean_length": mean_len,
    })
}

pub(super) fn run(config: &ExperimentConfig, ctx: &mut Ctx) -> Result<Value, RunError> {
    let spec = PrecessionSpec::new(config.axis, config.omega)?;
    let times: Vec<f64> = (0..=config.steps).map(|k| k as f64 * config.dt).collect();
    let mut per_j = Vec::new();
    for (i, j) in config.spins().into_iter().enumerate() {
        let psi0: PureState = match prepare(&config.state, j, config.seed, 2 * i as u64)? {
            Prepared::Pure(p) => p,
            Prepared::Mixed(_) => unreachable!("validated: trajectory states are pure"),
        };
        let label = j_label(j);
        let bound = 5.0 / j.j().sqrt();
        let mut runs = Vec::new();
        if config.mode == Mode::Unitary {
            let record = quantum_trajectory(&psi0, &spec, &times, TrajectoryMode::Unitary)?;
            ctx.write_file(&format!("trajectory_j{label}_unitary.csv"), |w| record.write_csv(w))?;
            if Prepared::is_coherent(&config.state) {
                ctx.check_le(
                    CheckKind::Invariant,
                    format!("unitary_coherent_is_classical_j{label}"),
                    record.max_angle_error(),
                    UNITARY_ANGLE_TOL,
                );
            }
            runs.push(json!({ "mode": "unitary", "result": summary(&record) }));
        } else {
            let fine = make_partition(j, 1)?;
            let fine_record = quantum_trajectory(&psi0, &spec, &times, TrajectoryMode::Nonselective(&fine))?;
            for dm in config.delta_ms(j) {
                let part = make_partition(j, dm)?;
                let mut rng = stream_rng(config.seed.unwrap_or(0), 2 * i as u64 + 1);
                let mode = match config.mode {
                    Mode::Selective => TrajectoryMode::Selective { partition: &part, rng: &mut rng },
                    _ => TrajectoryMode::Nonselective(&part),
                };
                let name = mode.name();
                let record = quantum_trajectory(&psi0, &spec, &times, mode)?;
                ctx.write_file(&format!("trajectory_j{label}_{name}_dm{dm}.csv"), |w| record.write_csv(w))?;
                let longest = record.quantum_len.iter().copied().fold(0.0, f64::max);
                ctx.check_le(
                    CheckKind::Invariant,
                    format!("mean_spin_length_bounded_j{label}_dm{dm}"),
                    longest,
                    1.0 + 1e-12,
                );
                let err = record.max_angle_error();
                if config.mode == Mode::Nonselective && dm as f64 >= 5.0 * j.j().sqrt() {
                    ctx.check_le(CheckKind::Regime, format!("coarse_tracks_classical_j{label}_dm{dm}"), err, bound);
                    ctx.check_true(
                        CheckKind::Regime,
                        format!("fine_deviates_more_than_coarse_j{label}_dm{dm}"),
                        fine_record.max_angle_error() > err,
                    );
                }
                let mut entry = summary(&record);
                if let Some(outcomes) = &record.slot_outcomes {
                    entry["slot_outcomes"] = json!(outcomes);
                }
                runs.push(json!({ "mode": name, "delta_m": dm, "result": entry }));
            }
            runs.push(json!({ "mode": "nonselective", "delta_m": 1, "role": "fine-grained reference", "result": summary(&fine_record) }));
        }
        per_j.push(json!({ "j": j.j(), "classical_bound": bound, "runs": runs }));
    }
    Ok(json!({ "trajectories": per_j }))
}
