use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use macrospin::random::{random_density, random_pure};
use macrospin::spin::{coherent_state, DensityOperator, Direction, PureState, SpinJ};
use macrospin::{coarse, Complex64};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::config::{ExperimentConfig, ExperimentKind, StateSpec};
use crate::run::{io_err, Check, CheckKind, RunError};

mod catdecay;
mod invasiveness;
mod lg;
mod pround;
mod qmap;
mod slots;
mod trajectory;

pub(crate) struct Ctx {
    dir: PathBuf,
    checks: Vec<Check>,
}

impl Ctx {
    pub fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf(), checks: Vec::new() }
    }

    pub fn into_checks(self) -> Vec<Check> {
        self.checks
    }

    /// Records `value <= bound`.
    pub fn check_le(&mut self, kind: CheckKind, name: impl Into<String>, value: f64, bound: f64) {
        self.checks.push(Check { name: name.into(), kind, passed: value <= bound, value, bound });
    }

    /// Records a yes/no property; `value` is 1 when it holds.
    pub fn check_true(&mut self, kind: CheckKind, name: impl Into<String>, holds: bool) {
        let value = if holds { 1.0 } else { 0.0 };
        self.checks.push(Check { name: name.into(), kind, passed: holds, value, bound: 1.0 });
    }

    /// Creates `name` in the output directory and hands a buffered writer to `body`.
    pub fn write_file<F>(&self, name: &str, body: F) -> Result<(), RunError>
    where
        F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(io_err(&path))?;
        let mut w = BufWriter::new(file);
        body(&mut w).and_then(|_| w.flush()).map_err(io_err(&path))
    }
}

pub(crate) fn dispatch(config: &ExperimentConfig, ctx: &mut Ctx) -> Result<Value, RunError> {
    match config.experiment {
        ExperimentKind::Qmap => qmap::run(config, ctx),
        ExperimentKind::Slots => slots::run(config, ctx),
        ExperimentKind::Catdecay => catdecay::run(config, ctx),
        ExperimentKind::Invasiveness => invasiveness::run(config, ctx),
        ExperimentKind::Trajectory => trajectory::run(config, ctx),
        ExperimentKind::Lg => lg::run(config, ctx),
        ExperimentKind::Pround => pround::run(config, ctx),
    }
}

/// `j` as it appears in file names: `25`, `2.5`.
pub(crate) fn j_label(j: SpinJ) -> String {
    if j.is_integer() {
        format!("{}", j.twice_j() / 2)
    } else {
        format!("{}.5", j.twice_j() / 2)
    }
}

/// Independent random stream per `(seed, stream)`, so results do not depend on
/// the order in which sweep points run.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) enum Prepared {
    Pure(PureState),
    Mixed(DensityOperator),
}

impl Prepared {
    pub fn density(&self) -> DensityOperator {
        match self {
            Prepared::Pure(p) => p.to_density(),
            Prepared::Mixed(r) => r.clone(),
        }
    }

    /// Whether the state is a spin coherent state (for which unitary
    /// precession is exactly classical).
    pub fn is_coherent(spec: &StateSpec) -> bool {
        matches!(spec, StateSpec::Coherent { .. } | StateSpec::Top | StateSpec::Bottom)
    }
}

pub(crate) fn prepare(spec: &StateSpec, j: SpinJ, seed: Option<u64>, stream: u64) -> Result<Prepared, RunError> {
    let rng = || stream_rng(seed.expect("validated: random states carry a seed"), stream);
    Ok(match spec {
        StateSpec::Mixed => Prepared::Mixed(DensityOperator::maximally_mixed(j)),
        StateSpec::Top => Prepared::Pure(PureState::top(j)),
        StateSpec::Bottom => Prepared::Pure(PureState::bottom(j)),
        StateSpec::Cat => Prepared::Pure(coarse::cat_state(j)),
        StateSpec::Coherent { theta, phi } => Prepared::Pure(coherent_state(j, Direction::new(*theta, *phi)?)),
        StateSpec::Superposition { components } => {
            let mut v = DVector::<Complex64>::zeros(j.dim());
            for c in components {
                v += coherent_state(j, Direction::new(c.theta, c.phi)?).amplitudes() * Complex64::new(c.weight, 0.0);
            }
            Prepared::Pure(PureState::normalized(j, v)?)
        }
        StateSpec::RandomPure => Prepared::Pure(random_pure(j, &mut rng())),
        StateSpec::RandomMixed { rank } => Prepared::Mixed(random_density(j, *rank, &mut rng())),
    })
}

/// Whether `values` never increase by more than `slack`.
pub(crate) fn non_increasing(values: &[f64], slack: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] + slack)
}
