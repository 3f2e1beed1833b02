use std::io::{self, Write};

use rand::RngCore;

use super::precession::{evolve, rodrigues, PrecessionSpec};
use crate::coarse::{nonselective_update, sample_slot, sample_slot_pure, SlotPartition};
use crate::csv::{fmt_f64, row};
use crate::spin::{angle_between, mean_spin, mean_spin_pure, DensityOperator, PureState};
use crate::{Error, Result};

/// `|<J>|` below this fraction of `j` leaves the direction undefined.
pub const DEGENERATE_LENGTH: f64 = 1e-12;

/// What happens after each evolution step.
pub enum TrajectoryMode<'a> {
    /// Schrödinger evolution only.
    Unitary,
    /// The outcome-averaged coarse measurement `Σ P ρ P`.
    Nonselective(&'a SlotPartition),
    /// A sampled coarse measurement followed by the Lüders update.
    Selective { partition: &'a SlotPartition, rng: &'a mut dyn RngCore },
}

impl TrajectoryMode<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            TrajectoryMode::Unitary => "unitary",
            TrajectoryMode::Nonselective(_) => "nonselective",
            TrajectoryMode::Selective { .. } => "selective",
        }
    }
}

/// Quantum `<J>` and the classical oracle along a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    /// `<J>/|<J>|`, `None` where `<J>` vanishes.
    pub quantum_dir: Vec<Option<[f64; 3]>>,
    /// `|<J>|/j`.
    pub quantum_len: Vec<f64>,
    pub classical_dir: Vec<[f64; 3]>,
    /// Slot observed at each time in selective mode; `None` for the initial point.
    pub slot_outcomes: Option<Vec<Option<usize>>>,
}

impl TrajectoryRecord {
    /// Angle between quantum and classical direction, `None` at degenerate points.
    pub fn angle_errors(&self) -> Vec<Option<f64>> {
        self.quantum_dir.iter().zip(&self.classical_dir).map(|(q, c)| q.map(|q| angle_between(q, *c))).collect()
    }

    pub fn max_angle_error(&self) -> f64 {
        self.angle_errors().into_iter().flatten().fold(0.0, f64::max)
    }

    pub fn degenerate_points(&self) -> usize {
        self.quantum_dir.iter().filter(|d| d.is_none()).count()
    }

    /// `t,qx,qy,qz,qlen,cx,cy,cz,angle_err_rad[,slot]`; degenerate directions
    /// are written as `nan`, the missing initial slot as an empty field.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let slots = self.slot_outcomes.as_ref();
        let mut header = "t,qx,qy,qz,qlen,cx,cy,cz,angle_err_rad".to_string();
        if slots.is_some() {
            header.push_str(",slot");
        }
        writeln!(out, "{header}")?;
        let errs = self.angle_errors();
        for i in 0..self.times.len() {
            let q = self.quantum_dir[i].unwrap_or([f64::NAN; 3]);
            let c = self.classical_dir[i];
            let mut fields: Vec<String> = [self.times[i], q[0], q[1], q[2], self.quantum_len[i], c[0], c[1], c[2]]
                .into_iter()
                .map(fmt_f64)
                .collect();
            fields.push(fmt_f64(errs[i].unwrap_or(f64::NAN)));
            if let Some(s) = slots {
                fields.push(s[i].map(|x| x.to_string()).unwrap_or_default());
            }
            writeln!(out, "{}", row(&fields))?;
        }
        Ok(())
    }
}

enum Evolving {
    Pure(PureState),
    Mixed(DensityOperator),
}

impl Evolving {
    fn mean_spin(&self) -> [f64; 3] {
        match self {
            Evolving::Pure(p) => mean_spin_pure(p),
            Evolving::Mixed(r) => mean_spin(r),
        }
    }
}

fn direction_of(s: [f64; 3], j: f64) -> (Option<[f64; 3]>, f64) {
    let len = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    if len <= DEGENERATE_LENGTH * j.max(1.0) {
        (None, len / j)
    } else {
        (Some(s.map(|x| x / len)), len / j)
    }
}

/// Precesses `psi0` through `times`, applying the mode's measurement after every
/// evolution step.
///
/// `psi0` is the state at `times[0]` and is recorded unmeasured. The classical
/// oracle starts from the direction of `<J>` there. If that direction is
/// undefined the oracle starts along the precession axis.
pub fn quantum_trajectory(
    psi0: &PureState,
    spec: &PrecessionSpec,
    times: &[f64],
    mut mode: TrajectoryMode<'_>,
) -> Result<TrajectoryRecord> {
    if times.windows(2).any(|w| w[1] <= w[0]) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonIncreasingTimes);
    }
    if times.is_empty() {
        return Err(Error::Config("trajectory needs at least one time".into()));
    }
    if let TrajectoryMode::Nonselective(p) | TrajectoryMode::Selective { partition: p, .. } = &mode {
        if p.spin() != psi0.spin() {
            return Err(Error::DimensionMismatch { expected: p.spin().dim(), found: psi0.spin().dim() });
        }
    }
    let j = psi0.spin().j();
    let mut state = Evolving::Pure(psi0.clone());
    let mut quantum_dir = Vec::with_capacity(times.len());
    let mut quantum_len = Vec::with_capacity(times.len());
    let mut slots = matches!(mode, TrajectoryMode::Selective { .. }).then(|| vec![None]);

    let (d0, l0) = direction_of(state.mean_spin(), j);
    quantum_dir.push(d0);
    quantum_len.push(l0);
    let s0 = d0.unwrap_or(spec.axis());
    for w in times.windows(2) {
        let dt = w[1] - w[0];
        state = match state {
            Evolving::Pure(p) => Evolving::Pure(evolve(&p, spec, dt)),
            Evolving::Mixed(r) => Evolving::Mixed(evolve(&r, spec, dt)),
        };
        state = match (&mut mode, state) {
            (TrajectoryMode::Unitary, s) => s,
            (TrajectoryMode::Nonselective(part), Evolving::Pure(p)) => {
                Evolving::Mixed(nonselective_update(&p.to_density(), part)?)
            }
            (TrajectoryMode::Nonselective(part), Evolving::Mixed(r)) => Evolving::Mixed(nonselective_update(&r, part)?),
            (TrajectoryMode::Selective { partition, rng }, Evolving::Pure(p)) => {
                let (slot, next) = sample_slot_pure(&p, partition, *rng)?;
                slots.as_mut().expect("selective").push(Some(slot));
                Evolving::Pure(next)
            }
            (TrajectoryMode::Selective { partition, rng }, Evolving::Mixed(r)) => {
                let (slot, next) = sample_slot(&r, partition, *rng)?;
                slots.as_mut().expect("selective").push(Some(slot));
                Evolving::Mixed(next)
            }
        };
        let (d, l) = direction_of(state.mean_spin(), j);
        quantum_dir.push(d);
        quantum_len.push(l);
    }
    let t0 = times[0];
    let classical_dir = times.iter().map(|&t| rodrigues(s0, spec.axis(), spec.omega() * (t - t0))).collect();
    Ok(TrajectoryRecord { times: times.to_vec(), quantum_dir, quantum_len, classical_dir, slot_outcomes: slots })
}
