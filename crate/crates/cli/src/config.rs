//! Strict JSON experiment configs.

use std::f64::consts::PI;
use std::fmt;

use macrospin::phase_space::Metric;
use macrospin::spin::SpinJ;
use serde::{Deserialize, Serialize};

/// Largest `j` any experiment accepts; density matrices grow like `(2j+1)^2`.
pub const J_LIMIT: f64 = 1000.0;
/// Largest grid degree accepted as an `l_max` override.
pub const L_LIMIT: usize = 4000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}")?;
            if let Some(col) = self.column {
                write!(f, ", column {col}")?;
            }
            write!(f, ": ")?;
        }
        if !self.path.is_empty() && self.path != "." {
            write!(f, "{}: ", self.path)?;
        }
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Qmap,
    Slots,
    Catdecay,
    Invasiveness,
    Trajectory,
    Lg,
    Pround,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Qmap,
        ExperimentKind::Slots,
        ExperimentKind::Catdecay,
        ExperimentKind::Invasiveness,
        ExperimentKind::Trajectory,
        ExperimentKind::Lg,
        ExperimentKind::Pround,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Qmap => "qmap",
            ExperimentKind::Slots => "slots",
            ExperimentKind::Catdecay => "catdecay",
            ExperimentKind::Invasiveness => "invasiveness",
            ExperimentKind::Trajectory => "trajectory",
            ExperimentKind::Lg => "lg",
            ExperimentKind::Pround => "pround",
        }
    }

    /// Keys an experiment reads; anything else is rejected.
    pub fn allowed_keys(self) -> &'static [&'static str] {
        match self {
            ExperimentKind::Qmap => &["experiment", "j", "state", "l_max", "seed", "output"],
            ExperimentKind::Slots => &["experiment", "j", "delta_m", "state", "seed", "output"],
            ExperimentKind::Catdecay => &["experiment", "j", "l_max", "output"],
            ExperimentKind::Invasiveness => {
                &["experiment", "j", "delta_m", "state", "l_max", "metric", "seed", "output"]
            }
            ExperimentKind::Trajectory => {
                &["experiment", "j", "delta_m", "state", "mode", "axis", "omega", "dt", "steps", "seed", "output"]
            }
            ExperimentKind::Lg => {
                &["experiment", "j", "delta_m", "state", "axis", "omega", "omega_tau", "seed", "output"]
            }
            ExperimentKind::Pround => &["experiment", "j", "state", "samples", "l_max", "p_cap", "seed", "output"],
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ExperimentKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown experiment '{s}'"))
    }
}

/// How the slot width is chosen for a given `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaMRule {
    /// A fixed width.
    Absolute(usize),
    /// `⌈c·√j⌉`, capped at `2j+1`.
    SqrtMultiple(f64),
    /// `c·⌈√j⌉`, capped at `2j+1`.
    CeilSqrtMultiple(usize),
    /// One slot holding every outcome, `Δm = 2j+1`.
    Full,
    /// `1, 2, 4, …` below `2j+1`, then `2j+1`.
    Doubling,
}

fn ceil_tolerant(x: f64) -> usize {
    // 5*sqrt(100) must give 50, not 51
    (x - 1e-9 * x.abs().max(1.0)).ceil().max(0.0) as usize
}

fn ceil_sqrt(j: f64) -> usize {
    ceil_tolerant(j.sqrt())
}

impl DeltaMRule {
    /// Widths for spin `j`, validated against `1..=2j+1`.
    pub fn resolve(&self, j: SpinJ) -> Result<Vec<usize>, String> {
        let dim = j.dim();
        let out = match *self {
            DeltaMRule::Absolute(n) => vec![n],
            DeltaMRule::SqrtMultiple(c) => vec![ceil_tolerant(c * j.j().sqrt()).min(dim)],
            DeltaMRule::CeilSqrtMultiple(c) => vec![(c * ceil_sqrt(j.j())).min(dim)],
            DeltaMRule::Full => vec![dim],
            DeltaMRule::Doubling => {
                let mut v: Vec<usize> =
                    std::iter::successors(Some(1usize), |x| Some(x * 2)).take_while(|&x| x < dim).collect();
                v.push(dim);
                v
            }
        };
        for &dm in &out {
            if dm == 0 || dm > dim {
                return Err(format!("rule '{self}' gives delta_m = {dm} at j = {j}, outside 1..={dim}"));
            }
        }
        Ok(out)
    }
}

impl fmt::Display for DeltaMRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaMRule::Absolute(n) => write!(f, "{n}"),
            DeltaMRule::SqrtMultiple(c) => write!(f, "{c}*sqrt(j)"),
            DeltaMRule::CeilSqrtMultiple(c) => write!(f, "{c}*ceil(sqrt(j))"),
            DeltaMRule::Full => write!(f, "full"),
            DeltaMRule::Doubling => write!(f, "doubling"),
        }
    }
}

/// Parses a slot-width rule: `"20"`, `"full"`, `"doubling"`, `"sqrt(j)"`,
/// `"2.5*sqrt(j)"`, `"ceil(sqrt(j))"` or `"4*ceil(sqrt(j))"`.
pub fn parse_delta_m_rule(text: &str) -> Result<DeltaMRule, String> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let s = compact.as_str();
    match s {
        "" => return Err("empty delta_m rule".into()),
        "full" => return Ok(DeltaMRule::Full),
        "doubling" => return Ok(DeltaMRule::Doubling),
        _ => {}
    }
    if s.bytes().all(|b| b.is_ascii_digit()) {
        let n: usize = s.parse().map_err(|e| format!("delta_m '{text}': {e}"))?;
        if n == 0 {
            return Err("delta_m must be at least 1".into());
        }
        return Ok(DeltaMRule::Absolute(n));
    }
    let (coef, tail) = match s.split_once('*') {
        Some((c, t)) => (Some(c), t),
        None => (None, s),
    };
    match tail {
        "sqrt(j)" => {
            let c = match coef {
                Some(c) => c.parse::<f64>().map_err(|e| format!("coefficient '{c}' in '{text}': {e}"))?,
                None => 1.0,
            };
            if !(c.is_finite() && c > 0.0 && c <= 1e6) {
                return Err(format!("coefficient in '{text}' must be positive and at most 1e6"));
            }
            Ok(DeltaMRule::SqrtMultiple(c))
        }
        "ceil(sqrt(j))" => {
            let c = match coef {
                Some(c) => c.parse::<usize>().map_err(|e| format!("coefficient '{c}' in '{text}' must be a positive integer: {e}"))?,
                None => 1,
            };
            if c == 0 || c > 1_000_000 {
                return Err(format!("coefficient in '{text}' must be in 1..=1000000"));
            }
            Ok(DeltaMRule::CeilSqrtMultiple(c))
        }
        _ => Err(format!(
            "unrecognized delta_m rule '{text}' (expected an integer, 'full', 'doubling', '<c>*sqrt(j)' or '<c>*ceil(sqrt(j))')"
        )),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawRule {
    Int(u64),
    Text(String),
}

impl TryFrom<RawRule> for DeltaMRule {
    type Error = String;

    fn try_from(raw: RawRule) -> Result<Self, String> {
        match raw {
            RawRule::Int(0) => Err("delta_m must be at least 1".into()),
            RawRule::Int(n) => usize::try_from(n).map(DeltaMRule::Absolute).map_err(|e| e.to_string()),
            RawRule::Text(s) => parse_delta_m_rule(&s),
        }
    }
}

#[derive(Deserialize)]
#[serde(try_from = "RawRule")]
struct RuleField(DeltaMRule);

impl TryFrom<RawRule> for RuleField {
    type Error = String;
    fn try_from(raw: RawRule) -> Result<Self, String> {
        DeltaMRule::try_from(raw).map(RuleField)
    }
}

#[derive(Deserialize)]
#[serde(untagged, expecting = "an integer, a rule string, or a list of them")]
enum RawDeltaM {
    One(RuleField),
    Many(Vec<RuleField>),
}

#[derive(Deserialize)]
#[serde(untagged, expecting = "a number, a list of numbers, or {\"from\", \"to\", \"step\"}")]
enum RawJ {
    One(f64),
    Many(Vec<f64>),
    Range(JRange),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JRange {
    from: f64,
    to: f64,
    #[serde(default = "one")]
    step: f64,
}

fn one() -> f64 {
    1.0
}

/// One amplitude of a coherent superposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    pub theta: f64,
    pub phi: f64,
    #[serde(default = "one")]
    pub weight: f64,
}

/// Initial state of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Mixed,
    Top,
    Bottom,
    Cat,
    Coherent {
        theta: f64,
        phi: f64,
    },
    /// Normalized `Σ w_i |Ω_i>`.
    Superposition {
        components: Vec<Component>,
    },
    RandomPure,
    RandomMixed {
        rank: usize,
    },
}

impl StateSpec {
    /// Fields a state object may carry.
    fn keys(&self) -> &'static [&'static str] {
        match self {
            StateSpec::Coherent { .. } => &["kind", "theta", "phi"],
            StateSpec::Superposition { .. } => &["kind", "components"],
            StateSpec::RandomMixed { .. } => &["kind", "rank"],
            _ => &["kind"],
        }
    }

    pub fn needs_seed(&self) -> bool {
        matches!(self, StateSpec::RandomPure | StateSpec::RandomMixed { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Unitary,
    Nonselective,
    Selective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    L1,
    Sup,
}

impl From<MetricName> for Metric {
    fn from(m: MetricName) -> Metric {
        match m {
            MetricName::L1 => Metric::L1,
            MetricName::Sup => Metric::Sup,
        }
    }
}

/// Evenly spaced `ωτ` values, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        (0..self.count).map(|i| self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64).collect()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: ExperimentKind,
    j: RawJ,
    delta_m: Option<RawDeltaM>,
    state: Option<StateSpec>,
    l_max: Option<usize>,
    metric: Option<MetricName>,
    seed: Option<u64>,
    mode: Option<Mode>,
    axis: Option<[f64; 3]>,
    omega: Option<f64>,
    dt: Option<f64>,
    steps: Option<usize>,
    omega_tau: Option<Sweep>,
    samples: Option<usize>,
    p_cap: Option<f64>,
    output: Option<String>,
}

/// A validated experiment description with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub j: Vec<f64>,
    pub delta_m: Vec<String>,
    #[serde(skip)]
    pub delta_m_rules: Vec<DeltaMRule>,
    pub state: StateSpec,
    pub l_max: Option<usize>,
    pub metric: MetricName,
    pub seed: Option<u64>,
    pub mode: Mode,
    pub axis: [f64; 3],
    pub omega: f64,
    pub dt: f64,
    pub steps: usize,
    pub omega_tau: Sweep,
    pub samples: usize,
    pub p_cap: f64,
    pub output: String,
}

impl ExperimentConfig {
    pub fn spins(&self) -> Vec<SpinJ> {
        self.j.iter().map(|&j| SpinJ::new(j).expect("validated")).collect()
    }

    /// Slot widths for spin `j`, every rule expanded, in rule order.
    pub fn delta_ms(&self, j: SpinJ) -> Vec<usize> {
        self.delta_m_rules.iter().flat_map(|r| r.resolve(j).expect("validated")).collect()
    }
}

pub const REQUIRED_KEYS: [&str; 2] = ["experiment", "j"];

pub const CONFIG_HELP: &str = "\
Config keys (JSON object, unknown keys rejected):
  experiment   required: qmap | slots | catdecay | invasiveness | trajectory | lg | pround
  j            required: number, list of numbers, or {\"from\", \"to\", \"step\" (default 1)};
               multiples of 1/2 in (0, 1000]
  delta_m      integer | \"full\" | \"doubling\" | \"<c>*sqrt(j)\" (rounded up) |
               \"<c>*ceil(sqrt(j))\", or a list of these; sqrt rules cap at 2j+1
               (default: \"5*sqrt(j)\"; invasiveness: \"doubling\")
  state        {\"kind\": mixed | top | bottom | cat | coherent (theta, phi) |
               superposition (components: [{theta, phi, weight}]) | random_pure |
               random_mixed (rank)}
               defaults: qmap/lg mixed, slots coherent(pi/3, 0), trajectory coherent(pi/2, pi/2),
               invasiveness superposition of coherent(pi/3, 0) and coherent(2pi/3, pi),
               pround random_mixed(rank 2)
  l_max        grid degree override (default 2j; even 2j for catdecay; 4j for pround)
  metric       l1 | sup (default l1)
  seed         unsigned integer; required by random states and selective trajectories
  mode         unitary | nonselective | selective (default nonselective)
  axis         precession axis [x, y, z] (default [1, 0, 0])
  omega        angular frequency (default 1)
  dt           trajectory step (default pi/10)
  steps        trajectory steps (default 20)
  omega_tau    {\"start\", \"stop\", \"count\"} (default 0 .. pi, 61 points)
  samples      random states per j for pround (default 10)
  p_cap        largest j for P-function inversion (default 20)
  output       output directory (default \"out\"; --out overrides)";

fn line_of_key(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}

fn semantic(text: &str, key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError { line: line_of_key(text, key), column: None, path: key.to_string(), message: message.into() }
}

/// Parses and validates a config. Every error names a line (when one can be
/// located) and the offending key path.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| ConfigError {
        line: Some(e.line()),
        column: Some(e.column()),
        path: String::new(),
        message: format!("malformed JSON: {e}"),
    })?;
    let Some(obj) = value.as_object() else {
        return Err(ConfigError {
            line: Some(1),
            column: None,
            path: String::new(),
            message: "config must be a JSON object".into(),
        });
    };
    let missing: Vec<&str> = REQUIRED_KEYS.iter().copied().filter(|k| !obj.contains_key(*k)).collect();
    if !missing.is_empty() {
        return Err(ConfigError {
            line: Some(1),
            column: None,
            path: String::new(),
            message: format!("missing required keys: {}", missing.join(", ")),
        });
    }
    let mut de = serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ConfigError { line: Some(inner.line()), column: Some(inner.column()), path, message: inner.to_string() }
    })?;
    let kind = raw.experiment;
    for key in obj.keys() {
        if !kind.allowed_keys().contains(&key.as_str()) {
            return Err(semantic(text, key, format!("key not used by experiment '{}'", kind.name())));
        }
    }
    // serde ignores extra fields next to a unit variant's tag
    if let (Some(state), Some(spec)) = (obj.get("state").and_then(|v| v.as_object()), raw.state.as_ref()) {
        if let Some(extra) = state.keys().find(|k| !spec.keys().contains(&k.as_str())) {
            return Err(semantic(text, extra, format!("unknown field `{extra}` in state")));
        }
    }
    validate(text, raw)
}

fn validate(text: &str, raw: RawConfig) -> Result<ExperimentConfig, ConfigError> {
    let kind = raw.experiment;
    let js: Vec<f64> = match raw.j {
        RawJ::One(j) => vec![j],
        RawJ::Many(v) => v,
        RawJ::Range(r) => {
            if !(r.step.is_finite() && r.step > 0.0 && r.from.is_finite() && r.to.is_finite()) {
                return Err(semantic(text, "j", "range needs finite from/to and a positive step"));
            }
            let n = ((r.to - r.from) / r.step + 1e-9).floor();
            if !(0.0..=10_000.0).contains(&n) {
                return Err(semantic(text, "j", "range must be ascending with at most 10001 values"));
            }
            (0..=n as usize).map(|i| r.from + i as f64 * r.step).collect()
        }
    };
    if js.is_empty() {
        return Err(semantic(text, "j", "at least one j is required"));
    }
    for &j in &js {
        let spin = SpinJ::new(j).map_err(|e| semantic(text, "j", e.to_string()))?;
        if spin.twice_j() == 0 || j > J_LIMIT {
            return Err(semantic(text, "j", format!("j = {j} outside (0, {J_LIMIT}]")));
        }
    }

    let default_rule =
        if kind == ExperimentKind::Invasiveness { DeltaMRule::Doubling } else { DeltaMRule::SqrtMultiple(5.0) };
    let rules: Vec<DeltaMRule> = match raw.delta_m {
        None => vec![default_rule],
        Some(RawDeltaM::One(r)) => vec![r.0],
        Some(RawDeltaM::Many(v)) => v.into_iter().map(|r| r.0).collect(),
    };
    if rules.is_empty() {
        return Err(semantic(text, "delta_m", "at least one rule is required"));
    }
    for &j in &js {
        let spin = SpinJ::new(j).expect("checked");
        for r in &rules {
            r.resolve(spin).map_err(|e| semantic(text, "delta_m", e))?;
        }
    }

    let state = raw.state.unwrap_or(match kind {
        ExperimentKind::Slots => StateSpec::Coherent { theta: PI / 3.0, phi: 0.0 },
        ExperimentKind::Trajectory => StateSpec::Coherent { theta: PI / 2.0, phi: PI / 2.0 },
        ExperimentKind::Invasiveness => StateSpec::Superposition {
            components: vec![
                Component { theta: PI / 3.0, phi: 0.0, weight: 1.0 },
                Component { theta: 2.0 * PI / 3.0, phi: PI, weight: 1.0 },
            ],
        },
        ExperimentKind::Pround => StateSpec::RandomMixed { rank: 2 },
        ExperimentKind::Catdecay => StateSpec::Cat,
        ExperimentKind::Qmap | ExperimentKind::Lg => StateSpec::Mixed,
    });
    match &state {
        StateSpec::Coherent { theta, phi } => check_angles(text, *theta, *phi)?,
        StateSpec::Superposition { components } => {
            if components.is_empty() || components.len() > 64 {
                return Err(semantic(text, "components", "superposition needs 1..=64 components"));
            }
            for c in components {
                check_angles(text, c.theta, c.phi)?;
                if !c.weight.is_finite() {
                    return Err(semantic(text, "weight", "weights must be finite"));
                }
            }
            if components.iter().all(|c| c.weight == 0.0) {
                return Err(semantic(text, "components", "at least one weight must be non-zero"));
            }
        }
        StateSpec::RandomMixed { rank } if *rank == 0 || *rank > 4096 => {
            return Err(semantic(text, "rank", "rank must be in 1..=4096"));
        }
        _ => {}
    }
    if kind == ExperimentKind::Pround && !matches!(state, StateSpec::RandomPure | StateSpec::RandomMixed { .. }) {
        return Err(semantic(text, "state", "pround draws random states: use random_pure or random_mixed"));
    }
    if kind == ExperimentKind::Trajectory && matches!(state, StateSpec::Mixed | StateSpec::RandomMixed { .. }) {
        return Err(semantic(text, "state", "trajectories start from a pure state"));
    }

    let mode = raw.mode.unwrap_or(Mode::Nonselective);
    let needs_seed = state.needs_seed() || (kind == ExperimentKind::Trajectory && mode == Mode::Selective);
    if needs_seed && raw.seed.is_none() {
        let why = if state.needs_seed() { "random initial states" } else { "selective trajectories" };
        return Err(ConfigError {
            line: Some(1),
            column: None,
            path: "seed".into(),
            message: format!("seed is required for {why}"),
        });
    }

    if let Some(l) = raw.l_max {
        if l > L_LIMIT {
            return Err(semantic(text, "l_max", format!("l_max must be at most {L_LIMIT}")));
        }
        let top = js.iter().map(|&j| SpinJ::new(j).expect("checked").twice_j() as usize).max().unwrap_or(0);
        if kind == ExperimentKind::Pround && l < 2 * top {
            return Err(semantic(text, "l_max", format!("P-function inversion needs l_max >= 4j = {}", 2 * top)));
        }
        if kind == ExperimentKind::Catdecay && (l % 2 == 1 || l < top) {
            return Err(semantic(text, "l_max", format!("cat gap needs an even l_max >= 2j = {top}")));
        }
    }
    let axis = raw.axis.unwrap_or([1.0, 0.0, 0.0]);
    if axis.iter().any(|x| !x.is_finite()) || axis.iter().all(|&x| x == 0.0) {
        return Err(semantic(text, "axis", "axis must be a finite non-zero vector"));
    }
    let omega = raw.omega.unwrap_or(1.0);
    if !omega.is_finite() {
        return Err(semantic(text, "omega", "omega must be finite"));
    }
    let dt = raw.dt.unwrap_or(PI / 10.0);
    if !(dt.is_finite() && dt > 0.0) {
        return Err(semantic(text, "dt", "dt must be positive"));
    }
    let steps = raw.steps.unwrap_or(20);
    if steps == 0 || steps > 100_000 {
        return Err(semantic(text, "steps", "steps must be in 1..=100000"));
    }
    let omega_tau = raw.omega_tau.unwrap_or(Sweep { start: 0.0, stop: PI, count: 61 });
    if omega_tau.count == 0 || omega_tau.count > 100_000 || !omega_tau.start.is_finite() || !omega_tau.stop.is_finite()
    {
        return Err(semantic(text, "omega_tau", "omega_tau needs finite start/stop and count in 1..=100000"));
    }
    if kind == ExperimentKind::Lg {
        if omega == 0.0 {
            return Err(semantic(text, "omega", "omega must be non-zero for an omega_tau sweep"));
        }
        for &j in &js {
            let spin = SpinJ::new(j).expect("checked");
            for r in &rules {
                if r.resolve(spin).expect("checked").iter().any(|&dm| dm >= spin.dim()) {
                    return Err(semantic(text, "delta_m", format!("Leggett-Garg needs at least two slots at j = {j}")));
                }
            }
        }
    }
    let samples = raw.samples.unwrap_or(10);
    if samples == 0 || samples > 10_000 {
        return Err(semantic(text, "samples", "samples must be in 1..=10000"));
    }
    let p_cap = raw.p_cap.unwrap_or(macrospin::phase_space::DEFAULT_P_J_CAP);
    if !(p_cap.is_finite() && p_cap > 0.0 && p_cap <= 100.0) {
        return Err(semantic(text, "p_cap", "p_cap must be in (0, 100]"));
    }
    if kind == ExperimentKind::Pround {
        if let Some(&j) = js.iter().find(|&&j| j > p_cap) {
            return Err(semantic(text, "j", format!("j = {j} exceeds p_cap = {p_cap}")));
        }
    }
    let output = raw.output.unwrap_or_else(|| "out".to_string());
    if output.is_empty() {
        return Err(semantic(text, "output", "output directory must not be empty"));
    }
    Ok(ExperimentConfig {
        experiment: kind,
        j: js,
        delta_m: rules.iter().map(|r| r.to_string()).collect(),
        delta_m_rules: rules,
        state,
        l_max: raw.l_max,
        metric: raw.metric.unwrap_or(MetricName::L1),
        seed: raw.seed,
        mode,
        axis,
        omega,
        dt,
        steps,
        omega_tau,
        samples,
        p_cap,
        output,
    })
}

fn check_angles(text: &str, theta: f64, phi: f64) -> Result<(), ConfigError> {
    if !(theta.is_finite() && phi.is_finite() && (0.0..=PI).contains(&theta)) {
        return Err(semantic(
            text,
            "theta",
            format!("theta must lie in [0, pi] and phi be finite (got {theta}, {phi})"),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_lists_required_keys() {
        let e = parse_config("{}").unwrap_err();
        assert!(e.message.contains("experiment") && e.message.contains('j'), "{e}");
    }

    #[test]
    fn sqrt_rule_rounds_up() {
        let j = SpinJ::new(100.0).unwrap();
        assert_eq!(parse_delta_m_rule("5*sqrt(j)").unwrap().resolve(j).unwrap(), vec![50]);
        assert_eq!(parse_delta_m_rule("sqrt(j)").unwrap().resolve(SpinJ::new(26.0).unwrap()).unwrap(), vec![6]);
        assert_eq!(
            parse_delta_m_rule(" 2 * ceil(sqrt(j)) ").unwrap().resolve(SpinJ::new(26.0).unwrap()).unwrap(),
            vec![12]
        );
        assert_eq!(
            parse_delta_m_rule("doubling").unwrap().resolve(SpinJ::new(3.0).unwrap()).unwrap(),
            vec![1, 2, 4, 7]
        );
        assert_eq!(parse_delta_m_rule("full").unwrap().resolve(j).unwrap(), vec![201]);
        assert!(parse_delta_m_rule("300").unwrap().resolve(j).is_err());
        for bad in ["", "0", "-1", "x*sqrt(j)", "0*sqrt(j)", "sqrt(k)", "1.5*ceil(sqrt(j))", "nan*sqrt(j)"] {
            assert!(parse_delta_m_rule(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn selective_trajectory_needs_seed() {
        let e = parse_config(r#"{"experiment": "trajectory", "j": 10, "mode": "selective"}"#).unwrap_err();
        assert_eq!(e.path, "seed");
        assert!(parse_config(r#"{"experiment": "trajectory", "j": 10, "mode": "selective", "seed": 1}"#).is_ok());
    }

    #[test]
    fn strictness_and_locations() {
        let text = "{\n  \"experiment\": \"slots\",\n  \"j\": 10,\n  \"colour\": 3\n}";
        let e = parse_config(text).unwrap_err();
        assert_eq!(e.line, Some(4));
        let text = "{\n  \"experiment\": \"slots\",\n  \"j\": 10,\n  \"axis\": [1, 0, 0]\n}";
        let e = parse_config(text).unwrap_err();
        assert_eq!((e.line, e.path.as_str()), (Some(4), "axis"));
        let e =
            parse_config("{\"experiment\": \"slots\", \"j\": 10, \"state\": {\"kind\": \"coherent\", \"theta\": 1}}")
                .unwrap_err();
        assert!(e.path.starts_with("state"), "{e}");
        let e = parse_config("{\"experiment\": \"slots\", \"j\": 10, \"state\": {\"kind\": \"top\", \"x\": 1}}")
            .unwrap_err();
        assert!(e.to_string().contains('x'), "{e}");
        assert!(parse_config("[1]").is_err());
        assert!(parse_config("{\"experiment\": \"slots\",").unwrap_err().line.is_some());
        assert!(parse_config(r#"{"experiment": "slots", "j": 0.3}"#).is_err());
        assert!(parse_config(r#"{"experiment": "slots", "j": 10, "delta_m": "nope"}"#).is_err());
    }

    #[test]
    fn defaults_and_ranges() {
        let c = parse_config(r#"{"experiment": "catdecay", "j": {"from": 1, "to": 25}}"#).unwrap();
        assert_eq!(c.j.len(), 25);
        assert_eq!(c.j[24], 25.0);
        let c = parse_config(r#"{"experiment": "slots", "j": [25, 100], "delta_m": [10, "2*sqrt(j)"]}"#).unwrap();
        assert_eq!(c.delta_ms(SpinJ::new(25.0).unwrap()), vec![10, 10]);
        assert_eq!(c.delta_ms(SpinJ::new(100.0).unwrap()), vec![10, 20]);
        assert_eq!(c.state, StateSpec::Coherent { theta: PI / 3.0, phi: 0.0 });
        let echo = serde_json::to_string(&c).unwrap();
        assert!(echo.contains("\"delta_m\":[\"10\",\"2*sqrt(j)\"]"));
        assert!(parse_config(r#"{"experiment": "lg", "j": 5, "delta_m": "full"}"#).is_err());
        assert!(parse_config(r#"{"experiment": "pround", "j": 30, "seed": 1}"#).is_err());
        assert!(parse_config(r#"{"experiment": "pround", "j": 3}"#).is_err());
    }
}
