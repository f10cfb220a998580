//! Experiment configuration: TOML schema, strict validation, and
//! resolution into the simulator's domain types.
//!
//! Unknown keys anywhere in the file are errors, not warnings. Semantic
//! validation collects every violation before reporting, so a bad config
//! fails once with the full list instead of one field at a time.

use serde::{Deserialize, Serialize};

use crate::circuits::{generate_random_step, RandomStepCircuit};
use crate::error::{MqteError, Result};
use crate::hamiltonian::{neel_state, Geometry, Hamiltonian};
use crate::noise::{NoiseMode, NoiseModel};
use crate::sampling::{ConfigSelection, DEFAULT_TOP_K};
use crate::spectral::plan_sampling;
use crate::state::{BitString, MAX_QUBITS};

/// Default peak-detection threshold in units of the noise sigma.
pub const DEFAULT_THRESHOLD: f64 = 4.0;

const STREAM_INDEX_CAP: u64 = 1 << 28;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Output directory; the CLI's `--out` flag overrides it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// Shots per time point; 0 means exact probabilities.
    #[serde(default)]
    pub shots: u64,
    pub model: ModelSpec,
    /// Explicit bitstring, or "neel" for the alternating pattern.
    pub reference: String,
    #[serde(default)]
    pub evolution: EvolutionSpec,
    pub grid: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
    #[serde(default)]
    pub analysis: AnalysisSpec,
    #[serde(default)]
    pub configs: ConfigsSpec,
}

/// Model table: `kind` picks the family, the remaining keys must match it.
/// A flat optional-field layout (rather than a tagged enum) keeps unknown
/// keys detectable and lets validation name exactly which keys are missing
/// or foreign.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sites: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    #[serde(default, rename = "J", skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_qubits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvolutionMode {
    Exact,
    Trotter,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSpec {
    pub mode: EvolutionMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

impl Default for EvolutionSpec {
    fn default() -> Self {
        EvolutionSpec {
            mode: EvolutionMode::Exact,
            tau: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub delta: f64,
    /// Time points past n = 0; exclusive with `epsilon`.
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Target gap accuracy; the grid length is planned from it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub gamma: f64,
    #[serde(default)]
    pub mode: NoiseMode,
    /// Background probability override; defaults to uniform, 1/2^n.
    #[serde(default, rename = "C0", skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaMode {
    /// Closed-form bound 1/sqrt(2NM).
    Bound,
    /// Median-based estimate from the spectrum itself.
    Empirical,
}

impl Default for SigmaMode {
    fn default() -> Self {
        SigmaMode::Bound
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    /// Peak threshold in sigma units.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub sigma: SigmaMode,
    /// Oracle peaks below this |weight| are dropped from reports.
    #[serde(default)]
    pub weight_floor: f64,
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        AnalysisSpec {
            threshold: DEFAULT_THRESHOLD,
            sigma: SigmaMode::default(),
            weight_floor: 0.0,
        }
    }
}

/// Configurations to report: an explicit list or the top K by summed
/// probability. Leaving both out means top-K with the default K.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub list: Option<Vec<String>>,
}

/// The system a config builds: a Hamiltonian or a step circuit.
#[derive(Debug, Clone)]
pub enum BuiltModel {
    Hamiltonian(Hamiltonian),
    Circuit(RandomStepCircuit),
}

impl ExperimentConfig {
    /// Parse from TOML text. Schema errors (including unknown keys) are
    /// reported as parse errors; semantic checks live in [`Self::validate`].
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| MqteError::parse(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| MqteError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::from_toml_str(&text)
    }

    /// Semantic validation; collects every violation before failing.
    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        self.check_model(&mut violations);
        self.check_grid(&mut violations);
        self.check_evolution(&mut violations);
        self.check_reference(&mut violations);
        self.check_noise(&mut violations);
        self.check_analysis(&mut violations);
        self.check_configs(&mut violations);
        if self.shots >= STREAM_INDEX_CAP {
            violations.push(format!(
                "shots: must stay below 2^28, got {}",
                self.shots
            ));
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(MqteError::Config { violations })
        }
    }

    fn check_model(&self, violations: &mut Vec<String>) {
        let m = &self.model;
        let mut require = |name: &str, present: bool| {
            if !present {
                violations.push(format!("model.{name}: required for kind \"{}\"", m.kind));
            }
        };
        let foreign: Vec<(&str, bool)> = vec![
            ("sites", m.sites.is_some()),
            ("rows", m.rows.is_some()),
            ("cols", m.cols.is_some()),
            ("J", m.j.is_some()),
            ("h", m.h.is_some()),
            ("n_qubits", m.n_qubits.is_some()),
            ("terms", m.terms.is_some()),
            ("n", m.n.is_some()),
            ("depth", m.depth.is_some()),
            ("seed", m.seed.is_some()),
        ];
        let allowed: &[&str] = match m.kind.as_str() {
            "heisenberg1d" => {
                require("sites", m.sites.is_some());
                require("J", m.j.is_some());
                require("h", m.h.is_some());
                &["sites", "J", "h"]
            }
            "heisenberg2d" => {
                require("rows", m.rows.is_some());
                require("cols", m.cols.is_some());
                require("J", m.j.is_some());
                require("h", m.h.is_some());
                &["rows", "cols", "J", "h"]
            }
            "custom" => {
                require("terms", m.terms.is_some());
                if m.n_qubits.is_none()
                    && m.terms.as_ref().map(|t| t.is_empty()).unwrap_or(false)
                {
                    violations.push(
                        "model.n_qubits: required when the term list is empty".to_string(),
                    );
                }
                &["n_qubits", "terms"]
            }
            "random_circuit" => {
                require("n", m.n.is_some());
                require("depth", m.depth.is_some());
                require("seed", m.seed.is_some());
                &["n", "depth", "seed"]
            }
            other => {
                violations.push(format!(
                    "model.kind: \"{other}\" is not one of heisenberg1d, heisenberg2d, \
                     custom, random_circuit"
                ));
                return;
            }
        };
        for (name, present) in foreign {
            if present && !allowed.contains(&name) {
                violations.push(format!(
                    "model.{name}: not a key of kind \"{}\"",
                    m.kind
                ));
            }
        }
        for (name, value) in [("sites", m.sites), ("n", m.n)] {
            if let Some(v) = value {
                if v == 0 || v > MAX_QUBITS {
                    violations.push(format!(
                        "model.{name}: register must be 1..={MAX_QUBITS}, got {v}"
                    ));
                }
            }
        }
        if let (Some(r), Some(c)) = (m.rows, m.cols) {
            if r == 0 || c == 0 || r * c > MAX_QUBITS {
                violations.push(format!(
                    "model.rows x model.cols: register must be 1..={MAX_QUBITS}, got {}",
                    r * c
                ));
            }
        }
        if m.kind == "random_circuit" {
            if let Some(0) = m.depth {
                violations.push("model.depth: must be ≥ 1".to_string());
            }
        }
        for (name, value) in [("J", m.j), ("h", m.h)] {
            if let Some(v) = value {
                if !v.is_finite() {
                    violations.push(format!("model.{name}: must be finite, got {v}"));
                }
            }
        }
    }

    fn check_grid(&self, violations: &mut Vec<String>) {
        let g = &self.grid;
        if !(g.delta.is_finite() && g.delta > 0.0) {
            violations.push(format!("grid.delta: must be > 0, got {}", g.delta));
        }
        match (g.n, g.epsilon) {
            (Some(_), Some(_)) => {
                violations.push("grid: give N or epsilon, not both".to_string())
            }
            (None, None) => violations.push("grid: one of N or epsilon is required".to_string()),
            (Some(n), None) => {
                if n == 0 {
                    violations.push("grid.N: must be ≥ 1".to_string());
                } else if (n as u64) >= STREAM_INDEX_CAP {
                    violations.push(format!("grid.N: must stay below 2^28, got {n}"));
                }
            }
            (None, Some(eps)) => {
                if !(eps.is_finite() && eps > 0.0) {
                    violations.push(format!("grid.epsilon: must be > 0, got {eps}"));
                }
            }
        }
    }

    fn check_evolution(&self, violations: &mut Vec<String>) {
        let e = &self.evolution;
        if e.mode == EvolutionMode::Trotter {
            if self.model.kind == "random_circuit" {
                violations.push(
                    "evolution.mode: random_circuit models advance one step per sample; \
                     use \"exact\""
                        .to_string(),
                );
            }
            match e.tau {
                None => violations.push("evolution.tau: required in trotter mode".to_string()),
                Some(tau) if !(tau.is_finite() && tau > 0.0) => {
                    violations.push(format!("evolution.tau: must be > 0, got {tau}"));
                }
                Some(tau) => {
                    if self.grid.delta.is_finite() && self.grid.delta > 0.0 {
                        let ratio = self.grid.delta / tau;
                        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0)
                            || ratio.round() < 1.0
                        {
                            violations.push(format!(
                                "grid.delta: must be an integer multiple of evolution.tau, \
                                 got delta/tau = {ratio}"
                            ));
                        }
                    }
                }
            }
        }
    }

    fn check_reference(&self, violations: &mut Vec<String>) {
        if self.reference == "neel" {
            return;
        }
        if self.reference.is_empty() || !self.reference.chars().all(|c| c == '0' || c == '1') {
            violations.push(format!(
                "reference: \"{}\" is neither \"neel\" nor a bitstring",
                self.reference
            ));
            return;
        }
        if let Some(width) = self.model_width() {
            if self.reference.len() != width {
                violations.push(format!(
                    "reference: {} bits does not match the {width}-qubit model",
                    self.reference.len()
                ));
            }
        }
    }

    fn check_noise(&self, violations: &mut Vec<String>) {
        if let Some(noise) = &self.noise {
            if !(noise.gamma.is_finite() && (0.0..=1.0).contains(&noise.gamma)) {
                violations.push(format!(
                    "noise.gamma: must lie in [0, 1], got {}",
                    noise.gamma
                ));
            }
            if let Some(c0) = noise.c0 {
                if !(c0.is_finite() && (0.0..=1.0).contains(&c0)) {
                    violations.push(format!("noise.C0: must lie in [0, 1], got {c0}"));
                }
            }
            if noise.mode != NoiseMode::Analytic && self.shots == 0 {
                violations.push(
                    "shots: trajectory noise modes need ≥ 1 shot; use analytic mode for \
                     exact expectations"
                        .to_string(),
                );
            }
            // Gate noise needs gates: a Hamiltonian evolved exactly has none.
            let gate_based = self.model.kind == "random_circuit"
                || self.evolution.mode == EvolutionMode::Trotter;
            if !gate_based && (noise.gamma > 0.0 || noise.mode != NoiseMode::Analytic) {
                violations.push(
                    "noise: requires gate evolution; set evolution.mode = \"trotter\" or use \
                     a random_circuit model"
                        .to_string(),
                );
            }
        }
    }

    fn check_analysis(&self, violations: &mut Vec<String>) {
        let a = &self.analysis;
        if !(a.threshold.is_finite() && a.threshold > 0.0) {
            violations.push(format!(
                "analysis.threshold: must be > 0, got {}",
                a.threshold
            ));
        }
        if !(a.weight_floor.is_finite() && a.weight_floor >= 0.0) {
            violations.push(format!(
                "analysis.weight_floor: must be ≥ 0, got {}",
                a.weight_floor
            ));
        }
    }

    fn check_configs(&self, violations: &mut Vec<String>) {
        let c = &self.configs;
        if c.top_k.is_some() && c.list.is_some() {
            violations.push("configs: give top_k or list, not both".to_string());
        }
        if let Some(0) = c.top_k {
            violations.push("configs.top_k: must be ≥ 1".to_string());
        }
        if let Some(list) = &c.list {
            if list.is_empty() {
                violations.push("configs.list: must not be empty".to_string());
            }
            for entry in list {
                if entry.is_empty() || !entry.chars().all(|ch| ch == '0' || ch == '1') {
                    violations.push(format!("configs.list: \"{entry}\" is not a bitstring"));
                } else if let Some(width) = self.model_width() {
                    if entry.len() != width {
                        violations.push(format!(
                            "configs.list: \"{entry}\" does not match the {width}-qubit model"
                        ));
                    }
                }
            }
        }
    }

    /// Register width, when the model table determines one.
    pub fn model_width(&self) -> Option<usize> {
        match self.model.kind.as_str() {
            "heisenberg1d" => self.model.sites,
            "heisenberg2d" => match (self.model.rows, self.model.cols) {
                (Some(r), Some(c)) => Some(r * c),
                _ => None,
            },
            "custom" => self.model.n_qubits.or_else(|| {
                let terms = self.model.terms.as_ref()?;
                let mut width = None;
                for text in terms {
                    let parsed = crate::state::PauliString::parse(text).ok()?;
                    let max = parsed.max_qubit()?;
                    width = Some(width.unwrap_or(0).max(max + 1));
                }
                width
            }),
            "random_circuit" => self.model.n,
            _ => None,
        }
    }

    /// Build the model the config describes.
    pub fn build_model(&self) -> Result<BuiltModel> {
        let m = &self.model;
        match m.kind.as_str() {
            "heisenberg1d" => Ok(BuiltModel::Hamiltonian(Hamiltonian::heisenberg_1d(
                m.sites.expect("validated"),
                m.j.expect("validated"),
                m.h.expect("validated"),
            )?)),
            "heisenberg2d" => Ok(BuiltModel::Hamiltonian(Hamiltonian::heisenberg_2d(
                m.rows.expect("validated"),
                m.cols.expect("validated"),
                m.j.expect("validated"),
                m.h.expect("validated"),
            )?)),
            "custom" => {
                let width = self
                    .model_width()
                    .ok_or_else(|| MqteError::invalid("custom model width undetermined"))?;
                Ok(BuiltModel::Hamiltonian(Hamiltonian::from_term_texts(
                    width,
                    m.terms.as_deref().unwrap_or(&[]),
                )?))
            }
            "random_circuit" => Ok(BuiltModel::Circuit(generate_random_step(
                m.n.expect("validated"),
                m.depth.expect("validated"),
                m.seed.expect("validated"),
            )?)),
            other => Err(MqteError::invalid(format!("unknown model kind {other}"))),
        }
    }

    /// Grid length: N directly, or planned from epsilon. `max_gap` feeds
    /// the aliasing diagnostic when the caller knows the spectral range.
    pub fn planned_points(&self, max_gap: Option<f64>) -> Result<usize> {
        match (self.grid.n, self.grid.epsilon) {
            (Some(n), _) => Ok(n),
            (None, Some(eps)) => Ok(plan_sampling(self.grid.delta, eps, max_gap)?.n_points),
            (None, None) => Err(MqteError::invalid("grid: no N or epsilon".to_string())),
        }
    }

    /// Resolve the reference state against a model geometry.
    pub fn reference_bits(&self, geometry: &Geometry, width: usize) -> Result<BitString> {
        if self.reference == "neel" {
            match geometry {
                Geometry::Custom => neel_state(&Geometry::Chain { sites: width }),
                g => neel_state(g),
            }
        } else {
            self.reference.parse()
        }
    }

    pub fn selection(&self) -> Result<ConfigSelection> {
        match (&self.configs.top_k, &self.configs.list) {
            (Some(k), None) => Ok(ConfigSelection::TopK(*k)),
            (None, Some(list)) => {
                let parsed: Result<Vec<BitString>> =
                    list.iter().map(|s| s.parse::<BitString>()).collect();
                Ok(ConfigSelection::Listed(parsed?))
            }
            (None, None) => Ok(ConfigSelection::TopK(DEFAULT_TOP_K)),
            (Some(_), Some(_)) => Err(MqteError::invalid("configs: both top_k and list set")),
        }
    }

    /// Noise model, when a noise table is present.
    pub fn noise_model(&self) -> Result<Option<NoiseModel>> {
        match &self.noise {
            None => Ok(None),
            Some(spec) => {
                let mut model = NoiseModel::new(spec.gamma, spec.mode)?;
                model.c0 = spec.c0;
                Ok(Some(model))
            }
        }
    }

    /// True when the run involves neither shot sampling nor noise.
    pub fn is_ideal(&self) -> bool {
        self.shots == 0 && self.noise.as_ref().map(|n| n.gamma == 0.0).unwrap_or(true)
    }
}
