// Copyright 2026 The cslimit Authors
// SPDX-License-Identifier: Apache-2.0

//! TOML scenario configuration. Every scenario has a complete embedded
//! default document; a user file only needs the keys it changes and is
//! deep-merged over those defaults.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::RunError;
use crate::decoherence::{KernelFamily, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioName {
    MoyalConvergence,
    WignerNegativity,
    PairingEquivalence,
    DecoherenceLorentzian,
    DecoherencePolefree,
    LimitPositivity,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 6] = [
        Self::MoyalConvergence,
        Self::WignerNegativity,
        Self::PairingEquivalence,
        Self::DecoherenceLorentzian,
        Self::DecoherencePolefree,
        Self::LimitPositivity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::MoyalConvergence => "moyal-convergence",
            Self::WignerNegativity => "wigner-negativity",
            Self::PairingEquivalence => "pairing-equivalence",
            Self::DecoherenceLorentzian => "decoherence-lorentzian",
            Self::DecoherencePolefree => "decoherence-polefree",
            Self::LimitPositivity => "limit-positivity",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Self::MoyalConvergence => "ℏ → 0 convergence of ⋆ and the Moyal bracket; quadratic exactness",
            Self::WignerNegativity => "negative Wigner function of the first excited oscillator state",
            Self::PairingEquivalence => "spectral, phase-space and kernel pairings; singular integration; basis duality",
            Self::DecoherenceLorentzian => "exponential decoherence at rate γ/ℏ and the weak limit",
            Self::DecoherencePolefree => "non-exponential decay for a kernel without poles",
            Self::LimitPositivity => "positivity of the limiting density for random states",
        }
    }

    fn defaults(self) -> &'static str {
        match self {
            Self::MoyalConvergence => MOYAL_DEFAULTS,
            Self::WignerNegativity => WIGNER_DEFAULTS,
            Self::PairingEquivalence => PAIRING_DEFAULTS,
            Self::DecoherenceLorentzian => LORENTZIAN_DEFAULTS,
            Self::DecoherencePolefree => POLEFREE_DEFAULTS,
            Self::LimitPositivity => POSITIVITY_DEFAULTS,
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioName {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| RunError::Validation(format!("unknown scenario '{s}'")))
    }
}

/// ℏ as a single value or a list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HbarSpec {
    One(f64),
    Many(Vec<f64>),
}

impl HbarSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Self::One(h) => vec![*h],
            Self::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseGridConfig {
    pub q_min: f64,
    pub q_max: f64,
    pub q_count: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub p_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralConfig {
    pub omega_max: f64,
    pub omega_count: usize,
    /// ω₀ in the plane-wave model Ĥ = p̂ + ω₀.
    pub omega_offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    Absolute,
    /// Times are multiplied by ℏ before use.
    Hbar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoyalConfig {
    pub order: usize,
    /// (q power, p power) of f = q^a p^b.
    pub f: [u32; 2],
    pub g: [u32; 2],
    pub quadratic_hbar: f64,
}

/// Diagonal profile d(ω), observable profile B(ω) and coherence amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub center: f64,
    pub width: f64,
    pub observable_width: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketConfig {
    pub sigma: f64,
    pub q0: f64,
    pub k0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxConfig {
    pub base_length: f64,
    pub doublings: usize,
    pub q_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomConfig {
    pub states: usize,
    pub max_level: usize,
    pub mixture_components: usize,
    pub duality_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioName,
    pub hbar: HbarSpec,
    pub seed: u64,
    /// Recorded in metadata.json rather than the report, so that reports
    /// from identical runs compare equal wherever they were written.
    #[serde(skip_serializing)]
    pub output_dir: PathBuf,
    pub phase_space: PhaseGridConfig,
    pub spectral: SpectralConfig,
    pub kernel: KernelFamily,
    pub time: TimeGrid,
    pub time_unit: TimeUnit,
    pub moyal: MoyalConfig,
    pub profile: ProfileConfig,
    pub packet: PacketConfig,
    pub boxes: BoxConfig,
    pub random: RandomConfig,
}

const BASE_DEFAULTS: &str = r#"
hbar = 1.0
seed = 20260101
time_unit = "absolute"

[phase_space]
q_min = -6.0
q_max = 6.0
q_count = 129
p_min = -6.0
p_max = 6.0
p_count = 129

[spectral]
omega_max = 3.0
omega_count = 301
omega_offset = 0.0

[kernel]
family = "lorentzian"
gamma = 0.1

[time]
spacing = "log"
start = 0.1
end = 1000.0
count = 200

[moyal]
order = 6
f = [3, 0]
g = [0, 3]
quadratic_hbar = 0.5

[profile]
center = 1.5
width = 0.25
observable_width = 0.25
amplitude = 1.0

[packet]
sigma = 1.0
q0 = 0.5
k0 = 0.3

[boxes]
base_length = 4.0
doublings = 3
q_count = 65

[random]
states = 20
max_level = 3
mixture_components = 3
duality_count = 16
"#;

const MOYAL_DEFAULTS: &str = r#"
scenario = "moyal-convergence"
hbar = [0.4, 0.2, 0.1]
output_dir = "out/moyal-convergence"

[phase_space]
q_min = -2.0
q_max = 2.0
q_count = 161
p_min = -2.0
p_max = 2.0
p_count = 161
"#;

const WIGNER_DEFAULTS: &str = r#"
scenario = "wigner-negativity"
output_dir = "out/wigner-negativity"
"#;

const PAIRING_DEFAULTS: &str = r#"
scenario = "pairing-equivalence"
output_dir = "out/pairing-equivalence"

[phase_space]
q_min = -8.0
q_max = 8.0
q_count = 201
p_min = -7.0
p_max = 7.0
p_count = 141

[spectral]
omega_max = 16.0
omega_count = 161
omega_offset = 8.0

[profile]
center = 8.0
width = 1.0
observable_width = 1.5
amplitude = 1.0
"#;

const LORENTZIAN_DEFAULTS: &str = r#"
scenario = "decoherence-lorentzian"
hbar = [1.0, 0.5]
output_dir = "out/decoherence-lorentzian"
time_unit = "hbar"

[spectral]
omega_max = 3.0
omega_count = 1201
omega_offset = 0.0

[kernel]
family = "lorentzian"
gamma = 0.1

[time]
spacing = "linear"
start = 0.0
end = 150.0
count = 301
"#;

const POLEFREE_DEFAULTS: &str = r#"
scenario = "decoherence-polefree"
output_dir = "out/decoherence-polefree"
time_unit = "hbar"

[spectral]
omega_max = 3.0
omega_count = 601
omega_offset = 0.0

[kernel]
family = "pole-free"
scale = 0.5

[time]
spacing = "log"
start = 1.0
end = 300.0
count = 120
"#;

const POSITIVITY_DEFAULTS: &str = r#"
scenario = "limit-positivity"
output_dir = "out/limit-positivity"

[spectral]
omega_max = 16.0
omega_count = 161
omega_offset = 8.0

[profile]
center = 8.0
width = 1.0
observable_width = 1.0
amplitude = 0.5
"#;

fn parse_table(text: &str, what: &str) -> Result<toml::Table, RunError> {
    text.parse::<toml::Table>().map_err(|e| RunError::Parse(format!("{what}: {e}")))
}

/// Recursively overlay `top` on `base`; tables merge, everything else
/// replaces. A `kernel` or `time` table that changes its tag replaces the
/// whole table so stale parameters of the old variant do not linger.
fn merge(base: &mut toml::Table, top: toml::Table) {
    for (key, value) in top {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(t)) => {
                let tag = ["family", "spacing"].into_iter().find(|k| t.contains_key(*k));
                if tag.is_some_and(|k| b.get(k) != t.get(k)) {
                    *b = t;
                } else {
                    merge(b, t);
                }
            }
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

/// The complete default document for `name`.
pub fn default_table(name: ScenarioName) -> toml::Table {
    let mut table = parse_table(BASE_DEFAULTS, "embedded defaults").expect("embedded defaults parse");
    merge(&mut table, parse_table(name.defaults(), "embedded defaults").expect("embedded defaults parse"));
    table
}

pub fn defaults_toml(name: ScenarioName) -> String {
    toml::to_string(&default_table(name)).expect("defaults serialize")
}

/// Command-line overrides applied after the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub hbar: Option<f64>,
    pub seed: Option<u64>,
}

impl ScenarioConfig {
    pub fn defaults(name: ScenarioName) -> Self {
        Self::deserialize(default_table(name)).expect("embedded defaults are valid")
    }

    /// Parse a user document, merge it over the defaults of the scenario it
    /// names, apply overrides and validate.
    pub fn from_toml(text: &str, overrides: &Overrides) -> Result<Self, RunError> {
        let user = parse_table(text, "config")?;
        let name = match user.get("scenario") {
            Some(toml::Value::String(s)) => s.parse::<ScenarioName>()?,
            Some(_) => return Err(RunError::Parse("'scenario' must be a string".into())),
            None => return Err(RunError::Validation("config does not name a scenario".into())),
        };
        let mut table = default_table(name);
        merge(&mut table, user);
        let mut cfg = Self::deserialize(table).map_err(|e| RunError::Parse(format!("config: {e}")))?;
        if let Some(out) = &overrides.out {
            cfg.output_dir = out.clone();
        }
        if let Some(h) = overrides.hbar {
            cfg.hbar = HbarSpec::One(h);
        }
        if let Some(s) = overrides.seed {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let fail = |msg: String| Err(RunError::Validation(msg));
        let hbars = self.hbar.values();
        if hbars.is_empty() || hbars.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return fail(format!("hbar must be positive, got {hbars:?}"));
        }
        let ps = &self.phase_space;
        if !(ps.q_max > ps.q_min && ps.p_max > ps.p_min) || ps.q_count < 8 || ps.p_count < 8 {
            return fail("phase_space ranges must be increasing with at least 8 nodes".into());
        }
        let sp = &self.spectral;
        if !(sp.omega_max > 0.0) || sp.omega_count < 16 {
            return fail("spectral.omega_max must be positive with at least 16 nodes".into());
        }
        let pr = &self.profile;
        if !(pr.width > 0.0 && pr.observable_width > 0.0 && pr.amplitude >= 0.0) {
            return fail("profile widths must be positive and amplitude nonnegative".into());
        }
        if !(self.packet.sigma > 0.0) {
            return fail("packet.sigma must be positive".into());
        }
        if !(self.boxes.base_length > 0.0) || self.boxes.doublings < 2 || self.boxes.q_count < 8 {
            return fail("boxes need a positive base length, ≥2 doublings and ≥8 nodes".into());
        }
        if self.random.states == 0 || self.random.mixture_components == 0 || self.random.duality_count < 16 {
            return fail("random section needs ≥1 state, ≥1 component and duality_count ≥ 16".into());
        }
        if self.moyal.order > crate::moyal::StarOrder::MAX {
            return fail(format!("moyal.order must be ≤ {}", crate::moyal::StarOrder::MAX));
        }
        if !(self.moyal.quadratic_hbar > 0.0) {
            return fail("moyal.quadratic_hbar must be positive".into());
        }
        self.kernel.validate().map_err(|e| RunError::Validation(e.to_string()))?;
        self.time.times().map_err(|e| RunError::Validation(e.to_string()))?;
        Ok(())
    }

    /// The configured time samples, in absolute units for this ℏ.
    pub fn times(&self, hbar: f64) -> Result<Vec<f64>, RunError> {
        let grid = match self.time_unit {
            TimeUnit::Absolute => self.time.clone(),
            TimeUnit::Hbar => self.time.scaled(hbar),
        };
        grid.times().map_err(|e| RunError::Validation(e.to_string()))
    }
}
