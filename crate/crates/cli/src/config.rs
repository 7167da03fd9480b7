// Copyright 2026 The hetero-oracle Contributors
// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration: a flat TOML file with one `[[scenario]]` table per setting.
//!
//! ```toml
//! seed = 7
//! replications = 200
//! mode = "estimated"
//!
//! [[scenario]]
//! name = "standard"
//! signal = "sine"
//! amplitude = 1.0
//! k = 1
//! volatility = "budget"
//! c0 = 1.0
//! c1 = 1.0
//! c2 = 1.0
//! noise = "gaussian"
//! n_list = [101, 201, 401]
//! ```

use std::path::{Path, PathBuf};

use hetero_oracle::{
    EstimatorConfig, NoiseSpec, Scenario, SieveOverrides, SignalSpec, VarianceMode, VolatilityKind, WeightVector,
};
use serde::Deserialize;

/// An invalid configuration, naming the offending field.
#[derive(Debug)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid config field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn bad(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    Estimated,
    Known,
}

impl From<ModeName> for VarianceMode {
    fn from(m: ModeName) -> Self {
        match m {
            ModeName::Estimated => VarianceMode::Estimated,
            ModeName::Known => VarianceMode::Known,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub replications: Option<usize>,
    pub mode: Option<ModeName>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub scenario: Vec<ScenarioConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default = "default_signal")]
    pub signal: String,
    pub amplitude: Option<f64>,
    /// Sobolev order certified for the signal.
    #[serde(default = "default_k")]
    pub k: u32,
    /// Index for `signal = "basis"`.
    pub index: Option<usize>,
    /// Coefficients for `signal = "trig_polynomial"`.
    pub coeffs: Option<Vec<f64>>,
    #[serde(default = "default_volatility")]
    pub volatility: String,
    pub c0: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub sigma_sq: Option<f64>,
    pub sigma_star: Option<f64>,
    #[serde(default = "default_noise")]
    pub noise: String,
    #[serde(default = "default_n_list")]
    pub n_list: Vec<usize>,
    pub rho: Option<f64>,
    pub epsilon: Option<f64>,
    pub k_star: Option<u32>,
    pub m_n: Option<usize>,
    pub replications: Option<usize>,
    pub seed: Option<u64>,
    pub mode: Option<ModeName>,
    /// Appends `lambda = 1` to the Pinsker family.
    #[serde(default)]
    pub include_ones: bool,
}

fn default_signal() -> String {
    "sine".into()
}
fn default_k() -> u32 {
    1
}
fn default_volatility() -> String {
    "budget".into()
}
fn default_noise() -> String {
    "gaussian".into()
}
fn default_n_list() -> Vec<usize> {
    vec![101]
}

impl ScenarioConfig {
    pub fn standard() -> Self {
        ScenarioConfig {
            name: "standard".into(),
            signal: default_signal(),
            amplitude: None,
            k: 1,
            index: None,
            coeffs: None,
            volatility: default_volatility(),
            c0: None,
            c1: None,
            c2: None,
            sigma_sq: None,
            sigma_star: None,
            noise: default_noise(),
            n_list: default_n_list(),
            rho: None,
            epsilon: None,
            k_star: None,
            m_n: None,
            replications: None,
            seed: None,
            mode: None,
            include_ones: false,
        }
    }
}

/// Command-line values that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub replications: Option<usize>,
    pub mode: Option<ModeName>,
    pub out: Option<PathBuf>,
    pub n_list: Option<Vec<usize>>,
}

/// A fully validated scenario ready to run.
#[derive(Debug, Clone)]
pub struct ResolvedScenario {
    pub name: String,
    pub base: Scenario<f64>,
    pub include_ones: bool,
    pub n_list: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    pub mode: VarianceMode,
}

impl ResolvedScenario {
    /// The scenario at one sample size, with `lambda = 1` appended when requested.
    pub fn at(&self, n: usize) -> anyhow::Result<Scenario<f64>> {
        let mut sc = self.base.with_n(n);
        if self.include_ones {
            let grid = hetero_oracle::DesignGrid::new(n)?;
            let family = hetero_oracle::WeightFamily::pinsker(&grid, sc.estimator.sieve)?;
            let mut members = family.members().to_vec();
            members.push(WeightVector::ones(n));
            sc.family = Some(members);
        }
        Ok(sc)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub out: PathBuf,
    pub scenarios: Vec<ResolvedScenario>,
}

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_REPLICATIONS: usize = 200;

pub fn load(path: Option<&Path>, ov: &Overrides) -> Result<ExperimentConfig, ConfigError> {
    let file = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| bad("config", format!("{}: {e}", p.display())))?;
            parse(&text)?
        }
        None => FileConfig {
            seed: None,
            replications: None,
            mode: None,
            out: None,
            scenario: vec![],
        },
    };
    resolve(file, ov)
}

pub fn parse(text: &str) -> Result<FileConfig, ConfigError> {
    toml::from_str(text).map_err(|e| {
        let msg = e.message().to_string();
        let field = e
            .span()
            .and_then(|s| text.get(s))
            .map(|s| s.split('=').next().unwrap_or(s).trim().to_string())
            .filter(|s| !s.is_empty())
            .unwrap_or_else(|| "config".into());
        bad(field, msg)
    })
}

pub fn resolve(file: FileConfig, ov: &Overrides) -> Result<ExperimentConfig, ConfigError> {
    let scenarios_in = if file.scenario.is_empty() {
        vec![ScenarioConfig::standard()]
    } else {
        file.scenario.clone()
    };
    let mut scenarios = Vec::with_capacity(scenarios_in.len());
    for (i, sc) in scenarios_in.into_iter().enumerate() {
        let prefix = format!("scenario[{i}]");
        let n_list = ov.n_list.clone().unwrap_or_else(|| sc.n_list.clone());
        validate_n_list(&n_list, &format!("{prefix}.n_list"))?;
        let replications = ov
            .replications
            .or(sc.replications)
            .or(file.replications)
            .unwrap_or(DEFAULT_REPLICATIONS);
        if replications < 1 {
            return Err(bad(format!("{prefix}.replications"), "must be >= 1"));
        }
        let seed = ov.seed.or(sc.seed).or(file.seed).unwrap_or(DEFAULT_SEED);
        let mode = ov.mode.or(sc.mode).or(file.mode).unwrap_or(ModeName::Estimated).into();
        let base = build_scenario(&sc, n_list[0], &prefix)?;
        scenarios.push(ResolvedScenario {
            name: sc.name.clone(),
            base,
            include_ones: sc.include_ones,
            n_list,
            replications,
            seed,
            mode,
        });
    }
    let out = ov.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("results"));
    Ok(ExperimentConfig { out, scenarios })
}

pub fn validate_n_list(n_list: &[usize], field: &str) -> Result<(), ConfigError> {
    if n_list.is_empty() {
        return Err(bad(field, "must list at least one sample size"));
    }
    for &n in n_list {
        if n.is_multiple_of(2) {
            return Err(bad(
                field,
                format!("n = {n} is even; only odd sample sizes are supported"),
            ));
        }
        if n < 3 {
            return Err(bad(field, format!("n = {n} is below 3")));
        }
    }
    Ok(())
}

fn positive(v: f64, field: &str) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(bad(field, format!("{v} is not a positive number")))
    }
}

fn build_scenario(sc: &ScenarioConfig, n: usize, prefix: &str) -> Result<Scenario<f64>, ConfigError> {
    let f = |name: &str| format!("{prefix}.{name}");
    if sc.k == 0 {
        return Err(bad(f("k"), "Sobolev order must be >= 1"));
    }
    let lib = |field: String| move |e: hetero_oracle::Error| bad(field.clone(), e.to_string());
    let amplitude = sc.amplitude.unwrap_or(1.0);
    let signal = match sc.signal.as_str() {
        "sine" => SignalSpec::sine(amplitude, sc.k),
        "trig_mix" => SignalSpec::trig_mix(sc.k),
        "slow_decay" => SignalSpec::slow_decay(amplitude, sc.k, 10_000),
        "zero" => SignalSpec::zero(sc.k),
        "constant" => SignalSpec::constant(amplitude, sc.k),
        "basis" => {
            let j = sc
                .index
                .ok_or_else(|| bad(f("index"), "required for signal = \"basis\""))?;
            SignalSpec::basis_function(j, sc.k)
        }
        "trig_polynomial" => {
            let c = sc
                .coeffs
                .clone()
                .ok_or_else(|| bad(f("coeffs"), "required for signal = \"trig_polynomial\""))?;
            SignalSpec::trig_polynomial(sc.name.clone(), c, sc.k)
        }
        other => return Err(bad(f("signal"), format!("unknown signal `{other}`"))),
    }
    .map_err(lib(f("signal")))?;
    let volatility = match sc.volatility.as_str() {
        "budget" => VolatilityKind::budget(sc.c0.unwrap_or(1.0), sc.c1.unwrap_or(1.0), sc.c2.unwrap_or(1.0))
            .map_err(lib(f("c0")))?,
        "constant" => VolatilityKind::constant(positive(sc.sigma_sq.unwrap_or(1.0), &f("sigma_sq"))?)
            .map_err(lib(f("sigma_sq")))?,
        other => return Err(bad(f("volatility"), format!("unknown volatility `{other}`"))),
    };
    let noise = match sc.noise.as_str() {
        "gaussian" => NoiseSpec::Gaussian,
        "rademacher" => NoiseSpec::Rademacher,
        "uniform_centered" => NoiseSpec::UniformCentered,
        "silent" => NoiseSpec::Silent,
        other => return Err(bad(f("noise"), format!("unknown noise `{other}`"))),
    };
    if let Some(rho) = sc.rho {
        if !(rho > 0.0 && rho < 1.0 / 3.0) {
            return Err(bad(f("rho"), format!("{rho} is outside (0, 1/3)")));
        }
    }
    if let Some(eps) = sc.epsilon {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(bad(f("epsilon"), format!("{eps} is outside (0, 1]")));
        }
    }
    if sc.k_star == Some(0) {
        return Err(bad(f("k_star"), "must be >= 1"));
    }
    if let Some(m) = sc.m_n {
        if m == 0 {
            return Err(bad(f("m_n"), "must be >= 1"));
        }
    }
    if let Some(s) = sc.sigma_star {
        if s.is_nan() || s < 1.0 {
            return Err(bad(f("sigma_star"), format!("{s} is below 1")));
        }
    }
    let mut scenario = Scenario::new(sc.name.clone(), signal, volatility, noise, n);
    scenario.sigma_star = sc.sigma_star;
    scenario.estimator = EstimatorConfig {
        rho: sc.rho,
        sieve: SieveOverrides {
            epsilon: sc.epsilon,
            k_star: sc.k_star,
        },
        m_n: sc.m_n,
        variance: VarianceMode::Estimated,
    };
    Ok(scenario)
}
