//! TOML run configuration.
//!
//! ```toml
//! model = "quantum"            # quantum | eps_classical | pendulum | beta_spread
//! seed = 0
//!
//! [params]
//! phi_d = 2.6
//! kicks = 10
//! l = 1                        # default 1
//! eps = 0.05                   # or offset_us = 0.4 (pulse-period offset in μs)
//! half_talbot_us = 51.5        # only used with offset_us
//! beta = 0.5                   # default 0.5
//! gamma = -1.5707963267948966  # default -π/2
//!
//! [sweep]                      # needed by `ratchet sweep`
//! axis = "eps"                 # eps | t | phi_d | offset_us
//! from = 0.01
//! to = 0.2
//! step = 0.01                  # or: values = [0.01, 0.05, 0.1]
//!
//! [spread]                     # needed by beta_spread
//! delta_beta = 0.02
//! n_beta = 32
//!
//! [numerics]
//! basis = 128
//! n_points = 8192
//! mode = "deterministic"       # or "sampled" (uses seed)
//! n_theta = 4096
//! ```

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ratchet_core::beta_spread::{BetaSpreadParams, DEFAULT_BETA_NODES};
use ratchet_core::eps_classical::{EnsembleMode, DEFAULT_POINTS, MIN_POINTS};
use ratchet_core::params::{eps_from_offset, RatchetParams, DEFAULT_HALF_TALBOT_US, RESONANT_BETA};
use ratchet_core::pendulum::{DEFAULT_THETA_NODES, MIN_THETA_NODES};
use ratchet_core::quantum::{DEFAULT_BASIS, MAX_BASIS, MIN_BASIS};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Grids longer than this are almost certainly a typo in `step`.
pub const MAX_SWEEP_POINTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Quantum,
    EpsClassical,
    Pendulum,
    BetaSpread,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::Quantum => "quantum",
            Model::EpsClassical => "eps_classical",
            Model::Pendulum => "pendulum",
            Model::BetaSpread => "beta_spread",
        }
    }
}

impl FromStr for Model {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantum" => Ok(Model::Quantum),
            "eps_classical" => Ok(Model::EpsClassical),
            "pendulum" => Ok(Model::Pendulum),
            "beta_spread" => Ok(Model::BetaSpread),
            other => Err(CliError::config(
                "model",
                format!("unknown model `{other}`; expected quantum, eps_classical, pendulum or beta_spread"),
            )),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Eps,
    T,
    PhiD,
    OffsetUs,
}

impl Axis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Axis::Eps => "eps",
            Axis::T => "t",
            Axis::PhiD => "phi_d",
            Axis::OffsetUs => "offset_us",
        }
    }
}

impl FromStr for Axis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eps" => Ok(Axis::Eps),
            "t" => Ok(Axis::T),
            "phi_d" => Ok(Axis::PhiD),
            "offset_us" => Ok(Axis::OffsetUs),
            other => Err(CliError::config(
                "sweep.axis",
                format!("unknown axis `{other}`; expected eps, t, phi_d or offset_us"),
            )),
        }
    }
}

/// The file as written. Every field is optional here; `resolve` fills
/// defaults and checks what each model needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: ParamsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spread: Option<SpreadSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numerics: Option<NumericsSection>,
    /// Written into metadata records; ignored on input so a record can be
    /// fed straight back as a config.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<RunInfo>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset_us: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_talbot_us: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kicks: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpreadSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_beta: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_theta: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub command: String,
    pub version: String,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            let field = unknown_field(&msg).unwrap_or_else(|| "config".to_string());
            CliError::config(field, e.to_string().trim_end().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }
}

/// serde reports unknown keys as "unknown field `name`, expected ...".
fn unknown_field(msg: &str) -> Option<String> {
    let rest = msg.strip_prefix("unknown field `")?;
    Some(rest.split('`').next()?.to_string())
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub model: Option<String>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: Model,
    pub seed: u64,
    pub params: RatchetParams,
    pub offset_us: Option<f64>,
    pub half_talbot_us: f64,
    pub delta_beta: f64,
    pub n_beta: usize,
    pub basis: usize,
    pub n_points: usize,
    pub mode: EnsembleMode,
    pub n_theta: usize,
    pub sweep: Option<SweepSpec>,
    /// Normalised file with every default filled in.
    pub normalized: ConfigFile,
}

fn required<T>(value: Option<T>, field: &str) -> Result<T> {
    value.ok_or_else(|| CliError::config(field, "missing"))
}

impl RunConfig {
    pub fn resolve(mut file: ConfigFile, overrides: &Overrides) -> Result<Self> {
        if let Some(m) = &overrides.model {
            file.model = Some(m.clone());
        }
        if let Some(s) = overrides.seed {
            file.seed = Some(s);
        }
        file.run = None;

        let model: Model = required(file.model.clone(), "model")?.parse()?;
        let seed = file.seed.unwrap_or(0);
        file.seed = Some(seed);

        let p = &mut file.params;
        let phi_d = required(p.phi_d, "params.phi_d")?;
        let kicks = required(p.kicks, "params.kicks")?;
        let l = *p.l.get_or_insert(1);
        let beta = *p.beta.get_or_insert(RESONANT_BETA);
        let gamma = *p.gamma.get_or_insert(-FRAC_PI_2);
        let half_talbot_us = p.half_talbot_us.unwrap_or(DEFAULT_HALF_TALBOT_US);
        let eps = match (p.eps, p.offset_us) {
            (Some(_), Some(_)) => {
                return Err(CliError::config(
                    "params.offset_us",
                    "set either params.eps or params.offset_us, not both",
                ))
            }
            (Some(e), None) => e,
            (None, Some(off)) => {
                p.half_talbot_us = Some(half_talbot_us);
                eps_from_offset(off, l, half_talbot_us)
                    .map_err(|e| CliError::from_input("params", e))?
            }
            (None, None) => *p.eps.get_or_insert(0.0),
        };
        let offset_us = p.offset_us;
        let params = RatchetParams::new(phi_d, l, eps, beta, gamma, kicks)
            .map_err(|e| CliError::from_input("params", e))?;

        let spread = file.spread.get_or_insert_with(Default::default);
        let delta_beta = match (model, spread.delta_beta) {
            (_, Some(d)) => d,
            (Model::BetaSpread, None) => {
                return Err(CliError::config("spread.delta_beta", "missing"))
            }
            (_, None) => 0.0,
        };
        spread.delta_beta = Some(delta_beta);
        let n_beta = *spread.n_beta.get_or_insert(DEFAULT_BETA_NODES);
        BetaSpreadParams::new(params, delta_beta, n_beta)
            .map_err(|e| CliError::from_input("spread", e))?;

        let num = file.numerics.get_or_insert_with(Default::default);
        let basis = *num.basis.get_or_insert(DEFAULT_BASIS);
        if !(MIN_BASIS..=MAX_BASIS).contains(&basis) {
            return Err(CliError::config(
                "numerics.basis",
                format!("must lie in [{MIN_BASIS}, {MAX_BASIS}], got {basis}"),
            ));
        }
        let n_points = *num.n_points.get_or_insert(DEFAULT_POINTS);
        if n_points < MIN_POINTS {
            return Err(CliError::config(
                "numerics.n_points",
                format!("need at least {MIN_POINTS}, got {n_points}"),
            ));
        }
        let mode: EnsembleMode = num
            .mode
            .get_or_insert_with(|| EnsembleMode::Deterministic.as_str().to_string())
            .parse()
            .map_err(|e| CliError::from_input("numerics", e))?;
        let n_theta = *num.n_theta.get_or_insert(DEFAULT_THETA_NODES);
        if n_theta < MIN_THETA_NODES {
            return Err(CliError::config(
                "numerics.n_theta",
                format!("need at least {MIN_THETA_NODES}, got {n_theta}"),
            ));
        }

        let mut cfg = RunConfig {
            model,
            seed,
            params,
            offset_us,
            half_talbot_us,
            delta_beta,
            n_beta,
            basis,
            n_points,
            mode,
            n_theta,
            sweep: None,
            normalized: ConfigFile::default(),
        };
        if let Some(section) = &file.sweep {
            let spec = sweep_spec(section)?;
            for &v in &spec.values {
                cfg.params_at(spec.axis, v)?;
            }
            cfg.sweep = Some(spec);
        }
        cfg.normalized = file;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        Self::resolve(ConfigFile::load(path)?, overrides)
    }

    /// Parameters of one sweep point.
    pub fn params_at(&self, axis: Axis, value: f64) -> Result<RatchetParams> {
        let p = self.params;
        let field = |e| CliError::from_input("sweep", e);
        match axis {
            Axis::Eps => p.with_eps(value).map_err(field),
            Axis::PhiD => p.with_phi_d(value).map_err(field),
            Axis::T => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(CliError::config(
                        "sweep.values",
                        format!("kick counts must be positive integers, got {value}"),
                    ));
                }
                p.with_kicks(value as usize).map_err(field)
            }
            Axis::OffsetUs => {
                let eps = eps_from_offset(value, p.l(), self.half_talbot_us).map_err(field)?;
                p.with_eps(eps).map_err(field)
            }
        }
    }

    /// `key=value` pairs for CSV headers; enough to rebuild the run.
    pub fn meta_pairs(&self, command: &str) -> Vec<(String, String)> {
        use crate::table::num;
        let p = &self.params;
        let mut out = vec![
            ("command".to_string(), command.to_string()),
            ("model".to_string(), self.model.to_string()),
            ("seed".to_string(), self.seed.to_string()),
            ("phi_d".to_string(), num(p.phi_d())),
            ("l".to_string(), p.l().to_string()),
            ("eps".to_string(), num(p.eps())),
        ];
        if let Some(off) = self.offset_us {
            out.push(("offset_us".to_string(), num(off)));
            out.push(("half_talbot_us".to_string(), num(self.half_talbot_us)));
        }
        out.extend([
            ("tau".to_string(), num(p.tau())),
            ("beta".to_string(), num(p.beta())),
            ("gamma".to_string(), num(p.gamma())),
            ("kicks".to_string(), p.kicks().to_string()),
            ("delta_beta".to_string(), num(self.delta_beta)),
            ("n_beta".to_string(), self.n_beta.to_string()),
            ("basis".to_string(), self.basis.to_string()),
            ("n_points".to_string(), self.n_points.to_string()),
            ("mode".to_string(), self.mode.as_str().to_string()),
            ("n_theta".to_string(), self.n_theta.to_string()),
        ]);
        if let Some(s) = &self.sweep {
            out.push(("sweep_axis".to_string(), s.axis.as_str().to_string()));
            let vals: Vec<String> = s.values.iter().map(|v| num(*v)).collect();
            out.push(("sweep_values".to_string(), vals.join(" ")));
        }
        out
    }

    /// The normalised config plus a `[run]` table; loadable as a config.
    pub fn metadata_record(&self, command: &str) -> String {
        let mut file = self.normalized.clone();
        file.run = Some(RunInfo {
            command: command.to_string(),
            version: crate::VERSION.to_string(),
        });
        toml::to_string(&file).expect("config structs always serialise")
    }
}

fn sweep_spec(s: &SweepSection) -> Result<SweepSpec> {
    let axis: Axis = required(s.axis.clone(), "sweep.axis")?.parse()?;
    let values = match (&s.values, s.from, s.to, s.step) {
        (Some(_), Some(_), _, _) | (Some(_), _, Some(_), _) | (Some(_), _, _, Some(_)) => {
            return Err(CliError::config(
                "sweep.values",
                "give either values or from/to/step, not both",
            ))
        }
        (Some(v), None, None, None) => v.clone(),
        (None, from, to, step) => {
            let from = required(from, "sweep.from")?;
            let to = required(to, "sweep.to")?;
            let step = required(step, "sweep.step")?;
            linear_grid(from, to, step)?
        }
    };
    if values.is_empty() {
        return Err(CliError::config("sweep.values", "empty grid"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::config(
            "sweep.values",
            "grid values must be finite",
        ));
    }
    let up = values.windows(2).all(|w| w[1] > w[0]);
    let down = values.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) {
        return Err(CliError::config(
            "sweep.values",
            "grid must be strictly monotone",
        ));
    }
    Ok(SweepSpec { axis, values })
}

/// `from, from+step, ...` up to `to` inclusive (with a little slack for
/// rounding); values are rounded to 12 decimals so `0.1 + 2·0.1` prints as 0.3.
pub fn linear_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(from.is_finite() && to.is_finite() && step.is_finite()) || step == 0.0 {
        return Err(CliError::config(
            "sweep.step",
            "from/to/step must be finite with step ≠ 0",
        ));
    }
    let span = (to - from) / step;
    if span < -1e-9 {
        return Err(CliError::config(
            "sweep.step",
            format!("step {step} does not lead from {from} to {to}"),
        ));
    }
    let n = (span + 1e-9).floor() as usize + 1;
    if n > MAX_SWEEP_POINTS {
        return Err(CliError::config(
            "sweep.step",
            format!("grid has {n} points, more than {MAX_SWEEP_POINTS}"),
        ));
    }
    Ok((0..n)
        .map(|i| {
            let v = from + i as f64 * step;
            (v * 1e12).round() / 1e12
        })
        .collect())
}
