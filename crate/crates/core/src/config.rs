//! Experiment configuration files.
//!
//! A config is TOML with flat keys. Keys may sit at top level or inside the
//! sections `[system]`, `[bath]`, `[init]` and `[run]`; sections only group
//! keys and do not change their meaning. Angles are radians.
//!
//! ```toml
//! bath = "markovian"      # stationary | drifting | microcanonical | markovian | toral | cat
//! sigma = 0.01
//! n_spins = 1000
//! n_kicks = 256
//!
//! [system]
//! omega_ratio = 0.25
//! vartheta = 0.785398
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::Serialize;
use toml::{Table, Value};

use crate::baths::{Alignment, BathSpec, InitialDistribution};
use crate::engine::SimulationConfig;
use crate::error::{Error, Result};
use crate::quantum::{SpinState, SystemParams};

const SECTIONS: [&str; 4] = ["system", "bath", "init", "run"];

const KEYS: [&str; 18] = [
    "omega_ratio",
    "vartheta",
    "psi0_up",
    "psi0_down",
    "bath",
    "drift_a",
    "drift_b",
    "sigma",
    "x",
    "sign",
    "lambda_star",
    "phi_star",
    "d0",
    "alignment",
    "n_spins",
    "n_kicks",
    "seed",
    "record_entropies",
];

/// Flattened key/value view of a config document.
struct Doc {
    values: BTreeMap<String, Value>,
}

impl Doc {
    fn parse(text: &str) -> Result<Self> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::ConfigSyntax(e.to_string()))?;
        let mut values = BTreeMap::new();
        let mut insert = |key: &str, value: Value| -> Result<()> {
            if !KEYS.contains(&key) {
                return Err(Error::config(key, "unknown key"));
            }
            if values.insert(key.to_string(), value).is_some() {
                return Err(Error::config(key, "given more than once"));
            }
            Ok(())
        };
        for (key, value) in table {
            match value {
                Value::Table(inner) if SECTIONS.contains(&key.as_str()) => {
                    for (k, v) in inner {
                        insert(&k, v)?;
                    }
                }
                Value::Table(_) => return Err(Error::config(key, "unknown section")),
                other => insert(&key, other)?,
            }
        }
        Ok(Doc { values })
    }

    fn take(&mut self, key: &str) -> Option<Value> {
        self.values.remove(key)
    }

    fn float(&mut self, key: &str) -> Result<Option<f64>> {
        self.take(key).map(|v| as_float(key, &v)).transpose()
    }

    fn float_or(&mut self, key: &str, default: f64) -> Result<f64> {
        Ok(self.float(key)?.unwrap_or(default))
    }

    fn required_float(&mut self, key: &str, bath: &str) -> Result<f64> {
        self.float(key)?
            .ok_or_else(|| Error::config(key, format!("required for bath = \"{bath}\"")))
    }

    fn count(&mut self, key: &str) -> Result<Option<u64>> {
        self.take(key)
            .map(|v| match v {
                Value::Integer(i) if i >= 0 => Ok(i as u64),
                Value::Integer(_) => Err(Error::config(key, "must be non-negative")),
                Value::String(s) => s
                    .parse::<u64>()
                    .map_err(|_| Error::config(key, "expected a non-negative integer")),
                other => Err(Error::config(key, format!("expected an integer, found {}", other.type_str()))),
            })
            .transpose()
    }

    fn required_count(&mut self, key: &str) -> Result<u64> {
        self.count(key)?.ok_or_else(|| Error::config(key, "missing required key"))
    }

    fn string(&mut self, key: &str) -> Result<Option<String>> {
        self.take(key)
            .map(|v| match v {
                Value::String(s) => Ok(s),
                other => Err(Error::config(key, format!("expected a string, found {}", other.type_str()))),
            })
            .transpose()
    }

    fn boolean(&mut self, key: &str) -> Result<Option<bool>> {
        self.take(key)
            .map(|v| match v {
                Value::Boolean(b) => Ok(b),
                other => Err(Error::config(key, format!("expected true or false, found {}", other.type_str()))),
            })
            .transpose()
    }

    fn amplitude(&mut self, key: &str) -> Result<Option<C64>> {
        self.take(key)
            .map(|v| match &v {
                Value::Array(parts) if parts.len() == 2 => {
                    Ok(C64::new(as_float(key, &parts[0])?, as_float(key, &parts[1])?))
                }
                Value::Array(_) => Err(Error::config(key, "expected [re, im]")),
                other => Ok(C64::new(as_float(key, other)?, 0.0)),
            })
            .transpose()
    }

    fn reject_leftovers(&self, bath: &str) -> Result<()> {
        match self.values.keys().next() {
            Some(key) => Err(Error::config(
                key.as_str(),
                format!("not used by bath = \"{bath}\""),
            )),
            None => Ok(()),
        }
    }
}

fn as_float(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        other => Err(Error::config(key, format!("expected a number, found {}", other.type_str()))),
    }
}

/// Parses and validates a config document, applying defaults.
pub fn parse_config(text: &str) -> Result<SimulationConfig> {
    let mut doc = Doc::parse(text)?;
    let defaults = SimulationConfig::default();

    let bath_name = doc
        .string("bath")?
        .ok_or_else(|| Error::config("bath", "missing required key"))?;
    let bath = match bath_name.as_str() {
        "stationary" => BathSpec::Stationary,
        "drifting" => BathSpec::Drifting {
            a: doc.float_or("drift_a", BathSpec::DRIFT_A)?,
            b: doc.float_or("drift_b", BathSpec::DRIFT_B)?,
        },
        "microcanonical" => BathSpec::Microcanonical,
        "markovian" => BathSpec::Markovian {
            sigma: doc.required_float("sigma", &bath_name)?,
        },
        "toral" => {
            let x = doc.required_float("x", &bath_name)?;
            let sign = match doc.take("sign") {
                None => 1,
                Some(Value::Integer(1)) => 1,
                Some(Value::Integer(-1)) => -1,
                Some(_) => return Err(Error::config("sign", "must be 1 or -1")),
            };
            BathSpec::ToralAutomorphism { x, sign }
        }
        "cat" => BathSpec::cat(),
        other => {
            return Err(Error::config(
                "bath",
                format!("unknown bath \"{other}\" (expected stationary, drifting, microcanonical, markovian, toral or cat)"),
            ))
        }
    };

    let psi0 = match (doc.amplitude("psi0_up")?, doc.amplitude("psi0_down")?) {
        (None, None) => defaults.params.psi0,
        (Some(up), Some(down)) => {
            SpinState::new(up, down).map_err(|_| Error::config("psi0_up", "psi0 is not normalized"))?
        }
        (Some(_), None) => return Err(Error::config("psi0_down", "required when psi0_up is given")),
        (None, Some(_)) => return Err(Error::config("psi0_up", "required when psi0_down is given")),
    };
    let params = SystemParams {
        omega_ratio: doc.float_or("omega_ratio", defaults.params.omega_ratio)?,
        vartheta: doc.float_or("vartheta", defaults.params.vartheta)?,
        psi0,
    };

    let alignment = match doc.string("alignment")?.as_deref() {
        None | Some("axis") => Alignment::AxisAligned,
        Some("eigen") => Alignment::EigenAligned,
        Some(other) => {
            return Err(Error::config("alignment", format!("unknown alignment \"{other}\" (expected axis or eigen)")))
        }
    };
    let init = InitialDistribution {
        lambda_star: doc.float_or("lambda_star", defaults.init.lambda_star)?,
        phi_star: doc.float_or("phi_star", defaults.init.phi_star)?,
        d0: doc.float_or("d0", defaults.init.d0)?,
        alignment,
    };

    let n_spins = doc.required_count("n_spins")? as usize;
    let n_kicks = doc.required_count("n_kicks")? as usize;
    let seed = doc.count("seed")?.unwrap_or(defaults.seed);
    let record_entropies = doc.boolean("record_entropies")?.unwrap_or(defaults.record_entropies);
    doc.reject_leftovers(&bath_name)?;

    let cfg = SimulationConfig {
        params,
        bath,
        init,
        n_spins,
        n_kicks,
        seed,
        record_entropies,
    };
    cfg.validate().map_err(|e| match e {
        Error::InvalidParameter { name, reason } => Error::config(name, reason),
        other => other,
    })?;
    Ok(cfg)
}

pub fn read_config(path: &Path) -> Result<SimulationConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        context: format!("reading {}", path.display()),
        source,
    })?;
    parse_config(&text)
}

/// Every config key with its effective value, in a fixed order; rendering
/// this back to TOML reproduces the run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub bath: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<i8>,
    pub omega_ratio: f64,
    pub vartheta: f64,
    pub psi0_up: [f64; 2],
    pub psi0_down: [f64; 2],
    pub lambda_star: f64,
    pub phi_star: f64,
    pub d0: f64,
    pub alignment: String,
    pub n_spins: usize,
    pub n_kicks: usize,
    pub seed: u64,
    pub record_entropies: bool,
}

impl From<&SimulationConfig> for ConfigEcho {
    fn from(cfg: &SimulationConfig) -> Self {
        let (mut drift_a, mut drift_b, mut sigma, mut x, mut sign) = (None, None, None, None, None);
        match cfg.bath {
            BathSpec::Drifting { a, b } => {
                drift_a = Some(a);
                drift_b = Some(b);
            }
            BathSpec::Markovian { sigma: s } => sigma = Some(s),
            BathSpec::ToralAutomorphism { x: xv, sign: s } => {
                x = Some(xv);
                sign = Some(s);
            }
            BathSpec::Stationary | BathSpec::Microcanonical => {}
        }
        let psi = cfg.params.psi0;
        ConfigEcho {
            bath: cfg.bath.name().to_string(),
            drift_a,
            drift_b,
            sigma,
            x,
            sign,
            omega_ratio: cfg.params.omega_ratio,
            vartheta: cfg.params.vartheta,
            psi0_up: [psi.up.re, psi.up.im],
            psi0_down: [psi.down.re, psi.down.im],
            lambda_star: cfg.init.lambda_star,
            phi_star: cfg.init.phi_star,
            d0: cfg.init.d0,
            alignment: match cfg.init.alignment {
                Alignment::AxisAligned => "axis".into(),
                Alignment::EigenAligned => "eigen".into(),
            },
            n_spins: cfg.n_spins,
            n_kicks: cfg.n_kicks,
            seed: cfg.seed,
            record_entropies: cfg.record_entropies,
        }
    }
}

impl ConfigEcho {
    /// Config document that parses back to the same [`SimulationConfig`].
    pub fn to_config_text(&self) -> String {
        let mut out = format!("bath = \"{}\"\n", self.bath);
        let mut num = |k: &str, v: Option<f64>| {
            if let Some(v) = v {
                out.push_str(&format!("{k} = {}\n", toml_float(v)));
            }
        };
        num("drift_a", self.drift_a);
        num("drift_b", self.drift_b);
        num("sigma", self.sigma);
        num("x", self.x);
        if let Some(s) = self.sign {
            out.push_str(&format!("sign = {s}\n"));
        }
        let f = toml_float;
        out.push_str(&format!(
            "omega_ratio = {}\nvartheta = {}\npsi0_up = [{}, {}]\npsi0_down = [{}, {}]\n",
            f(self.omega_ratio),
            f(self.vartheta),
            f(self.psi0_up[0]),
            f(self.psi0_up[1]),
            f(self.psi0_down[0]),
            f(self.psi0_down[1]),
        ));
        out.push_str(&format!(
            "lambda_star = {}\nphi_star = {}\nd0 = {}\nalignment = \"{}\"\n",
            f(self.lambda_star),
            f(self.phi_star),
            f(self.d0),
            self.alignment
        ));
        out.push_str(&format!(
            "n_spins = {}\nn_kicks = {}\nseed = \"{}\"\nrecord_entropies = {}\n",
            self.n_spins, self.n_kicks, self.seed, self.record_entropies
        ));
        out
    }
}

fn toml_float(v: f64) -> String {
    // `{:?}` keeps a decimal point or exponent, as TOML floats require
    format!("{v:?}")
}
