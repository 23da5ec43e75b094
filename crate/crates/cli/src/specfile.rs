//! Flat key-value spec and config files.
//!
//! One `key = value` per line. Blank lines and `#` comments are ignored.
//! Angles accept plain numbers or multiples of pi such as `-pi/3` or
//! `3*pi/8`.
//!
//! Signal spec keys:
//!
//! | key           | used by            | meaning                          |
//! |---------------|--------------------|----------------------------------|
//! | `kind`        | all                | `tone`, `noise` or `tone+noise`  |
//! | `a`           | tone               | amplitude (default 1)            |
//! | `theta`       | tone, noise        | orientation; for `tone+noise` the tone's |
//! | `chi`         | tone               | ellipticity (default 0)          |
//! | `nu0`         | tone               | frequency in cycles per sample   |
//! | `s0`          | noise              | per-sample noise power           |
//! | `phi`         | noise              | degree of polarization           |
//! | `noise_theta` | tone+noise         | orientation of the noise         |
//! | `seed`        | noise              | master seed (CLI flag overrides) |
//! | `n`           | all                | length (CLI flag overrides)      |

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8, PI};
use std::path::Path;

use bispec_core::model::gen_white_noise_with;
use bispec_core::{gen_monochromatic, rng, BiasStudyConfig, BivariateSignal, MonochromaticSpec, WhiteNoiseSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Parsed `key = value` pairs with the line each came from.
#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    entries: BTreeMap<String, (usize, String)>,
}

impl KeyValues {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::invalid(format!("line {line_no}: expected `key = value`, got `{line}`")))?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(CliError::invalid(format!("line {line_no}: empty key")));
            }
            if entries.insert(key.clone(), (line_no, value.trim().to_string())).is_some() {
                return Err(CliError::invalid(format!("line {line_no}: duplicate key `{key}`")));
            }
        }
        Ok(Self { entries })
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Rejects keys outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> CliResult<()> {
        match self.entries.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            Some((k, (line, _))) => Err(CliError::invalid(format!(
                "line {line}: unknown key `{k}` (expected one of: {})",
                allowed.join(", ")
            ))),
            None => Ok(()),
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    fn parsed<T>(&self, key: &str, parse: impl FnOnce(&str) -> Option<T>) -> CliResult<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => parse(v)
                .map(Some)
                .ok_or_else(|| CliError::invalid(format!("line {line}: key `{key}`: cannot parse `{v}`"))),
        }
    }

    pub fn f64(&self, key: &str) -> CliResult<Option<f64>> {
        self.parsed(key, |v| v.parse::<f64>().ok().filter(|x| x.is_finite()))
    }

    pub fn angle(&self, key: &str) -> CliResult<Option<f64>> {
        self.parsed(key, parse_angle)
    }

    pub fn u64(&self, key: &str) -> CliResult<Option<u64>> {
        self.parsed(key, |v| v.parse().ok())
    }

    pub fn usize(&self, key: &str) -> CliResult<Option<usize>> {
        self.parsed(key, |v| v.parse().ok())
    }

    pub fn f64_list(&self, key: &str) -> CliResult<Option<Vec<f64>>> {
        self.parsed(key, |v| v.split(',').map(|s| s.trim().parse::<f64>().ok()).collect())
    }

    pub fn usize_list(&self, key: &str) -> CliResult<Option<Vec<usize>>> {
        self.parsed(key, |v| v.split(',').map(|s| s.trim().parse::<usize>().ok()).collect())
    }

    pub fn require<T>(&self, key: &str, value: Option<T>) -> CliResult<T> {
        value.ok_or_else(|| CliError::invalid(format!("missing required key `{key}`")))
    }
}

/// Plain numbers, or `[±][c*]pi[/d]`.
///
/// `pi/d` for d in {1, 2, 3, 4, 6, 8} returns the correctly rounded
/// constant rather than `PI / d`, which is off by one ulp for 3 and 6.
pub fn parse_angle(text: &str) -> Option<f64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Ok(x) = s.parse::<f64>() {
        return x.is_finite().then_some(x);
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s.strip_prefix('+').unwrap_or(&s)),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d.parse::<f64>().ok().filter(|d| *d != 0.0 && d.is_finite())?)),
        None => (body, None),
    };
    let coef = match num {
        "pi" => None,
        _ => Some(num.strip_suffix("*pi")?.parse::<f64>().ok().filter(|c| c.is_finite())?),
    };
    let value = match (coef, den) {
        (None, None) => PI,
        (None, Some(d)) => match d {
            1.0 => PI,
            2.0 => FRAC_PI_2,
            3.0 => FRAC_PI_3,
            4.0 => FRAC_PI_4,
            6.0 => FRAC_PI_6,
            8.0 => FRAC_PI_8,
            _ => PI / d,
        },
        (Some(c), None) => c * PI,
        (Some(c), Some(d)) => c * PI / d,
    };
    Some(sign * value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SignalSpec {
    Tone {
        a: f64,
        theta: f64,
        chi: f64,
        nu0: f64,
    },
    Noise {
        s0: f64,
        phi: f64,
        theta: f64,
    },
    #[serde(rename = "tone+noise")]
    TonePlusNoise {
        a: f64,
        theta: f64,
        chi: f64,
        nu0: f64,
        s0: f64,
        phi: f64,
        noise_theta: f64,
    },
}

/// A signal spec file: the signal plus optional `n` and `seed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalFile {
    pub spec: SignalSpec,
    pub n: Option<usize>,
    pub seed: Option<u64>,
}

const SIGNAL_KEYS: [&str; 10] = ["kind", "a", "theta", "chi", "nu0", "s0", "phi", "seed", "n", "noise_theta"];

impl SignalFile {
    pub fn from_kv(kv: &KeyValues) -> CliResult<Self> {
        kv.check_keys(&SIGNAL_KEYS)?;
        let kind = kv.require("kind", kv.raw("kind"))?;
        let tone = |kv: &KeyValues| -> CliResult<(f64, f64, f64, f64)> {
            Ok((
                kv.f64("a")?.unwrap_or(1.0),
                kv.angle("theta")?.unwrap_or(0.0),
                kv.angle("chi")?.unwrap_or(0.0),
                kv.require("nu0", kv.f64("nu0")?)?,
            ))
        };
        let noise = |kv: &KeyValues| -> CliResult<(f64, f64)> {
            Ok((kv.require("s0", kv.f64("s0")?)?, kv.require("phi", kv.f64("phi")?)?))
        };
        let forbid = |keys: &[&str]| -> CliResult<()> {
            match keys.iter().find(|k| kv.raw(k).is_some()) {
                Some(k) => Err(CliError::invalid(format!("key `{k}` does not apply to kind `{kind}`"))),
                None => Ok(()),
            }
        };
        let spec = match kind {
            "tone" => {
                forbid(&["s0", "phi", "noise_theta"])?;
                let (a, theta, chi, nu0) = tone(kv)?;
                SignalSpec::Tone { a, theta, chi, nu0 }
            }
            "noise" => {
                forbid(&["a", "chi", "nu0", "noise_theta"])?;
                let (s0, phi) = noise(kv)?;
                SignalSpec::Noise { s0, phi, theta: kv.angle("theta")?.unwrap_or(0.0) }
            }
            "tone+noise" => {
                let (a, theta, chi, nu0) = tone(kv)?;
                let (s0, phi) = noise(kv)?;
                SignalSpec::TonePlusNoise {
                    a,
                    theta,
                    chi,
                    nu0,
                    s0,
                    phi,
                    noise_theta: kv.angle("noise_theta")?.unwrap_or(0.0),
                }
            }
            other => {
                return Err(CliError::invalid(format!(
                    "key `kind`: unknown kind `{other}` (expected tone, noise or tone+noise)"
                )))
            }
        };
        spec.validate()?;
        Ok(Self { spec, n: kv.usize("n")?, seed: kv.u64("seed")? })
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        Self::from_kv(&KeyValues::read(path)?).map_err(|e| match e {
            CliError::Validation(m) if !m.starts_with(&path.display().to_string()) => {
                CliError::Validation(format!("{}: {m}", path.display()))
            }
            other => other,
        })
    }
}

impl SignalSpec {
    fn tone(&self) -> Option<MonochromaticSpec> {
        match *self {
            SignalSpec::Tone { a, theta, chi, nu0 } | SignalSpec::TonePlusNoise { a, theta, chi, nu0, .. } => {
                Some(MonochromaticSpec { amplitude: a, theta, chi, nu0 })
            }
            SignalSpec::Noise { .. } => None,
        }
    }

    fn noise(&self, seed: u64) -> Option<WhiteNoiseSpec> {
        match *self {
            SignalSpec::Noise { s0, phi, theta } => Some(WhiteNoiseSpec { s0, phi, theta, seed }),
            SignalSpec::TonePlusNoise { s0, phi, noise_theta, .. } => {
                Some(WhiteNoiseSpec { s0, phi, theta: noise_theta, seed })
            }
            SignalSpec::Tone { .. } => None,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if let Some(t) = self.tone() {
            t.validate()?;
        }
        if let Some(w) = self.noise(0) {
            w.validate().map_err(|e| match (self, e) {
                // the noise orientation has its own key when a tone is present
                (SignalSpec::TonePlusNoise { .. }, bispec_core::Error::InvalidParameter { name: "theta", reason }) => {
                    CliError::invalid(format!("invalid parameter `noise_theta`: {reason}"))
                }
                (_, e) => e.into(),
            })?;
        }
        Ok(())
    }

    /// Noise for replicate `r` is drawn from `rng::cell_stream(seed, 0, r)`,
    /// the same stream the in-library tone-plus-noise experiment uses.
    pub fn generate(&self, n: usize, seed: u64, replicate: u32) -> CliResult<BivariateSignal> {
        self.validate()?;
        let tone = self.tone().map(|t| gen_monochromatic(&t, n)).transpose()?;
        let noise = self
            .noise(seed)
            .map(|w| gen_white_noise_with(&w, n, &mut rng::cell_stream(seed, 0, replicate)))
            .transpose()?;
        Ok(match (tone, noise) {
            (Some(t), Some(w)) => t.add(&w)?,
            (Some(t), None) => t,
            (None, Some(w)) => w,
            (None, None) => unreachable!("every kind has a tone or a noise part"),
        })
    }
}

const BIAS_KEYS: [&str; 6] = ["phi_grid", "m_values", "n", "replicates", "seed", "theta"];

/// Bias-study config file. Missing keys take the library defaults; lists
/// are comma separated.
pub fn bias_config_from_kv(kv: &KeyValues) -> CliResult<BiasStudyConfig> {
    kv.check_keys(&BIAS_KEYS)?;
    let d = BiasStudyConfig::default();
    let cfg = BiasStudyConfig {
        phi_grid: kv.f64_list("phi_grid")?.unwrap_or(d.phi_grid),
        m_values: kv.usize_list("m_values")?.unwrap_or(d.m_values),
        n: kv.usize("n")?.unwrap_or(d.n),
        replicates: kv.usize("replicates")?.unwrap_or(d.replicates),
        seed: kv.u64("seed")?.unwrap_or(d.seed),
        theta: kv.angle("theta")?.unwrap_or(d.theta),
    };
    cfg.validate()?;
    Ok(cfg)
}
