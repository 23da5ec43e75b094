//! Resolved command parameters and their execution.

use std::path::{Path, PathBuf};

use bispec_core::polar::StokesSpectrum;
use bispec_core::slepian::{DEFAULT_K, DEFAULT_NW};
use bispec_core::study::Section5Config;
use bispec_core::{
    multitaper_estimate, polarization_periodogram, run_bias_study, run_section5_experiment, slepian_tapers,
    BiasStudyConfig, Quaternion, TaperSet,
};
use serde::{Deserialize, Serialize};

use crate::args::{AverageArgs, BiasStudyArgs, EstimateArgs, Method, Section5Args, SimulateArgs};
use crate::csvio::{self, SpectrumRow};
use crate::error::{in_file, CliError, CliResult};
use crate::manifest::manifest_path_for;
use crate::specfile::{bias_config_from_kv, KeyValues, SignalFile, SignalSpec};

/// Everything a command needs, with defaults filled in and spec files
/// already parsed. Paths are absolute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Params {
    Simulate {
        signal: SignalSpec,
        n: usize,
        seed: u64,
        replicate: u32,
        out: PathBuf,
    },
    Estimate {
        input: PathBuf,
        method: Method,
        /// `None` for the periodogram.
        k: Option<usize>,
        /// `None` for the periodogram and the rectangular taper.
        nw: Option<f64>,
        rectangular: bool,
        full_spectrum: bool,
        poincare: Option<PathBuf>,
        out: PathBuf,
    },
    Average {
        inputs: Vec<PathBuf>,
        out: PathBuf,
    },
    BiasStudy {
        phi_grid: Vec<f64>,
        m_values: Vec<usize>,
        n: usize,
        replicates: usize,
        seed: u64,
        theta: f64,
        out: PathBuf,
    },
    Section5 {
        seed: u64,
        m: usize,
        k: usize,
        nw: f64,
        out_dir: PathBuf,
    },
}

fn absolute(p: &Path) -> CliResult<PathBuf> {
    if p.is_absolute() {
        return Ok(p.to_path_buf());
    }
    let cwd = std::env::current_dir().map_err(|e| CliError::io(Path::new("."), e))?;
    Ok(cwd.join(p))
}

impl Params {
    pub fn name(&self) -> &'static str {
        match self {
            Params::Simulate { .. } => "simulate",
            Params::Estimate { .. } => "estimate",
            Params::Average { .. } => "average",
            Params::BiasStudy { .. } => "bias-study",
            Params::Section5 { .. } => "section5",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Params::Simulate { seed, .. } | Params::BiasStudy { seed, .. } | Params::Section5 { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    pub fn manifest_path(&self) -> PathBuf {
        match self {
            Params::Simulate { out, .. }
            | Params::Estimate { out, .. }
            | Params::Average { out, .. }
            | Params::BiasStudy { out, .. } => manifest_path_for(out),
            Params::Section5 { out_dir, .. } => out_dir.join("manifest.json"),
        }
    }

    pub fn simulate(a: &SimulateArgs) -> CliResult<Self> {
        let file = SignalFile::read(&a.spec)?;
        let n = a.n.or(file.n).ok_or_else(|| {
            CliError::invalid(format!("{}: missing key `n` (set it in the file or pass --n)", a.spec.display()))
        })?;
        if n == 0 {
            return Err(CliError::invalid("invalid parameter `n`: must be at least 1"));
        }
        Ok(Params::Simulate {
            signal: file.spec,
            n,
            seed: a.seed.or(file.seed).unwrap_or(0),
            replicate: a.replicate,
            out: absolute(&a.out)?,
        })
    }

    pub fn estimate(a: &EstimateArgs) -> CliResult<Self> {
        let (k, nw) = match a.method {
            Method::Periodogram => {
                if a.rectangular || a.k.is_some() || a.nw.is_some() {
                    return Err(CliError::invalid("--k, --nw and --rectangular apply to --method multitaper"));
                }
                (None, None)
            }
            Method::Multitaper if a.rectangular => {
                if a.k.is_some_and(|k| k != 1) || a.nw.is_some() {
                    return Err(CliError::invalid("--rectangular uses a single taper: --k must be 1 and --nw unset"));
                }
                (Some(1), None)
            }
            Method::Multitaper => (Some(a.k.unwrap_or(DEFAULT_K)), Some(a.nw.unwrap_or(DEFAULT_NW))),
        };
        Ok(Params::Estimate {
            input: absolute(&a.input)?,
            method: a.method,
            k,
            nw,
            rectangular: a.rectangular,
            full_spectrum: a.full_spectrum,
            poincare: a.poincare.as_deref().map(absolute).transpose()?,
            out: absolute(&a.out)?,
        })
    }

    pub fn average(a: &AverageArgs) -> CliResult<Self> {
        Ok(Params::Average {
            inputs: a.inputs.iter().map(|p| absolute(p)).collect::<CliResult<_>>()?,
            out: absolute(&a.out)?,
        })
    }

    pub fn bias_study(a: &BiasStudyArgs) -> CliResult<Self> {
        let mut cfg = match &a.config {
            Some(path) => bias_config_from_kv(&KeyValues::read(path)?).map_err(|e| match e {
                CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
                other => other,
            })?,
            None => BiasStudyConfig::default(),
        };
        if let Some(seed) = a.seed {
            cfg.seed = seed;
        }
        Ok(Params::BiasStudy {
            phi_grid: cfg.phi_grid,
            m_values: cfg.m_values,
            n: cfg.n,
            replicates: cfg.replicates,
            seed: cfg.seed,
            theta: cfg.theta,
            out: absolute(&a.out)?,
        })
    }

    pub fn section5(a: &Section5Args) -> CliResult<Self> {
        Ok(Params::Section5 { seed: a.seed, m: a.m, k: a.k, nw: a.nw, out_dir: absolute(&a.out_dir)? })
    }

    /// Runs the command and returns the files it wrote.
    pub fn execute(&self) -> CliResult<Vec<PathBuf>> {
        match self {
            Params::Simulate { signal, n, seed, replicate, out } => {
                let x = signal.generate(*n, *seed, *replicate)?;
                csvio::write_signal(out, &x)?;
                Ok(vec![out.clone()])
            }
            Params::Estimate { input, method, k, nw, rectangular, full_spectrum, poincare, out } => {
                let x = csvio::read_signal(input)?;
                let n = x.len();
                let est = match (method, k) {
                    (Method::Periodogram, _) => polarization_periodogram(&x),
                    (Method::Multitaper, Some(k)) => {
                        let tapers = if *rectangular {
                            TaperSet::rectangular(n)
                        } else {
                            slepian_tapers(n, nw.unwrap_or(DEFAULT_NW), *k)
                        }
                        .map_err(|e| in_file(input, e))?;
                        multitaper_estimate(&x, &tapers)?
                    }
                    (Method::Multitaper, None) => return Err(CliError::invalid("multitaper needs a taper count")),
                };
                let bins = if *full_spectrum { n } else { n / 2 + 1 };
                let rows = spectrum_rows(est.bins(), n, bins);
                csvio::write_spectrum(out, &rows)?;
                let mut outputs = vec![out.clone()];
                if let Some(p) = poincare {
                    csvio::write_poincare(p, &rows)?;
                    outputs.push(p.clone());
                }
                Ok(outputs)
            }
            Params::Average { inputs, out } => {
                let averaged = average_files(inputs)?;
                csvio::write_spectrum(out, &averaged)?;
                Ok(vec![out.clone()])
            }
            Params::BiasStudy { phi_grid, m_values, n, replicates, seed, theta, out } => {
                let cfg = BiasStudyConfig {
                    phi_grid: phi_grid.clone(),
                    m_values: m_values.clone(),
                    n: *n,
                    replicates: *replicates,
                    seed: *seed,
                    theta: *theta,
                };
                let table = run_bias_study(&cfg)?;
                csvio::write_bias(out, &table)?;
                Ok(vec![out.clone()])
            }
            Params::Section5 { seed, m, k, nw, out_dir } => {
                let cfg = Section5Config { seed: *seed, m: *m, k: *k, nw: *nw, ..Default::default() };
                let report = run_section5_experiment(&cfg)?;
                std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
                let n = cfg.n;
                let bins = n / 2 + 1;
                let theory = spectrum_rows(&report.theoretical.density, n, bins);
                let periodogram = spectrum_rows(report.periodogram.bins(), n, bins);
                let multitaper = spectrum_rows(report.multitaper.bins(), n, bins);
                let files = [
                    ("theory.csv", &theory),
                    ("periodogram.csv", &periodogram),
                    ("multitaper.csv", &multitaper),
                ];
                let mut outputs = Vec::new();
                for (name, rows) in files {
                    let path = out_dir.join(name);
                    csvio::write_spectrum(&path, rows)?;
                    outputs.push(path);
                }
                let path = out_dir.join("report.csv");
                csvio::write_comparison(
                    &path,
                    &[("theory", &theory), ("periodogram", &periodogram), ("multitaper", &multitaper)],
                )?;
                outputs.push(path);
                let path = out_dir.join("poincare.csv");
                csvio::write_poincare(&path, &multitaper)?;
                outputs.push(path);
                Ok(outputs)
            }
        }
    }
}

/// Attribute rows for the first `bins` of an `n`-point density.
fn spectrum_rows(density: &[Quaternion], n: usize, bins: usize) -> Vec<SpectrumRow> {
    let spec = StokesSpectrum::from_density(&density[..bins]);
    if spec.clamped > 0 {
        eprintln!("warning: degree of polarization clamped to 1 at {} bins", spec.clamped);
    }
    spec.bins.into_iter().enumerate().map(|(k, bin)| SpectrumRow { nu: k as f64 / n as f64, bin }).collect()
}

/// Sums the Stokes parameters over files and divides by their count. The
/// degree of polarization is re-derived from the averaged components, so
/// it is `|Σ vector parts| / Σ scalar parts`, never a mean of per-file Φ.
fn average_files(inputs: &[PathBuf]) -> CliResult<Vec<SpectrumRow>> {
    let first = inputs.first().ok_or_else(|| CliError::invalid("average needs at least one input"))?;
    let reference = csvio::read_spectrum(first)?;
    let mut sum = vec![Quaternion::ZERO; reference.len()];
    for path in inputs {
        let rows = if path == first { reference.clone() } else { csvio::read_spectrum(path)? };
        if rows.len() != reference.len() {
            return Err(CliError::invalid(format!(
                "{}: {} rows, but {} has {}: spectra come from different N",
                path.display(),
                rows.len(),
                first.display(),
                reference.len()
            )));
        }
        for (i, ((nu, s), acc)) in rows.iter().zip(sum.iter_mut()).enumerate() {
            if nu.to_bits() != reference[i].0.to_bits() {
                return Err(CliError::invalid(format!(
                    "{}: row {} has nu = {nu}, but {} has {}: spectra come from different N",
                    path.display(),
                    i + 1,
                    first.display(),
                    reference[i].0
                )));
            }
            *acc += s.to_quaternion();
        }
    }
    let m = inputs.len() as f64;
    let mean: Vec<Quaternion> = sum.into_iter().map(|g| g / m).collect();
    let spec = StokesSpectrum::from_density(&mean);
    Ok(spec.bins.into_iter().zip(&reference).map(|(bin, (nu, _))| SpectrumRow { nu: *nu, bin }).collect())
}
