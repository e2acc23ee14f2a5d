//! Command-line flags, JSON config files and their merge into a [`RunConfig`].

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Deserialize;

use super::ConfigError;
use crate::dynamics::{AtomPairGeometry, CollectiveParams, Vec3};
use crate::scenarios::{Scenario, ScenarioKind};

pub const DEFAULT_TAU_MAX: f64 = 10.0;
pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioArg {
    BellZeroDouble,
    SingleExcitation,
    Symmetric,
}

impl From<ScenarioArg> for ScenarioKind {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::BellZeroDouble => ScenarioKind::BellZeroDouble,
            ScenarioArg::SingleExcitation => ScenarioKind::SingleExcitation,
            ScenarioArg::Symmetric => ScenarioKind::SymmetricBell,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Atom separation: a vector, or a length along `--direction`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SeparationArg {
    Length(f64),
    Vector(Vec3),
}

/// Values of a `--sweep-gamma` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSweep(pub Vec<f64>);

fn parse_sweep_arg(s: &str) -> Result<GammaSweep, String> {
    parse_sweep(s).map(GammaSweep)
}

/// Time series of scenario correlations for two atoms with collective decay.
#[derive(Debug, Parser)]
#[command(name = "dicke-corr", version)]
pub struct Cli {
    /// Initial state.
    #[arg(long, value_enum)]
    pub scenario: Option<ScenarioArg>,
    /// Use the vanishing-separation limit (γ = 1).
    #[arg(long)]
    pub near_zero: bool,
    /// Collective damping ratio Γ₁₂/Γ.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Dipole-dipole shift Ω₁₂/Γ.
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<f64>,
    /// Separation in units of the resonant wavelength: `r` or `x,y,z`.
    #[arg(long, value_parser = parse_separation, allow_hyphen_values = true)]
    pub separation: Option<SeparationArg>,
    /// Direction of a scalar separation (default 1,0,0).
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub direction: Option<Vec3>,
    /// Dipole orientation `x,y,z`; normalized.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub dipole: Option<Vec3>,
    /// Largest τ = Γt.
    #[arg(long)]
    pub tau_max: Option<f64>,
    /// Number of τ points, including 0 and τ_max.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Compare closed forms against the generic measures, RK4 and brute force.
    #[arg(long)]
    pub cross_check: bool,
    /// RK4 steps per unit τ in cross-check mode.
    #[arg(long)]
    pub rk4_steps: Option<usize>,
    /// γ sweep `start:end:step`, end included.
    #[arg(long, value_parser = parse_sweep_arg, allow_hyphen_values = true)]
    pub sweep_gamma: Option<GammaSweep>,
    /// Output file (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON config; flags given on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Closed form vs generic measures.
    #[arg(long)]
    pub tol_generic: Option<f64>,
    /// Closed form vs RK4.
    #[arg(long)]
    pub tol_rk4: Option<f64>,
    /// Closed form vs brute-force searches.
    #[arg(long)]
    pub tol_bruteforce: Option<f64>,
}

/// JSON config; keys are the long flag names.
#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FileConfig {
    pub scenario: Option<ScenarioArg>,
    pub near_zero: Option<bool>,
    pub gamma: Option<f64>,
    pub eta: Option<f64>,
    pub separation: Option<SeparationArg>,
    pub direction: Option<Vec3>,
    pub dipole: Option<Vec3>,
    pub tau_max: Option<f64>,
    pub samples: Option<usize>,
    pub format: Option<OutputFormat>,
    pub cross_check: Option<bool>,
    pub rk4_steps: Option<usize>,
    pub sweep_gamma: Option<String>,
    pub out: Option<PathBuf>,
    pub tol_generic: Option<f64>,
    pub tol_rk4: Option<f64>,
    pub tol_bruteforce: Option<f64>,
}

impl FileConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::File {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::from_json(&text).map_err(|e| ConfigError::File { path: path.to_path_buf(), message: e.to_string() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamSource {
    Direct(CollectiveParams),
    Geometry(AtomPairGeometry),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub generic: f64,
    pub rk4: f64,
    pub bruteforce: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { generic: 1e-10, rk4: 1e-7, bruteforce: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub params: ParamSource,
    pub tau_max: f64,
    pub samples: usize,
    pub format: OutputFormat,
    pub cross_check: bool,
    /// Steps per unit τ; `None` picks `2000·max(1, |η|)`.
    pub rk4_steps: Option<usize>,
    /// γ values replacing `params.gamma`, one series each.
    pub sweep: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub tolerances: Tolerances,
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.to_string(), message: message.into() }
}

pub fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got {s:?}"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(parts) {
        *slot = p.parse().map_err(|e| format!("{p:?}: {e}"))?;
    }
    Ok(v)
}

pub fn parse_separation(s: &str) -> Result<SeparationArg, String> {
    if s.contains(',') {
        parse_vec3(s).map(SeparationArg::Vector)
    } else {
        s.trim().parse().map(SeparationArg::Length).map_err(|e| format!("{s:?}: {e}"))
    }
}

/// `start:end:step` with `start ≤ end` and `step > 0`; `end` is included when
/// it lies on the grid (to within 1e-9 of a step).
pub fn parse_sweep(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected start:end:step, got {s:?}"));
    }
    let mut v = [0.0f64; 3];
    for (slot, p) in v.iter_mut().zip(parts) {
        *slot = p.parse().map_err(|e| format!("{p:?}: {e}"))?;
    }
    let [start, end, step] = v;
    if !(start.is_finite() && end.is_finite() && step.is_finite()) {
        return Err("sweep bounds must be finite".into());
    }
    if step <= 0.0 {
        return Err(format!("step must be positive, got {step}"));
    }
    if end < start {
        return Err(format!("end {end} is below start {start}"));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|k| start + k as f64 * step).collect())
}

fn unit(v: Vec3, field: &str) -> Result<Vec3, ConfigError> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !n.is_finite() || n == 0.0 {
        return Err(invalid(field, "direction must be a nonzero finite vector"));
    }
    Ok(v.map(|x| x / n))
}

/// Parses command-line arguments (program name first) and merges the JSON
/// file named by `--config`, if any.
pub fn parse_config<I, T>(args: I) -> Result<RunConfig, ConfigError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(ConfigError::Cli)?;
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    merge(cli, file)
}

/// Flag values win over file values.
pub fn merge(cli: Cli, file: FileConfig) -> Result<RunConfig, ConfigError> {
    let kind: ScenarioKind = cli.scenario.or(file.scenario).ok_or_else(|| invalid("--scenario", "required"))?.into();
    let near_zero = cli.near_zero || file.near_zero.unwrap_or(false);
    let scenario = Scenario { kind, near_zero_separation: near_zero };

    let gamma = cli.gamma.or(file.gamma);
    let eta = cli.eta.or(file.eta);
    let separation = cli.separation.or(file.separation);
    let direction = cli.direction.or(file.direction);
    let dipole = cli.dipole.or(file.dipole);
    let sweep = match cli.sweep_gamma {
        Some(v) => Some(v.0),
        None => match file.sweep_gamma {
            Some(s) => Some(parse_sweep(&s).map_err(|m| invalid("sweep-gamma", m))?),
            None => None,
        },
    };

    let params = match separation {
        Some(sep) => {
            if gamma.is_some() || eta.is_some() {
                return Err(invalid("--separation", "cannot be combined with --gamma or --eta"));
            }
            if sweep.is_some() {
                return Err(invalid("--sweep-gamma", "cannot be combined with --separation"));
            }
            let dipole = unit(dipole.ok_or_else(|| invalid("--dipole", "required with --separation"))?, "--dipole")?;
            let r = match sep {
                SeparationArg::Vector(v) => v,
                SeparationArg::Length(len) => {
                    if !(len.is_finite() && len > 0.0) {
                        return Err(invalid("--separation", format!("must be positive, got {len}")));
                    }
                    unit(direction.unwrap_or([1.0, 0.0, 0.0]), "--direction")?.map(|x| x * len)
                }
            };
            if direction.is_some() && matches!(sep, SeparationArg::Vector(_)) {
                return Err(invalid("--direction", "only applies to a scalar --separation"));
            }
            ParamSource::Geometry(AtomPairGeometry::new(r, dipole).map_err(|e| invalid("--separation", e.to_string()))?)
        }
        None => {
            if dipole.is_some() || direction.is_some() {
                return Err(invalid("--dipole", "--dipole and --direction need --separation"));
            }
            let gamma = match (gamma, &sweep, near_zero) {
                (Some(_), Some(_), _) => {
                    return Err(invalid("--sweep-gamma", "cannot be combined with --gamma"));
                }
                (Some(g), None, _) => g,
                (None, Some(v), _) => v[0],
                (None, None, true) => 1.0,
                (None, None, false) => {
                    return Err(invalid("--gamma", "one of --gamma, --sweep-gamma or --separation is required"));
                }
            };
            if near_zero && sweep.is_some() {
                return Err(invalid("--sweep-gamma", "the vanishing-separation limit fixes γ = 1"));
            }
            let p = CollectiveParams::new(gamma, eta.unwrap_or(0.0)).map_err(|e| invalid("--gamma", e.to_string()))?;
            if let Some(v) = &sweep {
                for &g in v {
                    CollectiveParams::new(g, p.eta).map_err(|e| invalid("--sweep-gamma", e.to_string()))?;
                }
            }
            ParamSource::Direct(p)
        }
    };

    let tau_max = cli.tau_max.or(file.tau_max).unwrap_or(DEFAULT_TAU_MAX);
    if !(tau_max.is_finite() && tau_max > 0.0) {
        return Err(invalid("--tau-max", format!("must be positive and finite, got {tau_max}")));
    }
    let samples = cli.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES);
    if samples < 2 {
        return Err(invalid("--samples", format!("must be at least 2, got {samples}")));
    }
    let rk4_steps = cli.rk4_steps.or(file.rk4_steps);
    if rk4_steps == Some(0) {
        return Err(invalid("--rk4-steps", "must be positive"));
    }

    let defaults = Tolerances::default();
    let tol = |flag: Option<f64>, file: Option<f64>, default: f64, name: &str| -> Result<f64, ConfigError> {
        let v = flag.or(file).unwrap_or(default);
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(invalid(name, format!("must be positive, got {v}")))
        }
    };
    let tolerances = Tolerances {
        generic: tol(cli.tol_generic, file.tol_generic, defaults.generic, "--tol-generic")?,
        rk4: tol(cli.tol_rk4, file.tol_rk4, defaults.rk4, "--tol-rk4")?,
        bruteforce: tol(cli.tol_bruteforce, file.tol_bruteforce, defaults.bruteforce, "--tol-bruteforce")?,
    };

    Ok(RunConfig {
        scenario,
        params,
        tau_max,
        samples,
        format: cli.format.or(file.format).unwrap_or_default(),
        cross_check: cli.cross_check || file.cross_check.unwrap_or(false),
        rk4_steps,
        sweep,
        out: cli.out.or(file.out),
        tolerances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &str) -> Result<RunConfig, ConfigError> {
        parse_config(std::iter::once("dicke-corr").chain(args.split_whitespace()))
    }

    #[test]
    fn direct_parameters() {
        let cfg = parse("--scenario symmetric --gamma 0.5 --tau-max 10 --samples 1000").unwrap();
        assert_eq!(cfg.scenario, Scenario::new(ScenarioKind::SymmetricBell));
        assert_eq!(cfg.params, ParamSource::Direct(CollectiveParams { gamma: 0.5, eta: 0.0 }));
        assert_eq!((cfg.tau_max, cfg.samples, cfg.format), (10.0, 1000, OutputFormat::Csv));
    }

    #[test]
    fn negative_values_parse() {
        let cfg = parse("--scenario bell-zero-double --gamma -0.9 --eta -1").unwrap();
        assert_eq!(cfg.params, ParamSource::Direct(CollectiveParams { gamma: -0.9, eta: -1.0 }));
        let cfg = parse("--scenario symmetric --sweep-gamma -0.9:0.9:0.3").unwrap();
        assert_eq!(cfg.sweep.unwrap().len(), 7);
    }

    #[test]
    fn geometry_parameters() {
        let cfg = parse("--scenario symmetric --separation 0.5 --dipole 0,0,1 --direction 1,0,0").unwrap();
        let ParamSource::Geometry(g) = cfg.params else { panic!("expected geometry") };
        assert_eq!(g.separation, [0.5, 0.0, 0.0]);
        assert_eq!(g.dipole_direction, [0.0, 0.0, 1.0]);

        let cfg = parse("--scenario symmetric --separation 0,0.3,0 --dipole 0,0,2").unwrap();
        let ParamSource::Geometry(g) = cfg.params else { panic!("expected geometry") };
        assert_eq!(g.separation, [0.0, 0.3, 0.0]);
        assert_eq!(g.dipole_direction, [0.0, 0.0, 1.0]);
    }

    #[test]
    fn conflicting_sources_are_rejected() {
        let err = parse("--scenario symmetric --gamma 0.5 --separation 0.5 --dipole 0,0,1").unwrap_err();
        assert!(err.to_string().contains("--separation"), "{err}");
        assert!(parse("--scenario symmetric --gamma 0.5 --sweep-gamma 0:1:0.5").is_err());
        assert!(parse("--scenario symmetric --separation 0.5").is_err());
        assert!(parse("--scenario symmetric").is_err());
        assert!(parse("--gamma 0.5").is_err());
    }

    #[test]
    fn out_of_range_values_are_rejected() {
        assert!(parse("--scenario symmetric --gamma 1.5").is_err());
        assert!(parse("--scenario symmetric --gamma 0.5 --samples 1").is_err());
        assert!(parse("--scenario symmetric --gamma 0.5 --tau-max 0").is_err());
        assert!(parse("--scenario symmetric --gamma 0.5 --tol-rk4 0").is_err());
        assert!(parse("--scenario symmetric --sweep-gamma 0:2:0.5").is_err());
        assert!(parse("--scenario nope --gamma 0.5").is_err());
    }

    #[test]
    fn near_zero_needs_no_gamma() {
        let cfg = parse("--scenario bell-zero-double --near-zero").unwrap();
        assert!(cfg.scenario.near_zero_separation);
    }

    #[test]
    fn sweep_grid() {
        assert_eq!(parse_sweep("0:1:0.5").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_sweep("-0.9:0.9:0.3").unwrap().len(), 7);
        assert_eq!(parse_sweep("0:0.25:0.1").unwrap().len(), 3);
        assert!(parse_sweep("0:1:0").is_err());
        assert!(parse_sweep("1:0:0.1").is_err());
        assert!(parse_sweep("0:1").is_err());
    }

    #[test]
    fn json_keys_are_checked() {
        let f = FileConfig::from_json(r#"{"scenario": "symmetric", "gamma": 0.5, "tau-max": 2}"#).unwrap();
        assert_eq!(f.tau_max, Some(2.0));
        let err = FileConfig::from_json(r#"{"scenario": "symmetric",
            "gama": 0.5}"#)
        .unwrap_err();
        assert!(err.to_string().contains("gama"));
        assert_eq!(err.line(), 2);
        let f = FileConfig::from_json(r#"{"separation": [0, 0.2, 0], "dipole": [1, 0, 0]}"#).unwrap();
        assert_eq!(f.separation, Some(SeparationArg::Vector([0.0, 0.2, 0.0])));
    }

    #[test]
    fn flags_override_file() {
        let cli = Cli::try_parse_from(["dicke-corr", "--gamma", "0.3"]).unwrap();
        let file = FileConfig::from_json(r#"{"scenario": "single-excitation", "gamma": 0.9, "eta": 2}"#).unwrap();
        let cfg = merge(cli, file).unwrap();
        assert_eq!(cfg.scenario.kind, ScenarioKind::SingleExcitation);
        assert_eq!(cfg.params, ParamSource::Direct(CollectiveParams { gamma: 0.3, eta: 2.0 }));
    }
}
