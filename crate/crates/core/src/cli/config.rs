//! Sweep configuration: flat `key = value` files merged with flags.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;

use super::CliError;
use crate::channels::Outcome;
use crate::protocols::Protocol;
use crate::report::{Column, COLUMNS};

pub const DEFAULT_THETA_POINTS: usize = 181;
pub const DEFAULT_PHI_POINTS: usize = 360;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

const KEYS: [&str; 17] = [
    "grid",
    "theta_points",
    "phi_points",
    "theta_min",
    "theta_max",
    "phi_min",
    "phi_max",
    "protocol",
    "outcome",
    "outputs",
    "format",
    "tolerance",
    "jobs",
    "degrees",
    "perturb",
    "verify",
    "out",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum ProtocolChoice {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[default]
    All,
}

impl ProtocolChoice {
    pub fn protocols(self) -> Vec<Protocol> {
        match self {
            ProtocolChoice::One => vec![Protocol::One],
            ProtocolChoice::Two => vec![Protocol::Two],
            ProtocolChoice::All => Protocol::BOTH.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutcomeChoice {
    On,
    Off,
}

impl From<OutcomeChoice> for Outcome {
    fn from(o: OutcomeChoice) -> Self {
        match o {
            OutcomeChoice::On => Outcome::On,
            OutcomeChoice::Off => Outcome::Off,
        }
    }
}

/// `TxP`, e.g. `181x360`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSize {
    pub theta_points: usize,
    pub phi_points: usize,
}

impl FromStr for GridSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (t, p) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("grid must look like 181x360, got {s:?}"))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad grid size {v:?}: {e}"))
        };
        Ok(Self {
            theta_points: parse(t)?,
            phi_points: parse(p)?,
        })
    }
}

/// Values given on the command line; `None` or `false` falls back to the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub grid: Option<GridSize>,
    pub protocol: Option<ProtocolChoice>,
    pub outcome: Option<OutcomeChoice>,
    pub format: Option<Format>,
    pub tolerance: Option<f64>,
    pub jobs: Option<usize>,
    pub degrees: bool,
    pub perturb: Option<f64>,
    pub verify: bool,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub theta_points: usize,
    pub phi_points: usize,
    /// Radians.
    pub theta_range: (f64, f64),
    /// Radians.
    pub phi_range: (f64, f64),
    pub protocols: Vec<Protocol>,
    pub outcome: Option<Outcome>,
    pub outputs: Vec<Column>,
    pub format: Format,
    pub tolerance: f64,
    pub jobs: Option<usize>,
    pub degrees: bool,
    pub perturb: Option<f64>,
    pub verify: bool,
    pub out: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self::resolve(BTreeMap::new(), &Overrides::default()).expect("defaults are valid")
    }
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", n + 1)))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(CliError::Usage(format!("config line {}: unknown key {k:?}", n + 1)));
        }
        map.insert(k.to_string(), v.trim().to_string());
    }
    Ok(map)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_text(&text)
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    v.parse()
        .map_err(|e| CliError::Usage(format!("config {key} = {v:?}: {e}")))
}

fn parse_enum<T: ValueEnum>(key: &str, v: &str) -> Result<T, CliError> {
    T::from_str(v, true).map_err(|e| CliError::Usage(format!("config {key} = {v:?}: {e}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, CliError> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(CliError::Usage(format!("config {key} = {v:?}: expected true or false"))),
    }
}

/// Degrees to radians, snapping values within rounding of 0, π or 2π onto them
/// so that `180` and `360` stay inside the closed domain.
pub fn to_radians(value: f64, degrees: bool) -> f64 {
    if !degrees {
        return value;
    }
    let r = value.to_radians();
    for edge in [0.0, PI, TAU] {
        if (r - edge).abs() < 1e-12 {
            return edge;
        }
    }
    r
}

fn check_range(name: &str, range: (f64, f64), max: f64) -> Result<(), CliError> {
    let (lo, hi) = range;
    if !(0.0..=max).contains(&lo) || !(0.0..=max).contains(&hi) || lo > hi {
        return Err(CliError::Usage(format!(
            "{name} range [{lo}, {hi}] must satisfy 0 <= min <= max <= {max}"
        )));
    }
    Ok(())
}

impl SweepConfig {
    /// Merge file values with flags (flags win) and validate.
    pub fn resolve(file: BTreeMap<String, String>, flags: &Overrides) -> Result<Self, CliError> {
        let get = |k: &str| file.get(k).map(String::as_str);

        let degrees = flags.degrees || get("degrees").map(|v| parse_bool("degrees", v)).transpose()?.unwrap_or(false);
        let verify = flags.verify || get("verify").map(|v| parse_bool("verify", v)).transpose()?.unwrap_or(false);

        let mut grid = GridSize {
            theta_points: DEFAULT_THETA_POINTS,
            phi_points: DEFAULT_PHI_POINTS,
        };
        if let Some(v) = get("grid") {
            grid = v.parse().map_err(|e: String| CliError::Usage(format!("config grid: {e}")))?;
        }
        if let Some(v) = get("theta_points") {
            grid.theta_points = parse_value("theta_points", v)?;
        }
        if let Some(v) = get("phi_points") {
            grid.phi_points = parse_value("phi_points", v)?;
        }
        if let Some(g) = flags.grid {
            grid = g;
        }
        if grid.theta_points < 2 || grid.phi_points < 2 {
            return Err(CliError::Usage(format!(
                "grid needs at least 2 points per axis, got {}x{}",
                grid.theta_points, grid.phi_points
            )));
        }

        let (theta_full, phi_full) = if degrees { (180.0, 360.0) } else { (PI, TAU) };
        let bound = |k: &str, default: f64| -> Result<f64, CliError> {
            let v = match get(k) {
                Some(v) => parse_value::<f64>(k, v)?,
                None => default,
            };
            Ok(to_radians(v, degrees))
        };
        let theta_range = (bound("theta_min", 0.0)?, bound("theta_max", theta_full)?);
        let phi_range = (bound("phi_min", 0.0)?, bound("phi_max", phi_full)?);
        check_range("theta", theta_range, PI)?;
        check_range("phi", phi_range, TAU)?;

        let protocol = match (flags.protocol, get("protocol")) {
            (Some(p), _) => p,
            (None, Some(v)) => parse_enum("protocol", v)?,
            (None, None) => ProtocolChoice::All,
        };
        let outcome = match (flags.outcome, get("outcome")) {
            (Some(o), _) => Some(o),
            (None, Some(v)) => Some(parse_enum::<OutcomeChoice>("outcome", v)?),
            (None, None) => None,
        }
        .map(Outcome::from);
        let format = match (flags.format, get("format")) {
            (Some(f), _) => f,
            (None, Some(v)) => parse_enum("format", v)?,
            (None, None) => Format::Csv,
        };
        let tolerance = match (flags.tolerance, get("tolerance")) {
            (Some(t), _) => t,
            (None, Some(v)) => parse_value("tolerance", v)?,
            (None, None) => DEFAULT_TOLERANCE,
        };
        if !(tolerance.is_finite() && tolerance > 0.0) {
            return Err(CliError::Usage(format!("tolerance must be positive, got {tolerance}")));
        }
        let jobs = match (flags.jobs, get("jobs")) {
            (Some(j), _) => Some(j),
            (None, Some(v)) => Some(parse_value("jobs", v)?),
            (None, None) => None,
        };
        if jobs == Some(0) {
            return Err(CliError::Usage("jobs must be at least 1".into()));
        }
        let perturb = match (flags.perturb, get("perturb")) {
            (Some(x), _) => Some(x),
            (None, Some(v)) => Some(parse_value::<f64>("perturb", v)?),
            (None, None) => None,
        };
        if perturb.is_some_and(|x| !x.is_finite()) {
            return Err(CliError::Usage("perturb must be finite".into()));
        }
        let out = flags.out.clone().or_else(|| get("out").map(PathBuf::from));

        let protocols = protocol.protocols();
        let wanted: Option<Vec<&str>> = get("outputs")
            .map(|v| v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect());
        if let Some(names) = &wanted {
            if let Some(bad) = names.iter().find(|n| !COLUMNS.iter().any(|c| c.name == **n)) {
                return Err(CliError::Usage(format!("unknown output column {bad:?}")));
            }
        }
        let outputs = COLUMNS
            .iter()
            .filter(|c| c.protocol.is_none_or(|p| protocols.contains(&p)))
            .filter(|c| match (c.outcome, outcome) {
                (Some(a), Some(b)) => a == b,
                _ => true,
            })
            .filter(|c| wanted.as_ref().is_none_or(|w| w.contains(&c.name)))
            .copied()
            .collect();

        Ok(Self {
            theta_points: grid.theta_points,
            phi_points: grid.phi_points,
            theta_range,
            phi_range,
            protocols,
            outcome,
            outputs,
            format,
            tolerance,
            jobs,
            degrees,
            perturb,
            verify,
            out,
        })
    }

    /// θ-major list of grid points, endpoints included.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let thetas = linspace(self.theta_range, self.theta_points);
        let phis = linspace(self.phi_range, self.phi_points);
        thetas
            .iter()
            .flat_map(|&t| phis.iter().map(move |&p| (t, p)))
            .collect()
    }

    pub fn includes(&self, protocol: Protocol) -> bool {
        self.protocols.contains(&protocol)
    }
}

pub fn linspace((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(text: &str, flags: Overrides) -> Result<SweepConfig, CliError> {
        SweepConfig::resolve(parse_config_text(text)?, &flags)
    }

    #[test]
    fn defaults() {
        let c = SweepConfig::default();
        assert_eq!((c.theta_points, c.phi_points), (181, 360));
        assert_eq!(c.theta_range, (0.0, PI));
        assert_eq!(c.phi_range, (0.0, TAU));
        assert_eq!(c.outputs.len(), COLUMNS.len());
        assert_eq!(c.tolerance, 1e-10);
        assert_eq!(c.points().len(), 181 * 360);
    }

    #[test]
    fn corner_grid() {
        let c = resolve("grid = 2x2", Overrides::default()).unwrap();
        assert_eq!(c.points(), vec![(0.0, 0.0), (0.0, TAU), (PI, 0.0), (PI, TAU)]);
    }

    #[test]
    fn flags_override_file() {
        let flags = Overrides {
            grid: Some("3x4".parse().unwrap()),
            tolerance: Some(1e-6),
            ..Default::default()
        };
        let c = resolve("grid = 10x10\ntolerance = 1e-3\n# comment\nprotocol = 2", flags).unwrap();
        assert_eq!((c.theta_points, c.phi_points), (3, 4));
        assert_eq!(c.tolerance, 1e-6);
        assert_eq!(c.protocols, vec![Protocol::Two]);
        assert!(c.outputs.iter().all(|col| col.protocol != Some(Protocol::One)));
    }

    #[test]
    fn degree_ranges() {
        let c = resolve("degrees = true\ntheta_max = 180\nphi_min = 90\nphi_max = 270", Overrides::default()).unwrap();
        assert_eq!(c.theta_range.1, PI);
        assert!((c.phi_range.0 - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn outcome_and_outputs_filter() {
        let c = resolve("outcome = off\noutputs = f_p1pa2_on, f_p1pa2_off, c_z", Overrides::default()).unwrap();
        let names: Vec<_> = c.outputs.iter().map(|c| c.name).collect();
        assert_eq!(names, vec!["f_p1pa2_off", "c_z"]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(resolve("grid = 1x5", Overrides::default()).is_err());
        assert!(resolve("theta_max = 4", Overrides::default()).is_err());
        assert!(resolve("tolerance = -1", Overrides::default()).is_err());
        assert!(resolve("colour = red", Overrides::default()).is_err());
        assert!(resolve("no equals sign", Overrides::default()).is_err());
        assert!(resolve("outputs = nope", Overrides::default()).is_err());
        assert!(resolve("jobs = 0", Overrides::default()).is_err());
        assert!("12".parse::<GridSize>().is_err());
    }

    #[test]
    fn linspace_hits_endpoints() {
        let v = linspace((0.0, PI), 181);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[180], PI);
        assert!((v[90] - PI / 2.0).abs() < 1e-15);
    }
}
