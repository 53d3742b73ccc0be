//! Grid evaluation and CSV/JSON rendering.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{Format, SweepConfig};
use super::CliError;
use crate::analytic::AnalyticValues;
use crate::protocols::Simulator;
use crate::report::{numeric_values, NumericValues};
use crate::states::SwitchParams;

/// `%.15g`: 15 significant digits, trailing zeros trimmed.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// The value that [`fmt_num`] prints.
pub fn round15(x: f64) -> f64 {
    fmt_num(x).parse().unwrap_or(x)
}

/// Round every number in a JSON tree to 15 significant digits.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(x) = n.as_f64().filter(|_| n.is_f64()) {
                *v = json!(round15(x));
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_json),
        Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

#[derive(Debug, Clone)]
pub struct GridRow {
    pub theta: f64,
    pub phi: f64,
    pub analytic: AnalyticValues,
    pub numeric: Option<NumericValues>,
}

pub fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))
}

/// Evaluate every grid point; rows come back in θ-major order whatever the
/// worker count.
pub fn evaluate_grid(cfg: &SweepConfig, sim: Option<&Simulator>) -> Result<Vec<GridRow>, CliError> {
    let points = cfg.points();
    let pool = thread_pool(cfg.jobs)?;
    let rows = pool.install(|| {
        points
            .par_iter()
            .map(|&(theta, phi)| {
                let switch = SwitchParams::new(theta, phi)?;
                let analytic = AnalyticValues::at(theta, phi)?;
                let numeric = sim
                    .map(|s| numeric_values(s, &switch, &cfg.protocols))
                    .transpose()?;
                Ok(GridRow {
                    theta,
                    phi,
                    analytic,
                    numeric,
                })
            })
            .collect::<crate::Result<Vec<_>>>()
    })?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let mut v = json!({ "columns": self.header, "rows": self.rows });
        round_json(&mut v);
        let mut s = serde_json::to_string(&v).expect("plain JSON values");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

fn angle(x: f64, degrees: bool) -> f64 {
    if degrees {
        x.to_degrees()
    } else {
        x
    }
}

/// Output columns for a sweep; with `verify`, `*_num` and `*_err` follow the
/// analytic columns.
pub fn build_table(cfg: &SweepConfig, rows: &[GridRow], verify: bool) -> Table {
    let mut header = vec!["theta".to_string(), "phi".to_string()];
    header.extend(cfg.outputs.iter().map(|c| c.name.to_string()));
    if verify {
        for c in &cfg.outputs {
            header.push(format!("{}_num", c.name));
            header.push(format!("{}_err", c.name));
        }
    }
    let rows = rows
        .iter()
        .map(|r| {
            let mut v = vec![angle(r.theta, cfg.degrees), angle(r.phi, cfg.degrees)];
            v.extend(cfg.outputs.iter().map(|c| (c.analytic)(&r.analytic)));
            if verify {
                for c in &cfg.outputs {
                    let num = r.numeric.as_ref().and_then(|n| (c.numeric)(n)).unwrap_or(f64::NAN);
                    v.push(num);
                    v.push((num - (c.analytic)(&r.analytic)).abs());
                }
            }
            v
        })
        .collect();
    Table { header, rows }
}

/// Write to `path`, or standard output when `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::{parse_config_text, Overrides};

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(0.375), "0.375");
        assert_eq!(fmt_num(2.0 / 3.0), "0.666666666666667");
        assert_eq!(fmt_num(std::f64::consts::PI), "3.14159265358979");
        assert_eq!(fmt_num(1.5e-7), "1.5e-7");
        assert_eq!(fmt_num(-2.5e20), "-2.5e20");
        assert_eq!(fmt_num(123456.0), "123456");
        assert_eq!(fmt_num(f64::NAN), "NaN");
    }

    #[test]
    fn rounding_is_idempotent() {
        for &x in &[1.0 / 3.0, 2.0f64.sqrt(), -1e-13 / 7.0, 6.02e23] {
            let r = round15(x);
            assert_eq!(round15(r), r);
            assert!((r - x).abs() <= x.abs() * 1e-14);
        }
    }

    fn small_cfg(text: &str) -> SweepConfig {
        SweepConfig::resolve(parse_config_text(text).unwrap(), &Overrides::default()).unwrap()
    }

    #[test]
    fn csv_shape() {
        let cfg = small_cfg("grid = 2x3");
        let rows = evaluate_grid(&cfg, None).unwrap();
        let csv = build_table(&cfg, &rows, false).to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 7);
        assert!(lines[0].starts_with("theta,phi,f_p1pa1,f_p1pa2_on,"));
        assert!(lines[0].ends_with("d2max,c_z,c_x"));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn verify_columns_and_json() {
        let cfg = small_cfg("grid = 2x2\nprotocol = 1\noutputs = d1, c_z");
        let sim = Simulator::new().unwrap();
        let rows = evaluate_grid(&cfg, Some(&sim)).unwrap();
        let t = build_table(&cfg, &rows, true);
        assert_eq!(t.header, ["theta", "phi", "d1", "c_z", "d1_num", "d1_err", "c_z_num", "c_z_err"]);
        assert!(t.column("d1_err").unwrap().iter().all(|e| *e < 1e-10));
        let parsed: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(parsed["rows"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let mut cfg = small_cfg("grid = 7x9");
        let sim = Simulator::new().unwrap();
        cfg.jobs = Some(1);
        let a = build_table(&cfg, &evaluate_grid(&cfg, Some(&sim)).unwrap(), true).to_csv();
        cfg.jobs = Some(3);
        let b = build_table(&cfg, &evaluate_grid(&cfg, Some(&sim)).unwrap(), true).to_csv();
        assert_eq!(a, b);
    }
}
