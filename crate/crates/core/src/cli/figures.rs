//! Data files behind the fidelity surface plots.

use std::path::Path;

use serde::Serialize;

use super::config::{Format, SweepConfig};
use super::table::{build_table, emit, evaluate_grid, Table};
use super::CliError;
use crate::analytic::AnalyticValues;

/// Values below `-NEGATIVE_TOL` count as negative.
pub const NEGATIVE_TOL: f64 = 1e-12;

const HALF: f64 = 0.5;
const TWO_THIRDS: f64 = 2.0 / 3.0;

pub struct Figure {
    pub name: &'static str,
    pub columns: &'static [&'static str],
    pub values: fn(&AnalyticValues) -> Vec<f64>,
    /// Whether the first value column's sign is reported.
    pub signed: bool,
}

pub const FIGURES: [Figure; 7] = [
    Figure {
        name: "fig1",
        columns: &["f_p1pa2_on", "f_p1pa2_off", "half", "two_thirds"],
        values: |a| vec![a.f_p1pa2_on, a.f_p1pa2_off, HALF, TWO_THIRDS],
        signed: false,
    },
    Figure {
        name: "fig2a",
        columns: &["f_p1pa2_on_minus_half"],
        values: |a| vec![a.f_p1pa2_on - HALF],
        signed: true,
    },
    Figure {
        name: "fig2b",
        columns: &["f_p1pa2_on_minus_two_thirds"],
        values: |a| vec![a.f_p1pa2_on - TWO_THIRDS],
        signed: true,
    },
    Figure {
        name: "fig3",
        columns: &["f_p2pa2_on", "f_p2pa2_off", "half", "two_thirds"],
        values: |a| vec![a.f_p2pa2_on, a.f_p2pa2_off, HALF, TWO_THIRDS],
        signed: false,
    },
    Figure {
        name: "fig4",
        columns: &["f_p2pa2_on_minus_two_thirds"],
        values: |a| vec![a.f_p2pa2_on - TWO_THIRDS],
        signed: true,
    },
    Figure {
        name: "fig5a",
        columns: &["d1max"],
        values: |a| vec![a.d1max],
        signed: true,
    },
    Figure {
        name: "fig5b",
        columns: &["d2max"],
        values: |a| vec![a.d2max],
        signed: true,
    },
];

#[derive(Debug, Clone, Serialize)]
pub struct SignSummary {
    pub figure: &'static str,
    pub negative: usize,
    pub positive: usize,
    pub points: usize,
    pub negative_fraction: f64,
    pub min: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FiguresSummary {
    pub theta_points: usize,
    pub phi_points: usize,
    pub files: Vec<String>,
    pub signs: Vec<SignSummary>,
}

pub fn sign_summary(figure: &'static str, values: &[f64]) -> SignSummary {
    let negative = values.iter().filter(|&&v| v < -NEGATIVE_TOL).count();
    let positive = values.iter().filter(|&&v| v > NEGATIVE_TOL).count();
    SignSummary {
        figure,
        negative,
        positive,
        points: values.len(),
        negative_fraction: negative as f64 / values.len() as f64,
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
    }
}

/// Build every figure table without touching the filesystem.
pub fn figure_tables(cfg: &SweepConfig) -> Result<Vec<(&'static Figure, Table)>, CliError> {
    let rows = evaluate_grid(cfg, None)?;
    let mut base = cfg.clone();
    base.outputs.clear();
    let coords = build_table(&base, &rows, false);
    Ok(FIGURES
        .iter()
        .map(|fig| {
            let mut header = coords.header.clone();
            header.extend(fig.columns.iter().map(|c| c.to_string()));
            let table_rows = coords
                .rows
                .iter()
                .zip(&rows)
                .map(|(c, r)| {
                    let mut v = c.clone();
                    v.extend((fig.values)(&r.analytic));
                    v
                })
                .collect();
            (fig, Table { header, rows: table_rows })
        })
        .collect())
}

pub fn write_figures(cfg: &SweepConfig, dir: &Path) -> Result<FiguresSummary, CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let ext = match cfg.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let mut files = Vec::new();
    let mut signs = Vec::new();
    for (fig, table) in figure_tables(cfg)? {
        let path = dir.join(format!("{}.{ext}", fig.name));
        emit(Some(&path), &table.render(cfg.format))?;
        files.push(path.display().to_string());
        if fig.signed {
            let values = table.column(fig.columns[0]).expect("declared column");
            let s = sign_summary(fig.name, &values);
            eprintln!(
                "{}: {} of {} points negative (fraction {:.4})",
                s.figure, s.negative, s.points, s.negative_fraction
            );
            signs.push(s);
        }
    }
    Ok(FiguresSummary {
        theta_points: cfg.theta_points,
        phi_points: cfg.phi_points,
        files,
        signs,
    })
}
