//! Exhaustive parameter study over pipe depth and water mass flow.
//!
//! Every cell of the grid is one full-year evaluation. Results are laid out
//! with mass flow along rows and pipe depth along columns.

use std::fmt::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::climate::{ClimateSeries, Station};
use crate::collector::{derive_capacities, CollectorParams};
use crate::indicators::{evaluate_with, EvalOptions, IndicatorError};

pub const EFFICIENCY_TITLE: &str = "Simulated yearly mean efficiency PF_p [%]";
pub const OPERATION_TITLE: &str = "Simulated operation time PF_t [%]";

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("cell (mdot {mdot} kg/s, d1 {d1} m): {source}")]
    Cell {
        mdot: f64,
        d1: f64,
        #[source]
        source: IndicatorError,
    },
    #[error("cannot parse tables: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    /// Pipe to surface distances, m.
    pub d1_values: Vec<f64>,
    /// Water mass flows, kg/s.
    pub mdot_values: Vec<f64>,
}

impl Default for SweepGrid {
    /// 20/35/50 mm by 0.5/1/2 kg/min.
    fn default() -> Self {
        Self {
            d1_values: vec![0.020, 0.035, 0.050],
            mdot_values: vec![0.5 / 60.0, 1.0 / 60.0, 2.0 / 60.0],
        }
    }
}

impl SweepGrid {
    pub fn single(d1: f64, mdot: f64) -> Self {
        Self {
            d1_values: vec![d1],
            mdot_values: vec![mdot],
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        for (name, values) in [("d1", &self.d1_values), ("mdot", &self.mdot_values)] {
            if values.is_empty() {
                return Err(SweepError::InvalidGrid(format!("{name} list is empty")));
            }
            if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(SweepError::InvalidGrid(format!("{name} values must be positive")));
            }
            if values.windows(2).any(|w| w[0] >= w[1]) {
                return Err(SweepError::InvalidGrid(format!("{name} values must be strictly increasing")));
            }
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.d1_values.len() * self.mdot_values.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub pf_p: f64,
    pub pf_t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub grid: SweepGrid,
    pub station: Station,
    /// Row-major: `cells[i_mdot * d1_count + i_d1]`.
    cells: Vec<SweepCell>,
}

impl SweepResult {
    /// Assembles a result from row-major cells. The grid itself is not
    /// required to be sorted here, so permuted layouts can be represented.
    pub fn new(grid: SweepGrid, station: Station, cells: Vec<SweepCell>) -> Result<Self, SweepError> {
        if grid.d1_values.is_empty() || grid.mdot_values.is_empty() {
            return Err(SweepError::InvalidGrid("empty grid".into()));
        }
        if cells.len() != grid.cell_count() {
            return Err(SweepError::InvalidGrid(format!(
                "{} cells for a {}x{} grid",
                cells.len(),
                grid.mdot_values.len(),
                grid.d1_values.len()
            )));
        }
        Ok(Self { grid, station, cells })
    }

    /// Builds a result from two tables indexed `[mdot][d1]`.
    pub fn from_tables(
        grid: SweepGrid,
        station: Station,
        pf_p: &[Vec<f64>],
        pf_t: &[Vec<f64>],
    ) -> Result<Self, SweepError> {
        let rows = grid.mdot_values.len();
        let cols = grid.d1_values.len();
        if pf_p.len() != rows || pf_t.len() != rows || pf_p.iter().chain(pf_t).any(|r| r.len() != cols) {
            return Err(SweepError::InvalidGrid("table shape does not match grid".into()));
        }
        let cells = pf_p
            .iter()
            .flatten()
            .zip(pf_t.iter().flatten())
            .map(|(&pf_p, &pf_t)| SweepCell { pf_p, pf_t })
            .collect();
        Self::new(grid, station, cells)
    }

    pub fn cell(&self, i_mdot: usize, i_d1: usize) -> SweepCell {
        self.cells[i_mdot * self.grid.d1_values.len() + i_d1]
    }

    pub fn cells(&self) -> &[SweepCell] {
        &self.cells
    }

    /// `(i_mdot, i_d1, cell)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, SweepCell)> + '_ {
        let cols = self.grid.d1_values.len();
        self.cells.iter().enumerate().map(move |(k, &c)| (k / cols, k % cols, c))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub eval: EvalOptions,
    /// Re-derive unset capacities per cell, so the concrete mass follows `d1`.
    /// When false the capacities of the base configuration are used in every cell.
    pub rederive_capacities: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            eval: EvalOptions::default(),
            rederive_capacities: true,
        }
    }
}

/// The parameters evaluated in one grid cell.
pub fn cell_params(base: &CollectorParams, d1: f64, mdot: f64, options: &SweepOptions) -> Result<CollectorParams, IndicatorError> {
    let mut p = if options.rederive_capacities {
        base.clone()
    } else {
        derive_capacities(base)?
    };
    p.d1 = d1;
    p.mdot = mdot;
    Ok(p)
}

/// Evaluates every grid cell against `climate`. Cells run in parallel and
/// are assembled in row-major order.
pub fn run_sweep(
    base: &CollectorParams,
    grid: &SweepGrid,
    climate: &ClimateSeries,
    options: &SweepOptions,
) -> Result<SweepResult, SweepError> {
    grid.validate()?;
    let cols = grid.d1_values.len();
    let cells = (0..grid.cell_count())
        .into_par_iter()
        .map(|k| {
            let mdot = grid.mdot_values[k / cols];
            let d1 = grid.d1_values[k % cols];
            let wrap = |source| SweepError::Cell { mdot, d1, source };
            let params = cell_params(base, d1, mdot, options).map_err(wrap)?;
            let result = evaluate_with(&params, climate, &options.eval).map_err(wrap)?;
            Ok(SweepCell {
                pf_p: result.pf_p,
                pf_t: result.pf_t,
            })
        })
        .collect::<Result<Vec<_>, SweepError>>()?;
    SweepResult::new(grid.clone(), climate.station.clone(), cells)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestConfig {
    /// m
    pub d1: f64,
    /// kg/s
    pub mdot: f64,
    pub pf_p: f64,
    pub pf_t: f64,
}

/// The cell with the highest `pf_p`; ties go to higher `pf_t`, then lower
/// mass flow, then shallower pipe.
pub fn best_config(result: &SweepResult) -> BestConfig {
    let candidate = |(i_mdot, i_d1, cell): (usize, usize, SweepCell)| BestConfig {
        d1: result.grid.d1_values[i_d1],
        mdot: result.grid.mdot_values[i_mdot],
        pf_p: cell.pf_p,
        pf_t: cell.pf_t,
    };
    result
        .iter()
        .map(candidate)
        .max_by(|a, b| {
            a.pf_p
                .total_cmp(&b.pf_p)
                .then(a.pf_t.total_cmp(&b.pf_t))
                .then(b.mdot.total_cmp(&a.mdot))
                .then(b.d1.total_cmp(&a.d1))
        })
        .expect("sweep results are never empty")
}

fn trim_number(value: f64, decimals: usize) -> String {
    let s = format!("{value:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn write_table<F: Fn(SweepCell) -> f64>(out: &mut String, title: &str, result: &SweepResult, pick: F) {
    let col_labels: Vec<String> = result
        .grid
        .d1_values
        .iter()
        .map(|d| format!("d={} mm", trim_number(d * 1000.0, 3)))
        .collect();
    let row_labels: Vec<String> = result
        .grid
        .mdot_values
        .iter()
        .map(|m| format!("MF={} kg/min", trim_number(m * 60.0, 3)))
        .collect();
    let values: Vec<String> = result.cells.iter().map(|&c| format!("{:.1}", pick(c))).collect();

    let label_width = row_labels.iter().map(String::len).max().unwrap_or(0);
    let col_width = col_labels
        .iter()
        .map(String::len)
        .chain(values.iter().map(String::len))
        .max()
        .unwrap_or(0);
    let cols = col_labels.len();

    let _ = writeln!(out, "{title}");
    let _ = write!(out, "{:label_width$}", "");
    for label in &col_labels {
        let _ = write!(out, "  {label:>col_width$}");
    }
    out.push('\n');
    for (i, label) in row_labels.iter().enumerate() {
        let _ = write!(out, "{label:<label_width$}");
        for v in &values[i * cols..(i + 1) * cols] {
            let _ = write!(out, "  {v:>col_width$}");
        }
        out.push('\n');
    }
}

/// Efficiency and operation-time tables, rows = mass flow (kg/min),
/// columns = pipe depth (mm), one decimal.
pub fn format_tables(result: &SweepResult) -> String {
    let mut out = String::new();
    write_table(&mut out, EFFICIENCY_TITLE, result, |c| c.pf_p);
    out.push('\n');
    write_table(&mut out, OPERATION_TITLE, result, |c| c.pf_t);
    out
}

/// Values read back from [`format_tables`] output.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTables {
    pub d1_mm: Vec<f64>,
    pub mdot_kg_per_min: Vec<f64>,
    /// `[mdot][d1]`
    pub pf_p: Vec<Vec<f64>>,
    /// `[mdot][d1]`
    pub pf_t: Vec<Vec<f64>>,
}

pub fn parse_tables(text: &str) -> Result<ParsedTables, SweepError> {
    let err = |m: String| SweepError::Parse(m);
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let mut tables = Vec::new();
    let mut header: Option<Vec<f64>> = None;
    let mut mdots: Vec<f64> = Vec::new();
    for title in [EFFICIENCY_TITLE, OPERATION_TITLE] {
        match lines.next() {
            Some(l) if l.trim() == title => {}
            other => return Err(err(format!("expected {title:?}, found {other:?}"))),
        }
        let head = lines.next().ok_or_else(|| err("missing column header".into()))?;
        let d1: Vec<f64> = head
            .split_whitespace()
            .filter_map(|t| t.strip_prefix("d="))
            .map(|t| t.parse::<f64>().map_err(|e| err(format!("column label {t:?}: {e}"))))
            .collect::<Result<_, _>>()?;
        if d1.is_empty() {
            return Err(err("no columns".into()));
        }
        if let Some(prev) = &header {
            if prev != &d1 {
                return Err(err("tables disagree on columns".into()));
            }
        }
        header = Some(d1.clone());

        let mut rows = Vec::new();
        let mut row_labels = Vec::new();
        while let Some(line) = lines.clone().next() {
            let mut tokens = line.split_whitespace();
            let Some(label) = tokens.next().and_then(|t| t.strip_prefix("MF=")) else {
                break;
            };
            lines.next();
            row_labels.push(label.parse::<f64>().map_err(|e| err(format!("row label {label:?}: {e}")))?);
            let values: Vec<f64> = tokens
                .skip(1)
                .map(|t| t.parse::<f64>().map_err(|e| err(format!("value {t:?}: {e}"))))
                .collect::<Result<_, _>>()?;
            if values.len() != d1.len() {
                return Err(err(format!("row has {} values for {} columns", values.len(), d1.len())));
            }
            rows.push(values);
        }
        if rows.is_empty() {
            return Err(err("no rows".into()));
        }
        if tables.is_empty() {
            mdots = row_labels;
        } else if mdots != row_labels {
            return Err(err("tables disagree on rows".into()));
        }
        tables.push(rows);
    }
    let pf_t = tables.pop().unwrap();
    let pf_p = tables.pop().unwrap();
    Ok(ParsedTables {
        d1_mm: header.unwrap_or_default(),
        mdot_kg_per_min: mdots,
        pf_p,
        pf_t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::climate::{generate_synthetic, SyntheticProfile};
    use crate::collector::default_params;
    use crate::indicators::evaluate;

    fn station() -> Station {
        Station::new("deb", "De Bilt", 52.1, 5.18, 2.0).unwrap()
    }

    // Reference efficiency and operation-time tables for a Dutch climate.
    fn reference_tables() -> SweepResult {
        SweepResult::from_tables(
            SweepGrid::default(),
            station(),
            &[vec![30.6, 24.7, 20.2], vec![39.0, 30.9, 25.2], vec![44.3, 34.8, 28.0]],
            &[vec![29.8, 26.5, 23.7], vec![33.1, 29.5, 26.5], vec![34.5, 30.9, 27.7]],
        )
        .unwrap()
    }

    #[test]
    fn default_grid_has_nine_cells() {
        let g = SweepGrid::default();
        g.validate().unwrap();
        assert_eq!(g.cell_count(), 9);
        assert_eq!(g.mdot_values[1], 1.0 / 60.0);
    }

    #[test]
    fn grid_validation() {
        let bad = [
            SweepGrid { d1_values: vec![], mdot_values: vec![1.0] },
            SweepGrid { d1_values: vec![0.02, 0.02], mdot_values: vec![1.0] },
            SweepGrid { d1_values: vec![0.05, 0.02], mdot_values: vec![1.0] },
            SweepGrid { d1_values: vec![0.02], mdot_values: vec![-1.0] },
        ];
        for g in bad {
            assert!(g.validate().is_err(), "{g:?}");
        }
    }

    #[test]
    fn best_of_reference_tables() {
        let best = best_config(&reference_tables());
        assert_eq!(best.d1, 0.020);
        assert_eq!(best.mdot, 2.0 / 60.0);
        assert_eq!(best.pf_p, 44.3);
        assert_eq!(best.pf_t, 34.5);
    }

    #[test]
    fn ties_prefer_lower_flow() {
        let equal = vec![vec![10.0; 3]; 3];
        let r = SweepResult::from_tables(SweepGrid::default(), station(), &equal, &equal).unwrap();
        let best = best_config(&r);
        assert_eq!(best.mdot, 0.5 / 60.0);
        assert_eq!(best.d1, 0.020);

        let pf_t = vec![vec![1.0, 1.0, 1.0], vec![1.0, 5.0, 1.0], vec![1.0, 1.0, 1.0]];
        let r = SweepResult::from_tables(SweepGrid::default(), station(), &equal, &pf_t).unwrap();
        let best = best_config(&r);
        assert_eq!((best.mdot, best.d1), (1.0 / 60.0, 0.035));
    }

    #[test]
    fn single_cell_grid() {
        let climate = generate_synthetic(&SyntheticProfile::default()).unwrap();
        let grid = SweepGrid::single(0.035, 1.0 / 60.0);
        let r = run_sweep(&default_params(), &grid, &climate, &SweepOptions::default()).unwrap();
        let direct = evaluate(&default_params(), &climate, 50.0).unwrap();
        assert_eq!(r.cells().len(), 1);
        assert_eq!(r.cell(0, 0), SweepCell { pf_p: direct.pf_p, pf_t: direct.pf_t });
        assert_eq!(best_config(&r).pf_p, direct.pf_p);

        let text = format_tables(&r);
        let parsed = parse_tables(&text).unwrap();
        assert_eq!(parsed.pf_p.len(), 1);
        assert_eq!(parsed.pf_p[0].len(), 1);
    }

    #[test]
    fn fixed_capacities_option() {
        let climate = generate_synthetic(&SyntheticProfile::default()).unwrap();
        let grid = SweepGrid::single(0.050, 1.0 / 60.0);
        let fixed = SweepOptions {
            rederive_capacities: false,
            ..Default::default()
        };
        let p = cell_params(&default_params(), 0.05, 1.0 / 60.0, &fixed).unwrap();
        assert_eq!(p.c1, Some(2300.0 * 880.0 * 0.035));
        let a = run_sweep(&default_params(), &grid, &climate, &fixed).unwrap();
        let b = run_sweep(&default_params(), &grid, &climate, &SweepOptions::default()).unwrap();
        assert_ne!(a.cell(0, 0), b.cell(0, 0));
    }

    #[test]
    fn formatted_reference_table() {
        let text = format_tables(&reference_tables());
        let first_row = text.lines().nth(2).unwrap();
        assert!(first_row.starts_with("MF=0.5 kg/min"), "{first_row}");
        assert_eq!(first_row.split_whitespace().nth(2), Some("30.6"));
        assert!(text.lines().nth(1).unwrap().contains("d=20 mm"));
        assert!(text.contains(OPERATION_TITLE));

        let parsed = parse_tables(&text).unwrap();
        assert_eq!(parsed.d1_mm, vec![20.0, 35.0, 50.0]);
        assert_eq!(parsed.mdot_kg_per_min, vec![0.5, 1.0, 2.0]);
        assert_eq!(parsed.pf_p[2][0], 44.3);
        assert_eq!(parsed.pf_t[0][2], 23.7);
    }

    #[test]
    fn malformed_tables_rejected() {
        assert!(parse_tables("").is_err());
        assert!(parse_tables("Simulated yearly mean efficiency PF_p [%]\n  d=20 mm\nMF=1 kg/min 3.0 4.0\n").is_err());
    }
}
