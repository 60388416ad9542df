//! The five pipeline commands. Each takes a validated [`RunConfig`] and
//! writes its outputs below the configured directories.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use ssmap::climate::{list_wac_files, load_station_set, parse_wac_lenient, validate_series, write_wac, ClimateSeries, IssueKind};
use ssmap::collector::simulate_collector;
use ssmap::indicators::evaluate_trajectory;
use ssmap::mapping::{self, Colormap, StationIndicator};
use ssmap::sweep::{best_config, format_tables, run_sweep};

use crate::config::{RunConfig, Workers};
use crate::error::{CliError, ErrorCode};
use crate::synth;

pub const STATION_INDEX: &str = "stations.csv";
pub const VALIDATION_REPORT: &str = "validation.csv";
pub const VALIDATED_DIR: &str = "validated";
pub const SIMULATE_DIR: &str = "simulate";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const SWEEP_DIR: &str = "sweep";
pub const CELLS_FILE: &str = "cells.csv";
pub const BEST_FILE: &str = "best.csv";
pub const MAP_DIR: &str = "map";

/// Runs `f` on a rayon pool sized by `workers`.
pub fn with_workers<T: Send>(workers: Workers, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.threads())
        .build()
        .map_err(|e| CliError::new(ErrorCode::Config, format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// File name stem for a station id.
pub fn file_stem(id: &str) -> String {
    let mut s: String = id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' })
        .collect();
    if s.starts_with('.') {
        s.insert(0, '_');
    }
    s
}

fn station_stems(set: &[ClimateSeries]) -> Result<Vec<String>, CliError> {
    let stems: Vec<String> = set.iter().map(|s| file_stem(&s.station.id)).collect();
    let mut seen = BTreeSet::new();
    for (stem, s) in stems.iter().zip(set) {
        if !seen.insert(stem.as_str()) {
            return Err(CliError::new(
                ErrorCode::Input,
                format!("station id {:?} maps to an output file name already in use", s.station.id),
            ));
        }
    }
    Ok(stems)
}

fn load_stations(cfg: &RunConfig) -> Result<Vec<ClimateSeries>, CliError> {
    let set = load_station_set(&cfg.climate_dir)?;
    if set.is_empty() {
        return Err(CliError::new(
            ErrorCode::Input,
            format!("no .wac files in {}", cfg.climate_dir.display()),
        ));
    }
    Ok(set)
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct SynthReport {
    pub stations: usize,
    pub index: PathBuf,
}

/// Writes `synth.count` station files and an index into `climate_dir`.
pub fn cmd_synth(cfg: &RunConfig) -> Result<SynthReport, CliError> {
    let dir = &cfg.climate_dir;
    create_dir(dir)?;
    let stations = synth::stations(&cfg.synth)?;
    with_workers(cfg.workers, || {
        stations.par_iter().try_for_each(|st| {
            let series = synth::station_climate(&cfg.synth, st)?;
            write_file(&dir.join(format!("{}.wac", file_stem(&st.id))), write_wac(&series))
        })
    })??;
    let mut index = String::from("id,name,lat,lon,elev,file\n");
    for st in &stations {
        let _ = writeln!(
            index,
            "{},{},{},{},{},{}.wac",
            st.id,
            st.name,
            st.latitude,
            st.longitude,
            st.elevation,
            file_stem(&st.id)
        );
    }
    let index_path = dir.join(STATION_INDEX);
    write_file(&index_path, index)?;
    Ok(SynthReport {
        stations: stations.len(),
        index: index_path,
    })
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateReport {
    pub files: usize,
    pub repaired: usize,
    pub failed: usize,
    pub report: PathBuf,
}

enum FileOutcome {
    Ok { station: String, issues: Vec<(String, usize, usize, &'static str)> },
    Failed(String),
}

/// Checks every climate file, repairing short gaps. Repaired copies go to
/// `output_dir/validated`; every issue and failure is listed in
/// `output_dir/validation.csv`. Fails if any file could not be repaired.
pub fn cmd_validate(cfg: &RunConfig) -> Result<ValidateReport, CliError> {
    let files = list_wac_files(&cfg.climate_dir)?;
    let out_dir = cfg.output_dir.join(VALIDATED_DIR);
    create_dir(&out_dir)?;
    let outcomes = with_workers(cfg.workers, || {
        files
            .par_iter()
            .map(|path| {
                let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
                let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                let checked = parse_wac_lenient(&text).and_then(|s| validate_series(&s, true));
                let outcome = match checked {
                    Ok((fixed, issues)) => {
                        write_file(&out_dir.join(&name), write_wac(&fixed))?;
                        let issues = issues
                            .iter()
                            .map(|i| {
                                let kind = match i.kind {
                                    IssueKind::GapFilled => "gap_filled",
                                    IssueKind::DiffuseClamped => "diffuse_clamped",
                                };
                                (i.field.to_string(), i.start_hour, i.length, kind)
                            })
                            .collect();
                        FileOutcome::Ok {
                            station: fixed.station.id,
                            issues,
                        }
                    }
                    Err(e) => FileOutcome::Failed(e.to_string()),
                };
                Ok((name, outcome))
            })
            .collect::<Result<Vec<_>, CliError>>()
    })??;

    let report_path = cfg.output_dir.join(VALIDATION_REPORT);
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::new(ErrorCode::Io, e.to_string());
    w.write_record(["file", "station", "status", "field", "start_hour", "length", "detail"]).map_err(csv_err)?;
    let (mut repaired, mut failed) = (0, 0);
    for (name, outcome) in &outcomes {
        match outcome {
            FileOutcome::Ok { station, issues } => {
                if issues.is_empty() {
                    w.write_record([name.as_str(), station, "ok", "", "", "", ""]).map_err(csv_err)?;
                } else {
                    repaired += 1;
                }
                for (field, start, len, kind) in issues {
                    w.write_record([name.as_str(), station, "repaired", field, &start.to_string(), &len.to_string(), kind])
                        .map_err(csv_err)?;
                }
            }
            FileOutcome::Failed(msg) => {
                failed += 1;
                w.write_record([name.as_str(), "", "error", "", "", "", msg]).map_err(csv_err)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::new(ErrorCode::Io, e.to_string()))?;
    write_file(&report_path, bytes)?;
    if failed > 0 {
        return Err(CliError::new(
            ErrorCode::Climate,
            format!("{failed} of {} files failed validation; see {}", outcomes.len(), report_path.display()),
        ));
    }
    Ok(ValidateReport {
        files: outcomes.len(),
        repaired,
        failed,
        report: report_path,
    })
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateReport {
    pub summary: PathBuf,
    pub indicators: Vec<StationIndicator>,
}

/// Simulates the configured collector at every station. Hourly states and
/// fluxes go to `output_dir/simulate/<id>.csv`, the indicators to
/// `output_dir/summary.csv`.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<SimulateReport, CliError> {
    let params = cfg.params()?;
    let options = cfg.eval_options();
    let set = load_stations(cfg)?;
    let stems = station_stems(&set)?;
    let dir = cfg.output_dir.join(SIMULATE_DIR);
    create_dir(&dir)?;
    let results = with_workers(cfg.workers, || {
        set.par_iter()
            .zip(&stems)
            .map(|(climate, stem)| {
                let traj = simulate_collector(&params, climate)?;
                let result = evaluate_trajectory(&params, climate, &traj, &options)?;
                let mut text = String::from("hour,ta,isgh,t1,t2,t3,pout,p50\n");
                for (t, rec) in climate.records.iter().enumerate() {
                    let x = traj.state(t + 1);
                    let _ = writeln!(
                        text,
                        "{t},{},{},{},{},{},{},{}",
                        rec.ta, rec.isgh, x[0], x[1], x[2], result.pout[t], result.p50[t]
                    );
                }
                write_file(&dir.join(format!("{stem}.csv")), text)?;
                Ok((climate.station.clone(), result))
            })
            .collect::<Result<Vec<_>, CliError>>()
    })??;
    let indicators = mapping::collect(&results)?;
    let summary = cfg.output_dir.join(SUMMARY_FILE);
    write_file(&summary, mapping::write_station_csv(&indicators))?;
    Ok(SimulateReport { summary, indicators })
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub stations: usize,
    pub cells_per_station: usize,
    pub best: PathBuf,
    pub indicators: Vec<StationIndicator>,
}

/// Runs the configuration grid at every station. Writes the two tables per
/// station to `output_dir/sweep/<id>.txt`, every cell to
/// `output_dir/sweep/cells.csv` and the best cell per station to
/// `output_dir/best.csv`.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<SweepReport, CliError> {
    let params = cfg.params()?;
    let grid = cfg.sweep.grid();
    let options = cfg.sweep_options();
    let set = load_stations(cfg)?;
    let stems = station_stems(&set)?;
    let dir = cfg.output_dir.join(SWEEP_DIR);
    create_dir(&dir)?;
    let results = with_workers(cfg.workers, || {
        set.par_iter()
            .zip(&stems)
            .map(|(climate, stem)| {
                let result = run_sweep(&params, &grid, climate, &options)?;
                write_file(&dir.join(format!("{stem}.txt")), format_tables(&result))?;
                Ok(result)
            })
            .collect::<Result<Vec<_>, CliError>>()
    })??;

    let mut cells = String::from("id,d1,mdot,pf_p,pf_t\n");
    for r in &results {
        for (i_mdot, i_d1, c) in r.iter() {
            let _ = writeln!(
                cells,
                "{},{},{},{},{}",
                r.station.id, grid.d1_values[i_d1], grid.mdot_values[i_mdot], c.pf_p, c.pf_t
            );
        }
    }
    write_file(&dir.join(CELLS_FILE), cells)?;

    let best: Vec<_> = results.iter().map(|r| (r.station.clone(), best_config(r))).collect();
    let indicators = mapping::collect(&best)?;
    let best_path = cfg.output_dir.join(BEST_FILE);
    write_file(&best_path, mapping::write_station_csv(&indicators))?;
    Ok(SweepReport {
        stations: results.len(),
        cells_per_station: grid.cell_count(),
        best: best_path,
        indicators,
    })
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct MapReport {
    pub field: String,
    pub stations: usize,
    pub rows: usize,
    pub cols: usize,
    pub files: Vec<PathBuf>,
}

/// Station indicators from whichever of `summary.csv` and `best.csv` exist.
pub fn load_indicators(output_dir: &Path) -> Result<Vec<StationIndicator>, CliError> {
    let mut merged: Option<Vec<StationIndicator>> = None;
    for name in [SUMMARY_FILE, BEST_FILE] {
        let path = output_dir.join(name);
        if !path.is_file() {
            continue;
        }
        let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let rows = mapping::read_station_csv(&text)
            .map_err(|e| CliError::new(ErrorCode::Mapping, format!("{}: {e}", path.display())))?;
        merged = Some(match merged {
            None => rows,
            Some(base) => mapping::merge(base, rows),
        });
    }
    merged.ok_or_else(|| {
        CliError::new(
            ErrorCode::Input,
            format!(
                "neither {SUMMARY_FILE} nor {BEST_FILE} found in {}; run simulate or sweep first",
                output_dir.display()
            ),
        )
    })
}

/// Interpolates `field` and writes `<field>.csv`, `.geojson`, `.asc` and
/// `.ppm` into `output_dir/map`.
pub fn cmd_map(cfg: &RunConfig, field: &str) -> Result<MapReport, CliError> {
    let all = load_indicators(&cfg.output_dir)?;
    let names = mapping::field_names(&all);
    if !names.iter().any(|n| n == field) {
        return Err(CliError::new(
            ErrorCode::UnknownField,
            format!("unknown field {field:?}; available: {}", names.join(", ")),
        ));
    }
    let stations: Vec<StationIndicator> = all
        .into_iter()
        .filter_map(|mut s| {
            let v = s.values.remove(field)?;
            s.values.clear();
            s.values.insert(field.to_string(), v);
            Some(s)
        })
        .collect();
    let raster = with_workers(cfg.workers, || mapping::idw_interpolate(&stations, field, &cfg.map.grid, &cfg.map.idw))??;

    let dir = cfg.output_dir.join(MAP_DIR);
    create_dir(&dir)?;
    let stem = file_stem(field);
    let files = vec![
        (dir.join(format!("{stem}.csv")), mapping::write_station_csv(&stations).into_bytes()),
        (dir.join(format!("{stem}.geojson")), mapping::write_geojson(&stations).into_bytes()),
        (dir.join(format!("{stem}.asc")), mapping::write_ascii_grid(&raster).into_bytes()),
        (dir.join(format!("{stem}.ppm")), mapping::write_ppm(&raster, &Colormap::default(), None)),
    ];
    for (path, bytes) in &files {
        write_file(path, bytes)?;
    }
    Ok(MapReport {
        field: field.to_string(),
        stations: stations.len(),
        rows: raster.rows,
        cols: raster.cols,
        files: files.into_iter().map(|(p, _)| p).collect(),
    })
}
