//! Hourly climate series for one station and one year.
//!
//! A record carries the nine common external climate parameters (global and
//! diffuse horizontal radiation, cloud cover, air temperature, relative
//! humidity, wind speed and direction, rain intensity and long-wave
//! radiation). Series are read from and written to a WAC-like text format,
//! imported from arbitrary CSV exports through a column map, or generated
//! synthetically from a small analytic profile.
//!
//! Timestamps are local standard time; hour `i` of a series is the `i`-th
//! hour after 1 January 00:00 of `start_year`.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const HOURS_PER_YEAR: usize = 8760;
pub const HOURS_PER_LEAP_YEAR: usize = 8784;

/// First line of every WAC-like file.
pub const WAC_MAGIC: &str = "WACLIKE 1.0";
/// Column header line of every WAC-like file.
pub const WAC_COLUMNS: &str = "isgh,isd,ci,ta,hrel,ws,wd,rn,ilah";
/// Marker written for an empty station name.
const EMPTY_FIELD: &str = "\"\"";
/// Data rows start on this (1-based) line of a WAC-like file.
const WAC_FIRST_DATA_LINE: usize = 5;

/// Longest run of invalid hours that gap filling will interpolate.
pub const MAX_GAP_HOURS: usize = 3;
/// Allowed excess of diffuse over global radiation, for rounding in source data.
pub const DIFFUSE_TOLERANCE: f64 = 1.0;

#[derive(Debug, Error)]
pub enum ClimateError {
    #[error("line {line}: malformed header: {message}")]
    Header { line: usize, message: String },
    #[error("line {line}: wrong column count: expected {expected}, found {found}")]
    ColumnCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: column {column}: non-numeric value {value:?}")]
    NotNumeric {
        line: usize,
        column: String,
        value: String,
    },
    #[error("line {line}: {field} = {value} is out of range")]
    OutOfRange {
        line: usize,
        field: Field,
        value: f64,
    },
    #[error("line {line}: row count mismatch: expected {expected} hourly rows, found {found}")]
    RowCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}: mapped column {column} for {field} does not exist ({available} columns)")]
    MissingColumn {
        row: usize,
        field: Field,
        column: usize,
        available: usize,
    },
    #[error("column map must cover {0}")]
    UnmappedField(Field),
    #[error("row {row}, column {column}: {message}")]
    Csv {
        row: usize,
        column: usize,
        message: String,
    },
    #[error("invalid station: {0}")]
    InvalidStation(String),
    #[error("invalid synthetic profile: {0}")]
    InvalidProfile(String),
    #[error("hour {hour}: invalid {field} value {value}")]
    InvalidValue { hour: usize, field: Field, value: f64 },
    #[error("hour {start_hour}: gap of {length} h in {field} exceeds the {MAX_GAP_HOURS} h fill limit")]
    GapTooLong {
        field: Field,
        start_hour: usize,
        length: usize,
    },
    #[error("series length {found} does not match {expected} hours of year {year}")]
    SeriesLength {
        year: i32,
        expected: usize,
        found: usize,
    },
    #[error("duplicate station id {0:?}")]
    DuplicateStation(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: {source}")]
    File {
        file: String,
        #[source]
        source: Box<ClimateError>,
    },
}

pub fn is_leap_year(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

pub fn hours_in_year(year: i32) -> usize {
    if is_leap_year(year) {
        HOURS_PER_LEAP_YEAR
    } else {
        HOURS_PER_YEAR
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Station {
    pub id: String,
    pub name: String,
    /// Degrees north, [-90, 90].
    pub latitude: f64,
    /// Degrees east, [-180, 180].
    pub longitude: f64,
    /// Meters above sea level.
    pub elevation: f64,
}

impl Station {
    pub fn new(
        id: impl Into<String>,
        name: impl Into<String>,
        latitude: f64,
        longitude: f64,
        elevation: f64,
    ) -> Result<Self, ClimateError> {
        let station = Self {
            id: id.into(),
            name: name.into(),
            latitude,
            longitude,
            elevation,
        };
        station.validate()?;
        Ok(station)
    }

    /// Checks coordinate bounds and that `id`/`name` can be written to a
    /// comma-separated header without quoting.
    pub fn validate(&self) -> Result<(), ClimateError> {
        if self.id.is_empty() {
            return Err(ClimateError::InvalidStation("empty id".into()));
        }
        for (what, text) in [("id", &self.id), ("name", &self.name)] {
            if text.contains([',', '\n', '\r', '"']) {
                return Err(ClimateError::InvalidStation(format!(
                    "{what} {text:?} contains a comma, quote or line break"
                )));
            }
        }
        if !(self.latitude.is_finite() && (-90.0..=90.0).contains(&self.latitude)) {
            return Err(ClimateError::InvalidStation(format!(
                "latitude {} outside [-90, 90]",
                self.latitude
            )));
        }
        if !(self.longitude.is_finite() && (-180.0..=180.0).contains(&self.longitude)) {
            return Err(ClimateError::InvalidStation(format!(
                "longitude {} outside [-180, 180]",
                self.longitude
            )));
        }
        if !self.elevation.is_finite() {
            return Err(ClimateError::InvalidStation("non-finite elevation".into()));
        }
        Ok(())
    }
}

/// The nine climate columns, in file order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Isgh,
    Isd,
    Ci,
    Ta,
    Hrel,
    Ws,
    Wd,
    Rn,
    Ilah,
}

impl Field {
    pub const ALL: [Field; 9] = [
        Field::Isgh,
        Field::Isd,
        Field::Ci,
        Field::Ta,
        Field::Hrel,
        Field::Ws,
        Field::Wd,
        Field::Rn,
        Field::Ilah,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Field::Isgh => "isgh",
            Field::Isd => "isd",
            Field::Ci => "ci",
            Field::Ta => "ta",
            Field::Hrel => "hrel",
            Field::Ws => "ws",
            Field::Wd => "wd",
            Field::Rn => "rn",
            Field::Ilah => "ilah",
        }
    }

    pub fn from_name(name: &str) -> Option<Field> {
        Field::ALL.into_iter().find(|f| f.name() == name)
    }

    fn index(self) -> usize {
        self as usize
    }

    /// Per-field range check. Non-finite values are never in range.
    pub fn in_range(self, value: f64) -> bool {
        if !value.is_finite() {
            return false;
        }
        match self {
            Field::Isgh | Field::Isd | Field::Ws | Field::Rn => value >= 0.0,
            Field::Ci => (0.0..=1.0).contains(&value),
            Field::Hrel => (0.0..=100.0).contains(&value),
            Field::Wd => (0.0..360.0).contains(&value),
            Field::Ta | Field::Ilah => true,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One hour of climate data.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClimateRecord {
    /// Horizontal global solar radiation, W/m².
    pub isgh: f64,
    /// Diffuse solar radiation, W/m².
    pub isd: f64,
    /// Cloud cover, fraction.
    pub ci: f64,
    /// Air temperature, °C.
    pub ta: f64,
    /// Relative humidity, %.
    pub hrel: f64,
    /// Wind speed, m/s.
    pub ws: f64,
    /// Wind direction, degrees.
    pub wd: f64,
    /// Rain intensity, mm/h.
    pub rn: f64,
    /// Long-wave radiation, W/m².
    pub ilah: f64,
}

impl ClimateRecord {
    pub fn from_values(v: [f64; 9]) -> Self {
        Self {
            isgh: v[0],
            isd: v[1],
            ci: v[2],
            ta: v[3],
            hrel: v[4],
            ws: v[5],
            wd: v[6],
            rn: v[7],
            ilah: v[8],
        }
    }

    pub fn values(&self) -> [f64; 9] {
        [
            self.isgh, self.isd, self.ci, self.ta, self.hrel, self.ws, self.wd, self.rn, self.ilah,
        ]
    }

    pub fn get(&self, field: Field) -> f64 {
        self.values()[field.index()]
    }

    pub fn set(&mut self, field: Field, value: f64) {
        let mut v = self.values();
        v[field.index()] = value;
        *self = Self::from_values(v);
    }

    /// First violated invariant, if any.
    pub fn check(&self) -> Option<(Field, f64)> {
        for field in Field::ALL {
            let value = self.get(field);
            if !field.in_range(value) {
                return Some((field, value));
            }
        }
        if self.isd > self.isgh + DIFFUSE_TOLERANCE {
            return Some((Field::Isd, self.isd));
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClimateSeries {
    pub station: Station,
    pub start_year: i32,
    pub records: Vec<ClimateRecord>,
}

impl ClimateSeries {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn column(&self, field: Field) -> Vec<f64> {
        self.records.iter().map(|r| r.get(field)).collect()
    }

    /// Full structural and range check without any repair.
    pub fn check(&self) -> Result<(), ClimateError> {
        self.station.validate()?;
        self.check_length()?;
        for (hour, record) in self.records.iter().enumerate() {
            if let Some((field, value)) = record.check() {
                return Err(ClimateError::InvalidValue { hour, field, value });
            }
        }
        Ok(())
    }

    fn check_length(&self) -> Result<(), ClimateError> {
        let expected = hours_in_year(self.start_year);
        if self.records.len() != expected {
            return Err(ClimateError::SeriesLength {
                year: self.start_year,
                expected,
                found: self.records.len(),
            });
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// WAC-like text format
// ---------------------------------------------------------------------------

/// Parses a WAC-like file and checks every record invariant.
pub fn parse_wac(text: &str) -> Result<ClimateSeries, ClimateError> {
    parse_wac_inner(text, true)
}

/// Parses a WAC-like file, accepting empty fields and `NaN` as missing values
/// and skipping range checks. Structure and row count are still enforced.
/// Pass the result through [`validate_series`] before use.
pub fn parse_wac_lenient(text: &str) -> Result<ClimateSeries, ClimateError> {
    parse_wac_inner(text, false)
}

fn parse_wac_inner(text: &str, strict: bool) -> Result<ClimateSeries, ClimateError> {
    let mut lines = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l));

    let magic = lines.next().unwrap_or_default();
    if magic != WAC_MAGIC {
        return Err(header_error(1, format!("expected {WAC_MAGIC:?}, found {magic:?}")));
    }

    let station_line = lines
        .next()
        .ok_or_else(|| header_error(2, "missing station line".into()))?;
    let station = parse_station_line(station_line)?;

    let year_line = lines
        .next()
        .ok_or_else(|| header_error(3, "missing year line".into()))?;
    let start_year = match year_line.split_once(',') {
        Some(("year", y)) => y
            .trim()
            .parse::<i32>()
            .map_err(|_| header_error(3, format!("bad year {y:?}")))?,
        _ => return Err(header_error(3, format!("expected `year,<start_year>`, found {year_line:?}"))),
    };

    let columns = lines
        .next()
        .ok_or_else(|| header_error(4, "missing column header".into()))?;
    if columns != WAC_COLUMNS {
        return Err(header_error(4, format!("expected {WAC_COLUMNS:?}, found {columns:?}")));
    }

    let body: Vec<&str> = lines.collect();
    // Trailing blank lines are tolerated, interior ones are not.
    let data_len = body.iter().rposition(|l| !l.trim().is_empty()).map_or(0, |p| p + 1);

    let mut records = Vec::with_capacity(data_len);
    for (offset, row) in body[..data_len].iter().enumerate() {
        let line = WAC_FIRST_DATA_LINE + offset;
        let mut values = [0.0; 9];
        let mut found = 0;
        for (col, raw) in row.split(',').enumerate() {
            found += 1;
            if col >= 9 {
                continue;
            }
            values[col] = parse_number(raw, strict).ok_or_else(|| ClimateError::NotNumeric {
                line,
                column: Field::ALL[col].name().to_string(),
                value: raw.to_string(),
            })?;
        }
        if found != 9 {
            return Err(ClimateError::ColumnCount {
                line,
                expected: 9,
                found,
            });
        }
        let record = ClimateRecord::from_values(values);
        if strict {
            if let Some((field, value)) = record.check() {
                return Err(ClimateError::OutOfRange { line, field, value });
            }
        }
        records.push(record);
    }

    let expected = hours_in_year(start_year);
    if records.len() != expected {
        return Err(ClimateError::RowCount {
            line: WAC_FIRST_DATA_LINE + data_len.saturating_sub(1),
            expected,
            found: records.len(),
        });
    }

    Ok(ClimateSeries {
        station,
        start_year,
        records,
    })
}

fn parse_number(raw: &str, strict: bool) -> Option<f64> {
    let raw = raw.trim();
    if !strict && (raw.is_empty() || raw.eq_ignore_ascii_case("nan")) {
        return Some(f64::NAN);
    }
    // Rust accepts "inf"/"NaN" spellings; a strict file has plain decimals only.
    if raw.is_empty() || raw.bytes().any(|b| b.is_ascii_alphabetic() && b != b'e' && b != b'E') {
        return None;
    }
    raw.parse().ok()
}

fn header_error(line: usize, message: String) -> ClimateError {
    ClimateError::Header { line, message }
}

fn parse_station_line(line: &str) -> Result<Station, ClimateError> {
    let parts: Vec<&str> = line.split(',').collect();
    if parts.len() != 6 || parts[0] != "station" {
        return Err(header_error(
            2,
            format!("expected `station,<id>,<name>,<lat>,<lon>,<elev>`, found {line:?}"),
        ));
    }
    let number = |idx: usize, what: &str| -> Result<f64, ClimateError> {
        parse_number(parts[idx], true)
            .ok_or_else(|| header_error(2, format!("bad {what} {:?}", parts[idx])))
    };
    let name = if parts[2] == EMPTY_FIELD { "" } else { parts[2] };
    let station = Station {
        id: parts[1].to_string(),
        name: name.to_string(),
        latitude: number(3, "latitude")?,
        longitude: number(4, "longitude")?,
        elevation: number(5, "elevation")?,
    };
    station
        .validate()
        .map_err(|e| header_error(2, e.to_string()))?;
    Ok(station)
}

/// Writes a series in the WAC-like format. Numbers use the shortest decimal
/// representation that parses back to the same `f64`.
pub fn write_wac(series: &ClimateSeries) -> String {
    use std::fmt::Write;

    let mut out = String::with_capacity(64 + series.len() * 72);
    let s = &series.station;
    let name = if s.name.is_empty() { EMPTY_FIELD } else { &s.name };
    let _ = writeln!(out, "{WAC_MAGIC}");
    let _ = writeln!(
        out,
        "station,{},{},{},{},{}",
        s.id, name, s.latitude, s.longitude, s.elevation
    );
    let _ = writeln!(out, "year,{}", series.start_year);
    let _ = writeln!(out, "{WAC_COLUMNS}");
    for r in &series.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.isgh, r.isd, r.ci, r.ta, r.hrel, r.ws, r.wd, r.rn, r.ilah
        );
    }
    out
}

// ---------------------------------------------------------------------------
// CSV import
// ---------------------------------------------------------------------------

/// Maps climate fields to 0-based CSV column indices.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ColumnMap {
    pub columns: BTreeMap<Field, usize>,
    /// Leading rows to skip (header lines).
    #[serde(default)]
    pub header_rows: usize,
}

impl ColumnMap {
    pub fn new<I: IntoIterator<Item = (Field, usize)>>(columns: I) -> Self {
        Self {
            columns: columns.into_iter().collect(),
            header_rows: 0,
        }
    }

    pub fn with_header_rows(mut self, rows: usize) -> Self {
        self.header_rows = rows;
        self
    }
}

/// Imports a comma-separated export. Fields absent from `map` default to 0.
pub fn parse_csv(
    text: &str,
    map: &ColumnMap,
    station: Station,
    start_year: i32,
) -> Result<ClimateSeries, ClimateError> {
    for required in [Field::Isgh, Field::Isd, Field::Ta] {
        if !map.columns.contains_key(&required) {
            return Err(ClimateError::UnmappedField(required));
        }
    }
    station.validate()?;

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());

    let mut records = Vec::with_capacity(hours_in_year(start_year));
    let mut last_row = 0;
    for (idx, row) in reader.records().enumerate() {
        let row_no = idx + 1;
        let row = row.map_err(|e| ClimateError::Csv {
            row: row_no,
            column: 0,
            message: e.to_string(),
        })?;
        if idx < map.header_rows {
            continue;
        }
        last_row = row_no;
        let mut record = ClimateRecord::default();
        for (&field, &column) in &map.columns {
            let raw = row.get(column).ok_or(ClimateError::MissingColumn {
                row: row_no,
                field,
                column,
                available: row.len(),
            })?;
            let value = parse_number(raw, true).ok_or_else(|| ClimateError::Csv {
                row: row_no,
                column,
                message: format!("cannot parse {raw:?} as a number for {field}"),
            })?;
            record.set(field, value);
        }
        if let Some((field, value)) = record.check() {
            return Err(ClimateError::OutOfRange {
                line: row_no,
                field,
                value,
            });
        }
        records.push(record);
    }

    let expected = hours_in_year(start_year);
    if records.len() != expected {
        return Err(ClimateError::RowCount {
            line: last_row,
            expected,
            found: records.len(),
        });
    }
    Ok(ClimateSeries {
        station,
        start_year,
        records,
    })
}

// ---------------------------------------------------------------------------
// Synthetic climates
// ---------------------------------------------------------------------------

/// Analytic climate used for desk-scale runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticProfile {
    /// Annual mean air temperature, °C.
    pub mean_ta: f64,
    /// Half the summer-winter swing, K. Coldest at mid-January.
    pub annual_amplitude: f64,
    /// Half the day-night swing, K. Warmest at 14:00.
    pub diurnal_amplitude: f64,
    /// Clear-sky noon value of global horizontal radiation, W/m².
    pub peak_irradiance: f64,
    /// Cloud fraction in [0, 1].
    pub cloud: f64,
    /// Degrees north.
    pub latitude: f64,
}

impl Default for SyntheticProfile {
    /// Netherlands-like climate.
    fn default() -> Self {
        Self {
            mean_ta: 10.0,
            annual_amplitude: 8.0,
            diurnal_amplitude: 4.0,
            peak_irradiance: 800.0,
            cloud: 0.6,
            latitude: 52.1,
        }
    }
}

pub const SYNTHETIC_YEAR: i32 = 2001;
const COLDEST_HOUR: f64 = 14.0 * 24.0;
const WARMEST_HOUR_OF_DAY: f64 = 14.0;
const SUNRISE: f64 = 6.0;
const DAY_LENGTH: f64 = 12.0;

impl SyntheticProfile {
    pub fn validate(&self) -> Result<(), ClimateError> {
        let bad = |msg: &str| Err(ClimateError::InvalidProfile(msg.to_string()));
        if !self.mean_ta.is_finite() {
            return bad("mean temperature must be finite");
        }
        if !(self.annual_amplitude.is_finite() && self.annual_amplitude >= 0.0) {
            return bad("annual amplitude must be >= 0");
        }
        if !(self.diurnal_amplitude.is_finite() && self.diurnal_amplitude >= 0.0) {
            return bad("diurnal amplitude must be >= 0");
        }
        if !(self.peak_irradiance.is_finite() && self.peak_irradiance >= 0.0) {
            return bad("peak irradiance must be >= 0");
        }
        if !(0.0..=1.0).contains(&self.cloud) {
            return bad("cloud fraction must lie in [0, 1]");
        }
        if !(-90.0..=90.0).contains(&self.latitude) {
            return bad("latitude must lie in [-90, 90]");
        }
        Ok(())
    }
}

/// Deterministic hourly series for `profile` over [`SYNTHETIC_YEAR`].
///
/// Air temperature is the mean plus an annual cosine (minimum mid-January)
/// plus a diurnal cosine (maximum at 14:00). Global radiation is a half-sine
/// between 06:00 and 18:00 scaled by `1 - 0.75 * cloud`; diffuse radiation
/// is a cloud-weighted share of it. Remaining fields are constant.
pub fn generate_synthetic(profile: &SyntheticProfile) -> Result<ClimateSeries, ClimateError> {
    profile.validate()?;
    let station = Station::new("synthetic", "synthetic", profile.latitude, 0.0, 0.0)?;
    let n = hours_in_year(SYNTHETIC_YEAR);
    let sun_scale = profile.peak_irradiance * (1.0 - 0.75 * profile.cloud);
    let diffuse_share = 0.2 + 0.8 * profile.cloud;
    let two_pi = std::f64::consts::TAU;

    let records = (0..n)
        .map(|i| {
            let hour_of_day = (i % 24) as f64;
            let annual = -profile.annual_amplitude * (two_pi * (i as f64 - COLDEST_HOUR) / n as f64).cos();
            let diurnal =
                profile.diurnal_amplitude * (two_pi * (hour_of_day - WARMEST_HOUR_OF_DAY) / 24.0).cos();
            let phase = (hour_of_day - SUNRISE) / DAY_LENGTH;
            let isgh = if (0.0..=1.0).contains(&phase) {
                (sun_scale * (std::f64::consts::PI * phase).sin()).max(0.0)
            } else {
                0.0
            };
            ClimateRecord {
                isgh,
                isd: isgh * diffuse_share,
                ci: profile.cloud,
                ta: profile.mean_ta + annual + diurnal,
                hrel: 80.0,
                ws: 3.0,
                wd: 225.0,
                rn: 0.0,
                ilah: 300.0,
            }
        })
        .collect();

    Ok(ClimateSeries {
        station,
        start_year: SYNTHETIC_YEAR,
        records,
    })
}

// ---------------------------------------------------------------------------
// Validation and gap filling
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IssueKind {
    /// A run of invalid or missing values was linearly interpolated.
    GapFilled,
    /// Diffuse radiation exceeded global radiation and was set equal to it.
    DiffuseClamped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationIssue {
    pub field: Field,
    pub start_hour: usize,
    pub length: usize,
    pub kind: IssueKind,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            IssueKind::GapFilled => "gap filled",
            IssueKind::DiffuseClamped => "diffuse clamped to global",
        };
        write!(
            f,
            "{}: {} h from hour {} ({what})",
            self.field, self.length, self.start_hour
        )
    }
}

/// Checks every record invariant. With `gap_fill`, runs of at most
/// [`MAX_GAP_HOURS`] invalid values per field are repaired by linear
/// interpolation between the neighbouring valid hours (or by holding the
/// nearest valid value at the ends of the series) and reported; longer runs
/// are errors. Without `gap_fill` any violation is an error.
pub fn validate_series(
    series: &ClimateSeries,
    gap_fill: bool,
) -> Result<(ClimateSeries, Vec<ValidationIssue>), ClimateError> {
    series.station.validate()?;
    series.check_length()?;

    if !gap_fill {
        series.check()?;
        return Ok((series.clone(), Vec::new()));
    }

    let mut out = series.clone();
    let mut issues = Vec::new();
    let n = out.records.len();

    for field in Field::ALL {
        let mut hour = 0;
        while hour < n {
            if field.in_range(out.records[hour].get(field)) {
                hour += 1;
                continue;
            }
            let start = hour;
            while hour < n && !field.in_range(out.records[hour].get(field)) {
                hour += 1;
            }
            let length = hour - start;
            if length > MAX_GAP_HOURS {
                return Err(ClimateError::GapTooLong {
                    field,
                    start_hour: start,
                    length,
                });
            }
            let before = start.checked_sub(1).map(|h| out.records[h].get(field));
            let after = (hour < n).then(|| out.records[hour].get(field));
            for k in 0..length {
                let value = match (before, after) {
                    (Some(a), Some(b)) => a + (b - a) * (k + 1) as f64 / (length + 1) as f64,
                    (Some(a), None) => a,
                    (None, Some(b)) => b,
                    (None, None) => {
                        return Err(ClimateError::GapTooLong {
                            field,
                            start_hour: start,
                            length,
                        })
                    }
                };
                out.records[start + k].set(field, value);
            }
            issues.push(ValidationIssue {
                field,
                start_hour: start,
                length,
                kind: IssueKind::GapFilled,
            });
        }
    }

    let mut hour = 0;
    while hour < n {
        if out.records[hour].isd <= out.records[hour].isgh + DIFFUSE_TOLERANCE {
            hour += 1;
            continue;
        }
        let start = hour;
        while hour < n && out.records[hour].isd > out.records[hour].isgh + DIFFUSE_TOLERANCE {
            let r = &mut out.records[hour];
            r.isd = r.isgh;
            hour += 1;
        }
        issues.push(ValidationIssue {
            field: Field::Isd,
            start_hour: start,
            length: hour - start,
            kind: IssueKind::DiffuseClamped,
        });
    }

    Ok((out, issues))
}

// ---------------------------------------------------------------------------
// Directories of station files
// ---------------------------------------------------------------------------

pub fn read_wac_file(path: &Path) -> Result<ClimateSeries, ClimateError> {
    let text = fs::read_to_string(path).map_err(|source| ClimateError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_wac(&text)
}

pub fn write_wac_file(path: &Path, series: &ClimateSeries) -> Result<(), ClimateError> {
    fs::write(path, write_wac(series)).map_err(|source| ClimateError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// All `*.wac` files in `dir`, sorted by file name.
pub fn list_wac_files(dir: &Path) -> Result<Vec<PathBuf>, ClimateError> {
    let io_err = |source| ClimateError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err)? {
        let path = entry.map_err(io_err)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e.eq_ignore_ascii_case("wac")) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Parses and validates every `*.wac` file in `dir`. The result is sorted by
/// station id; the first failing file aborts the load.
pub fn load_station_set(dir: &Path) -> Result<Vec<ClimateSeries>, ClimateError> {
    let files = list_wac_files(dir)?;
    let mut series = files
        .par_iter()
        .map(|path| {
            read_wac_file(path).map_err(|e| ClimateError::File {
                file: path
                    .file_name()
                    .map(|f| f.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    series.sort_by(|a, b| a.station.id.cmp(&b.station.id));
    if let Some(pair) = series.windows(2).find(|w| w[0].station.id == w[1].station.id) {
        return Err(ClimateError::DuplicateStation(pair[0].station.id.clone()));
    }
    Ok(series)
}
