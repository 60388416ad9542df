//! Per-station indicator tables and their geographic rendering.
//!
//! Station values are interpolated onto a regular latitude/longitude grid
//! by inverse-distance weighting on great-circle distance, then written as
//! an ESRI ASCII grid and a binary PPM image. Station tables are written as
//! CSV and as a GeoJSON FeatureCollection.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::climate::Station;
use crate::indicators::PerformanceResult;
use crate::sweep::BestConfig;

pub const NODATA: f64 = -9999.0;
/// Grid nodes this close to a station (degrees of arc) take its value exactly.
pub const SNAP_DEGREES: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum MappingError {
    #[error("no stations to map")]
    Empty,
    #[error("duplicate station id {0:?}")]
    DuplicateStation(String),
    #[error("unknown field {0:?}")]
    UnknownField(String),
    #[error("station {station}: field {field} is not finite")]
    NonFinite { station: String, field: String },
    #[error("invalid field name {0:?}")]
    InvalidFieldName(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("IDW power must be positive, got {0}")]
    InvalidPower(f64),
    #[error("station table: {0}")]
    Table(String),
}

/// Named indicator values for one station.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationIndicator {
    pub station: Station,
    pub values: BTreeMap<String, f64>,
}

/// Anything that contributes named scalar values to a station map.
pub trait IndicatorSource {
    fn indicator_values(&self) -> Vec<(String, f64)>;
}

impl IndicatorSource for PerformanceResult {
    fn indicator_values(&self) -> Vec<(String, f64)> {
        vec![("pf_p".into(), self.pf_p), ("pf_t".into(), self.pf_t)]
    }
}

impl IndicatorSource for BestConfig {
    fn indicator_values(&self) -> Vec<(String, f64)> {
        vec![
            ("best_d1".into(), self.d1),
            ("best_mdot".into(), self.mdot),
            ("best_pf_p".into(), self.pf_p),
            ("best_pf_t".into(), self.pf_t),
        ]
    }
}

impl IndicatorSource for BTreeMap<String, f64> {
    fn indicator_values(&self) -> Vec<(String, f64)> {
        self.iter().map(|(k, v)| (k.clone(), *v)).collect()
    }
}

fn check_field_name(name: &str) -> Result<(), MappingError> {
    let reserved = ["id", "name", "lat", "lon"];
    if name.is_empty() || reserved.contains(&name) || name.contains([',', '"', '\n', '\r']) {
        return Err(MappingError::InvalidFieldName(name.to_string()));
    }
    Ok(())
}

/// One row per station, sorted by station id.
pub fn collect<T: IndicatorSource>(results: &[(Station, T)]) -> Result<Vec<StationIndicator>, MappingError> {
    if results.is_empty() {
        return Err(MappingError::Empty);
    }
    let mut rows = results
        .iter()
        .map(|(station, source)| {
            let mut values = BTreeMap::new();
            for (field, value) in source.indicator_values() {
                check_field_name(&field)?;
                if !value.is_finite() {
                    return Err(MappingError::NonFinite {
                        station: station.id.clone(),
                        field,
                    });
                }
                values.insert(field, value);
            }
            Ok(StationIndicator {
                station: station.clone(),
                values,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(|a, b| a.station.id.cmp(&b.station.id));
    if let Some(w) = rows.windows(2).find(|w| w[0].station.id == w[1].station.id) {
        return Err(MappingError::DuplicateStation(w[0].station.id.clone()));
    }
    Ok(rows)
}

/// Adds the fields of `extra` to the matching stations of `base`. Stations
/// present only in `extra` are appended; the result stays sorted by id.
pub fn merge(mut base: Vec<StationIndicator>, extra: Vec<StationIndicator>) -> Vec<StationIndicator> {
    for row in extra {
        match base.binary_search_by(|b| b.station.id.cmp(&row.station.id)) {
            Ok(i) => base[i].values.extend(row.values),
            Err(i) => base.insert(i, row),
        }
    }
    base
}

/// Names of every field present on at least one station.
pub fn field_names(indicators: &[StationIndicator]) -> Vec<String> {
    indicators
        .iter()
        .flat_map(|r| r.values.keys().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

// ---------------------------------------------------------------------------
// Grids and interpolation
// ---------------------------------------------------------------------------

/// Regular plate carrée grid with nodes at `lon_min + j·res`, `lat_max - i·res`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
    /// Node spacing, degrees.
    pub resolution: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            lat_min: 35.0,
            lat_max: 71.0,
            lon_min: -11.0,
            lon_max: 32.0,
            resolution: 0.5,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), MappingError> {
        let finite = [self.lat_min, self.lat_max, self.lon_min, self.lon_max, self.resolution]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(MappingError::InvalidGrid("non-finite bound".into()));
        }
        if !(self.resolution > 0.0) {
            return Err(MappingError::InvalidGrid("resolution must be positive".into()));
        }
        if self.lat_min > self.lat_max || self.lon_min > self.lon_max {
            return Err(MappingError::InvalidGrid("bounds are not ordered".into()));
        }
        if self.lat_min < -90.0 || self.lat_max > 90.0 || self.lon_min < -180.0 || self.lon_max > 180.0 {
            return Err(MappingError::InvalidGrid("bounds outside the globe".into()));
        }
        Ok(())
    }

    pub fn cols(&self) -> usize {
        ((self.lon_max - self.lon_min) / self.resolution).round() as usize + 1
    }

    pub fn rows(&self) -> usize {
        ((self.lat_max - self.lat_min) / self.resolution).round() as usize + 1
    }

    /// `(lat, lon)` of node `(row, col)`; row 0 is the northern edge.
    pub fn node(&self, row: usize, col: usize) -> (f64, f64) {
        (
            self.lat_max - row as f64 * self.resolution,
            self.lon_min + col as f64 * self.resolution,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdwParams {
    /// Distance exponent.
    pub power: f64,
    /// Nodes farther than this (degrees of arc) from every station are nodata.
    pub cutoff_degrees: f64,
}

impl Default for IdwParams {
    fn default() -> Self {
        Self {
            power: 2.0,
            cutoff_degrees: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RasterGrid {
    pub spec: GridSpec,
    pub rows: usize,
    pub cols: usize,
    /// Row-major from the north-west corner; [`NODATA`] where undefined.
    pub values: Vec<f64>,
    pub nodata: f64,
}

impl RasterGrid {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    /// Values that are not nodata.
    pub fn valid_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied().filter(move |&v| v != self.nodata)
    }
}

/// Central angle between two points, degrees (haversine form).
pub fn great_circle_degrees(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let dphi = p2 - p1;
    let dlambda = (lon2 - lon1).to_radians();
    let a = (dphi / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dlambda / 2.0).sin().powi(2);
    (2.0 * a.sqrt().min(1.0).asin()).to_degrees()
}

fn field_points(points: &[StationIndicator], field: &str) -> Result<Vec<(f64, f64, f64)>, MappingError> {
    let pts: Vec<_> = points
        .iter()
        .filter_map(|p| p.values.get(field).map(|&v| (p.station.latitude, p.station.longitude, v)))
        .collect();
    if pts.is_empty() {
        return Err(MappingError::UnknownField(field.to_string()));
    }
    Ok(pts)
}

fn idw_value(points: &[(f64, f64, f64)], lat: f64, lon: f64, params: &IdwParams) -> Option<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    let mut nearest = f64::INFINITY;
    for &(plat, plon, v) in points {
        let d = great_circle_degrees(lat, lon, plat, plon);
        if d <= SNAP_DEGREES {
            return Some(v);
        }
        nearest = nearest.min(d);
        let w = d.powf(-params.power);
        num += w * v;
        den += w;
    }
    if nearest > params.cutoff_degrees {
        return None;
    }
    // Clamp against rounding so the result never leaves the data range.
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.2), hi.max(p.2)));
    Some((num / den).clamp(lo, hi))
}

/// IDW estimate of `field` at one location; `None` outside the cutoff.
pub fn idw_at(
    points: &[StationIndicator],
    field: &str,
    lat: f64,
    lon: f64,
    params: &IdwParams,
) -> Result<Option<f64>, MappingError> {
    if !(params.power > 0.0 && params.power.is_finite()) {
        return Err(MappingError::InvalidPower(params.power));
    }
    let pts = field_points(points, field)?;
    Ok(idw_value(&pts, lat, lon, params))
}

/// Interpolates `field` over every node of `grid`. Only stations carrying
/// `field` take part.
pub fn idw_interpolate(
    points: &[StationIndicator],
    field: &str,
    grid: &GridSpec,
    params: &IdwParams,
) -> Result<RasterGrid, MappingError> {
    grid.validate()?;
    if !(params.power > 0.0 && params.power.is_finite()) {
        return Err(MappingError::InvalidPower(params.power));
    }
    let pts = field_points(points, field)?;
    let (rows, cols) = (grid.rows(), grid.cols());
    let values = (0..rows * cols)
        .into_par_iter()
        .map(|k| {
            let (lat, lon) = grid.node(k / cols, k % cols);
            idw_value(&pts, lat, lon, params).unwrap_or(NODATA)
        })
        .collect();
    Ok(RasterGrid {
        spec: *grid,
        rows,
        cols,
        values,
        nodata: NODATA,
    })
}

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

/// `id,name,lat,lon,<fields…>`; fields missing on a station are left empty.
pub fn write_station_csv(indicators: &[StationIndicator]) -> String {
    let fields = field_names(indicators);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["id".to_string(), "name".into(), "lat".into(), "lon".into()];
    header.extend(fields.iter().cloned());
    w.write_record(&header).expect("in-memory write");
    for row in indicators {
        let mut rec = vec![
            row.station.id.clone(),
            row.station.name.clone(),
            row.station.latitude.to_string(),
            row.station.longitude.to_string(),
        ];
        rec.extend(fields.iter().map(|f| row.values.get(f).map(f64::to_string).unwrap_or_default()));
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Reads a table written by [`write_station_csv`].
pub fn read_station_csv(text: &str) -> Result<Vec<StationIndicator>, MappingError> {
    let err = |m: String| MappingError::Table(m);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| err(e.to_string()))?.clone();
    if header.len() < 4 || &header[0] != "id" || &header[1] != "name" || &header[2] != "lat" || &header[3] != "lon" {
        return Err(err("header must start with id,name,lat,lon".into()));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| err(format!("line {line}: {e}")))?;
        let num = |j: usize| -> Result<f64, MappingError> {
            rec[j]
                .parse::<f64>()
                .map_err(|e| err(format!("line {line}, column {}: {e}", &header[j])))
        };
        let station = Station::new(&rec[0], &rec[1], num(2)?, num(3)?, 0.0)
            .map_err(|e| err(format!("line {line}: {e}")))?;
        let mut values = BTreeMap::new();
        for j in 4..header.len() {
            if rec.get(j).is_some_and(|v| !v.is_empty()) {
                values.insert(header[j].to_string(), num(j)?);
            }
        }
        rows.push(StationIndicator { station, values });
    }
    Ok(rows)
}

/// FeatureCollection with one Point per station; coordinates are `[lon, lat]`.
pub fn write_geojson(indicators: &[StationIndicator]) -> String {
    let features: Vec<Value> = indicators
        .iter()
        .map(|row| {
            let mut props = Map::new();
            props.insert("id".into(), json!(row.station.id));
            props.insert("name".into(), json!(row.station.name));
            for (k, v) in &row.values {
                props.insert(k.clone(), json!(v));
            }
            json!({
                "type": "Feature",
                "geometry": {
                    "type": "Point",
                    "coordinates": [row.station.longitude, row.station.latitude],
                },
                "properties": props,
            })
        })
        .collect();
    let fc = json!({ "type": "FeatureCollection", "features": features });
    let mut text = serde_json::to_string_pretty(&fc).expect("finite values serialize");
    text.push('\n');
    text
}

/// ESRI ASCII grid. Cells are centred on the grid nodes.
pub fn write_ascii_grid(grid: &RasterGrid) -> String {
    use std::fmt::Write;
    let res = grid.spec.resolution;
    let south = grid.spec.lat_max - (grid.rows - 1) as f64 * res;
    let mut out = String::new();
    let _ = writeln!(out, "ncols {}", grid.cols);
    let _ = writeln!(out, "nrows {}", grid.rows);
    let _ = writeln!(out, "xllcorner {}", grid.spec.lon_min - res / 2.0);
    let _ = writeln!(out, "yllcorner {}", south - res / 2.0);
    let _ = writeln!(out, "cellsize {res}");
    let _ = writeln!(out, "NODATA_value {}", grid.nodata);
    for row in grid.values.chunks(grid.cols) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

/// Piecewise-linear colour ramp through evenly spaced stops.
#[derive(Debug, Clone, PartialEq)]
pub struct Colormap {
    pub stops: Vec<[u8; 3]>,
}

/// Colour for nodata cells.
pub const NODATA_COLOR: [u8; 3] = [255, 255, 255];

impl Default for Colormap {
    /// Blue (low) through pale yellow to red (high).
    fn default() -> Self {
        Self {
            stops: vec![[43, 131, 186], [171, 221, 164], [255, 255, 191], [253, 174, 97], [215, 25, 28]],
        }
    }
}

impl Colormap {
    /// Colour at `t` in [0, 1]; `t` is clamped. `0` and `1` hit the end stops exactly.
    pub fn color(&self, t: f64) -> [u8; 3] {
        let n = self.stops.len();
        if n == 1 || !(t > 0.0) {
            return self.stops[0];
        }
        if t >= 1.0 {
            return self.stops[n - 1];
        }
        let pos = t * (n - 1) as f64;
        let i = pos.floor() as usize;
        let f = pos - i as f64;
        let (a, b) = (self.stops[i], self.stops[i + 1]);
        std::array::from_fn(|c| (a[c] as f64 + (b[c] as f64 - a[c] as f64) * f).round() as u8)
    }
}

/// Binary P6 image, one pixel per node. Values are scaled linearly over
/// `range`, or over the raster's own valid range when `None`.
pub fn write_ppm(grid: &RasterGrid, colormap: &Colormap, range: Option<(f64, f64)>) -> Vec<u8> {
    let (lo, hi) = range.unwrap_or_else(|| {
        grid.valid_values()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    });
    let span = hi - lo;
    let mut out = format!("P6\n{} {}\n255\n", grid.cols, grid.rows).into_bytes();
    out.reserve(grid.values.len() * 3);
    for &v in &grid.values {
        let rgb = if v == grid.nodata {
            NODATA_COLOR
        } else if span > 0.0 {
            colormap.color((v - lo) / span)
        } else {
            colormap.color(0.0)
        };
        out.extend_from_slice(&rgb);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn station(id: &str, lat: f64, lon: f64) -> Station {
        Station::new(id, id.to_uppercase(), lat, lon, 0.0).unwrap()
    }

    fn indicators(rows: &[(&str, f64, f64, f64)]) -> Vec<StationIndicator> {
        let results: Vec<(Station, BTreeMap<String, f64>)> = rows
            .iter()
            .map(|&(id, lat, lon, v)| (station(id, lat, lon), BTreeMap::from([("pf_p".to_string(), v)])))
            .collect();
        collect(&results).unwrap()
    }

    #[test]
    fn collect_sorts_and_rejects_duplicates() {
        let rows = indicators(&[("c", 40.0, 0.0, 1.0), ("a", 50.0, 5.0, 2.0), ("b", 60.0, 10.0, 3.0)]);
        let ids: Vec<_> = rows.iter().map(|r| r.station.id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
        assert_eq!(rows[0].station.latitude, 50.0);

        let dup = vec![
            (station("a", 1.0, 1.0), BTreeMap::from([("x".to_string(), 1.0)])),
            (station("a", 2.0, 2.0), BTreeMap::from([("x".to_string(), 2.0)])),
        ];
        assert!(matches!(collect(&dup), Err(MappingError::DuplicateStation(_))));
        let none: Vec<(Station, BTreeMap<String, f64>)> = vec![];
        assert!(matches!(collect(&none), Err(MappingError::Empty)));
        let nan = vec![(station("a", 1.0, 1.0), BTreeMap::from([("x".to_string(), f64::NAN)]))];
        assert!(matches!(collect(&nan), Err(MappingError::NonFinite { .. })));
    }

    #[test]
    fn single_station_fills_cutoff_disc() {
        let pts = indicators(&[("a", 50.0, 5.0, 42.0)]);
        let grid = idw_interpolate(&pts, "pf_p", &GridSpec::default(), &IdwParams::default()).unwrap();
        let mut inside = 0;
        for r in 0..grid.rows {
            for c in 0..grid.cols {
                let (lat, lon) = grid.spec.node(r, c);
                let d = great_circle_degrees(lat, lon, 50.0, 5.0);
                let v = grid.get(r, c);
                if d <= 10.0 {
                    assert_eq!(v, 42.0);
                    inside += 1;
                } else {
                    assert_eq!(v, NODATA);
                }
            }
        }
        assert!(inside > 100);
    }

    #[test]
    fn equidistant_node_is_mean() {
        let pts = indicators(&[("a", 50.0, 4.0, 10.0), ("b", 50.0, 6.0, 30.0)]);
        // The meridian through 5°E is equidistant from both stations.
        let v = idw_at(&pts, "pf_p", 51.0, 5.0, &IdwParams::default()).unwrap().unwrap();
        assert!((v - 20.0).abs() < 1e-12, "{v}");
        let v = idw_at(&pts, "pf_p", 50.0, 4.0, &IdwParams::default()).unwrap().unwrap();
        assert_eq!(v, 10.0);
    }

    #[test]
    fn unknown_field_and_bad_power() {
        let pts = indicators(&[("a", 50.0, 4.0, 10.0)]);
        assert!(matches!(
            idw_interpolate(&pts, "nope", &GridSpec::default(), &IdwParams::default()),
            Err(MappingError::UnknownField(_))
        ));
        let p = IdwParams { power: 0.0, ..Default::default() };
        assert!(matches!(idw_at(&pts, "pf_p", 0.0, 0.0, &p), Err(MappingError::InvalidPower(_))));
    }

    #[test]
    fn grid_dimensions() {
        let g = GridSpec::default();
        assert_eq!(g.cols(), 87);
        assert_eq!(g.rows(), 73);
        let bad = GridSpec { lat_min: 60.0, lat_max: 50.0, ..g };
        assert!(bad.validate().is_err());
        let bad = GridSpec { resolution: 0.0, ..g };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn great_circle_basics() {
        assert!((great_circle_degrees(0.0, 0.0, 0.0, 90.0) - 90.0).abs() < 1e-12);
        assert!((great_circle_degrees(10.0, 20.0, 11.0, 20.0) - 1.0).abs() < 1e-12);
        assert_eq!(great_circle_degrees(10.0, 20.0, 10.0, 20.0), 0.0);
    }

    #[test]
    fn csv_without_fields() {
        let rows = vec![StationIndicator {
            station: station("a", 50.0, 5.0),
            values: BTreeMap::new(),
        }];
        assert_eq!(write_station_csv(&rows), "id,name,lat,lon\na,A,50,5\n");
    }

    #[test]
    fn csv_round_trip_and_merge() {
        let a = indicators(&[("a", 50.0, 5.0, 1.25), ("b", 40.0, -3.5, 0.1 + 0.2)]);
        let text = write_station_csv(&a);
        assert!(text.starts_with("id,name,lat,lon,pf_p\n"));
        let back = read_station_csv(&text).unwrap();
        assert_eq!(back[1].values["pf_p"], 0.1 + 0.2);

        let extra = vec![StationIndicator {
            station: station("b", 40.0, -3.5),
            values: BTreeMap::from([("best_d1".to_string(), 0.02)]),
        }];
        let merged = merge(back, extra);
        assert_eq!(merged.len(), 2);
        assert_eq!(field_names(&merged), ["best_d1", "pf_p"]);
        let text = write_station_csv(&merged);
        assert!(text.contains("\na,A,50,5,,1.25\n"), "{text}");
    }

    #[test]
    fn geojson_structure() {
        let rows = indicators(&[("a", 50.0, 5.0, 1.0), ("b", 40.0, -3.5, 2.0)]);
        let v: Value = serde_json::from_str(&write_geojson(&rows)).unwrap();
        assert_eq!(v["type"], "FeatureCollection");
        let f = v["features"].as_array().unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0]["geometry"]["type"], "Point");
        assert_eq!(f[1]["geometry"]["coordinates"], json!([-3.5, 40.0]));
        assert_eq!(f[1]["properties"]["pf_p"], json!(2.0));
    }

    #[test]
    fn colormap_endpoints() {
        let cm = Colormap::default();
        assert_eq!(cm.color(0.0), cm.stops[0]);
        assert_eq!(cm.color(1.0), *cm.stops.last().unwrap());
        assert_eq!(cm.color(0.5), cm.stops[2]);
        assert_eq!(cm.color(-3.0), cm.stops[0]);
    }

    #[test]
    fn ppm_and_ascii_output() {
        let spec = GridSpec {
            lat_min: 0.0,
            lat_max: 1.0,
            lon_min: 0.0,
            lon_max: 2.0,
            resolution: 1.0,
        };
        let grid = RasterGrid {
            spec,
            rows: 2,
            cols: 3,
            values: vec![0.0, 5.0, 10.0, NODATA, 10.0, 0.0],
            nodata: NODATA,
        };
        let cm = Colormap::default();
        let ppm = write_ppm(&grid, &cm, None);
        let header = b"P6\n3 2\n255\n";
        assert_eq!(&ppm[..header.len()], header);
        let px = &ppm[header.len()..];
        assert_eq!(px.len(), 18);
        assert_eq!(&px[0..3], &cm.stops[0]);
        assert_eq!(&px[6..9], cm.stops.last().unwrap());
        assert_eq!(&px[9..12], &NODATA_COLOR);

        let asc = write_ascii_grid(&grid);
        assert!(asc.starts_with("ncols 3\nnrows 2\nxllcorner -0.5\nyllcorner -0.5\ncellsize 1\nNODATA_value -9999\n"));
        assert!(asc.ends_with("-9999 10 0\n"));
    }
}
