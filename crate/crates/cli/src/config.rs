//! Run configuration, read from a JSON file. Every key is optional.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use ssmap::collector::{default_params, CollectorOverrides, CollectorParams};
use ssmap::indicators::{EvalOptions, DEFAULT_THRESHOLD};
use ssmap::mapping::{GridSpec, IdwParams};
use ssmap::sweep::{SweepGrid, SweepOptions};

use crate::error::{CliError, ErrorCode};

/// Worker threads: a fixed count or one per core.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Workers {
    #[default]
    Auto,
    Count(usize),
}

impl Workers {
    /// Thread count to hand to rayon; 0 lets rayon pick.
    pub fn threads(self) -> usize {
        match self {
            Workers::Auto => 0,
            Workers::Count(n) => n,
        }
    }
}

impl fmt::Display for Workers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Workers::Auto => f.write_str("auto"),
            Workers::Count(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for Workers {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Workers::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Workers::Count(n)),
            _ => Err(format!("expected a positive integer or \"auto\", got {s:?}")),
        }
    }
}

impl Serialize for Workers {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Workers::Auto => s.serialize_str("auto"),
            Workers::Count(n) => s.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Workers {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(0) => Err(serde::de::Error::custom("workers must be positive")),
            Raw::Count(n) => Ok(Workers::Count(n)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Pipe depths, m.
    pub d1_values: Vec<f64>,
    /// Mass flows, kg/s.
    pub mdot_values: Vec<f64>,
    pub rederive_capacities: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let grid = SweepGrid::default();
        Self {
            d1_values: grid.d1_values,
            mdot_values: grid.mdot_values,
            rederive_capacities: true,
        }
    }
}

impl SweepConfig {
    pub fn grid(&self) -> SweepGrid {
        SweepGrid {
            d1_values: self.d1_values.clone(),
            mdot_values: self.mdot_values.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapConfig {
    pub grid: GridSpec,
    pub idw: IdwParams,
    /// Field mapped when `--field` is not given.
    pub field: String,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            idw: IdwParams::default(),
            field: "pf_p".into(),
        }
    }
}

/// Climate at one end of the synthetic latitude range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileAnchor {
    pub mean_ta: f64,
    pub annual_amplitude: f64,
    pub diurnal_amplitude: f64,
    pub peak_irradiance: f64,
    pub cloud: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub count: usize,
    pub seed: u64,
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
    /// Profile at `lat_min`.
    pub south: ProfileAnchor,
    /// Profile at `lat_max`.
    pub north: ProfileAnchor,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            count: 130,
            seed: 1,
            lat_min: 36.0,
            lat_max: 70.0,
            lon_min: -10.0,
            lon_max: 30.0,
            south: ProfileAnchor {
                mean_ta: 17.0,
                annual_amplitude: 7.0,
                diurnal_amplitude: 5.0,
                peak_irradiance: 950.0,
                cloud: 0.25,
            },
            north: ProfileAnchor {
                mean_ta: 2.0,
                annual_amplitude: 11.0,
                diurnal_amplitude: 3.0,
                peak_irradiance: 650.0,
                cloud: 0.75,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Directory of `*.wac` station files.
    pub climate_dir: PathBuf,
    pub output_dir: PathBuf,
    pub collector: CollectorOverrides,
    pub sweep: SweepConfig,
    /// Operability threshold, W/m².
    pub threshold: f64,
    pub warmup_hours: usize,
    pub map: MapConfig,
    pub workers: Workers,
    pub synth: SynthConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            climate_dir: PathBuf::from("climate"),
            output_dir: PathBuf::from("out"),
            collector: CollectorOverrides::default(),
            sweep: SweepConfig::default(),
            threshold: DEFAULT_THRESHOLD,
            warmup_hours: 0,
            map: MapConfig::default(),
            workers: Workers::Auto,
            synth: SynthConfig::default(),
        }
    }
}

impl RunConfig {
    /// Reads a config file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::from_json(&text).map_err(|e| CliError::new(e.code, format!("{}: {}", path.display(), e.message)))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.climate_dir, &mut cfg.output_dir] {
            if p.is_relative() && !p.as_os_str().is_empty() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::new(ErrorCode::Config, e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::new(ErrorCode::Config, m));
        if self.climate_dir.as_os_str().is_empty() {
            return bad("climate_dir is empty".into());
        }
        if self.output_dir.as_os_str().is_empty() {
            return bad("output_dir is empty".into());
        }
        if !(self.threshold.is_finite() && self.threshold >= 0.0) {
            return bad(format!("threshold must be finite and >= 0, got {}", self.threshold));
        }
        self.params()?;
        self.sweep.grid().validate().map_err(|e| CliError::new(ErrorCode::Config, e.to_string()))?;
        self.map.grid.validate().map_err(|e| CliError::new(ErrorCode::Config, e.to_string()))?;
        if !(self.map.idw.power > 0.0 && self.map.idw.power.is_finite()) {
            return bad(format!("IDW power must be positive, got {}", self.map.idw.power));
        }
        if !(self.map.idw.cutoff_degrees > 0.0) {
            return bad(format!("IDW cutoff must be positive, got {}", self.map.idw.cutoff_degrees));
        }
        let s = &self.synth;
        if !(-90.0..=90.0).contains(&s.lat_min) || !(-90.0..=90.0).contains(&s.lat_max) || s.lat_min > s.lat_max {
            return bad("synth latitude range is invalid".into());
        }
        if !(-180.0..=180.0).contains(&s.lon_min) || !(-180.0..=180.0).contains(&s.lon_max) || s.lon_min > s.lon_max {
            return bad("synth longitude range is invalid".into());
        }
        Ok(())
    }

    /// Collector parameters: defaults merged with the overrides.
    pub fn params(&self) -> Result<CollectorParams, CliError> {
        self.collector
            .apply(&default_params())
            .map_err(|e| CliError::new(ErrorCode::Config, format!("collector: {e}")))
    }

    pub fn eval_options(&self) -> EvalOptions {
        EvalOptions {
            threshold: self.threshold,
            warmup_hours: self.warmup_hours,
        }
    }

    pub fn sweep_options(&self) -> SweepOptions {
        SweepOptions {
            eval: self.eval_options(),
            rederive_capacities: self.sweep.rederive_capacities,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        let cfg = RunConfig::from_json("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        cfg.validate().unwrap();
    }

    #[test]
    fn json_round_trip() {
        let cfg = RunConfig {
            workers: Workers::Count(3),
            collector: CollectorOverrides {
                mdot: Some(0.02),
                ..Default::default()
            },
            ..Default::default()
        };
        let back = RunConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn workers_forms() {
        let cfg = RunConfig::from_json(r#"{"workers": "auto"}"#).unwrap();
        assert_eq!(cfg.workers, Workers::Auto);
        let cfg = RunConfig::from_json(r#"{"workers": 4}"#).unwrap();
        assert_eq!(cfg.workers, Workers::Count(4));
        assert!(RunConfig::from_json(r#"{"workers": 0}"#).is_err());
        assert!(RunConfig::from_json(r#"{"workers": "many"}"#).is_err());
        assert_eq!("auto".parse::<Workers>(), Ok(Workers::Auto));
        assert!("0".parse::<Workers>().is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let e = RunConfig::from_json(r#"{"treshold": 40}"#).unwrap_err();
        assert_eq!(e.code, ErrorCode::Config);
        assert!(RunConfig::from_json(r#"{"collector": {"alpha": 1}}"#).is_err());
    }

    #[test]
    fn invalid_values_rejected() {
        let cases = [
            r#"{"collector": {"d1": -0.01}}"#,
            r#"{"threshold": -5}"#,
            r#"{"sweep": {"d1_values": []}}"#,
            r#"{"map": {"grid": {"lat_min": 10, "lat_max": 5, "lon_min": 0, "lon_max": 1, "resolution": 1}}}"#,
            r#"{"climate_dir": ""}"#,
        ];
        for text in cases {
            let cfg = RunConfig::from_json(text).unwrap();
            assert!(cfg.validate().is_err(), "{text}");
        }
    }
}
