//! Synthetic station networks with climates that vary with latitude.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ssmap::climate::{generate_synthetic, ClimateError, ClimateSeries, Station, SyntheticProfile};

use crate::config::{ProfileAnchor, SynthConfig};

/// Profile for a station at `lat`, linear between the two anchors and held
/// constant outside the configured latitude range.
pub fn profile_at(cfg: &SynthConfig, lat: f64) -> SyntheticProfile {
    let f = if cfg.lat_max > cfg.lat_min {
        ((lat - cfg.lat_min) / (cfg.lat_max - cfg.lat_min)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let lerp = |s: f64, n: f64| s + f * (n - s);
    let (s, n): (&ProfileAnchor, &ProfileAnchor) = (&cfg.south, &cfg.north);
    SyntheticProfile {
        mean_ta: lerp(s.mean_ta, n.mean_ta),
        annual_amplitude: lerp(s.annual_amplitude, n.annual_amplitude),
        diurnal_amplitude: lerp(s.diurnal_amplitude, n.diurnal_amplitude),
        peak_irradiance: lerp(s.peak_irradiance, n.peak_irradiance),
        cloud: lerp(s.cloud, n.cloud),
        latitude: lat,
    }
}

fn round_to(v: f64, decimals: i32) -> f64 {
    let s = 10f64.powi(decimals);
    (v * s).round() / s
}

/// Station metadata for the network, drawn from `cfg.seed`. Ids are
/// `st001`, `st002`, … (wider when count exceeds 999).
pub fn stations(cfg: &SynthConfig) -> Result<Vec<Station>, ClimateError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let width = cfg.count.to_string().len().max(3);
    (0..cfg.count)
        .map(|i| {
            let lat = round_to(rng.gen_range(cfg.lat_min..=cfg.lat_max), 4);
            let lon = round_to(rng.gen_range(cfg.lon_min..=cfg.lon_max), 4);
            let elev = rng.gen_range(0.0..500.0f64).round();
            Station::new(format!("st{:0width$}", i + 1), format!("Synthetic {}", i + 1), lat, lon, elev)
        })
        .collect()
}

/// Hourly climate for one synthetic station.
pub fn station_climate(cfg: &SynthConfig, station: &Station) -> Result<ClimateSeries, ClimateError> {
    let mut series = generate_synthetic(&profile_at(cfg, station.latitude))?;
    series.station = station.clone();
    Ok(series)
}
