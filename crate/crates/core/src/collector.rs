//! Three-state model of a concrete wall with an embedded water circuit
//! acting as a solar collector.
//!
//! States are the external surface temperature `T1`, the water return
//! temperature `T2` and the internal wall temperature `T3`. Inputs are the
//! ambient air temperature, the water supply temperature and the solar
//! irradiance on the surface:
//!
//! ```text
//! C1 dT1/dt = hA (Tamb - T1) - (T1 - T2)/R1 + a1 A I
//! C2 dT2/dt = m c (Tsup - T2) + (T1 - T2)/R1 - (T2 - T3)/R2
//! C3 dT3/dt = (T2 - T3)/R2
//! ```
//!
//! with `R1 = d1/(kA)` and `R2 = d2/(kA)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::climate::{ClimateError, ClimateSeries};
use crate::statespace::{self, InputSeries, LtiSystem, StateSpaceError, Trajectory};

pub const SECONDS_PER_HOUR: f64 = 3600.0;

pub const CONCRETE_DENSITY: f64 = 2300.0;
pub const CONCRETE_HEAT_CAPACITY: f64 = 880.0;
pub const WATER_DENSITY: f64 = 1000.0;
pub const WATER_HEAT_CAPACITY: f64 = 4186.0;

/// Index of the water return temperature in the state vector.
pub const RETURN_STATE: usize = 1;

#[derive(Debug, Error)]
pub enum CollectorError {
    #[error("invalid collector parameter {name} = {value}")]
    InvalidParam { name: &'static str, value: f64 },
    #[error(transparent)]
    StateSpace(#[from] StateSpaceError),
    #[error(transparent)]
    Climate(#[from] ClimateError),
}

/// Physical parameters of the wall collector. Capacities left as `None` are
/// derived from geometry by [`derive_capacities`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectorParams {
    /// Water mass flow, kg/s.
    pub mdot: f64,
    /// Heat capacity of water, J/(kg K).
    pub c: f64,
    /// Solar absorption factor, (0, 1].
    pub a1: f64,
    /// External surface heat transfer coefficient, W/(m² K).
    pub h: f64,
    /// Collector surface, m².
    pub area: f64,
    /// Pipe to surface distance, m.
    pub d1: f64,
    /// Pipe to insulation distance, m.
    pub d2: f64,
    /// Heat conductivity of the concrete, W/(m K).
    pub k: f64,
    /// Surface layer capacity, J/K.
    pub c1: Option<f64>,
    /// Water capacity, J/K.
    pub c2: Option<f64>,
    /// Inner layer capacity, J/K.
    pub c3: Option<f64>,
    /// Water held in the circuit per m² of collector, litres.
    pub water_volume_per_m2: f64,
    /// Constant water supply temperature, °C.
    pub t_sup: f64,
}

impl Default for CollectorParams {
    fn default() -> Self {
        default_params()
    }
}

/// Defaults: 1 kg/min flow, h = 25 W/m²K, 35 mm pipe depth, 10 °C supply.
/// Area 1 m², conductivity 1.8 W/mK, inner depth 65 mm and absorption 0.5.
pub fn default_params() -> CollectorParams {
    CollectorParams {
        mdot: 1.0 / 60.0,
        c: WATER_HEAT_CAPACITY,
        a1: 0.5,
        h: 25.0,
        area: 1.0,
        d1: 0.035,
        d2: 0.065,
        k: 1.8,
        c1: None,
        c2: None,
        c3: None,
        water_volume_per_m2: 1.0,
        t_sup: 10.0,
    }
}

impl CollectorParams {
    pub fn validate(&self) -> Result<(), CollectorError> {
        let positive = [
            ("c", self.c),
            ("h", self.h),
            ("area", self.area),
            ("d1", self.d1),
            ("d2", self.d2),
            ("k", self.k),
            ("water_volume_per_m2", self.water_volume_per_m2),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(CollectorError::InvalidParam { name, value });
            }
        }
        for (name, value) in [("c1", self.c1), ("c2", self.c2), ("c3", self.c3)] {
            if let Some(value) = value {
                if !(value.is_finite() && value > 0.0) {
                    return Err(CollectorError::InvalidParam { name, value });
                }
            }
        }
        // Zero flow is a valid (stagnant) configuration.
        if !(self.mdot.is_finite() && self.mdot >= 0.0) {
            return Err(CollectorError::InvalidParam {
                name: "mdot",
                value: self.mdot,
            });
        }
        if !(self.a1 > 0.0 && self.a1 <= 1.0) {
            return Err(CollectorError::InvalidParam {
                name: "a1",
                value: self.a1,
            });
        }
        if !self.t_sup.is_finite() {
            return Err(CollectorError::InvalidParam {
                name: "t_sup",
                value: self.t_sup,
            });
        }
        Ok(())
    }

    /// Pipe to surface resistance, K/W.
    pub fn r1(&self) -> f64 {
        self.d1 / (self.k * self.area)
    }

    /// Pipe to insulation resistance, K/W.
    pub fn r2(&self) -> f64 {
        self.d2 / (self.k * self.area)
    }

    /// Heat capacity flow of the water, W/K.
    pub fn mdot_c(&self) -> f64 {
        self.mdot * self.c
    }

    /// Capacities `(C1, C2, C3)`, deriving any that are unset.
    pub fn capacities(&self) -> Result<(f64, f64, f64), CollectorError> {
        let p = derive_capacities(self)?;
        Ok((p.c1.unwrap(), p.c2.unwrap(), p.c3.unwrap()))
    }
}

/// Fills unset capacities: concrete layers `ρ c A d` for depths `d1` and
/// `d2`, and the water content for `C2`. Explicit values are kept.
pub fn derive_capacities(params: &CollectorParams) -> Result<CollectorParams, CollectorError> {
    params.validate()?;
    let concrete = CONCRETE_DENSITY * CONCRETE_HEAT_CAPACITY * params.area;
    let water_m3 = params.water_volume_per_m2 * params.area * 1e-3;
    let mut out = params.clone();
    out.c1 = Some(params.c1.unwrap_or(concrete * params.d1));
    out.c2 = Some(params.c2.unwrap_or(water_m3 * WATER_DENSITY * WATER_HEAT_CAPACITY));
    out.c3 = Some(params.c3.unwrap_or(concrete * params.d2));
    Ok(out)
}

/// State matrix, input matrix and initial state for inputs
/// `(Tamb, Tsup, I)` and states `(T1, T2, T3)`. All states start at the
/// supply temperature.
pub fn build_system(params: &CollectorParams) -> Result<LtiSystem, CollectorError> {
    let (c1, c2, c3) = params.capacities()?;
    let ha = params.h * params.area;
    let g1 = 1.0 / params.r1();
    let g2 = 1.0 / params.r2();
    let mc = params.mdot_c();

    #[rustfmt::skip]
    let a = DMatrix::from_row_slice(3, 3, &[
        -(ha + g1) / c1,  g1 / c1,              0.0,
         g1 / c2,        -(mc + g1 + g2) / c2,  g2 / c2,
         0.0,             g2 / c3,             -g2 / c3,
    ]);
    #[rustfmt::skip]
    let b = DMatrix::from_row_slice(3, 3, &[
        ha / c1,  0.0,      params.a1 * params.area / c1,
        0.0,      mc / c2,  0.0,
        0.0,      0.0,      0.0,
    ]);
    let x0 = DVector::from_element(3, params.t_sup);
    Ok(LtiSystem::new(a, b, x0)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollectorState {
    /// External surface temperature, °C.
    pub t1: f64,
    /// Water return temperature, °C.
    pub t2: f64,
    /// Internal wall temperature, °C.
    pub t3: f64,
}

impl CollectorState {
    pub fn from_slice(x: &[f64]) -> Self {
        Self {
            t1: x[0],
            t2: x[1],
            t3: x[2],
        }
    }
}

/// Hourly inputs `(ta, t_sup, isgh)` held constant over each hour.
pub fn collector_inputs(params: &CollectorParams, climate: &ClimateSeries) -> Result<InputSeries, CollectorError> {
    let data = climate
        .records
        .iter()
        .flat_map(|r| [r.ta, params.t_sup, r.isgh])
        .collect();
    Ok(InputSeries::new(SECONDS_PER_HOUR, 3, data)?)
}

/// Full-year trajectory of the collector under `climate`. The water return
/// temperature is state [`RETURN_STATE`].
pub fn simulate_collector(params: &CollectorParams, climate: &ClimateSeries) -> Result<Trajectory, CollectorError> {
    climate.check()?;
    let system = build_system(params)?;
    let inputs = collector_inputs(params, climate)?;
    Ok(statespace::simulate(&system, &inputs)?)
}

/// Equilibrium under constant ambient temperature and irradiance.
pub fn steady_state_collector(params: &CollectorParams, t_amb: f64, irradiance: f64) -> Result<CollectorState, CollectorError> {
    let system = build_system(params)?;
    let u = DVector::from_row_slice(&[t_amb, params.t_sup, irradiance]);
    let x = statespace::steady_state(&system, &u)?;
    Ok(CollectorState::from_slice(x.as_slice()))
}

/// Partial parameter set, merged over defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectorOverrides {
    pub mdot: Option<f64>,
    pub c: Option<f64>,
    pub a1: Option<f64>,
    pub h: Option<f64>,
    pub area: Option<f64>,
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub k: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub c3: Option<f64>,
    pub water_volume_per_m2: Option<f64>,
    pub t_sup: Option<f64>,
}

impl CollectorOverrides {
    pub fn apply(&self, base: &CollectorParams) -> Result<CollectorParams, CollectorError> {
        let mut p = base.clone();
        macro_rules! merge {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { p.$f = v; } )* };
        }
        merge!(mdot, c, a1, h, area, d1, d2, k, water_volume_per_m2, t_sup);
        if self.c1.is_some() {
            p.c1 = self.c1;
        }
        if self.c2.is_some() {
            p.c2 = self.c2;
        }
        if self.c3.is_some() {
            p.c3 = self.c3;
        }
        p.validate()?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::climate::{ClimateRecord, Station, HOURS_PER_YEAR};
    use approx::assert_relative_eq;

    fn constant_climate(ta: f64, isgh: f64) -> ClimateSeries {
        ClimateSeries {
            station: Station::new("c", "const", 50.0, 5.0, 0.0).unwrap(),
            start_year: 2001,
            records: vec![
                ClimateRecord {
                    ta,
                    isgh,
                    ..Default::default()
                };
                HOURS_PER_YEAR
            ],
        }
    }

    #[test]
    fn defaults() {
        let p = default_params();
        p.validate().unwrap();
        assert_relative_eq!(p.mdot_c(), 69.766_666_666_666_67, max_relative = 1e-12);
        assert!((p.mdot_c() - 69.77).abs() < 0.005);
        assert!((p.r1() - 0.01944).abs() < 1e-5);
        assert_eq!(p.h, 25.0);
        assert_eq!(p.d1, 0.035);
        assert_eq!(p.t_sup, 10.0);
    }

    #[test]
    fn capacities_from_geometry() {
        let p = derive_capacities(&default_params()).unwrap();
        assert_relative_eq!(p.c1.unwrap(), 70_840.0, max_relative = 1e-12);
        assert_relative_eq!(p.c2.unwrap(), 4186.0, max_relative = 1e-12);
        assert_relative_eq!(p.c3.unwrap(), 2300.0 * 880.0 * 0.065, max_relative = 1e-12);

        let explicit = CollectorParams {
            c1: Some(5e4),
            ..default_params()
        };
        let derived = derive_capacities(&explicit).unwrap();
        assert_eq!(derived.c1, Some(5e4));
        assert_eq!(derive_capacities(&derived).unwrap(), derived);
    }

    #[test]
    fn invalid_params_rejected() {
        for p in [
            CollectorParams { d1: 0.0, ..default_params() },
            CollectorParams { area: -1.0, ..default_params() },
            CollectorParams { a1: 0.0, ..default_params() },
            CollectorParams { a1: 1.2, ..default_params() },
            CollectorParams { mdot: -0.1, ..default_params() },
            CollectorParams { c3: Some(0.0), ..default_params() },
            CollectorParams { t_sup: f64::NAN, ..default_params() },
        ] {
            assert!(matches!(build_system(&p), Err(CollectorError::InvalidParam { .. })), "{p:?}");
        }
    }

    #[test]
    fn matrix_structure_without_flow() {
        let p = CollectorParams {
            mdot: 0.0,
            ..default_params()
        };
        let sys = build_system(&p).unwrap();
        let (_, c2, _) = p.capacities().unwrap();
        assert_relative_eq!(sys.a()[(1, 1)], -(1.0 / p.r1() + 1.0 / p.r2()) / c2, max_relative = 1e-15);
        assert_eq!(sys.b()[(1, 1)], 0.0);
        assert_eq!(sys.a()[(0, 2)], 0.0);
        assert_eq!(sys.a()[(2, 0)], 0.0);
        assert!(sys.is_hurwitz());
    }

    #[test]
    fn equilibrium_is_fixed_point() {
        let p = default_params();
        let sys = build_system(&p).unwrap();
        let x = DVector::from_element(3, 17.5);
        let u = DVector::from_row_slice(&[17.5, 17.5, 0.0]);
        let dx = sys.a() * &x + sys.b() * &u;
        assert!(dx.iter().all(|v| v.abs() < 1e-15), "{dx}");
    }

    #[test]
    fn isothermal_year_stays_put() {
        let traj = simulate_collector(&default_params(), &constant_climate(10.0, 0.0)).unwrap();
        assert_eq!(traj.len(), HOURS_PER_YEAR + 1);
        for x in traj.states() {
            for v in x {
                assert!((v - 10.0).abs() < 1e-12, "{v}");
            }
        }
    }

    #[test]
    fn constant_sun_reaches_steady_state() {
        let p = default_params();
        let traj = simulate_collector(&p, &constant_climate(10.0, 500.0)).unwrap();
        let ss = steady_state_collector(&p, 10.0, 500.0).unwrap();
        let last = CollectorState::from_slice(traj.final_state());
        assert!((last.t1 - ss.t1).abs() < 1e-6);
        assert!((last.t2 - ss.t2).abs() < 1e-6);
        assert!((last.t3 - ss.t3).abs() < 1e-6);
        assert!((ss.t3 - ss.t2).abs() < 1e-10);
        assert!(ss.t2 > p.t_sup);
    }

    #[test]
    fn steady_state_matches_hand_reduction() {
        // With dT3/dt = 0, T3 = T2 and the remaining two balances are
        //   (hA + g1) T1 - g1 T2 = hA Ta + a1 A I
        //   -g1 T1 + (mc + g1) T2 = mc Tsup
        let p = CollectorParams {
            h: 12.0,
            area: 2.5,
            a1: 0.7,
            ..default_params()
        };
        let (ta, irr) = (4.0, 320.0);
        let ha = p.h * p.area;
        let g1 = 1.0 / p.r1();
        let mc = p.mdot_c();
        let (a11, a12, a21, a22) = (ha + g1, -g1, -g1, mc + g1);
        let (r1, r2) = (ha * ta + p.a1 * p.area * irr, mc * p.t_sup);
        let det = a11 * a22 - a12 * a21;
        let t1 = (r1 * a22 - a12 * r2) / det;
        let t2 = (a11 * r2 - a21 * r1) / det;

        let ss = steady_state_collector(&p, ta, irr).unwrap();
        assert_relative_eq!(ss.t1, t1, max_relative = 1e-12);
        assert_relative_eq!(ss.t2, t2, max_relative = 1e-12);
        assert_relative_eq!(ss.t3, t2, max_relative = 1e-12);
    }

    #[test]
    fn harvest_gain_is_positive() {
        let p = default_params();
        let base = steady_state_collector(&p, 10.0, 0.0).unwrap().t2;
        let mut prev = base;
        for irr in [100.0, 200.0, 400.0, 800.0] {
            let t2 = steady_state_collector(&p, 10.0, irr).unwrap().t2;
            assert!(t2 > prev);
            prev = t2;
        }
    }

    #[test]
    fn doubling_sun_doubles_response() {
        let p = default_params();
        let mut climate = constant_climate(10.0, 0.0);
        for (i, r) in climate.records.iter_mut().enumerate() {
            r.isgh = if (i % 24) > 6 && (i % 24) < 18 { 300.0 } else { 0.0 };
        }
        let mut bright = climate.clone();
        for r in &mut bright.records {
            r.isgh *= 2.0;
        }
        let t2 = simulate_collector(&p, &climate).unwrap().component(RETURN_STATE);
        let t2b = simulate_collector(&p, &bright).unwrap().component(RETURN_STATE);
        for (a, b) in t2.iter().zip(&t2b) {
            let (da, db) = (a - 10.0, b - 10.0);
            assert!((db - 2.0 * da).abs() <= 1e-9 * db.abs().max(1e-3), "{da} {db}");
        }
    }

    #[test]
    fn overrides_merge() {
        let o = CollectorOverrides {
            mdot: Some(2.0 / 60.0),
            c1: Some(1e5),
            ..Default::default()
        };
        let p = o.apply(&default_params()).unwrap();
        assert_eq!(p.mdot, 2.0 / 60.0);
        assert_eq!(p.c1, Some(1e5));
        assert_eq!(p.d1, 0.035);
        let bad = CollectorOverrides {
            k: Some(-1.0),
            ..Default::default()
        };
        assert!(bad.apply(&default_params()).is_err());
    }
}
