use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ssmap::climate::{generate_synthetic, Station, SyntheticProfile};
use ssmap::collector::{default_params, simulate_collector};
use ssmap::indicators::*;
use ssmap::mapping::*;
use ssmap::sweep::*;

fn random_indicators(seed: u64, n: usize) -> Vec<StationIndicator> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<(Station, BTreeMap<String, f64>)> = (0..n)
        .map(|i| {
            let st = Station::new(format!("s{i:03}"), "", rng.gen_range(36.0..70.0), rng.gen_range(-10.0..30.0), 0.0).unwrap();
            let mut v = BTreeMap::new();
            v.insert("pf_p".to_string(), rng.gen_range(0.0..60.0));
            (st, v)
        })
        .collect();
    collect(&rows).unwrap()
}

proptest! {
    #[test]
    fn thresholding_never_adds_energy(pout in prop::collection::vec(-200.0..400.0f64, 1..300), thr in 0.0..150.0f64) {
        let p50 = apply_threshold(&pout, thr);
        let kept: f64 = p50.iter().sum();
        let positive: f64 = pout.iter().map(|p| p.max(0.0)).sum();
        prop_assert!(kept <= positive);
        prop_assert!(p50.iter().all(|&p| p == 0.0 || p >= thr));
        let pft = compute_pft(&p50).unwrap();
        prop_assert!((0.0..=100.0).contains(&pft));
    }

    #[test]
    fn higher_threshold_never_raises_indicators(
        pout in prop::collection::vec(-200.0..400.0f64, 1..300),
        t1 in 0.0..150.0f64,
        dt in 0.0..150.0f64,
    ) {
        let irr = vec![500.0; pout.len()];
        let lo = apply_threshold(&pout, t1);
        let hi = apply_threshold(&pout, t1 + dt);
        prop_assert!(compute_pft(&hi).unwrap() <= compute_pft(&lo).unwrap());
        prop_assert!(compute_pfp(&hi, &irr).unwrap() <= compute_pfp(&lo, &irr).unwrap());
    }

    #[test]
    fn best_config_is_the_maximum(values in prop::collection::vec((0.0..60.0f64, 0.0..60.0f64), 9)) {
        let pf_p: Vec<Vec<f64>> = values.chunks(3).map(|r| r.iter().map(|v| v.0).collect()).collect();
        let pf_t: Vec<Vec<f64>> = values.chunks(3).map(|r| r.iter().map(|v| v.1).collect()).collect();
        let st = Station::new("x", "", 50.0, 5.0, 0.0).unwrap();
        let result = SweepResult::from_tables(SweepGrid::default(), st, &pf_p, &pf_t).unwrap();
        let best = best_config(&result);
        let max = values.iter().map(|v| v.0).fold(f64::MIN, f64::max);
        prop_assert_eq!(best.pf_p, max);
        let i_d1 = result.grid.d1_values.iter().position(|&d| d == best.d1).unwrap();
        let i_mdot = result.grid.mdot_values.iter().position(|&m| m == best.mdot).unwrap();
        prop_assert_eq!(pf_t[i_mdot][i_d1], best.pf_t);
    }

    #[test]
    fn tables_survive_formatting(values in prop::collection::vec((0.0..100.0f64, 0.0..100.0f64), 6)) {
        let pf_p: Vec<Vec<f64>> = values.chunks(3).map(|r| r.iter().map(|v| v.0).collect()).collect();
        let pf_t: Vec<Vec<f64>> = values.chunks(3).map(|r| r.iter().map(|v| v.1).collect()).collect();
        let grid = SweepGrid { d1_values: vec![0.02, 0.035, 0.05], mdot_values: vec![0.5 / 60.0, 2.0 / 60.0] };
        let st = Station::new("x", "", 50.0, 5.0, 0.0).unwrap();
        let result = SweepResult::from_tables(grid, st, &pf_p, &pf_t).unwrap();
        let parsed = parse_tables(&format_tables(&result)).unwrap();
        prop_assert_eq!(parsed.d1_mm, vec![20.0, 35.0, 50.0]);
        prop_assert_eq!(parsed.mdot_kg_per_min, vec![0.5, 2.0]);
        for i in 0..2 {
            for j in 0..3 {
                prop_assert!((parsed.pf_p[i][j] - pf_p[i][j]).abs() <= 0.05 + 1e-9);
                prop_assert!((parsed.pf_t[i][j] - pf_t[i][j]).abs() <= 0.05 + 1e-9);
            }
        }
    }

    #[test]
    fn idw_stays_within_station_range(seed in any::<u64>(), n in 1usize..40, lat in 30.0..75.0f64, lon in -20.0..40.0f64) {
        let pts = random_indicators(seed, n);
        let vals: Vec<f64> = pts.iter().map(|p| p.values["pf_p"]).collect();
        let (lo, hi) = (vals.iter().cloned().fold(f64::MAX, f64::min), vals.iter().cloned().fold(f64::MIN, f64::max));
        if let Some(v) = idw_at(&pts, "pf_p", lat, lon, &IdwParams::default()).unwrap() {
            prop_assert!(lo <= v && v <= hi);
        }
        for p in &pts {
            let v = idw_at(&pts, "pf_p", p.station.latitude, p.station.longitude, &IdwParams::default()).unwrap();
            prop_assert_eq!(v, Some(p.values["pf_p"]));
        }
    }

    #[test]
    fn raster_dimensions_follow_the_box(
        lat_min in -60.0..60.0f64, dlat in 0.0..20.0f64,
        lon_min in -170.0..150.0f64, dlon in 0.0..25.0f64,
        res in prop::sample::select(vec![0.25, 0.5, 1.0, 2.0]),
    ) {
        let spec = GridSpec { lat_min, lat_max: lat_min + dlat, lon_min, lon_max: lon_min + dlon, resolution: res };
        let pts = random_indicators(7, 5);
        let grid = idw_interpolate(&pts, "pf_p", &spec, &IdwParams::default()).unwrap();
        let rows = (dlat / res).round() as usize + 1;
        let cols = (dlon / res).round() as usize + 1;
        prop_assert_eq!((grid.rows, grid.cols), (rows, cols));
        prop_assert_eq!(grid.values.len(), rows * cols);
        let asc = write_ascii_grid(&grid);
        let header: Vec<&str> = asc.lines().take(2).collect();
        prop_assert_eq!(header, vec![format!("ncols {cols}"), format!("nrows {rows}")]);
        prop_assert_eq!(asc.lines().count(), 6 + rows);
    }
}

#[test]
fn threshold_sweep_on_a_simulated_year() {
    let climate = generate_synthetic(&SyntheticProfile::default()).unwrap();
    let mut prev = (f64::INFINITY, f64::INFINITY);
    for thr in [0.0, 25.0, 50.0, 75.0, 100.0, 200.0] {
        let r = evaluate(&default_params(), &climate, thr).unwrap();
        assert!(r.invariants_hold());
        assert!(r.pf_t <= prev.0 && r.pf_p <= prev.1, "threshold {thr}");
        prev = (r.pf_t, r.pf_p);
    }
}

#[test]
fn pout_matches_return_temperature() {
    let climate = generate_synthetic(&SyntheticProfile::default()).unwrap();
    let p = default_params();
    let r = evaluate(&p, &climate, DEFAULT_THRESHOLD).unwrap();
    let traj = simulate_collector(&p, &climate).unwrap();
    assert_eq!(r.pout.len(), climate.len());
    for (t, pout) in r.pout.iter().enumerate() {
        let t2 = traj.state(t + 1)[1];
        assert_eq!(*pout, p.mdot * p.c * (t2 - p.t_sup) / p.area);
    }
}

#[test]
fn more_flow_harvests_more() {
    for profile in [
        SyntheticProfile::default(),
        SyntheticProfile { mean_ta: 17.0, peak_irradiance: 950.0, cloud: 0.25, latitude: 38.0, ..Default::default() },
        SyntheticProfile { mean_ta: 4.0, peak_irradiance: 650.0, cloud: 0.75, latitude: 65.0, ..Default::default() },
    ] {
        let climate = generate_synthetic(&profile).unwrap();
        let result = run_sweep(&default_params(), &SweepGrid::default(), &climate, &SweepOptions::default()).unwrap();
        for j in 0..3 {
            let col: Vec<f64> = (0..3).map(|i| result.cell(i, j).pf_p).collect();
            assert!(col[2] > col[1] && col[1] > col[0], "{profile:?}: {col:?}");
        }
        for i in 0..3 {
            let row: Vec<f64> = (0..3).map(|j| result.cell(i, j).pf_p).collect();
            assert!(row[0] > row[1] && row[1] > row[2], "{profile:?}: {row:?}");
        }
    }
}

#[test]
fn sweep_is_reproducible_across_thread_counts() {
    let climate = generate_synthetic(&SyntheticProfile::default()).unwrap();
    let run = || run_sweep(&default_params(), &SweepGrid::default(), &climate, &SweepOptions::default()).unwrap();
    let a = run();
    let b = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
    let bits = |r: &SweepResult| r.cells().iter().flat_map(|c| [c.pf_p.to_bits(), c.pf_t.to_bits()]).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn geojson_lists_every_station() {
    let pts = random_indicators(42, 130);
    let doc: serde_json::Value = serde_json::from_str(&write_geojson(&pts)).unwrap();
    let features = doc["features"].as_array().unwrap();
    assert_eq!(features.len(), 130);
    for (f, p) in features.iter().zip(&pts) {
        let c = f["geometry"]["coordinates"].as_array().unwrap();
        assert_eq!(c[0].as_f64().unwrap(), p.station.longitude);
        assert_eq!(c[1].as_f64().unwrap(), p.station.latitude);
        assert_eq!(f["properties"]["pf_p"].as_f64().unwrap(), p.values["pf_p"]);
    }
}

#[test]
fn station_table_round_trip() {
    let pts = random_indicators(3, 25);
    let back = read_station_csv(&write_station_csv(&pts)).unwrap();
    assert_eq!(back, pts);
}

#[test]
fn dense_network_grid_is_bounded() {
    let pts = random_indicators(11, 130);
    let grid = idw_interpolate(&pts, "pf_p", &GridSpec::default(), &IdwParams::default()).unwrap();
    assert_eq!((grid.rows, grid.cols), (73, 87));
    let vals: Vec<f64> = pts.iter().map(|p| p.values["pf_p"]).collect();
    let (lo, hi) = (vals.iter().cloned().fold(f64::MAX, f64::min), vals.iter().cloned().fold(f64::MIN, f64::max));
    assert!(grid.valid_values().all(|v| lo <= v && v <= hi));
    assert!(grid.valid_values().count() > 0);
}
