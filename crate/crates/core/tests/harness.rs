use anivisc_core::harness::{
    build_initial_data, chunk_product, compute_uapp_norms, config_hash, export_report, fit_log_log,
    run_remainder_experiment, run_remainder_single, time_partition, verify_pressure_bounds, GridSpec,
    InitialDataSpec, SweepConfig, UappNorms,
};
use anivisc_core::lp::{besov_norm_vector, BesovSpec, BlockTable, HeatFlowSampling, NormTimeSeries};
use anivisc_core::solvers::{assemble_uapp_trajectory, ApproxSolver, Scheme, StepperConfig};
use anivisc_core::spectral::slowly_varying_embed;
use anivisc_core::{Error, Grid, SpectralField};

fn stepper(dt: f64, t_end: f64, stride: usize) -> StepperConfig {
    StepperConfig {
        dt,
        t_end,
        scheme: Scheme::Rk4,
        snapshot_stride: stride,
        dealias: true,
    }
}

fn small_sweep(m_values: Vec<u32>, data: InitialDataSpec) -> SweepConfig {
    SweepConfig {
        m_values,
        grid: GridSpec { n_h: 16, n_v: 16 },
        stepper: stepper(0.01, 0.2, 2),
        data,
        seed: 11,
        ..SweepConfig::default()
    }
}

fn uapp_norms(m: u32, n: usize) -> UappNorms {
    let d = build_initial_data(&InitialDataSpec::default(), n, n, m).unwrap();
    let traj = ApproxSolver::new(&d.uh, &d.w3, stepper(0.01, 1.0, 2)).unwrap().run().unwrap();
    compute_uapp_norms(&assemble_uapp_trajectory(&traj, m).unwrap()).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

#[test]
fn degenerate_data_leaves_no_remainder() {
    let cfg = small_sweep(vec![2], InitialDataSpec::degenerate());
    let row = run_remainder_single(&cfg, 2).unwrap();
    assert!(row.sup_r_b0_half < 1e-10, "{}", row.sup_r_b0_half);
    assert!(row.l2_gradh_r < 1e-10);
    assert!(row.uapp.linf_b0_half > 0.1);
}

#[test]
fn embedded_data_keeps_its_critical_norm() {
    let spec = BesovSpec::vertical(0.5);
    let profiles = |m| {
        let d = build_initial_data(&InitialDataSpec::default(), 16, 16, m).unwrap();
        let v = [&d.uh[0], &d.uh[1], &d.w3].map(|f| slowly_varying_embed(f, m).unwrap());
        (besov_norm_vector(&v, &spec), besov_norm_vector(&d.state.components, &spec))
    };
    let (p1, s1) = profiles(1);
    for m in 2..=4 {
        let (p, s) = profiles(m);
        assert!(rel(p, p1) < 1e-12, "m = {m}: {p} vs {p1}");
        // only the εwʰ correction moves the state
        assert!(rel(s, s1) < 0.01);
    }
}

#[test]
fn largeness_proxy_is_insensitive_to_eps() {
    let s = HeatFlowSampling::default();
    let proxy = |m| {
        build_initial_data(&InitialDataSpec::default(), 16, 16, m)
            .unwrap()
            .largeness_proxy(&s)
            .unwrap()
    };
    let (a, b) = (proxy(1), proxy(3));
    assert!(a > 0.0 && rel(a, b) < 0.1, "{a} vs {b}");
    // profile norms live on the unit box and do not see m at all
    let n = |m| build_initial_data(&InitialDataSpec::default(), 16, 16, m).unwrap().profile_norms();
    assert_eq!(n(1), n(3));
}

#[test]
fn uapp_norms_scale_as_expected() {
    let (a, b) = (uapp_norms(1, 16), uapp_norms(2, 16));
    let d3 = b.d3_l1_b1_half / a.d3_l1_b1_half;
    assert!((0.4..=0.6).contains(&d3), "{d3}");
    assert!(rel(a.linf_b0_half, b.linf_b0_half) < 0.05);
    assert!(rel(a.l2_b1_half, b.l2_b1_half) < 0.1);
    assert!(rel(a.l2_b0_half, b.l2_b0_half) < 0.1);
}

fn constant_series(steps: usize, t_end: f64) -> NormTimeSeries {
    let g = Grid::new(8, 16, 0).unwrap();
    let f = SpectralField::from_fn(g, |x, y, z| (x + y).sin() * (2.0 * z).cos());
    let table = BlockTable::of_field(&f);
    let mut s = NormTimeSeries::new();
    for i in 0..=steps {
        s.push(t_end * i as f64 / steps as f64, table.clone()).unwrap();
    }
    s
}

#[test]
fn partition_of_small_data_is_one_chunk() {
    let s = constant_series(40, 1.0);
    let total = chunk_product(&s, 0, 40).unwrap();
    let p = time_partition(&s, 0.9 / total).unwrap();
    assert_eq!(p.k(), 1);
    assert_eq!(p.times, vec![0.0, 1.0]);
    assert!((p.products[0] - total).abs() < 1e-12 * total);
}

#[test]
fn partition_count_for_a_constant_norm() {
    // the product over a window of length τ is P·√(τ/T), so chunks have
    // length T(bound/P)² and there are about (P/bound)² of them
    let s = constant_series(400, 2.0);
    let total = chunk_product(&s, 0, 400).unwrap();
    for factor in [2.0, 3.0, 5.0] {
        let p = time_partition(&s, factor / total).unwrap();
        let expect = (factor * factor).ceil() as i64;
        assert!((p.k() as i64 - expect).abs() <= 1 + expect / 10, "factor {factor}: K = {}", p.k());
        assert!(p.all_within_bound());
        assert_eq!(*p.times.last().unwrap(), 2.0);
    }
}

#[test]
fn partition_grows_with_cbar() {
    let s = constant_series(200, 1.0);
    let total = chunk_product(&s, 0, 200).unwrap();
    let mut last = 0;
    for f in [0.5, 1.5, 2.5, 4.0, 6.0] {
        let k = time_partition(&s, f / total).unwrap().k();
        assert!(k >= last);
        last = k;
    }
    assert!(last > 1);
}

#[test]
fn partition_is_greedy() {
    let s = constant_series(300, 1.5);
    let total = chunk_product(&s, 0, 300).unwrap();
    let p = time_partition(&s, 4.0 / total).unwrap();
    let idx = |t: f64| s.times.iter().position(|&x| x == t).unwrap();
    for w in p.times.windows(2).take(p.k() - 1) {
        assert!(chunk_product(&s, idx(w[0]), idx(w[1]) + 1).unwrap() > p.bound);
    }
}

#[test]
fn partition_rejects_bad_input() {
    let s = constant_series(4, 1.0);
    assert!(time_partition(&s, 0.0).is_err());
    assert!(time_partition(&constant_series(0, 1.0), 1.0).is_err());
    // one snapshot interval already too large
    assert!(time_partition(&s, 1e6).is_err());
}

fn approx_run(spec: &InitialDataSpec, m: u32) -> anivisc_core::solvers::Trajectory<anivisc_core::solvers::ApproxSnapshot> {
    let d = build_initial_data(spec, 16, 16, m).unwrap();
    ApproxSolver::new(&d.uh, &d.w3, stepper(0.01, 0.5, 5)).unwrap().run().unwrap()
}

#[test]
fn planar_flow_has_no_vertical_pressure_terms() {
    let r = verify_pressure_bounds(&approx_run(&InitialDataSpec::degenerate(), 2), 2).unwrap();
    assert_eq!((r.d3_p0, r.d3_p1h, r.gradh_p13), (0.0, 0.0, 0.0));
}

#[test]
fn pressure_bounds_do_not_depend_on_eps() {
    let spec = InitialDataSpec::default();
    let a = verify_pressure_bounds(&approx_run(&spec, 1), 1).unwrap();
    let b = verify_pressure_bounds(&approx_run(&spec, 3), 3).unwrap();
    assert!(a.all_finite() && a.d3_p0 > 0.0 && a.gradh_p13 > 0.0);
    assert!(rel(a.d3_p0, b.d3_p0) < 0.1);
    assert!(rel(a.d3_p1h, b.d3_p1h) < 0.1);
    assert!(rel(a.gradh_p13, b.gradh_p13) < 0.1);
}

#[test]
fn export_writes_csv_and_json() {
    let cfg = small_sweep(vec![1], InitialDataSpec::default());
    let report = run_remainder_experiment(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (csv, json) = export_report(&report, &dir.path().join("out")).unwrap();
    let text = std::fs::read_to_string(csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(
        lines[0],
        "m,eps,sup_R_B012,L2_gradh_R,uapp_Linf,uapp_L2_B112,d3uapp_L1_B112,K_partition"
    );
    assert!(lines[1].starts_with("1,0.5,"));
    let back: anivisc_core::harness::ExperimentReport =
        serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(back, report);
    // a single ε has no slope
    assert!(report.slope.is_none());

    let mut empty = report.clone();
    empty.rows.clear();
    assert!(matches!(export_report(&empty, dir.path()), Err(Error::Empty(_))));
}

#[test]
fn sweep_is_reproducible() {
    let cfg = small_sweep(vec![1, 2], InitialDataSpec::default());
    let a = run_remainder_experiment(&cfg).unwrap();
    let b = run_remainder_experiment(&cfg).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(a.config_hash, config_hash(&cfg).unwrap());
    assert_eq!(a.rows.iter().map(|r| r.m).collect::<Vec<_>>(), vec![1, 2]);
    let fit = fit_log_log(&[0.5, 0.25], &[a.rows[0].sup_r_b0_half, a.rows[1].sup_r_b0_half]).unwrap();
    assert_eq!(a.slope.unwrap(), fit);
}

#[test]
fn config_hash_tracks_the_config() {
    let a = small_sweep(vec![1, 2], InitialDataSpec::default());
    let mut b = a.clone();
    assert_eq!(config_hash(&a).unwrap(), config_hash(&b).unwrap());
    b.seed += 1;
    assert_ne!(config_hash(&a).unwrap(), config_hash(&b).unwrap());
    assert_eq!(config_hash(&a).unwrap().len(), 64);
}

#[test]
fn sweep_config_validation() {
    let ok = small_sweep(vec![1, 2], InitialDataSpec::default());
    assert!(ok.validate().is_ok());
    let mut bad = ok.clone();
    bad.m_values.clear();
    assert!(run_remainder_experiment(&bad).is_err());
    bad.m_values = vec![2, 2];
    assert!(bad.validate().is_err());
    let mut bad = ok.clone();
    bad.cbar = 0.0;
    assert!(bad.validate().is_err());
    let mut bad = ok;
    bad.stepper.dt = 0.03;
    assert!(bad.validate().is_err());
}

#[test]
fn sweep_config_reads_json_with_defaults() {
    let text = r#"{
        "m_values": [1, 2],
        "grid": {"n_h": 16, "n_v": 16},
        "stepper": {"dt": 0.01, "t_end": 0.2, "scheme": "rk4", "snapshot_stride": 2}
    }"#;
    let cfg: SweepConfig = serde_json::from_str(text).unwrap();
    assert_eq!(cfg.cbar, 1e-3);
    assert!(cfg.stepper.dealias);
    assert_eq!(cfg.data, InitialDataSpec::default());
}
