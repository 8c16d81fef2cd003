mod common;

use anivisc_core::harness::{build_initial_data, InitialDataSpec};
use anivisc_core::lp::{besov_norm_vector, BesovSpec};
use anivisc_core::solvers::{
    assemble_uapp, assemble_uapp_trajectory, compute_forcing_f, compute_p0, compute_p1, compute_pressures,
    reconstruct_wh, solve_ns2d_slices, solve_transport_w3, step_nsh, uapp_forcing, ApproxSolver, NshSolver,
    Scheme, SliceEnsemble, StepperConfig, Trajectory,
};
use anivisc_core::spectral::{
    advect, derivative, divergence, horizontal_laplacian, inverse_horizontal_laplacian, leray_project,
    product, relative_divergence, slowly_varying_embed,
};
use anivisc_core::{Axis, Error, Grid, SpectralField, VelocityState};
use common::*;

fn cfg(dt: f64, t_end: f64, stride: usize) -> StepperConfig {
    StepperConfig {
        dt,
        t_end,
        scheme: Scheme::Rk4,
        snapshot_stride: stride,
        dealias: true,
    }
}

fn state(g: Grid, f: [&(dyn Fn(f64, f64, f64) -> f64 + Sync); 3]) -> VelocityState {
    let c = f.map(|h| SpectralField::from_fn(g, |x, y, z| h(x, y, z)));
    VelocityState::new(c, 0.0).unwrap()
}

fn zero(_: f64, _: f64, _: f64) -> f64 {
    0.0
}

fn run_steps(mut s: VelocityState, c: &StepperConfig, n: usize) -> Vec<VelocityState> {
    let mut out = vec![s.clone()];
    for _ in 0..n {
        s = step_nsh(&s, c).unwrap();
        out.push(s.clone());
    }
    out
}

#[test]
fn horizontal_shear_decays_exactly() {
    let g = Grid::cube(16).unwrap();
    let s0 = state(g, [&|_, y, _| y.cos(), &zero, &zero]);
    let c = cfg(0.01, 1.0, 1);
    for (i, s) in run_steps(s0.clone(), &c, 100).iter().enumerate() {
        let want = &s0.components[0] * (-(i as f64) * 0.01).exp();
        assert!(s.components[0].max_coeff_diff(&want) < 1e-10);
        assert!(s.components[1].max_coeff() < 1e-14 && s.components[2].max_coeff() < 1e-14);
    }
}

#[test]
fn vertical_velocity_diffuses_horizontally() {
    let g = Grid::cube(16).unwrap();
    let s0 = state(g, [&zero, &zero, &|x, _, _| x.sin()]);
    let end = run_steps(s0.clone(), &cfg(0.01, 1.0, 1), 100).pop().unwrap();
    let want = &s0.components[2] * (-1.0f64).exp();
    assert!(end.components[2].max_coeff_diff(&want) < 1e-10);
    assert!((end.time - 1.0).abs() < 1e-12);
}

#[test]
fn vertical_only_mode_is_not_damped() {
    // horizontal velocity depending on x3 alone: u·∇u = 0 and Δ_h u = 0
    let g = Grid::cube(16).unwrap();
    let s0 = state(g, [&|_, _, z| z.sin(), &|_, _, z| (2.0 * z).cos(), &zero]);
    let n0 = s0.l2_norm();
    let end = run_steps(s0.clone(), &cfg(0.01, 1.0, 1), 100).pop().unwrap();
    assert!((end.l2_norm() - n0).abs() < 1e-10 * n0);
    for (a, b) in end.components.iter().zip(&s0.components) {
        assert!(a.max_coeff_diff(b) < 1e-12);
    }
}

#[test]
fn vertical_only_column_is_stationary() {
    // Δ_h kills sin x3 and the self-advection (0, 0, sin x3 cos x3) is a
    // gradient, so the step leaves the field as it is.
    let g = Grid::cube(16).unwrap();
    let s0 = state(g, [&zero, &zero, &|_, _, z| z.sin()]);
    let n0 = s0.l2_norm();
    let end = run_steps(s0.clone(), &cfg(0.01, 1.0, 1), 100).pop().unwrap();
    assert!((end.l2_norm() - n0).abs() < 1e-10 * n0);
    assert!(end.components[2].max_coeff_diff(&s0.components[2]) < 1e-12);
}

#[test]
fn cfl_violation_reports_advisory_step() {
    let g = Grid::cube(16).unwrap();
    let s0 = state(g, [&|_, y, _| 50.0 * y.cos(), &zero, &zero]);
    match step_nsh(&s0, &cfg(0.1, 1.0, 1)) {
        Err(Error::Cfl { advised, dt, .. }) => assert!(advised < dt),
        other => panic!("expected a CFL error, got {other:?}"),
    }
}

#[test]
fn solver_rejects_nonzero_mean() {
    let g = Grid::cube(8).unwrap();
    let s0 = state(g, [&|_, _, _| 1.0, &zero, &zero]);
    assert!(matches!(NshSolver::new(&s0, cfg(0.01, 0.1, 1)), Err(Error::NonzeroMean(_))));
}

#[test]
fn energy_balance_and_divergence_of_full_system() {
    let data = build_initial_data(&InitialDataSpec::default(), 16, 32, 1).unwrap();
    let mut solver = NshSolver::new(&data.state, cfg(0.01, 0.5, 5)).unwrap();
    let e0 = solver.energy();
    let mut worst_div = 0.0f64;
    solver
        .run(|s| {
            worst_div = worst_div.max(divergence(&s.state().components).max_coeff());
            let bal = (s.energy() + s.dissipated() - e0).abs() / e0;
            assert!(bal < 1e-6, "balance {bal} at t = {}", s.time());
            Ok(())
        })
        .unwrap();
    assert!(worst_div < 1e-10);
}

fn taylor_green_slices(g: Grid) -> SliceEnsemble {
    let uh = [
        SpectralField::from_fn(g, |x, y, _| x.cos() * y.sin()),
        SpectralField::from_fn(g, |x, y, _| -x.sin() * y.cos()),
    ];
    SliceEnsemble::from_spectral(&uh).unwrap()
}

#[test]
fn taylor_green_slices_decay_exactly() {
    let g = Grid::new(32, 4, 0).unwrap();
    let init = taylor_green_slices(g);
    let run = solve_ns2d_slices(&init, &cfg(0.01, 0.5, 10)).unwrap();
    let last = run.trajectory.states.last().unwrap().to_spectral();
    let t = *run.trajectory.times.last().unwrap();
    assert!((t - 0.5).abs() < 1e-12);
    let decay = (-2.0 * t).exp();
    let init = init.to_spectral();
    for (a, b) in last.iter().zip(&init) {
        assert!(a.max_coeff_diff(&(b * decay)) < 1e-8);
    }
}

#[test]
fn zero_slices_stay_zero() {
    let g = Grid::new(8, 8, 0).unwrap();
    let run = solve_ns2d_slices(&SliceEnsemble::zeros(g), &cfg(0.01, 0.1, 1)).unwrap();
    assert_eq!(run.trajectory.len(), 11);
    assert!(run.trajectory.states.iter().all(|s| s.slice_energies().iter().all(|e| *e == 0.0)));
}

#[test]
fn slice_energy_balance() {
    let g = Grid::new(16, 16, 0).unwrap();
    let (uh, _) = InitialDataSpec::default().profiles(g).unwrap();
    let init = SliceEnsemble::from_spectral(&uh).unwrap();
    let run = solve_ns2d_slices(&init, &cfg(0.005, 0.5, 10)).unwrap();
    let e0 = run.trajectory.states[0].slice_energies();
    for (state, diss) in run.trajectory.states.iter().zip(&run.dissipated) {
        for ((e, d), e0) in state.slice_energies().iter().zip(diss).zip(&e0) {
            if *e0 > 0.0 {
                assert!((e + 2.0 * d - e0).abs() < 1e-6 * e0);
            }
        }
    }
}

#[test]
fn slice_order_does_not_matter() {
    let g = Grid::new(16, 8, 0).unwrap();
    let (uh, _) = InitialDataSpec::default().profiles(g).unwrap();
    let init = SliceEnsemble::from_spectral(&uh).unwrap();
    let perm = [3, 7, 0, 5, 1, 6, 2, 4];
    let c = cfg(0.01, 0.2, 5);
    let a = solve_ns2d_slices(&init, &c).unwrap();
    let b = solve_ns2d_slices(&init.permute_slices(&perm).unwrap(), &c).unwrap();
    let a_last = a.trajectory.states.last().unwrap().permute_slices(&perm).unwrap();
    let b_last = b.trajectory.states.last().unwrap();
    for i in 0..2 {
        assert_eq!(a_last.uh[i].data(), b_last.uh[i].data());
    }
}

fn slice_trajectory(c: &StepperConfig, uh: &[SpectralField; 2]) -> Trajectory<SliceEnsemble> {
    let mut every = *c;
    every.snapshot_stride = 1;
    solve_ns2d_slices(&SliceEnsemble::from_spectral(uh).unwrap(), &every).unwrap().trajectory
}

#[test]
fn transport_without_flow_is_heat_flow() {
    let g = Grid::new(16, 8, 0).unwrap();
    let w0 = SpectralField::from_fn(g, |x, y, z| x.sin() * z.cos() + 0.5 * (2.0 * x - y).cos() * (2.0 * z).sin());
    let c = cfg(0.01, 0.5, 1);
    let traj = slice_trajectory(&c, &[SpectralField::zeros(g), SpectralField::zeros(g)]);
    let w = solve_transport_w3(&traj, &w0, &c).unwrap();
    for (t, f) in w.times.iter().zip(&w.states) {
        let want = w0.scaled_by(|a, b, _| {
            let k1 = g.deriv_wavenumber(Axis::X1, a);
            let k2 = g.deriv_wavenumber(Axis::X2, b);
            (-t * (k1 * k1 + k2 * k2)).exp()
        });
        assert!(f.max_coeff_diff(&want) < 1e-12);
    }
}

#[test]
fn transport_keeps_horizontally_constant_data() {
    let g = Grid::new(16, 8, 0).unwrap();
    let w0 = SpectralField::from_fn(g, |_, _, _| 0.7);
    let (uh, _) = InitialDataSpec::default().profiles(g).unwrap();
    let c = cfg(0.01, 0.3, 1);
    let w = solve_transport_w3(&slice_trajectory(&c, &uh), &w0, &c).unwrap();
    for f in &w.states {
        assert!(f.max_coeff_diff(&w0) < 1e-14);
    }
}

#[test]
fn transport_rejects_misaligned_and_sheared_input() {
    let g = Grid::new(8, 8, 0).unwrap();
    let c = cfg(0.01, 0.1, 1);
    let traj = slice_trajectory(&cfg(0.01, 0.05, 1), &[SpectralField::zeros(g), SpectralField::zeros(g)]);
    let w0 = SpectralField::from_fn(g, |x, _, z| x.sin() * z.cos());
    assert!(matches!(solve_transport_w3(&traj, &w0, &c), Err(Error::Misaligned(_))));
    let full = slice_trajectory(&c, &[SpectralField::zeros(g), SpectralField::zeros(g)]);
    let shear = SpectralField::from_fn(g, |_, _, z| z.cos());
    assert!(solve_transport_w3(&full, &shear, &c).is_err());
}

#[test]
fn transport_l2_norm_does_not_grow() {
    let g = Grid::new(16, 8, 0).unwrap();
    let (uh, w0) = InitialDataSpec::default().profiles(g).unwrap();
    let c = cfg(0.01, 0.5, 1);
    let w = solve_transport_w3(&slice_trajectory(&c, &uh), &w0, &c).unwrap();
    for pair in w.states.windows(2) {
        assert!(pair[1].l2_norm() <= pair[0].l2_norm() * (1.0 + 1e-10));
    }
}

/// L² distance between a coarse field and a fine one, comparing the
/// coefficients the coarse grid holds and counting the rest of the fine
/// spectrum as error.
fn coarse_vs_fine(coarse: &SpectralField, fine: &SpectralField) -> f64 {
    let g = coarse.grid();
    let h = (g.n_h() / 2) as i64;
    let v = (g.n_v() / 2) as i64;
    let (mut err, mut shared) = (0.0, 0.0);
    for a in -h + 1..h {
        for b in -h + 1..h {
            for c in -v + 1..v {
                err += (coarse.mode(a, b, c) - fine.mode(a, b, c)).norm_sqr();
                shared += fine.mode(a, b, c).norm_sqr();
            }
        }
    }
    err += (fine.coeff_energy() - shared).max(0.0);
    (err * g.volume()).sqrt()
}

#[test]
fn transport_self_convergence() {
    let run = |n: usize| {
        let g = Grid::new(n, 8, 0).unwrap();
        let uh = [
            SpectralField::from_fn(g, |x, y, _| x.cos() * y.sin()),
            SpectralField::from_fn(g, |x, y, _| -x.sin() * y.cos()),
        ];
        let w0 = SpectralField::from_fn(g, |x, y, z| (x + y).sin() * z.cos());
        let c = cfg(0.01, 0.5, 1);
        let w = solve_transport_w3(&slice_trajectory(&c, &uh), &w0, &c).unwrap();
        w.states.last().unwrap().clone()
    };
    let coarse = run(32);
    let fine = run(64);
    let err = coarse_vs_fine(&coarse, &fine);
    assert!(err < 1e-6, "{err}");
}

#[test]
fn reconstruction_examples() {
    let g = Grid::new(8, 8, 0).unwrap();
    let w3 = SpectralField::from_fn(g, |x, _, z| x.sin() * z.sin());
    let [a, b] = reconstruct_wh(&w3).unwrap();
    let want = SpectralField::from_fn(g, |x, _, z| x.cos() * z.cos());
    assert!(a.max_coeff_diff(&want) < 1e-15);
    assert!(b.max_coeff() < 1e-15);
    let div = &derivative(&a, Axis::X1) + &derivative(&w3, Axis::X3);
    assert!(div.max_coeff() < 1e-15);

    let flat = SpectralField::from_fn(g, |x, y, _| (x + y).cos());
    assert!(reconstruct_wh(&flat).unwrap().iter().all(|c| c.max_coeff() == 0.0));

    let sheared = SpectralField::from_fn(g, |x, _, z| x.cos() + z.sin());
    assert!(matches!(reconstruct_wh(&sheared), Err(Error::HorizontalMean { .. })));
}

#[test]
fn random_reconstruction_is_solenoidal() {
    let g = Grid::new(16, 16, 0).unwrap();
    let mut w3 = anivisc_core::spectral::dealias(&noise(g, 8));
    // Admissible: no x3-dependent horizontal mean.
    w3.apply(|a, b, c| {
        let v = if a == 0 && b == 0 && c != 0 { 0.0 } else { 1.0 };
        anivisc_core::Complex64::new(v, 0.0)
    });
    let [a, b] = reconstruct_wh(&w3).unwrap();
    let v = [a, b, w3];
    assert!(relative_divergence(&v) < 1e-12);
}

#[test]
fn taylor_green_pressure() {
    let g = Grid::new(32, 4, 0).unwrap();
    let init = taylor_green_slices(g);
    let run = solve_ns2d_slices(&init, &cfg(0.01, 0.5, 25)).unwrap();
    for (t, s) in run.trajectory.times.iter().zip(&run.trajectory.states) {
        let p0 = compute_p0(&s.to_spectral()).unwrap();
        let want = SpectralField::from_fn(g, |x, y, _| -((2.0 * x).cos() + (2.0 * y).cos()) / 4.0 * (-4.0 * t).exp());
        assert!(p0.max_coeff_diff(&want) < 1e-8, "t = {t}");
    }
}

#[test]
fn zero_flow_has_zero_pressures() {
    let g = Grid::new(8, 8, 0).unwrap();
    let w3 = SpectralField::from_fn(g, |x, _, z| x.sin() * z.sin());
    let p = compute_pressures(&[SpectralField::zeros(g), SpectralField::zeros(g)], &w3).unwrap();
    assert!(p.p0.max_coeff() == 0.0 && p.p1h.max_coeff() == 0.0 && p.p13.max_coeff() == 0.0);
}

#[test]
fn pressure_solves_its_poisson_problem() {
    let g = Grid::new(16, 16, 0).unwrap();
    let (uh, w3) = InitialDataSpec::default().profiles(g).unwrap();
    let p0 = compute_p0(&uh).unwrap();
    let mut rhs = SpectralField::zeros(g);
    let axes = [Axis::X1, Axis::X2];
    for i in 0..2 {
        for j in 0..2 {
            let uu = product(&uh[i], &uh[j]).unwrap();
            rhs += &derivative(&derivative(&uu, axes[i]), axes[j]);
        }
    }
    let lhs = -&horizontal_laplacian(&p0);
    assert!(lhs.max_coeff_diff(&rhs) < 1e-11);
    assert!(p0.mode(0, 0, 0).norm() < 1e-15);

    let wh = reconstruct_wh(&w3).unwrap();
    let w = [wh[0].clone(), wh[1].clone(), w3.clone()];
    let (p1h, p13) = compute_p1(&uh, &w).unwrap();
    let mut want13 = SpectralField::zeros(g);
    for i in 0..2 {
        let uw = product(&uh[i], &w3).unwrap();
        want13 += &derivative(&derivative(&uw, axes[i]), Axis::X3);
    }
    let want13 = inverse_horizontal_laplacian(&-&want13).unwrap();
    assert!(p13.max_coeff_diff(&want13) < 1e-12);
    let _ = p1h;
}

#[test]
fn planar_flow_without_w_is_the_2d_solution() {
    let data = build_initial_data(&InitialDataSpec::degenerate(), 16, 8, 2).unwrap();
    let embedded = slowly_varying_embed(&data.uh[0], 2).unwrap();
    assert!(data.state.components[0].max_coeff_diff(&embedded) == 0.0);
    assert!(data.state.components[2].max_coeff() == 0.0);
    assert!(relative_divergence(&data.state.components) < 1e-14);
}

#[test]
fn initial_uapp_matches_stretched_profiles() {
    let g = Grid::new(16, 16, 0).unwrap();
    let spec = InitialDataSpec::default();
    let (uh, w3) = spec.profiles(g).unwrap();
    for m in 0..3 {
        let eps = 0.5f64.powi(m as i32);
        let u = assemble_uapp(&uh, &w3, m, 0.0).unwrap();
        let wh = reconstruct_wh(&w3).unwrap();
        for i in 0..2 {
            let mut want = uh[i].clone();
            want.axpy(eps, &wh[i]);
            let want = slowly_varying_embed(&want, m).unwrap();
            assert!(u.components[i].max_coeff_diff(&want) < 1e-15);
        }
        assert!(u.components[2].max_coeff_diff(&slowly_varying_embed(&w3, m).unwrap()) == 0.0);
        // Physical check: u^3(x_h, x3) = w3(x_h, eps x3).
        let phys = u.components[2].to_physical();
        let su = u.grid();
        let direct = anivisc_core::spectral::sample_fn(su, |x, y, z| {
            let z = eps * z;
            0.5 * (x - 2.0 * y).sin() * z.cos() + 0.25 * (3.0 * x).cos() * (2.0 * z).sin()
        });
        assert!(max_diff(&phys, &direct) < 1e-13);
    }
}

fn approx_trajectory(n: usize, n_v: usize, dt: f64, t_end: f64) -> Trajectory<anivisc_core::solvers::ApproxSnapshot> {
    let g = Grid::new(n, n_v, 0).unwrap();
    let (uh, w3) = InitialDataSpec::default().profiles(g).unwrap();
    ApproxSolver::new(&uh, &w3, cfg(dt, t_end, 1)).unwrap().run().unwrap()
}

#[test]
fn uapp_stays_divergence_free() {
    let traj = approx_trajectory(16, 16, 0.01, 0.5);
    for m in [0, 1, 3] {
        let u = assemble_uapp_trajectory(&traj, m).unwrap();
        for s in &u.states {
            assert!(relative_divergence(&s.components) < 1e-11);
        }
    }
}

#[test]
fn forcing_vanishes_for_degenerate_data() {
    let g = Grid::new(16, 8, 0).unwrap();
    let (uh, w3) = InitialDataSpec::degenerate().profiles(g).unwrap();
    let wh = reconstruct_wh(&w3).unwrap();
    let w = [wh[0].clone(), wh[1].clone(), w3.clone()];
    let pr = compute_pressures(&uh, &w3).unwrap();
    let f = compute_forcing_f(&uh, &w, &pr.p0, &pr.p1(), 2).unwrap();
    assert!(f.iter().all(|c| c.max_coeff() < 1e-15));
}

/// Fourth-order central difference of the states around index `i`.
fn central_difference(states: &[VelocityState], i: usize, dt: f64) -> [SpectralField; 3] {
    std::array::from_fn(|k| {
        let c = |j: usize| &states[j].components[k];
        let mut d = c(i - 2) * (1.0 / 12.0);
        d.axpy(-8.0 / 12.0, c(i - 1));
        d.axpy(8.0 / 12.0, c(i + 1));
        d.axpy(-1.0 / 12.0, c(i + 2));
        &d * (1.0 / dt)
    })
}

/// Size of the projected residual of the system for `u_app` at step `i`.
fn uapp_residual(n_v: usize, dt: f64, m: u32, i: usize) -> f64 {
    let traj = approx_trajectory(16, n_v, dt, (i + 2) as f64 * dt);
    let u = assemble_uapp_trajectory(&traj, m).unwrap();
    let dtu = central_difference(&u.states, i, dt);
    let ui = &u.states[i].components;
    let forcing = uapp_forcing(&traj.states[i], m).unwrap();
    let residual: [SpectralField; 3] = std::array::from_fn(|k| {
        let mut r = dtu[k].clone();
        r += &advect(ui, &ui[k]).unwrap();
        r -= &horizontal_laplacian(&ui[k]);
        r -= &forcing[k];
        r
    });
    anivisc_core::spectral::vector_l2_norm(&leray_project(&residual))
}

#[test]
fn uapp_satisfies_the_system_up_to_forcing() {
    // The slices are collocated in x3 while the 3D products are truncated
    // in ξ3, so the vertical grid must resolve the slice harmonics.
    for m in [0, 2] {
        let coarse = uapp_residual(64, 0.002, m, 8);
        let fine = uapp_residual(64, 0.001, m, 16);
        assert!(fine < 1e-6, "m = {m}: {fine}");
        assert!(coarse / fine > 10.0, "m = {m}: {coarse} -> {fine}");
    }
}

#[test]
fn forcing_halves_with_eps() {
    let g = Grid::new(16, 16, 0).unwrap();
    let (uh, w3) = InitialDataSpec::default().profiles(g).unwrap();
    let wh = reconstruct_wh(&w3).unwrap();
    let w = [wh[0].clone(), wh[1].clone(), w3.clone()];
    let pr = compute_pressures(&uh, &w3).unwrap();
    let spec = BesovSpec::vertical(0.5);
    let norm = |m: u32| {
        let eps = 0.5f64.powi(m as i32);
        let f = compute_forcing_f(&uh, &w, &pr.p0, &pr.p1(), m).unwrap();
        eps * besov_norm_vector(&f, &spec)
    };
    for m in 1..4 {
        let ratio = norm(m + 1) / norm(m);
        assert!((ratio - 0.5).abs() < 0.1, "m = {m}: {ratio}");
    }
}
