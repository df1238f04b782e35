//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its measured quantities (run with `-- --nocapture` to see them).
//!
//! Every tolerance is pinned here; nothing is deferred to calibration.

use std::sync::OnceLock;
use std::time::Instant;

use diffusionlab::coefficients::{check_bounded_at_zero, log_grid};
use diffusionlab::oracles::{self, SelfSimilarSolution};
use diffusionlab::pde::{detect_front, solve_ibvp, weak_residual, TestFunction};
use diffusionlab::stability::{
    analytic_rate_basic, compute_functional, compute_y, generalized_odi_envelope, ode_comparison,
    poincare_worst_ratio, verify_envelope, verify_odi,
};
use diffusionlab::{
    Assumption, Ball, Coefficient, DecayEnvelope, FrontVerdict, Geometry, InitialData, Mesh,
    OdiParams, RateMode, SolveOptions, Trajectory, Verdict, WeightPair,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pass(criterion: &str, detail: String) {
    println!("[PASS] {criterion}: {detail}");
}

fn unit_weight() -> WeightPair {
    WeightPair::power(0.0, 1.0).unwrap()
}

/// `a ≡ k` on the sampled range with a ramp below 1e-6 preserving
/// `a(0) = 0`; solution values in the heat runs never enter the ramp.
fn plateau_coefficient(k: f64) -> Coefficient {
    Coefficient::tabulated(vec![0.0, 1e-6, 2.0], vec![0.0, k, k]).unwrap()
}

fn times_to(t_end: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| t_end * i as f64 / n as f64).collect()
}

/// Basic degenerate model run shared by criteria 5 and 8:
/// a(u) = u^{1/2}, bump data, 401 nodes, t ∈ [0, 2].
fn basic_run() -> &'static Trajectory {
    static RUN: OnceLock<Trajectory> = OnceLock::new();
    RUN.get_or_init(|| {
        let mesh = Mesh::new(Geometry::Interval { lo: 0.0, hi: 1.0 }, 401).unwrap();
        let coeff = Coefficient::power_law(1.0, 0.5).unwrap();
        let u0 = InitialData::Bump { center: 0.5, width: 0.25, height: 1.0 }
            .sample(&mesh)
            .unwrap();
        solve_ibvp(&coeff, &mesh, &u0, &times_to(2.0, 20), &SolveOptions::default()).unwrap()
    })
}

/// Linear-coefficient run shared by criteria 8 and 9: a(u) = u.
fn linear_run() -> &'static Trajectory {
    static RUN: OnceLock<Trajectory> = OnceLock::new();
    RUN.get_or_init(|| {
        let mesh = Mesh::new(Geometry::Interval { lo: 0.0, hi: 1.0 }, 201).unwrap();
        let coeff = Coefficient::power_law(1.0, 1.0).unwrap();
        let u0 = InitialData::Bump { center: 0.5, width: 0.25, height: 1.0 }
            .sample(&mesh)
            .unwrap();
        solve_ibvp(&coeff, &mesh, &u0, &times_to(1.0, 20), &SolveOptions::default()).unwrap()
    })
}

/// Narrow-bump front run shared by criteria 7a and 8.
fn front_run() -> &'static Trajectory {
    static RUN: OnceLock<Trajectory> = OnceLock::new();
    RUN.get_or_init(|| {
        let mesh = Mesh::new(Geometry::Interval { lo: 0.0, hi: 1.0 }, 201).unwrap();
        let coeff = Coefficient::power_law(1.0, 0.5).unwrap();
        let u0 = InitialData::Bump { center: 0.5, width: 0.05, height: 1.0 }
            .sample(&mesh)
            .unwrap();
        solve_ibvp(&coeff, &mesh, &u0, &times_to(0.1, 20), &SolveOptions::default()).unwrap()
    })
}

fn heat_run(n: usize) -> Trajectory {
    let mesh = Mesh::new(Geometry::Interval { lo: 0.0, hi: 1.0 }, n).unwrap();
    let u0 = InitialData::Sine { k: 1 }.sample(&mesh).unwrap();
    solve_ibvp(&plateau_coefficient(1.0), &mesh, &u0, &[0.1], &SolveOptions::default()).unwrap()
}

#[test]
fn criterion_01_counterexample_identity() {
    let started = Instant::now();
    let mut worst = 0.0f64;
    for (lam, dim) in [(2.5, 1), (3.0, 2), (4.0, 3)] {
        let sol = SelfSimilarSolution::new(lam, dim).unwrap();
        let coeff = Coefficient::counterexample(lam, dim).unwrap();
        let grid = oracles::standard_residual_grid(&sol, 40, 17);
        let rep = oracles::residual_max(&sol, &coeff, &grid).unwrap();
        assert!(
            rep.max_rel < 1e-10,
            "[FAIL] criterion 1: residual {} at lambda = {lam}",
            rep.max_rel
        );
        worst = worst.max(rep.max_rel);
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 1.0, "[FAIL] criterion 1: runtime {elapsed:.2}s exceeds 1s");
    pass("criterion 01 counterexample identity", format!("max rel residual {worst:.2e}, {elapsed:.2}s"));
}

#[test]
fn criterion_02_power_law_product_constancy() {
    let started = Instant::now();
    let tol = 1e-9;
    let mut worst = 0.0f64;
    for rho in [0.5, 1.0, 2.0] {
        let coeff = Coefficient::power_law(1.0, rho).unwrap();
        for &s in &log_grid(1e-6, 1e2, 8) {
            let phi = coeff.eval(s).unwrap() * coeff.tail_integral(s, tol).unwrap().value;
            let gap = (phi - 1.0 / rho).abs();
            assert!(gap < 1e-5, "[FAIL] criterion 2: |aI - 1/rho| = {gap:.2e} at s = {s}, rho = {rho}");
            worst = worst.max(gap);
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 5.0, "[FAIL] criterion 2: runtime {elapsed:.2}s exceeds 5s");
    pass(
        "criterion 02 power-law product constancy",
        format!("max |aI - 1/rho| = {worst:.2e}, {elapsed:.2}s"),
    );
}

#[test]
fn criterion_03_counterexample_condition_failure() {
    let coeff = Coefficient::counterexample(3.0, 2).unwrap();
    // quadrature samples at s = e^{-n}
    let ns: Vec<f64> = (8..=28).map(|n| n as f64).collect();
    let phis: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let s = (-n).exp();
            coeff.eval(s).unwrap() * coeff.tail_integral(s, 1e-9).unwrap().value
        })
        .collect();
    // least-squares line phi ≈ c·|ln s| + d
    let n = ns.len() as f64;
    let mx = ns.iter().sum::<f64>() / n;
    let my = phis.iter().sum::<f64>() / n;
    let sxx: f64 = ns.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = ns.iter().zip(&phis).map(|(x, y)| (x - mx) * (y - my)).sum();
    let c = sxy / sxx;
    let d = my - c * mx;
    let ss_res: f64 = ns.iter().zip(&phis).map(|(x, y)| (y - (c * x + d)).powi(2)).sum();
    let ss_tot: f64 = phis.iter().map(|y| (y - my) * (y - my)).sum();
    let r2 = 1.0 - ss_res / ss_tot;
    assert!(c > 0.0, "[FAIL] criterion 3: fitted slope {c} not positive");
    assert!(r2 > 0.99, "[FAIL] criterion 3: R² = {r2}");

    let report = check_bounded_at_zero(&coeff, &log_grid(1e-13, 1e-1, 4)).unwrap();
    assert_eq!(
        report.verdict,
        Verdict::Violated,
        "[FAIL] criterion 3: boundedness-at-zero verdict {:?}",
        report.verdict
    );
    pass(
        "criterion 03 counterexample condition failure",
        format!("aI ≈ {c:.4}·|ln s| + {d:.4}, R² = {r2:.5}, verdict violated"),
    );
}

#[test]
fn criterion_04_envelope_against_integrator() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let k = rng.gen_range(0.1..=5.0);
        let beta = rng.gen_range(1.0f64..=4.0).max(1.0 + 1e-6);
        let y0 = rng.gen_range(0.1..=10.0);
        let env = DecayEnvelope::new(k, beta, 0.0, y0).unwrap();
        let gap = ode_comparison(&env, 10.0, 1e-9).unwrap();
        assert!(gap < 1e-6, "[FAIL] criterion 4: gap {gap:.2e} for k={k}, beta={beta}, y0={y0}");
        worst = worst.max(gap);
    }
    // the zero-initial-value path is identically zero
    let env = DecayEnvelope::new(2.0, 3.0, 0.0, 0.0).unwrap();
    for j in 0..=6 {
        assert_eq!(env.value(10f64.powi(j)).unwrap(), 0.0, "[FAIL] criterion 4: Y0 = 0 path");
    }
    pass("criterion 04 envelope vs integrator", format!("max gap {worst:.2e} over 20 draws"));
}

#[test]
fn criterion_05_basic_model_decay() {
    let started = Instant::now();
    // numeric validation of the c0 = 1/2 Poincaré bound before use
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let draws: Vec<Vec<f64>> = (0..64)
        .map(|_| {
            let modes = rng.gen_range(1..8);
            (0..modes).map(|_| rng.gen_range(-1.0f64..1.0)).collect()
        })
        .collect();
    let q = 2.0 * 1.5 / (1.5 + 0.5);
    let ratio = poincare_worst_ratio(q, &draws);
    assert!(ratio <= 1.0, "[FAIL] criterion 5: Poincaré c0 = 1/2 bound violated, ratio {ratio}");

    let traj = basic_run();
    let series = compute_y(traj, &unit_weight(), 1.5).unwrap();
    let (k1, beta) = analytic_rate_basic(1.0, 0.5, 1.5, 0.5).unwrap();
    let env = DecayEnvelope::new(k1, beta, 0.0, series.values[0]).unwrap();
    let report = verify_envelope(&series, &env, 0.05).unwrap();
    assert_eq!(
        report.monotonicity_violations, 0,
        "[FAIL] criterion 5: Y increased along the run"
    );
    assert!(
        report.dominated,
        "[FAIL] criterion 5: envelope dominance failed, max ratio {}, first violation {:?}",
        report.max_ratio, report.first_violation
    );
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "[FAIL] criterion 5: runtime {elapsed:.1}s exceeds 60s");
    pass(
        "criterion 05 basic-model decay",
        format!(
            "k1 = {k1}, max Y/envelope = {:.4}, Poincaré ratio {ratio:.3}, {elapsed:.1}s",
            report.max_ratio
        ),
    );
}

#[test]
fn criterion_06_heat_regression_and_convergence() {
    // L² error against the separated solution at t = 0.1
    let traj = heat_run(201);
    let mesh = &traj.mesh;
    let dr = mesh.spacing();
    let err2: f64 = mesh
        .nodes()
        .iter()
        .zip(&traj.states[1])
        .map(|(&x, &u)| {
            let exact = oracles::heat_solution(1.0, 1, x, 0.1);
            (u - exact) * (u - exact) * dr
        })
        .sum::<f64>()
        .sqrt();
    assert!(err2 < 1e-3, "[FAIL] criterion 6: L² error {err2:.2e}");

    // self-convergence order under dr-halving (CFL-coupled steps)
    let runs = [heat_run(101), heat_run(201), heat_run(401)];
    let diff = |coarse: &Trajectory, fine: &Trajectory| -> f64 {
        let dr = coarse.mesh.spacing();
        let uc = &coarse.states[1];
        let uf = &fine.states[1];
        uc.iter()
            .enumerate()
            .map(|(i, &v)| {
                let d = v - uf[2 * i];
                d * d * dr
            })
            .sum::<f64>()
            .sqrt()
    };
    let e1 = diff(&runs[0], &runs[1]);
    let e2 = diff(&runs[1], &runs[2]);
    let order = (e1 / e2).log2();
    assert!(order >= 1.7, "[FAIL] criterion 6: self-convergence order {order:.2}");
    pass(
        "criterion 06 heat regression",
        format!("L² error {err2:.2e}, self-convergence order {order:.2}"),
    );
}

#[test]
fn criterion_07_finite_vs_infinite_propagation() {
    // (a) degenerate bump: the ball ahead of the front stays empty
    let traj = front_run();
    let max_u0 = traj.states[0].iter().cloned().fold(0.0, f64::max);
    let report =
        detect_front(traj, &Ball { center: 0.8, radius: 0.1 }, 0.5, 1e-10 * max_u0).unwrap();
    assert!(report.t_prime > 0.0, "[FAIL] criterion 7a: T' = {}", report.t_prime);
    assert_eq!(
        report.verdict,
        FrontVerdict::FiniteSpeedConsistent,
        "[FAIL] criterion 7a: verdict {:?}",
        report.verdict
    );

    // (b) the exact self-similar profile reaches every threshold of the
    // sweep immediately
    let sol = SelfSimilarSolution::new(3.0, 1).unwrap();
    let mesh = Mesh::new(Geometry::RadialBall { radius: 6.0, dim: 1 }, 241).unwrap();
    let times = vec![0.1, 0.45];
    let states: Vec<Vec<f64>> = times
        .iter()
        .map(|&t| mesh.nodes().iter().map(|&r| sol.value(r, t).unwrap()).collect())
        .collect();
    let traj = Trajectory::from_samples(mesh, times, states).unwrap();
    let max_u0 = traj.states[0].iter().cloned().fold(0.0, f64::max);
    let report =
        detect_front(&traj, &Ball { center: 2.2, radius: 0.2 }, 0.5, 1e-10 * max_u0).unwrap();
    assert_eq!(
        report.verdict,
        FrontVerdict::ImmediatePositivity,
        "[FAIL] criterion 7b: verdict {:?}, hits {:?}",
        report.verdict,
        report.first_hit
    );
    pass(
        "criterion 07 finite vs infinite propagation",
        format!("T' = {} on the degenerate run; immediate positivity on the exact profile", report.t_prime),
    );
}

#[test]
fn criterion_08_functional_monotonicity() {
    // power weights H(s) = s with p ∈ {0, 1, 2}; the nonnegative-product
    // assumption holds for the runs' coefficients
    let w = unit_weight();
    let grid = diffusionlab::weights::assumption_grid(2.0, 8, 40);
    for coeff in [
        Coefficient::power_law(1.0, 0.5).unwrap(),
        Coefficient::power_law(1.0, 1.0).unwrap(),
    ] {
        for p in [0.0, 1.0, 2.0] {
            let rep = diffusionlab::weights::check_assumption(
                &w,
                &coeff,
                &Assumption::ProductDerivativeNonneg { p },
                &grid,
            )
            .unwrap();
            assert_eq!(
                rep.verdict,
                Verdict::Satisfied,
                "[FAIL] criterion 8: nonneg product assumption at p = {p}"
            );
        }
    }
    let heat = heat_run(201);
    let runs: Vec<&Trajectory> = vec![basic_run(), linear_run(), front_run(), &heat];
    let mut checked = 0;
    for traj in runs {
        for p in [0.0, 1.0, 2.0] {
            let series = compute_y(traj, &w, p + 1.0).unwrap();
            let slack = 1e-10 * series.values[0];
            for (i, pair) in series.values.windows(2).enumerate() {
                assert!(
                    pair[1] <= pair[0] + slack,
                    "[FAIL] criterion 8: Y grew at output {i} for p = {p}: {} -> {}",
                    pair[0],
                    pair[1]
                );
            }
            checked += 1;
        }
    }
    pass("criterion 08 functional monotonicity", format!("{checked} run/exponent pairs nonincreasing"));
}

#[test]
fn criterion_09_generalized_odi() {
    let traj = linear_run();
    let w = unit_weight();
    let slack = 1e-2;

    // critical regime: beta = q1/2 (gamma1 = 1/2, q1 = 1), Y = ∫u² dx
    let critical = OdiParams::CriticalExponent { p1: 1.0, gamma1: 0.5 };
    let y = compute_y(traj, &w, 2.0).unwrap();
    let rep = verify_odi(&y, &[], &critical, RateMode::Fitted, slack).unwrap();
    assert!(rep.holds, "[FAIL] criterion 9: critical ODI residual {}", rep.max_residual);
    assert!(rep.minimal_rate > 0.0, "[FAIL] criterion 9: measured c = {}", rep.minimal_rate);
    let c_critical = rep.minimal_rate;

    // supercritical regime: beta = 1 > q1/2, Z = ∫ H^{p0} with p0 = 1
    let zform = OdiParams::ZWeighted { p1: 1.0, q1: 1.0, gamma1: 1.0, beta: 1.0, dim: 1 };
    let z_exp = zform.z_exponents();
    let z = compute_functional(traj, &w, z_exp[0]).unwrap();
    let rep_z = verify_odi(&y, std::slice::from_ref(&z), &zform, RateMode::Fitted, slack).unwrap();
    assert!(rep_z.holds && rep_z.minimal_rate > 0.0, "[FAIL] criterion 9: damped ODI");

    // two-term variant with beta1 > beta2 > q1/2
    let two = OdiParams::TwoTerm {
        p1: 1.0,
        q1: 1.0,
        gamma1: 1.0,
        beta1: 1.25,
        beta2: 1.0,
        dim: 1,
    };
    let exps = two.z_exponents();
    let z1 = compute_functional(traj, &w, exps[0]).unwrap();
    let z2 = compute_functional(traj, &w, exps[1]).unwrap();
    let rep_two = verify_odi(&y, &[z1.clone(), z2.clone()], &two, RateMode::Fitted, slack).unwrap();
    assert!(rep_two.holds && rep_two.minimal_rate > 0.0, "[FAIL] criterion 9: two-term ODI");

    // every auxiliary functional stays bounded by its initial value
    for series in [&z, &z1, &z2] {
        let z0 = series.values[0];
        for &v in &series.values {
            assert!(v <= z0 + 1e-10 * z0, "[FAIL] criterion 9: Z exceeded Z(t0): {v} > {z0}");
        }
    }
    pass(
        "criterion 09 generalized ODI",
        format!(
            "measured c = {:.3} (critical), k = {:.3} (damped), K = {:.3} (two-term)",
            c_critical, rep_z.minimal_rate, rep_two.minimal_rate
        ),
    );
}

#[test]
fn criterion_10_assumption_checkers() {
    use diffusionlab::weights::{assumption_grid, check_assumption};
    let unit = unit_weight();
    let sqrt_weight = WeightPair::power(0.5, 1.0).unwrap();
    let linear = Coefficient::power_law(1.0, 1.0).unwrap();

    // closed-form constants reproduced to 1e-9
    let grid = assumption_grid(10.0, 8, 60);
    let cases: Vec<(&WeightPair, Assumption, &str, f64)> = vec![
        (&unit, Assumption::LowerEnvelope { p1: 1.0, q1: 1.0 }, "c3", 2.0),
        (&sqrt_weight, Assumption::DerivativeBounded { gamma1: 1.0 }, "c1", 1.0),
        (&unit, Assumption::UpperEnvelope { gamma1: 1.0, beta: 1.0 }, "c4", 2.0),
    ];
    for (w, assumption, name, expect) in &cases {
        let rep = check_assumption(w, &linear, assumption, &grid).unwrap();
        assert_eq!(rep.verdict, Verdict::Satisfied, "[FAIL] criterion 10: {name} verdict");
        let got = rep.constants[*name];
        assert!(
            (got - expect).abs() < 1e-9,
            "[FAIL] criterion 10: {name} = {got}, expected {expect}"
        );
    }

    // grid-doubling stability of every verdict exercised by the suite
    let fine = assumption_grid(10.0, 16, 120);
    let mut suite: Vec<(&WeightPair, Assumption)> =
        cases.iter().map(|(w, a, _, _)| (*w, *a)).collect();
    for p in [0.0, 1.0, 2.0] {
        suite.push((&unit, Assumption::ProductDerivativeNonneg { p }));
    }
    suite.push((&sqrt_weight, Assumption::DerivativeBounded { gamma1: 0.2 }));
    suite.push((
        &unit,
        Assumption::UpperEnvelopeTwoTerm { gamma1: 1.0, beta1: 1.25, beta2: 1.0 },
    ));
    let mut stable = 0;
    for (w, assumption) in &suite {
        let base = check_assumption(w, &linear, assumption, &grid).unwrap();
        let refined = check_assumption(w, &linear, assumption, &fine).unwrap();
        assert_eq!(
            base.verdict, refined.verdict,
            "[FAIL] criterion 10: verdict flipped under grid doubling for {}",
            assumption.id()
        );
        stable += 1;
    }

    // the condition checks of the counterexample analysis are also stable
    let ce = Coefficient::counterexample(3.0, 2).unwrap();
    let v1 = check_bounded_at_zero(&ce, &log_grid(1e-13, 1e-1, 4)).unwrap().verdict;
    let v2 = check_bounded_at_zero(&ce, &log_grid(1e-13, 1e-1, 8)).unwrap().verdict;
    assert_eq!(v1, v2, "[FAIL] criterion 10: boundedness verdict flipped under grid doubling");
    pass(
        "criterion 10 assumption checkers",
        format!("3 closed-form constants to 1e-9; {} verdicts grid-stable", stable + 1),
    );
}

// Supplementary: the weak-form residual check on the suite's runs, tying
// the solver output back to the divergence-form inequality.
#[test]
fn weak_form_gap_on_suite_runs() {
    let w = unit_weight();
    let coeff = Coefficient::power_law(1.0, 1.0).unwrap();
    let tf = TestFunction { x_center: 0.5, x_halfwidth: 0.35, t_center: 0.5, t_halfwidth: 0.4 };
    let gap = weak_residual(linear_run(), &w, &coeff, &[tf]).unwrap();
    // equality solutions leave only discretization error
    assert!(gap.abs() < 5e-3, "[FAIL] weak-form gap {gap}");
    pass("supplementary weak-form gap", format!("gap {gap:.2e}"));
}

// Supplementary: the generalized comparison machinery reduces to the
// power envelope.
#[test]
fn generalized_envelope_reduction() {
    let env = DecayEnvelope::new(1.0, 2.0, 0.0, 1.0).unwrap();
    let series = generalized_odi_envelope(|y| y * y, 1.0, 0.0, 10.0, 51).unwrap();
    for (&t, &y) in series.times.iter().zip(&series.values) {
        let exact = env.value(t).unwrap();
        assert!((y - exact).abs() <= 1e-6 * exact.max(1e-12), "[FAIL] reduction at t = {t}");
    }
    pass("supplementary generalized envelope reduction", "max gap within 1e-6".into());
}

// Supplementary: the bounded-solution weighted form reduces to the basic
// model when the weight cancels the degeneracy. With h(s) = ½ s^{-1/2}
// (so H = √s) against a(u) = u^{1/2}, the flux factor is the constant ½,
// both bounded structural assumptions hold with exact constants, and
// Y = ∫ H(u)^{p+1} dx at p = 2 is the basic-model functional ∫ u^{3/2} dx
// with the same ODI exponent 4/3.
#[test]
fn bounded_weighted_form_reduces_to_basic_model() {
    use diffusionlab::weights::{assumption_grid, check_assumption};
    let w = WeightPair::power(0.5, 1.0).unwrap();
    let coeff = Coefficient::power_law(1.0, 0.5).unwrap();
    let grid = assumption_grid(2.0, 8, 40);

    let rep = check_assumption(&w, &coeff, &Assumption::DerivativeBounded { gamma1: 1.0 }, &grid)
        .unwrap();
    assert_eq!(rep.verdict, Verdict::Satisfied);
    assert!((rep.constants["c1"] - 1.0).abs() < 1e-9, "[FAIL] c1 = {}", rep.constants["c1"]);
    let rep =
        check_assumption(&w, &coeff, &Assumption::ProductDerivativeLower { gamma1: 1.0 }, &grid)
            .unwrap();
    assert_eq!(rep.verdict, Verdict::Satisfied);
    assert!((rep.constants["c2"] - 0.5).abs() < 1e-9, "[FAIL] c2 = {}", rep.constants["c2"]);

    let params = OdiParams::BoundedWeighted { p: 2.0, gamma1: 1.0 };
    assert!((params.odi_exponent() - 4.0 / 3.0).abs() < 1e-15);
    let y = compute_y(basic_run(), &w, 3.0).unwrap();
    let rep = verify_odi(&y, &[], &params, RateMode::Fitted, 1e-2).unwrap();
    assert!(rep.holds && rep.minimal_rate > 0.0, "[FAIL] bounded weighted ODI");
    pass(
        "supplementary bounded-weighted reduction",
        format!("c1 = 1, c2 = 1/2 exact; measured rate {:.3}", rep.minimal_rate),
    );
}

// Supplementary: the multi-term damping generalization, including an
// auxiliary exponent below 1.
#[test]
fn multi_term_damped_odi() {
    let traj = linear_run();
    let w = unit_weight();
    let params = OdiParams::MultiTerm {
        p1: 1.0,
        q1: 1.0,
        gamma1: 1.0,
        betas: vec![1.25, 1.0, 0.75],
        dim: 1,
    };
    let y = compute_y(traj, &w, 2.0).unwrap();
    let z: Vec<_> = params
        .z_exponents()
        .iter()
        .map(|&e| compute_functional(traj, &w, e).unwrap())
        .collect();
    assert_eq!(z.len(), 3);
    let rep = verify_odi(&y, &z, &params, RateMode::Fitted, 1e-2).unwrap();
    assert!(rep.holds && rep.minimal_rate > 0.0, "[FAIL] multi-term ODI");
    for series in &z {
        let z0 = series.values[0];
        assert!(
            series.values.iter().all(|&v| v <= z0 * (1.0 + 1e-10)),
            "[FAIL] multi-term auxiliary grew"
        );
    }
    pass("supplementary multi-term ODI", format!("measured rate {:.3}", rep.minimal_rate));
}

// Supplementary: radial functionals carry the r^{N-1} measure factor.
#[test]
fn radial_functional_measure() {
    let mesh = Mesh::new(Geometry::RadialBall { radius: 2.0, dim: 3 }, 201).unwrap();
    let c: f64 = 0.5;
    let m = 2.0;
    let traj = Trajectory::from_samples(mesh, vec![0.0], vec![vec![c; 201]]).unwrap();
    let y = compute_y(&traj, &unit_weight(), m).unwrap().values[0];
    // ∫_0^R c^m r² dr = c^m R³/3
    let exact = c.powf(m) * 2.0f64.powi(3) / 3.0;
    assert!((y - exact).abs() < 1e-4 * exact, "[FAIL] radial measure: {y} vs {exact}");
    pass("supplementary radial measure", format!("Y = {y:.6} vs {exact:.6}"));
}
