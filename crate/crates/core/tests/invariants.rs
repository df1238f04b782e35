//! Cross-module property tests over randomized parameters.

use diffusionlab::coefficients::log_grid;
use diffusionlab::pde::solve_ibvp;
use diffusionlab::{
    Ball, Coefficient, DecayEnvelope, Geometry, InitialData, Mesh, SolveOptions,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// The envelope restarted from any of its own points retraces itself:
    /// treating `env(t1)` as a fresh initial value at `t1` reproduces the
    /// original curve at later times.
    #[test]
    fn envelope_restart_consistency(
        k in 0.1f64..5.0,
        beta in 1.05f64..4.0,
        y0 in 0.1f64..10.0,
        t1 in 0.1f64..5.0,
        dt in 0.1f64..5.0,
    ) {
        let env = DecayEnvelope::new(k, beta, 0.0, y0).unwrap();
        let mid = env.value(t1).unwrap();
        let restarted = DecayEnvelope::new(k, beta, t1, mid).unwrap();
        let a = env.value(t1 + dt).unwrap();
        let b = restarted.value(t1 + dt).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300), "{a} vs {b}");
    }

    /// Envelope values decrease in `t` and increase in `Y0`.
    #[test]
    fn envelope_monotonicities(
        k in 0.1f64..5.0,
        beta in 1.05f64..4.0,
        y0 in 0.1f64..10.0,
        t in 0.01f64..20.0,
    ) {
        let env = DecayEnvelope::new(k, beta, 0.0, y0).unwrap();
        prop_assert!(env.value(t).unwrap() < env.value(0.5 * t).unwrap());
        let bigger = DecayEnvelope::new(k, beta, 0.0, 2.0 * y0).unwrap();
        prop_assert!(bigger.value(t).unwrap() > env.value(t).unwrap());
    }

    /// Splice continuity of the counterexample coefficient across its
    /// parameter range.
    #[test]
    fn counterexample_continuity(lambda in 2.01f64..8.0, dim in 1u32..6) {
        let coeff = Coefficient::counterexample(lambda, dim).unwrap();
        if let Coefficient::Counterexample { u_star, a_star, .. } = coeff {
            let left = coeff.eval(u_star * (1.0 - 1e-12)).unwrap();
            let right = a_star * (u_star + 1.0);
            prop_assert!((left - right).abs() <= 1e-9 * right, "jump {left} vs {right}");
        }
    }

    /// Tabulated interpolation stays within the bracketing sample values.
    #[test]
    fn tabulated_interpolation_bounds(
        vals in proptest::collection::vec(0.01f64..5.0, 3..8),
        frac in 0.0f64..1.0,
    ) {
        let n = vals.len();
        let mut s = vec![0.0];
        let mut a = vec![0.0];
        for (i, v) in vals.iter().enumerate() {
            s.push((i + 1) as f64);
            a.push(*v);
        }
        let coeff = Coefficient::tabulated(s, a.clone()).unwrap();
        let idx = 1 + (frac * (n - 1) as f64) as usize;
        let x = idx as f64 + 0.5;
        let v = coeff.eval(x.min(n as f64)).unwrap();
        let lo = a[idx].min(*a.get(idx + 1).unwrap_or(&a[idx]));
        let hi = a[idx].max(*a.get(idx + 1).unwrap_or(&a[idx]));
        prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
    }
}

proptest! {
    // short solver runs are costlier; keep the case count low
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Every admissible short run preserves positivity and the discrete
    /// maximum principle, and its support never reaches a disjoint ball
    /// instantly.
    #[test]
    fn solver_positivity_and_front_delay(
        rho in 0.3f64..1.5,
        width in 0.05f64..0.15,
        height in 0.2f64..2.0,
    ) {
        let mesh = Mesh::new(Geometry::Interval { lo: 0.0, hi: 1.0 }, 121).unwrap();
        let coeff = Coefficient::power_law(1.0, rho).unwrap();
        let u0 = InitialData::Bump { center: 0.4, width, height }.sample(&mesh).unwrap();
        let times: Vec<f64> = (1..=5).map(|i| 0.002 * i as f64).collect();
        let traj = solve_ibvp(&coeff, &mesh, &u0, &times, &SolveOptions::default()).unwrap();
        traj.check_invariants().unwrap();
        let report = diffusionlab::pde::detect_front(
            &traj,
            &Ball { center: 0.85, radius: 0.1 },
            0.5,
            1e-10 * height,
        )
        .unwrap();
        prop_assert!(report.t_prime > 0.0);
    }

    /// The quadrature route reproduces the closed-form tail integral of
    /// power laws over random parameters.
    #[test]
    fn power_law_tail_integral_closed_form(
        k in 0.2f64..5.0,
        rho in 0.3f64..2.5,
        s in 1e-4f64..1e2,
    ) {
        let coeff = Coefficient::power_law(k, rho).unwrap();
        let got = coeff.tail_integral(s, 1e-9).unwrap().value;
        let exact = 1.0 / (k * rho * s.powf(rho));
        prop_assert!((got - exact).abs() <= 1e-6 * exact, "{got} vs {exact}");
    }
}

/// The tail integral is strictly decreasing for every family on a shared
/// grid (finite-difference check on a log grid).
#[test]
fn tail_integral_decreasing_across_families() {
    let fams = vec![
        Coefficient::power_law(2.0, 0.7).unwrap(),
        Coefficient::counterexample(2.5, 1).unwrap(),
        Coefficient::counterexample(4.0, 3).unwrap(),
    ];
    for coeff in &fams {
        let mut last = f64::INFINITY;
        for &s in &log_grid(1e-5, 1e2, 3) {
            let v = coeff.tail_integral(s, 1e-9).unwrap().value;
            assert!(v < last, "I not decreasing at s = {s}");
            last = v;
        }
    }
}
