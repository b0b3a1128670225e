use num_traits::Zero;
use schroeder::fnser::estimate_radius;
use schroeder::logistic::*;
use schroeder::scalar::rational;

#[test]
fn residual_exact_through_200() {
    for s in [rational(2, 1), rational(5, 2), rational(3, 1), rational(4, 1)] {
        let ser = logistic_potential_series(&s, 200).unwrap();
        let r = ser.residual_scaled();
        assert_eq!(r.len(), 201);
        assert!(r.iter().all(|c| c.is_zero()), "s = {s}");
    }
}

#[test]
fn radius_at_order_400() {
    for (s, target) in [(rational(1, 2), 0.5), (rational(3, 2), 1.0 / 3.0), (rational(5, 2), 0.625), (rational(4, 1), 1.0)] {
        let ser = logistic_potential_series(&s, 400).unwrap();
        let est = estimate_radius(&ser, 50).unwrap();
        assert!((est.corrected_radius / target - 1.0).abs() < 0.05, "s = {s}");
        assert!(!est.still_growing);
    }
}

#[test]
fn s1_diagnostic_500() {
    let rep = s1_growth_diagnostic(500).unwrap();
    assert!(rep.asymptotic);
    assert!((rep.l_estimate() - 0.058).abs() < 0.01);
    assert!((rep.slope_ratio() - 1.0).abs() < 0.10);
    assert!(rep.rows[499].c_root > 2.0);
    assert!((rep.apparent_radius_25 - 0.5).abs() < 0.05);
    assert_eq!(s1_growth_diagnostic(99).unwrap_err().kind(), "InsufficientOrder");
}

#[test]
fn s1_series_is_the_unit_limit_of_the_general_series() {
    // cₙ = lim_{s→1} ln²s · a_{n+2}(s)
    let s = rational(1_000_001, 1_000_000);
    let l2 = (1.000001f64).ln().powi(2);
    let gen = logistic_potential_series(&s, 14).unwrap();
    let c = s1_coefficients(12);
    for n in 1..=12 {
        let lim = l2 * gen.coefficient_f64(n + 2);
        let exact = schroeder::Scalar::to_f64(&c[n]);
        assert!((lim / exact - 1.0).abs() < 1e-4, "n = {n}: {lim} vs {exact}");
    }
}

#[test]
fn s1_generic_unit_solver_agrees() {
    use schroeder::fnser::{solve_potential_unit, MapModel};
    let v = solve_potential_unit(&MapModel::logistic(rational(1, 1)), &rational(0, 1), 30).unwrap();
    let c = s1_coefficients(26);
    for n in 0..=26 {
        assert_eq!(-v.coeffs()[n + 4].clone(), c[n]);
    }
}

#[test]
fn optimal_truncation_stops_at_smallest_term() {
    let c = s1_coefficients(200);
    let (v, used) = s1_potential_value(0.3, &c);
    assert!(used > 5 && used < 200);
    assert!(v < 0.0);
    // small x converges like a polynomial
    let (v, _) = s1_potential_value(0.01, &c);
    assert!((v + 1e-8 * (1.0 + 0.02 + 4e-4)).abs() < 1e-13);
}

fn ei(z: f64) -> f64 {
    // γ + ln z + Σ zᵏ/(k·k!), all terms positive for z > 0
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..400 {
        term *= z / k as f64;
        sum += term / k as f64;
        if term / (k as f64) < 1e-18 * sum {
            break;
        }
    }
    0.577_215_664_901_532_9 + z.ln() + sum
}

#[test]
fn principal_value_matches_exponential_integral() {
    use schroeder::logistic::{pv_integral, pv_integral_report};
    assert_eq!(pv_integral(0.0).unwrap(), 1.0);
    for &x in &[0.2, 0.5, 1.0, 2.0, 5.0] {
        let a = x / (2.0 * 3f64.exp()).sqrt();
        let y0 = 1.0 / a;
        let want = (-y0).exp() * ei(y0) / a;
        let got = pv_integral(x).unwrap();
        assert!((got - want).abs() < 1e-8, "x={x}: {got} vs {want}");
    }
    let r = pv_integral_report(1.0).unwrap();
    let n = r.estimates.len();
    assert!((r.estimates[n - 1] - r.estimates[n - 2]).abs() < 1e-8);
    let small = pv_integral(0.01).unwrap();
    assert!((small - 1.0016).abs() < 1e-3);
}
