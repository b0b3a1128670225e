use std::sync::Arc;

use schroeder::logistic::*;
use schroeder::scalar::rational;

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

#[test]
fn s4_series_branches_match_closed_forms() {
    let pp = Arc::new(PrimaryPotential::new(&rational(4, 1)).unwrap());
    let u0: EvalRule = {
        let pp = pp.clone();
        Arc::new(move |x| pp.u(x))
    };
    let u1 = switchback_continue(u0.clone(), 4.0, BranchSign::Plus);
    let (b0, b1) = (s4_branch(0), s4_branch(1));
    for x in grid(0.05, 0.95, 90) {
        assert!((u0(x).unwrap() - b0.u(x).unwrap()).abs() < 1e-9, "U0 at {x}");
        assert!((u1(x).unwrap() - b1.u(x).unwrap()).abs() < 1e-9, "U+ at {x}");
    }
}

#[test]
fn s4_series_ladder_momenta_match_closed_forms() {
    let ladder = logistic_ladder(&rational(4, 1), 8).unwrap();
    assert!(ladder.halted.is_none());
    for (p, b) in ladder.branches.iter().enumerate() {
        let closed = s4_branch(p);
        assert_eq!(b.direction, closed.direction);
        for x in grid(0.0, 1.0, 200) {
            let got = b.momentum(x).unwrap();
            let want = closed.momentum(x).unwrap();
            assert!((got - want).abs() < 1e-8, "P={p} x={x}: {got} vs {want}");
        }
    }
}

#[test]
fn s4_examples_and_transits() {
    let l = 4f64.ln();
    let v0 = s4_branch(0).potential(0.5).unwrap();
    assert!((v0 - l * l * -0.25 * (std::f64::consts::PI / 4.0).powi(2)).abs() < 1e-14);
    // the reference values were rounded with (ln4)² ≈ 1.92
    assert!((v0 / -0.296089 - 1.0).abs() < 1e-3);
    let v1 = s4_branch(1).potential(0.5).unwrap();
    assert!((v1 / -2.66480 - 1.0).abs() < 1e-3);
    assert!(v1 < v0);
    assert_eq!(s4_branch(2).potential(0.0).unwrap(), 0.0);

    let t1 = s4_branch(1).transit_time(1.0, 0.0).unwrap();
    assert!((t1 - 1.0).abs() < 1e-9, "{t1}");
    for &x in &[0.2, 0.5, 0.8] {
        let t0 = s4_branch(0).transit_time(x, 1.0).unwrap();
        assert!((t0 - s4_transit_time(x).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn energy_identity_and_cross_branch_misuse() {
    let bs: Vec<_> = (0..5).map(s4_branch).collect();
    for x in grid(0.01, 0.99, 98) {
        for b in &bs {
            assert!(b.energy(x).unwrap().abs() < 1e-12);
        }
        for p in 0..5 {
            for q in 0..5 {
                if p != q {
                    let v = bs[p].velocity(x).unwrap();
                    let e = v * v + bs[q].potential(x).unwrap();
                    assert!(e.abs() > 1e-6, "P={p} Q={q} x={x}");
                }
            }
        }
    }
}

#[test]
fn s4_ladder_glues_at_zero_height() {
    let ladder = s4_ladder(6);
    for w in ladder.branches.windows(2) {
        assert_eq!(w[0].end, w[1].start);
        assert_eq!(w[0].velocity(w[0].end).unwrap(), 0.0);
        assert_eq!(w[1].velocity(w[1].start).unwrap(), 0.0);
    }
    for p in 0..6 {
        assert!((ladder.offsets[p] - p as f64).abs() < 1e-15);
    }
}

#[test]
fn s_five_halves_primary_zeros_and_shrinking_ladder() {
    let s = rational(5, 2);
    let pp = Arc::new(PrimaryPotential::new(&s).unwrap());
    let u: EvalRule = {
        let pp = pp.clone();
        Arc::new(move |x| pp.u(x))
    };
    let um = switchback_continue(u, 2.5, BranchSign::Minus);
    assert_eq!(um(0.0).unwrap(), 0.0);
    assert!(um(0.625).unwrap().abs() < 1e-12);
    assert!(um(0.3).unwrap() > 0.0);

    let ladder = logistic_ladder(&s, 8).unwrap();
    assert!(ladder.halted.is_none());
    let b1 = &ladder.branches[1];
    assert!((b1.lo - 2.5 * 2.5 * 1.5 / 16.0).abs() < 1e-15);
    assert!((b1.hi - 0.625).abs() < 1e-15);

    let ends: Vec<f64> = ladder.branches.iter().map(|b| b.end).collect();
    let gaps: Vec<f64> = ends.iter().map(|e| (e - 0.6).abs()).collect();
    for w in gaps.windows(2) {
        assert!(w[1] < w[0], "{gaps:?}");
    }
    // alternating sides of the fixed point
    for w in ends[1..].windows(2) {
        assert!((w[0] - 0.6) * (w[1] - 0.6) < 0.0);
    }
    let mut last_width = f64::INFINITY;
    let mut last_depth = f64::NEG_INFINITY;
    for b in &ladder.branches[1..] {
        let width = b.hi - b.lo;
        assert!(width < last_width);
        last_width = width;
        let depth = branch_depth(b, 200).unwrap();
        assert!(depth < 0.0 && depth > last_depth, "depth {depth} after {last_depth}");
        last_depth = depth;
        assert!(b.u(b.lo).unwrap().abs() < 1e-9 && b.u(b.hi).unwrap().abs() < 1e-9);
        assert!(b.energy(0.5 * (b.lo + b.hi)).unwrap().abs() < 1e-12);
    }
}

#[test]
fn turning_points_are_zeros_of_the_raw_rules() {
    for s in [rational(5, 2), rational(3, 1), rational(14, 5)] {
        let ladder = logistic_ladder(&s, 6).unwrap();
        for b in &ladder.branches[1..] {
            // evaluate just inside: the checked accessor snaps endpoints
            let eps = 1e-13 * (b.hi - b.lo);
            assert!(b.u(b.lo + eps).unwrap().abs() < 1e-9);
            assert!(b.u(b.hi - eps).unwrap().abs() < 1e-9);
        }
    }
}

#[test]
fn s3_fixed_point_checkpoints() {
    let s = rational(3, 1);
    assert_eq!(exact_plus_preimage(&s, &rational(2, 3)).unwrap(), rational(2, 3));
    assert_eq!(exact_julia_plus_factor(&s, &rational(2, 3)).unwrap(), rational(-1, 1));

    let ladder = logistic_ladder(&s, 15).unwrap();
    assert!(ladder.halted.is_none());
    let p0 = ladder.branches[0].momentum(2.0 / 3.0).unwrap();
    for (n, b) in ladder.branches.iter().enumerate() {
        let p = b.momentum(2.0 / 3.0).unwrap();
        let want = if n % 2 == 0 { p0 } else { -p0 };
        assert!((p - want).abs() < 1e-12, "branch {n}");
        assert!((0.5 * p.abs() - 0.291464).abs() < 1e-4);
        if n >= 1 {
            assert!((b.potential(2.0 / 3.0).unwrap() + 0.0849511).abs() < 1e-5);
        }
    }
    let phase = momentum_branches(&s, 15, &grid(0.0, 0.75, 2000)).unwrap();
    assert_eq!(phase.branches.len(), 15);
    for line in &phase.branches {
        assert_eq!(line.first().unwrap().1, 0.0);
        assert_eq!(line.last().unwrap().1, 0.0);
    }
}

#[test]
fn chaotic_band_branches_glue_and_stay_real() {
    let s = rational(7, 2);
    let ladder = logistic_ladder(&s, 12).unwrap();
    assert!(ladder.halted.is_none());
    assert_eq!(ladder.branches.len(), 12);
    // branch 1 reaches below ½, so its image splits into a plus and a minus piece
    assert_eq!(ladder.branches[2].sign_path(), "-++");
    assert_eq!(ladder.branches[3].sign_path(), "-+-");
    for w in ladder.branches.windows(2) {
        assert_eq!(w[0].end, w[1].start);
    }
    for b in &ladder.branches {
        for i in 1..20 {
            let x = b.lo + (b.hi - b.lo) * i as f64 / 20.0;
            assert!(b.u(x).unwrap() >= 0.0);
            assert!(b.energy(x).unwrap().abs() < 1e-12);
        }
    }
    assert!(momentum_branches(&s, 12, &grid(0.0, 0.875, 100)).is_ok());
    assert!(momentum_branches(&rational(2, 1), 2, &[]).is_err());
}

#[test]
fn covering_coordinates_invert() {
    let ladder = logistic_ladder(&rational(3, 1), 5).unwrap();
    for (p, b) in ladder.branches.iter().enumerate() {
        let x = 0.3 * b.lo + 0.7 * b.hi;
        let xc = ladder.covering_coordinate(p, x);
        let (q, y) = ladder.locate(xc).unwrap();
        assert!(q == p || (y - x).abs() < 1e-12);
        assert!((y - x).abs() < 1e-12);
    }
}
