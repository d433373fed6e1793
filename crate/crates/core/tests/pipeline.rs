mod common;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use reachtube::integrator::reference::reference_integrate;
use reachtube::metric::CoordFrame;
use reachtube::model::{find_benchmark, InitialSet, RADIUS_FLOOR};
use reachtube::parse_model;
use reachtube::par::Parallelism;
use reachtube::reachtube::{box_hull_ellipsoid, box_hull_intersection, run, validate, Pipeline, RunConfig};

#[test]
fn gradient_encloses_flow_sensitivity() {
    let b = find_benchmark("B").unwrap();
    let cfg = b.run_config(1);
    let mut p = Pipeline::initialize(&b.system, &cfg).unwrap();
    for i in 1..=50 {
        p.step(cfg.time_of(i)).unwrap();
    }
    let t = cfg.time_of(50);
    let c = b.initial.center();
    let h = 1e-5;
    let mut fd = DMatrix::zeros(2, 2);
    for k in 0..2 {
        let mut plus = c.to_vec();
        let mut minus = c.to_vec();
        plus[k] += h;
        minus[k] -= h;
        let fp = reference_integrate(&b.system, &plus, t, 1e-4).unwrap();
        let fm = reference_integrate(&b.system, &minus, t, 1e-4).unwrap();
        for i in 0..2 {
            fd[(i, k)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    let total = &p.gradient().total;
    for i in 0..2 {
        for k in 0..2 {
            let iv = total.get(i, k);
            assert!(iv.lo() - 1e-7 <= fd[(i, k)] && fd[(i, k)] <= iv.hi() + 1e-7, "({i},{k}): {} not in {iv:?}", fd[(i, k)]);
        }
    }
}

#[test]
fn enclosure_lies_in_both_hulls_and_beats_ellipsoid_only() {
    let b = find_benchmark("V").unwrap();
    let cfg = b.run_config(1).with_horizon(5.0);
    let on = run(&b.system, &cfg);
    let off = run(&b.system, &cfg.clone().with_intersection(false));
    assert!(on.completed && off.completed);
    let a0 = CoordFrame::from_radii(b.initial.radii()).unwrap();
    for (s, o) in on.steps.iter().zip(&off.steps) {
        let ell = box_hull_ellipsoid(&s.frame, &s.center, s.delta);
        let ball = box_hull_ellipsoid(&a0, &s.center, s.delta_m0);
        assert!(s.enclosure.is_subset_of(&ell) && s.enclosure.is_subset_of(&ball), "t = {}", s.t);
        assert!(s.vol_box <= ell.volume(None) && s.vol_box <= ball.volume(None));
        assert!(s.enclosure.is_subset_of(&o.enclosure), "t = {}", s.t);
    }
}

#[test]
fn intersection_box_contains_sampled_points() {
    let mut rng = common::rng(31);
    for _ in 0..200 {
        let n = rng.random_range(2..=4);
        let a = DMatrix::from_fn(n, n, |i, j| if i == j { 3.0 } else { 0.0 } + rng.random_range(-2.0..2.0));
        let Ok(frame) = CoordFrame::new(a, None) else { continue };
        let radii: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
        let a0 = CoordFrame::from_radii(&radii).unwrap();
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (delta, delta0) = (rng.random_range(0.1..2.0), rng.random_range(0.1..2.0));
        let bx = box_hull_intersection(&frame, delta, &a0, delta0, &c).unwrap();
        let mut hits = 0;
        while hits < 200 {
            let d = DVector::from_fn(n, |_, _| rng.random_range(-3.0..3.0));
            let x: Vec<f64> = c.iter().zip(d.iter()).map(|(c, d)| c + d).collect();
            if (frame.a() * &d).norm() <= delta && (a0.a() * &d).norm() <= delta0 {
                hits += 1;
                assert!(bx.contains(&x), "{x:?} outside {bx:?}");
            } else if hits == 0 && rng.random_bool(0.001) {
                break;
            }
        }
    }
}

#[test]
fn ellipsoid_hull_touches_boundary() {
    let mut rng = common::rng(37);
    for _ in 0..100 {
        let n = rng.random_range(2..=5);
        let a = DMatrix::from_fn(n, n, |i, j| if i == j { 2.0 } else { 0.0 } + rng.random_range(-1.0..1.0));
        let Ok(frame) = CoordFrame::new(a.clone(), None) else { continue };
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let delta = rng.random_range(0.01..3.0);
        let bx = box_hull_ellipsoid(&frame, &c, delta);
        let inv = a.clone().try_inverse().unwrap();
        for _ in 0..200 {
            let u = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0)).normalize();
            let x: Vec<f64> = c.iter().zip((&inv * u * delta).iter()).map(|(c, d)| c + d).collect();
            assert!(bx.contains(&x));
        }
        for j in 0..n {
            let row = inv.row(j).transpose();
            let d = &inv * (&row / row.norm()) * delta;
            assert!(((c[j] + d.dot(&DVector::from_fn(n, |i, _| if i == j { 1.0 } else { 0.0 }))) - bx[j].hi()).abs() <= 1e-9 * bx[j].hi().abs().max(1.0));
        }
    }
}

#[test]
fn runs_are_deterministic_across_parallelism() {
    let b = find_benchmark("B").unwrap();
    let cfg = b.run_config(4).with_horizon(2.0);
    let first = run(&b.system, &cfg);
    let second = run(&b.system, &cfg);
    assert_eq!(first, second);
    let mut rng = common::rng(41);
    let pts = validate::sample_initial_set(&b.initial, 64, 16, &mut rng);
    let seq = validate::check_containment(&b.system, &first, &pts, b.dt / 20.0, Parallelism::Sequential);
    let par = validate::check_containment(&b.system, &first, &pts, b.dt / 20.0, Parallelism::Parallel);
    assert_eq!(seq, par);
    assert!(seq.is_sound());
}

#[test]
fn zero_field_is_a_fixed_point() {
    let sys = parse_model("x1' = 0; x2' = 0; x3' = 0").unwrap();
    let init = InitialSet::new(vec![0.5, -2.0, 7.0], &[0.1, 0.02, 1.5]).unwrap();
    let cfg = RunConfig::new(init, 0.01, 10.0);
    let s = run(&sys, &cfg);
    assert!(s.completed);
    assert_eq!(s.steps.len(), 1001);
    let x0 = &s.steps[0].enclosure;
    for (i, st) in s.steps.iter().enumerate() {
        assert!(st.delta <= 1.0 + 1e-9, "step {i}: delta {}", st.delta);
        for (a, b) in st.enclosure.iter().zip(x0.iter()) {
            let ulp = f64::EPSILON * b.mag();
            assert!((a.lo() - b.lo()).abs() <= i as f64 * ulp && (a.hi() - b.hi()).abs() <= i as f64 * ulp, "step {i}");
        }
    }
    assert!((s.average_volume - x0.volume(None)).abs() <= 1e-6 * x0.volume(None));
}

#[test]
fn quadcopter_reports_floored_radii() {
    let b = find_benchmark("Q").unwrap();
    let floored: Vec<usize> = (6..10).chain(13..17).collect();
    assert_eq!(b.initial.floored(), floored.as_slice());
    assert!(b.initial.radii().iter().all(|&r| r >= RADIUS_FLOOR));
    let s = run(&b.system, &b.run_config(1).with_horizon(2e-3));
    assert!(s.completed);
    assert_eq!(s.floored, floored);
}

#[test]
#[ignore = "full 17-D run, slow"]
fn quadcopter_full_horizon() {
    let b = find_benchmark("Q").unwrap();
    let s = run(&b.system, &b.run_config(1));
    let pts = validate::sample_initial_set(&b.initial, 100, 20, &mut common::rng(17));
    let rep = validate::check_containment(&b.system, &s, &pts, b.dt / 100.0, Parallelism::Parallel);
    assert!(rep.is_sound(), "{} violations", rep.violations);
    assert!(s.completed, "failed at t = {:?}", s.failure_time);
}
