//! Independent oracles shared by the integration suites and the acceptance harness.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use reachtube::integrator::{step_gradient, validated_step, GradientEnclosure, Order};
use reachtube::metric::{ellipsoid_volume, lambda_max_bound, optimal_frame, spectral_norm_bound, stretching_factor, CoordFrame};
use reachtube::model::Benchmark;
use reachtube::{parse_model, Interval, IntervalBox, IntervalMatrix, OdeSystem};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite endpoint")
}

/// Random float with a wide spread of magnitudes, sometimes exactly zero.
pub fn wide_float<R: Rng>(rng: &mut R) -> f64 {
    match rng.random_range(0..20) {
        0 => 0.0,
        1 => rng.random_range(-4..=4) as f64,
        _ => {
            let m: f64 = rng.random_range(-1.0..1.0);
            m * 2f64.powi(rng.random_range(-40..=40))
        }
    }
}

pub fn wide_interval<R: Rng>(rng: &mut R) -> Interval {
    let a = wide_float(rng);
    if rng.random_range(0..8) == 0 {
        return Interval::point(a);
    }
    let b = wide_float(rng);
    Interval::new(a.min(b), a.max(b))
}

fn encloses(r: Interval, lo: &BigRational, hi: &BigRational) -> bool {
    r.is_finite() && q(r.lo()) <= *lo && *hi <= q(r.hi())
}

fn min_max(v: [BigRational; 4]) -> (BigRational, BigRational) {
    let mut lo = v[0].clone();
    let mut hi = v[0].clone();
    for x in &v[1..] {
        if *x < lo {
            lo = x.clone();
        }
        if *x > hi {
            hi = x.clone();
        }
    }
    (lo, hi)
}

/// Runs `ops` random interval operations and counts results that fail to
/// contain the exact rational range.
pub fn rational_oracle_violations(ops: usize, seed: u64) -> usize {
    let mut rng = rng(seed);
    let mut bad = 0;
    let mut done = 0;
    while done < ops {
        let a = wide_interval(&mut rng);
        let b = wide_interval(&mut rng);
        let (al, ah, bl, bh) = (q(a.lo()), q(a.hi()), q(b.lo()), q(b.hi()));
        let ok = match rng.random_range(0..6) {
            0 => encloses(a + b, &(&al + &bl), &(&ah + &bh)),
            1 => encloses(a - b, &(&al - &bh), &(&ah - &bl)),
            2 => {
                let (lo, hi) = min_max([&al * &bl, &al * &bh, &ah * &bl, &ah * &bh]);
                encloses(a * b, &lo, &hi)
            }
            3 => {
                if b.contains_zero() {
                    continue;
                }
                let (lo, hi) = min_max([&al / &bl, &al / &bh, &ah / &bl, &ah / &bh]);
                match a.checked_div(b) {
                    Ok(r) => encloses(r, &lo, &hi),
                    Err(_) => false,
                }
            }
            4 => {
                let (sl, sh) = (&al * &al, &ah * &ah);
                let hi = if sl > sh { sl.clone() } else { sh.clone() };
                let lo = if a.contains_zero() {
                    BigRational::zero()
                } else if sl < sh {
                    sl
                } else {
                    sh
                };
                encloses(a.sqr(), &lo, &hi)
            }
            _ => {
                let a = a.abs();
                match a.sqrt() {
                    Ok(r) => {
                        let (lo, hi) = (q(r.lo()), q(r.hi()));
                        !lo.is_negative() && &lo * &lo <= q(a.lo()) && &hi * &hi >= q(a.hi())
                    }
                    Err(_) => false,
                }
            }
        };
        if !ok {
            bad += 1;
        }
        done += 1;
    }
    bad
}

/// Richardson-extrapolated central difference of the right-hand side.
pub fn fd_jacobian(sys: &OdeSystem, x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let mut j = DMatrix::zeros(n, n);
    for k in 0..n {
        let central = |h: f64| {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[k] += h;
            m[k] -= h;
            let (fp, fm) = (sys.eval_rhs(&p), sys.eval_rhs(&m));
            let d = (p[k] - m[k]).max(f64::MIN_POSITIVE);
            fp.iter().zip(&fm).map(|(a, b)| (a - b) / d).collect::<Vec<_>>()
        };
        let h = 1e-3 * x[k].abs().max(1.0);
        let (d1, d2) = (central(h), central(h / 2.0));
        for i in 0..n {
            j[(i, k)] = (4.0 * d2[i] - d1[i]) / 3.0;
        }
    }
    j
}

/// Largest `|J − J_fd| / max(|J|, 1)` at the initial center and at random
/// points within ten initial radii of it.
pub fn jacobian_fd_error(b: &Benchmark, points: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let c = b.initial.center();
    let r = b.initial.radii();
    let mut worst = 0.0f64;
    for k in 0..points {
        let x: Vec<f64> = if k == 0 {
            c.to_vec()
        } else {
            c.iter().zip(r).map(|(c, r)| c + 10.0 * r * rng.random_range(-1.0..1.0)).collect()
        };
        let sym = b.system.eval_jacobian(&x);
        let fd = fd_jacobian(&b.system, &x);
        for (s, f) in sym.iter().zip(fd.iter()) {
            worst = worst.max((s - f).abs() / s.abs().max(1.0));
        }
    }
    worst
}

fn random_interval_matrix<R: Rng>(rng: &mut R, n: usize, symmetric: bool) -> IntervalMatrix {
    let mut m = IntervalMatrix::zeros(n, n);
    let scale = 10f64.powi(rng.random_range(-3..=3));
    for i in 0..n {
        for j in 0..n {
            if symmetric && j < i {
                m.set(i, j, m.get(j, i));
                continue;
            }
            let c = scale * rng.random_range(-1.0..1.0);
            let r = scale * rng.random_range(0.0..0.2) * if rng.random_bool(0.2) { 0.0 } else { 1.0 };
            m.set(i, j, Interval::centered(c, r));
        }
    }
    m
}

fn sample_member<R: Rng>(rng: &mut R, m: &IntervalMatrix, symmetric: bool) -> DMatrix<f64> {
    let n = m.nrows();
    let mut s = DMatrix::zeros(n, m.ncols());
    for i in 0..n {
        for j in 0..m.ncols() {
            if symmetric && j < i {
                s[(i, j)] = s[(j, i)];
                continue;
            }
            let v = m.get(i, j);
            s[(i, j)] = match rng.random_range(0..4) {
                0 => v.lo(),
                1 => v.hi(),
                _ => rng.random_range(v.lo()..=v.hi()),
            };
        }
    }
    s
}

/// Counts matrices where a sampled member's `λ_max` (symmetric case) or
/// `σ_max` (general case) exceeds the rigorous bound.
pub fn eigen_bound_violations(count: usize, seed: u64) -> usize {
    let mut rng = rng(seed);
    let mut bad = 0;
    for k in 0..count {
        let n = rng.random_range(1..=6);
        let symmetric = k % 2 == 0;
        let m = random_interval_matrix(&mut rng, n, symmetric);
        let bound = if symmetric {
            lambda_max_bound(&m)
        } else {
            spectral_norm_bound(&m)
        }
        .expect("finite matrix");
        for _ in 0..4 {
            let s = sample_member(&mut rng, &m, symmetric);
            let exact = if symmetric {
                s.clone().symmetric_eigen().eigenvalues.max()
            } else {
                s.clone().singular_values().max()
            };
            if exact > bound + 1e-12 * bound.abs() {
                bad += 1;
                break;
            }
        }
    }
    bad
}

/// Result of the volume-optimality experiment.
pub struct Optimality {
    /// Largest `vol(optimal) / vol(competitor)`; at most 1 when optimal.
    pub worst_ratio: f64,
    /// Range of `Λ` at the optimal frame on the point gradient.
    pub lambda_range: (f64, f64),
}

fn random_nonsingular<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    loop {
        let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
        let sv = m.clone().singular_values();
        if sv.min() > 0.05 * sv.max() {
            return m;
        }
    }
}

/// Ellipsoid volume of the reachset bound `Λ₀(A)·δ₀` for frame `A`.
fn bound_volume(frame: &CoordFrame, f: &DMatrix<f64>, a0: &CoordFrame) -> f64 {
    let lambda = stretching_factor(frame, &IntervalMatrix::from_real(f), a0.a_inv()).expect("finite");
    ellipsoid_volume(frame, lambda, None).expect("nonsingular frame")
}

pub fn optimality_experiment(gradients: usize, competitors: usize, seed: u64) -> Optimality {
    let mut rng = rng(seed);
    let mut worst_ratio = 0.0f64;
    let mut lambda_range = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..gradients {
        let n = 2 + k % 5;
        let radii: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.random_range(-3.0..0.0))).collect();
        let a0 = CoordFrame::from_radii(&radii).unwrap();
        let f = random_nonsingular(&mut rng, n);
        let best = optimal_frame(&a0, &f).unwrap();
        let lambda = stretching_factor(&best, &IntervalMatrix::from_real(&f), a0.a_inv()).unwrap();
        lambda_range = (lambda_range.0.min(lambda), lambda_range.1.max(lambda));
        let v_best = bound_volume(&best, &f, &a0);
        for _ in 0..competitors {
            let other = CoordFrame::new(random_nonsingular(&mut rng, n) * best.a(), None).unwrap();
            worst_ratio = worst_ratio.max(v_best / bound_volume(&other, &f, &a0));
        }
    }
    Optimality { worst_ratio, lambda_range }
}

/// Linear-system checks against closed forms; returns the first failure.
pub fn linear_analytic_checks() -> Result<(), String> {
    let decay = parse_model("x1' = -x1").unwrap();
    for order in Order::all() {
        let mut x = IntervalBox::from_point(&[1.0]);
        for i in 1..=200 {
            x = validated_step(&decay, &x, 0.01, order).map_err(|e| e.to_string())?.y_next;
            let exact = (-(i as f64) * 0.01).exp();
            if !x[0].contains(exact) {
                return Err(format!("x' = -x, order {order}: {:?} misses e^-t = {exact} at step {i}", x[0]));
            }
        }
    }
    let diag = parse_model("x1' = -x1; x2' = 0.5*x2; x3' = 2*x3").unwrap();
    let rates = [-1.0, 0.5, 2.0];
    let start = IntervalBox::centered(&[1.0, 1.0, 1.0], &[0.01, 0.01, 0.01]);
    for order in Order::all() {
        let mut g = GradientEnclosure::identity(3);
        for i in 1..=100 {
            g = step_gradient(&diag, &start, &g, 0.01, order).map_err(|e| e.to_string())?;
            let t = i as f64 * 0.01;
            for (r, rate) in rates.iter().enumerate() {
                for c in 0..3 {
                    let exact = if r == c { (rate * t).exp() } else { 0.0 };
                    if !g.total.get(r, c).contains(exact) {
                        return Err(format!("diagonal gradient, order {order}: entry ({r},{c}) misses {exact} at t = {t}"));
                    }
                }
            }
        }
    }
    Ok(())
}
