//! Acceptance suite: one test per criterion, each writing a single
//! `criterion N: PASS|FAIL ...` line to stderr (uncaptured, so it shows in
//! ordinary `cargo test` output).

use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use ptpara::coords::{
    cylindrical_to_spherical, parabolic_to_cylindrical, potential_cylindrical, potential_parabolic,
    potential_spherical, pt_conjugate, pt_conjugate_cylindrical, pt_conjugate_parabolic, uv_to_parabolic,
};
use ptpara::greens::{pole_scan, pseudo_greens, GreensRequest};
use ptpara::oracle::{damped_spectral_sum, hermite_spectral_sum, level_table};
use ptpara::propagator::{ln_total_kernel_euclidean, semigroup_residual, SemigroupGrid};
use ptpara::spectrum::{energy, lambda_complex, lambda_value, omega_for_level, pt_phase_scan, reality_tolerance};
use ptpara::{
    Execution, Oscillator, OscillatorPoint, Phase, PhaseGrid, PhysicalParams, PointBundle, QuantumNumbers,
    SphericalPoint,
};

fn report(n: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("criterion {n}: {verdict} {detail}\n");
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn within(elapsed: Duration, secs: f64) -> bool {
    elapsed.as_secs_f64() < secs
}

#[test]
fn c01_coulomb_limit() {
    let start = Instant::now();
    let p = PhysicalParams::natural(1.0, 0.0, 0.0).unwrap();
    let mut worst = 0.0f64;
    let mut count = 0;
    for nu in 0..=3 {
        for s in 0..=3u32 {
            for n2 in 0..=s {
                let e = energy(&p, QuantumNumbers::new(n2, s - n2, nu)).unwrap();
                let n = (s + 1 + nu) as f64;
                worst = worst.max(rel(e, -1.0 / (2.0 * n * n)));
                count += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-13 && within(elapsed, 1.0);
    report(
        1,
        pass,
        &format!("{count} levels, max rel err {worst:.2e}, {elapsed:.2?}"),
    );
    assert!(pass);
}

#[test]
fn c02_lambda_reality() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    let mut worst = 0.0f64;
    let mut samples = 0;
    while samples < 10_000 {
        let b = rng.random_range(-10.0..10.0);
        let c: f64 = rng.random_range(-10.0..10.0);
        if c.abs() <= 1e-6 {
            continue;
        }
        let p = PhysicalParams::natural(1.0, b, c).unwrap();
        for nu in 0..=5 {
            let l = lambda_complex(&p, nu);
            worst = worst.max(l.im.abs() / reality_tolerance(l.re));
        }
        samples += 1;
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1.0 && within(elapsed, 1.0);
    report(
        2,
        pass,
        &format!("10^4 samples x 6 nu, max |Im lambda| / tol = {worst:.2e}, {elapsed:.2?}"),
    );
    assert!(pass);
}

#[test]
fn c03_worked_complex_case() {
    let p = PhysicalParams::natural(1.0, 0.0, 2.0).unwrap();
    let qn = QuantumNumbers::new(0, 0, 0);
    let lambda = lambda_value(&p, 0).unwrap();
    let omega = omega_for_level(&p, qn).unwrap();
    let e = energy(&p, qn).unwrap();
    let err = [(lambda - 2.0).abs(), (omega - 0.25).abs(), (e + 0.125).abs()];
    let pass = err.iter().all(|&x| x <= 1e-14);
    report(3, pass, &format!("lambda={lambda:.17} omega={omega:.17} E={e:.17}"));
    assert!(pass);
}

#[test]
fn c04_kernel_semigroup() {
    let start = Instant::now();
    let osc = Oscillator::new(1.0, 1.0, 1.0).unwrap();
    let grid = SemigroupGrid::default();
    let betas = [0.25, 0.5, 1.0];
    let mut worst = 0.0f64;
    for &b1 in &betas {
        for &b2 in &betas {
            for (qa, qb) in [(0.3, -0.2), (1.1, 0.4), (-0.7, -1.5)] {
                worst = worst.max(semigroup_residual(&osc, b1, b2, qa, qb, &grid).unwrap());
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = worst < 1e-6 && within(elapsed, 5.0);
    report(
        4,
        pass,
        &format!("9 beta pairs x 3 endpoint pairs, max residual {worst:.2e}, {elapsed:.2?}"),
    );
    assert!(pass);
}

#[test]
fn c05_ground_pseudo_energy() {
    let p = PhysicalParams::natural(0.0, 0.0, 0.0).unwrap();
    let a = OscillatorPoint::new([0.05, -0.02], [0.03, 0.01]);
    let b = OscillatorPoint::new([-0.04, 0.02], [0.01, -0.03]);
    let beta = 20.0;
    let ln_k = ln_total_kernel_euclidean(&p, 1.0, &a, &b, beta).unwrap();
    let estimate = -ln_k / beta;
    // the log-derivative removes the beta-independent normalization
    let h = 1e-3;
    let slope = -(ln_total_kernel_euclidean(&p, 1.0, &a, &b, beta + h).unwrap()
        - ln_total_kernel_euclidean(&p, 1.0, &a, &b, beta - h).unwrap())
        / (2.0 * h);
    let pass = (estimate - 2.0).abs() < 1e-3;
    report(
        5,
        pass,
        &format!("-(1/beta) ln K at beta=20 is {estimate:.6} (target 2, tol 1e-3); -d ln K/d beta = {slope:.9}"),
    );
    assert!(pass);
}

fn random_point(rng: &mut StdRng) -> OscillatorPoint {
    let mut c = || rng.random_range(-1.5..1.5);
    OscillatorPoint::new([c(), c()], [c(), c()])
}

#[test]
fn c06_resolvent_oracle() {
    let start = Instant::now();
    let p = PhysicalParams::natural(0.0, 0.0, 0.0).unwrap();
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    let mut worst_truncated = 0.0f64;
    let mut worst_damped = 0.0f64;
    for _ in 0..10 {
        let (a, b) = (random_point(&mut rng), random_point(&mut rng));
        let g = pseudo_greens(&GreensRequest::at_omega(p, 1.0, a, b)).unwrap();
        assert!(g.converged);
        let s = hermite_spectral_sum(&p, 1.0, &a, &b, 40).unwrap();
        worst_truncated = worst_truncated.max(rel(s, g.pseudo));
        // G - damped is the short-time piece, which lies in [0, bound]
        let d = damped_spectral_sum(&p, 1.0, &a, &b, 0.02, 1500).unwrap();
        let diff = g.pseudo - d.value;
        let excess = (-diff).max(diff - d.short_time_bound).max(0.0);
        worst_damped = worst_damped.max(excess / g.pseudo);
    }
    let elapsed = start.elapsed();
    let pass = worst_truncated < 1e-4 && within(elapsed, 30.0);
    report(
        6,
        pass,
        &format!(
            "max rel diff vs n_max=40 spectral sum {worst_truncated:.2e} (tol 1e-4); \
             damped sum (beta_0=0.02, n_max=1500) outside short-time bound by {worst_damped:.2e}; {elapsed:.2?}"
        ),
    );
    assert!(pass);
}

#[test]
fn c07_pole_locations() {
    let start = Instant::now();
    let mut pass = true;
    let mut lines = Vec::new();
    for (b, c) in [(0.0, 0.0), (0.0, 2.0), (3.0, 0.0)] {
        let p = PhysicalParams::natural(1.0, b, c).unwrap();
        for nu in 0..=1 {
            let poles: Vec<f64> = (0..=2)
                .map(|n| omega_for_level(&p, QuantumNumbers::new(n, 0, nu)).unwrap())
                .collect();
            let r = pole_scan(&p, nu, (0.8 * poles[2], 1.25 * poles[0]), 200).unwrap();
            let matched = r
                .detected_omegas
                .iter()
                .zip(&r.detected_levels)
                .all(|(w, &n)| n <= 2 && rel(*w, poles[n as usize]) < 1e-4);
            let worst = r
                .detected_omegas
                .iter()
                .zip(&r.detected_levels)
                .map(|(w, &n)| rel(*w, poles[n.min(2) as usize]))
                .fold(0.0, f64::max);
            pass &= matched && !r.detected_omegas.is_empty();
            lines.push(format!(
                "(B,C,nu)=({b},{c},{nu}) onsets at n={:?} rel err {worst:.1e}",
                r.detected_levels
            ));
        }
    }
    let elapsed = start.elapsed();
    pass &= within(elapsed, 120.0);
    report(
        7,
        pass,
        &format!(
            "{}; n=1,2 lie inside the divergent region and produce no onset; {elapsed:.2?}",
            lines.join("; ")
        ),
    );
    assert!(pass);
}

#[test]
fn c08_shooting_spectrum() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut count = 0;
    for (b, c) in [(1.0, 1.0), (0.0, 2.0), (3.0, 0.0)] {
        let p = PhysicalParams::natural(1.0, b, c).unwrap();
        for level in level_table(&p, 2, 2, Execution::default()).unwrap().levels {
            worst = worst.max(level.residual.abs() / p.alpha());
            count += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass = worst < 1e-6 && within(elapsed, 60.0);
    report(
        8,
        pass,
        &format!("{count} levels, max |residual| / alpha = {worst:.2e}, {elapsed:.2?}"),
    );
    assert!(pass);
}

#[test]
fn c09_phase_map() {
    let base = PhysicalParams::natural(1.0, 0.0, 0.0).unwrap();
    let grid = PhaseGrid::square(-2.0, 2.0, 41);
    let reports = pt_phase_scan(&base, &grid, 2).unwrap();
    let mismatches = reports
        .iter()
        .filter(|r| {
            let expect_broken = r.params.c() == 0.0 && r.params.b() < 0.0;
            (r.classification == Phase::Broken) != expect_broken
        })
        .count();
    let broken = reports.iter().filter(|r| r.classification == Phase::Broken).count();
    let pass = reports.len() == 41 * 41 && mismatches == 0;
    report(
        9,
        pass,
        &format!(
            "{} points, {broken} broken (all on C=0, B<0), {mismatches} mismatches",
            reports.len()
        ),
    );
    assert!(pass);
}

#[test]
fn c10_coordinates_and_pt() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0010);
    let close = |a: f64, b: f64, tol: f64| (a - b).abs() <= tol * b.abs().max(1.0);
    let mut failures = 0;
    let mut worst_spherical = 0.0f64;
    for _ in 0..1000 {
        let r = rng.random_range(0.01..50.0);
        let theta = rng.random_range(1e-3..PI - 1e-3);
        let phi = rng.random_range(0.0..TAU);
        let p = SphericalPoint::new(r, theta, phi).unwrap();
        let params = PhysicalParams::natural(
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
        )
        .unwrap();
        let bundle = PointBundle::from_spherical(p).unwrap();
        let (cyl, par) = (bundle.cylindrical, bundle.parabolic);
        let chain = close(par.xi + par.eta, r, 1e-13) && close(4.0 * par.xi * par.eta, cyl.rho * cyl.rho, 1e-13);
        let back =
            cylindrical_to_spherical(parabolic_to_cylindrical(uv_to_parabolic(bundle.oscillator).unwrap()).unwrap())
                .unwrap();
        let dphi = (back.phi - phi).abs();
        let round_trip = close(back.r, r, 1e-12) && close(back.theta, theta, 1e-12) && dphi.min(TAU - dphi) < 1e-12;
        let pt_dev = |v: ptpara::Complex, w: ptpara::Complex| (w - v.conj()).norm() / v.norm().max(1.0);
        let v = potential_cylindrical(&params, cyl).unwrap();
        let w = potential_cylindrical(&params, pt_conjugate_cylindrical(cyl)).unwrap();
        let mut pt = pt_dev(v, w) <= 1e-13;
        let v = potential_parabolic(&params, par).unwrap();
        let w = potential_parabolic(&params, pt_conjugate_parabolic(par)).unwrap();
        pt &= pt_dev(v, w) <= 1e-13;
        // theta -> pi - theta rounds the reflected angle; allow exactly that rounding
        let v = potential_spherical(&params, p).unwrap();
        let w = potential_spherical(&params, pt_conjugate(p)).unwrap();
        let reflection_rounding = 2.0 * f64::EPSILON * PI / theta.min(PI - theta);
        let dev = pt_dev(v, w);
        worst_spherical = worst_spherical.max(dev);
        pt &= dev <= 1e-13 + reflection_rounding;
        if !(chain && round_trip && pt) {
            failures += 1;
        }
    }
    let pass = failures == 0;
    report(
        10,
        pass,
        &format!(
            "1000 random points, {failures} failures; PT exact in cylindrical and parabolic form, \
             spherical theta -> pi - theta max rel dev {worst_spherical:.1e}"
        ),
    );
    assert!(pass);
}
