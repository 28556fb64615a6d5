//! Independent numerical checks of the closed forms.
//!
//! * [`radial_shoot`] solves the radial equation of a 2D oscillator with a
//!   complex angular momentum `l` by shooting and complex Newton iteration,
//!   without ladder operators. [`assemble_level`] adds two such levels and
//!   checks that the closed-form `omega` zeroes the pseudo-energy.
//! * [`hermite_spectral_sum`] expands the pseudo-time Green's function over
//!   product Hermite states, and [`damped_spectral_sum`] does the same for
//!   the integral cut off below `beta_0`, where the eigenfunction expansion
//!   converges exponentially.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::coords::OscillatorPoint;
use crate::error::{Error, Result};
use crate::exec::{map_ordered, Execution};
use crate::special::hermite_functions;
use crate::spectrum::{angular_orders, lambda_value, omega_for_level, ExcludedLevel};
use crate::types::{Complex, PhysicalParams, QuantumNumbers};

/// Start of the outward integration in units of the oscillator length.
const X_START: f64 = 1e-4;
const MAX_NEWTON: usize = 50;
const STEP_STIFFNESS: f64 = 0.02;
const RENORMALIZE_ABOVE: f64 = 1e150;
/// Minimum growth of the inward solution between `u_max` and the matching
/// point; less means the grid does not reach the forbidden region.
const MIN_INWARD_GROWTH: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub u_max: f64,
    /// Base number of steps in `ln u`; steps are subdivided further where
    /// the equation is stiff.
    pub steps: usize,
}

/// `-(hbar^2 / 2m) [f'' + f'/u - l^2 f / u^2] + (m omega^2 / 2) u^2 f = eps f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialProblem {
    pub m: f64,
    pub hbar: f64,
    pub omega: f64,
    pub l: Complex,
    pub n_r: u32,
    pub grid: RadialGrid,
}

impl RadialProblem {
    /// Problem with a grid reaching eight turning points out.
    pub fn new(m: f64, hbar: f64, omega: f64, l: Complex, n_r: u32) -> Self {
        let mut p = Self {
            m,
            hbar,
            omega,
            l,
            n_r,
            grid: RadialGrid {
                u_max: 0.0,
                steps: 2000,
            },
        };
        p.grid.u_max = 8.0 * p.turning_point();
        p
    }

    fn length(&self) -> f64 {
        (self.hbar / (self.m * self.omega)).sqrt()
    }

    /// `eps / (hbar omega) = 2 n_r + l + 1`.
    pub fn expected_dimensionless(&self) -> Complex {
        self.l + (2 * self.n_r + 1) as f64
    }

    /// Classical turning point `u` of the real part of the expected level.
    pub fn turning_point(&self) -> f64 {
        (2.0 * self.expected_dimensionless().re.max(0.5)).sqrt() * self.length()
    }

    fn validate(&self) -> Result<()> {
        let ok = |x: f64| x > 0.0 && x.is_finite();
        if !(ok(self.m) && ok(self.hbar) && ok(self.omega)) {
            return Err(Error::InvalidParameter("m, hbar and omega must be positive".into()));
        }
        if !(self.l.re >= 0.0 && self.l.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "angular order needs Re(l) >= 0, got {}",
                self.l
            )));
        }
        if self.grid.steps < 100 {
            return Err(Error::InvalidGrid(format!(
                "need at least 100 steps, got {}",
                self.grid.steps
            )));
        }
        let turning = self.turning_point();
        if !self.grid.u_max.is_finite() || self.grid.u_max < 6.0 * turning {
            return Err(Error::InvalidGrid(format!(
                "u_max = {} is inside six turning points ({})",
                self.grid.u_max,
                6.0 * turning
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingResult {
    /// `eps`, in energy units.
    pub eigenvalue: Complex,
    /// Size of the last Newton correction in units of `hbar omega`.
    pub residual: f64,
    pub iterations: usize,
}

/// State `(f, df/dt)` with `t = ln x`, plus the log of any scale divided out.
#[derive(Clone, Copy)]
struct State {
    f: Complex,
    g: Complex,
    ln_scale: f64,
}

/// RK4 for `f_tt = (l^2 + x^4 - 2 e x^2) f` from `t0` to `t1`.
fn propagate(mut s: State, t0: f64, t1: f64, l2: Complex, e: Complex, base_steps: usize, span: f64) -> State {
    let rhs = |t: f64, f: Complex| {
        let x2 = (2.0 * t).exp();
        (l2 + x2 * x2 - 2.0 * e * x2) * f
    };
    let base_h = span / base_steps as f64;
    let dir = (t1 - t0).signum();
    let mut t = t0;
    while (t1 - t) * dir > 0.0 {
        let x2 = (2.0 * t.max(t + dir * base_h)).exp();
        let stiff = (x2 + l2.norm().sqrt()).max(1.0);
        let h = base_h.min(STEP_STIFFNESS / stiff).min((t1 - t).abs()) * dir;
        let (f, g) = (s.f, s.g);
        let k1f = g;
        let k1g = rhs(t, f);
        let k2f = g + 0.5 * h * k1g;
        let k2g = rhs(t + 0.5 * h, f + 0.5 * h * k1f);
        let k3f = g + 0.5 * h * k2g;
        let k3g = rhs(t + 0.5 * h, f + 0.5 * h * k2f);
        let k4f = g + h * k3g;
        let k4g = rhs(t + h, f + h * k3f);
        s.f = f + h / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
        s.g = g + h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
        t += h;
        let size = s.f.norm();
        if size > RENORMALIZE_ABOVE {
            s.f /= size;
            s.g /= size;
            s.ln_scale += size.ln();
        }
    }
    s
}

struct Matching {
    mismatch: Complex,
    inward_growth: f64,
}

/// Log-derivative mismatch at `x_m` between the regular and the decaying
/// solutions, for dimensionless energy `e`.
fn matching(p: &RadialProblem, e: Complex, x_m: f64, x_max: f64) -> Matching {
    let l = p.l;
    let l2 = l * l;
    let (t0, tm, t1) = (X_START.ln(), x_m.ln(), x_max.ln());
    let span = t1 - t0;
    let c = -e / (2.0 * (l + 1.0));
    let x2 = X_START * X_START;
    // the common factor x0^l is dropped; it does not depend on e
    let out = State {
        f: 1.0 + c * x2,
        g: l + c * (l + 2.0) * x2,
        ln_scale: 0.0,
    };
    let out = propagate(out, t0, tm, l2, e, p.grid.steps, span);
    let inward = State {
        f: Complex::new(1.0, 0.0),
        g: e - 1.0 - x_max * x_max,
        ln_scale: 0.0,
    };
    let inward = propagate(inward, t1, tm, l2, e, p.grid.steps, span);
    Matching {
        mismatch: out.g / out.f - inward.g / inward.f,
        inward_growth: inward.ln_scale + inward.f.norm().ln(),
    }
}

/// Eigenvalue `eps` of the radial problem nearest `hbar omega (2 n_r + l + 1)`,
/// found by complex Newton iteration from 1% above that value.
pub fn radial_shoot(problem: &RadialProblem) -> Result<ShootingResult> {
    problem.validate()?;
    let expected = problem.expected_dimensionless();
    let x_m = (2.0 * expected.re.max(0.5)).sqrt();
    let x_max = problem.grid.u_max / problem.length();

    let first = matching(problem, expected, x_m, x_max);
    if first.inward_growth < MIN_INWARD_GROWTH.ln() {
        return Err(Error::GridError(format!(
            "decaying solution grows only by e^{:.1} between u_max and the matching point",
            first.inward_growth
        )));
    }

    let mut e = expected * 1.01;
    let mut last_step = f64::INFINITY;
    for iteration in 1..=MAX_NEWTON {
        let delta = 1e-6 * e.norm().max(1.0);
        let m0 = matching(problem, e, x_m, x_max).mismatch;
        let mp = matching(problem, e + delta, x_m, x_max).mismatch;
        let mm = matching(problem, e - delta, x_m, x_max).mismatch;
        let slope = (mp - mm) / (2.0 * delta);
        let step = m0 / slope;
        if !step.is_finite() {
            break;
        }
        e -= step;
        last_step = step.norm();
        if last_step < 1e-12 * e.norm().max(1.0) {
            return Ok(ShootingResult {
                eigenvalue: e * problem.hbar * problem.omega,
                residual: last_step,
                iterations: iteration,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_NEWTON,
        last_step,
    })
}

/// Two shooting levels combined into one pseudo-energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelAssembly {
    pub qn: QuantumNumbers,
    pub omega: f64,
    pub eps1: Complex,
    pub eps2: Complex,
    /// `Re(eps1 + eps2) - alpha`
    pub residual: f64,
    /// `Im(eps1 + eps2)`, zero for conjugate orders.
    pub imag: f64,
}

/// `eps(l1, n2) + eps(l2, n~2) - alpha` at pseudo-frequency `omega`, with
/// `l1, l2 = sqrt(nu^2 + B +- iC)`. Vanishes when `omega` is the closed-form
/// value of level `qn`.
pub fn assemble_level(params: &PhysicalParams, qn: QuantumNumbers, omega: f64) -> Result<LevelAssembly> {
    lambda_value(params, qn.nu)?;
    let (l1, l2) = angular_orders(params, qn.nu);
    let (m, hbar) = (params.m(), params.hbar());
    let eps1 = radial_shoot(&RadialProblem::new(m, hbar, omega, l1, qn.n2))?.eigenvalue;
    let eps2 = radial_shoot(&RadialProblem::new(m, hbar, omega, l2, qn.nt2))?.eigenvalue;
    let sum = eps1 + eps2;
    Ok(LevelAssembly {
        qn,
        omega,
        eps1,
        eps2,
        residual: sum.re - params.alpha(),
        imag: sum.im,
    })
}

/// Shooting check of a block of levels; sectors on the branch cut are
/// listed separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleTable {
    pub levels: Vec<LevelAssembly>,
    pub excluded: Vec<ExcludedLevel>,
}

impl OracleTable {
    /// Largest `|residual| / alpha` over the table.
    pub fn max_relative_residual(&self, alpha: f64) -> f64 {
        self.levels
            .iter()
            .map(|l| l.residual.abs() / alpha.abs())
            .fold(0.0, f64::max)
    }
}

/// [`assemble_level`] at the closed-form `omega` of every level with
/// `n2 + n~2 <= max_principal` and `nu <= max_nu`, ordered by `(nu, n2 + n~2, n2)`.
pub fn level_table(params: &PhysicalParams, max_principal: u32, max_nu: u32, exec: Execution) -> Result<OracleTable> {
    params.require_attractive()?;
    let mut levels = Vec::new();
    let mut excluded = Vec::new();
    for nu in 0..=max_nu {
        if let Err(Error::BrokenPhase { nu, shift }) = lambda_value(params, nu) {
            excluded.push(ExcludedLevel { nu, shift });
            continue;
        }
        for s in 0..=max_principal {
            levels.extend((0..=s).map(|n2| QuantumNumbers::new(n2, s - n2, nu)));
        }
    }
    let levels = map_ordered(exec, &levels, |&qn| {
        assemble_level(params, qn, omega_for_level(params, qn)?)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(OracleTable { levels, excluded })
}

/// `psi_n(qb) psi_n(qa)` for `n = 0 ..= n_max` with
/// `psi_n(q) = (m omega / hbar)^(1/4) phi_n(q sqrt(m omega / hbar))`.
fn mode_products(m: f64, hbar: f64, omega: f64, qa: f64, qb: f64, n_max: usize) -> Vec<f64> {
    let k = (m * omega / hbar).sqrt();
    let a = hermite_functions(qa * k, n_max);
    let b = hermite_functions(qb * k, n_max);
    a.iter().zip(&b).map(|(x, y)| k * x * y).collect()
}

fn convolve(x: &[f64], y: &[f64]) -> Vec<f64> {
    (0..x.len()).map(|n| (0..=n).map(|j| x[j] * y[n - j]).sum()).collect()
}

/// `S_N = sum_{n1+n2+n3+n4 = N} prod_i psi_ni(b_i) psi_ni(a_i)`, `N = 0 ..= n_max`.
fn shell_sums(m: f64, hbar: f64, omega: f64, a: &OscillatorPoint, b: &OscillatorPoint, n_max: usize) -> Vec<f64> {
    let per_dim: Vec<Vec<f64>> = a
        .components()
        .into_iter()
        .zip(b.components())
        .map(|(qa, qb)| mode_products(m, hbar, omega, qa, qb, n_max))
        .collect();
    convolve(&convolve(&per_dim[0], &per_dim[1]), &convolve(&per_dim[2], &per_dim[3]))
}

fn check_below_ground(params: &PhysicalParams, omega: f64, ground_quanta: f64) -> Result<()> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
    }
    let ground = params.hbar() * omega * ground_quanta;
    if params.alpha() >= ground {
        return Err(Error::InvalidParameter(format!(
            "alpha = {} is not below the ground pseudo-energy {ground}",
            params.alpha()
        )));
    }
    Ok(())
}

fn pole_denominator(params: &PhysicalParams, omega: f64, quanta: f64, n_total: usize) -> Result<f64> {
    let d = params.hbar() * omega * quanta - params.alpha();
    if d.abs() < 1e-10 {
        return Err(Error::PoleProximity { n_total, gap: d });
    }
    Ok(d)
}

/// `sum_{N <= n_max} S_N hbar / (hbar omega (N + 2) - alpha)` over
/// four-dimensional product Hermite states.
pub fn hermite_spectral_sum(
    params: &PhysicalParams,
    omega: f64,
    a: &OscillatorPoint,
    b: &OscillatorPoint,
    n_max: usize,
) -> Result<f64> {
    check_below_ground(params, omega, 2.0)?;
    if a == b {
        return Err(Error::CoincidentEndpoints);
    }
    if n_max < 20 {
        return Err(Error::InvalidParameter(format!(
            "n_max must be at least 20, got {n_max}"
        )));
    }
    let shells = shell_sums(params.m(), params.hbar(), omega, a, b, n_max);
    let mut sum = 0.0;
    for (n, s) in shells.iter().enumerate() {
        sum += s * params.hbar() / pole_denominator(params, omega, n as f64 + 2.0, n)?;
    }
    Ok(sum)
}

/// One-dimensional analogue: `sum_{n <= n_max} psi_n(qb) psi_n(qa) hbar / (hbar omega (n + 1/2) - alpha)`.
pub fn hermite_spectral_sum_1d(params: &PhysicalParams, omega: f64, qa: f64, qb: f64, n_max: usize) -> Result<f64> {
    check_below_ground(params, omega, 0.5)?;
    let modes = mode_products(params.m(), params.hbar(), omega, qa, qb, n_max);
    let mut sum = 0.0;
    for (n, p) in modes.iter().enumerate() {
        sum += p * params.hbar() / pole_denominator(params, omega, n as f64 + 0.5, n)?;
    }
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampedSum {
    /// `int_{beta_0}^inf exp(alpha beta / hbar) K_E d beta` by eigenfunction expansion.
    pub value: f64,
    /// Bound on the omitted `int_0^{beta_0}`.
    pub short_time_bound: f64,
    /// Magnitude of the last retained term.
    pub last_term: f64,
}

/// `sum_N S_N exp(-beta_0 kappa_N) / kappa_N`, `kappa_N = omega (N + 2) - alpha / hbar`:
/// the pseudo-time integral from `beta_0` to infinity. Adding a quadrature
/// of the short piece `[0, beta_0]` recovers the full Green's function;
/// [`DampedSum::short_time_bound`] says how small that piece is.
pub fn damped_spectral_sum(
    params: &PhysicalParams,
    omega: f64,
    a: &OscillatorPoint,
    b: &OscillatorPoint,
    beta0: f64,
    n_max: usize,
) -> Result<DampedSum> {
    check_below_ground(params, omega, 2.0)?;
    if !(beta0 > 0.0 && beta0.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta_0 must be positive, got {beta0}")));
    }
    if a == b {
        return Err(Error::CoincidentEndpoints);
    }
    let shells = shell_sums(params.m(), params.hbar(), omega, a, b, n_max);
    let alpha_rate = params.alpha() / params.hbar();
    let mut value = 0.0;
    let mut last_term = 0.0;
    for (n, s) in shells.iter().enumerate() {
        let kappa = omega * (n as f64 + 2.0) - alpha_rate;
        last_term = s * (-beta0 * kappa).exp() / kappa;
        value += last_term;
    }
    Ok(DampedSum {
        value,
        short_time_bound: short_time_bound(params, omega, a, b, beta0),
        last_term: last_term.abs(),
    })
}

/// Upper bound on `int_0^{beta_0} exp(alpha beta / hbar) K_E d beta` from
/// `K_E <= (m / 2 pi hbar beta)^2 exp(-m |a - b|^2 s / 2 hbar beta)`,
/// `s = omega beta_0 / sinh(omega beta_0)`.
pub fn short_time_bound(
    params: &PhysicalParams,
    omega: f64,
    a: &OscillatorPoint,
    b: &OscillatorPoint,
    beta0: f64,
) -> f64 {
    let (m, hbar) = (params.m(), params.hbar());
    let d2: f64 = a
        .components()
        .iter()
        .zip(b.components())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    let x = omega * beta0;
    let s = if x == 0.0 { 1.0 } else { x / x.sinh() };
    let c = m * d2 * s / (2.0 * hbar);
    (params.alpha().max(0.0) * beta0 / hbar).exp() * (m / (2.0 * PI * hbar)).powi(2) * (-c / beta0).exp() / c
}
