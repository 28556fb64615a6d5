//! Energy-dependent Green's function from the pseudo-time kernel.
//!
//! For a bound energy `E = -2 m omega^2` the pseudo-time Hamiltonian is a
//! pair of 2D oscillators of frequency `omega` minus `alpha`, and
//!
//! ```text
//! G(b, a) = int_0^inf d beta  exp(alpha beta / hbar) K_E(b, a; beta)  =  <b| hbar / H_T |a>
//! ```
//!
//! Note the `hbar` in the numerator: the resolvent is normalized as
//! `hbar / (H - E)` throughout, not the more common `1 / (H - E)`.
//!
//! The integrand decays like `exp(-(2 omega - alpha / hbar) beta)` for the
//! full Cartesian kernel, so the integral exists only strictly below the
//! lowest pole. Restricting to one azimuthal sector `nu` replaces the decay
//! rate by `2 omega + omega lambda / hbar - alpha / hbar`, which moves the
//! divergence onset to the ground level of that sector; [`pole_scan`] uses
//! this to locate the onset and compare it with the closed-form spectrum.
//!
//! Only the onset below the lowest pole of a sector is visible this way:
//! once the integral diverges it stays divergent for every smaller `omega`,
//! so higher poles never produce a second convergence flip.

use serde::{Deserialize, Serialize};

use crate::coords::OscillatorPoint;
use crate::error::{Error, Result};
use crate::exec::{map_ordered, Execution};
use crate::propagator::{ln_radial_unchecked, Oscillator};
use crate::quadrature::integrate;
use crate::spectrum::{angular_orders, omega_for_level};
use crate::types::{Complex, PhysicalParams, QuantumNumbers};

/// Exponent of the small-beta Gaussian `exp(-m d^2 / 2 hbar beta)` below
/// which the integrand is treated as zero.
const SMALL_BETA_EXPONENT: f64 = 700.0;
/// Default upper limit in units of `1 / omega`.
const DEFAULT_BETA_MAX_OMEGA: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreensQuadrature {
    /// Upper limit of the pseudo-time integral; `None` means `60 / omega`.
    pub beta_max: Option<f64>,
    pub rel_tol: f64,
}

impl Default for GreensQuadrature {
    fn default() -> Self {
        Self {
            beta_max: None,
            rel_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreensRequest {
    pub params: PhysicalParams,
    /// Must be negative; fixes `omega = sqrt(-E / 2m)`.
    pub energy: f64,
    pub a: OscillatorPoint,
    pub b: OscillatorPoint,
    pub quadrature: GreensQuadrature,
}

impl GreensRequest {
    /// Request at the energy whose pseudo-frequency is `omega`.
    pub fn at_omega(params: PhysicalParams, omega: f64, a: OscillatorPoint, b: OscillatorPoint) -> Self {
        Self {
            params,
            energy: -2.0 * params.m() * omega * omega,
            a,
            b,
            quadrature: GreensQuadrature::default(),
        }
    }

    pub fn omega(&self) -> Result<f64> {
        if !(self.energy < 0.0 && self.energy.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "energy must be negative and finite, got {}",
                self.energy
            )));
        }
        Ok((-self.energy / (2.0 * self.params.m())).sqrt())
    }

    fn validate(&self) -> Result<(f64, f64)> {
        let omega = self.omega()?;
        let q = self.quadrature;
        if !(q.rel_tol > 0.0 && q.rel_tol < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "rel_tol must lie in (0, 1), got {}",
                q.rel_tol
            )));
        }
        let beta_max = q.beta_max.unwrap_or(DEFAULT_BETA_MAX_OMEGA / omega);
        if !(beta_max > 0.0 && beta_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beta_max must be positive, got {beta_max}"
            )));
        }
        Ok((omega, beta_max))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreensValue {
    pub pseudo: f64,
    pub physical: f64,
    pub converged: bool,
    pub tail_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorGreensValue {
    pub nu: u32,
    pub pseudo: Complex,
    pub physical: Complex,
    pub converged: bool,
    pub tail_estimate: f64,
}

/// `(|u_a|^2 + |v_a|^2) / 4 = xi + eta = r`, the sum of the two Liouville
/// functions at the source point.
pub fn liouville_weight(a: &OscillatorPoint) -> Result<f64> {
    let w = 0.25 * (a.u_sq() + a.v_sq());
    if w > 0.0 {
        Ok(w)
    } else {
        Err(Error::Domain("the Liouville weight vanishes at the origin".into()))
    }
}

/// Physical resolvent `<b| hbar / (H - E) |a>` from the pseudo-time one,
/// `pseudo * (V1 + V2)(a)`.
pub fn pseudo_to_physical(pseudo: f64, a: &OscillatorPoint) -> Result<f64> {
    Ok(pseudo * liouville_weight(a)?)
}

/// Closed-form poles `omega_n = alpha / [2 (n + 1) hbar + lambda]`,
/// `n = 0 ..= n_max`, of sector `nu`.
pub fn predicted_poles(params: &PhysicalParams, nu: u32, n_max: u32) -> Result<Vec<f64>> {
    (0..=n_max)
        .map(|n| omega_for_level(params, QuantumNumbers::new(n, 0, nu)))
        .collect()
}

/// Of the two poles `pole(floor(n))` and `pole(ceil(n))` bracketing the
/// fractional level `n`, the one closer to `omega`.
fn nearest_pole(omega: f64, n: f64, pole: impl Fn(f64) -> f64) -> f64 {
    let n = n.max(0.0);
    let (a, b) = (pole(n.floor()), pole(n.ceil()));
    if (a - omega).abs() <= (b - omega).abs() {
        a
    } else {
        b
    }
}

/// Pole of the full Cartesian kernel nearest `omega`: `alpha / (hbar (N + 2))`.
fn nearest_cartesian_pole(params: &PhysicalParams, omega: f64) -> f64 {
    let (alpha, hbar) = (params.alpha(), params.hbar());
    if alpha <= 0.0 {
        return f64::NAN;
    }
    nearest_pole(omega, alpha / (hbar * omega) - 2.0, |n| alpha / (hbar * (n + 2.0)))
}

fn nearest_sector_pole(params: &PhysicalParams, nu: u32, omega: f64) -> f64 {
    let (alpha, hbar) = (params.alpha(), params.hbar());
    let Ok(ground) = omega_for_level(params, QuantumNumbers::new(0, 0, nu)) else {
        return f64::NAN;
    };
    // omega_n = alpha / (2 hbar n + d), d = alpha / ground
    let d = alpha / ground;
    nearest_pole(omega, (alpha / omega - d) / (2.0 * hbar), |n| {
        alpha / (2.0 * hbar * n + d)
    })
}

/// Log-slope of the integrand over the last decade below `beta_max`, or
/// `None` when it does not decrease.
fn decay_rate<F: Fn(f64) -> Complex>(ln_f: &F, beta_max: f64) -> Option<f64> {
    let hi = ln_f(beta_max).re;
    let mid = ln_f(0.1 * beta_max).re;
    if hi >= mid || !hi.is_finite() {
        None
    } else {
        Some((mid - hi) / (0.9 * beta_max))
    }
}

struct Laplace {
    value: Complex,
    error: f64,
    tail: f64,
}

/// `int_0^beta_max exp(ln_f(beta)) d beta` on panels in `ln beta`.
fn laplace_integral<F: Fn(f64) -> Complex>(
    ln_f: F,
    min_separation_sq: f64,
    m: f64,
    hbar: f64,
    beta_max: f64,
    rel_tol: f64,
    kappa: f64,
) -> Laplace {
    let mut beta_lo = m * min_separation_sq / (2.0 * hbar * SMALL_BETA_EXPONENT);
    if beta_lo > 1e-3 * beta_max {
        beta_lo = 1e-3 * beta_max;
    }
    let (s_lo, s_hi) = (beta_lo.ln(), beta_max.ln());
    let panels = ((s_hi - s_lo) / 0.5).ceil() as usize;
    let r = integrate(
        |s| (ln_f(s.exp()) + s).exp(),
        s_lo,
        s_hi,
        panels.max(4),
        0.1 * rel_tol,
        20_000,
    );
    Laplace {
        value: r.value,
        error: r.error,
        tail: ln_f(beta_max).re.exp() / kappa,
    }
}

/// Pseudo-time Green's function of the full four-dimensional kernel.
///
/// The Cartesian kernel does not see `B` and `C`; they enter only through
/// [`sector_greens`].
pub fn pseudo_greens(req: &GreensRequest) -> Result<GreensValue> {
    let (omega, beta_max) = req.validate()?;
    if req.a == req.b {
        return Err(Error::CoincidentEndpoints);
    }
    let params = &req.params;
    let osc = Oscillator::from_params(params, omega)?;
    let alpha_rate = params.alpha() / params.hbar();
    let pairs: Vec<(f64, f64)> = req.a.components().into_iter().zip(req.b.components()).collect();
    let ln_f = |beta: f64| {
        let ln: f64 = pairs.iter().map(|&(qa, qb)| osc.ln_euclidean(beta, qa, qb)).sum();
        Complex::new(ln + alpha_rate * beta, 0.0)
    };
    let kappa = decay_rate(&ln_f, beta_max).ok_or(Error::DivergentIntegral {
        nearest_pole: nearest_cartesian_pole(params, omega),
    })?;
    let d2: f64 = pairs.iter().map(|(qa, qb)| (qa - qb) * (qa - qb)).sum();
    let r = laplace_integral(
        ln_f,
        d2,
        params.m(),
        params.hbar(),
        beta_max,
        req.quadrature.rel_tol,
        kappa,
    );
    let pseudo = r.value.re;
    let bound = req.quadrature.rel_tol * pseudo.abs();
    Ok(GreensValue {
        pseudo,
        physical: pseudo_to_physical(pseudo, &req.a)?,
        converged: r.tail < bound && r.error < bound,
        tail_estimate: r.tail,
    })
}

fn sector_setup(req: &GreensRequest, nu: u32) -> Result<(Oscillator, (Complex, Complex), f64)> {
    let (omega, beta_max) = req.validate()?;
    let (ua, ub, va, vb) = (req.a.u_norm(), req.b.u_norm(), req.a.v_norm(), req.b.v_norm());
    if [ua, ub, va, vb].iter().any(|&x| x <= 0.0) {
        return Err(Error::Domain(
            "sector kernels need endpoints off the u = 0 and v = 0 planes".into(),
        ));
    }
    if ua == ub && va == vb {
        return Err(Error::CoincidentEndpoints);
    }
    Ok((
        Oscillator::from_params(&req.params, omega)?,
        angular_orders(&req.params, nu),
        beta_max,
    ))
}

fn sector_ln_integrand<'a>(
    req: &'a GreensRequest,
    osc: Oscillator,
    orders: (Complex, Complex),
) -> impl Fn(f64) -> Complex + 'a {
    let (ua, ub, va, vb) = (req.a.u_norm(), req.b.u_norm(), req.a.v_norm(), req.b.v_norm());
    let alpha_rate = req.params.alpha() / req.params.hbar();
    move |beta| {
        ln_radial_unchecked(&osc, orders.0, ua, ub, beta)
            + ln_radial_unchecked(&osc, orders.1, va, vb, beta)
            + alpha_rate * beta
    }
}

/// Green's function of azimuthal sector `nu`: the pseudo-time integral of
/// `exp(alpha beta / hbar) R_{l1}(|u_a|, |u_b|) R_{l2}(|v_a|, |v_b|)` with
/// `l1, l2 = sqrt(nu^2 + B +- iC)`.
pub fn sector_greens(req: &GreensRequest, nu: u32) -> Result<SectorGreensValue> {
    let (osc, orders, beta_max) = sector_setup(req, nu)?;
    let ln_f = sector_ln_integrand(req, osc, orders);
    let kappa = decay_rate(&ln_f, beta_max).ok_or(Error::DivergentIntegral {
        nearest_pole: nearest_sector_pole(&req.params, nu, osc.omega),
    })?;
    let d2 = (req.a.u_norm() - req.b.u_norm()).powi(2) + (req.a.v_norm() - req.b.v_norm()).powi(2);
    let r = laplace_integral(&ln_f, d2, osc.m, osc.hbar, beta_max, req.quadrature.rel_tol, kappa);
    let bound = req.quadrature.rel_tol * r.value.norm();
    Ok(SectorGreensValue {
        nu,
        pseudo: r.value,
        physical: r.value * liouville_weight(&req.a)?,
        converged: r.tail < bound && r.error < bound,
        tail_estimate: r.tail,
    })
}

/// The divergence test of [`sector_greens`] alone, without the quadrature.
pub fn sector_diverges(req: &GreensRequest, nu: u32) -> Result<bool> {
    let (osc, orders, beta_max) = sector_setup(req, nu)?;
    Ok(decay_rate(&sector_ln_integrand(req, osc, orders), beta_max).is_none())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleScanResult {
    pub nu: u32,
    pub detected_omegas: Vec<f64>,
    /// Level `n` of the closed-form pole nearest each detection.
    pub detected_levels: Vec<u32>,
    /// Closed-form poles inside the scanned range, in decreasing `omega`
    /// (increasing `n`).
    pub predicted_omegas: Vec<f64>,
    pub predicted_levels: Vec<u32>,
    /// `max |detected - predicted(level)|`; absent when nothing was detected.
    pub max_abs_mismatch: Option<f64>,
}

/// Fixed endpoint radii in units of the oscillator length.
const SCAN_ENDPOINTS: ([f64; 2], [f64; 2]) = ([0.8, 1.1], [1.3, 0.6]);

fn scan_request(params: &PhysicalParams, omega: f64) -> GreensRequest {
    let len = (params.hbar() / (params.m() * omega)).sqrt();
    let (a, b) = SCAN_ENDPOINTS;
    GreensRequest::at_omega(
        *params,
        omega,
        OscillatorPoint::new([a[0] * len, 0.0], [a[1] * len, 0.0]),
        OscillatorPoint::new([0.0, b[0] * len], [0.0, b[1] * len]),
    )
}

pub fn pole_scan(params: &PhysicalParams, nu: u32, omega_range: (f64, f64), steps: usize) -> Result<PoleScanResult> {
    pole_scan_with(params, nu, omega_range, steps, Execution::default())
}

/// Sweep `omega` over `steps` evenly spaced points at fixed `alpha`, locate
/// every flip between a convergent and a divergent sector integral, refine
/// it by bisection to `1e-9 omega`, and compare with the closed-form poles.
pub fn pole_scan_with(
    params: &PhysicalParams,
    nu: u32,
    omega_range: (f64, f64),
    steps: usize,
    exec: Execution,
) -> Result<PoleScanResult> {
    let (lo, hi) = omega_range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "omega range must satisfy 0 < lo < hi, got ({lo}, {hi})"
        )));
    }
    if steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 scan steps, got {steps}"
        )));
    }
    let diverges = |omega: f64| sector_diverges(&scan_request(params, omega), nu);

    let grid: Vec<f64> = (0..steps)
        .map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64)
        .collect();
    let flags = map_ordered(exec, &grid, |&w| diverges(w))
        .into_iter()
        .collect::<Result<Vec<bool>>>()?;

    let brackets: Vec<(f64, f64, bool)> = grid
        .windows(2)
        .zip(flags.windows(2))
        .filter(|(_, f)| f[0] != f[1])
        .map(|(w, f)| (w[0], w[1], f[0]))
        .collect();
    let detected_omegas = map_ordered(exec, &brackets, |&(mut a, mut b, flag_a)| -> Result<f64> {
        while b - a > 1e-9 * b {
            let mid = 0.5 * (a + b);
            if diverges(mid)? == flag_a {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(0.5 * (a + b))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;

    // Poles accumulate at omega -> 0 so a finite range holds finitely many.
    let mut predicted_levels = Vec::new();
    let mut predicted_omegas = Vec::new();
    let mut nearest = Vec::new();
    if let Ok(ground) = omega_for_level(params, QuantumNumbers::new(0, 0, nu)) {
        let level = |n: u32| omega_for_level(params, QuantumNumbers::new(n, 0, nu));
        let mut n = 0;
        loop {
            let w = level(n)?;
            if w < lo {
                break;
            }
            if w <= hi {
                predicted_levels.push(n);
                predicted_omegas.push(w);
            }
            n += 1;
        }
        for &w in &detected_omegas {
            let p = nearest_sector_pole(params, nu, w);
            let d = params.alpha() / ground;
            let n = ((params.alpha() / p - d) / (2.0 * params.hbar())).round() as u32;
            nearest.push((n, p));
        }
    }
    let max_abs_mismatch = detected_omegas
        .iter()
        .zip(&nearest)
        .map(|(w, (_, p))| (w - p).abs())
        .reduce(f64::max);
    Ok(PoleScanResult {
        nu,
        detected_levels: nearest.iter().map(|&(n, _)| n).collect(),
        detected_omegas,
        predicted_omegas,
        predicted_levels,
        max_abs_mismatch,
    })
}
