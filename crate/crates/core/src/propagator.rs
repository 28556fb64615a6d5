//! Exact oscillator kernels in pseudo-time.
//!
//! After the change to `(u_vec, v_vec)` the pseudo-time Hamiltonian is two
//! isotropic 2D oscillators of frequency `omega` shifted by `-alpha`, so its
//! kernel is a product of four 1D Mehler kernels times `exp(i alpha tau / hbar)`.
//! Both the oscillatory real-time form and the Wick-rotated form
//! (`tau = -i beta`) are provided; the Euclidean form is what the resolvent
//! integral uses.
//!
//! Real-time evaluation refuses to run within `1e-8` of a caustic
//! (`sin(omega tau) = 0`) and takes the principal branch of the prefactor
//! root, which is continuous only inside one caustic cell.
//!
//! [`ln_sector_kernel`] is the same propagator restricted to one azimuthal
//! sector: with `p_phi = hbar nu` the two oscillators carry the complex
//! angular orders `l1, l2 = sqrt(nu^2 + B +- iC)` and their radial kernels
//! involve `I_l` of complex order.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::coords::OscillatorPoint;
use crate::error::{Error, Result};
use crate::special::{ln_bessel_i_scaled, ln_sinh};
use crate::types::{principal_sqrt, Complex, PhysicalParams};

/// Smallest `|sin(omega tau)|` accepted by the real-time kernel.
pub const CAUSTIC_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    RealTime,
    Euclidean,
}

/// Mass, action and frequency of a 1D oscillator. `omega = 0` is the free
/// particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Oscillator {
    pub m: f64,
    pub hbar: f64,
    pub omega: f64,
}

impl Oscillator {
    pub fn new(m: f64, hbar: f64, omega: f64) -> Result<Self> {
        if !(m > 0.0 && hbar > 0.0 && omega >= 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "oscillator needs m > 0, hbar > 0, omega >= 0 (got {m}, {hbar}, {omega})"
            )));
        }
        Ok(Self { m, hbar, omega })
    }

    pub fn from_params(params: &PhysicalParams, omega: f64) -> Result<Self> {
        Self::new(params.m(), params.hbar(), omega)
    }

    /// `sqrt(hbar / (m omega))`
    pub fn length(&self) -> f64 {
        (self.hbar / (self.m * self.omega)).sqrt()
    }

    /// Euclidean kernel as `exp(ln_norm - (diag (qa^2 + qb^2) - 2 off qa qb) / 2)`,
    /// returned as `(ln_norm, off, diag - off)`.
    fn euclidean_coefficients(&self, beta: f64) -> (f64, f64, f64) {
        let (m, hbar, omega) = (self.m, self.hbar, self.omega);
        if omega == 0.0 {
            let off = m / (hbar * beta);
            return (0.5 * (off / (2.0 * PI)).ln(), off, 0.0);
        }
        let x = omega * beta;
        let scale = m * omega / hbar;
        let ln_off = scale.ln() - ln_sinh(x);
        // diag - off = scale * (cosh x - 1) / sinh x
        (0.5 * (ln_off - (2.0 * PI).ln()), ln_off.exp(), scale * (0.5 * x).tanh())
    }

    /// `ln K_E(qa, qb; beta)` for one Cartesian direction.
    pub fn ln_euclidean(&self, beta: f64, qa: f64, qb: f64) -> f64 {
        let (ln_norm, off, excess) = self.euclidean_coefficients(beta);
        let d = qa - qb;
        ln_norm - 0.5 * (off * d * d + excess * (qa * qa + qb * qb))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: Complex,
    pub representation: Representation,
    /// Set when a Euclidean value fell below the smallest positive double
    /// and was returned as exact zero.
    pub underflow: bool,
}

fn euclidean_value(ln_value: f64) -> KernelValue {
    let value = ln_value.exp();
    KernelValue {
        value: Complex::new(value, 0.0),
        representation: Representation::Euclidean,
        underflow: value == 0.0 && ln_value.is_finite(),
    }
}

fn check_time(time: f64) -> Result<()> {
    if time > 0.0 && time.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("time must be positive, got {time}")))
    }
}

/// `(m omega / (2 pi i hbar sin(omega t)), m omega / (2 hbar sin(omega t)), cos(omega t))`
/// with the free-particle limit at `omega = 0`.
fn real_time_coefficients(osc: &Oscillator, time: f64) -> Result<(Complex, f64, f64)> {
    let (m, hbar, omega) = (osc.m, osc.hbar, osc.omega);
    if omega == 0.0 {
        let a = m / (2.0 * hbar * time);
        return Ok((Complex::new(0.0, -m / (2.0 * PI * hbar * time)), a, 1.0));
    }
    let (s, c) = (omega * time).sin_cos();
    if s.abs() < CAUSTIC_TOLERANCE {
        return Err(Error::Caustic { sin_abs: s.abs() });
    }
    let norm = Complex::new(0.0, -m * omega / (2.0 * PI * hbar * s));
    Ok((norm, m * omega / (2.0 * hbar * s), c))
}

/// The 1D oscillator kernel `<qb| exp(-i H t / hbar) |qa>` or its Euclidean
/// continuation `<qb| exp(-H beta / hbar) |qa>`.
pub fn sho_kernel_1d(osc: &Oscillator, time: f64, qa: f64, qb: f64, repr: Representation) -> Result<KernelValue> {
    check_time(time)?;
    match repr {
        Representation::Euclidean => Ok(euclidean_value(osc.ln_euclidean(time, qa, qb))),
        Representation::RealTime => {
            let (norm, a, c) = real_time_coefficients(osc, time)?;
            let phase = if osc.omega == 0.0 {
                a * (qb - qa) * (qb - qa)
            } else {
                a * ((qa * qa + qb * qb) * c - 2.0 * qa * qb)
            };
            Ok(KernelValue {
                value: principal_sqrt(norm) * Complex::new(0.0, phase).exp(),
                representation: Representation::RealTime,
                underflow: false,
            })
        }
    }
}

/// Evaluation request for the full four-dimensional kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelRequest {
    pub params: PhysicalParams,
    pub omega: f64,
    pub a: OscillatorPoint,
    pub b: OscillatorPoint,
    /// `tau` for real time, `beta` for Euclidean.
    pub time: f64,
    pub representation: Representation,
}

/// `ln` of the Euclidean four-dimensional kernel including `exp(alpha beta / hbar)`.
pub fn ln_total_kernel_euclidean(
    params: &PhysicalParams,
    omega: f64,
    a: &OscillatorPoint,
    b: &OscillatorPoint,
    beta: f64,
) -> Result<f64> {
    check_time(beta)?;
    let osc = Oscillator::from_params(params, omega)?;
    let product: f64 = a
        .components()
        .iter()
        .zip(b.components())
        .map(|(&qa, qb)| osc.ln_euclidean(beta, qa, qb))
        .sum();
    Ok(product + params.alpha() * beta / params.hbar())
}

/// Product of the four 1D kernels times the `alpha` phase.
pub fn total_kernel(req: &KernelRequest) -> Result<KernelValue> {
    check_time(req.time)?;
    match req.representation {
        Representation::Euclidean => Ok(euclidean_value(ln_total_kernel_euclidean(
            &req.params,
            req.omega,
            &req.a,
            &req.b,
            req.time,
        )?)),
        Representation::RealTime => {
            let osc = Oscillator::from_params(&req.params, req.omega)?;
            let mut value = Complex::new(0.0, req.params.alpha() * req.time / req.params.hbar()).exp();
            for (qa, qb) in req.a.components().into_iter().zip(req.b.components()) {
                value *= sho_kernel_1d(&osc, req.time, qa, qb, Representation::RealTime)?.value;
            }
            Ok(KernelValue {
                value,
                representation: Representation::RealTime,
                underflow: false,
            })
        }
    }
}

/// The four-dimensional kernel written in one piece: normalization squared
/// and a single exponent in `|u|^2 + |v|^2` and the two dot products.
pub fn total_kernel_closed_form(req: &KernelRequest) -> Result<KernelValue> {
    check_time(req.time)?;
    let osc = Oscillator::from_params(&req.params, req.omega)?;
    let (alpha, hbar) = (req.params.alpha(), req.params.hbar());
    let squares = req.a.u_sq() + req.a.v_sq() + req.b.u_sq() + req.b.v_sq();
    let dots = req.a.dot(&req.b);
    match req.representation {
        Representation::Euclidean => {
            let (m, omega, beta) = (osc.m, osc.omega, req.time);
            let ln_value = if omega == 0.0 {
                let a = m / (hbar * beta);
                2.0 * (a / (2.0 * PI)).ln() - 0.5 * a * (squares - 2.0 * dots)
            } else {
                let x = omega * beta;
                let ln_ratio = (m * omega / (2.0 * PI * hbar)).ln() - ln_sinh(x);
                let a = m * omega / (2.0 * hbar);
                // (squares cosh x - 2 dots) / sinh x
                let bracket = squares * (1.0 / x.tanh()) - 2.0 * dots * (-ln_sinh(x)).exp();
                2.0 * ln_ratio - a * bracket
            };
            Ok(euclidean_value(ln_value + alpha * beta / hbar))
        }
        Representation::RealTime => {
            let (norm, a, c) = real_time_coefficients(&osc, req.time)?;
            let phase = a * (squares * c - 2.0 * dots);
            let value = norm * norm * Complex::new(0.0, phase + alpha * req.time / hbar).exp();
            Ok(KernelValue {
                value,
                representation: Representation::RealTime,
                underflow: false,
            })
        }
    }
}

/// `ln` of the Euclidean radial kernel of a 2D oscillator with angular
/// order `order`:
///
/// `(m omega / hbar sinh x) exp(-(m omega / 2 hbar)(ua^2 + ub^2) coth x) I_order(m omega ua ub / hbar sinh x)`,
/// `x = omega beta`.
///
/// Summing `exp(i m dphi) / (2 pi)` times this over integer `m` gives the
/// Cartesian 2D kernel.
pub fn ln_radial_kernel(osc: &Oscillator, order: Complex, ua: f64, ub: f64, beta: f64) -> Result<Complex> {
    check_time(beta)?;
    if osc.omega <= 0.0 {
        return Err(Error::InvalidParameter("radial kernel needs omega > 0".into()));
    }
    if !(ua > 0.0 && ub > 0.0) {
        return Err(Error::Domain(format!(
            "radial endpoints must be positive, got {ua}, {ub}"
        )));
    }
    Ok(ln_radial_unchecked(osc, order, ua, ub, beta))
}

/// [`ln_radial_kernel`] without argument validation.
pub(crate) fn ln_radial_unchecked(osc: &Oscillator, order: Complex, ua: f64, ub: f64, beta: f64) -> Complex {
    let x = osc.omega * beta;
    let scale = osc.m * osc.omega / osc.hbar;
    let ln_sh = ln_sinh(x);
    let ln_z = (scale * ua * ub).ln() - ln_sh;
    let d = ua - ub;
    // the coth term minus z, rearranged to avoid cancellation at small beta
    let gauss = 0.5 * scale * (d * d * (-ln_sh).exp() + (ua * ua + ub * ub) * (0.5 * x).tanh());
    Complex::new(scale.ln() - ln_sh - gauss, 0.0) + ln_bessel_i_scaled(order, ln_z)
}

/// `ln` of the Euclidean kernel in azimuthal sector `nu`:
/// `exp(alpha beta / hbar) R_{l1}(|ua|, |ub|) R_{l2}(|va|, |vb|)`.
pub fn ln_sector_kernel(
    params: &PhysicalParams,
    omega: f64,
    orders: (Complex, Complex),
    a: &OscillatorPoint,
    b: &OscillatorPoint,
    beta: f64,
) -> Result<Complex> {
    let osc = Oscillator::from_params(params, omega)?;
    let ru = ln_radial_kernel(&osc, orders.0, a.u_norm(), b.u_norm(), beta)?;
    let rv = ln_radial_kernel(&osc, orders.1, a.v_norm(), b.v_norm(), beta)?;
    Ok(ru + rv + params.alpha() * beta / params.hbar())
}

/// Trapezoid grid for the Chapman-Kolmogorov check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemigroupGrid {
    /// Half-width of the domain in standard deviations of the integrand.
    pub widths: f64,
    pub initial_intervals: usize,
    pub max_refinements: usize,
    /// Relative change between successive halvings that counts as converged.
    pub tolerance: f64,
}

impl Default for SemigroupGrid {
    fn default() -> Self {
        Self {
            widths: 10.0,
            initial_intervals: 32,
            max_refinements: 12,
            tolerance: 1e-7,
        }
    }
}

/// `|int K(qa, x; beta1) K(x, qb; beta2) dx - K(qa, qb; beta1 + beta2)| / K(qa, qb; beta1 + beta2)`
/// for the Euclidean 1D kernel.
pub fn semigroup_residual(
    osc: &Oscillator,
    beta1: f64,
    beta2: f64,
    qa: f64,
    qb: f64,
    grid: &SemigroupGrid,
) -> Result<f64> {
    check_time(beta1)?;
    check_time(beta2)?;
    if grid.widths < 8.0 || grid.initial_intervals < 2 {
        return Err(Error::InvalidGrid(format!(
            "need at least 8 widths and 2 intervals, got {} and {}",
            grid.widths, grid.initial_intervals
        )));
    }
    // The x-dependence of the product is a Gaussian with precision diag1 + diag2.
    let (_, off1, ex1) = osc.euclidean_coefficients(beta1);
    let (_, off2, ex2) = osc.euclidean_coefficients(beta2);
    let precision = off1 + ex1 + off2 + ex2;
    let center = (off1 * qa + off2 * qb) / precision;
    let sigma = precision.sqrt().recip();
    let (lo, hi) = (center - grid.widths * sigma, center + grid.widths * sigma);

    let integrand = |x: f64| (osc.ln_euclidean(beta1, qa, x) + osc.ln_euclidean(beta2, x, qb)).exp();
    let mut n = grid.initial_intervals;
    let mut h = (hi - lo) / n as f64;
    let mut estimate =
        h * (0.5 * (integrand(lo) + integrand(hi)) + (1..n).map(|k| integrand(lo + k as f64 * h)).sum::<f64>());
    let mut last_change = f64::INFINITY;
    for _ in 0..grid.max_refinements {
        // halving reuses the old nodes; only midpoints are new
        let mids: f64 = (0..n).map(|k| integrand(lo + (k as f64 + 0.5) * h)).sum();
        let refined = 0.5 * estimate + 0.5 * h * mids;
        n *= 2;
        h *= 0.5;
        last_change = (refined - estimate).abs() / refined.abs();
        estimate = refined;
        if last_change < grid.tolerance {
            let exact = osc.ln_euclidean(beta1 + beta2, qa, qb).exp();
            return Ok((estimate - exact).abs() / exact);
        }
    }
    Err(Error::GridTooCoarse { last_change })
}
