//! Closed-form bound-state spectrum.
//!
//! In the `(u, v)` oscillator picture the two azimuthal momenta square to
//! `hbar^2 (nu^2 + B +- i C)`. Their principal square roots are complex
//! conjugates, so
//!
//! ```text
//! lambda = hbar [ sqrt(nu^2 + B + iC) + sqrt(nu^2 + B - iC) ]
//! ```
//!
//! is real. The physical-state condition
//! `2 (n2 + n~2 + 1) hbar omega + omega lambda - alpha = 0` fixes `omega`, and
//! `E = -2 m omega^2`.
//!
//! The argument fails on the branch cut: with `C = 0` and `nu^2 + B < 0`
//! both radicands are the same negative number and `lambda` is imaginary.
//! [`lambda_value`] reports that as [`Error::BrokenPhase`] instead of
//! returning a complex energy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_ordered, Execution};
use crate::types::{principal_sqrt, Complex, PhysicalParams, QuantumNumbers};

/// Eigenvalues of the two deformed azimuthal momenta squared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularPair {
    pub lambda1_sq: Complex,
    pub lambda2_sq: Complex,
}

pub fn angular_pair(params: &PhysicalParams, nu: u32) -> AngularPair {
    let h2 = params.hbar() * params.hbar();
    let shift = nu_shift(params, nu);
    AngularPair {
        lambda1_sq: Complex::new(h2 * shift, h2 * params.c()),
        lambda2_sq: Complex::new(h2 * shift, -h2 * params.c()),
    }
}

/// `nu^2 + B`
fn nu_shift(params: &PhysicalParams, nu: u32) -> f64 {
    let n = nu as f64;
    n * n + params.b()
}

/// Effective (complex) angular momenta `l1 = sqrt(nu^2 + B + iC)` and
/// `l2 = sqrt(nu^2 + B - iC)` on the principal branch. Dimensionless.
pub fn angular_orders(params: &PhysicalParams, nu: u32) -> (Complex, Complex) {
    let shift = nu_shift(params, nu);
    (
        principal_sqrt(Complex::new(shift, params.c())),
        principal_sqrt(Complex::new(shift, -params.c())),
    )
}

/// `lambda` evaluated in complex arithmetic without the branch-cut check.
pub fn lambda_complex(params: &PhysicalParams, nu: u32) -> Complex {
    let (l1, l2) = angular_orders(params, nu);
    params.hbar() * (l1 + l2)
}

fn on_branch_cut(params: &PhysicalParams, nu: u32) -> bool {
    params.c() == 0.0 && nu_shift(params, nu) < 0.0
}

/// Tolerance on `|Im lambda|` when declaring it real.
pub fn reality_tolerance(lambda: f64) -> f64 {
    1e-12 * (1.0 + lambda.abs())
}

/// Real `lambda >= 0` for azimuthal number `nu`.
pub fn lambda_value(params: &PhysicalParams, nu: u32) -> Result<f64> {
    if on_branch_cut(params, nu) {
        return Err(Error::BrokenPhase {
            nu,
            shift: nu_shift(params, nu),
        });
    }
    let lambda = lambda_complex(params, nu);
    if lambda.im.abs() > reality_tolerance(lambda.re) {
        return Err(Error::BrokenPhase {
            nu,
            shift: nu_shift(params, nu),
        });
    }
    Ok(lambda.re)
}

/// The three algebraically equivalent ways of writing the level energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyForms {
    /// `-2 m alpha^2 / [2 (s + 1) hbar + lambda]^2`
    pub from_condition: f64,
    /// `-m alpha^2 / (2 [(s + 1) hbar + lambda / 2]^2)`
    pub explicit_hbar: f64,
    /// `-m alpha^2 / (2 hbar^2 [s + 1 + (l1 + l2) / 2]^2)`
    pub dimensionless: f64,
}

pub fn energy_forms(params: &PhysicalParams, qn: QuantumNumbers) -> Result<EnergyForms> {
    params.require_attractive()?;
    let lambda = lambda_value(params, qn.nu)?;
    let (m, hbar, alpha) = (params.m(), params.hbar(), params.alpha());
    let s1 = qn.radial_sum() as f64 + 1.0;

    let d = 2.0 * s1 * hbar + lambda;
    let from_condition = -2.0 * m * alpha * alpha / (d * d);

    let d = s1 * hbar + 0.5 * lambda;
    let explicit_hbar = -m * alpha * alpha / (2.0 * d * d);

    let (l1, l2) = angular_orders(params, qn.nu);
    let d = s1 + 0.5 * (l1 + l2).re;
    let dimensionless = -m * alpha * alpha / (2.0 * hbar * hbar * d * d);

    Ok(EnergyForms {
        from_condition,
        explicit_hbar,
        dimensionless,
    })
}

/// Bound-state energy of level `qn`.
pub fn energy(params: &PhysicalParams, qn: QuantumNumbers) -> Result<f64> {
    let forms = energy_forms(params, qn)?;
    debug_assert!(
        (forms.from_condition - forms.explicit_hbar).abs() <= 1e-14 * forms.from_condition.abs(),
        "energy forms disagree: {forms:?}"
    );
    Ok(forms.from_condition)
}

/// Pseudo-frequency `omega = alpha / [2 (s + 1) hbar + lambda]` solving the
/// physical-state condition.
pub fn omega_for_level(params: &PhysicalParams, qn: QuantumNumbers) -> Result<f64> {
    params.require_attractive()?;
    let lambda = lambda_value(params, qn.nu)?;
    let s1 = qn.radial_sum() as f64 + 1.0;
    Ok(params.alpha() / (2.0 * s1 * params.hbar() + lambda))
}

/// `(s + 1)` ordered splits of `s = n2 + n~2`, doubled for `nu > 0` since the
/// spectrum sees only `nu^2`.
pub fn degeneracy(radial_sum: u32, nu: u32) -> u32 {
    (radial_sum + 1) * if nu == 0 { 1 } else { 2 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    /// Representative labels; merged levels report `(s, 0, nu)`.
    pub qn: QuantumNumbers,
    pub lambda: f64,
    pub omega: f64,
    pub energy: f64,
    pub degeneracy: u32,
}

/// An azimuthal number left out of a table because it sits on the cut.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcludedLevel {
    pub nu: u32,
    /// `nu^2 + B`
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub entries: Vec<SpectrumEntry>,
    pub excluded: Vec<ExcludedLevel>,
}

pub fn spectrum_table(params: &PhysicalParams, max_principal: u32, max_nu: u32) -> Result<SpectrumTable> {
    spectrum_table_with(params, max_principal, max_nu, Execution::default())
}

/// All `(s, nu)` levels with `s <= max_principal`, `nu <= max_nu`, sorted by
/// energy with ties broken by `(nu, s)`.
pub fn spectrum_table_with(
    params: &PhysicalParams,
    max_principal: u32,
    max_nu: u32,
    exec: Execution,
) -> Result<SpectrumTable> {
    params.require_attractive()?;
    let mut excluded = Vec::new();
    let mut cells = Vec::new();
    for nu in 0..=max_nu {
        if let Err(Error::BrokenPhase { nu, shift }) = lambda_value(params, nu) {
            excluded.push(ExcludedLevel { nu, shift });
            continue;
        }
        cells.extend((0..=max_principal).map(|s| (s, nu)));
    }

    let rows = map_ordered(exec, &cells, |&(s, nu)| -> Result<SpectrumEntry> {
        let qn = QuantumNumbers::new(s, 0, nu);
        Ok(SpectrumEntry {
            qn,
            lambda: lambda_value(params, nu)?,
            omega: omega_for_level(params, qn)?,
            energy: energy(params, qn)?,
            degeneracy: degeneracy(s, nu),
        })
    });
    let mut entries = rows.into_iter().collect::<Result<Vec<_>>>()?;
    entries.sort_by(|a, b| {
        a.energy
            .total_cmp(&b.energy)
            .then(a.qn.nu.cmp(&b.qn.nu))
            .then(a.qn.n2.cmp(&b.qn.n2))
    });
    Ok(SpectrumTable { entries, excluded })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Unbroken,
    Broken,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Unbroken => "unbroken",
            Phase::Broken => "broken",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub params: PhysicalParams,
    pub classification: Phase,
    /// Smallest `nu` on the branch cut, if any.
    pub offending_nu: Option<u32>,
    /// Largest `|Im E|` of the lowest level over `nu <= nu_max`, with
    /// `lambda` continued through complex arithmetic.
    pub max_imag_energy: f64,
}

/// Rectangular `(B, C)` grid with both endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub b_min: f64,
    pub b_max: f64,
    pub b_points: usize,
    pub c_min: f64,
    pub c_max: f64,
    pub c_points: usize,
}

impl PhaseGrid {
    pub fn square(lo: f64, hi: f64, points: usize) -> Self {
        Self {
            b_min: lo,
            b_max: hi,
            b_points: points,
            c_min: lo,
            c_max: hi,
            c_points: points,
        }
    }

    /// Row-major in `B`, then `C`.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let bs = linspace(self.b_min, self.b_max, self.b_points);
        let cs = linspace(self.c_min, self.c_max, self.c_points);
        bs.iter().flat_map(|&b| cs.iter().map(move |&c| (b, c))).collect()
    }
}

/// Endpoint-weighted form so that symmetric grids hit 0 exactly.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let d = (n - 1) as f64;
            (0..n).map(|k| (lo * (d - k as f64) + hi * k as f64) / d).collect()
        }
    }
}

pub fn classify(params: &PhysicalParams, nu_max: u32) -> PhaseReport {
    let mut offending_nu = None;
    let mut max_imag_energy = 0.0f64;
    let (m, hbar, alpha) = (params.m(), params.hbar(), params.alpha());
    for nu in 0..=nu_max {
        if offending_nu.is_none() && lambda_value(params, nu).is_err() {
            offending_nu = Some(nu);
        }
        let d = 2.0 * hbar + lambda_complex(params, nu);
        let e = -2.0 * m * alpha * alpha / (d * d);
        max_imag_energy = max_imag_energy.max(e.im.abs());
    }
    let classification = if offending_nu.is_some() {
        Phase::Broken
    } else {
        Phase::Unbroken
    };
    PhaseReport {
        params: *params,
        classification,
        offending_nu,
        max_imag_energy,
    }
}

pub fn pt_phase_scan(base: &PhysicalParams, grid: &PhaseGrid, nu_max: u32) -> Result<Vec<PhaseReport>> {
    pt_phase_scan_with(base, grid, nu_max, Execution::default())
}

/// Classify every `(B, C)` grid point; `m`, `hbar`, `alpha` come from `base`.
pub fn pt_phase_scan_with(
    base: &PhysicalParams,
    grid: &PhaseGrid,
    nu_max: u32,
    exec: Execution,
) -> Result<Vec<PhaseReport>> {
    let points = grid.points();
    map_ordered(exec, &points, |&(b, c)| {
        base.with_couplings(b, c).map(|p| classify(&p, nu_max))
    })
    .into_iter()
    .collect()
}
