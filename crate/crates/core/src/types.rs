//! Shared domain types and the complex branch convention.
//!
//! Units: the library carries `m` and `hbar` explicitly. The oscillator
//! variables `u`, `v` (with `xi = u^2/4`, `eta = v^2/4`) have dimension
//! length^(1/2), which is what makes the bound-state relation
//! `E = -2 m omega^2` dimensionally consistent: `omega` there is not a
//! frequency in the ordinary sense but the pseudo-frequency of the two
//! oscillators in `(u, v)` space.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex scalar used throughout.
pub type Complex = Complex64;

/// Principal square root.
///
/// Returns `w` with `w^2 = z`, `Re(w) >= 0`, and `Im(w) >= 0` when
/// `Re(w) = 0`. Both zero signs of the imaginary part map to the upper edge
/// of the cut, so `sqrt(-1 - 0i) = i`. Off the cut the result is exactly
/// conjugate symmetric: `principal_sqrt(conj z) == conj(principal_sqrt z)`
/// bit for bit.
pub fn principal_sqrt(z: Complex) -> Complex {
    let (re, im) = (z.re, z.im);
    if re == 0.0 && im == 0.0 {
        return Complex::new(0.0, 0.0);
    }
    let modulus = re.hypot(im);
    let t = ((modulus + re.abs()) * 0.5).sqrt();
    if re >= 0.0 {
        Complex::new(t, im / (2.0 * t))
    } else {
        let w_re = im.abs() / (2.0 * t);
        // -0.0 >= 0.0 holds, so the lower zero maps to +i t.
        let w_im = if im >= 0.0 { t } else { -t };
        Complex::new(w_re, w_im)
    }
}

/// Unit handling for parameter construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitsConvention {
    /// hbar = m = 1.
    #[default]
    Natural,
    Explicit,
}

/// Mass, action and couplings of the potential
/// `V = -alpha/r + B hbar^2/(2 m r^2 sin^2 theta) + i C hbar^2 cos theta/(2 m r^2 sin^2 theta)`.
///
/// `beta` and `gamma` are always derived from `(B, C, m, hbar)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    m: f64,
    hbar: f64,
    alpha: f64,
    b: f64,
    c: f64,
}

impl PhysicalParams {
    pub fn new(m: f64, hbar: f64, alpha: f64, b: f64, c: f64) -> Result<Self> {
        for (name, v) in [("m", m), ("hbar", hbar), ("alpha", alpha), ("B", b), ("C", c)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        if m <= 0.0 {
            return Err(Error::InvalidParameter(format!("m must be positive, got {m}")));
        }
        if hbar <= 0.0 {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { m, hbar, alpha, b, c })
    }

    /// hbar = m = 1.
    pub fn natural(alpha: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(1.0, 1.0, alpha, b, c)
    }

    /// Construct under a units convention; `Natural` ignores `m` and `hbar`.
    pub fn with_units(units: UnitsConvention, m: f64, hbar: f64, alpha: f64, b: f64, c: f64) -> Result<Self> {
        match units {
            UnitsConvention::Natural => Self::natural(alpha, b, c),
            UnitsConvention::Explicit => Self::new(m, hbar, alpha, b, c),
        }
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `B hbar^2 / 2m`
    pub fn beta(&self) -> f64 {
        self.b * self.hbar * self.hbar / (2.0 * self.m)
    }

    /// `C hbar^2 / 2m`
    pub fn gamma(&self) -> f64 {
        self.c * self.hbar * self.hbar / (2.0 * self.m)
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.m, self.hbar, alpha, self.b, self.c)
    }

    pub fn with_couplings(&self, b: f64, c: f64) -> Result<Self> {
        Self::new(self.m, self.hbar, self.alpha, b, c)
    }

    /// Bound states need an attractive Coulomb term.
    pub(crate) fn require_attractive(&self) -> Result<()> {
        if self.alpha > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "alpha must be positive for bound states, got {}",
                self.alpha
            )))
        }
    }
}

/// `(n2, n~2, nu)` labelling a bound level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuantumNumbers {
    pub n2: u32,
    pub nt2: u32,
    pub nu: u32,
}

impl QuantumNumbers {
    pub fn new(n2: u32, nt2: u32, nu: u32) -> Self {
        Self { n2, nt2, nu }
    }

    /// `n2 + n~2`
    pub fn radial_sum(&self) -> u32 {
        self.n2 + self.nt2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sqrt_examples() {
        assert_eq!(principal_sqrt(Complex::new(4.0, 0.0)), Complex::new(2.0, 0.0));
        let w = principal_sqrt(Complex::new(0.0, 2.0));
        assert!((w - Complex::new(1.0, 1.0)).norm() < 1e-15);
        assert_eq!(principal_sqrt(Complex::new(-1.0, 0.0)), Complex::new(0.0, 1.0));
        assert_eq!(principal_sqrt(Complex::new(-1.0, -0.0)), Complex::new(0.0, 1.0));
        assert_eq!(principal_sqrt(Complex::new(0.0, 0.0)), Complex::new(0.0, 0.0));
    }

    #[test]
    fn sqrt_lower_half_plane() {
        let w = principal_sqrt(Complex::new(0.0, -2.0));
        assert!((w - Complex::new(1.0, -1.0)).norm() < 1e-15);
        let w = principal_sqrt(Complex::new(-4.0, -1e-300));
        assert!(w.re >= 0.0 && w.im < 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(PhysicalParams::new(0.0, 1.0, 1.0, 0.0, 0.0).is_err());
        assert!(PhysicalParams::new(1.0, -1.0, 1.0, 0.0, 0.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, f64::NAN, 0.0, 0.0).is_err());
        let p = PhysicalParams::new(2.0, 0.5, 1.0, 3.0, -4.0).unwrap();
        assert_eq!(p.beta(), 3.0 * 0.25 / 4.0);
        assert_eq!(p.gamma(), -4.0 * 0.25 / 4.0);
        assert!(p.with_alpha(-1.0).unwrap().require_attractive().is_err());
    }

    #[test]
    fn natural_units_force_unit_mass_and_action() {
        let p = PhysicalParams::with_units(UnitsConvention::Natural, 7.0, 3.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!((p.m(), p.hbar()), (1.0, 1.0));
        let p = PhysicalParams::with_units(UnitsConvention::Explicit, 7.0, 3.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!((p.m(), p.hbar()), (7.0, 3.0));
    }

    fn log_uniform() -> impl Strategy<Value = f64> {
        (-6.0f64..6.0).prop_map(|e| 10f64.powf(e))
    }

    proptest! {
        #[test]
        fn sqrt_conjugate_symmetric(re in -1e6f64..1e6, im in -1e6f64..1e6) {
            prop_assume!(im != 0.0);
            let z = Complex::new(re, im);
            let a = principal_sqrt(z.conj());
            let b = principal_sqrt(z).conj();
            prop_assert!((a - b).norm() <= 1e-15 * b.norm());
        }

        #[test]
        fn sqrt_squares_back(r in log_uniform(), arg in -std::f64::consts::PI..std::f64::consts::PI) {
            let z = Complex::from_polar(r, arg);
            let w = principal_sqrt(z);
            prop_assert!((w * w - z).norm() <= 1e-14 * r);
            prop_assert!(w.re >= 0.0);
        }
    }
}
