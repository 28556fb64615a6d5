//! Spherical, cylindrical, parabolic and oscillator representations of a
//! point, and the potential evaluated in each.
//!
//! The chain is
//!
//! ```text
//! (r, theta, phi) -> (rho = r sin theta, z = r cos theta, phi)
//!                 -> (xi = (r - z)/2, eta = (r + z)/2, phi)
//!                 -> u = 2 sqrt(xi), v = 2 sqrt(eta)
//!                 -> u_vec = u (cos phi1, sin phi1), v_vec = v (cos phi2, sin phi2)
//! ```
//!
//! The oscillator representation carries two angles for one physical
//! azimuth. A [`PointBundle`] fixes `phi1 = phi2 = phi`; the difference is a
//! gauge direction and the way back to physical space reads `phi1`.
//!
//! The axis `theta in {0, pi}` (`rho = 0`, `xi eta = 0`) is where the ring
//! terms blow up; every constructor rejects it with [`Error::Domain`].

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Complex, PhysicalParams};

fn normalize_angle(phi: f64) -> f64 {
    let a = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if a >= TAU {
        0.0
    } else {
        a
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalPoint {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SphericalPoint {
    pub fn new(r: f64, theta: f64, phi: f64) -> Result<Self> {
        require(r.is_finite() && r > 0.0, || format!("r must be positive, got {r}"))?;
        require(theta > 0.0 && theta < PI, || {
            format!("theta must lie in (0, pi), got {theta}")
        })?;
        require(phi.is_finite(), || format!("phi must be finite, got {phi}"))?;
        Ok(Self {
            r,
            theta,
            phi: normalize_angle(phi),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylindricalPoint {
    pub rho: f64,
    pub z: f64,
    pub phi: f64,
}

impl CylindricalPoint {
    pub fn new(rho: f64, z: f64, phi: f64) -> Result<Self> {
        require(rho.is_finite() && rho > 0.0, || {
            format!("rho must be positive, got {rho}")
        })?;
        require(z.is_finite() && phi.is_finite(), || "z and phi must be finite".into())?;
        Ok(Self {
            rho,
            z,
            phi: normalize_angle(phi),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParabolicPoint {
    pub xi: f64,
    pub eta: f64,
    pub phi: f64,
}

impl ParabolicPoint {
    pub fn new(xi: f64, eta: f64, phi: f64) -> Result<Self> {
        require(xi.is_finite() && xi > 0.0, || format!("xi must be positive, got {xi}"))?;
        require(eta.is_finite() && eta > 0.0, || {
            format!("eta must be positive, got {eta}")
        })?;
        require(phi.is_finite(), || format!("phi must be finite, got {phi}"))?;
        Ok(Self {
            xi,
            eta,
            phi: normalize_angle(phi),
        })
    }
}

/// A point of the four-dimensional `(u_vec, v_vec)` space. Components have
/// dimension length^(1/2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorPoint {
    pub u: [f64; 2],
    pub v: [f64; 2],
}

impl OscillatorPoint {
    pub fn new(u: [f64; 2], v: [f64; 2]) -> Self {
        Self { u, v }
    }

    pub fn u_sq(&self) -> f64 {
        self.u[0] * self.u[0] + self.u[1] * self.u[1]
    }

    pub fn v_sq(&self) -> f64 {
        self.v[0] * self.v[0] + self.v[1] * self.v[1]
    }

    pub fn u_norm(&self) -> f64 {
        self.u[0].hypot(self.u[1])
    }

    pub fn v_norm(&self) -> f64 {
        self.v[0].hypot(self.v[1])
    }

    /// `(phi1, phi2)` in `[0, 2 pi)`.
    pub fn angles(&self) -> (f64, f64) {
        (
            normalize_angle(self.u[1].atan2(self.u[0])),
            normalize_angle(self.v[1].atan2(self.v[0])),
        )
    }

    /// The four Cartesian components `(u1, u2, v1, v2)`.
    pub fn components(&self) -> [f64; 4] {
        [self.u[0], self.u[1], self.v[0], self.v[1]]
    }

    pub fn dot(&self, other: &OscillatorPoint) -> f64 {
        self.components()
            .iter()
            .zip(other.components())
            .map(|(a, b)| a * b)
            .sum()
    }
}

/// One physical point in every representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointBundle {
    pub spherical: SphericalPoint,
    pub cylindrical: CylindricalPoint,
    pub parabolic: ParabolicPoint,
    pub oscillator: OscillatorPoint,
    pub phi1: f64,
    pub phi2: f64,
}

impl PointBundle {
    pub fn from_spherical(p: SphericalPoint) -> Result<Self> {
        let cylindrical = spherical_to_cylindrical(p)?;
        let parabolic = cylindrical_to_parabolic(cylindrical)?;
        let oscillator = parabolic_to_uv(parabolic, p.phi, p.phi)?;
        Ok(Self {
            spherical: p,
            cylindrical,
            parabolic,
            oscillator,
            phi1: p.phi,
            phi2: p.phi,
        })
    }
}

pub fn spherical_to_cylindrical(p: SphericalPoint) -> Result<CylindricalPoint> {
    let (s, c) = p.theta.sin_cos();
    CylindricalPoint::new(p.r * s, p.r * c, p.phi)
}

pub fn cylindrical_to_spherical(p: CylindricalPoint) -> Result<SphericalPoint> {
    SphericalPoint::new(p.rho.hypot(p.z), p.rho.atan2(p.z), p.phi)
}

pub fn cylindrical_to_parabolic(p: CylindricalPoint) -> Result<ParabolicPoint> {
    require(p.rho > 0.0, || format!("rho must be positive, got {}", p.rho))?;
    let r = p.rho.hypot(p.z);
    // r - |z| cancels near the axis; xi * eta = rho^2 / 4 recovers the small one.
    let big = 0.5 * (r + p.z.abs());
    let small = 0.25 * p.rho * p.rho / big;
    let (xi, eta) = if p.z >= 0.0 { (small, big) } else { (big, small) };
    ParabolicPoint::new(xi, eta, p.phi)
}

pub fn parabolic_to_cylindrical(p: ParabolicPoint) -> Result<CylindricalPoint> {
    CylindricalPoint::new(2.0 * (p.xi * p.eta).sqrt(), p.eta - p.xi, p.phi)
}

/// `u = 2 sqrt(xi)`, `v = 2 sqrt(eta)`, spread over the two angles.
pub fn parabolic_to_uv(p: ParabolicPoint, phi1: f64, phi2: f64) -> Result<OscillatorPoint> {
    require(p.xi > 0.0 && p.eta > 0.0, || "xi and eta must be positive".into())?;
    let u = 2.0 * p.xi.sqrt();
    let v = 2.0 * p.eta.sqrt();
    let (s1, c1) = phi1.sin_cos();
    let (s2, c2) = phi2.sin_cos();
    Ok(OscillatorPoint {
        u: [u * c1, u * s1],
        v: [v * c2, v * s2],
    })
}

/// Back to parabolic coordinates, reading the physical azimuth from `phi1`.
pub fn uv_to_parabolic(p: OscillatorPoint) -> Result<ParabolicPoint> {
    let (phi1, _) = p.angles();
    ParabolicPoint::new(0.25 * p.u_sq(), 0.25 * p.v_sq(), phi1)
}

/// Parity image `theta -> pi - theta`. The azimuth shift by `2 pi` is the
/// identity on normalized angles and is not applied.
///
/// Close to the axis the reflected angle is not representable: `pi - theta`
/// near `pi` is rounded to a spacing of `4.4e-16`, so the potential at the
/// image carries a relative error of order `1e-16 / min(theta, pi - theta)`.
/// [`pt_conjugate_cylindrical`] and [`pt_conjugate_parabolic`] are exact.
pub fn pt_conjugate(p: SphericalPoint) -> SphericalPoint {
    SphericalPoint {
        theta: PI - p.theta,
        ..p
    }
}

/// Parity image `z -> -z`.
pub fn pt_conjugate_cylindrical(p: CylindricalPoint) -> CylindricalPoint {
    CylindricalPoint { z: -p.z, ..p }
}

/// Parity image `xi <-> eta`.
pub fn pt_conjugate_parabolic(p: ParabolicPoint) -> ParabolicPoint {
    ParabolicPoint {
        xi: p.eta,
        eta: p.xi,
        ..p
    }
}

pub fn potential_spherical(params: &PhysicalParams, p: SphericalPoint) -> Result<Complex> {
    require(p.r > 0.0 && p.theta > 0.0 && p.theta < PI, || {
        "point on the singular axis".into()
    })?;
    let (s, c) = p.theta.sin_cos();
    let ring = params.hbar() * params.hbar() / (2.0 * params.m() * p.r * p.r * s * s);
    Ok(Complex::new(
        -params.alpha() / p.r + params.b() * ring,
        params.c() * c * ring,
    ))
}

pub fn potential_cylindrical(params: &PhysicalParams, p: CylindricalPoint) -> Result<Complex> {
    require(p.rho > 0.0, || format!("rho must be positive, got {}", p.rho))?;
    let r = p.rho.hypot(p.z);
    let rho_sq = p.rho * p.rho;
    Ok(Complex::new(
        -params.alpha() / r + params.beta() / rho_sq,
        params.gamma() * p.z / (rho_sq * r),
    ))
}

pub fn potential_parabolic(params: &PhysicalParams, p: ParabolicPoint) -> Result<Complex> {
    require(p.xi > 0.0 && p.eta > 0.0, || "xi * eta must be positive".into())?;
    let (xi, eta) = (p.xi, p.eta);
    let sum = xi + eta;
    Ok(Complex::new(
        -params.alpha() / sum + params.beta() / (4.0 * xi * eta),
        params.gamma() * (eta - xi) / (4.0 * eta * xi * sum),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn spherical_to_cylindrical_examples() {
        let c = spherical_to_cylindrical(SphericalPoint::new(1.0, PI / 2.0, 0.0).unwrap()).unwrap();
        assert!(close(c.rho, 1.0, 1e-15) && c.z.abs() < 1e-15 && c.phi == 0.0);
        let c = spherical_to_cylindrical(SphericalPoint::new(2.0, PI / 4.0, 1.0).unwrap()).unwrap();
        let root2 = 2f64.sqrt();
        assert!(close(c.rho, root2, 1e-15) && close(c.z, root2, 1e-15) && c.phi == 1.0);
    }

    #[test]
    fn axis_is_rejected() {
        assert!(SphericalPoint::new(1.0, 0.0, 0.0).is_err());
        assert!(SphericalPoint::new(1.0, PI, 0.0).is_err());
        assert!(CylindricalPoint::new(0.0, 1.0, 0.0).is_err());
        assert!(ParabolicPoint::new(0.0, 1.0, 0.0).is_err());
        let on_axis = CylindricalPoint {
            rho: 0.0,
            z: 1.0,
            phi: 0.0,
        };
        assert!(matches!(cylindrical_to_parabolic(on_axis), Err(Error::Domain(_))));
        assert!(potential_cylindrical(&PhysicalParams::natural(1.0, 0.0, 0.0).unwrap(), on_axis).is_err());
    }

    #[test]
    fn cylindrical_to_parabolic_examples() {
        let p = cylindrical_to_parabolic(CylindricalPoint::new(2.0, 0.0, 0.0).unwrap()).unwrap();
        assert!(close(p.xi, 1.0, 1e-15) && close(p.eta, 1.0, 1e-15));
        let p = cylindrical_to_parabolic(CylindricalPoint::new(3.0, 4.0, 0.0).unwrap()).unwrap();
        assert!(close(p.xi, 0.5, 1e-15) && close(p.eta, 4.5, 1e-15));
        // approaching the axis from above sends xi to zero
        let p = cylindrical_to_parabolic(CylindricalPoint::new(1e-9, 1.0, 0.0).unwrap()).unwrap();
        assert!(p.xi < 1e-17 && p.xi > 0.0);
    }

    #[test]
    fn parabolic_to_uv_examples() {
        let o = parabolic_to_uv(ParabolicPoint::new(1.0, 1.0, 0.0).unwrap(), 0.0, 0.0).unwrap();
        assert_eq!(o.u, [2.0, 0.0]);
        assert_eq!(o.v, [2.0, 0.0]);
        let o = parabolic_to_uv(ParabolicPoint::new(0.25, 1.0, 0.0).unwrap(), PI / 2.0, 0.0).unwrap();
        assert!(o.u[0].abs() < 1e-16 && close(o.u[1], 1.0, 1e-15));
        assert_eq!(o.v, [2.0, 0.0]);
        let p = ParabolicPoint::new(0.7, 1.9, 0.0).unwrap();
        let o = parabolic_to_uv(p, 0.3, 2.1).unwrap();
        assert!(close(o.u_sq() + o.v_sq(), 4.0 * (0.7 + 1.9), 1e-14));
    }

    #[test]
    fn potential_examples() {
        let p = PhysicalParams::natural(1.0, 1.0, 5.0).unwrap();
        let v = potential_spherical(&p, SphericalPoint::new(1.0, PI / 2.0, 0.0).unwrap()).unwrap();
        assert!(close(v.re, -0.5, 1e-15) && v.im.abs() < 1e-15);

        let zero = PhysicalParams::natural(0.0, 0.0, 0.0).unwrap();
        let v = potential_spherical(&zero, SphericalPoint::new(0.3, 1.0, 2.0).unwrap()).unwrap();
        assert_eq!(v, Complex::new(0.0, 0.0));

        let p = PhysicalParams::natural(1.0, 0.0, 2.0).unwrap();
        let v = potential_spherical(&p, SphericalPoint::new(1.0, PI / 3.0, 0.0).unwrap()).unwrap();
        assert!(close(v.re, -1.0, 1e-15) && close(v.im, 2.0 / 3.0, 1e-15));

        // beta = gamma = 1 with hbar = m = 1 means B = C = 2
        let p = PhysicalParams::natural(1.0, 2.0, 2.0).unwrap();
        let v = potential_parabolic(&p, ParabolicPoint::new(1.0, 2.0, 0.0).unwrap()).unwrap();
        assert!(close(v.re, -1.0 / 3.0 + 1.0 / 8.0, 1e-15) && close(v.im, 1.0 / 24.0, 1e-15));

        let v = potential_parabolic(&p, ParabolicPoint::new(1.3, 1.3, 0.0).unwrap()).unwrap();
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn pt_conjugate_examples() {
        let p = SphericalPoint::new(1.0, PI / 2.0, 0.4).unwrap();
        assert_eq!(pt_conjugate(p).theta, PI / 2.0);
        let p = SphericalPoint::new(1.0, PI / 3.0, 0.4).unwrap();
        assert!(close(pt_conjugate(p).theta, 2.0 * PI / 3.0, 1e-15));
        let back = pt_conjugate(pt_conjugate(p));
        assert!(close(back.theta, p.theta, 1e-15) && back.r == p.r && back.phi == p.phi);
    }

    #[test]
    fn bundle_fixes_both_angles() {
        let b = PointBundle::from_spherical(SphericalPoint::new(1.0, PI / 2.0, 0.0).unwrap()).unwrap();
        assert!(close(b.parabolic.xi, 0.5, 1e-15) && close(b.parabolic.eta, 0.5, 1e-15));
        assert!(close(b.oscillator.u_norm(), 2f64.sqrt(), 1e-15));
        assert!(close(b.oscillator.v_norm(), 2f64.sqrt(), 1e-15));
        assert_eq!(b.phi1, b.phi2);
    }

    fn point() -> impl Strategy<Value = SphericalPoint> {
        (0.01f64..50.0, 1e-3f64..(PI - 1e-3), 0.0f64..TAU).prop_map(|(r, t, p)| SphericalPoint::new(r, t, p).unwrap())
    }

    fn couplings() -> impl Strategy<Value = PhysicalParams> {
        (-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0, 0.2f64..3.0, 0.2f64..3.0)
            .prop_map(|(a, b, c, m, h)| PhysicalParams::new(m, h, a, b, c).unwrap())
    }

    proptest! {
        #[test]
        fn chain_identities_and_round_trip(p in point()) {
            let b = PointBundle::from_spherical(p).unwrap();
            let (cyl, par) = (b.cylindrical, b.parabolic);
            prop_assert!(close(par.xi + par.eta, p.r, 1e-13));
            prop_assert!(close(4.0 * par.xi * par.eta, cyl.rho * cyl.rho, 1e-13));
            prop_assert!(close(b.oscillator.u_sq() + b.oscillator.v_sq(), 4.0 * p.r, 1e-13));

            let par2 = uv_to_parabolic(b.oscillator).unwrap();
            let cyl2 = parabolic_to_cylindrical(par2).unwrap();
            let sph2 = cylindrical_to_spherical(cyl2).unwrap();
            prop_assert!(close(par2.xi, par.xi, 1e-12) && close(par2.eta, par.eta, 1e-12));
            prop_assert!(close(sph2.r, p.r, 1e-12));
            prop_assert!(close(sph2.theta, p.theta, 1e-12));
            let dphi = (sph2.phi - p.phi).abs();
            prop_assert!(dphi.min(TAU - dphi) < 1e-12);
        }

        #[test]
        fn pt_symmetry_of_potential(p in point(), params in couplings()) {
            let v = potential_spherical(&params, p).unwrap();
            let w = potential_spherical(&params, pt_conjugate(p)).unwrap();
            let rounding = 2.0 * f64::EPSILON * PI / p.theta.min(PI - p.theta);
            prop_assert!((w - v.conj()).norm() <= (1e-13 + rounding) * v.norm().max(1.0));
        }

        #[test]
        fn pt_symmetry_exact_in_cylindrical_and_parabolic(p in point(), params in couplings()) {
            let b = PointBundle::from_spherical(p).unwrap();
            let v = potential_cylindrical(&params, b.cylindrical).unwrap();
            let w = potential_cylindrical(&params, pt_conjugate_cylindrical(b.cylindrical)).unwrap();
            prop_assert_eq!(w, v.conj());
            let v = potential_parabolic(&params, b.parabolic).unwrap();
            let w = potential_parabolic(&params, pt_conjugate_parabolic(b.parabolic)).unwrap();
            prop_assert_eq!(w, v.conj());
        }

        #[test]
        fn representations_agree(p in point(), params in couplings()) {
            let b = PointBundle::from_spherical(p).unwrap();
            let vs = potential_spherical(&params, p).unwrap();
            let vc = potential_cylindrical(&params, b.cylindrical).unwrap();
            let vp = potential_parabolic(&params, b.parabolic).unwrap();
            prop_assert!((vc - vs).norm() <= 1e-12 * vs.norm().max(1.0));
            prop_assert!((vp - vs).norm() <= 1e-12 * vs.norm().max(1.0));
        }

        #[test]
        fn hermitian_limit(p in point(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let params = PhysicalParams::natural(a, b, 0.0).unwrap();
            prop_assert_eq!(potential_spherical(&params, p).unwrap().im, 0.0);
        }
    }
}
