//! Exact treatment of the PT-symmetric ring-shaped Coulomb problem
//!
//! ```text
//! V(r, theta) = -alpha / r + B hbar^2 / (2 m r^2 sin^2 theta) + i C hbar^2 cos theta / (2 m r^2 sin^2 theta)
//! ```
//!
//! In parabolic coordinates, and after the square-root change of variables
//! `xi = u^2 / 4`, `eta = v^2 / 4`, the problem becomes two isotropic 2D
//! oscillators in pseudo-time whose azimuthal momenta are complex
//! conjugates. The crate provides:
//!
//! * [`coords`]: the coordinate chain spherical, cylindrical, parabolic,
//!   `(u_vec, v_vec)` and the potential in each chart;
//! * [`spectrum`]: the closed-form bound spectrum and a PT-phase classifier;
//! * [`propagator`]: the exact pseudo-time kernels, real-time and Euclidean;
//! * [`greens`]: the Green's function as a pseudo-time integral, and pole
//!   detection against the spectrum;
//! * [`oracle`]: independent checks by radial shooting and spectral sums.
//!
//! Sweeps over parameter grids run on rayon when the `parallel` feature is
//! enabled (the default); see [`Execution`].

pub mod coords;
pub mod error;
pub mod exec;
pub mod greens;
pub mod oracle;
pub mod propagator;
pub mod quadrature;
pub mod special;
pub mod spectrum;
pub mod types;

pub use coords::{CylindricalPoint, OscillatorPoint, ParabolicPoint, PointBundle, SphericalPoint};
pub use error::{Error, Result};
pub use exec::{with_thread_cap, Execution};
pub use greens::{GreensQuadrature, GreensRequest, GreensValue, PoleScanResult};
pub use propagator::{KernelRequest, KernelValue, Oscillator, Representation};
pub use spectrum::{Phase, PhaseGrid, PhaseReport, SpectrumEntry, SpectrumTable};
pub use types::{principal_sqrt, Complex, PhysicalParams, QuantumNumbers, UnitsConvention};
