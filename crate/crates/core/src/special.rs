//! Special functions needed by the kernels and oracles.

use std::f64::consts::{LN_2, PI};

use crate::types::Complex;

/// `ln(sinh x)` for `x > 0`, finite for arbitrarily large `x`.
pub fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// `coth x` for `x > 0`.
pub fn coth(x: f64) -> f64 {
    1.0 / x.tanh()
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Gamma(z)` for `Re z >= 0.5` (Lanczos, g = 7).
///
/// The imaginary part is a continuous branch for `Re z >= 0.5`; only
/// `exp(ln_gamma(z))` is guaranteed to equal `Gamma(z)`.
pub fn ln_gamma(z: Complex) -> Complex {
    debug_assert!(z.re >= 0.5, "ln_gamma needs Re z >= 0.5, got {z}");
    let z = z - 1.0;
    let mut acc = Complex::new(LANCZOS[0], 0.0);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// `ln I_order(z)` for complex order with `Re(order) >= 0` and real `z > 0`,
/// with the argument supplied as `ln z` so that vanishing arguments stay
/// representable.
///
/// Power series below the crossover, large-argument expansion above it.
pub fn ln_bessel_i(order: Complex, ln_z: f64) -> Complex {
    ln_bessel_i_scaled(order, ln_z) + ln_z.exp()
}

/// `ln(e^{-z} I_order(z))`, free of the cancellation against a Gaussian
/// factor that a kernel with large `z` would otherwise suffer.
pub fn ln_bessel_i_scaled(order: Complex, ln_z: f64) -> Complex {
    let z = ln_z.exp();
    let crossover = 25.0f64.max(order.norm_sqr());
    if z <= crossover {
        ln_bessel_i_series(order, ln_z, z) - z
    } else {
        ln_bessel_i_asymptotic_scaled(order, z)
    }
}

fn ln_bessel_i_series(order: Complex, ln_z: f64, z: f64) -> Complex {
    let q = 0.25 * z * z;
    let mut term = Complex::new(1.0, 0.0);
    let mut sum = term;
    let mut k = 1u32;
    loop {
        term *= q / (k as f64 * (order + k as f64));
        sum += term;
        if term.norm() < 1e-17 * sum.norm() && k as f64 > 0.5 * z {
            break;
        }
        k += 1;
        if k > 10_000 {
            break;
        }
    }
    order * (ln_z - LN_2) - ln_gamma(order + 1.0) + sum.ln()
}

fn ln_bessel_i_asymptotic_scaled(order: Complex, z: f64) -> Complex {
    let mu = 4.0 * order * order;
    let mut term = Complex::new(1.0, 0.0);
    let mut sum = term;
    let mut last = f64::INFINITY;
    for k in 1..200u32 {
        let odd = (2 * k - 1) as f64;
        term *= -(mu - odd * odd) / (8.0 * k as f64 * z);
        let size = term.norm();
        if size > last {
            break;
        }
        sum += term;
        last = size;
        if size < 1e-17 * sum.norm() {
            break;
        }
    }
    Complex::new(-0.5 * (2.0 * PI * z).ln(), 0.0) + sum.ln()
}

/// Normalized Hermite functions `phi_0(x) .. phi_n_max(x)` of the
/// dimensionless oscillator, by upward recurrence of the normalized
/// functions themselves.
///
/// `phi_0` underflows for `|x| > ~38`, and then so does every entry.
pub fn hermite_functions(x: f64, n_max: usize) -> Vec<f64> {
    let mut phi = Vec::with_capacity(n_max + 1);
    phi.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if n_max >= 1 {
        phi.push(std::f64::consts::SQRT_2 * x * phi[0]);
    }
    for k in 2..=n_max {
        let kf = k as f64;
        let next = (2.0 / kf).sqrt() * x * phi[k - 1] - ((kf - 1.0) / kf).sqrt() * phi[k - 2];
        phi.push(next);
    }
    phi
}

#[cfg(test)]
#[allow(clippy::excessive_precision, clippy::needless_range_loop)]
mod tests {
    use super::*;

    fn close(a: Complex, b: Complex, rel: f64) -> bool {
        (a - b).norm() <= rel * b.norm()
    }

    #[test]
    fn ln_sinh_matches_direct_and_large() {
        for x in [1e-8f64, 0.3, 1.0, 5.0, 19.9, 20.1, 40.0] {
            let direct: f64 = x.sinh().ln();
            assert!((ln_sinh(x) - direct).abs() <= 1e-14 * direct.abs().max(1.0), "x={x}");
        }
        assert!((ln_sinh(1000.0) - (1000.0 - LN_2)).abs() < 1e-12);
    }

    // Reference values from an independent 30-digit evaluation.
    #[test]
    fn ln_gamma_reference() {
        let g = ln_gamma(Complex::new(2.0, 1.0)).exp();
        let want = Complex::new(-0.304_349_609_021_883_7, 0.483_757_842_929_915_1).exp();
        assert!(close(g, want, 1e-13));
        let g = ln_gamma(Complex::new(3.7, -2.2)).exp();
        let want = Complex::new(0.726_446_751_624_426_5, -2.718_064_292_441_145_7).exp();
        assert!(close(g, want, 1e-13));
        assert!((ln_gamma(Complex::new(5.0, 0.0)).re - 24f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn bessel_i_reference_values() {
        let cases = [
            (
                Complex::new(1.0, 1.0),
                0.01,
                Complex::new(0.005_945_346_247_178_137, 0.003_256_493_652_526_519),
            ),
            (
                Complex::new(1.0, 1.0),
                1.0,
                Complex::new(0.253_694_540_799_931_8, -0.704_384_197_747_726_1),
            ),
            (
                Complex::new(1.0, 1.0),
                7.5,
                Complex::new(265.212_752_139_241_04, -38.428_045_861_861_82),
            ),
            (
                Complex::new(1.0, 1.0),
                45.0,
                Complex::new(2.082_883_809_202_307_3e18, -4.682_132_968_378_468_7e16),
            ),
            (Complex::new(0.0, 0.0), 0.01, Complex::new(1.000_025_000_156_250_4, 0.0)),
            (Complex::new(0.0, 0.0), 7.5, Complex::new(268.161_311_515_189_36, 0.0)),
            (
                Complex::new(0.0, 0.0),
                45.0,
                Complex::new(2.083_414_075_177_314_8e18, 0.0),
            ),
            (
                Complex::new(2.5, -0.7),
                0.01,
                Complex::new(-1.287_401_894_663_121_7e-7, -5.618_104_820_501_717_7e-7),
            ),
            (
                Complex::new(2.5, -0.7),
                1.0,
                Complex::new(0.017_871_399_555_692_473, 0.059_061_892_672_463_5),
            ),
            (
                Complex::new(2.5, -0.7),
                7.5,
                Complex::new(172.452_429_539_005_66, 43.240_295_676_014_54),
            ),
            (
                Complex::new(2.5, -0.7),
                45.0,
                Complex::new(1.951_340_142_574_460_8e18, 7.675_073_586_448_929_6e16),
            ),
        ];
        for (order, z, want) in cases {
            let got = ln_bessel_i(order, f64::ln(z)).exp();
            assert!(close(got, want, 1e-12), "I_{order}({z}) = {got}, want {want}");
        }
    }

    #[test]
    fn bessel_recurrence_complex_order() {
        // I_{l-1}(z) - I_{l+1}(z) = (2 l / z) I_l(z)
        let l = Complex::new(1.4, 0.9);
        for z in [0.2, 3.0, 24.0, 26.0, 60.0] {
            let lz = f64::ln(z);
            let lhs = ln_bessel_i(l - 1.0, lz).exp() - ln_bessel_i(l + 1.0, lz).exp();
            let rhs = 2.0 * l / z * ln_bessel_i(l, lz).exp();
            assert!(close(lhs, rhs, 1e-11), "z={z}");
        }
    }

    #[test]
    fn bessel_tiny_argument_leading_power() {
        let l = Complex::new(1.0, 1.0);
        let ln_z = -200.0;
        let got = ln_bessel_i(l, ln_z);
        let want = l * (ln_z - LN_2) - ln_gamma(l + 1.0);
        assert!((got - want).norm() < 1e-13);
    }

    #[test]
    fn hermite_orthonormal_by_quadrature() {
        let n = 12;
        let h = 0.01;
        let mut gram = vec![vec![0.0; n + 1]; n + 1];
        let mut x = -12.0;
        while x <= 12.0 {
            let phi = hermite_functions(x, n);
            for i in 0..=n {
                for j in 0..=n {
                    gram[i][j] += h * phi[i] * phi[j];
                }
            }
            x += h;
        }
        for i in 0..=n {
            for j in 0..=n {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((gram[i][j] - want).abs() < 1e-10, "({i},{j}) {}", gram[i][j]);
            }
        }
    }
}
