//! Complex Gamma function via argument shifting, a Stirling tail and the
//! reflection formula.

use num_complex::Complex64;

use crate::error::{Error, Result};

const LN_2PI_HALF: f64 = 0.918_938_533_204_672_74; // ln(2*pi)/2

/// Stirling coefficients B_{2n} / (2n (2n-1)).
const STIRLING: [f64; 12] = [
    8.333_333_333_333_333_3e-2,   // 1/12
    -2.777_777_777_777_777_8e-3,  // -1/360
    7.936_507_936_507_936_5e-4,   // 1/1260
    -5.952_380_952_380_952_4e-4,  // -1/1680
    8.417_508_417_508_417_5e-4,   // 1/1188
    -1.917_526_917_526_917_5e-3,  // -691/360360
    6.410_256_410_256_410_3e-3,   // 1/156
    -2.955_065_359_477_124_2e-2,  // -3617/122400
    1.796_443_723_688_305_7e-1,   // 43867/244188
    -1.392_432_216_905_901_1e0,   // -174611/125400
    1.340_286_404_416_839_2e1,    // 854513/63756
    -1.568_482_846_260_020_2e2,   // -236364091/1506960
];

/// True when `z` sits exactly on a pole of Gamma (a nonpositive integer).
pub fn is_gamma_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Log-Gamma for `Re z >= 10`-ish arguments by the Stirling series.
fn ln_gamma_stirling(z: Complex64) -> Complex64 {
    let zln = z.ln();
    let mut sum = (z - 0.5) * zln - z + LN_2PI_HALF;
    let z2 = z * z;
    let mut zp = z;
    for &c in STIRLING.iter() {
        sum += c / zp;
        zp *= z2;
    }
    sum
}

/// ln(sin(pi z)) computed without overflow for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    if z.im >= 0.0 {
        // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z})
        let small = (2.0 * std::f64::consts::PI * i * z).exp();
        (i / 2.0).ln() - i * std::f64::consts::PI * z + (Complex64::new(1.0, 0.0) - small).ln()
    } else {
        ln_sin_pi(z.conj()).conj()
    }
}

/// Log-Gamma on the complex plane minus the poles.
///
/// The imaginary part is consistent (`exp` of the result is Gamma) but is not
/// reduced to the principal sheet away from the positive real axis.
pub fn ln_gamma_complex(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::invalid("ln_gamma: non-finite argument"));
    }
    if is_gamma_pole(z) {
        return Err(Error::GammaPole { re: z.re, im: z.im });
    }
    if z.re < 0.5 {
        // Reflection: ln Gamma(z) = ln pi - ln sin(pi z) - ln Gamma(1 - z).
        let refl = std::f64::consts::PI.ln() - ln_sin_pi(z) - ln_gamma_complex(Complex64::new(1.0, 0.0) - z)?;
        return Ok(refl);
    }
    // Shift until the Stirling tail is accurate.
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < 10.0 {
        shift += w.ln();
        w += 1.0;
    }
    Ok(ln_gamma_stirling(w) - shift)
}

/// Complex Gamma function.
///
/// Relative accuracy is ~1e-13 for `|z| <= 50`, `|Im z| <= 50`. Poles of
/// Gamma (nonpositive integers) are reported as a domain error.
pub fn gamma_complex(z: Complex64) -> Result<Complex64> {
    Ok(ln_gamma_complex(z)?.exp())
}

/// 1 / Gamma(z), entire: returns exactly 0 at the poles of Gamma.
pub fn recip_gamma_complex(z: Complex64) -> Complex64 {
    if is_gamma_pole(z) {
        return Complex64::new(0.0, 0.0);
    }
    (-ln_gamma_complex(z).expect("recip_gamma: non-finite argument")).exp()
}

/// Gamma on the real line (poles excluded), for real-parameter prefactors.
pub fn gamma_real(x: f64) -> f64 {
    gamma_complex(Complex64::new(x, 0.0))
        .expect("gamma_real: pole")
        .re
}
