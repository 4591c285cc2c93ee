//! Complex Gamma function by the Lanczos approximation (g = 607/128, 15 terms).

use crate::error::{Error, Result};
use crate::scalar::{i_unit, re, Real};
use num_complex::Complex;

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEF: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

fn is_pole<T: Real>(z: Complex<T>) -> bool {
    if z.re > T::lit(0.5) {
        return false;
    }
    let n = z.re.round();
    let tol = T::epsilon() * T::lit(16.0) * (T::one() + n.abs());
    (z.re - n).abs() <= tol && z.im.abs() <= tol
}

fn ln_gamma_right<T: Real>(z: Complex<T>) -> Complex<T> {
    let z = z - T::one();
    let mut a = re(T::lit(LANCZOS_COEF[0]));
    for (k, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a = a + re(T::lit(c)) / (z + T::from_usize_lossy(k));
    }
    let t = z + T::lit(LANCZOS_G + 0.5);
    let half_ln_2pi = T::lit(0.918_938_533_204_672_8);
    (z + T::lit(0.5)) * t.ln() - t + a.ln() + half_ln_2pi
}

/// ln sin(w), computed without overflow for large |Im w|. The branch is
/// arbitrary up to multiples of 2πi.
fn ln_sin<T: Real>(w: Complex<T>) -> Complex<T> {
    let i = i_unit::<T>();
    let half = T::lit(0.5);
    if w.im > T::one() {
        (i * half).ln() - i * w + (Complex::new(T::one(), T::zero()) - (i * w * T::lit(2.0)).exp()).ln()
    } else if w.im < -T::one() {
        (-i * half).ln() + i * w + (Complex::new(T::one(), T::zero()) - (-i * w * T::lit(2.0)).exp()).ln()
    } else {
        w.sin().ln()
    }
}

/// Complex log-Gamma. The imaginary part is determined only modulo 2π.
pub fn ln_gamma<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    if is_pole(z) {
        return Err(Error::Pole(format!("Gamma({:?})", z)));
    }
    if z.re >= T::lit(0.5) {
        return Ok(ln_gamma_right(z));
    }
    let pi = T::PI();
    let one = re(T::one());
    Ok(re(pi.ln()) - ln_sin(z * pi) - ln_gamma_right(one - z))
}

pub fn gamma<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    ln_gamma(z).map(|l| l.exp())
}

/// Γ(a)/Γ(b) through log-Gamma, safe for large arguments. Zero when only b
/// sits on a pole.
pub fn gamma_ratio<T: Real>(a: Complex<T>, b: Complex<T>) -> Result<Complex<T>> {
    if is_pole(b) && !is_pole(a) {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    Ok((ln_gamma(a)? - ln_gamma(b)?).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn ratio_with_pole_below() {
        assert_eq!(gamma_ratio(c(-4.5, 0.0), c(-5.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!(gamma_ratio(c(-5.0, 0.0), c(0.5, 0.0)).is_err());
        let near = gamma_ratio(c(-4.5, 0.0), c(-5.0 + 1e-9, 0.0)).unwrap();
        assert!(near.norm() < 1e-6);
    }

    #[test]
    fn integers_and_half() {
        let mut f = 1.0;
        for n in 1..20 {
            let g = gamma(c(n as f64, 0.0)).unwrap();
            assert!((g.re / f - 1.0).abs() < 1e-13, "n={n}");
            assert!(g.im.abs() < 1e-12 * f);
            f *= n as f64;
        }
        let g = gamma(c(0.5, 0.0)).unwrap();
        assert!((g.re - std::f64::consts::PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn reflection_region() {
        // Γ(-1/2) = -2√π
        let g = gamma(c(-0.5, 0.0)).unwrap();
        assert!((g.re + 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-13);
        // |Γ(iy)|² = π/(y sinh πy)
        for &y in &[0.3, 1.0, 2.5, 7.0] {
            let g = gamma(c(0.0, y)).unwrap();
            let want = std::f64::consts::PI / (y * (std::f64::consts::PI * y).sinh());
            assert!((g.norm_sqr() / want - 1.0).abs() < 1e-12, "y={y}");
        }
        // |Γ(1/2+iy)|² = π/cosh πy, far into the overflow range of sinh
        for &y in &[0.1, 3.0, 40.0, 300.0] {
            let l = ln_gamma(c(0.5, y)).unwrap();
            let py = std::f64::consts::PI * y;
            let want = std::f64::consts::PI.ln() - (py + (-2.0 * py).exp().ln_1p() - std::f64::consts::LN_2);
            assert!((2.0 * l.re - want).abs() < 1e-10 * want.abs().max(1.0), "y={y}");
        }
    }

    #[test]
    fn recurrence() {
        for &z in &[c(0.3, 0.7), c(-2.4, 1.1), c(5.0, -3.0), c(0.0, 12.0)] {
            let a = gamma(z + 1.0).unwrap();
            let b = z * gamma(z).unwrap();
            assert!((a - b).norm() < 1e-12 * a.norm(), "z={z}");
        }
    }

    #[test]
    fn poles_rejected() {
        for n in 0..5 {
            assert!(matches!(gamma(c(-(n as f64), 0.0)), Err(Error::Pole(_))));
        }
    }

    #[test]
    fn single_precision() {
        let g = gamma(Complex::<f32>::new(4.0, 0.0)).unwrap();
        assert!((g.re - 6.0).abs() < 1e-4);
    }
}
