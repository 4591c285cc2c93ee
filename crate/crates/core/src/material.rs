//! Elastic material, crack configuration, wave speeds, and the branch
//! functions α(p, s), β(p, s).

use crate::error::{Error, Result};
use crate::scalar::{i_unit, Real};
use num_complex::Complex;

/// Plane-strain wave speeds (c_l, c_s) from shear modulus, Poisson ratio and density.
pub fn derive_speeds<T: Real>(mu: T, nu: T, rho: T) -> Result<(T, T)> {
    if !(mu > T::zero()) || !(rho > T::zero()) {
        return Err(Error::domain("shear modulus and density must be positive"));
    }
    if !(nu > T::zero() && nu < T::lit(0.5)) {
        return Err(Error::domain("Poisson ratio must lie in (0, 0.5)"));
    }
    let two = T::lit(2.0);
    let lambda = two * mu * nu / (T::one() - two * nu);
    Ok((((lambda + two * mu) / rho).sqrt(), (mu / rho).sqrt()))
}

/// c_s/c_l in plane strain.
pub fn shear_to_longitudinal<T: Real>(nu: T) -> T {
    let two = T::lit(2.0);
    ((T::one() - two * nu) / (two * (T::one() - nu))).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material<T> {
    pub mu: T,
    pub nu: T,
    pub rho: T,
    pub c_l: T,
    pub c_s: T,
    pub c_r: T,
}

impl<T: Real> Material<T> {
    pub fn new(mu: T, nu: T, rho: T) -> Result<Self> {
        let (c_l, c_s) = derive_speeds(mu, nu, rho)?;
        let mut m = Self { mu, nu, rho, c_l, c_s, c_r: T::zero() };
        m.c_r = rayleigh_speed(&m)?;
        Ok(m)
    }

    /// Unit-density material with prescribed longitudinal speed.
    pub fn from_longitudinal_speed(c_l: T, nu: T) -> Result<Self> {
        if !(c_l > T::zero()) {
            return Err(Error::domain("longitudinal speed must be positive"));
        }
        if !(nu > T::zero() && nu < T::lit(0.5)) {
            return Err(Error::domain("Poisson ratio must lie in (0, 0.5)"));
        }
        let c_s = c_l * shear_to_longitudinal(nu);
        Self::new(c_s * c_s, nu, T::one())
    }
}

/// R₀(V) = 4α̂β̂ − (1+β̂²)².
pub fn rayleigh_function<T: Real>(v: T, m: &Material<T>) -> Result<T> {
    if v < T::zero() || v >= m.c_s {
        return Err(Error::domain("rayleigh function needs 0 <= V < c_s"));
    }
    let vl = v / m.c_l;
    let vs = v / m.c_s;
    let ah = (T::one() - vl * vl).sqrt();
    let bh = (T::one() - vs * vs).sqrt();
    let q = T::one() + bh * bh;
    Ok(T::lit(4.0) * ah * bh - q * q)
}

/// Root of R₀ in (0, c_s) by bisection, starting from [c_s/2, c_s(1-1e-9)]
/// and moving the left end down until the sign changes.
pub fn rayleigh_speed<T: Real>(m: &Material<T>) -> Result<T> {
    let mut hi = m.c_s * (T::one() - T::lit(1e-9));
    let mut lo = m.c_s * T::lit(0.5);
    let f_hi = rayleigh_function(hi, m)?;
    let mut f_lo = rayleigh_function(lo, m)?;
    let mut expansions = 0;
    while f_lo.signum() == f_hi.signum() {
        hi = lo;
        lo = lo * T::lit(0.5);
        f_lo = rayleigh_function(lo, m)?;
        expansions += 1;
        if expansions > 60 {
            return Err(Error::numerical("no sign change of the Rayleigh function"));
        }
    }
    let tol = T::lit(1e-14).max(T::epsilon() * T::lit(4.0));
    for _ in 0..400 {
        let mid = (lo + hi) * T::lit(0.5);
        if hi - lo <= tol * hi || mid <= lo || mid >= hi {
            break;
        }
        let f_mid = rayleigh_function(mid, m)?;
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * T::lit(0.5))
}

/// Crack running at speed V at distance δ below the free edge. δ may be
/// infinite, which selects the whole-plane problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrackSetup<T> {
    pub material: Material<T>,
    pub speed: T,
    pub depth: T,
}

impl<T: Real> CrackSetup<T> {
    pub fn new(material: Material<T>, speed: T, depth: T) -> Result<Self> {
        if !(speed > T::zero() && speed < material.c_r) {
            return Err(Error::domain("crack speed must satisfy 0 < V < c_R"));
        }
        if !(depth > T::zero()) {
            return Err(Error::domain("depth must be positive"));
        }
        Ok(Self { material, speed, depth })
    }

    pub fn is_plane(&self) -> bool {
        self.depth.is_infinite()
    }

    pub fn v_l(&self) -> T {
        self.speed / self.material.c_l
    }

    pub fn v_s(&self) -> T {
        self.speed / self.material.c_s
    }

    pub fn alpha_hat(&self) -> T {
        let v = self.v_l();
        (T::one() - v * v).sqrt()
    }

    pub fn beta_hat(&self) -> T {
        let v = self.v_s();
        (T::one() - v * v).sqrt()
    }

    pub fn r0(&self) -> T {
        let ah = self.alpha_hat();
        let bh = self.beta_hat();
        let q = T::one() + bh * bh;
        T::lit(4.0) * ah * bh - q * q
    }

    /// γ₁ = R₀/(2β̂v_s²), γ₂ = R₀/(2α̂v_s²).
    pub fn gamma(&self) -> [T; 2] {
        let vs2 = self.v_s() * self.v_s();
        let r0 = self.r0();
        let two = T::lit(2.0);
        [r0 / (two * self.beta_hat() * vs2), r0 / (two * self.alpha_hat() * vs2)]
    }

    /// Small-p constants of the scaled plane coefficients, p·g̃_j → −γ°_j.
    pub fn gamma_zero(&self) -> [T; 2] {
        let k = self.material.c_l / self.material.c_s;
        [k / T::lit(2.0), k * k / T::lit(2.0)]
    }
}

/// Fracture mode. Mode I is driven by normal crack-face loads (σ₂₂) and is
/// carried by the second scalar problem, mode II by shear loads (σ₁₂) and
/// the first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    I,
    II,
}

impl Mode {
    pub const BOTH: [Mode; 2] = [Mode::I, Mode::II];

    /// Index j ∈ {1, 2} of the scalar problem carrying this mode.
    pub fn index(self) -> usize {
        match self {
            Mode::I => 2,
            Mode::II => 1,
        }
    }

    pub fn from_index(j: usize) -> Option<Self> {
        match j {
            1 => Some(Mode::II),
            2 => Some(Mode::I),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Mode::I => "I",
            Mode::II => "II",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoints<T> {
    pub a_plus: Complex<T>,
    pub a_minus: Complex<T>,
    pub b_plus: Complex<T>,
    pub b_minus: Complex<T>,
}

/// a± = is/(V ± c_l), b± = is/(V ± c_s).
pub fn branch_points<T: Real>(s: Complex<T>, setup: &CrackSetup<T>) -> BranchPoints<T> {
    let i = i_unit::<T>();
    let v = setup.speed;
    let m = &setup.material;
    BranchPoints {
        a_plus: i * s / (v + m.c_l),
        a_minus: i * s / (v - m.c_l),
        b_plus: i * s / (v + m.c_s),
        b_minus: i * s / (v - m.c_s),
    }
}

/// α² and β² at real p.
pub fn alpha_beta_squared<T: Real>(p: T, s: Complex<T>, setup: &CrackSetup<T>) -> (Complex<T>, Complex<T>) {
    let i = i_unit::<T>();
    let m = &setup.material;
    let two = T::lit(2.0);
    let ah = setup.alpha_hat();
    let bh = setup.beta_hat();
    let a2 = i * s * (two * p * setup.v_l() / m.c_l) + s * s / (m.c_l * m.c_l) + ah * ah * p * p;
    let b2 = i * s * (two * p * setup.v_s() / m.c_s) + s * s / (m.c_s * m.c_s) + bh * bh * p * p;
    (a2, b2)
}

/// Branch functions on the real p-axis: principal roots with Re ≥ 0.
pub fn alpha_beta<T: Real>(p: T, s: Complex<T>, setup: &CrackSetup<T>) -> (Complex<T>, Complex<T>) {
    let (a2, b2) = alpha_beta_squared(p, s, setup);
    (a2.sqrt(), b2.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn steel_like() -> Material<f64> {
        Material::from_longitudinal_speed(1.0, 0.3).unwrap()
    }

    #[test]
    fn speeds() {
        let m = steel_like();
        assert!((m.c_s - 0.534_522_483_824_848_8).abs() < 1e-14);
        assert!((m.c_r - 0.495_722_945_121_147).abs() < 1e-12);
        let m2 = Material::from_longitudinal_speed(2.0, 0.3).unwrap();
        assert!((m2.c_r - 2.0 * m.c_r).abs() < 1e-12);
        let q = Material::<f64>::from_longitudinal_speed(1.0, 0.25).unwrap();
        assert!((q.c_r / q.c_s - 0.919_401_4).abs() < 1e-6);
    }

    #[test]
    fn speeds_from_moduli() {
        let (cl, cs) = derive_speeds(80e9, 0.25, 7800.0).unwrap();
        assert!((cs / cl - (1.0f64 / 3.0).sqrt()).abs() < 1e-14);
        assert!(derive_speeds(1.0, 0.5, 1.0).is_err());
        assert!(derive_speeds(-1.0, 0.2, 1.0).is_err());
    }

    #[test]
    fn rayleigh_values() {
        let m = steel_like();
        assert_eq!(rayleigh_function(0.0, &m).unwrap(), 0.0);
        assert!(rayleigh_function(m.c_r, &m).unwrap().abs() < 1e-10);
        assert!(rayleigh_function(0.25, &m).unwrap() > 0.0);
        assert!(rayleigh_function(m.c_s, &m).is_err());
    }

    #[test]
    fn setup_validation() {
        let m = steel_like();
        assert!(CrackSetup::new(m, m.c_r, 1.0).is_err());
        assert!(CrackSetup::new(m, 0.2, 0.0).is_err());
        let s = CrackSetup::new(m, 0.5 * m.c_r, f64::INFINITY).unwrap();
        assert!(s.is_plane());
        let [g1, g2] = s.gamma();
        assert!(g1 > 0.0 && g2 > 0.0);
    }

    #[test]
    fn branch_point_values() {
        let m = steel_like();
        let setup = CrackSetup::new(m, 0.5 * m.c_r, 1.0).unwrap();
        let bp = branch_points(Complex::new(1.0, 0.0), &setup);
        let want = Complex::new(0.0, 1.0 / (setup.speed + m.c_s));
        assert!((bp.b_plus - want).norm() < 1e-15);
        assert!(bp.a_plus.im > 0.0 && bp.a_minus.im < 0.0);
    }

    #[test]
    fn alpha_at_zero() {
        let m = steel_like();
        let setup = CrackSetup::new(m, 0.5 * m.c_r, 1.0).unwrap();
        let s = Complex::new(0.7, 2.0);
        let (a, b) = alpha_beta(0.0, s, &setup);
        assert!((a - s / m.c_l).norm() < 1e-14);
        assert!((b - s / m.c_s).norm() < 1e-14);
    }
}
