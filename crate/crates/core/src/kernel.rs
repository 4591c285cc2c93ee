//! Half-plane matrix symbol G(p, s), its diagonal split, the scalar
//! factorization of the diagonal and the off-diagonal symbols of the
//! partially factorized problem.
//!
//! All hyperbolic functions of δ are expanded into decaying exponentials so
//! that nothing overflows for large δ|p|. The coth split uses coth(πp/κ)
//! with κ = |s|/c_l, which keeps the symbol features at p = O(κ).

use crate::error::{Error, Result};
use crate::factor::LineFactor;
use crate::material::CrackSetup;
use crate::plane::tanhc;
use num_complex::Complex;

type C64 = Complex<f64>;

/// One evaluation of the matrix symbol at real p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSample {
    pub p: f64,
    pub s: C64,
    pub alpha: C64,
    pub beta: C64,
    pub r1: C64,
    pub r2: C64,
    /// e^{-2(α+β)δ}·Δ, with Δ from the sinh² form.
    pub delta_scaled: C64,
    /// p·g11 and p·g22, finite at p = 0.
    pub pg11: C64,
    pub pg22: C64,
    pub g12: C64,
}

impl SpectralSample {
    pub fn g11(&self) -> Result<C64> {
        if self.p == 0.0 {
            return Err(Error::Pole("g11 at p = 0".into()));
        }
        Ok(self.pg11 / self.p)
    }

    pub fn g22(&self) -> Result<C64> {
        if self.p == 0.0 {
            return Err(Error::Pole("g22 at p = 0".into()));
        }
        Ok(self.pg22 / self.p)
    }
}

/// Matrix entries g11, g12, g22 at real p and Re s > 0.
pub fn matrix_entries(p: f64, s: C64, setup: &CrackSetup<f64>) -> SpectralSample {
    let (alpha, beta) = crate::material::alpha_beta(p, s, setup);
    let b2 = beta * beta;
    let p2 = C64::new(p * p, 0.0);
    let d = setup.depth;
    let (ea, eb, eab) = if d.is_infinite() {
        (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0))
    } else {
        ((-alpha * (2.0 * d)).exp(), (-beta * (2.0 * d)).exp(), (-(alpha + beta) * d).exp())
    };
    let one = C64::new(1.0, 0.0);
    let s1 = (one - ea * eb) * 0.5;
    let s2 = (eb - ea) * 0.5;
    let c1 = (one - eab * 2.0 + ea * eb) * 0.25;
    let c2 = (eb - eab * 2.0 + ea) * 0.25;
    let q = p2 + b2;
    let ab4 = alpha * beta * (4.0 * p * p);
    let r1 = q * q - ab4;
    let r2 = q * q + ab4;
    let delta_scaled = r1 * r1 * c1 - r2 * r2 * c2;
    let pm = p2 - b2;
    let br11 = r1 * s1 - r2 * s2 + delta_scaled * 2.0 / r1;
    let br22 = r1 * s1 + r2 * s2 + delta_scaled * 2.0 / r1;
    SpectralSample {
        p,
        s,
        alpha,
        beta,
        r1,
        r2,
        delta_scaled,
        pg11: br11 / (beta * pm * 2.0),
        pg22: br22 / (alpha * pm * 2.0),
        g12: r2 * q * 4.0 / (r1 * pm) * c2,
    }
}

/// κ = |s|/c_l.
pub fn spectral_scale(s: C64, setup: &CrackSetup<f64>) -> f64 {
    s.norm() / setup.material.c_l
}

/// (ǧ11, ǧ22) = g_jj/(−γ_j coth(πp/κ)), continuous at p = 0.
pub fn split_diagonal(p: f64, s: C64, setup: &CrackSetup<f64>) -> (C64, C64) {
    split_from_sample(&matrix_entries(p, s, setup), setup)
}

fn split_from_sample(e: &SpectralSample, setup: &CrackSetup<f64>) -> (C64, C64) {
    let [g1, g2] = setup.gamma();
    let tc = tanhc(e.p, spectral_scale(e.s, setup));
    (-e.pg11 * (tc / g1), -e.pg22 * (tc / g2))
}

/// Scalar factorizations ǧ_jj = Ω_jj⁺/Ω_jj⁻ at a fixed s.
#[derive(Debug, Clone)]
pub struct DiagonalFactor {
    s: C64,
    kappa: f64,
    setup: CrackSetup<f64>,
    factors: [LineFactor<f64>; 2],
}

impl DiagonalFactor {
    pub fn new(s: C64, setup: &CrackSetup<f64>, m: usize) -> Result<Self> {
        if !(s.re > 0.0) {
            return Err(Error::domain("factorization needs Re s > 0"));
        }
        let kappa = spectral_scale(s, setup);
        let f1 = LineFactor::new(|p| split_diagonal(p, s, setup).0, kappa, m)?;
        let f2 = LineFactor::new(|p| split_diagonal(p, s, setup).1, kappa, m)?;
        Ok(Self { s, kappa, setup: *setup, factors: [f1, f2] })
    }

    /// Starts at `m` and doubles the node count until boundary values on a
    /// probe grid move by less than `tol`, up to `max_m`. Returns the factor
    /// and whether the tolerance was met.
    pub fn refined(s: C64, setup: &CrackSetup<f64>, m: usize, tol: f64, max_m: usize) -> Result<(Self, bool)> {
        let mut cur = Self::new(s, setup, m)?;
        let probe: Vec<f64> = (-20..=20).map(|k| cur.kappa * f64::from(k) / 4.0).collect();
        loop {
            let next_m = cur.order() * 2;
            if next_m > max_m {
                return Ok((cur, false));
            }
            let next = Self::new(s, setup, next_m)?;
            let mut change: f64 = 0.0;
            for &p in &probe {
                for j in 1..=2 {
                    let a = cur.boundary(j, p).0;
                    let b = next.boundary(j, p).0;
                    change = change.max((a - b).norm() / b.norm());
                }
            }
            cur = next;
            if change < tol {
                return Ok((cur, true));
            }
        }
    }

    pub fn s(&self) -> C64 {
        self.s
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn order(&self) -> usize {
        self.factors[0].order()
    }

    pub fn setup(&self) -> &CrackSetup<f64> {
        &self.setup
    }

    pub fn winding(&self, j: usize) -> f64 {
        self.factors[j - 1].winding()
    }

    /// ǧ_jj at real p.
    pub fn symbol(&self, j: usize, p: f64) -> C64 {
        let (a, b) = split_diagonal(p, self.s, &self.setup);
        if j == 1 {
            a
        } else {
            b
        }
    }

    /// (Ω_jj⁺(p), Ω_jj⁻(p)) at real p.
    pub fn boundary(&self, j: usize, p: f64) -> (C64, C64) {
        self.factors[j - 1].boundary(p, self.symbol(j, p))
    }

    /// Both boundary pairs from one symbol evaluation.
    pub fn boundary_both(&self, p: f64) -> [(C64, C64); 2] {
        let e = matrix_entries(p, self.s, &self.setup);
        let (a, b) = split_from_sample(&e, &self.setup);
        [self.factors[0].boundary(p, a), self.factors[1].boundary(p, b)]
    }

    /// Ω_jj⁺(z), Im z > 0.
    pub fn upper(&self, j: usize, z: C64) -> C64 {
        self.factors[j - 1].upper(z)
    }

    /// Ω_jj⁻(z), Im z < 0.
    pub fn lower(&self, j: usize, z: C64) -> C64 {
        self.factors[j - 1].lower(z)
    }
}

/// Off-diagonal symbols
/// ǧ₁ = −i g12 Ω22⁻ tanh(πp/κ)/Ω11⁺ and ǧ₂ = i g12 Ω11⁻ tanh(πp/κ)/Ω22⁺.
pub fn off_diagonal_symbols(p: f64, factors: &DiagonalFactor) -> (C64, C64) {
    let e = matrix_entries(p, factors.s, &factors.setup);
    if factors.setup.is_plane() {
        return (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    }
    let (a, b) = split_from_sample(&e, &factors.setup);
    let (o11p, o11m) = factors.factors[0].boundary(p, a);
    let (o22p, o22m) = factors.factors[1].boundary(p, b);
    let t = (std::f64::consts::PI * p / factors.kappa).tanh();
    let i = C64::new(0.0, 1.0);
    (-i * e.g12 * o22m * t / o11p, i * e.g12 * o11m * t / o22p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::Material;

    fn setup(depth: f64) -> CrackSetup<f64> {
        let m = Material::from_longitudinal_speed(1.0, 0.3).unwrap();
        CrackSetup::new(m, 0.5 * m.c_r, depth).unwrap()
    }

    #[test]
    fn plane_limit_of_entries() {
        let s = C64::new(1.0, 0.0);
        let a = matrix_entries(1.3, s, &setup(f64::INFINITY));
        let want = a.r1 / (a.beta * (a.beta * a.beta - 1.69) * -2.0);
        assert!((a.pg11 - want).norm() < 1e-13);
        assert_eq!(a.g12, C64::new(0.0, 0.0));
        let b = matrix_entries(1.3, s, &setup(40.0));
        assert!((b.pg11 - a.pg11).norm() < 1e-12);
    }

    #[test]
    fn overflow_safe() {
        let st = setup(1.0);
        let bh = st.beta_hat();
        let p = 700.0 / bh;
        let e = matrix_entries(p, C64::new(0.5, 1.0), &st);
        for v in [e.pg11, e.pg22, e.g12] {
            assert!(v.re.is_finite() && v.im.is_finite());
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let st = setup(1.0);
        let s = C64::new(0.5, 1.0);
        for &p in &[0.3, 1.7, 5.0] {
            let a = matrix_entries(p, s, &st);
            let b = matrix_entries(-p, s.conj(), &st);
            assert!((a.pg11 - b.pg11.conj()).norm() < 1e-12 * a.pg11.norm());
            assert!((a.g11().unwrap() + b.g11().unwrap().conj()).norm() < 1e-12 * a.pg11.norm() / p);
            assert!((a.g12 - b.g12.conj()).norm() < 1e-12 * a.g12.norm().max(1e-300));
        }
    }

    #[test]
    fn split_limits() {
        let st = setup(1.0);
        let s = C64::new(1.0, 0.0);
        let (a, b) = split_diagonal(0.0, s, &st);
        assert!(a.norm() > 0.0 && b.norm() > 0.0 && a.re.is_finite());
        let (a, b) = split_diagonal(1e6, s, &st);
        assert!((a - 1.0).norm() < 1e-4 && (b - 1.0).norm() < 1e-4);
    }

    #[test]
    fn factorization_identity() {
        let st = setup(1.0);
        let f = DiagonalFactor::new(C64::new(0.5, 1.0), &st, 400).unwrap();
        for k in 0..100 {
            let p = -30.0 + 0.6 * f64::from(k) + 0.013;
            for j in 1..=2 {
                let (plus, minus) = f.boundary(j, p);
                let g = f.symbol(j, p);
                assert!((plus / minus - g).norm() < 1e-6 * g.norm(), "p={p} j={j}");
            }
        }
    }

    #[test]
    fn off_diagonal_vanish_at_origin() {
        let st = setup(1.0);
        let f = DiagonalFactor::new(C64::new(1.0, 0.0), &st, 200).unwrap();
        let (a, b) = off_diagonal_symbols(0.0, &f);
        assert_eq!(a.norm(), 0.0);
        assert_eq!(b.norm(), 0.0);
    }
}
