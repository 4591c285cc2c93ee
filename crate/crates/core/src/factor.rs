//! Scalar Wiener-Hopf factorization g = Ω⁺/Ω⁻ of a symbol on the real line.
//!
//! The line is mapped onto the unit circle by τ' = (L + iτ)/(L − iτ), so
//! τ = L tan(θ/2). With Γ(τ') = ln g(τ)/(1 + τ'), the Cauchy integral of
//! ln g over the line becomes (1 + z') times the circle Cauchy integral of Γ.

use crate::error::{Error, Result};
use crate::quadrature::{circle_nodes, CircleCauchy};
use crate::scalar::{i_unit, re, Real};
use num_complex::Complex;

#[derive(Debug, Clone)]
pub struct LineFactor<T> {
    scale: T,
    theta: Vec<T>,
    phase: Vec<T>,
    cauchy: CircleCauchy<T>,
}

impl<T: Real> LineFactor<T> {
    /// Samples the symbol at the 2M+1 circle nodes. Fails if the symbol
    /// vanishes, is not finite, or has nonzero winding along the line.
    pub fn new<F: FnMut(T) -> Complex<T>>(mut symbol: F, scale: T, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::input("circle factorization needs M >= 2"));
        }
        let theta = circle_nodes::<T>(m);
        let half = T::lit(0.5);
        let values: Vec<Complex<T>> = theta.iter().map(|&th| symbol(scale * (th * half).tan())).collect();
        if values.iter().any(|v| !(v.norm() > T::zero()) || !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Factorization("symbol vanishes or is not finite on the line".into()));
        }
        let two_pi = T::lit(2.0) * T::PI();
        let mut phase = Vec::with_capacity(values.len());
        let mut prev = values[0].arg();
        prev = prev - two_pi * (prev / two_pi).round();
        phase.push(prev);
        for v in &values[1..] {
            let a = v.arg();
            let mut d = a - prev;
            d = d - two_pi * (d / two_pi).round();
            prev = prev + d;
            phase.push(prev);
        }
        let first = phase[0];
        let last = *phase.last().unwrap();
        if (last - first).abs() > T::PI() {
            let w = ((last - first) / two_pi).round();
            return Err(Error::Factorization(format!("symbol has winding number {:?}", w)));
        }
        let gamma: Vec<Complex<T>> = values
            .iter()
            .zip(&phase)
            .zip(&theta)
            .map(|((v, &ph), &th)| {
                let tp = Complex::new(th.cos(), th.sin());
                Complex::new(v.norm().ln(), ph) / (tp + T::one())
            })
            .collect();
        Ok(Self { scale, theta, phase, cauchy: CircleCauchy::new(&gamma) })
    }

    pub fn order(&self) -> usize {
        self.cauchy.order()
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    /// Total argument increment of the symbol along the line, in turns.
    pub fn winding(&self) -> T {
        (*self.phase.last().unwrap() - self.phase[0]) / (T::lit(2.0) * T::PI())
    }

    /// Relative size of the highest harmonics of the sampled log-symbol.
    pub fn resolution(&self) -> T {
        self.cauchy.tail_ratio(self.order() / 10 + 1)
    }

    fn angle(&self, p: T) -> T {
        T::lit(2.0) * (p / self.scale).atan()
    }

    fn phase_at(&self, th: T) -> T {
        let n = self.theta.len();
        if th <= self.theta[0] {
            return self.phase[0];
        }
        if th >= self.theta[n - 1] {
            return self.phase[n - 1];
        }
        let step = self.theta[1] - self.theta[0];
        let k = ((th - self.theta[0]) / step).floor().to_usize().unwrap_or(0).min(n - 2);
        let w = (th - self.theta[k]) / step;
        self.phase[k] * (T::one() - w) + self.phase[k + 1] * w
    }

    /// ln g(p) on the branch continuous along the line, given g(p).
    pub fn log_symbol(&self, p: T, g: Complex<T>) -> Complex<T> {
        let l = g.ln();
        let target = self.phase_at(self.angle(p));
        let two_pi = T::lit(2.0) * T::PI();
        let n = ((target - l.im) / two_pi).round();
        Complex::new(l.re, l.im + n * two_pi)
    }

    fn map(&self, z: Complex<T>) -> Complex<T> {
        let i = i_unit::<T>();
        let l = re(self.scale);
        (l + i * z) / (l - i * z)
    }

    /// Principal value (1/2πi) PV∫ ln g(τ)/(τ − p) dτ at real p.
    pub fn principal_value(&self, p: T) -> Complex<T> {
        let th = self.angle(p);
        let tp = Complex::new(th.cos(), th.sin());
        (tp + T::one()) * self.cauchy.principal_value(th)
    }

    /// Boundary values (Ω⁺(p), Ω⁻(p)) at real p, given g(p).
    pub fn boundary(&self, p: T, g: Complex<T>) -> (Complex<T>, Complex<T>) {
        let half = self.log_symbol(p, g) * T::lit(0.5);
        let pv = self.principal_value(p);
        ((half + pv).exp(), (pv - half).exp())
    }

    /// ln Ω⁺(z) for Im z > 0.
    pub fn log_upper(&self, z: Complex<T>) -> Complex<T> {
        let zp = self.map(z);
        (zp + T::one()) * self.cauchy.interior(zp)
    }

    /// Ω⁺(z) for Im z > 0.
    pub fn upper(&self, z: Complex<T>) -> Complex<T> {
        self.log_upper(z).exp()
    }

    /// Ω⁻(z) for Im z < 0.
    pub fn lower(&self, z: Complex<T>) -> Complex<T> {
        let zp = self.map(z);
        ((zp + T::one()) * self.cauchy.exterior(zp)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rational(p: f64) -> Complex<f64> {
        Complex::new((p * p + 4.0) / (p * p + 1.0), 0.0)
    }

    #[test]
    fn rational_symbol() {
        let f = LineFactor::new(rational, 1.0, 200).unwrap();
        let i = Complex::new(0.0, 1.0);
        for &p in &[-7.0, -1.0, 0.0, 0.3, 2.5, 40.0] {
            let (plus, minus) = f.boundary(p, rational(p));
            let want_plus = (i * 2.0 + p) / (i + p);
            let want_minus = (p - i) / (p - i * 2.0);
            assert!((plus - want_plus).norm() < 1e-10, "p={p}");
            assert!((minus - want_minus).norm() < 1e-10, "p={p}");
        }
        let z = Complex::new(0.5, 3.0);
        assert!((f.upper(z) - (z + i * 2.0) / (z + i)).norm() < 1e-12);
        let z = Complex::new(-0.5, -3.0);
        assert!((f.lower(z) - (z - i) / (z - i * 2.0)).norm() < 1e-12);
    }

    #[test]
    fn unit_symbol() {
        let f = LineFactor::new(|_| Complex::new(1.0, 0.0), 1.0, 10).unwrap();
        let (a, b) = f.boundary(0.7, Complex::new(1.0, 0.0));
        assert!((a - 1.0).norm() < 1e-15 && (b - 1.0).norm() < 1e-15);
    }

    #[test]
    fn winding_detected() {
        let i = Complex::new(0.0, 1.0);
        let r = LineFactor::new(|p: f64| (i + p) / (p - i), 1.0, 50);
        assert!(matches!(r, Err(Error::Factorization(_))));
    }
}
