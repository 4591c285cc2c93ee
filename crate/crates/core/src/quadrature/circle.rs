use crate::scalar::{cis, Real};
use num_complex::Complex;

/// Node angles θ_k = 2πk/(2M+1), k = -M..=M.
pub fn circle_nodes<T: Real>(m: usize) -> Vec<T> {
    let n = T::from_usize_lossy(2 * m + 1);
    let mf = m as i64;
    (-mf..=mf)
        .map(|k| T::lit(2.0) * T::PI() * T::from_i64(k).unwrap() / n)
        .collect()
}

/// Principal-value Cauchy integral (1/2πi) PV∮ Γ(t)/(t - e^{iθ}) dt from
/// 2M+1 equispaced samples Γ(e^{iθ_k}), by the trigonometric rule
///
///   (1/(2M+1)) Σ_k Γ_k [1/2 + i sin(Mx/2) sin((M+1)x/2) / sin(x/2)],  x = θ - θ_k.
///
/// The rule is exact for trigonometric polynomials of degree ≤ M.
pub fn cauchy_pv_circle<T: Real>(samples: &[Complex<T>], theta: T) -> Complex<T> {
    let n = samples.len();
    assert!(n % 2 == 1, "circle rule needs 2M+1 samples");
    let m = (n - 1) / 2;
    let mf = T::from_usize_lossy(m);
    let half = T::lit(0.5);
    let nodes = circle_nodes::<T>(m);
    let mut acc = Complex::new(T::zero(), T::zero());
    for (g, &th) in samples.iter().zip(&nodes) {
        let x = theta - th;
        let sx = (x * half).sin();
        let d = if sx.abs() < T::epsilon() * T::lit(16.0) {
            T::zero()
        } else {
            (mf * x * half).sin() * ((mf + T::one()) * x * half).sin() / sx
        };
        acc = acc + *g * Complex::new(half, d);
    }
    acc / T::from_usize_lossy(n)
}

/// Trigonometric interpolant of circle samples, kept as Fourier coefficients
/// c_n, n = -M..=M. Gives the same principal value as [`cauchy_pv_circle`]
/// in O(M) per point, plus the interior and exterior Cauchy integrals.
#[derive(Debug, Clone)]
pub struct CircleCauchy<T> {
    m: usize,
    coef: Vec<Complex<T>>,
}

impl<T: Real> CircleCauchy<T> {
    pub fn new(samples: &[Complex<T>]) -> Self {
        let n = samples.len();
        assert!(n % 2 == 1, "circle rule needs 2M+1 samples");
        let m = (n - 1) / 2;
        let nf = T::from_usize_lossy(n);
        let twiddle: Vec<Complex<T>> = (0..n)
            .map(|j| cis(-T::lit(2.0) * T::PI() * T::from_usize_lossy(j) / nf))
            .collect();
        let mut coef = vec![Complex::new(T::zero(), T::zero()); n];
        for (slot, nn) in coef.iter_mut().zip(-(m as i64)..=(m as i64)) {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (k, g) in samples.iter().enumerate() {
                let kk = k as i64 - m as i64;
                let idx = (nn * kk).rem_euclid(n as i64) as usize;
                acc = acc + *g * twiddle[idx];
            }
            *slot = acc / nf;
        }
        Self { m, coef }
    }

    pub fn order(&self) -> usize {
        self.m
    }

    fn c(&self, n: i64) -> Complex<T> {
        self.coef[(n + self.m as i64) as usize]
    }

    /// Σ_{n=1}^{M} c_{±n} w^n by Horner.
    fn horner(&self, w: Complex<T>, sign: i64) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for n in (1..=self.m as i64).rev() {
            acc = (acc + self.c(sign * n)) * w;
        }
        acc
    }

    pub fn principal_value(&self, theta: T) -> Complex<T> {
        let w = cis(theta);
        let pos = self.horner(w, 1);
        let neg = self.horner(w.conj(), -1);
        (self.c(0) + pos - neg) * T::lit(0.5)
    }

    /// Interpolated sample value Γ(e^{iθ}).
    pub fn value(&self, theta: T) -> Complex<T> {
        let w = cis(theta);
        self.c(0) + self.horner(w, 1) + self.horner(w.conj(), -1)
    }

    /// Cauchy integral at |z| < 1.
    pub fn interior(&self, z: Complex<T>) -> Complex<T> {
        self.c(0) + self.horner(z, 1)
    }

    /// Cauchy integral at |z| > 1.
    pub fn exterior(&self, z: Complex<T>) -> Complex<T> {
        -self.horner(z.inv(), -1)
    }

    /// Largest |c_n| among the top `tail` harmonics relative to the largest
    /// coefficient; a resolution indicator for the sampled density.
    pub fn tail_ratio(&self, tail: usize) -> T {
        let big = self.coef.iter().fold(T::zero(), |a, c| a.max(c.norm()));
        if big == T::zero() {
            return T::zero();
        }
        let m = self.m as i64;
        let start = (m - tail as i64 + 1).max(1);
        let mut t = T::zero();
        for n in start..=m {
            t = t.max(self.c(n).norm()).max(self.c(-n).norm());
        }
        t / big
    }
}
