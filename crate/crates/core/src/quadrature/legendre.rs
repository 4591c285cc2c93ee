use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;

/// Legendre polynomial P_n(x) and its derivative.
fn legendre_pair<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::from_usize_lossy(k);
        let p2 = ((kf + kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_usize_lossy(n);
    let dp = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}

/// Nodes (ascending) and weights of the n-point Gauss-Legendre rule on [-1, 1].
/// Weights are v_k = 2 / ((1 - x_k²) P_n'(x_k)²).
pub fn gauss_legendre<T: Real>(n: usize) -> Result<(Vec<T>, Vec<T>)> {
    if n == 0 {
        return Err(Error::input("Gauss-Legendre rule needs at least one node"));
    }
    let mut x = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let nf = T::from_usize_lossy(n);
    let quarter = T::lit(0.25);
    let half = T::lit(0.5);
    for i in 0..(n + 1) / 2 {
        let mut z = (T::PI() * (T::from_usize_lossy(i + 1) - quarter) / (nf + half)).cos();
        let mut dp = T::one();
        let mut converged = false;
        for _ in 0..100 {
            let (p, d) = legendre_pair(n, z);
            dp = d;
            let dz = p / d;
            z = z - dz;
            if dz.abs() <= T::epsilon() * T::lit(4.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::numerical(format!("Legendre root {i} of {n} did not converge")));
        }
        let (_, d) = legendre_pair(n, z);
        dp = if d.is_finite() { d } else { dp };
        let wi = T::lit(2.0) / ((T::one() - z * z) * dp * dp);
        x[n - 1 - i] = z;
        x[i] = -z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    Ok((x, w))
}

/// A fixed Gauss-Legendre rule that can be reused on many intervals.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(n: usize) -> Result<Self> {
        let (nodes, weights) = gauss_legendre(n)?;
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto [a, b].
    pub fn mapped(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let h = (b - a) * T::lit(0.5);
        let c = (b + a) * T::lit(0.5);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (c + h * x, h * w))
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        self.mapped(a, b).fold(T::zero(), |acc, (x, w)| acc + w * f(x))
    }

    pub fn integrate_complex<F: FnMut(T) -> Complex<T>>(&self, a: T, b: T, mut f: F) -> Complex<T> {
        self.mapped(a, b)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (x, w)| acc + f(x) * w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1usize, 2, 5, 8, 16, 32, 64] {
            let (_, w) = gauss_legendre::<f64>(n).unwrap();
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} sum={s}");
        }
    }

    #[test]
    fn exact_for_polynomials() {
        let rule = GaussLegendre::<f64>::new(6).unwrap();
        for deg in 0..12 {
            let got = rule.integrate(-1.0, 1.0, |x| x.powi(deg));
            let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((got - want).abs() < 1e-14, "deg={deg}");
        }
    }

    #[test]
    fn three_point_known() {
        let (x, w) = gauss_legendre::<f64>(3).unwrap();
        assert!((x[2] - (0.6f64).sqrt()).abs() < 1e-15);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-15);
    }
}
