//! Second-kind integral equations on x < 0 for the partially factorized
//! problem, mapped onto (−1, 1) and solved by Nyström collocation at
//! Gauss-Legendre nodes. The endpoint x = 0 is reached by the natural
//! extension of the discrete equations.

use crate::error::{Error, Result};
use crate::kernel::{off_diagonal_symbols, DiagonalFactor};
use crate::laplace::exponential_moment;
use crate::plane::coth_factors;
use crate::quadrature::gauss_legendre;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use std::f64::consts::PI;

type C64 = Complex<f64>;

/// Crack-face loading. Abscissae are measured from the initial tip in the
/// direction of growth; loads sit at x0 ≥ 0.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadSpec {
    /// Unit normal (σ22) point force at x0.
    NormalPoint { x0: f64 },
    /// Unit shear (σ12) point force at x0.
    ShearPoint { x0: f64 },
    /// Piecewise-linear tractions on a grid.
    Tabulated(TabulatedLoad),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedLoad {
    pub x: Vec<f64>,
    pub sigma12: Vec<f64>,
    pub sigma22: Vec<f64>,
}

impl TabulatedLoad {
    pub fn new(x: Vec<f64>, sigma12: Vec<f64>, sigma22: Vec<f64>) -> Result<Self> {
        if x.len() < 2 || sigma12.len() != x.len() || sigma22.len() != x.len() {
            return Err(Error::input("tabulated load needs matching tables of at least two points"));
        }
        if !(x[0] >= 0.0) || x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::input("tabulated load abscissae must be increasing and start at x >= 0"));
        }
        if sigma12.iter().chain(&sigma22).any(|v| !v.is_finite()) {
            return Err(Error::input("tabulated load has non-finite samples"));
        }
        Ok(Self { x, sigma12, sigma22 })
    }
}

impl LoadSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            LoadSpec::NormalPoint { x0 } | LoadSpec::ShearPoint { x0 } if !(*x0 >= 0.0) => {
                Err(Error::input("point load must sit at x0 >= 0"))
            }
            _ => Ok(()),
        }
    }

    /// [A₁, A₂] with A_j = ∫ σ_j(x0) e^{−s x0/V} dx0 (j = 1 shear, 2 normal).
    pub fn amplitudes(&self, s: C64, speed: f64) -> Result<[C64; 2]> {
        let zero = C64::new(0.0, 0.0);
        match self {
            LoadSpec::NormalPoint { x0 } => Ok([zero, (-s * (*x0 / speed)).exp()]),
            LoadSpec::ShearPoint { x0 } => Ok([(-s * (*x0 / speed)).exp(), zero]),
            LoadSpec::Tabulated(t) => {
                let lam = s / speed;
                Ok([exponential_moment(&t.x, &t.sigma12, lam)?, exponential_moment(&t.x, &t.sigma22, lam)?])
            }
        }
    }
}

/// Laplace-domain SIFs and the endpoint values χ_j*(0⁻, s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SifTransformRecord {
    pub s: C64,
    pub k_i: C64,
    pub k_ii: C64,
    pub chi1: C64,
    pub chi2: C64,
}

/// 1/(V K⁺(is/(Vκ)) Ω_jj⁺(is/V)) for j = 1, 2: the x0 = 0 point-load
/// right-hand side at x = 0.
pub fn rhs_scale(factors: &DiagonalFactor) -> Result<[C64; 2]> {
    let setup = factors.setup();
    let v = setup.speed;
    let s = factors.s();
    let i = C64::new(0.0, 1.0);
    let z = i * s / v;
    let (kp, _) = coth_factors(z / factors.kappa())?;
    Ok([1.0 / (kp * factors.upper(1, z) * v), 1.0 / (kp * factors.upper(2, z) * v)])
}

/// q_j*(x, s) for x ≤ 0. Every load reduces to a superposition of point
/// loads, each contributing e^{s(x − x0)/V}.
pub fn rhs_qstar(j: usize, x: f64, load: &LoadSpec, factors: &DiagonalFactor) -> Result<C64> {
    if !(j == 1 || j == 2) {
        return Err(Error::input("right-hand side index must be 1 or 2"));
    }
    load.validate()?;
    let v = factors.setup().speed;
    let s = factors.s();
    let amp = load.amplitudes(s, v)?[j - 1];
    Ok(amp * rhs_scale(factors)?[j - 1] * (s * (x / v)).exp())
}

/// Trapezoid samples of ǧ₁, ǧ₂ on a symmetric p grid, for Fourier
/// inversion with k_j*(x) = (1/2π)∫ ǧ_j e^{−ipx} dp.
#[derive(Debug, Clone)]
pub struct KstarGrid {
    pub p: Vec<f64>,
    pub h: f64,
    pub symbols: [Vec<C64>; 2],
}

impl KstarGrid {
    /// Truncation at P = 16/(β̂δ) where e^{−2β̂δP} is negligible; spacing
    /// resolves both the symbol (≤ 0.02) and oscillations up to |x| ≤ xmax.
    pub fn new(factors: &DiagonalFactor, xmax: f64) -> Self {
        let setup = factors.setup();
        let pmax = 16.0 / (setup.beta_hat() * setup.depth);
        let h0 = (2.0 * PI / (2.0 * xmax.abs() + 20.0)).min(0.02);
        Self::with_spacing(factors, pmax, h0)
    }

    pub fn with_spacing(factors: &DiagonalFactor, pmax: f64, h0: f64) -> Self {
        let n = (pmax / h0).ceil() as usize;
        let h = pmax / n as f64;
        let p: Vec<f64> = (0..=2 * n).map(|k| -pmax + h * k as f64).collect();
        let mut g1 = Vec::with_capacity(p.len());
        let mut g2 = Vec::with_capacity(p.len());
        for &q in &p {
            let (a, b) = off_diagonal_symbols(q, factors);
            g1.push(a);
            g2.push(b);
        }
        Self { p, h, symbols: [g1, g2] }
    }

    pub fn eval(&self, j: usize, x: f64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (q, g) in self.p.iter().zip(&self.symbols[j - 1]) {
            acc += g * C64::new(0.0, -q * x).exp();
        }
        acc * (self.h / (2.0 * PI))
    }
}

/// k_j*(x, s) with a spacing-halving check on the trapezoid sum.
pub fn kernel_kstar(j: usize, x: f64, factors: &DiagonalFactor) -> Result<C64> {
    if !(j == 1 || j == 2) {
        return Err(Error::input("kernel index must be 1 or 2"));
    }
    if factors.setup().is_plane() {
        return Ok(C64::new(0.0, 0.0));
    }
    let coarse = KstarGrid::new(factors, x);
    let fine = KstarGrid::with_spacing(factors, *coarse.p.last().unwrap(), coarse.h / 2.0);
    let a = coarse.eval(j, x);
    let b = fine.eval(j, x);
    let scale = b.norm().max(1e-8 * fine.symbols[j - 1].iter().map(|g| g.norm()).fold(0.0, f64::max));
    if (a - b).norm() > 1e-6 * scale.max(1e-300) {
        return Err(Error::numerical(format!("kernel quadrature did not settle at x = {x}")));
    }
    Ok(b)
}

/// Default L of the node map; the kernels decay over several units of x.
pub const NODE_SCALE: f64 = 4.0;

/// max_j ∫|k_j*(x)|dx / γ_j, a bound on the off-diagonal operator norm
/// relative to the diagonal; below 1 the continuous system is dominant.
pub fn kernel_dominance(factors: &DiagonalFactor) -> f64 {
    let setup = factors.setup();
    if setup.is_plane() {
        return 0.0;
    }
    let xmax = 60.0 * setup.depth.max(1.0 / factors.kappa());
    let grid = KstarGrid::new(factors, xmax);
    let n = 6000;
    let h = 2.0 * xmax / n as f64;
    let gamma = setup.gamma();
    (1..=2)
        .map(|j| {
            let sum: f64 = (0..=n).map(|k| grid.eval(j, -xmax + h * k as f64).norm()).sum();
            sum * h / gamma[j - 1]
        })
        .fold(0.0, f64::max)
}

/// Collocation matrices for one s; reusable across loads.
#[derive(Debug, Clone)]
pub struct KernelTable {
    s: C64,
    n: usize,
    kappa: f64,
    speed: f64,
    gamma: [f64; 2],
    /// Legendre nodes x'_k and weights v_k.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Physical abscissae x_k = L(x'_k − 1)/(x'_k + 1) followed by 0.
    pub x: Vec<f64>,
    /// v_k·K_j(x_n, x_k) for rows n = 0..=N (row N is the endpoint).
    pub k1: DMatrix<C64>,
    pub k2: DMatrix<C64>,
    lu: nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
    rhs_scale: [C64; 2],
}

impl KernelTable {
    pub fn new(factors: &DiagonalFactor, n: usize) -> Result<Self> {
        Self::with_scale(factors, n, NODE_SCALE)
    }

    /// Nodes x_k = L(x'_k − 1)/(x'_k + 1).
    pub fn with_scale(factors: &DiagonalFactor, n: usize, scale: f64) -> Result<Self> {
        if n < 8 {
            return Err(Error::input("collocation needs N >= 8"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::input("node map scale must be positive"));
        }
        let setup = factors.setup();
        let (nodes, weights) = gauss_legendre::<f64>(n)?;
        let mut x: Vec<f64> = nodes.iter().map(|&t| scale * (t - 1.0) / (t + 1.0)).collect();
        x.push(0.0);
        let gamma = setup.gamma();
        let zero = C64::new(0.0, 0.0);
        let (k1, k2) = if setup.is_plane() {
            (DMatrix::from_element(n + 1, n, zero), DMatrix::from_element(n + 1, n, zero))
        } else {
            let xmax = x.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            let grid = KstarGrid::new(factors, xmax);
            let np = grid.p.len();
            let e1 = DMatrix::from_fn(n + 1, np, |r, c| C64::new(0.0, -x[r] * grid.p[c]).exp());
            let e2 = DMatrix::from_fn(np, n, |r, c| C64::new(0.0, grid.p[r] * x[c]).exp());
            let dp = grid.h / (2.0 * PI);
            let build = |sym: &Vec<C64>| {
                let mut e1s = e1.clone();
                for (c, g) in sym.iter().enumerate() {
                    let f = g * dp;
                    e1s.column_mut(c).iter_mut().for_each(|v| *v *= f);
                }
                let mut k = e1s * &e2;
                for c in 0..n {
                    let w = weights[c] * 2.0 * scale / ((nodes[c] + 1.0) * (nodes[c] + 1.0));
                    k.column_mut(c).iter_mut().for_each(|v| *v *= w);
                }
                k
            };
            (build(&grid.symbols[0]), build(&grid.symbols[1]))
        };
        let mut a = DMatrix::from_element(2 * n, 2 * n, zero);
        for r in 0..n {
            a[(r, r)] = C64::new(gamma[0], 0.0);
            a[(n + r, n + r)] = C64::new(gamma[1], 0.0);
            for c in 0..n {
                a[(r, n + c)] = k1[(r, c)];
                a[(n + r, c)] = k2[(r, c)];
            }
        }
        let lu = a.lu();
        if !lu.is_invertible() {
            return Err(Error::numerical("collocation system is singular"));
        }
        Ok(Self {
            s: factors.s(),
            n,
            kappa: factors.kappa(),
            speed: setup.speed,
            gamma,
            nodes,
            weights,
            x,
            k1,
            k2,
            lu,
            rhs_scale: rhs_scale(factors)?,
        })
    }

    pub fn s(&self) -> C64 {
        self.s
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Largest off-diagonal row sum of the discrete system relative to γ_j.
    /// Rows of far nodes, where the node spacing exceeds the kernel width,
    /// inflate it; see [`kernel_dominance`] for the continuous bound.
    pub fn dominance(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, g) in [(&self.k1, self.gamma[0]), (&self.k2, self.gamma[1])] {
            for r in 0..self.n {
                let row: f64 = k.row(r).iter().map(|v| v.norm()).sum();
                worst = worst.max(row / g);
            }
        }
        worst
    }

    /// Solves with right-hand sides Q_j given at the N nodes and the
    /// endpoint (length N + 1 each). Returns X_j at the same N + 1 points.
    pub fn solve_rhs(&self, q1: &[C64], q2: &[C64]) -> Result<(Vec<C64>, Vec<C64>)> {
        let n = self.n;
        if q1.len() != n + 1 || q2.len() != n + 1 {
            return Err(Error::input("right-hand side must have N + 1 entries"));
        }
        let rhs = DVector::from_fn(2 * n, |r, _| if r < n { -q1[r] } else { -q2[r - n] });
        let sol = self.lu.solve(&rhs).ok_or_else(|| Error::numerical("collocation solve failed"))?;
        let x1 = sol.rows(0, n).clone_owned();
        let x2 = sol.rows(n, n).clone_owned();
        let mut a: Vec<C64> = x1.iter().copied().collect();
        let mut b: Vec<C64> = x2.iter().copied().collect();
        let e1 = (-q1[n] - (self.k1.row(n) * &x2)[(0, 0)]) / self.gamma[0];
        let e2 = (-q2[n] - (self.k2.row(n) * &x1)[(0, 0)]) / self.gamma[1];
        a.push(e1);
        b.push(e2);
        if a.iter().chain(&b).any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::numerical("collocation solution is not finite"));
        }
        Ok((a, b))
    }

    /// Right-hand sides at the nodes and endpoint for a load.
    pub fn rhs(&self, load: &LoadSpec) -> Result<(Vec<C64>, Vec<C64>)> {
        load.validate()?;
        let amp = load.amplitudes(self.s, self.speed)?;
        let base: Vec<C64> = self.x.iter().map(|&x| (self.s * (x / self.speed)).exp()).collect();
        let q1 = base.iter().map(|b| b * amp[0] * self.rhs_scale[0]).collect();
        let q2 = base.iter().map(|b| b * amp[1] * self.rhs_scale[1]).collect();
        Ok((q1, q2))
    }

    pub fn solve(&self, load: &LoadSpec) -> Result<SifTransformRecord> {
        let (q1, q2) = self.rhs(load)?;
        let (x1, x2) = self.solve_rhs(&q1, &q2)?;
        Ok(self.record(x1[self.n], x2[self.n]))
    }

    /// Record from endpoint values of the scaled unknowns.
    pub fn record(&self, x1e: C64, x2e: C64) -> SifTransformRecord {
        let r = self.kappa.sqrt();
        let chi1 = x1e / r;
        let chi2 = x2e / r;
        let s2 = std::f64::consts::SQRT_2;
        SifTransformRecord { s: self.s, k_i: -s2 * self.gamma[1] * chi2, k_ii: -s2 * self.gamma[0] * chi1, chi1, chi2 }
    }
}

/// Factorizes, tabulates and solves at one s.
pub fn solve_system(
    s: C64,
    load: &LoadSpec,
    setup: &crate::material::CrackSetup<f64>,
    n: usize,
    m: usize,
) -> Result<SifTransformRecord> {
    let f = DiagonalFactor::new(s, setup, m)?;
    KernelTable::new(&f, n)?.solve(load)
}
