//! Whole-plane problem (δ = ∞): two decoupled scalar Riemann-Hilbert
//! problems solved in closed form.
//!
//! Everything here is written in the scaled variables s = c_l s', p = p's',
//! where the coefficients no longer depend on s'.

use crate::error::{Error, Result};
use crate::factor::LineFactor;
use crate::material::{CrackSetup, Mode};
use crate::quadrature::{integrate, integrate_real_line, Tolerance};
use crate::scalar::{i_unit, re, Real};
use crate::special::gamma_ratio;
use num_complex::Complex;

/// K⁺(p) = Γ(1−ip)/Γ(1/2−ip) and K⁻(p) = Γ(1/2+ip)/Γ(ip), so that
/// coth(πp) = iK⁺/K⁻.
pub fn coth_factors<T: Real>(p: Complex<T>) -> Result<(Complex<T>, Complex<T>)> {
    let i = i_unit::<T>();
    let one = re(T::one());
    let half = re(T::lit(0.5));
    let kp = gamma_ratio(one - i * p, half - i * p)?;
    let km = gamma_ratio(half + i * p, i * p)?;
    Ok((kp, km))
}

/// K̃⁺(p) = −Γ(−ip)/Γ(1/2−ip) and K̃⁻(p) = Γ(1/2+ip)/Γ(1+ip), the pair
/// whose zero at p = 0 sits on the other side of the contour.
pub fn coth_factors_alt<T: Real>(p: Complex<T>) -> Result<(Complex<T>, Complex<T>)> {
    let i = i_unit::<T>();
    let one = re(T::one());
    let half = re(T::lit(0.5));
    let kp = -gamma_ratio(-i * p, half - i * p)?;
    let km = gamma_ratio(half + i * p, one + i * p)?;
    Ok((kp, km))
}

/// 1/K⁺ at real p, finite everywhere.
fn inv_k_plus<T: Real>(p: T) -> Result<Complex<T>> {
    let i = i_unit::<T>();
    gamma_ratio(re(T::lit(0.5)) - i * p, re(T::one()) - i * p)
}

/// 1/K̃⁺ at real p; vanishes linearly at p = 0.
fn inv_k_plus_alt<T: Real>(p: T) -> Result<Complex<T>> {
    if p == T::zero() {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let i = i_unit::<T>();
    Ok(-gamma_ratio(re(T::lit(0.5)) - i * p, -i * re(p))?)
}

/// tanh(πp/k)/p, continuous at p = 0.
pub fn tanhc<T: Real>(p: T, k: T) -> T {
    let x = T::PI() * p / k;
    if x.abs() < T::lit(1e-4) {
        let x2 = x * x;
        T::PI() / k * (T::one() - x2 / T::lit(3.0) + x2 * x2 * T::lit(2.0) / T::lit(15.0))
    } else {
        x.tanh() / p
    }
}

/// exp{(1/2πi)∫ ln f(τ)/(τ − z) dτ} for Im z > 0, by adaptive quadrature
/// over the real line. `ln_f` must be continuous and O(1/τ) at infinity.
pub fn omega_plus_from_log<T, F>(ln_f: F, z: Complex<T>, tol: &Tolerance<T>) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(T) -> Complex<T>,
{
    if !(z.im > T::zero()) {
        return Err(Error::domain("Cauchy factor evaluated off the upper half-plane"));
    }
    let c = z.norm().max(T::one()).min(T::lit(8.0));
    let two_pi_i = i_unit::<T>() * (T::lit(2.0) * T::PI());
    let v = integrate_real_line(|t| ln_f(t) / (re(t) - z), c, tol)?;
    Ok((v / two_pi_i).exp())
}

/// Crack-face load for the whole-plane SIF transform, supported ahead of
/// the initial tip (x ≥ 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlaneLoad<T> {
    /// Unit point force at x0.
    Point { x0: T },
    /// Unit traction on [a, b].
    Box { a: T, b: T },
    /// No load.
    Zero,
}

impl<T: Real> PlaneLoad<T> {
    fn check(&self) -> Result<()> {
        match *self {
            PlaneLoad::Point { x0 } if !(x0 >= T::zero()) => Err(Error::input("point load must sit at x0 >= 0")),
            PlaneLoad::Box { a, b } if !(a >= T::zero() && b > a) => {
                Err(Error::input("box load needs 0 <= a < b"))
            }
            _ => Ok(()),
        }
    }

    /// Amplitude A(s') with q̃⁻(τs', c_l s') = A/(c_l s'(1 + iτv_l)).
    fn amplitude(&self, s: T, setup: &CrackSetup<T>) -> T {
        let vl = setup.v_l();
        match *self {
            PlaneLoad::Point { x0 } => (-s * x0 / vl).exp(),
            PlaneLoad::Box { a, b } => vl / s * ((-s * a / vl).exp() - (-s * b / vl).exp()),
            PlaneLoad::Zero => T::zero(),
        }
    }

    /// Scaled load transform q̃⁻(τs', c_l s') at real τ.
    pub fn transform(&self, tau: T, s: T, setup: &CrackSetup<T>) -> Complex<T> {
        let i = i_unit::<T>();
        let amp = self.amplitude(s, setup);
        re(amp) / ((re(T::one()) + i * (tau * setup.v_l())) * (setup.material.c_l * s))
    }
}

#[derive(Debug, Clone)]
pub struct PlaneSolver<T> {
    setup: CrackSetup<T>,
    gamma: [T; 2],
    gamma_zero: [T; 2],
    factors: [LineFactor<T>; 2],
    tol: Tolerance<T>,
}

impl<T: Real> PlaneSolver<T> {
    pub fn new(setup: CrackSetup<T>) -> Result<Self> {
        Self::with_nodes(setup, 512)
    }

    /// `m` sets the circle rule used for boundary values of Ω±.
    pub fn with_nodes(setup: CrackSetup<T>, m: usize) -> Result<Self> {
        let gamma = setup.gamma();
        let gamma_zero = setup.gamma_zero();
        let mut this = Self {
            setup,
            gamma,
            gamma_zero,
            factors: [
                LineFactor::new(|_| re(T::one()), T::one(), 2)?,
                LineFactor::new(|_| re(T::one()), T::one(), 2)?,
            ],
            tol: Tolerance { abs: T::lit(1e-11), rel: T::lit(1e-12), max_intervals: 4000 },
        };
        let f1 = LineFactor::new(|p| this.split(1, p), T::one(), m)?;
        let f2 = LineFactor::new(|p| this.split(2, p), T::one(), m)?;
        this.factors = [f1, f2];
        Ok(this)
    }

    pub fn setup(&self) -> &CrackSetup<T> {
        &self.setup
    }

    pub fn gamma(&self) -> [T; 2] {
        self.gamma
    }

    pub fn gamma_zero(&self) -> [T; 2] {
        self.gamma_zero
    }

    /// α̃, β̃ at real p (scaled variables).
    pub fn scaled_alpha_beta(&self, p: T) -> (Complex<T>, Complex<T>) {
        self.alpha_beta_over(p, T::one())
    }

    /// α̃/m, β̃/m without forming p².
    fn alpha_beta_over(&self, p: T, m: T) -> (Complex<T>, Complex<T>) {
        let two = T::lit(2.0);
        let ah = self.setup.alpha_hat();
        let bh = self.setup.beta_hat();
        let k = self.setup.material.c_l / self.setup.material.c_s;
        let (pm, im) = (p / m, T::one() / m);
        let a2 = Complex::new(ah * ah * pm * pm + im * im, two * pm * im * self.setup.v_l());
        let b2 = Complex::new(bh * bh * pm * pm + k * k * im * im, two * pm * im * self.setup.v_s() * k);
        (a2.sqrt(), b2.sqrt())
    }

    /// p·g̃_j(p), finite on the whole line.
    pub fn coefficient_times_p(&self, j: usize, p: T) -> Complex<T> {
        let m = p.abs().max(T::one());
        let (a, b) = self.alpha_beta_over(p, m);
        let ps = p / m;
        let p2 = re(ps * ps);
        let b2 = b * b;
        let q = p2 + b2;
        let r1 = q * q - a * b * (T::lit(4.0) * ps * ps);
        let pre = if j == 1 { b } else { a };
        r1 / (pre * (p2 - b2) * T::lit(2.0)) * m
    }

    /// g̃_j(p) = R̃₁/(2β̃(p²−β̃²)p) for j = 1 and with α̃ in the prefactor for j = 2.
    pub fn coefficient(&self, j: usize, p: T) -> Result<Complex<T>> {
        check_index(j)?;
        if p == T::zero() {
            return Err(Error::Pole("plane coefficient at p = 0".into()));
        }
        Ok(self.coefficient_times_p(j, p) / p)
    }

    /// g°_j = −g̃_j/(γ_j coth πp), continuous and positive at 0, → 1 at ±∞.
    pub fn split(&self, j: usize, p: T) -> Complex<T> {
        let g = self.gamma[j - 1];
        -self.coefficient_times_p(j, p) * (tanhc(p, T::one()) / g)
    }

    pub fn winding(&self, j: usize) -> T {
        self.factors[j - 1].winding()
    }

    fn ln_split(&self, j: usize, p: T) -> Complex<T> {
        self.factors[j - 1].log_symbol(p, self.split(j, p))
    }

    /// Ω_j⁺(z), Im z > 0, by adaptive quadrature of the Cauchy integral.
    pub fn omega_plus(&self, j: usize, z: Complex<T>) -> Result<Complex<T>> {
        check_index(j)?;
        omega_plus_from_log(|t| self.ln_split(j, t), z, &self.tol)
    }

    /// Ω_j⁺(z) from the circle rule; cheap, used for cross-checks.
    pub fn omega_plus_circle(&self, j: usize, z: Complex<T>) -> Complex<T> {
        self.factors[j - 1].upper(z)
    }

    /// Boundary values (Ω_j⁺(p), Ω_j⁻(p)) at real p.
    pub fn boundary(&self, j: usize, p: T) -> (Complex<T>, Complex<T>) {
        self.factors[j - 1].boundary(p, self.split(j, p))
    }

    /// w_I (through Ω₂⁺) or w_II (through Ω₁⁺):
    /// w = Γ(1/2+1/v_l)/(√v_l Γ(1+1/v_l) Ω⁺(i/v_l)).
    pub fn weight_scalar(&self, mode: Mode) -> Result<T> {
        let vl = self.setup.v_l();
        let inv = T::one() / vl;
        let ratio = gamma_ratio(re(T::lit(0.5) + inv), re(T::one() + inv))?;
        let omega = self.omega_plus(mode.index(), Complex::new(T::zero(), inv))?;
        Ok((ratio / (omega * vl.sqrt())).re)
    }

    /// W(x0, t) = √(2/(π(Vt − x0)))·w, zero before the tip reaches x0.
    pub fn weight_function(&self, mode: Mode, x0: T, t: T) -> Result<T> {
        let d = self.setup.speed * t - x0;
        if d <= T::zero() {
            return Ok(T::zero());
        }
        let w = self.weight_scalar(mode)?;
        Ok((T::lit(2.0) / (T::PI() * d)).sqrt() * w)
    }

    /// Laplace transform of W(x0, ·) at s (unscaled), in closed form.
    pub fn weight_transform(&self, mode: Mode, x0: T, s: Complex<T>) -> Result<Complex<T>> {
        let w = self.weight_scalar(mode)?;
        let v = self.setup.speed;
        Ok((-s * (x0 / v)).exp() * (re(T::lit(2.0) / v) / s).sqrt() * w)
    }

    /// Ψ°_j(s') = (1/2πi)∫ q̃⁻/(K⁺Ω_j⁺) dτ by quadrature along the real line.
    pub fn psi_circ<F: Fn(T) -> Complex<T>>(&self, j: usize, load: F, s: T) -> Result<Complex<T>> {
        check_index(j)?;
        let _ = s;
        let two_pi_i = i_unit::<T>() * (T::lit(2.0) * T::PI());
        let mut failure = None;
        let v = integrate_real_line(
            |t| match inv_k_plus(t) {
                Ok(ik) => load(t) * ik / self.boundary(j, t).0,
                Err(e) => {
                    failure = Some(e);
                    Complex::new(T::zero(), T::zero())
                }
            },
            T::one() / self.setup.v_l(),
            &self.contour_tol(),
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(v / two_pi_i)
    }

    /// K̂ = √2·i·Ψ°·√s' for a load given as its scaled transform q̃⁻(τs', c_l s').
    pub fn sif_transform<F: Fn(T) -> Complex<T>>(&self, mode: Mode, load: F, s: T) -> Result<Complex<T>> {
        if !(s > T::zero()) {
            return Err(Error::domain("scaled Laplace parameter must be positive"));
        }
        let psi = self.psi_circ(mode.index(), load, s)?;
        Ok(i_unit::<T>() * psi * (T::lit(2.0) * s).sqrt())
    }

    pub fn sif_transform_load(&self, mode: Mode, load: PlaneLoad<T>, s: T) -> Result<Complex<T>> {
        load.check()?;
        self.sif_transform(mode, |t| load.transform(t, s, &self.setup), s)
    }

    /// Residue evaluation of Ψ° for loads with a single pole at i/v_l.
    pub fn sif_transform_closed(&self, mode: Mode, load: PlaneLoad<T>, s: T) -> Result<Complex<T>> {
        load.check()?;
        let vl = self.setup.v_l();
        let amp = load.amplitude(s, &self.setup);
        let (kp, _) = coth_factors(Complex::new(T::zero(), T::one() / vl))?;
        let omega = self.omega_plus(mode.index(), Complex::new(T::zero(), T::one() / vl))?;
        let psi = re(amp) / (i_unit::<T>() * (self.setup.speed * s) * kp * omega);
        Ok(i_unit::<T>() * psi * (T::lit(2.0) * s).sqrt())
    }

    /// Ψ̃_j(0, s'): principal value of (1/2πi)∫ q̃⁻/(K̃⁺Ω_j⁺) dτ/τ, folded
    /// as ∫₀^∞ (h(τ) − h(−τ))/τ dτ.
    pub fn psi_tilde_zero<F: Fn(T) -> Complex<T>>(&self, j: usize, load: F) -> Result<Complex<T>> {
        check_index(j)?;
        let mut failure = None;
        let mut h = |t: T| -> Complex<T> {
            match inv_k_plus_alt(t) {
                Ok(ik) => load(t) * ik / self.boundary(j, t).0,
                Err(e) => {
                    failure = Some(e);
                    Complex::new(T::zero(), T::zero())
                }
            }
        };
        let c = T::one() / self.setup.v_l();
        let near = integrate(|t| (h(t) - h(-t)) / t, T::zero(), c, &self.contour_tol())?;
        let far = integrate(
            |u: T| {
                let t = c / (u * u);
                (h(t) - h(-t)) / t * (T::lit(2.0) * c / (u * u * u))
            },
            T::zero(),
            T::one(),
            &self.contour_tol(),
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok((near + far) / (i_unit::<T>() * (T::lit(2.0) * T::PI())))
    }

    /// Ψ̃_j⁻(p) at a point p below the real axis.
    pub fn psi_tilde_lower<F: Fn(T) -> Complex<T>>(&self, j: usize, load: F, p: Complex<T>) -> Result<Complex<T>> {
        check_index(j)?;
        if !(p.im < T::zero()) {
            return Err(Error::domain("lower Cauchy integral needs Im p < 0"));
        }
        let mut failure = None;
        let v = integrate_real_line(
            |t| match inv_k_plus_alt(t) {
                Ok(ik) => load(t) * ik / self.boundary(j, t).0 / (re(t) - p),
                Err(e) => {
                    failure = Some(e);
                    Complex::new(T::zero(), T::zero())
                }
            },
            T::one() / self.setup.v_l(),
            &self.contour_tol(),
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(v / (i_unit::<T>() * (T::lit(2.0) * T::PI())))
    }

    /// SIF transform by both contour indentations: (through K⁺ and Ψ°,
    /// through K̃⁺ and C_j = −Ψ̃_j(0, s')).
    pub fn contour_crosscheck(&self, mode: Mode, load: PlaneLoad<T>, s: T) -> Result<(Complex<T>, Complex<T>)> {
        load.check()?;
        let f = |t: T| load.transform(t, s, &self.setup);
        let a = self.sif_transform(mode, f, s)?;
        let psi0 = self.psi_tilde_zero(mode.index(), f)?;
        let b = psi0 * (T::lit(2.0) * s).sqrt();
        Ok((a, b))
    }
}

impl<T: Real> PlaneSolver<T> {
    /// Boundary values from the circle rule carry noise near 1e-9, so the
    /// contour integrals stop there.
    fn contour_tol(&self) -> Tolerance<T> {
        Tolerance { abs: T::lit(1e-10), rel: T::lit(1e-9), max_intervals: self.tol.max_intervals }
    }
}

fn check_index(j: usize) -> Result<()> {
    if j == 1 || j == 2 {
        Ok(())
    } else {
        Err(Error::input(format!("scalar problem index must be 1 or 2, got {j}")))
    }
}
