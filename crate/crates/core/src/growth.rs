//! Crack growth at piecewise-constant speed: at each vertex of the speed
//! schedule the crack is stopped, the stresses it radiates ahead of the
//! stop point are recovered from a pair of Volterra convolution equations,
//! and the next stage negates the accumulated tractions.
//!
//! Stress vectors and weight matrices use mode slots: index 0 is mode I
//! (σ22, normal), index 1 is mode II (σ12, shear); `w[i][j]` is the SIF of
//! mode i due to a unit load of mode j.

use crate::error::{Error, Result};
use crate::laplace::{exponential_moment, InversionConfig};
use crate::material::{CrackSetup, Mode};
use crate::plane::PlaneSolver;
use crate::quadrature::GaussLegendre;
use crate::weights::{reflection_timing, SolverConfig, WeightSolver};
use num_complex::Complex;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::rc::Rc;

type C64 = Complex<f64>;
type Mat2 = [[f64; 2]; 2];
type CMat2 = [[C64; 2]; 2];

/// Polygonal crack-length history through vertices (t_k, l_k), starting
/// at (0, 0).
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedSchedule {
    vertices: Vec<(f64, f64)>,
}

impl SpeedSchedule {
    pub fn new(vertices: Vec<(f64, f64)>, c_r: f64) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::input("speed schedule needs at least two vertices"));
        }
        if vertices[0] != (0.0, 0.0) {
            return Err(Error::input("speed schedule must start at t = 0, l = 0"));
        }
        for w in vertices.windows(2) {
            let (t0, l0) = w[0];
            let (t1, l1) = w[1];
            if !(t1 > t0) {
                return Err(Error::input("schedule times must increase"));
            }
            if l1 < l0 {
                return Err(Error::input("crack length must be nondecreasing"));
            }
            let v = (l1 - l0) / (t1 - t0);
            if !(v > 0.0 && v < c_r) {
                return Err(Error::domain(format!("stage speed {v} outside (0, c_R)")));
            }
        }
        Ok(Self { vertices })
    }

    /// Single stage at constant speed up to time `t_end`.
    pub fn constant(speed: f64, t_end: f64, c_r: f64) -> Result<Self> {
        Self::new(vec![(0.0, 0.0), (t_end, speed * t_end)], c_r)
    }

    pub fn stages(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertex(&self, k: usize) -> (f64, f64) {
        self.vertices[k]
    }

    pub fn speed(&self, k: usize) -> f64 {
        let (t0, l0) = self.vertices[k];
        let (t1, l1) = self.vertices[k + 1];
        (l1 - l0) / (t1 - t0)
    }

    pub fn end(&self) -> (f64, f64) {
        *self.vertices.last().unwrap()
    }
}

/// A piece of a crack-line stress distribution; stresses are [σ22, σ12].
#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    /// Piecewise-linear table, zero outside its span.
    Table { x: Vec<f64>, sigma: Vec<[f64; 2]> },
    /// Stresses radiated ahead of a stop point:
    /// σ(x) = g(r)/r with r = √((x − origin)/speed), g tabulated on a
    /// uniform r grid from 0 to r_max; zero beyond.
    Radiated { origin: f64, speed: f64, r_max: f64, g: Vec<[f64; 2]> },
}

impl Segment {
    fn span(&self) -> (f64, f64) {
        match self {
            Segment::Table { x, .. } => (x[0], *x.last().unwrap()),
            Segment::Radiated { origin, speed, r_max, .. } => (*origin, origin + speed * r_max * r_max),
        }
    }

    fn eval(&self, xq: f64) -> [f64; 2] {
        let (a, b) = self.span();
        if xq < a || xq > b {
            return [0.0; 2];
        }
        match self {
            Segment::Table { x, sigma } => {
                let k = x.partition_point(|&v| v <= xq).clamp(1, x.len() - 1);
                let w = (xq - x[k - 1]) / (x[k] - x[k - 1]);
                [0, 1].map(|m| sigma[k - 1][m] * (1.0 - w) + sigma[k][m] * w)
            }
            Segment::Radiated { origin, speed, r_max, g } => {
                let r = ((xq - origin) / speed).sqrt();
                if r == 0.0 {
                    return [f64::INFINITY.copysign(g[0][0]), f64::INFINITY.copysign(g[0][1])];
                }
                let n = g.len() - 1;
                let pos = r / r_max * n as f64;
                let k = (pos.floor() as usize).min(n - 1);
                let w = pos - k as f64;
                [0, 1].map(|m| (g[k][m] * (1.0 - w) + g[k + 1][m] * w) / r)
            }
        }
    }
}

/// Concentrated forces [f22, f12] at x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointForce {
    pub x: f64,
    pub force: [f64; 2],
}

/// Crack-line tractions as a sum of segments and point forces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StressProfile {
    pub segments: Vec<Segment>,
    pub points: Vec<PointForce>,
}

impl StressProfile {
    pub fn table(x: Vec<f64>, sigma: Vec<[f64; 2]>) -> Result<Self> {
        if x.len() < 2 || x.len() != sigma.len() {
            return Err(Error::input("stress table needs matching columns of at least two rows"));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) || !(x[0] >= 0.0) {
            return Err(Error::input("stress table abscissae must increase from x >= 0"));
        }
        if sigma.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::input("stress table has non-finite samples"));
        }
        Ok(Self { segments: vec![Segment::Table { x, sigma }], points: vec![] })
    }

    pub fn point(x: f64, force: [f64; 2]) -> Result<Self> {
        if !(x >= 0.0) || force.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("point force must sit at x >= 0 with finite magnitude"));
        }
        Ok(Self { segments: vec![], points: vec![PointForce { x, force }] })
    }

    pub fn is_zero(&self) -> bool {
        self.segments.is_empty() && self.points.iter().all(|p| p.force == [0.0, 0.0])
    }

    /// Distributed stresses at x (point forces excluded).
    pub fn eval(&self, x: f64) -> [f64; 2] {
        let mut acc = [0.0; 2];
        for s in &self.segments {
            let v = s.eval(x);
            acc[0] += v[0];
            acc[1] += v[1];
        }
        acc
    }

    fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut b = vec![lo, hi];
        for s in &self.segments {
            let (a, c) = s.span();
            b.push(a);
            b.push(c);
        }
        b.retain(|&v| v >= lo && v <= hi);
        b.sort_by(|a, c| a.partial_cmp(c).unwrap());
        b.dedup_by(|a, c| (*a - *c).abs() <= 1e-14 * (1.0 + c.abs()));
        b
    }

    /// Tabulated stresses must cover [a, b] when any are given.
    fn check_covers(&self, a: f64, b: f64) -> Result<()> {
        for s in &self.segments {
            if let Segment::Table { x, .. } = s {
                if x[0] > a + 1e-12 || *x.last().unwrap() < b - 1e-12 {
                    return Err(Error::input(format!("stress table does not cover [{a}, {b}]")));
                }
            }
        }
        Ok(())
    }
}

/// Time-domain and Laplace-domain weight matrices W(0, u) at one speed.
pub trait WeightKernel {
    fn speed(&self) -> f64;
    /// √u·W(0, u), bounded; zero for u ≤ 0.
    fn scaled(&self, u: f64) -> Result<Mat2>;
    /// Ŵ(0, s).
    fn transform(&self, s: C64) -> Result<CMat2>;

    fn time(&self, u: f64) -> Result<Mat2> {
        if u <= 0.0 {
            return Ok([[0.0; 2]; 2]);
        }
        let g = self.scaled(u)?;
        let r = u.sqrt();
        Ok([[g[0][0] / r, g[0][1] / r], [g[1][0] / r, g[1][1] / r]])
    }
}

/// Whole-plane kernel: W = √(2/(πVu))·diag(w_I, w_II).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneKernel {
    pub speed: f64,
    pub w: [f64; 2],
}

impl PlaneKernel {
    pub fn new(setup: &CrackSetup<f64>) -> Result<Self> {
        let st = CrackSetup::new(setup.material, setup.speed, f64::INFINITY)?;
        let p = PlaneSolver::new(st)?;
        Ok(Self { speed: setup.speed, w: [p.weight_scalar(Mode::I)?, p.weight_scalar(Mode::II)?] })
    }
}

impl WeightKernel for PlaneKernel {
    fn speed(&self) -> f64 {
        self.speed
    }

    fn scaled(&self, u: f64) -> Result<Mat2> {
        if u <= 0.0 {
            return Ok([[0.0; 2]; 2]);
        }
        let c = (2.0 / (PI * self.speed)).sqrt();
        Ok([[c * self.w[0], 0.0], [0.0, c * self.w[1]]])
    }

    fn transform(&self, s: C64) -> Result<CMat2> {
        let r = (C64::new(2.0 / self.speed, 0.0) / s).sqrt();
        let z = C64::new(0.0, 0.0);
        Ok([[r * self.w[0], z], [z, r * self.w[1]]])
    }
}

/// Half-plane kernel: transforms from the collocation solver, time values
/// from a table of √u·W on a uniform u grid. Before 0.9·2t_l the table holds
/// the whole-plane values, which the half-plane solution reproduces there.
#[derive(Debug, Clone)]
pub struct TabulatedKernel {
    solver: WeightSolver,
    du: f64,
    g: Vec<Mat2>,
}

impl TabulatedKernel {
    pub fn build(solver: WeightSolver, u_max: f64, intervals: usize) -> Result<Self> {
        if intervals < 2 || !(u_max > 0.0) {
            return Err(Error::input("kernel table needs a positive span and at least two intervals"));
        }
        let setup = *solver.setup();
        let plane = PlaneKernel::new(&setup)?.scaled(1.0)?;
        let delay = 0.9 * 2.0 * reflection_timing(&setup)?.t_l;
        let du = u_max / intervals as f64;
        let mut g = Vec::with_capacity(intervals + 1);
        for k in 0..=intervals {
            let u = du * k as f64;
            if u < delay {
                g.push(plane);
            } else {
                let w = solver.weight_functions_origin(u)?;
                let r = u.sqrt();
                g.push([[w[0][0] * r, w[0][1] * r], [w[1][0] * r, w[1][1] * r]]);
            }
        }
        Ok(Self { solver, du, g })
    }

    pub fn u_max(&self) -> f64 {
        self.du * (self.g.len() - 1) as f64
    }
}

impl WeightKernel for TabulatedKernel {
    fn speed(&self) -> f64 {
        self.solver.setup().speed
    }

    fn scaled(&self, u: f64) -> Result<Mat2> {
        if u <= 0.0 {
            return Ok([[0.0; 2]; 2]);
        }
        let n = self.g.len() - 1;
        let pos = u / self.du;
        if pos > n as f64 * (1.0 + 1e-12) {
            return Err(Error::numerical(format!("weight table ends at u = {}, asked for {u}", self.u_max())));
        }
        let k = (pos.floor() as usize).min(n - 1);
        let w = pos - k as f64;
        let (a, b) = (self.g[k], self.g[k + 1]);
        Ok([
            [a[0][0] * (1.0 - w) + b[0][0] * w, a[0][1] * (1.0 - w) + b[0][1] * w],
            [a[1][0] * (1.0 - w) + b[1][0] * w, a[1][1] * (1.0 - w) + b[1][1] * w],
        ])
    }

    fn transform(&self, s: C64) -> Result<CMat2> {
        self.solver.transforms(s)
    }
}

/// Σ_j ∫_lo^hi W_{ij}(0, t − (x − origin)/V) σ_j(x) dx, with inverse-square-root
/// end behaviour on every sub-interval handled by x = a + (b − a)(1 − cos θ)/2.
pub fn convolve(
    profile: &StressProfile,
    kernel: &dyn WeightKernel,
    lo: f64,
    hi: f64,
    origin: f64,
    t: f64,
    rule: &GaussLegendre<f64>,
) -> Result<[f64; 2]> {
    let v = kernel.speed();
    let mut acc = [0.0; 2];
    if !(hi > lo) {
        return Ok(acc);
    }
    let mut add = |w: Mat2, s: [f64; 2], scale: f64| {
        for i in 0..2 {
            acc[i] += scale * (w[i][0] * s[0] + w[i][1] * s[1]);
        }
    };
    let bp = profile.breakpoints(lo, hi);
    for pair in bp.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if !(b > a) {
            continue;
        }
        for (&th, &wt) in rule.nodes.iter().zip(&rule.weights) {
            let theta = PI * (th + 1.0) / 2.0;
            let x = a + (b - a) * (1.0 - theta.cos()) / 2.0;
            let jac = (b - a) / 2.0 * theta.sin() * PI / 2.0;
            let u = t - (x - origin) / v;
            if u <= 0.0 || x <= a || x >= b {
                continue;
            }
            add(kernel.time(u)?, profile.eval(x), wt * jac);
        }
    }
    for p in &profile.points {
        if p.x >= lo && p.x < hi {
            let u = t - (p.x - origin) / v;
            if u > 0.0 {
                add(kernel.time(u)?, p.force, 1.0);
            }
        }
    }
    Ok(acc)
}

/// Numerical knobs of the growth simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthConfig {
    pub solver: SolverConfig,
    /// Intervals of the √τ' grid on which radiated stresses are stored.
    pub radiated_points: usize,
    /// Intervals of the quadratic τ grid carrying ω.
    pub omega_points: usize,
    /// Gauss-Legendre order of the crack-line quadrature per sub-interval.
    pub quad_nodes: usize,
    /// Intervals of the half-plane weight table.
    pub kernel_points: usize,
    /// ω is tabulated to this multiple of the longest recovered τ'.
    pub omega_span: f64,
    /// Abscissae with |det Ŵ| below this fraction of |Ŵ_{I,I}Ŵ_{II,II}| are
    /// skipped and interpolated.
    pub det_threshold: f64,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            radiated_points: 48,
            omega_points: 1500,
            quad_nodes: 48,
            kernel_points: 80,
            omega_span: 2.5,
            det_threshold: 1e-8,
        }
    }
}

/// ω(τ) of one stop, tabulated on a quadratic grid, and its transform.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaTable {
    pub tau: Vec<f64>,
    pub omega: Vec<[f64; 2]>,
}

impl OmegaTable {
    /// (ω̂_I, ω̂_II) at s for the piecewise-linear interpolant of the table.
    pub fn hats(&self, s: C64) -> Result<[C64; 2]> {
        let a: Vec<f64> = self.omega.iter().map(|v| v[0]).collect();
        let b: Vec<f64> = self.omega.iter().map(|v| v[1]).collect();
        Ok([exponential_moment(&self.tau, &a, s)?, exponential_moment(&self.tau, &b, s)?])
    }

    pub fn scale(&self) -> f64 {
        self.omega.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Tabulates ω_i(τ) = K'_i(τ + L/V)/V for the stop at l_{k+1}, where K' is the
/// SIF of the stage load σ on (l_k, l_{k+1}).
pub fn omega_table(
    profile: &StressProfile,
    kernel: &dyn WeightKernel,
    l_start: f64,
    l_stop: f64,
    tau_max: f64,
    intervals: usize,
    rule: &GaussLegendre<f64>,
) -> Result<OmegaTable> {
    let v = kernel.speed();
    for p in &profile.points {
        if (p.x - l_stop).abs() <= 1e-12 * (1.0 + l_stop.abs()) && p.force != [0.0, 0.0] {
            return Err(Error::input("point force exactly at the stop point makes ω unbounded"));
        }
    }
    let lag = (l_stop - l_start) / v;
    let mut tau = Vec::with_capacity(intervals + 1);
    let mut omega = Vec::with_capacity(intervals + 1);
    for k in 0..=intervals {
        let r = k as f64 / intervals as f64;
        let t = tau_max * r * r;
        let kp = convolve(profile, kernel, l_start, l_stop, l_start, t + lag, rule)?;
        tau.push(t);
        omega.push([kp[0] / v, kp[1] / v]);
    }
    Ok(OmegaTable { tau, omega })
}

/// (ω̂_I, ω̂_II)(s) for the stop at l_{k+1} of `schedule`, built from the
/// time-domain ω.
pub fn omega_hats(
    s: C64,
    k: usize,
    profile: &StressProfile,
    schedule: &SpeedSchedule,
    kernel: &dyn WeightKernel,
    tau_max: f64,
    cfg: &GrowthConfig,
) -> Result<[C64; 2]> {
    let rule = GaussLegendre::new(cfg.quad_nodes)?;
    let (_, a) = schedule.vertex(k);
    let (_, b) = schedule.vertex(k + 1);
    omega_table(profile, kernel, a, b, tau_max, cfg.omega_points, &rule)?.hats(s)
}

/// Solution of the Volterra pair: π at a list of τ' values, with the
/// abscissae at which the determinant was flagged.
#[derive(Debug, Clone, PartialEq)]
pub struct VolterraSolution {
    pub tau: Vec<f64>,
    pub pi: Vec<[f64; 2]>,
    pub flagged: Vec<C64>,
}

/// Per s: Ŵ(0, s)·π̂ = ω̂; then Euler inversion at each τ'.
pub fn solve_volterra_pair(
    kernel: &dyn WeightKernel,
    omega: &OmegaTable,
    taus: &[f64],
    inv: &InversionConfig<f64>,
    det_threshold: f64,
) -> Result<VolterraSolution> {
    let mut pi = Vec::with_capacity(taus.len());
    let mut flagged = Vec::new();
    for &t in taus {
        if !(t > 0.0) {
            return Err(Error::domain("radiated stresses are recovered for τ' > 0 only"));
        }
        let abs = inv.abscissae(t);
        let mut vals: Vec<Option<[C64; 2]>> = Vec::with_capacity(abs.len());
        for &s in &abs {
            let w = kernel.transform(s)?;
            let o = omega.hats(s)?;
            let det = w[0][0] * w[1][1] - w[0][1] * w[1][0];
            if det.norm() <= det_threshold * (w[0][0] * w[1][1]).norm() || det.norm() == 0.0 {
                flagged.push(s);
                vals.push(None);
                continue;
            }
            vals.push(Some([(w[1][1] * o[0] - w[0][1] * o[1]) / det, (w[0][0] * o[1] - w[1][0] * o[0]) / det]));
        }
        let filled = fill_gaps(&vals)?;
        let a: Vec<C64> = filled.iter().map(|v| v[0]).collect();
        let b: Vec<C64> = filled.iter().map(|v| v[1]).collect();
        pi.push([inv.combine(t, &a), inv.combine(t, &b)]);
    }
    Ok(VolterraSolution { tau: taus.to_vec(), pi, flagged })
}

fn fill_gaps(vals: &[Option<[C64; 2]>]) -> Result<Vec<[C64; 2]>> {
    let known: Vec<usize> = (0..vals.len()).filter(|&k| vals[k].is_some()).collect();
    if known.is_empty() {
        return Err(Error::numerical("weight determinant vanishes at every abscissa"));
    }
    Ok((0..vals.len())
        .map(|k| match vals[k] {
            Some(v) => v,
            None => {
                let right = known.iter().copied().find(|&j| j > k);
                let left = known.iter().rev().copied().find(|&j| j < k);
                match (left, right) {
                    (Some(l), Some(r)) => {
                        let w = (k - l) as f64 / (r - l) as f64;
                        let (a, b) = (vals[l].unwrap(), vals[r].unwrap());
                        [a[0] * (1.0 - w) + b[0] * w, a[1] * (1.0 - w) + b[1] * w]
                    }
                    (Some(j), None) | (None, Some(j)) => vals[j].unwrap(),
                    (None, None) => unreachable!(),
                }
            }
        })
        .collect())
}

/// Radiated stresses σ̃(x) = π((x − l_stop)/V) as a profile segment, from π
/// sampled on the uniform √τ' grid r_k = k·r_max/n, k ≥ 1.
pub fn radiated_stresses(solution: &VolterraSolution, l_stop: f64, speed: f64) -> Result<Segment> {
    let n = solution.tau.len();
    if n < 3 {
        return Err(Error::input("radiated stresses need at least three samples"));
    }
    let r: Vec<f64> = solution.tau.iter().map(|t| t.sqrt()).collect();
    let r_max = r[n - 1];
    let step = r_max / n as f64;
    if r.iter().enumerate().any(|(k, &v)| (v - step * (k + 1) as f64).abs() > 1e-9 * r_max) {
        return Err(Error::input("radiated samples must lie on a uniform square-root grid"));
    }
    let mut g = Vec::with_capacity(n + 1);
    let gk: Vec<[f64; 2]> = solution.pi.iter().zip(&r).map(|(p, &rr)| [p[0] * rr, p[1] * rr]).collect();
    g.push([0, 1].map(|m| 3.0 * gk[0][m] - 3.0 * gk[1][m] + gk[2][m]));
    g.extend(gk);
    Ok(Segment::Radiated { origin: l_stop, speed, r_max, g })
}

/// Result of one stop-and-negate stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageResult {
    pub stage: usize,
    pub speed: f64,
    pub stop: f64,
    pub tau: Vec<f64>,
    pub pi: Vec<[f64; 2]>,
    /// max |K| of the stage problem after the stop over the largest K' in
    /// the same window.
    pub negation_residual: f64,
    pub driving_scale: f64,
    /// SIFs (K_I, K_II) of the stage problem before the stop at global times.
    pub history: Vec<(f64, [f64; 2])>,
    pub flagged: Vec<C64>,
    pub omega: OmegaTable,
}

pub struct GrowthState {
    pub schedule: SpeedSchedule,
    pub setup: CrackSetup<f64>,
    pub cfg: GrowthConfig,
    /// σ⁰ plus the radiated increments recovered so far.
    pub profile: StressProfile,
    pub stages: Vec<StageResult>,
    kernels: HashMap<u64, Rc<dyn WeightKernel>>,
    rule: GaussLegendre<f64>,
}

impl GrowthState {
    /// `setup` fixes material and depth; its speed is ignored.
    pub fn new(schedule: SpeedSchedule, setup: CrackSetup<f64>, initial: StressProfile, cfg: GrowthConfig) -> Result<Self> {
        cfg.solver.validate()?;
        if cfg.radiated_points < 3 || cfg.omega_points < 2 || cfg.quad_nodes < 2 || !(cfg.omega_span >= 1.0) {
            return Err(Error::input("growth knobs out of range"));
        }
        SpeedSchedule::new(schedule.vertices.clone(), setup.material.c_r)?;
        if schedule.stages() > 1 {
            initial.check_covers(0.0, schedule.vertex(1).1)?;
        }
        let rule = GaussLegendre::new(cfg.quad_nodes)?;
        Ok(Self { schedule, setup, cfg, profile: initial, stages: vec![], kernels: HashMap::new(), rule })
    }

    pub fn completed(&self) -> usize {
        self.stages.len()
    }

    /// Stops still to be processed before the final stage.
    pub fn is_terminal(&self) -> bool {
        self.stages.len() + 1 >= self.schedule.stages()
    }

    /// Weight kernel at speed V valid up to u_max; equal speeds share one.
    pub fn kernel(&mut self, speed: f64, u_max: f64) -> Result<Rc<dyn WeightKernel>> {
        let key = speed.to_bits();
        if let Some(k) = self.kernels.get(&key) {
            if k.scaled(u_max).is_ok() {
                return Ok(k.clone());
            }
        }
        let st = CrackSetup::new(self.setup.material, speed, self.setup.depth)?;
        let k: Rc<dyn WeightKernel> = if st.is_plane() {
            Rc::new(PlaneKernel::new(&st)?)
        } else {
            let solver = WeightSolver::new(st, self.cfg.solver)?;
            Rc::new(TabulatedKernel::build(solver, u_max * 1.05, self.cfg.kernel_points)?)
        };
        self.kernels.insert(key, k.clone());
        Ok(k)
    }

    pub fn kernel_count(&self) -> usize {
        self.kernels.len()
    }

    /// Stop at l_{k+1}: recover the radiated stresses and add them to the
    /// accumulated profile.
    pub fn advance_stage(&mut self) -> Result<&StageResult> {
        if self.is_terminal() {
            return Err(Error::input("schedule exhausted: only the final stage remains"));
        }
        let k = self.stages.len();
        let v = self.schedule.speed(k);
        let (t_start, l_start) = self.schedule.vertex(k);
        let (t_stop, l_stop) = self.schedule.vertex(k + 1);
        let l_end = self.schedule.end().1;
        let n = self.cfg.radiated_points;
        let tau_out = ((l_end - l_stop) / v).max((l_stop - l_start) / v);
        let tau_max = self.cfg.omega_span * tau_out;
        let lag = (l_stop - l_start) / v;
        let kernel = self.kernel(v, tau_max + lag)?;
        let omega = omega_table(&self.profile, kernel.as_ref(), l_start, l_stop, tau_max, self.cfg.omega_points, &self.rule)?;
        let r_max = tau_out.sqrt();
        let taus: Vec<f64> = (1..=n).map(|j| (r_max * j as f64 / n as f64).powi(2)).collect();
        let sol = solve_volterra_pair(kernel.as_ref(), &omega, &taus, &self.cfg.solver.inversion, self.cfg.det_threshold)?;
        let seg = radiated_stresses(&sol, l_stop, v)?;

        let increment = StressProfile { segments: vec![seg.clone()], points: vec![] };
        let mut worst: f64 = 0.0;
        for (j, &t) in taus.iter().enumerate() {
            if j % 4 != 3 {
                continue;
            }
            let kp = convolve(&self.profile, kernel.as_ref(), l_start, l_stop, l_start, t + lag, &self.rule)?;
            let kr = convolve(&increment, kernel.as_ref(), l_stop, l_stop + v * t, l_stop, t, &self.rule)?;
            worst = worst.max((kr[0] - kp[0]).abs()).max((kr[1] - kp[1]).abs());
        }
        let driving_scale = omega.scale() * v;
        let mut history = Vec::new();
        for j in 1..=8 {
            let tl = (t_stop - t_start) * j as f64 / 8.0;
            let kv = convolve(&self.profile, kernel.as_ref(), l_start, l_start + v * tl, l_start, tl, &self.rule)?;
            history.push((t_start + tl, kv));
        }
        self.profile.segments.push(seg);
        self.stages.push(StageResult {
            stage: k,
            speed: v,
            stop: l_stop,
            tau: sol.tau,
            pi: sol.pi,
            negation_residual: if driving_scale > 0.0 { worst / driving_scale } else { worst },
            driving_scale,
            history,
            flagged: sol.flagged,
            omega,
        });
        Ok(self.stages.last().unwrap())
    }

    /// Relative mismatch between ω of stage k and the radiated stresses of
    /// that stage convolved back with the weight kernel, over the recovered
    /// τ' window.
    pub fn reconvolution_error(&mut self, k: usize) -> Result<f64> {
        let r = self.stages.get(k).ok_or_else(|| Error::input(format!("stage {k} not solved")))?;
        let seg = self
            .profile
            .segments
            .iter()
            .find(|s| matches!(s, Segment::Radiated { origin, .. } if *origin == r.stop))
            .cloned()
            .ok_or_else(|| Error::numerical("radiated segment missing"))?;
        let (v, stop, tau_end) = (r.speed, r.stop, *r.tau.last().unwrap());
        let omega = r.omega.clone();
        let kernel = self.kernel(v, tau_end)?;
        let inc = StressProfile { segments: vec![seg], points: vec![] };
        let mut worst: f64 = 0.0;
        for (t, w) in omega.tau.iter().zip(&omega.omega) {
            if *t <= 0.0 || *t > tau_end {
                continue;
            }
            let c = convolve(&inc, kernel.as_ref(), stop, stop + v * t, stop, *t, &self.rule)?;
            worst = worst.max((c[0] / v - w[0]).abs()).max((c[1] / v - w[1]).abs());
        }
        let scale = omega.scale();
        Ok(if scale > 0.0 { worst / scale } else { worst })
    }

    /// Runs every stop of the schedule.
    pub fn run(&mut self) -> Result<()> {
        while !self.is_terminal() {
            self.advance_stage()?;
        }
        Ok(())
    }

    /// SIFs of the final stage at global times in (t_K, t_{K+1}]: the
    /// accumulated tractions on (l_K, l_K + V_K(t − t_K)) convolved with the
    /// weight functions.
    pub fn final_sifs(&mut self, times: &[f64]) -> Result<Vec<(f64, [f64; 2])>> {
        if !self.is_terminal() {
            return Err(Error::input("final SIFs need all stops processed"));
        }
        let k = self.schedule.stages() - 1;
        let v = self.schedule.speed(k);
        let (t0, l0) = self.schedule.vertex(k);
        let (t1, _) = self.schedule.vertex(k + 1);
        let kernel = self.kernel(v, t1 - t0)?;
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            if !(t > t0 && t <= t1 * (1.0 + 1e-12)) {
                return Err(Error::domain(format!("time {t} outside the final stage ({t0}, {t1}]")));
            }
            let tl = t - t0;
            out.push((t, convolve(&self.profile, kernel.as_ref(), l0, l0 + v * tl, l0, tl, &self.rule)?));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::Material;

    fn material() -> Material<f64> {
        Material::from_longitudinal_speed(1.0, 0.3).unwrap()
    }

    #[test]
    fn schedule_validation() {
        let c_r = material().c_r;
        assert!(SpeedSchedule::new(vec![(0.0, 0.0), (1.0, 0.2), (2.0, 0.5)], c_r).is_ok());
        assert!(SpeedSchedule::new(vec![(0.0, 0.0), (1.0, 0.6)], c_r).is_err());
        assert!(SpeedSchedule::new(vec![(0.0, 0.0), (1.0, 0.2), (1.0, 0.3)], c_r).is_err());
        assert!(SpeedSchedule::new(vec![(0.1, 0.0), (1.0, 0.2)], c_r).is_err());
        let s = SpeedSchedule::new(vec![(0.0, 0.0), (2.0, 0.4), (3.0, 0.5)], c_r).unwrap();
        assert!((s.speed(0) - 0.2).abs() < 1e-15 && (s.speed(1) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn profile_evaluation() {
        let p = StressProfile::table(vec![0.0, 1.0, 2.0], vec![[1.0, 0.0], [3.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(p.eval(0.5), [2.0, 0.5]);
        assert_eq!(p.eval(2.5), [0.0, 0.0]);
        let seg = Segment::Radiated { origin: 1.0, speed: 0.5, r_max: 2.0, g: vec![[1.0, 2.0]; 5] };
        let v = seg.eval(1.5);
        assert!((v[0] - 1.0).abs() < 1e-15 && (v[1] - 2.0).abs() < 1e-15);
        assert_eq!(seg.eval(3.5), [0.0, 0.0]);
    }

    #[test]
    fn constant_speed_point_load_is_weight_function() {
        let m = material();
        let st = CrackSetup::new(m, 0.5 * m.c_r, f64::INFINITY).unwrap();
        let sched = SpeedSchedule::constant(st.speed, 10.0, m.c_r).unwrap();
        let prof = StressProfile::point(0.5, [1.0, 0.0]).unwrap();
        let mut g = GrowthState::new(sched, st, prof, GrowthConfig::default()).unwrap();
        g.run().unwrap();
        let k = g.final_sifs(&[8.0]).unwrap()[0].1;
        let kern = PlaneKernel::new(&st).unwrap();
        let want = kern.time(8.0 - 0.5 / st.speed).unwrap()[0][0];
        assert!((k[0] - want).abs() < 1e-14 && k[1] == 0.0);
    }

    #[test]
    fn zero_load_radiates_nothing() {
        let m = material();
        let st = CrackSetup::new(m, 0.5 * m.c_r, f64::INFINITY).unwrap();
        let v = st.speed;
        let sched = SpeedSchedule::new(vec![(0.0, 0.0), (2.0, 2.0 * v), (4.0, 3.0 * v)], m.c_r).unwrap();
        let mut g = GrowthState::new(sched, st, StressProfile::default(), GrowthConfig::default()).unwrap();
        let r = g.advance_stage().unwrap();
        assert!(r.pi.iter().flatten().all(|v| *v == 0.0));
    }
}
