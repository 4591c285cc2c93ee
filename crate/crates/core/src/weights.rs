//! The four half-plane weight functions W_{i,j}(x0, t), their transforms,
//! dimensionless forms w = √(π(Vt − x0)/2)·W and parameter sweeps.
//!
//! Index convention: `[i][j]` with i the SIF mode and j the load mode,
//! 0 for I (normal load) and 1 for II (shear load).

use crate::error::{Error, Result};
use crate::integral::{KernelTable, LoadSpec};
use crate::kernel::DiagonalFactor;
use crate::laplace::InversionConfig;
use crate::material::{CrackSetup, Mode};
use num_complex::Complex;
use std::collections::HashMap;
use std::sync::Mutex;

type C64 = Complex<f64>;

/// Numerical knobs of the half-plane pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub collocation: usize,
    pub circle_nodes: usize,
    pub inversion: InversionConfig<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { collocation: 24, circle_nodes: 400, inversion: InversionConfig::default() }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.collocation < 8 {
            return Err(Error::input("collocation must be at least 8"));
        }
        if self.circle_nodes < 2 {
            return Err(Error::input("circle nodes must be at least 2"));
        }
        self.inversion.validate()
    }
}

fn slot(m: Mode) -> usize {
    match m {
        Mode::I => 0,
        Mode::II => 1,
    }
}

/// Weight transforms at x0 = 0, cached per abscissa s.
#[derive(Debug)]
pub struct WeightSolver {
    setup: CrackSetup<f64>,
    cfg: SolverConfig,
    cache: Mutex<HashMap<(u64, u64), [[C64; 2]; 2]>>,
}

impl Clone for WeightSolver {
    fn clone(&self) -> Self {
        let cache = self.cache.lock().map(|c| c.clone()).unwrap_or_default();
        Self { setup: self.setup, cfg: self.cfg, cache: Mutex::new(cache) }
    }
}

impl WeightSolver {
    pub fn new(setup: CrackSetup<f64>, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { setup, cfg, cache: Mutex::new(HashMap::new()) })
    }

    pub fn setup(&self) -> &CrackSetup<f64> {
        &self.setup
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn cached(&self) -> usize {
        self.cache.lock().map(|c| c.len()).unwrap_or(0)
    }

    /// All four Ŵ_{i,j}(0, s).
    pub fn transforms(&self, s: C64) -> Result<[[C64; 2]; 2]> {
        let key = (s.re.to_bits(), s.im.to_bits());
        if let Some(v) = self.cache.lock().ok().and_then(|c| c.get(&key).copied()) {
            return Ok(v);
        }
        let f = DiagonalFactor::new(s, &self.setup, self.cfg.circle_nodes)?;
        let table = KernelTable::new(&f, self.cfg.collocation)?;
        let n = table.solve(&LoadSpec::NormalPoint { x0: 0.0 })?;
        let t = table.solve(&LoadSpec::ShearPoint { x0: 0.0 })?;
        let v = [[n.k_i, t.k_i], [n.k_ii, t.k_ii]];
        if let Ok(mut c) = self.cache.lock() {
            c.insert(key, v);
        }
        Ok(v)
    }

    /// Ŵ_{i,j}(x0, s) = e^{−s x0/V} Ŵ_{i,j}(0, s).
    pub fn weight_transform(&self, i: Mode, j: Mode, x0: f64, s: C64) -> Result<C64> {
        if !(s.re > 0.0) {
            return Err(Error::domain("weight transform needs Re s > 0"));
        }
        let w = self.transforms(s)?[slot(i)][slot(j)];
        Ok(w * (-s * (x0 / self.setup.speed)).exp())
    }

    /// All four W_{i,j}(0, t) from one set of Bromwich samples.
    pub fn weight_functions_origin(&self, t: f64) -> Result<[[f64; 2]; 2]> {
        if !(t > 0.0) {
            return Err(Error::domain("weight functions need t > 0"));
        }
        let inv = &self.cfg.inversion;
        let abs = inv.abscissae(t);
        let mut vals = vec![[[C64::new(0.0, 0.0); 2]; 2]; abs.len()];
        for (k, &s) in abs.iter().enumerate() {
            vals[k] = self.transforms(s)?;
        }
        let mut out = [[0.0; 2]; 2];
        for (a, row) in out.iter_mut().enumerate() {
            for (b, cell) in row.iter_mut().enumerate() {
                let series: Vec<C64> = vals.iter().map(|v| v[a][b]).collect();
                *cell = inv.combine(t, &series);
            }
        }
        Ok(out)
    }

    /// W_{i,j}(x0, t) = W_{i,j}(0, t − x0/V), zero before the tip reaches x0.
    pub fn weight_function(&self, i: Mode, j: Mode, x0: f64, t: f64) -> Result<f64> {
        let tau = t - x0 / self.setup.speed;
        if tau <= 0.0 {
            return Ok(0.0);
        }
        Ok(self.weight_functions_origin(tau)?[slot(i)][slot(j)])
    }

    /// Dimensionless w_{i,j}(x0, t).
    pub fn dimensionless(&self, i: Mode, j: Mode, x0: f64, t: f64) -> Result<f64> {
        let w = self.weight_function(i, j, x0, t)?;
        Ok(dimensionless(w, self.setup.speed, t, x0))
    }

    /// All four dimensionless w_{i,j}(0, t) together with W.
    pub fn sample(&self, t: f64) -> Result<WeightSample> {
        let big = self.weight_functions_origin(t)?;
        let mut w = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                w[a][b] = dimensionless(big[a][b], self.setup.speed, t, 0.0);
            }
        }
        Ok(WeightSample { w, big })
    }
}

/// w = √(π(Vt − x0)/2)·W.
pub fn dimensionless(big_w: f64, speed: f64, t: f64, x0: f64) -> f64 {
    let d = speed * t - x0;
    if d <= 0.0 {
        0.0
    } else {
        (std::f64::consts::PI * d / 2.0).sqrt() * big_w
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSample {
    pub w: [[f64; 2]; 2],
    pub big: [[f64; 2]; 2],
}

/// Time at which a longitudinal wave reflected from the edge first meets the
/// moving tip is 2t_l; θ is the angle of incidence at the edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionTiming {
    pub t_l: f64,
    pub theta: f64,
}

pub fn reflection_timing(setup: &CrackSetup<f64>) -> Result<ReflectionTiming> {
    let c = setup.material.c_l;
    let v = setup.speed;
    if !(v < c) {
        return Err(Error::domain("reflection timing needs V < c_l"));
    }
    let t_l = setup.depth / (c * c - v * v).sqrt();
    let vl = setup.v_l();
    let theta = if vl == 0.0 {
        std::f64::consts::FRAC_PI_2
    } else {
        std::f64::consts::FRAC_PI_2 + (1.0 / (1.0 / (vl * vl) - 1.0).sqrt()).atan()
    };
    Ok(ReflectionTiming { t_l, theta })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Time,
    Speed,
    Depth,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Time => "time",
            Axis::Speed => "speed",
            Axis::Depth => "depth",
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "time" => Ok(Axis::Time),
            "speed" => Ok(Axis::Speed),
            "depth" => Ok(Axis::Depth),
            _ => Err(Error::input(format!("unknown axis '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightRow {
    pub coordinate: f64,
    pub sample: WeightSample,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    pub axis: Axis,
    pub setup: CrackSetup<f64>,
    pub rows: Vec<WeightRow>,
}

/// Tabulates w_{i,j}(0, t) against time, V/c_R or δ. For the speed and
/// depth axes the observation time is `t_fixed`.
pub fn sweep(axis: Axis, coords: &[f64], setup: &CrackSetup<f64>, cfg: SolverConfig, t_fixed: f64) -> Result<WeightTable> {
    let mut rows = Vec::with_capacity(coords.len());
    match axis {
        Axis::Time => {
            let solver = WeightSolver::new(*setup, cfg)?;
            for &t in coords {
                rows.push(WeightRow { coordinate: t, sample: solver.sample(t)? });
            }
        }
        Axis::Speed => {
            for &frac in coords {
                let st = CrackSetup::new(setup.material, frac * setup.material.c_r, setup.depth)?;
                let solver = WeightSolver::new(st, cfg)?;
                rows.push(WeightRow { coordinate: frac, sample: solver.sample(t_fixed)? });
            }
        }
        Axis::Depth => {
            for &d in coords {
                let st = CrackSetup::new(setup.material, setup.speed, d)?;
                let solver = WeightSolver::new(st, cfg)?;
                rows.push(WeightRow { coordinate: d, sample: solver.sample(t_fixed)? });
            }
        }
    }
    Ok(WeightTable { axis, setup: *setup, rows })
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
    fn timing_values() {
        let r = reflection_timing(&setup(1.0)).unwrap();
        assert!((2.0 * r.t_l - 2.0644).abs() < 1e-4);
        assert!((r.theta - 1.8213).abs() < 1e-4);
        let r2 = reflection_timing(&setup(2.0)).unwrap();
        assert!((r2.t_l - 2.0 * r.t_l).abs() < 1e-14);
    }

    #[test]
    fn shift_is_exact() {
        let solver = WeightSolver::new(setup(1.0), SolverConfig { circle_nodes: 100, collocation: 8, ..Default::default() }).unwrap();
        let s = C64::new(0.9, 0.4);
        let a = solver.weight_transform(Mode::I, Mode::I, 0.0, s).unwrap();
        let b = solver.weight_transform(Mode::I, Mode::I, 0.3, s).unwrap();
        let want = (-s * (0.3 / solver.setup().speed)).exp();
        assert!((b / a - want).norm() < 1e-14);
        assert_eq!(solver.cached(), 1);
    }

    #[test]
    fn conjugate_abscissae_give_conjugate_transforms() {
        let solver = WeightSolver::new(setup(1.0), SolverConfig { circle_nodes: 200, collocation: 12, ..Default::default() }).unwrap();
        let s = C64::new(0.7, 1.3);
        let a = solver.transforms(s).unwrap();
        let b = solver.transforms(s.conj()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[i][j] - b[i][j].conj()).norm() < 1e-9 * a[i][j].norm().max(1e-12));
            }
        }
    }
}
