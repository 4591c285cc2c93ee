//! Flat `key = value` run configuration with command-line overrides.

use std::collections::BTreeMap;
use std::path::Path;

use dynsif::growth::{GrowthConfig, SpeedSchedule, StressProfile};
use dynsif::laplace::InversionConfig;
use dynsif::material::{CrackSetup, Material};
use dynsif::weights::SolverConfig;

use crate::CliError;

/// Every recognised key with its default; the manifest echoes all of them.
const DEFAULTS: &[(&str, &str)] = &[
    ("nu", "0.3"),
    ("c_l", "1"),
    ("mu", ""),
    ("rho", ""),
    ("speed_fraction", "0.5"),
    ("speed", ""),
    ("depth", "1"),
    ("x0", "0"),
    ("t_fixed", "10"),
    ("axis", ""),
    ("range", ""),
    ("collocation", "24"),
    ("circle_nodes", "400"),
    ("inv_a", "18.420680743952367"),
    ("inv_terms", "40"),
    ("euler_terms", "12"),
    ("schedule", ""),
    ("load_point", ""),
    ("stress_table", ""),
    ("radiated_points", "48"),
    ("omega_points", "1500"),
    ("quad_nodes", "48"),
    ("kernel_points", "80"),
    ("omega_span", "2.5"),
    ("det_threshold", "1e-8"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { values: DEFAULTS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect() }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::default();
        cfg.merge_text(&text)?;
        Ok(cfg)
    }

    pub fn merge_text(&mut self, text: &str) -> Result<(), CliError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match self.values.get_mut(key) {
            Some(slot) => {
                *slot = value.to_string();
                Ok(())
            }
            None => Err(CliError::Config(format!("unknown key '{key}'"))),
        }
    }

    pub fn values(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or("")
    }

    pub fn is_set(&self, key: &str) -> bool {
        !self.raw(key).is_empty()
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        let v = self.raw(key);
        let x = match v {
            "inf" | "infinity" | "Inf" => f64::INFINITY,
            _ => v.parse::<f64>().map_err(|_| CliError::Config(format!("{key}: '{v}' is not a number")))?,
        };
        if x.is_nan() {
            return Err(CliError::Config(format!("{key} is NaN")));
        }
        Ok(x)
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        let v = self.raw(key);
        v.parse::<usize>().map_err(|_| CliError::Config(format!("{key}: '{v}' is not a positive integer")))
    }

    fn positive(&self, key: &str) -> Result<f64, CliError> {
        let x = self.f64(key)?;
        if !(x > 0.0) {
            return Err(CliError::Config(format!("{key} must be positive")));
        }
        Ok(x)
    }

    pub fn material(&self) -> Result<Material<f64>, CliError> {
        let nu = self.f64("nu")?;
        if self.is_set("mu") || self.is_set("rho") {
            Ok(Material::new(self.positive("mu")?, nu, self.positive("rho")?)?)
        } else {
            Ok(Material::from_longitudinal_speed(self.positive("c_l")?, nu)?)
        }
    }

    pub fn speed(&self, m: &Material<f64>) -> Result<f64, CliError> {
        if self.is_set("speed") {
            self.f64("speed")
        } else {
            Ok(self.f64("speed_fraction")? * m.c_r)
        }
    }

    pub fn setup(&self) -> Result<CrackSetup<f64>, CliError> {
        let m = self.material()?;
        let v = self.speed(&m)?;
        Ok(CrackSetup::new(m, v, self.positive("depth")?)?)
    }

    pub fn inversion(&self) -> Result<InversionConfig<f64>, CliError> {
        let c = InversionConfig { a: self.positive("inv_a")?, terms: self.usize("inv_terms")?, euler_terms: self.usize("euler_terms")? };
        c.validate()?;
        Ok(c)
    }

    pub fn solver(&self) -> Result<SolverConfig, CliError> {
        let c = SolverConfig {
            collocation: self.usize("collocation")?,
            circle_nodes: self.usize("circle_nodes")?,
            inversion: self.inversion()?,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn growth(&self) -> Result<GrowthConfig, CliError> {
        Ok(GrowthConfig {
            solver: self.solver()?,
            radiated_points: self.usize("radiated_points")?,
            omega_points: self.usize("omega_points")?,
            quad_nodes: self.usize("quad_nodes")?,
            kernel_points: self.usize("kernel_points")?,
            omega_span: self.positive("omega_span")?,
            det_threshold: self.positive("det_threshold")?,
        })
    }

    /// `t:l` pairs separated by commas; (0, 0) is prepended when absent.
    pub fn schedule(&self, c_r: f64) -> Result<SpeedSchedule, CliError> {
        if !self.is_set("schedule") {
            return Err(CliError::Config("schedule is required".into()));
        }
        let mut v = Vec::new();
        for item in self.raw("schedule").split(',') {
            let (t, l) = item
                .trim()
                .split_once(':')
                .ok_or_else(|| CliError::Config(format!("schedule entry '{item}' is not t:l")))?;
            let t: f64 = t.trim().parse().map_err(|_| CliError::Config(format!("bad time in '{item}'")))?;
            let l: f64 = l.trim().parse().map_err(|_| CliError::Config(format!("bad length in '{item}'")))?;
            v.push((t, l));
        }
        if v.first() != Some(&(0.0, 0.0)) {
            v.insert(0, (0.0, 0.0));
        }
        Ok(SpeedSchedule::new(v, c_r)?)
    }

    /// Initial crack-line stresses from `load_point = x:f22:f12` and/or a
    /// `stress_table` file with columns x, sigma22, sigma12.
    pub fn initial_stress(&self) -> Result<StressProfile, CliError> {
        let mut prof = StressProfile::default();
        if self.is_set("stress_table") {
            let path = self.raw("stress_table");
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{path}: {e}")))?;
            let (mut x, mut s) = (Vec::new(), Vec::new());
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let cols: Vec<&str> = line.split(',').map(str::trim).collect();
                let nums: Result<Vec<f64>, _> = cols.iter().map(|c| c.parse::<f64>()).collect();
                match nums {
                    Ok(n) if n.len() == 3 => {
                        x.push(n[0]);
                        s.push([n[1], n[2]]);
                    }
                    Ok(_) => return Err(CliError::Config(format!("{path}: rows need x, sigma22, sigma12"))),
                    Err(_) if x.is_empty() => continue,
                    Err(_) => return Err(CliError::Config(format!("{path}: bad row '{line}'"))),
                }
            }
            prof = StressProfile::table(x, s)?;
        }
        if self.is_set("load_point") {
            let parts: Vec<&str> = self.raw("load_point").split(':').map(str::trim).collect();
            let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.parse::<f64>()).collect();
            match nums {
                Ok(n) if n.len() == 3 => {
                    let p = StressProfile::point(n[0], [n[1], n[2]])?;
                    prof.points.extend(p.points);
                }
                _ => return Err(CliError::Config("load_point must be x:f22:f12".into())),
            }
        }
        if prof.segments.is_empty() && prof.points.is_empty() {
            return Err(CliError::Config("crack growth needs load_point or stress_table".into()));
        }
        Ok(prof)
    }
}

/// Inclusive `A:B:STEP` grid.
pub fn parse_range(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || CliError::Config(format!("range '{text}' is not A:B:STEP"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let (a, b, h) = (nums[0], nums[1], nums[2]);
    if !(h > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
        return Err(CliError::Config(format!("range '{text}' needs A <= B and STEP > 0")));
    }
    let n = ((b - a) / h + 1e-9).floor() as usize;
    if n > 100_000 {
        return Err(CliError::Config(format!("range '{text}' has too many points")));
    }
    Ok((0..=n).map(|k| a + h * k as f64).collect())
}
