use dynsif::integral::{KernelTable, LoadSpec};
use dynsif::kernel::DiagonalFactor;
use dynsif::laplace::{try_invert_euler_delayed, InversionConfig};
use dynsif::material::{CrackSetup, Material, Mode};
use dynsif::plane::PlaneSolver;
use dynsif::weights::{reflection_timing, sweep, Axis, SolverConfig, WeightSolver};
use dynsif::C64;

fn setup(frac: f64, depth: f64) -> CrackSetup<f64> {
    let m = Material::from_longitudinal_speed(1.0, 0.3).unwrap();
    CrackSetup::new(m, frac * m.c_r, depth).unwrap()
}

fn plane_pair(frac: f64) -> [f64; 2] {
    let p = PlaneSolver::new(setup(frac, f64::INFINITY)).unwrap();
    [p.weight_scalar(Mode::I).unwrap(), p.weight_scalar(Mode::II).unwrap()]
}

fn small() -> SolverConfig {
    SolverConfig { collocation: 12, circle_nodes: 200, inversion: InversionConfig { a: 8.0 * 10f64.ln(), terms: 24, euler_terms: 8 } }
}

#[test]
fn off_diagonals_vanish_before_reflection() {
    for (frac, depth) in [(0.5, 1.0), (0.3, 2.0), (0.8, 1.5)] {
        let st = setup(frac, depth);
        let two_tl = 2.0 * reflection_timing(&st).unwrap().t_l;
        let plane = plane_pair(frac);
        let solver = WeightSolver::new(st, SolverConfig { collocation: 16, ..Default::default() }).unwrap();
        for t in [0.4 * two_tl, 0.9 * two_tl] {
            let w = solver.sample(t).unwrap().w;
            assert!(w[0][1].abs() <= 5e-3 && w[1][0].abs() <= 5e-3, "V={frac}c_R δ={depth} t={t}: {w:?}");
            for k in 0..2 {
                assert!((w[k][k] / plane[k] - 1.0).abs() < 0.02, "V={frac}c_R δ={depth} t={t}: {w:?} vs {plane:?}");
            }
        }
    }
}

#[test]
fn deep_layer_reproduces_plane() {
    let plane = plane_pair(0.5);
    let solver = WeightSolver::new(setup(0.5, 20.0), SolverConfig::default()).unwrap();
    let w = solver.sample(10.0).unwrap().w;
    assert!((w[0][0] / plane[0] - 1.0).abs() < 0.01, "{w:?}");
    assert!((w[1][1] / plane[1] - 1.0).abs() < 0.01, "{w:?}");
    assert!(w[0][1].abs() < 0.01 * plane[0] && w[1][0].abs() < 0.01 * plane[1], "{w:?}");
}

#[test]
fn shift_matches_offset_load_solves() {
    let st = setup(0.5, 1.0);
    let cfg = small();
    let solver = WeightSolver::new(st, cfg).unwrap();
    let v = st.speed;
    let pairs = [(0.05, 0.5), (0.05, 2.0), (0.1, 0.8), (0.1, 2.5), (0.2, 0.6), (0.2, 3.0), (0.3, 1.0), (0.3, 2.2), (0.5, 0.7), (0.5, 4.0)];
    for (x0, after) in pairs {
        let t = x0 / v + after;
        for (j, load) in [(Mode::I, LoadSpec::NormalPoint { x0 }), (Mode::II, LoadSpec::ShearPoint { x0 })] {
            let direct = |i: Mode| {
                try_invert_euler_delayed(
                    |s: C64| {
                        let f = DiagonalFactor::new(s, &st, cfg.circle_nodes)?;
                        let r = KernelTable::new(&f, cfg.collocation)?.solve(&load)?;
                        Ok(if i == Mode::I { r.k_i } else { r.k_ii })
                    },
                    t,
                    x0 / v,
                    &cfg.inversion,
                )
                .unwrap()
            };
            for i in Mode::BOTH {
                let a = direct(i);
                let b = solver.weight_function(i, j, x0, t).unwrap();
                let scale = solver.weight_function(j, j, x0, t).unwrap().abs();
                assert!((a - b).abs() <= 1e-6 * scale, "x0={x0} t={t} {i:?}{j:?}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn transform_matrix_is_invertible() {
    let solver = WeightSolver::new(setup(0.5, 1.0), SolverConfig::default()).unwrap();
    let mut lowest = f64::INFINITY;
    for t in [0.5, 2.0, 8.0] {
        for s in solver.config().inversion.abscissae(t) {
            let w = solver.transforms(s).unwrap();
            let det = w[0][0] * w[1][1] - w[0][1] * w[1][0];
            let size = (w[0][0] * w[1][1]).norm() + (w[0][1] * w[1][0]).norm();
            lowest = lowest.min(det.norm() / size);
        }
    }
    eprintln!("minimum relative determinant {lowest:.4}");
    assert!(lowest > 1e-3, "{lowest}");
}

#[test]
fn speed_sweep_trends() {
    let st = setup(0.5, 1.0);
    let fracs = [0.05, 0.3, 0.5, 0.7, 0.95];
    let table = sweep(Axis::Speed, &fracs, &st, small(), 10.0).unwrap();
    let off: Vec<f64> = table.rows.iter().map(|r| r.sample.w[0][1].abs()).collect();
    let peak = off.iter().cloned().fold(0.0, f64::max);
    assert!(peak > 0.0);
    assert!(off[0] < 0.2 * peak && off[4] < 0.2 * peak, "{off:?}");
    let diag: Vec<f64> = table.rows.iter().map(|r| r.sample.w[0][0]).collect();
    assert!(diag[0] > 0.9, "{diag:?}");
}
