use dynsif::integral::{kernel_dominance, KernelTable, KstarGrid, LoadSpec};
use dynsif::kernel::{matrix_entries, DiagonalFactor};
use dynsif::material::{CrackSetup, Material};
use dynsif::quadrature::{integrate, Tolerance};
use dynsif::C64;

fn setup(frac: f64, depth: f64) -> CrackSetup<f64> {
    let m = Material::from_longitudinal_speed(1.0, 0.3).unwrap();
    CrackSetup::new(m, frac * m.c_r, depth).unwrap()
}

#[test]
fn deep_symbols_match_plane() {
    let s = C64::new(0.5, 1.0);
    for k in 0..=80 {
        let p = -10.0 + 0.25 * k as f64;
        let a = matrix_entries(p, s, &setup(0.5, 20.0));
        let b = matrix_entries(p, s, &setup(0.5, f64::INFINITY));
        assert!((a.pg11 - b.pg11).norm() < 1e-4 * b.pg11.norm());
        assert!((a.pg22 - b.pg22).norm() < 1e-4 * b.pg22.norm());
        assert!(a.g12.norm() < 1e-4 * b.pg11.norm().max(1.0));
    }
}

fn chi(j: usize, x: f64) -> C64 {
    let e = (x / 2.0).exp();
    if j == 1 {
        C64::new(e * x.cos(), 0.0)
    } else {
        C64::new(0.0, x * e)
    }
}

/// Node errors (max over nodes, endpoint) of the manufactured problem.
fn manufactured_errors(depth: f64, n: usize) -> (f64, f64) {
    let st = setup(0.5, depth);
    let f = DiagonalFactor::new(C64::new(0.5, 1.0), &st, 400).unwrap();
    let table = KernelTable::new(&f, n).unwrap();
    let grid = KstarGrid::new(&f, 200.0);
    let g = st.gamma();
    let tol = Tolerance { abs: 1e-14, rel: 1e-11, max_intervals: 4000 };
    // K_1 couples χ_2 into row 1 and K_2 couples χ_1 into row 2
    let q = |row: usize, x: f64| -> C64 {
        let other = 3 - row;
        let lo = (x - 150.0).floor();
        let hi = (x + 150.0).min(0.0);
        let mut conv = C64::new(0.0, 0.0);
        let mut a = lo;
        while a < hi {
            let b = (a + 1.0).min(hi);
            conv += integrate(|xi: f64| grid.eval(row, x - xi) * chi(other, xi), a, b, &tol).unwrap();
            a = b;
        }
        -(chi(row, x) * g[row - 1] + conv)
    };
    let q1: Vec<C64> = table.x.iter().map(|&x| q(1, x)).collect();
    let q2: Vec<C64> = table.x.iter().map(|&x| q(2, x)).collect();
    let (x1, x2) = table.solve_rhs(&q1, &q2).unwrap();
    let (mut worst, mut end) = (0.0f64, 0.0);
    for (k, &x) in table.x.iter().enumerate() {
        let e = (x1[k] - chi(1, x)).norm().max((x2[k] - chi(2, x)).norm());
        worst = worst.max(e);
        if x == 0.0 {
            end = e;
        }
    }
    (worst, end)
}

#[test]
fn manufactured_solution_is_recovered() {
    let (worst, end) = manufactured_errors(1.0, 32);
    assert!(worst < 1e-8, "worst node error {worst:.3e}, endpoint {end:.3e}");
}

#[test]
fn manufactured_endpoint_converges() {
    let (_, e32) = manufactured_errors(1.0, 32);
    let (_, e64) = manufactured_errors(1.0, 64);
    assert!(e64 < 1e-8 && e64 < e32 / 100.0, "{e32:.3e} -> {e64:.3e}");
    let (w3, e3) = manufactured_errors(3.0, 32);
    assert!(w3 < 1e-4 && e3 < 1e-7, "deep layer: {w3:.3e} {e3:.3e}");
}

#[test]
fn collocation_converges_in_n() {
    let st = setup(0.5, 1.0);
    for s in [C64::new(0.5, 1.0), C64::new(2.0, -3.0)] {
        let f = DiagonalFactor::new(s, &st, 400).unwrap();
        let load = LoadSpec::NormalPoint { x0: 0.0 };
        let a = KernelTable::new(&f, 16).unwrap().solve(&load).unwrap();
        let b = KernelTable::new(&f, 32).unwrap().solve(&load).unwrap();
        let scale = b.chi1.norm().max(b.chi2.norm());
        for (u, v) in [(a.chi1, b.chi1), (a.chi2, b.chi2)] {
            assert!((u - v).norm() < 1e-5 * scale, "{s}: {u} {v}");
        }
    }
}

#[test]
fn second_kind_dominance() {
    for depth in [0.5, 1.0, 3.0] {
        let f = DiagonalFactor::new(C64::new(0.5, 1.0), &setup(0.5, depth), 400).unwrap();
        let d = kernel_dominance(&f);
        assert!(d < 1.0, "depth {depth}: {d}");
    }
}

#[test]
fn integer_reciprocal_speed_is_regular() {
    let m = Material::from_longitudinal_speed(1.0, 0.3).unwrap();
    let s = C64::new(0.8, 0.5);
    let solve = |v: f64| {
        let st = CrackSetup::new(m, v, 1.0).unwrap();
        let f = DiagonalFactor::new(s, &st, 200).unwrap();
        KernelTable::new(&f, 16).unwrap().solve(&LoadSpec::NormalPoint { x0: 0.0 }).unwrap()
    };
    let at = solve(0.2);
    let near = solve(0.2 * (1.0 + 1e-7));
    assert!(at.k_i.norm().is_finite() && at.k_i.norm() > 0.0);
    assert!((at.k_i - near.k_i).norm() < 1e-5 * at.k_i.norm());
}
