//! Randomized invariants of the mesh, reconstruction, assembly and norms.

use std::f64::consts::PI;

use proptest::prelude::*;
use rdgfv::norms::{h1_broken_seminorm, l2_norm, sip_norm, ErrorField, PiecewiseConstant, Reconstructed};
use rdgfv::problems::find;
use rdgfv::rational::{int, rat};
use rdgfv::reconstruction::{moment_basis, reconstruct_2d_cell, eval_tensor_poly};
use rdgfv::{
    apply_operator, assemble, build_mesh, derivative_flux_coeffs, gauss_rule, solve, AvgField, Bc, MultiIndex, Rational,
    RationalPoly, Reconstruction, SchemeConfig, SolveOptions,
};

fn zero(_: &[f64]) -> f64 {
    0.0
}

fn field(dim: usize, n: usize, m: usize, values: &[f64]) -> AvgField {
    let mesh = build_mesh(dim, n, m).unwrap();
    AvgField::from_interior(&mesh, &values[..mesh.num_cells()]).unwrap()
}

fn values(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, len)
}

fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=12).prop_map(|(a, b)| rat(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn linearization_round_trips(dim in 1usize..=2, n in 3usize..20) {
        let mesh = build_mesh(dim, n, 1).unwrap();
        for lin in 0..mesh.num_cells() {
            prop_assert_eq!(mesh.linear_index(&mesh.multi_index(lin)), Some(lin));
        }
        let faces = mesh.faces();
        prop_assert_eq!(faces.len(), dim * (n + 1) * n.pow(dim as u32 - 1));
        prop_assert_eq!(faces.iter().filter(|f| !f.is_boundary).count(), dim * (n - 1) * n.pow(dim as u32 - 1));
    }

    #[test]
    fn one_dimensional_reconstruction_is_exact(m in 1usize..=3, coeffs in prop::collection::vec(rational(), 7)) {
        let w = 2 * m + 1;
        let p = RationalPoly::new(coeffs[..w].to_vec());
        let avgs: Vec<Rational> = (-(m as i64)..=m as i64).map(|r| p.integrate(&int(r), &int(r + 1))).collect();
        let basis = moment_basis(m).unwrap();
        for x in [int(0), rat(1, 5), rat(1, 2), rat(7, 9), int(1)] {
            let r: Rational = basis.iter().zip(&avgs).map(|(phi, u)| phi.eval(&x) * u).sum();
            prop_assert_eq!(r, p.eval(&x));
        }
    }

    #[test]
    fn tensor_reconstruction_is_exact(m in 1usize..=2, cx in prop::collection::vec(rational(), 5), cy in prop::collection::vec(rational(), 5)) {
        let w = 2 * m + 1;
        let (px, py) = (RationalPoly::new(cx[..w].to_vec()), RationalPoly::new(cy[..w].to_vec()));
        let mean = |p: &RationalPoly, a: i64| p.integrate(&int(a), &int(a + 1));
        let grid: Vec<Vec<Rational>> = (0..w as i64)
            .map(|k| (0..w as i64).map(|l| mean(&px, k - m as i64) * mean(&py, l - m as i64)).collect())
            .collect();
        let c = reconstruct_2d_cell(m, &grid).unwrap();
        for (x, y) in [(int(0), int(1)), (rat(1, 3), rat(2, 3)), (int(1), rat(1, 7))] {
            prop_assert_eq!(eval_tensor_poly(&c, &x, &y), px.eval(&x) * py.eval(&y));
        }
    }

    #[test]
    fn periodic_normal_derivative_is_continuous(dim in 1usize..=2, m in 1usize..=2, n in 5usize..9, u in values(64)) {
        let f = Reconstructed::new(field(dim, n, m, &u), Bc::Periodic).unwrap();
        let nn = n as i64;
        let scale = n as f64;
        for cell in f.field.mesh().cells() {
            for axis in 0..dim {
                let mut up = cell.components().to_vec();
                up[axis] = (up[axis] + 1).rem_euclid(nn);
                let up = MultiIndex::from_slice(&up);
                for t in [0.1, 0.5, 0.8] {
                    let (mut lo, mut hi) = ([t, t], [t, t]);
                    lo[axis] = 1.0;
                    hi[axis] = 0.0;
                    let a = f.recon.gradient(&f.field, &cell, lo)[axis];
                    let b = f.recon.gradient(&f.field, &up, hi)[axis];
                    prop_assert!((a - b).abs() <= 1e-12 * scale, "{} vs {}", a, b);
                }
            }
        }
    }

    #[test]
    fn face_flux_is_gamma_weighted_difference(m in 1usize..=2, n in 5usize..8, u in values(64)) {
        // ∫ ∂_x̂ R(1, ŷ) dŷ over an x-face equals Σ γ_k D along the row
        let f = Reconstructed::new(field(2, n, m, &u), Bc::Periodic).unwrap();
        let gamma = derivative_flux_coeffs(m).unwrap();
        let rule = gauss_rule(2 * m + 2).unwrap();
        let h = 1.0 / n as f64;
        let nn = n as i64;
        let at = |i: i64, j: i64| f.field.get(&MultiIndex::d2(i.rem_euclid(nn), j));
        for j in 0..nn {
            for i in 0..nn {
                let cell = MultiIndex::d2(i, j);
                let quad = rule.integrate(|y| f.recon.gradient(&f.field, &cell, [1.0, y])[0] * h);
                let formula: f64 = (-(m as i64) + 1..m as i64)
                    .map(|k| rdgfv::rational::to_f64(gamma.gamma_at(k)) * (at(i + 1 + k, j) - at(i + k, j)))
                    .sum();
                prop_assert!((quad - formula).abs() <= 1e-12, "{} vs {}", quad, formula);
            }
        }
    }

    #[test]
    fn matrix_free_matches_assembly(dim in 1usize..=2, periodic in any::<bool>(), n in 5usize..9, eta in -1.4f64..4.9, u in values(64)) {
        let (bc, order) = if periodic { (Bc::Periodic, 4) } else { (Bc::Dirichlet, 2) };
        let cfg = SchemeConfig::new(dim, bc, order, n).with_eta(eta);
        let sys = assemble(&cfg, &zero).unwrap();
        let fld = field(dim, n, cfg.m(), &u);
        let free = apply_operator(&cfg, &fld).unwrap();
        let mut x = fld.interior_values();
        if sys.has_multiplier() {
            x.push(0.0);
        }
        let dense = sys.matvec(&x);
        let scale = free.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        for (a, b) in free.iter().zip(&dense) {
            prop_assert!((a - b).abs() <= 1e-13 * scale);
        }
    }

    #[test]
    fn periodic_rows_annihilate_constants(dim in 1usize..=2, order in prop::sample::select(vec![2usize, 4]), n in 5usize..10, c in -3.0f64..3.0, eta in -1.4f64..4.9) {
        let cfg = SchemeConfig::new(dim, Bc::Periodic, order, n).with_eta(eta);
        let sys = assemble(&cfg, &zero).unwrap();
        let mut x = vec![c; sys.cells];
        x.push(0.0);
        let y = sys.matvec(&x);
        for v in &y[..sys.cells] {
            prop_assert!(v.abs() <= 1e-11 * (1.0 + c.abs()) * n as f64);
        }
    }

    #[test]
    fn solve_then_apply_reproduces_rhs(dim in 1usize..=2, periodic in any::<bool>(), n in 5usize..12, eta in -1.4f64..4.9) {
        let (bc, problem) = match (dim, periodic) {
            (1, false) => (Bc::Dirichlet, "xsinpix"),
            (1, true) => (Bc::Periodic, "sin2pix"),
            (_, false) => (Bc::Dirichlet, "xsinpix-ysinpiy"),
            (_, true) => (Bc::Periodic, "sin2pix-sin4piy"),
        };
        let cfg = SchemeConfig::new(dim, bc, 2, n).with_eta(eta);
        let sys = assemble(&cfg, &find(problem).unwrap().f).unwrap();
        let opts = SolveOptions::default();
        let sol = solve(&sys, &opts).unwrap();
        let fld = field(dim, n, 1, &sol.solution);
        let applied = apply_operator(&cfg, &fld).unwrap();
        let lambda = sol.solution.get(sys.cells).copied().unwrap_or(0.0);
        let h = 1.0 / n as f64;
        let bnorm = sys.rhs.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
        let r: f64 = applied
            .iter()
            .zip(&sys.rhs)
            .map(|(a, b)| {
                let a = if sys.has_multiplier() { a + h.powi(dim as i32) * lambda } else { *a };
                (a - b).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        prop_assert!(r / bnorm <= 1e-11, "{}", r / bnorm);
    }
}

#[test]
fn dirichlet_matrix_is_solvable_across_eta() {
    for eta in [-1.4, 0.0, 1.0, 4.9] {
        for n in [8, 16, 32] {
            for dim in 1..=2 {
                let cfg = SchemeConfig::new(dim, Bc::Dirichlet, 2, n).with_eta(eta);
                let sys = assemble(&cfg, &|x: &[f64]| x.iter().product::<f64>() + 1.0).unwrap();
                let r = solve(&sys, &SolveOptions::default()).unwrap();
                assert!(r.relative_residual <= 1e-12, "eta={eta} n={n} d={dim}");
            }
        }
    }
}

fn interpolation_errors(m: usize, n: usize) -> (f64, f64) {
    let mesh = build_mesh(1, n, m).unwrap();
    let rule = gauss_rule(2 * m + 4).unwrap();
    let u = |x: &[f64]| (2.0 * PI * x[0]).sin();
    let grad = |x: &[f64]| [2.0 * PI * (2.0 * PI * x[0]).cos(), 0.0];
    let avgs = AvgField::from_function(&mesh, u, &rule);
    let r = Reconstructed::new(avgs, Bc::Periodic).unwrap();
    let e = ErrorField { uh: &r, u: &u, grad: &grad };
    (l2_norm(&e, &rule), h1_broken_seminorm(&e, &rule))
}

#[test]
fn reconstruction_approximation_orders() {
    for m in 1..=2 {
        let k = 2 * m;
        let errs: Vec<(f64, f64)> = [16, 32, 64, 128, 256].iter().map(|&n| interpolation_errors(m, n)).collect();
        // first three refinements; m = 2 nears roundoff in L² at N = 256
        for w in errs.windows(2).take(3) {
            let l2 = (w[0].0 / w[1].0).log2();
            let h1 = (w[0].1 / w[1].1).log2();
            assert!((l2 - (k + 1) as f64).abs() < 0.25, "m={m} l2 rate {l2}");
            assert!((h1 - k as f64).abs() < 0.25, "m={m} h1 rate {h1}");
        }
    }
}

#[test]
fn reconstruction_is_bounded_in_sip() {
    // ‖u‖_sip ≤ C ‖R² u‖_sip for piecewise-constant u, with C independent of N
    let rule = gauss_rule(4).unwrap();
    let mut worst = Vec::new();
    for n in [8, 16, 32, 64] {
        let mesh = build_mesh(1, n, 1).unwrap();
        let mut c: f64 = 0.0;
        for s in 0..20u64 {
            let vals: Vec<f64> = (0..n).map(|i| ((i as f64 + 1.0) * (s as f64 + 0.61)).sin()).collect();
            let pc = PiecewiseConstant { mesh, values: vals.clone(), periodic: false };
            let rec = Reconstructed::new(AvgField::from_interior(&mesh, &vals).unwrap(), Bc::Dirichlet).unwrap();
            c = c.max(sip_norm(&pc, &rule) / sip_norm(&rec, &rule));
        }
        worst.push(c);
    }
    let (lo, hi) = worst.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(hi / lo < 1.25, "{worst:?}");
}

#[test]
fn reconstruction_engine_rejects_bad_dimension() {
    assert!(Reconstruction::new(1, 3).is_err());
}
