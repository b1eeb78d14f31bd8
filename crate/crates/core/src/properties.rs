//! Seeded randomized checks of the reconstruction: polynomial exactness,
//! normal-derivative continuity and discrete norm equivalence.

use std::fmt;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::{gauss_rule, RationalPoly};
use crate::error::Result;
use crate::mesh::{build_mesh, MultiIndex};
use crate::norms::{one_h_seminorm, sip_norm, Reconstructed};
use crate::rational::{int, rat, to_f64, Rational};
use crate::reconstruction::{moment_basis, reconstruct_2d_cell, AvgField, Bc, Reconstruction};

/// Float tolerance for exactness and continuity, relative to the field scale.
pub const FLOAT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyReport {
    pub name: &'static str,
    pub dim: usize,
    pub m: usize,
    pub trials: usize,
    /// Trials whose exact-arithmetic check failed.
    pub exact_failures: usize,
    /// Largest scaled float discrepancy.
    pub max_error: f64,
    pub tolerance: f64,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.exact_failures == 0 && self.max_error <= self.tolerance
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} d={} m={} trials={} exact_failures={} max_error={:.3e} tol={:.0e} {}",
            self.name,
            self.dim,
            self.m,
            self.trials,
            self.exact_failures,
            self.max_error,
            self.tolerance,
            if self.passed() { "pass" } else { "fail" }
        )
    }
}

fn rng(seed: u64, dim: usize, m: usize, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (salt << 32) ^ ((dim as u64) << 8) ^ m as u64)
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(-20..=20), rng.gen_range(1..=9))
}

/// Exact mean of `p` over `[a, a+1]`.
fn mean(p: &RationalPoly, a: i64) -> Rational {
    p.integrate(&int(a), &int(a + 1))
}

/// Degree-`2m` (per axis) polynomials: averages on the centred window are
/// reconstructed exactly in rationals and to [`FLOAT_TOL`] in floats.
pub fn k_exactness(seed: u64, dim: usize, m: usize, trials: usize) -> Result<PropertyReport> {
    let mut rng = rng(seed, dim, m, 1);
    let w = 2 * m + 1;
    let recon = Reconstruction::new(m, dim)?;
    let basis = moment_basis(m)?;
    let probes: Vec<Rational> = vec![int(0), rat(1, 3), rat(1, 2), rat(5, 7), int(1)];
    let mut exact_failures = 0;
    let mut max_error: f64 = 0.0;
    for _ in 0..trials {
        // tensor product of two 1D factors plus a second product term, so
        // the 2D polynomial is not rank one
        let factor = |rng: &mut ChaCha8Rng| RationalPoly::new((0..w).map(|_| random_rational(rng)).collect());
        let terms: Vec<(RationalPoly, RationalPoly)> = if dim == 1 {
            vec![(factor(&mut rng), RationalPoly::constant(int(1)))]
        } else {
            (0..2).map(|_| (factor(&mut rng), factor(&mut rng))).collect()
        };
        let exact_at = |x: &Rational, y: &Rational| -> Rational {
            terms.iter().fold(Rational::zero(), |acc, (p, q)| acc + p.eval(x) * q.eval(y))
        };
        // averages, first axis fastest
        let avgs: Vec<Rational> = (0..w.pow(dim as u32))
            .map(|k| {
                let (a, b) = ((k % w) as i64 - m as i64, (k / w) as i64 - m as i64);
                terms.iter().fold(Rational::zero(), |acc, (p, q)| {
                    let qy = if dim == 1 { int(1) } else { mean(q, b) };
                    acc + mean(p, a) * qy
                })
            })
            .collect();
        let scale = avgs.iter().map(|v| to_f64(&v.abs())).fold(1.0, f64::max);
        let window_f64: Vec<f64> = avgs.iter().map(to_f64).collect();

        let ok = if dim == 1 {
            probes.iter().all(|x| {
                let r = basis.iter().zip(&avgs).fold(Rational::zero(), |acc, (phi, u)| acc + phi.eval(x) * u);
                r == exact_at(x, &int(0))
            })
        } else {
            let grid: Vec<Vec<Rational>> = (0..w).map(|k| (0..w).map(|l| avgs[l * w + k].clone()).collect()).collect();
            match reconstruct_2d_cell(m, &grid) {
                Ok(c) => probes
                    .iter()
                    .all(|x| probes.iter().all(|y| crate::reconstruction::eval_tensor_poly(&c, x, y) == exact_at(x, y))),
                Err(_) => false,
            }
        };
        if !ok {
            exact_failures += 1;
        }
        for x in &probes {
            let ys: &[Rational] = if dim == 1 { &probes[..1] } else { &probes };
            for y in ys {
                let got = recon.value_from_window(&window_f64, [to_f64(x), to_f64(y)]);
                let want = to_f64(&exact_at(x, if dim == 1 { &probes[0] } else { y }));
                max_error = max_error.max((got - want).abs() / scale);
            }
        }
    }
    Ok(PropertyReport {
        name: "k_exactness",
        dim,
        m,
        trials,
        exact_failures,
        max_error,
        tolerance: FLOAT_TOL,
    })
}

fn random_periodic_field(rng: &mut ChaCha8Rng, dim: usize, n: usize, m: usize) -> Result<AvgField> {
    let mesh = build_mesh(dim, n, m)?;
    let values: Vec<f64> = (0..mesh.num_cells()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    AvgField::from_interior(&mesh, &values)
}

/// Random periodic fields: the normal derivative of `R^k ū` is continuous
/// across every face at every quadrature point. The scale is `max|ū| / h`.
pub fn jump_continuity(seed: u64, dim: usize, m: usize, n: usize, trials: usize) -> Result<PropertyReport> {
    let mut rng = rng(seed, dim, m, 2);
    let rule = gauss_rule(2 * m + 2)?;
    let tangential: Vec<f64> = if dim == 1 { vec![0.0] } else { rule.nodes.clone() };
    let nn = n as i64;
    let mut max_error: f64 = 0.0;
    for _ in 0..trials {
        let field = random_periodic_field(&mut rng, dim, n, m)?;
        let scale = field.interior_values().iter().fold(0.0f64, |a, v| a.max(v.abs())) * n as f64;
        let r = Reconstructed::new(field, Bc::Periodic)?;
        for cell in r.field.mesh().cells() {
            for axis in 0..dim {
                let mut up: Vec<i64> = cell.components().to_vec();
                up[axis] = (up[axis] + 1).rem_euclid(nn);
                let up = MultiIndex::from_slice(&up);
                for &t in &tangential {
                    let (mut lo, mut hi) = ([t, t], [t, t]);
                    lo[axis] = 1.0;
                    hi[axis] = 0.0;
                    let a = r.recon.gradient(&r.field, &cell, lo)[axis];
                    let b = r.recon.gradient(&r.field, &up, hi)[axis];
                    max_error = max_error.max((a - b).abs() / scale);
                }
            }
        }
    }
    Ok(PropertyReport {
        name: "jump_continuity",
        dim,
        m,
        trials,
        exact_failures: 0,
        max_error,
        tolerance: FLOAT_TOL,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceRow {
    pub n: usize,
    /// Mean of `‖ū‖_{1,h} / ‖R² ū‖_sip` over the trials.
    pub mean_ratio: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub dim: usize,
    pub bc: Bc,
    pub rows: Vec<EquivalenceRow>,
}

impl EquivalenceReport {
    /// `(max - min) / min` across meshes of one per-mesh statistic.
    pub fn spread_of(&self, pick: fn(&EquivalenceRow) -> f64) -> f64 {
        let v = self.rows.iter().map(pick);
        let lo = v.clone().fold(f64::INFINITY, f64::min);
        let hi = v.fold(0.0, f64::max);
        (hi - lo) / lo
    }

    /// Spread of the per-mesh mean ratio. The sample min and max tighten
    /// with `N` as the ratio concentrates, so they are reported by
    /// [`Self::extreme_spread`] but do not estimate the equivalence constants.
    pub fn spread(&self) -> f64 {
        self.spread_of(|r| r.mean_ratio)
    }

    /// Larger spread of the per-mesh sample min and max.
    pub fn extreme_spread(&self) -> f64 {
        self.spread_of(|r| r.min_ratio).max(self.spread_of(|r| r.max_ratio))
    }
}

/// Ratio statistics of the discrete `1,h` seminorm against the sip norm
/// of the order-2 reconstruction, for random averages on each mesh.
pub fn norm_equivalence(seed: u64, dim: usize, bc: Bc, n_list: &[usize], trials: usize) -> Result<EquivalenceReport> {
    let mut rng = rng(seed, dim, 1, 3 + bc as u64);
    let rule = gauss_rule(4)?;
    let mut rows = Vec::new();
    for &n in n_list {
        let mesh = build_mesh(dim, n, 1)?;
        let mut ratios = Vec::with_capacity(trials);
        for _ in 0..trials {
            let mut values: Vec<f64> = (0..mesh.num_cells()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if bc == Bc::Periodic {
                let mean = values.iter().sum::<f64>() / values.len() as f64;
                values.iter_mut().for_each(|v| *v -= mean);
            }
            let field = AvgField::from_interior(&mesh, &values)?;
            let one_h = one_h_seminorm(&field, bc)?;
            let sip = sip_norm(&Reconstructed::new(field, bc)?, &rule);
            ratios.push(one_h / sip);
        }
        rows.push(EquivalenceRow {
            n,
            mean_ratio: ratios.iter().sum::<f64>() / trials as f64,
            min_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min),
            max_ratio: ratios.iter().copied().fold(0.0, f64::max),
        });
    }
    Ok(EquivalenceReport { dim, bc, rows })
}
