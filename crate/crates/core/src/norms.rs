//! Error measures on broken (cellwise smooth) fields.
//!
//! For a broken field `v` on a uniform mesh of width `h`:
//!
//! - `‖v‖²_sip  = Σ_K ‖∇v‖²_K + Σ_F (1/h) ‖[v]‖²_F`
//! - `‖v‖²_sip* = ‖v‖²_sip + Σ_K h ‖∇v·n‖²_{∂K}`
//! - `|ū|²_1,h  = h^{d-2} Σ D²` over first differences of averages.
//!
//! Non-periodic boundary faces enter the jump sum with jump = trace; periodic
//! faces wrap. Cell and face integrals use tensor Gauss rules. Every global
//! sum is a pairwise sum over per-cell contributions in cell order.

use rayon::prelude::*;

use crate::assembly::SchemeConfig;
use crate::basis::{gauss_rule, QuadratureRule};
use crate::error::{Error, Result};
use crate::mesh::{CartesianMesh, MultiIndex};
use crate::reconstruction::{AvgField, Bc, Reconstruction};

/// Deterministic pairwise summation.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// Field that is smooth inside each cell, addressed by cell and reference
/// coordinates in `[0,1]^d`.
pub trait BrokenField: Sync {
    fn mesh(&self) -> &CartesianMesh;
    fn periodic(&self) -> bool;
    fn value(&self, cell: &MultiIndex, xref: [f64; 2]) -> f64;
    /// Physical gradient.
    fn gradient(&self, cell: &MultiIndex, xref: [f64; 2]) -> [f64; 2];
    /// Part of the value that may jump across interior faces.
    fn jump_value(&self, cell: &MultiIndex, xref: [f64; 2]) -> f64 {
        self.value(cell, xref)
    }
}

/// One value per cell; gradient zero.
#[derive(Clone, Debug)]
pub struct PiecewiseConstant {
    pub mesh: CartesianMesh,
    pub values: Vec<f64>,
    pub periodic: bool,
}

impl BrokenField for PiecewiseConstant {
    fn mesh(&self) -> &CartesianMesh {
        &self.mesh
    }
    fn periodic(&self) -> bool {
        self.periodic
    }
    fn value(&self, cell: &MultiIndex, _: [f64; 2]) -> f64 {
        self.values[self.mesh.linear_index(cell).expect("interior cell")]
    }
    fn gradient(&self, _: &MultiIndex, _: [f64; 2]) -> [f64; 2] {
        [0.0, 0.0]
    }
}

/// `R^k ū` for averages with ghosts filled.
#[derive(Clone, Debug)]
pub struct Reconstructed {
    pub field: AvgField,
    pub recon: Reconstruction,
    pub bc: Bc,
}

impl Reconstructed {
    /// Fills ghosts of `field` for `bc` and attaches the order-`2m` engine.
    pub fn new(field: AvgField, bc: Bc) -> Result<Self> {
        let m = field.mesh().ghost_width();
        let recon = Reconstruction::new(m, field.mesh().dim())?;
        Ok(Self {
            field: field.with_ghosts(bc)?,
            recon,
            bc,
        })
    }
}

impl BrokenField for Reconstructed {
    fn mesh(&self) -> &CartesianMesh {
        self.field.mesh()
    }
    fn periodic(&self) -> bool {
        self.bc == Bc::Periodic
    }
    fn value(&self, cell: &MultiIndex, xref: [f64; 2]) -> f64 {
        self.recon.value(&self.field, cell, xref)
    }
    fn gradient(&self, cell: &MultiIndex, xref: [f64; 2]) -> [f64; 2] {
        self.recon.gradient(&self.field, cell, xref)
    }
}

pub type ScalarFn<'a> = &'a (dyn Fn(&[f64]) -> f64 + Sync);
pub type GradFn<'a> = &'a (dyn Fn(&[f64]) -> [f64; 2] + Sync);

fn physical(mesh: &CartesianMesh, cell: &MultiIndex, xref: [f64; 2]) -> Vec<f64> {
    let o = mesh.cell_origin(cell);
    let h = mesh.h();
    o.iter().zip(xref).map(|(a, t)| a + t * h).collect()
}

/// A smooth function viewed as a broken field (no interior jumps).
pub struct Smooth<'a> {
    pub mesh: CartesianMesh,
    pub u: ScalarFn<'a>,
    pub grad: GradFn<'a>,
    pub periodic: bool,
}

impl BrokenField for Smooth<'_> {
    fn mesh(&self) -> &CartesianMesh {
        &self.mesh
    }
    fn periodic(&self) -> bool {
        self.periodic
    }
    fn value(&self, cell: &MultiIndex, xref: [f64; 2]) -> f64 {
        (self.u)(&physical(&self.mesh, cell, xref))
    }
    fn gradient(&self, cell: &MultiIndex, xref: [f64; 2]) -> [f64; 2] {
        (self.grad)(&physical(&self.mesh, cell, xref))
    }
}

/// `u - u_h` for a smooth `u`; interior jumps come from `u_h` alone.
pub struct ErrorField<'a> {
    pub uh: &'a Reconstructed,
    pub u: ScalarFn<'a>,
    pub grad: GradFn<'a>,
}

impl BrokenField for ErrorField<'_> {
    fn mesh(&self) -> &CartesianMesh {
        self.uh.mesh()
    }
    fn periodic(&self) -> bool {
        self.uh.periodic()
    }
    fn value(&self, cell: &MultiIndex, xref: [f64; 2]) -> f64 {
        (self.u)(&physical(self.mesh(), cell, xref)) - self.uh.value(cell, xref)
    }
    fn gradient(&self, cell: &MultiIndex, xref: [f64; 2]) -> [f64; 2] {
        let g = (self.grad)(&physical(self.mesh(), cell, xref));
        let gh = self.uh.gradient(cell, xref);
        [g[0] - gh[0], g[1] - gh[1]]
    }
    fn jump_value(&self, cell: &MultiIndex, xref: [f64; 2]) -> f64 {
        -self.uh.value(cell, xref)
    }
}

/// Per-cell sum over tensor quadrature points of `g(xref)`, times cell volume.
fn cell_integral(field: &dyn BrokenField, rule: &QuadratureRule, cell: &MultiIndex, g: &dyn Fn(&MultiIndex, [f64; 2]) -> f64) -> f64 {
    let mesh = field.mesh();
    let vol = mesh.h().powi(mesh.dim() as i32);
    let s = match mesh.dim() {
        1 => rule.integrate(|t| g(cell, [t, 0.0])),
        _ => rule.integrate(|ty| rule.integrate(|tx| g(cell, [tx, ty]))),
    };
    vol * s
}

/// Mean over the face of `cell` normal to `axis` at reference coordinate `at`.
fn face_mean(dim: usize, rule: &QuadratureRule, axis: usize, at: f64, g: &dyn Fn([f64; 2]) -> f64) -> f64 {
    match dim {
        1 => g([at, 0.0]),
        _ => rule.integrate(|t| if axis == 0 { g([at, t]) } else { g([t, at]) }),
    }
}

fn reduce(field: &dyn BrokenField, per_cell: &(dyn Fn(&MultiIndex) -> f64 + Sync)) -> f64 {
    let cells: Vec<MultiIndex> = field.mesh().cells().collect();
    let parts: Vec<f64> = cells.par_iter().map(per_cell).collect();
    pairwise_sum(&parts)
}

pub fn l2_norm(field: &dyn BrokenField, rule: &QuadratureRule) -> f64 {
    reduce(field, &|c| cell_integral(field, rule, c, &|c, x| field.value(c, x).powi(2))).sqrt()
}

pub fn h1_broken_seminorm(field: &dyn BrokenField, rule: &QuadratureRule) -> f64 {
    h1_squared(field, rule).sqrt()
}

fn h1_squared(field: &dyn BrokenField, rule: &QuadratureRule) -> f64 {
    reduce(field, &|c| {
        cell_integral(field, rule, c, &|c, x| {
            let g = field.gradient(c, x);
            g[0] * g[0] + g[1] * g[1]
        })
    })
}

/// `Σ_F (1/h) ‖[v]‖²_F`; each cell owns its high faces plus low boundary faces.
fn jump_squared(field: &dyn BrokenField, rule: &QuadratureRule) -> f64 {
    let mesh = field.mesh();
    let n = mesh.n() as i64;
    let dim = mesh.dim();
    // (1/h)·|F| with |F| = h^{d-1}
    let weight = mesh.h().powi(dim as i32 - 2);
    reduce(field, &|c| {
        let mut s = 0.0;
        for axis in 0..dim {
            let i = c.get(axis);
            if i + 1 < n || field.periodic() {
                let mut up = c.shifted(axis, 1);
                if i + 1 == n {
                    up = up.shifted(axis, -n);
                }
                s += face_mean(dim, rule, axis, 1.0, &|x| {
                    let mut xu = x;
                    xu[axis] = 0.0;
                    (field.jump_value(c, x) - field.jump_value(&up, xu)).powi(2)
                });
            } else {
                s += face_mean(dim, rule, axis, 1.0, &|x| field.value(c, x).powi(2));
            }
            if i == 0 && !field.periodic() {
                s += face_mean(dim, rule, axis, 0.0, &|x| field.value(c, x).powi(2));
            }
        }
        weight * s
    })
}

/// `Σ_K h ‖∇v·n‖²_{∂K}`.
fn normal_trace_squared(field: &dyn BrokenField, rule: &QuadratureRule) -> f64 {
    let mesh = field.mesh();
    let dim = mesh.dim();
    // h·|F| with |F| = h^{d-1}
    let weight = mesh.h().powi(dim as i32);
    reduce(field, &|c| {
        let mut s = 0.0;
        for axis in 0..dim {
            for at in [0.0, 1.0] {
                s += face_mean(dim, rule, axis, at, &|x| field.gradient(c, x)[axis].powi(2));
            }
        }
        weight * s
    })
}

pub fn sip_norm(field: &dyn BrokenField, rule: &QuadratureRule) -> f64 {
    (h1_squared(field, rule) + jump_squared(field, rule)).sqrt()
}

pub fn sip_star_norm(field: &dyn BrokenField, rule: &QuadratureRule) -> f64 {
    (h1_squared(field, rule) + jump_squared(field, rule) + normal_trace_squared(field, rule)).sqrt()
}

/// `h^{d/2-1} (Σ D²)^{1/2}` over all faces: non-periodic boundary faces use
/// the Dirichlet ghosts, periodic differences wrap.
pub fn one_h_seminorm(field: &AvgField, bc: Bc) -> Result<f64> {
    let mesh = *field.mesh();
    let n = mesh.n() as i64;
    let dim = mesh.dim();
    let filled;
    let f = match bc {
        Bc::Dirichlet => {
            filled = field.clone().with_ghosts(Bc::Dirichlet)?;
            &filled
        }
        Bc::Periodic => field,
    };
    let at = |idx: MultiIndex| -> f64 {
        match bc {
            Bc::Dirichlet => f.get(&idx),
            Bc::Periodic => {
                let w: Vec<i64> = idx.components().iter().map(|c| c.rem_euclid(n)).collect();
                f.get(&MultiIndex::from_slice(&w))
            }
        }
    };
    let mut parts = Vec::new();
    for c in mesh.cells() {
        for axis in 0..dim {
            // face below c along axis
            parts.push((at(c) - at(c.shifted(axis, -1))).powi(2));
            if bc == Bc::Dirichlet && c.get(axis) == n - 1 {
                parts.push((at(c.shifted(axis, 1)) - at(c)).powi(2));
            }
        }
    }
    Ok(mesh.h().powf(dim as f64 / 2.0 - 1.0) * pairwise_sum(&parts).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorReport {
    pub n: usize,
    pub h: f64,
    pub l2: f64,
    pub sip: f64,
    pub sip_star: f64,
    pub h1_broken: f64,
    pub one_h: f64,
}

/// All error measures of `u - R^k ū_h`. `one_h` measures the difference
/// between exact cell averages of `u` and `ū_h`.
pub fn error_report(config: &SchemeConfig, averages: &[f64], u: ScalarFn, grad: GradFn) -> Result<ErrorReport> {
    let mesh = config.mesh()?;
    if averages.len() != mesh.num_cells() {
        return Err(Error::DimensionMismatch {
            expected: mesh.num_cells(),
            got: averages.len(),
        });
    }
    let rule = gauss_rule(config.quadrature_points())?;
    let uh = Reconstructed::new(AvgField::from_interior(&mesh, averages)?, config.bc)?;
    let err = ErrorField { uh: &uh, u, grad };
    let h1 = h1_squared(&err, &rule);
    let jumps = jump_squared(&err, &rule);
    let normal = normal_trace_squared(&err, &rule);
    let exact_avg = AvgField::from_function(&mesh, u, &rule);
    let diff: Vec<f64> = exact_avg.interior_values().iter().zip(averages).map(|(a, b)| a - b).collect();
    let one_h = one_h_seminorm(&AvgField::from_interior(&mesh, &diff)?, config.bc)?;
    Ok(ErrorReport {
        n: mesh.n(),
        h: mesh.h(),
        l2: l2_norm(&err, &rule),
        sip: (h1 + jumps).sqrt(),
        sip_star: (h1 + jumps + normal).sqrt(),
        h1_broken: h1.sqrt(),
        one_h,
    })
}
