//! Petrov–Galerkin system assembly: reconstructed trial space, cell-indicator
//! test space.
//!
//! With `v = 1_K` the volume terms drop out, so the equation of cell `K` is
//!
//! ```text
//! -Σ_{F ⊂ ∂K} ∫_F ∇u·n_K + (η/h) Σ_{F interior} ∫_F [u][v] = ∫_K f
//! ```
//!
//! where `[w] = w_lower - w_upper` across a face. Every coefficient is
//! computed in exact rationals from the face stencils of
//! [`crate::reconstruction`], with ghost averages folded into interior columns.
//! Rows only depend on how close the cell is to the boundary, so one exact
//! template per position class is built and shifted.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use rayon::prelude::*;

use crate::basis::gauss_rule;
use crate::error::{Error, Result};
use crate::mesh::{build_mesh, CartesianMesh, MultiIndex};
use crate::rational::{rat, to_f64, Rational};
pub use crate::reconstruction::Bc;
use crate::reconstruction::{window_offset, AvgField, GhostRule, Side, StencilKind, StencilOperator};

/// Handling of the constant null space in the periodic problem.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PeriodicForm {
    /// Cell equations plus a Lagrange multiplier `λ` enforcing `Σ ū = 0`.
    #[default]
    Bordered,
    /// Mean-free source, last cell equation replaced by `Σ ū = 0`.
    Reduced,
}

/// Analyzed penalty range; values outside are accepted with a warning.
pub const ETA_RANGE: (f64, f64) = (-1.5, 5.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeConfig {
    pub dim: usize,
    pub bc: Bc,
    pub order: usize,
    pub eta: f64,
    pub n: usize,
    pub periodic_form: PeriodicForm,
}

impl SchemeConfig {
    pub fn new(dim: usize, bc: Bc, order: usize, n: usize) -> Self {
        Self {
            dim,
            bc,
            order,
            eta: 0.0,
            n,
            periodic_form: PeriodicForm::Bordered,
        }
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_periodic_form(mut self, form: PeriodicForm) -> Self {
        self.periodic_form = form;
        self
    }

    /// Stencil half-width `m = k/2`.
    pub fn m(&self) -> usize {
        self.order / 2
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.dim) {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        if self.order == 0 || self.order % 2 == 1 {
            return Err(Error::OddOrder(self.order));
        }
        let supported = match self.bc {
            Bc::Dirichlet => self.order == 2,
            Bc::Periodic => matches!(self.order, 2 | 4),
        };
        if !supported {
            return Err(Error::UnsupportedOrder {
                order: self.order,
                bc: self.bc.name(),
            });
        }
        if !self.eta.is_finite() {
            return Err(Error::InvalidConfig(format!("penalty {} is not finite", self.eta)));
        }
        let min = 2 * self.m() + 1;
        if self.n < min {
            return Err(Error::MeshTooSmall {
                n: self.n,
                m: self.m(),
                min,
            });
        }
        Ok(())
    }

    pub fn eta_in_analyzed_range(&self) -> bool {
        self.eta > ETA_RANGE.0 && self.eta < ETA_RANGE.1
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if !self.eta_in_analyzed_range() {
            w.push(format!(
                "eta = {} lies outside the analyzed stability range ({}, {})",
                self.eta, ETA_RANGE.0, ETA_RANGE.1
            ));
        }
        w
    }

    pub fn mesh(&self) -> Result<CartesianMesh> {
        self.validate()?;
        build_mesh(self.dim, self.n, self.m())
    }

    pub fn bordered(&self) -> bool {
        self.bc == Bc::Periodic && self.periodic_form == PeriodicForm::Bordered
    }

    /// Gauss points per direction for cell integrals of the source.
    pub fn quadrature_points(&self) -> usize {
        self.order + 3
    }
}

/// Square sparse system in compressed sparse row form.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSystem {
    pub size: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
    pub rhs: Vec<f64>,
    /// Number of cell unknowns; `size - 1` when a multiplier is present.
    pub cells: usize,
}

impl SparseSystem {
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>, rhs: Vec<f64>, cells: usize) -> Self {
        let size = rows.len();
        let mut row_ptr = Vec::with_capacity(size + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            size,
            row_ptr,
            col_idx,
            values,
            rhs,
            cells,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn has_multiplier(&self) -> bool {
        self.size > self.cells
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(cc, _)| cc == c).map_or(0.0, |(_, v)| v)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.size).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.size]; self.size];
        for (r, row) in d.iter_mut().enumerate() {
            for (c, v) in self.row(r) {
                row[c] += v;
            }
        }
        d
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.size).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }
}

/// Face samples of the owner-cell reconstruction, one set per axis.
struct FaceOps {
    /// `[axis][side]` reference normal derivative, face mean.
    deriv: Vec<[StencilOperator; 2]>,
    /// `[axis][side]` trace, face mean.
    trace: Vec<[StencilOperator; 2]>,
}

impl FaceOps {
    fn build(m: usize, dim: usize) -> Result<Self> {
        let pair = |f: &dyn Fn(Side) -> StencilKind| -> Result<[StencilOperator; 2]> {
            Ok([
                StencilOperator::build(m, dim, f(Side::Low))?,
                StencilOperator::build(m, dim, f(Side::High))?,
            ])
        };
        let mut deriv = Vec::new();
        let mut trace = Vec::new();
        for axis in 0..dim {
            deriv.push(pair(&|side| StencilKind::FaceNormalDerivativeIntegral { axis, side })?);
            trace.push(pair(&|side| StencilKind::FaceIntegral { axis, side })?);
        }
        Ok(Self { deriv, trace })
    }
}

fn side_index(side: Side) -> usize {
    match side {
        Side::Low => 0,
        Side::High => 1,
    }
}

/// Flux and penalty parts of one row, keyed by absolute (possibly ghost) cell.
#[derive(Default)]
struct ExactRow {
    flux: BTreeMap<MultiIndex, Rational>,
    jump: BTreeMap<MultiIndex, Rational>,
}

fn add_stencil(
    target: &mut BTreeMap<MultiIndex, Rational>,
    op: &StencilOperator,
    center: &MultiIndex,
    scale: &Rational,
) {
    for (k, w) in op.weights.iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        let at = center.offset(&op.offset(k));
        *target.entry(at).or_insert_with(Rational::zero) += w * scale;
    }
}

/// Exact row of cell `cell` in reference scaling (physical row is
/// `h^{d-2}` times this), before ghost elimination.
fn exact_row(ops: &FaceOps, mesh: &CartesianMesh, bc: Bc, cell: &MultiIndex) -> ExactRow {
    let one = rat(1, 1);
    let minus = rat(-1, 1);
    let n = mesh.n() as i64;
    let mut row = ExactRow::default();
    for axis in 0..mesh.dim() {
        let i = cell.get(axis);
        let d = &ops.deriv[axis];
        let t = &ops.trace[axis];
        // high face: K is the lower cell, outward normal +e_axis
        add_stencil(&mut row.flux, &d[side_index(Side::High)], cell, &minus);
        if bc == Bc::Periodic || i + 1 < n {
            let upper = cell.shifted(axis, 1);
            add_stencil(&mut row.jump, &t[side_index(Side::High)], cell, &one);
            add_stencil(&mut row.jump, &t[side_index(Side::Low)], &upper, &minus);
        }
        // low face: K is the upper cell, outward normal -e_axis
        add_stencil(&mut row.flux, &d[side_index(Side::Low)], cell, &one);
        if bc == Bc::Periodic || i > 0 {
            let lower = cell.shifted(axis, -1);
            add_stencil(&mut row.jump, &t[side_index(Side::High)], &lower, &minus);
            add_stencil(&mut row.jump, &t[side_index(Side::Low)], cell, &one);
        }
    }
    row
}

/// Rewrites a Dirichlet ghost average in interior averages: the y sweep of
/// the ghost fill runs last, so a y-ghost expands first.
fn expand_ghost(mesh: &CartesianMesh, rule: &[Rational], idx: &MultiIndex, weight: &Rational, out: &mut BTreeMap<MultiIndex, Rational>) {
    let n = mesh.n() as i64;
    let axis = (0..mesh.dim()).rev().find(|&a| {
        let c = idx.get(a);
        c < 0 || c >= n
    });
    match axis {
        None => *out.entry(*idx).or_insert_with(Rational::zero) += weight,
        Some(a) => {
            let (first, step) = if idx.get(a) < 0 { (0, 1) } else { (n - 1, -1) };
            for (j, c) in rule.iter().enumerate() {
                let mut src = *idx;
                src = src.shifted(a, first + step * j as i64 - idx.get(a));
                expand_ghost(mesh, rule, &src, &(weight * c), out);
            }
        }
    }
}

fn fold(mesh: &CartesianMesh, bc: Bc, rule: &[Rational], row: BTreeMap<MultiIndex, Rational>) -> BTreeMap<MultiIndex, Rational> {
    match bc {
        Bc::Periodic => row,
        Bc::Dirichlet => {
            let mut out = BTreeMap::new();
            for (idx, w) in row {
                expand_ghost(mesh, rule, &idx, &w, &mut out);
            }
            out
        }
    }
}

/// Per-axis position class of a cell: rows of cells in the same class are
/// translates of each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Position {
    Low(i64),
    Interior,
    High(i64),
}

fn classify(i: i64, n: i64, reach: i64) -> Position {
    if i < reach {
        Position::Low(i)
    } else if i >= n - reach {
        Position::High(n - 1 - i)
    } else {
        Position::Interior
    }
}

fn position_key(mesh: &CartesianMesh, config: &SchemeConfig, c: &MultiIndex) -> [Position; 2] {
    let mut k = [Position::Interior; 2];
    if config.bc == Bc::Periodic {
        return k;
    }
    let n = mesh.n() as i64;
    let reach = 2 * config.m() as i64 + 2;
    for (a, slot) in k.iter_mut().enumerate().take(mesh.dim()) {
        *slot = classify(c.get(a), n, reach);
    }
    k
}

/// Row template: offsets relative to the cell with flux and jump parts.
type Template = Vec<(MultiIndex, f64, f64)>;

struct RowBuilder {
    mesh: CartesianMesh,
    config: SchemeConfig,
    templates: HashMap<[Position; 2], Template>,
}

impl RowBuilder {
    fn new(config: &SchemeConfig) -> Result<Self> {
        let mesh = config.mesh()?;
        let ops = FaceOps::build(config.m(), config.dim)?;
        let rule = match config.bc {
            Bc::Dirichlet => GhostRule::dirichlet(config.m())?.coefficients.remove(0),
            Bc::Periodic => Vec::new(),
        };
        let mut reps: BTreeMap<MultiIndex, [Position; 2]> = BTreeMap::new();
        let mut seen = std::collections::HashSet::new();
        for c in mesh.cells() {
            let k = position_key(&mesh, config, &c);
            if seen.insert(k) {
                reps.insert(c, k);
            }
        }
        let built: Vec<([Position; 2], Template)> = reps
            .into_par_iter()
            .map(|(cell, k)| {
                let row = exact_row(&ops, &mesh, config.bc, &cell);
                let flux = fold(&mesh, config.bc, &rule, row.flux);
                let jump = fold(&mesh, config.bc, &rule, row.jump);
                let mut merged: BTreeMap<MultiIndex, (f64, f64)> = BTreeMap::new();
                let rel = |idx: &MultiIndex| {
                    let mut o = *idx;
                    for a in 0..mesh.dim() {
                        o = o.shifted(a, -cell.get(a));
                    }
                    o
                };
                for (idx, w) in &flux {
                    merged.entry(rel(idx)).or_default().0 = to_f64(w);
                }
                for (idx, w) in &jump {
                    merged.entry(rel(idx)).or_default().1 = to_f64(w);
                }
                (k, merged.into_iter().map(|(o, (f, j))| (o, f, j)).collect())
            })
            .collect();
        Ok(Self {
            mesh,
            config: *config,
            templates: built.into_iter().collect(),
        })
    }

    /// Physical row of `cell` as sorted `(column, value)` pairs.
    fn row(&self, cell: &MultiIndex) -> Vec<(usize, f64)> {
        let template = &self.templates[&position_key(&self.mesh, &self.config, cell)];
        let scale = self.mesh.h().powi(self.mesh.dim() as i32 - 2);
        let n = self.mesh.n() as i64;
        let eta = self.config.eta;
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for (off, flux, jump) in template {
            let mut idx = cell.offset(off);
            if self.config.bc == Bc::Periodic {
                let wrapped: Vec<i64> = idx.components().iter().map(|c| c.rem_euclid(n)).collect();
                idx = MultiIndex::from_slice(&wrapped);
            }
            let col = self.mesh.linear_index(&idx).expect("folded rows reference interior cells");
            *acc.entry(col).or_insert(0.0) += scale * (flux + eta * jump);
        }
        acc.into_iter().filter(|&(_, v)| v != 0.0).collect()
    }
}

/// Cell integrals `∫_K f` by tensor Gauss quadrature; the periodic bordered
/// form appends 0 for the multiplier row, the reduced form subtracts the mean
/// and zeroes the replaced last equation.
pub fn rhs_only(config: &SchemeConfig, f: &(dyn Fn(&[f64]) -> f64 + Sync)) -> Result<Vec<f64>> {
    let mesh = config.mesh()?;
    let rule = gauss_rule(config.quadrature_points())?;
    let vol = mesh.h().powi(mesh.dim() as i32);
    let cells: Vec<MultiIndex> = mesh.cells().collect();
    let mut rhs: Vec<f64> = cells
        .par_iter()
        .map(|c| {
            let o = mesh.cell_origin(c);
            let h = mesh.h();
            let avg = match mesh.dim() {
                1 => rule.integrate(|t| f(&[o[0] + t * h])),
                _ => rule.integrate(|ty| rule.integrate(|tx| f(&[o[0] + tx * h, o[1] + ty * h]))),
            };
            vol * avg
        })
        .collect();
    if config.bc == Bc::Periodic {
        match config.periodic_form {
            PeriodicForm::Bordered => rhs.push(0.0),
            PeriodicForm::Reduced => {
                let total = crate::norms::pairwise_sum(&rhs);
                for v in rhs.iter_mut() {
                    *v -= total * vol;
                }
                *rhs.last_mut().expect("nonempty mesh") = 0.0;
            }
        }
    }
    Ok(rhs)
}

/// Assembles matrix and right-hand side. Rows are computed in parallel and
/// collected in cell order, so the result does not depend on thread count.
pub fn assemble(config: &SchemeConfig, f: &(dyn Fn(&[f64]) -> f64 + Sync)) -> Result<SparseSystem> {
    let builder = RowBuilder::new(config)?;
    let mesh = builder.mesh;
    let cells: Vec<MultiIndex> = mesh.cells().collect();
    let mut rows: Vec<Vec<(usize, f64)>> = cells.par_iter().map(|c| builder.row(c)).collect();
    let nc = mesh.num_cells();
    let vol = mesh.h().powi(mesh.dim() as i32);
    if config.bc == Bc::Periodic {
        match config.periodic_form {
            PeriodicForm::Bordered => {
                for r in rows.iter_mut() {
                    r.push((nc, vol));
                }
                rows.push((0..nc).map(|c| (c, vol)).collect());
            }
            PeriodicForm::Reduced => {
                *rows.last_mut().expect("nonempty mesh") = (0..nc).map(|c| (c, 1.0)).collect();
            }
        }
    }
    let rhs = rhs_only(config, f)?;
    Ok(SparseSystem::from_rows(rows, rhs, nc))
}

/// Matrix-free action of the cell equations (without multiplier column) on
/// interior averages. Ghosts are filled from `config.bc` on a copy.
pub fn apply_operator(config: &SchemeConfig, field: &AvgField) -> Result<Vec<f64>> {
    let mesh = config.mesh()?;
    if field.mesh().n() != mesh.n() || field.mesh().dim() != mesh.dim() || field.mesh().ghost_width() != mesh.ghost_width() {
        return Err(Error::DimensionMismatch {
            expected: mesh.num_cells(),
            got: field.mesh().num_cells(),
        });
    }
    let field = field.clone().with_ghosts(config.bc)?;
    let ops = FaceOps::build(config.m(), config.dim)?;
    let m = config.m();
    let dim = config.dim;
    let len = (2 * m + 1).pow(dim as u32);
    let window = |c: &MultiIndex| -> Vec<f64> { (0..len).map(|k| field.get(&c.offset(&window_offset(m, dim, k)))).collect() };
    let n = mesh.n() as i64;
    let scale = mesh.h().powi(dim as i32 - 2);
    let eta = config.eta;
    let cells: Vec<MultiIndex> = mesh.cells().collect();
    Ok(cells
        .par_iter()
        .map(|cell| {
            let own = window(cell);
            let mut flux = 0.0;
            let mut jump = 0.0;
            for axis in 0..dim {
                let i = cell.get(axis);
                let d = &ops.deriv[axis];
                let t = &ops.trace[axis];
                flux += d[0].apply(&own) - d[1].apply(&own);
                if config.bc == Bc::Periodic || i + 1 < n {
                    let up = window(&wrap(cell.shifted(axis, 1), n, config.bc));
                    jump += t[1].apply(&own) - t[0].apply(&up);
                }
                if config.bc == Bc::Periodic || i > 0 {
                    let lo = window(&wrap(cell.shifted(axis, -1), n, config.bc));
                    jump -= t[1].apply(&lo) - t[0].apply(&own);
                }
            }
            scale * (flux + eta * jump)
        })
        .collect())
}

fn wrap(idx: MultiIndex, n: i64, bc: Bc) -> MultiIndex {
    match bc {
        Bc::Dirichlet => idx,
        Bc::Periodic => MultiIndex::from_slice(&idx.components().iter().map(|c| c.rem_euclid(n)).collect::<Vec<_>>()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn zero(_: &[f64]) -> f64 {
        0.0
    }

    fn dirichlet(dim: usize, n: usize) -> SchemeConfig {
        SchemeConfig::new(dim, Bc::Dirichlet, 2, n)
    }

    #[test]
    fn config_validation() {
        assert!(dirichlet(1, 8).validate().is_ok());
        assert!(matches!(SchemeConfig::new(1, Bc::Dirichlet, 4, 8).validate(), Err(Error::UnsupportedOrder { .. })));
        assert!(matches!(SchemeConfig::new(1, Bc::Periodic, 3, 8).validate(), Err(Error::OddOrder(3))));
        assert!(matches!(SchemeConfig::new(1, Bc::Periodic, 6, 16).validate(), Err(Error::UnsupportedOrder { .. })));
        assert!(matches!(SchemeConfig::new(1, Bc::Periodic, 4, 4).validate(), Err(Error::MeshTooSmall { .. })));
        assert!(matches!(SchemeConfig::new(3, Bc::Periodic, 2, 4).validate(), Err(Error::UnsupportedDimension(3))));
        assert!(dirichlet(1, 8).with_eta(4.9).warnings().is_empty());
        assert_eq!(dirichlet(1, 8).with_eta(5.0).warnings().len(), 1);
        assert_eq!(dirichlet(1, 8).with_eta(-1.5).warnings().len(), 1);
    }

    #[test]
    fn dirichlet_1d_rows() {
        let n = 8;
        let h = 1.0 / n as f64;
        let sys = assemble(&dirichlet(1, n), &zero).unwrap();
        let d = sys.to_dense();
        assert!((d[0][0] - 4.5 / h).abs() < 1e-10);
        assert!((d[0][1] + 1.5 / h).abs() < 1e-10);
        assert_eq!(d[0][2], 0.0);
        for r in 1..n - 1 {
            assert!((d[r][r] - 2.0 / h).abs() < 1e-10);
            assert!((d[r][r - 1] + 1.0 / h).abs() < 1e-10);
            assert!((d[r][r + 1] + 1.0 / h).abs() < 1e-10);
        }
        assert!((d[n - 1][n - 1] - 4.5 / h).abs() < 1e-10);
        assert!((d[n - 1][n - 2] + 1.5 / h).abs() < 1e-10);
    }

    #[test]
    fn penalty_matches_second_difference_of_jumps() {
        // the jump of the m = 1 reconstruction across x_j is
        // (1/6)(D_{j-1} - 2 D_j + D_{j+1}) up to orientation
        let n = 12;
        let h = 1.0 / n as f64;
        let base = assemble(&SchemeConfig::new(1, Bc::Periodic, 2, n), &zero).unwrap();
        let pen = assemble(&SchemeConfig::new(1, Bc::Periodic, 2, n).with_eta(1.0), &zero).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut x = u.clone();
        x.push(0.0);
        let a = base.matvec(&x);
        let b = pen.matvec(&x);
        let at = |i: i64| u[i.rem_euclid(n as i64) as usize];
        let dd = |j: i64| at(j) - at(j - 1);
        // jump across node x_j (between cells j-1 and j), lower minus upper
        let jump = |j: i64| (dd(j - 1) - 2.0 * dd(j) + dd(j + 1)) / 6.0;
        for i in 0..n as i64 {
            let expected = (jump(i + 1) - jump(i)) / h;
            assert!((b[i as usize] - a[i as usize] - expected).abs() < 1e-10, "row {i}");
        }
    }

    #[test]
    fn periodic_constants_in_kernel() {
        for (dim, order, n) in [(1, 2, 5), (1, 4, 9), (2, 2, 4), (2, 4, 6)] {
            let cfg = SchemeConfig::new(dim, Bc::Periodic, order, n).with_eta(1.3);
            let sys = assemble(&cfg, &zero).unwrap();
            let nc = sys.cells;
            assert_eq!(sys.size, nc + 1);
            let mut x = vec![1.0; nc];
            x.push(0.0);
            let r = sys.matvec(&x);
            for v in &r[..nc] {
                assert!(v.abs() < 1e-9, "{v}");
            }
            let vol = 1.0 / nc as f64;
            assert!((sys.get(0, nc) - vol).abs() < 1e-15);
            assert!((sys.get(nc, nc - 1) - vol).abs() < 1e-15);
            assert_eq!(sys.get(nc, nc), 0.0);
        }
    }

    #[test]
    fn dirichlet_local_conservation() {
        // with η = 0 the column sums only keep boundary fluxes
        let n = 10;
        let sys = assemble(&dirichlet(1, n), &zero).unwrap();
        let d = sys.to_dense();
        let h = 1.0 / n as f64;
        let sums: Vec<f64> = (0..n).map(|c| (0..n).map(|r| d[r][c]).sum()).collect();
        // boundary flux (ū_0 - g)/h with g = -5/2 ū_0 + 1/2 ū_1
        assert!((sums[0] - 3.5 / h).abs() < 1e-9);
        assert!((sums[1] + 0.5 / h).abs() < 1e-9);
        for s in &sums[2..n - 2] {
            assert!(s.abs() < 1e-9);
        }
    }

    #[test]
    fn matrix_free_agrees_with_assembly() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cases = [
            (1, Bc::Dirichlet, 2, 9, 0.7),
            (2, Bc::Dirichlet, 2, 7, -1.2),
            (1, Bc::Periodic, 4, 11, 2.0),
            (2, Bc::Periodic, 2, 6, 0.0),
            (2, Bc::Periodic, 4, 7, 3.1),
        ];
        for (dim, bc, order, n, eta) in cases {
            let cfg = SchemeConfig::new(dim, bc, order, n).with_eta(eta);
            let sys = assemble(&cfg, &zero).unwrap();
            let mesh = cfg.mesh().unwrap();
            let u: Vec<f64> = (0..mesh.num_cells()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let field = AvgField::from_interior(&mesh, &u).unwrap();
            let free = apply_operator(&cfg, &field).unwrap();
            let mut x = u.clone();
            if sys.has_multiplier() {
                x.push(0.0);
            }
            let assembled = sys.matvec(&x);
            let scale = free.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            for (a, b) in free.iter().zip(&assembled) {
                assert!((a - b).abs() <= 1e-13 * scale, "{dim}D {bc} k={order}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn periodic_sine_residual() {
        // row i approximates ∫_K 4π² sin 2πx; the defect is a difference of
        // O(h²) flux errors, so it shrinks like h³
        let defect = |n: usize| {
            let cfg = SchemeConfig::new(1, Bc::Periodic, 2, n);
            let mesh = cfg.mesh().unwrap();
            let rule = gauss_rule(6).unwrap();
            let field = AvgField::from_function(&mesh, |x| (2.0 * PI * x[0]).sin(), &rule);
            let r = apply_operator(&cfg, &field).unwrap();
            let h = mesh.h();
            r.iter()
                .enumerate()
                .map(|(i, v)| {
                    let a = i as f64 * h;
                    let exact = 2.0 * PI * ((2.0 * PI * a).cos() - (2.0 * PI * (a + h)).cos());
                    (v - exact).abs()
                })
                .fold(0.0f64, f64::max)
        };
        let (coarse, fine) = (defect(64), defect(128));
        let bound = (2.0 * PI).powi(4) / 12.0 * (1.0f64 / 64.0).powi(3);
        assert!(coarse < 1.5 * bound, "{coarse} vs {bound}");
        assert!((coarse / fine / 8.0 - 1.0).abs() < 0.05, "{}", coarse / fine);
    }

    #[test]
    fn rhs_examples() {
        let cfg = dirichlet(1, 4);
        assert_eq!(rhs_only(&cfg, &|_| 1.0).unwrap(), vec![0.25; 4]);
        assert!(rhs_only(&dirichlet(1, 8), &zero).unwrap().iter().all(|v| *v == 0.0));
        let r = rhs_only(&dirichlet(1, 8), &|x| PI * PI * (PI * x[0]).sin()).unwrap();
        for (i, v) in r.iter().enumerate() {
            let (a, b) = (i as f64 / 8.0, (i + 1) as f64 / 8.0);
            let exact = PI * ((PI * a).cos() - (PI * b).cos());
            assert!((v - exact).abs() < 1e-12);
        }
        let p = rhs_only(&SchemeConfig::new(1, Bc::Periodic, 2, 4), &|_| 1.0).unwrap();
        assert_eq!(p, vec![0.25, 0.25, 0.25, 0.25, 0.0]);
    }

    #[test]
    fn parallel_assembly_is_deterministic() {
        let cfg = SchemeConfig::new(2, Bc::Dirichlet, 2, 12).with_eta(0.5);
        let f = |x: &[f64]| x[0] * x[1];
        let a = assemble(&cfg, &f).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| assemble(&cfg, &f).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn dirichlet_2d_rows_fold_corners() {
        let cfg = dirichlet(2, 6);
        let sys = assemble(&cfg, &zero).unwrap();
        // interior 5-point stencil with unit weights
        let mesh = cfg.mesh().unwrap();
        let c = mesh.linear_index(&MultiIndex::d2(3, 3)).unwrap();
        let row: Vec<(usize, f64)> = sys.row(c).collect();
        assert_eq!(row.len(), 5);
        assert!((sys.get(c, c) - 4.0).abs() < 1e-12);
        // corner rows only reference interior columns and stay finite
        let corner = mesh.linear_index(&MultiIndex::d2(0, 0)).unwrap();
        assert!(sys.row(corner).all(|(col, v)| col < sys.size && v.is_finite()));
    }
}
