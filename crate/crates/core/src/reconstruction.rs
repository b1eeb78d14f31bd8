//! Reconstruction of even-degree (`k = 2m`) piecewise polynomials from cell
//! averages.
//!
//! On a uniform mesh the reconstruction on a cell only depends on the
//! `(2m+1)^d` window of averages centred on it, through weights that are the
//! same for every cell. The weights come from the moment-matching system
//! (reproduce every window average exactly), solved once in exact rational
//! arithmetic; 2D weights are outer products of 1D weights.
//!
//! Boundary conditions enter only through the ghost averages: Dirichlet ghosts
//! make the reconstructed trace vanish on the boundary, periodic ghosts copy
//! the wrapped interior cell.

use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::basis::{QuadratureRule, RationalPoly};
use crate::error::{Error, Result};
use crate::mesh::{CartesianMesh, MultiIndex};
use crate::rational::{int, invert, to_f64, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bc {
    Dirichlet,
    Periodic,
}

impl Bc {
    pub fn name(&self) -> &'static str {
        match self {
            Bc::Dirichlet => "dirichlet",
            Bc::Periodic => "periodic",
        }
    }
}

impl fmt::Display for Bc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Bc {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirichlet" => Ok(Bc::Dirichlet),
            "periodic" => Ok(Bc::Periodic),
            other => Err(Error::InvalidConfig(format!("unknown boundary condition `{other}`"))),
        }
    }
}

/// `∫_r^{r+1} x^p dx` for `r = -m..=m` (rows) and `p = 0..=2m` (columns).
fn moment_matrix(m: usize) -> Vec<Vec<Rational>> {
    let w = 2 * m + 1;
    (0..w)
        .map(|row| {
            let r = row as i64 - m as i64;
            (0..w)
                .map(|p| {
                    let mono = RationalPoly::new(
                        (0..=p).map(|q| if q == p { int(1) } else { int(0) }).collect(),
                    );
                    mono.integrate(&int(r), &int(r + 1))
                })
                .collect()
        })
        .collect()
}

/// Cardinal reconstruction basis `φ_r`, `r = -m..=m`: the degree-`2m`
/// polynomial whose average over stencil cell `s` is `δ_rs`.
pub fn moment_basis(m: usize) -> Result<Vec<RationalPoly>> {
    if m == 0 {
        return Err(Error::SingularMomentSystem(0));
    }
    let a = moment_matrix(m);
    let inv = invert(&a).ok_or(Error::SingularMomentSystem(m))?;
    // inv[p][r] is the x^p coefficient of φ_r
    let w = 2 * m + 1;
    Ok((0..w)
        .map(|r| RationalPoly::new((0..w).map(|p| inv[p][r].clone()).collect()))
        .collect())
}

fn cached_basis(m: usize) -> Result<&'static [RationalPoly]> {
    static CACHE: OnceLock<Vec<Vec<RationalPoly>>> = OnceLock::new();
    let all = CACHE.get_or_init(|| (1..=6).map(|m| moment_basis(m).expect("uniform stencil")).collect());
    match m {
        1..=6 => Ok(&all[m - 1]),
        _ => Err(Error::SingularMomentSystem(m)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Low,
    High,
}

impl Side {
    pub fn coordinate(&self) -> Rational {
        match self {
            Side::Low => Rational::zero(),
            Side::High => Rational::one(),
        }
    }
}

/// What a stencil operator samples from the reconstruction of the owner cell.
/// Coordinates are reference coordinates of the owner cell `[0,1]^d`;
/// derivatives are with respect to the reference coordinate and face
/// integrals are means over the unit face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StencilKind {
    PointValue(Vec<Rational>),
    Derivative { axis: usize, at: Vec<Rational> },
    FaceIntegral { axis: usize, side: Side },
    FaceNormalDerivativeIntegral { axis: usize, side: Side },
}

/// 1D functional applied to the reconstruction along one axis.
enum Functional1d {
    Value(Rational),
    Derivative(Rational),
    Mean,
}

impl Functional1d {
    fn apply(&self, p: &RationalPoly) -> Rational {
        match self {
            Functional1d::Value(t) => p.eval(t),
            Functional1d::Derivative(t) => p.derivative().eval(t),
            Functional1d::Mean => p.integrate(&Rational::zero(), &Rational::one()),
        }
    }
}

/// Linear map from a `(2m+1)^d` window of averages (first axis fastest,
/// offsets `-m..=m`) to one sample of the reconstruction.
#[derive(Clone, Debug)]
pub struct StencilOperator {
    pub m: usize,
    pub dim: usize,
    pub kind: StencilKind,
    pub weights: Vec<Rational>,
    pub weights_f64: Vec<f64>,
}

impl StencilOperator {
    /// Builds the weights by applying the sample functional to the exact
    /// moment-matched basis.
    pub fn build(m: usize, dim: usize, kind: StencilKind) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        let basis = cached_basis(m)?;
        let in_cell = |pt: &[Rational]| {
            pt.len() == dim && pt.iter().all(|t| *t >= Rational::zero() && *t <= Rational::one())
        };
        let functionals: Vec<Functional1d> = match &kind {
            StencilKind::PointValue(pt) => {
                if !in_cell(pt) {
                    return Err(Error::InvalidConfig(format!("sample {pt:?} outside the owner cell")));
                }
                pt.iter().cloned().map(Functional1d::Value).collect()
            }
            StencilKind::Derivative { axis, at } => {
                if !in_cell(at) || *axis >= dim {
                    return Err(Error::InvalidConfig(format!("sample {at:?} outside the owner cell")));
                }
                (0..dim)
                    .map(|a| {
                        if a == *axis {
                            Functional1d::Derivative(at[a].clone())
                        } else {
                            Functional1d::Value(at[a].clone())
                        }
                    })
                    .collect()
            }
            StencilKind::FaceIntegral { axis, side } | StencilKind::FaceNormalDerivativeIntegral { axis, side } => {
                if *axis >= dim {
                    return Err(Error::InvalidConfig(format!("axis {axis} out of range")));
                }
                let derivative = matches!(kind, StencilKind::FaceNormalDerivativeIntegral { .. });
                (0..dim)
                    .map(|a| {
                        if a != *axis {
                            Functional1d::Mean
                        } else if derivative {
                            Functional1d::Derivative(side.coordinate())
                        } else {
                            Functional1d::Value(side.coordinate())
                        }
                    })
                    .collect()
            }
        };
        let per_axis: Vec<Vec<Rational>> = functionals
            .iter()
            .map(|f| basis.iter().map(|p| f.apply(p)).collect())
            .collect();
        let weights = tensor_product(&per_axis);
        let weights_f64 = weights.iter().map(to_f64).collect();
        Ok(Self {
            m,
            dim,
            kind,
            weights,
            weights_f64,
        })
    }

    /// Window offset of weight number `k`.
    pub fn offset(&self, k: usize) -> MultiIndex {
        window_offset(self.m, self.dim, k)
    }

    pub fn apply(&self, window: &[f64]) -> f64 {
        self.weights_f64.iter().zip(window).map(|(w, u)| w * u).sum()
    }

    pub fn apply_exact(&self, window: &[Rational]) -> Rational {
        self.weights
            .iter()
            .zip(window)
            .fold(Rational::zero(), |acc, (w, u)| acc + w * u)
    }
}

/// Interior stencil operator for the given sample; see [`StencilOperator::build`].
pub fn build_interior_stencil(m: usize, dim: usize, kind: StencilKind) -> Result<StencilOperator> {
    StencilOperator::build(m, dim, kind)
}

fn tensor_product(per_axis: &[Vec<Rational>]) -> Vec<Rational> {
    match per_axis {
        [x] => x.clone(),
        [x, y] => y.iter().flat_map(|wy| x.iter().map(move |wx| wx * wy)).collect(),
        _ => unreachable!(),
    }
}

pub(crate) fn window_offset(m: usize, dim: usize, k: usize) -> MultiIndex {
    let w = 2 * m + 1;
    let m = m as i64;
    match dim {
        1 => MultiIndex::d1(k as i64 - m),
        _ => MultiIndex::d2((k % w) as i64 - m, (k / w) as i64 - m),
    }
}

/// Coefficients of the reconstructed derivative at a node.
///
/// `c_plus[s+m]` weighs `ū_s` in the reference derivative at the left end of
/// cell 0, `c_minus[s+m]` weighs `ū_s` in the derivative at the right end of
/// cell 0 (`s = -m..=m`). `gamma[k+m-1]` (`k = -m+1..=m-1`) writes the same
/// derivative in first differences `D_k = ū_k - ū_{k-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FluxCoefficients {
    pub m: usize,
    pub gamma: Vec<Rational>,
    pub c_plus: Vec<Rational>,
    pub c_minus: Vec<Rational>,
}

impl FluxCoefficients {
    pub fn gamma_at(&self, k: i64) -> &Rational {
        &self.gamma[(k + self.m as i64 - 1) as usize]
    }

    pub fn c_plus_at(&self, s: i64) -> &Rational {
        &self.c_plus[(s + self.m as i64) as usize]
    }

    pub fn c_minus_at(&self, s: i64) -> &Rational {
        &self.c_minus[(s + self.m as i64) as usize]
    }
}

/// Derivative-flux coefficients from the moment-matched reconstruction.
///
/// Fails with [`Error::FluxMismatch`] unless the derivative seen from the
/// right cell equals the one seen from the left cell, i.e. the reconstructed
/// derivative is continuous across every node.
pub fn derivative_flux_coeffs(m: usize) -> Result<FluxCoefficients> {
    let basis = cached_basis(m)?;
    let c_plus: Vec<Rational> = basis.iter().map(|p| p.derivative().eval(&Rational::zero())).collect();
    let c_minus: Vec<Rational> = basis.iter().map(|p| p.derivative().eval(&Rational::one())).collect();
    let w = 2 * m + 1;
    // node x_i seen from cell i (left end) and from cell i-1 (right end)
    let continuous = c_plus[w - 1].is_zero()
        && c_minus[0].is_zero()
        && (0..w - 1).all(|s| c_plus[s] == c_minus[s + 1]);
    if !continuous {
        return Err(Error::FluxMismatch(m));
    }
    // γ_k = Σ_{s≥k} c_s; γ_{-m} is the sum of all weights and must vanish
    let mut suffix = vec![Rational::zero(); w + 1];
    for s in (0..w).rev() {
        suffix[s] = &suffix[s + 1] + &c_plus[s];
    }
    if !suffix[0].is_zero() {
        return Err(Error::FluxMismatch(m));
    }
    let gamma = suffix[1..w - 1].to_vec();
    Ok(FluxCoefficients {
        m,
        gamma,
        c_plus,
        c_minus,
    })
}

/// Ghost averages as linear combinations of the first `2m` interior averages
/// of a grid line, counted inward from the boundary.
///
/// `coefficients[g][j]` gives ghost layer `g` (0 = adjacent to the boundary)
/// in terms of the `j`-th interior cell from the boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhostRule {
    pub depth: usize,
    pub coefficients: Vec<Vec<Rational>>,
}

impl GhostRule {
    /// Homogeneous Dirichlet rule: the ghost average for which the boundary
    /// cell's reconstruction vanishes at the boundary node. Only `m = 1`.
    pub fn dirichlet(m: usize) -> Result<Self> {
        if m != 1 {
            return Err(Error::UnsupportedOrder {
                order: 2 * m,
                bc: "dirichlet",
            });
        }
        let trace = StencilOperator::build(m, 1, StencilKind::PointValue(vec![Rational::zero()]))?;
        // trace weights over (ghost, ū_0, ū_1)
        let w = &trace.weights;
        let coefficients = vec![vec![-&w[1] / &w[0], -&w[2] / &w[0]]];
        Ok(Self {
            depth: 1,
            coefficients,
        })
    }

    pub fn coefficients_f64(&self) -> Vec<Vec<f64>> {
        self.coefficients
            .iter()
            .map(|row| row.iter().map(to_f64).collect())
            .collect()
    }
}

fn dirichlet_rule_f64() -> &'static [f64; 2] {
    static RULE: OnceLock<[f64; 2]> = OnceLock::new();
    RULE.get_or_init(|| {
        let c = GhostRule::dirichlet(1).expect("m = 1").coefficients_f64();
        [c[0][0], c[0][1]]
    })
}

/// Cell averages on the ghost-extended mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct AvgField {
    mesh: CartesianMesh,
    data: Vec<f64>,
}

impl AvgField {
    pub fn zeros(mesh: &CartesianMesh) -> Self {
        let len = mesh.extended_n().pow(mesh.dim() as u32);
        Self {
            mesh: *mesh,
            data: vec![0.0; len],
        }
    }

    /// Interior averages in lexicographic order; ghosts start at zero.
    pub fn from_interior(mesh: &CartesianMesh, values: &[f64]) -> Result<Self> {
        if values.len() != mesh.num_cells() {
            return Err(Error::DimensionMismatch {
                expected: mesh.num_cells(),
                got: values.len(),
            });
        }
        let mut field = Self::zeros(mesh);
        for (lin, &v) in values.iter().enumerate() {
            let idx = mesh.multi_index(lin);
            field.set(&idx, v);
        }
        Ok(field)
    }

    /// Cell averages of `f` by tensor quadrature.
    pub fn from_function(mesh: &CartesianMesh, f: impl Fn(&[f64]) -> f64, rule: &QuadratureRule) -> Self {
        let mut field = Self::zeros(mesh);
        let h = mesh.h();
        for idx in mesh.cells() {
            let o = mesh.cell_origin(&idx);
            let avg = match mesh.dim() {
                1 => rule.integrate(|t| f(&[o[0] + t * h])),
                _ => rule.integrate(|ty| rule.integrate(|tx| f(&[o[0] + tx * h, o[1] + ty * h]))),
            };
            field.set(&idx, avg);
        }
        field
    }

    pub fn mesh(&self) -> &CartesianMesh {
        &self.mesh
    }

    pub fn get(&self, idx: &MultiIndex) -> f64 {
        self.data[self.mesh.extended_linear_index(idx)]
    }

    pub fn set(&mut self, idx: &MultiIndex, v: f64) {
        let k = self.mesh.extended_linear_index(idx);
        self.data[k] = v;
    }

    pub fn interior_values(&self) -> Vec<f64> {
        self.mesh.cells().map(|c| self.get(&c)).collect()
    }

    pub fn fill_ghosts(&mut self, bc: Bc) -> Result<()> {
        match bc {
            Bc::Dirichlet => fill_ghosts_dirichlet(self),
            Bc::Periodic => {
                fill_ghosts_periodic(self);
                Ok(())
            }
        }
    }

    /// Copy with ghosts filled for `bc`.
    pub fn with_ghosts(mut self, bc: Bc) -> Result<Self> {
        self.fill_ghosts(bc)?;
        Ok(self)
    }
}

/// Fills the one-deep Dirichlet ghost layer: per grid line
/// `ghost = -5/2·(adjacent) + 1/2·(next)`, first along x for interior rows,
/// then along y for every column including the x-ghost columns, which fills
/// the corner ghosts.
pub fn fill_ghosts_dirichlet(field: &mut AvgField) -> Result<()> {
    let mesh = *field.mesh();
    if mesh.ghost_width() != 1 {
        return Err(Error::UnsupportedOrder {
            order: 2 * mesh.ghost_width(),
            bc: "dirichlet",
        });
    }
    let [c0, c1] = *dirichlet_rule_f64();
    let n = mesh.n() as i64;
    match mesh.dim() {
        1 => {
            let g = |f: &AvgField, a: i64, b: i64| c0 * f.get(&MultiIndex::d1(a)) + c1 * f.get(&MultiIndex::d1(b));
            let lo = g(field, 0, 1);
            let hi = g(field, n - 1, n - 2);
            field.set(&MultiIndex::d1(-1), lo);
            field.set(&MultiIndex::d1(n), hi);
        }
        _ => {
            for j in 0..n {
                let at = |i| MultiIndex::d2(i, j);
                let lo = c0 * field.get(&at(0)) + c1 * field.get(&at(1));
                let hi = c0 * field.get(&at(n - 1)) + c1 * field.get(&at(n - 2));
                field.set(&at(-1), lo);
                field.set(&at(n), hi);
            }
            for i in -1..=n {
                let at = |j| MultiIndex::d2(i, j);
                let lo = c0 * field.get(&at(0)) + c1 * field.get(&at(1));
                let hi = c0 * field.get(&at(n - 1)) + c1 * field.get(&at(n - 2));
                field.set(&at(-1), lo);
                field.set(&at(n), hi);
            }
        }
    }
    Ok(())
}

/// Ghost index `g` copies interior index `g mod N` per direction.
pub fn fill_ghosts_periodic(field: &mut AvgField) {
    let mesh = *field.mesh();
    let n = mesh.n() as i64;
    let m = mesh.ghost_width() as i64;
    let wrap = |c: i64| c.rem_euclid(n);
    match mesh.dim() {
        1 => {
            for i in (-m..0).chain(n..n + m) {
                let v = field.get(&MultiIndex::d1(wrap(i)));
                field.set(&MultiIndex::d1(i), v);
            }
        }
        _ => {
            for j in -m..n + m {
                for i in -m..n + m {
                    let idx = MultiIndex::d2(i, j);
                    if mesh.is_interior(&idx) {
                        continue;
                    }
                    let v = field.get(&MultiIndex::d2(wrap(i), wrap(j)));
                    field.set(&idx, v);
                }
            }
        }
    }
}

/// Tensor-product reconstruction of one 2D cell from its window
/// `window[k][l]` (k along x, l along y, offsets `-m..=m`).
///
/// Returns monomial coefficients `C[p][q]` of `Σ C_pq x̂^p ŷ^q`, computed as
/// `C = (Aᵀ)⁻¹ U A⁻¹` with `A[p][k] = ∫_k^{k+1} x̂^p`.
pub fn reconstruct_2d_cell(m: usize, window: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let w = 2 * m + 1;
    if window.len() != w || window.iter().any(|r| r.len() != w) {
        return Err(Error::DimensionMismatch {
            expected: w,
            got: window.len(),
        });
    }
    // moment_matrix is indexed [k][p]; A[p][k] is its transpose
    let mm = moment_matrix(m);
    let a: Vec<Vec<Rational>> = (0..w).map(|p| (0..w).map(|k| mm[k][p].clone()).collect()).collect();
    let a_inv = invert(&a).ok_or(Error::SingularMomentSystem(m))?;
    let a_inv_t: Vec<Vec<Rational>> = (0..w).map(|i| (0..w).map(|j| a_inv[j][i].clone()).collect()).collect();
    let c = matmul(&matmul(&a_inv_t, window), &a_inv);

    // every window average must be reproduced
    let reproduced = matmul(&matmul(&mm, &c), &a);
    if reproduced != window {
        return Err(Error::SingularMomentSystem(m));
    }
    Ok(c)
}

fn matmul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    let k = b.len();
    let p = b[0].len();
    (0..n)
        .map(|i| {
            (0..p)
                .map(|j| (0..k).fold(Rational::zero(), |acc, l| acc + &a[i][l] * &b[l][j]))
                .collect()
        })
        .collect()
}

/// Evaluates `Σ C_pq x^p y^q`.
pub fn eval_tensor_poly(c: &[Vec<Rational>], x: &Rational, y: &Rational) -> Rational {
    let row = |coeffs: &Vec<Rational>| coeffs.iter().rev().fold(Rational::zero(), |acc, v| acc * y + v);
    c.iter().rev().fold(Rational::zero(), |acc, r| acc * x + row(r))
}

/// Floating-point evaluation engine for the reconstructed field `R^k ū`.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    m: usize,
    dim: usize,
    basis: Vec<Vec<f64>>,
    basis_deriv: Vec<Vec<f64>>,
}

impl Reconstruction {
    pub fn new(m: usize, dim: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        let basis = cached_basis(m)?;
        Ok(Self {
            m,
            dim,
            basis: basis.iter().map(|p| p.to_f64_coeffs()).collect(),
            basis_deriv: basis.iter().map(|p| p.derivative().to_f64_coeffs()).collect(),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn window_len(&self) -> usize {
        (2 * self.m + 1).pow(self.dim as u32)
    }

    fn horner(c: &[f64], t: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, v| acc * t + v)
    }

    /// `φ_r(t)` for `r = -m..=m`.
    pub fn value_weights_1d(&self, t: f64) -> Vec<f64> {
        self.basis.iter().map(|c| Self::horner(c, t)).collect()
    }

    /// `φ_r'(t)` in the reference coordinate.
    pub fn derivative_weights_1d(&self, t: f64) -> Vec<f64> {
        self.basis_deriv.iter().map(|c| Self::horner(c, t)).collect()
    }

    /// Averages of the window centred on `cell`, first axis fastest.
    pub fn window(&self, field: &AvgField, cell: &MultiIndex) -> Vec<f64> {
        let w = 2 * self.m + 1;
        (0..w.pow(self.dim as u32))
            .map(|k| field.get(&cell.offset(&window_offset(self.m, self.dim, k))))
            .collect()
    }

    fn contract(&self, window: &[f64], wx: &[f64], wy: Option<&[f64]>) -> f64 {
        match wy {
            None => wx.iter().zip(window).map(|(a, b)| a * b).sum(),
            Some(wy) => {
                let w = wx.len();
                wy.iter()
                    .enumerate()
                    .map(|(l, &b)| b * wx.iter().zip(&window[l * w..(l + 1) * w]).map(|(a, u)| a * u).sum::<f64>())
                    .sum()
            }
        }
    }

    /// Value of the reconstruction on a window at reference point `xref`.
    pub fn value_from_window(&self, window: &[f64], xref: [f64; 2]) -> f64 {
        let wx = self.value_weights_1d(xref[0]);
        if self.dim == 1 {
            self.contract(window, &wx, None)
        } else {
            let wy = self.value_weights_1d(xref[1]);
            self.contract(window, &wx, Some(&wy))
        }
    }

    /// Physical gradient on a window at reference point `xref` (cell width `h`).
    pub fn gradient_from_window(&self, window: &[f64], xref: [f64; 2], h: f64) -> [f64; 2] {
        let dx = self.derivative_weights_1d(xref[0]);
        if self.dim == 1 {
            [self.contract(window, &dx, None) / h, 0.0]
        } else {
            let vx = self.value_weights_1d(xref[0]);
            let vy = self.value_weights_1d(xref[1]);
            let dy = self.derivative_weights_1d(xref[1]);
            [
                self.contract(window, &dx, Some(&vy)) / h,
                self.contract(window, &vx, Some(&dy)) / h,
            ]
        }
    }

    pub fn value(&self, field: &AvgField, cell: &MultiIndex, xref: [f64; 2]) -> f64 {
        self.value_from_window(&self.window(field, cell), xref)
    }

    pub fn gradient(&self, field: &AvgField, cell: &MultiIndex, xref: [f64; 2]) -> [f64; 2] {
        self.gradient_from_window(&self.window(field, cell), xref, field.mesh().h())
    }

    /// Value of `R^k ū` at a physical point, using the owner cell's
    /// reconstruction. Ghosts must already be filled.
    pub fn evaluate(&self, field: &AvgField, point: &[f64]) -> Result<f64> {
        let (cell, xref) = field.mesh().locate(point)?;
        Ok(self.value(field, &cell, xref))
    }

    pub fn evaluate_batch(&self, field: &AvgField, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        points.iter().map(|p| self.evaluate(field, p)).collect()
    }
}

/// Evaluates the reconstructed solution at `point`; see [`Reconstruction::evaluate`].
pub fn evaluate_solution(field: &AvgField, recon: &Reconstruction, point: &[f64]) -> Result<f64> {
    recon.evaluate(field, point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::gauss_rule;
    use crate::mesh::build_mesh;
    use crate::rational::rat;

    fn point(v: &[Rational]) -> StencilKind {
        StencilKind::PointValue(v.to_vec())
    }

    #[test]
    fn left_face_weights_m1() {
        let op = build_interior_stencil(1, 1, point(&[int(0)])).unwrap();
        assert_eq!(op.weights, vec![rat(1, 3), rat(5, 6), rat(-1, 6)]);
        assert_eq!(op.apply_exact(&[int(0), int(1), int(0)]), rat(5, 6));
    }

    #[test]
    fn midpoint_weight_m1() {
        // hand-solved moment system a/3+b/2+c=1, a/3-b/2+c=0, 7a/3+3b/2+c=0
        // for p(x) = a x² + b x + c on the owner cell [0,1] gives p(1/2) = 13/12
        let op = build_interior_stencil(1, 1, point(&[rat(1, 2)])).unwrap();
        assert_eq!(op.apply_exact(&[int(0), int(1), int(0)]), rat(13, 12));
    }

    #[test]
    fn constants_and_weight_sums() {
        for m in 1..=2 {
            for dim in 1..=2 {
                let pt: Vec<Rational> = vec![rat(1, 3); dim];
                let v = build_interior_stencil(m, dim, point(&pt)).unwrap();
                let sum: Rational = v.weights.iter().cloned().sum();
                assert_eq!(sum, int(1));
                let d = build_interior_stencil(m, dim, StencilKind::Derivative { axis: 0, at: pt.clone() }).unwrap();
                let sum: Rational = d.weights.iter().cloned().sum();
                assert_eq!(sum, int(0));
                let ones = vec![int(1); v.weights.len()];
                assert_eq!(v.apply_exact(&ones), int(1));
            }
        }
    }

    #[test]
    fn rejects_samples_outside_owner_cell() {
        assert!(build_interior_stencil(1, 1, point(&[rat(3, 2)])).is_err());
        assert!(build_interior_stencil(1, 2, point(&[rat(1, 2)])).is_err());
        assert!(build_interior_stencil(1, 3, point(&[rat(1, 2)])).is_err());
    }

    #[test]
    fn flux_coefficients() {
        let f1 = derivative_flux_coeffs(1).unwrap();
        assert_eq!(f1.gamma, vec![int(1)]);
        let f2 = derivative_flux_coeffs(2).unwrap();
        assert_eq!(f2.gamma, vec![rat(-1, 12), rat(7, 6), rat(-1, 12)]);
        assert_eq!(*f2.gamma_at(0), rat(7, 6));
        for m in 1..=4 {
            let f = derivative_flux_coeffs(m).unwrap();
            // constants carry no derivative
            let s: Rational = f.c_plus.iter().cloned().sum();
            assert!(s.is_zero());
            assert!(f.c_plus_at(m as i64).is_zero());
            assert!(f.c_minus_at(-(m as i64)).is_zero());
        }
    }

    #[test]
    fn dirichlet_ghost_rule() {
        let g = GhostRule::dirichlet(1).unwrap();
        assert_eq!(g.coefficients, vec![vec![rat(-5, 2), rat(1, 2)]]);
        assert!(GhostRule::dirichlet(2).is_err());
        // boundary trace vanishes for symbolic interior values
        let trace = build_interior_stencil(1, 1, point(&[int(0)])).unwrap();
        for (a, b) in [(int(1), int(0)), (int(0), int(1)), (rat(3, 7), rat(-2, 5))] {
            let ghost = &g.coefficients[0][0] * &a + &g.coefficients[0][1] * &b;
            assert!(trace.apply_exact(&[ghost, a, b]).is_zero());
        }
    }

    #[test]
    fn dirichlet_fill_1d() {
        let mesh = build_mesh(1, 5, 1).unwrap();
        let mut f = AvgField::from_interior(&mesh, &[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        fill_ghosts_dirichlet(&mut f).unwrap();
        assert_eq!(f.get(&MultiIndex::d1(-1)), -2.5);
        assert_eq!(f.get(&MultiIndex::d1(5)), 0.0);

        let mut z = AvgField::zeros(&mesh);
        fill_ghosts_dirichlet(&mut z).unwrap();
        assert_eq!(z.get(&MultiIndex::d1(-1)), 0.0);
        assert_eq!(z.get(&MultiIndex::d1(5)), 0.0);

        let wide = build_mesh(1, 5, 2).unwrap();
        assert!(fill_ghosts_dirichlet(&mut AvgField::zeros(&wide)).is_err());
    }

    #[test]
    fn dirichlet_fill_2d_edges_and_corners() {
        let mesh = build_mesh(2, 4, 1).unwrap();
        let mut f = AvgField::zeros(&mesh);
        f.set(&MultiIndex::d2(0, 2), 2.0);
        f.set(&MultiIndex::d2(1, 2), 4.0);
        fill_ghosts_dirichlet(&mut f).unwrap();
        assert_eq!(f.get(&MultiIndex::d2(-1, 2)), -3.0);

        // corner fill is symmetric in the order of the two sweeps
        let mut g = AvgField::zeros(&mesh);
        let vals = [(0, 0, 1.0), (1, 0, 2.0), (0, 1, 3.0), (1, 1, 5.0)];
        for (i, j, v) in vals {
            g.set(&MultiIndex::d2(i, j), v);
        }
        fill_ghosts_dirichlet(&mut g).unwrap();
        let rule = |a: f64, b: f64| -2.5 * a + 0.5 * b;
        let x_first = rule(rule(1.0, 2.0), rule(3.0, 5.0));
        let y_first = rule(rule(1.0, 3.0), rule(2.0, 5.0));
        assert!((x_first - y_first).abs() < 1e-14);
        assert!((g.get(&MultiIndex::d2(-1, -1)) - x_first).abs() < 1e-14);
    }

    #[test]
    fn periodic_fill() {
        let mesh = build_mesh(1, 4, 1).unwrap();
        let mut f = AvgField::from_interior(&mesh, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        fill_ghosts_periodic(&mut f);
        assert_eq!(f.get(&MultiIndex::d1(-1)), 4.0);
        assert_eq!(f.get(&MultiIndex::d1(4)), 1.0);

        let mesh = build_mesh(1, 5, 2).unwrap();
        let mut f = AvgField::from_interior(&mesh, &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        fill_ghosts_periodic(&mut f);
        assert_eq!(f.get(&MultiIndex::d1(-2)), 4.0);
        assert_eq!(f.get(&MultiIndex::d1(6)), 2.0);

        let mesh = build_mesh(2, 3, 1).unwrap();
        let vals: Vec<f64> = (0..9).map(|v| v as f64).collect();
        let mut f = AvgField::from_interior(&mesh, &vals).unwrap();
        fill_ghosts_periodic(&mut f);
        assert_eq!(f.get(&MultiIndex::d2(-1, -1)), f.get(&MultiIndex::d2(2, 2)));
        assert_eq!(f.get(&MultiIndex::d2(3, -1)), f.get(&MultiIndex::d2(0, 2)));
    }

    #[test]
    fn reconstruct_2d_examples() {
        let ones = vec![vec![int(1); 3]; 3];
        let c = reconstruct_2d_cell(1, &ones).unwrap();
        assert_eq!(eval_tensor_poly(&c, &rat(1, 7), &rat(2, 3)), int(1));
        assert!(c.iter().enumerate().all(|(p, r)| r.iter().enumerate().all(|(q, v)| (p + q == 0) || v.is_zero())));

        // averages of x̂ŷ over [k,k+1]x[l,l+1] are (k+1/2)(l+1/2)
        let xy: Vec<Vec<Rational>> = (-1..=1)
            .map(|k| (-1..=1).map(|l| (int(k) + rat(1, 2)) * (int(l) + rat(1, 2))).collect())
            .collect();
        let c = reconstruct_2d_cell(1, &xy).unwrap();
        for (x, y) in [(rat(1, 3), rat(1, 5)), (int(0), int(1))] {
            assert_eq!(eval_tensor_poly(&c, &x, &y), &x * &y);
        }

        let mut spike = vec![vec![int(0); 3]; 3];
        spike[1][1] = rat(7, 2);
        let c = reconstruct_2d_cell(1, &spike).unwrap();
        let mid = eval_tensor_poly(&c, &rat(1, 2), &rat(1, 2));
        assert_eq!(mid, rat(13, 12) * rat(13, 12) * rat(7, 2));

        assert!(reconstruct_2d_cell(1, &[vec![int(1); 3]]).is_err());
    }

    #[test]
    fn tensor_weights_are_outer_products() {
        let pt = [rat(1, 4), rat(2, 3)];
        let w2 = build_interior_stencil(1, 2, point(&pt)).unwrap();
        let wx = build_interior_stencil(1, 1, point(&pt[..1])).unwrap();
        let wy = build_interior_stencil(1, 1, point(&pt[1..])).unwrap();
        for k in 0..9 {
            assert_eq!(w2.weights[k], &wx.weights[k % 3] * &wy.weights[k / 3]);
        }
    }

    #[test]
    fn evaluate_solution_cases() {
        let mesh = build_mesh(1, 8, 1).unwrap();
        let recon = Reconstruction::new(1, 1).unwrap();
        let c = AvgField::from_interior(&mesh, &[2.5; 8]).unwrap().with_ghosts(Bc::Periodic).unwrap();
        for x in [0.0, 0.3, 1.0] {
            assert!((evaluate_solution(&c, &recon, &[x]).unwrap() - 2.5).abs() < 1e-14);
        }

        let vals = [0.3, -1.2, 4.0, 0.5, 0.1, 2.0, -0.7, 1.1];
        let d = AvgField::from_interior(&mesh, &vals).unwrap().with_ghosts(Bc::Dirichlet).unwrap();
        assert!(recon.evaluate(&d, &[0.0]).unwrap().abs() < 1e-13);
        assert!(recon.evaluate(&d, &[1.0]).unwrap().abs() < 1e-13);

        let rule = gauss_rule(4).unwrap();
        let q = AvgField::from_function(&mesh, |x| x[0] * (1.0 - x[0]), &rule)
            .with_ghosts(Bc::Dirichlet)
            .unwrap();
        assert!((recon.evaluate(&q, &[0.5]).unwrap() - 0.25).abs() < 1e-13);

        assert!(recon.evaluate(&q, &[1.5]).is_err());
    }
}
