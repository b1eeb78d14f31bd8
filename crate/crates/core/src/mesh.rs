//! Uniform Cartesian meshes on `[0,1]^d`, `d ∈ {1, 2}`.
//!
//! Cells are addressed by 0-based integer multi-indices; cell `i` covers
//! `[i·h, (i+1)·h]` per direction. Ghost cells extend the index range to
//! `[-m, N-1+m]`, where `m` is the ghost width (the reconstruction half-width).

use crate::error::{Error, Result};

/// Cell or face index with one component per direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    dim: usize,
    idx: [i64; 2],
}

impl MultiIndex {
    pub fn d1(i: i64) -> Self {
        Self { dim: 1, idx: [i, 0] }
    }

    pub fn d2(i: i64, j: i64) -> Self {
        Self { dim: 2, idx: [i, j] }
    }

    pub fn from_slice(c: &[i64]) -> Self {
        match *c {
            [i] => Self::d1(i),
            [i, j] => Self::d2(i, j),
            _ => panic!("multi-index must have 1 or 2 components"),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, axis: usize) -> i64 {
        debug_assert!(axis < self.dim);
        self.idx[axis]
    }

    pub fn components(&self) -> &[i64] {
        &self.idx[..self.dim]
    }

    /// The index moved by `delta` along `axis`.
    pub fn shifted(&self, axis: usize, delta: i64) -> Self {
        let mut out = *self;
        out.idx[axis] += delta;
        out
    }

    pub fn offset(&self, by: &MultiIndex) -> Self {
        let mut out = *self;
        for a in 0..self.dim {
            out.idx[a] += by.idx[a];
        }
        out
    }
}

/// A face normal to `normal_axis`. Its index carries the node number
/// (`0..=N`) along the normal axis and the cell number along the others.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Face {
    pub normal_axis: usize,
    pub index: MultiIndex,
    pub is_boundary: bool,
}

impl Face {
    /// The cell on the low side of the face (may be a ghost index).
    pub fn lower_cell(&self) -> MultiIndex {
        self.index.shifted(self.normal_axis, -1)
    }

    /// The cell on the high side of the face (may be a ghost index).
    pub fn upper_cell(&self) -> MultiIndex {
        self.index
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CartesianMesh {
    dim: usize,
    n: usize,
    h: f64,
    ghost_width: usize,
}

/// Builds a mesh with `n` cells per direction and a ghost layer `ghost_width` deep.
pub fn build_mesh(dim: usize, n: usize, ghost_width: usize) -> Result<CartesianMesh> {
    CartesianMesh::new(dim, n, ghost_width)
}

impl CartesianMesh {
    pub fn new(dim: usize, n: usize, ghost_width: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        let min = 2 * ghost_width + 1;
        if n < min {
            return Err(Error::MeshTooSmall {
                n,
                m: ghost_width,
                min,
            });
        }
        Ok(Self {
            dim,
            n,
            h: 1.0 / n as f64,
            ghost_width,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Cells per direction.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn ghost_width(&self) -> usize {
        self.ghost_width
    }

    pub fn num_cells(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Cells per direction including both ghost layers.
    pub fn extended_n(&self) -> usize {
        self.n + 2 * self.ghost_width
    }

    pub fn is_interior(&self, idx: &MultiIndex) -> bool {
        idx.components()
            .iter()
            .all(|&c| c >= 0 && c < self.n as i64)
    }

    pub fn is_extended(&self, idx: &MultiIndex) -> bool {
        let m = self.ghost_width as i64;
        idx.components()
            .iter()
            .all(|&c| c >= -m && c < self.n as i64 + m)
    }

    /// Lexicographic position of an interior cell, first axis fastest.
    pub fn linear_index(&self, idx: &MultiIndex) -> Option<usize> {
        if idx.dim() != self.dim || !self.is_interior(idx) {
            return None;
        }
        let n = self.n;
        Some(match self.dim {
            1 => idx.get(0) as usize,
            _ => idx.get(0) as usize + n * idx.get(1) as usize,
        })
    }

    pub fn multi_index(&self, lin: usize) -> MultiIndex {
        debug_assert!(lin < self.num_cells());
        match self.dim {
            1 => MultiIndex::d1(lin as i64),
            _ => MultiIndex::d2((lin % self.n) as i64, (lin / self.n) as i64),
        }
    }

    /// Interior cells in lexicographic order.
    pub fn cells(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        (0..self.num_cells()).map(move |l| self.multi_index(l))
    }

    /// Position in the ghost-extended storage, first axis fastest.
    pub(crate) fn extended_linear_index(&self, idx: &MultiIndex) -> usize {
        debug_assert!(self.is_extended(idx), "{idx:?} outside extended mesh");
        let m = self.ghost_width as i64;
        let ne = self.extended_n();
        match self.dim {
            1 => (idx.get(0) + m) as usize,
            _ => (idx.get(0) + m) as usize + ne * (idx.get(1) + m) as usize,
        }
    }

    /// Centroid `(idx + 1/2)·h` per direction; ghost centroids extrapolate.
    pub fn cell_centroid(&self, idx: &MultiIndex) -> Vec<f64> {
        idx.components()
            .iter()
            .map(|&c| (c as f64 + 0.5) * self.h)
            .collect()
    }

    /// Lower-left corner of a cell.
    pub fn cell_origin(&self, idx: &MultiIndex) -> Vec<f64> {
        idx.components().iter().map(|&c| c as f64 * self.h).collect()
    }

    /// Every face exactly once, grouped by normal axis then lexicographically.
    pub fn faces(&self) -> Vec<Face> {
        let n = self.n as i64;
        let mut out = Vec::with_capacity(self.dim * (self.n + 1) * self.n.pow(self.dim as u32 - 1));
        for axis in 0..self.dim {
            match self.dim {
                1 => {
                    for i in 0..=n {
                        out.push(Face {
                            normal_axis: 0,
                            index: MultiIndex::d1(i),
                            is_boundary: i == 0 || i == n,
                        });
                    }
                }
                _ => {
                    // first axis fastest in the face index as well
                    let (nx, ny) = if axis == 0 { (n + 1, n) } else { (n, n + 1) };
                    for j in 0..ny {
                        for i in 0..nx {
                            let normal = if axis == 0 { i } else { j };
                            out.push(Face {
                                normal_axis: axis,
                                index: MultiIndex::d2(i, j),
                                is_boundary: normal == 0 || normal == n,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// The cell that owns a point of the closed domain (points on the last
    /// node belong to the last cell), with the point's reference coordinates
    /// in `[0,1]^d`.
    pub fn locate(&self, point: &[f64]) -> Result<(MultiIndex, [f64; 2])> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: point.len(),
            });
        }
        if point.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::PointOutsideDomain(point.to_vec()));
        }
        let mut comps = [0i64; 2];
        let mut local = [0.0; 2];
        for (a, &x) in point.iter().enumerate() {
            let s = x * self.n as f64;
            let c = (s.floor() as i64).min(self.n as i64 - 1);
            comps[a] = c;
            local[a] = s - c as f64;
        }
        Ok((MultiIndex::from_slice(&comps[..self.dim]), local))
    }
}
