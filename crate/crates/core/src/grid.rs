//! Tensor-product Cartesian grids with cell-centered and face-normal fields.
//!
//! Cells are numbered x-fastest. Faces are numbered per axis and the axes
//! are concatenated: first the `(nx+1)·ny·nz` x-faces, then the y-faces,
//! then (in 3D) the z-faces. A 2D grid has `nz = 1`, no z-faces, and
//! `dz` acts as the slab thickness.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CartGrid {
    dim: usize,
    n: [usize; 3],
    h: [f64; 3],
    origin: [f64; 3],
}

/// A boundary side of the box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    XMin,
    XMax,
    YMin,
    YMax,
    ZMin,
    ZMax,
}

impl Side {
    pub const ALL: [Side; 6] = [Side::XMin, Side::XMax, Side::YMin, Side::YMax, Side::ZMin, Side::ZMax];

    pub fn axis(self) -> usize {
        match self {
            Side::XMin | Side::XMax => 0,
            Side::YMin | Side::YMax => 1,
            Side::ZMin | Side::ZMax => 2,
        }
    }

    pub fn is_max(self) -> bool {
        matches!(self, Side::XMax | Side::YMax | Side::ZMax)
    }

    /// `+1` on max sides, `-1` on min sides.
    pub fn outward_sign(self) -> f64 {
        if self.is_max() {
            1.0
        } else {
            -1.0
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::XMin => "x_min",
            Side::XMax => "x_max",
            Side::YMin => "y_min",
            Side::YMax => "y_max",
            Side::ZMin => "z_min",
            Side::ZMax => "z_max",
        }
    }
}

impl CartGrid {
    pub fn new(dim: usize, n: [usize; 3], h: [f64; 3], origin: [f64; 3]) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(invalid("grid dimension must be 2 or 3"));
        }
        if n.contains(&0) {
            return Err(invalid("cell counts must be positive"));
        }
        if dim == 2 && n[2] != 1 {
            return Err(invalid("2D grids have nz = 1"));
        }
        if h.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(invalid("grid spacings must be positive"));
        }
        if origin.iter().any(|v| !v.is_finite()) {
            return Err(invalid("grid origin must be finite"));
        }
        Ok(Self { dim, n, h, origin })
    }

    /// 2D grid of `nx × ny` cells with slab thickness `thickness`.
    pub fn new_2d(nx: usize, ny: usize, dx: f64, dy: f64, thickness: f64) -> Result<Self> {
        Self::new(2, [nx, ny, 1], [dx, dy, thickness], [0.0; 3])
    }

    pub fn new_3d(n: [usize; 3], h: [f64; 3]) -> Result<Self> {
        Self::new(3, n, h, [0.0; 3])
    }

    pub fn with_origin(mut self, origin: [f64; 3]) -> Self {
        self.origin = origin;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dims(&self) -> [usize; 3] {
        self.n
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.h
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    pub fn n_cells(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn cell_volume(&self) -> f64 {
        self.h[0] * self.h[1] * self.h[2]
    }

    /// Physical extent along each axis.
    pub fn extent(&self) -> [f64; 3] {
        [self.n[0] as f64 * self.h[0], self.n[1] as f64 * self.h[1], self.n[2] as f64 * self.h[2]]
    }

    #[inline]
    pub fn cell_index(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i < self.n[0] && j < self.n[1] && k < self.n[2]);
        i + self.n[0] * (j + self.n[1] * k)
    }

    #[inline]
    pub fn cell_ijk(&self, cell: usize) -> [usize; 3] {
        let i = cell % self.n[0];
        let r = cell / self.n[0];
        [i, r % self.n[1], r / self.n[1]]
    }

    pub fn cell_center(&self, cell: usize) -> [f64; 3] {
        let ijk = self.cell_ijk(cell);
        core::array::from_fn(|a| self.origin[a] + (ijk[a] as f64 + 0.5) * self.h[a])
    }

    /// Area of a face normal to `axis`.
    pub fn face_area(&self, axis: usize) -> f64 {
        match axis {
            0 => self.h[1] * self.h[2],
            1 => self.h[0] * self.h[2],
            _ => self.h[0] * self.h[1],
        }
    }

    /// Number of faces normal to `axis` (zero for z in 2D).
    pub fn n_faces_axis(&self, axis: usize) -> usize {
        if axis >= self.dim {
            return 0;
        }
        let mut m = self.n;
        m[axis] += 1;
        m[0] * m[1] * m[2]
    }

    pub fn n_faces(&self) -> usize {
        (0..3).map(|a| self.n_faces_axis(a)).sum()
    }

    fn face_offset(&self, axis: usize) -> usize {
        (0..axis).map(|a| self.n_faces_axis(a)).sum()
    }

    /// Face normal to `axis` at lattice position `ijk`, where `ijk[axis]`
    /// ranges over `0..=n[axis]`.
    #[inline]
    pub fn face_index(&self, axis: usize, ijk: [usize; 3]) -> usize {
        let mut m = self.n;
        m[axis] += 1;
        debug_assert!(ijk[0] < m[0] && ijk[1] < m[1] && ijk[2] < m[2]);
        self.face_offset(axis) + ijk[0] + m[0] * (ijk[1] + m[1] * ijk[2])
    }

    /// Inverse of [`face_index`](Self::face_index).
    pub fn face_ijk(&self, face: usize) -> (usize, [usize; 3]) {
        let mut rest = face;
        for axis in 0..self.dim {
            let count = self.n_faces_axis(axis);
            if rest < count {
                let mut m = self.n;
                m[axis] += 1;
                let i = rest % m[0];
                let r = rest / m[0];
                return (axis, [i, r % m[1], r / m[1]]);
            }
            rest -= count;
        }
        panic!("face index {face} out of range");
    }

    /// Lower and upper face of `cell` along `axis`.
    #[inline]
    pub fn cell_faces(&self, cell: usize, axis: usize) -> (usize, usize) {
        let ijk = self.cell_ijk(cell);
        let lo = self.face_index(axis, ijk);
        let mut up = ijk;
        up[axis] += 1;
        (lo, self.face_index(axis, up))
    }

    /// Cells on the lower and upper side of `face`.
    pub fn face_cells(&self, face: usize) -> (Option<usize>, Option<usize>) {
        let (axis, ijk) = self.face_ijk(face);
        let lower = (ijk[axis] > 0).then(|| {
            let mut c = ijk;
            c[axis] -= 1;
            self.cell_index(c[0], c[1], c[2])
        });
        let upper = (ijk[axis] < self.n[axis]).then(|| self.cell_index(ijk[0], ijk[1], ijk[2]));
        (lower, upper)
    }

    pub fn face_side(&self, face: usize) -> Option<Side> {
        let (axis, ijk) = self.face_ijk(face);
        let sides = [[Side::XMin, Side::XMax], [Side::YMin, Side::YMax], [Side::ZMin, Side::ZMax]];
        if ijk[axis] == 0 {
            Some(sides[axis][0])
        } else if ijk[axis] == self.n[axis] {
            Some(sides[axis][1])
        } else {
            None
        }
    }

    pub fn sides(&self) -> &'static [Side] {
        if self.dim == 3 {
            &Side::ALL
        } else {
            &Side::ALL[..4]
        }
    }

    /// Faces on `side`, ordered by the two tangential indices (lower axis fastest).
    pub fn boundary_faces(&self, side: Side) -> Vec<usize> {
        let axis = side.axis();
        if axis >= self.dim {
            return Vec::new();
        }
        let fixed = if side.is_max() { self.n[axis] } else { 0 };
        let mut out = Vec::new();
        for k in 0..self.n[2] {
            for j in 0..self.n[1] {
                for i in 0..self.n[0] {
                    let mut ijk = [i, j, k];
                    if ijk[axis] != 0 {
                        continue;
                    }
                    ijk[axis] = fixed;
                    out.push(self.face_index(axis, ijk));
                }
            }
        }
        out
    }

    /// Cell adjacent to boundary face `face`.
    pub fn boundary_cell(&self, face: usize) -> usize {
        match self.face_cells(face) {
            (Some(c), None) | (None, Some(c)) => c,
            _ => panic!("face {face} is interior"),
        }
    }
}

/// One value per cell, x-fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct CellField<S = f64> {
    values: Vec<S>,
}

impl<S> CellField<S> {
    pub fn new(grid: &CartGrid, values: Vec<S>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::GridMismatch { expected: grid.n_cells(), found: values.len() });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [S] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl<S: Clone> CellField<S> {
    pub fn constant(grid: &CartGrid, value: S) -> Self {
        Self { values: vec![value; grid.n_cells()] }
    }
}

impl<S> Index<usize> for CellField<S> {
    type Output = S;
    fn index(&self, i: usize) -> &S {
        &self.values[i]
    }
}

impl<S> IndexMut<usize> for CellField<S> {
    fn index_mut(&mut self, i: usize) -> &mut S {
        &mut self.values[i]
    }
}

/// One signed normal flux per face, positive along the axis.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceField {
    values: Vec<f64>,
}

impl FaceField {
    pub fn new(grid: &CartGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_faces() {
            return Err(Error::GridMismatch { expected: grid.n_faces(), found: values.len() });
        }
        Ok(Self { values })
    }

    pub fn zeros(grid: &CartGrid) -> Self {
        Self { values: vec![0.0; grid.n_faces()] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl Index<usize> for FaceField {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

impl IndexMut<usize> for FaceField {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.values[i]
    }
}

fn check_faces(grid: &CartGrid, flux: &FaceField) -> Result<()> {
    if flux.len() != grid.n_faces() {
        return Err(Error::GridMismatch { expected: grid.n_faces(), found: flux.len() });
    }
    Ok(())
}

/// Cell flux vectors from the mean of opposite faces; the z component of a
/// 2D grid is zero.
pub fn reconstruct_cell_flux(grid: &CartGrid, flux: &FaceField) -> Result<CellField<[f64; 3]>> {
    check_faces(grid, flux)?;
    let values = (0..grid.n_cells())
        .map(|c| {
            let mut v = [0.0; 3];
            for (axis, slot) in v.iter_mut().enumerate().take(grid.dim()) {
                let (lo, hi) = grid.cell_faces(c, axis);
                *slot = 0.5 * (flux[lo] + flux[hi]);
            }
            v
        })
        .collect();
    Ok(CellField { values })
}

pub fn norm3(v: &[f64; 3]) -> f64 {
    libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
}

/// Euclidean norms of cell flux vectors.
pub fn magnitudes(cell_flux: &CellField<[f64; 3]>) -> CellField<f64> {
    CellField { values: cell_flux.values().iter().map(norm3).collect() }
}

/// Net outward flux per unit volume.
pub fn divergence(grid: &CartGrid, flux: &FaceField) -> Result<CellField<f64>> {
    check_faces(grid, flux)?;
    let vol = grid.cell_volume();
    let values = (0..grid.n_cells())
        .map(|c| {
            let mut net = 0.0;
            for axis in 0..grid.dim() {
                let (lo, hi) = grid.cell_faces(c, axis);
                net += grid.face_area(axis) * (flux[hi] - flux[lo]);
            }
            net / vol
        })
        .collect();
    Ok(CellField { values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid3() -> CartGrid {
        CartGrid::new_3d([3, 4, 2], [1.0, 0.5, 2.0]).unwrap()
    }

    #[test]
    fn counts() {
        let g = grid3();
        assert_eq!(g.n_cells(), 24);
        assert_eq!(g.n_faces_axis(0), 4 * 4 * 2);
        assert_eq!(g.n_faces_axis(1), 3 * 5 * 2);
        assert_eq!(g.n_faces_axis(2), 3 * 4 * 3);
        let g2 = CartGrid::new_2d(3, 4, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(g2.n_faces(), 4 * 4 + 3 * 5);
        assert!(g2.boundary_faces(Side::ZMin).is_empty());
    }

    #[test]
    fn index_round_trips() {
        let g = grid3();
        for c in 0..g.n_cells() {
            let [i, j, k] = g.cell_ijk(c);
            assert_eq!(g.cell_index(i, j, k), c);
        }
        for f in 0..g.n_faces() {
            let (axis, ijk) = g.face_ijk(f);
            assert_eq!(g.face_index(axis, ijk), f);
        }
    }

    #[test]
    fn boundary_faces_cover_boundary() {
        let g = grid3();
        let mut total = 0;
        for &s in g.sides() {
            for f in g.boundary_faces(s) {
                assert_eq!(g.face_side(f), Some(s));
                total += 1;
            }
        }
        let expected = (0..g.n_faces()).filter(|&f| g.face_side(f).is_some()).count();
        assert_eq!(total, expected);
    }

    #[test]
    fn reconstruction_examples() {
        let g = grid3();
        let mut flux = FaceField::zeros(&g);
        assert!(reconstruct_cell_flux(&g, &flux).unwrap().values().iter().all(|v| *v == [0.0; 3]));
        for f in 0..g.n_faces_axis(0) {
            flux[f] = 2.5;
        }
        let cells = reconstruct_cell_flux(&g, &flux).unwrap();
        assert!(cells.values().iter().all(|v| *v == [2.5, 0.0, 0.0]));
        assert!(divergence(&g, &flux).unwrap().values().iter().all(|&d| d == 0.0));

        let one = CartGrid::new_3d([1, 1, 1], [1.0; 3]).unwrap();
        let mut f1 = FaceField::zeros(&one);
        f1[0] = 1.0;
        f1[1] = 3.0;
        assert_eq!(reconstruct_cell_flux(&one, &f1).unwrap()[0][0], 2.0);
    }

    #[test]
    fn divergence_examples() {
        let one = CartGrid::new_3d([1, 1, 1], [1.0; 3]).unwrap();
        let mut f = FaceField::zeros(&one);
        for axis in 0..3 {
            let (lo, hi) = one.cell_faces(0, axis);
            f[lo] = -1.0;
            f[hi] = 1.0;
        }
        assert_eq!(divergence(&one, &f).unwrap()[0], 6.0);

        let g = CartGrid::new_2d(5, 2, 1.0, 1.0, 1.0).unwrap();
        let mut lin = FaceField::zeros(&g);
        for face in 0..g.n_faces_axis(0) {
            let (_, ijk) = g.face_ijk(face);
            lin[face] = ijk[0] as f64;
        }
        assert!(divergence(&g, &lin).unwrap().values().iter().all(|&d| (d - 1.0).abs() < 1e-15));
    }

    #[test]
    fn rejects_bad_grids_and_fields() {
        assert!(CartGrid::new(4, [1, 1, 1], [1.0; 3], [0.0; 3]).is_err());
        assert!(CartGrid::new_2d(0, 1, 1.0, 1.0, 1.0).is_err());
        assert!(CartGrid::new(2, [2, 2, 2], [1.0; 3], [0.0; 3]).is_err());
        let g = grid3();
        assert!(FaceField::new(&g, vec![0.0; 3]).is_err());
        assert!(CellField::new(&g, vec![0.0; 3]).is_err());
    }
}
