//! Volumetric grids: a 3D scalar image with physical geometry, and binary
//! label masks sharing that geometry.
//!
//! The voxel value array is stored with the fastest-varying axis first:
//! linear index `i + dims[0] * (j + dims[1] * k)`. World coordinates are in
//! millimeters; `world = origin + direction · (spacing ⊙ index)` where the
//! direction matrix columns are the (unit, mutually orthogonal) world
//! directions of the three index axes.

use crate::error::{Error, Result};

/// Tolerance for accepting a direction matrix as orthonormal before
/// re-orthonormalization.
pub const ORTHONORMAL_TOL: f64 = 1e-6;

/// Tolerance used when comparing two geometries for identity.
const GEOMETRY_EQ_TOL: f64 = 1e-9;

/// Physical placement of a voxel lattice: dimensions, spacing (mm/voxel),
/// world origin of voxel (0,0,0)'s center, and axis orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    dims: [usize; 3],
    spacing: [f64; 3],
    origin: [f64; 3],
    /// Row-major 3×3; column `j` is the world direction of index axis `j`.
    direction: [[f64; 3]; 3],
}

impl Geometry {
    /// Build a geometry, validating spacing and orthonormality. A direction
    /// matrix within [`ORTHONORMAL_TOL`] of orthonormal is re-orthonormalized
    /// (exporters drift); anything further off is rejected.
    pub fn new(
        dims: [usize; 3],
        spacing: [f64; 3],
        origin: [f64; 3],
        direction: [[f64; 3]; 3],
    ) -> Result<Self> {
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidGeometry(format!(
                "dims must be positive, got {dims:?}"
            )));
        }
        if spacing.iter().any(|&s| s.is_nan() || s <= 0.0 || !s.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "spacing must be positive, got {spacing:?}"
            )));
        }
        let direction = orthonormalize(direction)?;
        Ok(Self {
            dims,
            spacing,
            origin,
            direction,
        })
    }

    /// Axis-aligned geometry with identity direction.
    pub fn axis_aligned(dims: [usize; 3], spacing: [f64; 3], origin: [f64; 3]) -> Result<Self> {
        Self::new(dims, spacing, origin, IDENTITY)
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.spacing
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    pub fn direction(&self) -> [[f64; 3]; 3] {
        self.direction
    }

    /// Total voxel count.
    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Linear index of voxel (i,j,k); fastest axis first.
    #[inline]
    pub fn linear(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    /// Inverse of [`Self::linear`].
    #[inline]
    pub fn unlinear(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.dims[0];
        let j = (idx / self.dims[0]) % self.dims[1];
        let k = idx / (self.dims[0] * self.dims[1]);
        [i, j, k]
    }

    /// Map a (possibly fractional, possibly out-of-range) voxel index to
    /// world millimeters: `origin + direction · (spacing ⊙ index)`.
    pub fn index_to_world(&self, index: [f64; 3]) -> [f64; 3] {
        let s = [
            self.spacing[0] * index[0],
            self.spacing[1] * index[1],
            self.spacing[2] * index[2],
        ];
        let d = &self.direction;
        [
            self.origin[0] + d[0][0] * s[0] + d[0][1] * s[1] + d[0][2] * s[2],
            self.origin[1] + d[1][0] * s[0] + d[1][1] * s[1] + d[1][2] * s[2],
            self.origin[2] + d[2][0] * s[0] + d[2][1] * s[1] + d[2][2] * s[2],
        ]
    }

    /// Inverse of [`Self::index_to_world`]. The direction matrix is
    /// orthonormal, so its inverse is its transpose.
    pub fn world_to_index(&self, world: [f64; 3]) -> [f64; 3] {
        let v = [
            world[0] - self.origin[0],
            world[1] - self.origin[1],
            world[2] - self.origin[2],
        ];
        let d = &self.direction;
        [
            (d[0][0] * v[0] + d[1][0] * v[1] + d[2][0] * v[2]) / self.spacing[0],
            (d[0][1] * v[0] + d[1][1] * v[1] + d[2][1] * v[2]) / self.spacing[1],
            (d[0][2] * v[0] + d[1][2] * v[1] + d[2][2] * v[2]) / self.spacing[2],
        ]
    }

    /// World position of the grid's center (midpoint of the voxel-center
    /// bounding box).
    pub fn world_center(&self) -> [f64; 3] {
        let c = [
            (self.dims[0] as f64 - 1.0) / 2.0,
            (self.dims[1] as f64 - 1.0) / 2.0,
            (self.dims[2] as f64 - 1.0) / 2.0,
        ];
        self.index_to_world(c)
    }

    /// Diagonal of the voxel-center bounding box in mm: the largest distance
    /// two voxel centers of this grid can be apart.
    pub fn diagonal_mm(&self) -> f64 {
        let dx = (self.dims[0] as f64 - 1.0) * self.spacing[0];
        let dy = (self.dims[1] as f64 - 1.0) * self.spacing[1];
        let dz = (self.dims[2] as f64 - 1.0) * self.spacing[2];
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// True when the two geometries describe the same lattice (dims exact,
    /// continuous fields within 1e-9).
    pub fn same_lattice(&self, other: &Geometry) -> bool {
        if self.dims != other.dims {
            return false;
        }
        let close = |a: f64, b: f64| (a - b).abs() <= GEOMETRY_EQ_TOL;
        for a in 0..3 {
            if !close(self.spacing[a], other.spacing[a]) || !close(self.origin[a], other.origin[a])
            {
                return false;
            }
            for b in 0..3 {
                if !close(self.direction[a][b], other.direction[a][b]) {
                    return false;
                }
            }
        }
        true
    }
}

const IDENTITY: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

fn col(m: &[[f64; 3]; 3], j: usize) -> [f64; 3] {
    [m[0][j], m[1][j], m[2][j]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Check a direction matrix is within tolerance of orthonormal and return
/// the exactly orthonormalized (modified Gram-Schmidt) version.
fn orthonormalize(m: [[f64; 3]; 3]) -> Result<[[f64; 3]; 3]> {
    let mut cols = [col(&m, 0), col(&m, 1), col(&m, 2)];
    for j in 0..3 {
        let n = norm(cols[j]);
        if (n - 1.0).abs() > ORTHONORMAL_TOL {
            return Err(Error::InvalidGeometry(format!(
                "direction column {j} has norm {n}, expected 1"
            )));
        }
        for i in 0..j {
            let d = dot(cols[j], cols[i]);
            if d.abs() > ORTHONORMAL_TOL {
                return Err(Error::InvalidGeometry(format!(
                    "direction columns {i} and {j} are not orthogonal (dot {d})"
                )));
            }
            for a in 0..3 {
                cols[j][a] -= d * cols[i][a];
            }
        }
        let n = norm(cols[j]);
        for a in 0..3 {
            cols[j][a] /= n;
        }
    }
    let mut out = [[0.0; 3]; 3];
    for (j, c) in cols.iter().enumerate() {
        for a in 0..3 {
            out[a][j] = c[a];
        }
    }
    Ok(out)
}

/// Supported scalar buffers for image volumes.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarBuffer {
    U8(Vec<u8>),
    I16(Vec<i16>),
    U16(Vec<u16>),
    F32(Vec<f32>),
}

impl ScalarBuffer {
    pub fn len(&self) -> usize {
        match self {
            ScalarBuffer::U8(v) => v.len(),
            ScalarBuffer::I16(v) => v.len(),
            ScalarBuffer::U16(v) => v.len(),
            ScalarBuffer::F32(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Value at a linear index, widened to f64.
    #[inline]
    pub fn get_f64(&self, idx: usize) -> f64 {
        match self {
            ScalarBuffer::U8(v) => v[idx] as f64,
            ScalarBuffer::I16(v) => v[idx] as f64,
            ScalarBuffer::U16(v) => v[idx] as f64,
            ScalarBuffer::F32(v) => v[idx] as f64,
        }
    }

    /// Name of the element type as written in file headers.
    pub fn type_name(&self) -> &'static str {
        match self {
            ScalarBuffer::U8(_) => "uint8",
            ScalarBuffer::I16(_) => "int16",
            ScalarBuffer::U16(_) => "uint16",
            ScalarBuffer::F32(_) => "float",
        }
    }
}

/// A 3D scalar image with physical spacing, origin, and axis directions.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelGrid {
    geometry: Geometry,
    values: ScalarBuffer,
}

impl VoxelGrid {
    pub fn new(geometry: Geometry, values: ScalarBuffer) -> Result<Self> {
        if values.len() != geometry.len() {
            return Err(Error::InvalidGeometry(format!(
                "value count {} does not match dims {:?}",
                values.len(),
                geometry.dims()
            )));
        }
        Ok(Self { geometry, values })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn values(&self) -> &ScalarBuffer {
        &self.values
    }

    pub fn into_parts(self) -> (Geometry, ScalarBuffer) {
        (self.geometry, self.values)
    }

    /// Values widened to f64 in linear-index order.
    pub fn to_f64(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| self.values.get_f64(i)).collect()
    }
}

/// Binary voxel mask sharing a [`VoxelGrid`]'s geometry. Values are 0 or 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelMask {
    geometry: Geometry,
    values: Vec<u8>,
}

impl LabelMask {
    /// Build from 0/1 values.
    pub fn new(geometry: Geometry, values: Vec<u8>) -> Result<Self> {
        if values.len() != geometry.len() {
            return Err(Error::InvalidGeometry(format!(
                "value count {} does not match dims {:?}",
                values.len(),
                geometry.dims()
            )));
        }
        if values.iter().any(|&v| v > 1) {
            return Err(Error::DomainError(
                "label mask values must be 0 or 1".into(),
            ));
        }
        Ok(Self { geometry, values })
    }

    /// Binarize any scalar grid at `> 0`. Exported segmentations vary in
    /// their foreground label value.
    pub fn from_grid(grid: &VoxelGrid) -> Self {
        let values = (0..grid.values().len())
            .map(|i| u8::from(grid.values().get_f64(i) > 0.0))
            .collect();
        Self {
            geometry: grid.geometry().clone(),
            values,
        }
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> bool {
        self.values[self.geometry.linear(i, j, k)] != 0
    }

    /// Foreground voxel count.
    pub fn foreground_count(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0).count()
    }

    /// Linear indices of foreground voxels.
    pub fn foreground_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, _)| i)
    }

    /// View as a `VoxelGrid` of u8 (for writing).
    pub fn to_grid(&self) -> VoxelGrid {
        VoxelGrid {
            geometry: self.geometry.clone(),
            values: ScalarBuffer::U8(self.values.clone()),
        }
    }
}
