//! Surface extraction from label masks, volume-preserving smoothing,
//! watertightness auditing, tetrahedral quality scoring, and the mesh
//! interchange formats.

mod audit;
mod io;
mod quality;
mod smooth;
mod surface;

pub use audit::{watertight_check, watertight_check_with_intersections, WatertightReport};
pub use io::{read_tetmesh, write_stl};
pub use quality::{scaled_jacobian, tet_quality_report, MeshQualityReport};
pub use smooth::{smooth, SmoothParams};
pub use surface::marching_cubes;

use crate::error::{Error, Result};

/// Triangle surface mesh in world millimeters.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[u32; 3]>,
}

impl SurfaceMesh {
    pub fn new(vertices: Vec<[f64; 3]>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        let n = vertices.len() as u32;
        for t in &triangles {
            if t.iter().any(|&v| v >= n) {
                return Err(Error::DomainError(format!(
                    "triangle {t:?} references a vertex outside 0..{n}"
                )));
            }
        }
        Ok(Self {
            vertices,
            triangles,
        })
    }

    /// Signed enclosed volume by the divergence theorem; positive for a
    /// closed surface with outward-oriented triangles.
    pub fn enclosed_volume(&self) -> f64 {
        let mut six_v = 0.0;
        for t in &self.triangles {
            let a = self.vertices[t[0] as usize];
            let b = self.vertices[t[1] as usize];
            let c = self.vertices[t[2] as usize];
            six_v += a[0] * (b[1] * c[2] - b[2] * c[1])
                - a[1] * (b[0] * c[2] - b[2] * c[0])
                + a[2] * (b[0] * c[1] - b[1] * c[0]);
        }
        six_v / 6.0
    }

    /// Undirected edge list with multiplicity, sorted. Useful for
    /// connectivity comparisons.
    pub fn edge_multiset(&self) -> Vec<(u32, u32)> {
        let mut edges = Vec::with_capacity(self.triangles.len() * 3);
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                edges.push((a.min(b), a.max(b)));
            }
        }
        edges.sort_unstable();
        edges
    }
}

/// Tetrahedral mesh in world millimeters.
#[derive(Debug, Clone, PartialEq)]
pub struct TetMesh {
    pub nodes: Vec<[f64; 3]>,
    pub tets: Vec<[u32; 4]>,
}

impl TetMesh {
    pub fn new(nodes: Vec<[f64; 3]>, tets: Vec<[u32; 4]>) -> Result<Self> {
        if nodes.len() < 4 {
            return Err(Error::DomainError(format!(
                "a tetrahedral mesh needs at least 4 nodes, got {}",
                nodes.len()
            )));
        }
        let n = nodes.len() as u32;
        for t in &tets {
            if t.iter().any(|&v| v >= n) {
                return Err(Error::DomainError(format!(
                    "tet {t:?} references a node outside 0..{n}"
                )));
            }
        }
        Ok(Self { nodes, tets })
    }

    /// Corner coordinates of one element.
    pub fn tet_points(&self, idx: usize) -> [[f64; 3]; 4] {
        let t = self.tets[idx];
        [
            self.nodes[t[0] as usize],
            self.nodes[t[1] as usize],
            self.nodes[t[2] as usize],
            self.nodes[t[3] as usize],
        ]
    }
}
