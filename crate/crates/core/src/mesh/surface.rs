//! Marching cubes over binary masks with implicit face disambiguation.
//!
//! The per-configuration triangulations are generated once from a single
//! rule: on each cube face, the iso-contour separates the foreground
//! corners, and on ambiguous faces (two diagonal foreground corners) the
//! foreground corners are always cut off individually. The rule reads the
//! same from both cubes sharing a face, so adjacent cubes always agree on
//! the shared polyline and the extracted surface is watertight.
//!
//! The mask is treated as zero-padded: cubes range one layer beyond the
//! volume so border-touching masks still close. Corner samples sit on voxel
//! centers and crossings on lattice edge midpoints, keyed exactly by their
//! lattice edge, so vertex welding is deterministic and independent of cube
//! traversal order.

use std::collections::HashMap;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::LabelMask;
use crate::mesh::SurfaceMesh;

/// Corner `c` offset: `(c & 1, c >> 1 & 1, c >> 2 & 1)`.
fn corner_offset(c: u8) -> [i64; 3] {
    [(c & 1) as i64, (c >> 1 & 1) as i64, (c >> 2 & 1) as i64]
}

/// The 12 cube edges as corner pairs, fixed order.
fn edge_endpoints() -> &'static [(u8, u8); 12] {
    static EDGES: OnceLock<[(u8, u8); 12]> = OnceLock::new();
    EDGES.get_or_init(|| {
        let mut edges = [(0u8, 0u8); 12];
        let mut n = 0;
        for c in 0u8..8 {
            for axis in 0..3 {
                if c & (1 << axis) == 0 {
                    edges[n] = (c, c | (1 << axis));
                    n += 1;
                }
            }
        }
        assert_eq!(n, 12);
        edges
    })
}

fn edge_id(a: u8, b: u8) -> u8 {
    let key = (a.min(b), a.max(b));
    edge_endpoints()
        .iter()
        .position(|&e| e == key)
        .expect("corner pair is a cube edge") as u8
}

/// The six face corner cycles, each counterclockwise as seen from outside
/// the cube.
fn face_cycles() -> [[u8; 4]; 6] {
    let mut faces = [[0u8; 4]; 6];
    let mut n = 0;
    for axis in 0u8..3 {
        let (u, v) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        for side in 0u8..2 {
            let corner = |p: u8, q: u8| -> u8 { side << axis | p << u | q << v };
            let mut cycle = [corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1)];
            // cross(axis_u, axis_v) points along +axis for (y,z)→x and
            // (x,y)→z but along −axis for (x,z)→y; reverse whenever it
            // disagrees with the outward normal.
            let cross_positive = axis != 1;
            let outward_positive = side == 1;
            if cross_positive != outward_positive {
                cycle.reverse();
            }
            faces[n] = cycle;
            n += 1;
        }
    }
    faces
}

/// Directed contour segments (from-edge, to-edge) on one face for a corner
/// configuration: one segment per maximal cyclic run of foreground corners.
fn face_segments(cycle: &[u8; 4], inside: impl Fn(u8) -> bool, out: &mut Vec<(u8, u8)>) {
    let ins: Vec<bool> = cycle.iter().map(|&c| inside(c)).collect();
    let count = ins.iter().filter(|&&b| b).count();
    if count == 0 || count == 4 {
        return;
    }
    for start in 0..4 {
        if !(ins[start] && !ins[(start + 3) % 4]) {
            continue; // not the start of a run
        }
        let mut end = start;
        while ins[(end + 1) % 4] {
            end = (end + 1) % 4;
        }
        let from = edge_id(cycle[end], cycle[(end + 1) % 4]);
        let to = edge_id(cycle[(start + 3) % 4], cycle[start]);
        out.push((from, to));
    }
}

/// Closed loops of cut-edge ids for one of the 256 corner configurations,
/// oriented so fan triangulation yields outward normals.
fn config_loops(config: u8) -> Vec<Vec<u8>> {
    let inside = |c: u8| config & (1 << c) != 0;
    let mut segments = Vec::new();
    for cycle in &face_cycles() {
        face_segments(cycle, inside, &mut segments);
    }
    let mut successor = [u8::MAX; 12];
    for &(from, to) in &segments {
        debug_assert_eq!(successor[from as usize], u8::MAX);
        successor[from as usize] = to;
    }
    let mut visited = [false; 12];
    let mut loops = Vec::new();
    for &(start, _) in &segments {
        if visited[start as usize] {
            continue;
        }
        let mut polyline = Vec::new();
        let mut e = start;
        loop {
            visited[e as usize] = true;
            polyline.push(e);
            e = successor[e as usize];
            if e == start {
                break;
            }
        }
        // contour walking leaves foreground on the left, which fans into
        // inward normals; reverse for outward
        polyline.reverse();
        loops.push(polyline);
    }
    loops
}

fn case_table() -> &'static [Vec<Vec<u8>>; 256] {
    static TABLE: OnceLock<[Vec<Vec<u8>>; 256]> = OnceLock::new();
    TABLE.get_or_init(|| std::array::from_fn(|config| config_loops(config as u8)))
}

/// A cut lattice edge: lower voxel coordinate plus axis. This is the weld
/// key; it is exact, so welding never depends on floating point.
type LatticeEdge = ([i64; 3], u8);

/// Exact vertex key. Contour crossings weld across cubes by lattice edge;
/// loops of four or more crossings are fanned from a centroid vertex keyed
/// by (cube, loop ordinal) so no fan edge can land on a cube face and
/// collide with the neighbor's triangulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum VertexKey {
    Edge(LatticeEdge),
    LoopCenter([i64; 3], u8),
}

/// Extract the iso-0.5 surface of the binary mask in world millimeters.
/// The result is watertight (the mask is implicitly zero-padded), vertices
/// are welded exactly, and triangles are consistently oriented outward.
pub fn marching_cubes(mask: &LabelMask) -> Result<SurfaceMesh> {
    if mask.foreground_count() == 0 {
        return Err(Error::EmptyMask);
    }
    let g = mask.geometry();
    let [nx, ny, nz] = g.dims();
    let sample = |p: [i64; 3]| -> bool {
        if p[0] < 0 || p[1] < 0 || p[2] < 0 {
            return false;
        }
        let (i, j, k) = (p[0] as usize, p[1] as usize, p[2] as usize);
        if i >= nx || j >= ny || k >= nz {
            return false;
        }
        mask.get(i, j, k)
    };

    let table = case_table();

    // Cube base coordinates run one step past the volume on every side.
    // Parallel over z-slabs; slabs are concatenated in order, so the
    // triangle stream does not depend on the thread count.
    let slabs: Vec<Vec<[VertexKey; 3]>> = (-1..nz as i64)
        .into_par_iter()
        .map(|k| {
            let mut tris = Vec::new();
            for j in -1..ny as i64 {
                for i in -1..nx as i64 {
                    let base = [i, j, k];
                    let mut config = 0u8;
                    for c in 0u8..8 {
                        let o = corner_offset(c);
                        if sample([base[0] + o[0], base[1] + o[1], base[2] + o[2]]) {
                            config |= 1 << c;
                        }
                    }
                    if config == 0 || config == 0xff {
                        continue;
                    }
                    for (ordinal, polyline) in table[config as usize].iter().enumerate() {
                        let ring: Vec<VertexKey> = polyline
                            .iter()
                            .map(|&e| VertexKey::Edge(lattice_edge(base, e)))
                            .collect();
                        if ring.len() == 3 {
                            tris.push([ring[0], ring[1], ring[2]]);
                        } else {
                            let center = VertexKey::LoopCenter(base, ordinal as u8);
                            for t in 0..ring.len() {
                                tris.push([center, ring[t], ring[(t + 1) % ring.len()]]);
                            }
                        }
                    }
                }
            }
            tris
        })
        .collect();

    // Deterministic welding: vertex indices come from the sorted set of
    // referenced keys, not from traversal order.
    let mut keys: Vec<VertexKey> = slabs.iter().flatten().flatten().copied().collect();
    keys.sort_unstable();
    keys.dedup();
    let index_of: HashMap<VertexKey, u32> = keys
        .iter()
        .enumerate()
        .map(|(i, &k)| (k, i as u32))
        .collect();

    let edge_midpoint = |(p, axis): LatticeEdge| -> [f64; 3] {
        let mut idx = [p[0] as f64, p[1] as f64, p[2] as f64];
        idx[axis as usize] += 0.5;
        idx
    };
    let vertices: Vec<[f64; 3]> = keys
        .iter()
        .map(|&key| {
            let idx = match key {
                VertexKey::Edge(e) => edge_midpoint(e),
                VertexKey::LoopCenter(base, ordinal) => {
                    // centroid of the loop's crossings, in index space
                    let mut config = 0u8;
                    for c in 0u8..8 {
                        let o = corner_offset(c);
                        if sample([base[0] + o[0], base[1] + o[1], base[2] + o[2]]) {
                            config |= 1 << c;
                        }
                    }
                    let polyline = &table[config as usize][ordinal as usize];
                    let mut acc = [0.0f64; 3];
                    for &e in polyline {
                        let m = edge_midpoint(lattice_edge(base, e));
                        for a in 0..3 {
                            acc[a] += m[a];
                        }
                    }
                    for a in &mut acc {
                        *a /= polyline.len() as f64;
                    }
                    acc
                }
            };
            g.index_to_world(idx)
        })
        .collect();

    let triangles: Vec<[u32; 3]> = slabs
        .iter()
        .flatten()
        .map(|t| [index_of[&t[0]], index_of[&t[1]], index_of[&t[2]]])
        .collect();

    SurfaceMesh::new(vertices, triangles)
}

/// Global lattice edge for local cube edge `e` of the cube at `base`.
fn lattice_edge(base: [i64; 3], e: u8) -> LatticeEdge {
    let (a, b) = edge_endpoints()[e as usize];
    let oa = corner_offset(a);
    let ob = corner_offset(b);
    let axis = (0..3).position(|i| oa[i] != ob[i]).unwrap() as u8;
    (
        [base[0] + oa[0], base[1] + oa[1], base[2] + oa[2]],
        axis,
    )
}
