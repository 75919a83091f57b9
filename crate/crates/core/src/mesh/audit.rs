//! Combinatorial watertightness audit: edge incidence and orientation, with
//! an optional triangle-triangle intersection scan.

use std::collections::HashMap;

use crate::mesh::SurfaceMesh;

/// Result of auditing a surface mesh.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WatertightReport {
    /// Every edge borders exactly two triangles with opposite orientation.
    pub is_watertight: bool,
    /// Edges bordering exactly one triangle.
    pub boundary_edges: usize,
    /// Edges bordering more than two triangles, or two with the same
    /// orientation.
    pub nonmanifold_edges: usize,
    /// Connected components over vertices used by triangles.
    pub component_count: usize,
    /// Whether the pairwise intersection scan ran.
    pub self_intersections_checked: bool,
    /// Intersecting non-adjacent triangle pairs found by the scan.
    pub self_intersections: usize,
}

/// Audit edge incidence and orientation. Exact and combinatorial; no
/// geometry is consulted.
pub fn watertight_check(mesh: &SurfaceMesh) -> WatertightReport {
    // per undirected edge: (total incidences, orientation balance)
    let mut edges: HashMap<(u32, u32), (usize, i64)> = HashMap::new();
    let mut degenerate = 0usize;
    for t in &mesh.triangles {
        if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
            degenerate += 1;
            continue;
        }
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            let key = (a.min(b), a.max(b));
            let dir = if a < b { 1 } else { -1 };
            let entry = edges.entry(key).or_insert((0, 0));
            entry.0 += 1;
            entry.1 += dir;
        }
    }
    let boundary_edges = edges.values().filter(|&&(n, _)| n == 1).count();
    let nonmanifold_edges = edges
        .values()
        .filter(|&&(n, bal)| n > 2 || (n == 2 && bal != 0))
        .count();
    let is_watertight = degenerate == 0
        && !mesh.triangles.is_empty()
        && boundary_edges == 0
        && nonmanifold_edges == 0;

    WatertightReport {
        is_watertight,
        boundary_edges,
        nonmanifold_edges,
        component_count: component_count(mesh),
        self_intersections_checked: false,
        self_intersections: 0,
    }
}

/// [`watertight_check`] plus a brute-force triangle-triangle intersection
/// scan (bounding boxes pruned, triangles sharing a vertex skipped).
pub fn watertight_check_with_intersections(mesh: &SurfaceMesh) -> WatertightReport {
    let mut report = watertight_check(mesh);
    report.self_intersections_checked = true;
    report.self_intersections = count_self_intersections(mesh);
    if report.self_intersections > 0 {
        report.is_watertight = false;
    }
    report
}

fn component_count(mesh: &SurfaceMesh) -> usize {
    let n = mesh.vertices.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut used = vec![false; n];
    for t in &mesh.triangles {
        for &v in t {
            used[v as usize] = true;
        }
        for (a, b) in [(t[0], t[1]), (t[1], t[2])] {
            let ra = find(&mut parent, a as usize);
            let rb = find(&mut parent, b as usize);
            if ra != rb {
                parent[ra] = rb;
            }
        }
    }
    (0..n)
        .filter(|&v| used[v] && find(&mut parent, v) == v)
        .count()
}

fn count_self_intersections(mesh: &SurfaceMesh) -> usize {
    let tris: Vec<[[f64; 3]; 3]> = mesh
        .triangles
        .iter()
        .map(|t| {
            [
                mesh.vertices[t[0] as usize],
                mesh.vertices[t[1] as usize],
                mesh.vertices[t[2] as usize],
            ]
        })
        .collect();
    let boxes: Vec<([f64; 3], [f64; 3])> = tris
        .iter()
        .map(|t| {
            let mut lo = t[0];
            let mut hi = t[0];
            for p in &t[1..] {
                for a in 0..3 {
                    lo[a] = lo[a].min(p[a]);
                    hi[a] = hi[a].max(p[a]);
                }
            }
            (lo, hi)
        })
        .collect();

    let mut count = 0usize;
    for i in 0..tris.len() {
        for j in i + 1..tris.len() {
            if shares_vertex(&mesh.triangles[i], &mesh.triangles[j]) {
                continue;
            }
            let (alo, ahi) = boxes[i];
            let (blo, bhi) = boxes[j];
            if (0..3).any(|a| ahi[a] < blo[a] || bhi[a] < alo[a]) {
                continue;
            }
            if triangles_intersect(&tris[i], &tris[j]) {
                count += 1;
            }
        }
    }
    count
}

fn shares_vertex(a: &[u32; 3], b: &[u32; 3]) -> bool {
    a.iter().any(|v| b.contains(v))
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Segment-triangle intersection with a small symmetric epsilon; two
/// triangles intersect when any edge of one properly crosses the other.
fn triangles_intersect(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> bool {
    const EPS: f64 = 1e-12;
    let edge_hits = |tri: &[[f64; 3]; 3], other: &[[f64; 3]; 3]| -> bool {
        let n = cross(sub(other[1], other[0]), sub(other[2], other[0]));
        for e in 0..3 {
            let p = tri[e];
            let q = tri[(e + 1) % 3];
            let dp = dot(n, sub(p, other[0]));
            let dq = dot(n, sub(q, other[0]));
            if (dp > EPS && dq > EPS) || (dp < -EPS && dq < -EPS) {
                continue; // both endpoints strictly on one side
            }
            let denom = dp - dq;
            if denom.abs() < EPS {
                continue; // edge parallel to the plane; face tests of the
                          // other triangle cover coplanar overlap
            }
            let t = dp / denom;
            if !(0.0..=1.0).contains(&t) {
                continue;
            }
            let hit = [
                p[0] + t * (q[0] - p[0]),
                p[1] + t * (q[1] - p[1]),
                p[2] + t * (q[2] - p[2]),
            ];
            if point_in_triangle(hit, other) {
                return true;
            }
        }
        false
    };
    edge_hits(a, b) || edge_hits(b, a)
}

fn point_in_triangle(p: [f64; 3], tri: &[[f64; 3]; 3]) -> bool {
    let v0 = sub(tri[1], tri[0]);
    let v1 = sub(tri[2], tri[0]);
    let v2 = sub(p, tri[0]);
    let d00 = dot(v0, v0);
    let d01 = dot(v0, v1);
    let d11 = dot(v1, v1);
    let d20 = dot(v2, v0);
    let d21 = dot(v2, v1);
    let denom = d00 * d11 - d01 * d01;
    if denom.abs() < 1e-18 {
        return false;
    }
    let v = (d11 * d20 - d01 * d21) / denom;
    let w = (d00 * d21 - d01 * d20) / denom;
    let u = 1.0 - v - w;
    const E: f64 = 1e-9;
    (-E..=1.0 + E).contains(&u) && (-E..=1.0 + E).contains(&v) && (-E..=1.0 + E).contains(&w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::SurfaceMesh;

    /// Closed unit cube from 12 triangles, outward oriented.
    fn cube() -> SurfaceMesh {
        let vertices = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 1.0],
            [0.0, 1.0, 1.0],
            [1.0, 1.0, 1.0],
        ];
        let triangles = vec![
            [0, 2, 1],
            [1, 2, 3], // z = 0, normal −z
            [4, 5, 6],
            [5, 7, 6], // z = 1, normal +z
            [0, 1, 4],
            [1, 5, 4], // y = 0
            [2, 6, 3],
            [3, 6, 7], // y = 1
            [0, 4, 2],
            [2, 4, 6], // x = 0
            [1, 3, 5],
            [3, 7, 5], // x = 1
        ];
        SurfaceMesh::new(vertices, triangles).unwrap()
    }

    #[test]
    fn closed_cube_is_watertight() {
        let report = watertight_check(&cube());
        assert!(report.is_watertight);
        assert_eq!(report.boundary_edges, 0);
        assert_eq!(report.nonmanifold_edges, 0);
        assert_eq!(report.component_count, 1);
        assert!((cube().enclosed_volume() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn removing_a_face_opens_boundary_edges() {
        let mut m = cube();
        m.triangles.truncate(11); // drop one triangle of the x = 1 face
        let report = watertight_check(&m);
        assert!(!report.is_watertight);
        assert_eq!(report.boundary_edges, 3);
    }

    #[test]
    fn removing_a_quad_face_opens_the_quad_boundary() {
        let mut m = cube();
        m.triangles.truncate(10); // both triangles of the x = 1 face
        let report = watertight_check(&m);
        assert!(!report.is_watertight);
        assert!(report.boundary_edges > 0);
        assert_eq!(report.boundary_edges, 4);
    }

    #[test]
    fn two_disjoint_closed_components() {
        let a = cube();
        let mut b = cube();
        let offset = a.vertices.len() as u32;
        let mut vertices = a.vertices.clone();
        vertices.extend(b.vertices.iter().map(|v| [v[0] + 5.0, v[1], v[2]]));
        let mut triangles = a.triangles.clone();
        for t in &mut b.triangles {
            triangles.push([t[0] + offset, t[1] + offset, t[2] + offset]);
        }
        let mesh = SurfaceMesh::new(vertices, triangles).unwrap();
        let report = watertight_check(&mesh);
        assert!(report.is_watertight);
        assert_eq!(report.component_count, 2);
    }

    #[test]
    fn flipped_triangle_is_an_orientation_defect() {
        let mut m = cube();
        m.triangles[0] = [0, 1, 2]; // reversed winding
        let report = watertight_check(&m);
        assert!(!report.is_watertight);
        assert!(report.nonmanifold_edges > 0);
    }

    #[test]
    fn interpenetrating_cubes_are_caught_by_the_scan() {
        let a = cube();
        let b = cube();
        let offset = a.vertices.len() as u32;
        let mut vertices = a.vertices.clone();
        vertices.extend(b.vertices.iter().map(|v| [v[0] + 0.5, v[1] + 0.5, v[2] + 0.5]));
        let mut triangles = a.triangles.clone();
        triangles.extend(b.triangles.iter().map(|t| [t[0] + offset, t[1] + offset, t[2] + offset]));
        let mesh = SurfaceMesh::new(vertices, triangles).unwrap();
        let audit_only = watertight_check(&mesh);
        assert!(!audit_only.self_intersections_checked);
        let full = watertight_check_with_intersections(&mesh);
        assert!(full.self_intersections_checked);
        assert!(full.self_intersections > 0);
        assert!(!full.is_watertight);
    }

    #[test]
    fn separated_cubes_have_no_intersections() {
        let a = cube();
        let b = cube();
        let offset = a.vertices.len() as u32;
        let mut vertices = a.vertices.clone();
        vertices.extend(b.vertices.iter().map(|v| [v[0] + 3.0, v[1], v[2]]));
        let mut triangles = a.triangles.clone();
        triangles.extend(b.triangles.iter().map(|t| [t[0] + offset, t[1] + offset, t[2] + offset]));
        let mesh = SurfaceMesh::new(vertices, triangles).unwrap();
        let full = watertight_check_with_intersections(&mesh);
        assert_eq!(full.self_intersections, 0);
        assert!(full.is_watertight);
    }
}
