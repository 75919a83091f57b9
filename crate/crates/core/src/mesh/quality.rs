//! Scaled-Jacobian quality of tetrahedral elements.

use crate::error::{Error, Result};
use crate::mesh::TetMesh;
use crate::ranking::robust_stats;

/// Scaled Jacobian of a tetrahedron: the corner determinant (identical at
/// every corner and equal to six times the signed volume) normalized by the
/// largest product of corner edge lengths, calibrated by √2 so a regular
/// tetrahedron scores exactly 1.
///
/// The value is scale-invariant, odd under any odd vertex permutation
/// (an inverted element scores the negated value of its mirror image), and
/// 0 for degenerate elements (a zero-length edge or coplanar corners).
pub fn scaled_jacobian(tet: &[[f64; 3]; 4]) -> f64 {
    let edge = |a: usize, b: usize| -> [f64; 3] {
        [
            tet[b][0] - tet[a][0],
            tet[b][1] - tet[a][1],
            tet[b][2] - tet[a][2],
        ]
    };
    let len2 = |v: [f64; 3]| v[0] * v[0] + v[1] * v[1] + v[2] * v[2];

    let e01 = edge(0, 1);
    let e02 = edge(0, 2);
    let e03 = edge(0, 3);
    let det = e01[0] * (e02[1] * e03[2] - e02[2] * e03[1])
        - e01[1] * (e02[0] * e03[2] - e02[2] * e03[0])
        + e01[2] * (e02[0] * e03[1] - e02[1] * e03[0]);

    // squared edge lengths, indexed by corner pair
    let l01 = len2(e01);
    let l02 = len2(e02);
    let l03 = len2(e03);
    let l12 = len2(edge(1, 2));
    let l13 = len2(edge(1, 3));
    let l23 = len2(edge(2, 3));
    if [l01, l02, l03, l12, l13, l23].iter().any(|&l| l == 0.0) {
        return 0.0;
    }

    // product of the three squared edge lengths meeting at each corner
    let corner_products = [
        l01 * l02 * l03,
        l01 * l12 * l13,
        l02 * l12 * l23,
        l03 * l13 * l23,
    ];
    let max_product = corner_products.iter().cloned().fold(0.0, f64::max);

    std::f64::consts::SQRT_2 * det / max_product.sqrt()
}

/// Per-element scaled Jacobians with their robust statistics and the
/// invalid-element count (elements with a negative scaled Jacobian).
#[derive(Debug, Clone, PartialEq)]
pub struct MeshQualityReport {
    pub scaled_jacobians: Vec<f64>,
    pub median: f64,
    pub variance: f64,
    pub skewness: f64,
    pub invalid_count: usize,
    pub element_count: usize,
}

/// Score every element of a tetrahedral mesh.
pub fn tet_quality_report(mesh: &TetMesh) -> Result<MeshQualityReport> {
    if mesh.tets.is_empty() {
        return Err(Error::DomainError(
            "quality report of a mesh with no elements".into(),
        ));
    }
    let scaled_jacobians: Vec<f64> = (0..mesh.tets.len())
        .map(|i| scaled_jacobian(&mesh.tet_points(i)))
        .collect();
    let stats = robust_stats(&scaled_jacobians)?;
    let invalid_count = scaled_jacobians.iter().filter(|&&sj| sj < 0.0).count();
    Ok(MeshQualityReport {
        element_count: scaled_jacobians.len(),
        invalid_count,
        median: stats.median,
        variance: stats.variance,
        skewness: stats.skewness,
        scaled_jacobians,
    })
}
