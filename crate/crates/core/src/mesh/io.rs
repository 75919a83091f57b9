//! Tetrahedral interchange (.node/.ele ASCII pairs) and binary STL output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::{SurfaceMesh, TetMesh};

/// Non-comment, non-empty lines with trailing `#` comments stripped.
fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
}

fn parse_fields<T: std::str::FromStr>(line: &str, n: usize, what: &str) -> Result<Vec<T>> {
    let fields: std::result::Result<Vec<T>, _> =
        line.split_whitespace().take(n).map(str::parse).collect();
    match fields {
        Ok(f) if f.len() == n => Ok(f),
        _ => Err(Error::CorruptFile(format!("malformed {what} line `{line}`"))),
    }
}

/// Read a tetrahedral mesh from a `.node`/`.ele` file pair.
///
/// Headers are `<count> 3 <attrs> <markers>` and `<count> 4 <attrs>`; node
/// numbering may be 0- or 1-based and is detected from the first node's
/// index. Extra per-line attributes are ignored.
pub fn read_tetmesh(node_path: &Path, ele_path: &Path) -> Result<TetMesh> {
    let node_text = std::fs::read_to_string(node_path)?;
    let mut lines = data_lines(&node_text);
    let header = lines
        .next()
        .ok_or_else(|| Error::CorruptFile("empty .node file".into()))?;
    let h: Vec<i64> = parse_fields(header, 2, ".node header")?;
    let (node_count, dim) = (h[0], h[1]);
    if dim != 3 {
        return Err(Error::UnsupportedFormat(format!(
            ".node dimension {dim}, only 3 supported"
        )));
    }
    if node_count < 0 {
        return Err(Error::CorruptFile(format!("node count {node_count}")));
    }

    let mut base: Option<i64> = None;
    let mut nodes: Vec<[f64; 3]> = Vec::with_capacity(node_count as usize);
    for _ in 0..node_count {
        let line = lines
            .next()
            .ok_or_else(|| Error::CorruptFile(".node ends before declared count".into()))?;
        let f: Vec<f64> = parse_fields(line, 4, ".node")?;
        let idx = f[0] as i64;
        // 0- or 1-based, detected from the first index
        let base = *base.get_or_insert(idx);
        if base != 0 && base != 1 {
            return Err(Error::CorruptFile(format!(
                "first node index {base}, expected 0 or 1"
            )));
        }
        if idx - base != nodes.len() as i64 {
            return Err(Error::CorruptFile(format!(
                "non-sequential node index {idx}"
            )));
        }
        nodes.push([f[1], f[2], f[3]]);
    }
    let base = base.unwrap_or(0);

    let ele_text = std::fs::read_to_string(ele_path)?;
    let mut lines = data_lines(&ele_text);
    let header = lines
        .next()
        .ok_or_else(|| Error::CorruptFile("empty .ele file".into()))?;
    let h: Vec<i64> = parse_fields(header, 2, ".ele header")?;
    let (tet_count, per_tet) = (h[0], h[1]);
    if per_tet != 4 {
        return Err(Error::UnsupportedFormat(format!(
            "{per_tet} nodes per element, only linear tets (4) supported"
        )));
    }
    if tet_count < 0 {
        return Err(Error::CorruptFile(format!("element count {tet_count}")));
    }

    let mut tets: Vec<[u32; 4]> = Vec::with_capacity(tet_count as usize);
    for _ in 0..tet_count {
        let line = lines
            .next()
            .ok_or_else(|| Error::CorruptFile(".ele ends before declared count".into()))?;
        let f: Vec<i64> = parse_fields(line, 5, ".ele")?;
        let mut tet = [0u32; 4];
        for (slot, &raw) in tet.iter_mut().zip(&f[1..5]) {
            let resolved = raw - base;
            if resolved < 0 || resolved >= nodes.len() as i64 {
                return Err(Error::CorruptFile(format!(
                    "element references node {raw} outside the node file"
                )));
            }
            *slot = resolved as u32;
        }
        tets.push(tet);
    }

    TetMesh::new(nodes, tets)
}

/// Write a binary STL: 80-byte header, triangle count, then one 50-byte
/// record (normal, three vertices, attribute word) per triangle.
pub fn write_stl(mesh: &SurfaceMesh, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    let mut header = [0u8; 80];
    let tag = b"binary stl; surface mesh";
    header[..tag.len()].copy_from_slice(tag);
    w.write_all(&header)?;
    w.write_all(&(mesh.triangles.len() as u32).to_le_bytes())?;

    for t in &mesh.triangles {
        let a = mesh.vertices[t[0] as usize];
        let b = mesh.vertices[t[1] as usize];
        let c = mesh.vertices[t[2] as usize];
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        let mut n = [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ];
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if len > 0.0 {
            for x in &mut n {
                *x /= len;
            }
        }
        for p in [n, a, b, c] {
            for x in p {
                w.write_all(&(x as f32).to_le_bytes())?;
            }
        }
        w.write_all(&0u16.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, content: &str) -> std::path::PathBuf {
        let path = dir.join(name);
        std::fs::write(&path, content).unwrap();
        path
    }

    const NODES_1BASED: &str = "\
# four corners
4 3 0 0
1 0.0 0.0 0.0
2 1.0 0.0 0.0
3 0.0 1.0 0.0
4 0.0 0.0 1.0
";

    const NODES_0BASED: &str = "\
4 3 0 0
0 0.0 0.0 0.0
1 1.0 0.0 0.0
2 0.0 1.0 0.0
3 0.0 0.0 1.0
";

    #[test]
    fn single_tet_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let node = write(dir.path(), "a.node", NODES_1BASED);
        let ele = write(dir.path(), "a.ele", "1 4 0\n1 1 2 3 4\n");
        let mesh = read_tetmesh(&node, &ele).unwrap();
        assert_eq!(mesh.nodes.len(), 4);
        assert_eq!(mesh.tets, vec![[0, 1, 2, 3]]);
    }

    #[test]
    fn zero_and_one_based_parse_identically() {
        let dir = tempfile::tempdir().unwrap();
        let node1 = write(dir.path(), "one.node", NODES_1BASED);
        let ele1 = write(dir.path(), "one.ele", "1 4 0\n1 1 2 3 4\n");
        let node0 = write(dir.path(), "zero.node", NODES_0BASED);
        let ele0 = write(dir.path(), "zero.ele", "1 4 0\n0 0 1 2 3\n");
        assert_eq!(
            read_tetmesh(&node1, &ele1).unwrap(),
            read_tetmesh(&node0, &ele0).unwrap()
        );
    }

    #[test]
    fn truncated_node_file_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let node = write(dir.path(), "t.node", "4 3 0 0\n1 0 0 0\n2 1 0 0\n");
        let ele = write(dir.path(), "t.ele", "1 4 0\n1 1 2 3 4\n");
        assert!(matches!(
            read_tetmesh(&node, &ele),
            Err(Error::CorruptFile(_))
        ));
    }

    #[test]
    fn out_of_range_reference_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let node = write(dir.path(), "r.node", NODES_1BASED);
        let ele = write(dir.path(), "r.ele", "1 4 0\n1 1 2 3 9\n");
        assert!(matches!(
            read_tetmesh(&node, &ele),
            Err(Error::CorruptFile(_))
        ));
    }

    #[test]
    fn quadratic_elements_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let node = write(dir.path(), "q.node", NODES_1BASED);
        let ele = write(dir.path(), "q.ele", "1 10 0\n1 1 2 3 4 5 6 7 8 9 10\n");
        assert!(matches!(
            read_tetmesh(&node, &ele),
            Err(Error::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn single_triangle_stl_is_134_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let mesh = SurfaceMesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let path = dir.path().join("tri.stl");
        write_stl(&mesh, &path).unwrap();
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 134);
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(u32::from_le_bytes(bytes[80..84].try_into().unwrap()), 1);
        // unit +z normal for this winding
        let nz = f32::from_le_bytes(bytes[92..96].try_into().unwrap());
        assert_eq!(nz, 1.0);
    }
}
