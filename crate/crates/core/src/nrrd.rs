//! NRRD reader/writer for the subset the dataset uses: 3D, attached header,
//! raw or gzip encoding, little/big endian, scalar types u8/i16/u16/f32.
//! Everything outside that subset is rejected loudly.
//!
//! Payload order is fastest-varying axis first, as declared by `sizes`,
//! matching the in-memory layout of [`VoxelGrid`].

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use crate::error::{Error, Result};
use crate::grid::{Geometry, LabelMask, ScalarBuffer, VoxelGrid};

/// Payload encodings the subset supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    Raw,
    Gzip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Endian {
    Little,
    Big,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ScalarType {
    U8,
    I16,
    U16,
    F32,
}

impl ScalarType {
    fn size(self) -> usize {
        match self {
            ScalarType::U8 => 1,
            ScalarType::I16 | ScalarType::U16 => 2,
            ScalarType::F32 => 4,
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "uchar" | "unsigned char" | "uint8" | "uint8_t" => Ok(ScalarType::U8),
            "short" | "short int" | "signed short" | "signed short int" | "int16" | "int16_t" => {
                Ok(ScalarType::I16)
            }
            "ushort" | "unsigned short" | "unsigned short int" | "uint16" | "uint16_t" => {
                Ok(ScalarType::U16)
            }
            "float" => Ok(ScalarType::F32),
            other => Err(Error::UnsupportedFormat(format!(
                "scalar type `{other}` not in supported subset (uint8/int16/uint16/float)"
            ))),
        }
    }
}

struct Header {
    dims: [usize; 3],
    scalar: ScalarType,
    encoding: Encoding,
    endian: Endian,
    spacing: [f64; 3],
    origin: [f64; 3],
    direction: [[f64; 3]; 3],
}

/// Read a volume. Masks are volumes too; use [`read_mask`] to binarize.
pub fn read_nrrd(path: &Path) -> Result<VoxelGrid> {
    let bytes = std::fs::read(path)?;
    parse_nrrd(&bytes)
}

/// Read a volume and binarize it at `> 0` into a [`LabelMask`].
pub fn read_mask(path: &Path) -> Result<LabelMask> {
    Ok(LabelMask::from_grid(&read_nrrd(path)?))
}

/// Parse an in-memory NRRD byte stream.
pub fn parse_nrrd(bytes: &[u8]) -> Result<VoxelGrid> {
    let (header, payload) = split_header(bytes)?;
    let header = parse_header(&header)?;
    // header sizes are untrusted: checked arithmetic, and never allocate
    // from the declared size
    let expected = header.dims[0]
        .checked_mul(header.dims[1])
        .and_then(|n| n.checked_mul(header.dims[2]))
        .and_then(|n| n.checked_mul(header.scalar.size()))
        .ok_or_else(|| {
            Error::CorruptFile(format!("sizes {:?} overflow", header.dims))
        })?;

    let data = match header.encoding {
        Encoding::Raw => {
            if payload.len() != expected {
                return Err(Error::CorruptFile(format!(
                    "raw payload is {} bytes, header declares {expected}",
                    payload.len()
                )));
            }
            payload.to_vec()
        }
        Encoding::Gzip => {
            let mut out = Vec::new();
            GzDecoder::new(payload)
                .take(expected as u64 + 1)
                .read_to_end(&mut out)
                .map_err(|e| Error::CorruptFile(format!("gzip decode failed: {e}")))?;
            if out.len() != expected {
                return Err(Error::CorruptFile(format!(
                    "gzip payload decodes to {} bytes or more, header declares {expected}",
                    out.len()
                )));
            }
            out
        }
    };

    let values = decode_values(&data, header.scalar, header.endian);
    let geometry = Geometry::new(header.dims, header.spacing, header.origin, header.direction)?;
    VoxelGrid::new(geometry, values)
}

/// Write a volume. Headers always declare little-endian.
pub fn write_nrrd(grid: &VoxelGrid, path: &Path, encoding: Encoding) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    let g = grid.geometry();
    let [sx, sy, sz] = g.spacing();
    let d = g.direction();

    writeln!(w, "NRRD0004")?;
    writeln!(w, "# produced by segeval")?;
    writeln!(w, "dimension: 3")?;
    writeln!(w, "type: {}", grid.values().type_name())?;
    writeln!(w, "sizes: {} {} {}", g.dims()[0], g.dims()[1], g.dims()[2])?;
    if grid.values().type_name() != "uint8" {
        writeln!(w, "endian: little")?;
    }
    writeln!(
        w,
        "encoding: {}",
        match encoding {
            Encoding::Raw => "raw",
            Encoding::Gzip => "gzip",
        }
    )?;
    writeln!(w, "space: left-posterior-superior")?;
    // Rust's default float formatting is shortest-round-trip, so geometry
    // survives a write/read cycle bit-exactly.
    writeln!(
        w,
        "space directions: ({},{},{}) ({},{},{}) ({},{},{})",
        d[0][0] * sx,
        d[1][0] * sx,
        d[2][0] * sx,
        d[0][1] * sy,
        d[1][1] * sy,
        d[2][1] * sy,
        d[0][2] * sz,
        d[1][2] * sz,
        d[2][2] * sz,
    )?;
    let o = g.origin();
    writeln!(w, "space origin: ({},{},{})", o[0], o[1], o[2])?;
    writeln!(w)?;

    let raw = encode_values(grid.values());
    match encoding {
        Encoding::Raw => w.write_all(&raw)?,
        Encoding::Gzip => {
            let mut enc = GzEncoder::new(w, Compression::default());
            enc.write_all(&raw)?;
            enc.finish()?;
        }
    }
    Ok(())
}

/// Write a mask as uint8 0/1.
pub fn write_mask(mask: &LabelMask, path: &Path, encoding: Encoding) -> Result<()> {
    write_nrrd(&mask.to_grid(), path, encoding)
}

/// Split the byte stream into header lines and payload at the blank line.
fn split_header(bytes: &[u8]) -> Result<(Vec<String>, &[u8])> {
    // Header is ASCII lines; the payload starts after the first empty line.
    let mut lines = Vec::new();
    let mut pos = 0usize;
    loop {
        let rest = &bytes[pos..];
        let nl = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::CorruptFile("no blank line terminating header".into()))?;
        let line = &rest[..nl];
        let line = if line.ends_with(b"\r") {
            &line[..line.len() - 1]
        } else {
            line
        };
        pos += nl + 1;
        if line.is_empty() {
            return Ok((lines, &bytes[pos..]));
        }
        let text = std::str::from_utf8(line)
            .map_err(|_| Error::CorruptFile("non-UTF8 header line".into()))?;
        lines.push(text.to_string());
    }
}

fn parse_header(lines: &[String]) -> Result<Header> {
    let magic = lines
        .first()
        .ok_or_else(|| Error::CorruptFile("empty header".into()))?;
    if !matches!(
        magic.as_str(),
        "NRRD0001" | "NRRD0002" | "NRRD0003" | "NRRD0004" | "NRRD0005"
    ) {
        return Err(Error::UnsupportedFormat(format!("bad magic `{magic}`")));
    }

    let mut dims = None;
    let mut scalar = None;
    let mut encoding = None;
    let mut endian = None;
    let mut sizes: Option<Vec<usize>> = None;
    let mut spacings: Option<Vec<f64>> = None;
    let mut space_directions: Option<Vec<[f64; 3]>> = None;
    let mut origin = [0.0f64; 3];

    for line in &lines[1..] {
        if line.starts_with('#') {
            continue;
        }
        if line.contains(":=") {
            continue; // key/value metadata (e.g. segmentation extras)
        }
        let Some((field, value)) = line.split_once(':') else {
            return Err(Error::CorruptFile(format!("malformed header line `{line}`")));
        };
        let field = field.trim().to_ascii_lowercase();
        let value = value.trim();
        match field.as_str() {
            "dimension" => {
                let d: usize = value
                    .parse()
                    .map_err(|_| Error::CorruptFile(format!("bad dimension `{value}`")))?;
                if d != 3 {
                    return Err(Error::UnsupportedFormat(format!(
                        "dimension {d} unsupported, only 3"
                    )));
                }
                dims = Some(d);
            }
            "type" => scalar = Some(ScalarType::parse(value)?),
            "encoding" => {
                encoding = Some(match value {
                    "raw" => Encoding::Raw,
                    "gzip" | "gz" => Encoding::Gzip,
                    other => {
                        return Err(Error::UnsupportedFormat(format!(
                            "encoding `{other}` unsupported, only raw/gzip"
                        )))
                    }
                })
            }
            "endian" => {
                endian = Some(match value {
                    "little" => Endian::Little,
                    "big" => Endian::Big,
                    other => {
                        return Err(Error::UnsupportedFormat(format!("endian `{other}`")))
                    }
                })
            }
            "sizes" => {
                let parsed: std::result::Result<Vec<usize>, _> =
                    value.split_whitespace().map(str::parse).collect();
                sizes = Some(parsed.map_err(|_| {
                    Error::CorruptFile(format!("bad sizes `{value}`"))
                })?);
            }
            "spacings" => {
                let parsed: std::result::Result<Vec<f64>, _> =
                    value.split_whitespace().map(str::parse).collect();
                spacings = Some(parsed.map_err(|_| {
                    Error::CorruptFile(format!("bad spacings `{value}`"))
                })?);
            }
            "space directions" => {
                let mut vecs = Vec::new();
                for tok in value.split_whitespace() {
                    if tok == "none" {
                        return Err(Error::UnsupportedFormat(
                            "non-spatial axes are unsupported".into(),
                        ));
                    }
                    vecs.push(parse_vector(tok)?);
                }
                space_directions = Some(vecs);
            }
            "space origin" => origin = parse_vector(value)?,
            _ => {} // tolerated optional fields (space, kinds, units, ...)
        }
    }

    if dims.is_none() {
        return Err(Error::CorruptFile("missing `dimension` field".into()));
    }
    let scalar = scalar.ok_or_else(|| Error::CorruptFile("missing `type` field".into()))?;
    let encoding = encoding.ok_or_else(|| Error::CorruptFile("missing `encoding` field".into()))?;
    let sizes = sizes.ok_or_else(|| Error::CorruptFile("missing `sizes` field".into()))?;
    if sizes.len() != 3 || sizes.iter().any(|&s| s == 0) {
        return Err(Error::CorruptFile(format!("sizes {sizes:?} invalid for 3D")));
    }
    let dims = [sizes[0], sizes[1], sizes[2]];

    // Multi-byte data without an endian declaration is read as little-endian.
    let endian = endian.unwrap_or(Endian::Little);

    let (spacing, direction) = match space_directions {
        Some(vecs) => {
            if vecs.len() != 3 {
                return Err(Error::CorruptFile(format!(
                    "expected 3 space direction vectors, got {}",
                    vecs.len()
                )));
            }
            let mut spacing = [0.0; 3];
            let mut dir = [[0.0; 3]; 3];
            for (j, v) in vecs.iter().enumerate() {
                let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if n.is_nan() || n <= 0.0 {
                    return Err(Error::InvalidGeometry(format!(
                        "space direction {j} has zero length"
                    )));
                }
                spacing[j] = n;
                for a in 0..3 {
                    dir[a][j] = v[a] / n;
                }
            }
            (spacing, dir)
        }
        None => {
            let spacing = match spacings {
                Some(s) if s.len() == 3 => [s[0], s[1], s[2]],
                Some(s) => {
                    return Err(Error::CorruptFile(format!(
                        "expected 3 spacings, got {}",
                        s.len()
                    )))
                }
                None => [1.0, 1.0, 1.0],
            };
            (spacing, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        }
    };

    Ok(Header {
        dims,
        scalar,
        encoding,
        endian,
        spacing,
        origin,
        direction,
    })
}

/// Parse `(a,b,c)` into three floats.
fn parse_vector(tok: &str) -> Result<[f64; 3]> {
    let inner = tok
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::CorruptFile(format!("bad vector `{tok}`")))?;
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::CorruptFile(format!("bad vector `{tok}`")));
    }
    let mut out = [0.0; 3];
    for (i, p) in parts.iter().enumerate() {
        out[i] = p
            .parse()
            .map_err(|_| Error::CorruptFile(format!("bad vector component `{p}`")))?;
    }
    Ok(out)
}

fn decode_values(data: &[u8], scalar: ScalarType, endian: Endian) -> ScalarBuffer {
    match scalar {
        ScalarType::U8 => ScalarBuffer::U8(data.to_vec()),
        ScalarType::I16 => ScalarBuffer::I16(
            data.chunks_exact(2)
                .map(|c| {
                    let b = [c[0], c[1]];
                    match endian {
                        Endian::Little => i16::from_le_bytes(b),
                        Endian::Big => i16::from_be_bytes(b),
                    }
                })
                .collect(),
        ),
        ScalarType::U16 => ScalarBuffer::U16(
            data.chunks_exact(2)
                .map(|c| {
                    let b = [c[0], c[1]];
                    match endian {
                        Endian::Little => u16::from_le_bytes(b),
                        Endian::Big => u16::from_be_bytes(b),
                    }
                })
                .collect(),
        ),
        ScalarType::F32 => ScalarBuffer::F32(
            data.chunks_exact(4)
                .map(|c| {
                    let b = [c[0], c[1], c[2], c[3]];
                    match endian {
                        Endian::Little => f32::from_le_bytes(b),
                        Endian::Big => f32::from_be_bytes(b),
                    }
                })
                .collect(),
        ),
    }
}

fn encode_values(values: &ScalarBuffer) -> Vec<u8> {
    match values {
        ScalarBuffer::U8(v) => v.clone(),
        ScalarBuffer::I16(v) => v.iter().flat_map(|x| x.to_le_bytes()).collect(),
        ScalarBuffer::U16(v) => v.iter().flat_map(|x| x.to_le_bytes()).collect(),
        ScalarBuffer::F32(v) => v.iter().flat_map(|x| x.to_le_bytes()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(payload: &[u8]) -> Vec<u8> {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(
            b"NRRD0004\ndimension: 3\ntype: uint8\nsizes: 2 2 2\nencoding: raw\n\n",
        );
        bytes.extend_from_slice(payload);
        bytes
    }

    #[test]
    fn minimal_header_identity_decode() {
        let grid = parse_nrrd(&minimal(&[0, 1, 2, 3, 4, 5, 6, 7])).unwrap();
        assert_eq!(grid.geometry().dims(), [2, 2, 2]);
        assert_eq!(
            grid.values(),
            &ScalarBuffer::U8(vec![0, 1, 2, 3, 4, 5, 6, 7])
        );
        assert_eq!(grid.geometry().spacing(), [1.0, 1.0, 1.0]);
    }

    #[test]
    fn short_payload_is_corrupt() {
        let err = parse_nrrd(&minimal(&[0, 1, 2, 3, 4, 5, 6])).unwrap_err();
        assert!(matches!(err, Error::CorruptFile(_)), "{err}");
    }

    #[test]
    fn unsupported_type_rejected() {
        let bytes =
            b"NRRD0004\ndimension: 3\ntype: double\nsizes: 1 1 1\nencoding: raw\n\n01234567";
        let err = parse_nrrd(bytes).unwrap_err();
        assert!(matches!(err, Error::UnsupportedFormat(_)));
    }

    #[test]
    fn unsupported_dimension_rejected() {
        let bytes = b"NRRD0004\ndimension: 4\ntype: uint8\nsizes: 1 1 1 1\nencoding: raw\n\n\0";
        let err = parse_nrrd(bytes).unwrap_err();
        assert!(matches!(err, Error::UnsupportedFormat(_)));
    }

    #[test]
    fn non_orthonormal_space_directions_rejected() {
        let bytes = b"NRRD0004\ndimension: 3\ntype: uint8\nsizes: 1 1 1\nencoding: raw\nspace directions: (1,0,0) (0.9,0.5,0) (0,0,1)\n\n\0";
        let err = parse_nrrd(bytes).unwrap_err();
        assert!(matches!(err, Error::InvalidGeometry(_)));
    }

    #[test]
    fn big_endian_decode() {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(
            b"NRRD0004\ndimension: 3\ntype: int16\nsizes: 2 1 1\nencoding: raw\nendian: big\n\n",
        );
        bytes.extend_from_slice(&258i16.to_be_bytes());
        bytes.extend_from_slice(&(-7i16).to_be_bytes());
        let grid = parse_nrrd(&bytes).unwrap();
        assert_eq!(grid.values(), &ScalarBuffer::I16(vec![258, -7]));
    }

    #[test]
    fn round_trip_raw_and_gzip() {
        let dir = tempfile::tempdir().unwrap();
        let geometry = Geometry::new(
            [3, 2, 2],
            [0.5, 0.75, 2.0],
            [1.25, -8.5, 0.125],
            [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
        )
        .unwrap();
        let values = ScalarBuffer::F32(vec![
            0.0, 1.5, -2.25, 3.0, 4.5, 5.0, -6.75, 7.0, 8.5, 9.0, 10.25, 11.0,
        ]);
        let grid = VoxelGrid::new(geometry, values).unwrap();

        for (name, enc) in [("raw.nrrd", Encoding::Raw), ("gz.nrrd", Encoding::Gzip)] {
            let path = dir.path().join(name);
            write_nrrd(&grid, &path, enc).unwrap();
            let back = read_nrrd(&path).unwrap();
            assert_eq!(back.values(), grid.values(), "{name}");
            assert!(back.geometry().same_lattice(grid.geometry()), "{name}");
        }
    }

    #[test]
    fn seg_keyvalue_lines_are_skipped() {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"NRRD0004\ndimension: 3\ntype: uint8\nsizes: 1 1 1\nencoding: raw\nSegment0_Name:=aorta\n\n\x02");
        let grid = parse_nrrd(&bytes).unwrap();
        let mask = LabelMask::from_grid(&grid);
        assert_eq!(mask.values(), &[1]);
    }
}
