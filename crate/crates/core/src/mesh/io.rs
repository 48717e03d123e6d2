//! STL (binary and ASCII) and OFF readers.

use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Point;

use super::TriMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    StlBinary,
    StlAscii,
    Off,
}

impl MeshFormat {
    /// Guesses the format from content, falling back to the extension.
    pub fn detect(bytes: &[u8], path: &Path) -> MeshFormat {
        let head = String::from_utf8_lossy(&bytes[..bytes.len().min(512)]);
        let trimmed = head.trim_start();
        if trimmed.starts_with("OFF") {
            return MeshFormat::Off;
        }
        if bytes.len() >= 84 {
            let n = u32::from_le_bytes([bytes[80], bytes[81], bytes[82], bytes[83]]) as usize;
            if n.checked_mul(50).and_then(|b| b.checked_add(84)) == Some(bytes.len()) {
                return MeshFormat::StlBinary;
            }
        }
        if trimmed.starts_with("solid") && head.contains("facet") {
            return MeshFormat::StlAscii;
        }
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase) {
            Some(ext) if ext == "off" => MeshFormat::Off,
            Some(ext) if ext == "stl" && trimmed.starts_with("solid") => MeshFormat::StlAscii,
            _ => MeshFormat::StlBinary,
        }
    }
}

/// Reads and cleans a mesh file. `format` of `None` auto-detects.
pub fn load_mesh(path: impl AsRef<Path>, format: Option<MeshFormat>) -> Result<TriMesh> {
    let path = path.as_ref();
    let bytes = std::fs::read(path)?;
    parse_mesh(&bytes, path, format)
}

pub fn parse_mesh(bytes: &[u8], path: &Path, format: Option<MeshFormat>) -> Result<TriMesh> {
    let format = format.unwrap_or_else(|| MeshFormat::detect(bytes, path));
    let err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };
    let (vertices, triangles) = match format {
        MeshFormat::StlBinary => parse_stl_binary(bytes).map_err(err)?,
        MeshFormat::StlAscii => parse_stl_ascii(bytes).map_err(err)?,
        MeshFormat::Off => parse_off(bytes).map_err(err)?,
    };
    TriMesh::new(vertices, triangles).map_err(|e| match e {
        Error::Parse { message, .. } => Error::Parse {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

type Soup = (Vec<Point>, Vec<[u32; 3]>);

fn parse_stl_binary(bytes: &[u8]) -> Result<Soup, String> {
    if bytes.len() < 84 {
        return Err(format!("binary STL needs an 84-byte header, got {} bytes", bytes.len()));
    }
    let n = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    let expected = 84 + 50 * n;
    if bytes.len() < expected {
        return Err(format!(
            "binary STL declares {n} triangles ({expected} bytes) but has {} bytes",
            bytes.len()
        ));
    }
    let mut vertices = Vec::with_capacity(3 * n);
    let mut triangles = Vec::with_capacity(n);
    for rec in bytes[84..expected].chunks_exact(50) {
        let f = |o: usize| f32::from_le_bytes(rec[o..o + 4].try_into().unwrap()) as f64;
        let base = vertices.len() as u32;
        // Skip the 12-byte facet normal; orientation comes from winding.
        for v in 0..3 {
            let o = 12 + 12 * v;
            vertices.push(Point::new(f(o), f(o + 4), f(o + 8)));
        }
        triangles.push([base, base + 1, base + 2]);
    }
    Ok((vertices, triangles))
}

fn parse_stl_ascii(bytes: &[u8]) -> Result<Soup, String> {
    let text = std::str::from_utf8(bytes).map_err(|e| format!("ASCII STL is not UTF-8: {e}"))?;
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let mut pending: Vec<u32> = Vec::with_capacity(3);
    for (lineno, line) in text.lines().enumerate() {
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("vertex") => {
                let coords: Vec<f64> = tok
                    .map(str::parse)
                    .collect::<Result<_, _>>()
                    .map_err(|e| format!("line {}: {e}", lineno + 1))?;
                if coords.len() != 3 {
                    return Err(format!("line {}: vertex needs 3 coordinates", lineno + 1));
                }
                pending.push(vertices.len() as u32);
                vertices.push(Point::new(coords[0], coords[1], coords[2]));
            }
            Some("endfacet") => {
                if pending.len() != 3 {
                    return Err(format!(
                        "line {}: facet has {} vertices",
                        lineno + 1,
                        pending.len()
                    ));
                }
                triangles.push([pending[0], pending[1], pending[2]]);
                pending.clear();
            }
            _ => {}
        }
    }
    if !pending.is_empty() {
        return Err("unterminated facet".into());
    }
    Ok((vertices, triangles))
}

fn parse_off(bytes: &[u8]) -> Result<Soup, String> {
    let text = std::str::from_utf8(bytes).map_err(|e| format!("OFF is not UTF-8: {e}"))?;
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    match tokens.next() {
        Some("OFF") => {}
        other => return Err(format!("expected OFF header, found {other:?}")),
    }
    let mut next_num = |what: &str| -> Result<f64, String> {
        tokens
            .next()
            .ok_or_else(|| format!("unexpected end of file reading {what}"))?
            .parse::<f64>()
            .map_err(|e| format!("bad {what}: {e}"))
    };
    let nv = next_num("vertex count")? as usize;
    let nf = next_num("face count")? as usize;
    let _edges = next_num("edge count")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        vertices.push(Point::new(
            next_num("coordinate")?,
            next_num("coordinate")?,
            next_num("coordinate")?,
        ));
    }
    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let k = next_num("face arity")? as usize;
        if k < 3 {
            return Err(format!("face with {k} vertices"));
        }
        let idx: Vec<u32> = (0..k)
            .map(|_| next_num("face index").map(|v| v as u32))
            .collect::<Result<_, _>>()?;
        for i in 1..k - 1 {
            triangles.push([idx[0], idx[i], idx[i + 1]]);
        }
    }
    Ok((vertices, triangles))
}
