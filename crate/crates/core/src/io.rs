//! Mesh and field files: OFF and OBJ triangle meshes, the one-value-per-line
//! field sidecar, and DOT / OBJ / OFF exports of networks and bands.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::field::{FieldError, GenericityMode, ScalarField};
use crate::mesh::{Mesh, MeshError, VertexId};
use crate::network::{LevelNetwork, LevelPoint};
use crate::regions::ClippedComplex;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot access {path}")]
    Io { path: String, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: face with {count} vertices; only triangles are accepted")]
    Polygon { line: usize, count: usize },
    #[error("unrecognised mesh extension for {0}")]
    UnknownFormat(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_err(line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, IoError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad {what} `{tok}`")))
}

/// Parses OFF text. Faces must be triangles.
pub fn parse_off(text: &str) -> Result<Mesh, IoError> {
    // (line number, content) with comments and blank lines removed
    let mut lines = text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    });
    let (ln, first) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let rest = first
        .strip_prefix("OFF")
        .ok_or_else(|| parse_err(ln, "missing OFF header"))?
        .trim();
    let (ln, counts) = if rest.is_empty() {
        lines.next().ok_or_else(|| parse_err(ln, "missing counts"))?
    } else {
        (ln, rest)
    };
    let mut tok = counts.split_whitespace();
    let nv: usize = number(tok.next(), ln, "vertex count")?;
    let nf: usize = number(tok.next(), ln, "face count")?;
    let mut positions = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(ln, "missing vertex line"))?;
        let mut t = l.split_whitespace();
        let x = number(t.next(), ln, "coordinate")?;
        let y = number(t.next(), ln, "coordinate")?;
        let z = number(t.next(), ln, "coordinate")?;
        positions.push([x, y, z]);
    }
    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(ln, "missing face line"))?;
        let mut t = l.split_whitespace();
        let count: usize = number(t.next(), ln, "face size")?;
        if count != 3 {
            return Err(IoError::Polygon { line: ln, count });
        }
        let a = number(t.next(), ln, "vertex index")?;
        let b = number(t.next(), ln, "vertex index")?;
        let c = number(t.next(), ln, "vertex index")?;
        triangles.push([a, b, c]);
    }
    Ok(Mesh::new(triangles, Some(positions))?)
}

/// Parses the `v` and `f` records of OBJ text. Face entries may carry
/// texture and normal indices (`a/b/c`); negative indices are relative.
pub fn parse_obj(text: &str) -> Result<Mesh, IoError> {
    let mut positions = Vec::new();
    let mut triangles = Vec::new();
    for (i, l) in text.lines().enumerate() {
        let ln = i + 1;
        let l = l.split('#').next().unwrap_or("").trim();
        let mut t = l.split_whitespace();
        match t.next() {
            Some("v") => {
                let x = number(t.next(), ln, "coordinate")?;
                let y = number(t.next(), ln, "coordinate")?;
                let z = number(t.next(), ln, "coordinate")?;
                positions.push([x, y, z]);
            }
            Some("f") => {
                let idx: Vec<VertexId> = t
                    .map(|entry| {
                        let head = entry.split('/').next().unwrap_or("");
                        let k: i64 = number(Some(head), ln, "vertex index")?;
                        let resolved = if k < 0 {
                            positions.len() as i64 + k
                        } else {
                            k - 1
                        };
                        if resolved < 0 {
                            return Err(parse_err(ln, format!("index {k} out of range")));
                        }
                        Ok(resolved as VertexId)
                    })
                    .collect::<Result<_, _>>()?;
                if idx.len() != 3 {
                    return Err(IoError::Polygon {
                        line: ln,
                        count: idx.len(),
                    });
                }
                triangles.push([idx[0], idx[1], idx[2]]);
            }
            _ => {}
        }
    }
    Ok(Mesh::new(triangles, Some(positions))?)
}

/// Reads an `.off` or `.obj` file by extension.
pub fn read_mesh(path: &Path) -> Result<Mesh, IoError> {
    let text = read(path)?;
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase) {
        Some(e) if e == "off" => parse_off(&text),
        Some(e) if e == "obj" => parse_obj(&text),
        _ => Err(IoError::UnknownFormat(path.display().to_string())),
    }
}

/// OFF text; vertices without positions are written at the origin.
pub fn format_off(mesh: &Mesh) -> String {
    let mut out = String::new();
    writeln!(out, "OFF").unwrap();
    writeln!(out, "{} {} 0", mesh.vertex_count(), mesh.triangles().len()).unwrap();
    for v in 0..mesh.vertex_count() {
        let [x, y, z] = mesh.positions().map_or([0.0; 3], |p| p[v]);
        writeln!(out, "{x} {y} {z}").unwrap();
    }
    for [a, b, c] in mesh.triangles() {
        writeln!(out, "3 {a} {b} {c}").unwrap();
    }
    out
}

pub fn write_off(path: &Path, mesh: &Mesh) -> Result<(), IoError> {
    write(path, &format_off(mesh))
}

/// Field sidecar values, one per line; `#` starts a comment line.
pub fn parse_field_values(text: &str) -> Result<Vec<f64>, IoError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        })
        .map(|(i, l)| number(Some(l.trim()), i + 1, "value"))
        .collect()
}

/// Shortest round-trip decimal per value.
pub fn format_field_values(values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 20);
    for x in values {
        writeln!(out, "{x}").unwrap();
    }
    out
}

pub fn read_field_values(path: &Path) -> Result<Vec<f64>, IoError> {
    parse_field_values(&read(path)?)
}

pub fn write_field(path: &Path, field: &ScalarField) -> Result<(), IoError> {
    write(path, &format_field_values(field.values()))
}

/// Reads a mesh and its sidecar. Tries the strict mode first and falls back
/// to the relaxed mode when only boundary edges tie.
pub fn read_field(mesh_path: &Path, field_path: &Path) -> Result<ScalarField, IoError> {
    let mesh = std::sync::Arc::new(read_mesh(mesh_path)?);
    let values = read_field_values(field_path)?;
    attach_either(mesh, values)
}

pub fn attach_either(mesh: std::sync::Arc<Mesh>, values: Vec<f64>) -> Result<ScalarField, IoError> {
    match ScalarField::new(mesh.clone(), values.clone(), GenericityMode::StrictInterior) {
        Ok(f) => Ok(f),
        Err(FieldError::NonGenericInteriorEdge(strict_edges)) => {
            match ScalarField::new(mesh, values, GenericityMode::RelaxedBoundary) {
                Ok(f) => Ok(f),
                Err(FieldError::NonGenericInteriorEdge(edges)) => {
                    Err(FieldError::NonGenericInteriorEdge(edges).into())
                }
                Err(_) => Err(FieldError::NonGenericInteriorEdge(strict_edges).into()),
            }
        }
        Err(e) => Err(e.into()),
    }
}

fn point_label(p: &LevelPoint) -> String {
    match p {
        LevelPoint::Vertex(v) => format!("v{v}"),
        LevelPoint::Crossing(e) => format!("e{e}"),
    }
}

/// DOT graph of a level network: nodes labelled with their valence, one
/// edge per arc, and each loop as a dashed self-loop on a point node.
pub fn network_dot(x: &LevelNetwork) -> String {
    let mut out = String::new();
    writeln!(out, "graph level {{").unwrap();
    writeln!(out, "  label=\"t = {}\";", x.level).unwrap();
    for (i, n) in x.nodes.iter().enumerate() {
        let shape = if n.synthetic { "box" } else { "ellipse" };
        writeln!(
            out,
            "  n{i} [label=\"{} ({})\", shape={shape}];",
            point_label(&n.point),
            n.valence
        )
        .unwrap();
    }
    for a in &x.arcs {
        writeln!(out, "  n{} -- n{} [label=\"{}\"];", a.from, a.to, a.crossings.len()).unwrap();
    }
    for (i, l) in x.loops.iter().enumerate() {
        writeln!(out, "  loop{i} [shape=point];").unwrap();
        writeln!(
            out,
            "  loop{i} -- loop{i} [style=dashed, label=\"{}\"];",
            l.crossings.len()
        )
        .unwrap();
    }
    writeln!(out, "}}").unwrap();
    out
}

/// Polyline OBJ of a level network (`v` and `l` records). Needs positions.
pub fn network_obj(x: &LevelNetwork) -> Option<String> {
    let mut out = String::new();
    let mut count = 0usize;
    let mut emit = |out: &mut String, p: [f64; 3]| {
        writeln!(out, "v {} {} {}", p[0], p[1], p[2]).unwrap();
        count += 1;
        count
    };
    let mut lines: Vec<Vec<usize>> = Vec::new();
    for a in &x.arcs {
        let mut idx = vec![emit(&mut out, x.nodes[a.from].position?)];
        for &e in &a.crossings {
            idx.push(emit(&mut out, x.crossing_position(e)?));
        }
        idx.push(emit(&mut out, x.nodes[a.to].position?));
        lines.push(idx);
    }
    for l in &x.loops {
        let mut idx = Vec::new();
        for &e in &l.crossings {
            idx.push(emit(&mut out, x.crossing_position(e)?));
        }
        if let Some(&first) = idx.first() {
            idx.push(first);
        }
        lines.push(idx);
    }
    for l in lines {
        let joined: Vec<String> = l.iter().map(|i| i.to_string()).collect();
        writeln!(out, "l {}", joined.join(" ")).unwrap();
    }
    Some(out)
}

/// OFF of a band with polygonal faces; each face line ends with its
/// component id. Needs positions.
pub fn clip_off(c: &ClippedComplex) -> Option<String> {
    let mut out = String::new();
    writeln!(out, "OFF").unwrap();
    writeln!(out, "{} {} {}", c.vertices.len(), c.cells.len(), c.edges.len()).unwrap();
    for v in &c.vertices {
        let [x, y, z] = v.position?;
        writeln!(out, "{x} {y} {z}").unwrap();
    }
    for cell in &c.cells {
        let ids: Vec<String> = cell.vertices.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{} {} {}", ids.len(), ids.join(" "), cell.component).unwrap();
    }
    Some(out)
}
