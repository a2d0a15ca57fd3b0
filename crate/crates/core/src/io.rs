//! OBJ and OFF import/export.
//!
//! Coordinates are parsed exactly: decimal literals go through exact
//! base-ten conversion (never binary floating point) and fraction strings
//! like `1/3` are accepted in both formats. On export the standard fields
//! carry shortest-round-trip decimals for external viewers, and each vertex
//! additionally gets a `# exact <index>: x y z` comment carrying the exact
//! rationals; the loader prefers those comments when present, which makes
//! save→load bit-exact.

use std::path::Path;

use crate::exact::{Rational, Vec3r};
use crate::mesh::{Mesh, MeshError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Off,
}

impl MeshFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<MeshFormat> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "obj" => Some(MeshFormat::Obj),
            "off" => Some(MeshFormat::Off),
            _ => None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("cannot infer mesh format from path `{0}` (expected .obj or .off)")]
    UnknownFormat(String),
}

fn parse_err(line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_coord(tok: &str, line: usize) -> Result<Rational, IoError> {
    tok.parse()
        .map_err(|e| parse_err(line, format!("bad coordinate `{tok}`: {e}")))
}

/// `# exact <index>: x y z` → (index, point). Returns None for ordinary
/// comments.
fn parse_exact_comment(rest: &str, line: usize) -> Result<Option<(usize, Vec3r)>, IoError> {
    let rest = rest.trim_start();
    let Some(rest) = rest.strip_prefix("exact") else {
        return Ok(None);
    };
    let Some((idx_part, coords)) = rest.split_once(':') else {
        return Err(parse_err(line, "exact comment missing `:`"));
    };
    let index: usize = idx_part
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("bad exact-comment index `{}`", idx_part.trim())))?;
    let toks: Vec<&str> = coords.split_whitespace().collect();
    if toks.len() != 3 {
        return Err(parse_err(line, "exact comment needs 3 coordinates"));
    }
    let p = Vec3r::new(
        parse_coord(toks[0], line)?,
        parse_coord(toks[1], line)?,
        parse_coord(toks[2], line)?,
    );
    Ok(Some((index, p)))
}

fn load_obj(text: &str) -> Result<Mesh, IoError> {
    let mut vertices: Vec<Vec3r> = Vec::new();
    let mut faces: Vec<(usize, Vec<usize>)> = Vec::new(); // (line, cycle)
    let mut exact: Vec<(usize, usize, Vec3r)> = Vec::new(); // (line, 1-based index, point)

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some((idx, p)) = parse_exact_comment(rest, line)? {
                exact.push((line, idx, p));
            }
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        match toks.next() {
            Some("v") => {
                let coords: Vec<&str> = toks.collect();
                if coords.len() < 3 {
                    return Err(parse_err(line, "vertex record needs 3 coordinates"));
                }
                vertices.push(Vec3r::new(
                    parse_coord(coords[0], line)?,
                    parse_coord(coords[1], line)?,
                    parse_coord(coords[2], line)?,
                ));
            }
            Some("f") => {
                let mut cycle = Vec::new();
                for tok in toks {
                    // accept i, i/t, i/t/n, i//n forms
                    let head = tok.split('/').next().unwrap_or(tok);
                    let idx: i64 = head
                        .parse()
                        .map_err(|_| parse_err(line, format!("bad face index `{tok}`")))?;
                    if idx < 1 {
                        return Err(parse_err(
                            line,
                            format!("face index {idx} out of range (OBJ indices are 1-based)"),
                        ));
                    }
                    cycle.push((idx - 1) as usize);
                }
                faces.push((line, cycle));
            }
            // ignore normals, texcoords, groups, materials, empty lines
            _ => {}
        }
    }

    for (line, idx, p) in exact {
        if idx == 0 || idx > vertices.len() {
            return Err(parse_err(
                line,
                format!("exact comment index {idx} out of range (OBJ indices are 1-based)"),
            ));
        }
        vertices[idx - 1] = p;
    }
    let mut cycles = Vec::with_capacity(faces.len());
    for (line, cycle) in faces {
        for &v in &cycle {
            if v >= vertices.len() {
                return Err(parse_err(
                    line,
                    format!(
                        "face index {} out of range (mesh has {} vertices)",
                        v + 1,
                        vertices.len()
                    ),
                ));
            }
        }
        cycles.push(cycle);
    }
    Ok(Mesh::new(vertices, cycles)?)
}

fn load_off(text: &str) -> Result<Mesh, IoError> {
    // numbered, non-empty, non-comment lines — but harvest exact comments
    let mut exact: Vec<(usize, usize, Vec3r)> = Vec::new();
    let mut content: Vec<(usize, &str)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some((idx, p)) = parse_exact_comment(rest, line)? {
                exact.push((line, idx, p));
            }
            continue;
        }
        content.push((line, trimmed));
    }
    let mut it = content.into_iter();
    let (line, header) = it.next().ok_or_else(|| parse_err(1, "empty OFF file"))?;
    let mut counts_toks: Vec<&str>;
    if let Some(rest) = header.strip_prefix("OFF") {
        counts_toks = rest.split_whitespace().collect();
        if counts_toks.is_empty() {
            let (cline, counts) = it
                .next()
                .ok_or_else(|| parse_err(line, "missing OFF counts line"))?;
            counts_toks = counts.split_whitespace().collect();
            if counts_toks.len() < 3 {
                return Err(parse_err(cline, "OFF counts line needs V F E"));
            }
        }
    } else {
        return Err(parse_err(line, "missing OFF header"));
    }
    if counts_toks.len() < 3 {
        return Err(parse_err(line, "OFF counts line needs V F E"));
    }
    let nv: usize = counts_toks[0]
        .parse()
        .map_err(|_| parse_err(line, "bad vertex count"))?;
    let nf: usize = counts_toks[1]
        .parse()
        .map_err(|_| parse_err(line, "bad face count"))?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (vline, text) = it
            .next()
            .ok_or_else(|| parse_err(line, format!("expected {nv} vertex lines")))?;
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() < 3 {
            return Err(parse_err(vline, "vertex line needs 3 coordinates"));
        }
        vertices.push(Vec3r::new(
            parse_coord(toks[0], vline)?,
            parse_coord(toks[1], vline)?,
            parse_coord(toks[2], vline)?,
        ));
    }
    for (cline, idx, p) in exact {
        if idx >= vertices.len() {
            return Err(parse_err(
                cline,
                format!("exact comment index {idx} out of range"),
            ));
        }
        vertices[idx] = p;
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (fline, text) = it
            .next()
            .ok_or_else(|| parse_err(line, format!("expected {nf} face lines")))?;
        let toks: Vec<&str> = text.split_whitespace().collect();
        let k: usize = toks[0]
            .parse()
            .map_err(|_| parse_err(fline, "bad face vertex count"))?;
        if toks.len() < k + 1 {
            return Err(parse_err(fline, format!("face line promises {k} indices")));
        }
        let mut cycle = Vec::with_capacity(k);
        for tok in &toks[1..=k] {
            let v: usize = tok
                .parse()
                .map_err(|_| parse_err(fline, format!("bad face index `{tok}`")))?;
            if v >= vertices.len() {
                return Err(parse_err(
                    fline,
                    format!("face index {v} out of range (mesh has {} vertices)", vertices.len()),
                ));
            }
            cycle.push(v);
        }
        faces.push(cycle);
    }
    Ok(Mesh::new(vertices, faces)?)
}

pub fn load_mesh_str(text: &str, format: MeshFormat) -> Result<Mesh, IoError> {
    match format {
        MeshFormat::Obj => load_obj(text),
        MeshFormat::Off => load_off(text),
    }
}

fn fmt_approx(v: &Vec3r) -> String {
    let [x, y, z] = v.to_f64();
    format!("{x} {y} {z}")
}

fn fmt_exact(v: &Vec3r) -> String {
    format!("{} {} {}", v.x(), v.y(), v.z())
}

/// True when every coordinate prints as a plain integer (exact comments are
/// then redundant and omitted).
fn all_integer(m: &Mesh) -> bool {
    m.vertices()
        .iter()
        .all(|v| v.0.iter().all(Rational::is_integer))
}

pub fn save_mesh_string(m: &Mesh, format: MeshFormat) -> String {
    let exact_needed = !all_integer(m);
    let mut out = String::new();
    match format {
        MeshFormat::Obj => {
            for (i, v) in m.vertices().iter().enumerate() {
                out.push_str(&format!("v {}\n", fmt_approx(v)));
                if exact_needed {
                    out.push_str(&format!("# exact {}: {}\n", i + 1, fmt_exact(v)));
                }
            }
            for f in m.faces() {
                out.push('f');
                for &v in f {
                    out.push_str(&format!(" {}", v + 1));
                }
                out.push('\n');
            }
        }
        MeshFormat::Off => {
            out.push_str("OFF\n");
            out.push_str(&format!(
                "{} {} {}\n",
                m.vertex_count(),
                m.face_count(),
                m.edge_count()
            ));
            for (i, v) in m.vertices().iter().enumerate() {
                out.push_str(&format!("{}\n", fmt_approx(v)));
                if exact_needed {
                    out.push_str(&format!("# exact {}: {}\n", i, fmt_exact(v)));
                }
            }
            for f in m.faces() {
                out.push_str(&format!("{}", f.len()));
                for &v in f {
                    out.push_str(&format!(" {v}"));
                }
                out.push('\n');
            }
        }
    }
    out
}

/// Loads a mesh, inferring the format from the file extension.
pub fn load_mesh_path(path: &Path) -> Result<Mesh, IoError> {
    let format = MeshFormat::from_path(path)
        .ok_or_else(|| IoError::UnknownFormat(path.display().to_string()))?;
    let text = std::fs::read_to_string(path)?;
    load_mesh_str(&text, format)
}

/// Saves a mesh, inferring the format from the file extension.
pub fn save_mesh_path(m: &Mesh, path: &Path) -> Result<(), IoError> {
    let format = MeshFormat::from_path(path)
        .ok_or_else(|| IoError::UnknownFormat(path.display().to_string()))?;
    std::fs::write(path, save_mesh_string(m, format))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{make_cube, make_tetrahedron};

    #[test]
    fn obj_cube_round_trip() {
        let cube = make_cube(&Rational::one()).unwrap();
        let text = save_mesh_string(&cube, MeshFormat::Obj);
        let back = load_mesh_str(&text, MeshFormat::Obj).unwrap();
        assert_eq!(back.stats(), cube.stats());
        assert_eq!(back.vertices(), cube.vertices());
        assert_eq!(back.faces(), cube.faces());
    }

    #[test]
    fn off_round_trip_with_fractional_coordinates() {
        let m = Mesh::new(
            vec![
                Vec3r::new(
                    Rational::from_ints(1, 3),
                    Rational::from_ints(-2, 7),
                    Rational::zero(),
                ),
                Vec3r::from_ints(1, 0, 0),
                Vec3r::from_ints(0, 1, 0),
            ],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        let text = save_mesh_string(&m, MeshFormat::Off);
        assert!(text.contains("# exact 0: 1/3 -2/7 0"));
        let back = load_mesh_str(&text, MeshFormat::Off).unwrap();
        assert_eq!(back.vertices(), m.vertices());
    }

    #[test]
    fn obj_exact_comments_override_decimals() {
        let text = "v 0.333333 0 0\n# exact 1: 1/3 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";
        let m = load_mesh_str(text, MeshFormat::Obj).unwrap();
        assert_eq!(m.vertices()[0].x(), &Rational::from_ints(1, 3));
    }

    #[test]
    fn obj_decimals_parse_exactly() {
        let text = "v 0.25 -0.5 1e2\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";
        let m = load_mesh_str(text, MeshFormat::Obj).unwrap();
        assert_eq!(m.vertices()[0].x(), &Rational::from_ints(1, 4));
        assert_eq!(m.vertices()[0].y(), &Rational::from_ints(-1, 2));
        assert_eq!(m.vertices()[0].z(), &Rational::from_int(100));
    }

    #[test]
    fn obj_zero_index_is_an_error_with_line_number() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n";
        let err = load_mesh_str(text, MeshFormat::Obj).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 4"), "{msg}");
        assert!(msg.contains("out of range"), "{msg}");
        assert!(msg.contains("1-based"), "{msg}");
    }

    #[test]
    fn obj_overlarge_index_is_an_error() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n";
        let err = load_mesh_str(text, MeshFormat::Obj).unwrap_err();
        assert!(err.to_string().contains("out of range"), "{err}");
    }

    #[test]
    fn off_tetrahedron_parses() {
        let text = "OFF\n4 4 6\n-1 -1 -1\n-1 1 1\n1 -1 1\n1 1 -1\n3 1 2 3\n3 0 3 2\n3 0 1 3\n3 0 2 1\n";
        let m = load_mesh_str(text, MeshFormat::Off).unwrap();
        let reference = make_tetrahedron(&Rational::one()).unwrap();
        assert_eq!(m.vertices(), reference.vertices());
        assert_eq!(m.faces(), reference.faces());
    }

    #[test]
    fn off_header_merged_with_counts() {
        let text = "OFF 3 1 3\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
        let m = load_mesh_str(text, MeshFormat::Off).unwrap();
        assert_eq!(m.vertex_count(), 3);
    }

    #[test]
    fn off_bad_header_reports_line() {
        let err = load_mesh_str("PTS\n1 2 3\n", MeshFormat::Off).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn empty_mesh_saves_and_loads() {
        let m = Mesh::new(vec![], vec![]).unwrap();
        let obj = save_mesh_string(&m, MeshFormat::Obj);
        assert!(obj.is_empty());
        let off = save_mesh_string(&m, MeshFormat::Off);
        let back = load_mesh_str(&off, MeshFormat::Off).unwrap();
        assert_eq!(back.vertex_count(), 0);
    }

    #[test]
    fn obj_face_only_forms_are_accepted() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1 2/2/2 3//3\n";
        let m = load_mesh_str(text, MeshFormat::Obj).unwrap();
        assert_eq!(m.faces()[0], vec![0, 1, 2]);
    }
}
