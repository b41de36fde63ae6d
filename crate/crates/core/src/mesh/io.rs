//! ASCII OFF, OBJ and PLY readers and writers, plus face-selection lists.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use nalgebra::Point3;

use super::{FaceSelection, TriangleMesh};
use crate::error::{FsqcError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
    Ply,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase());
        match ext.as_deref() {
            Some("off") => Ok(MeshFormat::Off),
            Some("obj") => Ok(MeshFormat::Obj),
            Some("ply") => Ok(MeshFormat::Ply),
            _ => Err(FsqcError::InvalidInput(format!(
                "cannot infer mesh format from {}",
                path.display()
            ))),
        }
    }
}

impl FromStr for MeshFormat {
    type Err = FsqcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "off" => Ok(MeshFormat::Off),
            "obj" => Ok(MeshFormat::Obj),
            "ply" => Ok(MeshFormat::Ply),
            other => Err(FsqcError::InvalidInput(format!("unknown mesh format {other}"))),
        }
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| FsqcError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_string(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| FsqcError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_mesh(path: &Path, format: MeshFormat) -> Result<TriangleMesh> {
    let text = read_to_string(path)?;
    parse_mesh(&text, format)
}

/// Loads a mesh, picking the format from the file extension.
pub fn load_mesh_auto(path: &Path) -> Result<TriangleMesh> {
    load_mesh(path, MeshFormat::from_path(path)?)
}

pub fn parse_mesh(text: &str, format: MeshFormat) -> Result<TriangleMesh> {
    match format {
        MeshFormat::Off => parse_off(text),
        MeshFormat::Obj => parse_obj(text),
        MeshFormat::Ply => parse_ply(text),
    }
}

pub fn save_mesh(mesh: &TriangleMesh, path: &Path, format: MeshFormat) -> Result<()> {
    write_string(path, &format_mesh(mesh, format))
}

pub fn save_mesh_auto(mesh: &TriangleMesh, path: &Path) -> Result<()> {
    save_mesh(mesh, path, MeshFormat::from_path(path)?)
}

pub fn format_mesh(mesh: &TriangleMesh, format: MeshFormat) -> String {
    let mut out = String::new();
    match format {
        MeshFormat::Off => {
            let _ = writeln!(out, "OFF");
            let _ = writeln!(out, "{} {} {}", mesh.vertex_count(), mesh.face_count(), mesh.edge_count());
            for p in mesh.vertices() {
                let _ = writeln!(out, "{} {} {}", p.x, p.y, p.z);
            }
            for [a, b, c] in mesh.faces() {
                let _ = writeln!(out, "3 {a} {b} {c}");
            }
        }
        MeshFormat::Obj => {
            for p in mesh.vertices() {
                let _ = writeln!(out, "v {} {} {}", p.x, p.y, p.z);
            }
            for [a, b, c] in mesh.faces() {
                let _ = writeln!(out, "f {} {} {}", a + 1, b + 1, c + 1);
            }
        }
        MeshFormat::Ply => {
            let _ = writeln!(out, "ply\nformat ascii 1.0");
            let _ = writeln!(out, "element vertex {}", mesh.vertex_count());
            let _ = writeln!(out, "property double x\nproperty double y\nproperty double z");
            let _ = writeln!(out, "element face {}", mesh.face_count());
            let _ = writeln!(out, "property list uchar int vertex_indices\nend_header");
            for p in mesh.vertices() {
                let _ = writeln!(out, "{} {} {}", p.x, p.y, p.z);
            }
            for [a, b, c] in mesh.faces() {
                let _ = writeln!(out, "3 {a} {b} {c}");
            }
        }
    }
    out
}

fn parse_num<T: FromStr>(token: Option<&str>, line: usize, what: &str) -> Result<T> {
    let token = token.ok_or_else(|| FsqcError::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    token.parse().map_err(|_| FsqcError::Parse {
        line,
        message: format!("invalid {what} `{token}`"),
    })
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse_off(text: &str) -> Result<TriangleMesh> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or(FsqcError::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let mut tokens = header.split_whitespace();
    let first = tokens.next().unwrap_or("");
    if !first.ends_with("OFF") {
        return Err(FsqcError::Parse {
            line,
            message: "missing OFF header".into(),
        });
    }
    // Counts may follow the keyword on the same line.
    let rest: Vec<&str> = tokens.collect();
    let (count_line, counts): (usize, Vec<&str>) = if rest.is_empty() {
        let (l, s) = lines.next().ok_or(FsqcError::Parse {
            line,
            message: "missing element counts".into(),
        })?;
        (l, s.split_whitespace().collect())
    } else {
        (line, rest)
    };
    let nv: usize = parse_num(counts.first().copied(), count_line, "vertex count")?;
    let nf: usize = parse_num(counts.get(1).copied(), count_line, "face count")?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (l, s) = lines.next().ok_or(FsqcError::Parse {
            line: count_line,
            message: "unexpected end of file in vertex list".into(),
        })?;
        let mut t = s.split_whitespace();
        vertices.push(Point3::new(
            parse_num(t.next(), l, "x")?,
            parse_num(t.next(), l, "y")?,
            parse_num(t.next(), l, "z")?,
        ));
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (l, s) = lines.next().ok_or(FsqcError::Parse {
            line: count_line,
            message: "unexpected end of file in face list".into(),
        })?;
        let mut t = s.split_whitespace();
        let arity: usize = parse_num(t.next(), l, "face arity")?;
        if arity != 3 {
            return Err(FsqcError::NonTriangularFace { line: l, arity });
        }
        faces.push([
            parse_num(t.next(), l, "index")?,
            parse_num(t.next(), l, "index")?,
            parse_num(t.next(), l, "index")?,
        ]);
    }
    TriangleMesh::new(vertices, faces)
}

fn parse_obj(text: &str) -> Result<TriangleMesh> {
    let mut vertices = Vec::new();
    let mut raw_faces: Vec<[i64; 3]> = Vec::new();
    for (l, s) in content_lines(text) {
        let mut t = s.split_whitespace();
        match t.next() {
            Some("v") => vertices.push(Point3::new(
                parse_num(t.next(), l, "x")?,
                parse_num(t.next(), l, "y")?,
                parse_num(t.next(), l, "z")?,
            )),
            Some("f") => {
                let refs: Vec<&str> = t.collect();
                if refs.len() != 3 {
                    return Err(FsqcError::NonTriangularFace {
                        line: l,
                        arity: refs.len(),
                    });
                }
                let mut idx = [0i64; 3];
                for (slot, r) in idx.iter_mut().zip(&refs) {
                    *slot = parse_num(r.split('/').next(), l, "vertex index")?;
                }
                raw_faces.push(idx);
            }
            _ => {}
        }
    }
    let n = vertices.len() as i64;
    let mut faces = Vec::with_capacity(raw_faces.len());
    for (f, idx) in raw_faces.into_iter().enumerate() {
        let mut face = [0usize; 3];
        for (slot, &i) in face.iter_mut().zip(&idx) {
            // 1-based, negative indices count back from the last vertex.
            let resolved = if i > 0 { i - 1 } else { n + i };
            if i == 0 || resolved < 0 || resolved >= n {
                return Err(FsqcError::IndexOutOfRange {
                    face: f,
                    index: resolved.max(0) as usize,
                    vertex_count: vertices.len(),
                });
            }
            *slot = resolved as usize;
        }
        faces.push(face);
    }
    TriangleMesh::new(vertices, faces)
}

struct PlyElement {
    name: String,
    count: usize,
    properties: Vec<String>,
}

fn parse_ply(text: &str) -> Result<TriangleMesh> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, "ply")) => {}
        _ => {
            return Err(FsqcError::Parse {
                line: 1,
                message: "missing ply magic".into(),
            })
        }
    }
    let mut elements: Vec<PlyElement> = Vec::new();
    let mut ascii = false;
    let mut header_end = None;
    for (l, s) in lines.by_ref() {
        let t: Vec<&str> = s.split_whitespace().collect();
        match t.first().copied() {
            Some("format") => ascii = t.get(1) == Some(&"ascii"),
            Some("element") => elements.push(PlyElement {
                name: t.get(1).unwrap_or(&"").to_string(),
                count: parse_num(t.get(2).copied(), l, "element count")?,
                properties: Vec::new(),
            }),
            Some("property") => {
                let el = elements.last_mut().ok_or(FsqcError::Parse {
                    line: l,
                    message: "property before element".into(),
                })?;
                el.properties.push(t.last().unwrap_or(&"").to_string());
            }
            Some("end_header") => {
                header_end = Some(l);
                break;
            }
            _ => {}
        }
    }
    let header_end = header_end.ok_or(FsqcError::Parse {
        line: 1,
        message: "missing end_header".into(),
    })?;
    if !ascii {
        return Err(FsqcError::Parse {
            line: 2,
            message: "only ASCII PLY is supported".into(),
        });
    }

    let mut body = lines.filter(|(_, s)| !s.is_empty());
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for el in &elements {
        for _ in 0..el.count {
            let (l, s) = body.next().ok_or(FsqcError::Parse {
                line: header_end,
                message: format!("unexpected end of file in element {}", el.name),
            })?;
            let t: Vec<&str> = s.split_whitespace().collect();
            match el.name.as_str() {
                "vertex" => {
                    let col = |name: &str| -> Result<f64> {
                        let i = el.properties.iter().position(|p| p == name).ok_or(
                            FsqcError::Parse {
                                line: l,
                                message: format!("vertex element lacks property {name}"),
                            },
                        )?;
                        parse_num(t.get(i).copied(), l, name)
                    };
                    vertices.push(Point3::new(col("x")?, col("y")?, col("z")?));
                }
                "face" => {
                    let arity: usize = parse_num(t.first().copied(), l, "face arity")?;
                    if arity != 3 {
                        return Err(FsqcError::NonTriangularFace { line: l, arity });
                    }
                    faces.push([
                        parse_num(t.get(1).copied(), l, "index")?,
                        parse_num(t.get(2).copied(), l, "index")?,
                        parse_num(t.get(3).copied(), l, "index")?,
                    ]);
                }
                _ => {}
            }
        }
    }
    TriangleMesh::new(vertices, faces)
}

/// Reads a newline-delimited list of face indices.
pub fn load_face_selection(path: &Path, face_count: usize) -> Result<FaceSelection> {
    let text = read_to_string(path)?;
    let mut faces = Vec::new();
    for (l, s) in content_lines(&text) {
        faces.push(parse_num(Some(s), l, "face index")?);
    }
    FaceSelection::new(faces, face_count)
}

pub fn save_face_selection(selection: &FaceSelection, path: &Path) -> Result<()> {
    let mut out = String::new();
    for f in selection.indices() {
        let _ = writeln!(out, "{f}");
    }
    write_string(path, &out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate;

    const TET_OFF: &str = "OFF\n# regular tetrahedron\n4 4 6\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n3 0 1 2\n3 0 3 1\n3 0 2 3\n3 1 3 2\n";

    #[test]
    fn tetrahedron_off() {
        let m = parse_mesh(TET_OFF, MeshFormat::Off).unwrap();
        assert_eq!((m.vertex_count(), m.face_count(), m.edge_count()), (4, 4, 6));
        assert_eq!(m.faces()[1], [0, 3, 1]);
    }

    #[test]
    fn icosahedron_obj_counts() {
        let text = format_mesh(&generate::icosahedron(), MeshFormat::Obj);
        let m = parse_mesh(&text, MeshFormat::Obj).unwrap();
        assert_eq!((m.vertex_count(), m.face_count(), m.edge_count()), (12, 20, 30));
    }

    #[test]
    fn quad_face_is_rejected() {
        let off = "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
        let err = parse_mesh(off, MeshFormat::Off).unwrap_err();
        assert!(err.to_string().contains("non-triangular face"), "{err}");
        let obj = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
        assert!(matches!(
            parse_mesh(obj, MeshFormat::Obj),
            Err(FsqcError::NonTriangularFace { arity: 4, .. })
        ));
    }

    #[test]
    fn out_of_range_index_is_rejected() {
        let off = "OFF\n3 1 0\n0 0 0\n1 0 0\n1 1 0\n3 0 1 7\n";
        assert!(matches!(
            parse_mesh(off, MeshFormat::Off),
            Err(FsqcError::IndexOutOfRange { index: 7, .. })
        ));
        let obj = "v 0 0 0\nv 1 0 0\nv 1 1 0\nf 1 2 4\n";
        assert!(matches!(
            parse_mesh(obj, MeshFormat::Obj),
            Err(FsqcError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn obj_with_texture_refs_and_negative_indices() {
        let obj = "v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nf 1/1 2/1 -1/1\n";
        let m = parse_mesh(obj, MeshFormat::Obj).unwrap();
        assert_eq!(m.faces(), &[[0, 1, 2]]);
    }

    #[test]
    fn ply_with_extra_properties() {
        let ply = "ply\nformat ascii 1.0\nelement vertex 3\nproperty float y\nproperty float x\nproperty float z\nproperty uchar red\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n0 1 2 255\n3 4 5 0\n6 7 8 9\n3 2 1 0\n";
        let m = parse_mesh(ply, MeshFormat::Ply).unwrap();
        assert_eq!(m.vertices()[0], Point3::new(1.0, 0.0, 2.0));
        assert_eq!(m.faces(), &[[2, 1, 0]]);
    }

    #[test]
    fn formats_round_trip_exactly() {
        let mesh = generate::ellipsoid(1.3, 0.9, 0.77, 3);
        for format in [MeshFormat::Off, MeshFormat::Obj, MeshFormat::Ply] {
            let back = parse_mesh(&format_mesh(&mesh, format), format).unwrap();
            assert_eq!(back, mesh, "{format:?}");
        }
    }

    #[test]
    fn face_selection_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sel.txt");
        fs::write(&path, "3\n1\n\n7\n").unwrap();
        let sel = load_face_selection(&path, 10).unwrap();
        assert_eq!(sel.indices(), &[1, 3, 7]);
        save_face_selection(&sel, &path).unwrap();
        assert_eq!(load_face_selection(&path, 10).unwrap(), sel);
        fs::write(&path, "3\n12\n").unwrap();
        assert!(load_face_selection(&path, 10).is_err());
    }
}
