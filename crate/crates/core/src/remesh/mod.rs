//! Adaptive remeshing: a dilation field raised on a region, a spherical
//! quasiconformal parameterization stretched along a chosen direction,
//! Delaunay triangulation on the sphere, and the induced connectivity on
//! the original vertices.

mod hull;
mod quality;

use std::path::Path;

use crate::error::{FsqcError, Result, StageExt};
use crate::mesh::{io::load_face_selection, validate_genus0, FaceSelection, TriangleMesh};
use crate::qc::DilationField;
use crate::elliptic::SolverOptions;
use crate::spherical::{fsqc_parameterize_with, Direction, FsqcOutput, StretchAxis};

pub use hull::{convex_hull, spherical_delaunay};
pub use quality::{aspect_ratio, mean, min_angle_degrees, principal_axis};

/// Region to be stretched, its dilation and the principal direction.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSpec {
    pub region: FaceSelection,
    pub k_region: f64,
    pub p1: usize,
    pub p2: usize,
}

impl RegionSpec {
    pub fn new(region: FaceSelection, k_region: f64, p1: usize, p2: usize) -> Result<Self> {
        if !(k_region >= 1.0 && k_region.is_finite()) {
            return Err(FsqcError::InvalidDilation {
                face: region.indices().first().copied().unwrap_or(0),
                value: k_region,
            });
        }
        if p1 == p2 {
            return Err(FsqcError::InvalidInput("p1 and p2 must differ".into()));
        }
        Ok(Self {
            region,
            k_region,
            p1,
            p2,
        })
    }

    fn check_against(&self, mesh: &TriangleMesh) -> Result<()> {
        let n = mesh.vertex_count();
        if self.p1 >= n || self.p2 >= n {
            return Err(FsqcError::InvalidInput(format!(
                "direction vertices ({}, {}) out of range for {n} vertices",
                self.p1, self.p2
            )));
        }
        if let Some(&f) = self.region.indices().last() {
            if f >= mesh.face_count() {
                return Err(FsqcError::InvalidInput(format!("region face {f} out of range")));
            }
        }
        Ok(())
    }
}

/// Reads a region spec: `key = value` lines with keys `faces` (path of a
/// face list, relative to the spec file; may be empty), `k`, `p1`, `p2`.
/// `#` starts a comment.
pub fn load_region_spec(path: &Path, mesh: &TriangleMesh) -> Result<RegionSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| FsqcError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let (mut faces, mut k, mut p1, mut p2) = (None, None, None, None);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| FsqcError::Parse {
            line: i + 1,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        let value = value.trim();
        let bad = |what: &str| FsqcError::Parse {
            line: i + 1,
            message: format!("bad {what} `{value}`"),
        };
        match key.trim().to_ascii_lowercase().as_str() {
            "faces" => faces = Some(value.to_string()),
            "k" => k = Some(value.parse::<f64>().map_err(|_| bad("k"))?),
            "p1" => p1 = Some(value.parse::<usize>().map_err(|_| bad("p1"))?),
            "p2" => p2 = Some(value.parse::<usize>().map_err(|_| bad("p2"))?),
            other => {
                return Err(FsqcError::Parse {
                    line: i + 1,
                    message: format!("unknown key `{other}`"),
                })
            }
        }
    }
    let missing = |key: &str| FsqcError::InvalidInput(format!("region spec is missing `{key}`"));
    let region = match faces.filter(|f| !f.is_empty()) {
        Some(rel) => {
            let base = path.parent().unwrap_or(Path::new("."));
            load_face_selection(&base.join(rel), mesh.face_count())?
        }
        None => FaceSelection::empty(),
    };
    let spec = RegionSpec::new(
        region,
        k.ok_or_else(|| missing("k"))?,
        p1.ok_or_else(|| missing("p1"))?,
        p2.ok_or_else(|| missing("p2"))?,
    )?;
    spec.check_against(mesh)?;
    Ok(spec)
}

/// `K_region` on the region's faces, 1 elsewhere.
pub fn build_dilation_field(mesh: &TriangleMesh, spec: &RegionSpec) -> Result<DilationField> {
    spec.check_against(mesh)?;
    if !(spec.k_region >= 1.0) {
        return Err(FsqcError::InvalidDilation {
            face: 0,
            value: spec.k_region,
        });
    }
    let mask = spec.region.mask(mesh.face_count());
    DilationField::new(mask.iter().map(|&r| if r { spec.k_region } else { 1.0 }).collect())
}

/// New connectivity on the original vertices with per-face quality.
#[derive(Debug, Clone)]
pub struct RemeshResult {
    pub mesh: TriangleMesh,
    /// Smallest interior angle per face, in degrees.
    pub min_angles: Vec<f64>,
    pub aspect_ratios: Vec<f64>,
}

impl RemeshResult {
    fn from_mesh(mesh: TriangleMesh) -> Self {
        let (min_angles, aspect_ratios) = (0..mesh.face_count())
            .map(|f| {
                let p = mesh.face_points(f);
                (min_angle_degrees(&p), aspect_ratio(&p))
            })
            .unzip();
        Self {
            mesh,
            min_angles,
            aspect_ratios,
        }
    }
}

/// Applies faces computed on the sphere to the original vertex positions.
pub fn induced_triangulation(original: &TriangleMesh, sphere_faces: &[[usize; 3]]) -> Result<RemeshResult> {
    let mut mesh = original.with_faces(sphere_faces.to_vec())?;
    if mesh.signed_volume() < 0.0 {
        let flipped = mesh.faces().iter().map(|&[a, b, c]| [a, c, b]).collect();
        mesh = mesh.with_faces(flipped)?;
    }
    let report = validate_genus0(&mesh);
    if !report.passed() {
        return Err(FsqcError::NonManifold(report.to_string()));
    }
    Ok(RemeshResult::from_mesh(mesh))
}

/// Vertices touched by the region's faces.
pub fn region_vertex_mask(mesh: &TriangleMesh, region: &FaceSelection) -> Vec<bool> {
    let mut mask = vec![false; mesh.vertex_count()];
    for &f in region.indices() {
        for &v in &mesh.faces()[f] {
            mask[v] = true;
        }
    }
    mask
}

/// Mean aspect ratio of result faces lying inside the region (all three
/// vertices are region vertices) and outside it (no region vertex).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionQuality {
    pub inside_faces: usize,
    pub inside_aspect: f64,
    pub outside_faces: usize,
    pub outside_aspect: f64,
}

pub fn region_quality(result: &RemeshResult, region_vertices: &[bool]) -> RegionQuality {
    let (mut inside, mut outside) = (Vec::new(), Vec::new());
    for (f, face) in result.mesh.faces().iter().enumerate() {
        let hits = face.iter().filter(|&&v| region_vertices[v]).count();
        if hits == 3 {
            inside.push(result.aspect_ratios[f]);
        } else if hits == 0 {
            outside.push(result.aspect_ratios[f]);
        }
    }
    RegionQuality {
        inside_faces: inside.len(),
        inside_aspect: mean(inside.iter().copied()),
        outside_faces: outside.len(),
        outside_aspect: mean(outside.iter().copied()),
    }
}

/// Output of [`remesh_pipeline`].
#[derive(Debug, Clone)]
pub struct RemeshOutput {
    pub result: RemeshResult,
    pub parameterization: FsqcOutput,
    pub target: DilationField,
}

/// How the stretch is oriented against `p1 -> p2` by the remeshing
/// pipeline. Stretching the parameterization across the direction makes
/// the remeshed triangles long along it.
pub const REMESH_STRETCH_AXIS: StretchAxis = StretchAxis::Across;

pub fn remesh_pipeline(mesh: &TriangleMesh, spec: &RegionSpec) -> Result<RemeshOutput> {
    remesh_with(mesh, spec, REMESH_STRETCH_AXIS, &SolverOptions::default())
}

pub fn remesh_with(
    mesh: &TriangleMesh,
    spec: &RegionSpec,
    axis: StretchAxis,
    options: &SolverOptions,
) -> Result<RemeshOutput> {
    let target = build_dilation_field(mesh, spec).stage("dilation field")?;
    let direction = Direction {
        p1: spec.p1,
        p2: spec.p2,
        axis,
    };
    let parameterization =
        fsqc_parameterize_with(mesh, &target, Some(direction), options).stage("parameterization")?;
    let faces = spherical_delaunay(&parameterization.sphere).stage("spherical delaunay")?;
    let result = induced_triangulation(mesh, &faces).stage("induced triangulation")?;
    Ok(RemeshOutput {
        result,
        parameterization,
        target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate;

    #[test]
    fn dilation_field_examples() {
        let mesh = generate::icosphere(1);
        let spec = RegionSpec::new(FaceSelection::empty(), 3.0, 0, 1).unwrap();
        assert!(build_dilation_field(&mesh, &spec).unwrap().values().iter().all(|&k| k == 1.0));

        let region = FaceSelection::new(vec![2, 5, 7], mesh.face_count()).unwrap();
        let spec = RegionSpec::new(region, 2.5, 0, 1).unwrap();
        let k = build_dilation_field(&mesh, &spec).unwrap();
        for (f, &v) in k.values().iter().enumerate() {
            assert_eq!(v, if [2, 5, 7].contains(&f) { 2.5 } else { 1.0 });
        }
        assert!(RegionSpec::new(FaceSelection::empty(), 0.5, 0, 1).is_err());
        assert!(RegionSpec::new(FaceSelection::empty(), 2.0, 3, 3).is_err());
    }

    #[test]
    fn identity_hull_gives_back_the_icosahedron() {
        let ico = generate::icosahedron();
        let faces = convex_hull(ico.vertices()).unwrap();
        let r = induced_triangulation(&ico, &faces).unwrap();
        let mut a: Vec<_> = r.mesh.faces().iter().map(|f| rotate_min(*f)).collect();
        let mut b: Vec<_> = ico.faces().iter().map(|f| rotate_min(*f)).collect();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
        assert!(r.aspect_ratios.iter().all(|&q| (q - 3f64.sqrt()).abs() < 1e-9));
    }

    #[test]
    fn inward_faces_are_flipped() {
        let tet = generate::tetrahedron();
        let inward: Vec<_> = tet.faces().iter().map(|&[a, b, c]| [a, c, b]).collect();
        let r = induced_triangulation(&tet, &inward).unwrap();
        assert!(r.mesh.signed_volume() > 0.0);
    }

    #[test]
    fn broken_connectivity_is_rejected() {
        let tet = generate::tetrahedron();
        let faces = &tet.faces()[..3];
        assert!(matches!(induced_triangulation(&tet, faces), Err(FsqcError::NonManifold(_))));
    }

    #[test]
    fn spec_file() {
        let mesh = generate::icosphere(1);
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("region.txt"), "3\n1\n").unwrap();
        let path = dir.path().join("spec.txt");
        std::fs::write(&path, "# ridge\nfaces = region.txt\nk = 2.5\np1 = 0\np2 = 4\n").unwrap();
        let spec = load_region_spec(&path, &mesh).unwrap();
        assert_eq!(spec.region.indices(), &[1, 3]);
        assert_eq!((spec.k_region, spec.p1, spec.p2), (2.5, 0, 4));

        std::fs::write(&path, "faces =\nk = 1\np1 = 2\np2 = 2\n").unwrap();
        assert!(load_region_spec(&path, &mesh).is_err());
        std::fs::write(&path, "faces =\nk = 1\np1 = 2\np2 = 999\n").unwrap();
        assert!(load_region_spec(&path, &mesh).is_err());
        std::fs::write(&path, "k = 1\np1 = 2\n").unwrap();
        assert!(load_region_spec(&path, &mesh).is_err());
    }

    fn rotate_min(mut f: [usize; 3]) -> [usize; 3] {
        let k = (0..3).min_by_key(|&k| f[k]).unwrap();
        f.rotate_left(k);
        f
    }
}
