//! Synthetic test surfaces.
//!
//! All generators are deterministic. Closed surfaces come out with outward
//! facing, counter-clockwise faces.

use std::collections::HashMap;

use nalgebra::{Point3, Vector3};

use super::{FaceSelection, TriangleMesh};

fn mesh(vertices: Vec<Point3<f64>>, faces: Vec<[usize; 3]>) -> TriangleMesh {
    TriangleMesh::new(vertices, faces).expect("generator produced out-of-range index")
}

/// Flips faces of a star-shaped closed surface so they face away from the
/// origin.
fn orient_outward(vertices: &[Point3<f64>], faces: &mut [[usize; 3]]) {
    for face in faces.iter_mut() {
        let [a, b, c] = face.map(|i| vertices[i].coords);
        if (b - a).cross(&(c - a)).dot(&(a + b + c)) < 0.0 {
            face.swap(1, 2);
        }
    }
}

/// Regular tetrahedron inscribed in the unit sphere.
pub fn tetrahedron() -> TriangleMesh {
    let s = 1.0 / 3f64.sqrt();
    let vertices = vec![
        Point3::new(s, s, s),
        Point3::new(s, -s, -s),
        Point3::new(-s, s, -s),
        Point3::new(-s, -s, s),
    ];
    let mut faces = vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    orient_outward(&vertices, &mut faces);
    mesh(vertices, faces)
}

/// Regular octahedron inscribed in the unit sphere.
pub fn octahedron() -> TriangleMesh {
    let vertices = vec![
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(-1.0, 0.0, 0.0),
        Point3::new(0.0, 1.0, 0.0),
        Point3::new(0.0, -1.0, 0.0),
        Point3::new(0.0, 0.0, 1.0),
        Point3::new(0.0, 0.0, -1.0),
    ];
    let mut faces = vec![
        [0, 2, 4],
        [2, 1, 4],
        [1, 3, 4],
        [3, 0, 4],
        [2, 0, 5],
        [1, 2, 5],
        [3, 1, 5],
        [0, 3, 5],
    ];
    orient_outward(&vertices, &mut faces);
    mesh(vertices, faces)
}

/// Regular icosahedron inscribed in the unit sphere.
pub fn icosahedron() -> TriangleMesh {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ];
    let vertices: Vec<Point3<f64>> = raw
        .iter()
        .map(|&(x, y, z)| Point3::from(Vector3::new(x, y, z).normalize()))
        .collect();
    let mut faces = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    orient_outward(&vertices, &mut faces);
    mesh(vertices, faces)
}

/// Geodesic sphere: every icosahedron face split into `frequency^2`
/// triangles, vertices pushed onto the unit sphere. Has
/// `20 * frequency^2` faces.
pub fn geodesic_sphere(frequency: usize) -> TriangleMesh {
    let n = frequency.max(1);
    let base = icosahedron();
    let corners = base.vertices();
    let mut index: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    let mut vertices: Vec<Point3<f64>> = Vec::new();
    let mut faces = Vec::with_capacity(20 * n * n);

    for &[a, b, c] in base.faces() {
        // Lattice point (i, j) has integer weights (n - i - j, i, j) on (a, b, c).
        let mut lattice = |i: usize, j: usize| -> usize {
            let mut key: Vec<(usize, usize)> = [(a, n - i - j), (b, i), (c, j)]
                .into_iter()
                .filter(|&(_, w)| w > 0)
                .collect();
            key.sort_unstable();
            *index.entry(key).or_insert_with(|| {
                let p = (corners[a].coords * (n - i - j) as f64
                    + corners[b].coords * i as f64
                    + corners[c].coords * j as f64)
                    / n as f64;
                vertices.push(Point3::from(p.normalize()));
                vertices.len() - 1
            })
        };
        for i in 0..n {
            for j in 0..n - i {
                let v00 = lattice(i, j);
                let v10 = lattice(i + 1, j);
                let v01 = lattice(i, j + 1);
                faces.push([v00, v10, v01]);
                if i + j + 1 < n {
                    let v11 = lattice(i + 1, j + 1);
                    faces.push([v10, v11, v01]);
                }
            }
        }
    }
    mesh(vertices, faces)
}

/// Icosphere at subdivision `level` (frequency `2^level`, `20 * 4^level`
/// faces).
pub fn icosphere(level: u32) -> TriangleMesh {
    geodesic_sphere(1 << level)
}

/// Axis-aligned ellipsoid with semi-axes `(a, b, c)` built on a geodesic
/// sphere of the given frequency.
pub fn ellipsoid(a: f64, b: f64, c: f64, frequency: usize) -> TriangleMesh {
    let sphere = geodesic_sphere(frequency);
    let vertices = sphere
        .vertices()
        .iter()
        .map(|p| Point3::new(a * p.x, b * p.y, c * p.z))
        .collect();
    sphere.with_vertices(vertices).unwrap()
}

/// Parameters of [`ridge_ellipsoid`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgeParams {
    pub axes: [f64; 3],
    /// Ridge height added along +z.
    pub height: f64,
    /// Gaussian half-width of the ridge across y (in unit-sphere units).
    pub width: f64,
    pub frequency: usize,
}

impl Default for RidgeParams {
    fn default() -> Self {
        Self {
            axes: [2.0, 1.0, 1.0],
            height: 0.4,
            width: 0.2,
            frequency: 40,
        }
    }
}

/// An ellipsoid with a ridge running along x on its upper side, together
/// with the ridge faces and two crest vertices at its ends.
#[derive(Debug, Clone)]
pub struct RidgeMesh {
    pub mesh: TriangleMesh,
    pub region: FaceSelection,
    pub p1: usize,
    pub p2: usize,
}

pub fn ridge_ellipsoid(params: RidgeParams) -> RidgeMesh {
    let sphere = geodesic_sphere(params.frequency);
    let [a, b, c] = params.axes;
    let ridge = |u: &Point3<f64>| {
        params.height * (-(u.y / params.width).powi(2)).exp() * u.z.max(0.0).powi(2)
    };
    let vertices = sphere
        .vertices()
        .iter()
        .map(|u| Point3::new(a * u.x, b * u.y, c * u.z + ridge(u)))
        .collect();
    let on_crest = |u: &Point3<f64>| u.y.abs() < params.width && u.z > 0.5;
    let region: Vec<usize> = sphere
        .faces()
        .iter()
        .enumerate()
        .filter(|(_, f)| f.iter().all(|&v| on_crest(&sphere.vertices()[v])))
        .map(|(i, _)| i)
        .collect();
    let crest: Vec<usize> = (0..sphere.vertex_count())
        .filter(|&v| on_crest(&sphere.vertices()[v]))
        .collect();
    let key = |v: &usize| {
        let u = sphere.vertices()[*v];
        (u.x, u.y.abs())
    };
    let p1 = *crest
        .iter()
        .min_by(|x, y| key(x).partial_cmp(&key(y)).unwrap())
        .expect("ridge has no crest vertices");
    let p2 = *crest
        .iter()
        .max_by(|x, y| {
            let (kx, ky) = (key(x), key(y));
            kx.0.partial_cmp(&ky.0)
                .unwrap()
                .then(ky.1.partial_cmp(&kx.1).unwrap())
        })
        .unwrap();
    let mesh = sphere.with_vertices(vertices).unwrap();
    let region = FaceSelection::new(region, mesh.face_count()).unwrap();
    RidgeMesh {
        mesh,
        region,
        p1,
        p2,
    }
}

/// Flat hexagonal patch of the unit triangular lattice in the z = 0 plane,
/// `rings` lattice steps from the centre vertex to the boundary. Has
/// `6 * rings^2` counter-clockwise faces; `rings = 1` is the hexagon fan.
pub fn hex_disk(rings: usize) -> TriangleMesh {
    let r = rings as i64;
    let inside = |q: i64, s: i64| q.abs() <= r && s.abs() <= r && (q + s).abs() <= r;
    let mut index = HashMap::new();
    let mut vertices = Vec::new();
    for s in -r..=r {
        for q in -r..=r {
            if inside(q, s) {
                index.insert((q, s), vertices.len());
                let (q, s) = (q as f64, s as f64);
                vertices.push(Point3::new(q + 0.5 * s, 0.5 * 3f64.sqrt() * s, 0.0));
            }
        }
    }
    let mut faces = Vec::with_capacity(6 * rings * rings);
    for s in -r..=r {
        for q in -r..=r {
            let tri = [[(q, s), (q + 1, s), (q, s + 1)], [(q, s), (q + 1, s - 1), (q + 1, s)]];
            for t in tri {
                if t.iter().all(|&(a, b)| inside(a, b)) {
                    faces.push(t.map(|k| index[&k]));
                }
            }
        }
    }
    mesh(vertices, faces)
}

/// Torus around the z-axis (genus 1), for negative tests.
pub fn torus(major_segments: usize, minor_segments: usize, major: f64, minor: f64) -> TriangleMesh {
    let (nu, nv) = (major_segments, minor_segments);
    let mut vertices = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = i as f64 / nu as f64 * std::f64::consts::TAU;
        for j in 0..nv {
            let v = j as f64 / nv as f64 * std::f64::consts::TAU;
            let r = major + minor * v.cos();
            vertices.push(Point3::new(r * u.cos(), r * u.sin(), minor * v.sin()));
        }
    }
    let id = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut faces = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    mesh(vertices, faces)
}
