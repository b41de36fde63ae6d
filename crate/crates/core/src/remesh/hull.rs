//! Convex hull of points on the unit sphere, which is their spherical
//! Delaunay triangulation.
//!
//! Quickhull with exact orientation predicates. Points that end up on or
//! just inside the hull because of rounding (cospherical ties, points a
//! hair below unit norm) are inserted afterwards by splitting the face
//! they project onto and restoring local convexity with edge flips.

use std::collections::HashMap;

use nalgebra::{Point3, Vector3};
use robust::{orient3d, Coord3D};

use crate::error::{FsqcError, Result};
use crate::qc::SphericalEmbedding;

fn c3(p: &Point3<f64>) -> Coord3D<f64> {
    Coord3D {
        x: p.x,
        y: p.y,
        z: p.z,
    }
}

/// Negative when `d` is on the outer side of the counter-clockwise face
/// `(a, b, c)`.
fn orient(pts: &[Point3<f64>], a: usize, b: usize, c: usize, d: usize) -> f64 {
    orient3d(c3(&pts[a]), c3(&pts[b]), c3(&pts[c]), c3(&pts[d]))
}

#[derive(Debug, Clone)]
struct Face {
    v: [usize; 3],
    /// Neighbour across edge `v[i] -> v[i + 1]`.
    adj: [usize; 3],
    alive: bool,
    outside: Vec<usize>,
}

/// Outward-oriented faces of the convex hull of `points` on the sphere.
pub fn spherical_delaunay(points: &SphericalEmbedding) -> Result<Vec<[usize; 3]>> {
    convex_hull(points.points())
}

/// Outward-oriented convex hull faces of points in general position around
/// the origin. Every input point must be a hull vertex (true for distinct
/// points on a sphere).
pub fn convex_hull(pts: &[Point3<f64>]) -> Result<Vec<[usize; 3]>> {
    let n = pts.len();
    if n < 4 {
        return Err(FsqcError::DegenerateHull(format!("need at least 4 points, got {n}")));
    }
    let [i0, i1, i2, i3] = initial_simplex(pts)?;
    let mut faces: Vec<Face> = Vec::new();
    // (a, b, c) outward with apex d behind it.
    let (a, b, c) = if orient(pts, i0, i1, i2, i3) > 0.0 { (i0, i1, i2) } else { (i0, i2, i1) };
    let d = i3;
    for v in [[a, b, c], [a, d, b], [b, d, c], [c, d, a]] {
        faces.push(Face {
            v,
            adj: [usize::MAX; 3],
            alive: true,
            outside: Vec::new(),
        });
    }
    link_all(&mut faces);

    let mut leftovers = Vec::new();
    for p in 0..n {
        if [a, b, c, d].contains(&p) {
            continue;
        }
        match (0..4).find(|&f| visible(pts, &faces[f], p)) {
            Some(f) => faces[f].outside.push(p),
            None => leftovers.push(p),
        }
    }

    let mut f = 0;
    while f < faces.len() {
        if faces[f].alive && !faces[f].outside.is_empty() {
            add_point(pts, &mut faces, f, &mut leftovers);
        } else {
            f += 1;
        }
    }

    let mut out: Vec<[usize; 3]> = faces.iter().filter(|f| f.alive).map(|f| f.v).collect();
    if !leftovers.is_empty() {
        leftovers.sort_unstable();
        insert_leftovers(pts, &mut out, &leftovers)?;
    }
    Ok(out)
}

fn visible(pts: &[Point3<f64>], face: &Face, p: usize) -> bool {
    orient(pts, face.v[0], face.v[1], face.v[2], p) < 0.0
}

fn initial_simplex(pts: &[Point3<f64>]) -> Result<[usize; 4]> {
    let n = pts.len();
    let by = |key: &dyn Fn(usize) -> f64| -> usize {
        (0..n).fold(0, |best, i| if key(i) > key(best) { i } else { best })
    };
    let i0 = by(&|i| -pts[i].x);
    let i1 = by(&|i| (pts[i] - pts[i0]).norm_squared());
    if (pts[i1] - pts[i0]).norm_squared() == 0.0 {
        return Err(FsqcError::DegenerateHull("all points coincide".into()));
    }
    let axis = pts[i1] - pts[i0];
    let i2 = by(&|i| axis.cross(&(pts[i] - pts[i0])).norm_squared());
    if axis.cross(&(pts[i2] - pts[i0])).norm_squared() == 0.0 {
        return Err(FsqcError::DegenerateHull("degenerate (collinear) input".into()));
    }
    let i3 = by(&|i| orient3d(c3(&pts[i0]), c3(&pts[i1]), c3(&pts[i2]), c3(&pts[i])).abs());
    if orient3d(c3(&pts[i0]), c3(&pts[i1]), c3(&pts[i2]), c3(&pts[i3])) == 0.0 {
        return Err(FsqcError::DegenerateHull("degenerate (coplanar) input".into()));
    }
    Ok([i0, i1, i2, i3])
}

/// Sets every face's neighbour links from scratch.
fn link_all(faces: &mut [Face]) {
    let mut edge: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, f) in faces.iter().enumerate() {
        if f.alive {
            for k in 0..3 {
                edge.insert((f.v[k], f.v[(k + 1) % 3]), i);
            }
        }
    }
    for f in faces.iter_mut().filter(|f| f.alive) {
        for k in 0..3 {
            f.adj[k] = edge[&(f.v[(k + 1) % 3], f.v[k])];
        }
    }
}

fn plane_distance(pts: &[Point3<f64>], v: [usize; 3], p: usize) -> f64 {
    let (a, b, c) = (pts[v[0]], pts[v[1]], pts[v[2]]);
    let normal: Vector3<f64> = (b - a).cross(&(c - a));
    normal.dot(&(pts[p] - a))
}

fn add_point(pts: &[Point3<f64>], faces: &mut Vec<Face>, start: usize, leftovers: &mut Vec<usize>) {
    let eye = {
        let face = &faces[start];
        let mut best = face.outside[0];
        let mut best_d = plane_distance(pts, face.v, best);
        for &p in &face.outside[1..] {
            let d = plane_distance(pts, face.v, p);
            if d > best_d {
                best = p;
                best_d = d;
            }
        }
        best
    };

    // Faces that see the eye form a connected cap around `start`.
    let mut is_visible: HashMap<usize, bool> = HashMap::new();
    is_visible.insert(start, true);
    let mut stack = vec![start];
    let mut visible_faces = vec![start];
    while let Some(f) = stack.pop() {
        for k in 0..3 {
            let g = faces[f].adj[k];
            if is_visible.contains_key(&g) {
                continue;
            }
            let vis = visible(pts, &faces[g], eye);
            is_visible.insert(g, vis);
            if vis {
                stack.push(g);
                visible_faces.push(g);
            }
        }
    }

    // Horizon edges (u -> v) of visible faces bordering invisible ones,
    // keyed by their start vertex.
    let mut horizon: Vec<(usize, usize, usize)> = Vec::new();
    for &f in &visible_faces {
        for k in 0..3 {
            let g = faces[f].adj[k];
            if !is_visible[&g] {
                horizon.push((faces[f].v[k], faces[f].v[(k + 1) % 3], g));
            }
        }
    }

    let mut orphans: Vec<usize> = Vec::new();
    for &f in &visible_faces {
        faces[f].alive = false;
        orphans.append(&mut faces[f].outside);
    }
    orphans.retain(|&p| p != eye);
    orphans.sort_unstable();

    let first = faces.len();
    let mut by_start: HashMap<usize, usize> = HashMap::with_capacity(horizon.len());
    for (i, &(u, _, _)) in horizon.iter().enumerate() {
        by_start.insert(u, first + i);
    }
    for &(u, v, g) in &horizon {
        let id = faces.len();
        // Across u -> v lies the old invisible face; across v -> eye the new
        // face starting at v; across eye -> u the new face ending at u.
        faces.push(Face {
            v: [u, v, eye],
            adj: [g, by_start[&v], usize::MAX],
            alive: true,
            outside: Vec::new(),
        });
        let slot = (0..3)
            .find(|&k| faces[g].v[k] == v && faces[g].v[(k + 1) % 3] == u)
            .expect("horizon edge missing from neighbour");
        faces[g].adj[slot] = id;
    }
    for i in first..faces.len() {
        let next = faces[i].adj[1];
        faces[next].adj[2] = i;
    }

    for p in orphans {
        match (first..faces.len()).find(|&f| visible(pts, &faces[f], p)) {
            Some(f) => faces[f].outside.push(p),
            None => leftovers.push(p),
        }
    }
}

/// Inserts points not on the hull by splitting the face whose cone from
/// the origin contains them, then flipping until every edge is locally
/// convex.
fn insert_leftovers(pts: &[Point3<f64>], faces: &mut Vec<[usize; 3]>, leftovers: &[usize]) -> Result<()> {
    let origin = Coord3D { x: 0.0, y: 0.0, z: 0.0 };
    let mut edge: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, f) in faces.iter().enumerate() {
        for k in 0..3 {
            edge.insert((f[k], f[(k + 1) % 3]), i);
        }
    }
    for &q in leftovers {
        let in_cone = |f: &[usize; 3]| {
            (0..3).all(|k| orient3d(origin, c3(&pts[f[k]]), c3(&pts[f[(k + 1) % 3]]), c3(&pts[q])) <= 0.0)
        };
        let host = (0..faces.len())
            .find(|&i| in_cone(&faces[i]))
            .ok_or_else(|| FsqcError::DegenerateHull(format!("point {q} could not be located")))?;
        let [a, b, c] = faces[host];
        if [a, b, c].iter().any(|&v| pts[v] == pts[q]) {
            return Err(FsqcError::DegenerateHull(format!("point {q} coincides with a hull vertex")));
        }
        let new = [[a, b, q], [b, c, q], [c, a, q]];
        let ids = [host, faces.len(), faces.len() + 1];
        faces[host] = new[0];
        faces.push(new[1]);
        faces.push(new[2]);
        let mut stack = Vec::new();
        for (f, id) in new.iter().zip(ids) {
            for k in 0..3 {
                edge.insert((f[k], f[(k + 1) % 3]), id);
            }
            stack.push((f[0], f[1]));
        }
        let mut budget = 16 * faces.len();
        while let Some((u, v)) = stack.pop() {
            budget -= 1;
            if budget == 0 {
                return Err(FsqcError::DegenerateHull("edge flipping did not terminate".into()));
            }
            let (Some(&f), Some(&g)) = (edge.get(&(u, v)), edge.get(&(v, u))) else {
                continue;
            };
            let apex = |face: &[usize; 3], x: usize, y: usize| {
                *face.iter().find(|&&w| w != x && w != y).unwrap()
            };
            let p = apex(&faces[f], u, v);
            let o = apex(&faces[g], u, v);
            if p == o || orient(pts, u, v, p, o) >= 0.0 {
                continue;
            }
            if edge.contains_key(&(p, o)) || edge.contains_key(&(o, p)) {
                continue;
            }
            // Faces (u, v, p) and (v, u, o) become (u, o, p) and (o, v, p).
            for face in [faces[f], faces[g]] {
                for k in 0..3 {
                    edge.remove(&(face[k], face[(k + 1) % 3]));
                }
            }
            faces[f] = [u, o, p];
            faces[g] = [o, v, p];
            for (face, id) in [(faces[f], f), (faces[g], g)] {
                for k in 0..3 {
                    edge.insert((face[k], face[(k + 1) % 3]), id);
                }
            }
            stack.push((u, o));
            stack.push((o, v));
        }
    }
    Ok(())
}
