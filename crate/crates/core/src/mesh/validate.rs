use std::collections::HashMap;
use std::fmt;

use super::{triangle_area, TriangleMesh};

/// One violated genus-0 condition.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Edges used by a single face.
    OpenBoundary { edges: usize },
    /// Edges used by more than two faces.
    NonManifoldEdge { edges: usize },
    /// Undirected edges whose two uses run in the same direction.
    InconsistentOrientation { edges: usize },
    /// Vertices not referenced by any face.
    IsolatedVertex { vertices: usize },
    /// Vertices whose incident faces do not form a single fan.
    NonManifoldVertex { vertices: usize },
    /// Faces whose area is below the degeneracy tolerance.
    DegenerateFace { faces: usize, first: usize },
    EulerCharacteristic { value: i64 },
    Empty,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OpenBoundary { edges } => write!(f, "open boundary ({edges} boundary edges)"),
            Violation::NonManifoldEdge { edges } => {
                write!(f, "non-manifold edges ({edges} edges shared by more than two faces)")
            }
            Violation::InconsistentOrientation { edges } => {
                write!(f, "inconsistent orientation ({edges} edges)")
            }
            Violation::IsolatedVertex { vertices } => write!(f, "{vertices} isolated vertices"),
            Violation::NonManifoldVertex { vertices } => {
                write!(f, "{vertices} non-manifold vertices")
            }
            Violation::DegenerateFace { faces, first } => {
                write!(f, "{faces} degenerate faces (first: {first})")
            }
            Violation::EulerCharacteristic { value } => write!(f, "Euler characteristic {value}"),
            Violation::Empty => write!(f, "empty mesh"),
        }
    }
}

/// Outcome of [`validate_genus0`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(
                f,
                "genus-0 closed surface (V={}, E={}, F={})",
                self.vertices, self.edges, self.faces
            );
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks that `mesh` is a closed, manifold, consistently oriented surface
/// with Euler characteristic 2 and no degenerate faces.
pub fn validate_genus0(mesh: &TriangleMesh) -> ValidationReport {
    let faces = mesh.faces();
    let n = mesh.vertex_count();
    let mut violations = Vec::new();
    if faces.is_empty() || n == 0 {
        violations.push(Violation::Empty);
    }

    // Count each directed edge.
    let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(faces.len() * 3);
    for &[a, b, c] in faces {
        for (u, v) in [(a, b), (b, c), (c, a)] {
            *directed.entry((u, v)).or_insert(0) += 1;
        }
    }
    let mut undirected: HashMap<(usize, usize), (usize, usize)> = HashMap::with_capacity(directed.len());
    for (&(u, v), &count) in &directed {
        let entry = undirected.entry((u.min(v), u.max(v))).or_insert((0, 0));
        if u < v {
            entry.0 += count;
        } else {
            entry.1 += count;
        }
    }
    let (mut open, mut nonmanifold, mut misoriented) = (0, 0, 0);
    for &(forward, backward) in undirected.values() {
        match forward + backward {
            1 => open += 1,
            2 => {
                if forward != 1 {
                    misoriented += 1;
                }
            }
            _ => nonmanifold += 1,
        }
    }
    if open > 0 {
        violations.push(Violation::OpenBoundary { edges: open });
    }
    if nonmanifold > 0 {
        violations.push(Violation::NonManifoldEdge { edges: nonmanifold });
    }
    if misoriented > 0 {
        violations.push(Violation::InconsistentOrientation { edges: misoriented });
    }

    let mut used = vec![false; n];
    for face in faces {
        for &v in face {
            used[v] = true;
        }
    }
    let isolated = used.iter().filter(|&&u| !u).count();
    if isolated > 0 {
        violations.push(Violation::IsolatedVertex { vertices: isolated });
    }

    if open == 0 && nonmanifold == 0 && misoriented == 0 {
        let pinched = count_pinched_vertices(faces, n);
        if pinched > 0 {
            violations.push(Violation::NonManifoldVertex { vertices: pinched });
        }
    }

    let tol = mesh.degenerate_area_tolerance();
    let degenerate: Vec<usize> = (0..faces.len())
        .filter(|&f| triangle_area(&mesh.face_points(f)) <= tol)
        .collect();
    if let Some(&first) = degenerate.first() {
        violations.push(Violation::DegenerateFace {
            faces: degenerate.len(),
            first,
        });
    }

    let edges = undirected.len();
    let euler = n as i64 - edges as i64 + faces.len() as i64;
    if euler != 2 && !faces.is_empty() {
        violations.push(Violation::EulerCharacteristic { value: euler });
    }

    ValidationReport {
        vertices: n,
        edges,
        faces: faces.len(),
        euler_characteristic: euler,
        violations,
    }
}

/// On an oriented closed edge-manifold, each vertex's incident faces must
/// form one cycle; returns how many vertices have more than one.
fn count_pinched_vertices(faces: &[[usize; 3]], n: usize) -> usize {
    // For vertex v, the face (v, a, b) contributes the link edge a -> b.
    let mut next: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for &[a, b, c] in faces {
        next[a].push((b, c));
        next[b].push((c, a));
        next[c].push((a, b));
    }
    let mut pinched = 0;
    for link in &next {
        if link.is_empty() {
            continue;
        }
        let map: HashMap<usize, usize> = link.iter().copied().collect();
        let start = link[0].0;
        let mut cur = start;
        let mut steps = 0;
        while let Some(&nxt) = map.get(&cur) {
            cur = nxt;
            steps += 1;
            if cur == start || steps > link.len() {
                break;
            }
        }
        if steps != link.len() {
            pinched += 1;
        }
    }
    pinched
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate;

    #[test]
    fn tetrahedron_passes() {
        let report = validate_genus0(&generate::tetrahedron());
        assert!(report.passed(), "{report}");
        assert_eq!(report.euler_characteristic, 2);
        assert_eq!((report.vertices, report.edges, report.faces), (4, 6, 4));
    }

    #[test]
    fn torus_fails_on_euler_characteristic() {
        let report = validate_genus0(&generate::torus(12, 8, 1.0, 0.3));
        assert!(!report.passed());
        assert!(report
            .violations
            .contains(&Violation::EulerCharacteristic { value: 0 }));
        assert!(report.to_string().contains("Euler characteristic 0"));
    }

    #[test]
    fn single_triangle_has_open_boundary() {
        let mesh = TriangleMesh::new(
            vec![
                [0.0, 0.0, 0.0].into(),
                [1.0, 0.0, 0.0].into(),
                [0.0, 1.0, 0.0].into(),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let report = validate_genus0(&mesh);
        assert!(report.to_string().contains("open boundary"));
    }

    #[test]
    fn flipped_face_is_reported() {
        let tet = generate::tetrahedron();
        let mut faces = tet.faces().to_vec();
        faces[0].swap(1, 2);
        let report = validate_genus0(&tet.with_faces(faces).unwrap());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::InconsistentOrientation { .. })));
    }

    #[test]
    fn two_tetrahedra_sharing_a_vertex_are_pinched() {
        let tet = generate::tetrahedron();
        let mut vertices = tet.vertices().to_vec();
        let mut faces = tet.faces().to_vec();
        // Second copy shifted, sharing vertex 0.
        let offset = vertices.len() - 1;
        for p in &tet.vertices()[1..] {
            vertices.push(p + nalgebra::Vector3::new(0.0, 0.0, 5.0));
        }
        for &f in tet.faces() {
            faces.push(f.map(|v| if v == 0 { 0 } else { v + offset }));
        }
        let report = validate_genus0(&TriangleMesh::new(vertices, faces).unwrap());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NonManifoldVertex { vertices: 1 })));
    }

    #[test]
    fn each_undirected_edge_is_used_twice() {
        let mesh = generate::icosphere(3);
        let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
        for &[a, b, c] in mesh.faces() {
            for (u, v) in [(a, b), (b, c), (c, a)] {
                *counts.entry((u.min(v), u.max(v))).or_default() += 1;
            }
        }
        assert!(counts.values().all(|&c| c == 2));
    }
}
