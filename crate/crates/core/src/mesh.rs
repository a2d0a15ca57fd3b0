//! Half-edge polyhedral meshes with exact rational coordinates.
//!
//! Faces are stored as counter-clockwise vertex cycles (viewed from outside);
//! the half-edge connectivity (twin/next/prev/origin) is derived at
//! construction time and validated: every undirected edge may carry at most
//! two half-edges, and those two must traverse it in opposite directions.
//! Open (boundary) edges are allowed in general meshes; the subdivision and
//! patch pipeline requires closed input and says so explicitly.

use std::collections::{BTreeMap, HashMap};

use crate::exact::{Rational, Vec3r};
use serde::Serialize;

/// Errors from mesh construction and queries.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeshError {
    #[error("face {face} has fewer than 3 vertices")]
    DegenerateFace { face: usize },
    #[error("face {face} references vertex {index} but the mesh has {vertex_count} vertices")]
    VertexIndexOutOfRange {
        face: usize,
        index: usize,
        vertex_count: usize,
    },
    #[error("face {face} repeats vertex {vertex}")]
    RepeatedVertex { face: usize, vertex: usize },
    #[error("non-manifold edge ({a}, {b}): more than two incident faces or two traversals in the same direction")]
    NonManifoldEdge { a: usize, b: usize },
    #[error("non-manifold vertex {vertex}: incident faces do not form a single cycle")]
    NonManifoldVertex { vertex: usize },
    #[error("boundary edge ({a}, {b}) encountered; this operation requires a closed mesh")]
    BoundaryEdge { a: usize, b: usize },
    #[error("vertex {vertex} has no incident face")]
    IsolatedVertex { vertex: usize },
    #[error("face index {face} out of range")]
    FaceIndexOutOfRange { face: usize },
    #[error("vertex index {vertex} out of range")]
    VertexIndexInvalid { vertex: usize },
    #[error("scale must be positive")]
    NonPositiveScale,
}

/// Directed edge record. `next`/`prev` walk the face cycle; `twin` is the
/// opposite traversal in the neighbouring face, absent on boundary edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfEdge {
    pub origin: usize,
    pub dest: usize,
    pub face: usize,
    /// corner position of `origin` within the face cycle
    pub pos: usize,
    pub next: usize,
    pub prev: usize,
    pub twin: Option<usize>,
}

/// Combinatorial summary of a mesh.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeshStats {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub face_count: usize,
    pub euler: i64,
    pub face_degree_histogram: BTreeMap<usize, usize>,
    pub vertex_valence_histogram: BTreeMap<usize, usize>,
}

impl std::fmt::Display for MeshStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "V={} E={} F={} euler={}",
            self.vertex_count, self.edge_count, self.face_count, self.euler
        )
    }
}

/// Immutable polyhedral mesh. Construct with [`Mesh::new`], which validates
/// and builds the half-edge structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mesh {
    vertices: Vec<Vec3r>,
    faces: Vec<Vec<usize>>,
    half_edges: Vec<HalfEdge>,
    /// undirected edges as (min, max) pairs, sorted lexicographically
    edges: Vec<(usize, usize)>,
    /// one outgoing half-edge per vertex (lowest index), None for isolated
    outgoing: Vec<Option<usize>>,
    boundary_edge_count: usize,
}

impl Mesh {
    pub fn new(vertices: Vec<Vec3r>, faces: Vec<Vec<usize>>) -> Result<Mesh, MeshError> {
        let vertex_count = vertices.len();
        let mut half_edges: Vec<HalfEdge> = Vec::new();
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();

        for (fi, cycle) in faces.iter().enumerate() {
            if cycle.len() < 3 {
                return Err(MeshError::DegenerateFace { face: fi });
            }
            let mut seen = cycle.to_vec();
            seen.sort_unstable();
            for w in seen.windows(2) {
                if w[0] == w[1] {
                    return Err(MeshError::RepeatedVertex {
                        face: fi,
                        vertex: w[0],
                    });
                }
            }
            let n = cycle.len();
            let base = half_edges.len();
            for (k, &v) in cycle.iter().enumerate() {
                if v >= vertex_count {
                    return Err(MeshError::VertexIndexOutOfRange {
                        face: fi,
                        index: v,
                        vertex_count,
                    });
                }
                let dest = cycle[(k + 1) % n];
                let he = base + k;
                if directed.insert((v, dest), he).is_some() {
                    // same direction twice: inconsistent orientation
                    return Err(MeshError::NonManifoldEdge { a: v, b: dest });
                }
                half_edges.push(HalfEdge {
                    origin: v,
                    dest,
                    face: fi,
                    pos: k,
                    next: base + (k + 1) % n,
                    prev: base + (k + n - 1) % n,
                    twin: None,
                });
            }
        }

        let mut boundary_edge_count = 0;
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for he in 0..half_edges.len() {
            let (a, b) = (half_edges[he].origin, half_edges[he].dest);
            if a < b {
                edges.push((a, b));
            }
            match directed.get(&(b, a)) {
                Some(&tw) => half_edges[he].twin = Some(tw),
                None => {
                    if a > b {
                        edges.push((b, a)); // boundary edge seen only from this side
                    }
                    boundary_edge_count += 1;
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();

        let mut outgoing = vec![None; vertex_count];
        for (he, rec) in half_edges.iter().enumerate() {
            let slot = &mut outgoing[rec.origin];
            if slot.is_none() {
                *slot = Some(he);
            }
        }

        let mesh = Mesh {
            vertices,
            faces,
            half_edges,
            edges,
            outgoing,
            boundary_edge_count,
        };

        if mesh.is_closed() {
            // closed manifold: the faces around every vertex must form one cycle
            for v in 0..mesh.vertex_count() {
                if mesh.outgoing[v].is_none() {
                    continue;
                }
                let ring = mesh.faces_around_vertex(v)?;
                let outgoing_count = mesh
                    .half_edges
                    .iter()
                    .filter(|he| he.origin == v)
                    .count();
                if ring.len() != outgoing_count {
                    return Err(MeshError::NonManifoldVertex { vertex: v });
                }
            }
        }
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Vec3r] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn half_edges(&self) -> &[HalfEdge] {
        &self.half_edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Undirected edges as (min, max) index pairs in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_edge_count == 0
    }

    pub fn stats(&self) -> MeshStats {
        let mut face_degree_histogram = BTreeMap::new();
        for f in &self.faces {
            *face_degree_histogram.entry(f.len()).or_insert(0) += 1;
        }
        let mut valence = vec![0usize; self.vertex_count()];
        for &(a, b) in &self.edges {
            valence[a] += 1;
            valence[b] += 1;
        }
        let mut vertex_valence_histogram = BTreeMap::new();
        for v in valence {
            *vertex_valence_histogram.entry(v).or_insert(0) += 1;
        }
        MeshStats {
            vertex_count: self.vertex_count(),
            edge_count: self.edge_count(),
            face_count: self.face_count(),
            euler: self.euler_characteristic(),
            face_degree_histogram,
            vertex_valence_histogram,
        }
    }

    /// Exact arithmetic mean of the face's vertex positions.
    pub fn face_centroid(&self, face: usize) -> Result<Vec3r, MeshError> {
        let cycle = self
            .faces
            .get(face)
            .ok_or(MeshError::FaceIndexOutOfRange { face })?;
        let mut sum = Vec3r::zero();
        for &v in cycle {
            sum = &sum + &self.vertices[v];
        }
        Ok(sum.scale(&Rational::from_ints(1, cycle.len() as i64)))
    }

    /// The half-edge from `a` to `b`, if present.
    pub fn directed_half_edge(&self, a: usize, b: usize) -> Option<usize> {
        self.half_edges
            .iter()
            .position(|he| he.origin == a && he.dest == b)
    }

    /// Faces around `v` in counter-clockwise order, each as (face, corner
    /// position of `v` in that face). Starts at the lowest-index outgoing
    /// half-edge so the ordering is deterministic. Requires all edges at `v`
    /// to be interior.
    pub fn faces_around_vertex(&self, v: usize) -> Result<Vec<(usize, usize)>, MeshError> {
        if v >= self.vertex_count() {
            return Err(MeshError::VertexIndexInvalid { vertex: v });
        }
        let start = self.outgoing[v].ok_or(MeshError::IsolatedVertex { vertex: v })?;
        let mut ring = Vec::new();
        let mut h = start;
        loop {
            let rec = &self.half_edges[h];
            debug_assert_eq!(rec.origin, v);
            ring.push((rec.face, rec.pos));
            let prev = rec.prev;
            let prev_rec = &self.half_edges[prev];
            h = prev_rec.twin.ok_or(MeshError::BoundaryEdge {
                a: prev_rec.origin,
                b: prev_rec.dest,
            })?;
            if h == start {
                break;
            }
            if ring.len() > self.half_edges.len() {
                return Err(MeshError::NonManifoldVertex { vertex: v });
            }
        }
        Ok(ring)
    }

    /// Applies an exact affine map `x ↦ A·x + t` to every vertex.
    pub fn map_affine(&self, a: &[[Rational; 3]; 3], t: &Vec3r) -> Mesh {
        let vertices = self
            .vertices
            .iter()
            .map(|p| {
                let row = |r: &[Rational; 3]| {
                    &(&(&r[0] * p.x()) + &(&r[1] * p.y())) + &(&r[2] * p.z())
                };
                &Vec3r::new(row(&a[0]), row(&a[1]), row(&a[2])) + t
            })
            .collect();
        // connectivity is untouched, so revalidation cannot fail
        Mesh::new(vertices, self.faces.clone()).expect("affine map preserves validity")
    }
}

/// Regular tetrahedron inscribed in the cube of half-side `scale`, with
/// outward counter-clockwise faces.
pub fn make_tetrahedron(scale: &Rational) -> Result<Mesh, MeshError> {
    if scale.is_zero() || scale.is_negative() {
        return Err(MeshError::NonPositiveScale);
    }
    let base = [
        Vec3r::from_ints(-1, -1, -1),
        Vec3r::from_ints(-1, 1, 1),
        Vec3r::from_ints(1, -1, 1),
        Vec3r::from_ints(1, 1, -1),
    ];
    let vertices = base.iter().map(|v| v.scale(scale)).collect();
    let faces = vec![
        vec![1, 2, 3],
        vec![0, 3, 2],
        vec![0, 1, 3],
        vec![0, 2, 1],
    ];
    Mesh::new(vertices, faces)
}

/// Axis-aligned cube with half-side `scale`, outward counter-clockwise faces.
pub fn make_cube(scale: &Rational) -> Result<Mesh, MeshError> {
    if scale.is_zero() || scale.is_negative() {
        return Err(MeshError::NonPositiveScale);
    }
    let base = [
        Vec3r::from_ints(-1, -1, -1),
        Vec3r::from_ints(1, -1, -1),
        Vec3r::from_ints(1, 1, -1),
        Vec3r::from_ints(-1, 1, -1),
        Vec3r::from_ints(-1, -1, 1),
        Vec3r::from_ints(1, -1, 1),
        Vec3r::from_ints(1, 1, 1),
        Vec3r::from_ints(-1, 1, 1),
    ];
    let vertices = base.iter().map(|v| v.scale(scale)).collect();
    let faces = vec![
        vec![0, 3, 2, 1],
        vec![4, 5, 6, 7],
        vec![0, 1, 5, 4],
        vec![1, 2, 6, 5],
        vec![2, 3, 7, 6],
        vec![3, 0, 4, 7],
    ];
    Mesh::new(vertices, faces)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tetrahedron_counts_and_closure() {
        let m = make_tetrahedron(&Rational::one()).unwrap();
        let s = m.stats();
        assert_eq!((s.vertex_count, s.edge_count, s.face_count), (4, 6, 4));
        assert_eq!(s.euler, 2);
        assert!(m.is_closed());
        assert_eq!(s.vertex_valence_histogram.get(&3), Some(&4));
    }

    #[test]
    fn tetrahedron_rejects_nonpositive_scale() {
        assert_eq!(
            make_tetrahedron(&Rational::zero()),
            Err(MeshError::NonPositiveScale)
        );
        assert!(make_tetrahedron(&Rational::from_int(-2)).is_err());
    }

    #[test]
    fn cube_counts() {
        let m = make_cube(&Rational::one()).unwrap();
        let s = m.stats();
        assert_eq!((s.vertex_count, s.edge_count, s.face_count), (8, 12, 6));
        assert_eq!(s.euler, 2);
        assert!(m.is_closed());
    }

    #[test]
    fn face_centroid_of_tetra_face() {
        let m = make_tetrahedron(&Rational::one()).unwrap();
        // face 0 is {B, C, D}; its centroid is (1/3, 1/3, 1/3)
        let c = m.face_centroid(0).unwrap();
        let third = Rational::from_ints(1, 3);
        assert_eq!(c, Vec3r::new(third.clone(), third.clone(), third));
        assert!(m.face_centroid(17).is_err());
    }

    #[test]
    fn twin_involution_and_opposite_traversal() {
        let m = make_cube(&Rational::one()).unwrap();
        for (i, he) in m.half_edges().iter().enumerate() {
            let t = he.twin.expect("closed mesh");
            let tw = &m.half_edges()[t];
            assert_eq!(tw.twin, Some(i));
            assert_eq!((tw.origin, tw.dest), (he.dest, he.origin));
        }
    }

    #[test]
    fn vertex_ring_is_a_full_cycle() {
        let m = make_tetrahedron(&Rational::one()).unwrap();
        for v in 0..4 {
            let ring = m.faces_around_vertex(v).unwrap();
            assert_eq!(ring.len(), 3);
            for &(f, pos) in &ring {
                assert_eq!(m.faces()[f][pos], v);
            }
        }
    }

    #[test]
    fn ring_order_is_counter_clockwise() {
        // around vertex 0 of the cube the incident faces are 0 (z=-1),
        // 2 (y=-1), 5 (x=-1); seen from outside the corner their CCW cycle
        // is 0 → 2 → 5 (rotate -z into -y around the view axis (1,1,1))
        let m = make_cube(&Rational::one()).unwrap();
        let ring: Vec<usize> = m
            .faces_around_vertex(0)
            .unwrap()
            .iter()
            .map(|&(f, _)| f)
            .collect();
        assert_eq!(ring.len(), 3);
        let start = ring.iter().position(|&f| f == 0).unwrap();
        let rotated: Vec<usize> = (0..3).map(|i| ring[(start + i) % 3]).collect();
        assert_eq!(rotated, vec![0, 2, 5]);
    }

    #[test]
    fn rejects_inconsistent_orientation() {
        // second face traverses edge (0,1) in the same direction as the first
        let verts = vec![
            Vec3r::from_ints(0, 0, 0),
            Vec3r::from_ints(1, 0, 0),
            Vec3r::from_ints(0, 1, 0),
            Vec3r::from_ints(0, 0, 1),
        ];
        let err = Mesh::new(verts, vec![vec![0, 1, 2], vec![0, 1, 3]]).unwrap_err();
        assert_eq!(err, MeshError::NonManifoldEdge { a: 0, b: 1 });
    }

    #[test]
    fn rejects_degenerate_and_out_of_range_faces() {
        let verts = vec![
            Vec3r::from_ints(0, 0, 0),
            Vec3r::from_ints(1, 0, 0),
            Vec3r::from_ints(0, 1, 0),
        ];
        assert_eq!(
            Mesh::new(verts.clone(), vec![vec![0, 1]]).unwrap_err(),
            MeshError::DegenerateFace { face: 0 }
        );
        assert!(matches!(
            Mesh::new(verts.clone(), vec![vec![0, 1, 7]]).unwrap_err(),
            MeshError::VertexIndexOutOfRange { face: 0, index: 7, .. }
        ));
        assert_eq!(
            Mesh::new(verts, vec![vec![0, 1, 1]]).unwrap_err(),
            MeshError::RepeatedVertex { face: 0, vertex: 1 }
        );
    }

    #[test]
    fn open_mesh_is_allowed_but_flagged() {
        let verts = vec![
            Vec3r::from_ints(0, 0, 0),
            Vec3r::from_ints(1, 0, 0),
            Vec3r::from_ints(0, 1, 0),
        ];
        let m = Mesh::new(verts, vec![vec![0, 1, 2]]).unwrap();
        assert!(!m.is_closed());
        assert_eq!(m.edge_count(), 3);
        assert!(matches!(
            m.faces_around_vertex(0),
            Err(MeshError::BoundaryEdge { .. })
        ));
    }

    #[test]
    fn empty_mesh_is_valid() {
        let m = Mesh::new(vec![], vec![]).unwrap();
        assert_eq!(m.euler_characteristic(), 0);
        assert!(m.is_closed());
    }

    #[test]
    fn affine_map_moves_centroids_exactly() {
        let m = make_tetrahedron(&Rational::one()).unwrap();
        let a = [
            [
                Rational::from_ints(2, 1),
                Rational::from_ints(1, 3),
                Rational::zero(),
            ],
            [
                Rational::zero(),
                Rational::from_ints(1, 2),
                Rational::zero(),
            ],
            [
                Rational::from_ints(-1, 1),
                Rational::zero(),
                Rational::from_ints(3, 1),
            ],
        ];
        let t = Vec3r::from_ints(1, -2, 5);
        let mapped = m.map_affine(&a, &t);
        let c = m.face_centroid(2).unwrap();
        let expect = {
            let row = |r: &[Rational; 3]| {
                &(&(&r[0] * c.x()) + &(&r[1] * c.y())) + &(&r[2] * c.z())
            };
            &Vec3r::new(row(&a[0]), row(&a[1]), row(&a[2])) + &t
        };
        assert_eq!(mapped.face_centroid(2).unwrap(), expect);
    }
}
