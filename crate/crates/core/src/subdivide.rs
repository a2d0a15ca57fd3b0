//! Doo-Sabin subdivision: one new vertex per (face, corner) pair, one new
//! face per old face, vertex, and edge.
//!
//! Two weight variants are provided. `Classical` uses the textbook masks
//! α₀ = (n+5)/(4n), αⱼ = (3 + 2cos(2πj/n))/(4n), which are rational exactly
//! for n ∈ {3, 4, 6}; other degrees are rejected to keep the kernel exact.
//! `MidpointAverage` averages the corner, its two adjacent edge midpoints,
//! and the face centroid, which is rational for every degree.
//!
//! New-vertex and new-face ordering is deterministic: vertex ids are face
//! offsets plus corner position; faces are emitted as [per-face block,
//! per-vertex block, per-edge block]. A face therefore keeps its index
//! across refinement levels, which is what makes limit-point lineage
//! trivial to track.

use crate::exact::{Rational, Vec3r};
use crate::mesh::{Mesh, MeshError};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightVariant {
    Classical,
    MidpointAverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitMethod {
    /// centroid of the tracked face at the deepest refined level
    Centroid,
    /// exact dominant-left-eigenvector limit of the per-face refinement map
    EigenExtrapolate,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubdivideError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("face degree {degree} is not supported (need at least 3)")]
    InvalidDegree { degree: usize },
    #[error("classical Doo-Sabin weights for degree {degree} are irrational; use the midpoint-average variant")]
    IrrationalWeights { degree: usize },
    #[error("limit-point eigenproblem for degree {degree} is singular")]
    LimitSolveFailed { degree: usize },
    #[error("level {level} not present in trace of depth {depth}")]
    LevelOutOfRange { level: usize, depth: usize },
}

/// Weight vector for one face degree: entry j is the weight of the vertex j
/// steps (counter-clockwise) from the corner being refined. Sums to 1.
pub fn ds_weights(n: usize, variant: WeightVariant) -> Result<Vec<Rational>, SubdivideError> {
    if n < 3 {
        return Err(SubdivideError::InvalidDegree { degree: n });
    }
    let d = 4 * n as i64;
    match variant {
        WeightVariant::Classical => {
            // 2cos(2πj/n) is rational only for cos ∈ {0, ±1/2, ±1}
            let two_cos = |j: usize| -> Option<i64> {
                // period n; exact doubled cosines for n = 3, 4, 6
                match (n, j) {
                    (3, 1) | (3, 2) => Some(-1),
                    (4, 1) | (4, 3) => Some(0),
                    (4, 2) => Some(-2),
                    (6, 1) | (6, 5) => Some(1),
                    (6, 2) | (6, 4) => Some(-1),
                    (6, 3) => Some(-2),
                    _ => None,
                }
            };
            let mut w = vec![Rational::from_ints(n as i64 + 5, d)];
            for j in 1..n {
                let c = two_cos(j).ok_or(SubdivideError::IrrationalWeights { degree: n })?;
                w.push(Rational::from_ints(3 + c, d));
            }
            Ok(w)
        }
        WeightVariant::MidpointAverage => {
            // (corner + prev edge midpoint + next edge midpoint + centroid)/4
            let mut w = vec![Rational::from_ints(1, 4 * n as i64); n];
            w[0] = &w[0] + &Rational::from_ints(1, 2);
            w[1] = &w[1] + &Rational::from_ints(1, 8);
            w[n - 1] = &w[n - 1] + &Rational::from_ints(1, 8);
            Ok(w)
        }
    }
}

/// Prefix offsets of per-face corner blocks: the subdivision vertex created
/// for (face f, corner k) has index `face_offsets(m)[f] + k`.
pub fn face_offsets(m: &Mesh) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(m.face_count());
    let mut acc = 0;
    for f in m.faces() {
        offsets.push(acc);
        acc += f.len();
    }
    offsets
}

/// One Doo-Sabin step. Requires a closed mesh.
pub fn ds_step(m: &Mesh, variant: WeightVariant) -> Result<Mesh, SubdivideError> {
    if let Some(he) = m.half_edges().iter().find(|he| he.twin.is_none()) {
        return Err(MeshError::BoundaryEdge {
            a: he.origin,
            b: he.dest,
        }
        .into());
    }

    let offsets = face_offsets(m);
    let mut weights_by_degree: std::collections::HashMap<usize, Vec<Rational>> =
        std::collections::HashMap::new();

    // one new vertex per (face, corner)
    let mut vertices = Vec::with_capacity(2 * m.edge_count());
    for (fi, cycle) in m.faces().iter().enumerate() {
        let n = cycle.len();
        let w = match weights_by_degree.get(&n) {
            Some(w) => w,
            None => {
                let w = ds_weights(n, variant)?;
                weights_by_degree.entry(n).or_insert(w)
            }
        };
        for k in 0..n {
            let mut p = Vec3r::zero();
            for (j, wj) in w.iter().enumerate() {
                p = &p + &m.vertices()[cycle[(k + j) % n]].scale(wj);
            }
            debug_assert_eq!(vertices.len(), offsets[fi] + k);
            vertices.push(p);
        }
    }

    let new_id = |face: usize, pos: usize| offsets[face] + pos;
    let corner_of = |face: usize, vertex: usize| -> usize {
        m.faces()[face]
            .iter()
            .position(|&v| v == vertex)
            .expect("vertex is a corner of its incident face")
    };

    let mut faces: Vec<Vec<usize>> =
        Vec::with_capacity(m.face_count() + m.vertex_count() + m.edge_count());
    // per-face block: shrunken copy of each face, same orientation
    for (fi, cycle) in m.faces().iter().enumerate() {
        faces.push((0..cycle.len()).map(|k| new_id(fi, k)).collect());
    }
    // per-vertex block: the counter-clockwise ring of new corners around v
    for v in 0..m.vertex_count() {
        let ring = m.faces_around_vertex(v)?;
        faces.push(ring.iter().map(|&(f, pos)| new_id(f, pos)).collect());
    }
    // per-edge block: one quad per undirected edge, lexicographic order
    for &(u, v) in m.edges() {
        let h = m
            .directed_half_edge(u, v)
            .expect("closed mesh has both directions");
        let he = &m.half_edges()[h];
        let f1 = he.face;
        let f2 = m.half_edges()[he.twin.expect("closed")].face;
        faces.push(vec![
            new_id(f1, corner_of(f1, u)),
            new_id(f2, corner_of(f2, u)),
            new_id(f2, corner_of(f2, v)),
            new_id(f1, corner_of(f1, v)),
        ]);
    }

    Ok(Mesh::new(vertices, faces)?)
}

/// A mesh together with its successive refinements. Because refinement
/// preserves face indices (per-face block first), face `f` of `meshes[l]`
/// is tracked as face `f` of every deeper mesh.
#[derive(Debug, Clone)]
pub struct RefinementTrace {
    pub meshes: Vec<Mesh>,
    pub variant: WeightVariant,
}

impl RefinementTrace {
    pub fn levels(&self) -> usize {
        self.meshes.len()
    }

    pub fn mesh(&self, level: usize) -> Result<&Mesh, SubdivideError> {
        self.meshes.get(level).ok_or(SubdivideError::LevelOutOfRange {
            level,
            depth: self.meshes.len(),
        })
    }

    pub fn deepest(&self) -> &Mesh {
        self.meshes.last().expect("trace holds at least the input")
    }

    /// Exact limit point of face `face` of `meshes[level]` under continued
    /// refinement.
    pub fn face_limit_point(
        &self,
        level: usize,
        face: usize,
        method: LimitMethod,
    ) -> Result<Vec3r, SubdivideError> {
        let mesh = self.mesh(level)?;
        if face >= mesh.face_count() {
            return Err(MeshError::FaceIndexOutOfRange { face }.into());
        }
        match method {
            LimitMethod::Centroid => Ok(self.deepest().face_centroid(face)?),
            LimitMethod::EigenExtrapolate => {
                let cycle = &mesh.faces()[face];
                let n = cycle.len();
                let w = ds_weights(n, self.variant)?;
                let stat = stationary_weights(&w)
                    .ok_or(SubdivideError::LimitSolveFailed { degree: n })?;
                let mut p = Vec3r::zero();
                for (j, &v) in cycle.iter().enumerate() {
                    p = &p + &mesh.vertices()[v].scale(&stat[j]);
                }
                Ok(p)
            }
        }
    }
}

/// `k`-fold refinement, keeping every intermediate mesh.
pub fn ds_refine(
    m: &Mesh,
    k: usize,
    variant: WeightVariant,
) -> Result<RefinementTrace, SubdivideError> {
    let mut meshes = vec![m.clone()];
    for _ in 0..k {
        let next = ds_step(meshes.last().unwrap(), variant)?;
        meshes.push(next);
    }
    Ok(RefinementTrace { meshes, variant })
}

/// Left stationary vector of the circulant refinement matrix built from one
/// weight mask: solves xᵀA = xᵀ, Σx = 1 exactly. The limit point of a face
/// is the stationary-weighted combination of its vertices.
fn stationary_weights(w: &[Rational]) -> Option<Vec<Rational>> {
    let n = w.len();
    // rows of (Aᵀ − I), where A[i][j] = w[(j − i) mod n]
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    // (Aᵀ)[r][c] = A[c][r] = w[(r − c) mod n]
                    let mut v = w[(r + n - c) % n].clone();
                    if r == c {
                        v = &v - &Rational::one();
                    }
                    v
                })
                .collect()
        })
        .collect();
    let mut b = vec![Rational::zero(); n];
    // replace the last (dependent) row by the normalization Σx = 1
    a[n - 1] = vec![Rational::one(); n];
    b[n - 1] = Rational::one();
    solve_linear(a, b)
}

/// Exact Gaussian elimination with row pivoting; None if singular.
fn solve_linear(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for c in col..n {
            a[col][c] = &a[col][c] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in col..n {
                    a[r][c] = &a[r][c] - &(&factor * &a[col][c]);
                }
                b[r] = &b[r] - &(&factor * &b[col]);
            }
        }
    }
    Some(b)
}
