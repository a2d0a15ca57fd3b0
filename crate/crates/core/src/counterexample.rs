//! Frozen reference tables for the regular-tetrahedron counterexample and
//! helpers to reproduce them from the construction pipeline.
//!
//! The tables list the three control-point rows of one shared boundary of
//! the tetrahedron complex — the curve running from a face limit point to
//! the split point of an edge — as small integers, together with the
//! derivative rows and the primitive determinant coefficients they imply.
//! All comparisons are up to a single positive rational scale, which is the
//! strongest statement that survives the free choice of global scaling.

use crate::bernstein::VecPoly3;
use crate::exact::{Rational, Vec3r};
use crate::mesh::make_tetrahedron;
use crate::patch::{
    build_from_mesh, edge_corners, ConstructionConfig, EdgeData, PatchComplex, PatchError,
};

/// Interior row of the patch left of the boundary.
pub const ROW_P1: [[i64; 3]; 4] = [[7, 10, 7], [10, 10, 4], [16, 4, -2], [16, 3, -3]];
/// The shared boundary row.
pub const ROW_B: [[i64; 3]; 4] = [[8, 8, 8], [10, 7, 7], [16, 1, 1], [16, 0, 0]];
/// Interior row of the patch right of the boundary.
pub const ROW_Q2: [[i64; 3]; 4] = [[7, 7, 10], [10, 4, 10], [16, -2, 4], [16, -3, 3]];

/// Cross-boundary derivative into the left patch, up to one positive scale.
pub const DP2_REF: [[i64; 3]; 4] = [[-1, 2, -1], [0, 3, -3], [0, 3, -3], [0, 3, -3]];
/// Boundary tangent, up to the same scale.
pub const DP1_REF: [[i64; 3]; 3] = [[2, -1, -1], [6, -6, -6], [0, -1, -1]];
/// Cross-boundary derivative out of the right patch, same scale.
pub const DQ2_REF: [[i64; 3]; 4] = [[1, 1, -2], [0, 3, -3], [0, 3, -3], [0, 3, -3]];

/// Primitive integer coefficients of the degree-8 determinant polynomial of
/// the reference rows. Nonzero, so the two patches do not meet with G¹
/// continuity.
pub const DET_PRIMITIVE_REF: [i64; 9] = [0, 105, 185, 105, 36, 5, 0, 0, 0];

/// [`DET_PRIMITIVE_REF`] widened for comparison against a computed
/// primitive vector.
pub fn det_primitive_reference() -> Vec<num::BigInt> {
    DET_PRIMITIVE_REF.iter().map(|&n| n.into()).collect()
}

fn row_points(r: &[[i64; 3]; 4]) -> [Vec3r; 4] {
    std::array::from_fn(|i| Vec3r::from_ints(r[i][0], r[i][1], r[i][2]))
}

/// The reference tables as a ready-made edge, suitable for feeding the
/// continuity tests directly (no mesh or construction involved).
pub fn fixture_edge() -> EdgeData {
    EdgeData {
        row_p1: row_points(&ROW_P1),
        row_b: row_points(&ROW_B),
        row_q2: row_points(&ROW_Q2),
    }
}

/// All 36 reference coordinates, rows concatenated p1 | b | q2.
pub fn reference_tables_vector() -> Vec<Rational> {
    let mut out = Vec::with_capacity(36);
    for rows in [&ROW_P1, &ROW_B, &ROW_Q2] {
        for p in rows.iter() {
            out.extend(p.iter().map(|&x| Rational::from_int(x)));
        }
    }
    out
}

/// All 33 reference derivative coordinates, dp2 | dp1 | dq2.
pub fn reference_derivatives_vector() -> Vec<Rational> {
    let mut out = Vec::with_capacity(33);
    for p in DP2_REF.iter() {
        out.extend(p.iter().map(|&x| Rational::from_int(x)));
    }
    for p in DP1_REF.iter() {
        out.extend(p.iter().map(|&x| Rational::from_int(x)));
    }
    for p in DQ2_REF.iter() {
        out.extend(p.iter().map(|&x| Rational::from_int(x)));
    }
    out
}

/// Concatenates an edge's three rows into the 36-vector layout of
/// [`reference_tables_vector`].
pub fn flatten_edge(e: &EdgeData) -> Vec<Rational> {
    let mut out = Vec::with_capacity(36);
    for rows in [&e.row_p1, &e.row_b, &e.row_q2] {
        for p in rows.iter() {
            out.extend_from_slice(&p.0);
        }
    }
    out
}

/// Concatenates three derivative polynomials into the 33-vector layout of
/// [`reference_derivatives_vector`].
pub fn flatten_derivatives(dp2: &VecPoly3, dp1: &VecPoly3, dq2: &VecPoly3) -> Vec<Rational> {
    let mut out = Vec::with_capacity(33);
    for poly in [dp2, dp1, dq2] {
        for p in &poly.coeffs {
            out.extend_from_slice(&p.0);
        }
    }
    out
}

/// If `candidate = λ · target` entry-wise for a single positive rational λ,
/// returns it. Zero entries must match exactly on both sides.
pub fn positive_proportional(candidate: &[Rational], target: &[Rational]) -> Option<Rational> {
    if candidate.len() != target.len() {
        return None;
    }
    let k = target.iter().position(|t| !t.is_zero())?;
    if candidate[k].is_zero() {
        return None;
    }
    let lambda = &candidate[k] / &target[k];
    if lambda.is_negative() || lambda.is_zero() {
        return None;
    }
    for (c, t) in candidate.iter().zip(target) {
        if c != &(&lambda * t) {
            return None;
        }
    }
    Some(lambda)
}

/// Corner ids of the reference boundary in complexes whose corners are the
/// input's faces, vertices, and edge split points: corner 0 is the limit of
/// input face 0 and corner 13 the split point of the input edge {2, 3}.
pub const COUNTEREXAMPLE_CORNERS: (usize, usize) = (0, 13);

/// Finds the shared edge joining two corner ids, if the complex has one.
pub fn find_edge_by_corners(c: &PatchComplex, a: usize, b: usize) -> Option<usize> {
    let want = (a.min(b), a.max(b));
    (0..c.shared_edges.len()).find(|&e| edge_corners(c, e).ok() == Some(want))
}

/// The shared edge carrying the reference boundary, when the layout joins
/// the two reference corners directly (it does for the default
/// configuration; deeper layouts subdivide that curve instead).
pub fn counterexample_edge(c: &PatchComplex) -> Option<usize> {
    find_edge_by_corners(c, COUNTEREXAMPLE_CORNERS.0, COUNTEREXAMPLE_CORNERS.1)
}

/// Regular tetrahedron at the given scale, run through the default
/// construction.
pub fn counterexample_complex(scale: &Rational) -> Result<PatchComplex, PatchError> {
    let m = make_tetrahedron(scale)?;
    build_from_mesh(&m, &ConstructionConfig::default())
}
