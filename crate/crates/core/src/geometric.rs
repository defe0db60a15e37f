//! Pachner moves that carry an angle structure along without touching the
//! angles of uninvolved tetrahedra.
//!
//! Vertex roles follow [`crate::moves`]: the 2-3 move on face `f` of `t` names
//! `t` as `ABCD` with `A = f`, the neighbour as `BCDE`, and creates `ABCE`,
//! `ACDE`, `ADBE`. The split of angles is read off the picture seen from `D`:
//! with `D` at infinity, `B = 0` and `C = 1`, the vertices `A` and `E` sit on
//! opposite sides of the real line and the new tetrahedra are the triangles
//! `ABE`, `ACE` seen from above.

use crate::angles::AngleAssignment;
use crate::moves::{self, names_for_23, names_for_32, MoveBlocked, MoveOutcome, A, B, C, D, E};
use crate::perm::edge_pair;
use crate::skeleton::EdgeMap;
use crate::triangulation::Triangulation;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Face edges whose angle sum is within this margin of `π` block a 2-3 move.
pub const TAU_GEO: f64 = 1e-9;

/// Result of a geometric move.
#[derive(Clone, Debug)]
pub struct GeoMove {
    pub outcome: MoveOutcome,
    pub angles: AngleAssignment,
}

impl GeoMove {
    pub fn tri(&self) -> &Triangulation {
        &self.outcome.tri
    }
}

fn label(names: &[u8; 4], name: u8) -> usize {
    names.iter().position(|&x| x == name).expect("name present")
}

fn named(a: &AngleAssignment, tet: usize, names: &[u8; 4], x: u8, y: u8) -> f64 {
    a.get(tet, edge_pair(label(names, x), label(names, y)))
}

/// Writes one angle per pair of a new tetrahedron, addressed by vertex names.
fn put(out: &mut [f64], names: &[u8; 4], x: u8, y: u8, value: f64) {
    out[edge_pair(label(names, x), label(names, y))] = value;
}

/// Angles of the kept tetrahedra, in their new positions.
fn carry(outcome: &MoveOutcome, a: &AngleAssignment) -> Vec<f64> {
    let mut out = vec![0.0; 3 * outcome.tri.len()];
    for (old, new) in outcome.remap.iter().enumerate() {
        if let Some(t) = *new {
            out[3 * t..3 * t + 3].copy_from_slice(&a.angles[3 * old..3 * old + 3]);
        }
    }
    out
}

/// Checks the combinatorial and angle-sum conditions for a geometric 2-3 move.
pub fn can_2_3_geometric(tri: &Triangulation, a: &AngleAssignment, tet: usize, face: usize) -> Result<(), MoveBlocked> {
    let [(t1, n1), (t2, n2)] = names_for_23(tri, tet, face)?;
    let mut worst: Option<(f64, u8, u8)> = None;
    for (x, y) in [(B, C), (C, D), (D, B)] {
        let sum = named(a, t1, &n1, x, y) + named(a, t2, &n2, x, y);
        if sum >= PI - TAU_GEO && worst.is_none_or(|(s, _, _)| sum > s) {
            worst = Some((sum, x, y));
        }
    }
    match worst {
        None => Ok(()),
        Some((sum, x, y)) => {
            let (la, lb) = (label(&n1, x), label(&n1, y));
            let edge_class = EdgeMap::build(tri).class_of(t1, la, lb);
            Err(MoveBlocked::Geometric { tet: t1, vertices: (la, lb), edge_class, sum })
        }
    }
}

/// The angles of the three new tetrahedra `ABCE, ACDE, ADBE`.
fn split_angles(a: &AngleAssignment, t1: usize, n1: &[u8; 4], t2: usize, n2: &[u8; 4]) -> [[f64; 3]; 3] {
    let s1 = |x, y| named(a, t1, n1, x, y);
    let s2 = |x, y| named(a, t2, n2, x, y);
    let (bd, cd, ad) = (s1(B, D), s1(C, D), s1(A, D));
    let (ebd, ecd, eed) = (s2(B, D), s2(C, D), s2(E, D));

    let positive = [bd, cd, ad, ebd, ecd, eed].iter().all(|&x| x > 0.0 && x < PI);
    // angle of the triangle ABE at E
    let ang_e = if positive {
        let pa = Complex64::from_polar(cd.sin() / ad.sin(), bd);
        let pe = Complex64::from_polar(ecd.sin() / eed.sin(), -ebd);
        ((-pe) / (pa - pe)).arg().abs()
    } else {
        degenerate_split(bd, cd, ad, eed, bd + ebd)
    };
    let ang_b = bd + ebd;
    let ang_a = PI - ang_b - ang_e;

    let [n3, n4, n5] = moves::NEW_23;
    let mut t3 = [0.0; 3];
    let mut t4 = [0.0; 3];
    let mut t5 = [0.0; 3];
    put(&mut t5, &n5, D, B, ang_b);
    put(&mut t5, &n5, D, A, ang_a);
    put(&mut t5, &n5, D, E, ang_e);
    put(&mut t4, &n4, D, C, cd + ecd);
    put(&mut t4, &n4, D, E, eed - ang_e);
    put(&mut t4, &n4, D, A, ad - ang_a);
    put(&mut t3, &n3, B, C, ad + eed);
    put(&mut t3, &n3, A, B, cd - ang_e);
    put(&mut t3, &n3, A, C, bd - eed + ang_e);
    [t3, t4, t5]
}

/// Picks the middle of the admissible range for the angle at `E` when some input
/// angle is degenerate and the triangle picture is unavailable.
fn degenerate_split(bd: f64, cd: f64, ad: f64, eed: f64, ang_b: f64) -> f64 {
    let lo = 0f64.max(eed - bd).max(PI - ang_b - ad);
    let hi = cd.min(eed).min(PI - ang_b);
    0.5 * (lo + hi.max(lo))
}

pub fn apply_2_3_geometric(tri: &Triangulation, a: &AngleAssignment, tet: usize, face: usize) -> Result<GeoMove, MoveBlocked> {
    can_2_3_geometric(tri, a, tet, face)?;
    let [(t1, n1), (t2, n2)] = names_for_23(tri, tet, face)?;
    let split = split_angles(a, t1, &n1, t2, &n2);
    let outcome = moves::pachner_2_3(tri, tet, face)?;
    let mut angles = carry(&outcome, a);
    for (k, &(nt, _)) in outcome.new.iter().enumerate() {
        angles[3 * nt..3 * nt + 3].copy_from_slice(&split[k]);
    }
    Ok(GeoMove { outcome, angles: AngleAssignment::new(angles) })
}

/// Geometric 3-2 move; never blocked for geometric reasons.
pub fn apply_3_2_geometric(tri: &Triangulation, a: &AngleAssignment, edge: usize) -> Result<GeoMove, MoveBlocked> {
    let edges = EdgeMap::build(tri);
    let class = edges.classes.get(edge).ok_or(MoveBlocked::Combinatorial("no such edge"))?;
    let old = names_for_32(class)?;
    let [(t3, n3), (t4, n4), (t5, n5)] = old;
    let s3 = |x, y| named(a, t3, &n3, x, y);
    let s4 = |x, y| named(a, t4, &n4, x, y);
    let s5 = |x, y| named(a, t5, &n5, x, y);
    let [m1, m2] = moves::NEW_32;
    let mut n1 = [0.0; 3];
    let mut n2 = [0.0; 3];
    put(&mut n1, &m1, A, B, s3(A, B) + s5(A, B));
    put(&mut n1, &m1, A, C, s3(A, C) + s4(A, C));
    put(&mut n1, &m1, A, D, s4(A, D) + s5(A, D));
    put(&mut n2, &m2, E, B, s3(E, B) + s5(E, B));
    put(&mut n2, &m2, E, C, s3(E, C) + s4(E, C));
    put(&mut n2, &m2, E, D, s4(E, D) + s5(E, D));
    let outcome = moves::pachner_3_2(tri, edge)?;
    let mut angles = carry(&outcome, a);
    for (k, &(nt, _)) in outcome.new.iter().enumerate() {
        angles[3 * nt..3 * nt + 3].copy_from_slice(if k == 0 { &n1 } else { &n2 });
    }
    Ok(GeoMove { outcome, angles: AngleAssignment::new(angles) })
}
