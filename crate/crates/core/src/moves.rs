//! Combinatorial Pachner moves (2-3, 3-2) and the 2-0 edge collapse.
//!
//! Moves are expressed as a replacement of a small region of tetrahedra by
//! another one spanning the same named vertices. Local vertex names are
//! `A=0, B=1, C=2, D=3, E=4`: a 2-3 move takes `ABCD + BCDE` to
//! `ABCE + ACDE + ADBE`, and a 3-2 move does the reverse around the edge `AE`.

use crate::perm::Perm4;
use crate::skeleton::{EdgeClass, EdgeMap};
use crate::triangulation::{FaceGluing, Tetrahedron, Triangulation};
use std::collections::HashMap;
use thiserror::Error;

pub const A: u8 = 0;
pub const B: u8 = 1;
pub const C: u8 = 2;
pub const D: u8 = 3;
pub const E: u8 = 4;

/// Vertex names of the tetrahedra created by a 2-3 move (label `i` carries name `names[i]`).
pub const NEW_23: [[u8; 4]; 3] = [[A, B, C, E], [A, C, D, E], [A, D, B, E]];
/// Vertex names of the tetrahedra created by a 3-2 move.
pub const NEW_32: [[u8; 4]; 2] = [[A, B, C, D], [E, B, C, D]];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MoveBlocked {
    #[error("move blocked (combinatorial): {0}")]
    Combinatorial(&'static str),
    /// A face edge whose two dihedral angles sum to at least π (minus tolerance).
    #[error("move blocked (geometric): edge {vertices:?} of tetrahedron {tet} has angle sum {sum}")]
    Geometric { tet: usize, vertices: (usize, usize), edge_class: usize, sum: f64 },
}

/// Result of a move, with enough bookkeeping to transport data across it.
#[derive(Clone, Debug)]
pub struct MoveOutcome {
    pub tri: Triangulation,
    /// Old index to new index for tetrahedra untouched by the move.
    pub remap: Vec<Option<usize>>,
    /// Removed tetrahedra (old indices) with their local vertex names.
    pub old: Vec<(usize, [u8; 4])>,
    /// Created tetrahedra (new indices) with their local vertex names.
    pub new: Vec<(usize, [u8; 4])>,
}

impl MoveOutcome {
    /// Position of the tetrahedron-edge `{a, b}` of old tetrahedron `tet` after the move.
    pub fn track_edge(&self, tet: usize, a: usize, b: usize) -> Option<(usize, usize, usize)> {
        if let Some(t) = self.remap[tet] {
            return Some((t, a, b));
        }
        let names = self.old.iter().find(|(t, _)| *t == tet)?.1;
        let (na, nb) = (names[a], names[b]);
        self.new.iter().find_map(|(t, nn)| {
            let la = nn.iter().position(|&x| x == na)?;
            let lb = nn.iter().position(|&x| x == nb)?;
            Some((*t, la, lb))
        })
    }

    /// Current index of an old tetrahedron if it survived the move.
    pub fn track_tet(&self, tet: usize) -> Option<usize> {
        self.remap[tet]
    }
}

fn face_key(names: &[u8; 4], opposite: usize) -> [u8; 3] {
    let mut k = [0u8; 3];
    let mut i = 0;
    for (l, &n) in names.iter().enumerate() {
        if l != opposite {
            k[i] = n;
            i += 1;
        }
    }
    k.sort_unstable();
    k
}

/// Label map from `from` names to `to` names; `from_opp` is sent to `to_opp`.
fn name_map(from: &[u8; 4], to: &[u8; 4], from_opp: usize, to_opp: usize) -> Perm4 {
    let mut images = [0u8; 4];
    for l in 0..4 {
        images[l] = if l == from_opp {
            to_opp as u8
        } else {
            to.iter().position(|&x| x == from[l]).expect("shared face name") as u8
        };
    }
    Perm4::new(images).expect("name map is a bijection")
}

/// Replaces the `old` tetrahedra (distinct indices, named vertices) by tetrahedra with
/// the given names. Faces are matched through their name triples.
pub(crate) fn replace_region(
    tri: &Triangulation,
    old: &[(usize, [u8; 4])],
    new_names: &[[u8; 4]],
) -> MoveOutcome {
    let n = tri.len();
    let mut in_region = vec![false; n];
    for &(t, _) in old {
        in_region[t] = true;
    }
    let mut remap = vec![None; n];
    let mut kept = 0;
    for t in 0..n {
        if !in_region[t] {
            remap[t] = Some(kept);
            kept += 1;
        }
    }
    let new_index = |i: usize| kept + i;

    // Face triples shared by two old tetrahedra are interior to the region.
    let mut old_faces: HashMap<[u8; 3], Vec<(usize, usize)>> = HashMap::new();
    for (oi, (_, names)) in old.iter().enumerate() {
        for h in 0..4 {
            old_faces.entry(face_key(names, h)).or_default().push((oi, h));
        }
    }
    let mut new_faces: HashMap<[u8; 3], Vec<(usize, usize)>> = HashMap::new();
    for (ni, names) in new_names.iter().enumerate() {
        for g in 0..4 {
            new_faces.entry(face_key(names, g)).or_default().push((ni, g));
        }
    }

    // Outer old face (old position, face) -> (new position, face, labels new->old).
    let mut outer: HashMap<(usize, usize), (usize, usize, Perm4)> = HashMap::new();
    for (key, news) in &new_faces {
        if news.len() != 1 {
            continue;
        }
        let (ni, g) = news[0];
        let olds = old_faces.get(key).expect("outer face exists before and after the move");
        debug_assert_eq!(olds.len(), 1);
        let (oi, h) = olds[0];
        let mu = name_map(&new_names[ni], &old[oi].1, g, h);
        outer.insert((oi, h), (ni, g, mu));
    }
    let old_pos: HashMap<usize, usize> = old.iter().enumerate().map(|(i, &(t, _))| (t, i)).collect();

    let mut tets: Vec<Tetrahedron> = Vec::with_capacity(kept + new_names.len());
    for t in 0..n {
        if in_region[t] {
            continue;
        }
        let mut tet = tri.tets()[t].clone();
        for g in tet.gluings.iter_mut().flatten() {
            if let Some(nt) = remap[g.tet] {
                g.tet = nt;
            }
            // gluings into the region are rewritten below
        }
        tets.push(tet);
    }
    tets.extend(std::iter::repeat_with(Tetrahedron::default).take(new_names.len()));

    for (ni, names) in new_names.iter().enumerate() {
        for g in 0..4 {
            let key = face_key(names, g);
            let news = &new_faces[&key];
            if news.len() == 2 {
                let (mi, mg) = if news[0] == (ni, g) { news[1] } else { news[0] };
                let perm = name_map(names, &new_names[mi], g, mg);
                tets[new_index(ni)].gluings[g] = Some(FaceGluing { tet: new_index(mi), perm });
                continue;
            }
            let (oi, h) = old_faces[&key][0];
            let mu = outer[&(oi, h)].2;
            let old_tet = old[oi].0;
            let Some(og) = tri.gluing(old_tet, h) else { continue };
            let q = og.perm;
            let glued = if let Some(&oj) = old_pos.get(&og.tet) {
                let (nj, _, mu2) = outer[&(oj, q.apply(h))];
                FaceGluing { tet: new_index(nj), perm: mu2.inverse().compose(q).compose(mu) }
            } else {
                let target = remap[og.tet].unwrap();
                let perm = q.compose(mu);
                tets[target].gluings[q.apply(h)] = Some(FaceGluing { tet: new_index(ni), perm: perm.inverse() });
                FaceGluing { tet: target, perm }
            };
            tets[new_index(ni)].gluings[g] = Some(glued);
        }
    }

    let tri_new = Triangulation::from_parts_unchecked(tri.name.clone(), tets);
    debug_assert!(Triangulation::new(tri_new.name.clone(), tri_new.tets().to_vec()).is_ok());
    MoveOutcome {
        tri: tri_new,
        remap,
        old: old.to_vec(),
        new: new_names.iter().enumerate().map(|(i, &nn)| (new_index(i), nn)).collect(),
    }
}

/// Names for the two tetrahedra of a 2-3 move across face `face` of `tet`:
/// `tet` is `ABCD` with `A` opposite the face.
pub fn names_for_23(tri: &Triangulation, tet: usize, face: usize) -> Result<[(usize, [u8; 4]); 2], MoveBlocked> {
    if tet >= tri.len() || face >= 4 {
        return Err(MoveBlocked::Combinatorial("no such face"));
    }
    let g = tri.gluing(tet, face).ok_or(MoveBlocked::Combinatorial("boundary face"))?;
    if g.tet == tet {
        return Err(MoveBlocked::Combinatorial("face is glued to its own tetrahedron"));
    }
    let mut n1 = [0u8; 4];
    let mut n2 = [0u8; 4];
    n1[face] = A;
    n2[g.perm.apply(face)] = E;
    for (name, v) in [B, C, D].into_iter().zip((0..4).filter(|&v| v != face)) {
        n1[v] = name;
        n2[g.perm.apply(v)] = name;
    }
    Ok([(tet, n1), (g.tet, n2)])
}

/// 2-3 move on the face opposite vertex `face` of `tet`.
pub fn pachner_2_3(tri: &Triangulation, tet: usize, face: usize) -> Result<MoveOutcome, MoveBlocked> {
    let old = names_for_23(tri, tet, face)?;
    Ok(replace_region(tri, &old, &NEW_23))
}

/// Names for the three tetrahedra around a degree-3 edge: `ABCE, ACDE, ADBE`
/// around `AE`.
pub fn names_for_32(class: &EdgeClass) -> Result<[(usize, [u8; 4]); 3], MoveBlocked> {
    if class.boundary {
        return Err(MoveBlocked::Combinatorial("boundary edge"));
    }
    if class.degree() != 3 {
        return Err(MoveBlocked::Combinatorial("edge degree is not 3"));
    }
    if class.reversed {
        return Err(MoveBlocked::Combinatorial("edge is identified with itself"));
    }
    let inc = &class.incidences;
    if inc[0].tet == inc[1].tet || inc[1].tet == inc[2].tet || inc[0].tet == inc[2].tet {
        return Err(MoveBlocked::Combinatorial("repeated tetrahedron around edge"));
    }
    let ring = [B, C, D];
    let mut out = [(0usize, [0u8; 4]); 3];
    for (i, x) in inc.iter().enumerate() {
        let s = x.embedding;
        let mut names = [0u8; 4];
        names[s.apply(0)] = A;
        names[s.apply(1)] = E;
        names[s.apply(2)] = ring[i];
        names[s.apply(3)] = ring[(i + 1) % 3];
        out[i] = (x.tet, names);
    }
    Ok(out)
}

/// 3-2 move on edge class `edge`.
pub fn pachner_3_2(tri: &Triangulation, edge: usize) -> Result<MoveOutcome, MoveBlocked> {
    let edges = EdgeMap::build(tri);
    let class = edges.classes.get(edge).ok_or(MoveBlocked::Combinatorial("no such edge"))?;
    let old = names_for_32(class)?;
    Ok(replace_region(tri, &old, &NEW_32))
}

/// Collapses the two tetrahedra around a degree-2 edge, gluing their outer
/// faces to each other (inverse of a 0-2 move).
pub fn two_zero_edge(tri: &Triangulation, edge: usize) -> Result<MoveOutcome, MoveBlocked> {
    let edges = EdgeMap::build(tri);
    let class = edges.classes.get(edge).ok_or(MoveBlocked::Combinatorial("no such edge"))?;
    if class.boundary || class.reversed || class.degree() != 2 {
        return Err(MoveBlocked::Combinatorial("edge is not an interior degree-2 edge"));
    }
    let first = class.incidences[0];
    let (t, sigma) = (first.tet, first.embedding);
    let (a, b, c, d) = (sigma.apply(0), sigma.apply(1), sigma.apply(2), sigma.apply(3));
    let g = tri.gluing(t, c).unwrap();
    let u = g.tet;
    if u == t {
        return Err(MoveBlocked::Combinatorial("repeated tetrahedron around edge"));
    }
    let phi = g.perm;
    if tri.gluing(t, d) != Some(FaceGluing { tet: u, perm: phi }) {
        return Err(MoveBlocked::Combinatorial("twisted degree-2 edge"));
    }
    if edges.class_of(t, c, d) == edges.class_of(u, phi.apply(c), phi.apply(d)) {
        return Err(MoveBlocked::Combinatorial("opposite edges coincide"));
    }
    let mut pairs = Vec::with_capacity(2);
    for v in [a, b] {
        let (Some(x), Some(y)) = (tri.gluing(t, v), tri.gluing(u, phi.apply(v))) else {
            return Err(MoveBlocked::Combinatorial("boundary face"));
        };
        if [t, u].contains(&x.tet) || [t, u].contains(&y.tet) {
            return Err(MoveBlocked::Combinatorial("outer faces glued inside the pillow"));
        }
        let (xf, yf) = (x.perm.apply(v), y.perm.apply(phi.apply(v)));
        if x.tet == y.tet && xf == yf {
            return Err(MoveBlocked::Combinatorial("collapse would glue a face to itself"));
        }
        // X labels -> t labels -> u labels -> Y labels
        let perm = y.perm.compose(phi).compose(x.perm.inverse());
        pairs.push((x.tet, xf, y.tet, yf, perm));
    }

    let n = tri.len();
    let mut remap = vec![None; n];
    let mut kept = 0;
    for s in 0..n {
        if s != t && s != u {
            remap[s] = Some(kept);
            kept += 1;
        }
    }
    let mut tets: Vec<Tetrahedron> = Vec::with_capacity(kept);
    for s in 0..n {
        if s == t || s == u {
            continue;
        }
        let mut tet = tri.tets()[s].clone();
        for gl in tet.gluings.iter_mut().flatten() {
            if let Some(ns) = remap[gl.tet] {
                gl.tet = ns;
            }
        }
        tets.push(tet);
    }
    for (xt, xf, yt, yf, perm) in pairs {
        let (nx, ny) = (remap[xt].unwrap(), remap[yt].unwrap());
        tets[nx].gluings[xf] = Some(FaceGluing { tet: ny, perm });
        tets[ny].gluings[yf] = Some(FaceGluing { tet: nx, perm: perm.inverse() });
    }
    let out = Triangulation::new(tri.name.clone(), tets)
        .map_err(|_| MoveBlocked::Combinatorial("collapse is not consistent"))?;
    Ok(MoveOutcome { tri: out, remap, old: vec![(t, [0; 4]), (u, [0; 4])], new: Vec::new() })
}
