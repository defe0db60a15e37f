//! Edge and vertex classes, vertex links, orientation and validation.

use crate::perm::{edge_pair, Perm4};
use crate::triangulation::Triangulation;
use serde::Serialize;

/// Index of the edge `{a, b}` among the six edges of a tetrahedron, in the
/// order 01, 02, 03, 12, 13, 23.
#[inline]
pub fn edge_index(a: usize, b: usize) -> usize {
    const TABLE: [[usize; 4]; 4] = [[9, 0, 1, 2], [0, 9, 3, 4], [1, 3, 9, 5], [2, 4, 5, 9]];
    TABLE[a][b]
}

/// Endpoints of the edge with the given [`edge_index`].
pub const EDGE_VERTICES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// One appearance of an edge class inside a tetrahedron.
///
/// `embedding` sends 0,1 to the edge endpoints and 2,3 to the remaining
/// vertices; walking to the next incidence crosses the face opposite
/// `embedding(2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeIncidence {
    pub tet: usize,
    pub embedding: Perm4,
}

impl EdgeIncidence {
    /// Dihedral-angle slot carried by this incidence.
    #[inline]
    pub fn pair(&self) -> usize {
        edge_pair(self.embedding.apply(0), self.embedding.apply(1))
    }

    /// True when the endpoints appear in increasing label order.
    #[inline]
    pub fn orientation(&self) -> bool {
        self.embedding.apply(0) < self.embedding.apply(1)
    }

    #[inline]
    pub fn endpoints(&self) -> (usize, usize) {
        (self.embedding.apply(0), self.embedding.apply(1))
    }

    /// The face containing the edge that leads to the next incidence.
    #[inline]
    pub fn forward_face(&self) -> usize {
        self.embedding.apply(2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeClass {
    pub id: usize,
    /// Cyclic order around the edge (linear from one boundary face to the
    /// other for boundary edges).
    pub incidences: Vec<EdgeIncidence>,
    pub boundary: bool,
    /// Set when the edge is identified with itself in reverse.
    pub reversed: bool,
}

impl EdgeClass {
    #[inline]
    pub fn degree(&self) -> usize {
        self.incidences.len()
    }

    /// Distinct tetrahedra around the edge, in order of first appearance.
    pub fn distinct_tets(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::with_capacity(self.incidences.len());
        for inc in &self.incidences {
            if !out.contains(&inc.tet) {
                out.push(inc.tet);
            }
        }
        out
    }
}

#[inline]
fn step_forward(tri: &Triangulation, inc: EdgeIncidence) -> Option<EdgeIncidence> {
    let sigma = inc.embedding;
    let g = tri.gluing(inc.tet, sigma.apply(2))?;
    Some(EdgeIncidence { tet: g.tet, embedding: g.perm.compose(sigma).compose(Perm4::swap(2, 3)) })
}

#[inline]
fn step_backward(tri: &Triangulation, inc: EdgeIncidence) -> Option<EdgeIncidence> {
    let sigma = inc.embedding;
    let g = tri.gluing(inc.tet, sigma.apply(3))?;
    Some(EdgeIncidence { tet: g.tet, embedding: g.perm.compose(sigma).compose(Perm4::swap(2, 3)) })
}

fn embedding_for(a: usize, b: usize) -> Perm4 {
    let (c, d) = crate::perm::opposite_edge(a, b);
    Perm4::new([a as u8, b as u8, c as u8, d as u8]).expect("distinct vertices")
}

/// Edge classes together with a `(tet, edge index) -> class` lookup.
#[derive(Clone, Debug)]
pub struct EdgeMap {
    pub classes: Vec<EdgeClass>,
    lookup: Vec<[usize; 6]>,
}

impl EdgeMap {
    pub fn build(tri: &Triangulation) -> Self {
        let n = tri.len();
        let mut lookup = vec![[usize::MAX; 6]; n];
        let mut classes = Vec::with_capacity(n);
        for t in 0..n {
            for (e, &(a, b)) in EDGE_VERTICES.iter().enumerate() {
                if lookup[t][e] != usize::MAX {
                    continue;
                }
                let start = EdgeIncidence { tet: t, embedding: embedding_for(a, b) };
                let id = classes.len();
                let mut class = walk_edge(tri, start, id);
                for inc in &class.incidences {
                    let (x, y) = inc.endpoints();
                    let slot = &mut lookup[inc.tet][edge_index(x, y)];
                    if *slot == id {
                        class.reversed = true;
                    }
                    *slot = id;
                }
                classes.push(class);
            }
        }
        EdgeMap { classes, lookup }
    }

    #[inline]
    pub fn class_of(&self, tet: usize, a: usize, b: usize) -> usize {
        self.lookup[tet][edge_index(a, b)]
    }

    #[inline]
    pub fn class_of_index(&self, tet: usize, edge: usize) -> usize {
        self.lookup[tet][edge]
    }
}

fn walk_edge(tri: &Triangulation, start: EdgeIncidence, id: usize) -> EdgeClass {
    // Rewind to a boundary face, or detect that the edge is interior.
    let mut first = start;
    let mut boundary = false;
    loop {
        match step_backward(tri, first) {
            None => {
                boundary = true;
                break;
            }
            Some(prev) if prev == start => break,
            Some(prev) => first = prev,
        }
    }
    if !boundary {
        first = start;
    }
    let mut incidences = vec![first];
    let mut cur = first;
    while let Some(next) = step_forward(tri, cur) {
        if next == first {
            break;
        }
        incidences.push(next);
        cur = next;
    }
    EdgeClass { id, incidences, boundary, reversed: false }
}

pub fn compute_edge_classes(tri: &Triangulation) -> Vec<EdgeClass> {
    EdgeMap::build(tri).classes
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    /// Link is a 2-sphere.
    Internal,
    /// Link is a torus.
    Ideal,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexClass {
    pub id: usize,
    /// Vertex corners `(tet, vertex)` making up the link.
    pub corners: Vec<(usize, usize)>,
    pub link_euler: i64,
    pub link_genus: i64,
    pub link_orientable: bool,
    pub link_closed: bool,
    pub kind: VertexKind,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

pub fn compute_vertex_classes(tri: &Triangulation) -> Vec<VertexClass> {
    let n = tri.len();
    let mut uf = UnionFind::new(4 * n);
    for t in 0..n {
        for f in 0..4 {
            if let Some(g) = tri.gluing(t, f) {
                for v in (0..4).filter(|&v| v != f) {
                    uf.union(4 * t + v, 4 * g.tet + g.perm.apply(v));
                }
            }
        }
    }
    let mut class_of_root = vec![usize::MAX; 4 * n];
    let mut classes: Vec<VertexClass> = Vec::new();
    for t in 0..n {
        for v in 0..4 {
            let root = uf.find(4 * t + v);
            if class_of_root[root] == usize::MAX {
                class_of_root[root] = classes.len();
                classes.push(VertexClass {
                    id: classes.len(),
                    corners: Vec::new(),
                    link_euler: 0,
                    link_genus: 0,
                    link_orientable: true,
                    link_closed: true,
                    kind: VertexKind::Other,
                });
            }
            classes[class_of_root[root]].corners.push((t, v));
        }
    }
    let class_of = |uf: &mut UnionFind, t: usize, v: usize| class_of_root[uf.find(4 * t + v)];

    // Link vertices are edge ends.
    let edges = EdgeMap::build(tri);
    let mut link_vertices = vec![0i64; classes.len()];
    for e in &edges.classes {
        let inc = e.incidences[0];
        let (a, b) = inc.endpoints();
        link_vertices[class_of(&mut uf, inc.tet, a)] += 1;
        link_vertices[class_of(&mut uf, inc.tet, b)] += 1;
    }

    let mut sides_glued = vec![0i64; classes.len()];
    let mut sides_free = vec![0i64; classes.len()];
    for t in 0..n {
        for v in 0..4 {
            let c = class_of(&mut uf, t, v);
            for f in (0..4).filter(|&f| f != v) {
                if tri.gluing(t, f).is_some() {
                    sides_glued[c] += 1;
                } else {
                    sides_free[c] += 1;
                }
            }
        }
    }

    for (c, class) in classes.iter_mut().enumerate() {
        let faces = class.corners.len() as i64;
        let edges_count = sides_glued[c] / 2 + sides_free[c];
        class.link_euler = link_vertices[c] - edges_count + faces;
        class.link_closed = sides_free[c] == 0;
        class.link_orientable = link_orientable(tri, &class.corners);
        class.link_genus = if class.link_orientable {
            (2 - class.link_euler) / 2
        } else {
            2 - class.link_euler
        };
        class.kind = match (class.link_closed, class.link_orientable, class.link_euler) {
            (true, true, 2) => VertexKind::Internal,
            (true, true, 0) => VertexKind::Ideal,
            _ => VertexKind::Other,
        };
    }
    classes
}

fn link_orientable(tri: &Triangulation, corners: &[(usize, usize)]) -> bool {
    use std::collections::HashMap;
    let mut sign: HashMap<(usize, usize), i32> = HashMap::new();
    let (t0, v0) = corners[0];
    sign.insert((t0, v0), 1);
    let mut stack = vec![(t0, v0)];
    while let Some((t, v)) = stack.pop() {
        let s = sign[&(t, v)];
        for f in (0..4).filter(|&f| f != v) {
            let Some(g) = tri.gluing(t, f) else { continue };
            let next = (g.tet, g.perm.apply(v));
            let want = -g.perm.sign() * s;
            match sign.get(&next) {
                Some(&have) if have != want => return false,
                Some(_) => {}
                None => {
                    sign.insert(next, want);
                    stack.push(next);
                }
            }
        }
    }
    true
}

/// Consistent orientation signs per tetrahedron (gluings between equally
/// signed tetrahedra are odd), or `None` if the triangulation is non-orientable.
pub fn orientation(tri: &Triangulation) -> Option<Vec<i8>> {
    let n = tri.len();
    let mut sign = vec![0i8; n];
    for root in 0..n {
        if sign[root] != 0 {
            continue;
        }
        sign[root] = 1;
        let mut stack = vec![root];
        while let Some(t) = stack.pop() {
            for g in tri.tets()[t].gluings.iter().flatten() {
                let want = if g.perm.sign() < 0 { sign[t] } else { -sign[t] };
                if sign[g.tet] == 0 {
                    sign[g.tet] = want;
                    stack.push(g.tet);
                } else if sign[g.tet] != want {
                    return None;
                }
            }
        }
    }
    Some(sign)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub tetrahedra: usize,
    pub closed: bool,
    pub connected: bool,
    pub orientable: bool,
    pub edge_classes: usize,
    pub vertex_classes: usize,
    pub ideal_vertices: usize,
    pub internal_vertices: usize,
    pub other_vertices: usize,
    pub invalid_edges: usize,
    /// Edge classes of degree at most 2.
    pub low_degree_edges: usize,
    /// Number of cusps, i.e. torus-linked vertex classes.
    pub cusps: usize,
    pub issues: Vec<String>,
}

impl ValidationReport {
    /// Closed, connected, orientable, every vertex ideal.
    pub fn is_ideal(&self) -> bool {
        self.closed
            && self.connected
            && self.orientable
            && self.invalid_edges == 0
            && self.internal_vertices == 0
            && self.other_vertices == 0
            && self.cusps >= 1
    }

    pub fn is_one_vertex_ideal(&self) -> bool {
        self.is_ideal() && self.vertex_classes == 1
    }

    /// Vertex census used to check that retriangulation preserved the manifold.
    pub fn census(&self) -> (usize, usize, usize) {
        (self.ideal_vertices, self.internal_vertices, self.other_vertices)
    }
}

pub fn validate_ideal(tri: &Triangulation) -> ValidationReport {
    let mut issues = Vec::new();
    let closed = tri.is_closed();
    if !closed {
        issues.push("not closed: unglued faces present".to_string());
    }
    let connected = tri.is_connected();
    if !connected {
        issues.push("not connected".to_string());
    }
    let orientable = orientation(tri).is_some();
    if !orientable {
        issues.push("not orientable".to_string());
    }
    let edges = compute_edge_classes(tri);
    let vertices = compute_vertex_classes(tri);
    let invalid_edges = edges.iter().filter(|e| e.reversed).count();
    if invalid_edges > 0 {
        issues.push(format!("{invalid_edges} edge(s) identified with themselves in reverse"));
    }
    let low_degree_edges = edges.iter().filter(|e| !e.boundary && e.degree() <= 2).count();
    for e in edges.iter().filter(|e| !e.boundary && e.degree() <= 2) {
        issues.push(format!("degree-{} edge present (edge {})", e.degree(), e.id));
    }
    let count = |k: VertexKind| vertices.iter().filter(|v| v.kind == k).count();
    let ideal_vertices = count(VertexKind::Ideal);
    let internal_vertices = count(VertexKind::Internal);
    let other_vertices = count(VertexKind::Other);
    if internal_vertices > 0 {
        issues.push(format!("{internal_vertices} internal (sphere-linked) vertex class(es)"));
    }
    if other_vertices > 0 {
        issues.push(format!("{other_vertices} vertex class(es) with neither sphere nor torus link"));
    }
    if ideal_vertices == 0 {
        issues.push("no ideal vertex".to_string());
    }
    ValidationReport {
        tetrahedra: tri.len(),
        closed,
        connected,
        orientable,
        edge_classes: edges.len(),
        vertex_classes: vertices.len(),
        ideal_vertices,
        internal_vertices,
        other_vertices,
        invalid_edges,
        low_degree_edges,
        cusps: ideal_vertices,
        issues,
    }
}
