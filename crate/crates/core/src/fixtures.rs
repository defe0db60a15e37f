//! Small triangulations used by tests, benches and the CLI examples.

use crate::triangulation::Triangulation;

pub const FIG8_JSON: &str = include_str!("../fixtures/fig8.json");
pub const M003_JSON: &str = include_str!("../fixtures/m003.json");
pub const TREF_JSON: &str = include_str!("../fixtures/tref.json");

fn load(text: &str) -> Triangulation {
    Triangulation::from_json(text).expect("bundled fixture parses")
}

/// Two-tetrahedron figure-eight knot complement.
pub fn fig8() -> Triangulation {
    load(FIG8_JSON)
}

/// Two-tetrahedron sister of the figure-eight complement.
pub fn m003() -> Triangulation {
    load(M003_JSON)
}

/// Two-tetrahedron trefoil complement (no strict angle structure).
pub fn tref() -> Triangulation {
    load(TREF_JSON)
}

pub const DEG2_JSON: &str = include_str!("../fixtures/deg2.json");
pub const REP3_JSON: &str = include_str!("../fixtures/rep3.json");

/// Four-tetrahedron figure-eight triangulation with a degree-2 edge.
pub fn deg2() -> Triangulation {
    load(DEG2_JSON)
}

/// Three tetrahedra with a degree-3 edge that meets one tetrahedron twice.
pub fn rep3() -> Triangulation {
    load(REP3_JSON)
}

pub const FLAT1_JSON: &str = include_str!("../fixtures/flat1.json");

/// Five-tetrahedron figure-eight triangulation whose volume maximum is on the boundary.
pub fn flat1() -> Triangulation {
    load(FLAT1_JSON)
}

/// Manifest of the desk-scale strategy comparison suite.
pub fn desk_manifest() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/desk/manifest.txt")
}

/// The closed one-vertex fixtures bundled with the crate.
pub fn all_closed() -> Vec<Triangulation> {
    vec![fig8(), m003(), tref(), deg2(), rep3(), flat1()]
}
