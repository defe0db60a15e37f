//! Canonical isomorphism signatures.
//!
//! For every start tetrahedron and start labeling the gluing table is relabeled
//! breadth-first so that each newly reached tetrahedron is glued by the identity.
//! The resulting token stream is serialized with 6 bits per character; the
//! signature is the lexicographically smallest stream.

use crate::exec::Exec;
use crate::perm::{Perm4, ALL_PERMS};
use crate::triangulation::{FaceGluing, Tetrahedron, Triangulation};
use std::cmp::Ordering;
use thiserror::Error;

const ALPHABET: &[u8; 64] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789+-";

const BOUNDARY: u32 = 0;
const NEW_TET: u32 = 1;
const OLD_TET: u32 = 2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("empty signature")]
    Empty,
    #[error("invalid character {0:?}")]
    BadChar(char),
    #[error("truncated signature")]
    Truncated,
    #[error("inconsistent signature: {0}")]
    Inconsistent(&'static str),
    #[error("triangulation is not connected")]
    Disconnected,
    #[error("triangulation has no tetrahedra")]
    NoTetrahedra,
}

fn char_value(c: u8) -> Result<u32, SignatureError> {
    ALPHABET
        .iter()
        .position(|&a| a == c)
        .map(|v| v as u32)
        .ok_or(SignatureError::BadChar(c as char))
}

/// Digits per number so that every tetrahedron index and permutation index fits.
fn width_for(n: usize) -> u32 {
    let mut w = 1;
    let mut cap = 64usize;
    while cap <= n.max(24) {
        w += 1;
        cap *= 64;
    }
    w
}

/// Token stream of the relabeling that starts at `start` with labels `rho`.
/// Aborts with `None` as soon as the stream exceeds `bound`.
fn stream(tri: &Triangulation, start: usize, rho: Perm4, bound: Option<&[u32]>) -> Option<Vec<u32>> {
    let n = tri.len();
    let mut index = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    // old labels -> new labels
    let mut maps = vec![Perm4::IDENTITY; n];
    index[start] = 0;
    order.push(start);
    maps[start] = rho;
    let mut out: Vec<u32> = Vec::with_capacity(4 * n + 8);
    let mut tight = bound.is_some();

    let mut push = |out: &mut Vec<u32>, tok: u32| -> bool {
        if tight {
            let b = bound.unwrap();
            let pos = out.len();
            match b.get(pos).map(|&x| tok.cmp(&x)) {
                Some(Ordering::Less) => tight = false,
                // longer than an equal prefix, or larger token
                Some(Ordering::Greater) | None => return false,
                Some(Ordering::Equal) => {}
            }
        }
        out.push(tok);
        true
    };

    let mut i = 0;
    while i < order.len() {
        let t = order[i];
        let rho_t = maps[t];
        let inv = rho_t.inverse();
        for nf in 0..4 {
            let f = inv.apply(nf);
            match tri.gluing(t, f) {
                None => {
                    if !push(&mut out, BOUNDARY) {
                        return None;
                    }
                }
                Some(g) => {
                    if index[g.tet] == usize::MAX {
                        index[g.tet] = order.len();
                        order.push(g.tet);
                        maps[g.tet] = rho_t.compose(g.perm.inverse());
                        if !push(&mut out, NEW_TET) {
                            return None;
                        }
                        continue;
                    }
                    let j = index[g.tet];
                    let perm = maps[g.tet].compose(g.perm).compose(inv);
                    let partner = (j, perm.apply(nf));
                    if partner < (i, nf) {
                        continue;
                    }
                    for tok in [OLD_TET, j as u32, perm.index() as u32] {
                        if !push(&mut out, tok) {
                            return None;
                        }
                    }
                }
            }
        }
        i += 1;
    }
    if order.len() != n {
        // disconnected; reported by the caller
        return Some(Vec::new());
    }
    if tight && out.len() >= bound.unwrap().len() {
        // equal to the bound
        return None;
    }
    Some(out)
}

fn encode(n: usize, tokens: &[u32]) -> String {
    let w = width_for(n);
    let mut s = String::with_capacity(2 + tokens.len() * w as usize);
    let put = |s: &mut String, mut v: u32, digits: u32| {
        let mut buf = vec![0u8; digits as usize];
        for d in (0..digits as usize).rev() {
            buf[d] = ALPHABET[(v % 64) as usize];
            v /= 64;
        }
        s.push_str(std::str::from_utf8(&buf).unwrap());
    };
    put(&mut s, w, 1);
    put(&mut s, n as u32, w);
    let mut k = 0;
    while k < tokens.len() {
        put(&mut s, tokens[k], 1);
        if tokens[k] == OLD_TET {
            put(&mut s, tokens[k + 1], w);
            put(&mut s, tokens[k + 2], 1);
            k += 3;
        } else {
            k += 1;
        }
    }
    s
}

/// Canonical signature; equal exactly for combinatorially isomorphic triangulations.
pub fn canonical_signature(tri: &Triangulation) -> Result<String, SignatureError> {
    canonical_signature_with(tri, Exec::Sequential)
}

/// As [`canonical_signature`], optionally spreading the start tetrahedra over the thread pool.
pub fn canonical_signature_with(tri: &Triangulation, exec: Exec) -> Result<String, SignatureError> {
    let n = tri.len();
    if n == 0 {
        return Err(SignatureError::NoTetrahedra);
    }
    if !tri.is_connected() {
        return Err(SignatureError::Disconnected);
    }
    // Each start tetrahedron is scanned sequentially with pruning against its own best.
    let starts: Vec<usize> = (0..n).collect();
    let bests = exec.map(&starts, |&t| {
        let mut best: Option<Vec<u32>> = None;
        for &rho in ALL_PERMS.iter() {
            if let Some(s) = stream(tri, t, rho, best.as_deref()) {
                best = Some(s);
            }
        }
        best.expect("at least one labeling")
    });
    let best = bests.into_iter().min().unwrap();
    Ok(encode(n, &best))
}

/// Rebuilds the triangulation labeled as in the signature's canonical form.
pub fn decode_signature(sig: &str) -> Result<Triangulation, SignatureError> {
    let bytes = sig.as_bytes();
    if bytes.is_empty() {
        return Err(SignatureError::Empty);
    }
    let mut pos = 0;
    let mut take = |digits: u32| -> Result<u32, SignatureError> {
        let mut v: u32 = 0;
        for _ in 0..digits {
            let c = *bytes.get(pos).ok_or(SignatureError::Truncated)?;
            pos += 1;
            v = v
                .checked_mul(64)
                .and_then(|v| v.checked_add(char_value(c).ok()?))
                .ok_or(SignatureError::BadChar(c as char))?;
        }
        Ok(v)
    };
    let w = take(1)?;
    if w == 0 || w > 4 {
        return Err(SignatureError::Inconsistent("bad width"));
    }
    let n = take(w)? as usize;
    if n == 0 {
        return Err(SignatureError::Inconsistent("no tetrahedra"));
    }
    if width_for(n) != w {
        return Err(SignatureError::Inconsistent("non-canonical width"));
    }
    let mut tets = vec![Tetrahedron::default(); n];
    let mut done = vec![[false; 4]; n];
    let mut count = 1;
    for i in 0..n {
        if i >= count {
            return Err(SignatureError::Inconsistent("unreachable tetrahedron"));
        }
        for f in 0..4 {
            if done[i][f] {
                continue;
            }
            done[i][f] = true;
            match take(1)? {
                BOUNDARY => {}
                NEW_TET => {
                    if count >= n {
                        return Err(SignatureError::Inconsistent("too many tetrahedra"));
                    }
                    let j = count;
                    count += 1;
                    tets[i].gluings[f] = Some(FaceGluing { tet: j, perm: Perm4::IDENTITY });
                    tets[j].gluings[f] = Some(FaceGluing { tet: i, perm: Perm4::IDENTITY });
                    done[j][f] = true;
                }
                OLD_TET => {
                    let j = take(w)? as usize;
                    let p = Perm4::from_index(take(1)? as usize)
                        .ok_or(SignatureError::Inconsistent("bad permutation index"))?;
                    let g = p.apply(f);
                    if j >= count || (j, g) < (i, f) || (j == i && g == f) || done[j][g] {
                        return Err(SignatureError::Inconsistent("bad gluing target"));
                    }
                    tets[i].gluings[f] = Some(FaceGluing { tet: j, perm: p });
                    tets[j].gluings[g] = Some(FaceGluing { tet: i, perm: p.inverse() });
                    done[j][g] = true;
                }
                _ => return Err(SignatureError::Inconsistent("bad token")),
            }
        }
    }
    if count != n {
        return Err(SignatureError::Inconsistent("tetrahedron count mismatch"));
    }
    if take(1).is_ok() {
        return Err(SignatureError::Inconsistent("trailing characters"));
    }
    let tri = Triangulation::new(sig.to_string(), tets)
        .map_err(|_| SignatureError::Inconsistent("gluings do not close up"))?;
    // a signature that decodes but is not the minimum of its class is rejected
    if canonical_signature(&tri)? != sig {
        return Err(SignatureError::Inconsistent("not canonical"));
    }
    Ok(tri)
}
