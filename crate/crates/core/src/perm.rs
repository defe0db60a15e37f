//! Permutations of the four vertex labels of a tetrahedron.

use std::fmt;

/// A bijection on `{0, 1, 2, 3}`, stored as its image table.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm4([u8; 4]);

/// All 24 permutations in lexicographic order of their image tables.
pub const ALL_PERMS: [Perm4; 24] = {
    let mut out = [Perm4([0, 1, 2, 3]); 24];
    let mut k = 0;
    let mut a = 0;
    while a < 4 {
        let mut b = 0;
        while b < 4 {
            let mut c = 0;
            while c < 4 {
                let d = 6 - a - b - c;
                if a != b && a != c && b != c && d >= 0 && d < 4 && d != a && d != b && d != c {
                    out[k] = Perm4([a as u8, b as u8, c as u8, d as u8]);
                    k += 1;
                }
                c += 1;
            }
            b += 1;
        }
        a += 1;
    }
    out
};

impl Perm4 {
    pub const IDENTITY: Perm4 = Perm4([0, 1, 2, 3]);

    /// Builds a permutation from its images, rejecting non-bijective tables.
    pub fn new(images: [u8; 4]) -> Option<Self> {
        let mut seen = [false; 4];
        for &x in &images {
            if x > 3 || seen[x as usize] {
                return None;
            }
            seen[x as usize] = true;
        }
        Some(Perm4(images))
    }

    /// Transposition of `a` and `b` (identity when equal).
    pub fn swap(a: usize, b: usize) -> Self {
        let mut images = [0, 1, 2, 3];
        images.swap(a, b);
        Perm4(images)
    }

    #[inline]
    pub fn apply(self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn images(self) -> [u8; 4] {
        self.0
    }

    /// `self ∘ other`: apply `other` first.
    #[inline]
    pub fn compose(self, other: Perm4) -> Perm4 {
        Perm4([
            self.0[other.0[0] as usize],
            self.0[other.0[1] as usize],
            self.0[other.0[2] as usize],
            self.0[other.0[3] as usize],
        ])
    }

    #[inline]
    pub fn inverse(self) -> Perm4 {
        let mut out = [0u8; 4];
        for (i, &x) in self.0.iter().enumerate() {
            out[x as usize] = i as u8;
        }
        Perm4(out)
    }

    /// +1 for even permutations, -1 for odd ones.
    pub fn sign(self) -> i32 {
        let mut inversions = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                if self.0[i] > self.0[j] {
                    inversions += 1;
                }
            }
        }
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Position of this permutation in [`ALL_PERMS`].
    pub fn index(self) -> usize {
        let mut idx = 0;
        let mut used = [false; 4];
        const FACT: [usize; 4] = [6, 2, 1, 1];
        for (pos, &x) in self.0.iter().enumerate() {
            let smaller = (0..x as usize).filter(|&y| !used[y]).count();
            idx += smaller * FACT[pos];
            used[x as usize] = true;
        }
        idx
    }

    pub fn from_index(idx: usize) -> Option<Perm4> {
        ALL_PERMS.get(idx).copied()
    }
}

impl fmt::Debug for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}{}", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

/// Dihedral-angle slot of the edge `{a, b}`: 0 for 01|23, 1 for 02|13, 2 for 03|12.
#[inline]
pub fn edge_pair(a: usize, b: usize) -> usize {
    debug_assert!(a != b && a < 4 && b < 4);
    match (a.min(b), a.max(b)) {
        (0, 1) | (2, 3) => 0,
        (0, 2) | (1, 3) => 1,
        _ => 2,
    }
}

/// The two vertices spanning the edge opposite `{a, b}`.
#[inline]
pub fn opposite_edge(a: usize, b: usize) -> (usize, usize) {
    let mut rest = (0..4).filter(|&v| v != a && v != b);
    let c = rest.next().unwrap();
    let d = rest.next().unwrap();
    (c, d)
}
