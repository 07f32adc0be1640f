//! Permutations of the four vertex labels of a tetrahedron.

/// A permutation of `{0,1,2,3}`, stored as its image list.
pub type Perm = [u8; 4];

pub const IDENTITY: Perm = [0, 1, 2, 3];

/// All 24 permutations in lexicographic order of their image lists.
pub const S4: [Perm; 24] = [
    [0, 1, 2, 3],
    [0, 1, 3, 2],
    [0, 2, 1, 3],
    [0, 2, 3, 1],
    [0, 3, 1, 2],
    [0, 3, 2, 1],
    [1, 0, 2, 3],
    [1, 0, 3, 2],
    [1, 2, 0, 3],
    [1, 2, 3, 0],
    [1, 3, 0, 2],
    [1, 3, 2, 0],
    [2, 0, 1, 3],
    [2, 0, 3, 1],
    [2, 1, 0, 3],
    [2, 1, 3, 0],
    [2, 3, 0, 1],
    [2, 3, 1, 0],
    [3, 0, 1, 2],
    [3, 0, 2, 1],
    [3, 1, 0, 2],
    [3, 1, 2, 0],
    [3, 2, 0, 1],
    [3, 2, 1, 0],
];

pub fn inverse(p: Perm) -> Perm {
    let mut q = [0u8; 4];
    for (i, &x) in p.iter().enumerate() {
        q[x as usize] = i as u8;
    }
    q
}

/// `p ∘ q`, i.e. apply `q` first.
pub fn compose(p: Perm, q: Perm) -> Perm {
    [p[q[0] as usize], p[q[1] as usize], p[q[2] as usize], p[q[3] as usize]]
}

/// Index of `p` in [`S4`].
pub fn index(p: Perm) -> usize {
    S4.iter().position(|&q| q == p).expect("not a permutation of 0..4")
}

pub fn is_perm(p: Perm) -> bool {
    let mut seen = [false; 4];
    for &x in &p {
        if x > 3 || seen[x as usize] {
            return false;
        }
        seen[x as usize] = true;
    }
    true
}

/// +1 for even permutations, -1 for odd ones.
pub fn sign(p: Perm) -> i8 {
    let mut s = 1;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}
