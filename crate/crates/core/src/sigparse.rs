//! Codec for taut isomorphism signatures `<iso>_<angles>`.
//!
//! The iso part is the standard isomorphism-signature encoding of an ideal
//! triangulation; the grammar is written out in `docs/signature.ebnf`.
//! Each angle digit picks the pair of opposite edges carrying angle π,
//! ordered `01|23`, `02|13`, `03|12`.

use crate::perm::{self, Perm, IDENTITY, S4};
use serde::Serialize;
use thiserror::Error;

pub const ALPHABET: &[u8; 64] =
    b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789+-";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SigError {
    #[error("malformed signature: {0}")]
    MalformedSignature(String),
    #[error("angle part has {found} digits but the triangulation has {expected} tetrahedra")]
    AngleLengthMismatch { expected: usize, found: usize },
    #[error("gluing is not an involution: {0}")]
    NonInvolutiveGluing(String),
}

fn malformed(msg: impl Into<String>) -> SigError {
    SigError::MalformedSignature(msg.into())
}

/// Value of a signature character, if it is in the alphabet.
pub fn char_value(c: u8) -> Option<usize> {
    match c {
        b'a'..=b'z' => Some((c - b'a') as usize),
        b'A'..=b'Z' => Some((c - b'A') as usize + 26),
        b'0'..=b'9' => Some((c - b'0') as usize + 52),
        b'+' => Some(62),
        b'-' => Some(63),
        _ => None,
    }
}

/// Where face `face` of some tetrahedron is glued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Gluing {
    pub tet: usize,
    pub face: u8,
    /// Vertex `v` of the source tetrahedron is identified with vertex `perm[v]`.
    pub perm: Perm,
}

/// Closed face pairing of `tet_count` tetrahedra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GluingTable {
    gluings: Vec<[Gluing; 4]>,
}

impl GluingTable {
    /// Checks that the pairing is a fixed-point-free involution.
    pub fn new(gluings: Vec<[Gluing; 4]>) -> Result<Self, SigError> {
        let n = gluings.len();
        if n == 0 {
            return Err(malformed("no tetrahedra"));
        }
        for (t, row) in gluings.iter().enumerate() {
            for f in 0..4u8 {
                let g = row[f as usize];
                if g.tet >= n || g.face > 3 || !perm::is_perm(g.perm) {
                    return Err(SigError::NonInvolutiveGluing(format!(
                        "face {f} of tetrahedron {t} points outside the table"
                    )));
                }
                if g.perm[f as usize] != g.face {
                    return Err(SigError::NonInvolutiveGluing(format!(
                        "face {f} of tetrahedron {t}: permutation does not carry the face"
                    )));
                }
                if g.tet == t && g.face == f {
                    return Err(SigError::NonInvolutiveGluing(format!(
                        "face {f} of tetrahedron {t} is glued to itself"
                    )));
                }
                let back = gluings[g.tet][g.face as usize];
                if back.tet != t || back.face != f || back.perm != perm::inverse(g.perm) {
                    return Err(SigError::NonInvolutiveGluing(format!(
                        "face {f} of tetrahedron {t} is not paired back"
                    )));
                }
            }
        }
        Ok(GluingTable { gluings })
    }

    pub fn tet_count(&self) -> usize {
        self.gluings.len()
    }

    pub fn gluing(&self, tet: usize, face: u8) -> Gluing {
        self.gluings[tet][face as usize]
    }

    pub fn rows(&self) -> &[[Gluing; 4]] {
        &self.gluings
    }

    /// Renames tetrahedron `t` to `tet_map[t]` and its vertex `v` to `vert_maps[t][v]`.
    pub fn relabel(&self, tet_map: &[usize], vert_maps: &[Perm]) -> GluingTable {
        let n = self.tet_count();
        let mut out = vec![[Gluing { tet: 0, face: 0, perm: IDENTITY }; 4]; n];
        for t in 0..n {
            for f in 0..4u8 {
                let g = self.gluing(t, f);
                let vt = vert_maps[t];
                let vd = vert_maps[g.tet];
                out[tet_map[t]][vt[f as usize] as usize] = Gluing {
                    tet: tet_map[g.tet],
                    face: vd[g.face as usize],
                    perm: perm::compose(perm::compose(vd, g.perm), perm::inverse(vt)),
                };
            }
        }
        GluingTable { gluings: out }
    }
}

/// A decoded census code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TautSignature {
    pub iso_part: String,
    pub angle_part: Vec<u8>,
    pub tet_count: usize,
}

impl std::fmt::Display for TautSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}_", self.iso_part)?;
        for d in &self.angle_part {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Index of the opposite-edge pair containing the edge `{u, v}`.
pub fn edge_pair(u: u8, v: u8) -> u8 {
    match (u.min(v), u.max(v)) {
        (0, 1) | (2, 3) => 0,
        (0, 2) | (1, 3) => 1,
        (0, 3) | (1, 2) => 2,
        _ => panic!("not an edge: {u}{v}"),
    }
}

/// The two edges of pair `d`, as vertex pairs.
pub const PAIR_EDGES: [[(u8, u8); 2]; 3] = [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];

struct Reader<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn digit(&mut self) -> Result<usize, SigError> {
        let c = *self.s.get(self.pos).ok_or_else(|| malformed("truncated iso part"))?;
        self.pos += 1;
        char_value(c).ok_or_else(|| malformed(format!("character {:?} is not in the alphabet", c as char)))
    }

    fn number(&mut self, chars: usize) -> Result<usize, SigError> {
        let mut v = 0usize;
        for k in 0..chars {
            let d = self.digit()?;
            v = v
                .checked_add(d.checked_shl(6 * k as u32).ok_or_else(|| malformed("number too large"))?)
                .ok_or_else(|| malformed("number too large"))?;
        }
        Ok(v)
    }
}

fn decode_iso(iso: &str) -> Result<GluingTable, SigError> {
    let mut r = Reader { s: iso.as_bytes(), pos: 0 };
    let first = r.digit()?;
    let (n, nch) = if first < 63 {
        (first, 1)
    } else {
        let nch = r.digit()?;
        if nch == 0 || nch > 5 {
            return Err(malformed("bad size field"));
        }
        (r.number(nch)?, nch)
    };
    if n == 0 {
        return Err(malformed("empty triangulation"));
    }
    let mut actions = Vec::new();
    let mut covered = 0;
    while covered < 4 * n {
        let v = r.digit()?;
        for j in 0..3 {
            let a = (v >> (2 * j)) & 3;
            if covered == 4 * n {
                if a != 0 {
                    return Err(malformed("nonzero padding in facet actions"));
                }
                continue;
            }
            match a {
                0 => return Err(malformed("boundary face; only closed gluings are accepted")),
                1 | 2 => covered += 2,
                _ => return Err(malformed("facet action 3 is undefined")),
            }
            actions.push(a);
        }
    }
    let joins = actions.iter().filter(|&&a| a == 2).count();
    let mut dests = Vec::with_capacity(joins);
    for _ in 0..joins {
        dests.push(r.number(nch)?);
    }
    let mut perms = Vec::with_capacity(joins);
    for _ in 0..joins {
        let i = r.digit()?;
        perms.push(*S4.get(i).ok_or_else(|| malformed("gluing permutation index out of range"))?);
    }
    if r.pos != iso.len() {
        return Err(malformed("trailing characters after gluing data"));
    }

    let mut table: Vec<[Option<Gluing>; 4]> = vec![[None; 4]; n];
    let (mut next, mut ai, mut ji) = (1usize, 0usize, 0usize);
    for t in 0..n {
        if t >= next {
            return Err(malformed("triangulation is disconnected"));
        }
        for f in 0..4u8 {
            if table[t][f as usize].is_some() {
                continue;
            }
            let (d, p) = if actions[ai] == 1 {
                if next >= n {
                    return Err(malformed("too many new tetrahedra"));
                }
                next += 1;
                (next - 1, IDENTITY)
            } else {
                let d = dests[ji];
                let p = perms[ji];
                ji += 1;
                if d >= n {
                    return Err(malformed("gluing destination out of range"));
                }
                (d, p)
            };
            ai += 1;
            let df = p[f as usize];
            if (d, df) == (t, f) {
                return Err(SigError::NonInvolutiveGluing(format!(
                    "face {f} of tetrahedron {t} glued to itself"
                )));
            }
            if table[d][df as usize].is_some() {
                return Err(SigError::NonInvolutiveGluing(format!(
                    "face {df} of tetrahedron {d} glued twice"
                )));
            }
            table[t][f as usize] = Some(Gluing { tet: d, face: df, perm: p });
            table[d][df as usize] = Some(Gluing { tet: t, face: f, perm: perm::inverse(p) });
        }
    }
    let rows = table
        .into_iter()
        .map(|row| row.map(|g| g.expect("every face is covered by an action")))
        .collect();
    GluingTable::new(rows)
}

/// Decodes `<iso>_<angles>`.
pub fn decode(signature: &str) -> Result<(TautSignature, GluingTable), SigError> {
    let (iso, ang) = signature
        .split_once('_')
        .ok_or_else(|| malformed("missing '_' separator"))?;
    if iso.is_empty() {
        return Err(malformed("empty iso part"));
    }
    let mut angle_part = Vec::with_capacity(ang.len());
    for c in ang.bytes() {
        match c {
            b'0'..=b'2' => angle_part.push(c - b'0'),
            _ => return Err(malformed(format!("angle digit {:?} is not in 0..=2", c as char))),
        }
    }
    let table = decode_iso(iso)?;
    if angle_part.len() != table.tet_count() {
        return Err(SigError::AngleLengthMismatch {
            expected: table.tet_count(),
            found: angle_part.len(),
        });
    }
    let sig = TautSignature { iso_part: iso.to_string(), angle_part, tet_count: table.tet_count() };
    Ok((sig, table))
}

fn push_number(out: &mut Vec<u8>, v: usize, chars: usize) {
    for k in 0..chars {
        out.push(ALPHABET[(v >> (6 * k)) & 63]);
    }
}

fn size_chars(n: usize) -> usize {
    let mut c = 1;
    while c < 8 && (n >> (6 * c)) > 0 {
        c += 1;
    }
    c
}

/// Relabelling produced by a breadth-first walk from one start.
#[derive(Debug, Clone)]
pub struct Relabelling {
    /// New index of each old tetrahedron.
    pub image: Vec<usize>,
    /// Vertex map of each old tetrahedron.
    pub vmap: Vec<Perm>,
}

/// Iso part obtained by walking from tetrahedron `start` with vertex map `p0`.
pub fn encode_from(table: &GluingTable, start: usize, p0: Perm) -> (String, Relabelling) {
    let n = table.tet_count();
    let mut image = vec![usize::MAX; n];
    let mut vmap = vec![IDENTITY; n];
    let mut order = vec![start];
    image[start] = 0;
    vmap[start] = p0;
    let (mut actions, mut dests, mut perms) = (Vec::new(), Vec::new(), Vec::new());
    let mut i = 0;
    while i < order.len() {
        let src = order[i];
        let inv_src = perm::inverse(vmap[src]);
        for fi in 0..4u8 {
            let fs = inv_src[fi as usize];
            let g = table.gluing(src, fs);
            let seen = image[g.tet] != usize::MAX;
            if seen
                && (image[g.tet] < i || (image[g.tet] == i && vmap[src][g.face as usize] < fi))
            {
                continue;
            }
            if seen {
                actions.push(2u8);
                dests.push(image[g.tet]);
                perms.push(perm::compose(perm::compose(vmap[g.tet], g.perm), inv_src));
            } else {
                image[g.tet] = order.len();
                order.push(g.tet);
                vmap[g.tet] = perm::compose(vmap[src], perm::inverse(g.perm));
                actions.push(1u8);
            }
        }
        i += 1;
    }
    let nch = size_chars(n);
    let mut out = Vec::new();
    if n < 63 {
        out.push(ALPHABET[n]);
    } else {
        out.push(ALPHABET[63]);
        out.push(ALPHABET[nch]);
        push_number(&mut out, n, nch);
    }
    for chunk in actions.chunks(3) {
        let mut v = 0usize;
        for (j, &a) in chunk.iter().enumerate() {
            v |= (a as usize) << (2 * j);
        }
        out.push(ALPHABET[v]);
    }
    for d in dests {
        push_number(&mut out, d, nch);
    }
    for p in perms {
        out.push(ALPHABET[perm::index(p)]);
    }
    (String::from_utf8(out).expect("alphabet is ASCII"), Relabelling { image, vmap })
}

/// Angle digits after applying a relabelling.
pub fn relabel_angles(angles: &[u8], image: &[usize], vmap: &[Perm]) -> Vec<u8> {
    let mut out = vec![0u8; angles.len()];
    for (t, &d) in angles.iter().enumerate() {
        let (a, b) = PAIR_EDGES[d as usize][0];
        out[image[t]] = edge_pair(vmap[t][a as usize], vmap[t][b as usize]);
    }
    out
}

/// Canonical signature: the smallest (iso part, angle digits) over all starts,
/// compared bytewise.
pub fn encode(table: &GluingTable, angles: &[u8]) -> String {
    let mut best: Option<(String, Vec<u8>)> = None;
    for start in 0..table.tet_count() {
        for p0 in S4 {
            let (iso, rl) = encode_from(table, start, p0);
            if let Some((b, _)) = &best {
                if iso > *b {
                    continue;
                }
            }
            let ang = relabel_angles(angles, &rl.image, &rl.vmap);
            let cand = (iso, ang);
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    let (iso, ang) = best.expect("at least one tetrahedron");
    let digits: String = ang.iter().map(|d| (b'0' + d) as char).collect();
    format!("{iso}_{digits}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_values_round_trip() {
        for (i, &c) in ALPHABET.iter().enumerate() {
            assert_eq!(char_value(c), Some(i));
        }
        assert_eq!(char_value(b'_'), None);
    }

    #[test]
    fn leading_character_gives_size() {
        let (s, t) = decode("cPcbbbdxm_10").unwrap();
        assert_eq!(s.tet_count, 2);
        assert_eq!(t.tet_count(), 2);
        let (s, _) = decode("eLAkbbcdddhwqj_2102").unwrap();
        assert_eq!(s.tet_count, 4);
        assert_eq!(s.angle_part, vec![2, 1, 0, 2]);
    }

    #[test]
    fn short_angle_part_is_rejected() {
        assert_eq!(
            decode("cPcbbbdxm_1").unwrap_err(),
            SigError::AngleLengthMismatch { expected: 2, found: 1 }
        );
    }

    #[test]
    fn malformed_inputs() {
        for bad in ["", "_", "cPcbbbdxm", "cPcbbbdx_10", "cPcbbbdxmm_10", "cPcb*bdxm_10", "cPcbbbdxm_13", "a_"] {
            assert!(matches!(decode(bad), Err(SigError::MalformedSignature(_))), "{bad}");
        }
    }

    #[test]
    fn round_trip_of_known_codes() {
        for s in ["cPcbbbdxm_10", "eLAkbbcdddhwqj_2102", "fLAMcaccdeejsnaxk_20010", "gLLAQbddeeffennmann_011200"] {
            let (sig, table) = decode(s).unwrap();
            assert_eq!(encode(&table, &sig.angle_part), s);
            assert_eq!(sig.to_string(), s);
        }
    }

    #[test]
    fn first_gluing_of_two_tetrahedron_code() {
        let (_, t) = decode("cPcbbbdxm_10").unwrap();
        // Face 0 of tetrahedron 0 opens the second tetrahedron with the identity.
        assert_eq!(t.gluing(0, 0), Gluing { tet: 1, face: 0, perm: IDENTITY });
    }

    #[test]
    fn table_constructor_rejects_one_sided_pairing() {
        let (_, t) = decode("cPcbbbdxm_10").unwrap();
        let mut rows = t.rows().to_vec();
        rows[0][0].face = 1;
        assert!(matches!(GluingTable::new(rows), Err(SigError::NonInvolutiveGluing(_))));
    }

    #[test]
    fn large_size_header_round_trips() {
        let mut out = Vec::new();
        push_number(&mut out, 4097, 3);
        let s = String::from_utf8(out).unwrap();
        let mut r = Reader { s: s.as_bytes(), pos: 0 };
        assert_eq!(r.number(3).unwrap(), 4097);
        assert_eq!(size_chars(62), 1);
        assert_eq!(size_chars(64), 2);
    }
}
