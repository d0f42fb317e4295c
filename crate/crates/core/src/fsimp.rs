//! Simplices of the bookkeeping simplicial set: strings of composable maps
//! `S_0 ← S_1 ← ⋯ ← S_t`, taken up to level-wise relabeling.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};
use crate::finmap::{classify, compose, epi_mono_factor, FinMap, MapClass};

/// A string `S_0 ←f_1− S_1 ←f_2− ⋯ ←f_t− S_t` of composable maps.
///
/// `maps[i]` is `f_{i+1}: S_{i+1} → S_i`. A degree-zero string is a bare set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FSimplex {
    card0: usize,
    maps: Vec<FinMap>,
}

/// An [`FSimplex`] in canonical form: the lexicographically smallest
/// `card0 ∥ img(f_1) ∥ ⋯ ∥ img(f_t)` among all relabelings of its levels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalFSimplex(FSimplex);

impl FSimplex {
    pub fn new(card0: usize, maps: Vec<FinMap>) -> Result<Self> {
        let mut below = card0;
        for (i, f) in maps.iter().enumerate() {
            if f.dst() != below {
                return Err(Error::InvalidInput(format!(
                    "maps[{i}].dst is {} but the set below it has {below} elements",
                    f.dst()
                )));
            }
            below = f.src();
        }
        Ok(FSimplex { card0, maps })
    }

    pub(crate) fn from_parts(card0: usize, maps: Vec<FinMap>) -> Self {
        debug_assert!(FSimplex::new(card0, maps.clone()).is_ok());
        FSimplex { card0, maps }
    }

    /// The degree-zero simplex on a set with `n` elements.
    pub fn point(n: usize) -> Self {
        FSimplex { card0: n, maps: Vec::new() }
    }

    /// A degree-one simplex.
    pub fn edge(f: FinMap) -> Self {
        FSimplex { card0: f.dst(), maps: vec![f] }
    }

    pub fn degree(&self) -> usize {
        self.maps.len()
    }

    pub fn card0(&self) -> usize {
        self.card0
    }

    pub fn maps(&self) -> &[FinMap] {
        &self.maps
    }

    /// `|S_i|`.
    pub fn card(&self, i: usize) -> usize {
        if i == 0 {
            self.card0
        } else {
            self.maps[i - 1].src()
        }
    }

    /// `[|S_0|, …, |S_t|]`.
    pub fn cards(&self) -> Vec<usize> {
        std::iter::once(self.card0)
            .chain(self.maps.iter().map(FinMap::src))
            .collect()
    }

    pub fn max_card(&self) -> usize {
        self.cards().into_iter().max().unwrap_or(0)
    }

    pub fn classes(&self) -> Vec<MapClass> {
        self.maps.iter().map(classify).collect()
    }

    /// No arrow is bijective.
    pub fn is_nondegenerate(&self) -> bool {
        self.maps.iter().all(|f| !f.is_bijective())
    }

    /// Face operator `d_i`: drop `S_0`, drop `S_t`, or compose across `S_i`.
    pub fn face(&self, i: usize) -> Result<FSimplex> {
        let t = self.degree();
        if t == 0 || i > t {
            return Err(Error::IndexOutOfRange { index: i, degree: t });
        }
        let mut maps = self.maps.clone();
        let card0 = if i == 0 {
            maps.remove(0).src()
        } else if i == t {
            maps.pop();
            self.card0
        } else {
            let upper = maps.remove(i);
            maps[i - 1] = compose(&maps[i - 1], &upper)?;
            self.card0
        };
        Ok(FSimplex { card0, maps })
    }

    /// Degeneracy operator `s_i`: repeat `S_i` with an identity arrow.
    pub fn degeneracy(&self, i: usize) -> Result<FSimplex> {
        let t = self.degree();
        if i > t {
            return Err(Error::IndexOutOfRange { index: i, degree: t });
        }
        let mut maps = self.maps.clone();
        maps.insert(i, FinMap::identity(self.card(i)));
        Ok(FSimplex { card0: self.card0, maps })
    }

    /// `Σ|S_i| − Σ|im f_i|`.
    pub fn defect(&self) -> usize {
        self.card0
            + self
                .maps
                .iter()
                .map(|f| f.src() - f.image_size())
                .sum::<usize>()
    }

    /// The `2t`-simplex obtained by factoring every arrow as a surjection
    /// followed by an injection.
    pub fn saturate(&self) -> Result<FSimplex> {
        if self.degree() == 0 {
            return Err(Error::InvalidInput(
                "saturation needs a simplex of positive degree".into(),
            ));
        }
        let mut maps = Vec::with_capacity(2 * self.degree());
        for f in &self.maps {
            let (epi, mono) = epi_mono_factor(f);
            maps.push(mono);
            maps.push(epi);
        }
        Ok(FSimplex { card0: self.card0, maps })
    }

    /// Applies level-wise bijections: `perms[i]` sends old labels of `S_i`
    /// to new ones.
    pub fn relabel(&self, perms: &[Vec<usize>]) -> Result<FSimplex> {
        let cards = self.cards();
        if perms.len() != cards.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} permutations, got {}",
                cards.len(),
                perms.len()
            )));
        }
        for (i, (p, &n)) in perms.iter().zip(&cards).enumerate() {
            let mut seen = vec![false; n];
            if p.len() != n || !p.iter().all(|&v| v < n && !std::mem::replace(&mut seen[v], true)) {
                return Err(Error::InvalidInput(format!("perms[{i}] is not a permutation of {n}")));
            }
        }
        let maps = self
            .maps
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let mut img = vec![0; f.src()];
                for (y, &x) in f.img().iter().enumerate() {
                    img[perms[i + 1][y]] = perms[i][x];
                }
                FinMap::from_parts(f.src(), f.dst(), img)
            })
            .collect();
        Ok(FSimplex { card0: self.card0, maps })
    }

    /// The canonical representative of this string's isomorphism class.
    pub fn canonicalize(&self) -> CanonicalFSimplex {
        CanonicalFSimplex(canonical_form(self))
    }

    /// Strips bijective arrows. Returns the canonical nondegenerate core and
    /// the degeneracy indices which rebuild `self` (up to isomorphism) when
    /// applied in the listed order.
    pub fn core(&self) -> (CanonicalFSimplex, Vec<usize>) {
        let mut cur = self.clone();
        let mut removed = Vec::new();
        while let Some(i) = cur.maps.iter().rposition(FinMap::is_bijective) {
            // f_{i+1} is bijective; drop S_{i+1} by composing it away.
            let k = i + 1;
            cur = cur.face(k).expect("face index in range");
            removed.push(i);
        }
        removed.reverse();
        (cur.canonicalize(), removed)
    }

    /// Canonical nondegenerate core, without the degeneracy record.
    pub fn core_simplex(&self) -> CanonicalFSimplex {
        self.core().0
    }

    /// The flat sequence `card0 ∥ img(f_1) ∥ ⋯ ∥ img(f_t)`.
    pub fn flat(&self) -> Vec<usize> {
        let mut out = vec![self.card0];
        for f in &self.maps {
            out.extend_from_slice(f.img());
        }
        out
    }
}

impl Ord for FSimplex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.card0.cmp(&other.card0))
            .then_with(|| self.maps.cmp(&other.maps))
    }
}

impl PartialOrd for FSimplex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FSimplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.card0)?;
        for m in &self.maps {
            write!(f, " ← {}", m)?;
        }
        write!(f, "]")
    }
}

impl CanonicalFSimplex {
    pub fn as_simplex(&self) -> &FSimplex {
        &self.0
    }

    pub fn into_simplex(self) -> FSimplex {
        self.0
    }
}

impl Deref for CanonicalFSimplex {
    type Target = FSimplex;

    fn deref(&self) -> &FSimplex {
        &self.0
    }
}

impl fmt::Display for CanonicalFSimplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Subtree signature: child counts of the node, then of its children, and so
/// on, one vector per level below it.
type Key = Vec<Vec<usize>>;

// Relabeling a string is relabeling a leveled forest whose roots are S_0 and
// whose parent pointers are the maps. With every level ordered by parent
// label, img(f_i) is the sorted run-length expansion of the child counts on
// level i-1, so minimizing the flat image sequence means maximizing the
// child-count sequence level by level. Subtrees occupy contiguous blocks on
// every level, so sorting siblings by descending signature achieves this.
fn canonical_form(z: &FSimplex) -> FSimplex {
    let t = z.degree();
    if t == 0 {
        return z.clone();
    }
    let cards = z.cards();
    let mut children: Vec<Vec<Vec<usize>>> = (0..t).map(|i| vec![Vec::new(); cards[i]]).collect();
    for (i, f) in z.maps.iter().enumerate() {
        for (y, &x) in f.img().iter().enumerate() {
            children[i][x].push(y);
        }
    }

    let mut keys: Vec<Vec<Key>> = vec![Vec::new(); t + 1];
    keys[t] = vec![Vec::new(); cards[t]];
    for level in (0..t).rev() {
        let mut level_keys = Vec::with_capacity(cards[level]);
        for x in 0..cards[level] {
            let kids = &mut children[level][x];
            let below = &keys[level + 1];
            kids.sort_by(|&a, &b| below[b].cmp(&below[a]));
            let depth = t - level;
            let mut key: Key = Vec::with_capacity(depth);
            key.push(vec![kids.len()]);
            for k in 0..depth - 1 {
                let mut row = Vec::new();
                for &c in kids.iter() {
                    row.extend_from_slice(&below[c][k]);
                }
                key.push(row);
            }
            level_keys.push(key);
        }
        keys[level] = level_keys;
    }

    let mut order: Vec<usize> = (0..cards[0]).collect();
    order.sort_by(|&a, &b| keys[0][b].cmp(&keys[0][a]));
    let mut maps = Vec::with_capacity(t);
    for level in 0..t {
        let mut next = Vec::with_capacity(cards[level + 1]);
        let mut img = Vec::with_capacity(cards[level + 1]);
        for (label, &x) in order.iter().enumerate() {
            for &c in &children[level][x] {
                next.push(c);
                img.push(label);
            }
        }
        maps.push(FinMap::from_parts(cards[level + 1], cards[level], img));
        order = next;
    }
    FSimplex { card0: z.card0, maps }
}

#[derive(Deserialize)]
struct RawFSimplex {
    card0: usize,
    maps: Vec<FinMap>,
}

impl<'de> Deserialize<'de> for FSimplex {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = RawFSimplex::deserialize(de)?;
        FSimplex::new(raw.card0, raw.maps).map_err(serde::de::Error::custom)
    }
}

impl Serialize for CanonicalFSimplex {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("CanonicalFSimplex", 3)?;
        st.serialize_field("card0", &self.0.card0)?;
        st.serialize_field("maps", &self.0.maps)?;
        st.serialize_field("canonical", &true)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for CanonicalFSimplex {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        Ok(FSimplex::deserialize(de)?.canonicalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(src: usize, dst: usize, img: &[usize]) -> FinMap {
        FinMap::new(src, dst, img.to_vec()).unwrap()
    }

    fn string(card0: usize, maps: &[(usize, usize, &[usize])]) -> FSimplex {
        FSimplex::new(card0, maps.iter().map(|&(s, d, i)| m(s, d, i)).collect()).unwrap()
    }

    /// Every permutation of `0..n`.
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    /// Lexicographic minimum of the flat sequence over every relabeling.
    fn brute_canonical(z: &FSimplex) -> Vec<usize> {
        let per_level: Vec<Vec<Vec<usize>>> = z.cards().into_iter().map(perms).collect();
        let mut idx = vec![0; per_level.len()];
        let mut best: Option<Vec<usize>> = None;
        loop {
            let choice: Vec<Vec<usize>> =
                idx.iter().zip(&per_level).map(|(&k, ps)| ps[k].clone()).collect();
            let flat = z.relabel(&choice).unwrap().flat();
            if best.as_ref().map_or(true, |b| flat < *b) {
                best = Some(flat);
            }
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    return best.unwrap();
                }
                idx[pos] += 1;
                if idx[pos] < per_level[pos].len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    fn all_strings(max_card: usize, degree: usize) -> Vec<FSimplex> {
        let mut level: Vec<FSimplex> = (0..=max_card).map(FSimplex::point).collect();
        let mut out = level.clone();
        for _ in 0..degree {
            let mut next = Vec::new();
            for z in &level {
                let top = z.card(z.degree());
                for n in 0..=max_card {
                    for f in FinMap::all(n, top) {
                        let mut maps = z.maps().to_vec();
                        maps.push(f);
                        next.push(FSimplex::new(z.card0(), maps).unwrap());
                    }
                }
            }
            out.extend(next.iter().cloned());
            level = next;
        }
        out
    }

    #[test]
    fn face_examples() {
        let z = string(2, &[(1, 2, &[1]), (2, 1, &[0, 0])]);
        assert_eq!(z.face(1).unwrap(), string(2, &[(2, 2, &[1, 1])]));
        assert_eq!(z.face(0).unwrap(), string(1, &[(2, 1, &[0, 0])]));
        assert_eq!(z.face(2).unwrap(), string(2, &[(1, 2, &[1])]));

        let e = string(3, &[(2, 3, &[0, 2])]);
        assert_eq!(e.face(0).unwrap(), FSimplex::point(2));
        assert_eq!(e.face(1).unwrap(), FSimplex::point(3));
    }

    #[test]
    fn face_and_degeneracy_index_errors() {
        assert_eq!(
            FSimplex::point(2).face(0),
            Err(Error::IndexOutOfRange { index: 0, degree: 0 })
        );
        let e = string(3, &[(2, 3, &[0, 2])]);
        assert!(e.face(2).is_err());
        assert!(e.degeneracy(2).is_err());
    }

    #[test]
    fn degeneracy_examples() {
        let p = FSimplex::point(3);
        assert_eq!(p.degeneracy(0).unwrap(), string(3, &[(3, 3, &[0, 1, 2])]));
        for z in all_strings(2, 2) {
            for i in 0..=z.degree() {
                assert!(!z.degeneracy(i).unwrap().is_nondegenerate());
            }
        }
    }

    #[test]
    fn simplicial_identities_exhaustive() {
        for z in all_strings(2, 4).into_iter().filter(|z| z.degree() <= 4) {
            let n = z.degree();
            // d_i d_j = d_{j-1} d_i for i < j
            if n >= 2 {
                for j in 0..=n {
                    for i in 0..j {
                        let lhs = z.face(j).unwrap().face(i).unwrap();
                        let rhs = z.face(i).unwrap().face(j - 1).unwrap();
                        assert_eq!(lhs, rhs, "{z} i={i} j={j}");
                    }
                }
            }
            for j in 0..=n {
                let sj = z.degeneracy(j).unwrap();
                // s_i s_j = s_{j+1} s_i for i <= j
                for i in 0..=j {
                    let lhs = sj.degeneracy(i).unwrap();
                    let rhs = z.degeneracy(i).unwrap().degeneracy(j + 1).unwrap();
                    assert_eq!(lhs, rhs);
                }
                // d_i s_j
                for i in 0..=n + 1 {
                    let lhs = sj.face(i).unwrap();
                    if i < j {
                        if n == 0 {
                            continue;
                        }
                        let rhs = z.face(i).unwrap().degeneracy(j - 1).unwrap();
                        assert_eq!(lhs, rhs);
                    } else if i == j || i == j + 1 {
                        assert_eq!(lhs, z);
                    } else {
                        let rhs = z.face(i - 1).unwrap().degeneracy(j).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_form_is_lexicographic_minimum() {
        for z in all_strings(3, 2) {
            assert_eq!(z.canonicalize().flat(), brute_canonical(&z), "{z}");
        }
        for z in all_strings(2, 4) {
            assert_eq!(z.canonicalize().flat(), brute_canonical(&z), "{z}");
        }
    }

    #[test]
    fn canonicalize_is_idempotent() {
        for z in all_strings(2, 3) {
            let c = z.canonicalize();
            assert_eq!(c.as_simplex().canonicalize(), c);
        }
    }

    #[test]
    fn canonical_distinguishes_shapes() {
        let a = string(2, &[(2, 2, &[0, 0])]);
        let b = string(2, &[(2, 2, &[0, 1])]);
        assert_ne!(a.canonicalize(), b.canonicalize());
        let swapped = string(2, &[(2, 2, &[1, 0])]);
        assert_eq!(swapped.canonicalize(), b.canonicalize());
    }

    #[test]
    fn defect_examples() {
        assert_eq!(FSimplex::point(3).defect(), 3);
        // proper surjection S_1 → S_0 followed (upwards) by a proper injection S_2 → S_1
        let z = string(2, &[(4, 2, &[0, 1, 1, 0]), (3, 4, &[0, 1, 3])]);
        assert_eq!(z.defect(), 4);
        assert_eq!(z.defect(), z.card(1));
    }

    #[test]
    fn defect_for_surjections_above_injections_follows_the_formula() {
        // f_1 injective, f_2 surjective: the defect is |S_0| + |S_2| − |S_1|,
        // not |S_0| + |S_2|.
        let z = string(3, &[(2, 3, &[0, 2]), (4, 2, &[0, 0, 1, 1])]);
        assert_eq!(z.defect(), 3 + 4 - 2);
        assert_ne!(z.defect(), 3 + 4);
    }

    #[test]
    fn core_examples() {
        let z = string(3, &[(2, 3, &[0, 2]), (4, 2, &[0, 0, 1, 1])]);
        assert_eq!(z.core(), (z.canonicalize(), vec![]));
        for i in 0..=z.degree() {
            assert_eq!(z.degeneracy(i).unwrap().core().0, z.canonicalize());
        }
        let twisted = string(2, &[(2, 2, &[1, 0]), (3, 2, &[0, 0, 1])]);
        let (c, degs) = twisted.core();
        assert_eq!(degs, vec![0]);
        assert_eq!(c.degree(), 1);
        assert!(c.is_nondegenerate());
    }

    #[test]
    fn saturate_examples() {
        let bij = string(2, &[(2, 2, &[1, 0])]);
        let e = bij.saturate().unwrap();
        assert_eq!(e.degree(), 2);
        assert_eq!(e.core().0, FSimplex::point(2).canonicalize());

        let epi = string(2, &[(3, 2, &[0, 1, 1])]);
        let e = epi.saturate().unwrap();
        assert!(e.maps()[0].is_bijective());
        assert_eq!(e.maps()[1], *epi.maps().first().unwrap());
        assert_eq!(e.defect(), epi.defect());
        assert!(FSimplex::point(1).saturate().is_err());
    }

    #[test]
    fn defect_lemmas_exhaustive_small() {
        for z in all_strings(2, 3) {
            let d = z.defect();
            assert!(d >= z.max_card());
            for i in 0..=z.degree() {
                if z.degree() > 0 {
                    assert!(z.face(i).unwrap().defect() <= d);
                }
                assert_eq!(z.degeneracy(i).unwrap().defect(), d);
            }
            if z.degree() > 0 {
                assert_eq!(z.saturate().unwrap().defect(), d);
            }
        }
    }

    #[test]
    fn relabel_rejects_non_permutations() {
        let z = string(2, &[(2, 2, &[0, 0])]);
        assert!(z.relabel(&[vec![0, 0], vec![0, 1]]).is_err());
        assert!(z.relabel(&[vec![0, 1]]).is_err());
    }

    #[test]
    fn json_shapes() {
        let z = string(2, &[(3, 2, &[0, 1, 1])]);
        let s = serde_json::to_string(&z).unwrap();
        assert_eq!(s, r#"{"card0":2,"maps":[{"src":3,"dst":2,"img":[0,1,1]}]}"#);
        let c = serde_json::to_string(&z.canonicalize()).unwrap();
        assert!(c.ends_with(r#","canonical":true}"#));
        let back: CanonicalFSimplex = serde_json::from_str(&c).unwrap();
        assert_eq!(back, z.canonicalize());
        let bad = r#"{"card0":3,"maps":[{"src":3,"dst":2,"img":[0,1,1]}]}"#;
        let err = serde_json::from_str::<FSimplex>(bad).unwrap_err().to_string();
        assert!(err.contains("maps[0].dst"), "{err}");
    }
}
