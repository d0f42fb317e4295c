use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::collections::BTreeSet;

use super::shuffle::{enumerate_shuffles, Move, Shuffle};
use crate::error::{invariant, Error, Result};

/// A vertex of the grid `[r] × [s]`.
pub type Vertex = (usize, usize);

/// A subchain-closed set of strictly increasing chains in `[r] × [s]`, that is
/// a simplicial subset of `Δ[r] × Δ[s]` listed by its nondegenerate simplices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductSubset {
    r: usize,
    s: usize,
    chains: BTreeSet<Vec<Vertex>>,
}

impl ProductSubset {
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn contains(&self, chain: &[Vertex]) -> bool {
        self.chains.contains(chain)
    }

    pub fn len(&self) -> usize {
        self.chains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<Vertex>> {
        self.chains.iter()
    }

    pub fn is_subset(&self, other: &ProductSubset) -> bool {
        self.chains.is_subset(&other.chains)
    }

    /// Every nonempty subchain of a member is a member.
    pub fn is_subchain_closed(&self) -> bool {
        self.chains.iter().all(|c| {
            (0..c.len()).filter(|_| c.len() > 1).all(|k| {
                let mut sub = c.clone();
                sub.remove(k);
                self.chains.contains(&sub)
            })
        })
    }
}

/// A chain lies in `∂(Δ[r] × Δ[s])` when it misses a row or a column.
pub fn in_boundary(r: usize, s: usize, chain: &[Vertex]) -> bool {
    let mut rows = vec![false; r + 1];
    let mut cols = vec![false; s + 1];
    for &(i, j) in chain {
        rows[i] = true;
        cols[j] = true;
    }
    rows.contains(&false) || cols.contains(&false)
}

fn is_subchain(small: &[Vertex], big: &[Vertex]) -> bool {
    let mut it = big.iter();
    small.iter().all(|v| it.any(|w| w == v))
}

/// Membership in `A^σ` without materializing it.
pub fn in_a(sigma: &Shuffle, chain: &[Vertex]) -> bool {
    let (r, s) = (sigma.r(), sigma.s());
    in_boundary(r, s, chain)
        || enumerate_shuffles(r, s)
            .iter()
            .filter(|tau| tau.poset_lt(sigma))
            .any(|tau| is_subchain(chain, &tau.points()))
}

/// Nonempty index sets `T ⊆ [n]`, as sorted vectors, ordered by bitmask.
fn nonempty_subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u64..(1u64 << (n + 1))).map(move |mask| (0..=n).filter(|&k| mask >> k & 1 == 1).collect())
}

/// `A^σ`: the smallest subset containing the boundary and the top simplices of
/// all shuffles strictly below `σ`.
pub fn build_a(sigma: &Shuffle) -> ProductSubset {
    let (r, s) = (sigma.r(), sigma.s());
    let mut chains = BTreeSet::new();
    for tau in enumerate_shuffles(r, s) {
        let pts = tau.points();
        for t in nonempty_subsets(r + s) {
            let chain: Vec<Vertex> = t.iter().map(|&k| pts[k]).collect();
            if !chains.contains(&chain) && in_a(sigma, &chain) {
                chains.insert(chain);
            }
        }
    }
    ProductSubset { r, s, chains }
}

/// The faces `T ⊆ [r+s]` of `Δ[r+s]_σ` lying in `A^σ`.
pub fn faces_in_a(sigma: &Shuffle) -> BTreeSet<Vec<usize>> {
    nonempty_subsets(sigma.dim())
        .filter(|t| in_a(sigma, &sigma.face_chain(t)))
        .collect()
}

/// The faces of `Δ[r+s]_σ` outside `A^σ`, including the top face.
pub fn excluded_faces(sigma: &Shuffle) -> Vec<Vec<usize>> {
    nonempty_subsets(sigma.dim())
        .filter(|t| !in_a(sigma, &sigma.face_chain(t)))
        .collect()
}

/// Closed-form description of the excluded faces: `T` contains both ends, and
/// every omitted vertex `x` sits at an `HV` corner of `σ` with both
/// neighbours kept.
pub fn excluded_by_corners(sigma: &Shuffle, t: &[usize]) -> bool {
    let n = sigma.dim();
    let moves = sigma.moves();
    if t.first() != Some(&0) || t.last() != Some(&n) {
        return false;
    }
    (1..n).filter(|x| t.binary_search(x).is_err()).all(|x| {
        t.binary_search(&(x - 1)).is_ok()
            && t.binary_search(&(x + 1)).is_ok()
            && moves[x - 1] == Move::H
            && moves[x] == Move::V
    })
}

/// How `A^σ` meets the simplex `Δ[r+s]_σ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HornKind {
    /// A generalized horn `Λ^S[r+s]` with `S` not an interval.
    Inner(Vec<usize>),
    /// The whole boundary `∂Δ[r+s]`.
    BoundarySphere,
}

/// Checked description of `𝓑 = A^σ ∩ Δ[r+s]_σ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HornCertificate {
    pub sigma: Shuffle,
    pub kind: HornKind,
    /// Maximal members of `𝓑`, as vertex index sets.
    pub facets: Vec<Vec<usize>>,
}

impl HornCertificate {
    /// The index set `S` of the codimension-one faces in `𝓑`.
    pub fn index_set(&self) -> Vec<usize> {
        match &self.kind {
            HornKind::Inner(s) => s.clone(),
            HornKind::BoundarySphere => (0..=self.sigma.dim()).collect(),
        }
    }
}

impl Serialize for HornCertificate {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("HornCertificate", 4)?;
        st.serialize_field("sigma", &self.sigma)?;
        st.serialize_field(
            "kind",
            match self.kind {
                HornKind::Inner(_) => "inner",
                HornKind::BoundarySphere => "boundary",
            },
        )?;
        st.serialize_field("S", &self.index_set())?;
        st.serialize_field("facets", &self.facets)?;
        st.end()
    }
}

/// `S ⊆ [n]` is not an interval. Rejects `S = [n]` and out-of-range entries.
pub fn is_inner_generalized_horn(s: &[usize], n: usize) -> Result<bool> {
    let set: BTreeSet<usize> = s.iter().copied().collect();
    if let Some(&bad) = set.iter().find(|&&k| k > n) {
        return Err(Error::InvalidInput(format!("index {bad} is outside [0, {n}]")));
    }
    if set.len() == n + 1 {
        return Err(Error::InvalidInput(format!(
            "S is all of [0, {n}], which gives the boundary rather than a horn"
        )));
    }
    Ok(match (set.first(), set.last()) {
        (Some(&lo), Some(&hi)) => (lo..=hi).any(|k| !set.contains(&k)),
        _ => false,
    })
}

/// Computes `𝓑` for `σ` and checks that it is an inner generalized horn (for
/// non-maximal `σ`) or the boundary sphere (for the maximal one).
pub fn horn_certificate(sigma: &Shuffle) -> Result<HornCertificate> {
    let n = sigma.dim();
    let b = faces_in_a(sigma);
    let full: Vec<usize> = (0..=n).collect();
    invariant!(!b.contains(&full), "{sigma} lies in its own A^σ");
    if n == 0 {
        return Ok(HornCertificate { sigma: sigma.clone(), kind: HornKind::BoundarySphere, facets: Vec::new() });
    }

    let facets: Vec<Vec<usize>> = b
        .iter()
        .filter(|t| !b.iter().any(|u| u.len() > t.len() && is_subchain_idx(t, u)))
        .cloned()
        .collect();
    invariant!(
        facets.iter().all(|t| t.len() == n),
        "{sigma}: 𝓑 has a maximal face of dimension other than {}",
        n.saturating_sub(1)
    );
    let s_set: Vec<usize> = (0..=n)
        .filter(|&i| b.contains(&full.iter().copied().filter(|&k| k != i).collect::<Vec<_>>()))
        .collect();
    let generated: BTreeSet<Vec<usize>> = nonempty_subsets(n)
        .filter(|t| s_set.iter().any(|i| !t.contains(i)))
        .collect();
    invariant!(
        generated == b,
        "{sigma}: 𝓑 is not the union of its codimension-one faces"
    );

    let kind = if sigma.is_maximal() {
        invariant!(
            s_set.len() == n + 1,
            "{sigma} is maximal but 𝓑 misses the faces outside {s_set:?}"
        );
        HornKind::BoundarySphere
    } else {
        invariant!(
            is_inner_generalized_horn(&s_set, n)?,
            "{sigma}: S = {s_set:?} is an interval"
        );
        HornKind::Inner(s_set)
    };
    Ok(HornCertificate { sigma: sigma.clone(), kind, facets })
}

fn is_subchain_idx(small: &[usize], big: &[usize]) -> bool {
    small.iter().all(|k| big.binary_search(k).is_ok())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sh(w: &str) -> Shuffle {
        w.parse().unwrap()
    }

    #[test]
    fn minimal_shuffle_sees_only_the_boundary() {
        for (r, s) in [(1, 1), (2, 1), (2, 2), (1, 3)] {
            let a = build_a(&Shuffle::minimal(r, s));
            assert!(a.iter().all(|c| in_boundary(r, s, c)));
            assert!(a.is_subchain_closed());
        }
    }

    #[test]
    fn one_by_one_maximal_adds_the_lower_triangle() {
        let a = build_a(&sh("VH"));
        assert!(a.contains(&[(0, 0), (1, 0), (1, 1)]));
        assert!(a.contains(&[(0, 0), (1, 1)]));
        assert!(!a.contains(&[(0, 0), (0, 1), (1, 1)]));
        // 4 vertices, 5 edges, 1 triangle
        assert_eq!(a.len(), 10);
    }

    #[test]
    fn a_is_monotone() {
        for n in 2..=6 {
            for r in 1..n {
                let all = enumerate_shuffles(r, n - r);
                let built: Vec<_> = all.iter().map(build_a).collect();
                for (i, x) in all.iter().enumerate() {
                    for (j, y) in all.iter().enumerate() {
                        if x.poset_lt(y) {
                            assert!(built[i].is_subset(&built[j]));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn one_by_one_certificates() {
        let low = horn_certificate(&sh("HV")).unwrap();
        assert_eq!(low.kind, HornKind::Inner(vec![0, 2]));
        let high = horn_certificate(&sh("VH")).unwrap();
        assert_eq!(high.kind, HornKind::BoundarySphere);
        assert_eq!(high.facets.len(), 3);
    }

    #[test]
    fn horn_sweep() {
        for n in 2..=6 {
            for r in 1..n {
                for sigma in enumerate_shuffles(r, n - r) {
                    let cert = horn_certificate(&sigma).unwrap();
                    assert_eq!(
                        cert.kind == HornKind::BoundarySphere,
                        sigma.is_maximal()
                    );
                    let s = cert.index_set();
                    assert!(s.contains(&0) && s.contains(&n));
                }
            }
        }
    }

    #[test]
    fn degenerate_shapes_give_spheres() {
        assert_eq!(horn_certificate(&Shuffle::minimal(3, 0)).unwrap().kind, HornKind::BoundarySphere);
        assert_eq!(horn_certificate(&Shuffle::minimal(0, 2)).unwrap().kind, HornKind::BoundarySphere);
    }

    #[test]
    fn corner_rule_describes_excluded_faces() {
        for n in 1..=7 {
            for r in 0..=n {
                for sigma in enumerate_shuffles(r, n - r) {
                    let excluded = excluded_faces(&sigma);
                    let by_rule: Vec<Vec<usize>> = nonempty_subsets(n)
                        .filter(|t| excluded_by_corners(&sigma, t))
                        .collect();
                    assert_eq!(excluded, by_rule, "{sigma}");
                }
            }
        }
    }

    #[test]
    fn inner_horn_predicate() {
        assert!(is_inner_generalized_horn(&[0, 2], 2).unwrap());
        assert!(!is_inner_generalized_horn(&[0, 1], 2).unwrap());
        assert!(!is_inner_generalized_horn(&[1], 3).unwrap());
        assert!(is_inner_generalized_horn(&[0, 3], 3).unwrap());
        assert!(is_inner_generalized_horn(&[0, 1, 2], 2).is_err());
        assert!(is_inner_generalized_horn(&[4], 3).is_err());
    }

    #[test]
    fn certificate_json() {
        let v = serde_json::to_value(horn_certificate(&sh("HV")).unwrap()).unwrap();
        assert_eq!(v["kind"], "inner");
        assert_eq!(v["S"], serde_json::json!([0, 2]));
        assert_eq!(v["sigma"], "HV");
    }
}
