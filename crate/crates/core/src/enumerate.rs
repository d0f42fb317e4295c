//! Enumeration of isomorphism classes of nondegenerate strings.
//!
//! Strings are grown one arrow at a time from the top end. Every predicate
//! handed to [`by_degree`] must be invariant under relabeling and closed under
//! dropping the last arrow, so that every accepted string is reached through
//! an accepted prefix.

use rayon::prelude::*;
use std::collections::HashSet;

use crate::error::{invariant, Result};
use crate::finmap::{classify, FinMap, MapClass};
use crate::fsimp::{CanonicalFSimplex, FSimplex};
use crate::SetConvention;

/// Nondegenerate canonical strings accepted by `accept`, grouped by degree.
///
/// Cardinalities range over `conv.min_card()..=max_card`. Growth stops when a
/// degree produces nothing or `max_degree` is reached.
pub fn by_degree<F>(
    conv: SetConvention,
    max_card: usize,
    max_degree: usize,
    accept: F,
) -> Vec<Vec<CanonicalFSimplex>>
where
    F: Fn(&FSimplex) -> bool + Sync,
{
    let min_card = conv.min_card();
    let mut level: Vec<CanonicalFSimplex> = (min_card..=max_card)
        .map(FSimplex::point)
        .filter(|z| accept(z))
        .map(|z| z.canonicalize())
        .collect();
    let mut out = Vec::new();
    while !level.is_empty() {
        let degree = out.len();
        out.push(level);
        if degree == max_degree {
            break;
        }
        level = extend(&out[degree], min_card, max_card, &accept);
    }
    out
}

fn extend<F>(
    level: &[CanonicalFSimplex],
    min_card: usize,
    max_card: usize,
    accept: &F,
) -> Vec<CanonicalFSimplex>
where
    F: Fn(&FSimplex) -> bool + Sync,
{
    let found = level
        .par_iter()
        .fold(HashSet::new, |mut acc, z| {
            let top = z.card(z.degree());
            let mut maps = z.maps().to_vec();
            for n in min_card..=max_card {
                for f in FinMap::all(n, top).filter(|f| !f.is_bijective()) {
                    maps.push(f);
                    let candidate = FSimplex::from_parts(z.card0(), maps.clone());
                    maps.pop();
                    if accept(&candidate) {
                        acc.insert(candidate.canonicalize());
                    }
                }
            }
            acc
        })
        .reduce(HashSet::new, |a, b| {
            let (mut big, small) = if a.len() < b.len() { (b, a) } else { (a, b) };
            big.extend(small);
            big
        });
    let mut sorted: Vec<_> = found.into_iter().collect();
    sorted.par_sort_unstable();
    sorted
}

/// Degree cap for strings of defect at most `alpha`.
///
/// Each non-injective arrow raises the defect by at least one, and a run of
/// proper injections strictly grows cardinality, so has length at most `alpha`.
pub fn defect_degree_bound(alpha: usize) -> usize {
    alpha * (alpha + 2)
}

/// All nondegenerate canonical strings of defect at most `alpha`, by degree.
pub fn defect_bounded(alpha: usize, conv: SetConvention) -> Result<Vec<Vec<CanonicalFSimplex>>> {
    let cap = defect_degree_bound(alpha);
    let levels = by_degree(conv, alpha, cap + 1, |z| z.defect() <= alpha);
    invariant!(
        levels.len() <= cap + 1,
        "strings of defect <= {alpha} reach degree {}, past the bound {cap}",
        levels.len() - 1
    );
    Ok(levels)
}

/// All nondegenerate canonical strings with every cardinality at most
/// `max_card` and degree at most `max_degree`.
pub fn card_bounded(max_card: usize, max_degree: usize, conv: SetConvention) -> Vec<Vec<CanonicalFSimplex>> {
    by_degree(conv, max_card, max_degree, |_| true)
}

/// Classes allowed by the corner pattern: proper surjections, then proper
/// injections.
fn is_corner_pattern(classes: &[MapClass]) -> bool {
    let surj = classes
        .iter()
        .take_while(|&&c| c == MapClass::ProperSurjective)
        .count();
    classes[surj..].iter().all(|&c| c == MapClass::ProperInjective)
}

/// Top simplices of nondegenerate corner data whose largest set has at most
/// `alpha` elements, as `(r, s, string)` with `s` surjections followed by `r`
/// injections.
pub fn corner_strings(alpha: usize, conv: SetConvention) -> Vec<(usize, usize, CanonicalFSimplex)> {
    let levels = by_degree(conv, alpha, usize::MAX, |z| is_corner_pattern(&z.classes()));
    levels
        .into_iter()
        .flatten()
        .map(|y| {
            let s = y
                .classes()
                .iter()
                .take_while(|&&c| c == MapClass::ProperSurjective)
                .count();
            (y.degree() - s, s, y)
        })
        .collect()
}

/// Strings whose arrows alternate proper injection (odd positions) and
/// proper surjection (even positions), of even degree at most `2 * max_steps`.
pub fn staircases(max_card: usize, max_steps: usize, conv: SetConvention) -> Vec<CanonicalFSimplex> {
    let levels = by_degree(conv, max_card, 2 * max_steps, |z| is_staircase_pattern(z));
    levels
        .into_iter()
        .enumerate()
        .filter(|(d, _)| d % 2 == 0)
        .flat_map(|(_, l)| l)
        .collect()
}

pub(crate) fn is_staircase_pattern(z: &FSimplex) -> bool {
    z.maps().iter().enumerate().all(|(k, f)| {
        let want = if k % 2 == 0 {
            MapClass::ProperInjective
        } else {
            MapClass::ProperSurjective
        };
        classify(f) == want
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_one_without_empty_set_is_a_single_point() {
        let levels = defect_bounded(1, SetConvention::NonEmpty).unwrap();
        assert_eq!(levels.len(), 1);
        assert_eq!(levels[0], vec![FSimplex::point(1).canonicalize()]);
    }

    #[test]
    fn alpha_one_with_empty_set() {
        let levels = defect_bounded(1, SetConvention::AllowEmpty).unwrap();
        let all: Vec<_> = levels.into_iter().flatten().collect();
        let edge = FSimplex::edge(FinMap::new(0, 1, vec![]).unwrap()).canonicalize();
        assert_eq!(
            all,
            vec![
                FSimplex::point(0).canonicalize(),
                FSimplex::point(1).canonicalize(),
                edge
            ]
        );
    }

    #[test]
    fn enumeration_matches_raw_dedup() {
        // Raw enumeration of every string, reduced by canonical form.
        let mut raw: HashSet<CanonicalFSimplex> = HashSet::new();
        let mut level = vec![FSimplex::point(1), FSimplex::point(2)];
        for _ in 0..3 {
            let mut next = Vec::new();
            for z in &level {
                raw.insert(z.canonicalize());
                for n in 1..=2 {
                    for f in FinMap::all(n, z.card(z.degree())) {
                        if f.is_bijective() {
                            continue;
                        }
                        let mut maps = z.maps().to_vec();
                        maps.push(f);
                        next.push(FSimplex::new(z.card0(), maps).unwrap());
                    }
                }
            }
            level = next;
        }
        for z in &level {
            raw.insert(z.canonicalize());
        }
        let got: HashSet<_> = card_bounded(2, 3, SetConvention::NonEmpty)
            .into_iter()
            .flatten()
            .collect();
        assert_eq!(got, raw);
    }

    #[test]
    fn corner_strings_have_the_pattern() {
        for (r, s, y) in corner_strings(3, SetConvention::AllowEmpty) {
            assert_eq!(r + s, y.degree());
            assert!(y.max_card() <= 3);
            assert_eq!(y.max_card(), y.card(s));
        }
    }
}
