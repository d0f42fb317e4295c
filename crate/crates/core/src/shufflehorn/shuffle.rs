use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// One step of a lattice path in `[r] × [s]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    /// `+(1, 0)`
    H,
    /// `+(0, 1)`
    V,
}

/// An `(r, s)`-shuffle: a monotone lattice path from `(0, 0)` to `(r, s)`,
/// i.e. an order-preserving injection `[r+s] → [r] × [s]`.
///
/// The derived order compares move words lexicographically with `H < V`,
/// which is a linear extension of the shuffle poset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shuffle {
    r: usize,
    s: usize,
    moves: Vec<Move>,
}

impl Shuffle {
    pub fn from_moves(moves: Vec<Move>) -> Self {
        let r = moves.iter().filter(|&&m| m == Move::H).count();
        Shuffle { r, s: moves.len() - r, moves }
    }

    /// The bottom path `H^r V^s`.
    pub fn minimal(r: usize, s: usize) -> Self {
        let mut moves = vec![Move::H; r];
        moves.extend(std::iter::repeat(Move::V).take(s));
        Shuffle { r, s, moves }
    }

    /// The top path `V^s H^r`.
    pub fn maximal(r: usize, s: usize) -> Self {
        let mut moves = vec![Move::V; s];
        moves.extend(std::iter::repeat(Move::H).take(r));
        Shuffle { r, s, moves }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.r + self.s
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    /// The vertices `σ(0), …, σ(r+s)`.
    pub fn points(&self) -> Vec<(usize, usize)> {
        let mut p = (0, 0);
        let mut out = Vec::with_capacity(self.moves.len() + 1);
        out.push(p);
        for m in &self.moves {
            match m {
                Move::H => p.0 += 1,
                Move::V => p.1 += 1,
            }
            out.push(p);
        }
        out
    }

    /// Second coordinates of the vertices.
    pub fn heights(&self) -> Vec<usize> {
        self.points().into_iter().map(|(_, j)| j).collect()
    }

    /// Poset order: pointwise comparison of heights.
    pub fn poset_le(&self, other: &Shuffle) -> bool {
        self.r == other.r
            && self.s == other.s
            && self.heights().iter().zip(other.heights()).all(|(a, b)| *a <= b)
    }

    pub fn poset_lt(&self, other: &Shuffle) -> bool {
        self != other && self.poset_le(other)
    }

    pub fn is_minimal(&self) -> bool {
        *self == Shuffle::minimal(self.r, self.s)
    }

    pub fn is_maximal(&self) -> bool {
        *self == Shuffle::maximal(self.r, self.s)
    }

    /// Chain of the face spanned by the vertex indices in `t` (sorted).
    pub fn face_chain(&self, t: &[usize]) -> Vec<(usize, usize)> {
        let pts = self.points();
        t.iter().map(|&k| pts[k]).collect()
    }

    /// Paths covering this one: one `HV` corner flipped to `VH`.
    pub fn covers(&self) -> Vec<Shuffle> {
        (0..self.moves.len().saturating_sub(1))
            .filter(|&k| self.moves[k] == Move::H && self.moves[k + 1] == Move::V)
            .map(|k| {
                let mut moves = self.moves.clone();
                moves.swap(k, k + 1);
                Shuffle { r: self.r, s: self.s, moves }
            })
            .collect()
    }
}

/// All `(r, s)`-shuffles, ordered lexicographically with `H < V`; the first is
/// the minimal path and the last the maximal one.
pub fn enumerate_shuffles(r: usize, s: usize) -> Vec<Shuffle> {
    fn go(h: usize, v: usize, word: &mut Vec<Move>, out: &mut Vec<Shuffle>) {
        if h == 0 && v == 0 {
            out.push(Shuffle::from_moves(word.clone()));
            return;
        }
        if h > 0 {
            word.push(Move::H);
            go(h - 1, v, word, out);
            word.pop();
        }
        if v > 0 {
            word.push(Move::V);
            go(h, v - 1, word, out);
            word.pop();
        }
    }
    let mut out = Vec::new();
    go(r, s, &mut Vec::with_capacity(r + s), &mut out);
    out
}

/// True when `order` lists every shuffle of one shape exactly once and
/// `σ_i < σ_j` only if `i < j`.
pub fn is_linear_extension(order: &[Shuffle]) -> bool {
    let Some(first) = order.first() else {
        return false;
    };
    let mut expected = enumerate_shuffles(first.r, first.s);
    let mut given = order.to_vec();
    expected.sort();
    given.sort();
    if expected != given {
        return false;
    }
    order
        .iter()
        .enumerate()
        .all(|(i, a)| order[..i].iter().all(|b| !a.poset_lt(b)))
}

/// Hasse diagram of the shuffle poset as Graphviz DOT, nodes labeled by move
/// words, edges from each shuffle to the ones covering it.
pub fn shuffle_poset_dot(r: usize, s: usize) -> String {
    let all = enumerate_shuffles(r, s);
    let mut out = format!("digraph shuffles_{r}_{s} {{\n  rankdir=BT;\n");
    for sh in &all {
        out.push_str(&format!("  \"{sh}\";\n"));
    }
    for sh in &all {
        for up in sh.covers() {
            out.push_str(&format!("  \"{sh}\" -> \"{up}\";\n"));
        }
    }
    out.push_str("}\n");
    out
}

impl fmt::Display for Shuffle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.moves {
            f.write_str(match m {
                Move::H => "H",
                Move::V => "V",
            })?;
        }
        Ok(())
    }
}

impl FromStr for Shuffle {
    type Err = Error;

    fn from_str(word: &str) -> Result<Self> {
        let moves = word
            .chars()
            .map(|c| match c {
                'H' => Ok(Move::H),
                'V' => Ok(Move::V),
                other => Err(Error::InvalidInput(format!(
                    "shuffle word contains {other:?}; expected only H and V"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Shuffle::from_moves(moves))
    }
}

impl Serialize for Shuffle {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Shuffle {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let word = String::deserialize(de)?;
        word.parse().map_err(serde::de::Error::custom)
    }
}
