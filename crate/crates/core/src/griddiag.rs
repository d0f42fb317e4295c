//! Grid diagrams: commuting `(r+1) × (s+1)` arrays of finite sets with
//! injective rows and surjective columns, and the subsets of strings they
//! generate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::enumerate::{corner_strings, defect_bounded, is_staircase_pattern};
use crate::error::{invariant, Error, Result};
use crate::finmap::{classify, compose, FinMap, MapClass};
use crate::fsimp::{CanonicalFSimplex, FSimplex};
use crate::shufflehorn::{enumerate_shuffles, Move, Shuffle, Vertex};
use crate::subset::FSubset;
use crate::SetConvention;

/// A grid diagram with sets `S_{i,j}` for `0 ≤ i ≤ r`, `0 ≤ j ≤ s`.
///
/// `horiz[i][j]: S_{i+1,j} → S_{i,j}` is injective and
/// `vert[i][j]: S_{i,j+1} → S_{i,j}` is surjective; all squares commute.
/// The largest set is `S_{0,s}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridDiagram {
    r: usize,
    s: usize,
    cards: Vec<Vec<usize>>,
    horiz: Vec<Vec<FinMap>>,
    vert: Vec<Vec<FinMap>>,
}

#[derive(Deserialize)]
struct RawGrid {
    r: usize,
    s: usize,
    cards: Vec<Vec<usize>>,
    horiz: Vec<Vec<FinMap>>,
    vert: Vec<Vec<FinMap>>,
}

impl<'de> Deserialize<'de> for GridDiagram {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = RawGrid::deserialize(de)?;
        GridDiagram::new(raw.r, raw.s, raw.cards, raw.horiz, raw.vert).map_err(serde::de::Error::custom)
    }
}

impl GridDiagram {
    pub fn new(
        r: usize,
        s: usize,
        cards: Vec<Vec<usize>>,
        horiz: Vec<Vec<FinMap>>,
        vert: Vec<Vec<FinMap>>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if cards.len() != r + 1 || cards.iter().any(|row| row.len() != s + 1) {
            return bad(format!("cards must be a {}×{} array", r + 1, s + 1));
        }
        if horiz.len() != r || horiz.iter().any(|row| row.len() != s + 1) {
            return bad(format!("horiz must be a {r}×{} array", s + 1));
        }
        if vert.len() != r + 1 || vert.iter().any(|row| row.len() != s) {
            return bad(format!("vert must be a {}×{s} array", r + 1));
        }
        for i in 0..r {
            for j in 0..=s {
                let f = &horiz[i][j];
                if (f.src(), f.dst()) != (cards[i + 1][j], cards[i][j]) {
                    return bad(format!("horiz[{i}][{j}] has the wrong source or target"));
                }
                if !f.is_injective() {
                    return bad(format!("horiz[{i}][{j}] is not injective"));
                }
            }
        }
        for i in 0..=r {
            for j in 0..s {
                let f = &vert[i][j];
                if (f.src(), f.dst()) != (cards[i][j + 1], cards[i][j]) {
                    return bad(format!("vert[{i}][{j}] has the wrong source or target"));
                }
                if !f.is_surjective() {
                    return bad(format!("vert[{i}][{j}] is not surjective"));
                }
            }
        }
        for i in 0..r {
            for j in 0..s {
                let down_then_left = compose(&horiz[i][j], &vert[i + 1][j])?;
                let left_then_down = compose(&vert[i][j], &horiz[i][j + 1])?;
                if down_then_left != left_then_down {
                    return bad(format!("the square with corner ({i},{j}) does not commute"));
                }
            }
        }
        Ok(GridDiagram { r, s, cards, horiz, vert })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn card(&self, i: usize, j: usize) -> usize {
        self.cards[i][j]
    }

    pub fn cards(&self) -> &[Vec<usize>] {
        &self.cards
    }

    pub fn horiz(&self, i: usize, j: usize) -> &FinMap {
        &self.horiz[i][j]
    }

    pub fn vert(&self, i: usize, j: usize) -> &FinMap {
        &self.vert[i][j]
    }

    /// The map `S_{b} → S_{a}` for `a ≤ b` componentwise.
    pub fn map_between(&self, a: Vertex, b: Vertex) -> Result<FinMap> {
        if a.0 > b.0 || a.1 > b.1 || b.0 > self.r || b.1 > self.s {
            return Err(Error::InvalidInput(format!(
                "no map from {b:?} to {a:?} in a {}×{} grid",
                self.r, self.s
            )));
        }
        let mut f = FinMap::identity(self.cards[b.0][b.1]);
        for j in (a.1..b.1).rev() {
            f = compose(&self.vert[b.0][j], &f)?;
        }
        for i in (a.0..b.0).rev() {
            f = compose(&self.horiz[i][a.1], &f)?;
        }
        Ok(f)
    }

    /// The string read off along a weakly monotone path of vertices.
    pub fn restrict(&self, path: &[Vertex]) -> Result<FSimplex> {
        let Some(&first) = path.first() else {
            return Err(Error::InvalidInput("path is empty".into()));
        };
        if first.0 > self.r || first.1 > self.s {
            return Err(Error::InvalidInput(format!("vertex {first:?} is outside the grid")));
        }
        let maps = path
            .windows(2)
            .map(|w| self.map_between(w[0], w[1]))
            .collect::<Result<Vec<_>>>()?;
        FSimplex::new(self.cards[first.0][first.1], maps)
    }

    /// The string along the path of a shuffle.
    pub fn restrict_shuffle(&self, sigma: &Shuffle) -> Result<FSimplex> {
        if (sigma.r(), sigma.s()) != (self.r, self.s) {
            return Err(Error::InvalidInput(format!(
                "a ({},{})-shuffle does not fit a {}×{} grid",
                sigma.r(),
                sigma.s(),
                self.r,
                self.s
            )));
        }
        self.restrict(&sigma.points())
    }

    /// The string along the top path: `s` surjections, then `r` injections.
    pub fn top_simplex(&self) -> FSimplex {
        self.restrict_shuffle(&Shuffle::maximal(self.r, self.s))
            .expect("top path fits the grid")
    }

    pub fn corner_data(&self) -> CornerData {
        CornerData {
            row: (0..self.r).map(|i| self.horiz[i][self.s].clone()).collect(),
            column: (0..self.s).map(|j| self.vert[0][j].clone()).collect(),
            corner: self.cards[0][self.s],
        }
    }

    /// Isomorphism class of the grid: its shape and the canonical top simplex.
    pub fn iso_class(&self) -> (usize, usize, CanonicalFSimplex) {
        (self.r, self.s, self.top_simplex().canonicalize())
    }

    /// No arrow of the corner data is bijective.
    pub fn is_reduced(&self) -> bool {
        self.top_simplex().is_nondegenerate()
    }
}

/// The top row and left column of a grid, meeting at the corner `S_{0,s}`.
///
/// `row[i]: S_{i+1,s} → S_{i,s}` are injective and
/// `column[j]: S_{0,j+1} → S_{0,j}` are surjective.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CornerData {
    pub row: Vec<FinMap>,
    pub column: Vec<FinMap>,
    pub corner: usize,
}

impl CornerData {
    /// Reads corner data off a string of `s` surjections followed by `r`
    /// injections.
    pub fn from_top_simplex(y: &FSimplex, r: usize, s: usize) -> Result<Self> {
        if y.degree() != r + s {
            return Err(Error::InvalidInput(format!(
                "a string of degree {} cannot carry {r} row and {s} column maps",
                y.degree()
            )));
        }
        let column = y.maps()[..s].to_vec();
        let row = y.maps()[s..].to_vec();
        let out = CornerData { row, column, corner: y.card(s) };
        out.validate()?;
        Ok(out)
    }

    pub fn top_simplex(&self) -> FSimplex {
        let card0 = self.column.first().map_or(self.corner, FinMap::dst);
        let maps = self.column.iter().chain(&self.row).cloned().collect();
        FSimplex::from_parts(card0, maps)
    }

    pub fn validate(&self) -> Result<()> {
        let mut below = self.corner;
        for (i, f) in self.row.iter().enumerate() {
            if f.dst() != below {
                return Err(Error::InvalidInput(format!("row[{i}] does not compose")));
            }
            if !f.is_injective() {
                return Err(Error::InvalidInput(format!("row[{i}] is not injective")));
            }
            below = f.src();
        }
        let mut above = self.corner;
        for j in (0..self.column.len()).rev() {
            let f = &self.column[j];
            if f.src() != above {
                return Err(Error::InvalidInput(format!("column[{j}] does not compose")));
            }
            if !f.is_surjective() {
                return Err(Error::InvalidInput(format!("column[{j}] is not surjective")));
            }
            above = f.dst();
        }
        Ok(())
    }
}

/// Fills the grid from its corner data: `S_{i,j}` is the image of `S_{i,s}`
/// in `S_{0,j}`, labeled by increasing value.
pub fn complete_from_corner(c: &CornerData) -> Result<GridDiagram> {
    c.validate()?;
    let (r, s) = (c.row.len(), c.column.len());
    // incl[i][x]: element x of S_{i,s} as an element of S_{0,s}
    let mut incl: Vec<Vec<usize>> = vec![(0..c.corner).collect()];
    for f in &c.row {
        let prev = incl.last().unwrap();
        incl.push(f.img().iter().map(|&x| prev[x]).collect());
    }
    // members[i][j]: S_{i,j} as a sorted subset of S_{0,j}
    let mut members = vec![vec![Vec::new(); s + 1]; r + 1];
    for i in 0..=r {
        members[i][s] = incl[i].clone();
        for j in (0..s).rev() {
            let mut img: Vec<usize> = members[i][j + 1].iter().map(|&x| c.column[j].apply(x)).collect();
            img.sort_unstable();
            img.dedup();
            members[i][j] = img;
        }
    }
    let index_in = |set: &[usize], x: usize| set.binary_search(&x).expect("member of the image");
    let cards: Vec<Vec<usize>> = (0..=r)
        .map(|i| (0..=s).map(|j| members[i][j].len()).collect())
        .collect();
    let horiz = (0..r)
        .map(|i| {
            (0..=s)
                .map(|j| {
                    if j == s {
                        c.row[i].clone()
                    } else {
                        let img = members[i + 1][j].iter().map(|&x| index_in(&members[i][j], x)).collect();
                        FinMap::from_parts(cards[i + 1][j], cards[i][j], img)
                    }
                })
                .collect()
        })
        .collect();
    let vert = (0..=r)
        .map(|i| {
            (0..s)
                .map(|j| {
                    let img = if j + 1 == s {
                        incl[i]
                            .iter()
                            .map(|&x| index_in(&members[i][j], c.column[j].apply(x)))
                            .collect()
                    } else {
                        members[i][j + 1]
                            .iter()
                            .map(|&x| index_in(&members[i][j], c.column[j].apply(x)))
                            .collect()
                    };
                    FinMap::from_parts(cards[i][j + 1], cards[i][j], img)
                })
                .collect()
        })
        .collect();
    GridDiagram::new(r, s, cards, horiz, vert)
}

/// Builds a `t × t` grid through a staircase string
/// `S_{0,0} ↩ S_{1,0} ↞ S_{1,1} ↩ ⋯ ↞ S_{t,t}` (odd positions proper
/// injections, even positions proper surjections) such that every shuffle
/// path reads off a string of the same defect.
pub fn complete_from_staircase(st: &FSimplex) -> Result<GridDiagram> {
    if st.degree() % 2 != 0 || !is_staircase_pattern(st) {
        return Err(Error::InvalidInput(
            "a staircase alternates proper injections and proper surjections, starting with an injection, with even length"
                .into(),
        ));
    }
    let t = st.degree() / 2;
    if t == 0 {
        return GridDiagram::new(0, 0, vec![vec![st.card0()]], Vec::new(), vec![Vec::new()]);
    }
    let mut cards = vec![vec![usize::MAX; t + 1]; t + 1];
    let mut horiz: Vec<Vec<Option<FinMap>>> = vec![vec![None; t + 1]; t];
    let mut vert: Vec<Vec<Option<FinMap>>> = vec![vec![None; t]; t + 1];

    // The staircase itself: (k,k) ← (k+1,k) ← (k+1,k+1).
    cards[0][0] = st.card0();
    for k in 0..t {
        let h = &st.maps()[2 * k];
        let v = &st.maps()[2 * k + 1];
        cards[k + 1][k] = h.src();
        cards[k + 1][k + 1] = v.src();
        horiz[k][k] = Some(h.clone());
        vert[k + 1][k] = Some(v.clone());
    }

    // Above the staircase (i < j), by increasing j − i: each square
    // (i,j−1) ← (i+1,j−1) ← (i+1,j) is completed by the pullback
    // S_{i,j} = S_{i+1,j} ⊔ (S_{i,j−1} ∖ im S_{i+1,j−1}).
    for d in 1..=t {
        for i in 0..=t - d {
            let j = i + d;
            let inc = horiz[i][j - 1].clone().expect("filled earlier");
            let q = vert[i + 1][j - 1].clone().expect("filled earlier");
            let top = q.src();
            let rest: Vec<usize> = (0..inc.dst()).filter(|x| !inc.img().contains(x)).collect();
            let n = top + rest.len();
            cards[i][j] = n;
            horiz[i][j] = Some(FinMap::from_parts(top, n, (0..top).collect()));
            let mut img: Vec<usize> = q.img().iter().map(|&x| inc.apply(x)).collect();
            img.extend(&rest);
            vert[i][j - 1] = Some(FinMap::from_parts(n, inc.dst(), img));
        }
    }

    // Below the staircase (i ≥ j + 2), by increasing i − j: S_{i,j} is the
    // image of S_{i,j+1} → S_{i−1,j+1} → S_{i−1,j}.
    for d in 2..=t {
        for j in 0..=t - d {
            let i = j + d;
            let through = compose(
                vert[i - 1][j].as_ref().expect("filled earlier"),
                horiz[i - 1][j + 1].as_ref().expect("filled earlier"),
            )?;
            let mut image = through.img().to_vec();
            image.sort_unstable();
            image.dedup();
            let pos = |x: usize| image.binary_search(&x).expect("in image");
            cards[i][j] = image.len();
            vert[i][j] = Some(FinMap::from_parts(
                through.src(),
                image.len(),
                through.img().iter().map(|&x| pos(x)).collect(),
            ));
            horiz[i - 1][j] = Some(FinMap::from_parts(image.len(), through.dst(), image.clone()));
        }
    }

    let unwrap = |rows: Vec<Vec<Option<FinMap>>>| -> Vec<Vec<FinMap>> {
        rows.into_iter()
            .map(|row| row.into_iter().map(|f| f.expect("every arrow filled")).collect())
            .collect()
    };
    let grid = GridDiagram::new(t, t, cards, unwrap(horiz), unwrap(vert)).map_err(|e| {
        Error::Invariant(format!("staircase completion is not a grid diagram: {e}"))
    })?;
    let alpha = st.defect();
    invariant!(
        grid.card(0, t) == alpha,
        "the largest set of the completion has {} elements, not the defect {alpha}",
        grid.card(0, t)
    );
    let stair = staircase_shuffle(t);
    for sigma in enumerate_shuffles(t, t).iter().filter(|sigma| stair.poset_le(sigma)) {
        let z = grid.restrict_shuffle(sigma)?;
        invariant!(
            z.defect() == alpha,
            "shuffle {sigma} above the staircase reads off defect {} instead of {alpha}",
            z.defect()
        );
    }
    Ok(grid)
}

/// `D = im(𝒟)`: the cores of the strings along all chains of the grid.
pub fn image_subset(d: &GridDiagram) -> FSubset {
    let mut out = FSubset::new();
    for sigma in enumerate_shuffles(d.r, d.s) {
        out.insert_with_faces(&d.restrict_shuffle(&sigma).expect("shuffle fits"));
    }
    out
}

/// The image of `∂(Δ[r] × Δ[s])`: the grids with one row or one column
/// deleted.
pub fn boundary_image(d: &GridDiagram) -> FSubset {
    let mut out = FSubset::new();
    let mut add_paths = |r: usize, s: usize, place: &dyn Fn(Vertex) -> Vertex| {
        for sigma in enumerate_shuffles(r, s) {
            let path: Vec<Vertex> = sigma.points().into_iter().map(place).collect();
            out.insert_with_faces(&d.restrict(&path).expect("path fits"));
        }
    };
    if d.r > 0 {
        for skip in 0..=d.r {
            add_paths(d.r - 1, d.s, &|(i, j)| (if i >= skip { i + 1 } else { i }, j));
        }
    }
    if d.s > 0 {
        for skip in 0..=d.s {
            add_paths(d.r, d.s - 1, &|(i, j)| (i, if j >= skip { j + 1 } else { j }));
        }
    }
    out
}

/// The path `HVHV⋯HV` through `(k,k)` and `(k+1,k)`.
pub fn staircase_shuffle(t: usize) -> Shuffle {
    Shuffle::from_moves((0..t).flat_map(|_| [Move::H, Move::V]).collect())
}

/// Shuffles whose string has a defect other than `alpha`.
pub fn defect_deviations(d: &GridDiagram, alpha: usize) -> Vec<Shuffle> {
    enumerate_shuffles(d.r, d.s)
        .into_iter()
        .filter(|sigma| d.restrict_shuffle(sigma).expect("shuffle fits").defect() != alpha)
        .collect()
}

/// The first square below a staircase whose cardinalities cannot balance.
///
/// Below the staircase each square `a ← b ← e`, `a ← c ← e` has `b` forced
/// to be the image of `e → c → a`. Two shuffles differing only in this square
/// have equal defect exactly when `|a| + |e| = |b| + |c|`. Returns the
/// corner `a = (i−1, j)` of the first unbalanced forced square.
pub fn staircase_obstruction(st: &FSimplex) -> Option<Vertex> {
    let grid = complete_from_staircase(st).ok()?;
    let t = grid.r;
    (2..=t).flat_map(|d| (0..=t - d).map(move |j| (j + d, j))).find_map(|(i, j)| {
        let (a, b, c, e) = (grid.card(i - 1, j), grid.card(i, j), grid.card(i - 1, j + 1), grid.card(i, j + 1));
        (a + e != b + c).then_some((i - 1, j))
    })
}

/// Every member's saturation lies in `c`.
pub fn is_saturated(c: &FSubset) -> bool {
    c.is_saturated()
}

/// Grids with reduced corner data and largest set of size at most `max_card`,
/// one per isomorphism class, with `r + s ≤ max_degree`.
pub fn reduced_grids(max_card: usize, max_degree: usize, conv: SetConvention) -> Vec<GridDiagram> {
    corner_strings(max_card, conv)
        .into_par_iter()
        .filter(|(r, s, _)| r + s <= max_degree)
        .map(|(r, s, y)| {
            let c = CornerData::from_top_simplex(&y, r, s).expect("corner pattern");
            complete_from_corner(&c).expect("valid corner data")
        })
        .collect()
}

/// `c` is the union of the grid images it contains.
///
/// Grids with a bijective corner arrow have the same image as a smaller
/// reduced grid, so reduced grids with sets no larger than the largest set
/// in `c` suffice.
pub fn is_accessible(c: &FSubset) -> bool {
    let Some(max_card) = c.max_card() else {
        return true;
    };
    let conv = if c.has_empty_set() {
        SetConvention::AllowEmpty
    } else {
        SetConvention::NonEmpty
    };
    let max_degree = c.max_degree().unwrap_or(0);
    let union = reduced_grids(max_card, max_degree, conv)
        .par_iter()
        .map(image_subset)
        .filter(|img| img.is_subset(c))
        .reduce(FSubset::new, |a, b| a.union(&b));
    union == *c
}

/// `E^α`: the nondegenerate strings of defect at most `α`.
///
/// Built twice, from the defect formula and as the union of the images of
/// all grids whose largest set has at most `α` elements; the two must agree.
pub fn build_e_alpha(alpha: usize, conv: SetConvention) -> Result<FSubset> {
    if alpha == 0 {
        return Err(Error::InvalidInput("alpha must be at least 1".into()));
    }
    let direct: HashSet<CanonicalFSimplex> = defect_bounded(alpha, conv)?.into_iter().flatten().collect();
    let from_grids: HashSet<CanonicalFSimplex> = reduced_grids(alpha, usize::MAX, conv)
        .par_iter()
        .map(|d| image_subset(d).iter().cloned().collect::<HashSet<_>>())
        .reduce(HashSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    if let Some(z) = direct.difference(&from_grids).min() {
        return Err(Error::Invariant(format!(
            "{z} has defect at most {alpha} but lies in no grid image"
        )));
    }
    if let Some(z) = from_grids.difference(&direct).min() {
        return Err(Error::Invariant(format!(
            "{z} lies in a grid image but has defect {} > {alpha}",
            z.defect()
        )));
    }
    FSubset::from_members(direct)
        .map_err(|e| Error::Invariant(format!("E^{alpha} is not a simplicial subset: {e}")))
}

/// Counts of horizontal and vertical grid arrows by class, a relabeling
/// invariant of the whole grid.
pub fn arrow_census(d: &GridDiagram) -> Vec<(MapClass, usize)> {
    let mut counts = std::collections::BTreeMap::new();
    for f in d.horiz.iter().flatten().chain(d.vert.iter().flatten()) {
        *counts.entry(classify(f)).or_insert(0) += 1;
    }
    counts.into_iter().collect()
}
