//! The presentation engine: generators in attachment order, the replayed
//! filtration reaching `E^α`, and the matching of over-defect strings by inner
//! faces.

use rayon::prelude::*;
use serde::Serialize;
use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use crate::enumerate::{by_degree, corner_strings};
use crate::error::{invariant, Error, Result};
use crate::finmap::{epi_mono_factor, MapClass};
use crate::fsimp::{CanonicalFSimplex, FSimplex};
use crate::griddiag::{boundary_image, build_e_alpha, complete_from_corner, image_subset, CornerData, GridDiagram};
use crate::shufflehorn::{attach_diagram, AttachmentCertificate};
use crate::subset::FSubset;
use crate::SetConvention;

/// One generator: an isomorphism class of grids with reduced corner data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub index: usize,
    pub r: usize,
    pub s: usize,
    /// Canonical top simplex, which determines the grid up to isomorphism.
    pub top: CanonicalFSimplex,
    pub grid: GridDiagram,
    /// The image is not contained in the union of earlier images.
    pub novel: bool,
    /// The boundary image is contained in the union of earlier images.
    pub boundary_contained: bool,
}

/// Generators in a valid attachment order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorList {
    pub alpha: usize,
    pub generators: Vec<Generator>,
}

impl GeneratorList {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Number of generators of each shape `(r, s)`.
    pub fn counts_by_rs(&self) -> BTreeMap<(usize, usize), usize> {
        let mut out = BTreeMap::new();
        for g in &self.generators {
            *out.entry((g.r, g.s)).or_insert(0) += 1;
        }
        out
    }
}

/// All isomorphism classes of grids with reduced corner data and sets of size
/// at most `alpha`, ordered by `r + s` and then by canonical top simplex, and
/// checked to satisfy both attachment conditions in that order.
pub fn enumerate_generators(alpha: usize, conv: SetConvention) -> Result<GeneratorList> {
    if alpha == 0 {
        return Err(Error::InvalidInput("alpha must be at least 1".into()));
    }
    let mut candidates: Vec<(usize, usize, CanonicalFSimplex)> = corner_strings(alpha, conv);
    candidates.sort_by(|a, b| (a.0 + a.1, &a.2).cmp(&(b.0 + b.1, &b.2)));
    let grids: Vec<GridDiagram> = candidates
        .par_iter()
        .map(|(r, s, y)| complete_from_corner(&CornerData::from_top_simplex(y, *r, *s)?))
        .collect::<Result<_>>()?;
    let images: Vec<(FSubset, FSubset)> = grids.par_iter().map(|d| (image_subset(d), boundary_image(d))).collect();

    let mut pending: Vec<usize> = (0..grids.len()).collect();
    let mut union = FSubset::new();
    let mut generators = Vec::with_capacity(grids.len());
    while !pending.is_empty() {
        let Some(pos) = pending.iter().position(|&k| images[k].1.is_subset(&union)) else {
            let (r, s, y) = &candidates[pending[0]];
            return Err(Error::Invariant(format!(
                "no remaining generator has its boundary covered; first is ({r},{s}) {y}"
            )));
        };
        let k = pending.remove(pos);
        let (image, _) = &images[k];
        if image.is_subset(&union) {
            continue;
        }
        union.union_with(image);
        let (r, s, top) = candidates[k].clone();
        generators.push(Generator {
            index: generators.len(),
            r,
            s,
            top,
            grid: grids[k].clone(),
            novel: true,
            boundary_contained: true,
        });
    }
    Ok(GeneratorList { alpha, generators })
}

/// Re-checks both flags of every generator by direct containment.
pub fn audit_generators(list: &GeneratorList) -> Result<()> {
    let mut union = FSubset::new();
    for g in &list.generators {
        let image = image_subset(&g.grid);
        invariant!(!image.is_subset(&union), "generator {} adds nothing new", g.index);
        invariant!(
            boundary_image(&g.grid).is_subset(&union),
            "generator {} has boundary outside the earlier images",
            g.index
        );
        union.union_with(&image);
    }
    Ok(())
}

/// Number of isomorphism classes of reduced corner data with sets of size at
/// most `alpha`, counted by Burnside's lemma.
///
/// On an `n`-element corner, reduced corner data up to isomorphism are orbits
/// of the symmetric group on pairs (strictly decreasing chain of proper
/// subsets, strictly coarsening chain of partitions). Shares no code with
/// canonical forms or grid completion.
pub fn count_corner_classes(alpha: usize, conv: SetConvention) -> usize {
    (conv.min_card()..=alpha).map(|n| orbit_count_on_corner(n, conv)).sum()
}

fn orbit_count_on_corner(n: usize, conv: SetConvention) -> usize {
    let perms = permutations(n);
    let flags = subset_flags(n, conv);
    let chains = partition_chains(n);
    let fixed: usize = perms
        .iter()
        .map(|p| {
            let f = flags.iter().filter(|fl| fl.iter().all(|&m| permute_mask(p, m) == m)).count();
            let c = chains
                .iter()
                .filter(|ch| ch.iter().all(|part| permute_partition(p, part) == *part))
                .count();
            f * c
        })
        .sum();
    fixed / perms.len()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

fn permute_mask(p: &[usize], mask: u32) -> u32 {
    (0..p.len()).filter(|&k| mask >> k & 1 == 1).fold(0, |acc, k| acc | 1 << p[k])
}

/// Chains `[n] ⊋ A_1 ⊋ ⋯ ⊋ A_r` as bitmasks, all lengths, including the
/// empty chain. Subsets may be empty only under the permissive convention.
fn subset_flags(n: usize, conv: SetConvention) -> Vec<Vec<u32>> {
    let full = (1u32 << n) - 1;
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<Vec<u32>> = vec![Vec::new()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for chain in &frontier {
            let top = chain.last().copied().unwrap_or(full);
            for sub in (conv.min_card() as u32)..top {
                if sub & !top == 0 && sub != top {
                    let mut c = chain.clone();
                    c.push(sub);
                    next.push(c);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// A partition as a sorted list of block bitmasks.
type Partition = Vec<u32>;

fn permute_partition(p: &[usize], part: &Partition) -> Partition {
    let mut out: Partition = part.iter().map(|&b| permute_mask(p, b)).collect();
    out.sort_unstable();
    out
}

fn set_partitions(n: usize) -> Vec<Partition> {
    let mut out: Vec<Vec<u32>> = vec![Vec::new()];
    for k in 0..n {
        let mut next = Vec::new();
        for part in &out {
            for b in 0..part.len() {
                let mut q = part.clone();
                q[b] |= 1 << k;
                next.push(q);
            }
            let mut q = part.clone();
            q.push(1 << k);
            next.push(q);
        }
        out = next;
    }
    out.into_iter()
        .map(|mut p| {
            p.sort_unstable();
            p
        })
        .collect()
}

fn is_strictly_coarser(coarse: &Partition, fine: &Partition) -> bool {
    coarse.len() < fine.len() && fine.iter().all(|&b| coarse.iter().any(|&c| b & !c == 0))
}

/// Chains of partitions, each strictly coarser than the previous, starting
/// below the discrete partition. Includes the empty chain.
fn partition_chains(n: usize) -> Vec<Vec<Partition>> {
    let all = set_partitions(n);
    let discrete: Partition = {
        let mut d: Partition = (0..n).map(|k| 1u32 << k).collect();
        d.sort_unstable();
        d
    };
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<Vec<Partition>> = vec![Vec::new()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for chain in &frontier {
            let last = chain.last().unwrap_or(&discrete);
            for p in all.iter().filter(|p| is_strictly_coarser(p, last)) {
                let mut c = chain.clone();
                c.push(p.clone());
                next.push(c);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// A cell of the presentation: a generator labeled by its fiber.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub r: usize,
    pub s: usize,
    pub grid: GridDiagram,
    /// Name of the space attached along this cell. Never computed.
    pub fiber: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellCounts {
    /// Keys are `"r,s"`.
    pub by_rs: BTreeMap<String, usize>,
    /// Cells with `r = s`.
    pub diagonal: usize,
}

/// The checked presentation of `E^α`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PresentationSkeleton {
    pub alpha: usize,
    pub cells: Vec<Cell>,
    pub attachment_order: Vec<usize>,
    pub certificates: Vec<AttachmentCertificate>,
    pub skeletal_dimension: usize,
    pub counts: CellCounts,
    #[serde(skip)]
    pub e_alpha: FSubset,
}

/// Replays the attachment of every generator, starting from the empty set,
/// and checks that the result is exactly `E^α`.
pub fn present(alpha: usize, conv: SetConvention) -> Result<PresentationSkeleton> {
    let list = enumerate_generators(alpha, conv)?;
    let e_alpha = build_e_alpha(alpha, conv)?;
    let mut c = FSubset::new();
    let mut certificates = Vec::with_capacity(list.len());
    for g in &list.generators {
        let (next, cert) = attach_diagram(&c, &g.grid).map_err(|e| match e {
            Error::Hypothesis(msg) => Error::Invariant(format!("generator {}: {msg}", g.index)),
            other => other,
        })?;
        c = next;
        certificates.push(cert);
    }
    invariant!(c == e_alpha, "the replayed filtration does not reach E^{alpha}");
    let cells: Vec<Cell> = list
        .generators
        .iter()
        .map(|g| Cell { r: g.r, s: g.s, grid: g.grid.clone(), fiber: format!("R(D_{})", g.index) })
        .collect();
    let counts = CellCounts {
        by_rs: list.counts_by_rs().into_iter().map(|((r, s), n)| (format!("{r},{s}"), n)).collect(),
        diagonal: cells.iter().filter(|c| c.r == c.s).count(),
    };
    Ok(PresentationSkeleton {
        alpha,
        attachment_order: (0..cells.len()).collect(),
        cells,
        certificates,
        skeletal_dimension: e_alpha.max_degree().unwrap_or(0),
        counts,
        e_alpha,
    })
}

/// Re-verifies every certificate of a skeleton against the subset reached
/// just before it, and the final subset against `E^α`.
pub fn verify_skeleton(sk: &PresentationSkeleton) -> Result<()> {
    let mut c = FSubset::new();
    for &k in &sk.attachment_order {
        c = sk.certificates[k].verify(&c)?;
    }
    invariant!(c == sk.e_alpha, "re-verified filtration does not reach E^{}", sk.alpha);
    Ok(())
}

/// Largest degree of a nondegenerate string of defect at most `alpha`.
pub fn skeletal_dimension(alpha: usize, conv: SetConvention) -> Result<usize> {
    Ok(build_e_alpha(alpha, conv)?.max_degree().unwrap_or(0))
}

/// Which part of the over-defect set a string belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    I,
    II,
}

/// An over-defect string with its run-length profile.
///
/// `r` counts the proper injections `f_t, f_{t−1}, …` at the top end and `s`
/// the proper surjections just below them. The string is on side II when
/// `f_{t−r−s}` is a proper injection.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TProfile {
    pub z: CanonicalFSimplex,
    pub r: usize,
    pub s: usize,
    pub side: Side,
}

impl TProfile {
    /// Profile of a nondegenerate string with `r + s < t`.
    pub fn of(z: CanonicalFSimplex) -> Result<TProfile> {
        let classes = z.classes();
        let t = classes.len();
        let r = classes.iter().rev().take_while(|&&c| c == MapClass::ProperInjective).count();
        let s = classes[..t - r]
            .iter()
            .rev()
            .take_while(|&&c| c == MapClass::ProperSurjective)
            .count();
        invariant!(r + s < t, "{z} is surjections then injections, so its defect is at most its sizes");
        let side = match classes[t - r - s - 1] {
            MapClass::ProperInjective => Side::II,
            MapClass::Neither => Side::I,
            other => return Err(Error::Invariant(format!("{z}: arrow below the runs is {other:?}"))),
        };
        invariant!(side == Side::I || s >= 1, "{z} is on side II with s = 0");
        Ok(TProfile { z, r, s, side })
    }

    pub fn degree(&self) -> usize {
        self.z.degree()
    }

    /// The distinguished face index `t − r − s`.
    pub fn j(&self) -> usize {
        self.degree() - self.r - self.s
    }

    /// `(degree, r, −s)`, compared lexicographically.
    pub fn phi(&self) -> (usize, usize, i64) {
        (self.degree(), self.r, -(self.s as i64))
    }
}

/// Nondegenerate strings with sets of size at most `alpha`, defect above
/// `alpha`, and degree at most `degree_bound`, with their profiles.
pub fn build_t(alpha: usize, degree_bound: usize, conv: SetConvention) -> Result<Vec<TProfile>> {
    if alpha == 0 || degree_bound < 2 {
        return Err(Error::InvalidInput("need alpha ≥ 1 and degree_bound ≥ 2".into()));
    }
    by_degree(conv, alpha, degree_bound, |_| true)
        .into_iter()
        .flatten()
        .filter(|z| z.defect() > alpha)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(TProfile::of)
        .collect()
}

/// `ψ(z) = d_{t−r−s} z` for `z` on side II.
pub fn psi(p: &TProfile) -> FSimplex {
    p.z.face(p.j()).expect("inner index")
}

/// Inverse of `ψ` on side I: factor the mixed arrow `f_{t−r−s}`.
pub fn psi_inverse(p: &TProfile) -> FSimplex {
    let k = p.j() - 1;
    let (epi, mono) = epi_mono_factor(&p.z.maps()[k]);
    let mut maps = p.z.maps().to_vec();
    maps.splice(k..=k, [mono, epi]);
    FSimplex::new(p.z.card0(), maps).expect("factorization composes")
}

/// Counts for one degree of the matching.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeMatch {
    pub degree: usize,
    pub side_ii: usize,
    pub side_i_below: usize,
}

/// The verified matching `ψ: T_II → T_I`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Matching {
    pub alpha: usize,
    pub degree_bound: usize,
    pub pairs: usize,
    pub by_degree: Vec<DegreeMatch>,
}

fn index_t(t: &[TProfile]) -> HashMap<&CanonicalFSimplex, &TProfile> {
    t.iter().map(|p| (&p.z, p)).collect()
}

/// Verifies that `ψ` is a defect-preserving bijection `T_II(n) → T_I(n−1)`
/// for every degree `n` up to the bound, given by a unique strictly inner
/// face.
pub fn match_psi(t: &[TProfile], alpha: usize, degree_bound: usize) -> Result<Matching> {
    let index = index_t(t);
    t.par_iter().filter(|p| p.side == Side::II).try_for_each(|p| -> Result<()> {
        let n = p.degree();
        let j = p.j();
        invariant!(0 < j && j < n, "{}: j = {j} is not strictly inner", p.z);
        let y = psi(p);
        invariant!(y.defect() == p.z.defect(), "{}: ψ changes the defect", p.z);
        let yc = y.canonicalize();
        let Some(q) = index.get(&yc) else {
            return Err(Error::Invariant(format!("{}: ψ(z) = {yc} is not in T", p.z)));
        };
        invariant!(
            q.side == Side::I && q.r == p.r && q.s + 1 == p.s,
            "{}: ψ(z) has profile ({}, {}, {:?})",
            p.z,
            q.r,
            q.s,
            q.side
        );
        invariant!(psi_inverse(q).canonicalize() == p.z, "{}: ψ⁻¹ψ(z) ≠ z", p.z);
        let hits = (1..n)
            .filter(|&k| {
                let w = p.z.face(k).expect("inner index");
                w.is_nondegenerate() && w.defect() > alpha && {
                    let wp = TProfile::of(w.canonicalize());
                    matches!(wp, Ok(wp) if wp.side == Side::I && wp.r == p.r && wp.s + 1 == p.s)
                }
            })
            .count();
        invariant!(hits == 1, "{}: {hits} inner faces land in T_I with the matched profile", p.z);
        Ok(())
    })?;
    t.par_iter()
        .filter(|q| q.side == Side::I && q.degree() < degree_bound)
        .try_for_each(|q| -> Result<()> {
            let z = psi_inverse(q).canonicalize();
            match index.get(&z) {
                Some(p) if p.side == Side::II => Ok(()),
                _ => Err(Error::Invariant(format!("{}: ψ⁻¹ lands outside T_II", q.z))),
            }
        })?;
    let mut by_degree = Vec::new();
    for n in 1..=degree_bound {
        let side_ii = t.iter().filter(|p| p.side == Side::II && p.degree() == n).count();
        let side_i_below = t.iter().filter(|p| p.side == Side::I && p.degree() + 1 == n).count();
        invariant!(
            side_ii == side_i_below,
            "degree {n}: {side_ii} strings on side II but {side_i_below} on side I one degree down"
        );
        by_degree.push(DegreeMatch { degree: n, side_ii, side_i_below });
    }
    Ok(Matching {
        alpha,
        degree_bound,
        pairs: t.iter().filter(|p| p.side == Side::II).count(),
        by_degree,
    })
}

/// How a non-distinguished face of a side-II string was accounted for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FaceCase {
    /// A side-II string of lower degree.
    B,
    /// Outside `T`, or degenerate on a member of `T` of lower degree.
    C,
    /// On side I, at the face just below the distinguished one or at the
    /// bottom of a nonempty injective run.
    E,
    /// On side I at the last face of a string with no trailing injections.
    ETop,
}

/// A face `d_i z` on side I whose partner `ψ⁻¹(d_i z)` is not smaller than
/// `z` under `φ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhiWitness {
    pub z: String,
    pub face: usize,
    pub partner: String,
    pub phi_z: (usize, usize, i64),
    pub phi_partner: (usize, usize, i64),
}

/// Result of auditing the order on side II.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhiAudit {
    pub faces_checked: usize,
    pub cases: BTreeMap<String, usize>,
    /// Largest number of side-II strings sharing one value of `φ`.
    pub largest_fiber: usize,
    /// Side-I faces whose partner is not below `z` under `φ`.
    pub phi_violations: usize,
    pub phi_violations_by_case: BTreeMap<String, usize>,
    /// The first such face in `φ` order, if any.
    pub phi_witness: Option<PhiWitness>,
    /// Dependencies `z' ≺ z` checked against the returned order.
    pub dependencies: usize,
    /// Dependencies violated by the returned order; always zero on success.
    pub order_violations: usize,
}

struct FaceAudit {
    case: FaceCase,
    /// A side-II string that must precede `z`.
    needs: Option<CanonicalFSimplex>,
    witness: Option<PhiWitness>,
}

fn audit_face(
    p: &TProfile,
    i: usize,
    alpha: usize,
    index: &HashMap<&CanonicalFSimplex, &TProfile>,
) -> Result<FaceAudit> {
    let n = p.degree();
    let w = p.z.face(i)?;
    let core = w.core_simplex();
    let plain = |case| Ok(FaceAudit { case, needs: None, witness: None });
    if !w.is_nondegenerate() {
        invariant!(
            core.defect() <= alpha || (index.contains_key(&core) && core.degree() < n),
            "{} face {i}: degenerate on {core}, which is neither in E^α nor in T",
            p.z
        );
        return plain(FaceCase::C);
    }
    if w.defect() <= alpha {
        return plain(FaceCase::C);
    }
    let Some(q) = index.get(&core) else {
        return Err(Error::Invariant(format!("{} face {i}: {core} missing from T", p.z)));
    };
    if q.side == Side::II {
        return Ok(FaceAudit { case: FaceCase::B, needs: Some(core), witness: None });
    }
    let below_j = i + 1 == p.j();
    let run_bottom = p.r > 0 && i == n - p.r;
    let top = p.r == 0 && i == n;
    invariant!(
        below_j || run_bottom || top,
        "{} face {i}: lands on side I ({}, {}) outside every known case",
        p.z,
        q.r,
        q.s
    );
    let back = TProfile::of(psi_inverse(q).canonicalize())?;
    invariant!(back.degree() == n, "{} face {i}: ψ⁻¹ of the face has the wrong degree", p.z);
    let witness = (back.phi() >= p.phi()).then(|| PhiWitness {
        z: p.z.to_string(),
        face: i,
        partner: back.z.to_string(),
        phi_z: p.phi(),
        phi_partner: back.phi(),
    });
    Ok(FaceAudit {
        case: if top { FaceCase::ETop } else { FaceCase::E },
        needs: Some(back.z),
        witness,
    })
}

/// Side-II strings in an order under which every non-distinguished face of
/// `z` is in `E^α`, on side II of lower degree, or on side I with `ψ⁻¹` of the
/// face earlier than `z`.
///
/// The order is the topological order of these dependencies that breaks ties
/// by `φ = (degree, r, −s)`. The audit reports every face at which `φ` alone
/// fails to order the dependency. A cycle among the dependencies is an
/// invariant failure.
pub fn order_phi(t: &[TProfile], alpha: usize) -> Result<(Vec<TProfile>, PhiAudit)> {
    let index = index_t(t);
    let mut side_ii: Vec<&TProfile> = t.iter().filter(|p| p.side == Side::II).collect();
    side_ii.sort_by(|a, b| a.phi().cmp(&b.phi()).then_with(|| a.z.cmp(&b.z)));
    let rank: HashMap<&CanonicalFSimplex, usize> =
        side_ii.iter().enumerate().map(|(k, p)| (&p.z, k)).collect();

    let per_string: Vec<Vec<FaceAudit>> = side_ii
        .par_iter()
        .map(|p| {
            (0..=p.degree())
                .filter(|&i| i != p.j())
                .map(|i| audit_face(p, i, alpha, &index))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut cases = BTreeMap::new();
    let mut faces_checked = 0;
    let mut phi_violations = 0;
    let mut phi_witness = None;
    let mut phi_violations_by_case = BTreeMap::new();
    let mut needs: Vec<Vec<usize>> = vec![Vec::new(); side_ii.len()];
    let mut dependents: Vec<Vec<usize>> = vec![Vec::new(); side_ii.len()];
    for (k, faces) in per_string.into_iter().enumerate() {
        for f in faces {
            faces_checked += 1;
            let name = format!("{:?}", f.case).to_lowercase();
            *cases.entry(name.clone()).or_insert(0) += 1;
            if let Some(w) = f.witness {
                phi_violations += 1;
                *phi_violations_by_case.entry(name).or_insert(0) += 1;
                phi_witness.get_or_insert(w);
            }
            if let Some(dep) = f.needs {
                let Some(&d) = rank.get(&dep) else {
                    return Err(Error::Invariant(format!("{dep} should be on side II but is not in T")));
                };
                needs[k].push(d);
                dependents[d].push(k);
            }
        }
    }

    let mut waiting: Vec<usize> = needs.iter().map(Vec::len).collect();
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..side_ii.len()).filter(|&k| waiting[k] == 0).map(Reverse).collect();
    let mut placed = Vec::with_capacity(side_ii.len());
    while let Some(Reverse(k)) = ready.pop() {
        placed.push(k);
        for &up in &dependents[k] {
            waiting[up] -= 1;
            if waiting[up] == 0 {
                ready.push(Reverse(up));
            }
        }
    }
    if placed.len() < side_ii.len() {
        let stuck = (0..side_ii.len()).find(|&k| waiting[k] > 0).expect("some string is stuck");
        return Err(Error::Invariant(format!(
            "the faces of side II depend on each other in a cycle through {}",
            side_ii[stuck].z
        )));
    }

    let mut position = vec![0; side_ii.len()];
    for (pos, &k) in placed.iter().enumerate() {
        position[k] = pos;
    }
    let dependencies: usize = needs.iter().map(Vec::len).sum();
    let order_violations = needs
        .iter()
        .enumerate()
        .map(|(k, ds)| ds.iter().filter(|&&d| position[d] >= position[k]).count())
        .sum();
    invariant!(order_violations == 0, "{order_violations} dependencies violated by the order");

    let mut fibers: HashMap<(usize, usize, i64), usize> = HashMap::new();
    for p in &side_ii {
        *fibers.entry(p.phi()).or_insert(0) += 1;
    }
    let largest_fiber = fibers.values().copied().max().unwrap_or(0);
    let order = placed.into_iter().map(|k| side_ii[k].clone()).collect();
    Ok((
        order,
        PhiAudit {
            faces_checked,
            cases,
            largest_fiber,
            phi_violations,
            phi_violations_by_case,
            phi_witness,
            dependencies,
            order_violations,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finmap::FinMap;

    #[test]
    fn generators_alpha_one() {
        let list = enumerate_generators(1, SetConvention::NonEmpty).unwrap();
        assert_eq!(list.len(), 1);
        assert_eq!((list.generators[0].r, list.generators[0].s), (0, 0));
        assert_eq!(count_corner_classes(1, SetConvention::NonEmpty), 1);
    }

    #[test]
    fn generator_counts_match_burnside() {
        for conv in [SetConvention::NonEmpty, SetConvention::AllowEmpty] {
            for alpha in 1..=2 {
                let list = enumerate_generators(alpha, conv).unwrap();
                assert_eq!(list.len(), count_corner_classes(alpha, conv), "{alpha} {conv:?}");
                audit_generators(&list).unwrap();
            }
        }
    }

    #[test]
    fn burnside_small_values() {
        let (ne, ae) = (SetConvention::NonEmpty, SetConvention::AllowEmpty);
        assert_eq!(orbit_count_on_corner(1, ne), 1);
        assert_eq!(orbit_count_on_corner(1, ae), 2);
        // shapes (0,0), (1,0), (0,1), (1,1) on a two-element corner
        assert_eq!(orbit_count_on_corner(2, ne), 4);
        // flags [], [a], [∅], [a ⊋ ∅] up to swapping; one or no coarsening
        assert_eq!(orbit_count_on_corner(2, ae), 8);
        assert_eq!(orbit_count_on_corner(0, ae), 1);
    }

    #[test]
    fn present_small() {
        let sk = present(1, SetConvention::NonEmpty).unwrap();
        assert_eq!(sk.cells.len(), 1);
        assert_eq!(sk.skeletal_dimension, 0);
        verify_skeleton(&sk).unwrap();
        let sk2 = present(2, SetConvention::NonEmpty).unwrap();
        assert_eq!(sk2.e_alpha, build_e_alpha(2, SetConvention::NonEmpty).unwrap());
        verify_skeleton(&sk2).unwrap();
    }

    #[test]
    fn t_is_empty_at_alpha_one() {
        assert!(build_t(1, 4, SetConvention::NonEmpty).unwrap().is_empty());
    }

    #[test]
    fn matching_and_order_at_alpha_two() {
        let t = build_t(2, 4, SetConvention::NonEmpty).unwrap();
        assert!(!t.is_empty());
        assert!(t.iter().all(|p| p.z.defect() > 2 && p.z.max_card() <= 2));
        assert!(t.iter().filter(|p| p.side == Side::II).all(|p| p.s >= 1));
        let m = match_psi(&t, 2, 4).unwrap();
        assert!(m.pairs > 0);
        let (order, audit) = order_phi(&t, 2).unwrap();
        assert_eq!(order.len(), m.pairs);
        assert!(order.windows(2).all(|w| w[0].degree() <= w[1].degree()));
        assert!(audit.faces_checked > 0);
        assert_eq!(audit.order_violations, 0);
    }

    #[test]
    fn phi_fails_at_the_last_face_without_injections() {
        let m = |src: usize, dst: usize, img: &[usize]| FinMap::new(src, dst, img.to_vec()).unwrap();
        let z = FSimplex::new(2, vec![m(2, 2, &[0, 0]), m(1, 2, &[0]), m(2, 1, &[0, 0])]).unwrap();
        let p = TProfile::of(z.canonicalize()).unwrap();
        assert_eq!((p.r, p.s, p.side, p.j()), (0, 1, Side::II, 2));
        let q = TProfile::of(z.face(3).unwrap().canonicalize()).unwrap();
        assert_eq!((q.r, q.s, q.side), (1, 0, Side::I));
        let back = TProfile::of(psi_inverse(&q).canonicalize()).unwrap();
        assert_eq!(back.phi(), (3, 1, -1));
        assert!(back.phi() > p.phi());

        let t = build_t(2, 4, SetConvention::NonEmpty).unwrap();
        let (order, audit) = order_phi(&t, 2).unwrap();
        assert!(audit.phi_violations > 0);
        let at = |x: &CanonicalFSimplex| order.iter().position(|o| o.z == *x).unwrap();
        assert!(at(&back.z) < at(&p.z));
    }

    #[test]
    fn empty_matching_is_valid() {
        let m = match_psi(&[], 1, 3).unwrap();
        assert_eq!(m.pairs, 0);
        assert!(order_phi(&[], 1).unwrap().0.is_empty());
    }

    #[test]
    fn skeletal_dimension_is_monotone() {
        let dims: Vec<usize> = (1..=3)
            .map(|a| skeletal_dimension(a, SetConvention::NonEmpty).unwrap())
            .collect();
        assert_eq!(dims[0], 0);
        assert!(dims.windows(2).all(|w| w[0] <= w[1]));
        for (a, d) in dims.iter().enumerate() {
            assert!(*d <= (a + 1) * (a + 3));
        }
    }
}
