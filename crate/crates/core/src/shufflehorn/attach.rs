use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

use super::product::{excluded_by_corners, excluded_faces, faces_in_a, horn_certificate, HornKind};
use super::shuffle::{enumerate_shuffles, is_linear_extension, Shuffle};
use crate::error::{invariant, Error, Result};
use crate::finmap::{classify, MapClass};
use crate::fsimp::{CanonicalFSimplex, FSimplex};
use crate::griddiag::{boundary_image, image_subset, GridDiagram};
use crate::subset::FSubset;

/// What was checked when the shuffle `σ` was processed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttachmentRecord {
    pub sigma: Shuffle,
    /// `"inner"` or `"boundary"`.
    pub kind: &'static str,
    #[serde(rename = "S")]
    pub s: Vec<usize>,
    /// False when the image of `σ` was already present.
    pub attached: bool,
    pub checks: BTreeMap<&'static str, bool>,
    /// Index sets `T` of the faces of `Δ[r+s]_σ` outside `A^σ`.
    pub excluded: Vec<Vec<usize>>,
}

/// Record of attaching the image of a grid to a saturated subset one shuffle
/// at a time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttachmentCertificate {
    pub grid: GridDiagram,
    pub order: Vec<Shuffle>,
    /// Every proper face of the top simplex was in the starting subset.
    pub proper_faces_in_c: bool,
    pub records: Vec<AttachmentRecord>,
}

impl AttachmentCertificate {
    /// Replays the attachment from `c_before` and compares every record.
    pub fn verify(&self, c_before: &FSubset) -> Result<FSubset> {
        let (out, again) = attach_diagram_with_order(c_before, &self.grid, &self.order)?;
        invariant!(
            again.records == self.records && again.proper_faces_in_c == self.proper_faces_in_c,
            "replaying the attachment of a ({},{}) grid gives different records",
            self.grid.r(),
            self.grid.s()
        );
        Ok(out)
    }
}

/// Adds `im(𝒟)` to the saturated subset `c`, one shuffle at a time in the
/// default linear extension.
pub fn attach_diagram(c: &FSubset, d: &GridDiagram) -> Result<(FSubset, AttachmentCertificate)> {
    attach_diagram_with_order(c, d, &enumerate_shuffles(d.r(), d.s()))
}

/// Recovers the face `T` from the classes of its image's arrows: a proper
/// injection or surjection steps one vertex, a mixed arrow skips a corner.
fn fingerprint(z: &FSimplex) -> Vec<usize> {
    let mut t = vec![0];
    for f in z.maps() {
        let step = if classify(f) == MapClass::Neither { 2 } else { 1 };
        t.push(t.last().unwrap() + step);
    }
    t
}

/// Like [`attach_diagram`] with an explicit order, which must be a linear
/// extension of the shuffle poset.
pub fn attach_diagram_with_order(
    c: &FSubset,
    d: &GridDiagram,
    order: &[Shuffle],
) -> Result<(FSubset, AttachmentCertificate)> {
    if order.first().map(|s| (s.r(), s.s())) != Some((d.r(), d.s())) || !is_linear_extension(order) {
        return Err(Error::InvalidInput(format!(
            "the order is not a linear extension of the ({},{}) shuffle poset",
            d.r(),
            d.s()
        )));
    }
    if let Some(z) = c.saturation_witness() {
        return Err(Error::Hypothesis(format!("C is not saturated: e({z}) is missing")));
    }
    if !boundary_image(d).is_subset(c) {
        return Err(Error::Hypothesis(
            "the image of the boundary of the grid is not contained in C".into(),
        ));
    }
    let y = d.top_simplex();
    let proper_faces_in_c =
        y.degree() == 0 || (0..=y.degree()).all(|i| c.contains(&y.face(i).expect("in range")));
    let mut cert = AttachmentCertificate {
        grid: d.clone(),
        order: order.to_vec(),
        proper_faces_in_c,
        records: Vec::new(),
    };
    let target = image_subset(d);
    if target.is_subset(c) {
        return Ok((c.clone(), cert));
    }

    let mut cur = c.clone();
    for sigma in order {
        let n = sigma.dim();
        let horn = horn_certificate(sigma)?;
        let (kind, s) = match &horn.kind {
            HornKind::Inner(s) => ("inner", s.clone()),
            HornKind::BoundarySphere => ("boundary", (0..=n).collect()),
        };
        let face_image =
            |t: &[usize]| d.restrict(&sigma.face_chain(t)).expect("chains of a shuffle fit the grid");

        for t in faces_in_a(sigma) {
            invariant!(
                cur.contains(&face_image(&t)),
                "{sigma}: the face {t:?} lies in A^σ but its image is not yet present"
            );
        }

        let excluded = excluded_faces(sigma);
        let z = face_image(&(0..=n).collect::<Vec<_>>());
        let mut checks = BTreeMap::new();
        checks.insert("a", excluded.iter().all(|t| t.first() == Some(&0) && t.last() == Some(&n)));
        checks.insert("b", excluded.iter().all(|t| excluded_by_corners(sigma, t)));

        if cur.contains(&z) {
            cert.records.push(AttachmentRecord {
                sigma: sigma.clone(),
                kind,
                s,
                attached: false,
                checks,
                excluded,
            });
            continue;
        }

        let images: Vec<FSimplex> = excluded.iter().map(|t| face_image(t)).collect();
        let cores: Vec<CanonicalFSimplex> = images.iter().map(FSimplex::canonicalize).collect();
        checks.insert("c", z.is_nondegenerate());
        checks.insert("d", images.iter().all(FSimplex::is_nondegenerate));
        checks.insert("ii", cores.iter().all(|w| !cur.contains_canonical(w)));
        checks.insert(
            "iii_fingerprint",
            images.iter().zip(&excluded).all(|(w, t)| fingerprint(w) == *t),
        );
        checks.insert(
            "iii_canonical",
            cores.iter().collect::<BTreeSet<_>>().len() == cores.len(),
        );
        let added = cur.insert_with_faces(&z);
        checks.insert("pushout", added == excluded.len());

        if let Some((name, _)) = checks.iter().find(|(_, ok)| !**ok) {
            return Err(Error::Invariant(format!(
                "attaching {sigma} of a ({},{}) grid: check {name} failed",
                d.r(),
                d.s()
            )));
        }
        cert.records.push(AttachmentRecord {
            sigma: sigma.clone(),
            kind,
            s,
            attached: true,
            checks,
            excluded,
        });
    }

    invariant!(cur == c.union(&target), "the filtration does not end at C ∪ D");
    invariant!(cur.is_saturated(), "C ∪ D is not saturated");
    Ok((cur, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finmap::FinMap;
    use crate::griddiag::{build_e_alpha, complete_from_corner, reduced_grids, CornerData};
    use crate::SetConvention;

    fn m(src: usize, dst: usize, img: &[usize]) -> FinMap {
        FinMap::new(src, dst, img.to_vec()).unwrap()
    }

    #[test]
    fn image_already_present_changes_nothing() {
        let c = CornerData { row: vec![m(1, 2, &[1])], column: vec![m(2, 1, &[0, 0])], corner: 2 };
        let d = complete_from_corner(&c).unwrap();
        let full = image_subset(&d);
        let (out, cert) = attach_diagram(&full, &d).unwrap();
        assert_eq!(out, full);
        assert!(cert.records.is_empty());
    }

    #[test]
    fn attach_onto_e_one() {
        let e1 = build_e_alpha(1, SetConvention::NonEmpty).unwrap();
        // the smallest 1×1 grid leaving E^1: {x} ↪ 2 ↠ {x}
        let c = CornerData { row: vec![m(1, 2, &[0])], column: vec![m(2, 1, &[0, 0])], corner: 2 };
        let d = complete_from_corner(&c).unwrap();
        let start = e1.union(&boundary_image(&d)).saturated_closure();
        let (out, cert) = attach_diagram(&start, &d).unwrap();
        assert_eq!(out, start.union(&image_subset(&d)));
        assert!(cert.records.iter().any(|r| r.attached));
        assert_eq!(cert.verify(&start).unwrap(), out);
    }

    #[test]
    fn rejects_unsaturated_start() {
        let c = CornerData { row: vec![m(1, 2, &[0])], column: vec![m(2, 1, &[0, 0])], corner: 2 };
        let d = complete_from_corner(&c).unwrap();
        let bad = boundary_image(&d).union(&FSubset::generated_by(&[FSimplex::edge(m(2, 2, &[0, 0]))]));
        assert!(matches!(attach_diagram(&bad, &d), Err(Error::Hypothesis(_))));
        assert!(matches!(attach_diagram(&FSubset::new(), &d), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn sweep_from_boundaries() {
        for conv in [SetConvention::NonEmpty, SetConvention::AllowEmpty] {
            for d in reduced_grids(3, 4, conv).iter().filter(|d| d.r() <= 2 && d.s() <= 2) {
                let start = boundary_image(d).saturated_closure();
                let (out, cert) = attach_diagram(&start, d).unwrap();
                assert_eq!(out, start.union(&image_subset(d)));
                assert!(cert.records.iter().all(|r| r.checks.values().all(|&b| b)));
            }
        }
    }

    #[test]
    fn result_is_independent_of_the_linear_extension() {
        for d in reduced_grids(3, 4, SetConvention::NonEmpty).iter().filter(|d| d.r() == 2 && d.s() == 2) {
            let start = boundary_image(d).saturated_closure();
            let forward = enumerate_shuffles(2, 2);
            // HVHV and VHHV are incomparable; swap them.
            let mut alt = forward.clone();
            let i = alt.iter().position(|s| s.to_string() == "HVVH").unwrap();
            let j = alt.iter().position(|s| s.to_string() == "VHHV").unwrap();
            alt.swap(i, j);
            assert!(is_linear_extension(&alt));
            let (a, _) = attach_diagram_with_order(&start, d, &forward).unwrap();
            let (b, _) = attach_diagram_with_order(&start, d, &alt).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rejects_bad_orders() {
        let d = &reduced_grids(2, 2, SetConvention::NonEmpty)
            .into_iter()
            .find(|d| d.r() == 1 && d.s() == 1)
            .unwrap();
        let start = boundary_image(d).saturated_closure();
        let mut order = enumerate_shuffles(1, 1);
        order.reverse();
        assert!(matches!(
            attach_diagram_with_order(&start, d, &order),
            Err(Error::InvalidInput(_))
        ));
    }
}
