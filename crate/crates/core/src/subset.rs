//! Simplicial subsets of the bookkeeping simplicial set.

use serde::{Deserialize, Serialize};
use std::collections::btree_set;
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::fsimp::{CanonicalFSimplex, FSimplex};

/// A face-closed set of simplices, stored by canonical nondegenerate members.
///
/// A degenerate simplex belongs to the subset exactly when its core does.
/// Iteration (and JSON output) is sorted by degree, then by serialization.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct FSubset {
    members: BTreeSet<CanonicalFSimplex>,
}

impl FSubset {
    pub fn new() -> Self {
        FSubset::default()
    }

    /// Smallest subset containing every given simplex.
    pub fn generated_by<'a, I>(simplices: I) -> Self
    where
        I: IntoIterator<Item = &'a FSimplex>,
    {
        let mut out = FSubset::new();
        for z in simplices {
            out.insert_with_faces(z);
        }
        out
    }

    /// Validates nondegeneracy and face closure of an explicit member list.
    pub fn from_members<I>(members: I) -> Result<Self>
    where
        I: IntoIterator<Item = CanonicalFSimplex>,
    {
        let members: BTreeSet<_> = members.into_iter().collect();
        if let Some(z) = members.iter().find(|z| !z.is_nondegenerate()) {
            return Err(Error::InvalidInput(format!("member {z} is degenerate")));
        }
        let out = FSubset { members };
        if let Some((z, i)) = out.first_missing_face() {
            return Err(Error::InvalidInput(format!(
                "member {z} has face d_{i} outside the subset"
            )));
        }
        Ok(out)
    }

    /// Adds the core of `z` and all its faces. Returns how many nondegenerate
    /// members were new.
    pub fn insert_with_faces(&mut self, z: &FSimplex) -> usize {
        let mut added = Vec::new();
        self.insert_recording(z, &mut added);
        added.len()
    }

    /// Like [`insert_with_faces`](Self::insert_with_faces), returning the new members.
    pub fn insert_returning_new(&mut self, z: &FSimplex) -> Vec<CanonicalFSimplex> {
        let mut added = Vec::new();
        self.insert_recording(z, &mut added);
        added
    }

    fn insert_recording(&mut self, z: &FSimplex, added: &mut Vec<CanonicalFSimplex>) {
        let c = z.core_simplex();
        if self.members.contains(&c) {
            return;
        }
        let faces: Vec<FSimplex> = if c.degree() == 0 {
            Vec::new()
        } else {
            (0..=c.degree()).map(|i| c.face(i).expect("face in range")).collect()
        };
        self.members.insert(c.clone());
        added.push(c);
        for f in &faces {
            self.insert_recording(f, added);
        }
    }

    /// Membership of an arbitrary (possibly degenerate) simplex.
    pub fn contains(&self, z: &FSimplex) -> bool {
        self.members.contains(&z.core_simplex())
    }

    pub fn contains_canonical(&self, z: &CanonicalFSimplex) -> bool {
        self.members.contains(z)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> btree_set::Iter<'_, CanonicalFSimplex> {
        self.members.iter()
    }

    pub fn is_subset(&self, other: &FSubset) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn union_with(&mut self, other: &FSubset) {
        self.members.extend(other.members.iter().cloned());
    }

    pub fn union(&self, other: &FSubset) -> FSubset {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    /// Members of `self` missing from `other`.
    pub fn difference<'a>(&'a self, other: &'a FSubset) -> impl Iterator<Item = &'a CanonicalFSimplex> {
        self.members.difference(&other.members)
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.members.iter().map(|z| z.degree()).max()
    }

    pub fn max_card(&self) -> Option<usize> {
        self.members.iter().map(|z| z.max_card()).max()
    }

    pub fn has_empty_set(&self) -> bool {
        self.members.iter().any(|z| z.cards().contains(&0))
    }

    /// Number of nondegenerate members in each degree.
    pub fn counts_by_degree(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for z in &self.members {
            *out.entry(z.degree()).or_insert(0) += 1;
        }
        out
    }

    fn first_missing_face(&self) -> Option<(&CanonicalFSimplex, usize)> {
        self.members.iter().find_map(|z| {
            (0..=z.degree())
                .filter(|_| z.degree() > 0)
                .find(|&i| !self.contains(&z.face(i).expect("face in range")))
                .map(|i| (z, i))
        })
    }

    pub fn is_face_closed(&self) -> bool {
        self.first_missing_face().is_none()
    }

    /// The first member whose saturation lies outside the subset, if any.
    pub fn saturation_witness(&self) -> Option<&CanonicalFSimplex> {
        self.members.iter().find(|z| {
            z.degree() > 0 && !self.contains(&z.saturate().expect("positive degree"))
        })
    }

    /// Every positive-degree member has its saturation (and so all of its
    /// faces) in the subset. Degenerate simplices need no separate check: the
    /// saturation of a degeneracy is a degeneracy of the core's saturation.
    pub fn is_saturated(&self) -> bool {
        self.saturation_witness().is_none()
    }

    /// Smallest saturated subset containing `self`.
    pub fn saturated_closure(&self) -> FSubset {
        let mut out = self.clone();
        let mut pending: Vec<CanonicalFSimplex> = out.members.iter().cloned().collect();
        while let Some(z) = pending.pop() {
            if z.degree() == 0 {
                continue;
            }
            let e = z.saturate().expect("positive degree");
            pending.extend(out.insert_returning_new(&e));
        }
        out
    }
}

impl<'a> IntoIterator for &'a FSubset {
    type Item = &'a CanonicalFSimplex;
    type IntoIter = btree_set::Iter<'a, CanonicalFSimplex>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

impl<'de> Deserialize<'de> for FSubset {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let members = Vec::<CanonicalFSimplex>::deserialize(de)?;
        FSubset::from_members(members).map_err(serde::de::Error::custom)
    }
}
