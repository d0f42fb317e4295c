//! Maps between standard finite sets `{0, …, n-1}`.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// A map between standard finite sets, stored as its image array.
///
/// `img[k]` is the image of source element `k`; every entry is below `dst`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FinMap {
    src: usize,
    dst: usize,
    img: Vec<usize>,
}

/// Injectivity/surjectivity class of a [`FinMap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MapClass {
    Bijective,
    ProperInjective,
    ProperSurjective,
    Neither,
}

impl MapClass {
    pub fn is_injective(self) -> bool {
        matches!(self, MapClass::Bijective | MapClass::ProperInjective)
    }

    pub fn is_surjective(self) -> bool {
        matches!(self, MapClass::Bijective | MapClass::ProperSurjective)
    }
}

impl FinMap {
    pub fn new(src: usize, dst: usize, img: Vec<usize>) -> Result<Self> {
        if img.len() != src {
            return Err(Error::InvalidInput(format!(
                "img has {} entries but src is {src}",
                img.len()
            )));
        }
        if let Some((index, &value)) = img.iter().enumerate().find(|(_, &v)| v >= dst) {
            return Err(Error::ImageOutOfRange { index, value, dst });
        }
        Ok(FinMap { src, dst, img })
    }

    /// Builds a map from an image array whose validity the caller guarantees.
    pub(crate) fn from_parts(src: usize, dst: usize, img: Vec<usize>) -> Self {
        debug_assert_eq!(img.len(), src);
        debug_assert!(img.iter().all(|&v| v < dst));
        FinMap { src, dst, img }
    }

    pub fn identity(n: usize) -> Self {
        FinMap::from_parts(n, n, (0..n).collect())
    }

    pub fn src(&self) -> usize {
        self.src
    }

    pub fn dst(&self) -> usize {
        self.dst
    }

    pub fn img(&self) -> &[usize] {
        &self.img
    }

    pub fn apply(&self, k: usize) -> usize {
        self.img[k]
    }

    /// Number of distinct values taken.
    pub fn image_size(&self) -> usize {
        let mut hit = vec![false; self.dst];
        let mut count = 0;
        for &v in &self.img {
            if !hit[v] {
                hit[v] = true;
                count += 1;
            }
        }
        count
    }

    pub fn is_injective(&self) -> bool {
        self.image_size() == self.src
    }

    pub fn is_surjective(&self) -> bool {
        self.image_size() == self.dst
    }

    pub fn is_bijective(&self) -> bool {
        self.src == self.dst && self.is_injective()
    }

    /// Every map `src → dst`, in lexicographic order of the image array.
    pub fn all(src: usize, dst: usize) -> AllMaps {
        AllMaps {
            src,
            dst,
            next: if src > 0 && dst == 0 { None } else { Some(vec![0; src]) },
        }
    }
}

/// `g ∘ f`, defined when `f.dst == g.src`.
pub fn compose(g: &FinMap, f: &FinMap) -> Result<FinMap> {
    if f.dst != g.src {
        return Err(Error::DimensionMismatch { src: g.src, dst: f.dst });
    }
    Ok(FinMap::from_parts(
        f.src,
        g.dst,
        f.img.iter().map(|&k| g.img[k]).collect(),
    ))
}

pub fn classify(f: &FinMap) -> MapClass {
    let image = f.image_size();
    let injective = image == f.src;
    let surjective = image == f.dst;
    match (injective, surjective) {
        (true, true) => MapClass::Bijective,
        (true, false) => MapClass::ProperInjective,
        (false, true) => MapClass::ProperSurjective,
        (false, false) => MapClass::Neither,
    }
}

/// Factors `f` as a surjection onto its image followed by the increasing
/// inclusion of the image: `compose(&mono, &epi) == f`.
pub fn epi_mono_factor(f: &FinMap) -> (FinMap, FinMap) {
    let mut hit = vec![false; f.dst];
    for &v in &f.img {
        hit[v] = true;
    }
    let mut rank = vec![usize::MAX; f.dst];
    let mut image = Vec::new();
    for (v, _) in hit.iter().enumerate().filter(|(_, &h)| h) {
        rank[v] = image.len();
        image.push(v);
    }
    let epi = FinMap::from_parts(f.src, image.len(), f.img.iter().map(|&v| rank[v]).collect());
    let mono = FinMap::from_parts(image.len(), f.dst, image);
    (epi, mono)
}

impl fmt::Display for FinMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}→{};{:?})", self.src, self.dst, self.img)
    }
}

/// Iterator over all maps between two standard finite sets.
pub struct AllMaps {
    src: usize,
    dst: usize,
    next: Option<Vec<usize>>,
}

impl Iterator for AllMaps {
    type Item = FinMap;

    fn next(&mut self) -> Option<FinMap> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut pos = self.src;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            succ[pos] += 1;
            if succ[pos] < self.dst {
                self.next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(FinMap::from_parts(self.src, self.dst, current))
    }
}

#[derive(Deserialize)]
struct RawFinMap {
    src: usize,
    dst: usize,
    img: Vec<usize>,
}

impl<'de> Deserialize<'de> for FinMap {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = RawFinMap::deserialize(de)?;
        FinMap::new(raw.src, raw.dst, raw.img).map_err(serde::de::Error::custom)
    }
}
