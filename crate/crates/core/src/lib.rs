//! Combinatorics of finite presentations for truncated unordered
//! configuration categories.
//!
//! The crate works with the simplicial set whose `t`-simplices are
//! isomorphism classes of strings `S_0 ← S_1 ← ⋯ ← S_t` of maps of finite
//! sets. It computes defects, canonical forms and saturated subsets, builds
//! the subsets `E^α` of strings with defect at most `α` from grid diagrams,
//! certifies the shuffle filtration of `Δ[r] × Δ[s]` by generalized inner
//! horns, and assembles a checked presentation skeleton for each `α`.
//!
//! ```
//! use confpres::{finmap::FinMap, fsimp::FSimplex};
//!
//! let f = FinMap::new(3, 2, vec![0, 0, 1]).unwrap();
//! let z = FSimplex::edge(f);
//! assert_eq!(z.defect(), 3);
//! ```

pub mod cli;
pub mod enumerate;
pub mod error;
pub mod finmap;
pub mod fsimp;
pub mod griddiag;
pub mod shufflehorn;
pub mod presentation;
pub mod subset;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// Whether the empty set counts as a finite set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SetConvention {
    /// Only nonempty sets, as in the skeleton of finite nonempty sets.
    #[default]
    NonEmpty,
    /// Sets of every cardinality, including the empty configuration.
    AllowEmpty,
}

impl SetConvention {
    /// Smallest cardinality allowed.
    pub fn min_card(self) -> usize {
        match self {
            SetConvention::NonEmpty => 1,
            SetConvention::AllowEmpty => 0,
        }
    }
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/strings.md")]
    mod strings {}
    #[doc = include_str!("../../../book/src/canonical.md")]
    mod canonical {}
    #[doc = include_str!("../../../book/src/grids.md")]
    mod grids {}
    #[doc = include_str!("../../../book/src/shuffles.md")]
    mod shuffles {}
    #[doc = include_str!("../../../book/src/attach.md")]
    mod attach {}
    #[doc = include_str!("../../../book/src/presentation.md")]
    mod presentation {}
    #[doc = include_str!("../../../book/src/matching.md")]
    mod matching {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
