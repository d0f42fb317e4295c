//! Shuffles of `Δ[r] × Δ[s]`, the filtration `A^σ`, generalized horn
//! certificates, and the shuffle-by-shuffle attachment of grid images.

mod attach;
mod product;
mod shuffle;

pub use attach::{attach_diagram, attach_diagram_with_order, AttachmentCertificate, AttachmentRecord};
pub use product::{
    build_a, excluded_by_corners, excluded_faces, faces_in_a, horn_certificate, in_a, in_boundary,
    is_inner_generalized_horn, HornCertificate, HornKind, ProductSubset, Vertex,
};
pub use shuffle::{enumerate_shuffles, is_linear_extension, shuffle_poset_dot, Move, Shuffle};
