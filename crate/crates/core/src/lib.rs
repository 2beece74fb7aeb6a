//! Exact computations in finite p-groups of unitriangular matrices whose
//! entries are multilinear forms, together with the machinery needed to check
//! group laws, verbal subgroups, products of Burnside varieties, tensor-rank
//! certificates over prime fields, finite wreath products and Nielsen
//! reduction in free groups.
//!
//! Every group used by the law checker implements [`FiniteGroup`], whose
//! elements are canonical `u32` encodings. That uniform encoding is what lets
//! direct products and wreath products be assembled from arbitrary factors at
//! run time.

pub mod descriptor;
pub mod error;
pub mod forms;
pub mod gf;
pub mod groups;
pub mod identity;
pub mod rankcert;
pub mod rng;
pub mod unitri;
pub mod words;
pub mod wreath;

pub use descriptor::parse_group;
pub use error::{Error, Result};
pub use forms::{MultilinearForm, Vector};
pub use gf::{FieldElement, PrimeField};
pub use groups::{Cyclic, DirectProduct, Elem, FiniteGroup, GroupRef, Quaternion, Symmetric};
pub use identity::{LawCheckReport, LawMode, Verdict};
pub use rankcert::{RankCertificate, RankSearchParams, SumSearch};
pub use unitri::{UnitriGroup, UnitriMatrix, UtParams};
pub use words::{GroupWord, NielsenMove, WordTuple};
pub use wreath::WreathProduct;

/// Version string embedded in every serialized report and certificate.
pub const FORMAT_VERSION: u32 = 1;
