//! Matchings and acyclic matchings in abelian groups and in field extensions.
//!
//! The group side decides, for finite sets `A`, `B` of an abelian group,
//! whether a bijection `f: A -> B` with `a + f(a) ∉ A` exists, enumerates such
//! bijections and classifies them by their multiset of sums. The linear side
//! does the same for subspaces of a field extension using exact arithmetic.
//! Scanners run these procedures over whole families of pairs and emit
//! replayable certificates.

pub mod certificate;
pub mod error;
pub mod exec;
pub mod field;
pub mod free_scan;
pub mod group;
pub mod group_scan;
pub mod linear;
pub mod matching;
pub mod verdict;

pub use certificate::WitnessCertificate;
pub use error::{Error, Result};
pub use group::{AbelianGroup, GroupElement, SubsetPair};
pub use matching::{Fingerprint, Matching};
pub use verdict::{Tristate, Verdict};

pub const TOOL_NAME: &str = "matchscope";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
