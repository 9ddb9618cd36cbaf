//! Circulant tournaments on Z_{2n+1}: residue-set arithmetic, lexicographic
//! composition, exact acyclic and C3-free disconnection, and census tooling.

pub mod census;
pub mod composition;
pub mod config;
pub mod disconnection;
pub mod tournament;
pub mod zmod;

pub use composition::{compose, decompose, factorize, is_simple, FactorizationTree};
pub use disconnection::{omega, omega3, SearchLimits, Variant};
pub use tournament::{CirculantTournament, SymbolSet, VertexPartition};
pub use zmod::{ResidueSet, Subgroup};
