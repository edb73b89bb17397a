//! Superamalgamation: the poset amalgam over `A ∪ B`, its completions for (semi)lattices,
//! the Boolean free product, structures with added operations, and amalgamation into union
//! for transitive relations.

mod boolean;
mod expanded;
mod instance;
mod jonsson;
mod relational;

pub use boolean::boolean_amalgam;
pub use expanded::{amalgamate_expanded, restricts_to, Comparability};
pub use instance::{verify_superamalgam, AmalgamationInstance, Interpolant, SuperamalgamReport, SuperamalgamResult};
pub use jonsson::{amalgamate, four_piece_relation, jonsson_poset_amalgam};
pub use relational::{union_relational_amalgam, Monotonicity, RelationalAmalgam, RelationalStructure};
