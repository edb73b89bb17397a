//! Partial operations on posets and their extension to total operations with a
//! prescribed property.

mod brute;
mod check;
mod extend;
mod family;
mod partial;
mod property;

pub use brute::{all_extensions, brute_force_extension_exists, first_extension_in_order};
pub use check::{check_necessary, defining_rules, necessary_rules, verify_property, Rule, RuleViolation};
pub use extend::{extend, extend_with, iterate_idempotent, meet_idempotent_family, ExtendOptions};
pub use family::{extend_family, ComparabilitySpec};
pub use partial::PartialOp;
pub use property::{LatticeTerm, MixedBound, MixedSpec, PropertySpec, UnaryCase};
