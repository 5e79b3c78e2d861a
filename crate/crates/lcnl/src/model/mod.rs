//! Choice tree, parameters and the nested-logit probability core.

pub mod obs;
pub mod params;
pub mod prob;
pub mod tree;

pub use obs::Observation;
pub use params::{ClassParams, CoefBlock, ConstraintTag, ParameterSet};
pub use prob::{
    alternative_utility, choice_probabilities, class_membership, inclusive_value,
    ProbabilityBundle,
};
pub use tree::{Alternative, ChoiceTree, Nest};
