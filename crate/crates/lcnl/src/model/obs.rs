use std::collections::HashMap;

use serde::{Deserialize, Serialize};

/// One individual's observed choice, utility covariates and class
/// predictors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Observation {
    pub individual_id: String,
    pub community_id: String,
    /// Chosen alternative id.
    pub choice: String,
    /// Utility covariates by name (individual, household and community
    /// level alike; the tree decides which enter which utility).
    pub covariates: HashMap<String, f64>,
    /// Class-membership predictors, aligned with the dataset's predictor
    /// name list (no leading 1; the intercept is implicit).
    pub class_predictors: Vec<f64>,
}

impl Observation {
    pub fn covariate(&self, name: &str) -> Option<f64> {
        self.covariates.get(name).copied()
    }
}
