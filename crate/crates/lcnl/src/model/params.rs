//! Parameter containers: per-class coefficient blocks for alternatives and
//! nests, class-membership coefficients, and per-parameter constraints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::tree::ChoiceTree;

/// Constraint attached to a single parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintTag {
    Free,
    NonNeg,
    NonPos,
    Fixed(f64),
}

impl ConstraintTag {
    pub fn admits(&self, value: f64) -> bool {
        match *self {
            ConstraintTag::Free => value.is_finite(),
            ConstraintTag::NonNeg => value >= 0.0,
            ConstraintTag::NonPos => value <= 0.0,
            ConstraintTag::Fixed(v) => value == v,
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, ConstraintTag::Fixed(_))
    }

    /// Box bounds implied by the tag for a bound magnitude `b`.
    pub fn bounds(&self, b: f64) -> (f64, f64) {
        match *self {
            ConstraintTag::Free => (-b, b),
            ConstraintTag::NonNeg => (0.0, b),
            ConstraintTag::NonPos => (-b, 0.0),
            ConstraintTag::Fixed(v) => (v, v),
        }
    }
}

impl std::fmt::Display for ConstraintTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstraintTag::Free => write!(f, "free"),
            ConstraintTag::NonNeg => write!(f, "nonneg"),
            ConstraintTag::NonPos => write!(f, "nonpos"),
            ConstraintTag::Fixed(v) => write!(f, "fixed({v})"),
        }
    }
}

/// Intercept plus one coefficient per covariate. `values[0]` is the
/// intercept; `values[1 + k]` pairs with covariate `k` of the owning
/// alternative, nest or predictor list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefBlock {
    pub values: Vec<f64>,
    pub tags: Vec<ConstraintTag>,
}

impl CoefBlock {
    pub fn zeros(n_covariates: usize) -> Self {
        CoefBlock {
            values: vec![0.0; n_covariates + 1],
            tags: vec![ConstraintTag::Free; n_covariates + 1],
        }
    }

    pub fn fixed_zero(n_covariates: usize) -> Self {
        CoefBlock {
            values: vec![0.0; n_covariates + 1],
            tags: vec![ConstraintTag::Fixed(0.0); n_covariates + 1],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn intercept(&self) -> f64 {
        self.values[0]
    }

    /// intercept + dot(coefficients, covariate values).
    pub fn linear(&self, covariate_values: &[f64]) -> f64 {
        debug_assert_eq!(covariate_values.len() + 1, self.values.len());
        let mut v = self.values[0];
        for (b, x) in self.values[1..].iter().zip(covariate_values) {
            v += b * x;
        }
        v
    }
}

/// All coefficient blocks for one latent class, indexed as the tree is.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassParams {
    /// One block per flat alternative index.
    pub alternatives: Vec<CoefBlock>,
    /// One block per nest; `None` for degenerate nests, which have no
    /// separate nest utility.
    pub nests: Vec<Option<CoefBlock>>,
}

/// Complete parameter set: per-class utility coefficients, class-membership
/// coefficients and optional per-nest dissimilarity scalars.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParameterSet {
    pub classes: Vec<ClassParams>,
    /// One row per class over the class-predictor list (`values[0]` is the
    /// intercept).
    pub membership: Vec<CoefBlock>,
    /// Scale on each nest's inclusive value in the upper-level logit.
    /// Fixed at 1.0 unless explicitly freed; 1.0 reproduces the reference
    /// probability forms exactly.
    pub dissimilarity: Vec<f64>,
    pub dissimilarity_tags: Vec<ConstraintTag>,
}

impl ParameterSet {
    /// All-zero parameters of the right shape: free everywhere except the
    /// outside option, whose block is fixed at zero.
    pub fn zeros(tree: &ChoiceTree, n_classes: usize, n_class_predictors: usize) -> Self {
        let outside = tree.outside_flat_index();
        let class = ClassParams {
            alternatives: (0..tree.n_alternatives())
                .map(|i| {
                    let n_cov = tree.alternative(i).covariates.len();
                    if Some(i) == outside {
                        CoefBlock::fixed_zero(n_cov)
                    } else {
                        CoefBlock::zeros(n_cov)
                    }
                })
                .collect(),
            nests: tree
                .nests()
                .iter()
                .map(|n| {
                    if n.is_degenerate() {
                        None
                    } else {
                        Some(CoefBlock::zeros(n.covariates.len()))
                    }
                })
                .collect(),
        };
        ParameterSet {
            classes: vec![class; n_classes],
            membership: vec![CoefBlock::zeros(n_class_predictors); n_classes],
            dissimilarity: vec![1.0; tree.n_nests()],
            dissimilarity_tags: vec![ConstraintTag::Fixed(1.0); tree.n_nests()],
        }
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    /// Checks block shapes against the tree and that every value satisfies
    /// its tag; the outside option must be fixed at zero.
    pub fn validate(&self, tree: &ChoiceTree) -> Result<()> {
        if self.classes.is_empty() {
            return Err(Error::InvalidConfig("parameter set has no classes".into()));
        }
        if self.membership.len() != self.classes.len() {
            return Err(Error::DimensionMismatch {
                what: "membership rows".into(),
                expected: self.classes.len(),
                got: self.membership.len(),
            });
        }
        let z_len = self.membership[0].len();
        for row in &self.membership {
            if row.len() != z_len {
                return Err(Error::DimensionMismatch {
                    what: "membership row".into(),
                    expected: z_len,
                    got: row.len(),
                });
            }
        }
        if self.dissimilarity.len() != tree.n_nests() {
            return Err(Error::DimensionMismatch {
                what: "dissimilarity".into(),
                expected: tree.n_nests(),
                got: self.dissimilarity.len(),
            });
        }
        for (c, class) in self.classes.iter().enumerate() {
            if class.alternatives.len() != tree.n_alternatives() {
                return Err(Error::DimensionMismatch {
                    what: format!("class {c} alternative blocks"),
                    expected: tree.n_alternatives(),
                    got: class.alternatives.len(),
                });
            }
            if class.nests.len() != tree.n_nests() {
                return Err(Error::DimensionMismatch {
                    what: format!("class {c} nest blocks"),
                    expected: tree.n_nests(),
                    got: class.nests.len(),
                });
            }
            for (i, block) in class.alternatives.iter().enumerate() {
                let alt = tree.alternative(i);
                if block.len() != alt.covariates.len() + 1 {
                    return Err(Error::DimensionMismatch {
                        what: format!("class {c} coefficients for '{}'", alt.id),
                        expected: alt.covariates.len() + 1,
                        got: block.len(),
                    });
                }
                if alt.outside {
                    let all_fixed_zero = block
                        .tags
                        .iter()
                        .zip(&block.values)
                        .all(|(t, &v)| *t == ConstraintTag::Fixed(0.0) && v == 0.0);
                    if !all_fixed_zero {
                        return Err(Error::ConstraintViolated {
                            name: format!("{}/intercept", alt.id),
                            value: block.values[0],
                            tag: "fixed(0) (outside-option normalization)".into(),
                        });
                    }
                }
            }
            for (n, nest) in tree.nests().iter().enumerate() {
                match (&class.nests[n], nest.is_degenerate()) {
                    (None, true) => {}
                    (Some(block), false) => {
                        if block.len() != nest.covariates.len() + 1 {
                            return Err(Error::DimensionMismatch {
                                what: format!("class {c} nest coefficients for '{}'", nest.id),
                                expected: nest.covariates.len() + 1,
                                got: block.len(),
                            });
                        }
                    }
                    (Some(_), true) => {
                        return Err(Error::InvalidConfig(format!(
                            "degenerate nest '{}' must not carry nest coefficients",
                            nest.id
                        )));
                    }
                    (None, false) => {
                        return Err(Error::InvalidConfig(format!(
                            "non-degenerate nest '{}' is missing nest coefficients",
                            nest.id
                        )));
                    }
                }
            }
        }
        self.check_tags(tree)?;
        Ok(())
    }

    fn check_tags(&self, tree: &ChoiceTree) -> Result<()> {
        let violation = |name: String, value: f64, tag: ConstraintTag| {
            Err(Error::ConstraintViolated {
                name,
                value,
                tag: tag.to_string(),
            })
        };
        for (c, class) in self.classes.iter().enumerate() {
            for (i, block) in class.alternatives.iter().enumerate() {
                for (k, (&v, &t)) in block.values.iter().zip(&block.tags).enumerate() {
                    if !t.admits(v) {
                        return violation(
                            format!("class{}/{}/{}", c + 1, tree.alternative(i).id, k),
                            v,
                            t,
                        );
                    }
                }
            }
            for (n, block) in class.nests.iter().enumerate() {
                if let Some(block) = block {
                    for (k, (&v, &t)) in block.values.iter().zip(&block.tags).enumerate() {
                        if !t.admits(v) {
                            return violation(
                                format!("class{}/nest:{}/{}", c + 1, tree.nests()[n].id, k),
                                v,
                                t,
                            );
                        }
                    }
                }
            }
        }
        for (c, row) in self.membership.iter().enumerate() {
            for (k, (&v, &t)) in row.values.iter().zip(&row.tags).enumerate() {
                if !t.admits(v) {
                    return violation(format!("class{}/theta/{}", c + 1, k), v, t);
                }
            }
        }
        for (n, (&v, &t)) in self
            .dissimilarity
            .iter()
            .zip(&self.dissimilarity_tags)
            .enumerate()
        {
            if !t.admits(v) {
                return violation(format!("dissimilarity/{}", tree.nests()[n].id), v, t);
            }
        }
        Ok(())
    }
}
