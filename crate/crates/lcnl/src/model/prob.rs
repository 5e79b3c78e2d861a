//! Probability computations for the latent-class nested logit: class
//! membership, utilities, inclusive values and the full choice-probability
//! bundle. Everything is computed in log space with max-shifted
//! log-sum-exp, then exponentiated and renormalized.

use crate::error::{Error, Result};
use crate::model::obs::Observation;
use crate::model::params::{CoefBlock, ParameterSet};
use crate::model::tree::ChoiceTree;
use crate::numeric::{log_sum_exp, softmax_from_logs};

/// Class-membership probabilities H(c) from predictor vector `z` and one
/// coefficient row per class. Max-shifted, so |zθ| up to ~1e4 is safe.
pub fn class_membership(z: &[f64], membership: &[CoefBlock]) -> Result<Vec<f64>> {
    let mut logits = Vec::with_capacity(membership.len());
    for row in membership {
        if row.len() != z.len() + 1 {
            return Err(Error::DimensionMismatch {
                what: "class predictor vector".into(),
                expected: row.len() - 1,
                got: z.len(),
            });
        }
        logits.push(row.linear(z));
    }
    softmax_from_logs(&mut logits);
    Ok(logits)
}

fn gather_covariates(obs: &Observation, names: &[String], out: &mut Vec<f64>) -> Result<()> {
    out.clear();
    for name in names {
        match obs.covariate(name) {
            Some(v) if v.is_finite() => out.push(v),
            _ => {
                return Err(Error::MissingCovariate {
                    variable: name.clone(),
                    individual: obs.individual_id.clone(),
                })
            }
        }
    }
    Ok(())
}

/// Deterministic utility of one alternative for one class. The outside
/// option returns exactly zero.
pub fn alternative_utility(
    obs: &Observation,
    flat_alt: usize,
    class: usize,
    params: &ParameterSet,
    tree: &ChoiceTree,
) -> Result<f64> {
    let alt = tree.alternative(flat_alt);
    if alt.outside {
        return Ok(0.0);
    }
    let mut xs = Vec::with_capacity(alt.covariates.len());
    gather_covariates(obs, &alt.covariates, &mut xs)?;
    Ok(params.classes[class].alternatives[flat_alt].linear(&xs))
}

/// Inclusive value of a nest: log-sum-exp of its members' utilities. For a
/// degenerate nest this is exactly the single member's utility.
pub fn inclusive_value(
    obs: &Observation,
    nest_index: usize,
    class: usize,
    params: &ParameterSet,
    tree: &ChoiceTree,
) -> Result<f64> {
    let members = tree.nest_members(nest_index);
    if members.len() == 1 {
        return alternative_utility(obs, members.start, class, params, tree);
    }
    let vs: Vec<f64> = members
        .map(|m| alternative_utility(obs, m, class, params, tree))
        .collect::<Result<_>>()?;
    Ok(log_sum_exp(&vs))
}

/// Full per-observation probability decomposition.
#[derive(Debug, Clone)]
pub struct ProbabilityBundle {
    /// H(c), one entry per class.
    pub class_shares: Vec<f64>,
    /// Inclusive value per `[class][nest]`.
    pub inclusive_values: Vec<Vec<f64>>,
    /// P(n|c) per `[class][nest]`.
    pub nest_probs: Vec<Vec<f64>>,
    /// P(m|n,c) per `[class][flat alternative]`; exactly 1 in degenerate
    /// nests.
    pub within_nest: Vec<Vec<f64>>,
    /// P(m|c) = P(m|n,c)·P(n|c) per `[class][flat alternative]`.
    pub per_class: Vec<Vec<f64>>,
    /// Mixture P(m) = Σ_c H(c)·P(m|c) per flat alternative.
    pub mixture: Vec<f64>,
}

/// Choice probabilities for one observation under the full model.
///
/// Upper level: each nest's exponent is its own utility (zero for
/// degenerate nests) plus its inclusive value scaled by the nest's
/// dissimilarity (1.0 by default, which is the reference form). Lower
/// level: softmax of member utilities within each nest.
pub fn choice_probabilities(
    obs: &Observation,
    params: &ParameterSet,
    tree: &ChoiceTree,
) -> Result<ProbabilityBundle> {
    params.validate(tree)?;
    let n_classes = params.n_classes();
    let n_alts = tree.n_alternatives();
    let n_nests = tree.n_nests();

    let class_shares = class_membership(&obs.class_predictors, &params.membership)?;

    let mut inclusive_values = vec![vec![0.0; n_nests]; n_classes];
    let mut nest_probs = vec![vec![0.0; n_nests]; n_classes];
    let mut within_nest = vec![vec![0.0; n_alts]; n_classes];
    let mut per_class = vec![vec![0.0; n_alts]; n_classes];
    let mut mixture = vec![0.0; n_alts];

    let mut xs = Vec::new();
    for c in 0..n_classes {
        // Utilities once per alternative.
        let mut utilities = vec![0.0; n_alts];
        for (m, u) in utilities.iter_mut().enumerate() {
            *u = alternative_utility(obs, m, c, params, tree)?;
        }

        let mut nest_exponents = vec![0.0; n_nests];
        for (n, nest) in tree.nests().iter().enumerate() {
            let members = tree.nest_members(n);
            let gamma = if members.len() == 1 {
                utilities[members.start]
            } else {
                log_sum_exp(&utilities[members.clone()])
            };
            inclusive_values[c][n] = gamma;

            let nest_utility = match &params.classes[c].nests[n] {
                Some(block) => {
                    gather_covariates(obs, &nest.covariates, &mut xs)?;
                    block.linear(&xs)
                }
                None => 0.0,
            };
            nest_exponents[n] = nest_utility + params.dissimilarity[n] * gamma;

            // Within-nest probabilities.
            if members.len() == 1 {
                within_nest[c][members.start] = 1.0;
            } else {
                let mut logs: Vec<f64> = utilities[members.clone()].to_vec();
                softmax_from_logs(&mut logs);
                for (k, m) in members.enumerate() {
                    within_nest[c][m] = logs[k];
                }
            }
        }

        softmax_from_logs(&mut nest_exponents);
        nest_probs[c] = nest_exponents;

        for m in 0..n_alts {
            let (n, _) = tree.position(m);
            per_class[c][m] = within_nest[c][m] * nest_probs[c][n];
        }
        for m in 0..n_alts {
            mixture[m] += class_shares[c] * per_class[c][m];
        }
    }

    Ok(ProbabilityBundle {
        class_shares,
        inclusive_values,
        nest_probs,
        within_nest,
        per_class,
        mixture,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::params::ConstraintTag;
    use crate::model::tree::{alt, Alternative, Nest};
    use std::collections::HashMap;

    fn canonical_obs(choice: &str) -> Observation {
        let mut covariates = HashMap::new();
        for name in ChoiceTree::canonical().covariate_names() {
            covariates.insert(name, 0.0);
        }
        Observation {
            individual_id: "i1".into(),
            community_id: "c1".into(),
            choice: choice.into(),
            covariates,
            class_predictors: vec![],
        }
    }

    #[test]
    fn membership_symmetric_when_theta_zero() {
        let rows = vec![CoefBlock::zeros(2), CoefBlock::zeros(2)];
        let h = class_membership(&[0.3, -1.0], &rows).unwrap();
        assert!((h[0] - 0.5).abs() < 1e-15);
        assert!((h[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn membership_closed_form() {
        // zθ = (ln 3, 0) → (0.75, 0.25)
        let mut row0 = CoefBlock::zeros(0);
        row0.values[0] = 3.0_f64.ln();
        let rows = vec![row0, CoefBlock::zeros(0)];
        let h = class_membership(&[], &rows).unwrap();
        assert!((h[0] - 0.75).abs() < 1e-14);
        assert!((h[1] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn membership_dimension_mismatch_is_reported() {
        let rows = vec![CoefBlock::zeros(2)];
        let err = class_membership(&[1.0], &rows).unwrap_err();
        assert!(err.to_string().contains("class predictor"));
    }

    #[test]
    fn membership_survives_huge_logits() {
        let mut row0 = CoefBlock::zeros(1);
        row0.values = vec![0.0, 1e4];
        let rows = vec![row0, CoefBlock::zeros(1)];
        let h = class_membership(&[1.0], &rows).unwrap();
        assert!(h.iter().all(|p| p.is_finite()));
        assert!((h[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn outside_utility_is_exactly_zero() {
        let tree = ChoiceTree::canonical();
        let mut params = ParameterSet::zeros(&tree, 2, 0);
        for class in &mut params.classes {
            for block in &mut class.alternatives {
                for (v, t) in block.values.iter_mut().zip(&block.tags) {
                    if !t.is_fixed() {
                        *v = 1.7;
                    }
                }
            }
        }
        let obs = canonical_obs(alt::FORGO);
        let forgo = tree.outside_flat_index().unwrap();
        assert_eq!(
            alternative_utility(&obs, forgo, 0, &params, &tree).unwrap(),
            0.0
        );
    }

    #[test]
    fn utility_is_intercept_plus_dot() {
        let nests = vec![
            Nest {
                id: "n0".into(),
                covariates: vec![],
                alternatives: vec![Alternative {
                    id: "a".into(),
                    covariates: vec!["x1".into(), "x2".into()],
                    outside: false,
                }],
            },
            Nest {
                id: "n1".into(),
                covariates: vec![],
                alternatives: vec![Alternative {
                    id: "out".into(),
                    covariates: vec![],
                    outside: true,
                }],
            },
        ];
        let tree = ChoiceTree::new(nests).unwrap();
        let mut params = ParameterSet::zeros(&tree, 1, 0);
        params.classes[0].alternatives[0].values = vec![0.0, 2.0, -1.0];
        let obs = Observation {
            individual_id: "i".into(),
            community_id: "c".into(),
            choice: "a".into(),
            covariates: HashMap::from([("x1".into(), 3.0), ("x2".into(), 4.0)]),
            class_predictors: vec![],
        };
        assert_eq!(alternative_utility(&obs, 0, 0, &params, &tree).unwrap(), 2.0);

        // Intercept only.
        params.classes[0].alternatives[0].values = vec![1.5, 0.0, 0.0];
        assert_eq!(alternative_utility(&obs, 0, 0, &params, &tree).unwrap(), 1.5);
    }

    #[test]
    fn missing_covariate_names_variable_and_individual() {
        let tree = ChoiceTree::canonical();
        let params = ParameterSet::zeros(&tree, 1, 0);
        let mut obs = canonical_obs(alt::BRIDE_CAPTURE);
        obs.covariates.remove("kalym");
        let idx = tree.flat_index(alt::BRIDE_CAPTURE).unwrap();
        let err = alternative_utility(&obs, idx, 0, &params, &tree).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("kalym") && msg.contains("i1"));
    }

    #[test]
    fn degenerate_inclusive_value_is_member_utility() {
        let tree = ChoiceTree::canonical();
        let mut params = ParameterSet::zeros(&tree, 1, 0);
        let cap = tree.flat_index(alt::BRIDE_CAPTURE).unwrap();
        params.classes[0].alternatives[cap].values[0] = -0.7;
        let obs = canonical_obs(alt::BRIDE_CAPTURE);
        let gamma = inclusive_value(&obs, 2, 0, &params, &tree).unwrap();
        assert_eq!(gamma, -0.7);
    }

    #[test]
    fn two_equal_members_give_ln2() {
        let tree = ChoiceTree::canonical();
        let params = ParameterSet::zeros(&tree, 1, 0);
        let obs = canonical_obs(alt::LOVE_MARRIAGE);
        let gamma = inclusive_value(&obs, 0, 0, &params, &tree).unwrap();
        assert!((gamma - 2.0_f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn all_zero_parameters_give_the_ln2_bonus_split() {
        // Nest exponents: choice = ln 2, others 0, so P(choice nest) = 2/5
        // and each alternative gets probability 1/5.
        let tree = ChoiceTree::canonical();
        let params = ParameterSet::zeros(&tree, 2, 0);
        let obs = canonical_obs(alt::ARRANGED_MARRIAGE);
        let bundle = choice_probabilities(&obs, &params, &tree).unwrap();
        assert!((bundle.nest_probs[0][0] - 0.4).abs() < 1e-12);
        for m in 0..tree.n_alternatives() {
            assert!((bundle.mixture[m] - 0.2).abs() < 1e-12, "m={m}");
        }
        assert!((bundle.inclusive_values[0][0] - 2.0_f64.ln()).abs() < 1e-15);
        for c in 0..2 {
            let cap = tree.flat_index(alt::BRIDE_CAPTURE).unwrap();
            assert_eq!(bundle.within_nest[c][cap], 1.0);
        }
    }

    #[test]
    fn distributions_sum_to_one() {
        let tree = ChoiceTree::canonical();
        let mut params = ParameterSet::zeros(&tree, 2, 1);
        // Scatter some nonzero values.
        let mut v = 0.13;
        for class in &mut params.classes {
            for block in class
                .alternatives
                .iter_mut()
                .chain(class.nests.iter_mut().flatten())
            {
                for (x, t) in block.values.iter_mut().zip(&block.tags) {
                    if !t.is_fixed() {
                        *x = v;
                        v = -v * 1.1;
                    }
                }
            }
        }
        params.membership[0].values = vec![0.4, -0.9];
        let mut obs = canonical_obs(alt::FORGO);
        obs.class_predictors = vec![1.0];
        for (k, val) in obs.covariates.values_mut().enumerate() {
            *val = (k as f64) * 0.5 - 1.0;
        }
        let bundle = choice_probabilities(&obs, &params, &tree).unwrap();
        assert!((bundle.mixture.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((bundle.class_shares.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for c in 0..2 {
            assert!((bundle.nest_probs[c].iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for n in 0..tree.n_nests() {
                let s: f64 = tree.nest_members(n).map(|m| bundle.within_nest[c][m]).sum();
                assert!((s - 1.0).abs() < 1e-12);
            }
            assert!((bundle.per_class[c].iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn overflow_safe_at_magnitude_700() {
        let tree = ChoiceTree::canonical();
        let mut params = ParameterSet::zeros(&tree, 1, 0);
        let love = tree.flat_index(alt::LOVE_MARRIAGE).unwrap();
        let cap = tree.flat_index(alt::BRIDE_CAPTURE).unwrap();
        params.classes[0].alternatives[love].values[0] = 700.0;
        params.classes[0].alternatives[cap].values[0] = -700.0;
        let obs = canonical_obs(alt::LOVE_MARRIAGE);
        let bundle = choice_probabilities(&obs, &params, &tree).unwrap();
        assert!(bundle.mixture.iter().all(|p| p.is_finite()));
        assert!((bundle.mixture.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(bundle.inclusive_values[0].iter().all(|g| g.is_finite()));
    }

    #[test]
    fn dissimilarity_scalar_rescales_nest_exponent() {
        let tree = ChoiceTree::canonical();
        let mut params = ParameterSet::zeros(&tree, 1, 0);
        params.dissimilarity[0] = 0.5;
        params.dissimilarity_tags[0] = ConstraintTag::Free;
        let obs = canonical_obs(alt::FORGO);
        let bundle = choice_probabilities(&obs, &params, &tree).unwrap();
        // Choice-nest exponent becomes 0.5·ln2 → weight sqrt(2).
        let w = 2.0_f64.sqrt();
        assert!((bundle.nest_probs[0][0] - w / (w + 3.0)).abs() < 1e-12);
    }
}
