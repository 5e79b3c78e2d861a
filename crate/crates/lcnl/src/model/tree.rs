//! The choice tree: alternatives grouped into nests, each with its own
//! utility covariate list.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canonical covariate names used by [`ChoiceTree::canonical`].
pub mod covariate {
    pub const AKSAKAL: &str = "aksakal";
    pub const POLICE: &str = "police";
    pub const KALYM: &str = "kalym";
    pub const INCOME: &str = "income";
    pub const SECOND_HOME: &str = "second_home";
    pub const VEHICLE: &str = "vehicle";
    pub const LOAN: &str = "loan";
    pub const EVENT_HOST: &str = "event_host";
    pub const EMPLOYED: &str = "employed";
}

/// Canonical alternative and nest ids used by [`ChoiceTree::canonical`].
pub mod alt {
    pub const LOVE_MARRIAGE: &str = "love_marriage";
    pub const MOCK_KIDNAPPING: &str = "mock_kidnapping";
    pub const ARRANGED_MARRIAGE: &str = "arranged_marriage";
    pub const BRIDE_CAPTURE: &str = "bride_capture";
    pub const FORGO: &str = "forgo";
    pub const CHOICE_NEST: &str = "choice";
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Alternative {
    pub id: String,
    /// Covariates entering this alternative's utility (intercept implicit).
    pub covariates: Vec<String>,
    /// Marks the outside option, whose utility is normalized to zero.
    #[serde(default)]
    pub outside: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Nest {
    pub id: String,
    /// Covariates entering the nest-level utility. Ignored for degenerate
    /// nests, which share their single alternative's utility.
    #[serde(default)]
    pub covariates: Vec<String>,
    pub alternatives: Vec<Alternative>,
}

impl Nest {
    pub fn is_degenerate(&self) -> bool {
        self.alternatives.len() == 1
    }
}

/// A validated tree of nests and alternatives.
///
/// Alternatives carry two kinds of index: a `(nest, member)` position and a
/// flat index in tree order. The flat order is the canonical order for
/// probability vectors and report columns.
#[derive(Debug, Clone)]
pub struct ChoiceTree {
    nests: Vec<Nest>,
    flat: Vec<(usize, usize)>,
    outside_flat: Option<usize>,
}

impl ChoiceTree {
    pub fn new(nests: Vec<Nest>) -> Result<Self> {
        if nests.is_empty() {
            return Err(Error::InvalidTree("tree has no nests".into()));
        }
        let mut nest_ids = HashSet::new();
        let mut alt_ids = HashSet::new();
        let mut flat = Vec::new();
        let mut outside_flat = None;
        for (ni, nest) in nests.iter().enumerate() {
            if !nest_ids.insert(nest.id.clone()) {
                return Err(Error::InvalidTree(format!("duplicate nest id '{}'", nest.id)));
            }
            if nest.alternatives.is_empty() {
                return Err(Error::InvalidTree(format!(
                    "nest '{}' contains no alternatives",
                    nest.id
                )));
            }
            for (mi, a) in nest.alternatives.iter().enumerate() {
                if !alt_ids.insert(a.id.clone()) {
                    return Err(Error::InvalidTree(format!(
                        "duplicate alternative id '{}'",
                        a.id
                    )));
                }
                if a.outside {
                    if outside_flat.is_some() {
                        return Err(Error::InvalidTree(
                            "more than one outside option".into(),
                        ));
                    }
                    if nest.alternatives.len() != 1 {
                        return Err(Error::InvalidTree(format!(
                            "outside option '{}' must sit in a degenerate nest",
                            a.id
                        )));
                    }
                    if !a.covariates.is_empty() {
                        return Err(Error::InvalidTree(format!(
                            "outside option '{}' must have an empty covariate list",
                            a.id
                        )));
                    }
                    outside_flat = Some(flat.len());
                }
                flat.push((ni, mi));
            }
        }
        Ok(ChoiceTree {
            nests,
            flat,
            outside_flat,
        })
    }

    /// The five-alternative tree of the reference model: a two-member choice
    /// nest (love marriage, mock kidnapping), degenerate nests for arranged
    /// marriage and bride capture, and a zero-utility outside option.
    pub fn canonical() -> Self {
        use covariate::*;
        let base = vec![
            KALYM.to_string(),
            INCOME.to_string(),
            SECOND_HOME.to_string(),
            VEHICLE.to_string(),
            LOAN.to_string(),
            EVENT_HOST.to_string(),
            EMPLOYED.to_string(),
        ];
        let mut with_aksakal = vec![AKSAKAL.to_string()];
        with_aksakal.extend(base.iter().cloned());
        let mut capture_covs = vec![AKSAKAL.to_string(), POLICE.to_string()];
        capture_covs.extend(base.iter().cloned());

        let nests = vec![
            Nest {
                id: alt::CHOICE_NEST.to_string(),
                covariates: with_aksakal.clone(),
                alternatives: vec![
                    Alternative {
                        id: alt::LOVE_MARRIAGE.to_string(),
                        covariates: base.clone(),
                        outside: false,
                    },
                    Alternative {
                        id: alt::MOCK_KIDNAPPING.to_string(),
                        covariates: with_aksakal,
                        outside: false,
                    },
                ],
            },
            Nest {
                id: "arranged".to_string(),
                covariates: vec![],
                alternatives: vec![Alternative {
                    id: alt::ARRANGED_MARRIAGE.to_string(),
                    covariates: base.clone(),
                    outside: false,
                }],
            },
            Nest {
                id: "capture".to_string(),
                covariates: vec![],
                alternatives: vec![Alternative {
                    id: alt::BRIDE_CAPTURE.to_string(),
                    covariates: capture_covs,
                    outside: false,
                }],
            },
            Nest {
                id: "forgo".to_string(),
                covariates: vec![],
                alternatives: vec![Alternative {
                    id: alt::FORGO.to_string(),
                    covariates: vec![],
                    outside: true,
                }],
            },
        ];
        ChoiceTree::new(nests).expect("canonical tree is valid")
    }

    pub fn nests(&self) -> &[Nest] {
        &self.nests
    }

    pub fn n_nests(&self) -> usize {
        self.nests.len()
    }

    pub fn n_alternatives(&self) -> usize {
        self.flat.len()
    }

    pub fn alternative(&self, flat_index: usize) -> &Alternative {
        let (n, m) = self.flat[flat_index];
        &self.nests[n].alternatives[m]
    }

    /// `(nest index, member index)` for a flat alternative index.
    pub fn position(&self, flat_index: usize) -> (usize, usize) {
        self.flat[flat_index]
    }

    pub fn alternatives(&self) -> impl Iterator<Item = &Alternative> {
        self.flat.iter().map(|&(n, m)| &self.nests[n].alternatives[m])
    }

    pub fn alt_ids(&self) -> Vec<&str> {
        self.alternatives().map(|a| a.id.as_str()).collect()
    }

    pub fn flat_index(&self, id: &str) -> Option<usize> {
        self.alternatives().position(|a| a.id == id)
    }

    /// Flat index range of a nest's members (members are contiguous).
    pub fn nest_members(&self, nest_index: usize) -> std::ops::Range<usize> {
        let start = self
            .flat
            .iter()
            .position(|&(n, _)| n == nest_index)
            .expect("every nest has members");
        let len = self.nests[nest_index].alternatives.len();
        start..start + len
    }

    pub fn outside_flat_index(&self) -> Option<usize> {
        self.outside_flat
    }

    /// Union of all alternative- and nest-level covariate names, in first-use
    /// order. This is the set every observation must supply.
    pub fn covariate_names(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for nest in &self.nests {
            for a in &nest.alternatives {
                for c in &a.covariates {
                    if seen.insert(c.clone()) {
                        out.push(c.clone());
                    }
                }
            }
            if !nest.is_degenerate() {
                for c in &nest.covariates {
                    if seen.insert(c.clone()) {
                        out.push(c.clone());
                    }
                }
            }
        }
        out
    }
}
