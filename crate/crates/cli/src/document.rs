//! The TOML network document.
//!
//! ```toml
//! variables = ["X", "Y"]
//! edges = [["Y", "X"], ["X", "Y"]]
//!
//! [cpts.X]
//! parents = ["Y"]
//! rows = { "0" = "3/4", "1" = "1/2" }
//!
//! [cpts.Y]
//! parents = ["X"]
//! rows = { "0" = "3/4", "1" = "1/2" }
//!
//! [iota]
//! "" = "1"
//! ```
//!
//! Row and ι keys are bitstrings over the sorted parent (initial) names, the
//! first name being the leftmost bit; values are `Pr(node = T | row)`.

use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use gbn_core::model::CptDraft;
use gbn_core::{
    format_rational, parse_rational, Gbn, GbnDraft, JointDistribution, Rational, VariableSet,
};
use serde::{Deserialize, Serialize};

/// A probability literal: `"p/q"`, a decimal string, or a bare integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Text(String),
    Integer(i64),
}

impl Literal {
    fn parse(&self, at: &str) -> Result<Rational> {
        match self {
            Literal::Text(s) => {
                parse_rational(s).with_context(|| format!("invalid probability at {at}"))
            }
            Literal::Integer(i) => Ok(Rational::from_integer((*i).into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CptDocument {
    #[serde(default)]
    pub parents: Vec<String>,
    pub rows: BTreeMap<String, Literal>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GbnDocument {
    pub variables: Vec<String>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub cpts: BTreeMap<String, CptDocument>,
    pub iota: Option<BTreeMap<String, Literal>>,
}

impl GbnDocument {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).context("malformed network document")
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).context("serializing network document")
    }

    /// The unvalidated draft; probability literals must already parse.
    pub fn to_draft(&self) -> Result<GbnDraft> {
        let mut cpts = BTreeMap::new();
        for (node, cpt) in &self.cpts {
            let rows = cpt
                .rows
                .iter()
                .map(|(key, lit)| {
                    Ok((
                        key.clone(),
                        lit.parse(&format!("cpts.{node}.rows.\"{key}\""))?,
                    ))
                })
                .collect::<Result<_>>()?;
            cpts.insert(
                node.clone(),
                CptDraft {
                    parents: cpt.parents.clone(),
                    rows,
                },
            );
        }
        let iota = match &self.iota {
            Some(map) => Some(
                map.iter()
                    .map(|(key, lit)| Ok((key.clone(), lit.parse(&format!("iota.\"{key}\""))?)))
                    .collect::<Result<_>>()?,
            ),
            None => None,
        };
        Ok(GbnDraft {
            variables: self.variables.clone(),
            edges: self.edges.clone(),
            cpts,
            iota,
        })
    }

    pub fn from_gbn(g: &Gbn) -> Self {
        let draft = g.to_draft();
        let lit = |p: &Rational| Literal::Text(format_rational(p));
        GbnDocument {
            variables: draft.variables,
            edges: draft.edges,
            cpts: draft
                .cpts
                .into_iter()
                .map(|(node, cpt)| {
                    let rows = cpt.rows.iter().map(|(k, p)| (k.clone(), lit(p))).collect();
                    (
                        node,
                        CptDocument {
                            parents: cpt.parents,
                            rows,
                        },
                    )
                })
                .collect(),
            iota: draft
                .iota
                .map(|m| m.iter().map(|(k, p)| (k.clone(), lit(p))).collect()),
        }
    }
}

pub fn load_document(path: &std::path::Path) -> Result<GbnDocument> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    GbnDocument::parse(&text).with_context(|| format!("in {}", path.display()))
}

/// Reads and builds a network, failing with the validation report if needed.
pub fn load_gbn(path: &std::path::Path) -> Result<Gbn> {
    let draft = load_document(path)?.to_draft()?;
    Ok(draft.build()?)
}

/// A distribution over `vars` from a TOML table of bitstring keys; absent keys are zero.
pub fn parse_distribution(text: &str, vars: &VariableSet) -> Result<JointDistribution> {
    let table: BTreeMap<String, Literal> =
        toml::from_str(text).context("malformed distribution document")?;
    let mut probs = vec![Rational::from_integer(0.into()); vars.num_assignments()];
    for (key, lit) in &table {
        if key.len() != vars.len() || !key.chars().all(|c| c == '0' || c == '1') {
            bail!("key \"{key}\" is not a bitstring over {vars}");
        }
        let index = usize::from_str_radix(key, 2).unwrap_or(0);
        probs[index] = lit.parse(&format!("\"{key}\""))?;
    }
    Ok(JointDistribution::new(vars.clone(), probs)?)
}
