//! Spin-chain Hamiltonians as weighted Pauli sums, plus the translation-invariant
//! term templates model files are written in.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pauli::{PauliAxis, PauliString};

/// Real linear combination of Pauli strings on `sites` sites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hamiltonian {
    name: String,
    sites: usize,
    terms: Vec<(f64, PauliString)>,
}

impl Hamiltonian {
    pub fn new(name: impl Into<String>, sites: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        for (c, s) in &terms {
            if s.len() != sites {
                return Err(Error::Dimension { expected: sites, found: s.len() });
            }
            if !c.is_finite() {
                return Err(Error::Invalid(format!("non-finite coefficient on {s}")));
            }
        }
        Ok(Self { name: name.into(), sites, terms })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn max_weight(&self) -> usize {
        self.terms.iter().map(|(_, s)| s.weight()).max().unwrap_or(0)
    }

    /// Summed coefficient of every term equal to `s` (0 when absent).
    pub fn coefficient_of(&self, s: &PauliString) -> f64 {
        self.terms.iter().filter(|(_, t)| t == s).map(|(c, _)| c).sum()
    }

    /// Constant offset carried by identity terms.
    pub fn identity_coefficient(&self) -> f64 {
        self.terms.iter().filter(|(_, s)| s.is_identity()).map(|(c, _)| c).sum()
    }

    /// Content hash over the canonical (sorted, merged) term list; insensitive to term order and name.
    pub fn fingerprint(&self) -> String {
        let mut merged = std::collections::BTreeMap::<String, f64>::new();
        for (c, s) in &self.terms {
            *merged.entry(s.to_string()).or_default() += c;
        }
        let mut hasher = Sha256::new();
        hasher.update(format!("L={};", self.sites));
        for (s, c) in merged {
            if c != 0.0 {
                hasher.update(format!("{s}:{c:e};"));
            }
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// One translation-invariant term `coefficient * word[0]_{j+offsets[0]} word[1]_{j+offsets[1]} ...`,
/// repeated for every site `j` with periodic wrap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermTemplate {
    pub coefficient: f64,
    pub word: String,
    #[serde(default)]
    pub offsets: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub name: String,
    pub terms: Vec<TermTemplate>,
}

impl ModelFile {
    pub fn expand(&self, sites: usize) -> Result<Hamiltonian> {
        if sites < 2 {
            return Err(Error::Invalid(format!("need at least 2 sites, got {sites}")));
        }
        let mut terms = Vec::new();
        for t in &self.terms {
            let axes = t
                .word
                .chars()
                .map(|c| match PauliAxis::from_char(c) {
                    Some(PauliAxis::I) | None => {
                        Err(Error::Invalid(format!("term word \"{}\" must use only X, Y, Z", t.word)))
                    }
                    Some(a) => Ok(a),
                })
                .collect::<Result<Vec<_>>>()?;
            if axes.is_empty() {
                return Err(Error::Invalid("empty term word".into()));
            }
            let offsets: Vec<usize> = t.offsets.clone().unwrap_or_else(|| (0..axes.len()).collect());
            if offsets.len() != axes.len() {
                return Err(Error::Invalid(format!(
                    "term \"{}\" has {} axes but {} offsets",
                    t.word,
                    axes.len(),
                    offsets.len()
                )));
            }
            let distinct: BTreeSet<usize> = offsets.iter().map(|o| o % sites).collect();
            if distinct.len() != offsets.len() {
                return Err(Error::Invalid(format!(
                    "term \"{}\" places two axes on one site for L={sites}",
                    t.word
                )));
            }
            for j in 0..sites {
                let ops: Vec<(usize, PauliAxis)> =
                    offsets.iter().zip(&axes).map(|(&o, &a)| ((j + o) % sites, a)).collect();
                terms.push((t.coefficient, PauliString::from_sparse(sites, &ops)));
            }
        }
        Hamiltonian::new(self.name.clone(), sites, terms)
    }
}

fn tpl(coefficient: f64, word: &str) -> TermTemplate {
    TermTemplate { coefficient, word: word.into(), offsets: None }
}

/// Model templates shipped with the library: `main`, `H1`, `H2`, `H3`, and `ising`
/// (classical `-Z Z`, handy for sanity checks).
pub fn builtin_model(name: &str) -> Option<ModelFile> {
    let terms = match name {
        "main" => vec![tpl(0.25, "ZZ"), tpl(0.3, "YY"), tpl(0.3, "XX"), tpl(0.25, "Z"), tpl(0.3, "X")],
        "H1" | "h1" => vec![tpl(1.0, "X"), tpl(-1.0, "ZZ")],
        "H2" | "h2" => vec![tpl(2.0, "X"), tpl(-1.0, "ZZ")],
        "H3" | "h3" => vec![tpl(0.12, "ZZ"), tpl(0.25, "XX"), tpl(0.25, "YY"), tpl(-2.0, "Z")],
        "ising" => vec![tpl(-1.0, "ZZ")],
        _ => return None,
    };
    Some(ModelFile { name: name.to_string(), terms })
}

pub const BUILTIN_MODELS: [&str; 5] = ["main", "H1", "H2", "H3", "ising"];

pub fn builtin(name: &str, sites: usize) -> Result<Hamiltonian> {
    builtin_model(name)
        .ok_or_else(|| Error::Invalid(format!("unknown builtin model \"{name}\"")))?
        .expand(sites)
}
