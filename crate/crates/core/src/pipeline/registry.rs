use std::fmt;

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

/// The seven model families a run can include.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelKind {
    Co,
    Ppmi,
    Tsvd,
    Isvd,
    Ri,
    Sgns,
    Cbow,
}

impl ModelKind {
    pub const ALL: [ModelKind; 7] = [
        Self::Co,
        Self::Ppmi,
        Self::Tsvd,
        Self::Isvd,
        Self::Ri,
        Self::Sgns,
        Self::Cbow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Co => "co",
            Self::Ppmi => "ppmi",
            Self::Tsvd => "tsvd",
            Self::Isvd => "isvd",
            Self::Ri => "ri",
            Self::Sgns => "sgns",
            Self::Cbow => "cbow",
        }
    }

    /// Case-insensitive; an unknown name lists the valid ones.
    pub fn lookup(name: &str) -> Result<Self> {
        let lower = name.to_ascii_lowercase();
        Self::ALL.into_iter().find(|m| m.name() == lower).ok_or_else(|| {
            let valid: Vec<&str> = Self::ALL.iter().map(|m| m.name()).collect();
            Error::param(format!("unknown model `{}`; valid models: {}", name, valid.join(", ")))
        })
    }

    /// Whether the model is read off a factorization.
    pub fn factorized(self) -> bool {
        matches!(self, Self::Tsvd | Self::Isvd)
    }

    /// Evaluated over sparse weighted rows rather than dense vectors.
    pub fn explicit(self) -> bool {
        matches!(self, Self::Co | Self::Ppmi)
    }

    /// How the model is built under `cfg`.
    pub fn describe(self, cfg: &ExperimentConfig) -> String {
        match self {
            Self::Co => "raw co-occurrence rows, sparse cosine".into(),
            Self::Ppmi => "PPMI-weighted rows, sparse cosine".into(),
            Self::Tsvd => format!(
                "PPMI over {} pruned contexts, randomized SVD, dimensions 0..{}",
                cfg.prune, cfg.tsvd.dim
            ),
            Self::Isvd => format!(
                "PPMI over {} pruned contexts, randomized SVD, dimensions {}..{}",
                cfg.prune, cfg.isvd.remove, cfg.isvd.keep_through
            ),
            Self::Ri => format!(
                "random indexing, dim {} nnz {} lambda {}",
                cfg.ri.dim, cfg.ri.nnz, cfg.ri.lambda
            ),
            Self::Sgns | Self::Cbow => format!(
                "{} with {} negatives, dim {}, {} epochs",
                if self == Self::Sgns { "skip-gram" } else { "CBOW" },
                cfg.neural.negatives,
                cfg.neural.dim,
                cfg.neural.epochs
            ),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
