use serde::{Deserialize, Serialize};

/// How a property is checked: exhaustively, or by a seeded falsifier search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    Exact,
    Sampled { trials: u64, seed: u64 },
}

/// Enumeration caps. Exceeding a cap in exact mode is an error, never a
/// silent truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    /// Cap on `|X|^(p+d)` for exact potentials and on tuple products for
    /// exact family enumeration.
    pub tuples: f64,
    /// Cap on the number of subsets enumerated by commonness/typicality checks.
    pub subsets: f64,
    /// Number of samples used when a quantity is estimated instead of counted.
    pub samples: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { tuples: 1e8, subsets: 5e7, samples: 4000 }
    }
}

impl Budget {
    /// Default budget, with `tuples` and `subsets` overridden by the
    /// `WEAVE_BUDGET` environment variable when it parses as a number.
    pub fn from_env() -> Self {
        let mut b = Budget::default();
        if let Some(cap) = std::env::var("WEAVE_BUDGET").ok().and_then(|v| v.trim().parse::<f64>().ok()) {
            if cap > 0.0 {
                b.tuples = cap;
                b.subsets = cap;
            }
        }
        b
    }

    pub fn with_samples(mut self, samples: u64) -> Self {
        self.samples = samples;
        self
    }
}
