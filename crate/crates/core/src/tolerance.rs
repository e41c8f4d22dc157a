use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by every dense computation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative eigenvalue cutoff used for supports and entropies.
    pub rank: f64,
    /// Zero test for conditional mutual information and axiom deficits, in bits.
    pub cmi: f64,
    /// Largest allowed negative eigenvalue of a density operator.
    pub psd: f64,
    /// Largest dense matrix side.
    pub dense_cap: usize,
    /// Largest matrix side passed to an eigensolver.
    pub eigen_cap: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank: 1e-10,
            cmi: 1e-8,
            psd: 1e-9,
            dense_cap: 1 << 20,
            eigen_cap: 1 << 13,
        }
    }
}
