//! Quantum Markov chains: block decomposition, support-projector identities and merging.
//!
//! A state with `I(A:C|B) = 0` splits `B` as `⊕_j b_j^L ⊗ b_j^R` with
//! `rho = ⊕_j q_j rho_{A b_j^L} ⊗ rho_{b_j^R C}`.

mod decompose;
mod io;
mod lemmas;

pub use decompose::{markov_decompose, RECONSTRUCTION_TOL};
pub use io::{read_decomposition, write_decomposition};
pub use lemmas::{
    check_commutation, check_merge_lemma, check_product_lemma, check_sandwich_lemma, verify_projector_factorization,
    CommutationReport, FactorizationReport, MergeReport, ProductLemmaReport, SandwichReport, PROJECTOR_TOL,
};

use crate::error::{Error, Result};
use crate::tensor::random::{random_density, random_unitary};
use crate::tensor::{hermitize, kron, scale, trace_distance, DensityOperator, FactorSpace};
use faer::{c64, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Factor label of `b_j^L` inside block factor states.
pub const LEFT_LABEL: &str = "b^L";
/// Factor label of `b_j^R` inside block factor states.
pub const RIGHT_LABEL: &str = "b^R";

/// Labels of the three parties, each in the order used for the composite factor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tripartition {
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub c: Vec<String>,
}

impl Tripartition {
    pub fn new<S: Into<String>>(
        a: impl IntoIterator<Item = S>,
        b: impl IntoIterator<Item = S>,
        c: impl IntoIterator<Item = S>,
    ) -> Self {
        Tripartition {
            a: a.into_iter().map(Into::into).collect(),
            b: b.into_iter().map(Into::into).collect(),
            c: c.into_iter().map(Into::into).collect(),
        }
    }

    /// Single factors named `A`, `B`, `C`.
    pub fn abc() -> Self {
        Self::new(["A"], ["B"], ["C"])
    }

    pub(crate) fn strs(&self) -> (Vec<&str>, Vec<&str>, Vec<&str>) {
        fn s(v: &[String]) -> Vec<&str> {
            v.iter().map(String::as_str).collect()
        }
        (s(&self.a), s(&self.b), s(&self.c))
    }

    pub(crate) fn order(&self) -> Vec<&str> {
        self.a.iter().chain(&self.b).chain(&self.c).map(String::as_str).collect()
    }

    /// Marginal on `A ∪ B ∪ C` with factors reordered to `A, B, C`.
    pub(crate) fn arrange(&self, state: &DensityOperator) -> Result<DensityOperator> {
        let order = self.order();
        let m = crate::tensor::partial_trace(state, &order)?;
        m.permute(&order)
    }
}

/// One summand `q_j V_j (rho_{A b^L} ⊗ rho_{b^R C}) V_j†`.
#[derive(Clone, Debug)]
pub struct MarkovBlock {
    pub weight: f64,
    /// Isometry from `b^L ⊗ b^R` (left factor most significant) into `B`.
    pub isometry: Mat<c64>,
    /// State on the `A` factors followed by [`LEFT_LABEL`].
    pub left_state: DensityOperator,
    /// State on [`RIGHT_LABEL`] followed by the `C` factors.
    pub right_state: DensityOperator,
}

impl MarkovBlock {
    pub fn left_dim(&self) -> usize {
        self.left_state.space().dim_of(LEFT_LABEL).unwrap_or(1)
    }

    pub fn right_dim(&self) -> usize {
        self.right_state.space().dim_of(RIGHT_LABEL).unwrap_or(1)
    }
}

/// Structure decomposition of a quantum Markov chain.
#[derive(Clone, Debug)]
pub struct MarkovDecomposition {
    a_space: FactorSpace,
    b_space: FactorSpace,
    c_space: FactorSpace,
    pub blocks: Vec<MarkovBlock>,
}

/// Deviations from the structural invariants of a decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantDefects {
    /// `|Σ q_j - 1|`.
    pub weight_sum: f64,
    /// Largest entry of `V_j† V_k - δ_jk I`.
    pub orthogonality: f64,
}

fn concat_spaces(parts: &[&FactorSpace]) -> Result<FactorSpace> {
    FactorSpace::new(parts.iter().flat_map(|s| s.labels().iter().cloned().zip(s.dims().iter().copied())))
}

impl MarkovDecomposition {
    /// Check that every block has the shapes implied by the three spaces.
    pub fn new(a_space: FactorSpace, b_space: FactorSpace, c_space: FactorSpace, blocks: Vec<MarkovBlock>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Precondition("a decomposition needs at least one block".into()));
        }
        for (j, blk) in blocks.iter().enumerate() {
            let expect_left = concat_spaces(&[&a_space, &FactorSpace::new([(LEFT_LABEL, blk.left_dim())])?])?;
            let expect_right = concat_spaces(&[&FactorSpace::new([(RIGHT_LABEL, blk.right_dim())])?, &c_space])?;
            if blk.left_state.space() != &expect_left || blk.right_state.space() != &expect_right {
                return Err(Error::Dimension(format!("block {j}: factor states do not match the A and C spaces")));
            }
            if blk.isometry.nrows() != b_space.dim() || blk.isometry.ncols() != blk.left_dim() * blk.right_dim() {
                return Err(Error::Dimension(format!("block {j}: isometry has the wrong shape")));
            }
            if !(blk.weight.is_finite() && blk.weight > 0.0 && blk.weight <= 1.0 + 1e-9) {
                return Err(Error::Precondition(format!("block {j}: weight {} outside (0, 1]", blk.weight)));
            }
        }
        Ok(MarkovDecomposition { a_space, b_space, c_space, blocks })
    }

    pub fn a_space(&self) -> &FactorSpace {
        &self.a_space
    }

    pub fn b_space(&self) -> &FactorSpace {
        &self.b_space
    }

    pub fn c_space(&self) -> &FactorSpace {
        &self.c_space
    }

    pub fn parts(&self) -> Tripartition {
        Tripartition::new(self.a_space.labels().to_vec(), self.b_space.labels().to_vec(), self.c_space.labels().to_vec())
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// `(dim b^L, dim b^R)` per block.
    pub fn block_dims(&self) -> Vec<(usize, usize)> {
        self.blocks.iter().map(|b| (b.left_dim(), b.right_dim())).collect()
    }

    /// `I_A ⊗ V_j ⊗ I_C`.
    pub(crate) fn lift(&self, j: usize) -> Mat<c64> {
        let da = self.a_space.dim();
        let dc = self.c_space.dim();
        kron(&Mat::identity(da, da), &kron(&self.blocks[j].isometry, &Mat::identity(dc, dc)))
    }

    /// `⊕_j q_j rho_{A b_j^L} ⊗ rho_{b_j^R C}` on the factors `A, B, C`.
    pub fn reconstruct(&self) -> Result<DensityOperator> {
        let space = concat_spaces(&[&self.a_space, &self.b_space, &self.c_space])?;
        let d = space.dim();
        let mut m = Mat::<c64>::zeros(d, d);
        for (j, blk) in self.blocks.iter().enumerate() {
            let y = self.lift(j);
            let core = kron(blk.left_state.matrix(), blk.right_state.matrix());
            m += scale(&(&y * &core * y.adjoint()), c64::new(blk.weight, 0.0));
        }
        Ok(DensityOperator::new_unchecked(space, hermitize(&m)))
    }

    /// Trace distance between the reconstruction and `state`.
    pub fn reconstruction_error(&self, state: &DensityOperator) -> Result<f64> {
        let rho = self.parts().arrange(state)?;
        let back = self.reconstruct()?;
        if rho.space() != back.space() {
            return Err(Error::Label("state and decomposition act on different spaces".into()));
        }
        trace_distance(rho.matrix(), back.matrix())
    }

    pub fn invariant_defects(&self) -> InvariantDefects {
        let weight_sum = (self.blocks.iter().map(|b| b.weight).sum::<f64>() - 1.0).abs();
        let mut orthogonality: f64 = 0.0;
        for (j, bj) in self.blocks.iter().enumerate() {
            for (k, bk) in self.blocks.iter().enumerate() {
                let g = bj.isometry.adjoint() * &bk.isometry;
                for r in 0..g.nrows() {
                    for c in 0..g.ncols() {
                        let target = if j == k && r == c { 1.0 } else { 0.0 };
                        orthogonality = orthogonality.max((g[(r, c)] - c64::new(target, 0.0)).norm());
                    }
                }
            }
        }
        InvariantDefects { weight_sum, orthogonality }
    }
}

/// Dimensions and relative weight of one generated block.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub left: usize,
    pub right: usize,
    pub weight: f64,
}

/// Recipe for a random Markov chain on factors `A`, `B`, `C`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovSpec {
    pub a_dim: usize,
    pub c_dim: usize,
    pub blocks: Vec<BlockSpec>,
    pub seed: u64,
}

impl MarkovSpec {
    pub fn b_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.left * b.right).sum()
    }
}

/// Random decomposition: full-rank factor states and a Haar rotation of `B`.
pub fn random_markov_decomposition(spec: &MarkovSpec) -> Result<MarkovDecomposition> {
    if spec.blocks.is_empty() {
        return Err(Error::Precondition("spec has no blocks".into()));
    }
    if spec.blocks.iter().any(|b| b.left == 0 || b.right == 0 || !(b.weight.is_finite() && b.weight > 0.0)) {
        return Err(Error::Precondition("block dimensions must be positive and weights finite and positive".into()));
    }
    let a_space = FactorSpace::new([("A", spec.a_dim)])?;
    let b_space = FactorSpace::new([("B", spec.b_dim())])?;
    let c_space = FactorSpace::new([("C", spec.c_dim)])?;
    concat_spaces(&[&a_space, &b_space, &c_space])?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let u = random_unitary(spec.b_dim(), &mut rng);
    let total: f64 = spec.blocks.iter().map(|b| b.weight).sum();
    let mut offset = 0;
    let mut blocks = Vec::with_capacity(spec.blocks.len());
    for b in &spec.blocks {
        let n = b.left * b.right;
        let isometry = Mat::from_fn(u.nrows(), n, |i, k| u[(i, offset + k)]);
        offset += n;
        let left_space = FactorSpace::new([("A", spec.a_dim), (LEFT_LABEL, b.left)])?;
        let right_space = FactorSpace::new([(RIGHT_LABEL, b.right), ("C", spec.c_dim)])?;
        blocks.push(MarkovBlock {
            weight: b.weight / total,
            isometry,
            left_state: random_density(&left_space, left_space.dim(), &mut rng),
            right_state: random_density(&right_space, right_space.dim(), &mut rng),
        });
    }
    MarkovDecomposition::new(a_space, b_space, c_space, blocks)
}

/// `count` random specs with total dimension `a_dim * b_dim * c_dim <= max_dim` (at least 4).
pub fn random_markov_specs(count: usize, max_dim: usize, seed: u64) -> Result<Vec<MarkovSpec>> {
    if max_dim < 4 {
        return Err(Error::Precondition("random Markov specs need max_dim >= 4".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let blocks: Vec<BlockSpec> = (0..rng.gen_range(1..=3))
            .map(|_| BlockSpec { left: rng.gen_range(1..=3), right: rng.gen_range(1..=3), weight: rng.gen_range(0.2..1.0) })
            .collect();
        let spec = MarkovSpec { a_dim: rng.gen_range(2..=3), c_dim: rng.gen_range(2..=3), blocks, seed: rng.gen() };
        if spec.a_dim * spec.b_dim() * spec.c_dim <= max_dim {
            out.push(spec);
        }
    }
    Ok(out)
}

/// Random state of the form `⊕_j q_j rho_{A b_j^L} ⊗ rho_{b_j^R C}`.
pub fn make_markov_state(spec: &MarkovSpec) -> Result<DensityOperator> {
    random_markov_decomposition(spec)?.reconstruct()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{cmi, entropy, partial_trace};

    fn spec(blocks: &[(usize, usize)], seed: u64) -> MarkovSpec {
        MarkovSpec {
            a_dim: 2,
            c_dim: 2,
            blocks: blocks.iter().map(|&(left, right)| BlockSpec { left, right, weight: 1.0 }).collect(),
            seed,
        }
    }

    #[test]
    fn random_specs_respect_the_cap() {
        let specs = random_markov_specs(40, 24, 5).unwrap();
        assert_eq!(specs.len(), 40);
        assert!(specs.iter().all(|s| s.a_dim * s.b_dim() * s.c_dim <= 24));
        assert_eq!(specs, random_markov_specs(40, 24, 5).unwrap());
        assert!(random_markov_specs(1, 3, 0).is_err());
    }

    #[test]
    fn generated_states_are_markov() {
        for seed in 0..5 {
            let rho = make_markov_state(&spec(&[(1, 2), (2, 1), (2, 2)], seed)).unwrap();
            assert!(cmi(&rho, &["A"], &["B"], &["C"]).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn single_trivial_block_is_product() {
        let rho = make_markov_state(&spec(&[(1, 1)], 3)).unwrap();
        let sa = entropy(&partial_trace(&rho, &["A"]).unwrap()).unwrap();
        let sc = entropy(&partial_trace(&rho, &["C"]).unwrap()).unwrap();
        assert!((entropy(&rho).unwrap() - sa - sc).abs() < 1e-10);
    }

    #[test]
    fn classical_blocks_are_markov() {
        let rho = make_markov_state(&spec(&[(1, 1), (1, 1)], 4)).unwrap();
        assert!(cmi(&rho, &["A"], &["B"], &["C"]).unwrap().abs() < 1e-10);
    }

    #[test]
    fn generated_decomposition_satisfies_invariants() {
        let d = random_markov_decomposition(&spec(&[(2, 1), (1, 3)], 9)).unwrap();
        let inv = d.invariant_defects();
        assert!(inv.weight_sum < 1e-12 && inv.orthogonality < 1e-12);
        let rho = d.reconstruct().unwrap();
        assert!(d.reconstruction_error(&rho).unwrap() < 1e-12);
    }

    #[test]
    fn rejects_empty_or_degenerate_specs() {
        assert!(make_markov_state(&spec(&[], 0)).is_err());
        assert!(make_markov_state(&spec(&[(0, 1)], 0)).is_err());
    }
}
