//! Support-projector identities of Markov chains, checked numerically.

use super::{MarkovDecomposition, Tripartition, RIGHT_LABEL, LEFT_LABEL};
use crate::error::Result;
use crate::tensor::random::ginibre;
use crate::tensor::{
    cmi, eigen, eigenvalues, embed_matrix, hermitize, kron, marginal_entropy, normal_norm, partial_trace,
    support_projector, trace_distance, DensityOperator, FactorSpace,
};
use crate::tolerance::Tolerances;
use faer::{c64, Mat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Operator-norm gate for projector identities.
pub const PROJECTOR_TOL: f64 = 1e-8;

/// Support projector of the marginal on `keep`, embedded into `target`.
fn marginal_support(state: &DensityOperator, keep: &[&str], target: &FactorSpace) -> Result<Mat<c64>> {
    let tau = Tolerances::default().rank;
    let m = partial_trace(state, keep)?;
    let p = support_projector(&m, tau)?;
    embed_matrix(p.projector.space(), p.projector.matrix(), target)
}

fn support_of(state: &DensityOperator) -> Result<Mat<c64>> {
    Ok(support_projector(state, Tolerances::default().rank)?.projector.matrix().clone())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    /// `‖P_AB - Σ_j (I ⊗ V_j)(P_{A b^L_j} ⊗ P_{b^R_j})(I ⊗ V_j)†‖`.
    pub ab_deviation: f64,
    /// `‖P_BC - Σ_j (V_j ⊗ I)(P_{b^L_j} ⊗ P_{b^R_j C})(V_j ⊗ I)†‖`.
    pub bc_deviation: f64,
    pub pass: bool,
}

/// Compare the support projectors of `rho_AB`, `rho_BC` with their block sums.
pub fn verify_projector_factorization(d: &MarkovDecomposition, state: &DensityOperator) -> Result<FactorizationReport> {
    let parts = d.parts();
    let rho = parts.arrange(state)?;
    let (a, b, c) = parts.strs();
    let ab: Vec<&str> = a.iter().chain(&b).copied().collect();
    let bc: Vec<&str> = b.iter().chain(&c).copied().collect();
    let p_ab = support_of(&partial_trace(&rho, &ab)?)?;
    let p_bc = support_of(&partial_trace(&rho, &bc)?)?;
    let (da, dc) = (d.a_space().dim(), d.c_space().dim());
    let mut sum_ab = Mat::<c64>::zeros(p_ab.nrows(), p_ab.ncols());
    let mut sum_bc = Mat::<c64>::zeros(p_bc.nrows(), p_bc.ncols());
    for blk in &d.blocks {
        let p_al = support_of(&blk.left_state)?;
        let p_l = support_of(&partial_trace(&blk.left_state, &[LEFT_LABEL])?)?;
        let p_rc = support_of(&blk.right_state)?;
        let p_r = support_of(&partial_trace(&blk.right_state, &[RIGHT_LABEL])?)?;
        let ya = kron(&Mat::identity(da, da), &blk.isometry);
        let yc = kron(&blk.isometry, &Mat::identity(dc, dc));
        sum_ab += &ya * kron(&p_al, &p_r) * ya.adjoint();
        sum_bc += &yc * kron(&p_l, &p_rc) * yc.adjoint();
    }
    let ab_deviation = normal_norm(&hermitize(&(p_ab - sum_ab)))?;
    let bc_deviation = normal_norm(&hermitize(&(p_bc - sum_bc)))?;
    Ok(FactorizationReport { ab_deviation, bc_deviation, pass: ab_deviation < PROJECTOR_TOL && bc_deviation < PROJECTOR_TOL })
}

/// `P_AB`, `P_BC` and `P_ABC` on the arranged space.
struct Supports {
    cmi: f64,
    ab: Mat<c64>,
    bc: Mat<c64>,
    abc: Mat<c64>,
}

fn supports(state: &DensityOperator, parts: &Tripartition) -> Result<Supports> {
    let rho = parts.arrange(state)?;
    let (a, b, c) = parts.strs();
    let ab: Vec<&str> = a.iter().chain(&b).copied().collect();
    let bc: Vec<&str> = b.iter().chain(&c).copied().collect();
    Ok(Supports {
        cmi: cmi(&rho, &a, &b, &c)?,
        ab: marginal_support(&rho, &ab, rho.space())?,
        bc: marginal_support(&rho, &bc, rho.space())?,
        abc: support_of(&rho)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutationReport {
    pub cmi: f64,
    /// `‖[P_AB ⊗ I, I ⊗ P_BC]‖`.
    pub norm: f64,
    /// CMI within tolerance, so the projectors should commute.
    pub markov: bool,
    pub pass: bool,
}

pub fn check_commutation(state: &DensityOperator, parts: &Tripartition, tol: f64) -> Result<CommutationReport> {
    let s = supports(state, parts)?;
    let comm = &s.ab * &s.bc - &s.bc * &s.ab;
    let norm = normal_norm(&comm)?;
    let markov = s.cmi <= tol;
    Ok(CommutationReport { cmi: s.cmi, norm, markov, pass: markov && norm < PROJECTOR_TOL })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductLemmaReport {
    pub cmi: f64,
    pub applicable: bool,
    /// `‖P_ABC - P_AB P_BC‖`.
    pub product_deviation: f64,
    /// `‖(P_AB P_BC)² - P_AB P_BC‖`.
    pub idempotency_deviation: f64,
    /// Smallest eigenvalue of `(I - P_AB) + (I - P_BC) - (I - P_AB P_BC)`.
    pub min_eigenvalue: f64,
    pub pass: bool,
}

pub fn check_product_lemma(state: &DensityOperator, parts: &Tripartition, tol: f64) -> Result<ProductLemmaReport> {
    let s = supports(state, parts)?;
    let prod = &s.ab * &s.bc;
    let product_deviation = op_norm(&(&s.abc - &prod))?;
    let idempotency_deviation = op_norm(&(&prod * &prod - &prod))?;
    let d = prod.nrows();
    let gap = Mat::<c64>::identity(d, d) - &s.ab - &s.bc + &prod;
    let min_eigenvalue = eigenvalues(&hermitize(&gap))?.first().copied().unwrap_or(0.0);
    let applicable = s.cmi <= tol;
    let pass = applicable
        && product_deviation < PROJECTOR_TOL
        && idempotency_deviation < PROJECTOR_TOL
        && min_eigenvalue >= -PROJECTOR_TOL;
    Ok(ProductLemmaReport { cmi: s.cmi, applicable, product_deviation, idempotency_deviation, min_eigenvalue, pass })
}

/// Operator norm of an arbitrary square matrix: square root of the top eigenvalue of `M† M`.
fn op_norm(m: &Mat<c64>) -> Result<f64> {
    let g = hermitize(&(m.adjoint() * m));
    Ok(eigenvalues(&g)?.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    /// `S(BC) + S(C) - S(B)`, the mutual information between `C` and a purifier.
    pub purified_mutual_information: f64,
    pub applicable: bool,
    pub samples: usize,
    /// Largest `‖tau_C - rho_C‖₁ / 2` over the samples.
    pub max_distance: f64,
    pub pass: bool,
}

/// Sample states in `supp(rho_BC)` and compare their `C` marginals with `rho_C`.
pub fn check_sandwich_lemma(
    rho_bc: &DensityOperator,
    b: &[&str],
    c: &[&str],
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<SandwichReport> {
    let bc: Vec<&str> = b.iter().chain(c).copied().collect();
    let rho = partial_trace(rho_bc, &bc)?.permute(&bc)?;
    let value = marginal_entropy(&rho, &bc)? + marginal_entropy(&rho, c)? - marginal_entropy(&rho, b)?;
    let rho_c = partial_trace(&rho, c)?;
    let (vals, vecs) = eigen(rho.matrix())?;
    let lmax = vals.last().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > Tolerances::default().rank * lmax).collect();
    let v = Mat::from_fn(vecs.nrows(), keep.len(), |i, k| vecs[(i, keep[k])]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_distance: f64 = 0.0;
    for _ in 0..samples {
        let g = ginibre(keep.len(), keep.len(), &mut rng);
        let tau = hermitize(&(&v * &g * g.adjoint() * v.adjoint()));
        let tau = DensityOperator::from_unnormalized(rho.space().clone(), tau)?;
        let tau_c = partial_trace(&tau, c)?;
        max_distance = max_distance.max(trace_distance(tau_c.matrix(), rho_c.matrix())?);
    }
    let applicable = value.abs() <= tol;
    Ok(SandwichReport {
        purified_mutual_information: value,
        applicable,
        samples,
        max_distance,
        pass: applicable && max_distance < PROJECTOR_TOL,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergeReport {
    pub cmi_rho: f64,
    pub cmi_sigma: f64,
    pub ab_distance: f64,
    pub bc_distance: f64,
    pub applicable: bool,
    /// `‖rho_ABC - sigma_ABC‖₁ / 2`.
    pub distance: f64,
    pub pass: bool,
}

/// Two Markov chains with equal `AB` and `BC` marginals should be equal.
pub fn check_merge_lemma(rho: &DensityOperator, sigma: &DensityOperator, parts: &Tripartition, tol: f64) -> Result<MergeReport> {
    let r = parts.arrange(rho)?;
    let s = parts.arrange(sigma)?;
    let (a, b, c) = parts.strs();
    let ab: Vec<&str> = a.iter().chain(&b).copied().collect();
    let bc: Vec<&str> = b.iter().chain(&c).copied().collect();
    let marginal_gap = |keep: &[&str]| -> Result<f64> {
        trace_distance(partial_trace(&r, keep)?.matrix(), partial_trace(&s, keep)?.matrix())
    };
    let cmi_rho = cmi(&r, &a, &b, &c)?;
    let cmi_sigma = cmi(&s, &a, &b, &c)?;
    let ab_distance = marginal_gap(&ab)?;
    let bc_distance = marginal_gap(&bc)?;
    let applicable = cmi_rho <= tol && cmi_sigma <= tol && ab_distance <= tol && bc_distance <= tol;
    let distance = trace_distance(r.matrix(), s.matrix())?;
    Ok(MergeReport {
        cmi_rho,
        cmi_sigma,
        ab_distance,
        bc_distance,
        applicable,
        distance,
        pass: applicable && distance <= (10.0 * tol).max(PROJECTOR_TOL),
    })
}

#[cfg(test)]
mod tests {
    use super::super::{make_markov_state, markov_decompose, random_markov_decomposition, BlockSpec, MarkovSpec};
    use super::*;
    use crate::tensor::random::{random_density, random_unitary};

    fn spec(blocks: &[(usize, usize)], seed: u64) -> MarkovSpec {
        MarkovSpec { a_dim: 2, c_dim: 2, blocks: blocks.iter().map(|&(left, right)| BlockSpec { left, right, weight: 1.0 }).collect(), seed }
    }

    fn ghz() -> DensityOperator {
        let mut psi = vec![c64::new(0.0, 0.0); 8];
        psi[0] = c64::new(1.0, 0.0);
        psi[7] = c64::new(1.0, 0.0);
        DensityOperator::pure(FactorSpace::qubits(["A", "B", "C"]).unwrap(), &psi).unwrap()
    }

    #[test]
    fn factorization_holds_and_fails_when_a_block_is_dropped() {
        let rho = make_markov_state(&spec(&[(2, 1), (1, 2)], 3)).unwrap();
        let mut d = markov_decompose(&rho, &Tripartition::abc(), 1e-8).unwrap();
        let ok = verify_projector_factorization(&d, &rho).unwrap();
        assert!(ok.pass, "{ok:?}");
        d.blocks.pop();
        let bad = verify_projector_factorization(&d, &rho).unwrap();
        assert!(!bad.pass && bad.ab_deviation > 0.5);
    }

    #[test]
    fn single_block_product_factorizes_exactly() {
        let rho = make_markov_state(&spec(&[(1, 1)], 1)).unwrap();
        let d = markov_decompose(&rho, &Tripartition::abc(), 1e-8).unwrap();
        let r = verify_projector_factorization(&d, &rho).unwrap();
        assert!(r.ab_deviation < 1e-12 && r.bc_deviation < 1e-12);
    }

    #[test]
    fn markov_projectors_commute_and_multiply() {
        for seed in 0..4 {
            let rho = make_markov_state(&spec(&[(1, 2), (2, 1)], seed)).unwrap();
            assert!(check_commutation(&rho, &Tripartition::abc(), 1e-8).unwrap().pass);
            let p = check_product_lemma(&rho, &Tripartition::abc(), 1e-8).unwrap();
            assert!(p.pass, "{p:?}");
        }
    }

    #[test]
    fn generic_states_do_not_commute() {
        // Pure states: mixed ones of rank two already have full-rank two-party marginals.
        let space = FactorSpace::qubits(["A", "B", "C"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut norms: Vec<f64> = (0..21)
            .map(|_| check_commutation(&random_density(&space, 1, &mut rng), &Tripartition::abc(), 1e-8).unwrap().norm)
            .collect();
        norms.sort_by(f64::total_cmp);
        assert!(norms[10] > 0.01);
    }

    #[test]
    fn trivial_b_gives_zero_commutator() {
        let spec = MarkovSpec { a_dim: 2, c_dim: 2, blocks: vec![BlockSpec { left: 1, right: 1, weight: 1.0 }], seed: 0 };
        let rho = make_markov_state(&spec).unwrap();
        assert!(check_commutation(&rho, &Tripartition::abc(), 1e-8).unwrap().norm < 1e-12);
    }

    #[test]
    fn ghz_violates_product_lemma() {
        let r = check_product_lemma(&ghz(), &Tripartition::abc(), 1e-8).unwrap();
        assert!(!r.applicable && !r.pass);
        assert!((r.product_deviation - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sandwich_on_pure_c() {
        let b = random_density(&FactorSpace::new([("B", 3)]).unwrap(), 3, &mut ChaCha8Rng::seed_from_u64(1));
        let psi = [c64::new(0.6, 0.0), c64::new(0.0, 0.8)];
        let c = DensityOperator::pure(FactorSpace::qubits(["C"]).unwrap(), &psi).unwrap();
        let r = check_sandwich_lemma(&b.tensor(&c).unwrap(), &["B"], &["C"], 20, 2, 1e-8).unwrap();
        assert!(r.applicable && r.pass && r.max_distance < 1e-12);
    }

    #[test]
    fn sandwich_on_isometric_form() {
        // rho_BC = V (lambda_{B_L} ⊗ |psi><psi|_{B_R C}) V† with V a unitary on B = B_L B_R.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let lam = random_density(&FactorSpace::new([("BL", 2)]).unwrap(), 2, &mut rng);
        let pair = crate::tensor::random::random_pure(&FactorSpace::new([("BR", 2), ("C", 2)]).unwrap(), &mut rng);
        let v = kron(&random_unitary(4, &mut rng), &Mat::identity(2, 2));
        let m = &v * kron(lam.matrix(), pair.matrix()) * v.adjoint();
        let rho = DensityOperator::new(FactorSpace::new([("B", 4), ("C", 2)]).unwrap(), hermitize(&m)).unwrap();
        let r = check_sandwich_lemma(&rho, &["B"], &["C"], 20, 3, 1e-8).unwrap();
        assert!(r.applicable && r.pass, "{r:?}");
    }

    #[test]
    fn sandwich_flags_generic_states() {
        let space = FactorSpace::qubits(["B", "C"]).unwrap();
        let rho = random_density(&space, 2, &mut ChaCha8Rng::seed_from_u64(4));
        let r = check_sandwich_lemma(&rho, &["B"], &["C"], 5, 0, 1e-8).unwrap();
        assert!(!r.applicable && !r.pass);
    }

    #[test]
    fn merge_of_equal_builds() {
        let s = spec(&[(2, 1), (1, 2)], 6);
        let r = check_merge_lemma(&make_markov_state(&s).unwrap(), &make_markov_state(&s).unwrap(), &Tripartition::abc(), 1e-8)
            .unwrap();
        assert!(r.pass && r.distance < 1e-10);
    }

    #[test]
    fn merge_with_reparametrised_blocks() {
        let s = spec(&[(2, 1), (1, 2), (1, 1)], 12);
        let d = random_markov_decomposition(&s).unwrap();
        let mut e = d.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for (j, blk) in e.blocks.iter_mut().enumerate() {
            let (l, r) = (blk.left_dim(), blk.right_dim());
            let ul = random_unitary(l, &mut rng);
            let ur = random_unitary(r, &mut rng);
            let phase = c64::from_polar(1.0, 0.7 * j as f64 + 0.3);
            blk.isometry = crate::tensor::scale(&(&blk.isometry * kron(&ul, &ur)), phase);
            let left = kron(&Mat::identity(2, 2), &ul.adjoint().to_owned());
            let right = kron(&ur.adjoint().to_owned(), &Mat::identity(2, 2));
            blk.left_state = blk.left_state.conjugate(&left).unwrap();
            blk.right_state = blk.right_state.conjugate(&right).unwrap();
        }
        let r = check_merge_lemma(&d.reconstruct().unwrap(), &e.reconstruct().unwrap(), &Tripartition::abc(), 1e-8).unwrap();
        assert!(r.pass && r.distance < 1e-8, "{r:?}");
    }

    #[test]
    fn merge_flags_different_marginals() {
        let r = check_merge_lemma(
            &make_markov_state(&spec(&[(2, 1)], 1)).unwrap(),
            &make_markov_state(&spec(&[(2, 1)], 2)).unwrap(),
            &Tripartition::abc(),
            1e-8,
        )
        .unwrap();
        assert!(!r.applicable && r.distance > 0.05);
    }
}
