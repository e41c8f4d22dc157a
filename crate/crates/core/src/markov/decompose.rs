//! Block structure from the *-algebra that `A` induces on the support of `rho_B`.
//!
//! Generators are `rho_B^{-1/2} Tr_A[(X ⊗ I) rho_AB] rho_B^{-1/2}` for matrix units `X`,
//! split into their components under the modular flow of `rho_B`. Without that split the
//! generated algebra can miss the off-diagonal structure of `rho_{b^L}`. The algebra, its
//! commutant and its center are null spaces of commutator Gram matrices.

use super::{MarkovBlock, MarkovDecomposition, Tripartition, LEFT_LABEL, RIGHT_LABEL};
use crate::error::{Error, Result};
use crate::tensor::{cmi, eigen, hermitize, partial_trace, scale, trace, DensityOperator, FactorSpace};
use crate::tolerance::Tolerances;
use faer::{c64, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Reconstruction trace distance accepted from one attempt.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
const SEED: u64 = 0x6d61_726b_6f76;
const ATTEMPTS: u64 = 5;
/// Relative eigenvalue gap that separates clusters.
const GAP: f64 = 1e-6;
/// Log-ratio resolution when grouping modular frequencies.
const FREQUENCY_RESOLUTION: f64 = 1e-7;
/// Components below this Frobenius norm are rounding noise.
const COMPONENT_FLOOR: f64 = 1e-10;

/// Decompose a state with `I(A:C|B) <= tol`.
///
/// Center probing is seeded; each attempt draws two central elements that must agree.
pub fn markov_decompose(state: &DensityOperator, parts: &Tripartition, tol: f64) -> Result<MarkovDecomposition> {
    let (a, b, c) = parts.strs();
    let value = cmi(state, &a, &b, &c)?;
    if value > tol {
        return Err(Error::NotMarkov { cmi: value, tol });
    }
    let rho = parts.arrange(state)?;
    let mut last = String::new();
    for attempt in 0..ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED.wrapping_add(attempt));
        match attempt_decomposition(&rho, parts, &mut rng) {
            Ok(d) => {
                let err = d.reconstruction_error(&rho)?;
                if err < RECONSTRUCTION_TOL {
                    return Ok(d);
                }
                last = format!("reconstruction error {err:e}");
            }
            Err(Error::Convergence(msg)) => last = msg,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Convergence(format!("{last} (after {ATTEMPTS} attempts)")))
}

fn attempt_decomposition(rho: &DensityOperator, parts: &Tripartition, rng: &mut ChaCha8Rng) -> Result<MarkovDecomposition> {
    let (a, b, c) = parts.strs();
    let a_space = rho.space().subspace(&a)?;
    let b_space = rho.space().subspace(&b)?;
    let c_space = rho.space().subspace(&c)?;
    let (da, db) = (a_space.dim(), b_space.dim());

    let rho_b = partial_trace(rho, &b)?;
    let (vals, vecs) = eigen(rho_b.matrix())?;
    let lmax = vals.last().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > Tolerances::default().rank * lmax).collect();
    let s = keep.len();
    let lam: Vec<f64> = keep.iter().map(|&i| vals[i]).collect();
    let w = Mat::from_fn(db, s, |i, k| vecs[(i, keep[k])]);

    let ab: Vec<&str> = a.iter().chain(&b).copied().collect();
    let rho_ab = partial_trace(rho, &ab)?;
    let gens = generators(rho_ab.matrix(), da, db, &w, &lam);

    let commutant = commutant_of(&gens, s)?;
    let algebra = commutant_of(&commutant, s)?;
    let both: Vec<Mat<c64>> = algebra.iter().chain(&commutant).cloned().collect();
    let center = commutant_of(&both, s)?;

    let first = central_blocks(&center, rng)?;
    let second = central_blocks(&center, rng)?;
    if !same_blocks(&first, &second) {
        return Err(Error::Convergence("center probes disagree on the block structure".into()));
    }

    let mut blocks = Vec::with_capacity(first.len());
    for q in &first {
        let (l, r, u) = factor_block(q, &algebra, rng)?;
        let isometry = &w * q * &u;
        blocks.push(block_states(rho, &a_space, &c_space, isometry, l, r)?);
    }
    MarkovDecomposition::new(a_space, b_space, c_space, blocks)
}

/// Modular components of the compressed `A`-side ratio operators, unit-normalised.
fn generators(rho_ab: &Mat<c64>, da: usize, db: usize, w: &Mat<c64>, lam: &[f64]) -> Vec<Mat<c64>> {
    let s = lam.len();
    let classes = frequency_classes(lam);
    let mut out = Vec::new();
    for x in 0..da {
        for y in 0..da {
            let t = Mat::from_fn(db, db, |i, j| rho_ab[(x * db + i, y * db + j)]);
            let wt = w.adjoint() * &t * w;
            let z = Mat::from_fn(s, s, |i, j| wt[(i, j)] / (lam[i] * lam[j]).sqrt());
            for class in &classes {
                let norm = class.iter().map(|&(i, j)| z[(i, j)].norm_sqr()).sum::<f64>().sqrt();
                if norm > COMPONENT_FLOOR {
                    let mut g = Mat::<c64>::zeros(s, s);
                    for &(i, j) in class {
                        g[(i, j)] = z[(i, j)] / norm;
                    }
                    out.push(g);
                }
            }
        }
    }
    out
}

/// Index pairs grouped by `ln lam_i - ln lam_j`.
fn frequency_classes(lam: &[f64]) -> Vec<Vec<(usize, usize)>> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(lam.len() * lam.len());
    for i in 0..lam.len() {
        for j in 0..lam.len() {
            pairs.push((lam[i].ln() - lam[j].ln(), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut classes: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    for (f, i, j) in pairs {
        if f - prev > FREQUENCY_RESOLUTION || classes.is_empty() {
            classes.push(Vec::new());
        }
        classes.last_mut().unwrap().push((i, j));
        prev = f;
    }
    classes
}

/// Basis of `{X : [X, g] = 0 for all g}` on an `s`-dimensional space.
///
/// Uses the null space of `Σ_g ad_g† ad_g` with row-major vectorisation, where
/// `ad_g = g ⊗ I - I ⊗ gᵀ`.
fn commutant_of(set: &[Mat<c64>], s: usize) -> Result<Vec<Mat<c64>>> {
    let n = s * s;
    let mut cross = Mat::<c64>::zeros(n, n);
    let mut left = Mat::<c64>::zeros(s, s);
    let mut right = Mat::<c64>::zeros(s, s);
    for g in set {
        let nz: Vec<(usize, usize, c64)> = (0..s)
            .flat_map(|i| (0..s).map(move |j| (i, j)))
            .filter(|&(i, j)| g[(i, j)] != c64::new(0.0, 0.0))
            .map(|(i, j)| (i, j, g[(i, j)]))
            .collect();
        left += g.adjoint() * g;
        right += g * g.adjoint();
        // (g† ⊗ gᵀ)[(i s + j), (k s + l)] = conj(g[k, i]) g[l, j]
        for &(k, i, v) in &nz {
            for &(l, j, u) in &nz {
                cross[(i * s + j, k * s + l)] += v.conj() * u;
            }
        }
    }
    let gram = Mat::from_fn(n, n, |p, q| {
        let (i, j) = (p / s, p % s);
        let (k, l) = (q / s, q % s);
        let mut v = -(cross[(p, q)] + cross[(q, p)].conj());
        if j == l {
            v += left[(i, k)];
        }
        if i == k {
            v += right[(j, l)].conj();
        }
        v
    });
    let (vals, vecs) = eigen(&hermitize(&gram))?;
    let top = vals.last().copied().unwrap_or(0.0).max(1.0);
    Ok((0..n)
        .filter(|&k| vals[k] < 1e-9 * top)
        .map(|k| Mat::from_fn(s, s, |i, j| vecs[(i * s + j, k)]))
        .collect())
}

fn gaussian(rng: &mut ChaCha8Rng) -> c64 {
    c64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn random_element(basis: &[Mat<c64>], rng: &mut ChaCha8Rng) -> Mat<c64> {
    let s = basis[0].nrows();
    let mut m = Mat::<c64>::zeros(s, s);
    for b in basis {
        m += scale(b, gaussian(rng));
    }
    m
}

/// Ranges of ascending eigenvalues separated by more than `GAP` relative to the spread.
fn clusters(vals: &[f64]) -> Vec<std::ops::Range<usize>> {
    let spread = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=vals.len() {
        if i == vals.len() || vals[i] - vals[i - 1] > GAP * spread {
            out.push(start..i);
            start = i;
        }
    }
    out
}

fn columns(m: &Mat<c64>, range: std::ops::Range<usize>) -> Mat<c64> {
    Mat::from_fn(m.nrows(), range.len(), |i, k| m[(i, range.start + k)])
}

/// Orthonormal bases of the eigenspaces of a random Hermitian central element.
fn central_blocks(center: &[Mat<c64>], rng: &mut ChaCha8Rng) -> Result<Vec<Mat<c64>>> {
    if center.is_empty() {
        return Err(Error::Convergence("empty center".into()));
    }
    let z = hermitize(&random_element(center, rng));
    let (vals, vecs) = eigen(&z)?;
    Ok(clusters(&vals).into_iter().map(|r| columns(&vecs, r)).collect())
}

fn same_blocks(x: &[Mat<c64>], y: &[Mat<c64>]) -> bool {
    let proj = |q: &Mat<c64>| q * q.adjoint();
    x.len() == y.len()
        && x.iter().all(|qx| {
            let px = proj(qx);
            y.iter().any(|qy| {
                let d = &px - proj(qy);
                qx.ncols() == qy.ncols() && d.norm_max() < 1e-6
            })
        })
}

/// Split a central block into `l ⊗ r` with the algebra acting on the first factor.
///
/// Returns `(l, r, U)` where column `i r + m` of `U` is the image of `|i⟩|m⟩` inside the block.
fn factor_block(q: &Mat<c64>, algebra: &[Mat<c64>], rng: &mut ChaCha8Rng) -> Result<(usize, usize, Mat<c64>)> {
    let n = q.ncols();
    let h = hermitize(&(q.adjoint() * hermitize(&random_element(algebra, rng)) * q));
    let (vals, vecs) = eigen(&h)?;
    let parts = clusters(&vals);
    let r = parts[0].len();
    if parts.iter().any(|p| p.len() != r) {
        return Err(Error::Convergence(format!("block of dimension {n} has unequal eigenspace multiplicities")));
    }
    let l = parts.len();
    let frames: Vec<Mat<c64>> = parts.into_iter().map(|p| columns(&vecs, p)).collect();
    let a = q.adjoint() * random_element(algebra, rng) * q;
    let size = a.norm_l2().max(f64::MIN_POSITIVE);
    let mut u = Mat::<c64>::zeros(n, n);
    for (i, f) in frames.iter().enumerate() {
        let image = if i == 0 {
            frames[0].clone()
        } else {
            let t = f.adjoint() * &a * &frames[0];
            let c = (trace(&(t.adjoint() * &t)).re / r as f64).sqrt();
            if c < 1e-8 * size {
                return Err(Error::Convergence("matrix-unit probe vanished".into()));
            }
            let t = scale(&t, c64::new(1.0 / c, 0.0));
            let defect = (t.adjoint() * &t - Mat::<c64>::identity(r, r)).norm_max();
            if defect > 1e-6 {
                return Err(Error::Convergence(format!("matrix-unit probe is not unitary (defect {defect:e})")));
            }
            f * t
        };
        for m in 0..r {
            for k in 0..n {
                u[(k, i * r + m)] = image[(k, m)];
            }
        }
    }
    Ok((l, r, u))
}

/// Weight and normalised factor states of the block with isometry `v`.
fn block_states(
    rho: &DensityOperator,
    a_space: &FactorSpace,
    c_space: &FactorSpace,
    isometry: Mat<c64>,
    l: usize,
    r: usize,
) -> Result<MarkovBlock> {
    let (da, dc) = (a_space.dim(), c_space.dim());
    let y = crate::tensor::kron(&Mat::identity(da, da), &crate::tensor::kron(&isometry, &Mat::identity(dc, dc)));
    let sigma = hermitize(&(y.adjoint() * rho.matrix() * &y));
    let weight = trace(&sigma).re;
    let factors = a_space
        .labels()
        .iter()
        .cloned()
        .zip(a_space.dims().iter().copied())
        .chain([(LEFT_LABEL.to_string(), l), (RIGHT_LABEL.to_string(), r)])
        .chain(c_space.labels().iter().cloned().zip(c_space.dims().iter().copied()));
    let space = FactorSpace::new(factors)?;
    let sigma = DensityOperator::from_unnormalized(space, sigma)?;
    let left: Vec<&str> = a_space.labels().iter().map(String::as_str).chain([LEFT_LABEL]).collect();
    let right: Vec<&str> = [RIGHT_LABEL].into_iter().chain(c_space.labels().iter().map(String::as_str)).collect();
    Ok(MarkovBlock {
        weight,
        isometry,
        left_state: partial_trace(&sigma, &left)?,
        right_state: partial_trace(&sigma, &right)?,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{make_markov_state, BlockSpec, MarkovSpec};
    use super::*;
    use crate::tensor::random::random_unitary;
    use crate::tensor::{kron, DensityOperator};

    fn spec(a_dim: usize, c_dim: usize, blocks: &[(usize, usize)], seed: u64) -> MarkovSpec {
        MarkovSpec {
            a_dim,
            c_dim,
            blocks: blocks.iter().enumerate().map(|(k, &(left, right))| BlockSpec { left, right, weight: 1.0 + k as f64 }).collect(),
            seed,
        }
    }

    #[test]
    fn recovers_three_blocks() {
        let rho = make_markov_state(&spec(2, 2, &[(1, 2), (2, 1), (2, 2)], 11)).unwrap();
        let d = markov_decompose(&rho, &Tripartition::abc(), 1e-8).unwrap();
        assert_eq!(d.block_count(), 3);
        let mut dims = d.block_dims();
        dims.sort();
        assert_eq!(dims, vec![(1, 2), (2, 1), (2, 2)]);
        assert!(d.reconstruction_error(&rho).unwrap() < 1e-8);
        let inv = d.invariant_defects();
        assert!(inv.weight_sum < 1e-9 && inv.orthogonality < 1e-8);
    }

    #[test]
    fn product_state_is_one_block() {
        let rho = make_markov_state(&spec(2, 3, &[(1, 3)], 5)).unwrap();
        let d = markov_decompose(&rho, &Tripartition::abc(), 1e-8).unwrap();
        assert_eq!(d.block_dims(), vec![(1, 3)]);
    }

    #[test]
    fn refuses_ghz() {
        let space = FactorSpace::qubits(["A", "B", "C"]).unwrap();
        let mut psi = vec![c64::new(0.0, 0.0); 8];
        psi[0] = c64::new(1.0, 0.0);
        psi[7] = c64::new(1.0, 0.0);
        let ghz = DensityOperator::pure(space, &psi).unwrap();
        match markov_decompose(&ghz, &Tripartition::abc(), 1e-8) {
            Err(Error::NotMarkov { cmi, .. }) => assert!((cmi - 1.0).abs() < 1e-9),
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn modular_components_are_needed() {
        // rho_AB = |0><0| ⊗ s P s + |1><1| ⊗ s (I-P) s with s = rho_B^{1/2}: the ratio
        // operators are P and I-P, which commute, but rho_B does not commute with P.
        let rb = Mat::from_fn(2, 2, |i, j| c64::new([[0.6, 0.2], [0.2, 0.4]][i][j], 0.0));
        let (vals, vecs) = eigen(&rb).unwrap();
        let sq = Mat::from_fn(2, 2, |i, k| vecs[(i, k)] * vals[k].sqrt()) * vecs.adjoint();
        let p = Mat::from_fn(2, 2, |i, j| c64::new(if i == 0 && j == 0 { 1.0 } else { 0.0 }, 0.0));
        let q = Mat::<c64>::identity(2, 2) - &p;
        let e = |k: usize| Mat::from_fn(2, 2, |i, j| c64::new(if i == k && j == k { 1.0 } else { 0.0 }, 0.0));
        let ab = kron(&e(0), &(&sq * &p * &sq)) + kron(&e(1), &(&sq * &q * &sq));
        let rc = Mat::from_fn(2, 2, |i, j| c64::new([[0.7, 0.1], [0.1, 0.3]][i][j], 0.0));
        let space = FactorSpace::qubits(["A", "B", "C"]).unwrap();
        let rho = DensityOperator::new(space, kron(&ab, &rc)).unwrap();
        let d = markov_decompose(&rho, &Tripartition::abc(), 1e-8).unwrap();
        assert_eq!(d.block_dims(), vec![(2, 1)]);
        assert!(d.reconstruction_error(&rho).unwrap() < 1e-8);
    }

    #[test]
    fn block_count_survives_local_unitaries() {
        let rho = make_markov_state(&spec(2, 3, &[(2, 1), (1, 1), (1, 2)], 8)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let db = rho.space().dim_of("B").unwrap();
        let u = kron(&random_unitary(2, &mut rng), &kron(&Mat::identity(db, db), &random_unitary(3, &mut rng)));
        let rotated = rho.conjugate(&u).unwrap();
        let before = markov_decompose(&rho, &Tripartition::abc(), 1e-8).unwrap();
        let after = markov_decompose(&rotated, &Tripartition::abc(), 1e-8).unwrap();
        assert_eq!(before.block_count(), 3);
        assert_eq!(after.block_count(), 3);
    }

    #[test]
    fn frequency_classes_group_equal_ratios() {
        let classes = frequency_classes(&[0.5, 0.25, 0.125]);
        // ratios 1/4, 1/2, 1, 2, 4
        assert_eq!(classes.len(), 5);
        assert_eq!(classes.iter().map(Vec::len).sum::<usize>(), 9);
    }

    #[test]
    fn commutant_of_diagonal_is_diagonal() {
        let g = Mat::from_fn(3, 3, |i, j| if i == j { c64::new(i as f64, 0.0) } else { c64::new(0.0, 0.0) });
        assert_eq!(commutant_of(&[g], 3).unwrap().len(), 3);
        assert_eq!(commutant_of(&[], 3).unwrap().len(), 9);
    }
}
