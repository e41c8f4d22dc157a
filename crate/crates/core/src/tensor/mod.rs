//! Dense Hermitian operators over labelled tensor factors.
//!
//! Basis index convention: the first factor is the most significant digit.

mod io;
pub mod random;

pub use io::{read_matrix, write_matrix, MatrixKind, StoredMatrix};

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;
use faer::{c64, Mat, Side};
use std::collections::BTreeSet;

/// Ordered labelled factors of a Hilbert space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorSpace {
    labels: Vec<String>,
    dims: Vec<usize>,
}

impl FactorSpace {
    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        Self::with_cap(factors, Tolerances::default().dense_cap)
    }

    pub fn with_cap<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>, cap: usize) -> Result<Self> {
        let (labels, dims): (Vec<String>, Vec<usize>) = factors.into_iter().map(|(l, d)| (l.into(), d)).unzip();
        let unique: BTreeSet<&String> = labels.iter().collect();
        if unique.len() != labels.len() {
            return Err(Error::Label("duplicate factor label".into()));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::Dimension("factor dimension must be at least 1".into()));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total.checked_mul(d).filter(|t| *t <= cap).ok_or(Error::Cap { dim: total.saturating_mul(d), cap })?;
        }
        Ok(FactorSpace { labels, dims })
    }

    /// `n` qubits labelled by the given names.
    pub fn qubits<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::new(labels.into_iter().map(|l| (l, 2)))
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn dim_of(&self, label: &str) -> Option<usize> {
        self.position(label).map(|i| self.dims[i])
    }

    /// Factors whose labels appear in `keep`, in this space's order.
    pub fn subspace(&self, keep: &[&str]) -> Result<FactorSpace> {
        for k in keep {
            if self.position(k).is_none() {
                return Err(Error::Label(format!("unknown label `{k}`")));
            }
        }
        Ok(FactorSpace {
            labels: self.labels.iter().filter(|l| keep.contains(&l.as_str())).cloned().collect(),
            dims: self.labels.iter().zip(&self.dims).filter(|(l, _)| keep.contains(&l.as_str())).map(|(_, d)| *d).collect(),
        })
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.dims[i + 1];
        }
        s
    }

    /// For every basis index: (index in the `sub` factors, index in the remaining factors).
    pub(crate) fn split_indices(&self, sub: &[usize]) -> Vec<(usize, usize)> {
        let strides = self.strides();
        let rest: Vec<usize> = (0..self.dims.len()).filter(|i| !sub.contains(i)).collect();
        (0..self.dim())
            .map(|idx| {
                let digit = |k: usize| (idx / strides[k]) % self.dims[k];
                let a = sub.iter().fold(0, |acc, &k| acc * self.dims[k] + digit(k));
                let b = rest.iter().fold(0, |acc, &k| acc * self.dims[k] + digit(k));
                (a, b)
            })
            .collect()
    }
}

/// Matrix with trace one, Hermitian and positive semidefinite.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    space: FactorSpace,
    matrix: Mat<c64>,
}

/// Hermitian idempotent.
#[derive(Clone, Debug)]
pub struct Projector {
    space: FactorSpace,
    matrix: Mat<c64>,
}

fn check_square(space: &FactorSpace, m: &Mat<c64>) -> Result<()> {
    let d = space.dim();
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::Dimension(format!("matrix is {}x{}, space has dimension {d}", m.nrows(), m.ncols())));
    }
    Ok(())
}

/// Largest entry of `m - m†`.
pub fn hermiticity_defect(m: &Mat<c64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..=i {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn trace(m: &Mat<c64>) -> c64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

pub(crate) fn hermitize(m: &Mat<c64>) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

fn eigen_cap_check(d: usize) -> Result<()> {
    let cap = Tolerances::default().eigen_cap;
    if d > cap {
        return Err(Error::Cap { dim: d, cap });
    }
    Ok(())
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn eigenvalues(m: &Mat<c64>) -> Result<Vec<f64>> {
    eigen_cap_check(m.nrows())?;
    let v = m.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::Eigen)?;
    Ok(v)
}

/// Eigenvalues (ascending) and eigenvectors as columns.
pub fn eigen(m: &Mat<c64>) -> Result<(Vec<f64>, Mat<c64>)> {
    eigen_cap_check(m.nrows())?;
    let e = m.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigen)?;
    let vals = (0..m.nrows()).map(|i| e.S().column_vector()[i].re).collect();
    Ok((vals, e.U().to_owned()))
}

/// Operator norm of a Hermitian or anti-Hermitian matrix.
pub fn normal_norm(m: &Mat<c64>) -> Result<f64> {
    let skew = hermiticity_defect(m) > 1e-12 * (1.0 + m.norm_max());
    let h = if skew { Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * c64::new(0.0, 1.0)) } else { m.clone() };
    Ok(eigenvalues(&hermitize(&h))?.into_iter().fold(0.0, |a: f64, x| a.max(x.abs())))
}

/// Trace norm of a Hermitian difference, via eigenvalues.
pub fn trace_distance(a: &Mat<c64>, b: &Mat<c64>) -> Result<f64> {
    let diff = hermitize(&(a - b));
    Ok(0.5 * eigenvalues(&diff)?.into_iter().map(f64::abs).sum::<f64>())
}

/// Projector onto the span of the columns of an isometry `v`.
pub fn range_projector(v: &Mat<c64>) -> Mat<c64> {
    v * v.adjoint()
}

impl DensityOperator {
    /// Validate Hermiticity, positivity and unit trace.
    pub fn new(space: FactorSpace, matrix: Mat<c64>) -> Result<Self> {
        check_square(&space, &matrix)?;
        let tol = Tolerances::default();
        if hermiticity_defect(&matrix) > 1e-9 {
            return Err(Error::InvalidOperator("density matrix is not Hermitian".into()));
        }
        if (trace(&matrix) - c64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidOperator(format!("trace {} differs from one", trace(&matrix))));
        }
        let matrix = hermitize(&matrix);
        if space.dim() <= tol.eigen_cap {
            let min = eigenvalues(&matrix)?.first().copied().unwrap_or(0.0);
            if min < -tol.psd {
                return Err(Error::InvalidOperator(format!("negative eigenvalue {min}")));
            }
        }
        Ok(DensityOperator { space, matrix })
    }

    /// Skip validation for matrices that are density operators by construction.
    pub(crate) fn new_unchecked(space: FactorSpace, matrix: Mat<c64>) -> Self {
        DensityOperator { space, matrix }
    }

    /// Normalise a PSD matrix to unit trace.
    pub fn from_unnormalized(space: FactorSpace, matrix: Mat<c64>) -> Result<Self> {
        let t = trace(&matrix).re;
        if t <= 0.0 {
            return Err(Error::InvalidOperator("zero trace".into()));
        }
        Self::new(space, Mat::from_fn(matrix.nrows(), matrix.ncols(), |i, j| matrix[(i, j)] / t))
    }

    pub fn pure(space: FactorSpace, psi: &[c64]) -> Result<Self> {
        if psi.len() != space.dim() {
            return Err(Error::Dimension("state vector length".into()));
        }
        let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 {
            return Err(Error::InvalidOperator("zero vector".into()));
        }
        let d = psi.len();
        let m = Mat::from_fn(d, d, |i, j| psi[i] * psi[j].conj() / (n * n));
        Ok(DensityOperator { space, matrix: m })
    }

    pub fn maximally_mixed(space: FactorSpace) -> Self {
        let d = space.dim();
        let m = Mat::from_fn(d, d, |i, j| if i == j { c64::new(1.0 / d as f64, 0.0) } else { c64::new(0.0, 0.0) });
        DensityOperator { space, matrix: m }
    }

    /// Tensor product with the factors of `other` appended.
    pub fn tensor(&self, other: &DensityOperator) -> Result<Self> {
        let space = FactorSpace::new(
            self.space.labels.iter().cloned().zip(self.space.dims.iter().copied()).chain(
                other.space.labels.iter().cloned().zip(other.space.dims.iter().copied()),
            ),
        )?;
        Ok(DensityOperator { space, matrix: kron(&self.matrix, &other.matrix) })
    }

    pub fn space(&self) -> &FactorSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Mat<c64> {
        &self.matrix
    }

    pub fn embed(&self, target: &FactorSpace) -> Result<DensityOperator> {
        Ok(DensityOperator { space: target.clone(), matrix: embed_matrix(&self.space, &self.matrix, target)? })
    }

    /// Conjugate by a unitary on the whole space.
    pub fn conjugate(&self, u: &Mat<c64>) -> Result<DensityOperator> {
        check_square(&self.space, u)?;
        Ok(DensityOperator { space: self.space.clone(), matrix: hermitize(&(u * &self.matrix * u.adjoint())) })
    }

    /// Reorder the factors to match `order`.
    pub fn permute(&self, order: &[&str]) -> Result<DensityOperator> {
        if order.len() != self.space.labels.len() {
            return Err(Error::Label("permutation must list every label".into()));
        }
        let target = FactorSpace::new(
            order.iter().map(|l| Ok((l.to_string(), self.space.dim_of(l).ok_or_else(|| Error::Label(l.to_string()))?))).collect::<Result<Vec<_>>>()?,
        )?;
        self.embed(&target)
    }
}

impl Projector {
    pub fn new(space: FactorSpace, matrix: Mat<c64>) -> Result<Self> {
        check_square(&space, &matrix)?;
        if hermiticity_defect(&matrix) > 1e-9 {
            return Err(Error::InvalidOperator("projector is not Hermitian".into()));
        }
        let sq = &matrix * &matrix;
        if normal_norm(&(&sq - &matrix))? > 1e-9 {
            return Err(Error::InvalidOperator("projector is not idempotent".into()));
        }
        Ok(Projector { space, matrix: hermitize(&matrix) })
    }

    pub(crate) fn new_unchecked(space: FactorSpace, matrix: Mat<c64>) -> Self {
        Projector { space, matrix }
    }

    pub fn identity(space: FactorSpace) -> Self {
        let d = space.dim();
        Projector { space, matrix: Mat::identity(d, d) }
    }

    pub fn space(&self) -> &FactorSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Mat<c64> {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        trace(&self.matrix).re.round() as usize
    }

    pub fn embed(&self, target: &FactorSpace) -> Result<Projector> {
        Ok(Projector { space: target.clone(), matrix: embed_matrix(&self.space, &self.matrix, target)? })
    }

    /// Orthonormal basis of the range, as columns.
    pub fn range_basis(&self) -> Result<Mat<c64>> {
        let (vals, vecs) = eigen(&self.matrix)?;
        let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 0.5).collect();
        Ok(Mat::from_fn(vecs.nrows(), keep.len(), |i, k| vecs[(i, keep[k])]))
    }
}

/// `s * m`.
pub fn scale(m: &Mat<c64>, s: c64) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * s)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Mat<c64>, b: &Mat<c64>) -> Mat<c64> {
    let (br, bc) = (b.nrows(), b.ncols());
    Mat::from_fn(a.nrows() * br, a.ncols() * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// `op ⊗ I` on the missing factors, reordered to the label order of `target`.
pub fn embed_matrix(space: &FactorSpace, op: &Mat<c64>, target: &FactorSpace) -> Result<Mat<c64>> {
    check_square(space, op)?;
    let mut sub = Vec::with_capacity(space.labels.len());
    for (l, d) in space.labels.iter().zip(&space.dims) {
        let k = target.position(l).ok_or_else(|| Error::Label(format!("`{l}` missing from target space")))?;
        if target.dims[k] != *d {
            return Err(Error::Dimension(format!("factor `{l}` has dimension {d} vs {}", target.dims[k])));
        }
        sub.push(k);
    }
    let split = target.split_indices(&sub);
    let n = target.dim();
    Ok(Mat::from_fn(n, n, |i, j| {
        let (a, b) = (split[i], split[j]);
        if a.1 == b.1 {
            op[(a.0, b.0)]
        } else {
            c64::new(0.0, 0.0)
        }
    }))
}

/// Reduced state on the factors named in `keep`, kept in the state's factor order.
pub fn partial_trace(state: &DensityOperator, keep: &[&str]) -> Result<DensityOperator> {
    let space = state.space.subspace(keep)?;
    let sub: Vec<usize> = space.labels.iter().map(|l| state.space.position(l).unwrap()).collect();
    let split = state.space.split_indices(&sub);
    let dk = space.dim();
    let mut out = Mat::<c64>::zeros(dk, dk);
    // Group basis indices by their traced digits.
    let rest_dim = state.space.dim() / dk;
    let mut by_rest: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(dk); rest_dim];
    for (idx, &(a, b)) in split.iter().enumerate() {
        by_rest[b].push((a, idx));
    }
    for group in &by_rest {
        for &(a, i) in group {
            for &(b, j) in group {
                out[(a, b)] += state.matrix[(i, j)];
            }
        }
    }
    Ok(DensityOperator { space, matrix: out })
}

/// Von Neumann entropy in bits, summing over eigenvalues above `tol.rank`.
pub fn entropy_with(state: &DensityOperator, tol: &Tolerances) -> Result<f64> {
    let vals = eigenvalues(&state.matrix)?;
    if vals.first().is_some_and(|&v| v < -tol.psd) {
        return Err(Error::InvalidOperator(format!("negative eigenvalue {}", vals[0])));
    }
    Ok(vals.into_iter().filter(|&l| l > tol.rank).map(|l| -l * l.log2()).sum())
}

pub fn entropy(state: &DensityOperator) -> Result<f64> {
    entropy_with(state, &Tolerances::default())
}

fn labels_disjoint(groups: &[&[&str]]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for g in groups {
        for l in *g {
            if !seen.insert(*l) {
                return Err(Error::Label(format!("`{l}` appears in more than one subsystem")));
            }
        }
    }
    Ok(())
}

/// Entropy of the marginal on a list of labels; the empty marginal has entropy zero.
pub fn marginal_entropy(state: &DensityOperator, labels: &[&str]) -> Result<f64> {
    if labels.is_empty() {
        return Ok(0.0);
    }
    entropy(&partial_trace(state, labels)?)
}

fn concat<'a>(groups: &[&[&'a str]]) -> Vec<&'a str> {
    groups.iter().flat_map(|g| g.iter().copied()).collect()
}

/// `I(A:C|B) = S(AB) + S(BC) - S(B) - S(ABC)` in bits.
pub fn cmi(state: &DensityOperator, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
    labels_disjoint(&[a, b, c])?;
    let ab = concat(&[a, b]);
    let bc = concat(&[b, c]);
    let abc = concat(&[a, b, c]);
    Ok(marginal_entropy(state, &ab)? + marginal_entropy(state, &bc)? - marginal_entropy(state, b)?
        - marginal_entropy(state, &abc)?)
}

/// `S(A|B) + S(A|C)`, non-negative for every state.
pub fn weak_monotonicity_slack(state: &DensityOperator, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
    labels_disjoint(&[a, b, c])?;
    Ok(marginal_entropy(state, &concat(&[a, b]))? - marginal_entropy(state, b)?
        + marginal_entropy(state, &concat(&[a, c]))?
        - marginal_entropy(state, c)?)
}

/// Support projector with its rank and a conditioning flag.
#[derive(Clone, Debug)]
pub struct SupportProjector {
    pub projector: Projector,
    pub rank: usize,
    /// Some eigenvalue lies within a factor of ten of the cutoff.
    pub ill_conditioned: bool,
}

/// Projector onto eigenvectors with eigenvalue above `tau * lambda_max`.
pub fn support_projector(state: &DensityOperator, tau: f64) -> Result<SupportProjector> {
    let (vals, vecs) = eigen(&state.matrix)?;
    let lmax = vals.last().copied().unwrap_or(0.0);
    let cut = tau * lmax;
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > cut).collect();
    let ill = vals.iter().any(|&v| v > cut / 10.0 && v < cut * 10.0);
    let v = Mat::from_fn(vecs.nrows(), keep.len(), |i, k| vecs[(i, keep[k])]);
    Ok(SupportProjector {
        projector: Projector::new_unchecked(state.space.clone(), hermitize(&range_projector(&v))),
        rank: keep.len(),
        ill_conditioned: ill,
    })
}

fn same_space(a: &FactorSpace, b: &FactorSpace) -> Result<()> {
    if a != b {
        return Err(Error::Label("operators act on different factor spaces; embed first".into()));
    }
    Ok(())
}

/// Operator norm of `PQ - QP`.
pub fn commutator_norm(p: &Projector, q: &Projector) -> Result<f64> {
    same_space(&p.space, &q.space)?;
    let pq = &p.matrix * &q.matrix;
    let qp = &q.matrix * &p.matrix;
    normal_norm(&(pq - qp))
}

/// Modular commutator value and the imaginary part left over by rounding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModularCommutator {
    pub value: f64,
    pub imaginary_residue: f64,
}

/// `-log rho` on the support of `rho`, natural logarithm, zero off the support.
pub fn modular_hamiltonian(state: &DensityOperator, tau: f64) -> Result<Mat<c64>> {
    let (vals, vecs) = eigen(&state.matrix)?;
    let lmax = vals.last().copied().unwrap_or(0.0);
    let d = vals.len();
    let weights: Vec<f64> = vals.iter().map(|&l| if l > tau * lmax { -l.ln() } else { 0.0 }).collect();
    let scaled = Mat::from_fn(d, d, |i, k| vecs[(i, k)] * weights[k]);
    Ok(hermitize(&(scaled * vecs.adjoint())))
}

/// `J(A,B,C) = i Tr(rho_ABC [K_AB, K_BC])` with `K_X = -ln rho_X` on its support.
pub fn modular_commutator(state: &DensityOperator, a: &[&str], b: &[&str], c: &[&str]) -> Result<ModularCommutator> {
    labels_disjoint(&[a, b, c])?;
    let tau = Tolerances::default().rank;
    let abc: Vec<&str> = a.iter().chain(b).chain(c).copied().collect();
    let rho = partial_trace(state, &abc)?;
    let ab: Vec<&str> = a.iter().chain(b).copied().collect();
    let bc: Vec<&str> = b.iter().chain(c).copied().collect();
    let rho_ab = partial_trace(&rho, &ab)?;
    let rho_bc = partial_trace(&rho, &bc)?;
    let k_ab = embed_matrix(&rho_ab.space, &modular_hamiltonian(&rho_ab, tau)?, &rho.space)?;
    let k_bc = embed_matrix(&rho_bc.space, &modular_hamiltonian(&rho_bc, tau)?, &rho.space)?;
    let comm = &k_ab * &k_bc - &k_bc * &k_ab;
    let t = trace(&(&rho.matrix * comm)) * c64::new(0.0, 1.0);
    Ok(ModularCommutator { value: t.re, imaginary_residue: t.im })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::random::{random_density, random_pure, random_unitary};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> c64 {
        c64::new(re, 0.0)
    }

    fn ghz3() -> DensityOperator {
        let mut psi = vec![c(0.0); 8];
        psi[0] = c(1.0);
        psi[7] = c(1.0);
        DensityOperator::pure(FactorSpace::qubits(["1", "2", "3"]).unwrap(), &psi).unwrap()
    }

    fn ket0() -> DensityOperator {
        DensityOperator::pure(FactorSpace::qubits(["A"]).unwrap(), &[c(1.0), c(0.0)]).unwrap()
    }

    fn plus() -> Mat<c64> {
        Mat::from_fn(2, 2, |_, _| c(0.5))
    }

    #[test]
    fn space_validation() {
        assert!(FactorSpace::new([("a", 2), ("a", 2)]).is_err());
        assert!(FactorSpace::new([("a", 0)]).is_err());
        assert!(matches!(FactorSpace::with_cap([("a", 4), ("b", 4)], 8), Err(Error::Cap { .. })));
        let s = FactorSpace::new([("a", 2), ("b", 3), ("c", 5)]).unwrap();
        assert_eq!(s.dim(), 30);
        assert_eq!(s.subspace(&["c", "a"]).unwrap().labels(), ["a", "c"]);
    }

    #[test]
    fn embed_identity_and_rank() {
        let p = Projector::new(FactorSpace::qubits(["A"]).unwrap(), ket0().matrix().clone()).unwrap();
        let same = p.embed(p.space()).unwrap();
        assert!((same.matrix() - p.matrix()).norm_max() == 0.0);
        let big = p.embed(&FactorSpace::new([("A", 2), ("B", 3)]).unwrap()).unwrap();
        assert_eq!(big.rank(), 3);
    }

    #[test]
    fn embed_reorders_like_explicit_permutation() {
        // |0><0| on A embedded into (B, A) is I_B ⊗ |0><0|_A = diag(1, 0, 1, 0).
        let target = FactorSpace::qubits(["B", "A"]).unwrap();
        let e = ket0().embed(&target).unwrap();
        let expected = [1.0, 0.0, 1.0, 0.0];
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { expected[i] } else { 0.0 };
                assert_eq!(e.matrix()[(i, j)], c(want));
            }
        }
    }

    #[test]
    fn ghz_marginals_and_cmi() {
        let g = ghz3();
        let r = partial_trace(&g, &["1", "2"]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j && (i == 0 || i == 3) { 0.5 } else { 0.0 };
                assert!((r.matrix()[(i, j)] - c(want)).norm() < 1e-15);
            }
        }
        assert!((cmi(&g, &["1"], &["2"], &["3"]).unwrap() - 1.0).abs() < 1e-12);
        assert!(weak_monotonicity_slack(&g, &["1"], &["2"], &["3"]).unwrap().abs() < 1e-12);
        let all = partial_trace(&g, &["1", "2", "3"]).unwrap();
        assert!((all.matrix() - g.matrix()).norm_max() < 1e-15);
    }

    #[test]
    fn entropy_values() {
        assert!(entropy(&ket0()).unwrap().abs() < 1e-12);
        let mixed = DensityOperator::maximally_mixed(FactorSpace::qubits(["A"]).unwrap());
        assert!((entropy(&mixed).unwrap() - 1.0).abs() < 1e-12);
        let m = Mat::from_fn(2, 2, |i, j| if i == j { c(if i == 0 { 0.75 } else { 0.25 }) } else { c(0.0) });
        let rho = DensityOperator::new(FactorSpace::qubits(["A"]).unwrap(), m).unwrap();
        let want = -0.75f64 * 0.75f64.log2() - 0.25 * 0.25f64.log2();
        assert!((entropy(&rho).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn support_projectors() {
        let s = support_projector(&ket0(), 1e-10).unwrap();
        assert_eq!(s.rank, 1);
        let m = scale(&(ket0().matrix() + plus()), c(0.5));
        let rho = DensityOperator::new(FactorSpace::qubits(["A"]).unwrap(), m).unwrap();
        let s = support_projector(&rho, 1e-10).unwrap();
        assert_eq!(s.rank, 2);
        assert!(!s.ill_conditioned);
        assert!((s.projector.matrix() - Mat::<c64>::identity(2, 2)).norm_max() < 1e-12);
    }

    #[test]
    fn commutator_of_zero_and_plus() {
        let sp = FactorSpace::qubits(["A"]).unwrap();
        let p = Projector::new(sp.clone(), ket0().matrix().clone()).unwrap();
        let q = Projector::new(sp, plus()).unwrap();
        assert!(commutator_norm(&p, &p).unwrap() < 1e-15);
        assert!((commutator_norm(&p, &q).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn modular_commutator_vanishes_on_product_and_real_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sp = FactorSpace::qubits(["a", "b", "c"]).unwrap();
        let prod = random_density(&FactorSpace::qubits(["a"]).unwrap(), 2, &mut rng)
            .tensor(&random_density(&FactorSpace::qubits(["b"]).unwrap(), 2, &mut rng))
            .unwrap()
            .tensor(&random_density(&FactorSpace::qubits(["c"]).unwrap(), 2, &mut rng))
            .unwrap();
        let j = modular_commutator(&prod, &["a"], &["b"], &["c"]).unwrap();
        assert!(j.value.abs() < 1e-10);
        let real = random::random_real_density(&sp, 3, &mut rng);
        let j = modular_commutator(&real, &["a"], &["b"], &["c"]).unwrap();
        assert!(j.value.abs() < 1e-8, "{j:?}");
        assert!(j.imaginary_residue.abs() < 1e-9);
    }

    fn three_factor(seed: u64, pure: bool) -> DensityOperator {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims = [2 + (seed % 3) as usize, 2 + (seed / 3 % 3) as usize, 2];
        let sp = FactorSpace::new([("a", dims[0]), ("b", dims[1]), ("c", dims[2])]).unwrap();
        if pure {
            random_pure(&sp, &mut rng)
        } else {
            random_density(&sp, 3, &mut rng)
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn strong_subadditivity(seed in 0u64..1000, pure in any::<bool>()) {
            let rho = three_factor(seed, pure);
            prop_assert!(cmi(&rho, &["a"], &["b"], &["c"]).unwrap() >= -1e-9);
            prop_assert!(weak_monotonicity_slack(&rho, &["a"], &["b"], &["c"]).unwrap() >= -1e-9);
        }

        #[test]
        fn support_projector_preserves_state(seed in 0u64..1000) {
            let rho = three_factor(seed, false);
            let p = support_projector(&rho, 1e-10).unwrap().projector;
            let sandwiched = p.matrix() * rho.matrix() * p.matrix();
            prop_assert!(normal_norm(&(sandwiched - rho.matrix())).unwrap() <= 1e-9);
        }

        #[test]
        fn entropy_is_unitarily_invariant(seed in 0u64..1000) {
            let rho = three_factor(seed, false);
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 7);
            let u = random_unitary(rho.space().dim(), &mut rng);
            let rotated = rho.conjugate(&u).unwrap();
            prop_assert!((entropy(&rotated).unwrap() - entropy(&rho).unwrap()).abs() <= 1e-9);
        }

        #[test]
        fn partial_trace_commutes_with_permutation(seed in 0u64..1000) {
            let rho = three_factor(seed, false);
            let permuted = rho.permute(&["c", "a", "b"]).unwrap();
            let x = partial_trace(&rho, &["a", "c"]).unwrap();
            let y = partial_trace(&permuted, &["a", "c"]).unwrap().permute(&["a", "c"]).unwrap();
            prop_assert!((x.matrix() - y.matrix()).norm_max() <= 1e-12);
        }
    }
}
