//! Local topological order, checked as local uniqueness of zero-energy states.

use super::{restrict, Kernel, ParentHamiltonian};
use crate::axioms::StateBackend;
use crate::error::{Error, Result};
use crate::lattice::{neighborhood, wall_intervals, CoverSpec, FaceCoord, Region};
use crate::stabilizer::{face_label, logical_operator_on_qubits, supported_rank};
use crate::tensor::random::ginibre;
use crate::tensor::{embed_matrix, normal_norm, partial_trace, trace, DensityOperator, FactorSpace};
use faer::{c64, Mat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Reduced states of kernel vectors closer than this count as equal.
pub const MARGINAL_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LtqoParams {
    /// Margin between the tested disk and the boundary of the restriction region.
    pub ell: i64,
    pub r_max: i64,
    /// Ball centres to test; every radius `0..=r_max` is tried at each.
    pub centres: Vec<FaceCoord>,
    /// Rows of domain walls; disks meeting a wall in more than one interval are excluded.
    pub walls: Vec<i64>,
}

impl LtqoParams {
    /// `ell = 2 r_cover + 1`.
    pub fn for_cover(cover: &CoverSpec, r_max: i64, centres: Vec<FaceCoord>) -> Self {
        LtqoParams { ell: 2 * cover.max_radius() + 1, r_max, centres, walls: vec![] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Ball,
    /// Full-width rows, wrapping around the torus.
    Band,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LtqoCase {
    pub shape: Shape,
    /// Ball centre, or `(0, first row)` for a band.
    pub centre: FaceCoord,
    /// Ball radius, or band width.
    pub size: i64,
    pub ell: i64,
    pub kernel_log2_dim: f64,
    /// Stabilizer path: a logical operator of the kernel code is supported on the disk.
    pub logical_in_a: Option<bool>,
    /// Stabilizer path: the kernel code's subgroup on the disk has the rank of the reference one.
    pub marginal_match: Option<bool>,
    /// Dense path: largest `‖Tr_rest |v_i><v_j| - δ_ij σ_A‖_F` over kernel basis pairs.
    pub marginal_deviation: Option<f64>,
    pub unique: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub centre: FaceCoord,
    pub radius: i64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LtqoReport {
    pub ell: i64,
    pub r_max: i64,
    pub cases: Vec<LtqoCase>,
    pub excluded: Vec<Exclusion>,
    pub pass: bool,
}

/// Faces within distance `ell` of `a`, kept on the lattice.
fn grow(h: &ParentHamiltonian, a: &Region, ell: i64) -> Region {
    let e = h.extent();
    let mut out = a.clone();
    for _ in 0..ell {
        out = out.union(&neighborhood(&out));
    }
    if e.periodic {
        out
    } else {
        out.iter().copied().filter(|f| e.contains(*f)).collect()
    }
}

fn on_lattice(h: &ParentHamiltonian, a: Region) -> Region {
    let e = h.extent();
    if e.periodic {
        a
    } else {
        a.iter().copied().filter(|f| e.contains(*f)).collect()
    }
}

/// Check uniqueness of zero-energy marginals on balls, restricting `H` to the ball grown by `ell`.
pub fn check_ltqo(h: &ParentHamiltonian, backend: &StateBackend, params: &LtqoParams) -> Result<LtqoReport> {
    if params.ell < 1 {
        return Err(Error::Precondition("ell must be at least 1".into()));
    }
    let e = h.extent();
    let mut cases = vec![];
    let mut excluded = vec![];
    for &c in &params.centres {
        for r in 0..=params.r_max {
            let a = on_lattice(h, Region::ball(c, r));
            let big = grow(h, &a, params.ell);
            if !e.holds(&big) {
                excluded.push(Exclusion { centre: c, radius: r, reason: "enlarged disk wraps the torus".into() });
                continue;
            }
            if let Some(k) = params.walls.iter().find(|k| wall_intervals(&e, **k, &a) > 1) {
                excluded.push(Exclusion { centre: c, radius: r, reason: format!("meets the wall at row {k} in two intervals") });
                continue;
            }
            let mut case = uniqueness(h, backend, &a, &big)?;
            case.centre = c;
            case.size = r;
            case.ell = params.ell;
            cases.push(case);
        }
    }
    let pass = cases.iter().all(|c| c.unique);
    Ok(LtqoReport { ell: params.ell, r_max: params.r_max, cases, excluded, pass })
}

/// The same uniqueness test on a non-contractible band of `width` rows starting at `first_row`.
///
/// On a topologically ordered torus this is expected to fail: a logical string runs along the band.
pub fn band_control(h: &ParentHamiltonian, backend: &StateBackend, first_row: i64, width: i64, ell: i64) -> Result<LtqoCase> {
    let e = h.extent();
    if !e.periodic || width + 2 * ell >= e.rows {
        return Err(Error::Geometry("band control needs a torus taller than the enlarged band".into()));
    }
    let rows = |lo: i64, hi: i64| -> Region { (lo..hi).flat_map(|r| (0..e.cols).map(move |q| FaceCoord::new(q, r))).collect() };
    let a = rows(first_row, first_row + width);
    let big = rows(first_row - ell, first_row + width + ell);
    let mut case = uniqueness(h, backend, &a, &big)?;
    case.shape = Shape::Band;
    case.centre = FaceCoord::new(0, first_row);
    case.size = width;
    case.ell = ell;
    Ok(case)
}

fn uniqueness(h: &ParentHamiltonian, backend: &StateBackend, a: &Region, big: &Region) -> Result<LtqoCase> {
    let k = restrict(h, big)?;
    let mut case = LtqoCase {
        shape: Shape::Ball,
        centre: FaceCoord::new(0, 0),
        size: 0,
        ell: 0,
        kernel_log2_dim: k.log2_dimension(),
        logical_in_a: None,
        marginal_match: None,
        marginal_deviation: None,
        unique: false,
    };
    match &k.kernel {
        Kernel::Code(code) => {
            let qa = code.qubits_in(a)?;
            let logical = logical_operator_on_qubits(code, &qa);
            let entropy = backend.entropy(a)?.round() as usize;
            let matches = supported_rank(code, &qa) + entropy == qa.len();
            case.logical_in_a = Some(logical);
            case.marginal_match = Some(matches);
            case.unique = !logical && matches;
        }
        Kernel::Basis { space, vectors } => {
            let rho = backend.dense_state().ok_or_else(|| Error::Precondition("dense kernel needs a dense backend".into()))?;
            let sigma = marginal(rho, a)?;
            let dev = kernel_marginal_deviation(space, vectors, &sigma)?;
            case.marginal_deviation = Some(dev);
            case.unique = dev < MARGINAL_TOL;
        }
    }
    Ok(case)
}

fn marginal(rho: &DensityOperator, a: &Region) -> Result<DensityOperator> {
    let labels: Vec<String> = a.iter().map(|f| face_label(*f)).collect();
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    partial_trace(rho, &refs)
}

/// Largest deviation of `Tr_rest |v_i><v_j|` from `δ_ij σ_A` over the kernel basis.
fn kernel_marginal_deviation(space: &FactorSpace, vectors: &Mat<c64>, sigma: &DensityOperator) -> Result<f64> {
    let sub: Vec<usize> = sigma
        .space()
        .labels()
        .iter()
        .map(|l| space.position(l).ok_or_else(|| Error::Label(format!("`{l}` missing from the kernel space"))))
        .collect::<Result<_>>()?;
    let split = space.split_indices(&sub);
    let da = sigma.space().dim();
    let dr = space.dim() / da;
    let reshaped: Vec<Mat<c64>> = (0..vectors.ncols())
        .map(|k| {
            let mut m = Mat::<c64>::zeros(da, dr);
            for (idx, &(x, y)) in split.iter().enumerate() {
                m[(x, y)] = vectors[(idx, k)];
            }
            m
        })
        .collect();
    let mut worst: f64 = 0.0;
    for (i, vi) in reshaped.iter().enumerate() {
        for (j, vj) in reshaped.iter().enumerate() {
            let t = vi * vj.adjoint();
            let dev = if i == j { (&t - sigma.matrix()).norm_l2() } else { t.norm_l2() };
            worst = worst.max(dev);
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichTest {
    pub kernel_dim: usize,
    pub samples: usize,
    /// Largest `‖Q O Q - Tr(O σ_A) Q‖` over the sampled observables.
    pub max_deviation: f64,
}

/// Direct test of `Q O_A Q = c(O_A) Q` for random Hermitian `O_A`, where `Q` projects onto the
/// zero-energy space of `H` restricted to `a` grown by `ell`. Dense backends only.
pub fn sandwich_test(
    h: &ParentHamiltonian,
    backend: &StateBackend,
    a: &Region,
    ell: i64,
    samples: usize,
    seed: u64,
) -> Result<SandwichTest> {
    let rho = backend.dense_state().ok_or_else(|| Error::Precondition("sandwich test needs a dense backend".into()))?;
    let big = grow(h, a, ell);
    let k = restrict(h, &big)?;
    let Kernel::Basis { space, vectors } = &k.kernel else {
        return Err(Error::Precondition("sandwich test needs a dense Hamiltonian".into()));
    };
    let q = vectors * vectors.adjoint();
    let sigma = marginal(rho, a)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let da = sigma.space().dim();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let g = ginibre(da, da, &mut rng);
        let o = Mat::from_fn(da, da, |i, j| (g[(i, j)] + g[(j, i)].conj()) * 0.5);
        let c = trace(&(&o * sigma.matrix())).re;
        let big_o = embed_matrix(sigma.space(), &o, space)?;
        let qoq = &q * &big_o * &q;
        let diff = Mat::from_fn(q.nrows(), q.ncols(), |i, j| qoq[(i, j)] - q[(i, j)] * c);
        worst = worst.max(normal_norm(&diff)?);
    }
    Ok(SandwichTest { kernel_dim: vectors.ncols(), samples, max_deviation: worst })
}
