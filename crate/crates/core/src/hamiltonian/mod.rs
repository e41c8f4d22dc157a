//! Commuting parent Hamiltonians `H = Σ_X (I - P_X)` assembled from a cover and a reference state.
//!
//! Stabilizer backends give every term as the code of stabilizers supported on its region,
//! so all checks are exact GF(2) computations. Dense backends use support projectors of the
//! region marginals and are limited to a few qubits.

mod ltqo;
mod manifest;
mod reduce;

pub use ltqo::{band_control, check_ltqo, sandwich_test, Exclusion, LtqoCase, LtqoParams, LtqoReport, SandwichTest};
pub use manifest::{read_manifest, write_manifest, HamiltonianManifest, Stamps};
pub use reduce::{compare_kernels, weight_reduce, KernelComparison, Split, SplitNode, WeightReduction};

use crate::axioms::StateBackend;
use crate::error::{Error, Result};
use crate::lattice::{cover_misses, CoverSpec, Extent, FaceCoord, Region};
use crate::stabilizer::{codes_commute, face_label, merge_codes, StabilizerCode, StabilizerState};
use crate::tensor::{eigen, partial_trace, support_projector, trace, DensityOperator, FactorSpace, Projector};
use faer::{c64, Mat};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};

/// Commutator norms below this count as commuting.
pub const COMMUTATOR_TOL: f64 = 1e-8;

/// Kernel eigenvalue cutoff for dense Hamiltonians.
pub const KERNEL_TOL: f64 = 1e-8;

/// Largest energy `1 - Tr(P ρ)` of a dense term on the reference state.
pub const ENERGY_TOL: f64 = 1e-8;

/// Margin from an open boundary for elementary disks checked by the cover condition.
const COVER_MARGIN: i64 = 2;

/// Projector of one term.
#[derive(Clone, Debug)]
pub enum TermOp {
    Code(StabilizerCode),
    Dense(Projector),
}

#[derive(Clone, Debug)]
pub struct Term {
    pub region: Region,
    pub op: TermOp,
}

/// Degrees of freedom per canonical face.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Sites {
    Qubits { total: usize, faces: Vec<(FaceCoord, Vec<usize>)> },
    Dense { faces: Vec<(FaceCoord, usize)> },
}

/// One term per cover region, in cover order.
#[derive(Clone, Debug)]
pub struct ParentHamiltonian {
    pub cover: CoverSpec,
    pub terms: Vec<Term>,
    sites: Sites,
}

impl ParentHamiltonian {
    pub fn new(cover: CoverSpec, terms: Vec<Term>, sites: Sites) -> Result<Self> {
        if terms.len() != cover.regions.len() {
            return Err(Error::Precondition(format!("{} terms for {} cover regions", terms.len(), cover.regions.len())));
        }
        if terms.iter().zip(&cover.regions).any(|(t, r)| t.region != *r) {
            return Err(Error::Precondition("term regions differ from the cover".into()));
        }
        let stabilizer = matches!(sites, Sites::Qubits { .. });
        if terms.iter().any(|t| matches!(t.op, TermOp::Code(_)) != stabilizer) {
            return Err(Error::Precondition("term kinds do not match the sites".into()));
        }
        Ok(ParentHamiltonian { cover, terms, sites })
    }

    pub fn sites(&self) -> &Sites {
        &self.sites
    }

    pub fn extent(&self) -> Extent {
        self.cover.extent
    }

    pub fn is_stabilizer(&self) -> bool {
        matches!(self.sites, Sites::Qubits { .. })
    }

    fn canonical(&self, region: &Region) -> Result<Region> {
        let e = self.cover.extent;
        region
            .iter()
            .map(|f| e.canonical(*f).ok_or_else(|| Error::Geometry(format!("face {f} lies off the lattice"))))
            .collect()
    }

    /// Faces of `d` with their global qubit indices.
    fn qubit_layout(&self, d: &Region) -> Result<(usize, Vec<(FaceCoord, Vec<usize>)>)> {
        let Sites::Qubits { total, faces } = &self.sites else {
            return Err(Error::Precondition("qubit layout of a dense Hamiltonian".into()));
        };
        let map: BTreeMap<FaceCoord, &Vec<usize>> = faces.iter().map(|(f, q)| (*f, q)).collect();
        let e = self.cover.extent;
        let layout = d
            .iter()
            .map(|f| {
                let q = e.canonical(*f).and_then(|c| map.get(&c)).ok_or_else(|| Error::Geometry(format!("face {f} carries no qubits")))?;
                Ok((*f, (*q).clone()))
            })
            .collect::<Result<_>>()?;
        Ok((*total, layout))
    }

    /// Face factors of `d`, in region order.
    fn dense_space(&self, d: &Region, cap: usize) -> Result<FactorSpace> {
        let Sites::Dense { faces } = &self.sites else {
            return Err(Error::Precondition("dense space of a stabilizer Hamiltonian".into()));
        };
        let map: BTreeMap<FaceCoord, usize> = faces.iter().copied().collect();
        let factors = d
            .iter()
            .map(|f| map.get(f).map(|&dim| (face_label(*f), dim)).ok_or_else(|| Error::Geometry(format!("face {f} is not a factor"))))
            .collect::<Result<Vec<_>>>()?;
        FactorSpace::with_cap(factors, cap)
    }

    /// Indices of the terms whose region lies inside `d`.
    pub fn terms_within(&self, d: &Region) -> Result<Vec<usize>> {
        let inside: HashSet<FaceCoord> = self.canonical(d)?.iter().copied().collect();
        Ok(self
            .cover
            .canonical_sets()
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_subset(&inside))
            .map(|(i, _)| i)
            .collect())
    }
}

/// Conditional mutual information `I(X∖Y : Y∖X | X∩Y)` of an overlapping pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovPair {
    pub x: usize,
    pub y: usize,
    pub cmi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub markov_pairs: Vec<MarkovPair>,
    /// Faces whose padded elementary disk lies in no region.
    pub cover_misses: Vec<FaceCoord>,
    pub threshold: f64,
    pub pass: bool,
}

/// Check both conditions of a Markov cover on the reference state.
pub fn validate_cover(backend: &StateBackend, cover: &CoverSpec) -> Result<CoverReport> {
    let mut markov_pairs = vec![];
    for (i, j) in cover.overlapping_pairs() {
        let x = &cover.regions[i];
        let y = cover.aligned(i, j);
        let b = x.intersection(&y);
        let cmi = backend.cmi(&x.difference(&y), &b, &y.difference(x))?;
        markov_pairs.push(MarkovPair { x: i, y: j, cmi });
    }
    let misses = cover_misses(cover, COVER_MARGIN);
    let threshold = backend.threshold();
    let pass = misses.is_empty() && markov_pairs.iter().all(|p| p.cmi <= threshold);
    Ok(CoverReport { markov_pairs, cover_misses: misses, threshold, pass })
}

/// Term projector for one region of the reference state.
pub(crate) fn term_op(backend: &StateBackend, region: &Region) -> Result<TermOp> {
    if let Some(s) = backend.stabilizer_state() {
        return Ok(TermOp::Code(s.region_support_code(region)?));
    }
    let rho = backend.dense_state().expect("dense backend");
    let labels: Vec<String> = region.iter().map(|f| face_label(*f)).collect();
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let marginal = partial_trace(rho, &refs)?;
    Ok(TermOp::Dense(support_projector(&marginal, backend.tolerances().rank)?.projector))
}

fn backend_sites(backend: &StateBackend) -> Result<Sites> {
    if let Some(s) = backend.stabilizer_state() {
        let faces = s.faces();
        let layout = s.layout(&faces)?;
        return Ok(Sites::Qubits { total: s.num_qubits(), faces: layout });
    }
    let rho = backend.dense_state().expect("dense backend");
    let faces = backend
        .faces()
        .iter()
        .map(|f| (*f, rho.space().dim_of(&face_label(*f)).unwrap()))
        .collect();
    Ok(Sites::Dense { faces })
}

/// Assemble `H = Σ_X (I - P_X)`. The cover is expected to pass [`validate_cover`].
pub fn build(backend: &StateBackend, cover: &CoverSpec) -> Result<ParentHamiltonian> {
    if let (Some(e), Some(c)) = (backend.extent(), Some(cover.extent)) {
        if e != c {
            return Err(Error::Geometry("cover and state live on different extents".into()));
        }
    }
    let terms = cover
        .regions
        .iter()
        .map(|r| Ok(Term { region: r.clone(), op: term_op(backend, r)? }))
        .collect::<Result<Vec<_>>>()?;
    ParentHamiltonian::new(cover.clone(), terms, backend_sites(backend)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCommutation {
    pub x: usize,
    pub y: usize,
    pub commute: bool,
    /// Frobenius bound on the commutator norm, for dense terms.
    pub norm_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutingReport {
    pub pairs: Vec<PairCommutation>,
    pub pass: bool,
}

/// Check every overlapping pair of terms; disjoint pairs commute trivially and are skipped.
pub fn check_commuting(h: &ParentHamiltonian) -> Result<CommutingReport> {
    let mut pairs = vec![];
    for (i, j) in h.cover.overlapping_pairs() {
        let entry = match (&h.terms[i].op, &h.terms[j].op) {
            (TermOp::Code(a), TermOp::Code(b)) => PairCommutation { x: i, y: j, commute: codes_commute(a, b), norm_bound: None },
            (TermOp::Dense(a), TermOp::Dense(b)) => {
                let n = commutator_frobenius(a, b)?;
                PairCommutation { x: i, y: j, commute: n < COMMUTATOR_TOL, norm_bound: Some(n) }
            }
            _ => return Err(Error::Precondition("mixed term kinds".into())),
        };
        pairs.push(entry);
    }
    let pass = pairs.iter().all(|p| p.commute);
    Ok(CommutingReport { pairs, pass })
}

/// Frobenius norm of `[P ⊗ I, I ⊗ Q]` on the union of the two factor sets.
///
/// Bounds the operator norm from above. Rows and columns of the product are formed one
/// at a time, so memory stays linear in the union dimension.
pub fn commutator_frobenius(p: &Projector, q: &Projector) -> Result<f64> {
    let (ps, qs) = (p.space(), q.space());
    let shared: Vec<&str> = ps.labels().iter().map(String::as_str).filter(|l| qs.position(l).is_some()).collect();
    for l in &shared {
        if ps.dim_of(l) != qs.dim_of(l) {
            return Err(Error::Dimension(format!("factor `{l}` differs between the terms")));
        }
    }
    let only_p: Vec<&str> = ps.labels().iter().map(String::as_str).filter(|l| !shared.contains(l)).collect();
    let only_q: Vec<&str> = qs.labels().iter().map(String::as_str).filter(|l| !shared.contains(l)).collect();
    let pm = reorder(p.matrix(), ps, &[&only_p[..], &shared[..]].concat());
    let qm = reorder(q.matrix(), qs, &[&shared[..], &only_q[..]].concat());
    let dim = |s: &crate::tensor::FactorSpace, ls: &[&str]| ls.iter().map(|l| s.dim_of(l).unwrap()).product::<usize>();
    let (dx, d_o, dy) = (dim(ps, &only_p), dim(ps, &shared), dim(qs, &only_q));
    let d = dx * d_o * dy;
    if d > crate::Tolerances::default().dense_cap {
        return Err(Error::Cap { dim: d, cap: crate::Tolerances::default().dense_cap });
    }
    let split = |i: usize| (i / (d_o * dy), (i / dy) % d_o, i % dy);
    // M = (P ⊗ I)(I ⊗ Q): M[(x,o,y),(x',o',y')] = Σ_m P[(x,o),(x',m)] Q[(m,y),(o',y')].
    let entry = |i: usize, j: usize| {
        let ((x, o, y), (x2, o2, y2)) = (split(i), split(j));
        let mut acc = c64::new(0.0, 0.0);
        for m in 0..d_o {
            acc += pm[(x * d_o + o, x2 * d_o + m)] * qm[(m * dy + y, o2 * dy + y2)];
        }
        acc
    };
    let mut total = 0.0;
    let mut row = vec![c64::new(0.0, 0.0); d];
    for i in 0..d {
        for (j, r) in row.iter_mut().enumerate() {
            *r = entry(i, j);
        }
        for (j, r) in row.iter().enumerate() {
            // C = M - M†, so C[i,j] = M[i,j] - conj(M[j,i]).
            total += (*r - entry(j, i).conj()).norm_sqr();
        }
    }
    Ok(total.sqrt())
}

/// Matrix of an operator with its factors listed in `order`.
fn reorder(m: &Mat<c64>, space: &FactorSpace, order: &[&str]) -> Mat<c64> {
    let sub: Vec<usize> = order.iter().map(|l| space.position(l).unwrap()).collect();
    let perm: Vec<usize> = space.split_indices(&sub).into_iter().map(|(a, _)| a).collect();
    let d = space.dim();
    let mut out = Mat::<c64>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            out[(perm[i], perm[j])] = m[(i, j)];
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrustrationReport {
    /// Terms that do not annihilate the reference state.
    pub violations: Vec<usize>,
    /// Largest `1 - Tr(P_X ρ_X)` over dense terms; zero for stabilizer terms that pass.
    pub max_energy: f64,
    pub pass: bool,
}

/// Whether every term annihilates the reference state of `backend`.
///
/// Stabilizer terms pass when each generator, with its sign, lies in the state's group.
pub fn frustration_free(h: &ParentHamiltonian, backend: &StateBackend) -> Result<FrustrationReport> {
    let mut violations = vec![];
    let mut max_energy: f64 = 0.0;
    for (i, t) in h.terms.iter().enumerate() {
        let energy = match &t.op {
            TermOp::Code(c) => {
                let s = backend.stabilizer_state().ok_or_else(|| Error::Precondition("stabilizer term on a dense backend".into()))?;
                if c.generators().iter().all(|g| s.group_sign(g) == Some(false)) {
                    0.0
                } else {
                    1.0
                }
            }
            TermOp::Dense(p) => {
                let rho = backend.dense_state().ok_or_else(|| Error::Precondition("dense term on a stabilizer backend".into()))?;
                let refs: Vec<&str> = p.space().labels().iter().map(String::as_str).collect();
                let marginal = partial_trace(rho, &refs)?;
                1.0 - trace(&(p.matrix() * marginal.matrix())).re
            }
        };
        max_energy = max_energy.max(energy);
        if energy > ENERGY_TOL {
            violations.push(i);
        }
    }
    let pass = violations.is_empty();
    Ok(FrustrationReport { violations, max_energy, pass })
}

/// Zero-energy space of a restricted Hamiltonian.
#[derive(Clone, Debug)]
pub enum Kernel {
    Code(StabilizerCode),
    /// Orthonormal basis as columns, over `space`.
    Basis { space: FactorSpace, vectors: Mat<c64> },
}

/// Kernel of `H_D = Σ_{X ⊆ D} (I - P_X)` on the degrees of freedom of `D`.
#[derive(Clone, Debug)]
pub struct KernelDescriptor {
    pub region: Region,
    /// Terms contained in the region.
    pub terms: Vec<usize>,
    pub kernel: Kernel,
}

impl KernelDescriptor {
    pub fn log2_dimension(&self) -> f64 {
        match &self.kernel {
            Kernel::Code(c) => c.log_dimension() as f64,
            Kernel::Basis { vectors, .. } => (vectors.ncols() as f64).log2(),
        }
    }

    /// Kernel dimension, when it fits in 64 bits.
    pub fn dimension(&self) -> Option<u64> {
        match &self.kernel {
            Kernel::Code(c) => 1u64.checked_shl(c.log_dimension() as u32),
            Kernel::Basis { vectors, .. } => Some(vectors.ncols() as u64),
        }
    }

    pub fn code(&self) -> Option<&StabilizerCode> {
        match &self.kernel {
            Kernel::Code(c) => Some(c),
            Kernel::Basis { .. } => None,
        }
    }

    /// Projector onto the kernel, for dense kernels.
    pub fn projector(&self) -> Option<Mat<c64>> {
        match &self.kernel {
            Kernel::Code(_) => None,
            Kernel::Basis { vectors, .. } => Some(vectors * vectors.adjoint()),
        }
    }
}

/// Restrict `H` to the terms inside `d` and compute the kernel.
pub fn restrict(h: &ParentHamiltonian, d: &Region) -> Result<KernelDescriptor> {
    if !h.cover.extent.holds(d) {
        return Err(Error::Geometry("restriction region leaves the lattice or wraps onto itself".into()));
    }
    let terms = h.terms_within(d)?;
    let kernel = match &h.sites {
        Sites::Qubits { .. } => {
            let (total, layout) = h.qubit_layout(d)?;
            let codes: Vec<&StabilizerCode> = terms
                .iter()
                .map(|&i| match &h.terms[i].op {
                    TermOp::Code(c) => c,
                    TermOp::Dense(_) => unreachable!("checked in ParentHamiltonian::new"),
                })
                .collect();
            let code = if codes.is_empty() {
                StabilizerCode::new(total, vec![], d.clone(), layout, Some(h.cover.extent))?
            } else {
                merge_codes(&codes, d.clone(), layout, Some(h.cover.extent))?
            };
            Kernel::Code(code)
        }
        Sites::Dense { .. } => {
            let tol = crate::Tolerances::default();
            let space = h.dense_space(d, tol.eigen_cap)?;
            let n = space.dim();
            let mut ham = Mat::<c64>::zeros(n, n);
            for &i in &terms {
                let TermOp::Dense(p) = &h.terms[i].op else { unreachable!("checked in ParentHamiltonian::new") };
                let embedded = p.embed(&space)?;
                ham = ham + (Mat::<c64>::identity(n, n) - embedded.matrix());
            }
            let (vals, vecs) = eigen(&ham)?;
            let keep: Vec<usize> = (0..n).filter(|&k| vals[k] < KERNEL_TOL).collect();
            let vectors = Mat::from_fn(n, keep.len(), |r, k| vecs[(r, keep[k])]);
            Kernel::Basis { space, vectors }
        }
    };
    Ok(KernelDescriptor { region: d.clone(), terms, kernel })
}

/// Stabilizer versus dense commutation of two small regions' terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseCrossCheck {
    pub x: Region,
    pub y: Region,
    pub qubits: usize,
    pub cmi: i64,
    pub stabilizer_commute: bool,
    /// Frobenius bound on the commutator of the dense support projectors.
    pub dense_norm: f64,
    pub agree: bool,
}

/// Compare `codes_commute` with the commutator of support projectors of densified marginals.
pub fn dense_cross_check(state: &StabilizerState, x: &Region, y: &Region, tol: f64) -> Result<DenseCrossCheck> {
    let cx = state.region_support_code(x)?;
    let cy = state.region_support_code(y)?;
    let rank_tol = crate::Tolerances::default().rank;
    let px = support_projector(&state.densify(x)?, rank_tol)?.projector;
    let py = support_projector(&state.densify(y)?, rank_tol)?.projector;
    let dense_norm = commutator_frobenius(&px, &py)?;
    let stabilizer_commute = codes_commute(&cx, &cy);
    let b = x.intersection(y);
    let cmi = state.region_cmi(&x.difference(y), &b, &y.difference(x))?;
    Ok(DenseCrossCheck {
        x: x.clone(),
        y: y.clone(),
        qubits: state.qubits_of(&x.union(y))?.len(),
        cmi,
        stabilizer_commute,
        dense_norm,
        agree: stabilizer_commute == (dense_norm < tol),
    })
}

/// Fixed polyhexes with at most `max_faces` faces, each translated so its least face is the origin.
pub fn small_shapes(max_faces: usize) -> Vec<Region> {
    let origin = FaceCoord::new(0, 0);
    let mut layer: std::collections::BTreeSet<Region> = [Region::single(origin)].into();
    let mut all: Vec<Region> = layer.iter().cloned().collect();
    for _ in 1..max_faces {
        let mut next = std::collections::BTreeSet::new();
        for shape in &layer {
            for f in shape.iter() {
                for g in f.ring() {
                    if !shape.contains(&g) {
                        next.insert(normalise(&shape.with(g)));
                    }
                }
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

fn normalise(r: &Region) -> Region {
    let m = r.first().expect("nonempty shape");
    r.translate(-m.q, -m.r)
}

/// Unordered overlapping pairs of small shapes whose union has at most `max_union` faces,
/// one representative per translation class, placed so the union's least face is `anchor`.
pub fn overlap_shapes(max_faces: usize, max_union: usize, anchor: FaceCoord) -> Vec<(Region, Region)> {
    let shapes = small_shapes(max_faces);
    let reach = 2 * max_faces as i64;
    let mut seen = std::collections::BTreeSet::new();
    for x in &shapes {
        for y in &shapes {
            for dq in -reach..=reach {
                for dr in -reach..=reach {
                    let yt = y.translate(dq, dr);
                    if x.is_disjoint(&yt) || x.union(&yt).len() > max_union || *x == yt {
                        continue;
                    }
                    let m = x.union(&yt).first().unwrap();
                    let (a, b) = (x.translate(-m.q, -m.r), yt.translate(-m.q, -m.r));
                    seen.insert(if a <= b { (a, b) } else { (b, a) });
                }
            }
        }
    }
    seen.into_iter().map(|(a, b)| (a.translate(anchor.q, anchor.r), b.translate(anchor.q, anchor.r))).collect()
}

/// Dense reference states used by the small dense instances: the marginal on every face.
pub fn dense_backend_state(state: &StabilizerState) -> Result<DensityOperator> {
    state.densify(&state.faces())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{red_hexagon_cover, CoverProvenance};
    use crate::stabilizer::{bond_state, insert_anyon_pair, make_toric_code, product_state, AnyonKind, CoarseGrainSpec};
    use crate::Tolerances;

    /// Windows of `width` consecutive faces along a one-row patch.
    pub(crate) fn window_cover(cols: i64, width: i64) -> CoverSpec {
        let extent = Extent::patch(1, cols);
        let regions: Vec<Region> =
            (0..=cols - width).map(|s| (s..s + width).map(|q| FaceCoord::new(q, 0)).collect()).collect();
        let centres = regions.iter().map(|r| r.first().unwrap()).collect();
        CoverSpec::new(extent, regions, centres, CoverProvenance::Custom { note: "windows".into() }).unwrap()
    }

    #[test]
    fn toric_red_hexagon_instance() {
        let s = make_toric_code(20, 20, CoarseGrainSpec::OwnedEdges).unwrap();
        let backend = StateBackend::stabilizer(&s);
        let cover = red_hexagon_cover(Extent::torus(20, 20)).unwrap();
        let report = validate_cover(&backend, &cover).unwrap();
        assert!(report.pass);
        assert!(report.markov_pairs.iter().all(|p| p.cmi == 0.0));
        let h = build(&backend, &cover).unwrap();
        assert!(check_commuting(&h).unwrap().pass);
        assert!(frustration_free(&h, &backend).unwrap().pass);
        // Terms generate every star and plaquette but no logical loop: 2 logical qubits.
        let all: Region = Extent::torus(20, 20).faces().into_iter().collect();
        assert_eq!(restrict(&h, &all).unwrap().code().unwrap().log_dimension(), 2);
    }

    #[test]
    fn deleting_a_region_leaves_misses() {
        let s = make_toric_code(20, 20, CoarseGrainSpec::OwnedEdges).unwrap();
        let backend = StateBackend::stabilizer(&s);
        let cover = red_hexagon_cover(Extent::torus(20, 20)).unwrap().without_region(5);
        let report = validate_cover(&backend, &cover).unwrap();
        assert!(!report.pass);
        assert!(!report.cover_misses.is_empty());
    }

    #[test]
    fn small_regions_have_full_kernel() {
        let s = make_toric_code(20, 20, CoarseGrainSpec::OwnedEdges).unwrap();
        let backend = StateBackend::stabilizer(&s);
        let h = build(&backend, &red_hexagon_cover(Extent::torus(20, 20)).unwrap()).unwrap();
        let d = Region::ball(FaceCoord::new(3, 3), 3);
        let k = restrict(&h, &d).unwrap();
        assert!(k.terms.is_empty());
        assert_eq!(k.code().unwrap().log_dimension(), 2 * d.len());
    }

    #[test]
    fn patch_kernel_matches_rank_oracle() {
        let s = make_toric_code(20, 20, CoarseGrainSpec::OwnedEdges).unwrap();
        let backend = StateBackend::stabilizer(&s);
        let h = build(&backend, &red_hexagon_cover(Extent::torus(20, 20)).unwrap()).unwrap();
        let d = Region::ball(FaceCoord::new(10, 10), 8);
        let k = restrict(&h, &d).unwrap();
        assert!(!k.terms.is_empty());
        // Oracle: rank of the stars and plaquettes lying inside some contained term.
        let layout = crate::stabilizer::ToricLayout { rows: 20, cols: 20 };
        let term_qubits: Vec<HashSet<usize>> =
            k.terms.iter().map(|&i| s.qubits_of(&h.cover.regions[i]).unwrap().into_iter().collect()).collect();
        let inside = |sup: &[usize; 4]| term_qubits.iter().any(|t| sup.iter().all(|q| t.contains(q)));
        let mut local = vec![];
        for q in 0..20 {
            for r in 0..20 {
                let (st, pl) = (layout.star(q, r), layout.plaquette(q, r));
                if inside(&st) {
                    local.push(crate::pauli::PauliString::x_on(st));
                }
                if inside(&pl) {
                    local.push(crate::pauli::PauliString::z_on(pl));
                }
            }
        }
        let rank = crate::gf2::Echelon::new(local).rank();
        assert_eq!(k.code().unwrap().log_dimension(), 2 * d.len() - rank);
    }

    #[test]
    fn anyon_pair_instance() {
        let s = make_toric_code(20, 20, CoarseGrainSpec::OwnedEdges).unwrap();
        let path: Vec<FaceCoord> = (0..=10).map(|q| FaceCoord::new(q, 0)).collect();
        let t = insert_anyon_pair(&s, AnyonKind::E, &path).unwrap();
        let backend = StateBackend::stabilizer(&t);
        let cover = red_hexagon_cover(Extent::torus(20, 20)).unwrap();
        assert!(validate_cover(&backend, &cover).unwrap().pass);
        let h = build(&backend, &cover).unwrap();
        assert!(frustration_free(&h, &backend).unwrap().pass);
        let all: Region = Extent::torus(20, 20).faces().into_iter().collect();
        assert!(restrict(&h, &all).unwrap().dimension().unwrap() > 1);
        // The vacuum Hamiltonian does not annihilate the excited state.
        let vacuum = StateBackend::stabilizer(&s);
        let h0 = build(&vacuum, &cover).unwrap();
        assert!(!frustration_free(&h0, &backend).unwrap().pass);
    }

    #[test]
    fn dense_product_instance() {
        let s = product_state(Extent::patch(1, 7), 1).unwrap();
        let rho = dense_backend_state(&s).unwrap();
        let backend = StateBackend::dense(&rho, Tolerances::default());
        let cover = window_cover(7, 3);
        assert!(validate_cover(&backend, &cover).unwrap().pass);
        let h = build(&backend, &cover).unwrap();
        for t in &h.terms {
            let TermOp::Dense(p) = &t.op else { panic!() };
            assert_eq!(p.rank(), 1);
        }
        assert!(check_commuting(&h).unwrap().pass);
        assert!(frustration_free(&h, &backend).unwrap().pass);
        let all: Region = (0..7).map(|q| FaceCoord::new(q, 0)).collect();
        assert_eq!(restrict(&h, &all).unwrap().dimension(), Some(1));
    }

    #[test]
    fn dense_bond_instance_matches_stabilizer() {
        let s = bond_state(Extent::patch(1, 5)).unwrap();
        let rho = dense_backend_state(&s).unwrap();
        let dense = StateBackend::dense(&rho, Tolerances::default());
        let exact = StateBackend::stabilizer(&s);
        let cover = window_cover(5, 3);
        let hd = build(&dense, &cover).unwrap();
        let hs = build(&exact, &cover).unwrap();
        assert!(check_commuting(&hd).unwrap().pass);
        let d: Region = (1..4).map(|q| FaceCoord::new(q, 0)).collect();
        let kd = restrict(&hd, &d).unwrap();
        let ks = restrict(&hs, &d).unwrap();
        assert_eq!(kd.dimension(), ks.dimension());
        assert_eq!(kd.dimension(), Some(4));
    }

    #[test]
    fn frobenius_bound_detects_noncommuting_projectors() {
        let half = c64::new(0.5, 0.0);
        let plus = Mat::from_fn(2, 2, |_, _| half);
        let zero = Mat::from_fn(2, 2, |i, j| if i == 0 && j == 0 { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) });
        let p = Projector::new(FactorSpace::new([("a", 2)]).unwrap(), zero.clone()).unwrap();
        let q = Projector::new(FactorSpace::new([("a", 2)]).unwrap(), plus).unwrap();
        let n = commutator_frobenius(&p, &q).unwrap();
        // [|0><0|, |+><+|] has singular values 1/2, 1/2.
        assert!((n - 0.5f64.sqrt()).abs() < 1e-12, "{n}");
        let r = Projector::new(FactorSpace::new([("b", 2)]).unwrap(), zero).unwrap();
        assert!(commutator_frobenius(&p, &r).unwrap() < 1e-15);
    }

    #[test]
    fn frobenius_bound_matches_dense_commutator() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let sp = FactorSpace::new([("a", 2), ("b", 3)]).unwrap();
        let sq = FactorSpace::new([("c", 2), ("b", 3)]).unwrap();
        let proj = |s: &FactorSpace, rng: &mut rand_chacha::ChaCha8Rng| {
            let rho = crate::tensor::random::random_density(s, 2, rng);
            support_projector(&rho, 1e-10).unwrap().projector
        };
        let p = proj(&sp, &mut rng);
        let q = proj(&sq, &mut rng);
        let target = FactorSpace::new([("a", 2), ("b", 3), ("c", 2)]).unwrap();
        let (pe, qe) = (p.embed(&target).unwrap(), q.embed(&target).unwrap());
        let c = pe.matrix() * qe.matrix() - qe.matrix() * pe.matrix();
        let direct = c.norm_l2();
        assert!((commutator_frobenius(&p, &q).unwrap() - direct).abs() < 1e-10);
    }

    #[test]
    fn cross_check_on_small_shapes() {
        let s = make_toric_code(6, 6, CoarseGrainSpec::OwnedEdges).unwrap();
        let pairs = overlap_shapes(2, 3, FaceCoord::new(2, 2));
        assert!(!pairs.is_empty());
        for (x, y) in &pairs {
            let c = dense_cross_check(&s, x, y, 1e-9).unwrap();
            assert!(c.agree && c.stabilizer_commute, "{c:?}");
        }
    }

    #[test]
    fn polyhex_counts() {
        let shapes = small_shapes(3);
        assert_eq!(shapes.iter().filter(|s| s.len() == 2).count(), 3);
        assert_eq!(shapes.iter().filter(|s| s.len() == 3).count(), 11);
    }
}
