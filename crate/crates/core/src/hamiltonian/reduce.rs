//! Weight reduction: rewrite each term as a sum of terms on at most three faces.
//!
//! A region `R` is split as `A ∪ B ∪ C` with `C` a single face peeled from `R`, `B` its
//! neighbours inside `R` and `I(A:C|B) = 0`. Then `P_R = P_{AB} P_{BC}`, so the kernel of
//! `(I - P_{AB}) + (I - P_{BC})` equals that of `I - P_R`. Both halves are split again until
//! every leaf has at most three faces.

use super::{restrict, term_op, Kernel, ParentHamiltonian, Term};
use crate::axioms::StateBackend;
use crate::error::{Error, Result};
use crate::lattice::{is_connected, is_simply_connected, CoverProvenance, CoverSpec, FaceCoord, Region};
use crate::tensor::normal_norm;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Leaves of the split trees have at most this many faces.
pub const MAX_WEIGHT: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub a: Region,
    pub b: Region,
    pub c: Region,
    pub cmi: f64,
    /// Node for `A ∪ B`.
    pub ab: SplitNode,
    /// Node for `B ∪ C`.
    pub bc: SplitNode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitNode {
    pub region: Region,
    pub split: Option<Box<Split>>,
}

impl SplitNode {
    pub fn leaves(&self) -> Vec<&Region> {
        match &self.split {
            None => vec![&self.region],
            Some(s) => {
                let mut out = s.ab.leaves();
                out.extend(s.bc.leaves());
                out
            }
        }
    }

    /// Every split in the tree, parents first.
    pub fn splits(&self) -> Vec<&Split> {
        match &self.split {
            None => vec![],
            Some(s) => {
                let mut out = vec![&**s];
                out.extend(s.ab.splits());
                out.extend(s.bc.splits());
                out
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct WeightReduction {
    /// The reduced Hamiltonian; its cover is the set of distinct leaves.
    pub hamiltonian: ParentHamiltonian,
    /// One tree per original term.
    pub trees: Vec<SplitNode>,
    pub max_weight: usize,
    pub max_split_cmi: f64,
}

/// Split every term of `h` down to weight three, verifying each split on the reference state.
pub fn weight_reduce(h: &ParentHamiltonian, backend: &StateBackend) -> Result<WeightReduction> {
    let threshold = backend.threshold();
    let trees = h.cover.regions.iter().map(|r| split_tree(backend, r, threshold)).collect::<Result<Vec<_>>>()?;
    let e = h.extent();
    let mut leaves: BTreeMap<Region, Region> = BTreeMap::new();
    for t in &trees {
        for leaf in t.leaves() {
            let key: Region = leaf.iter().filter_map(|f| e.canonical(*f)).collect();
            leaves.entry(key).or_insert_with(|| leaf.clone());
        }
    }
    let regions: Vec<Region> = leaves.into_values().collect();
    let centres: Vec<FaceCoord> = regions.iter().map(|r| r.first().unwrap()).collect();
    let terms = regions.iter().map(|r| Ok(Term { region: r.clone(), op: term_op(backend, r)? })).collect::<Result<Vec<_>>>()?;
    let cover = CoverSpec::new(e, regions, centres, CoverProvenance::Custom { note: "weight-reduced".into() })?;
    let hamiltonian = ParentHamiltonian::new(cover, terms, h.sites.clone())?;
    let max_weight = hamiltonian.cover.regions.iter().map(Region::len).max().unwrap_or(0);
    let max_split_cmi = trees.iter().flat_map(|t| t.splits()).map(|s| s.cmi).fold(0.0, f64::max);
    Ok(WeightReduction { hamiltonian, trees, max_weight, max_split_cmi })
}

fn split_tree(backend: &StateBackend, region: &Region, threshold: f64) -> Result<SplitNode> {
    if region.len() <= MAX_WEIGHT {
        return Ok(SplitNode { region: region.clone(), split: None });
    }
    let (a, b, c, cmi) = find_split(backend, region, threshold)?;
    let ab = split_tree(backend, &a.union(&b), threshold)?;
    let bc = split_tree(backend, &b.union(&c), threshold)?;
    Ok(SplitNode { region: region.clone(), split: Some(Box::new(Split { a, b, c, cmi, ab, bc })) })
}

/// First face, in region order, whose removal leaves a disk, whose neighbours in the region
/// form one connected arc, and which is conditionally independent of the rest given that arc.
fn find_split(backend: &StateBackend, region: &Region, threshold: f64) -> Result<(Region, Region, Region, f64)> {
    for g in region.iter() {
        let b: Region = g.ring().into_iter().filter(|f| region.contains(f)).collect();
        if b.is_empty() || !is_connected(&b) {
            continue;
        }
        let c = Region::single(*g);
        let a = region.difference(&b).difference(&c);
        if a.is_empty() || !is_simply_connected(&region.without(g)) {
            continue;
        }
        let cmi = backend.cmi(&a, &b, &c)?;
        if cmi <= threshold {
            return Ok((a, b, c, cmi));
        }
    }
    Err(Error::Geometry(format!("no Markov split for a region of {} faces starting at {:?}", region.len(), region.first())))
}

/// Kernel agreement between two Hamiltonians on the same degrees of freedom.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelComparison {
    pub log2_dims: (f64, f64),
    /// Stabilizer kernels: canonical generator matrices are equal.
    pub same_group: Option<bool>,
    /// Dense kernels: operator norm of the difference of kernel projectors.
    pub projector_distance: Option<f64>,
    pub equal: bool,
}

/// Compare `ker H_D` and `ker H'_D`.
pub fn compare_kernels(h: &ParentHamiltonian, other: &ParentHamiltonian, d: &Region, tol: f64) -> Result<KernelComparison> {
    let (k1, k2) = (restrict(h, d)?, restrict(other, d)?);
    let log2_dims = (k1.log2_dimension(), k2.log2_dimension());
    match (&k1.kernel, &k2.kernel) {
        (Kernel::Code(c1), Kernel::Code(c2)) => {
            let same = c1.canonical() == c2.canonical();
            Ok(KernelComparison { log2_dims, same_group: Some(same), projector_distance: None, equal: same })
        }
        (Kernel::Basis { .. }, Kernel::Basis { .. }) => {
            let (q1, q2) = (k1.projector().unwrap(), k2.projector().unwrap());
            let dist = normal_norm(&(&q1 - &q2))?;
            Ok(KernelComparison { log2_dims, same_group: None, projector_distance: Some(dist), equal: dist < tol })
        }
        _ => Err(Error::Precondition("kernels of different kinds".into())),
    }
}
