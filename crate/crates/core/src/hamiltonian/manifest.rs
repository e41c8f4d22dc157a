//! JSON manifest of a Hamiltonian: cover, sites, per-term operators and verification stamps.

use super::{ParentHamiltonian, Sites, Term, TermOp};
use crate::error::{Error, Result};
use crate::lattice::{CoverProvenance, CoverSpec, Extent, FaceCoord, Region};
use crate::pauli::PauliString;
use crate::stabilizer::StabilizerCode;
use crate::tensor::{FactorSpace, Projector};
use faer::{c64, Mat};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

const FORMAT: &str = "parent-hamiltonian";
const VERSION: u32 = 1;

/// Largest dense projector side accepted from a manifest.
const MAX_PROJECTOR_DIM: usize = 1 << 10;

/// Outcomes of the checks run before the manifest was written; `None` when not run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stamps {
    pub cover: Option<bool>,
    pub commuting: Option<bool>,
    pub frustration_free: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OperatorEntry {
    Code { generators: Vec<String> },
    /// Row-major real and imaginary parts over the listed face factors.
    Projector { labels: Vec<String>, dims: Vec<usize>, re: Vec<f64>, im: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermEntry {
    pub centre: FaceCoord,
    pub region: Region,
    pub operator: OperatorEntry,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianManifest {
    pub format: String,
    pub version: u32,
    pub extent: Extent,
    pub provenance: CoverProvenance,
    pub sites: Sites,
    pub terms: Vec<TermEntry>,
    pub stamps: Stamps,
}

pub fn write_manifest(h: &ParentHamiltonian, stamps: &Stamps) -> String {
    let terms = h
        .terms
        .iter()
        .zip(&h.cover.centres)
        .map(|(t, c)| {
            let operator = match &t.op {
                TermOp::Code(code) => OperatorEntry::Code { generators: code.generators().iter().map(|g| g.to_string()).collect() },
                TermOp::Dense(p) => {
                    let m = p.matrix();
                    let n = m.nrows();
                    OperatorEntry::Projector {
                        labels: p.space().labels().to_vec(),
                        dims: p.space().dims().to_vec(),
                        re: (0..n * n).map(|k| m[(k / n, k % n)].re).collect(),
                        im: (0..n * n).map(|k| m[(k / n, k % n)].im).collect(),
                    }
                }
            };
            TermEntry { centre: *c, region: t.region.clone(), operator }
        })
        .collect();
    let manifest = HamiltonianManifest {
        format: FORMAT.into(),
        version: VERSION,
        extent: h.cover.extent,
        provenance: h.cover.provenance.clone(),
        sites: h.sites.clone(),
        terms,
        stamps: stamps.clone(),
    };
    serde_json::to_string_pretty(&manifest).expect("manifest serialises")
}

/// Parse and validate a manifest, rebuilding every term.
pub fn read_manifest(text: &str) -> Result<(ParentHamiltonian, Stamps)> {
    let m: HamiltonianManifest = serde_json::from_str(text)?;
    if m.format != FORMAT || m.version != VERSION {
        return Err(Error::Format(format!("unsupported manifest {} v{}", m.format, m.version)));
    }
    if m.extent.rows <= 0 || m.extent.cols <= 0 {
        return Err(Error::Format("extent must be positive".into()));
    }
    check_sites(&m.sites, &m.extent)?;
    let regions: Vec<Region> = m.terms.iter().map(|t| t.region.clone()).collect();
    let centres: Vec<FaceCoord> = m.terms.iter().map(|t| t.centre).collect();
    let cover = CoverSpec::new(m.extent, regions, centres, m.provenance)?;
    let mut terms = Vec::with_capacity(m.terms.len());
    for t in m.terms {
        let op = match (t.operator, &m.sites) {
            (OperatorEntry::Code { generators }, Sites::Qubits { total, faces }) => {
                let gens = generators.iter().map(|g| PauliString::parse(g)).collect::<Result<Vec<_>>>()?;
                let layout = region_layout(&t.region, faces, &m.extent)?;
                TermOp::Code(StabilizerCode::new(*total, gens, t.region.clone(), layout, Some(m.extent))?)
            }
            (OperatorEntry::Projector { labels, dims, re, im }, Sites::Dense { .. }) => {
                if labels.len() != dims.len() {
                    return Err(Error::Format("projector labels and dims differ in length".into()));
                }
                let space = FactorSpace::with_cap(labels.into_iter().zip(dims), MAX_PROJECTOR_DIM)?;
                let n = space.dim();
                if re.len() != n * n || im.len() != n * n {
                    return Err(Error::Format(format!("projector needs {} entries", n * n)));
                }
                let mat = Mat::from_fn(n, n, |i, j| c64::new(re[i * n + j], im[i * n + j]));
                TermOp::Dense(Projector::new(space, mat)?)
            }
            _ => return Err(Error::Format("operator kind does not match the sites".into())),
        };
        terms.push(Term { region: t.region, op });
    }
    Ok((ParentHamiltonian::new(cover, terms, m.sites)?, m.stamps))
}

fn check_sites(sites: &Sites, extent: &Extent) -> Result<()> {
    let mut faces = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let face_ok = |f: &FaceCoord, faces: &mut BTreeSet<FaceCoord>| extent.canonical(*f) == Some(*f) && faces.insert(*f);
    match sites {
        Sites::Qubits { total, faces: list } => {
            for (f, qs) in list {
                if !face_ok(f, &mut faces) {
                    return Err(Error::Format(format!("site face {f} repeated or not canonical")));
                }
                if qs.iter().any(|q| *q >= *total || !seen.insert(*q)) {
                    return Err(Error::Format(format!("bad qubit indices on face {f}")));
                }
            }
        }
        Sites::Dense { faces: list } => {
            for (f, d) in list {
                if !face_ok(f, &mut faces) || *d == 0 {
                    return Err(Error::Format(format!("bad dense site {f}")));
                }
            }
        }
    }
    Ok(())
}

fn region_layout(region: &Region, faces: &[(FaceCoord, Vec<usize>)], extent: &Extent) -> Result<Vec<(FaceCoord, Vec<usize>)>> {
    let map: BTreeMap<FaceCoord, &Vec<usize>> = faces.iter().map(|(f, q)| (*f, q)).collect();
    region
        .iter()
        .map(|f| {
            let q = extent.canonical(*f).and_then(|c| map.get(&c)).ok_or_else(|| Error::Format(format!("face {f} has no site")))?;
            Ok((*f, (*q).clone()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::tests::window_cover;
    use super::super::{build, check_commuting, dense_backend_state};
    use super::*;
    use crate::axioms::StateBackend;
    use crate::lattice::red_hexagon_cover;
    use crate::stabilizer::{bond_state, make_toric_code, CoarseGrainSpec};
    use crate::Tolerances;

    #[test]
    fn stabilizer_round_trip() {
        let s = make_toric_code(15, 15, CoarseGrainSpec::OwnedEdges).unwrap();
        let backend = StateBackend::stabilizer(&s);
        let h = build(&backend, &red_hexagon_cover(Extent::torus(15, 15)).unwrap()).unwrap();
        let stamps = Stamps { commuting: Some(true), ..Default::default() };
        let text = write_manifest(&h, &stamps);
        let (back, st) = read_manifest(&text).unwrap();
        assert_eq!(st, stamps);
        assert_eq!(write_manifest(&back, &st), text);
        assert!(check_commuting(&back).unwrap().pass);
    }

    #[test]
    fn dense_round_trip() {
        let s = bond_state(Extent::patch(1, 4)).unwrap();
        let rho = dense_backend_state(&s).unwrap();
        let backend = StateBackend::dense(&rho, Tolerances::default());
        let h = build(&backend, &window_cover(4, 2)).unwrap();
        let text = write_manifest(&h, &Stamps::default());
        let (back, _) = read_manifest(&text).unwrap();
        assert_eq!(back.terms.len(), 3);
    }

    #[test]
    fn rejects_bad_manifests() {
        assert!(read_manifest("{}").is_err());
        let s = make_toric_code(15, 15, CoarseGrainSpec::OwnedEdges).unwrap();
        let backend = StateBackend::stabilizer(&s);
        let h = build(&backend, &red_hexagon_cover(Extent::torus(15, 15)).unwrap()).unwrap();
        let text = write_manifest(&h, &Stamps::default());
        let mut m: HamiltonianManifest = serde_json::from_str(&text).unwrap();
        m.version = 7;
        assert!(read_manifest(&serde_json::to_string(&m).unwrap()).is_err());
        let mut m: HamiltonianManifest = serde_json::from_str(&text).unwrap();
        if let OperatorEntry::Code { generators } = &mut m.terms[0].operator {
            generators.push("+X100000".into());
        }
        assert!(read_manifest(&serde_json::to_string(&m).unwrap()).is_err());
    }
}
