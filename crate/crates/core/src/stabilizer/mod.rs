//! Stabilizer states on hexagonal faces with exact integer entropies.

mod builders;
mod io;

pub use builders::{
    bond_state, ghz_state, insert_anyon_pair, make_toric_code, make_wall_state, product_state, AnyonKind,
    CoarseGrainSpec, ToricLayout,
};
pub use io::{parse_stabilizer_state, write_stabilizer_state};

use crate::error::{Error, Result};
use crate::gf2::{symplectic_complement, BitRow, Echelon};
use crate::lattice::{Extent, FaceCoord, Region};
use crate::pauli::PauliString;
use crate::tensor::{scale, DensityOperator, FactorSpace, Projector};
use faer::{c64, Mat};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::OnceLock;

/// A pure stabilizer state with qubits assigned to faces.
#[derive(Debug)]
pub struct StabilizerState {
    n: usize,
    generators: Vec<PauliString>,
    supports: Vec<Vec<usize>>,
    qubit_faces: Vec<FaceCoord>,
    extent: Option<Extent>,
    face_qubits: BTreeMap<FaceCoord, Vec<usize>>,
    qubit_gens: Vec<Vec<usize>>,
    echelon: OnceLock<Echelon<PauliString>>,
}

impl Clone for StabilizerState {
    fn clone(&self) -> Self {
        StabilizerState {
            n: self.n,
            generators: self.generators.clone(),
            supports: self.supports.clone(),
            qubit_faces: self.qubit_faces.clone(),
            extent: self.extent,
            face_qubits: self.face_qubits.clone(),
            qubit_gens: self.qubit_gens.clone(),
            echelon: OnceLock::new(),
        }
    }
}

impl PartialEq for StabilizerState {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.generators == other.generators
            && self.qubit_faces == other.qubit_faces
            && self.extent == other.extent
    }
}

impl StabilizerState {
    /// Validate and index a state: `n` Hermitian, independent, pairwise commuting generators.
    pub fn new(generators: Vec<PauliString>, qubit_faces: Vec<FaceCoord>, extent: Option<Extent>) -> Result<Self> {
        let n = qubit_faces.len();
        if generators.len() != n {
            return Err(Error::Stabilizer(format!("{} generators for {n} qubits", generators.len())));
        }
        if let Some(e) = extent {
            if let Some(f) = qubit_faces.iter().find(|f| e.canonical(**f) != Some(**f)) {
                return Err(Error::Stabilizer(format!("face {f} is not a canonical face of the extent")));
            }
        }
        let mut supports = Vec::with_capacity(n);
        let mut qubit_gens = vec![vec![]; n];
        for (i, g) in generators.iter().enumerate() {
            if !g.is_hermitian() {
                return Err(Error::Stabilizer(format!("generator {i} is not Hermitian")));
            }
            let s = g.support();
            if s.last().is_some_and(|&q| q >= n) {
                return Err(Error::Stabilizer(format!("generator {i} acts beyond qubit {}", n - 1)));
            }
            for &q in &s {
                qubit_gens[q].push(i);
            }
            supports.push(s);
        }
        for (i, g) in generators.iter().enumerate() {
            let mut others: BTreeSet<usize> = BTreeSet::new();
            for &q in &supports[i] {
                others.extend(qubit_gens[q].iter().filter(|&&j| j > i));
            }
            if let Some(j) = others.into_iter().find(|&j| !g.commutes_with(&generators[j])) {
                return Err(Error::Stabilizer(format!("generators {i} and {j} anticommute")));
            }
        }
        let mut face_qubits: BTreeMap<FaceCoord, Vec<usize>> = BTreeMap::new();
        for (q, f) in qubit_faces.iter().enumerate() {
            face_qubits.entry(*f).or_default().push(q);
        }
        let state = StabilizerState {
            n,
            generators,
            supports,
            qubit_faces,
            extent,
            face_qubits,
            qubit_gens,
            echelon: OnceLock::new(),
        };
        let rank = state.echelon().rank();
        if rank != n {
            return Err(Error::Stabilizer(format!("generators have rank {rank}, need {n}")));
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn qubit_faces(&self) -> &[FaceCoord] {
        &self.qubit_faces
    }

    pub fn extent(&self) -> Option<Extent> {
        self.extent
    }

    /// Faces that carry qubits.
    pub fn faces(&self) -> Region {
        self.face_qubits.keys().copied().collect()
    }

    /// Phase-tracked echelon form of the stabilizer group.
    fn echelon(&self) -> &Echelon<PauliString> {
        self.echelon.get_or_init(|| Echelon::new(self.generators.iter().cloned()))
    }

    fn canonical_face(&self, f: FaceCoord) -> Option<FaceCoord> {
        match self.extent {
            Some(e) => e.canonical(f),
            None => Some(f),
        }
    }

    /// Qubits of a region: faces in the region's order, then qubits within each face.
    pub fn qubits_of(&self, region: &Region) -> Result<Vec<usize>> {
        let mut seen = BTreeSet::new();
        let mut out = vec![];
        for f in region {
            let c = self
                .canonical_face(*f)
                .filter(|c| self.face_qubits.contains_key(c))
                .ok_or_else(|| Error::Geometry(format!("face {f} carries no qubits")))?;
            if !seen.insert(c) {
                return Err(Error::Geometry(format!("region wraps onto face {c} twice")));
            }
            out.extend_from_slice(&self.face_qubits[&c]);
        }
        Ok(out)
    }

    /// Generators restricted to `qubits`, as rows over local column indices.
    fn restricted_rows(&self, qubits: &[usize]) -> Vec<BitRow> {
        let local: HashMap<usize, usize> = qubits.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let touched: BTreeSet<usize> = qubits.iter().flat_map(|&q| self.qubit_gens[q].iter().copied()).collect();
        touched
            .into_iter()
            .map(|g| {
                let p = &self.generators[g];
                let mut row = BitRow::new();
                for &q in &self.supports[g] {
                    if let Some(&l) = local.get(&q) {
                        if p.bits().get(2 * q) {
                            row.toggle(2 * l);
                        }
                        if p.bits().get(2 * q + 1) {
                            row.toggle(2 * l + 1);
                        }
                    }
                }
                row
            })
            .collect()
    }

    fn qubit_entropy(&self, qubits: &[usize]) -> i64 {
        if qubits.is_empty() {
            return 0;
        }
        Echelon::new(self.restricted_rows(qubits)).rank() as i64 - qubits.len() as i64
    }

    /// Entropy of the marginal on a region, in bits.
    pub fn region_entropy(&self, a: &Region) -> Result<i64> {
        Ok(self.qubit_entropy(&self.qubits_of(a)?))
    }

    /// `I(A:C|B)` in bits.
    pub fn region_cmi(&self, a: &Region, b: &Region, c: &Region) -> Result<i64> {
        if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
            return Err(Error::Geometry("CMI needs disjoint regions".into()));
        }
        let ab = a.union(b);
        let bc = b.union(c);
        Ok(self.region_entropy(&ab)? + self.region_entropy(&bc)? - self.region_entropy(b)? - self.region_entropy(&ab.union(c))?)
    }

    /// Sign of a Hermitian Pauli in the stabilizer group: `Some(false)` for `+P`, `Some(true)` for `-P`.
    pub fn group_sign(&self, p: &PauliString) -> Option<bool> {
        let residual = self.echelon().reduce(p.clone());
        residual.is_identity().then(|| residual.phase() == 2)
    }

    /// The subgroup of stabilizers supported inside a region.
    pub fn region_support_code(&self, x: &Region) -> Result<StabilizerCode> {
        let qubits = self.qubits_of(x)?;
        let rows = self.restricted_rows(&qubits);
        let complement = symplectic_complement(&rows, 2 * qubits.len());
        let mut generators = Vec::with_capacity(complement.len());
        for v in complement {
            let bits = BitRow::from_bits(v.ones().map(|b| 2 * qubits[b / 2] + b % 2));
            let mut p = PauliString::hermitian(bits, false);
            let negative = self
                .group_sign(&p)
                .ok_or_else(|| Error::Stabilizer("commutant element outside the stabilizer group".into()))?;
            if negative {
                p.negate();
            }
            generators.push(p);
        }
        let layout = self.layout(x)?;
        StabilizerCode::new(self.n, generators, x.clone(), layout, self.extent)
    }

    /// Faces of `x` with their qubit indices.
    pub fn layout(&self, x: &Region) -> Result<Vec<(FaceCoord, Vec<usize>)>> {
        x.iter()
            .map(|f| {
                let c = self.canonical_face(*f).ok_or_else(|| Error::Geometry(format!("face {f} off the lattice")))?;
                let qs = self.face_qubits.get(&c).ok_or_else(|| Error::Geometry(format!("face {f} carries no qubits")))?;
                Ok((*f, qs.clone()))
            })
            .collect()
    }

    /// Dense marginal on a region; factors are faces labelled `q,r`.
    pub fn densify(&self, region: &Region) -> Result<DensityOperator> {
        let code = self.region_support_code(region)?;
        let p = code.projector()?;
        let rank = (p.space().dim() >> code.generators.len()) as f64;
        Ok(DensityOperator::new_unchecked(p.space().clone(), scale(p.matrix(), c64::new(1.0 / rank, 0.0))))
    }

    /// Conjugate the state by a Pauli operator: generators that anticommute with it flip sign.
    pub fn apply_pauli(&self, p: &PauliString) -> Result<StabilizerState> {
        let generators = self
            .generators
            .iter()
            .map(|g| {
                let mut g = g.clone();
                if !g.commutes_with(p) {
                    g.negate();
                }
                g
            })
            .collect();
        StabilizerState::new(generators, self.qubit_faces.clone(), self.extent)
    }
}

/// Label of a face factor in densified operators.
pub fn face_label(f: FaceCoord) -> String {
    format!("{},{}", f.q, f.r)
}

/// A commuting set of independent Pauli generators supported on a region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerCode {
    n: usize,
    generators: Vec<PauliString>,
    support: Region,
    layout: Vec<(FaceCoord, Vec<usize>)>,
    extent: Option<Extent>,
}

impl StabilizerCode {
    /// `layout` lists the support's faces with their global qubit indices.
    pub fn new(
        n: usize,
        generators: Vec<PauliString>,
        support: Region,
        layout: Vec<(FaceCoord, Vec<usize>)>,
        extent: Option<Extent>,
    ) -> Result<Self> {
        let qubits: BTreeSet<usize> = layout.iter().flat_map(|(_, q)| q.iter().copied()).collect();
        for (i, g) in generators.iter().enumerate() {
            if !g.is_hermitian() {
                return Err(Error::Stabilizer(format!("code generator {i} is not Hermitian")));
            }
            if g.support().iter().any(|q| !qubits.contains(q)) {
                return Err(Error::Stabilizer(format!("code generator {i} leaves the support")));
            }
            for h in &generators[i + 1..] {
                if !g.commutes_with(h) {
                    return Err(Error::Stabilizer("code generators anticommute".into()));
                }
            }
        }
        let e = Echelon::new(generators.iter().cloned());
        if e.rank() != generators.len() || e.rows().iter().any(|r| r.is_identity()) {
            return Err(Error::Stabilizer("code generators are dependent".into()));
        }
        Ok(StabilizerCode { n, generators, support, layout, extent })
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn support(&self) -> &Region {
        &self.support
    }

    pub fn layout(&self) -> &[(FaceCoord, Vec<usize>)] {
        &self.layout
    }

    /// Qubits of the support, in layout order.
    pub fn qubits(&self) -> Vec<usize> {
        self.layout.iter().flat_map(|(_, q)| q.iter().copied()).collect()
    }

    /// Qubits of the support lying on the faces of `a`.
    pub fn qubits_in(&self, a: &Region) -> Result<Vec<usize>> {
        let canon = |f: FaceCoord| match self.extent {
            Some(e) => e.canonical(f),
            None => Some(f),
        };
        let by_face: HashMap<FaceCoord, &Vec<usize>> =
            self.layout.iter().filter_map(|(f, q)| canon(*f).map(|c| (c, q))).collect();
        let mut out = vec![];
        for f in a {
            let q = canon(*f)
                .and_then(|c| by_face.get(&c))
                .ok_or_else(|| Error::Geometry(format!("face {f} lies outside the code support")))?;
            out.extend_from_slice(q);
        }
        Ok(out)
    }

    pub fn total_qubits(&self) -> usize {
        self.n
    }

    /// Number of independent generators.
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// `log2` of the projector rank.
    pub fn log_dimension(&self) -> usize {
        self.qubits().len() - self.rank()
    }

    /// Reduced row echelon form of the generators; equal for equal groups.
    pub fn canonical(&self) -> Vec<PauliString> {
        Echelon::new(self.generators.iter().cloned()).into_rref().into_rows()
    }

    pub fn same_group(&self, other: &StabilizerCode) -> bool {
        self.canonical() == other.canonical()
    }

    /// Sign of `p` in the group, or `None` when `±p` is not a member.
    pub fn sign_of(&self, p: &PauliString) -> Option<bool> {
        let residual = Echelon::new(self.generators.iter().cloned()).reduce(p.clone());
        residual.is_identity().then(|| residual.phase() == 2)
    }

    /// Dense projector onto the code space of the support qubits; factors are faces.
    pub fn projector(&self) -> Result<Projector> {
        let space = FactorSpace::new(self.layout.iter().map(|(f, q)| (face_label(*f), 1usize << q.len())))?;
        let order = self.qubits();
        let m = order.len();
        let local: HashMap<usize, usize> = order.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let d = space.dim();
        let mut p = Mat::<c64>::identity(d, d);
        for g in &self.generators {
            let (x, z, phase) = pauli_masks(g, &local, m);
            let mut next = scale(&p, c64::new(0.5, 0.0));
            for b in 0..d {
                let f = if (z & b).count_ones() % 2 == 1 { -phase } else { phase } * 0.5;
                for j in 0..d {
                    next[(b ^ x, j)] += f * p[(b, j)];
                }
            }
            p = next;
        }
        Ok(Projector::new_unchecked(space, p))
    }
}

/// Dense matrix of a Pauli operator on `m` local qubits; local qubit 0 is the most significant bit.
pub fn dense_pauli(p: &PauliString, local: &HashMap<usize, usize>, m: usize) -> Mat<c64> {
    let (x, z, phase) = pauli_masks(p, local, m);
    let d = 1usize << m;
    let mut out = Mat::<c64>::zeros(d, d);
    for b in 0..d {
        let sign = if (z & b).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        out[(b ^ x, b)] = phase * sign;
    }
    out
}

/// X mask, Z mask and phase of a Pauli on `m` local qubits, so that `P|b> = phase (-1)^{z.b} |b ^ x>`.
fn pauli_masks(p: &PauliString, local: &HashMap<usize, usize>, m: usize) -> (usize, usize, c64) {
    let mut x = 0usize;
    let mut z = 0usize;
    for q in p.support() {
        let bit = 1usize << (m - 1 - local[&q]);
        if p.bits().get(2 * q) {
            x |= bit;
        }
        if p.bits().get(2 * q + 1) {
            z |= bit;
        }
    }
    let phase = [c64::new(1.0, 0.0), c64::new(0.0, 1.0), c64::new(-1.0, 0.0), c64::new(0.0, -1.0)][p.phase() as usize];
    (x, z, phase)
}

/// Whether the code-space projectors of two codes commute.
///
/// They commute when every pair of generators commutes, or when the projectors multiply
/// to zero because some `g` lies in one group and `-g` in the other.
pub fn codes_commute(c1: &StabilizerCode, c2: &StabilizerCode) -> bool {
    let all = c1.generators.iter().all(|g| c2.generators.iter().all(|h| g.commutes_with(h)));
    all || codes_orthogonal(c1, c2)
}

/// True when the two groups contain some Pauli with opposite signs.
pub fn codes_orthogonal(c1: &StabilizerCode, c2: &StabilizerCode) -> bool {
    let qubits: BTreeSet<usize> = c1.qubits().into_iter().chain(c2.qubits()).collect();
    let local: HashMap<usize, usize> = qubits.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let width = 2 * qubits.len();
    let to_local = |p: &PauliString| BitRow::from_bits(p.bits().ones().map(|b| 2 * local[&(b / 2)] + b % 2));
    // Zassenhaus: rows (u | u) for the first group and (v | 0) for the second; rows with an
    // empty left half after elimination span the intersection.
    let mut rows = vec![];
    for g in &c1.generators {
        let u = to_local(g);
        let mut r = u.clone();
        for b in u.ones() {
            r.toggle(width + b);
        }
        rows.push(r);
    }
    rows.extend(c2.generators.iter().map(to_local));
    let e1 = Echelon::new(c1.generators.iter().cloned());
    let e2 = Echelon::new(c2.generators.iter().cloned());
    let global: Vec<usize> = qubits.iter().copied().collect();
    for row in Echelon::new(rows).into_rows() {
        if row.lead().is_some_and(|l| l >= width) {
            let bits = BitRow::from_bits(row.ones().map(|b| b - width).map(|b| 2 * global[b / 2] + b % 2));
            let p = PauliString::hermitian(bits, false);
            let s1 = e1.reduce(p.clone());
            let s2 = e2.reduce(p);
            if s1.is_identity() && s2.is_identity() && s1.phase() != s2.phase() {
                return true;
            }
        }
    }
    false
}

/// Whether a logical operator of the code is supported on the faces of `a`.
pub fn logical_operator_in_region(code: &StabilizerCode, a: &Region) -> Result<bool> {
    Ok(logical_operator_on_qubits(code, &code.qubits_in(a)?))
}

/// Whether some Pauli supported on `a` commutes with the code but is not in the code group.
pub fn logical_operator_on_qubits(code: &StabilizerCode, a: &[usize]) -> bool {
    let qubits = code.qubits();
    let in_code: BTreeSet<usize> = qubits.iter().copied().collect();
    let inside: BTreeSet<usize> = a.iter().copied().collect();
    if inside.iter().any(|q| !in_code.contains(q)) {
        // Any Pauli on such a qubit acts nontrivially and commutes with every generator.
        return true;
    }
    let rest: Vec<usize> = qubits.iter().copied().filter(|q| !inside.contains(q)).collect();
    let inside: Vec<usize> = inside.into_iter().collect();
    let rank_on = |qs: &[usize]| {
        let local: HashMap<usize, usize> = qs.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let rows = code.generators.iter().map(|g| {
            BitRow::from_bits(g.bits().ones().filter_map(|b| local.get(&(b / 2)).map(|l| 2 * l + b % 2)))
        });
        Echelon::new(rows).rank()
    };
    let commuting = 2 * inside.len() - rank_on(&inside);
    let supported = code.rank() - rank_on(&rest);
    commuting > supported
}

/// Number of independent elements of the code group supported on `a`.
pub fn supported_rank(code: &StabilizerCode, a: &[usize]) -> usize {
    let inside: BTreeSet<usize> = a.iter().copied().collect();
    let rest: Vec<usize> = code.qubits().into_iter().filter(|q| !inside.contains(q)).collect();
    let local: HashMap<usize, usize> = rest.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let rows = code
        .generators
        .iter()
        .map(|g| BitRow::from_bits(g.bits().ones().filter_map(|b| local.get(&(b / 2)).map(|l| 2 * l + b % 2))));
    code.rank() - Echelon::new(rows).rank()
}

/// Group generated by several codes on a common set of faces, reduced to an independent set.
pub fn merge_codes(
    codes: &[&StabilizerCode],
    support: Region,
    layout: Vec<(FaceCoord, Vec<usize>)>,
    extent: Option<Extent>,
) -> Result<StabilizerCode> {
    let n = codes.first().map_or(0, |c| c.n);
    let e = Echelon::new(codes.iter().flat_map(|c| c.generators.iter().cloned()));
    // A generator that reduces to -I means the group contains -I and has no common code state.
    for g in codes.iter().flat_map(|c| c.generators.iter()) {
        if e.reduce(g.clone()).phase() != 0 {
            return Err(Error::Stabilizer("merged codes contain -I: no common code state".into()));
        }
    }
    StabilizerCode::new(n, e.into_rows(), support, layout, extent)
}
