use super::StabilizerState;
use crate::error::{Error, Result};
use crate::gf2::BitRow;
use crate::lattice::{Extent, FaceCoord};
use crate::pauli::PauliString;

/// How edge qubits of the square-lattice toric code are assigned to hexagonal faces.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CoarseGrainSpec {
    /// Square-lattice vertex `(q, r)` is face `(q, r)`; the face owns the edges leaving the vertex
    /// in the +q and +r directions. Each star and plaquette touches three mutually adjacent faces.
    #[default]
    OwnedEdges,
}

/// Edge-qubit indexing of the toric code on a `rows` x `cols` torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ToricLayout {
    pub rows: i64,
    pub cols: i64,
}

impl ToricLayout {
    fn face_index(&self, q: i64, r: i64) -> usize {
        (r.rem_euclid(self.rows) * self.cols + q.rem_euclid(self.cols)) as usize
    }

    /// Edge from vertex `(q, r)` to `(q + 1, r)`.
    pub fn h(&self, q: i64, r: i64) -> usize {
        2 * self.face_index(q, r)
    }

    /// Edge from vertex `(q, r)` to `(q, r + 1)`.
    pub fn v(&self, q: i64, r: i64) -> usize {
        2 * self.face_index(q, r) + 1
    }

    pub fn star(&self, q: i64, r: i64) -> [usize; 4] {
        [self.h(q, r), self.h(q - 1, r), self.v(q, r), self.v(q, r - 1)]
    }

    pub fn plaquette(&self, q: i64, r: i64) -> [usize; 4] {
        [self.h(q, r), self.h(q, r + 1), self.v(q, r), self.v(q + 1, r)]
    }

    fn qubit_faces(&self) -> Vec<FaceCoord> {
        Extent::torus(self.rows, self.cols).faces().into_iter().flat_map(|f| [f, f]).collect()
    }
}

/// Toric code on a torus with both logical Z loops fixed to +1, so the state is pure.
pub fn make_toric_code(rows: i64, cols: i64, coarse: CoarseGrainSpec) -> Result<StabilizerState> {
    let CoarseGrainSpec::OwnedEdges = coarse;
    if rows < 2 || cols < 2 {
        return Err(Error::Geometry("toric code needs at least a 2x2 torus".into()));
    }
    let t = ToricLayout { rows, cols };
    let mut gens = vec![];
    for r in 0..rows {
        for q in 0..cols {
            // The last star and plaquette are products of the others.
            if (q, r) != (cols - 1, rows - 1) {
                gens.push(PauliString::x_on(t.star(q, r)));
                gens.push(PauliString::z_on(t.plaquette(q, r)));
            }
        }
    }
    gens.push(PauliString::z_on((0..cols).map(|q| t.h(q, 0))));
    gens.push(PauliString::z_on((0..rows).map(|r| t.v(0, r))));
    StabilizerState::new(gens, t.qubit_faces(), Some(Extent::torus(rows, cols)))
}

/// Toric code on rows `wall_row..rows` next to a product state on rows `0..wall_row`.
///
/// On the torus the toric-code band has two boundary lines, at `wall_row` and between
/// rows `rows - 1` and `0`. Stars are restricted to band edges and plaquettes kept only
/// when they lie inside the band, which makes both lines smooth gapped boundaries.
pub fn make_wall_state(rows: i64, cols: i64, wall_row: i64) -> Result<StabilizerState> {
    if cols < 2 || wall_row < 1 || rows - wall_row < 2 {
        return Err(Error::Geometry("wall state needs a vacuum row and two toric-code rows".into()));
    }
    let t = ToricLayout { rows, cols };
    let in_band = |qubit: usize| (qubit / 2) as i64 / cols >= wall_row;
    let mut gens = vec![];
    for r in 0..rows {
        for q in 0..cols {
            // The restricted stars multiply to the identity; drop the last one.
            let star: Vec<usize> = t.star(q, r).into_iter().filter(|&e| in_band(e)).collect();
            if !star.is_empty() && (q, r) != (cols - 1, rows - 1) {
                gens.push(PauliString::x_on(star));
            }
            let plaq = t.plaquette(q, r);
            if r + 1 < rows && plaq.iter().all(|&e| in_band(e)) {
                gens.push(PauliString::z_on(plaq));
            }
        }
    }
    gens.extend((0..(2 * wall_row * cols) as usize).map(|e| PauliString::z_on([e])));
    gens.push(PauliString::z_on((0..cols).map(|q| t.h(q, wall_row))));
    StabilizerState::new(gens, t.qubit_faces(), Some(Extent::torus(rows, cols)))
}

/// `|0...0>` with `qubits_per_face` qubits on every face.
pub fn product_state(extent: Extent, qubits_per_face: usize) -> Result<StabilizerState> {
    if qubits_per_face == 0 {
        return Err(Error::Geometry("faces need at least one qubit".into()));
    }
    let faces: Vec<FaceCoord> = extent.faces().into_iter().flat_map(|f| std::iter::repeat(f).take(qubits_per_face)).collect();
    let gens = (0..faces.len()).map(|q| PauliString::z_on([q])).collect();
    StabilizerState::new(gens, faces, Some(extent))
}

/// GHZ state with one qubit per face.
pub fn ghz_state(extent: Extent) -> Result<StabilizerState> {
    let faces = extent.faces();
    let n = faces.len();
    let mut gens = vec![PauliString::x_on(0..n)];
    gens.extend((1..n).map(|q| PauliString::z_on([q - 1, q])));
    StabilizerState::new(gens, faces, Some(extent))
}

/// Two qubits per face; qubit 1 of each face forms a Bell pair with qubit 0 of its +q neighbour.
/// On a patch the unpaired qubits at the row ends are set to `|0>`.
pub fn bond_state(extent: Extent) -> Result<StabilizerState> {
    let faces: Vec<FaceCoord> = extent.faces().into_iter().flat_map(|f| [f, f]).collect();
    let mut gens = vec![];
    for r in 0..extent.rows {
        for q in 0..extent.cols {
            let me = 2 * (r * extent.cols + q) as usize;
            match extent.index(FaceCoord::new(q + 1, r)) {
                Some(next) => {
                    gens.push(PauliString::x_on([me + 1, 2 * next]));
                    gens.push(PauliString::z_on([me + 1, 2 * next]));
                }
                None => gens.push(PauliString::z_on([me + 1])),
            }
            if !extent.periodic && q == 0 {
                gens.push(PauliString::z_on([me]));
            }
        }
    }
    StabilizerState::new(gens, faces, Some(extent))
}

/// Electric charges sit on square-lattice vertices, magnetic fluxes on plaquettes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnyonKind {
    E,
    M,
}

/// Edges crossed by a unit step on the direct (e) or dual (m) lattice, with hexagonal
/// diagonal steps split into two square-lattice steps.
fn step_edges(t: &ToricLayout, kind: AnyonKind, f: FaceCoord, g: FaceCoord) -> Result<Vec<usize>> {
    let (dq, dr) = (g.q - f.q, g.r - f.r);
    let unit = |q: i64, r: i64, dq: i64, dr: i64| match (kind, dq, dr) {
        (AnyonKind::E, 1, 0) => t.h(q, r),
        (AnyonKind::E, -1, 0) => t.h(q - 1, r),
        (AnyonKind::E, 0, 1) => t.v(q, r),
        (AnyonKind::E, 0, -1) => t.v(q, r - 1),
        (AnyonKind::M, 1, 0) => t.v(q + 1, r),
        (AnyonKind::M, -1, 0) => t.v(q, r),
        (AnyonKind::M, 0, 1) => t.h(q, r + 1),
        (AnyonKind::M, 0, -1) => t.h(q, r),
        _ => unreachable!(),
    };
    match (dq, dr) {
        (1, 0) | (-1, 0) | (0, 1) | (0, -1) => Ok(vec![unit(f.q, f.r, dq, dr)]),
        (1, -1) | (-1, 1) => Ok(vec![unit(f.q, f.r, dq, 0), unit(f.q + dq, f.r, 0, dr)]),
        _ => Err(Error::Geometry(format!("path step {f} -> {g} is not between adjacent faces"))),
    }
}

/// Apply the string operator along `path`, creating anyons at its two ends.
///
/// An e string is a product of Z on direct-lattice edges, an m string a product of X on
/// edges crossed by the dual path. Requires a state laid out like [`make_toric_code`].
pub fn insert_anyon_pair(state: &StabilizerState, kind: AnyonKind, path: &[FaceCoord]) -> Result<StabilizerState> {
    let extent = state
        .extent()
        .filter(|e| e.periodic && state.num_qubits() == 2 * e.face_count())
        .ok_or_else(|| Error::Geometry("anyon insertion needs a toric-code layout on a torus".into()))?;
    let t = ToricLayout { rows: extent.rows, cols: extent.cols };
    let mut bits = BitRow::new();
    for w in path.windows(2) {
        for e in step_edges(&t, kind, w[0], w[1])? {
            bits.toggle(2 * e + if kind == AnyonKind::E { 1 } else { 0 });
        }
    }
    state.apply_pauli(&PauliString::hermitian(bits, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Region;

    #[test]
    fn toric_code_counts() {
        let s = make_toric_code(4, 4, CoarseGrainSpec::OwnedEdges).unwrap();
        assert_eq!(s.num_qubits(), 32);
        assert_eq!(s.generators().len(), 32);
        assert_eq!(s.region_entropy(&s.faces()).unwrap(), 0);
    }

    #[test]
    fn star_and_plaquette_touch_adjacent_faces() {
        let t = ToricLayout { rows: 6, cols: 6 };
        for ops in [t.star(2, 3), t.plaquette(2, 3)] {
            let faces: Vec<FaceCoord> = ops.iter().map(|&e| FaceCoord::new((e / 2 % 6) as i64, (e / 2 / 6) as i64)).collect();
            for a in &faces {
                for b in &faces {
                    assert!(a == b || a.is_adjacent(*b));
                }
            }
        }
    }

    #[test]
    fn small_states_are_valid() {
        assert!(make_wall_state(8, 6, 3).is_ok());
        assert!(product_state(Extent::patch(2, 3), 2).is_ok());
        assert!(ghz_state(Extent::patch(2, 2)).is_ok());
        assert!(bond_state(Extent::patch(1, 5)).is_ok());
        assert!(bond_state(Extent::torus(3, 3)).is_ok());
        assert!(make_wall_state(8, 6, 7).is_err());
    }

    #[test]
    fn anyon_string_twice_is_identity() {
        let s = make_toric_code(6, 6, CoarseGrainSpec::OwnedEdges).unwrap();
        let path = [FaceCoord::new(0, 0), FaceCoord::new(1, 0), FaceCoord::new(2, -1), FaceCoord::new(2, -2)];
        for kind in [AnyonKind::E, AnyonKind::M] {
            let once = insert_anyon_pair(&s, kind, &path).unwrap();
            assert_ne!(once, s);
            assert_eq!(insert_anyon_pair(&once, kind, &path).unwrap(), s);
        }
        assert_eq!(insert_anyon_pair(&s, AnyonKind::E, &[]).unwrap(), s);
        assert!(insert_anyon_pair(&s, AnyonKind::E, &[FaceCoord::new(0, 0), FaceCoord::new(2, 0)]).is_err());
    }

    #[test]
    fn anyon_string_flips_two_stabilizers() {
        let s = make_toric_code(6, 6, CoarseGrainSpec::OwnedEdges).unwrap();
        let path = [FaceCoord::new(1, 1), FaceCoord::new(2, 1), FaceCoord::new(3, 0), FaceCoord::new(3, -1)];
        let t = ToricLayout { rows: 6, cols: 6 };
        for kind in [AnyonKind::E, AnyonKind::M] {
            let a = insert_anyon_pair(&s, kind, &path).unwrap();
            let mut flipped = vec![];
            for r in 0..6 {
                for q in 0..6 {
                    let op = match kind {
                        AnyonKind::E => PauliString::x_on(t.star(q, r)),
                        AnyonKind::M => PauliString::z_on(t.plaquette(q, r)),
                    };
                    if a.group_sign(&op) == Some(true) {
                        flipped.push((q, r));
                    }
                }
            }
            assert_eq!(flipped.len(), 2, "{kind:?}");
            // Entropies are unchanged by the string operator.
            let disk = Region::ball(FaceCoord::new(1, 1), 1);
            assert_eq!(a.region_entropy(&disk).unwrap(), s.region_entropy(&disk).unwrap());
        }
    }
}
