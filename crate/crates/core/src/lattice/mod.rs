//! Hexagonal face lattice in axial coordinates.

mod boundary;
mod cells;
mod cover;
mod io;
mod topology;

pub use boundary::{classify_boundaries, BoundarySegments, Edge, Side};
pub use cells::{
    build_cell_decomposition, cell_width_for_pitch, minimum_pitch, wall_decomposition, wall_intervals, wall_side,
    CellDecomposition, CellParams, WALL_PITCH,
};
pub use cover::{
    cells_to_cover, cover_misses, red_hexagon_cover, red_faces, CoverProvenance, CoverSpec, RED_SPACING,
};
pub use io::{parse_cover_manifest, parse_region, write_cover_manifest, write_region, CoverManifest};
pub use topology::{
    arc_partitions, elementary_disk, is_connected, is_disk, is_simply_connected, neighborhood_partitions,
    ArcPartition,
};

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Axial offsets of the six neighbours, in cyclic order around a face.
pub const RING: [(i64, i64); 6] = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)];

/// A hexagonal face in axial coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FaceCoord {
    pub q: i64,
    pub r: i64,
}

impl FaceCoord {
    pub const fn new(q: i64, r: i64) -> Self {
        FaceCoord { q, r }
    }

    pub fn offset(self, dq: i64, dr: i64) -> Self {
        FaceCoord::new(self.q + dq, self.r + dr)
    }

    /// The six neighbours in ring order.
    pub fn ring(self) -> [FaceCoord; 6] {
        RING.map(|(dq, dr)| self.offset(dq, dr))
    }

    pub fn is_adjacent(self, other: FaceCoord) -> bool {
        hex_distance(self, other) == 1
    }
}

impl fmt::Display for FaceCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.q, self.r)
    }
}

/// Hex distance between two faces of the infinite lattice.
pub fn hex_distance(f: FaceCoord, g: FaceCoord) -> i64 {
    let dq = f.q - g.q;
    let dr = f.r - g.r;
    (dq.abs() + dr.abs() + (dq + dr).abs()) / 2
}

/// Squared Euclidean distance between face centres, in units of the nearest-neighbour spacing.
pub fn euclid_sq(dq: i64, dr: i64) -> i64 {
    dq * dq + dq * dr + dr * dr
}

/// A finite set of faces.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Region(BTreeSet<FaceCoord>);

impl Region {
    pub fn new() -> Self {
        Region(BTreeSet::new())
    }

    pub fn single(f: FaceCoord) -> Self {
        Region(BTreeSet::from([f]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, f: &FaceCoord) -> bool {
        self.0.contains(f)
    }

    pub fn insert(&mut self, f: FaceCoord) -> bool {
        self.0.insert(f)
    }

    pub fn remove(&mut self, f: &FaceCoord) -> bool {
        self.0.remove(f)
    }

    /// Faces in lexicographic (q, r) order.
    pub fn iter(&self) -> impl Iterator<Item = &FaceCoord> + '_ {
        self.0.iter()
    }

    pub fn faces(&self) -> &BTreeSet<FaceCoord> {
        &self.0
    }

    pub fn first(&self) -> Option<FaceCoord> {
        self.0.first().copied()
    }

    pub fn union(&self, other: &Region) -> Region {
        Region(self.0.union(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &Region) -> Region {
        Region(self.0.intersection(&other.0).copied().collect())
    }

    pub fn difference(&self, other: &Region) -> Region {
        Region(self.0.difference(&other.0).copied().collect())
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn with(&self, f: FaceCoord) -> Region {
        let mut out = self.clone();
        out.insert(f);
        out
    }

    pub fn without(&self, f: &FaceCoord) -> Region {
        let mut out = self.clone();
        out.remove(f);
        out
    }

    pub fn translate(&self, dq: i64, dr: i64) -> Region {
        self.iter().map(|f| f.offset(dq, dr)).collect()
    }

    /// Faces within hex distance `radius` of `center`.
    pub fn ball(center: FaceCoord, radius: i64) -> Region {
        let mut out = Region::new();
        for dq in -radius..=radius {
            for dr in -radius..=radius {
                if (dq + dr).abs() <= radius {
                    out.insert(center.offset(dq, dr));
                }
            }
        }
        out
    }

    /// True if some face of `self` is adjacent to or equal to some face of `other`.
    pub fn touches(&self, other: &Region) -> bool {
        self.iter().any(|f| other.contains(f) || f.ring().iter().any(|g| other.contains(g)))
    }

    /// Largest hex distance from `center` to a face of the region.
    pub fn radius_about(&self, center: FaceCoord) -> i64 {
        self.iter().map(|f| hex_distance(*f, center)).max().unwrap_or(0)
    }

    /// Number of hex edges between a face of the region and a face outside it.
    pub fn boundary_len(&self) -> usize {
        self.iter().map(|f| f.ring().iter().filter(|g| !self.contains(g)).count()).sum()
    }
}

impl FromIterator<FaceCoord> for Region {
    fn from_iter<I: IntoIterator<Item = FaceCoord>>(iter: I) -> Self {
        Region(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Region {
    type Item = &'a FaceCoord;
    type IntoIter = std::collections::btree_set::Iter<'a, FaceCoord>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// The six neighbours of a face as a region.
pub fn neighbors(f: FaceCoord) -> Region {
    f.ring().into_iter().collect()
}

/// Faces outside `a` adjacent to at least one face of `a`.
pub fn neighborhood(a: &Region) -> Region {
    let mut out = Region::new();
    for f in a {
        for g in f.ring() {
            if !a.contains(&g) {
                out.insert(g);
            }
        }
    }
    out
}

/// The finite lattice a state lives on: a `rows` x `cols` parallelogram, periodic or open.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Extent {
    pub rows: i64,
    pub cols: i64,
    pub periodic: bool,
}

impl Extent {
    pub fn torus(rows: i64, cols: i64) -> Self {
        Extent { rows, cols, periodic: true }
    }

    pub fn patch(rows: i64, cols: i64) -> Self {
        Extent { rows, cols, periodic: false }
    }

    pub fn face_count(&self) -> usize {
        (self.rows * self.cols) as usize
    }

    /// Representative of `f` inside the fundamental domain, or `None` for faces off an open patch.
    pub fn canonical(&self, f: FaceCoord) -> Option<FaceCoord> {
        if self.periodic {
            Some(FaceCoord::new(f.q.rem_euclid(self.cols), f.r.rem_euclid(self.rows)))
        } else if (0..self.cols).contains(&f.q) && (0..self.rows).contains(&f.r) {
            Some(f)
        } else {
            None
        }
    }

    pub fn contains(&self, f: FaceCoord) -> bool {
        self.canonical(f).is_some()
    }

    /// Row-major index of a face (after canonicalisation).
    pub fn index(&self, f: FaceCoord) -> Option<usize> {
        self.canonical(f).map(|c| (c.r * self.cols + c.q) as usize)
    }

    /// All faces of the fundamental domain in row-major order.
    pub fn faces(&self) -> Vec<FaceCoord> {
        let mut out = Vec::with_capacity(self.face_count());
        for r in 0..self.rows {
            for q in 0..self.cols {
                out.push(FaceCoord::new(q, r));
            }
        }
        out
    }

    /// Faces at least `margin` away from an open boundary; all faces on a torus.
    pub fn interior(&self, margin: i64) -> Vec<FaceCoord> {
        self.faces()
            .into_iter()
            .filter(|f| {
                self.periodic
                    || (f.q >= margin && f.q < self.cols - margin && f.r >= margin && f.r < self.rows - margin)
            })
            .collect()
    }

    /// Whether every face of the region lies on the lattice and no two faces coincide after wrapping.
    pub fn holds(&self, region: &Region) -> bool {
        let mut seen = BTreeSet::new();
        region.iter().all(|f| self.canonical(*f).is_some_and(|c| seen.insert(c)))
    }

    /// Distance between faces, minimised over periodic images.
    pub fn distance(&self, f: FaceCoord, g: FaceCoord) -> i64 {
        if !self.periodic {
            return hex_distance(f, g);
        }
        let (f, g) = (self.canonical(f).unwrap(), self.canonical(g).unwrap());
        let mut best = i64::MAX;
        for sq in -1..=1 {
            for sr in -1..=1 {
                best = best.min(hex_distance(f, g.offset(sq * self.cols, sr * self.rows)));
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{HashMap, VecDeque};

    fn bfs_distances(src: FaceCoord, limit: i64) -> HashMap<FaceCoord, i64> {
        let mut dist = HashMap::from([(src, 0)]);
        let mut queue = VecDeque::from([src]);
        while let Some(f) = queue.pop_front() {
            let d = dist[&f];
            if d == limit {
                continue;
            }
            for g in f.ring() {
                dist.entry(g).or_insert_with(|| {
                    queue.push_back(g);
                    d + 1
                });
            }
        }
        dist
    }

    #[test]
    fn neighbours_of_origin() {
        let n = neighbors(FaceCoord::new(0, 0));
        let expected: Region = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)]
            .into_iter()
            .map(|(q, r)| FaceCoord::new(q, r))
            .collect();
        assert_eq!(n, expected);
    }

    #[test]
    fn ring_is_cyclically_adjacent() {
        let ring = FaceCoord::new(3, -2).ring();
        for i in 0..6 {
            assert!(ring[i].is_adjacent(ring[(i + 1) % 6]));
        }
    }

    #[test]
    fn second_shell_has_twelve_faces() {
        let o = FaceCoord::new(0, 0);
        let disk = neighbors(o).with(o);
        let mut two = Region::new();
        for f in &disk {
            for g in f.ring() {
                two.insert(g);
            }
        }
        assert_eq!(two.difference(&disk).len(), 12);
        assert_eq!(neighborhood(&disk).len(), 12);
    }

    #[test]
    fn neighbourhood_edge_cases() {
        assert!(neighborhood(&Region::new()).is_empty());
        assert_eq!(neighborhood(&Region::single(FaceCoord::new(2, 2))).len(), 6);
    }

    #[test]
    fn distance_matches_bfs() {
        let o = FaceCoord::new(0, 0);
        let bfs = bfs_distances(o, 8);
        for (f, d) in &bfs {
            assert_eq!(hex_distance(o, *f), *d);
        }
        assert_eq!(bfs.len(), 1 + 3 * 8 * 9);
        assert_eq!(hex_distance(o, FaceCoord::new(3, -1)), 3);
    }

    #[test]
    fn ball_size() {
        for r in 0..6 {
            assert_eq!(Region::ball(FaceCoord::new(1, 1), r).len() as i64, 1 + 3 * r * (r + 1));
        }
    }

    #[test]
    fn torus_canonicalisation() {
        let e = Extent::torus(4, 6);
        assert_eq!(e.canonical(FaceCoord::new(-1, 5)), Some(FaceCoord::new(5, 1)));
        assert_eq!(e.distance(FaceCoord::new(0, 0), FaceCoord::new(5, 0)), 1);
        let p = Extent::patch(4, 6);
        assert_eq!(p.canonical(FaceCoord::new(-1, 0)), None);
        assert_eq!(p.interior(1).len(), 2 * 4);
    }
}
