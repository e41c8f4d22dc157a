//! Periodic decomposition of the face lattice into 0-, 1- and 2-cells.
//!
//! Cell centres sit on a triangular superlattice of spacing `pitch`. A face belongs to
//! the cell named by the set of centres whose squared distance is within
//! `pitch * width` of the nearest one: one centre gives a 2-cell, two a 1-cell
//! (a strip between neighbouring centres) and three a 0-cell (a junction).
//! The smallest pitch passing all checks is 10, with width 4.

use super::{euclid_sq, hex_distance, is_connected, is_simply_connected, Extent, FaceCoord, Region};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Superlattice index of a cell centre.
pub type Centre = (i64, i64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CellParams {
    pub pitch: i64,
    pub width: i64,
}

impl CellParams {
    /// Centres within the threshold of the nearest one, sorted.
    pub fn key(&self, origin: FaceCoord, f: FaceCoord) -> Vec<Centre> {
        let p = self.pitch;
        let (dq, dr) = (f.q - origin.q, f.r - origin.r);
        let (a0, b0) = (dq.div_euclid(p), dr.div_euclid(p));
        let mut dists = Vec::with_capacity(25);
        for a in a0 - 2..=a0 + 2 {
            for b in b0 - 2..=b0 + 2 {
                dists.push((euclid_sq(dq - a * p, dr - b * p), (a, b)));
            }
        }
        let best = dists.iter().map(|d| d.0).min().unwrap();
        let mut key: Vec<Centre> =
            dists.into_iter().filter(|(s, _)| s - best <= p * self.width).map(|(_, c)| c).collect();
        key.sort();
        key
    }

    /// Face at the centre of superlattice point `c`.
    pub fn centre_face(&self, origin: FaceCoord, c: Centre) -> FaceCoord {
        origin.offset(c.0 * self.pitch, c.1 * self.pitch)
    }

    /// Structural checks over one period plus the cover condition, in the plane.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let p = self.pitch;
        let origin = FaceCoord::new(0, 0);
        let centre_adjacent = |x: Centre, y: Centre| hex_distance(FaceCoord::new(x.0, x.1), FaceCoord::new(y.0, y.1)) == 1;
        for q in 0..p {
            for r in 0..p {
                let f = FaceCoord::new(q, r);
                let key = self.key(origin, f);
                if key.len() > 3 {
                    return Err(format!("face {f} is close to {} centres", key.len()));
                }
                for (i, x) in key.iter().enumerate() {
                    for y in &key[i + 1..] {
                        if !centre_adjacent(*x, *y) {
                            return Err(format!("face {f} joins non-neighbouring centres"));
                        }
                    }
                }
                for g in f.ring() {
                    let other = self.key(origin, g);
                    if other != key && other.len() == key.len() {
                        return Err(format!("{}-cells touch at {f}", 3 - key.len()));
                    }
                }
                let ball = Region::ball(f, 2);
                let covered = key.iter().any(|c| ball.iter().all(|g| self.key(origin, *g).contains(c)));
                if !covered {
                    return Err(format!("cover condition fails at {f}"));
                }
            }
        }
        let mut cells: BTreeMap<Vec<Centre>, Region> = BTreeMap::new();
        let mut c0 = Region::new();
        for q in -2 * p..3 * p {
            for r in -2 * p..3 * p {
                let f = FaceCoord::new(q, r);
                let key = self.key(origin, f);
                if key.contains(&(0, 0)) {
                    c0.insert(f);
                }
                if key.iter().all(|c| c.0.abs() <= 1 && c.1.abs() <= 1) {
                    cells.entry(key).or_default().insert(f);
                }
            }
        }
        for (key, region) in &cells {
            if !is_connected(region) {
                return Err(format!("cell {key:?} is disconnected"));
            }
        }
        if !is_simply_connected(&c0) {
            return Err("cover region is not simply connected".into());
        }
        Ok(())
    }
}

/// Smallest width for which the decomposition at `pitch` is valid.
pub fn cell_width_for_pitch(pitch: i64) -> Option<i64> {
    (1..3 * pitch).find(|&w| CellParams { pitch, width: w }.validate().is_ok())
}

/// Smallest pitch (and its width) that admits a valid decomposition.
pub fn minimum_pitch() -> CellParams {
    (2..)
        .find_map(|pitch| cell_width_for_pitch(pitch).map(|width| CellParams { pitch, width }))
        .expect("large pitches are always feasible")
}

/// One cell: its key (the centres it is close to) and its faces in plane coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub key: Vec<Centre>,
    pub region: Region,
}

impl Cell {
    pub fn dimension(&self) -> usize {
        3 - self.key.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellDecomposition {
    pub params: CellParams,
    pub extent: Extent,
    pub origin: FaceCoord,
    pub zero_cells: Vec<Cell>,
    pub one_cells: Vec<Cell>,
    pub two_cells: Vec<Cell>,
    /// Rows `k` of horizontal walls running between rows `k - 1` and `k`.
    pub walls: Vec<i64>,
}

/// Decomposition of `extent` at the given pitch, using the smallest valid width.
pub fn build_cell_decomposition(pitch: i64, extent: Extent) -> Result<CellDecomposition> {
    let width = cell_width_for_pitch(pitch)
        .ok_or_else(|| Error::Geometry(format!("no valid cell width for pitch {pitch}")))?;
    decompose(CellParams { pitch, width }, extent, FaceCoord::new(0, 0))
}

/// Smallest pitch whose 0-cells stay clear of the two rows along a centre row, so that a
/// wall can run there.
pub const WALL_PITCH: i64 = 13;

/// Decomposition for a torus carrying horizontal walls at rows `0` and `wall_row`.
///
/// Both walls run through rows of 2-cell centres, so they cross 2-cells and the
/// 1-cells between horizontally neighbouring centres and never touch a 0-cell.
pub fn wall_decomposition(pitch: i64, extent: Extent, wall_row: i64) -> Result<CellDecomposition> {
    if wall_row.rem_euclid(pitch) != 0 {
        return Err(Error::Geometry(format!("wall row {wall_row} is not a multiple of pitch {pitch}")));
    }
    let mut d = build_cell_decomposition(pitch, extent)?;
    d.walls = if extent.periodic { vec![0, wall_row] } else { vec![wall_row] };
    for k in d.walls.clone() {
        for cell in &d.zero_cells {
            if cell.region.iter().any(|f| d.wall_side(k, *f).1) {
                return Err(Error::Geometry(format!("wall at row {k} touches a 0-cell")));
            }
        }
        for (i, region) in d.cover_regions().iter().enumerate() {
            if wall_intervals(&d.extent, k, region) > 1 {
                return Err(Error::Geometry(format!("cover region {i} meets the wall at row {k} more than once")));
            }
        }
    }
    Ok(d)
}

fn decompose(params: CellParams, extent: Extent, origin: FaceCoord) -> Result<CellDecomposition> {
    let p = params.pitch;
    if extent.periodic && (extent.rows % p != 0 || extent.cols % p != 0 || extent.rows < 3 * p || extent.cols < 3 * p) {
        return Err(Error::Geometry(format!(
            "torus {}x{} must be a multiple of pitch {p} with at least three periods",
            extent.rows, extent.cols
        )));
    }
    let mut cells: BTreeMap<Vec<Centre>, Region> = BTreeMap::new();
    for f in extent.faces() {
        let key = params.key(origin, f);
        let (key, shift) = normalise(&params, &extent, key);
        cells.entry(key).or_default().insert(f.offset(-shift.0 * p, -shift.1 * p));
    }
    let mut d = CellDecomposition {
        params,
        extent,
        origin,
        zero_cells: vec![],
        one_cells: vec![],
        two_cells: vec![],
        walls: vec![],
    };
    for (key, region) in cells {
        let cell = Cell { key, region };
        match cell.key.len() {
            1 => d.two_cells.push(cell),
            2 => d.one_cells.push(cell),
            3 => d.zero_cells.push(cell),
            n => return Err(Error::Geometry(format!("face close to {n} centres"))),
        }
    }
    Ok(d)
}

/// Translate a key so that its first centre lies in the fundamental superdomain.
fn normalise(params: &CellParams, extent: &Extent, key: Vec<Centre>) -> (Vec<Centre>, Centre) {
    if !extent.periodic {
        return (key, (0, 0));
    }
    let (na, nb) = (extent.cols / params.pitch, extent.rows / params.pitch);
    let first = key[0];
    let shift = (first.0.div_euclid(na) * na, first.1.div_euclid(nb) * nb);
    let key = key.into_iter().map(|c| (c.0 - shift.0, c.1 - shift.1)).collect();
    (key, shift)
}

impl CellDecomposition {
    fn period(&self) -> Option<(i64, i64)> {
        self.extent
            .periodic
            .then(|| (self.extent.cols / self.params.pitch, self.extent.rows / self.params.pitch))
    }

    fn same_centre(&self, x: Centre, y: Centre) -> Option<Centre> {
        match self.period() {
            Some((na, nb)) if (x.0 - y.0).rem_euclid(na) == 0 && (x.1 - y.1).rem_euclid(nb) == 0 => {
                Some((x.0 - y.0, x.1 - y.1))
            }
            None if x == y => Some((0, 0)),
            _ => None,
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = &Cell> + '_ {
        self.zero_cells.iter().chain(self.one_cells.iter()).chain(self.two_cells.iter())
    }

    /// Centre faces of the 2-cells, in the order of [`CellDecomposition::cover_regions`].
    pub fn centres(&self) -> Vec<FaceCoord> {
        self.two_cells.iter().map(|c| self.params.centre_face(self.origin, c.key[0])).collect()
    }

    /// For each 2-cell: the union of itself with every 1- and 0-cell that borders it.
    pub fn cover_regions(&self) -> Vec<Region> {
        let mut out = Vec::with_capacity(self.two_cells.len());
        for two in &self.two_cells {
            let centre = two.key[0];
            let mut region = Region::new();
            for cell in self.cells() {
                for c in &cell.key {
                    if let Some(shift) = self.same_centre(centre, *c) {
                        let p = self.params.pitch;
                        for f in &cell.region {
                            region.insert(f.offset(shift.0 * p, shift.1 * p));
                        }
                    }
                }
            }
            out.push(region);
        }
        out
    }

    /// Check the partition, separation and connectivity invariants over the extent.
    pub fn check_invariants(&self) -> Result<()> {
        let mut owner: BTreeMap<FaceCoord, usize> = BTreeMap::new();
        let all: Vec<&Cell> = self.cells().collect();
        for (i, cell) in all.iter().enumerate() {
            if !is_connected(&cell.region) {
                return Err(Error::Geometry(format!("cell {:?} is disconnected", cell.key)));
            }
            for f in &cell.region {
                let c = self.extent.canonical(*f).ok_or_else(|| Error::Geometry("cell leaves extent".into()))?;
                if owner.insert(c, i).is_some() {
                    return Err(Error::Geometry(format!("face {c} lies in two cells")));
                }
            }
        }
        if owner.len() != self.extent.face_count() {
            return Err(Error::Geometry("cells do not cover the extent".into()));
        }
        for (f, &i) in &owner {
            for g in f.ring() {
                let Some(c) = self.extent.canonical(g) else { continue };
                let j = owner[&c];
                if i != j && all[i].key.len() == all[j].key.len() {
                    return Err(Error::Geometry(format!("two {}-cells touch at {f}", all[i].dimension())));
                }
            }
        }
        Ok(())
    }

    /// Which side of wall `k` a face is on (`true` = at or above row `k`), and
    /// whether the face borders the wall.
    pub fn wall_side(&self, k: i64, f: FaceCoord) -> (bool, bool) {
        wall_side(&self.extent, k, f)
    }
}

/// Signed row offset of `f` from wall `k`, wrapped to the nearest image on a torus.
fn wall_offset(extent: &Extent, k: i64, f: FaceCoord) -> i64 {
    let d = f.r - k;
    if extent.periodic {
        let rows = extent.rows;
        let m = d.rem_euclid(rows);
        if m >= rows - rows / 2 {
            m - rows
        } else {
            m
        }
    } else {
        d
    }
}

/// `(above, borders)` for face `f` relative to the wall between rows `k - 1` and `k`.
pub fn wall_side(extent: &Extent, k: i64, f: FaceCoord) -> (bool, bool) {
    let d = wall_offset(extent, k, f);
    (d >= 0, d == 0 || d == -1)
}

/// Number of maximal runs of wall edges whose two faces both lie in `region`.
pub fn wall_intervals(extent: &Extent, k: i64, region: &Region) -> usize {
    // Group wall edges by the unwrapped image of the wall line they belong to.
    let mut lines: BTreeMap<i64, BTreeSet<i64>> = BTreeMap::new();
    for f in region {
        if wall_offset(extent, k, *f) != -1 {
            continue;
        }
        let line = f.r + 1;
        // Edge to the upper-left neighbour gets position 2q, the one straight up 2q + 1.
        for (dq, t) in [(-1, 2 * f.q), (0, 2 * f.q + 1)] {
            if region.contains(&FaceCoord::new(f.q + dq, f.r + 1)) {
                lines.entry(line).or_default().insert(t);
            }
        }
    }
    lines
        .values()
        .map(|ts| {
            let v: Vec<i64> = ts.iter().copied().collect();
            1 + v.windows(2).filter(|w| w[1] != w[0] + 1).count()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimum_pitch_is_ten() {
        let p = minimum_pitch();
        assert_eq!(p, CellParams { pitch: 10, width: 4 });
        for pitch in 2..10 {
            assert!(cell_width_for_pitch(pitch).is_none());
        }
    }

    #[test]
    fn torus_decomposition_invariants() {
        let d = build_cell_decomposition(10, Extent::torus(30, 30)).unwrap();
        d.check_invariants().unwrap();
        assert_eq!(d.two_cells.len(), 9);
        assert_eq!(d.one_cells.len(), 27);
        assert_eq!(d.zero_cells.len(), 18);
    }

    #[test]
    fn two_cells_adjoin_six_one_and_six_zero_cells() {
        let d = build_cell_decomposition(10, Extent::torus(30, 30)).unwrap();
        for two in &d.two_cells {
            let c = two.key[0];
            let count = |cells: &Vec<Cell>| {
                cells.iter().filter(|cell| cell.key.iter().any(|k| d.same_centre(c, *k).is_some())).count()
            };
            assert_eq!(count(&d.one_cells), 6);
            assert_eq!(count(&d.zero_cells), 6);
        }
    }

    #[test]
    fn wall_meets_regions_once() {
        // At pitch 10 the 0-cells reach the rows next to every centre row.
        assert!(wall_decomposition(10, Extent::torus(30, 30), 10).is_err());
        let extent = Extent::torus(39, 39);
        let d = wall_decomposition(WALL_PITCH, extent, 13).unwrap();
        let regions = d.cover_regions();
        let touching = regions.iter().filter(|r| wall_intervals(&extent, 13, r) == 1).count();
        assert!(touching >= 3);
        assert!(wall_decomposition(WALL_PITCH, extent, 5).is_err());
    }

    #[test]
    fn interval_counting() {
        let e = Extent::patch(10, 10);
        let line: Region = (0..4).flat_map(|q| [FaceCoord::new(q, 4), FaceCoord::new(q, 5)]).collect();
        assert_eq!(wall_intervals(&e, 5, &line), 1);
        let split = line.without(&FaceCoord::new(1, 4)).without(&FaceCoord::new(1, 5)).without(&FaceCoord::new(2, 5));
        assert_eq!(wall_intervals(&e, 5, &split), 2);
    }
}
