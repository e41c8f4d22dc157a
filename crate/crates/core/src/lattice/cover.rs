use super::{elementary_disk, is_simply_connected, neighborhood, CellDecomposition, Extent, FaceCoord, Region};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

/// Spacing of the red sublattice, generated by axial (5, 0) and (0, 5).
pub const RED_SPACING: i64 = 5;

/// Radius of the balls around red faces.
pub const RED_RADIUS: i64 = 5;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CoverProvenance {
    RedHexagon,
    Cells { pitch: i64, width: i64 },
    WallCells { pitch: i64, width: i64, walls: Vec<i64> },
    Custom { note: String },
}

/// A family of regions used as Hamiltonian supports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverSpec {
    pub extent: Extent,
    pub regions: Vec<Region>,
    /// A reference face for each region, used as its nominal centre.
    pub centres: Vec<FaceCoord>,
    pub provenance: CoverProvenance,
}

impl CoverSpec {
    pub fn new(extent: Extent, regions: Vec<Region>, centres: Vec<FaceCoord>, provenance: CoverProvenance) -> Result<Self> {
        if regions.len() != centres.len() {
            return Err(Error::Geometry("one centre per region required".into()));
        }
        for (i, r) in regions.iter().enumerate() {
            if !is_simply_connected(r) {
                return Err(Error::Geometry(format!("cover region {i} is not a disk")));
            }
            if !extent.holds(r) {
                return Err(Error::Geometry(format!("cover region {i} leaves the extent")));
            }
        }
        Ok(CoverSpec { extent, regions, centres, provenance })
    }

    /// Largest distance from a region's centre to one of its faces.
    pub fn max_radius(&self) -> i64 {
        self.regions.iter().zip(&self.centres).map(|(r, c)| r.radius_about(*c)).max().unwrap_or(0)
    }

    /// Region faces after wrapping onto the extent.
    pub fn canonical_sets(&self) -> Vec<HashSet<FaceCoord>> {
        self.regions
            .iter()
            .map(|r| r.iter().filter_map(|f| self.extent.canonical(*f)).collect())
            .collect()
    }

    /// Pairs of regions sharing at least one face.
    pub fn overlapping_pairs(&self) -> Vec<(usize, usize)> {
        let sets = self.canonical_sets();
        let mut by_face: HashMap<FaceCoord, Vec<usize>> = HashMap::new();
        for (i, s) in sets.iter().enumerate() {
            for f in s {
                by_face.entry(*f).or_default().push(i);
            }
        }
        let mut pairs = HashSet::new();
        for ids in by_face.values() {
            for (k, &i) in ids.iter().enumerate() {
                for &j in &ids[k + 1..] {
                    pairs.insert((i.min(j), i.max(j)));
                }
            }
        }
        let mut out: Vec<_> = pairs.into_iter().collect();
        out.sort();
        out
    }

    /// Region `j` translated to the periodic image that overlaps region `i`.
    pub fn aligned(&self, i: usize, j: usize) -> Region {
        let e = &self.extent;
        if !e.periodic {
            return self.regions[j].clone();
        }
        let (ci, cj) = (self.centres[i], self.centres[j]);
        let mut best = (i64::MAX, 0, 0);
        for sq in -1..=1 {
            for sr in -1..=1 {
                let shifted = cj.offset(sq * e.cols, sr * e.rows);
                let d = super::hex_distance(ci, shifted);
                if d < best.0 {
                    best = (d, sq * e.cols, sr * e.rows);
                }
            }
        }
        self.regions[j].translate(best.1, best.2)
    }

    /// The same cover with one region removed.
    pub fn without_region(&self, i: usize) -> CoverSpec {
        let mut out = self.clone();
        out.regions.remove(i);
        out.centres.remove(i);
        out.provenance = CoverProvenance::Custom { note: format!("region {i} removed") };
        out
    }
}

/// Red faces of the extent: both axial coordinates divisible by the spacing.
pub fn red_faces(extent: &Extent) -> Vec<FaceCoord> {
    extent
        .faces()
        .into_iter()
        .filter(|f| f.q.rem_euclid(RED_SPACING) == 0 && f.r.rem_euclid(RED_SPACING) == 0)
        .collect()
}

fn is_red(f: FaceCoord) -> bool {
    f.q.rem_euclid(RED_SPACING) == 0 && f.r.rem_euclid(RED_SPACING) == 0
}

/// Each region: a red face together with every non-red face within distance 5 of it.
pub fn red_hexagon_cover(extent: Extent) -> Result<CoverSpec> {
    if extent.periodic && (extent.rows % RED_SPACING != 0 || extent.cols % RED_SPACING != 0) {
        return Err(Error::Geometry(format!("torus sides must be multiples of {RED_SPACING}")));
    }
    let mut regions = vec![];
    let mut centres = vec![];
    for c in red_faces(&extent) {
        let region: Region = Region::ball(c, RED_RADIUS)
            .iter()
            .copied()
            .filter(|f| (*f == c || !is_red(*f)) && extent.contains(*f))
            .collect();
        regions.push(region);
        centres.push(c);
    }
    CoverSpec::new(extent, regions, centres, CoverProvenance::RedHexagon)
}

/// The cover formed by the regions `c_i` of a cell decomposition.
pub fn cells_to_cover(d: &CellDecomposition) -> Result<CoverSpec> {
    let provenance = if d.walls.is_empty() {
        CoverProvenance::Cells { pitch: d.params.pitch, width: d.params.width }
    } else {
        CoverProvenance::WallCells { pitch: d.params.pitch, width: d.params.width, walls: d.walls.clone() }
    };
    CoverSpec::new(d.extent, d.cover_regions(), d.centres(), provenance)
}

/// Interior faces whose padded elementary disk `D ∪ N(D)` lies in no cover region.
pub fn cover_misses(cover: &CoverSpec, margin: i64) -> Vec<FaceCoord> {
    let sets = cover.canonical_sets();
    let mut by_face: HashMap<FaceCoord, Vec<usize>> = HashMap::new();
    for (i, s) in sets.iter().enumerate() {
        for f in s {
            by_face.entry(*f).or_default().push(i);
        }
    }
    let e = &cover.extent;
    let mut misses = vec![];
    for f in e.interior(margin) {
        let disk = elementary_disk(f);
        let padded = disk.union(&neighborhood(&disk));
        let faces: Option<Vec<FaceCoord>> = padded.iter().map(|g| e.canonical(*g)).collect();
        let ok = match (faces, by_face.get(&f)) {
            (Some(faces), Some(ids)) => ids.iter().any(|&i| faces.iter().all(|g| sets[i].contains(g))),
            _ => false,
        };
        if !ok {
            misses.push(f);
        }
    }
    misses
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_cell_decomposition, hex_distance};
    use std::collections::BTreeSet;

    #[test]
    fn red_distances_are_zero_to_three() {
        let e = Extent::torus(20, 20);
        let reds = red_faces(&e);
        let mut seen = BTreeSet::new();
        for f in e.faces() {
            seen.insert(reds.iter().map(|c| e.distance(f, *c)).min().unwrap());
        }
        assert_eq!(seen, BTreeSet::from([0, 1, 2, 3]));
        assert_eq!(hex_distance(FaceCoord::new(0, 0), FaceCoord::new(5, 0)), 5);
    }

    #[test]
    fn red_regions_are_congruent_disks() {
        let cover = red_hexagon_cover(Extent::torus(20, 20)).unwrap();
        assert_eq!(cover.regions.len(), 16);
        let shape = cover.regions[0].translate(-cover.centres[0].q, -cover.centres[0].r);
        assert_eq!(shape.len(), 91 - 6);
        for (r, c) in cover.regions.iter().zip(&cover.centres) {
            assert_eq!(r.translate(-c.q, -c.r), shape);
        }
        assert!(cover_misses(&cover, 0).is_empty());
    }

    #[test]
    fn red_overlap_patterns() {
        let cover = red_hexagon_cover(Extent::torus(20, 20)).unwrap();
        let mut sizes = BTreeSet::new();
        for (i, j) in cover.overlapping_pairs() {
            let b = cover.regions[i].intersection(&cover.aligned(i, j));
            sizes.insert(b.len());
        }
        // Nearest neighbours share a lens of 32 faces, second neighbours a line of 4.
        assert_eq!(sizes, BTreeSet::from([4, 32]));
    }

    #[test]
    fn deleting_a_region_creates_misses() {
        let cover = red_hexagon_cover(Extent::torus(20, 20)).unwrap();
        assert!(!cover_misses(&cover.without_region(3), 0).is_empty());
    }

    #[test]
    fn cell_cover_satisfies_cover_condition() {
        let d = build_cell_decomposition(10, Extent::torus(30, 30)).unwrap();
        let cover = cells_to_cover(&d).unwrap();
        assert_eq!(cover.regions.len(), 9);
        assert!(cover_misses(&cover, 0).is_empty());
    }
}
