use super::{neighborhood, neighbors, FaceCoord, Region};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashSet, VecDeque};

/// True if the region is nonempty and forms a single adjacency component.
pub fn is_connected(a: &Region) -> bool {
    let Some(start) = a.first() else {
        return false;
    };
    let mut seen = HashSet::from([start]);
    let mut stack = vec![start];
    while let Some(f) = stack.pop() {
        for g in f.ring() {
            if a.contains(&g) && seen.insert(g) {
                stack.push(g);
            }
        }
    }
    seen.len() == a.len()
}

/// Connected, and the complement inside the bounding box grown by two is connected
/// through a virtual outside node adjacent to the box rim.
pub fn is_simply_connected(a: &Region) -> bool {
    if !is_connected(a) {
        return false;
    }
    let qmin = a.iter().map(|f| f.q).min().unwrap() - 2;
    let qmax = a.iter().map(|f| f.q).max().unwrap() + 2;
    let rmin = a.iter().map(|f| f.r).min().unwrap() - 2;
    let rmax = a.iter().map(|f| f.r).max().unwrap() + 2;
    let inside = |f: &FaceCoord| (qmin..=qmax).contains(&f.q) && (rmin..=rmax).contains(&f.r);
    let mut total = 0usize;
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    for q in qmin..=qmax {
        for r in rmin..=rmax {
            let f = FaceCoord::new(q, r);
            if a.contains(&f) {
                continue;
            }
            total += 1;
            if q == qmin || q == qmax || r == rmin || r == rmax {
                seen.insert(f);
                queue.push_back(f);
            }
        }
    }
    while let Some(f) = queue.pop_front() {
        for g in f.ring() {
            if inside(&g) && !a.contains(&g) && seen.insert(g) {
                queue.push_back(g);
            }
        }
    }
    seen.len() == total
}

/// A nonempty simply connected region.
pub fn is_disk(a: &Region) -> bool {
    is_simply_connected(a)
}

/// A face together with its six neighbours.
pub fn elementary_disk(f: FaceCoord) -> Region {
    neighbors(f).with(f)
}

/// A split of a neighbourhood into two nonempty disks `b` and `d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcPartition {
    pub b: Region,
    pub d: Region,
    /// For single-face centres: ring positions `(i, j)` with `b = ring[i..j]`.
    pub cuts: Option<(usize, usize)>,
}

impl ArcPartition {
    pub fn label(&self) -> String {
        match self.cuts {
            Some((i, j)) => format!("arc[{i}..{j})"),
            None => {
                let faces: Vec<String> = self.b.iter().map(|f| format!("{},{}", f.q, f.r)).collect();
                format!("B={{{}}}", faces.join(" "))
            }
        }
    }

    /// Size class `(|b|, |d|)` with the smaller part first.
    pub fn split(&self) -> (usize, usize) {
        let (x, y) = (self.b.len(), self.d.len());
        (x.min(y), x.max(y))
    }
}

/// The 15 unordered splits of the six neighbours of `f` into two contiguous arcs.
///
/// Cut `k` sits between `ring[k-1]` and `ring[k]`; cuts `i < j` give `b = ring[i..j]`.
pub fn arc_partitions(f: FaceCoord) -> Vec<ArcPartition> {
    let ring = f.ring();
    let mut out = Vec::with_capacity(15);
    for i in 0..6 {
        for j in i + 1..6 {
            let b: Region = ring[i..j].iter().copied().collect();
            let d: Region = ring.iter().copied().filter(|g| !b.contains(g)).collect();
            out.push(ArcPartition { b, d, cuts: Some((i, j)) });
        }
    }
    out
}

/// Largest neighbourhood for which partitions are enumerated exhaustively.
pub const MAX_PARTITION_RING: usize = 18;

/// All unordered splits of `N(a)` into two disks. Single faces use the ring enumeration.
pub fn neighborhood_partitions(a: &Region) -> Result<Vec<ArcPartition>> {
    if a.len() == 1 {
        return Ok(arc_partitions(a.first().unwrap()));
    }
    let ring: Vec<FaceCoord> = neighborhood(a).iter().copied().collect();
    if ring.len() > MAX_PARTITION_RING {
        return Err(Error::Geometry(format!("neighbourhood of {} faces is too large to enumerate", ring.len())));
    }
    let n = ring.len();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    // The subset containing ring[0] is always `b`, so each unordered split is visited once.
    for mask in 1u32..(1u32 << n) - 1 {
        if mask & 1 == 0 {
            continue;
        }
        let b: Region = (0..n).filter(|k| mask >> k & 1 == 1).map(|k| ring[k]).collect();
        let d: Region = (0..n).filter(|k| mask >> k & 1 == 0).map(|k| ring[k]).collect();
        if is_disk(&b) && is_disk(&d) && seen.insert(mask) {
            out.push(ArcPartition { b, d, cuts: None });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn region(faces: &[(i64, i64)]) -> Region {
        faces.iter().map(|&(q, r)| FaceCoord::new(q, r)).collect()
    }

    // Paper figure coordinates (x, y) map to axial (x - y, y).
    fn from_figure(faces: &[(i64, i64)]) -> Region {
        faces.iter().map(|&(x, y)| FaceCoord::new(x - y, y)).collect()
    }

    #[test]
    fn seven_face_blob_is_simply_connected() {
        let a = from_figure(&[(0, 0), (1, 0), (1, 1), (2, 1), (0, 1), (1, 2), (2, 2)]);
        assert!(is_connected(&a));
        assert!(is_simply_connected(&a));
    }

    #[test]
    fn six_face_ring_is_not_simply_connected() {
        let a = neighbors(FaceCoord::new(0, 0));
        assert!(is_connected(&a));
        assert!(!is_simply_connected(&a));
    }

    #[test]
    fn separated_faces_are_not_connected() {
        let a = region(&[(0, 0), (2, 0)]);
        assert!(!is_connected(&a));
        assert!(!is_disk(&a));
        assert!(!is_disk(&Region::new()));
    }

    #[test]
    fn elementary_disk_shape() {
        let d = elementary_disk(FaceCoord::new(4, -7));
        assert_eq!(d.len(), 7);
        assert!(is_simply_connected(&d));
        assert_eq!(neighborhood(&d).len(), 12);
    }

    #[test]
    fn fifteen_arc_partitions() {
        let parts = arc_partitions(FaceCoord::new(0, 0));
        assert_eq!(parts.len(), 15);
        let mut classes = BTreeSet::new();
        for p in &parts {
            assert!(is_simply_connected(&p.b) && is_simply_connected(&p.d));
            assert!(p.b.is_disjoint(&p.d));
            assert_eq!(p.b.len() + p.d.len(), 6);
            classes.insert(p.split());
        }
        assert_eq!(classes, BTreeSet::from([(1, 5), (2, 4), (3, 3)]));
        let ones = parts.iter().filter(|p| p.split() == (1, 5)).count();
        let twos = parts.iter().filter(|p| p.split() == (2, 4)).count();
        let threes = parts.iter().filter(|p| p.split() == (3, 3)).count();
        assert_eq!((ones, twos, threes), (6, 6, 3));
    }

    #[test]
    fn generic_enumeration_agrees_on_single_faces() {
        // Bypass the single-face shortcut by enumerating subsets of the ring directly.
        let f = FaceCoord::new(2, 1);
        let ring: Vec<FaceCoord> = neighbors(f).iter().copied().collect();
        let mut count = 0;
        for mask in 1u32..63 {
            if mask & 1 == 0 {
                continue;
            }
            let b: Region = (0..6).filter(|k| mask >> k & 1 == 1).map(|k| ring[k]).collect();
            let d: Region = (0..6).filter(|k| mask >> k & 1 == 0).map(|k| ring[k]).collect();
            if is_disk(&b) && is_disk(&d) {
                count += 1;
                assert!(arc_partitions(f).iter().any(|p| (p.b == b && p.d == d) || (p.b == d && p.d == b)));
            }
        }
        assert_eq!(count, 15);
    }

    #[test]
    fn two_face_disk_partitions() {
        let a = region(&[(0, 0), (1, 0)]);
        let parts = neighborhood_partitions(&a).unwrap();
        // The 8-face ring has no chords, so partitions are the C(8, 2) arc splits.
        assert_eq!(neighborhood(&a).len(), 8);
        assert_eq!(parts.len(), 28);
    }
}
