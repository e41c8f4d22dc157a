use super::{FaceCoord, Region};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// A hex edge, stored as the unordered pair of faces it separates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub a: FaceCoord,
    pub b: FaceCoord,
}

impl Edge {
    pub fn new(x: FaceCoord, y: FaceCoord) -> Self {
        if x <= y {
            Edge { a: x, b: y }
        } else {
            Edge { a: y, b: x }
        }
    }

    /// The two lattice vertices at the ends of the edge, each named by its three faces.
    pub fn vertices(&self) -> [[FaceCoord; 3]; 2] {
        let mut common = self.a.ring().into_iter().filter(|w| w.is_adjacent(self.b));
        let vertex = |w: FaceCoord| {
            let mut v = [self.a, self.b, w];
            v.sort();
            v
        };
        let x = common.next().expect("adjacent faces share two neighbours");
        let y = common.next().expect("adjacent faces share two neighbours");
        [vertex(x), vertex(y)]
    }
}

/// Which pair of subsystems an edge separates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Between B and C.
    Green,
    /// Between C and D.
    Blue,
    /// Between B and D.
    Red,
    /// Between BCD and the rest of the lattice.
    Outer,
}

/// Boundary edges of a tripartition grouped into vertex-connected segments per colour.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundarySegments {
    pub segments: BTreeMap<Side, Vec<Vec<Edge>>>,
}

impl BoundarySegments {
    pub fn segments(&self, side: Side) -> &[Vec<Edge>] {
        self.segments.get(&side).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn edge_count(&self, side: Side) -> usize {
        self.segments(side).iter().map(Vec::len).sum()
    }

    pub fn total_edges(&self) -> usize {
        self.segments.values().flatten().map(Vec::len).sum()
    }
}

/// Classify every edge touching `B ∪ C ∪ D` by the parts it separates.
pub fn classify_boundaries(b: &Region, c: &Region, d: &Region) -> Result<BoundarySegments> {
    if !b.is_disjoint(c) || !b.is_disjoint(d) || !c.is_disjoint(d) {
        return Err(Error::Geometry("boundary classification needs disjoint parts".into()));
    }
    let part = |f: &FaceCoord| {
        if b.contains(f) {
            Some(0)
        } else if c.contains(f) {
            Some(1)
        } else if d.contains(f) {
            Some(2)
        } else {
            None
        }
    };
    let mut edges: BTreeMap<Side, BTreeSet<Edge>> = BTreeMap::new();
    for f in b.iter().chain(c.iter()).chain(d.iter()) {
        let pf = part(f).unwrap();
        for g in f.ring() {
            let side = match (pf, part(&g)) {
                (_, None) => Side::Outer,
                (x, Some(y)) if x == y => continue,
                (0, Some(1)) | (1, Some(0)) => Side::Green,
                (1, Some(2)) | (2, Some(1)) => Side::Blue,
                _ => Side::Red,
            };
            edges.entry(side).or_default().insert(Edge::new(*f, g));
        }
    }
    let mut out = BoundarySegments::default();
    for (side, set) in edges {
        out.segments.insert(side, group_segments(&set));
    }
    Ok(out)
}

fn group_segments(edges: &BTreeSet<Edge>) -> Vec<Vec<Edge>> {
    let mut by_vertex: BTreeMap<[FaceCoord; 3], Vec<Edge>> = BTreeMap::new();
    for e in edges {
        for v in e.vertices() {
            by_vertex.entry(v).or_default().push(*e);
        }
    }
    let mut done = BTreeSet::new();
    let mut out = Vec::new();
    for e in edges {
        if done.contains(e) {
            continue;
        }
        let mut segment = vec![];
        let mut stack = vec![*e];
        done.insert(*e);
        while let Some(x) = stack.pop() {
            segment.push(x);
            for v in x.vertices() {
                for y in &by_vertex[&v] {
                    if done.insert(*y) {
                        stack.push(*y);
                    }
                }
            }
        }
        segment.sort();
        out.push(segment);
    }
    out
}
