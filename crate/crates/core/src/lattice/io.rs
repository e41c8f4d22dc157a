//! Text region files and JSON cover manifests.

use super::{CoverProvenance, CoverSpec, Extent, FaceCoord, Region};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

/// Parse a region file: one `q r` pair per line, `#` starts a comment.
pub fn parse_region(text: &str) -> Result<Region> {
    let mut region = Region::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let mut next = |what: &str| -> Result<i64> {
            parts
                .next()
                .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("missing {what}") })?
                .parse()
                .map_err(|_| Error::Parse { line: i + 1, msg: format!("bad {what}") })
        };
        let q = next("q")?;
        let r = next("r")?;
        if parts.next().is_some() {
            return Err(Error::Parse { line: i + 1, msg: "trailing tokens".into() });
        }
        region.insert(FaceCoord::new(q, r));
    }
    Ok(region)
}

/// Serialise a region, one face per line in lexicographic order.
pub fn write_region(region: &Region) -> String {
    let mut out = String::new();
    for f in region {
        let _ = writeln!(out, "{} {}", f.q, f.r);
    }
    out
}

/// JSON manifest listing the region files of a cover.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverManifest {
    pub extent: Extent,
    pub provenance: CoverProvenance,
    pub regions: Vec<ManifestEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub centre: FaceCoord,
}

pub fn parse_cover_manifest(text: &str) -> Result<CoverManifest> {
    Ok(serde_json::from_str(text)?)
}

/// Write `manifest.json` and one region file per region into `dir`.
pub fn write_cover_manifest(cover: &CoverSpec, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut entries = Vec::with_capacity(cover.regions.len());
    for (i, (region, centre)) in cover.regions.iter().zip(&cover.centres).enumerate() {
        let file = format!("region_{i:04}.txt");
        std::fs::write(dir.join(&file), write_region(region))?;
        entries.push(ManifestEntry { file, centre: *centre });
    }
    let manifest = CoverManifest { extent: cover.extent, provenance: cover.provenance.clone(), regions: entries };
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}

impl CoverSpec {
    /// Load a cover from a manifest; region paths are relative to the manifest.
    pub fn load(manifest_path: &Path) -> Result<CoverSpec> {
        let manifest = parse_cover_manifest(&std::fs::read_to_string(manifest_path)?)?;
        let dir = manifest_path.parent().unwrap_or(Path::new("."));
        let mut regions = vec![];
        let mut centres = vec![];
        for entry in manifest.regions {
            regions.push(parse_region(&std::fs::read_to_string(dir.join(&entry.file))?)?);
            centres.push(entry.centre);
        }
        CoverSpec::new(manifest.extent, regions, centres, manifest.provenance)
    }
}
