use crate::Failure;
use bootstrap_core::lattice::{FaceCoord, Region};
use bootstrap_core::Tolerances;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Axioms,
    Extend,
    Markov,
    Cover,
    Hamiltonian,
    Ltqo,
    WeightReduce,
    DomainWall,
    Modular,
}

impl Scenario {
    pub const ALL: [Scenario; 9] = [
        Scenario::Axioms,
        Scenario::Extend,
        Scenario::Markov,
        Scenario::Cover,
        Scenario::Hamiltonian,
        Scenario::Ltqo,
        Scenario::WeightReduce,
        Scenario::DomainWall,
        Scenario::Modular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Axioms => "axioms",
            Scenario::Extend => "extend",
            Scenario::Markov => "markov",
            Scenario::Cover => "cover",
            Scenario::Hamiltonian => "hamiltonian",
            Scenario::Ltqo => "ltqo",
            Scenario::WeightReduce => "weight-reduce",
            Scenario::DomainWall => "domain-wall",
            Scenario::Modular => "modular",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Scenario::Axioms => "A0 and A1 on the elementary disk of every checkable face",
            Scenario::Extend => "certificates extending A0 and A1 to a larger disk",
            Scenario::Markov => "random quantum Markov chains: decomposition, projector lemmas, GHZ control",
            Scenario::Cover => "cover condition and pairwise Markov overlaps of a cover",
            Scenario::Hamiltonian => "parent Hamiltonian: commuting terms, frustration freeness, dense cross-check",
            Scenario::Ltqo => "local uniqueness of ground-state marginals on balls, band control",
            Scenario::WeightReduce => "split terms to three faces and compare kernels",
            Scenario::DomainWall => "wall axioms, wall cover Hamiltonian and single-interval LTQO",
            Scenario::Modular => "modular commutator on densified triples",
        }
    }

    pub fn required_keys(self) -> &'static [&'static str] {
        match self {
            Scenario::Markov => &[],
            Scenario::DomainWall => &["backend.builtin = wall", "backend.rows", "backend.cols", "backend.wall_row"],
            _ => &["backend"],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    ToricCode,
    Ghz,
    Product,
    Bond,
    Wall,
}

/// Either a builtin state with its lattice size, or a stabilizer text file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendSpec {
    pub builtin: Option<Builtin>,
    pub file: Option<PathBuf>,
    pub rows: Option<i64>,
    pub cols: Option<i64>,
    pub periodic: Option<bool>,
    pub wall_row: Option<i64>,
    pub qubits_per_face: Option<usize>,
    /// Densify the state and run the dense code paths.
    #[serde(default)]
    pub dense: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CoverChoice {
    RedHexagon,
    Cells { pitch: Option<i64> },
    WallCells { pitch: Option<i64> },
    /// Windows of consecutive faces on a one-row patch.
    Windows { width: i64 },
    File { path: PathBuf },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub rank: Option<f64>,
    pub cmi: Option<f64>,
    pub psd: Option<f64>,
    pub dense_cap: Option<usize>,
    pub eigen_cap: Option<usize>,
}

impl ToleranceOverrides {
    pub fn apply(&self, mut t: Tolerances) -> Tolerances {
        t.rank = self.rank.unwrap_or(t.rank);
        t.cmi = self.cmi.unwrap_or(t.cmi);
        t.psd = self.psd.unwrap_or(t.psd);
        t.dense_cap = self.dense_cap.unwrap_or(t.dense_cap);
        t.eigen_cap = self.eigen_cap.unwrap_or(t.eigen_cap);
        t
    }
}

/// Scenario-specific knobs; every one has a default.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Faces whose elementary disks are checked (axioms, domain-wall).
    pub faces: Option<Vec<FaceCoord>>,
    /// Anchor face for default regions; defaults to the middle of the lattice.
    pub centre: Option<FaceCoord>,
    /// Inner disk C of the extension targets.
    pub region: Option<Region>,
    pub centres: Option<Vec<FaceCoord>>,
    pub r_max: Option<i64>,
    pub ell: Option<i64>,
    /// Run the non-contractible band control on a torus.
    pub band: Option<bool>,
    /// Rows of domain walls passed to the LTQO check.
    pub walls: Option<Vec<i64>>,
    /// Random observables per dense sandwich test.
    pub samples: Option<usize>,
    /// Dense cross-check of commutation on polyhex pairs with this many faces in the union; 0 disables.
    pub cross_check_union: Option<usize>,
    pub instances: Option<usize>,
    pub max_dim: Option<usize>,
    pub triples: Option<Vec<[Region; 3]>>,
    /// Write the Hamiltonian manifest here.
    pub manifest_out: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Option<Scenario>,
    pub backend: Option<BackendSpec>,
    pub cover: Option<CoverChoice>,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub params: Params,
}

impl ScenarioConfig {
    /// Read a config file; relative paths inside it are resolved against its directory.
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::new(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: ScenarioConfig =
            serde_json::from_str(&text).map_err(|e| Failure::new(format!("invalid config {}: {e}", path.display())))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        if let Some(f) = cfg.backend.as_mut().and_then(|b| b.file.as_mut()) {
            resolve(f);
        }
        if let Some(CoverChoice::File { path }) = cfg.cover.as_mut() {
            resolve(path);
        }
        if let Some(p) = cfg.out.as_mut() {
            resolve(p);
        }
        if let Some(p) = cfg.params.manifest_out.as_mut() {
            resolve(p);
        }
        Ok(cfg)
    }
}
