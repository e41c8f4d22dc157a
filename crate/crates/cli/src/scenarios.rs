use crate::config::{BackendSpec, Builtin, CoverChoice, Params, Scenario, ScenarioConfig};
use crate::report::Checks;
use crate::Failure;
use bootstrap_core::axioms::{
    checkable_faces, extend_a0, extend_a1, sweep, Axiom, AxiomReport, DomainWall, StateBackend,
};
use bootstrap_core::hamiltonian::{
    band_control, build, check_commuting, check_ltqo, compare_kernels, dense_backend_state, dense_cross_check,
    frustration_free, overlap_shapes, restrict, sandwich_test, validate_cover, weight_reduce, write_manifest,
    CoverReport, LtqoParams, LtqoReport, ParentHamiltonian, Stamps,
};
use bootstrap_core::lattice::{
    build_cell_decomposition, cells_to_cover, minimum_pitch, neighborhood, neighborhood_partitions, red_faces,
    red_hexagon_cover, wall_decomposition, CoverProvenance, CoverSpec, Extent, FaceCoord, Region, WALL_PITCH,
};
use bootstrap_core::markov::{
    check_commutation, check_product_lemma, make_markov_state, markov_decompose, random_markov_specs,
    verify_projector_factorization, Tripartition, RECONSTRUCTION_TOL,
};
use bootstrap_core::stabilizer::{
    bond_state, face_label, ghz_state, make_toric_code, make_wall_state, parse_stabilizer_state, product_state,
    CoarseGrainSpec, StabilizerState,
};
use bootstrap_core::tensor::{cmi, modular_commutator, DensityOperator};
use bootstrap_core::{Error, Tolerances};
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeSet;

/// Largest |J| counted as zero.
const J_TOL: f64 = 1e-8;
/// Kernel projectors and sandwiched observables closer than this count as equal.
const DENSE_TOL: f64 = 1e-8;
/// Dense commutator bound below which two support projectors count as commuting.
const COMMUTATOR_TOL: f64 = 1e-9;
/// Faces per shape in the dense cross-check.
const CROSS_CHECK_SHAPE: usize = 3;
/// Default largest ball radius for LTQO on walls.
const WALL_R_MAX: i64 = 6;

pub struct Outcome {
    pub backend: Value,
    pub cover: Value,
    pub checks: Checks,
}

struct Loaded {
    state: StabilizerState,
    extent: Extent,
    dense: Option<DensityOperator>,
    wall_row: Option<i64>,
    tol: Tolerances,
}

impl Loaded {
    fn backend(&self) -> StateBackend<'_> {
        match &self.dense {
            Some(rho) => StateBackend::dense(rho, self.tol),
            None => StateBackend::stabilizer(&self.state),
        }
    }

    fn walls(&self) -> Option<Vec<i64>> {
        self.wall_row.map(|k| vec![0, k])
    }

    fn centre(&self, p: &Params) -> FaceCoord {
        p.centre.unwrap_or(FaceCoord::new(self.extent.cols / 2, self.extent.rows / 2))
    }
}

fn value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialise")
}

fn load_backend(spec: &BackendSpec, tol: Tolerances) -> Result<Loaded, Failure> {
    let extent_of = || -> Result<Extent, Failure> {
        match (spec.rows, spec.cols) {
            (Some(rows), Some(cols)) if rows > 0 && cols > 0 => {
                Ok(Extent { rows, cols, periodic: spec.periodic.unwrap_or(true) })
            }
            (Some(_), Some(_)) => Err(Failure::new("backend.rows and backend.cols must be positive")),
            _ => Err(Failure::new("backend.rows and backend.cols are required")),
        }
    };
    let (state, wall_row) = match (spec.builtin, &spec.file) {
        (Some(_), Some(_)) | (None, None) => return Err(Failure::new("backend needs exactly one of builtin and file")),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::new(format!("cannot read state {}: {e}", path.display())))?;
            (parse_stabilizer_state(&text)?, None)
        }
        (Some(b), None) => {
            let e = extent_of()?;
            if matches!(b, Builtin::ToricCode | Builtin::Wall) && !e.periodic {
                return Err(Failure::new("toric-code and wall backends live on a torus"));
            }
            match b {
                Builtin::ToricCode => (make_toric_code(e.rows, e.cols, CoarseGrainSpec::OwnedEdges)?, None),
                Builtin::Wall => {
                    let k = spec.wall_row.ok_or_else(|| Failure::new("wall backend needs backend.wall_row"))?;
                    (make_wall_state(e.rows, e.cols, k)?, Some(k))
                }
                Builtin::Ghz => (ghz_state(e)?, None),
                Builtin::Product => (product_state(e, spec.qubits_per_face.unwrap_or(1))?, None),
                Builtin::Bond => (bond_state(e)?, None),
            }
        }
    };
    let extent = match state.extent() {
        Some(e) => e,
        None => extent_of().map_err(|_| Failure::new("state file has no extent line; set backend.rows and backend.cols"))?,
    };
    let dense = if spec.dense {
        let n = state.num_qubits();
        let cap = tol.eigen_cap.min(tol.dense_cap);
        if n >= usize::BITS as usize || (1usize << n) > cap {
            return Err(Failure::new(format!(
                "dense backend needs dimension 2^{n}, above the dense eigensolver cap {cap} (tolerances.eigen_cap)"
            )));
        }
        Some(dense_backend_state(&state)?)
    } else {
        None
    };
    Ok(Loaded { state, extent, dense, wall_row, tol })
}

fn make_cover(choice: &CoverChoice, l: &Loaded) -> Result<CoverSpec, Failure> {
    let e = l.extent;
    Ok(match choice {
        CoverChoice::RedHexagon => red_hexagon_cover(e)?,
        CoverChoice::Cells { pitch } => {
            cells_to_cover(&build_cell_decomposition(pitch.unwrap_or(minimum_pitch().pitch), e)?)?
        }
        CoverChoice::WallCells { pitch } => {
            let k = l.wall_row.ok_or_else(|| Failure::new("wall-cells cover needs a wall backend"))?;
            cells_to_cover(&wall_decomposition(pitch.unwrap_or(WALL_PITCH), e, k)?)?
        }
        CoverChoice::Windows { width } => {
            if e.periodic || e.rows != 1 || *width < 1 || *width > e.cols {
                return Err(Failure::new("windows cover needs a one-row patch at least `width` faces long"));
            }
            let regions: Vec<Region> =
                (0..=e.cols - width).map(|s| (s..s + width).map(|q| FaceCoord::new(q, 0)).collect()).collect();
            let centres = regions.iter().map(|r| r.first().unwrap()).collect();
            CoverSpec::new(e, regions, centres, CoverProvenance::Custom { note: format!("windows of {width}") })?
        }
        CoverChoice::File { path } => CoverSpec::load(path)?,
    })
}

pub fn run(scenario: Scenario, cfg: &ScenarioConfig, tol: Tolerances, seed: u64) -> Result<Outcome, Failure> {
    let mut checks = Checks::default();
    let p = &cfg.params;
    if scenario == Scenario::Markov {
        markov(p, tol, seed, &mut checks)?;
        return Ok(Outcome { backend: Value::Null, cover: Value::Null, checks });
    }
    let spec = cfg.backend.as_ref().ok_or_else(|| Failure::new(format!("scenario {} needs a backend", scenario.name())))?;
    let l = load_backend(spec, tol)?;
    let backend = json!({
        "spec": spec,
        "extent": l.extent,
        "qubits": l.state.num_qubits(),
        "dense": l.dense.is_some(),
    });
    let uses_cover =
        matches!(scenario, Scenario::Cover | Scenario::Hamiltonian | Scenario::Ltqo | Scenario::WeightReduce | Scenario::DomainWall);
    let cover = if uses_cover {
        let default = if scenario == Scenario::DomainWall { CoverChoice::WallCells { pitch: None } } else { CoverChoice::RedHexagon };
        let choice = cfg.cover.clone().unwrap_or(default);
        Some((make_cover(&choice, &l)?, choice))
    } else {
        None
    };
    let cover_value = match &cover {
        Some((c, choice)) => json!({
            "choice": choice,
            "provenance": c.provenance,
            "regions": c.regions.len(),
            "max_radius": c.max_radius(),
        }),
        None => Value::Null,
    };
    let c = cover.as_ref().map(|(c, _)| c);
    match scenario {
        Scenario::Axioms => axioms(&l, p, &mut checks)?,
        Scenario::Extend => extend(&l, p, &mut checks)?,
        Scenario::Cover => cover_scenario(&l, c.unwrap(), &mut checks)?,
        Scenario::Hamiltonian => hamiltonian(&l, c.unwrap(), p, &mut checks)?,
        Scenario::Ltqo => ltqo(&l, c.unwrap(), p, seed, &mut checks)?,
        Scenario::WeightReduce => weight(&l, c.unwrap(), &mut checks)?,
        Scenario::DomainWall => domain_wall(&l, c.unwrap(), p, &mut checks)?,
        Scenario::Modular => modular(&l, p, &mut checks)?,
        Scenario::Markov => unreachable!(),
    }
    Ok(Outcome { backend, cover: cover_value, checks })
}

fn face_list(b: &StateBackend, p: &Params) -> Result<Vec<FaceCoord>, Failure> {
    let faces = p.faces.clone().unwrap_or_else(|| checkable_faces(b));
    if faces.is_empty() {
        return Err(Failure::new("no face has room for its elementary disk and neighbourhood"));
    }
    Ok(faces)
}

fn push_axiom(checks: &mut Checks, r: &AxiomReport) {
    let name = value(&r.axiom);
    let face = r.region.first().expect("axiom regions are nonempty");
    checks.gate(format!("{} {face}", name.as_str().unwrap_or("axiom")), r.pass, Some(r.max_deficit()), value(r));
}

fn axioms(l: &Loaded, p: &Params, checks: &mut Checks) -> Result<(), Failure> {
    let b = l.backend();
    for r in sweep(&b, &face_list(&b, p)?, None)? {
        push_axiom(checks, &r);
    }
    Ok(())
}

fn extend(l: &Loaded, p: &Params, checks: &mut Checks) -> Result<(), Failure> {
    let b = l.backend();
    let c = p.region.clone().unwrap_or_else(|| {
        let f = l.centre(p);
        [f, f.offset(1, 0)].into_iter().collect()
    });
    let cert = extend_a0(&b, &neighborhood(&c), &c)?;
    checks.gate("A0 extension", cert.pass, Some(cert.final_value), value(&cert));
    for part in neighborhood_partitions(&c)? {
        let cert = extend_a1(&b, &part.b, &c, &part.d)?;
        checks.gate(format!("A1 extension {}", part.label()), cert.pass, Some(cert.final_value), value(&cert));
    }
    Ok(())
}

fn markov(p: &Params, tol: Tolerances, seed: u64, checks: &mut Checks) -> Result<(), Failure> {
    let parts = Tripartition::abc();
    let specs = random_markov_specs(p.instances.unwrap_or(50), p.max_dim.unwrap_or(256), seed)?;
    for (k, spec) in specs.iter().enumerate() {
        let name = format!("chain {k}");
        let rho = make_markov_state(spec)?;
        let d = match markov_decompose(&rho, &parts, tol.cmi) {
            Ok(d) => d,
            Err(e) => {
                checks.gate(name, false, None, json!({ "spec": spec, "error": e.to_string() }));
                continue;
            }
        };
        let recon = d.reconstruction_error(&rho)?;
        let f = verify_projector_factorization(&d, &rho)?;
        let c = check_commutation(&rho, &parts, tol.cmi)?;
        let prod = check_product_lemma(&rho, &parts, tol.cmi)?;
        let pass = recon < RECONSTRUCTION_TOL && f.pass && c.pass && prod.pass;
        let detail = json!({
            "spec": spec,
            "blocks": d.block_count(),
            "reconstruction": recon,
            "factorization": f,
            "commutation": c,
            "product": prod,
        });
        checks.gate(name, pass, Some(recon), detail);
    }
    let ghz = dense_backend_state(&ghz_state(Extent::patch(1, 3))?)?;
    let l: Vec<String> = (0..3).map(|q| face_label(FaceCoord::new(q, 0))).collect();
    let (a, b, c) = ([l[0].as_str()], [l[1].as_str()], [l[2].as_str()]);
    let i = cmi(&ghz, &a, &b, &c)?;
    let rejected = matches!(markov_decompose(&ghz, &Tripartition::new(a, b, c), tol.cmi), Err(Error::NotMarkov { .. }));
    checks.gate("GHZ3 control", rejected && (i - 1.0).abs() < 1e-9, Some(i), json!({ "rejected": rejected }));
    Ok(())
}

fn push_cover(checks: &mut Checks, v: &CoverReport) {
    checks.gate(
        "cover condition",
        v.cover_misses.is_empty(),
        Some(v.cover_misses.len() as f64),
        json!({ "misses": v.cover_misses }),
    );
    let worst = v.markov_pairs.iter().map(|p| p.cmi).fold(0.0, f64::max);
    checks.gate(
        "markov overlaps",
        v.markov_pairs.iter().all(|p| p.cmi <= v.threshold),
        Some(worst),
        json!({ "pairs": v.markov_pairs, "threshold": v.threshold }),
    );
}

fn cover_scenario(l: &Loaded, cover: &CoverSpec, checks: &mut Checks) -> Result<(), Failure> {
    if cover.provenance == CoverProvenance::RedHexagon {
        let reds = red_faces(&l.extent);
        let dists: BTreeSet<i64> = l
            .extent
            .faces()
            .iter()
            .filter_map(|f| reds.iter().map(|g| l.extent.distance(*f, *g)).min())
            .collect();
        let worst = dists.iter().max().copied().unwrap_or(i64::MAX);
        checks.gate(
            "red distances",
            !reds.is_empty() && worst <= 3,
            Some(worst as f64),
            json!({ "distances": dists, "red_faces": reds.len() }),
        );
    }
    push_cover(checks, &validate_cover(&l.backend(), cover)?);
    Ok(())
}

/// Commuting and frustration-free checks; returns both outcomes.
fn push_terms(checks: &mut Checks, h: &ParentHamiltonian, b: &StateBackend) -> Result<(bool, bool), Failure> {
    let c = check_commuting(h)?;
    let failing: Vec<_> = c.pairs.iter().filter(|p| !p.commute).collect();
    let worst = c.pairs.iter().filter_map(|p| p.norm_bound).fold(0.0, f64::max);
    checks.gate("commuting", c.pass, Some(worst), json!({ "pairs": c.pairs.len(), "failing": failing }));
    let f = frustration_free(h, b)?;
    checks.gate("frustration free", f.pass, Some(f.max_energy), value(&f));
    Ok((c.pass, f.pass))
}

fn all_faces(l: &Loaded) -> Region {
    l.extent.faces().into_iter().collect()
}

fn hamiltonian(l: &Loaded, cover: &CoverSpec, p: &Params, checks: &mut Checks) -> Result<(), Failure> {
    let b = l.backend();
    let v = validate_cover(&b, cover)?;
    push_cover(checks, &v);
    let h = build(&b, cover)?;
    let (commuting, ff) = push_terms(checks, &h, &b)?;
    let union = p.cross_check_union.unwrap_or(4);
    if l.dense.is_none() && union > 0 {
        let shapes = overlap_shapes(CROSS_CHECK_SHAPE, union, l.centre(p));
        let mut worst = 0.0f64;
        let mut disagreements = vec![];
        for (x, y) in &shapes {
            let c = dense_cross_check(&l.state, x, y, COMMUTATOR_TOL)?;
            worst = worst.max(c.dense_norm);
            if !c.agree {
                disagreements.push(c);
            }
        }
        checks.gate(
            "dense cross-check",
            disagreements.is_empty(),
            Some(worst),
            json!({ "pairs": shapes.len(), "max_union_faces": union, "disagreements": disagreements }),
        );
    }
    let k = restrict(&h, &all_faces(l))?;
    checks.note(
        "ground space",
        Some(k.log2_dimension()),
        json!({ "log2_dimension": k.log2_dimension(), "terms": h.terms.len() }),
    );
    if let Some(path) = &p.manifest_out {
        let stamps = Stamps { cover: Some(v.pass), commuting: Some(commuting), frustration_free: Some(ff) };
        std::fs::write(path, write_manifest(&h, &stamps))
            .map_err(|e| Failure::new(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn push_ltqo(checks: &mut Checks, report: &LtqoReport) {
    for case in &report.cases {
        let name = format!("{} r={} at {}", value(&case.shape).as_str().unwrap_or("region"), case.size, case.centre);
        checks.gate(name, case.unique, case.marginal_deviation, value(case));
    }
    for ex in &report.excluded {
        checks.note(format!("excluded r={} at {}", ex.radius, ex.centre), None, value(ex));
    }
    checks.gate(
        "ltqo coverage",
        !report.cases.is_empty(),
        Some(report.cases.len() as f64),
        json!({ "ell": report.ell, "r_max": report.r_max }),
    );
}

fn ltqo_params(l: &Loaded, cover: &CoverSpec, p: &Params, r_max: i64, centres: Vec<FaceCoord>) -> LtqoParams {
    let mut params = LtqoParams::for_cover(cover, p.r_max.unwrap_or(r_max), p.centres.clone().unwrap_or(centres));
    if let Some(ell) = p.ell {
        params.ell = ell;
    }
    params.walls = p.walls.clone().or_else(|| l.walls()).unwrap_or_default();
    params
}

fn ltqo(l: &Loaded, cover: &CoverSpec, p: &Params, seed: u64, checks: &mut Checks) -> Result<(), Failure> {
    let b = l.backend();
    let h = build(&b, cover)?;
    let params = ltqo_params(l, cover, p, 4 * cover.max_radius(), vec![l.centre(p)]);
    push_ltqo(checks, &check_ltqo(&h, &b, &params)?);
    if l.extent.periodic && l.dense.is_none() && params.walls.is_empty() && p.band.unwrap_or(true) {
        let case = band_control(&h, &b, l.centre(p).r, 2, params.ell)?;
        checks.gate("band control", !case.unique, None, value(&case));
    }
    if l.dense.is_some() {
        for c in &params.centres {
            let t = sandwich_test(&h, &b, &Region::single(*c), params.ell, p.samples.unwrap_or(20), seed)?;
            checks.gate(format!("sandwich at {c}"), t.max_deviation < DENSE_TOL, Some(t.max_deviation), value(&t));
        }
    }
    Ok(())
}

fn weight(l: &Loaded, cover: &CoverSpec, checks: &mut Checks) -> Result<(), Failure> {
    let b = l.backend();
    let h = build(&b, cover)?;
    let w = weight_reduce(&h, &b)?;
    checks.gate(
        "max weight",
        w.max_weight <= 3,
        Some(w.max_weight as f64),
        json!({ "terms_before": h.terms.len(), "terms_after": w.hamiltonian.terms.len() }),
    );
    let splits = w.trees.iter().map(|t| t.splits().len()).sum::<usize>();
    checks.gate("split CMI", w.max_split_cmi <= b.threshold(), Some(w.max_split_cmi), json!({ "splits": splits }));
    let k = compare_kernels(&h, &w.hamiltonian, &all_faces(l), DENSE_TOL)?;
    checks.gate("kernel equality", k.equal, Some(k.projector_distance.unwrap_or(0.0)), value(&k));
    for (r, c) in cover.regions.iter().zip(&cover.centres) {
        let k = compare_kernels(&h, &w.hamiltonian, r, DENSE_TOL)?;
        checks.gate(format!("term kernel at {c}"), k.equal, Some(k.projector_distance.unwrap_or(0.0)), value(&k));
    }
    Ok(())
}

fn domain_wall(l: &Loaded, cover: &CoverSpec, p: &Params, checks: &mut Checks) -> Result<(), Failure> {
    let k = l.wall_row.ok_or_else(|| Failure::new("domain-wall needs backend.builtin = wall"))?;
    let wall = DomainWall { extent: l.extent, rows: p.walls.clone().unwrap_or(vec![0, k]) };
    let b = l.backend();
    let mut exempt = vec![];
    for r in sweep(&b, &face_list(&b, p)?, Some(&wall))? {
        if r.axiom == Axiom::A1Wall && r.exempt.iter().any(|d| d.value > b.threshold()) {
            exempt.push(r.region.first().unwrap());
        }
        push_axiom(checks, &r);
    }
    checks.gate("exempt pattern", !exempt.is_empty(), Some(exempt.len() as f64), json!({ "faces": exempt }));
    push_cover(checks, &validate_cover(&b, cover)?);
    let h = build(&b, cover)?;
    push_terms(checks, &h, &b)?;
    let q = l.extent.cols / 2;
    let bulk = FaceCoord::new(q, (k + l.extent.rows) / 2);
    let params = ltqo_params(l, cover, p, WALL_R_MAX, vec![FaceCoord::new(q, k), bulk]);
    push_ltqo(checks, &check_ltqo(&h, &b, &params)?);
    Ok(())
}

fn default_triples(f: FaceCoord) -> Vec<[Region; 3]> {
    let r = |v: &[(i64, i64)]| -> Region { v.iter().map(|&(dq, dr)| f.offset(dq, dr)).collect() };
    vec![
        [r(&[(0, 0), (1, 0)]), r(&[(2, 0)]), r(&[(3, 0), (4, 0)])],
        [r(&[(0, 0)]), r(&[(1, 0), (0, 1), (1, 1)]), r(&[(2, 0)])],
        [r(&[(1, -1), (2, -1)]), r(&[(1, 0)]), r(&[(0, 1), (1, 1)])],
    ]
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn modular(l: &Loaded, p: &Params, checks: &mut Checks) -> Result<(), Failure> {
    let triples = p.triples.clone().unwrap_or_else(|| default_triples(l.centre(p)));
    for (i, [a, b, c]) in triples.iter().enumerate() {
        if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) || a.is_empty() || b.is_empty() || c.is_empty() {
            return Err(Failure::new(format!("triple {i} needs three nonempty disjoint regions")));
        }
        let region = a.union(b).union(c);
        let n = l.state.qubits_of(&region)?.len();
        if n >= usize::BITS as usize || (1usize << n) > l.tol.eigen_cap {
            return Err(Failure::new(format!(
                "triple {i} spans {n} qubits, above the dense eigensolver cap {} (tolerances.eigen_cap)",
                l.tol.eigen_cap
            )));
        }
        let rho = l.state.densify(&region)?;
        let labels = |r: &Region| r.iter().map(|f| face_label(*f)).collect::<Vec<_>>();
        let (la, lb, lc) = (labels(a), labels(b), labels(c));
        let j = modular_commutator(&rho, &refs(&la), &refs(&lb), &refs(&lc))?;
        checks.gate(
            format!("J triple {i}"),
            j.value.abs() < J_TOL && j.imaginary_residue.abs() < J_TOL,
            Some(j.value),
            json!({ "a": a, "b": b, "c": c, "qubits": n, "imaginary_residue": j.imaginary_residue }),
        );
    }
    Ok(())
}
