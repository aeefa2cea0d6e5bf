//! Batch pipelines behind the command-line front-end: instance loading,
//! artifact serialization (network/cluster JSON, field files, CSV traces,
//! SVG), run manifests, and the solve/wet/oracle/verify/sweep/render
//! commands.

use crate::cluster::{validate_cluster, ArcCluster, BoundaryTrace, InstanceSpec, Weights};
use crate::dry::{best_dry, DrySolution, JunctionNetwork};
use crate::lattice::{
    hausdorff, hausdorff_to_points, optimize, rasterize_cluster, read_field, write_field,
    LabelField, OracleConfig, OracleResult, Stencil, WET,
};
use crate::verify::{
    check_convexity, check_curvature_condition, check_cusp_tangency, check_saturation,
    convergence_sweep, monotonicity_diagnostic, CheckSource, SweepPoint, VerificationReport,
};
use crate::wetting::{build_wetted, WettedCluster};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Everything needed to reproduce a run bit-exactly with the same build.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub instance: String,
    pub overrides: BTreeMap<String, String>,
    pub seed: u64,
    pub out_dir: String,
    pub version: String,
    pub wall_clock_s: f64,
}

impl RunManifest {
    fn new(command: &str, instance: &Path, out_dir: &Path, seed: u64) -> Self {
        RunManifest {
            command: command.into(),
            instance: instance.display().to_string(),
            overrides: BTreeMap::new(),
            seed,
            out_dir: out_dir.display().to_string(),
            version: env!("CARGO_PKG_VERSION").into(),
            wall_clock_s: 0.0,
        }
    }

    fn write(mut self, out_dir: &Path, started: Instant) -> Result<()> {
        self.wall_clock_s = started.elapsed().as_secs_f64();
        std::fs::write(out_dir.join("manifest.json"), serde_json::to_string_pretty(&self)?)?;
        Ok(())
    }
}

/// Serialized dry network artifact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkArtifact {
    pub kind: String,
    pub weights: Vec<f64>,
    pub trace: Vec<crate::cluster::Jump>,
    pub energy: f64,
    pub angle_residual: f64,
    pub network: JunctionNetwork,
}

/// Serialized cluster artifact (dry or wetted; wet interfaces are tagged
/// by their `"G"` side).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterArtifact {
    pub kind: String,
    pub weights: Vec<f64>,
    pub delta: f64,
    pub energy: f64,
    pub trace: Vec<crate::cluster::Jump>,
    pub cluster: ArcCluster,
}

/// Sidecar metadata for the binary field format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldSidecar {
    pub dims: [usize; 2],
    pub cell: f64,
    pub origin: [f64; 2],
    pub domain: String,
    pub wet_label: u8,
    pub delta: f64,
    pub weights: Vec<f64>,
    pub seed: u64,
    pub energy: f64,
    pub wet_area: f64,
}

/// Loads and validates an instance file, mapping JSON problems to
/// line/column diagnostics.
pub fn load_instance(path: &Path) -> Result<InstanceSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInstance(format!("{}: {e}", path.display())))?;
    let spec: InstanceSpec = serde_json::from_str(&text).map_err(|e| {
        Error::InvalidInstance(format!(
            "{}: line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    spec.validate()?;
    Ok(spec)
}

/// Shared knobs taken from the command line.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub delta: Option<f64>,
    pub resolution: usize,
    pub seed: u64,
    pub stencil: Stencil,
    pub max_junctions: Option<usize>,
    pub deltas: Vec<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            delta: None,
            resolution: 256,
            seed: 1,
            stencil: Stencil::Sixteen,
            max_junctions: None,
            deltas: vec![0.04, 0.02, 0.01, 0.005],
        }
    }
}

impl RunOptions {
    fn oracle_config(&self) -> OracleConfig {
        OracleConfig {
            resolution: self.resolution,
            stencil: self.stencil,
            seed: self.seed,
            ..OracleConfig::default()
        }
    }

    fn record(&self, m: &mut RunManifest) {
        if let Some(d) = self.delta {
            m.overrides.insert("delta".into(), format!("{d}"));
        }
        m.overrides.insert("resolution".into(), format!("{}", self.resolution));
        m.overrides
            .insert("stencil".into(), format!("{:?}", self.stencil).to_lowercase());
        if let Some(mj) = self.max_junctions {
            m.overrides.insert("max_junctions".into(), format!("{mj}"));
        }
    }
}

fn effective(spec: &InstanceSpec, opts: &RunOptions) -> InstanceSpec {
    let mut s = spec.clone();
    if let Some(d) = opts.delta {
        s.delta = d;
    }
    s
}

fn dry_inputs(spec: &InstanceSpec) -> Result<(BoundaryTrace, Weights)> {
    if spec.kind()? != crate::cluster::DomainKind::Ball {
        return Err(Error::InvalidInstance(
            "the dry solver handles the ball problem; use the oracle for the plane".into(),
        ));
    }
    Ok((spec.trace_checked()?, spec.weights_checked()?))
}

fn solve_dry_for(spec: &InstanceSpec, opts: &RunOptions) -> Result<DrySolution> {
    let (trace, w) = dry_inputs(spec)?;
    let max_j = opts.max_junctions.unwrap_or(trace.jumps.len().max(1));
    best_dry(&trace, &w, max_j)
}

/// `solve-dry`: network JSON and SVG.
pub fn cmd_solve_dry(instance: &Path, out_dir: &Path, opts: &RunOptions) -> Result<PathBuf> {
    let started = Instant::now();
    let spec = effective(&load_instance(instance)?, opts);
    let sol = solve_dry_for(&spec, opts)?;
    std::fs::create_dir_all(out_dir)?;
    let artifact = NetworkArtifact {
        kind: "network".into(),
        weights: spec.weights.clone(),
        trace: spec.trace.clone().unwrap_or_default(),
        energy: sol.best.energy,
        angle_residual: sol.best.angle_residual,
        network: sol.best.clone(),
    };
    let path = out_dir.join("network.json");
    std::fs::write(&path, serde_json::to_string_pretty(&artifact)?)?;
    let trace = spec.trace_checked()?;
    std::fs::write(out_dir.join("network.svg"), crate::svg::render_network(&sol.best, &trace))?;
    let mut manifest = RunManifest::new("solve-dry", instance, out_dir, opts.seed);
    opts.record(&mut manifest);
    manifest.write(out_dir, started)?;
    Ok(path)
}

/// `wet`: wetted cluster JSON and SVG.
pub fn cmd_wet(instance: &Path, out_dir: &Path, opts: &RunOptions) -> Result<PathBuf> {
    let started = Instant::now();
    let spec = effective(&load_instance(instance)?, opts);
    let (trace, w) = dry_inputs(&spec)?;
    let sol = solve_dry_for(&spec, opts)?;
    let wetted = build_wetted(&sol.best, &trace, &w, spec.delta)?;
    std::fs::create_dir_all(out_dir)?;
    let path = write_cluster_artifact(&wetted, &spec, out_dir)?;
    std::fs::write(out_dir.join("cluster.svg"), crate::svg::render_cluster(&wetted.cluster))?;
    let mut manifest = RunManifest::new("wet", instance, out_dir, opts.seed);
    opts.record(&mut manifest);
    manifest.write(out_dir, started)?;
    Ok(path)
}

fn write_cluster_artifact(
    wetted: &WettedCluster,
    spec: &InstanceSpec,
    out_dir: &Path,
) -> Result<PathBuf> {
    let artifact = ClusterArtifact {
        kind: "cluster".into(),
        weights: spec.weights.clone(),
        delta: spec.delta,
        energy: wetted.predicted_energy,
        trace: spec.trace.clone().unwrap_or_default(),
        cluster: wetted.cluster.clone(),
    };
    let path = out_dir.join("cluster.json");
    std::fs::write(&path, serde_json::to_string_pretty(&artifact)?)?;
    Ok(path)
}

/// `oracle`: optimized field file, sidecar, and energy trace CSV.
pub fn cmd_oracle(instance: &Path, out_dir: &Path, opts: &RunOptions) -> Result<PathBuf> {
    let started = Instant::now();
    let spec = effective(&load_instance(instance)?, opts);
    let cfg = opts.oracle_config();
    let result = optimize(&spec, &cfg)?;
    std::fs::create_dir_all(out_dir)?;
    let path = write_field_artifact(&result, &spec, &cfg, out_dir)?;
    let mut manifest = RunManifest::new("oracle", instance, out_dir, opts.seed);
    opts.record(&mut manifest);
    manifest.write(out_dir, started)?;
    Ok(path)
}

fn write_field_artifact(
    result: &OracleResult,
    spec: &InstanceSpec,
    cfg: &OracleConfig,
    out_dir: &Path,
) -> Result<PathBuf> {
    let path = out_dir.join("field.lf");
    std::fs::write(&path, write_field(&result.field))?;
    let sidecar = FieldSidecar {
        dims: [result.field.nx, result.field.ny],
        cell: result.field.cell,
        origin: [result.field.origin.x, result.field.origin.y],
        domain: spec.domain.clone(),
        wet_label: WET,
        delta: spec.delta,
        weights: spec.weights.clone(),
        seed: cfg.seed,
        energy: result.energy,
        wet_area: result.field.wet_area(),
    };
    std::fs::write(out_dir.join("field.json"), serde_json::to_string_pretty(&sidecar)?)?;
    let mut csv = String::from("sweep,temperature,energy,wet_area\n");
    for row in &result.trace {
        csv.push_str(&format!(
            "{},{:.9e},{:.12},{:.12}\n",
            row.sweep, row.temperature, row.energy, row.wet_area
        ));
    }
    std::fs::write(out_dir.join("trace.csv"), csv)?;
    Ok(path)
}

/// `verify`: structure-check report for a cluster or field artifact.
/// Returns the report; the caller maps failures to a nonzero exit.
pub fn cmd_verify(
    artifact: &Path,
    instance: &Path,
    out_dir: &Path,
    opts: &RunOptions,
) -> Result<VerificationReport> {
    let started = Instant::now();
    let spec = effective(&load_instance(instance)?, opts);
    let w = spec.weights_checked()?;
    let mut report = VerificationReport::default();
    match detect_artifact(artifact)? {
        ArtifactKind::Cluster(acluster) => {
            let c = acluster.cluster;
            report.push(check_curvature_condition(&CheckSource::Cluster(&c), &w));
            report.push(check_cusp_tangency(&c));
            report.push(check_convexity(&CheckSource::Cluster(&c), w.n_chambers()));
            // A geometrically broken cluster is a failing check, not an
            // abort, so the report still names what failed.
            let (status, measured, note) = match validate_cluster(&c, &spec) {
                Ok(adm) => (
                    if adm.all_ok() {
                        crate::verify::CheckStatus::Pass
                    } else {
                        crate::verify::CheckStatus::Fail
                    },
                    vec![adm.wet_area],
                    format!("{}; {}", adm.constraint_detail, adm.containment_detail),
                ),
                Err(e) => (crate::verify::CheckStatus::Fail, vec![], format!("{e}")),
            };
            report.push(crate::verify::CheckEntry {
                name: "admissibility".into(),
                criterion: "wet area within budget; boundary labels and segment containment hold"
                    .into(),
                status,
                measured,
                tolerance: 1e-10,
                note,
                evidence: None,
            });
        }
        ArtifactKind::Field(f) => {
            report.push(check_curvature_condition(&CheckSource::Field(&f), &w));
            report.push(check_convexity(&CheckSource::Field(&f), w.n_chambers()));
            let expect_wetting = match spec.kind()? {
                crate::cluster::DomainKind::Ball => {
                    let sol = solve_dry_for(&spec, opts)?;
                    !sol.best.topology.junctions.is_empty()
                }
                crate::cluster::DomainKind::Plane => true,
            };
            report.push(check_saturation(&f, spec.delta, expect_wetting));
            let (_, entry) =
                monotonicity_diagnostic(&f, &w, opts.stencil, 20, 0.3_f64.min(0.9));
            report.push(entry);
        }
        ArtifactKind::Network(_) => {
            return Err(Error::InvalidInstance(
                "verify expects a cluster or field artifact".into(),
            ));
        }
    }
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("report.json"), report.to_json())?;
    std::fs::write(out_dir.join("report.txt"), report.to_text())?;
    let mut manifest = RunManifest::new("verify", instance, out_dir, opts.seed);
    opts.record(&mut manifest);
    manifest.write(out_dir, started)?;
    Ok(report)
}

/// One row of the sweep summary (columns frozen).
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub delta: f64,
    pub energy_oracle: f64,
    pub energy_predicted: f64,
    pub wet_area: f64,
    pub hausdorff_chambers: f64,
    pub hausdorff_g_sigma: f64,
    pub seed: u64,
}

/// `sweep`: one oracle run and one wetted prediction per delta, compared
/// against the dry minimizer; per-delta directories plus a summary CSV and
/// a convergence report.
pub fn cmd_sweep(instance: &Path, out_dir: &Path, opts: &RunOptions) -> Result<Vec<SweepRow>> {
    let started = Instant::now();
    let spec = load_instance(instance)?;
    let (trace, w) = dry_inputs(&spec)?;
    let dry = solve_dry_for(&spec, opts)?.best;
    let dry_field = rasterize_cluster(&dry.to_cluster(&trace), opts.resolution);
    let sigma = dry.triple_junctions();
    std::fs::create_dir_all(out_dir)?;

    // Fan the independent delta runs out over threads.
    let rows: Vec<Result<SweepRow>> = std::thread::scope(|scope| {
        let handles: Vec<_> = opts
            .deltas
            .iter()
            .map(|&delta| {
                let spec = spec.clone();
                let trace = trace.clone();
                let w = w.clone();
                let dry = dry.clone();
                let dry_field = dry_field.clone();
                let sigma = sigma.clone();
                let opts = opts.clone();
                let dir = out_dir.join(format!("delta_{delta:.4}"));
                scope.spawn(move || -> Result<SweepRow> {
                    sweep_point(&spec, &trace, &w, &dry, &dry_field, &sigma, delta, &opts, &dir)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut table = Vec::new();
    for r in rows {
        table.push(r?);
    }
    table.sort_by(|a, b| b.delta.partial_cmp(&a.delta).unwrap());

    let mut csv = String::from(
        "delta,energy_oracle,energy_predicted,wet_area,hausdorff_chambers,hausdorff_G_sigma,seed\n",
    );
    for r in &table {
        csv.push_str(&format!(
            "{},{:.12},{:.12},{:.12},{:.9},{:.9},{}\n",
            r.delta,
            r.energy_oracle,
            r.energy_predicted,
            r.wet_area,
            r.hausdorff_chambers,
            r.hausdorff_g_sigma,
            r.seed
        ));
    }
    std::fs::write(out_dir.join("summary.csv"), csv)?;

    let points: Vec<SweepPoint> = table
        .iter()
        .map(|r| SweepPoint {
            delta: r.delta,
            chamber_hausdorff: r.hausdorff_chambers,
            g_sigma_hausdorff: r.hausdorff_g_sigma,
            energy: r.energy_oracle,
        })
        .collect();
    let mut report = VerificationReport::default();
    report.push(convergence_sweep(&points, 1.0 / opts.resolution as f64));
    std::fs::write(out_dir.join("report.json"), report.to_json())?;
    std::fs::write(out_dir.join("report.txt"), report.to_text())?;
    let mut manifest = RunManifest::new("sweep", instance, out_dir, opts.seed);
    opts.record(&mut manifest);
    manifest.overrides.insert(
        "deltas".into(),
        opts.deltas.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","),
    );
    manifest.write(out_dir, started)?;
    Ok(table)
}

#[allow(clippy::too_many_arguments)]
fn sweep_point(
    spec: &InstanceSpec,
    trace: &BoundaryTrace,
    w: &Weights,
    dry: &JunctionNetwork,
    dry_field: &LabelField,
    sigma: &[crate::geom::Point2],
    delta: f64,
    opts: &RunOptions,
    dir: &Path,
) -> Result<SweepRow> {
    let mut spec_d = spec.clone();
    spec_d.delta = delta;
    let cfg = opts.oracle_config();
    let oracle = optimize(&spec_d, &cfg)?;
    std::fs::create_dir_all(dir)?;
    write_field_artifact(&oracle, &spec_d, &cfg, dir)?;
    let wetted = build_wetted(dry, trace, w, delta)?;
    write_cluster_artifact(&wetted, &spec_d, dir)?;
    // Worst-chamber symmetric Hausdorff distance to the dry minimizer.
    let mut chambers = 0.0f64;
    for l in 1..=w.n_chambers() as u8 {
        if let Some(h) = hausdorff(&oracle.field, dry_field, l) {
            chambers = chambers.max(h);
        }
    }
    let g_sigma = hausdorff_to_points(&oracle.field, WET, sigma).unwrap_or(f64::INFINITY);
    Ok(SweepRow {
        delta,
        energy_oracle: oracle.energy,
        energy_predicted: wetted.predicted_energy,
        wet_area: oracle.field.wet_area(),
        hausdorff_chambers: chambers,
        hausdorff_g_sigma: g_sigma,
        seed: cfg.seed,
    })
}

/// Any serialized artifact this tool produces.
pub enum ArtifactKind {
    Cluster(Box<ClusterArtifact>),
    Network(Box<NetworkArtifact>),
    Field(LabelField),
}

/// Detects an artifact by its content: the `LF1` magic for fields, the
/// `kind` field for JSON documents.
pub fn detect_artifact(path: &Path) -> Result<ArtifactKind> {
    let data = std::fs::read(path)?;
    if data.starts_with(b"LF1\n") {
        return Ok(ArtifactKind::Field(read_field(&data)?));
    }
    let text = std::str::from_utf8(&data)
        .map_err(|_| Error::InvalidInstance(format!("{}: not a known artifact", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(text)?;
    match value.get("kind").and_then(|k| k.as_str()) {
        Some("cluster") => Ok(ArtifactKind::Cluster(Box::new(serde_json::from_str(text)?))),
        Some("network") => Ok(ArtifactKind::Network(Box::new(serde_json::from_str(text)?))),
        _ if value.get("domain").is_some() => Err(Error::InvalidInstance(
            "this is an instance file; pass it as --instance".into(),
        )),
        _ => Err(Error::InvalidInstance(format!(
            "{}: unrecognized artifact",
            path.display()
        ))),
    }
}

/// `render`: SVG from any serialized artifact (field, cluster, network, or
/// instance file).
pub fn cmd_render(artifact: &Path, out: &Path) -> Result<PathBuf> {
    let svg = match detect_artifact(artifact) {
        Ok(ArtifactKind::Field(f)) => crate::svg::render_field(&f),
        Ok(ArtifactKind::Cluster(c)) => crate::svg::render_cluster(&c.cluster),
        Ok(ArtifactKind::Network(n)) => {
            let trace = BoundaryTrace::new(n.trace.clone());
            crate::svg::render_network(&n.network, &trace)
        }
        Err(_) => {
            // Fall back to instance rendering.
            let spec = load_instance(artifact)?;
            crate::svg::render_instance(&spec.trace_checked()?)
        }
    };
    let target = if out.extension().is_some() {
        out.to_path_buf()
    } else {
        std::fs::create_dir_all(out)?;
        let stem = artifact.file_stem().unwrap_or_default().to_string_lossy();
        out.join(format!("{stem}.svg"))
    };
    std::fs::write(&target, svg)?;
    Ok(target)
}

/// Exit code mapping shared by the binary: malformed input 2, infeasible 3,
/// anything else 1.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::InvalidInstance(_) | Error::Json(_) => 2,
        Error::Infeasible(_) => 3,
        _ => 1,
    }
}
