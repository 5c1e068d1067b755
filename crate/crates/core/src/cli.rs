//! File-based commands behind the `monoped` binary.
//!
//! Every command writes only under its output directory and produces the
//! same bytes for the same configuration and seed.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::codesign::{self, CaseKind, CaseResult, CaseSpec, CodesignVariables, Evaluation};
use crate::config::{self, RunConfig};
use crate::dynamics::{self, JumpResult};
use crate::error::{Error, Result};
use crate::export::{self, DesignManifest, Provenance};
use crate::gearbox::GearboxKind;
use crate::mass_models::{self, ActuatorDesign};
use crate::stage1::ActuatorCatalog;

pub const CATALOG_JSON: &str = "catalog.json";
pub const CATALOG_CSV: &str = "catalog.csv";
pub const CATALOG_HASH: &str = "catalog.sha256";
pub const BEST_POINT_JSON: &str = "best_point.json";
pub const HISTORY_CSV: &str = "history.csv";
pub const BEST_TRAJECTORY_CSV: &str = "best_trajectory.csv";
pub const TRAJECTORY_CSV: &str = "trajectory.csv";
pub const MANIFEST_JSON: &str = "manifest.json";
pub const SUMMARY_JSON: &str = "summary.json";
pub const MASS_REPORT_CSV: &str = "mass_report.csv";
pub const LINK_MASS_CSV: &str = "link_mass.csv";

/// Gearbox kinds selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindSelection {
    Isspg,
    Esspg,
    Both,
}

impl KindSelection {
    pub fn kinds(self) -> Vec<GearboxKind> {
        match self {
            KindSelection::Isspg => vec![GearboxKind::Isspg],
            KindSelection::Esspg => vec![GearboxKind::Esspg],
            KindSelection::Both => GearboxKind::ALL.to_vec(),
        }
    }
}

/// Runs `f` on a pool of `jobs` threads, or on the global pool when `None`.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(Error::invalid("--jobs", "must be >= 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::invalid("--jobs", e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::json(path, e))?;
    write_with(path, |w| writeln!(w, "{text}"))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    config::from_str_with_path(&text, path)
}

// ---------------------------------------------------------------- stage1

#[derive(Debug, Clone)]
pub struct Stage1Outcome {
    pub catalog: ActuatorCatalog,
    /// True when an up-to-date catalog was found and reused.
    pub cached: bool,
    pub summary: String,
}

fn catalog_summary(catalog: &ActuatorCatalog) -> String {
    let mut s = String::new();
    let filled = catalog.bins.iter().filter(|b| b.best.is_some()).count();
    let _ = writeln!(
        s,
        "{filled} of {} ratio bins have a feasible actuator",
        catalog.bins.len()
    );
    for kind in &catalog.kinds {
        match catalog.feasibility_cutoff(*kind) {
            Some(c) => {
                let _ = writeln!(s, "{kind} feasible up to ratio {c}");
            }
            None => {
                let _ = writeln!(s, "{kind} has no feasible bin");
            }
        }
    }
    s
}

fn write_catalog(catalog: &ActuatorCatalog, hash: &str, out: &Path) -> Result<()> {
    ensure_dir(out)?;
    let json = out.join(CATALOG_JSON);
    write_with(&json, |w| {
        catalog.write_json(&mut *w).map_err(std::io::Error::from)?;
        writeln!(w)
    })?;
    write_with(&out.join(CATALOG_CSV), |w| catalog.write_csv(w))?;
    write_with(&out.join(CATALOG_HASH), |w| writeln!(w, "{hash}"))
}

/// Builds the actuator catalog and writes it as JSON and CSV.
pub fn cmd_stage1(config: &RunConfig, kinds: KindSelection, out: &Path) -> Result<Stage1Outcome> {
    config.validate()?;
    let kinds = kinds.kinds();
    let catalog = config.build_catalog(&kinds);
    write_catalog(&catalog, &config.catalog_hash(&kinds), out)?;
    let summary = catalog_summary(&catalog);
    Ok(Stage1Outcome {
        catalog,
        cached: false,
        summary,
    })
}

/// Reuses `out/catalog.json` when its recorded input hash matches, otherwise rebuilds.
pub fn load_or_build_catalog(config: &RunConfig, out: &Path) -> Result<Stage1Outcome> {
    let kinds = GearboxKind::ALL;
    let hash = config.catalog_hash(&kinds);
    let recorded = fs::read_to_string(out.join(CATALOG_HASH)).ok();
    if recorded.as_deref().map(str::trim) == Some(hash.as_str()) {
        if let Ok(catalog) = read_json::<ActuatorCatalog>(&out.join(CATALOG_JSON)) {
            let summary = catalog_summary(&catalog);
            return Ok(Stage1Outcome {
                catalog,
                cached: true,
                summary,
            });
        }
    }
    cmd_stage1(config, KindSelection::Both, out)
}

// ---------------------------------------------------------------- codesign

/// The `best_point.json` artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BestPoint {
    pub case: CaseSpec,
    pub point: CodesignVariables,
    pub evaluation: Evaluation,
    pub hip: ActuatorDesign,
    pub knee: ActuatorDesign,
    pub generations: usize,
    pub evaluations: usize,
    pub provenance: Provenance,
}

pub fn read_best_point(path: &Path) -> Result<BestPoint> {
    read_json(path)
}

#[derive(Debug, Clone)]
pub struct CodesignOutcome {
    pub result: CaseResult,
    pub best_point: BestPoint,
    pub summary: String,
}

/// Case spec for a command-line `--case` choice; `custom` and the configured
/// kind use the mask from the config file.
pub fn case_for(config: &RunConfig, kind: Option<CaseKind>) -> CaseSpec {
    match kind {
        None => config.case.clone(),
        Some(k) if k == config.case.kind || k == CaseKind::Custom => CaseSpec {
            kind: k,
            ..config.case.clone()
        },
        Some(k) => CaseSpec {
            values: config.case.values,
            ..CaseSpec::preset(k)
        },
    }
}

fn run_codesign(config: &RunConfig, catalog: &ActuatorCatalog, case: &CaseSpec, out: &Path) -> Result<CodesignOutcome> {
    let p = config.problem(catalog);
    let result = codesign::optimize_case(case, &p, &config.optimizer, config.seed)?;
    let decoded = codesign::decode(&result.best, &p)?;
    let best_point = BestPoint {
        case: case.clone(),
        point: result.best,
        evaluation: result.evaluation.clone(),
        hip: decoded.hip,
        knee: decoded.knee,
        generations: result.history.len(),
        evaluations: result.evaluations,
        provenance: Provenance::new(config.hash(), config.seed),
    };
    ensure_dir(out)?;
    write_json(&out.join(BEST_POINT_JSON), &best_point)?;
    write_with(&out.join(HISTORY_CSV), |w| {
        codesign::write_history_csv(&result.history, w)
    })?;
    if let Some(jump) = &result.jump {
        write_with(&out.join(BEST_TRAJECTORY_CSV), |w| jump.write_trace_csv(w))?;
    }
    let e = &result.evaluation;
    let y = &result.best;
    let summary = format!(
        "case {}: h = {:.4} m, E = {:.4} J, cost = {:.4}\n  l1 = {:.4}, l2 = {:.4}, g_k = {:.3}, g_h = {:.3}, K = {:.3}, C = {:.3}, T = {:.3}\n",
        case.kind.as_str(),
        e.apex_height,
        e.energy,
        e.cost,
        y.l1,
        y.l2,
        y.g_k,
        y.g_h,
        y.k,
        y.c,
        y.t
    );
    Ok(CodesignOutcome {
        result,
        best_point,
        summary,
    })
}

/// Optimizes one case (building or reusing the catalog) and writes the best
/// point, the generation history and the best trajectory.
pub fn cmd_codesign(config: &RunConfig, case: Option<CaseKind>, out: &Path) -> Result<CodesignOutcome> {
    config.validate()?;
    let stage1 = load_or_build_catalog(config, out)?;
    run_codesign(config, &stage1.catalog, &case_for(config, case), out)
}

// ---------------------------------------------------------------- simulate

#[derive(Debug, Clone)]
pub struct SimulateOutcome {
    pub point: CodesignVariables,
    pub jump: JumpResult,
    pub summary: String,
}

/// Simulates one point and writes its trajectory CSV.
pub fn cmd_simulate(config: &RunConfig, point: &CodesignVariables, out: &Path) -> Result<SimulateOutcome> {
    config.validate()?;
    config.codesign_bounds.check(point)?;
    let stage1 = load_or_build_catalog(config, out)?;
    let decoded = codesign::decode(point, &config.problem(&stage1.catalog))?;
    let jump = dynamics::rollout(&decoded.model, &decoded.params, &config.sim)?;
    ensure_dir(out)?;
    write_with(&out.join(TRAJECTORY_CSV), |w| jump.write_trace_csv(w))?;
    let summary = format!(
        "h = {:.4} m, E = {:.4} J, termination: {}\n",
        jump.apex_height,
        jump.energy,
        jump.termination.as_str()
    );
    Ok(SimulateOutcome {
        point: *point,
        jump,
        summary,
    })
}

/// Parses `l1,l2,g_k,g_h,K,C,T`.
pub fn parse_point(text: &str) -> Result<CodesignVariables> {
    let values: Vec<&str> = text.split(',').map(str::trim).collect();
    if values.len() != codesign::DIM {
        return Err(Error::invalid(
            "--point",
            format!(
                "expected 7 comma-separated values (l1,l2,g_k,g_h,K,C,T), got {}",
                values.len()
            ),
        ));
    }
    let mut a = [0.0; codesign::DIM];
    for (i, v) in values.iter().enumerate() {
        a[i] = v
            .parse()
            .map_err(|_| Error::invalid(codesign::VARIABLE_NAMES[i], format!("not a number: {v:?}")))?;
    }
    Ok(CodesignVariables::from_array(a))
}

// ---------------------------------------------------------------- export

#[derive(Debug, Clone)]
pub struct ExportOutcome {
    pub manifest: DesignManifest,
    pub path: PathBuf,
}

/// Builds the design manifest from a `best_point.json` file. The actuators
/// recorded in the file must match what the point decodes to.
pub fn cmd_export(config: &RunConfig, best_point: &Path, out: &Path) -> Result<ExportOutcome> {
    config.validate()?;
    let bp = read_best_point(best_point)?;
    let stage1 = load_or_build_catalog(config, out)?;
    let decoded = codesign::decode(&bp.point, &config.problem(&stage1.catalog))?;
    let mut mismatched = Vec::new();
    for (name, recorded, fresh) in [("hip", &bp.hip, &decoded.hip), ("knee", &bp.knee, &decoded.knee)] {
        if recorded.gear_train != fresh.gear_train || recorded.kind != fresh.kind {
            mismatched.push(format!("{name}.gear_train"));
        }
        if recorded.mass != fresh.mass {
            mismatched.push(format!(
                "{name}.mass (given {}, expected {})",
                recorded.mass, fresh.mass
            ));
        }
        if recorded.peak_torque != fresh.peak_torque {
            mismatched.push(format!("{name}.peak_torque"));
        }
    }
    if !mismatched.is_empty() {
        return Err(Error::Inconsistent(mismatched));
    }
    let manifest = export::build_manifest(
        &decoded.model,
        &decoded.params,
        &bp.hip,
        &bp.knee,
        &config.link,
        &config.materials,
        bp.provenance.clone(),
    )?;
    ensure_dir(out)?;
    let path = out.join(MANIFEST_JSON);
    export::write_manifest(&manifest, &path)?;
    Ok(ExportOutcome { manifest, path })
}

// ---------------------------------------------------------------- pipeline

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct JumpSummary {
    pub apex_height_m: f64,
    pub energy_J: f64,
    pub cost: f64,
}

impl From<&Evaluation> for JumpSummary {
    fn from(e: &Evaluation) -> Self {
        JumpSummary {
            apex_height_m: e.apex_height,
            energy_J: e.energy,
            cost: e.cost,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub case: CaseKind,
    pub nominal: JumpSummary,
    pub optimized: JumpSummary,
    pub optimized_point: CodesignVariables,
    /// Differs between a first run and a rerun, so it stays out of the file.
    #[serde(skip)]
    pub catalog_reused: bool,
    pub provenance: Provenance,
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub summary: RunSummary,
    pub text: String,
}

/// Stage 1, co-design of the configured case, and export, in one output directory.
pub fn cmd_pipeline(config: &RunConfig, case: Option<CaseKind>, out: &Path) -> Result<PipelineOutcome> {
    config.validate()?;
    let stage1 = load_or_build_catalog(config, out)?;
    let p = config.problem(&stage1.catalog);
    let nominal = codesign::evaluate(&CodesignVariables::nominal(), &p);
    let cd = run_codesign(config, &stage1.catalog, &case_for(config, case), out)?;
    cmd_export(config, &out.join(BEST_POINT_JSON), out)?;
    let summary = RunSummary {
        case: cd.best_point.case.kind,
        nominal: JumpSummary::from(&nominal),
        optimized: JumpSummary::from(&cd.result.evaluation),
        optimized_point: cd.result.best,
        catalog_reused: stage1.cached,
        provenance: Provenance::new(config.hash(), config.seed),
    };
    write_json(&out.join(SUMMARY_JSON), &summary)?;
    let text = format!(
        "{}{}nominal:   h = {:.4} m, E = {:.4} J\noptimized: h = {:.4} m, E = {:.4} J\n",
        if stage1.cached {
            "stage 1: reused cached catalog\n"
        } else {
            ""
        },
        cd.summary,
        summary.nominal.apex_height_m,
        summary.nominal.energy_J,
        summary.optimized.apex_height_m,
        summary.optimized.energy_J,
    );
    Ok(PipelineOutcome { summary, text })
}

// ---------------------------------------------------------------- mass report

/// Per-bin component mass breakdown of the catalog optimum, plus the link mass table.
pub fn cmd_mass_report(config: &RunConfig, kinds: KindSelection, out: &Path) -> Result<PathBuf> {
    config.validate()?;
    let catalog = config.build_catalog(&kinds.kinds());
    ensure_dir(out)?;
    let mut rows = Vec::new();
    for bin in &catalog.bins {
        let Some(d) = &bin.best else { continue };
        let b = mass_models::actuator_mass(&d.gear_train, d.kind, &d.motor, &config.materials)?;
        rows.push((bin.ratio_lo, d.clone(), b));
    }
    let path = out.join(MASS_REPORT_CSV);
    write_with(&path, |w| {
        write!(w, "ratio_lo,kind,Ns,Np,Nr,module_mm,n_p")?;
        for (name, _) in mass_models::MassBreakdown::default().components() {
            write!(w, ",{name}_kg")?;
        }
        writeln!(w, ",total_kg")?;
        for (lo, d, b) in &rows {
            let gt = &d.gear_train;
            write!(
                w,
                "{lo},{},{},{},{},{},{}",
                d.kind, gt.sun_teeth, gt.planet_teeth, gt.ring_teeth, gt.module_mm, gt.planet_count
            )?;
            for (_, v) in b.components() {
                write!(w, ",{v}")?;
            }
            writeln!(w, ",{}", b.total)?;
        }
        Ok(())
    })?;
    let b = &config.codesign_bounds;
    write_with(&out.join(LINK_MASS_CSV), |w| {
        writeln!(w, "length_m,mass_kg")?;
        for i in 0..=20 {
            let l = b.l_min + (b.l_max - b.l_min) * f64::from(i) / 20.0;
            let m = mass_models::link_mass(l, &config.link, &config.materials).map_err(std::io::Error::other)?;
            writeln!(w, "{l},{m}")?;
        }
        Ok(())
    })?;
    Ok(path)
}
