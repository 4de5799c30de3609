use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind};
use super::svg::{Plot, Series};
use super::CliError;
use crate::approx::{t1_witness_for_sphere, ApproxError, IsotopyMargin};
use crate::ensemble::{sample, FieldKind, FieldSpec, WaveSample};
use crate::field::Window;
use crate::nodal::export::write_components;
use crate::nodal::sphere::{default_sphere_spacing, extract_components_sphere, rasterize_sphere_sample};
use crate::nodal::testfields::TestField;
use crate::nodal::{
    classify, extract_components, rasterize, rasterize_sample, NodalComponent, NodalError, DEFAULT_SPACING,
};
use crate::rng::trial_seed;
use crate::specfun::verify::{run_all, IdentityCheck, SpecfunCheckConfig};
use crate::stats::{
    bootstrap_median_order, concentration_experiment, ns_scaling, scaling_experiment, ConcentrationReport, ScalingFit,
    ScalingRun, StatsError, CONCENTRATION_LABEL, SCALING_LABEL,
};

pub const SPECFUN_REPORT_SCHEMA: &str = "monowave.specfun_report/1";
pub const SCALING_SUMMARY_SCHEMA: &str = "monowave.scaling_summary/1";
pub const CONCENTRATION_SUMMARY_SCHEMA: &str = "monowave.concentration_summary/1";
pub const WITNESS_REPORT_SCHEMA: &str = "monowave.witness_report/1";

/// Seed label of the bootstrap comparing the smallest and largest windows.
pub const BOOTSTRAP_LABEL: u64 = 0xB0_07;

/// What a command produced. A command may write its outputs and still fail
/// (a tolerance breach); the failure is then returned after the manifest is
/// written.
pub struct Outcome {
    pub files: Vec<String>,
    pub seed_rule: String,
    pub derived_seeds: Vec<Vec<u64>>,
    pub failure: Option<CliError>,
}

/// Output directory that remembers what was written.
pub struct Outputs {
    dir: PathBuf,
    pub files: Vec<String>,
}

impl Outputs {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut body = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        body.push('\n');
        self.write(name, &body)
    }

    fn done(self, seed_rule: &str, derived_seeds: Vec<Vec<u64>>, failure: Option<CliError>) -> Outcome {
        Outcome { files: self.files, seed_rule: seed_rule.into(), derived_seeds, failure }
    }
}

fn nodal_err(e: NodalError) -> CliError {
    match e {
        NodalError::Resolution(_) | NodalError::Dimension(_) | NodalError::Ensemble(_) => {
            CliError::Validation(e.to_string())
        }
        other => CliError::Tolerance(other.to_string()),
    }
}

fn stats_err(e: StatsError) -> CliError {
    match e {
        StatsError::Nodal(n) => nodal_err(n),
        other => CliError::Validation(other.to_string()),
    }
}

enum Source {
    Test(TestField),
    Sample(WaveSample),
}

fn source(cfg: &ExperimentConfig) -> Result<Source, CliError> {
    if let Some(t) = cfg.test_field {
        return Ok(Source::Test(t));
    }
    if let Some(s) = &cfg.sample {
        return Ok(Source::Sample(s.clone()));
    }
    let spec = cfg.spec.as_ref().ok_or_else(no_source)?;
    Ok(Source::Sample(sample(spec).map_err(|e| CliError::Validation(e.to_string()))?))
}

fn no_source() -> CliError {
    CliError::Validation("no field source: give an ensemble spec, a sample or a test field".into())
}

fn sphere_ell(kind: &FieldKind) -> Option<u32> {
    match kind {
        FieldKind::SphereEnsemble { ell } => Some(*ell as u32),
        _ => None,
    }
}

fn spacing_for(cfg: &ExperimentConfig, spec: Option<&FieldSpec>) -> f64 {
    cfg.spacing.unwrap_or_else(|| match spec.and_then(|s| sphere_ell(&s.kind)) {
        Some(ell) => default_sphere_spacing(ell),
        None => DEFAULT_SPACING,
    })
}

fn single_window(cfg: &ExperimentConfig, dim: usize, fallback: Option<Window>) -> Result<Window, CliError> {
    match &cfg.window {
        Some(sides) if sides.len() == dim => Ok(cfg.window_for(sides)),
        Some(sides) if sides.len() == 1 => Ok(cfg.cube_window(sides[0], dim)),
        Some(sides) => Err(CliError::Validation(format!("window has {} sides, field lives in R^{dim}", sides.len()))),
        None => fallback.ok_or_else(|| CliError::Validation("a window is required (--window a,b[,c])".into())),
    }
}

fn csv_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        String::new()
    }
}

// ---------------------------------------------------------------- specfun

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecfunReport {
    pub schema: String,
    pub config: SpecfunCheckConfig,
    pub passed: bool,
    pub checks: Vec<IdentityCheck>,
}

pub fn cmd_specfun_check(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, CliError> {
    let checks = run_all(&cfg.specfun).map_err(|e| CliError::Validation(e.to_string()))?;
    let passed = checks.iter().all(|c| c.passed);
    for c in &checks {
        println!(
            "{} {:<22} max_residual={:.3e} tolerance={:.1e} samples={}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.max_residual,
            c.tolerance,
            c.samples
        );
    }
    let mut o = Outputs::create(out)?;
    o.write_json(
        "specfun_report.json",
        &SpecfunReport { schema: SPECFUN_REPORT_SCHEMA.into(), config: cfg.specfun.clone(), passed, checks: checks.clone() },
    )?;
    let failure = checks.iter().find(|c| !c.passed).map(|c| {
        CliError::Tolerance(format!(
            "identity {} breached: max residual {:.3e} > {:.1e}",
            c.name, c.max_residual, c.tolerance
        ))
    });
    Ok(o.done("single seed (specfun.seed) for random evaluation points", Vec::new(), failure))
}

// ---------------------------------------------------------------- sample

pub fn cmd_sample(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, CliError> {
    let s = match source(cfg)? {
        Source::Sample(s) => s,
        Source::Test(_) => return Err(CliError::Validation("sample needs an ensemble spec, not a test field".into())),
    };
    let mut o = Outputs::create(out)?;
    o.write("sample.json", &(s.to_json() + "\n"))?;
    if cfg.grid_dump {
        let spacing = spacing_for(cfg, Some(&s.spec));
        let mut body = String::new();
        if sphere_ell(&s.spec.kind).is_some() {
            let g = rasterize_sphere_sample(&s, spacing).map_err(nodal_err)?;
            body.push_str("x,y,z,value\n");
            for (v, f) in g.mesh.vertices.iter().zip(&g.values) {
                let _ = writeln!(body, "{},{},{},{}", v[0], v[1], v[2], f);
            }
        } else {
            let w = single_window(cfg, s.dim(), None)?;
            let g = rasterize_sample(&s, &w, spacing).map_err(nodal_err)?;
            body.push_str(if g.dim == 2 { "x,y,value\n" } else { "x,y,z,value\n" });
            let (nx, ny, nz) = (g.shape[0], g.shape[1], if g.dim == 3 { g.shape[2] } else { 1 });
            for k in 0..nz {
                for j in 0..ny {
                    for i in 0..nx {
                        let idx: Vec<usize> = if g.dim == 2 { vec![i, j] } else { vec![i, j, k] };
                        let p = g.point(&idx);
                        let coords: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                        let _ = writeln!(body, "{},{}", coords.join(","), g.values[g.index(i, j, k)]);
                    }
                }
            }
        }
        o.write("grid.csv", &body)?;
    }
    Ok(o.done("the sample is drawn from spec.seed", vec![vec![s.spec.seed]], None))
}

// ---------------------------------------------------------------- nodal

fn components_of(cfg: &ExperimentConfig) -> Result<(Vec<NodalComponent>, Option<FieldSpec>, Option<Window>, f64), CliError> {
    match source(cfg)? {
        Source::Test(tf) => {
            let w = single_window(cfg, tf.dim(), Some(tf.window()))?;
            let h = spacing_for(cfg, None);
            let g = rasterize(&tf, &w, h).map_err(nodal_err)?;
            Ok((extract_components(&g).map_err(nodal_err)?, None, Some(w), h))
        }
        Source::Sample(s) => {
            let h = spacing_for(cfg, Some(&s.spec));
            if sphere_ell(&s.spec.kind).is_some() {
                let g = rasterize_sphere_sample(&s, h).map_err(nodal_err)?;
                Ok((extract_components_sphere(&g), Some(s.spec.clone()), None, h))
            } else {
                let w = single_window(cfg, s.dim(), None)?;
                let g = rasterize_sample(&s, &w, h).map_err(nodal_err)?;
                Ok((extract_components(&g).map_err(nodal_err)?, Some(s.spec.clone()), Some(w), h))
            }
        }
    }
}

pub fn cmd_nodal(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, CliError> {
    let (comps, spec, window, spacing) = components_of(cfg)?;
    let mut o = Outputs::create(out)?;
    let written = write_components(out, "nodal", &comps, spec.as_ref(), window.as_ref(), spacing)
        .map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    o.files.extend(written.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()));
    let mut labels: Vec<String> = comps.iter().filter_map(|c| classify(c).ok()).map(|t| t.label()).collect();
    labels.sort();
    let boundary = comps.iter().filter(|c| c.touches_boundary).count();
    println!("interior={} boundary={} types=[{}]", labels.len(), boundary, labels.join(","));
    let seeds = spec.map(|s| vec![vec![s.seed]]).unwrap_or_default();
    Ok(o.done("the sample is drawn from spec.seed", seeds, None))
}

// ---------------------------------------------------------------- experiment

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingSummary {
    pub schema: String,
    pub spec: Option<FieldSpec>,
    pub test_field: Option<TestField>,
    pub windows: Vec<f64>,
    pub trials: usize,
    pub spacing: f64,
    pub fit: Option<ScalingFit>,
    pub fit_error: Option<String>,
    /// ĉ from the two largest windows separately, and their relative difference.
    pub c_hat_largest: Option<(f64, f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationSummary {
    pub schema: String,
    pub spec: FieldSpec,
    pub windows: Vec<f64>,
    pub trials: usize,
    pub spacing: f64,
    pub report: ConcentrationReport,
    /// Fraction of bootstrap resamples with median D at the largest window
    /// ≤ median D at the smallest one.
    pub bootstrap_fraction: Option<f64>,
    pub bootstrap_resamples: usize,
}

fn seeds_for(seed: u64, label: u64, windows: usize, trials: usize) -> Vec<Vec<u64>> {
    (0..windows).map(|w| (0..trials as u64).map(|t| trial_seed(seed, label + w as u64, t)).collect()).collect()
}

pub fn cmd_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, CliError> {
    let kind = cfg.experiment.ok_or_else(|| CliError::Validation("experiment kind (scaling|concentration) is required".into()))?;
    if cfg.windows.is_empty() {
        return Err(CliError::Validation("the window schedule is empty".into()));
    }
    match kind {
        ExperimentKind::Scaling => scaling(cfg, out),
        ExperimentKind::Concentration => concentration(cfg, out),
    }
}

fn per_window_c_hat(runs: &[ScalingRun], volume: f64) -> f64 {
    let cs: Vec<f64> = runs.iter().filter(|r| r.volume == volume).map(|r| r.count).collect();
    cs.iter().sum::<f64>() / cs.len() as f64 / volume
}

fn scaling(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, CliError> {
    let (runs, trials, seeds, spec, spacing, rule): (Vec<ScalingRun>, usize, Vec<Vec<u64>>, Option<FieldSpec>, f64, String) =
        if let Some(tf) = cfg.test_field {
            let h = spacing_for(cfg, None);
            let mut runs = Vec::new();
            for &side in &cfg.windows {
                let w = cfg.cube_window(side, tf.dim());
                let g = rasterize(&tf, &w, h).map_err(nodal_err)?;
                let comps = extract_components(&g).map_err(nodal_err)?;
                let count = comps.iter().filter(|c| classify(c).is_ok()).count();
                runs.push(ScalingRun { volume: w.volume(), count: count as f64 });
            }
            (runs, 1, Vec::new(), None, h, "deterministic test field; no seeds".into())
        } else {
            let spec = cfg.spec.clone().ok_or_else(no_source)?;
            let h = spacing_for(cfg, Some(&spec));
            let runs = scaling_experiment(&spec, &cfg.windows, cfg.trials, h).map_err(stats_err)?;
            let seeds = seeds_for(spec.seed, SCALING_LABEL, cfg.windows.len(), cfg.trials);
            let rule = format!("trial_seed(spec.seed, {SCALING_LABEL:#x} + window_index, trial)");
            (runs, cfg.trials, seeds, Some(spec), h, rule)
        };

    let mut o = Outputs::create(out)?;
    let mut body = String::from("window,side,volume,trial,seed,count\n");
    for (i, r) in runs.iter().enumerate() {
        let (w, t) = (i / trials, i % trials);
        let seed = seeds.get(w).and_then(|s| s.get(t)).map(|s| s.to_string()).unwrap_or_default();
        let _ = writeln!(body, "{w},{},{},{t},{seed},{}", cfg.windows[w], r.volume, r.count);
    }
    o.write("scaling_runs.csv", &body)?;

    let (fit, fit_error) = match ns_scaling(&runs) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut vols: Vec<f64> = runs.iter().map(|r| r.volume).collect();
    vols.sort_by(f64::total_cmp);
    vols.dedup();
    let c_hat_largest = (vols.len() >= 2).then(|| {
        let a = per_window_c_hat(&runs, vols[vols.len() - 2]);
        let b = per_window_c_hat(&runs, vols[vols.len() - 1]);
        (a, b, (a - b).abs() / a.abs().max(b.abs()))
    });
    let mut body = String::from("volume,mean_count,density\n");
    for &v in &vols {
        let d = per_window_c_hat(&runs, v);
        let _ = writeln!(body, "{v},{},{d}", d * v);
    }
    o.write("scaling_fit.csv", &body)?;
    let summary = ScalingSummary {
        schema: SCALING_SUMMARY_SCHEMA.into(),
        spec: spec.clone(),
        test_field: cfg.test_field,
        windows: cfg.windows.clone(),
        trials,
        spacing,
        fit: fit.clone(),
        fit_error: fit_error.clone(),
        c_hat_largest,
    };
    o.write_json("summary.json", &summary)?;

    let mut series = vec![Series {
        label: "mean count".into(),
        points: vols.iter().map(|&v| (v, per_window_c_hat(&runs, v) * v)).collect(),
        scatter: true,
    }];
    if let Some(f) = &fit {
        series.push(Series { label: format!("c V, c = {:.4}", f.c_hat), points: vols.iter().map(|&v| (v, f.c_hat * v)).collect(), scatter: false });
    }
    let plot = Plot {
        title: "Interior nodal components vs window volume".into(),
        x_label: "volume".into(),
        y_label: "components".into(),
        log_x: true,
        log_y: true,
        series,
    };
    o.write("count_vs_volume.svg", &plot.render())?;
    match (&fit, &fit_error) {
        (Some(f), _) => println!("c_hat={} exponent={} r_squared={}", f.c_hat, f.exponent, f.r_squared),
        (_, Some(e)) => println!("fit unavailable: {e}"),
        _ => {}
    }
    let failure = fit_error.map(CliError::Validation);
    Ok(o.done(&rule, seeds, failure))
}

fn concentration(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, CliError> {
    let spec = cfg.spec.clone().ok_or_else(|| CliError::Validation("concentration needs an ensemble spec".into()))?;
    let h = spacing_for(cfg, Some(&spec));
    let report = concentration_experiment(&spec, &cfg.windows, cfg.trials, h).map_err(stats_err)?;
    let seeds = seeds_for(spec.seed, CONCENTRATION_LABEL, cfg.windows.len(), cfg.trials);

    let (small, large) = {
        let mut idx: Vec<usize> = (0..cfg.windows.len()).collect();
        idx.sort_by(|a, b| cfg.windows[*a].total_cmp(&cfg.windows[*b]));
        (idx[0], idx[idx.len() - 1])
    };
    let bootstrap_fraction = (small != large)
        .then(|| {
            bootstrap_median_order(
                &report.discrepancies[small],
                &report.discrepancies[large],
                cfg.bootstrap_resamples,
                trial_seed(spec.seed, BOOTSTRAP_LABEL, 0),
            )
        })
        .filter(|f| !f.is_nan());

    let mut o = Outputs::create(out)?;
    let mut body = String::from("window,side,volume,trials,trials_used,median,p90,mean_interior,mean_boundary,unclassified\n");
    for (w, r) in report.rows.iter().enumerate() {
        let _ = writeln!(
            body,
            "{w},{},{},{},{},{},{},{},{},{}",
            r.side,
            r.volume,
            r.trials,
            r.trials_used,
            r.median.map(csv_float).unwrap_or_default(),
            r.p90.map(csv_float).unwrap_or_default(),
            r.mean_interior,
            r.mean_boundary,
            r.unclassified
        );
    }
    o.write("concentration.csv", &body)?;
    let mut body = String::from("window,side,index,discrepancy\n");
    for (w, ds) in report.discrepancies.iter().enumerate() {
        for (i, d) in ds.iter().enumerate() {
            let _ = writeln!(body, "{w},{},{i},{d}", cfg.windows[w]);
        }
    }
    o.write("discrepancies.csv", &body)?;
    let mut body = String::from("topology,count,mass\n");
    for e in &report.reference {
        let _ = writeln!(body, "{},{},{}", e.topology, e.count, e.mass);
    }
    o.write("reference_measure.csv", &body)?;

    let plot = Plot {
        title: "Discrepancy to the pooled measure".into(),
        x_label: "window side".into(),
        y_label: "D".into(),
        log_x: false,
        log_y: false,
        series: vec![
            Series {
                label: "median".into(),
                points: report.rows.iter().filter_map(|r| r.median.map(|m| (r.side, m))).collect(),
                scatter: false,
            },
            Series {
                label: "90% quantile".into(),
                points: report.rows.iter().filter_map(|r| r.p90.map(|m| (r.side, m))).collect(),
                scatter: false,
            },
        ],
    };
    o.write("d_quantiles.svg", &plot.render())?;
    let summary = ConcentrationSummary {
        schema: CONCENTRATION_SUMMARY_SCHEMA.into(),
        spec,
        windows: cfg.windows.clone(),
        trials: cfg.trials,
        spacing: h,
        report,
        bootstrap_fraction,
        bootstrap_resamples: cfg.bootstrap_resamples,
    };
    o.write_json("summary.json", &summary)?;
    for r in &summary.report.rows {
        println!("side={} used={}/{} median={:?} p90={:?}", r.side, r.trials_used, r.trials, r.median, r.p90);
    }
    let rule = format!("trial_seed(spec.seed, {CONCENTRATION_LABEL:#x} + window_index, trial)");
    Ok(o.done(&rule, seeds, None))
}

// ---------------------------------------------------------------- witness

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub schema: String,
    pub dim: usize,
    pub n_dirs: usize,
    pub verified: bool,
    pub lambda: Option<f64>,
    pub window: Option<Window>,
    pub spacing: Option<f64>,
    pub measured_error: Option<f64>,
    pub margin: Option<IsotopyMargin>,
    pub interior: Vec<String>,
    pub error: Option<String>,
}

pub fn cmd_witness(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, CliError> {
    let (dim, n_dirs) = (cfg.witness.dim, cfg.witness.n_dirs);
    let mut o = Outputs::create(out)?;
    let mut report = WitnessReport {
        schema: WITNESS_REPORT_SCHEMA.into(),
        dim,
        n_dirs,
        verified: false,
        lambda: None,
        window: None,
        spacing: None,
        measured_error: None,
        margin: None,
        interior: Vec::new(),
        error: None,
    };
    let failure = match t1_witness_for_sphere(dim, n_dirs) {
        Ok(w) => {
            o.write("witness_sample.json", &(w.element.to_wave_sample().to_json() + "\n"))?;
            report.verified = true;
            report.lambda = Some(w.lambda);
            report.window = Some(w.window.clone());
            report.spacing = Some(w.spacing);
            report.measured_error = Some(w.measured_error);
            report.margin = Some(w.margin.clone());
            report.interior = w.interior.iter().map(|t| t.label()).collect();
            println!(
                "verified: {} component, error {:.3e} < margin {:.3e}",
                report.interior.join(","),
                w.measured_error,
                w.margin.value_margin
            );
            None
        }
        Err(e @ (ApproxError::InsufficientN { .. } | ApproxError::Verification(_))) => {
            if let ApproxError::InsufficientN { error, margin, .. } = &e {
                report.measured_error = Some(*error);
                report.margin = None;
                println!("not verified: error {error:.3e}, margin {margin:.3e}");
            }
            report.error = Some(e.to_string());
            Some(CliError::Tolerance(e.to_string()))
        }
        Err(e) => return Err(CliError::Validation(e.to_string())),
    };
    o.write_json("witness_report.json", &report)?;
    Ok(o.done("no randomness", Vec::new(), failure))
}
