use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::{Duration, Instant};

use vfcfc_core::analysis::{settle_metrics, uub_bounds, UubInputs, DEFAULT_TAIL_FRACTION};
use vfcfc_core::certify::{check_assumptions, AssumptionReport};
use vfcfc_core::plants::{fk_closed_form, Mode};
use vfcfc_core::presets::{preset, ConstraintSpec, ScenarioSpec, PRESET_NAMES};
use vfcfc_core::sim::{run_scenario, ControllerKind};
use vfcfc_core::DVector;

use crate::config::ScenarioConfig;
use crate::output::{render_svg, write_csv, write_metrics, BoundReport, Metrics, Settle, Terminal};
use crate::CliError;

pub const DEFAULT_OUT_DIR: &str = "out";

/// Configuration to the plotting plane.
type ToPlane<'a> = dyn Fn(&DVector<f64>) -> (f64, f64) + 'a;

/// A scenario together with the directory its artifacts go to.
#[derive(Debug, Clone)]
pub struct Job {
    pub spec: ScenarioSpec,
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub step: Option<f64>,
    pub duration: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, spec: &mut ScenarioSpec) {
        if let Some(h) = self.step {
            spec.step = h;
        }
        if let Some(t) = self.duration {
            spec.duration = t;
        }
    }
}

/// Expands preset names and config files into jobs. `all` selects the
/// whole catalog, minus the check-only presets when `runnable` is set. A
/// `--out-dir` flag overrides the directory named in a file.
pub fn collect_jobs(
    presets: &[String],
    configs: &[PathBuf],
    out_dir: Option<&Path>,
    overrides: Overrides,
    runnable: bool,
) -> Result<Vec<Job>, CliError> {
    let default_dir = out_dir.map_or_else(|| PathBuf::from(DEFAULT_OUT_DIR), Path::to_path_buf);
    let mut jobs = Vec::new();
    for name in presets {
        let names: Vec<&str> = if name == "all" {
            PRESET_NAMES.to_vec()
        } else {
            vec![name.as_str()]
        };
        for n in names {
            let spec = preset(n)?;
            if runnable && name == "all" && spec.constraint != ConstraintSpec::Vfc {
                continue;
            }
            jobs.push(Job {
                spec,
                out_dir: default_dir.clone(),
            });
        }
    }
    for path in configs {
        let cfg = ScenarioConfig::load(path)?;
        let spec = cfg.to_spec().map_err(|e| CliError::Invalid {
            path: path.clone(),
            message: e.to_string(),
        })?;
        let dir = match (out_dir, &cfg.out_dir) {
            (Some(d), _) => d.to_path_buf(),
            (None, Some(d)) => d.clone(),
            (None, None) => default_dir.clone(),
        };
        jobs.push(Job { spec, out_dir: dir });
    }
    for job in &mut jobs {
        overrides.apply(&mut job.spec);
    }
    Ok(jobs)
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub csv: PathBuf,
    pub metrics_path: PathBuf,
    pub svg: PathBuf,
    pub rows: usize,
    pub elapsed: Duration,
    pub metrics: Metrics,
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn bound_report(
    spec: &ScenarioSpec,
    alpha_norm: f64,
    tail: f64,
) -> Result<Option<BoundReport>, CliError> {
    if spec.controller != ControllerKind::AdaptiveRobust {
        return Ok(None);
    }
    let report = check_assumptions(spec)?;
    let lambda = report
        .check("input_map")
        .and_then(|c| c.value("lambda_low"));
    let rho = report
        .check("mass_input_uncertainty")
        .and_then(|c| c.value("rho_w"));
    let (Some(lambda_low), Some(rho_w)) = (lambda, rho) else {
        return Ok(None);
    };
    let bounds = uub_bounds(&UubInputs {
        kappa: spec.cfg.kappa,
        lambda_low,
        rho_w,
        l1: spec.cfg.l1,
        l2: spec.cfg.l2,
        mu: spec.cfg.mu,
        alpha_norm,
        p: spec.p_matrix()?,
    });
    // a non-positive lambda or rho <= -1 leaves the bound undefined
    Ok(bounds
        .ok()
        .map(|b| BoundReport::new(lambda_low, rho_w, alpha_norm, &b, tail)))
}

/// Simulates one scenario and writes `<id>_trajectory.csv`,
/// `<id>_metrics.json` and `<id>_path.svg`.
pub fn run_job(job: &Job) -> Result<RunOutcome, CliError> {
    let spec = &job.spec;
    let prepared = spec.prepare()?;
    let start = Instant::now();
    let log = run_scenario(&prepared.scenario)?;
    let elapsed = start.elapsed();
    let series = prepared.error_series(&log)?;

    fs::create_dir_all(&job.out_dir).map_err(|source| CliError::Io {
        path: job.out_dir.clone(),
        source,
    })?;
    let csv = job.out_dir.join(format!("{}_trajectory.csv", spec.id));
    write_csv(create(&csv)?, &log, &series)?;

    let last = log.last().expect("a run logs its initial state");
    let settle = settle_metrics(&series, DEFAULT_TAIL_FRACTION)?;
    let alpha = &last.state.alpha_hat;
    let metrics = Metrics {
        scenario_id: spec.id.clone(),
        description: spec.description.clone(),
        plant: spec.plant.name().into(),
        plant_mode: match spec.plant_mode {
            Mode::Nominal => "nominal".into(),
            Mode::True => "true".into(),
        },
        path: spec.path.name().into(),
        controller: spec.controller.name().into(),
        step: spec.step,
        duration: spec.duration,
        samples: log.len(),
        terminal: Terminal {
            t: last.state.t,
            beta_norm: *series.beta_norm.last().unwrap(),
            phi_norm: *series.phi_norm.last().unwrap(),
            dist_hgh: *series.dist_hgh.last().unwrap(),
            dist_phys: *series.dist_phys.last().unwrap(),
            alpha_hat: alpha.iter().copied().collect(),
        },
        settle: Settle::new(DEFAULT_TAIL_FRACTION, &settle),
        bound: bound_report(spec, alpha.norm(), settle.ultimate_bound_est)?,
    };
    let metrics_path = job.out_dir.join(format!("{}_metrics.json", spec.id));
    write_metrics(create(&metrics_path)?, &metrics)?;

    // plot in the space the path is defined in
    let ctx = &prepared.scenario.ctx;
    let (path, to_plane): (_, Box<ToPlane>) = match &prepared.task {
        Some(task) => {
            let geom = task.geometry;
            (
                &task.path,
                Box::new(move |q| {
                    let p = fk_closed_form(q, &geom);
                    (p[0], p[1])
                }),
            )
        }
        None => (
            ctx.path(),
            Box::new(|q| {
                let z = ctx.selection().apply(q);
                (z[0], z[1])
            }),
        ),
    };
    let (lo, hi) = path.window();
    let desired: Vec<(f64, f64)> = (0..1000)
        .map(|i| {
            let p = path.eval(lo + (hi - lo) * i as f64 / 999.0);
            (p[0], p[1])
        })
        .collect();
    let trajectory: Vec<(f64, f64)> = log.records.iter().map(|r| to_plane(&r.state.q)).collect();
    let projection = if path.dim() > 2 {
        ", x-y projection"
    } else {
        ""
    };
    let svg_text = render_svg(
        &format!("{} ({}{projection})", spec.id, spec.path.name()),
        &desired,
        &trajectory,
        &series,
    );
    let svg = job.out_dir.join(format!("{}_path.svg", spec.id));
    fs::write(&svg, svg_text).map_err(|source| CliError::Io {
        path: svg.clone(),
        source,
    })?;

    Ok(RunOutcome {
        csv,
        metrics_path,
        svg,
        rows: log.len(),
        elapsed,
        metrics,
    })
}

/// Runs jobs concurrently; the outcomes come back in job order.
pub fn run_jobs(jobs: &[Job]) -> Vec<Result<RunOutcome, CliError>> {
    thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|job| s.spawn(move || run_job(job)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or(Err(CliError::Panicked)))
            .collect()
    })
}

pub fn check_jobs(jobs: &[Job]) -> Vec<Result<AssumptionReport, CliError>> {
    thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|job| s.spawn(move || check_assumptions(&job.spec).map_err(CliError::from)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or(Err(CliError::Panicked)))
            .collect()
    })
}

pub fn format_report(report: &AssumptionReport) -> String {
    let mut out = format!("{}\n", report.scenario_id);
    for c in &report.checks {
        let verdict = if c.passed { "ok  " } else { "FAIL" };
        let values: Vec<String> = c
            .values
            .iter()
            .map(|(k, v)| format!("{k} = {v:.6e}"))
            .collect();
        out.push_str(&format!(
            "  [{verdict}] {:<24} {}\n",
            c.name,
            values.join(", ")
        ));
        if let Some(note) = &c.note {
            out.push_str(&format!("         {note}\n"));
        }
    }
    out
}

/// Writes every catalog preset as `<id>.toml` into `dir`.
pub fn export_presets(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for name in PRESET_NAMES {
        let spec = preset(name)?;
        let path = dir.join(format!("{name}.toml"));
        let text = format!(
            "# {}\n{}",
            spec.description,
            ScenarioConfig::from(&spec).to_toml()
        );
        fs::write(&path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}
