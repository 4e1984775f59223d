//! Command dispatch shared by the command-line tool and the tests.

use rayon::prelude::*;
use thiserror::Error;

use crate::bundle::{IsotropicFlags, OutputBundle, Report, TracedRay};
use crate::config::Config;
use crate::invisibility::{check_invisible, trace, vertical_ray};
use crate::mirrors::{CurvePoint, Mirror};
use crate::orbits::{solve_periodic, validate_orbit, Billiard, Orbit, SolveOptions};
use crate::reflectivity::{
    find_isotropic_edge_orbit, random_curve_point, reflectivity_probe, seed_rng, ChainOptions,
    ProbeOptions, SeedBox,
};
use crate::svg::render_svg;

pub const DEFAULT_SEEDS: usize = 20;
pub const DEFAULT_MAX_REFLECTIONS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Probe,
    Solve,
    Chain,
    CheckIsotropicInfinity,
    TraceInvisible,
    Render(Box<OutputBundle>),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Probe => "probe",
            Command::Solve => "solve",
            Command::Chain => "chain",
            Command::CheckIsotropicInfinity => "check-isotropic-infinity",
            Command::TraceInvisible => "trace-invisible",
            Command::Render(_) => "render",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CommandError {
    /// Missing or inconsistent arguments.
    #[error("{0}")]
    Usage(String),
    /// A well-formed request that failed in the geometry.
    #[error(transparent)]
    Domain(#[from] crate::Error),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Usage(_) => 1,
            CommandError::Domain(_) => 2,
        }
    }
}

fn usage(msg: &str) -> CommandError {
    CommandError::Usage(msg.to_string())
}

fn billiard(cfg: Option<&Config>) -> Result<&Billiard, CommandError> {
    cfg.and_then(|c| c.billiard.as_ref())
        .ok_or_else(|| usage("this command needs a config with mirrors"))
}

fn period(cfg: &Config) -> Result<usize, CommandError> {
    match cfg.file.params.period {
        Some(k) if k >= 2 => Ok(k),
        Some(_) => Err(usage("the period must be at least 2")),
        None => Err(usage("missing --period")),
    }
}

fn distinct_mirrors(b: &Billiard) -> Vec<&Mirror> {
    let mut out: Vec<&Mirror> = Vec::new();
    for m in b.mirrors() {
        if !out.iter().any(|n| n.label == m.label) {
            out.push(m);
        }
    }
    out
}

fn same_orbit(a: &Orbit, b: &Orbit) -> bool {
    a.k() == b.k()
        && a.vertices
            .iter()
            .zip(&b.vertices)
            .all(|(p, q)| p.point.chordal(&q.point) < 1e-8)
}

fn seed_box(boxes: &[SeedBox], j: usize) -> SeedBox {
    if boxes.is_empty() {
        SeedBox::default()
    } else {
        boxes[j % boxes.len()]
    }
}

/// Runs a command. `render` works on the bundle it carries; every other
/// command needs a configuration.
pub fn run_command(cmd: &Command, cfg: Option<&Config>) -> Result<OutputBundle, CommandError> {
    let mut out = OutputBundle::new(cmd.name());
    if let Command::Render(input) = cmd {
        let mut bundle = (**input).clone();
        bundle.svg = vec![render_svg(&bundle)?];
        bundle.command = cmd.name().to_string();
        return Ok(bundle);
    }
    let cfg = cfg.ok_or_else(|| usage("missing --config"))?;
    let params = &cfg.file.params;
    let seeds = params.seeds.unwrap_or(DEFAULT_SEEDS);
    let rng_seed = params.rng_seed.unwrap_or(0);
    let tol = cfg.file.tolerances;
    if let Some(b) = &cfg.billiard {
        out.mirrors = distinct_mirrors(b)
            .into_iter()
            .map(Mirror::to_spec)
            .collect();
    }
    match cmd {
        Command::Probe => {
            let b = billiard(Some(cfg))?;
            let k = period(cfg)?;
            let opts = ProbeOptions {
                seed_boxes: cfg.file.seed_boxes.clone(),
                rng_seed,
                tolerances: tol,
            };
            let report = reflectivity_probe(b, k, seeds, &opts);
            out.orbits.extend(report.anchor.clone());
            out.reports.push(Report::Reflectivity(report));
        }
        Command::Solve => {
            let b = billiard(Some(cfg))?;
            let k = period(cfg)?;
            let opts = SolveOptions {
                converged: tol.residual_converged,
                ..SolveOptions::default()
            };
            let results: Vec<Result<Orbit, bool>> = (0..seeds)
                .into_par_iter()
                .map(|i| {
                    let mut rng = seed_rng(rng_seed, i);
                    let init: Result<Vec<CurvePoint>, _> = (0..k)
                        .map(|j| {
                            random_curve_point(
                                b.mirror(j),
                                &seed_box(&cfg.file.seed_boxes, j),
                                &mut rng,
                            )
                        })
                        .collect();
                    let o = init
                        .and_then(|init| solve_periodic(b, k, &init, &opts))
                        .map_err(|_| false)?;
                    if validate_orbit(b, &o).pass {
                        Ok(o)
                    } else {
                        Err(true)
                    }
                })
                .collect();
            let (mut converged, mut rejected, mut failed) = (0, 0, 0);
            for r in results {
                match r {
                    Ok(o) => {
                        converged += 1;
                        if !out.orbits.iter().any(|p| same_orbit(p, &o)) {
                            out.orbits.push(o);
                        }
                    }
                    Err(true) => rejected += 1,
                    Err(false) => failed += 1,
                }
            }
            out.reports.push(Report::Solve {
                period: k,
                seeds,
                converged,
                rejected,
                failed,
            });
        }
        Command::Chain => {
            let b = billiard(Some(cfg))?;
            let k = period(cfg)?;
            let mut opts = ChainOptions {
                rng_seed,
                ..ChainOptions::default()
            };
            if let Some(bx) = cfg.file.seed_boxes.first() {
                opts.seed_box = *bx;
            }
            let results = find_isotropic_edge_orbit(b, k, seeds, &opts);
            out.reports.push(Report::Chains { period: k, results });
        }
        Command::CheckIsotropicInfinity => {
            let b = billiard(Some(cfg))?;
            let mirrors = distinct_mirrors(b)
                .into_iter()
                .map(|m| {
                    let (i1, i2) = m.contains_isotropic_infinity();
                    IsotropicFlags {
                        label: m.label.clone(),
                        i1,
                        i2,
                    }
                })
                .collect();
            out.reports.push(Report::IsotropicInfinity { mirrors });
        }
        Command::TraceInvisible => {
            let body = cfg
                .body
                .as_ref()
                .ok_or_else(|| usage("trace-invisible needs a body in the config"))?;
            let max_n = params.max_reflections.unwrap_or(DEFAULT_MAX_REFLECTIONS);
            let rays = match &cfg.rays {
                Some(r) => r.clone(),
                None => {
                    let [x0, _, x1, _] = body.bbox();
                    (0..seeds)
                        .map(|i| {
                            vertical_ray(body, x0 + (x1 - x0) * (i as f64 + 0.5) / seeds as f64)
                        })
                        .collect()
                }
            };
            out.trajectories = rays
                .par_iter()
                .map(|r| TracedRay {
                    trajectory: trace(body, r, max_n),
                    visibility: check_invisible(body, r, max_n),
                })
                .collect();
            let count =
                |f: fn(&TracedRay) -> bool| out.trajectories.iter().filter(|t| f(t)).count();
            use crate::invisibility::Visibility as V;
            let report = Report::Trace {
                rays: rays.len(),
                invisible: count(|t| matches!(t.visibility, V::Invisible { .. })),
                visible: count(|t| matches!(t.visibility, V::Visible { .. })),
                missed: count(|t| matches!(t.visibility, V::Miss)),
                aborted: count(|t| matches!(t.visibility, V::Aborted { .. })),
            };
            out.reports.push(report);
            out.body = Some(body.to_spec());
        }
        Command::Render(_) => unreachable!("handled above"),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use crate::reflectivity::Verdict;

    const TRIPLE: &str = r#"{
        "mirrors": [{"label": "c", "degree": 2,
                     "coeffs": [[2, 0, [1, 0]], [0, 2, [1, 0]], [0, 0, [-1, 0]]]}],
        "order": ["c", "c", "c"],
        "params": {"period": 3, "seeds": 20}
    }"#;

    #[test]
    fn probe_on_the_circle_triple() {
        let cfg = parse_config(TRIPLE.as_bytes()).unwrap();
        let out = run_command(&Command::Probe, Some(&cfg)).unwrap();
        let Report::Reflectivity(r) = &out.reports[0] else {
            panic!()
        };
        assert_eq!(r.verdict, Verdict::NotReflectiveEvidence);
    }

    #[test]
    fn isotropic_flags_on_circles() {
        let cfg = parse_config(TRIPLE.as_bytes()).unwrap();
        let out = run_command(&Command::CheckIsotropicInfinity, Some(&cfg)).unwrap();
        let Report::IsotropicInfinity { mirrors } = &out.reports[0] else {
            panic!()
        };
        assert!(mirrors.iter().all(|f| f.i1 && f.i2));
    }

    #[test]
    fn missing_period_is_a_usage_error() {
        let text = TRIPLE.replace("\"period\": 3, ", "");
        let cfg = parse_config(text.as_bytes()).unwrap();
        let err = run_command(&Command::Solve, Some(&cfg)).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn render_needs_content() {
        let err =
            run_command(&Command::Render(Box::new(OutputBundle::new("solve"))), None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
