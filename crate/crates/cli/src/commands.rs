//! Subcommand implementations.

use std::time::Instant;

use orlicz_lab::convex_core::{legendre_detailed, LegendreEstimate};
use orlicz_lab::delta2::{
    delta2_diagnostic, dual_exponent_bounds, growth_exponents, young_estimate, Delta2Domain,
    YoungKind,
};
use orlicz_lab::func_dsl::{lift_radial, parse_young, NormSpec};
use orlicz_lab::oracle::ConvexOracle;
use orlicz_lab::orlicz::{orlicz_norm, sandwich_check, DiscreteProbabilitySpace, VectorField};
use orlicz_lab::report::{number, CheckRecord, ReportEnvelope};
use orlicz_lab::subgrad::selection_consistency_test;
use orlicz_lab::suites;
use orlicz_lab::registry;
use serde::Deserialize;
use serde_json::json;

use crate::config::{self, Cli, RunConfig};
use crate::output::{self, cell, CsvTable};

pub fn run(cli: Cli) -> Result<i32, String> {
    let (run_cfg, out) = config::resolve(&cli.command)?;
    let started = Instant::now();

    let (payload, failed) = match cli.command.name() {
        "legendre" => cmd_legendre(&run_cfg)?,
        "subgrad" => cmd_subgrad(&run_cfg)?,
        "delta2" => cmd_delta2(&run_cfg)?,
        "norms" => cmd_norms(&run_cfg)?,
        "mixture" => cmd_mixture(&run_cfg)?,
        "verify" => cmd_verify(&run_cfg)?,
        other => return Err(format!("unhandled command {other}")),
    };

    let rendered = match payload {
        Payload::Envelope(mut env) => {
            if cli.command.args().emit_timing {
                env.wall_time_ms = Some(started.elapsed().as_millis() as u64);
            }
            output::render_envelope(&env, &run_cfg.format)
        }
        Payload::Table(t) => t.render(),
    };
    output::emit(&rendered, out.as_deref())?;
    Ok(if failed { 2 } else { 0 })
}

enum Payload {
    Envelope(ReportEnvelope),
    Table(CsvTable),
}

fn envelope_for(run: &RunConfig) -> ReportEnvelope {
    ReportEnvelope::new(serde_json::to_value(run).expect("config echo"))
}

fn build_oracle(run: &RunConfig) -> Result<ConvexOracle, String> {
    let Some(func) = &run.func else {
        return Err("missing --func (profile text or registry name)".into());
    };
    let norm = NormSpec::parse(&run.norm).map_err(|e| e.to_string())?;
    if func.contains('(') || func.contains('r') && func.len() <= 2 {
        let profile = parse_young(func).map_err(|e| e.to_string())?;
        return lift_radial(&profile, &norm, run.dim, &run.search).map_err(|e| e.to_string());
    }
    if norm != NormSpec::Euclidean {
        if let Some(rest) = func.strip_prefix("pow") {
            let p: f64 = rest
                .trim_start_matches(':')
                .parse()
                .map_err(|_| format!("bad power parameter in `{func}`"))?;
            return registry::power_with_norm(p, &norm, run.dim, &run.search)
                .map_err(|e| e.to_string());
        }
        return Err(format!(
            "--norm applies to profile lifts and `pow<p>`; `{func}` is Euclidean-only"
        ));
    }
    registry::from_name(func, run.dim, &run.search).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// legendre
// ---------------------------------------------------------------------------

fn cmd_legendre(run: &RunConfig) -> Result<(Payload, bool), String> {
    if run.dim != 1 {
        return Err("grid tabulation of the Legendre transform requires --dim 1".into());
    }
    let f = build_oracle(run)?;
    let grid = config::parse_grid(run.grid.as_deref().unwrap_or("-5:5:0.1"))?;

    let estimates = parallel_map(&grid, run.threads, |&x| {
        legendre_detailed(&f, &[x], &run.search)
    });

    if run.format == "csv" {
        let mut table = CsvTable::new(&["x", "lstar", "numeric", "gap"]);
        for (x, est) in grid.iter().zip(&estimates) {
            table.push(vec![
                cell(*x),
                cell(est.value.value()),
                cell(est.numeric.value()),
                est.gap.map(cell).unwrap_or_default(),
            ]);
        }
        return Ok((Payload::Table(table), false));
    }

    let mut env = envelope_for(run);
    let max_gap = estimates
        .iter()
        .filter_map(|e: &LegendreEstimate| e.gap)
        .fold(0.0f64, |m, g| m.max(g.abs()));
    env.checks.push(
        CheckRecord::estimate("legendre_grid")
            .value("points", grid.len() as f64)
            .value("max_abs_gap", max_gap)
            .value_json(
                "x",
                json!(grid),
            )
            .value_json(
                "lstar",
                serde_json::Value::Array(
                    estimates.iter().map(|e| number(e.value.value())).collect(),
                ),
            )
            .value_json(
                "numeric",
                serde_json::Value::Array(
                    estimates.iter().map(|e| number(e.numeric.value())).collect(),
                ),
            ),
    );
    Ok((Payload::Envelope(env), false))
}

// ---------------------------------------------------------------------------
// subgrad
// ---------------------------------------------------------------------------

fn cmd_subgrad(run: &RunConfig) -> Result<(Payload, bool), String> {
    let f = build_oracle(run)?;
    let x = match &run.point {
        Some(p) => config::parse_point(p)?,
        None => vec![0.0; run.dim],
    };
    if x.len() != run.dim {
        return Err(format!("point has {} coordinates, --dim is {}", x.len(), run.dim));
    }
    let eps_grid = match &run.eps_grid {
        Some(t) => config::parse_eps_grid(t)?,
        None => vec![1e-1, 3e-2, 1e-2, 3e-3, 1e-3],
    };
    let rep =
        selection_consistency_test(&f, &x, &eps_grid, &run.search).map_err(|e| e.to_string())?;

    let mut env = envelope_for(run);
    for cert in &rep.certificates {
        env.checks.push(
            CheckRecord::from_bool(format!("certificate[{}]", cert.method), cert.is_valid())
                .value("min_slack", cert.min_slack)
                .value("tol_slack", cert.tol_slack)
                .value("probes", cert.probe_count as f64)
                .witness("candidate", json!(cert.candidate))
                .witness("worst_probe", json!(cert.worst_probe)),
        );
    }
    let mut pairwise = CheckRecord::estimate("pairwise_distances");
    for (a, b, d) in &rep.pairwise_distances {
        pairwise = pairwise.value(format!("{a}-{b}"), *d);
    }
    env.checks.push(pairwise);
    env.checks.push(
        CheckRecord::estimate("mollified_sweep")
            .value_json("eps", json!(eps_grid))
            .value_json(
                "increments",
                serde_json::Value::Array(
                    rep.mollified_increments.iter().map(|d| number(*d)).collect(),
                ),
            )
            .value("appears_cauchy", if rep.appears_cauchy { 1.0 } else { 0.0 }),
    );
    let failed = env.any_failed();
    Ok((Payload::Envelope(env), failed))
}

// ---------------------------------------------------------------------------
// delta2
// ---------------------------------------------------------------------------

fn cmd_delta2(run: &RunConfig) -> Result<(Payload, bool), String> {
    let f = build_oracle(run)?;
    let grid = config::parse_grid(run.grid.as_deref().unwrap_or("0:8:0.5"))?;
    let cfg = &run.search;

    let phi = young_estimate(&f, YoungKind::Phi, &grid, cfg).map_err(|e| e.to_string())?;
    let psi = young_estimate(&f, YoungKind::Psi, &grid, cfg).map_err(|e| e.to_string())?;
    let r_est = young_estimate(&f, YoungKind::R, &grid, cfg).map_err(|e| e.to_string())?;

    if run.format == "csv" {
        let mut table = CsvTable::new(&["r", "Phi", "Psi", "R"]);
        for i in 0..grid.len() {
            table.push(vec![
                cell(grid[i]),
                cell(phi.values[i]),
                cell(psi.values[i]),
                cell(r_est.values[i]),
            ]);
        }
        return Ok((Payload::Table(table), false));
    }

    let mut env = envelope_for(run);
    env.checks.push(
        CheckRecord::estimate("young_tables")
            .value_json("r", json!(grid))
            .value_json(
                "Phi",
                serde_json::Value::Array(phi.values.iter().map(|v| number(*v)).collect()),
            )
            .value_json(
                "Psi",
                serde_json::Value::Array(psi.values.iter().map(|v| number(*v)).collect()),
            )
            .value_json(
                "R",
                serde_json::Value::Array(r_est.values.iter().map(|v| number(*v)).collect()),
            ),
    );

    let (pm, pp) = growth_exponents(&f, cfg).map_err(|e| e.to_string())?;
    let mut exponents = CheckRecord::estimate("growth_exponents")
        .value("p_minus", pm)
        .value("p_plus", pp);
    if pm > 1.0 {
        if let Ok((qp, qm)) = dual_exponent_bounds(pm, pp) {
            exponents = exponents.value("dual_q_plus", qp).value("dual_q_minus", qm);
        }
    }
    env.checks.push(exponents);

    for domain in [Delta2Domain::OutsideUnitBall, Delta2Domain::AllNonzero] {
        let rep = delta2_diagnostic(&f, domain, cfg).map_err(|e| e.to_string())?;
        let name = match domain {
            Delta2Domain::OutsideUnitBall => "delta2[|x|>=1]",
            Delta2Domain::AllNonzero => "delta2[x!=0]",
        };
        env.checks.push(
            CheckRecord::from_bool(name, !rep.exceeds_p_plus)
                .value("sup_ratio", rep.sup_ratio_estimate)
                .value("doubling_constant", rep.doubling_constant)
                .value("p_plus", rep.p_plus)
                .witness("best_x", json!(rep.witness)),
        );
    }
    let failed = env.any_failed();
    Ok((Payload::Envelope(env), failed))
}

// ---------------------------------------------------------------------------
// norms
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldDocument {
    dim: usize,
    atoms: Vec<FieldAtom>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldAtom {
    weight: f64,
    value: Vec<f64>,
}

fn cmd_norms(run: &RunConfig) -> Result<(Payload, bool), String> {
    let f = build_oracle(run)?;
    let Some(path) = &run.input else {
        return Err("norms requires --in <field.json> ({dim, atoms: [{weight, value}]})".into());
    };
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let doc: FieldDocument =
        serde_json::from_str(&text).map_err(|e| format!("invalid field document {path}: {e}"))?;
    if doc.dim != run.dim {
        return Err(format!(
            "field document dim {} does not match --dim {}",
            doc.dim, run.dim
        ));
    }
    let sp = DiscreteProbabilitySpace::new(doc.atoms.iter().map(|a| a.weight).collect())
        .map_err(|e| e.to_string())?;
    let u = VectorField::new(doc.dim, doc.atoms.into_iter().map(|a| a.value).collect())
        .map_err(|e| e.to_string())?;

    let mut env = envelope_for(run);
    let failed;
    if f.finite_everywhere() {
        let rep = sandwich_check(&f, &sp, &u, &run.search).map_err(|e| e.to_string())?;
        env.checks.push(
            CheckRecord::from_bool("sandwich", rep.ok())
                .value("luxemburg", rep.norms.luxemburg.value())
                .value("orlicz_lower", rep.norms.orlicz_lower)
                .value("orlicz_upper", rep.norms.orlicz_upper)
                .value("gap", rep.norms.gap)
                .value(
                    "attainment_integral",
                    rep.attainment_integral.unwrap_or(f64::NAN).abs(),
                ),
        );
        failed = !rep.ok();
        if run.format == "csv" {
            let mut table =
                CsvTable::new(&["luxemburg", "orlicz_lower", "orlicz_upper", "gap"]);
            table.push(vec![
                cell(rep.norms.luxemburg.value()),
                cell(rep.norms.orlicz_lower),
                cell(rep.norms.orlicz_upper),
                cell(rep.norms.gap),
            ]);
            return Ok((Payload::Table(table), failed));
        }
    } else {
        let rep = orlicz_norm(&f, &sp, &u, &run.search).map_err(|e| e.to_string())?;
        env.checks.push(
            CheckRecord::estimate("norms")
                .value("luxemburg", rep.luxemburg.value())
                .value("orlicz_lower", rep.orlicz_lower)
                .value("orlicz_upper", rep.orlicz_upper)
                .value("gap", rep.gap),
        );
        failed = false;
        if run.format == "csv" {
            let mut table =
                CsvTable::new(&["luxemburg", "orlicz_lower", "orlicz_upper", "gap"]);
            table.push(vec![
                cell(rep.luxemburg.value()),
                cell(rep.orlicz_lower),
                cell(rep.orlicz_upper),
                cell(rep.gap),
            ]);
            return Ok((Payload::Table(table), failed));
        }
    }
    Ok((Payload::Envelope(env), failed))
}

// ---------------------------------------------------------------------------
// mixture
// ---------------------------------------------------------------------------

fn cmd_mixture(run: &RunConfig) -> Result<(Payload, bool), String> {
    let f = build_oracle(run)?;
    let cfg = &run.search;
    let mut env = envelope_for(run);
    env.checks
        .extend(suites::mixture_trials(&f, run.trials, cfg).map_err(|e| e.to_string())?);
    env.checks.extend(
        suites::convolution_trials(&f, run.trials.min(10), 1, cfg).map_err(|e| e.to_string())?,
    );
    let failed = env.any_failed();
    Ok((Payload::Envelope(env), failed))
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(run: &RunConfig) -> Result<(Payload, bool), String> {
    let suite = run.suite.as_deref().unwrap_or("all");
    let fns = match &run.func {
        Some(_) => vec![build_oracle(run)?],
        None => suites::default_suite_functions(&run.search).map_err(|e| e.to_string())?,
    };
    let checks =
        suites::run_suite(suite, &fns, run.trials, &run.search).map_err(|e| e.to_string())?;
    let mut env = envelope_for(run);
    env.checks.push(suites::summary_record(suite, &checks));
    env.checks.extend(checks);
    let failed = env.any_failed();
    Ok((Payload::Envelope(env), failed))
}

// ---------------------------------------------------------------------------
// worker pool
// ---------------------------------------------------------------------------

/// Maps items to results on up to `threads` workers, preserving input order.
/// Results are deterministic regardless of the worker count because each
/// item's computation seeds itself.
fn parallel_map<T: Sync, R: Send>(
    items: &[T],
    threads: usize,
    op: impl Fn(&T) -> R + Sync,
) -> Vec<R> {
    let workers = threads.max(1).min(items.len().max(1));
    if workers == 1 {
        return items.iter().map(&op).collect();
    }
    let mut slots: Vec<Option<R>> = Vec::with_capacity(items.len());
    slots.resize_with(items.len(), || None);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slot_refs: Vec<std::sync::Mutex<&mut Option<R>>> =
        slots.iter_mut().map(std::sync::Mutex::new).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = op(&items[i]);
                **slot_refs[i].lock().expect("slot lock") = Some(r);
            });
        }
    });
    drop(slot_refs);
    slots.into_iter().map(|s| s.expect("computed slot")).collect()
}
