use std::time::Instant;

use adaptive_qec::adaptive::{estimate_level_cost, exact_ensemble, exact_level};
use adaptive_qec::channel::{entropy, NoiseFamily, PauliProbVec};
use adaptive_qec::code::{builtin_codes, StabilizerCode};
use adaptive_qec::ensemble::ChannelEnsemble;
use adaptive_qec::level::{BlockNoise, LevelMap};
use adaptive_qec::mc::mc_concatenate;
use adaptive_qec::threshold::{threshold_series, unoptimized_threshold, McSearch, SeriesOptions};
use adaptive_qec::QecError;

use crate::config::{MethodChoice, RunConfig};
use crate::output::{Cell, Report};
use crate::CliError;

fn syndrome_label(s: u64, m: usize) -> String {
    (0..m).map(|i| if s >> i & 1 == 1 { '1' } else { '0' }).collect()
}

fn channel_cells(c: &PauliProbVec) -> Vec<Cell> {
    c.0.iter().map(|&v| Cell::Real(v)).collect()
}

/// Seconds per level-map evaluation for `map`, measured on a few calls.
pub fn time_per_map(map: &LevelMap) -> f64 {
    let noise = vec![NoiseFamily::Depolarizing.probs(0.05).expect("valid"); map.code().n()];
    let reps = 200;
    let start = Instant::now();
    let mut sink = 0.0;
    for _ in 0..reps {
        sink += map.coset_quasi(&noise)[0].0[0];
    }
    std::hint::black_box(sink);
    start.elapsed().as_secs_f64() / reps as f64
}

/// Level-map evaluations for an exact run up to `level`, or `None` when some
/// level is over the budget.
pub fn exact_cost(map: &LevelMap, base: &PauliProbVec, level: usize, cfg: &RunConfig) -> Option<f64> {
    let opts = cfg.exact();
    let mut ens = ChannelEnsemble::singleton(*base).ok()?;
    let mut total = 0.0;
    for l in 0..level {
        let children = vec![&ens; map.code().n()];
        total += estimate_level_cost(map.code(), &children, &opts).ok()?;
        if l + 1 < level {
            ens = exact_level(map, &children, &opts).ok()?;
        }
    }
    Some(total)
}

/// Level-map evaluations per Monte Carlo sample at `level`, ignoring cache
/// hits.
pub fn mc_cost_per_sample(n: usize, level: usize) -> f64 {
    (0..level.saturating_sub(1)).map(|k| (n as f64).powi(k as i32)).sum::<f64>().max(1.0)
}

fn plan_report(cfg: &RunConfig, command: &str, rows: Vec<(String, String, Option<f64>)>) -> Report {
    let mut r = Report::new(command, cfg, &["step", "method", "estimated_seconds"]);
    for (step, method, secs) in rows {
        r.push(vec![step.into(), method.into(), secs.into()]);
    }
    r.notes.push("dry run: nothing was computed".into());
    r
}

pub fn entropy_cmd(cfg: &mut RunConfig, dry_run: bool) -> Result<Report, CliError> {
    let level = *cfg.levels.get_or_insert(0);
    let p = cfg.require_p()?;
    let base = cfg.family.probs(p)?;
    let code = cfg.load_code()?;
    let map = LevelMap::new(&code);
    if dry_run {
        let exact = match cfg.method {
            MethodChoice::Exact => true,
            MethodChoice::Mc => level == 0,
            MethodChoice::Auto => level == 0 || exact_cost(&map, &base, level, cfg).is_some(),
        };
        let step = format!("entropy of {} p={p} after {level} levels of {}", cfg.family, code.name());
        let secs = if exact {
            exact_cost(&map, &base, level, cfg).map(|c| c * time_per_map(&map))
        } else {
            Some(cfg.samples as f64 * mc_cost_per_sample(code.n(), level) * time_per_map(&map))
        };
        return Ok(plan_report(cfg, "entropy", vec![(step, if exact { "exact" } else { "monte-carlo" }.into(), secs)]));
    }
    let mut r = Report::new(
        "entropy",
        cfg,
        &["code", "family", "p", "levels", "method", "entropy", "std_error", "mean_infidelity", "ensemble_size"],
    );
    let code_cell = if level == 0 { "-" } else { code.name() };
    let head = vec![code_cell.into(), cfg.family.name().into(), p.into(), level.into()];
    let exact = match cfg.method {
        MethodChoice::Mc if level > 0 => None,
        MethodChoice::Exact | MethodChoice::Mc => Some(exact_ensemble(&map, &base, level, &cfg.exact())?),
        MethodChoice::Auto => match exact_ensemble(&map, &base, level, &cfg.exact()) {
            Err(QecError::BudgetExceeded { .. }) => None,
            other => Some(other?),
        },
    };
    let tail = if let Some(ens) = exact {
        vec!["exact".into(), ens.entropy().into(), 0.0.into(), ens.mean_infidelity().into(), ens.len().into()]
    } else {
        let est = mc_concatenate(&map, &base, level, &cfg.mc())?;
        vec![
            "monte-carlo".into(),
            est.mean_entropy.into(),
            est.std_error.into(),
            est.mean_infidelity.into(),
            Cell::Empty,
        ]
    };
    r.push(head.into_iter().chain(tail).collect());
    Ok(r)
}

pub fn level_map_cmd(cfg: &mut RunConfig, dry_run: bool) -> Result<Report, CliError> {
    let p = cfg.require_p()?;
    let code = cfg.load_code()?;
    if dry_run {
        let step = format!("per-syndrome channels of {} under {} p={p}", code.name(), cfg.family);
        return Ok(plan_report(cfg, "level-map", vec![(step, "exact".into(), Some(0.0))]));
    }
    let map = LevelMap::new(&code);
    let noise = BlockNoise::uniform(cfg.family.probs(p)?, code.n())?;
    let mut r =
        Report::new("level-map", cfg, &["syndrome", "recovery", "weight", "p_i", "p_x", "p_y", "p_z", "entropy"]);
    for s in map.coset_map(&noise)? {
        let mut row = vec![
            syndrome_label(s.syndrome, code.generators().len()).into(),
            s.recovery.to_string().into(),
            s.weight.into(),
        ];
        row.extend(channel_cells(&s.channel));
        row.push(entropy(&s.channel)?.into());
        r.push(row);
    }
    r.notes.push(format!("blind map: {}", map.blind_map(&noise.per_qubit[0])?));
    Ok(r)
}

pub fn ensemble_cmd(cfg: &mut RunConfig, dry_run: bool) -> Result<Report, CliError> {
    let level = *cfg.levels.get_or_insert(1);
    let p = cfg.require_p()?;
    let base = cfg.family.probs(p)?;
    let code = cfg.load_code()?;
    let map = LevelMap::new(&code);
    if dry_run {
        let secs = exact_cost(&map, &base, level, cfg).map(|c| c * time_per_map(&map));
        let step = format!("exact ensemble of {} p={p} after {level} levels of {}", cfg.family, code.name());
        return Ok(plan_report(cfg, "ensemble", vec![(step, "exact".into(), secs)]));
    }
    let ens = exact_ensemble(&map, &base, level, &cfg.exact())?;
    let mut r = Report::new("ensemble", cfg, &["index", "weight", "p_i", "p_x", "p_y", "p_z", "entropy"]);
    for (i, e) in ens.entries().iter().enumerate() {
        let mut row = vec![i.into(), e.weight.into()];
        row.extend(channel_cells(&e.channel));
        row.push(entropy(&e.channel)?.into());
        r.push(row);
    }
    r.notes.push(format!(
        "entries={} entropy={} mean_infidelity={}",
        ens.len(),
        crate::output::format_real(ens.entropy()),
        crate::output::format_real(ens.mean_infidelity())
    ));
    Ok(r)
}

pub fn mc_cmd(cfg: &mut RunConfig, dry_run: bool) -> Result<Report, CliError> {
    let level = *cfg.levels.get_or_insert(1);
    if level == 0 {
        return Err(CliError::Usage("Monte Carlo needs --levels of at least 1".into()));
    }
    let p = cfg.require_p()?;
    let base = cfg.family.probs(p)?;
    let code = cfg.load_code()?;
    let map = LevelMap::new(&code);
    if dry_run {
        let secs = cfg.samples as f64 * mc_cost_per_sample(code.n(), level) * time_per_map(&map);
        let step = format!("{} samples of {} p={p} through {level} levels of {}", cfg.samples, cfg.family, code.name());
        return Ok(plan_report(cfg, "mc", vec![(step, "monte-carlo".into(), Some(secs))]));
    }
    let est = mc_concatenate(&map, &base, level, &cfg.mc())?;
    let mut r = Report::new(
        "mc",
        cfg,
        &[
            "code",
            "family",
            "p",
            "levels",
            "samples",
            "seed",
            "streams",
            "mean_entropy",
            "std_error",
            "mean_infidelity",
        ],
    );
    r.push(vec![
        code.name().into(),
        cfg.family.name().into(),
        p.into(),
        level.into(),
        est.samples.into(),
        est.seed.into(),
        cfg.streams.into(),
        est.mean_entropy.into(),
        est.std_error.into(),
        est.mean_infidelity.into(),
    ]);
    Ok(r)
}

const THRESHOLD_COLUMNS: [&str; 7] = ["code", "family", "level", "p_star", "target_entropy", "method", "uncertainty"];

pub fn threshold_cmd(cfg: &mut RunConfig, dry_run: bool) -> Result<Report, CliError> {
    let code = cfg.load_code()?;
    let map = LevelMap::new(&code);
    if cfg.unoptimized {
        cfg.levels = None;
        if dry_run {
            let step = format!("unoptimized threshold of {} under {}", code.name(), cfg.family);
            return Ok(plan_report(cfg, "threshold", vec![(step, "exact".into(), Some(0.1))]));
        }
        let c = unoptimized_threshold(&map, cfg.family, cfg.tol)?;
        let mut r = Report::new("threshold", cfg, &THRESHOLD_COLUMNS);
        r.push(vec![
            c.code.into(),
            c.family.name().into(),
            "unoptimized".into(),
            c.p_star.into(),
            Cell::Empty,
            c.method.name().into(),
            c.uncertainty.into(),
        ]);
        return Ok(r);
    }
    let max_level = *cfg.levels.get_or_insert(2);
    let opts = SeriesOptions {
        target: cfg.target_entropy,
        tol: cfg.tol,
        exact: cfg.exact(),
        mc: (cfg.method != MethodChoice::Exact).then(|| McSearch::new(cfg.mc())),
        max_exact_level: if cfg.method == MethodChoice::Mc { 0 } else { usize::MAX },
    };
    if dry_run {
        let t = time_per_map(&map);
        let iters = ((cfg.family.search_bracket().1 / cfg.tol).log2().ceil()).max(1.0);
        let mid = cfg.family.probs(cfg.family.search_bracket().1 / 4.0)?;
        let rows = (0..=max_level)
            .map(|level| {
                let cost = (opts.max_exact_level >= level).then(|| exact_cost(&map, &mid, level, cfg)).flatten();
                let step = format!("critical p of {} at level {level} of {}", cfg.family, code.name());
                if let Some(c) = cost {
                    (step, "exact".into(), Some(iters * c * t))
                } else {
                    let s = opts.mc.map(|m| {
                        let per = mc_cost_per_sample(code.n(), level) * t * 3.0;
                        (0..m.rounds).map(|k| per * (m.mc.samples * m.escalation.pow(k as u32)) as f64).sum()
                    });
                    (step, "monte-carlo".into(), s)
                }
            })
            .collect();
        return Ok(plan_report(cfg, "threshold", rows));
    }
    let series = threshold_series(&map, cfg.family, max_level, &opts)?;
    let mut r = Report::new("threshold", cfg, &THRESHOLD_COLUMNS);
    for c in &series.points {
        r.push(vec![
            c.code.clone().into(),
            c.family.name().into(),
            c.level.into(),
            c.p_star.into(),
            c.target_entropy.into(),
            c.method.name().into(),
            c.uncertainty.into(),
        ]);
    }
    if let (Some(est), Some(d)) = (series.estimate(), series.drift) {
        r.notes.push(format!(
            "threshold estimate {} with level-to-level drift {}",
            crate::output::format_real(est),
            crate::output::format_real(d)
        ));
    }
    Ok(r)
}

pub fn codes_cmd(cfg: &mut RunConfig) -> Result<Report, CliError> {
    let mut r =
        Report::new("codes", cfg, &["name", "n", "distance", "aliases", "generators", "logical_x", "logical_z"]);
    let all: Vec<StabilizerCode> = builtin_codes();
    for c in &all {
        r.push(vec![
            c.name().into(),
            c.n().into(),
            c.distance().into(),
            c.aliases().join(" ").into(),
            c.generators().iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" ").into(),
            c.logical_x().to_string().into(),
            c.logical_z().to_string().into(),
        ]);
    }
    Ok(r)
}

/// Exit status class of an engine error.
pub fn classify(e: &QecError) -> CliError {
    match e {
        QecError::NoStraddle { .. }
        | QecError::NoTransition { .. }
        | QecError::NonPositiveWeight(_)
        | QecError::Unnormalized { .. } => CliError::Failed(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    }
}
