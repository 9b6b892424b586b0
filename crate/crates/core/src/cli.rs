//! Command implementations behind the `gwasym` binary. Each command returns
//! its result; the binary maps failures to exit codes.

use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde_json::{json, Value};

use crate::asymptotics::{plot_csv, plot_rows, validate, AsymptoticModel, Validation, ValidationParams};
use crate::cache::{ensure_ranges, ensure_tables, render_records, TableCache, Tables};
use crate::check::Check;
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::invariants::{
    extend_genus0_scaled, genus1_table, verify_bounds, verify_wdvv_series, Genus, InvariantTable,
};
use crate::singularity::{analyze, ReportSummary, SingularityReport};

/// Which entries `invariants` produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableMode {
    Exact,
    Scaled,
}

/// Verification suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Wdvv,
    Bounds,
    Asymptotics,
}

/// Allowed distance of float entries from exact ones, in units in the last
/// place of the table precision.
pub const SCALED_ULPS: f64 = 2.0;

/// Highest order of the exact WDVV residual check.
pub const WDVV_ORDER: usize = 60;

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn pretty(v: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// Ensures the cache covers `dmax` entries of the requested kind and
/// returns those records as JSON lines (also written to `out` if given).
pub fn cmd_invariants(
    cfg: &RunConfig,
    genus: Genus,
    dmax: usize,
    mode: TableMode,
    out: Option<&Path>,
) -> Result<String> {
    if dmax == 0 {
        return Err(Error::InvalidArgument("dmax must be positive".into()));
    }
    let cache = TableCache::new(&cfg.cache_dir);
    let (d_exact, d_float) = match mode {
        TableMode::Exact => (dmax, 0),
        TableMode::Scaled => (0, dmax),
    };
    let tables = ensure_ranges(&cache, cfg.precision_bits, d_exact, d_float)?;
    let t = match genus {
        Genus::Zero => &tables.g0,
        Genus::One => &tables.g1,
    };
    let text = render_records(t)?;
    if let Some(path) = out {
        write_file(path, &text)?;
    }
    Ok(text)
}

fn load_tables(cfg: &RunConfig) -> Result<Tables> {
    let cache = TableCache::new(&cfg.cache_dir);
    let t = ensure_tables(cfg, &cache)?;
    if t.wrote {
        info!("cache updated in {}", cache.dir().display());
    }
    Ok(t)
}

pub fn singularity_path(cfg: &RunConfig) -> PathBuf {
    cfg.out_dir.join("singularity.json")
}

/// Locates `x₀`, extracts the coefficients, and writes the report to `out`
/// (default `<out_dir>/singularity.json`).
pub fn cmd_singularity(cfg: &RunConfig, out: Option<&Path>) -> Result<SingularityReport> {
    cfg.validate()?;
    let tables = load_tables(cfg)?;
    run_singularity(cfg, &tables.g0, out)
}

fn run_singularity(cfg: &RunConfig, g0: &InvariantTable, out: Option<&Path>) -> Result<SingularityReport> {
    let report = analyze(g0, &cfg.singularity())?;
    for c in &report.checks {
        if c.passed {
            info!("{}", c.line());
        } else {
            warn!("{}", c.line());
        }
    }
    let path = out.map(Path::to_path_buf).unwrap_or_else(|| singularity_path(cfg));
    write_file(&path, &pretty(&report.to_json())?)?;
    Ok(report)
}

/// `x₀` and coefficients from a saved report at this precision, or from a
/// fresh run.
fn singularity_summary(cfg: &RunConfig, g0: &InvariantTable) -> Result<(ReportSummary, Vec<Check>)> {
    let path = singularity_path(cfg);
    if let Ok(text) = fs::read_to_string(&path) {
        if let Ok(v) = serde_json::from_str::<Value>(&text) {
            if let Ok(s) = ReportSummary::from_json(&v) {
                if s.precision_bits == cfg.precision_bits && s.a0.len() + 3 >= cfg.terms {
                    info!("reusing {}", path.display());
                    return Ok((s, Vec::new()));
                }
            }
        }
    }
    let r = run_singularity(cfg, g0, None)?;
    let checks = r.checks.clone();
    Ok((
        ReportSummary {
            x0: r.x0,
            a0: r.a0,
            a1: r.a1,
            precision_bits: cfg.precision_bits,
        },
        checks,
    ))
}

fn validation_params(cfg: &RunConfig) -> ValidationParams {
    ValidationParams {
        root_gap_threshold: cfg.root_gap_threshold,
        ..Default::default()
    }
}

/// Models built from the full set of available coefficients.
fn full_models(cfg: &RunConfig, s: &ReportSummary) -> Result<(AsymptoticModel, AsymptoticModel)> {
    let n0 = cfg.terms.min(s.a0.len() + 3);
    let n1 = cfg.terms.min(s.a1.len());
    Ok((
        AsymptoticModel::genus0(&s.x0, &s.a0, n0)?,
        AsymptoticModel::genus1(&s.x0, &s.a1, n1)?,
    ))
}

fn validation_json(v: &Validation) -> Value {
    json!({
        "checks": v.checks,
        "slopes": v.slopes.iter().map(|(k, s)| json!({"name": k, "slope": s})).collect::<Vec<_>>(),
    })
}

/// Validates the expansions against the tables; writes
/// `<out_dir>/asymptotics.json` and `<out_dir>/asymptotics.csv`.
pub fn cmd_asympt(cfg: &RunConfig) -> Result<Validation> {
    cfg.validate()?;
    let tables = load_tables(cfg)?;
    let (summary, _) = singularity_summary(cfg, &tables.g0)?;
    let v = validate(&tables.g0, &tables.g1, &summary.x0, &summary.a0, &summary.a1, &validation_params(cfg))?;
    write_outputs(cfg, &tables, &summary, &v)?;
    Ok(v)
}

fn write_outputs(cfg: &RunConfig, tables: &Tables, s: &ReportSummary, v: &Validation) -> Result<()> {
    write_file(&cfg.out_dir.join("asymptotics.json"), &pretty(&validation_json(v))?)?;
    let (m0, m1) = full_models(cfg, s)?;
    let dmax = tables.g0.dmax().min(tables.g1.dmax());
    let mut rows = plot_rows(&tables.g0, &m0, 1..=dmax)?;
    rows.extend(plot_rows(&tables.g1, &m1, 3..=dmax)?);
    write_file(&cfg.out_dir.join("asymptotics.csv"), &plot_csv(&rows))?;
    Ok(())
}

/// Structural checks of the tables: exact WDVV residual, the genus-one
/// recursion, and agreement of float entries with exact ones and with a
/// fresh float recursion.
pub fn recursion_checks(g0: &InvariantTable, g1: &InvariantTable) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let order = WDVV_ORDER.min(g0.exact_len());
    let res = verify_wdvv_series(g0, order)?;
    checks.push(Check::new(
        "wdvv_residual",
        res.is_zero(),
        match res.first_nonzero() {
            None => format!("residual vanishes through order {order}"),
            Some(d) => format!("nonzero residual at d = {d}"),
        },
    ));

    let n = g0.exact_len().min(g1.exact_len());
    let expect = genus1_table(n, &g0.truncated(n))?;
    let bad = (1..=n).find(|&d| expect.exact(d) != g1.exact(d));
    checks.push(Check::new(
        "genus1_recursion",
        bad.is_none(),
        match bad {
            None => format!("genus-one entries satisfy the recursion for d <= {n}"),
            Some(d) => format!("genus-one entry differs from the recursion at d = {d}"),
        },
    ));

    let prec = g0.precision_bits();
    if g0.scaled_len() > 0 {
        for t in [g0, g1] {
            let bad = t.scaled_exact_mismatch(SCALED_ULPS);
            let n = t.exact_len().min(t.scaled_len());
            checks.push(Check::new(
                format!("genus{}_float_matches_exact", t.genus().index()),
                bad.is_none(),
                match bad {
                    None => format!("float entries within {SCALED_ULPS} ulp of exact entries for d <= {n}"),
                    Some((d, u)) => format!("float entry {u:.1} ulp from exact at d = {d}"),
                },
            ));
        }
        let fresh = extend_genus0_scaled(Vec::new(), g0.scaled_len(), prec);
        let bad = fresh.iter().zip(g0.scaled_values()).position(|(a, b)| a != b);
        checks.push(Check::new(
            "float_recursion",
            bad.is_none(),
            match bad {
                None => format!("float entries reproduce bit for bit for d <= {}", fresh.len()),
                Some(i) => format!("float entry differs from a fresh recursion at d = {}", i + 1),
            },
        ));
    }
    Ok(checks)
}

pub fn bounds_check(g0: &InvariantTable) -> Check {
    let v = verify_bounds(g0);
    Check::new(
        "two_sided_bounds",
        v.is_empty(),
        if v.is_empty() {
            format!("no violations for d <= {}", g0.dmax())
        } else {
            format!(
                "{} violations, first at d = {} ({:?})",
                v.len(),
                v[0].d,
                v[0].side
            )
        },
    )
}

/// Runs the selected suites. Damaged cache records are failures (and are
/// then recomputed for the remaining checks).
pub fn cmd_verify(cfg: &RunConfig, suite: Suite) -> Result<Vec<Check>> {
    cfg.validate()?;
    let cache = TableCache::new(&cfg.cache_dir);
    let mut checks = Vec::new();
    for g in [Genus::Zero, Genus::One] {
        let loaded = cache.load(g)?;
        for i in &loaded.issues {
            checks.push(Check::new(
                "cache_integrity",
                false,
                format!(
                    "{} line {}{}: {}",
                    cache.path(g).display(),
                    i.line,
                    i.d.map(|d| format!(" (d = {d})")).unwrap_or_default(),
                    i.reason
                ),
            ));
        }
    }
    let tables = load_tables(cfg)?;
    if matches!(suite, Suite::All | Suite::Wdvv) {
        checks.extend(recursion_checks(&tables.g0, &tables.g1)?);
    }
    if matches!(suite, Suite::All | Suite::Bounds) {
        checks.push(bounds_check(&tables.g0.truncated(cfg.d_exact)));
    }
    if matches!(suite, Suite::All | Suite::Asymptotics) {
        let (s, sing_checks) = singularity_summary(cfg, &tables.g0)?;
        checks.extend(sing_checks);
        let v = validate(&tables.g0, &tables.g1, &s.x0, &s.a0, &s.a1, &validation_params(cfg))?;
        checks.extend(v.checks);
    }
    Ok(checks)
}

pub fn checks_json(checks: &[Check]) -> Value {
    json!({
        "passed": checks.iter().all(|c| c.passed),
        "checks": checks,
    })
}

/// Everything: singularity report, validation, verification, plot data, and
/// a combined `<out_dir>/report.json`. Returns whether all checks passed.
pub fn cmd_report(cfg: &RunConfig) -> Result<bool> {
    cfg.validate()?;
    let tables = load_tables(cfg)?;
    let sing = run_singularity(cfg, &tables.g0, None)?;
    let summary = ReportSummary {
        x0: sing.x0.clone(),
        a0: sing.a0.clone(),
        a1: sing.a1.clone(),
        precision_bits: cfg.precision_bits,
    };
    let v = validate(&tables.g0, &tables.g1, &summary.x0, &summary.a0, &summary.a1, &validation_params(cfg))?;
    write_outputs(cfg, &tables, &summary, &v)?;
    let mut structural = recursion_checks(&tables.g0, &tables.g1)?;
    structural.push(bounds_check(&tables.g0.truncated(cfg.d_exact)));
    let passed = sing.all_passed() && v.checks.iter().all(|c| c.passed) && structural.iter().all(|c| c.passed);
    let report = json!({
        "passed": passed,
        "config": {
            "precision_bits": cfg.precision_bits,
            "d_exact": cfg.d_exact,
            "d_float": cfg.d_float,
            "z_init": cfg.z_init,
            "taylor_order": cfg.taylor_order,
            "terms": cfg.terms,
        },
        "singularity": sing.to_json(),
        "asymptotics": validation_json(&v),
        "tables": structural,
    });
    write_file(&cfg.out_dir.join("report.json"), &pretty(&report)?)?;
    Ok(passed)
}
