use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;

use tailsum_core::asymptotics::{approximate, verify_angular_lemma};
use tailsum_core::diagnostics::build_table;
use tailsum_core::montecarlo::mc_table;
use tailsum_core::radial::{probe_condition_rho, probe_mda_limit, probe_o_regular};
use tailsum_core::{McEstimate, ModelSpec, TailApproximation, Variant};

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::format::{markdown, significant, write_csv};

fn thresholds(cfg: &RunConfig) -> Result<&[f64], CliError> {
    if cfg.u_list.is_empty() {
        return Err(CliError::Config("u_list is empty".into()));
    }
    if let Some(u) = cfg.u_list.iter().find(|u| !(**u > 0.0 && u.is_finite())) {
        return Err(CliError::Config(format!(
            "thresholds must be positive and finite, got {u}"
        )));
    }
    Ok(&cfg.u_list)
}

fn title(cfg: &RunConfig) -> String {
    match (cfg.rho, cfg.d) {
        (Some(rho), 2) => format!("Results of approximation for rho = {rho}"),
        _ => format!("Results of approximation (d = {})", cfg.d),
    }
}

/// Writes the diagnostics table to `cfg.output.path` (CSV plus a markdown
/// companion, or markdown only) and returns a summary; without a path the
/// table itself is returned.
pub fn cmd_table(cfg: &RunConfig, workers: Option<usize>) -> Result<String, CliError> {
    let spec = cfg.spec()?;
    let u_list = thresholds(cfg)?;
    let opts = cfg.mc.options(workers);
    let rows = build_table(&spec, u_list, cfg.mc.enabled.then_some(&opts), cfg.epsilon_c)?;
    let md = markdown(&rows, &title(cfg));
    let Some(path) = &cfg.output.path else {
        return Ok(match cfg.output.format {
            Format::Markdown => md,
            Format::Csv => {
                let mut buf = Vec::new();
                write_csv(&rows, &mut buf)?;
                String::from_utf8(buf).expect("CSV is UTF-8")
            }
        });
    };
    match cfg.output.format {
        Format::Markdown => {
            std::fs::write(path, &md)?;
            Ok(format!("wrote {} ({} rows)\n", path.display(), rows.len()))
        }
        Format::Csv => {
            write_csv(&rows, BufWriter::new(File::create(path)?))?;
            let companion = path.with_extension("md");
            std::fs::write(&companion, &md)?;
            Ok(format!(
                "wrote {} and {} ({} rows)\n",
                path.display(),
                companion.display(),
                rows.len()
            ))
        }
    }
}

/// Margin label in the caller's 1-based numbering.
fn label(spec: &ModelSpec, j: usize) -> usize {
    spec.original_index(j) + 1
}

fn describe(spec: &ModelSpec, a: &TailApproximation, out: &mut String) {
    let d = spec.dim();
    let ln10 = std::f64::consts::LN_10;
    writeln!(out, "  variant        {}", a.variant).unwrap();
    writeln!(
        out,
        "  first_order    {:e}  (log10 {:.4})",
        a.first_order,
        a.log_first_order / ln10
    )
    .unwrap();
    for j in 0..d {
        for i in (0..d).filter(|&i| i != j) {
            let k = j * d + i;
            writeln!(
                out,
                "  pair ({}, {})    {:e}  (log10 {:.4})",
                label(spec, j),
                label(spec, i),
                a.pair_terms[k],
                a.log_pair_terms[k] / ln10
            )
            .unwrap();
        }
    }
    writeln!(
        out,
        "  correction     {:e}  (log10 {:.4})",
        a.correction,
        a.log_correction / ln10
    )
    .unwrap();
    writeln!(
        out,
        "  second_order   {:e}  (log10 {:.4})",
        a.second_order,
        a.log_second_order / ln10
    )
    .unwrap();
}

/// Both approximations at every threshold, with per-pair terms.
pub fn cmd_approx(cfg: &RunConfig, both: bool) -> Result<String, CliError> {
    let spec = cfg.spec()?;
    let mut out = String::new();
    for &u in thresholds(cfg)? {
        writeln!(out, "u = {u}").unwrap();
        let variants: &[Variant] = if both {
            &[Variant::DensityForm, Variant::LimitForm]
        } else {
            std::slice::from_ref(&cfg.variant)
        };
        for &v in variants {
            describe(&spec, &approximate(&spec, u, v)?, &mut out);
        }
    }
    Ok(out)
}

pub fn run_mc(cfg: &RunConfig, workers: Option<usize>) -> Result<Vec<McEstimate>, CliError> {
    let spec = cfg.spec()?;
    let u_list = thresholds(cfg)?;
    Ok(mc_table(&spec, u_list, &cfg.mc.options(workers))?)
}

/// One line per threshold; everything except the trailing wall time is
/// determined by the config.
pub fn cmd_mc(cfg: &RunConfig, workers: Option<usize>) -> Result<String, CliError> {
    let mut out = String::new();
    for (u, e) in cfg.u_list.iter().zip(run_mc(cfg, workers)?) {
        writeln!(
            out,
            "u={u} value={:e} stderr={:e} rel_stderr={:.3e} n={} estimator={} seed={} elapsed={:.3}s",
            e.value,
            e.stderr,
            e.relative_stderr(),
            e.n,
            e.estimator,
            e.seed,
            e.elapsed
        )
        .unwrap();
    }
    Ok(out)
}

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "WARN"
    }
}

/// Condition-probe report: every measured number is printed next to its
/// verdict.
pub fn cmd_verify(cfg: &RunConfig) -> Result<String, CliError> {
    let spec = cfg.spec()?;
    let bundle = spec.scaling();
    let law = *spec.radial();
    let mut out = String::new();
    writeln!(
        out,
        "model: d = {}, radial = {law}, gamma = {}",
        spec.dim(),
        spec.gamma()
    )
    .unwrap();

    writeln!(
        out,
        "\n[max-domain of attraction] |P(X > u + x e*(u)) / P(X > u) / e^-x - 1|, x in -2..2"
    )
    .unwrap();
    let xs = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let grid = [1e4, 1e8];
    let probes = probe_mda_limit(bundle, &grid, &xs)?;
    let worst = |k: usize, radial: bool| {
        probes[k * xs.len()..(k + 1) * xs.len()]
            .iter()
            .map(|p| {
                if radial {
                    p.radial_deviation()
                } else {
                    p.margin_deviation()
                }
            })
            .fold(0.0, f64::max)
    };
    for (k, u) in grid.iter().enumerate() {
        writeln!(
            out,
            "  u = {u:e}: margins {:.4}, radius {:.4}",
            worst(k, false),
            worst(k, true)
        )
        .unwrap();
    }
    writeln!(
        out,
        "  {} deviation shrinks with u",
        status(worst(1, false) < worst(0, false))
    )
    .unwrap();

    writeln!(out, "\n[scaling limits] c_j = lim ln(u) e*_j(u) / u").unwrap();
    for j in 0..spec.dim() {
        match bundle.c_limit(j) {
            Ok(c) => writeln!(out, "  margin {}: c = {c:.6}", label(&spec, j)).unwrap(),
            Err(e) => writeln!(out, "  margin {}: WARN {e}", label(&spec, j)).unwrap(),
        }
    }

    writeln!(out, "\n[O-regular variation] e(2u)/e(u) on u = 1e3..1e9").unwrap();
    let o_grid: Vec<f64> = (0..=12).map(|k| 10f64.powf(3.0 + 0.5 * k as f64)).collect();
    let ratios = probe_o_regular(&law, &o_grid, 2.0)?;
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    writeln!(out, "  range [{lo:.4}, {hi:.4}]").unwrap();
    writeln!(
        out,
        "  {} bounded away from 0 and infinity",
        status(lo > 0.0 && hi.is_finite())
    )
    .unwrap();

    if spec.dim() > 1 {
        writeln!(
            out,
            "\n[asymptotic independence] max over pairs of sigma + c sqrt((1-sigma^2)/ln u) - (b_j/b_i) ln(eps e*_i(u))/ln u, c = {}, eps = 1",
            cfg.epsilon_c
        )
        .unwrap();
        for &u in &cfg.u_list {
            match probe_condition_rho(bundle, spec.sigma(), u, cfg.epsilon_c, 1.0) {
                Ok(m) => {
                    let worst = m.iter().map(|c| c.margin).fold(f64::NEG_INFINITY, f64::max);
                    let verdict = if worst < 0.0 { "holds" } else { "fails" };
                    writeln!(out, "  u = {}: margin {worst:+.4} ({verdict})", significant(u, 6)).unwrap();
                }
                Err(e) => writeln!(out, "  u = {}: n/a ({e})", significant(u, 6)).unwrap(),
            }
        }

        writeln!(out, "\n[angular integral] quadrature / asymptotic formula for margin 1").unwrap();
        let j = spec.position_of(0);
        let mut ratios = Vec::new();
        for u in grid {
            let check = verify_angular_lemma(law, spec.lambda(j), spec.beta(j), spec.gamma(), spec.dim(), u)?;
            writeln!(out, "  u = {u:e}: ratio {:.5}", check.ratio).unwrap();
            ratios.push(check.ratio);
        }
        let closer = (ratios[1] - 1.0).abs() < (ratios[0] - 1.0).abs();
        writeln!(out, "  {} ratio approaches 1", status(closer)).unwrap();
    }
    Ok(out)
}

/// Thread count from `TAILSUM_THREADS`, if set.
pub fn workers_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var("TAILSUM_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "TAILSUM_THREADS must be a positive integer, got '{v}'"
            ))),
        },
    }
}
