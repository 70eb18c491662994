use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde_json::json;

use prelog_core::bounds::{miso_prelog_lower, prelog_report, BoundCurve, BoundKind, FadingModel};
use prelog_core::processes::{empirical_autocov, simulate_model_with, SynthOptions};
use prelog_core::spectra::{autocovariance, limiting_ratio, spectral_log_integral, zero_set_measure};
use prelog_core::toeplitz::{szego_gap_with, ToeplitzOptions};
use prelog_core::MarginalLaw;

use crate::args::{required, Common, MisoArgs, ReportArgs, SimulateArgs, SpectrumArgs, SweepArgs, SzegoArgs};
use crate::error::{CliError, CliResult};
use crate::model::{parse_antenna, parse_grid, parse_model, parse_real};
use crate::output::{with_sink, Cell, Table};

/// Human-readable key/value lines. They go to stdout when the data goes to
/// a file, and to stderr when the data itself is on stdout.
struct Summary(Vec<String>);

impl Summary {
    fn new() -> Self {
        Summary(Vec::new())
    }

    fn line(&mut self, key: &str, value: impl std::fmt::Display) {
        self.0.push(format!("{key}: {value}"));
    }

    fn print(&self, data_on_stdout: bool) {
        for l in &self.0 {
            if data_on_stdout {
                eprintln!("{l}");
            } else {
                println!("{l}");
            }
        }
    }
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "none".to_string(), |v| v.to_string())
}

fn finish(
    table: &Table,
    common: &Common,
    document: Option<serde_json::Value>,
    summary: Summary,
) -> CliResult<()> {
    table.emit(common.output.as_deref(), common.format, document)?;
    summary.print(common.output.is_none());
    Ok(())
}

pub fn spectrum(args: SpectrumArgs) -> CliResult<()> {
    let model = parse_model(required(&args.model, "--model")?)?;
    let snrs = parse_grid(&args.snr, "snr")?;
    let s = model.spectrum();

    let mut table = Table::new(&["snr", "log_integral", "ratio"]);
    for &snr in &snrs {
        let integral = spectral_log_integral(s, snr)?;
        let ratio = (snr > 1.0).then(|| integral / snr.ln());
        table.push(vec![snr.into(), integral.into(), ratio.into()]);
    }

    let zero = zero_set_measure(s);
    let limit = limiting_ratio(s).limit;
    let segments: Vec<[f64; 3]> = s.segments().iter().map(|g| [g.lo, g.hi, g.value]).collect();
    let document = json!({
        "model": model.name(),
        "variance": s.variance(),
        "zero_set_measure": zero,
        "limiting_ratio": limit,
        "segments": segments,
        "rows": table.json_rows(),
    });

    let mut summary = Summary::new();
    summary.line("model", model.name());
    summary.line("segments", s.segments().len());
    summary.line("zero-set-measure", zero);
    summary.line("limiting-ratio", limit);
    finish(&table, &args.common, Some(document), summary)
}

fn bound_kinds(model: &FadingModel) -> (BoundKind, BoundKind) {
    match model.law() {
        MarginalLaw::PhaseNoise => (BoundKind::PhaseLb, BoundKind::PhaseUb),
        _ => (BoundKind::LowerLb, BoundKind::UpperCoherent),
    }
}

pub fn bound_sweep(args: SweepArgs) -> CliResult<()> {
    let model = parse_model(required(&args.model, "--model")?)?;
    let snrs = parse_grid(&args.snr, "snr")?;
    let upsilons = parse_grid(&args.upsilon, "upsilon")?;
    let (lower_kind, upper_kind) = bound_kinds(&model);
    let lower = BoundCurve::evaluate(&model, lower_kind, &snrs, &upsilons)?;
    let upper = BoundCurve::evaluate(&model, upper_kind, &snrs, &upsilons)?;

    let mut table = Table::new(&["snr", "lb", "upsilon_star", "ub_coherent"]);
    for (lo, hi) in lower.points.iter().zip(&upper.points) {
        table.push(vec![
            lo.snr.into(),
            lo.value.into(),
            lo.upsilon_star.into(),
            hi.value.into(),
        ]);
    }

    let mut summary = Summary::new();
    summary.line("model", model.name());
    summary.line("points", snrs.len());
    finish(&table, &args.common, None, summary)
}

pub fn prelog(args: ReportArgs) -> CliResult<()> {
    let model = parse_model(required(&args.model, "--model")?)?;
    let snrs = parse_grid(&args.snr, "snr")?;
    let upsilons = parse_grid(&args.upsilon, "upsilon")?;
    let report = prelog_report(&model, &snrs, &upsilons)?;

    let mut table = Table::new(&["snr", "lb", "upsilon_star", "ratio", "floored", "slope"]);
    for p in &report.finite_ratios {
        table.push(vec![
            p.snr.into(),
            p.lb.into(),
            p.upsilon_star.into(),
            p.ratio.into(),
            p.floored.into(),
            p.slope.into(),
        ]);
    }
    let document = json!({
        "model": report.model,
        "zero_set_measure": report.zero_set_measure,
        "prelog_lower": report.prelog_lower,
        "analytic_limit": report.analytic_limit,
        "upper_prelog": report.upper_prelog,
        "note1_gap": report.note1_gap,
        "lower_bound_kind": report.lower_bound_kind,
        "rows": table.json_rows(),
    });

    let mut summary = Summary::new();
    summary.line("model", &report.model);
    summary.line("zero-set-measure", report.zero_set_measure);
    summary.line("prelog-lower", opt(report.prelog_lower));
    summary.line("analytic-limit", opt(report.analytic_limit));
    summary.line("upper-prelog", opt(report.upper_prelog));
    summary.line("note1-gap", report.note1_gap);
    if let Some(last) = report.finite_ratios.last() {
        summary.line("last-ratio", last.ratio);
        summary.line("last-slope", opt(last.slope));
    }
    finish(&table, &args.common, Some(document), summary)
}

pub fn szego(args: SzegoArgs) -> CliResult<()> {
    let model = parse_model(required(&args.model, "--model")?)?;
    let snr = parse_real(&args.snr)?;
    let dims = crate::model::parse_dims(&args.n)?;
    let opts = ToeplitzOptions {
        max_dimension: args.max_dim,
    };
    let rows = szego_gap_with(model.spectrum(), snr, &dims, &opts)?;

    let mut table = Table::new(&["n", "rate", "integral", "gap"]);
    for r in &rows {
        table.push(vec![r.n.into(), r.rate.into(), r.integral.into(), r.gap.into()]);
    }
    let mut summary = Summary::new();
    summary.line("model", model.name());
    summary.line("snr", snr);
    summary.line("integral", rows[0].integral);
    finish(&table, &args.common, None, summary)
}

pub fn simulate(args: SimulateArgs) -> CliResult<()> {
    let model = parse_model(required(&args.model, "--model")?)?;
    let n: usize = args.n.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::usage(format!(
            "path length must be a positive integer, got {:?}",
            args.n
        ))
    })?;
    if args.max_lag >= n {
        return Err(CliError::usage(format!(
            "--max-lag {} must be below --n {n}",
            args.max_lag
        )));
    }
    let opts = SynthOptions {
        harmonics: args.harmonics,
    };
    let path = simulate_model_with(&model, n, args.seed, &opts)?;
    let output = args.common.output.as_deref();

    if args.binary {
        with_sink(output, |out| {
            path.write_binary(&mut *out).map_err(std::io::Error::other)?;
            out.flush()
        })?;
    } else {
        let mut table = Table::new(&["k", "re", "im"]);
        for (k, h) in path.values.iter().enumerate() {
            table.push(vec![(k + 1).into(), h.re.into(), h.im.into()]);
        }
        table.emit(output, args.common.format, None)?;
    }

    let empirical = empirical_autocov(&path, args.max_lag)?;
    let mut acf = Table::new(&["m", "empirical_re", "empirical_im", "analytic_re", "analytic_im"]);
    for (m, r) in empirical.values().iter().enumerate() {
        let a = autocovariance(model.spectrum(), m as i64);
        acf.push(vec![m.into(), r.re.into(), r.im.into(), a.re.into(), a.im.into()]);
    }

    let zero = Complex64::new(0.0, 0.0);
    let zeros_at = |parity: usize| path.values.iter().skip(parity).step_by(2).all(|h| *h == zero);
    // k is 1-based, so index 0 holds k = 1
    let zero_class = match (zeros_at(1), zeros_at(0)) {
        (true, false) => "even",
        (false, true) => "odd",
        (true, true) => "all",
        (false, false) => "none",
    };
    let nonzero = path.values.iter().filter(|h| **h != zero).count() as f64 / n as f64;
    let power = path.values.iter().map(|h| h.norm_sqr()).sum::<f64>() / n as f64;

    let mut summary = Summary::new();
    summary.line("model", model.name());
    summary.line("n", n);
    summary.line("seed", args.seed);
    summary.line("mean-power", power);
    summary.line("nonzero-fraction", nonzero);
    summary.line("zero-indices", zero_class);
    summary.line("unit-modulus", path.values.iter().all(|h| h.norm() == 1.0));

    let data_on_stdout = output.is_none();
    match args.autocov.as_deref() {
        Some(file) => acf.emit(Some(file), args.common.format, None)?,
        None if data_on_stdout => {
            let mut buf = Vec::new();
            acf.write_csv(&mut buf)
                .map_err(|e| CliError::io("formatting table", e))?;
            std::io::stderr()
                .write_all(&buf)
                .map_err(|e| CliError::io("writing stderr", e))?;
        }
        None => acf.emit(None, args.common.format, None)?,
    }
    summary.print(data_on_stdout);
    Ok(())
}

pub fn miso(args: MisoArgs) -> CliResult<()> {
    let items: Vec<&str> = required(&args.spectra, "--spectra")?
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    let spectra = items
        .iter()
        .map(|i| parse_antenna(i))
        .collect::<CliResult<Vec<_>>>()?;
    for (t, s) in spectra.iter().enumerate() {
        if (s.variance() - 1.0).abs() > prelog_core::spectra::TARGET_VARIANCE_TOLERANCE {
            return Err(CliError::usage(format!(
                "antenna {t} spectrum has variance {}, need 1",
                s.variance()
            )));
        }
    }
    let masses = vec![0.0; spectra.len()];
    let value = miso_prelog_lower(&spectra, &masses)?;

    let mut table = Table::new(&["antenna", "spectrum", "zero_set_measure"]);
    for (t, (item, s)) in items.iter().zip(&spectra).enumerate() {
        table.push(vec![
            (t + 1).into(),
            Cell::from(*item),
            zero_set_measure(s).into(),
        ]);
    }
    let document = json!({ "miso_prelog": value, "rows": table.json_rows() });
    let mut summary = Summary::new();
    summary.line("antennas", spectra.len());
    summary.line("miso-prelog", value);
    finish(&table, &args.common, Some(document), summary)
}

pub fn man(output: Option<&Path>) -> CliResult<()> {
    let page = crate::man::render();
    with_sink(output, |out| out.write_all(page.as_bytes()))
}
