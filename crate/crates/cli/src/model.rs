//! Model and grid mini-languages.
//!
//! Models are `name` or `name:key=value,...`:
//!
//! * `rayleigh-band:W=0.1`
//! * `onoff:W=1/16`
//! * `phase-noise`
//! * `custom:spectrum=path.json,tail=rayleigh|onoff|phase-noise`

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use prelog_core::bounds::FadingModel;
use prelog_core::grid::log_grid;
use prelog_core::spectra::{make_rect_band, SpectralDensity};
use prelog_core::MarginalLaw;

use crate::error::{CliError, CliResult};

/// Parses a real number, also accepting a simple fraction `a/b`.
pub fn parse_real(text: &str) -> CliResult<f64> {
    let text = text.trim();
    let value = match text.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad_number(text))?;
            let b: f64 = b.trim().parse().map_err(|_| bad_number(text))?;
            a / b
        }
        None => text.parse().map_err(|_| bad_number(text))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad_number(text))
    }
}

fn bad_number(text: &str) -> CliError {
    CliError::usage(format!("not a finite number: {text:?}"))
}

fn parse_params(name: &str, text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut params = BTreeMap::new();
    for item in text.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("model {name}: expected key=value, got {item:?}")))?;
        if params
            .insert(k.trim().to_string(), v.trim().to_string())
            .is_some()
        {
            return Err(CliError::usage(format!("model {name}: repeated key {k:?}")));
        }
    }
    Ok(params)
}

fn take(params: &mut BTreeMap<String, String>, name: &str, key: &str) -> CliResult<String> {
    params
        .remove(key)
        .ok_or_else(|| CliError::usage(format!("model {name}: missing {key}=...")))
}

fn no_leftovers(params: &BTreeMap<String, String>, name: &str) -> CliResult<()> {
    match params.keys().next() {
        Some(k) => Err(CliError::usage(format!("model {name}: unknown parameter {k:?}"))),
        None => Ok(()),
    }
}

pub fn parse_law(text: &str) -> CliResult<MarginalLaw> {
    match text {
        "rayleigh" => Ok(MarginalLaw::Rayleigh),
        "onoff" => Ok(MarginalLaw::OnOff),
        "phase-noise" => Ok(MarginalLaw::PhaseNoise),
        other => Err(CliError::usage(format!(
            "unknown tail law {other:?} (expected rayleigh, onoff or phase-noise)"
        ))),
    }
}

/// Loads a spectral density from a JSON file of the form
/// `{"segments": [[lo, hi, value], ...], "variance": v}`.
pub fn load_spectrum(path: &Path) -> CliResult<SpectralDensity> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("spectrum file {}: {e}", path.display())))
}

pub fn parse_model(spec: &str) -> CliResult<FadingModel> {
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let mut params = parse_params(name, rest)?;
    let model = match name {
        "rayleigh-band" => {
            let w = parse_real(&take(&mut params, name, "W")?)?;
            FadingModel::rayleigh_band(w)?
        }
        "onoff" => {
            let w = parse_real(&take(&mut params, name, "W")?)?;
            FadingModel::onoff(w)?
        }
        "phase-noise" => FadingModel::phase_noise(),
        "custom" => {
            let path = take(&mut params, name, "spectrum")?;
            let law = parse_law(&take(&mut params, name, "tail")?)?;
            let spectrum = load_spectrum(Path::new(&path))?;
            FadingModel::new(spec, spectrum, law)?
        }
        other => return Err(CliError::usage(format!("unknown model {other:?}"))),
    };
    no_leftovers(&params, name)?;
    Ok(model)
}

/// One MISO antenna spectrum: `W=x` for a flat band or `file=path.json`.
pub fn parse_antenna(item: &str) -> CliResult<SpectralDensity> {
    let (key, value) = item.split_once('=').ok_or_else(|| {
        CliError::usage(format!(
            "antenna spectrum: expected W=x or file=path, got {item:?}"
        ))
    })?;
    match key.trim() {
        "W" => Ok(make_rect_band(parse_real(value)?)?),
        "file" => load_spectrum(Path::new(value.trim())),
        other => Err(CliError::usage(format!(
            "antenna spectrum: unknown key {other:?}"
        ))),
    }
}

/// A grid: `lo:hi:points` (log-spaced, lo < hi, points ≥ 2), a single
/// value, or a comma list of increasing values.
pub fn parse_grid(spec: &str, what: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let grid = match parts.as_slice() {
        [lo, hi, points] => {
            let (lo, hi) = (parse_real(lo)?, parse_real(hi)?);
            let points: usize = points
                .trim()
                .parse()
                .map_err(|_| CliError::usage(format!("{what} grid: bad point count {points:?}")))?;
            if !(lo < hi) || points < 2 {
                return Err(CliError::usage(format!(
                    "{what} grid {spec:?} needs lo < hi and at least 2 points"
                )));
            }
            log_grid(lo, hi, points)?
        }
        [list] => list.split(',').map(parse_real).collect::<CliResult<Vec<_>>>()?,
        _ => {
            return Err(CliError::usage(format!(
                "{what} grid {spec:?}: expected lo:hi:points or a list"
            )))
        }
    };
    if grid.is_empty() {
        return Err(CliError::usage(format!("{what} grid is empty")));
    }
    if let Some(v) = grid.iter().find(|v| !(**v > 0.0)) {
        return Err(CliError::usage(format!(
            "{what} grid values must be positive, got {v}"
        )));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CliError::usage(format!(
            "{what} grid must be strictly increasing"
        )));
    }
    Ok(grid)
}

/// Comma list of positive dimensions, e.g. `64,256,512`.
pub fn parse_dims(spec: &str) -> CliResult<Vec<usize>> {
    let dims = spec
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .ok()
                .filter(|n| *n > 0)
                .ok_or_else(|| CliError::usage(format!("bad dimension {s:?}")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    if dims.is_empty() {
        return Err(CliError::usage("dimension list is empty"));
    }
    Ok(dims)
}
