use crate::error::{Error, Result};

/// `points` values from `lo` to `hi` inclusive, equally spaced in log.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi.is_finite() && lo.is_finite()) {
        return Err(Error::domain(format!(
            "log grid needs 0 < lo, finite bounds; got {lo}:{hi}"
        )));
    }
    match points {
        0 => Err(Error::domain("grid needs at least one point")),
        1 if lo == hi => Ok(vec![lo]),
        1 => Err(Error::domain("a one-point grid needs lo == hi")),
        _ if !(lo < hi) => Err(Error::domain(format!("grid needs lo < hi, got {lo}:{hi}"))),
        _ => {
            // base 10 keeps decade points such as 1e3 exact
            let (a, b) = (lo.log10(), hi.log10());
            let step = (b - a) / (points - 1) as f64;
            Ok((0..points)
                .map(|i| match i {
                    0 => lo,
                    i if i == points - 1 => hi,
                    i => 10f64.powf(a + step * i as f64),
                })
                .collect())
        }
    }
}

pub(crate) fn check_increasing(grid: &[f64], what: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::domain(format!("{what} grid is empty")));
    }
    if let Some(bad) = grid.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::domain(format!(
            "{what} grid has a non-positive value {bad}"
        )));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain(format!("{what} grid must be strictly increasing")));
    }
    Ok(())
}
