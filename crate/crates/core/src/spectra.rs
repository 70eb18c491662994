//! Spectral distribution functions with piecewise-constant density.
//!
//! A [`SpectralDensity`] describes the derivative F′(λ) of an absolutely
//! continuous spectral distribution function on the harmonic interval
//! [−1/2, 1/2]. It always describes the centered process H − d; the mean
//! lives in the fading model. Segment endpoints are assigned to the segment
//! on their left, except λ = −1/2 which belongs to the first segment.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a built-in constructor output.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Tolerance applied when a caller-supplied target variance is checked.
pub const TARGET_VARIANCE_TOLERANCE: f64 = 1e-9;

/// SNR points at which [`limiting_ratio`] reports finite-SNR diagnostics.
pub const RATIO_DIAGNOSTIC_SNRS: [f64; 3] = [1e3, 1e6, 1e12];

/// `sin(πx)/(πx)` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

/// One constant piece of a spectral density on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
}

impl Segment {
    pub fn new(lo: f64, hi: f64, value: f64) -> Self {
        Segment { lo, hi, value }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mass(&self) -> f64 {
        self.width() * self.value
    }
}

/// Piecewise-constant spectral density on [−1/2, 1/2].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectralDensityRepr", into = "SpectralDensityRepr")]
pub struct SpectralDensity {
    segments: Vec<Segment>,
    variance: f64,
}

/// Wire form: `{"segments": [[lo, hi, value], ...], "variance": v}`.
#[derive(Serialize, Deserialize)]
struct SpectralDensityRepr {
    segments: Vec<(f64, f64, f64)>,
    variance: f64,
}

impl TryFrom<SpectralDensityRepr> for SpectralDensity {
    type Error = Error;

    fn try_from(repr: SpectralDensityRepr) -> Result<Self> {
        let segments = repr
            .segments
            .into_iter()
            .map(|(lo, hi, value)| Segment::new(lo, hi, value))
            .collect();
        make_piecewise(segments, Some(repr.variance))
    }
}

impl From<SpectralDensity> for SpectralDensityRepr {
    fn from(s: SpectralDensity) -> Self {
        SpectralDensityRepr {
            segments: s.segments.iter().map(|g| (g.lo, g.hi, g.value)).collect(),
            variance: s.variance,
        }
    }
}

impl SpectralDensity {
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Total spectral mass, equal to the variance of the centered process.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Density value F′(λ). Returns `None` outside [−1/2, 1/2].
    pub fn density_at(&self, lambda: f64) -> Option<f64> {
        if !(-0.5..=0.5).contains(&lambda) {
            return None;
        }
        // first segment whose right endpoint is >= lambda
        let idx = self.segments.partition_point(|s| s.hi < lambda);
        self.segments.get(idx).map(|s| s.value)
    }

    pub fn max_density(&self) -> f64 {
        self.segments.iter().map(|s| s.value).fold(0.0, f64::max)
    }

    /// Harmonics where the density changes value, including ±1/2.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = Vec::with_capacity(self.segments.len() + 1);
        pts.push(self.segments[0].lo);
        pts.extend(self.segments.iter().map(|s| s.hi));
        pts
    }

    /// The same shape rescaled to a different total mass.
    pub fn with_variance(&self, variance: f64) -> Result<SpectralDensity> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::domain(format!(
                "variance must be positive, got {variance}"
            )));
        }
        let scale = variance / self.variance;
        let segments = self
            .segments
            .iter()
            .map(|s| Segment::new(s.lo, s.hi, s.value * scale))
            .collect();
        make_piecewise(segments, Some(variance))
    }
}

fn check_half_width(w: f64, upper: f64, inclusive: bool) -> Result<()> {
    let ok = w > 0.0 && if inclusive { w <= upper } else { w < upper };
    if ok && w.is_finite() {
        Ok(())
    } else {
        let bracket = if inclusive { "]" } else { ")" };
        Err(Error::domain(format!(
            "half-width W must lie in (0, {upper}{bracket}, got {w}"
        )))
    }
}

/// Flat unit-variance band: F′ = 1/(2W) on |λ| ≤ W and zero elsewhere.
pub fn make_rect_band(w: f64) -> Result<SpectralDensity> {
    make_rect_band_scaled(w, 1.0)
}

/// Flat band of total mass `variance`: F′ = variance/(2W) on |λ| ≤ W.
pub fn make_rect_band_scaled(w: f64, variance: f64) -> Result<SpectralDensity> {
    check_half_width(w, 0.5, true)?;
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::domain(format!(
            "variance must be positive, got {variance}"
        )));
    }
    let level = variance / (2.0 * w);
    let segments = if w == 0.5 {
        vec![Segment::new(-0.5, 0.5, level)]
    } else {
        vec![
            Segment::new(-0.5, -w, 0.0),
            Segment::new(-w, w, level),
            Segment::new(w, 0.5, 0.0),
        ]
    };
    make_piecewise(segments, Some(variance))
}

/// Spectrum of the on-off process A·B: density 1/(4W) on |λ| ≤ W and on
/// 1/2 − W ≤ |λ| ≤ 1/2, zero elsewhere.
pub fn make_onoff_spectrum(w: f64) -> Result<SpectralDensity> {
    check_half_width(w, 0.25, false)?;
    let level = 1.0 / (4.0 * w);
    let segments = vec![
        Segment::new(-0.5, -0.5 + w, level),
        Segment::new(-0.5 + w, -w, 0.0),
        Segment::new(-w, w, level),
        Segment::new(w, 0.5 - w, 0.0),
        Segment::new(0.5 - w, 0.5, level),
    ];
    make_piecewise(segments, Some(1.0))
}

/// Validates a segment list covering [−1/2, 1/2].
///
/// When `target_variance` is given the total mass must match it within
/// [`TARGET_VARIANCE_TOLERANCE`]. The stored variance is always the computed
/// mass so that it agrees with the segments to rounding.
pub fn make_piecewise(segments: Vec<Segment>, target_variance: Option<f64>) -> Result<SpectralDensity> {
    let first = segments
        .first()
        .ok_or_else(|| Error::validation("spectral density needs at least one segment"))?;
    if first.lo != -0.5 {
        return Err(Error::validation(format!(
            "first segment must start at -0.5, starts at {}",
            first.lo
        )));
    }
    let last = segments.last().expect("nonempty");
    if last.hi != 0.5 {
        return Err(Error::validation(format!(
            "last segment must end at 0.5, ends at {}",
            last.hi
        )));
    }
    for (i, s) in segments.iter().enumerate() {
        if !(s.lo.is_finite() && s.hi.is_finite() && s.value.is_finite()) {
            return Err(Error::validation(format!("segment {i} has a non-finite field")));
        }
        if s.lo >= s.hi {
            return Err(Error::validation(format!(
                "segment {i} is empty or reversed: [{}, {}]",
                s.lo, s.hi
            )));
        }
        if s.value < 0.0 {
            return Err(Error::validation(format!(
                "segment {i} has negative density {}",
                s.value
            )));
        }
    }
    for (i, pair) in segments.windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        if b.lo < a.hi {
            return Err(Error::validation(format!(
                "segments {i} and {} overlap at [{}, {}]",
                i + 1,
                b.lo,
                a.hi
            )));
        }
        if b.lo > a.hi {
            return Err(Error::validation(format!(
                "gap between segments {i} and {}: ({}, {})",
                i + 1,
                a.hi,
                b.lo
            )));
        }
    }
    let mass: f64 = segments.iter().map(Segment::mass).sum();
    if !(mass > 0.0) {
        return Err(Error::validation("spectral density has zero total mass"));
    }
    if let Some(target) = target_variance {
        if !((mass - target).abs() <= TARGET_VARIANCE_TOLERANCE * target.abs().max(1.0)) {
            return Err(Error::validation(format!(
                "total mass {mass} does not match declared variance {target}"
            )));
        }
    }
    Ok(SpectralDensity {
        segments,
        variance: mass,
    })
}

/// Lebesgue measure of the harmonics where F′(λ) = 0.
pub fn zero_set_measure(s: &SpectralDensity) -> f64 {
    s.segments
        .iter()
        .filter(|g| g.value == 0.0)
        .map(Segment::width)
        .fold(0.0, |acc, w| acc + w)
}

/// r(m) = ∫ e^{i2πmλ} F′(λ) dλ, evaluated segment by segment in closed form.
pub fn autocovariance(s: &SpectralDensity, m: i64) -> Complex64 {
    if m == 0 {
        return Complex64::new(s.variance, 0.0);
    }
    let omega = 2.0 * PI * m as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for g in s.segments.iter().filter(|g| g.value != 0.0) {
        // ∫_lo^hi e^{iωλ} dλ = (e^{iωhi} − e^{iωlo}) / (iω)
        let (sh, ch) = (omega * g.hi).sin_cos();
        let (sl, cl) = (omega * g.lo).sin_cos();
        let diff = Complex64::new(ch - cl, sh - sl);
        acc += diff * Complex64::new(0.0, -g.value / omega);
    }
    acc
}

/// ∫ log(1 + snr·F′(λ)) dλ in nats.
pub fn spectral_log_integral(s: &SpectralDensity, snr: f64) -> Result<f64> {
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(Error::domain(format!(
            "snr must be positive and finite, got {snr}"
        )));
    }
    Ok(s.segments
        .iter()
        .map(|g| g.width() * (snr * g.value).ln_1p())
        .sum())
}

/// Limit of `spectral_log_integral(s, snr) / ln snr` as snr grows, with the
/// finite-SNR ratios that approach it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitingRatio {
    /// μ{λ : F′(λ) > 0}
    pub limit: f64,
    /// `(snr, integral / ln snr)` pairs
    pub diagnostics: Vec<(f64, f64)>,
}

pub fn limiting_ratio(s: &SpectralDensity) -> LimitingRatio {
    let diagnostics = RATIO_DIAGNOSTIC_SNRS
        .iter()
        .map(|&snr| {
            let integral = spectral_log_integral(s, snr).expect("positive snr");
            (snr, integral / snr.ln())
        })
        .collect();
    LimitingRatio {
        limit: 1.0 - zero_set_measure(s),
        diagnostics,
    }
}

/// Autocovariance values r(0), r(1), …, r(m_max).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutocovarianceSeq {
    values: Vec<Complex64>,
}

impl AutocovarianceSeq {
    /// Checks that r(0) is real and nonnegative and that |r(m)| ≤ r(0).
    ///
    /// r(0) = 0 is accepted for degenerate empirical sequences (constant
    /// paths); a Toeplitz covariance additionally requires r(0) > 0.
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        let r0 = *values
            .first()
            .ok_or_else(|| Error::validation("autocovariance needs at least lag 0"))?;
        if !(r0.re >= 0.0) || r0.im.abs() > 1e-12 * r0.re.max(1.0) {
            return Err(Error::validation(format!(
                "r(0) must be real and nonnegative, got {r0}"
            )));
        }
        let bound = r0.re * (1.0 + 1e-9) + 1e-15;
        if let Some((m, r)) = values.iter().enumerate().find(|(_, r)| r.norm() > bound) {
            return Err(Error::validation(format!(
                "|r({m})| = {} exceeds r(0) = {}",
                r.norm(),
                r0.re
            )));
        }
        let mut values = values;
        values[0] = Complex64::new(r0.re, 0.0);
        Ok(AutocovarianceSeq { values })
    }

    pub fn from_spectrum(s: &SpectralDensity, m_max: usize) -> Self {
        let values = (0..=m_max as i64).map(|m| autocovariance(s, m)).collect();
        AutocovarianceSeq { values }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn variance(&self) -> f64 {
        self.values[0].re
    }

    /// Largest lag held.
    pub fn max_lag(&self) -> usize {
        self.values.len() - 1
    }

    /// r(m) for any |m| ≤ max_lag, using r(−m) = conj r(m).
    pub fn at(&self, m: i64) -> Option<Complex64> {
        let r = *self.values.get(m.unsigned_abs() as usize)?;
        Some(if m < 0 { r.conj() } else { r })
    }
}
