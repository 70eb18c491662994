//! Capacity and pre-log bounds for peak-power limited noncoherent fading
//! channels with memory.
//!
//! All values are in nats. SNR is the ratio A²/σ² of the peak input power
//! to the additive noise variance.

use std::f64::consts::{E, PI};
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{check_increasing, log_grid};
use crate::spectra::{
    make_onoff_spectrum, make_rect_band, spectral_log_integral, zero_set_measure, SpectralDensity,
};

/// Lower end of the default Υ search grid.
pub const UPSILON_GRID_LO: f64 = 1e-3;
/// Upper end of the default Υ search grid.
pub const UPSILON_GRID_HI: f64 = 4.0;
pub const UPSILON_GRID_POINTS: usize = 60;

/// Pre-log of the memoryless phase-noise channel.
pub const PHASE_NOISE_PRELOG: f64 = 0.5;

/// Law of the fading magnitude |H₁|.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MarginalLaw {
    /// Zero-mean unit-variance circularly-symmetric Gaussian: P(|H| ≥ Υ) = e^{−Υ²}.
    Rayleigh,
    /// H = A·B with P(A = 1) = ½ and B Gaussian of variance 2: P(|H| ≥ Υ) = ½e^{−Υ²/2}.
    OnOff,
    /// H = e^{iΘ}: P(|H| ≥ Υ) = 1{Υ ≤ 1}.
    PhaseNoise,
}

impl MarginalLaw {
    pub fn tail(self, upsilon: f64) -> f64 {
        match self {
            MarginalLaw::Rayleigh => (-upsilon * upsilon).exp(),
            MarginalLaw::OnOff => 0.5 * (-upsilon * upsilon / 2.0).exp(),
            MarginalLaw::PhaseNoise => {
                if upsilon <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn mass_at_zero(self) -> f64 {
        match self {
            MarginalLaw::OnOff => 0.5,
            MarginalLaw::Rayleigh | MarginalLaw::PhaseNoise => 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MarginalLaw::Rayleigh => "rayleigh",
            MarginalLaw::OnOff => "onoff",
            MarginalLaw::PhaseNoise => "phase-noise",
        }
    }
}

/// How a fading model was built; samplers dispatch on this.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Construction {
    RayleighBand { half_width: f64 },
    OnOff { half_width: f64 },
    PhaseNoise,
    Custom,
}

/// A unit-variance fading law: spectrum of the centered process plus the
/// law of |H₁|.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FadingModel {
    name: String,
    spectrum: SpectralDensity,
    mean_d: Complex64,
    law: MarginalLaw,
    construction: Construction,
}

impl FadingModel {
    /// A custom model. The spectrum must carry unit variance.
    pub fn new(name: impl Into<String>, spectrum: SpectralDensity, law: MarginalLaw) -> Result<Self> {
        FadingModel::build(name.into(), spectrum, law, Construction::Custom)
    }

    fn build(
        name: String,
        spectrum: SpectralDensity,
        law: MarginalLaw,
        construction: Construction,
    ) -> Result<Self> {
        if (spectrum.variance() - 1.0).abs() > crate::spectra::TARGET_VARIANCE_TOLERANCE {
            return Err(Error::validation(format!(
                "fading spectrum must have unit variance, has {}",
                spectrum.variance()
            )));
        }
        Ok(FadingModel {
            name,
            spectrum,
            mean_d: Complex64::new(0.0, 0.0),
            law,
            construction,
        })
    }

    /// Zero-mean Gaussian fading with a flat band of half-width `w`.
    pub fn rayleigh_band(w: f64) -> Result<Self> {
        FadingModel::build(
            format!("rayleigh-band:W={w}"),
            make_rect_band(w)?,
            MarginalLaw::Rayleigh,
            Construction::RayleighBand { half_width: w },
        )
    }

    /// The alternating on-off process A·B with B band-limited to `w`.
    pub fn onoff(w: f64) -> Result<Self> {
        FadingModel::build(
            format!("onoff:W={w}"),
            make_onoff_spectrum(w)?,
            MarginalLaw::OnOff,
            Construction::OnOff { half_width: w },
        )
    }

    /// Memoryless uniform phase noise, flat spectrum.
    pub fn phase_noise() -> Self {
        FadingModel::build(
            "phase-noise".into(),
            make_rect_band(0.5).expect("valid"),
            MarginalLaw::PhaseNoise,
            Construction::PhaseNoise,
        )
        .expect("unit variance")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn spectrum(&self) -> &SpectralDensity {
        &self.spectrum
    }

    pub fn mean_d(&self) -> Complex64 {
        self.mean_d
    }

    pub fn law(&self) -> MarginalLaw {
        self.law
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn variance(&self) -> f64 {
        self.spectrum.variance()
    }

    /// P(|H₁| ≥ Υ) for Υ > 0.
    pub fn tail(&self, upsilon: f64) -> Result<f64> {
        check_upsilon(upsilon)?;
        Ok(self.law.tail(upsilon))
    }

    /// P(H₁ = 0).
    pub fn mass_at_zero(&self) -> f64 {
        self.law.mass_at_zero()
    }
}

fn check_snr(snr: f64) -> Result<()> {
    if snr > 0.0 && snr.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "snr must be positive and finite, got {snr}"
        )))
    }
}

fn check_upsilon(upsilon: f64) -> Result<()> {
    if upsilon > 0.0 && upsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "upsilon must be positive and finite, got {upsilon}"
        )))
    }
}

/// Capacity lower bound for a fixed threshold Υ:
///
/// P{|H₁|≥Υ}·log SNR − P{|H₁|≥Υ}·(1 − log Υ²) − ∫ log(1 + SNR·F′(λ)) dλ.
///
/// The value may be negative; it is returned as is.
pub fn capacity_lower_bound(model: &FadingModel, snr: f64, upsilon: f64) -> Result<f64> {
    check_snr(snr)?;
    let p = model.tail(upsilon)?;
    let coherent = p * snr.ln() - p * (1.0 - (upsilon * upsilon).ln());
    Ok(coherent - spectral_log_integral(&model.spectrum, snr)?)
}

/// Best Υ on a grid and the bound it attains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizedBound {
    pub upsilon: f64,
    pub value: f64,
}

/// The default Υ grid: log-spaced on [1e−3, 4] with 60 points.
pub fn default_upsilon_grid() -> Vec<f64> {
    log_grid(UPSILON_GRID_LO, UPSILON_GRID_HI, UPSILON_GRID_POINTS).expect("static grid")
}

/// Grid argmax of [`capacity_lower_bound`]; ties go to the smaller Υ.
pub fn optimize_upsilon(model: &FadingModel, snr: f64, grid: &[f64]) -> Result<OptimizedBound> {
    if grid.is_empty() {
        return Err(Error::domain("upsilon grid is empty"));
    }
    let mut best: Option<OptimizedBound> = None;
    for &upsilon in grid {
        let value = capacity_lower_bound(model, snr, upsilon)?;
        let better = match best {
            None => true,
            Some(b) => value > b.value || (value == b.value && upsilon < b.upsilon),
        };
        if better {
            best = Some(OptimizedBound { upsilon, value });
        }
    }
    Ok(best.expect("nonempty grid"))
}

/// Pre-log lower bound μ{λ : F′(λ) = 0}, valid when the law has no mass at zero.
pub fn prelog_lower_bound(model: &FadingModel) -> Result<f64> {
    if model.mass_at_zero() > 0.0 {
        return Err(Error::precondition(format!(
            "model {} has P(H = 0) = {} > 0; the zero-set bound does not apply",
            model.name,
            model.mass_at_zero()
        )));
    }
    Ok(zero_set_measure(&model.spectrum))
}

/// Coherent average-power bound p·log(1 + SNR/p) with p = P{|H₁| > 0}.
pub fn coherent_avg_upper_bound(model: &FadingModel, snr: f64) -> Result<f64> {
    check_snr(snr)?;
    Ok(coherent_bound(1.0 - model.mass_at_zero(), snr))
}

fn coherent_bound(p: f64, snr: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * (snr / p).ln_1p()
    }
}

/// Pre-log upper bound P{|H₁| > 0}.
pub fn masspoint_prelog_upper(model: &FadingModel) -> f64 {
    1.0 - model.mass_at_zero()
}

/// Lower bound on the memoryless phase-noise capacity with σ² = 1:
/// log A² − [½·log(4πe(2 + 4A²)) − log 2] at A² = SNR.
pub fn phase_noise_lower_bound(snr: f64) -> Result<f64> {
    check_snr(snr)?;
    let cond_entropy = 0.5 * (4.0 * PI * E * (2.0 + 4.0 * snr)).ln() - 2f64.ln();
    Ok(snr.ln() - cond_entropy)
}

/// Average-power phase-noise capacity ½·log(1 + SNR/2), an upper bound on
/// the peak-power capacity.
pub fn phase_noise_upper_bound(snr: f64) -> Result<f64> {
    check_snr(snr)?;
    Ok(0.5 * (snr / 2.0).ln_1p())
}

/// MISO pre-log lower bound max_t μ{λ : F′_t(λ) = 0}.
pub fn miso_prelog_lower(spectra: &[SpectralDensity], masses_at_zero: &[f64]) -> Result<f64> {
    if spectra.is_empty() {
        return Err(Error::domain("MISO bound needs at least one antenna"));
    }
    if spectra.len() != masses_at_zero.len() {
        return Err(Error::domain(format!(
            "{} spectra but {} masses at zero",
            spectra.len(),
            masses_at_zero.len()
        )));
    }
    if let Some((t, m)) = masses_at_zero.iter().enumerate().find(|(_, m)| **m != 0.0) {
        return Err(Error::precondition(format!(
            "antenna {t} has P(H = 0) = {m}; the MISO bound needs no mass at zero"
        )));
    }
    Ok(spectra.iter().map(zero_set_measure).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundKind {
    LowerLb,
    UpperCoherent,
    PhaseLb,
    PhaseUb,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint {
    pub snr: f64,
    pub value: f64,
    pub upsilon_star: Option<f64>,
}

/// Bound values over a strictly increasing SNR grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub kind: BoundKind,
    pub points: Vec<BoundPoint>,
}

impl BoundCurve {
    /// Evaluates `kind` at each grid point. Grid points run concurrently;
    /// output order follows the grid.
    pub fn evaluate(
        model: &FadingModel,
        kind: BoundKind,
        snr_grid: &[f64],
        upsilon_grid: &[f64],
    ) -> Result<BoundCurve> {
        check_increasing(snr_grid, "snr")?;
        let points = snr_grid
            .par_iter()
            .map(|&snr| {
                let (value, upsilon_star) = match kind {
                    BoundKind::LowerLb => {
                        let best = optimize_upsilon(model, snr, upsilon_grid)?;
                        (best.value, Some(best.upsilon))
                    }
                    BoundKind::UpperCoherent => (coherent_avg_upper_bound(model, snr)?, None),
                    BoundKind::PhaseLb => (phase_noise_lower_bound(snr)?, None),
                    BoundKind::PhaseUb => (phase_noise_upper_bound(snr)?, None),
                };
                Ok(BoundPoint {
                    snr,
                    value,
                    upsilon_star,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BoundCurve { kind, points })
    }

    /// CSV with columns `snr,value,upsilon_star`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["snr", "value", "upsilon_star"])?;
        for p in &self.points {
            w.write_record([
                p.snr.to_string(),
                p.value.to_string(),
                p.upsilon_star.map(|u| u.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// One finite-SNR point of a pre-log report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub snr: f64,
    /// Raw lower bound in nats, possibly negative.
    pub lb: f64,
    /// max(lb, 0) / ln snr
    pub ratio: f64,
    pub upsilon_star: Option<f64>,
    /// True when the raw bound was negative and the ratio was floored at 0.
    pub floored: bool,
    /// Increase of `lb` per unit of ln snr since the previous grid point.
    pub slope: Option<f64>,
}

/// Analytic pre-log values for a model together with the finite-SNR
/// trajectory of its lower bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrelogReport {
    pub model: String,
    /// μ{λ : F′(λ) = 0}, the pre-log of Gaussian fading with this spectrum.
    pub zero_set_measure: f64,
    /// The zero-set lower bound, present when the law has no mass at zero.
    pub prelog_lower: Option<f64>,
    /// Limit the finite ratios approach, when known.
    pub analytic_limit: Option<f64>,
    pub upper_prelog: Option<f64>,
    /// Upper pre-log strictly below the Gaussian pre-log of the same spectrum.
    pub note1_gap: bool,
    pub lower_bound_kind: BoundKind,
    pub finite_ratios: Vec<RatioPoint>,
}

pub fn prelog_report(model: &FadingModel, snr_grid: &[f64], upsilon_grid: &[f64]) -> Result<PrelogReport> {
    check_increasing(snr_grid, "snr")?;
    if upsilon_grid.is_empty() {
        return Err(Error::domain("upsilon grid is empty"));
    }
    let zero_set = zero_set_measure(&model.spectrum);
    let prelog_lower = prelog_lower_bound(model).ok();

    let (lower_bound_kind, analytic_limit, upper_prelog) = match model.law {
        MarginalLaw::PhaseNoise => (
            BoundKind::PhaseLb,
            Some(PHASE_NOISE_PRELOG),
            Some(PHASE_NOISE_PRELOG),
        ),
        _ if model.mass_at_zero() > 0.0 => (BoundKind::LowerLb, None, Some(masspoint_prelog_upper(model))),
        _ => (BoundKind::LowerLb, prelog_lower, Some(1.0)),
    };

    let curve = BoundCurve::evaluate(model, lower_bound_kind, snr_grid, upsilon_grid)?;
    let mut finite_ratios = Vec::with_capacity(curve.points.len());
    let mut prev: Option<&BoundPoint> = None;
    for p in &curve.points {
        let floored = p.value < 0.0;
        let ratio = p.value.max(0.0) / p.snr.ln();
        let slope = prev.map(|q| (p.value - q.value) / (p.snr.ln() - q.snr.ln()));
        finite_ratios.push(RatioPoint {
            snr: p.snr,
            lb: p.value,
            ratio,
            upsilon_star: p.upsilon_star,
            floored,
            slope,
        });
        prev = Some(p);
    }

    Ok(PrelogReport {
        model: model.name.clone(),
        zero_set_measure: zero_set,
        prelog_lower,
        analytic_limit,
        upper_prelog,
        note1_gap: upper_prelog.is_some_and(|u| u < zero_set),
        lower_bound_kind,
        finite_ratios,
    })
}

impl PrelogReport {
    /// CSV with columns `snr,value,upsilon_star,ratio,floored,slope`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["snr", "value", "upsilon_star", "ratio", "floored", "slope"])?;
        for p in &self.finite_ratios {
            w.write_record([
                p.snr.to_string(),
                p.lb.to_string(),
                p.upsilon_star.map(|u| u.to_string()).unwrap_or_default(),
                p.ratio.to_string(),
                p.floored.to_string(),
                p.slope.map(|s| s.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
