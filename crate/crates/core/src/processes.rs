//! Sample paths of the fading processes and the channel Y = H·x + Z.
//!
//! Every sampler is a pure function of its arguments and a 64-bit seed.
//! Randomness comes from ChaCha8, a counter-based generator; each kind of
//! draw (fading harmonics, on-off parity, phase noise, channel noise, Monte
//! Carlo marginals) reads its own ChaCha stream so draws for the fading and
//! the noise never overlap.

use std::f64::consts::{E, PI, TAU};
use std::io::{Read, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{Construction, FadingModel, MarginalLaw};
use crate::error::{Error, Result};
use crate::spectra::{make_rect_band_scaled, AutocovarianceSeq, SpectralDensity};

/// Default number of harmonics in the spectral-sampling Gaussian synthesis.
pub const DEFAULT_HARMONICS: usize = 4096;

/// Time samples per synthesis block. Phasors are recomputed from scratch at
/// each block start, so output does not depend on the thread count.
const SYNTH_BLOCK: usize = 1024;

const STREAM_HARMONICS: u64 = 1;
const STREAM_PARITY: u64 = 2;
const STREAM_PHASE: u64 = 3;
const STREAM_NOISE: u64 = 4;
const STREAM_MARGINAL: u64 = 5;

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Circularly-symmetric complex Gaussian with E|z|² = variance.
fn complex_gaussian<R: Rng>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// e^{iθ} rescaled until its modulus evaluates to exactly 1.
fn unit_phasor(theta: f64) -> Complex64 {
    let (s, c) = theta.sin_cos();
    let mut z = Complex64::new(c, s);
    for _ in 0..4 {
        let r = z.norm();
        if r == 1.0 {
            return z;
        }
        z /= r;
    }
    // unreachable in practice; snap to the nearest axis-aligned representation
    if z.re.abs() >= z.im.abs() {
        Complex64::new(z.re.signum(), 0.0)
    } else {
        Complex64::new(0.0, z.im.signum())
    }
}

/// A realization H_1..H_n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub values: Vec<Complex64>,
    pub model_name: String,
    pub seed: u64,
}

impl SamplePath {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// CSV with columns `k,re,im`, k starting at 1.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "re", "im"])?;
        for (k, h) in self.values.iter().enumerate() {
            w.write_record([(k + 1).to_string(), h.re.to_string(), h.im.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Little-endian binary: u64 length, u64 seed, then interleaved re/im f64.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(&(self.values.len() as u64).to_le_bytes())?;
        out.write_all(&self.seed.to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.values.len() * 16);
        for h in &self.values {
            buf.extend_from_slice(&h.re.to_le_bytes());
            buf.extend_from_slice(&h.im.to_le_bytes());
        }
        out.write_all(&buf)?;
        Ok(())
    }

    /// Reads the binary layout written by [`SamplePath::write_binary`]. The
    /// format does not carry a model name.
    pub fn read_binary<R: Read>(mut input: R, model_name: impl Into<String>) -> Result<SamplePath> {
        let mut header = [0u8; 16];
        input.read_exact(&mut header)?;
        let n = u64::from_le_bytes(header[..8].try_into().expect("8 bytes")) as usize;
        let seed = u64::from_le_bytes(header[8..].try_into().expect("8 bytes"));
        let mut body = Vec::new();
        input.read_to_end(&mut body)?;
        if body.len() != n * 16 {
            return Err(Error::validation(format!(
                "binary path declares {n} samples but carries {} bytes",
                body.len()
            )));
        }
        let values = body
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
                let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
                Complex64::new(re, im)
            })
            .collect();
        Ok(SamplePath {
            values,
            model_name: model_name.into(),
            seed,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthOptions {
    /// Number of random-phase harmonics summed per sample.
    pub harmonics: usize,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            harmonics: DEFAULT_HARMONICS,
        }
    }
}

/// Stationary circularly-symmetric Gaussian path with spectrum `s`, plus `mean_d`.
pub fn simulate_gaussian(s: &SpectralDensity, mean_d: Complex64, n: usize, seed: u64) -> Result<SamplePath> {
    simulate_gaussian_with(s, mean_d, n, seed, &SynthOptions::default())
}

/// Spectral-sampling synthesis: H_k = d + √(v/M) Σ_j exp(i(2π f_j k + φ_j)).
///
/// The M frequencies are stratified draws from the normalized spectral
/// measure (one per equal-probability stratum of its CDF) and the phases are
/// uniform. Marginals are Gaussian only as M grows.
pub fn simulate_gaussian_with(
    s: &SpectralDensity,
    mean_d: Complex64,
    n: usize,
    seed: u64,
    opts: &SynthOptions,
) -> Result<SamplePath> {
    if n == 0 {
        return Err(Error::domain("path length must be at least 1"));
    }
    if opts.harmonics == 0 {
        return Err(Error::domain("synthesis needs at least one harmonic"));
    }
    let m = opts.harmonics;
    let mut rng = stream_rng(seed, STREAM_HARMONICS);

    let support: Vec<_> = s.segments().iter().filter(|g| g.value > 0.0).collect();
    let mut cumulative = Vec::with_capacity(support.len());
    let mut acc = 0.0;
    for g in &support {
        acc += g.mass();
        cumulative.push(acc);
    }
    let total = acc;

    let mut freqs = Vec::with_capacity(m);
    let mut phases = Vec::with_capacity(m);
    for j in 0..m {
        let u: f64 = rng.random();
        let target = (j as f64 + u) / m as f64 * total;
        let idx = cumulative.partition_point(|&c| c < target).min(support.len() - 1);
        let seg = support[idx];
        let below = if idx == 0 { 0.0 } else { cumulative[idx - 1] };
        let f = (seg.lo + (target - below) / seg.value).clamp(seg.lo, seg.hi);
        freqs.push(f);
        phases.push(rng.random::<f64>() * TAU);
    }

    let amplitude = (s.variance() / m as f64).sqrt();
    let rot_re: Vec<f64> = freqs.iter().map(|f| (TAU * f).cos()).collect();
    let rot_im: Vec<f64> = freqs.iter().map(|f| (TAU * f).sin()).collect();

    let mut values = vec![Complex64::new(0.0, 0.0); n];
    values
        .par_chunks_mut(SYNTH_BLOCK)
        .enumerate()
        .for_each(|(block, out)| {
            let k0 = (block * SYNTH_BLOCK + 1) as f64;
            let mut zr = Vec::with_capacity(m);
            let mut zi = Vec::with_capacity(m);
            for (f, phi) in freqs.iter().zip(&phases) {
                let arg = TAU * (f * k0).fract() + phi;
                let (sn, cs) = arg.sin_cos();
                zr.push(cs);
                zi.push(sn);
            }
            for slot in out.iter_mut() {
                let mut sr = [0.0f64; 4];
                let mut si = [0.0f64; 4];
                let chunks = zr
                    .chunks_exact_mut(4)
                    .zip(zi.chunks_exact_mut(4))
                    .zip(rot_re.chunks_exact(4).zip(rot_im.chunks_exact(4)));
                for ((ar, ai), (rr, ri)) in chunks {
                    for l in 0..4 {
                        sr[l] += ar[l];
                        si[l] += ai[l];
                        let nr = ar[l] * rr[l] - ai[l] * ri[l];
                        let ni = ar[l] * ri[l] + ai[l] * rr[l];
                        ar[l] = nr;
                        ai[l] = ni;
                    }
                }
                let tail = m - m % 4;
                for j in tail..m {
                    sr[0] += zr[j];
                    si[0] += zi[j];
                    let nr = zr[j] * rot_re[j] - zi[j] * rot_im[j];
                    let ni = zr[j] * rot_im[j] + zi[j] * rot_re[j];
                    zr[j] = nr;
                    zi[j] = ni;
                }
                let re = (sr[0] + sr[1]) + (sr[2] + sr[3]);
                let im = (si[0] + si[1]) + (si[2] + si[3]);
                *slot = mean_d + Complex64::new(re, im) * amplitude;
            }
        });

    Ok(SamplePath {
        values,
        model_name: "gaussian".into(),
        seed,
    })
}

/// H_k = A_k·B_k with A the alternating 0/1 sequence of random parity and
/// B Gaussian of variance 2, flat on |λ| ≤ W.
pub fn simulate_onoff(w: f64, n: usize, seed: u64) -> Result<SamplePath> {
    simulate_onoff_with(w, n, seed, &SynthOptions::default())
}

pub fn simulate_onoff_with(w: f64, n: usize, seed: u64, opts: &SynthOptions) -> Result<SamplePath> {
    if !(w > 0.0 && w < 0.25) {
        return Err(Error::domain(format!(
            "on-off half-width must lie in (0, 1/4), got {w}"
        )));
    }
    let b_spectrum = make_rect_band_scaled(w, 2.0)?;
    let mut path = simulate_gaussian_with(&b_spectrum, Complex64::new(0.0, 0.0), n, seed, opts)?;
    // A_k = 1 on the indices k ≡ on_parity (mod 2), k = 1..n
    let on_parity: usize = stream_rng(seed, STREAM_PARITY).random_range(0..2);
    for (i, h) in path.values.iter_mut().enumerate() {
        if (i + 1) % 2 != on_parity {
            *h = Complex64::new(0.0, 0.0);
        }
    }
    path.model_name = format!("onoff:W={w}");
    Ok(path)
}

/// H_k = e^{iΘ_k} with Θ_k IID uniform on [−π, π).
pub fn simulate_phase_noise(n: usize, seed: u64) -> Result<SamplePath> {
    if n == 0 {
        return Err(Error::domain("path length must be at least 1"));
    }
    let mut rng = stream_rng(seed, STREAM_PHASE);
    let values = (0..n).map(|_| unit_phasor(rng.random_range(-PI..PI))).collect();
    Ok(SamplePath {
        values,
        model_name: "phase-noise".into(),
        seed,
    })
}

/// Path of a fading model.
pub fn simulate_model(model: &FadingModel, n: usize, seed: u64) -> Result<SamplePath> {
    simulate_model_with(model, n, seed, &SynthOptions::default())
}

pub fn simulate_model_with(
    model: &FadingModel,
    n: usize,
    seed: u64,
    opts: &SynthOptions,
) -> Result<SamplePath> {
    let mut path = match (model.construction(), model.law()) {
        (Construction::OnOff { half_width }, _) => simulate_onoff_with(half_width, n, seed, opts)?,
        (_, MarginalLaw::PhaseNoise) => {
            let flat = model.spectrum().segments().len() == 1;
            if !flat {
                return Err(Error::domain(
                    "phase-noise paths are memoryless; the model spectrum must be flat",
                ));
            }
            simulate_phase_noise(n, seed)?
        }
        (_, MarginalLaw::Rayleigh) => {
            simulate_gaussian_with(model.spectrum(), model.mean_d(), n, seed, opts)?
        }
        (_, MarginalLaw::OnOff) => {
            return Err(Error::domain(
                "on-off paths need the band half-width; build the model with FadingModel::onoff",
            ))
        }
    };
    path.model_name = model.name().to_string();
    Ok(path)
}

/// P(|H₁| ≥ Υ) from the model's closed form.
pub fn tail_probability(model: &FadingModel, upsilon: f64) -> Result<f64> {
    model.tail(upsilon)
}

/// One draw of H₁ from the model's marginal law.
fn sample_marginal<R: Rng>(law: MarginalLaw, rng: &mut R) -> Complex64 {
    match law {
        MarginalLaw::Rayleigh => complex_gaussian(rng, 1.0),
        MarginalLaw::OnOff => {
            let b = complex_gaussian(rng, 2.0);
            if rng.random::<bool>() {
                b
            } else {
                Complex64::new(0.0, 0.0)
            }
        }
        MarginalLaw::PhaseNoise => unit_phasor(rng.random_range(-PI..PI)),
    }
}

/// Monte Carlo estimate of P(|H₁| ≥ Υ) for each Υ from `samples` IID draws
/// of the marginal law, all thresholds sharing the same draws.
pub fn monte_carlo_tail(
    model: &FadingModel,
    upsilons: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if samples == 0 {
        return Err(Error::domain("Monte Carlo needs at least one sample"));
    }
    if let Some(u) = upsilons.iter().find(|u| !(**u > 0.0)) {
        return Err(Error::domain(format!("upsilon must be positive, got {u}")));
    }
    let mut rng = stream_rng(seed, STREAM_MARGINAL);
    let mut counts = vec![0usize; upsilons.len()];
    for _ in 0..samples {
        let mag = sample_marginal(model.law(), &mut rng).norm();
        for (c, &u) in counts.iter_mut().zip(upsilons) {
            if mag >= u {
                *c += 1;
            }
        }
    }
    Ok(counts.into_iter().map(|c| c as f64 / samples as f64).collect())
}

/// Channel inputs, outputs and noise variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelOutput {
    pub y: Vec<Complex64>,
    pub x: Vec<Complex64>,
    pub sigma2: f64,
}

/// Differential entropy log(πeσ²) of a circularly-symmetric Gaussian of variance σ².
pub fn noise_entropy(sigma2: f64) -> f64 {
    (PI * E * sigma2).ln()
}

/// y_k = H_k·x_k + Z_k with Z IID CN(0, σ²) drawn from `seed`.
///
/// Inputs must satisfy |x_k| ≤ `peak_amplitude`.
pub fn channel_apply(
    path: &SamplePath,
    x: &[Complex64],
    sigma2: f64,
    peak_amplitude: f64,
    seed: u64,
) -> Result<ChannelOutput> {
    if x.len() != path.len() {
        return Err(Error::domain(format!(
            "input length {} does not match path length {}",
            x.len(),
            path.len()
        )));
    }
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::domain(format!(
            "noise variance must be positive, got {sigma2}"
        )));
    }
    let peak2 = peak_amplitude * peak_amplitude;
    if let Some((k, xk)) = x.iter().enumerate().find(|(_, xk)| !(xk.norm_sqr() <= peak2)) {
        return Err(Error::domain(format!(
            "input {k} has |x|² = {} above the peak power {peak2}",
            xk.norm_sqr()
        )));
    }
    let mut rng = stream_rng(seed, STREAM_NOISE);
    let y = path
        .values
        .iter()
        .zip(x)
        .map(|(h, xk)| h * xk + complex_gaussian(&mut rng, sigma2))
        .collect();
    Ok(ChannelOutput {
        y,
        x: x.to_vec(),
        sigma2,
    })
}

/// Biased estimator r̂(m) = (1/n) Σ_k (H_{k+m} − H̄)(H_k − H̄)*.
pub fn empirical_autocov(path: &SamplePath, m_max: usize) -> Result<AutocovarianceSeq> {
    let n = path.len();
    if m_max >= n {
        return Err(Error::domain(format!(
            "max lag {m_max} must be below the path length {n}"
        )));
    }
    let mean = path.values.iter().sum::<Complex64>() / n as f64;
    let centered: Vec<Complex64> = path.values.iter().map(|h| h - mean).collect();
    let values = (0..=m_max)
        .map(|m| {
            let sum: Complex64 = centered[m..]
                .iter()
                .zip(&centered[..n - m])
                .map(|(a, b)| a * b.conj())
                .sum();
            sum / n as f64
        })
        .collect();
    AutocovarianceSeq::new(values)
}
