//! Hermitian Toeplitz fading covariances and the Szegő log-determinant rate.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{self, HermitianMatrix};
use crate::error::{Error, Result};
use crate::spectra::{spectral_log_integral, AutocovarianceSeq, SpectralDensity};

/// Default largest dimension accepted for a dense eigensolve.
pub const DEFAULT_MAX_DIMENSION: usize = 4096;

/// Eigenvalues down to `-PSD_SLACK * r(0)` are treated as rounding noise.
pub const PSD_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ToeplitzOptions {
    pub max_dimension: usize,
}

impl Default for ToeplitzOptions {
    fn default() -> Self {
        ToeplitzOptions {
            max_dimension: DEFAULT_MAX_DIMENSION,
        }
    }
}

/// n×n Hermitian Toeplitz matrix with entries M[j][k] = r(k − j).
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzCov {
    first_row: Vec<Complex64>,
}

impl ToeplitzCov {
    pub fn dim(&self) -> usize {
        self.first_row.len()
    }

    pub fn first_row(&self) -> &[Complex64] {
        &self.first_row
    }

    pub fn variance(&self) -> f64 {
        self.first_row[0].re
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        if col >= row {
            self.first_row[col - row]
        } else {
            self.first_row[row - col].conj()
        }
    }

    pub fn to_dense(&self) -> HermitianMatrix {
        let n = self.dim();
        let data = (0..n)
            .flat_map(|j| (0..n).map(move |k| (j, k)))
            .map(|(j, k)| self.entry(j, k))
            .collect();
        HermitianMatrix::from_hermitian_unchecked(n, data)
    }

    /// Leading k×k principal submatrix, itself Toeplitz.
    pub fn leading(&self, k: usize) -> Result<ToeplitzCov> {
        if k == 0 || k > self.dim() {
            return Err(Error::domain(format!(
                "leading block size {k} out of range 1..={}",
                self.dim()
            )));
        }
        Ok(ToeplitzCov {
            first_row: self.first_row[..k].to_vec(),
        })
    }
}

/// Builds the n×n covariance of n consecutive fading samples.
pub fn covariance_matrix(r: &AutocovarianceSeq, n: usize) -> Result<ToeplitzCov> {
    covariance_matrix_with(r, n, &ToeplitzOptions::default())
}

pub fn covariance_matrix_with(
    r: &AutocovarianceSeq,
    n: usize,
    opts: &ToeplitzOptions,
) -> Result<ToeplitzCov> {
    if n == 0 {
        return Err(Error::domain("covariance dimension must be at least 1"));
    }
    if n > opts.max_dimension {
        return Err(Error::domain(format!(
            "dimension {n} exceeds the configured cap {}",
            opts.max_dimension
        )));
    }
    if r.max_lag() + 1 < n {
        return Err(Error::domain(format!(
            "dimension {n} needs lags 0..{}, sequence only has 0..{}",
            n - 1,
            r.max_lag()
        )));
    }
    if !(r.variance() > 0.0) {
        return Err(Error::domain("covariance needs r(0) > 0"));
    }
    Ok(ToeplitzCov {
        first_row: r.values()[..n].to_vec(),
    })
}

/// Eigenvalues of the covariance in ascending order.
///
/// Fails with a numerical error when the smallest eigenvalue is more
/// negative than `-PSD_SLACK * r(0)`.
pub fn hermitian_eigenvalues(m: &ToeplitzCov) -> Result<Vec<f64>> {
    let values = eigen::hermitian_eigenvalues(&m.to_dense())?;
    let floor = -PSD_SLACK * m.variance();
    if values[0] < floor {
        return Err(Error::numerical(format!(
            "covariance is not positive semidefinite: eigenvalue {} < {floor}",
            values[0]
        )));
    }
    Ok(values)
}

/// (1/n) Σ log(1 + snr·λ_k) over the eigenvalues of the n×n covariance
/// built from the spectrum's autocovariance.
pub fn szego_logdet_rate(s: &SpectralDensity, snr: f64, n: usize) -> Result<f64> {
    szego_logdet_rate_with(s, snr, n, &ToeplitzOptions::default())
}

pub fn szego_logdet_rate_with(
    s: &SpectralDensity,
    snr: f64,
    n: usize,
    opts: &ToeplitzOptions,
) -> Result<f64> {
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(Error::domain(format!(
            "snr must be positive and finite, got {snr}"
        )));
    }
    if n == 0 {
        return Err(Error::domain("covariance dimension must be at least 1"));
    }
    let r = AutocovarianceSeq::from_spectrum(s, n - 1);
    let cov = covariance_matrix_with(&r, n, opts)?;
    let eigenvalues = hermitian_eigenvalues(&cov)?;
    let total: f64 = eigenvalues.iter().map(|&l| (snr * l.max(0.0)).ln_1p()).sum();
    Ok(total / n as f64)
}

/// One row of a Szegő convergence report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SzegoGap {
    pub n: usize,
    pub rate: f64,
    pub integral: f64,
    pub gap: f64,
}

/// |szego_logdet_rate(n) − spectral_log_integral| for each n, in input order.
pub fn szego_gap(s: &SpectralDensity, snr: f64, dims: &[usize]) -> Result<Vec<SzegoGap>> {
    szego_gap_with(s, snr, dims, &ToeplitzOptions::default())
}

pub fn szego_gap_with(
    s: &SpectralDensity,
    snr: f64,
    dims: &[usize],
    opts: &ToeplitzOptions,
) -> Result<Vec<SzegoGap>> {
    let integral = spectral_log_integral(s, snr)?;
    dims.par_iter()
        .map(|&n| {
            let rate = szego_logdet_rate_with(s, snr, n, opts)?;
            Ok(SzegoGap {
                n,
                rate,
                integral,
                gap: (rate - integral).abs(),
            })
        })
        .collect()
}
