//! Dense Hermitian eigenvalues.
//!
//! Householder reduction to real symmetric tridiagonal form followed by the
//! implicit-shift QL iteration. Eigenvalues only; no eigenvectors are formed.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative size below which an off-diagonal entry is treated as zero.
pub const OFFDIAG_TOLERANCE: f64 = 1e-12;

/// QL sweeps allowed per eigenvalue before giving up.
pub const MAX_SWEEPS: usize = 60;

/// Relative tolerance used when checking Hermitian symmetry of input data.
const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Square Hermitian matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Wraps row-major data, checking shape and Hermitian symmetry.
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("matrix dimension must be at least 1"));
        }
        if data.len() != n * n {
            return Err(Error::domain(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        let scale = data.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        for j in 0..n {
            for k in j..n {
                let a = data[j * n + k];
                let b = data[k * n + j].conj();
                if !(a.re.is_finite() && a.im.is_finite()) || (a - b).norm() > HERMITIAN_TOLERANCE * scale {
                    return Err(Error::numerical(format!(
                        "matrix is not Hermitian at ({j}, {k}): {a} vs conj {b}"
                    )));
                }
            }
        }
        Ok(HermitianMatrix { n, data })
    }

    /// Caller guarantees exact Hermitian symmetry.
    pub(crate) fn from_hermitian_unchecked(n: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        HermitianMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.n + col]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &HermitianMatrix) -> Result<Vec<f64>> {
    let (diag, offdiag) = tridiagonalize(m);
    let mut values = tridiagonal_eigenvalues(diag, offdiag)?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Reduces `m` to a real symmetric tridiagonal matrix with the same spectrum.
///
/// Returns the diagonal and the n−1 subdiagonal magnitudes. A Hermitian
/// tridiagonal matrix is unitarily similar (by a diagonal phase matrix) to
/// the real one carrying the moduli of its off-diagonal entries.
pub fn tridiagonalize(m: &HermitianMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.n;
    let mut a = m.data.clone();
    let mut diag = vec![0.0; n];
    let mut offdiag = vec![0.0; n.saturating_sub(1)];

    let mut v = vec![Complex64::new(0.0, 0.0); n];
    let mut p = vec![Complex64::new(0.0, 0.0); n];

    for k in 0..n.saturating_sub(1) {
        diag[k] = a[k * n + k].re;
        let start = k + 1;
        let len = n - start;

        let norm = (start..n).map(|i| a[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        offdiag[k] = norm;
        if norm == 0.0 || len == 1 {
            continue;
        }

        let x0 = a[start * n + k];
        let x0_abs = x0.norm();
        let phase = if x0_abs == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0_abs
        };
        let alpha = -phase * norm;

        let v = &mut v[..len];
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = a[(start + i) * n + k];
        }
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for vi in v.iter_mut() {
            *vi /= vnorm;
        }

        // p = B v on the trailing block
        let p = &mut p[..len];
        for (i, pi) in p.iter_mut().enumerate() {
            let row = &a[(start + i) * n + start..(start + i) * n + n];
            *pi = row.iter().zip(v.iter()).map(|(b, vj)| b * vj).sum();
        }
        let kappa: f64 = v.iter().zip(p.iter()).map(|(vi, pi)| (vi.conj() * pi).re).sum();
        // w = p − κ v, stored back into p
        for (pi, vi) in p.iter_mut().zip(v.iter()) {
            *pi -= vi * kappa;
        }

        // B ← B − 2 (v w* + w v*)
        for i in 0..len {
            let vi2 = v[i] * 2.0;
            let wi2 = p[i] * 2.0;
            let row = &mut a[(start + i) * n + start..(start + i) * n + n];
            for (j, b) in row.iter_mut().enumerate() {
                *b -= vi2 * p[j].conj() + wi2 * v[j].conj();
            }
        }
    }
    if n > 0 {
        diag[n - 1] = a[(n - 1) * n + n - 1].re;
    }
    (diag, offdiag)
}

/// Eigenvalues of the real symmetric tridiagonal matrix with diagonal `diag`
/// and subdiagonal `offdiag`, by implicit-shift QL. Output is unsorted.
pub fn tridiagonal_eigenvalues(mut d: Vec<f64>, offdiag: Vec<f64>) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(d);
    }
    if offdiag.len() + 1 != n {
        return Err(Error::domain(format!(
            "tridiagonal matrix of size {n} needs {} off-diagonal entries, got {}",
            n - 1,
            offdiag.len()
        )));
    }
    let mut e = offdiag;
    e.push(0.0);

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= OFFDIAG_TOLERANCE * dd || e[m] == 0.0 {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::numerical(format!(
                    "QL iteration did not converge for eigenvalue {l} within {MAX_SWEEPS} sweeps"
                )));
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}
