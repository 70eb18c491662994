//! Reference routines that share no code path with the library.
#![allow(dead_code)]

use num_complex::Complex64;
use prelog_core::spectra::{make_piecewise, Segment, SpectralDensity};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Eigenvalues of a Hermitian matrix (row-major) by cyclic Jacobi rotations
/// on the real symmetric embedding [[Re, −Im], [Im, Re]], whose spectrum is
/// that of the Hermitian matrix with every eigenvalue doubled.
pub fn jacobi_hermitian_eigenvalues(n: usize, data: &[Complex64]) -> Vec<f64> {
    let m = 2 * n;
    let mut a = vec![0.0f64; m * m];
    for j in 0..n {
        for k in 0..n {
            let z = data[j * n + k];
            a[j * m + k] = z.re;
            a[(j + n) * m + (k + n)] = z.re;
            a[j * m + (k + n)] = -z.im;
            a[(j + n) * m + k] = z.im;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * m + j] * a[i * m + j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[p * m + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut diag: Vec<f64> = (0..m).map(|i| a[i * m + i]).collect();
    diag.sort_by(f64::total_cmp);
    diag.into_iter().step_by(2).collect()
}

/// Adaptive Simpson integral of `f` over [a, b]. The interval is first cut
/// into `panels` equal pieces; each piece is bisected until the two Simpson
/// estimates agree to `abs_tol` or the piece is narrower than `min_width`.
/// Discontinuities are found by refinement, not supplied.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    panels: usize,
    abs_tol: f64,
    min_width: f64,
) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        abs_tol: f64,
        min_width: f64,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let diff = left + right - whole;
        if diff.abs() <= 15.0 * abs_tol || b - a < min_width {
            left + right + diff / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, abs_tol, min_width)
                + recurse(f, m, b, fm, frm, fb, right, abs_tol, min_width)
        }
    }

    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == panels {
                b
            } else {
                a + h * (i + 1) as f64
            };
            let (flo, fmid, fhi) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = simpson(flo, fmid, fhi, hi - lo);
            recurse(f, lo, hi, flo, fmid, fhi, whole, abs_tol, min_width)
        })
        .sum()
}

/// ∫ log(1 + snr·F′(λ)) dλ by pointwise evaluation and adaptive quadrature.
pub fn quadrature_log_integral(s: &SpectralDensity, snr: f64) -> f64 {
    let f = |lambda: f64| (snr * s.density_at(lambda).expect("inside [-1/2, 1/2]")).ln_1p();
    adaptive_simpson(&f, -0.5, 0.5, 2048, 1e-14, 1e-13)
}

/// Random unit-mass piecewise density: 1 to 8 segments, each at least 1e-3
/// wide, about a third of them zero.
pub fn random_density(rng: &mut ChaCha8Rng) -> SpectralDensity {
    let pieces = rng.random_range(1..=8usize);
    let cuts: Vec<f64> = loop {
        let mut c: Vec<f64> = (0..pieces - 1).map(|_| rng.random_range(-0.499..0.499)).collect();
        c.sort_by(f64::total_cmp);
        let mut edges = vec![-0.5];
        edges.extend(c);
        edges.push(0.5);
        if edges.windows(2).all(|w| w[1] - w[0] >= 1e-3) {
            break edges;
        }
    };
    let mut values: Vec<f64> = (0..pieces)
        .map(|_| {
            if rng.random_bool(0.3) {
                0.0
            } else {
                rng.random_range(0.05..3.0)
            }
        })
        .collect();
    if values.iter().all(|v| *v == 0.0) {
        values[rng.random_range(0..pieces)] = 1.0;
    }
    let mass: f64 = cuts.windows(2).zip(&values).map(|(w, v)| (w[1] - w[0]) * v).sum();
    let segments = cuts
        .windows(2)
        .zip(&values)
        .map(|(w, v)| Segment::new(w[0], w[1], v / mass))
        .collect();
    make_piecewise(segments, Some(1.0)).expect("valid random density")
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Binomial 3σ tolerance for an empirical frequency over `n` draws.
pub fn binomial_tolerance(p: f64, n: usize) -> f64 {
    3.0 * (p * (1.0 - p) / n as f64).sqrt()
}
