//! Local Fourier transform of two-photon amplitudes on a window `[a, a + L]`.
//!
//! Coefficients are
//!
//! ```text
//! c(n1, n2) = (1/L) ∫∫_window exp(-i k1 (x1 - a)) exp(-i k2 (x2 - a)) psi(x1, x2),
//! k = 2 pi n / L
//! ```
//!
//! evaluated with the grid's cell-center rule. With the window edges on cell
//! boundaries that sum is exactly a DFT of the window samples, so it is
//! computed with an FFT and Parseval holds to rounding before truncation.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::{window_indices, Grid1D, Grid2D};

/// Fraction of the scattered (non-`(0,0)`) weight allowed in the discarded
/// high-`|n|` tail when the cutoff is chosen automatically.
pub const CUTOFF_TAIL_FRACTION: f64 = 1e-3;

/// Discrete k-space coefficients `c(n1, n2)` for `|n1|, |n2| <= n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct KDecomposition {
    length: f64,
    window_start: f64,
    n_max: usize,
    coefficients: Vec<Complex64>,
    window_norm_sqr: f64,
    truncated_weight: f64,
}

impl KDecomposition {
    /// Window length `L`.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn window_start(&self) -> f64 {
        self.window_start
    }

    /// k-space spacing `2 pi / L`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn k(&self, n: i64) -> f64 {
        n as f64 * self.dk()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Indices `-n_max..=n_max`.
    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        -(self.n_max as i64)..=self.n_max as i64
    }

    /// `c(n1, n2)`; zero outside the retained index range.
    pub fn get(&self, n1: i64, n2: i64) -> Complex64 {
        let m = self.n_max as i64;
        if n1.abs() > m || n2.abs() > m {
            return Complex64::new(0.0, 0.0);
        }
        let side = 2 * self.n_max + 1;
        self.coefficients[(n1 + m) as usize * side + (n2 + m) as usize]
    }

    /// `sum |c|^2` over the retained coefficients.
    pub fn retained_weight(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Weight of the coefficients beyond `n_max` (discarded).
    pub fn truncated_weight(&self) -> f64 {
        self.truncated_weight
    }

    /// Real-space `∫∫_window |psi|^2` of the transformed region.
    pub fn window_norm_sqr(&self) -> f64 {
        self.window_norm_sqr
    }

    /// Iterate `(n1, n2, c)` over the retained coefficients.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, Complex64)> + '_ {
        let m = self.n_max as i64;
        let side = 2 * self.n_max + 1;
        self.coefficients
            .iter()
            .enumerate()
            .map(move |(idx, &c)| ((idx / side) as i64 - m, (idx % side) as i64 - m, c))
    }
}

/// Transform `psi` over the window `[start, start + length]^2`, choosing the
/// cutoff so the discarded tail holds at most [`CUTOFF_TAIL_FRACTION`] of the
/// scattered weight.
pub fn local_fourier_2d(psi: &Grid2D, start: f64, length: f64) -> Result<KDecomposition> {
    transform(psi, start, length, None)
}

/// As [`local_fourier_2d`] with an explicit cutoff `|n| <= n_max`.
pub fn local_fourier_2d_with_cutoff(
    psi: &Grid2D,
    start: f64,
    length: f64,
    n_max: usize,
) -> Result<KDecomposition> {
    transform(psi, start, length, Some(n_max))
}

fn transform(
    psi: &Grid2D,
    start: f64,
    length: f64,
    n_max: Option<usize>,
) -> Result<KDecomposition> {
    let axis = psi.axis();
    let (i0, i1) = window_indices(axis, start, start + length)?;
    let m = i1 - i0;
    let n = axis.len();
    let dx = axis.dx();
    let length = m as f64 * dx;

    let mut buf: Vec<Complex64> = Vec::with_capacity(m * m);
    for i in i0..i1 {
        buf.extend_from_slice(&psi.values()[i * n + i0..i * n + i1]);
    }
    let window_norm_sqr = buf.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx * dx;

    let fft = FftPlanner::new().plan_fft_forward(m);
    buf.par_chunks_mut(m).for_each(|row| fft.process(row));
    let mut cols = transpose(&buf, m);
    cols.par_chunks_mut(m).for_each(|row| fft.process(row));
    // cols[q * m + p] now holds the DFT at (p, q)
    let scale = dx * dx / length;

    let wrap = |idx: usize| -> i64 {
        if idx <= m / 2 {
            idx as i64
        } else {
            idx as i64 - m as i64
        }
    };

    let max_cutoff = (m - 1) / 2;
    let mut ring = vec![0.0; m / 2 + 1];
    for q in 0..m {
        for p in 0..m {
            let r = wrap(p).unsigned_abs().max(wrap(q).unsigned_abs()) as usize;
            ring[r] += (cols[q * m + p] * scale).norm_sqr();
        }
    }
    let total: f64 = ring.iter().sum();
    let n_max = match n_max {
        Some(c) => c.min(max_cutoff),
        None => {
            let origin = (cols[0] * scale).norm_sqr();
            let scattered = total - origin;
            let reference = if scattered > 1e-14 * total {
                scattered
            } else {
                total
            };
            let mut tail = total;
            let mut chosen = max_cutoff;
            for (r, w) in ring.iter().enumerate().take(max_cutoff + 1) {
                tail -= w;
                if tail <= CUTOFF_TAIL_FRACTION * reference {
                    chosen = r;
                    break;
                }
            }
            if chosen == max_cutoff && tail > CUTOFF_TAIL_FRACTION * reference {
                log::warn!(
                    "k cutoff limited by grid resolution: tail weight {tail:.3e} remains beyond |n| = {chosen}"
                );
            }
            chosen
        }
    };

    let side = 2 * n_max + 1;
    let mut coefficients = Vec::with_capacity(side * side);
    let nm = n_max as i64;
    for n1 in -nm..=nm {
        let p = n1.rem_euclid(m as i64) as usize;
        for n2 in -nm..=nm {
            let q = n2.rem_euclid(m as i64) as usize;
            // cell-center phase exp(-i pi (n1 + n2) / m)
            let phase = Complex64::from_polar(1.0, -PI * (n1 + n2) as f64 / m as f64);
            coefficients.push(cols[q * m + p] * scale * phase);
        }
    }
    let retained: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();

    Ok(KDecomposition {
        length,
        window_start: start,
        n_max,
        coefficients,
        window_norm_sqr,
        truncated_weight: (total - retained).max(0.0),
    })
}

fn transpose(a: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut t = vec![Complex64::new(0.0, 0.0); m * m];
    const B: usize = 32;
    for ib in (0..m).step_by(B) {
        for jb in (0..m).step_by(B) {
            for i in ib..(ib + B).min(m) {
                for j in jb..(jb + B).min(m) {
                    t[j * m + i] = a[i * m + j];
                }
            }
        }
    }
    t
}

/// One-dimensional local transform `c(n) = (1/sqrt(L)) ∫_window exp(-i k (x - a)) phi`
/// for `|n| <= n_max`, normalized so that `sum |c|^2` over all `n` equals
/// the window norm.
pub fn local_fourier_1d(
    phi: &Grid1D,
    start: f64,
    length: f64,
    n_max: usize,
) -> Result<Vec<(i64, Complex64)>> {
    let axis = phi.axis();
    let (i0, i1) = window_indices(axis, start, start + length)?;
    let m = i1 - i0;
    if n_max > (m - 1) / 2 {
        return Err(Error::InvalidParameter {
            name: "n_max",
            value: n_max as f64,
            reason: "exceeds the number of independent frequencies in the window",
        });
    }
    let dx = axis.dx();
    let length = m as f64 * dx;
    let mut buf = phi.values()[i0..i1].to_vec();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let scale = dx / length.sqrt();
    let nm = n_max as i64;
    Ok((-nm..=nm)
        .map(|n| {
            let p = n.rem_euclid(m as i64) as usize;
            let phase = Complex64::from_polar(1.0, -PI * n as f64 / m as f64);
            (n, buf[p] * scale * phase)
        })
        .collect())
}
