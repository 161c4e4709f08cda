//! Single-photon input pulse shapes.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Axis, Grid1D, Wavefunction};

/// Resonant rectangular pulse `1/sqrt(L)` on `0 < x < L`.
pub fn rectangular(axis: Axis, length: f64) -> Result<Grid1D> {
    rectangular_at(axis, 0.0, length)
}

/// Rectangular pulse of height `1/sqrt(L)` on `start < x < start + L`.
///
/// Cells cut by an edge get the overlap-weighted cell average, so edges on
/// cell boundaries give exact samples.
pub fn rectangular_at(axis: Axis, start: f64, length: f64) -> Result<Grid1D> {
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::InvalidParameter {
            name: "L",
            value: length,
            reason: "pulse length must be > 0",
        });
    }
    let end = start + length;
    let amp = 1.0 / length.sqrt();
    let dx = axis.dx();
    let values = (0..axis.len())
        .map(|i| {
            let lo = axis.boundary(i);
            let hi = lo + dx;
            let overlap = (hi.min(end) - lo.max(start)).max(0.0) / dx;
            // snap round-off at aligned edges
            let overlap = if overlap > 1.0 - 1e-9 {
                1.0
            } else if overlap < 1e-9 {
                0.0
            } else {
                overlap
            };
            Complex64::new(amp * overlap, 0.0)
        })
        .collect();
    Grid1D::new(axis, values)
}

/// Normalized Gaussian `exp(-(x - center)^2 / (4 width^2) + i k0 x)`.
///
/// `width` is the rms width of `|phi|^2`; `k0` a carrier detuning.
pub fn gaussian(axis: Axis, center: f64, width: f64, k0: f64) -> Result<Grid1D> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::InvalidParameter {
            name: "width",
            value: width,
            reason: "must be > 0",
        });
    }
    let g = Grid1D::from_fn(axis, |x| {
        let u = (x - center) / width;
        Complex64::from_polar((-0.25 * u * u).exp(), k0 * x)
    });
    Ok(g.normalized())
}

/// Sum of two Gaussians of equal width with a relative phase, normalized.
pub fn double_hump(
    axis: Axis,
    centers: (f64, f64),
    width: f64,
    relative_phase: f64,
) -> Result<Grid1D> {
    let a = gaussian(axis, centers.0, width, 0.0)?;
    let b = gaussian(axis, centers.1, width, 0.0)?;
    Ok(a.combine(
        Complex64::new(1.0, 0.0),
        &b,
        Complex64::from_polar(1.0, relative_phase),
    )?
    .normalized())
}

/// Resample tabulated `(x, amplitude)` points onto `axis` by linear
/// interpolation; zero outside the tabulated range.
///
/// `xs` must be strictly increasing. The result is not normalized.
pub fn resample(axis: Axis, xs: &[f64], amplitudes: &[Complex64]) -> Result<Grid1D> {
    if xs.len() != amplitudes.len() || xs.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: xs.len() as f64,
            reason: "need at least two (x, amplitude) pairs of equal length",
        });
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter {
            name: "x",
            value: f64::NAN,
            reason: "tabulated positions must be strictly increasing",
        });
    }
    let values = axis
        .centers()
        .map(|x| {
            if x < xs[0] || x > xs[xs.len() - 1] {
                return Complex64::new(0.0, 0.0);
            }
            let k = xs.partition_point(|&p| p <= x).clamp(1, xs.len() - 1);
            let t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
            amplitudes[k - 1] * (1.0 - t) + amplitudes[k] * t
        })
        .collect();
    Grid1D::new(axis, values)
}

/// Smallest and largest cell centers where `|phi|^2` exceeds `threshold`
/// times its maximum.
pub fn support(phi: &Grid1D, threshold: f64) -> Option<(f64, f64)> {
    let max = phi
        .samples()
        .iter()
        .map(|v| v.norm_sqr())
        .fold(0.0, f64::max);
    if max == 0.0 {
        return None;
    }
    let above = |v: &Complex64| v.norm_sqr() > threshold * max;
    let first = phi.values().iter().position(above)?;
    let last = phi.values().iter().rposition(above)?;
    Some((phi.axis().center(first), phi.axis().center(last)))
}
