//! Uniform cell-centered grids for one- and two-photon amplitudes.
//!
//! Cell `i` of an [`Axis`] covers `[x_min + i dx, x_min + (i + 1) dx]` and its
//! sample sits at the cell center. Jumps of the wavefunction (rectangular
//! pulse edges, the atom at `r = 0`) are placed on cell boundaries. Integrals
//! are evaluated as `sum(values) * dx`, which is the composite trapezoid rule
//! on the cell centers for amplitudes that vanish at the grid ends.

use num_complex::Complex64;

use crate::error::{Error, Result};

const GEOMETRY_RTOL: f64 = 1e-9;

/// Geometry of a uniform grid with `n` cells of width `dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    x_min: f64,
    dx: f64,
    n: usize,
}

impl Axis {
    pub fn new(x_min: f64, dx: f64, n: usize) -> Result<Self> {
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dx",
                value: dx,
                reason: "must be finite and > 0",
            });
        }
        if n < 2 {
            return Err(Error::InvalidParameter {
                name: "n",
                value: n as f64,
                reason: "a grid needs at least two cells",
            });
        }
        if !x_min.is_finite() {
            return Err(Error::InvalidParameter {
                name: "x_min",
                value: x_min,
                reason: "must be finite",
            });
        }
        Ok(Self { x_min, dx, n })
    }

    /// Grid of cells of width `dx` spanning `[start, end]`.
    ///
    /// `end - start` is rounded to a whole number of cells.
    pub fn spanning(start: f64, end: f64, dx: f64) -> Result<Self> {
        if !(end > start) {
            return Err(Error::InvalidParameter {
                name: "end",
                value: end,
                reason: "grid end must lie above its start",
            });
        }
        let n = ((end - start) / dx).round() as usize;
        Self::new(start, dx, n)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_min + self.n as f64 * self.dx
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Cell-center position of sample `i`.
    pub fn center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx
    }

    /// Position of the lower boundary of cell `i` (`i == n` gives `x_max`).
    pub fn boundary(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn centers(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.center(i))
    }

    /// Index `i` such that `x` is the lower boundary of cell `i`, if `x` falls
    /// on a boundary (`i` may equal `n` for the upper grid edge).
    pub fn boundary_index(&self, x: f64) -> Option<usize> {
        let t = (x - self.x_min) / self.dx;
        let i = t.round();
        if i < 0.0 || i > self.n as f64 || (t - i).abs() > 1e-6 {
            return None;
        }
        Some(i as usize)
    }

    /// Index of the cell containing `x`, if any.
    pub fn cell_of(&self, x: f64) -> Option<usize> {
        let t = ((x - self.x_min) / self.dx).floor();
        (t >= 0.0 && t < self.n as f64).then_some(t as usize)
    }

    pub fn same_geometry(&self, other: &Axis) -> bool {
        self.n == other.n
            && (self.dx - other.dx).abs() <= GEOMETRY_RTOL * self.dx
            && (self.x_min - other.x_min).abs() <= GEOMETRY_RTOL * self.dx * self.n as f64
    }

    /// Same cells, relabelled so that the grid starts at `x_min + offset`.
    pub fn shifted(&self, offset: f64) -> Axis {
        Axis {
            x_min: self.x_min + offset,
            ..*self
        }
    }

    /// Index offset `j - i` between cell `i` of `self` and the cell `j` of
    /// `target` at the same position; both axes must share `dx` and cell
    /// boundaries.
    fn cell_offset(&self, target: &Axis) -> Result<i64> {
        let t = (self.x_min - target.x_min) / self.dx;
        let k = t.round();
        if (self.dx - target.dx).abs() > GEOMETRY_RTOL * self.dx || (t - k).abs() > 1e-6 {
            return Err(Error::GeometryMismatch(
                "axes must share the cell size and cell boundaries".into(),
            ));
        }
        Ok(k as i64)
    }

    fn check_same(&self, other: &Axis) -> Result<()> {
        if self.same_geometry(other) {
            Ok(())
        } else {
            Err(Error::GeometryMismatch(format!(
                "x_min {} / {}, dx {} / {}, n {} / {}",
                self.x_min, other.x_min, self.dx, other.dx, self.n, other.n
            )))
        }
    }
}

/// Sampled amplitude on a grid, with integration weight per sample.
pub trait Wavefunction {
    fn samples(&self) -> &[Complex64];

    /// Integration weight of one sample (`dx` in 1D, `dx^2` in 2D).
    fn cell_measure(&self) -> f64;

    fn check_geometry(&self, other: &Self) -> Result<()>;

    fn norm_sqr(&self) -> f64 {
        self.samples().iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell_measure()
    }

    fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

/// `<a|b>` with `a` conjugated.
pub fn inner_product<W: Wavefunction>(a: &W, b: &W) -> Result<Complex64> {
    a.check_geometry(b)?;
    let sum: Complex64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(sum * a.cell_measure())
}

/// `|| a - b ||` in the grid's L2 norm.
pub fn l2_distance<W: Wavefunction>(a: &W, b: &W) -> Result<f64> {
    a.check_geometry(b)?;
    let sum: f64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum();
    Ok((sum * a.cell_measure()).sqrt())
}

/// Largest pointwise `|a - b|`.
pub fn max_abs_difference<W: Wavefunction>(a: &W, b: &W) -> Result<f64> {
    a.check_geometry(b)?;
    Ok(a.samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}

/// Single-photon amplitude `phi(x)`, in units of `length^(-1/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    axis: Axis,
    values: Vec<Complex64>,
}

impl Grid1D {
    pub fn new(axis: Axis, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != axis.len() {
            return Err(Error::GeometryMismatch(format!(
                "{} values for {} cells",
                values.len(),
                axis.len()
            )));
        }
        Ok(Self { axis, values })
    }

    pub fn zeros(axis: Axis) -> Self {
        Self {
            axis,
            values: vec![Complex64::new(0.0, 0.0); axis.len()],
        }
    }

    /// Sample `f` at the cell centers.
    pub fn from_fn(axis: Axis, f: impl Fn(f64) -> Complex64) -> Self {
        let values = axis.centers().map(f).collect();
        Self { axis, values }
    }

    pub fn axis(&self) -> &Axis {
        &self.axis
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            axis: self.axis,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Copy rescaled to unit norm. A zero grid is returned unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.scaled(Complex64::new(1.0 / n, 0.0))
    }

    /// Same samples on a relabelled axis (`x -> x + offset`).
    pub fn shifted(&self, offset: f64) -> Self {
        Self {
            axis: self.axis.shifted(offset),
            values: self.values.clone(),
        }
    }

    /// The same samples on another axis with aligned cells, zero where
    /// `self` has no data; samples outside `axis` are dropped.
    pub fn regrid(&self, axis: Axis) -> Result<Self> {
        let off = self.axis.cell_offset(&axis)?;
        let mut out = Self::zeros(axis);
        for (i, v) in self.values.iter().enumerate() {
            let j = i as i64 + off;
            if (0..axis.len() as i64).contains(&j) {
                out.values[j as usize] = *v;
            }
        }
        Ok(out)
    }

    /// Linear combination `a * self + b * other`.
    pub fn combine(&self, a: Complex64, other: &Grid1D, b: Complex64) -> Result<Self> {
        self.axis.check_same(&other.axis)?;
        Ok(Self {
            axis: self.axis,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }
}

impl Wavefunction for Grid1D {
    fn samples(&self) -> &[Complex64] {
        &self.values
    }

    fn cell_measure(&self) -> f64 {
        self.axis.dx
    }

    fn check_geometry(&self, other: &Self) -> Result<()> {
        self.axis.check_same(&other.axis)
    }
}

/// Two-photon amplitude `psi(x1, x2)` on a square grid, in units of
/// `length^(-1)`.
///
/// Stored row-major: `values[i * n + j]` is the sample at `(x1_i, x2_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    axis: Axis,
    values: Vec<Complex64>,
}

impl Grid2D {
    pub fn new(axis: Axis, values: Vec<Complex64>) -> Result<Self> {
        let n = axis.len();
        if values.len() != n * n {
            return Err(Error::GeometryMismatch(format!(
                "{} values for a {n} x {n} grid",
                values.len()
            )));
        }
        Ok(Self { axis, values })
    }

    pub fn zeros(axis: Axis) -> Self {
        let n = axis.len();
        Self {
            axis,
            values: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_fn(axis: Axis, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let n = axis.len();
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            let x1 = axis.center(i);
            for j in 0..n {
                values.push(f(x1, axis.center(j)));
            }
        }
        Self { axis, values }
    }

    /// `a(x1) b(x2)`.
    pub fn product(a: &Grid1D, b: &Grid1D) -> Result<Self> {
        a.axis.check_same(&b.axis)?;
        let n = a.len();
        let mut values = Vec::with_capacity(n * n);
        for x in &a.values {
            values.extend(b.values.iter().map(|y| x * y));
        }
        Ok(Self {
            axis: a.axis,
            values,
        })
    }

    /// Normalized bosonic two-photon state built from two single-photon
    /// shapes: `(a(x1) b(x2) + b(x1) a(x2))` rescaled to unit norm.
    pub fn symmetrized_product(a: &Grid1D, b: &Grid1D) -> Result<Self> {
        let ab = Self::product(a, b)?;
        let n = ab.axis.len();
        let mut s = ab.clone();
        for i in 0..n {
            for j in 0..n {
                s.values[i * n + j] = ab.values[i * n + j] + ab.values[j * n + i];
            }
        }
        let norm = s.norm();
        if norm > 0.0 {
            s.values.iter_mut().for_each(|v| *v /= norm);
        }
        Ok(s)
    }

    pub fn axis(&self) -> &Axis {
        &self.axis
    }

    pub fn side(&self) -> usize {
        self.axis.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.axis.len() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let n = self.axis.len();
        self.values[i * n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        let n = self.axis.len();
        &self.values[i * n..(i + 1) * n]
    }

    /// Diagonal samples `psi(x, x)`.
    pub fn diagonal(&self) -> Grid1D {
        let n = self.axis.len();
        Grid1D {
            axis: self.axis,
            values: (0..n).map(|i| self.values[i * n + i]).collect(),
        }
    }

    /// Largest `|psi(i,j) - psi(j,i)|`.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.axis.len();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.values[i * n + j] - self.values[j * n + i]).norm());
            }
        }
        worst
    }

    /// Exchange symmetric to within `rtol` of the largest amplitude.
    pub fn is_exchange_symmetric(&self, rtol: f64) -> bool {
        self.max_asymmetry() <= rtol * self.max_abs().max(f64::MIN_POSITIVE)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            axis: self.axis,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn shifted(&self, offset: f64) -> Self {
        Self {
            axis: self.axis.shifted(offset),
            values: self.values.clone(),
        }
    }

    /// As [`Grid1D::regrid`] in both coordinates.
    pub fn regrid(&self, axis: Axis) -> Result<Self> {
        let off = self.axis.cell_offset(&axis)?;
        let (n, m) = (self.axis.len() as i64, axis.len() as i64);
        let mut out = Self::zeros(axis);
        let lo = (-off).max(0);
        let hi = (m - off).min(n);
        for i in lo..hi {
            let src = &self.values[(i * n + lo) as usize..(i * n + hi) as usize];
            let start = ((i + off) * m + lo + off) as usize;
            out.values[start..start + src.len()].copy_from_slice(src);
        }
        Ok(out)
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: Complex64, other: &Grid2D, b: Complex64) -> Result<Self> {
        self.axis.check_same(&other.axis)?;
        Ok(Self {
            axis: self.axis,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    /// Exchange `x1` and `x2`.
    pub fn transposed(&self) -> Self {
        let n = self.axis.len();
        let mut values = self.values.clone();
        for i in 0..n {
            for j in 0..n {
                values[j * n + i] = self.values[i * n + j];
            }
        }
        Self {
            axis: self.axis,
            values,
        }
    }

    /// Sub-grid covering the square `[start, end]^2`. Both edges must fall
    /// on cell boundaries.
    pub fn restrict(&self, start: f64, end: f64) -> Result<Self> {
        let (i0, i1) = window_indices(&self.axis, start, end)?;
        let n = self.axis.len();
        let m = i1 - i0;
        let mut values = Vec::with_capacity(m * m);
        for i in i0..i1 {
            values.extend_from_slice(&self.values[i * n + i0..i * n + i1]);
        }
        Ok(Self {
            axis: Axis::new(self.axis.boundary(i0), self.axis.dx, m)?,
            values,
        })
    }
}

impl Wavefunction for Grid2D {
    fn samples(&self) -> &[Complex64] {
        &self.values
    }

    fn cell_measure(&self) -> f64 {
        self.axis.dx * self.axis.dx
    }

    fn check_geometry(&self, other: &Self) -> Result<()> {
        self.axis.check_same(&other.axis)
    }
}

/// Cell index range `[i0, i1)` of the window `[start, end]`.
pub(crate) fn window_indices(axis: &Axis, start: f64, end: f64) -> Result<(usize, usize)> {
    let tol = 1e-6 * axis.dx();
    if !(end > start) || start < axis.x_min() - tol || end > axis.x_max() + tol {
        return Err(Error::WindowOutsideGrid {
            start,
            end,
            grid_start: axis.x_min(),
            grid_end: axis.x_max(),
        });
    }
    let i0 = axis.boundary_index(start).ok_or(Error::WindowMisaligned {
        edge: start,
        dx: axis.dx(),
    })?;
    let i1 = axis.boundary_index(end).ok_or(Error::WindowMisaligned {
        edge: end,
        dx: axis.dx(),
    })?;
    if i1 <= i0 {
        return Err(Error::WindowOutsideGrid {
            start,
            end,
            grid_start: axis.x_min(),
            grid_end: axis.x_max(),
        });
    }
    Ok((i0, i1))
}
