//! Scattering of one- and two-photon wavepackets in the comoving frame.
//!
//! The single-photon response is a transmitted delta part plus a causal
//! exponential re-emission part,
//!
//! ```text
//! phi_out(x) = phi_in(x) - 2 kappa ∫_x^∞ exp(-kappa (x' - x)) phi_in(x') dx',
//! ```
//!
//! with `kappa = gamma / c`. Two photons respond as the product of two single
//! photon responses plus a nonlinear correction that removes every history in
//! which the second absorption precedes the first emission:
//!
//! ```text
//! dU(x1, x2; x1', x2') = -4 kappa^2 exp(-kappa (x1' - x1)) exp(-kappa (x2' - x2))
//!                        for max(x1, x2) < min(x1', x2'), else 0.
//! ```
//!
//! Both kernels factorize in the exponential, so they are applied with running
//! sums instead of explicit quadrature over the kernel. Inputs are treated as
//! constant over each cell and the kernel is integrated exactly over the
//! cells, which makes rectangular pulses with edges on cell boundaries exact.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Axis, Grid1D, Grid2D, Wavefunction};
use crate::params::PhysicalParams;

/// Largest norm allowed to leak past the left grid edge in an output tail.
pub const TAIL_TOLERANCE: f64 = 1e-8;

/// Relative asymmetry tolerated in a bosonic two-photon input.
pub const SYMMETRY_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
struct CellWeights {
    kappa: f64,
    /// exp(-kappa dx)
    decay: f64,
    /// exp(-kappa dx / 2)
    half_decay: f64,
    /// ∫_0^dx exp(-kappa s) ds
    full: f64,
    /// ∫_0^{dx/2} exp(-kappa s) ds
    half: f64,
}

impl CellWeights {
    fn new(params: &PhysicalParams, dx: f64) -> Self {
        let kappa = params.kappa();
        let integral = |len: f64| {
            if kappa == 0.0 {
                len
            } else {
                -(-kappa * len).exp_m1() / kappa
            }
        };
        Self {
            kappa,
            decay: (-kappa * dx).exp(),
            half_decay: (-kappa * dx / 2.0).exp(),
            full: integral(dx),
            half: integral(dx / 2.0),
        }
    }
}

/// `A_i = ∫_{x_i}^∞ exp(-kappa (x' - x_i)) phi(x') dx'` at every cell center.
fn forward_integrals(values: &[Complex64], w: &CellWeights) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    // integral from the upper boundary of the current cell
    let mut above = Complex64::new(0.0, 0.0);
    for (i, v) in values.iter().enumerate().rev() {
        out[i] = v * w.half + above * w.half_decay;
        above = v * w.full + above * w.decay;
    }
    out
}

fn u1_into(values: &[Complex64], w: &CellWeights, out: &mut [Complex64]) {
    let two_kappa = 2.0 * w.kappa;
    let mut above = Complex64::new(0.0, 0.0);
    for i in (0..values.len()).rev() {
        let v = values[i];
        let a = v * w.half + above * w.half_decay;
        out[i] = v - a * two_kappa;
        above = v * w.full + above * w.decay;
    }
}

fn extent_error(axis: &Axis, tail_mass: f64, kappa: f64) -> Error {
    let required_extension = (tail_mass / TAIL_TOLERANCE).ln() / (2.0 * kappa);
    Error::InsufficientExtent {
        edge: axis.x_min(),
        tail_mass,
        required_extension,
        suggested_x_min: axis.x_min() - required_extension,
    }
}

/// Output norm beyond the left edge, assuming the `exp(kappa x)` tail that
/// every output has to the left of its input.
fn left_tail_mass(edge_sum_sqr: f64, w: &CellWeights) -> f64 {
    edge_sum_sqr * w.decay / (2.0 * w.kappa)
}

fn check_left_tail_1d(out: &Grid1D, w: &CellWeights) -> Result<()> {
    if w.kappa == 0.0 {
        return Ok(());
    }
    let tail = left_tail_mass(out.values()[0].norm_sqr(), w);
    if tail > TAIL_TOLERANCE {
        return Err(extent_error(out.axis(), tail, w.kappa));
    }
    Ok(())
}

fn check_left_tail_2d(out: &[Complex64], axis: &Axis, w: &CellWeights) -> Result<()> {
    if w.kappa == 0.0 {
        return Ok(());
    }
    let n = axis.len();
    let edge: f64 = (0..n)
        .map(|j| out[j].norm_sqr() + out[j * n].norm_sqr())
        .sum::<f64>()
        * axis.dx();
    let tail = left_tail_mass(edge, w);
    if tail > TAIL_TOLERANCE {
        return Err(extent_error(axis, tail, w.kappa));
    }
    Ok(())
}

/// Single-photon output `phi_out = U1 phi_in`.
///
/// Amplitude beyond the right edge of the grid is taken as zero. Fails with
/// [`Error::InsufficientExtent`] when the exponential output tail does not fit
/// on the left.
pub fn apply_u1(phi_in: &Grid1D, params: &PhysicalParams) -> Result<Grid1D> {
    let w = CellWeights::new(params, phi_in.axis().dx());
    let mut out = Grid1D::zeros(*phi_in.axis());
    u1_into(phi_in.values(), &w, out.values_mut());
    check_left_tail_1d(&out, &w)?;
    Ok(out)
}

/// Linear and nonlinear parts of a two-photon output.
#[derive(Debug, Clone)]
pub struct TwoPhotonOutput {
    /// `(U1 ⊗ U1) psi_in`
    pub linear: Grid2D,
    /// `∫∫ dU psi_in`
    pub nonlinear: Grid2D,
}

impl TwoPhotonOutput {
    pub fn total(&self) -> Grid2D {
        let one = Complex64::new(1.0, 0.0);
        self.linear
            .combine(one, &self.nonlinear, one)
            .expect("parts share a grid")
    }
}

/// Two-photon output `psi_out = U2 psi_in` for a bosonic input.
pub fn apply_u2(psi_in: &Grid2D, params: &PhysicalParams) -> Result<Grid2D> {
    Ok(apply_u2_parts(psi_in, params)?.total())
}

/// [`apply_u2`] returning the linear and nonlinear parts separately.
pub fn apply_u2_parts(psi_in: &Grid2D, params: &PhysicalParams) -> Result<TwoPhotonOutput> {
    let asym = psi_in.max_asymmetry();
    if asym > SYMMETRY_RTOL * psi_in.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NotExchangeSymmetric {
            max_deviation: asym,
        });
    }
    let axis = *psi_in.axis();
    let n = axis.len();
    let w = CellWeights::new(params, axis.dx());
    let input = psi_in.values();

    // U1 along x2 (rows), then along x1 (rows of the transpose)
    let mut rows = vec![Complex64::new(0.0, 0.0); n * n];
    rows.par_chunks_mut(n)
        .zip(input.par_chunks(n))
        .for_each(|(out, inp)| u1_into(inp, &w, out));
    let rows_t = psi_in_transpose(&rows, n);
    let mut lin_t = vec![Complex64::new(0.0, 0.0); n * n];
    lin_t
        .par_chunks_mut(n)
        .zip(rows_t.par_chunks(n))
        .for_each(|(out, inp)| u1_into(inp, &w, out));
    let linear = psi_in_transpose(&lin_t, n);

    let nonlinear = nonlinear_general(input, n, &w);

    let mut total = linear.clone();
    total.iter_mut().zip(&nonlinear).for_each(|(a, b)| *a += b);
    check_left_tail_2d(&total, &axis, &w)?;

    Ok(TwoPhotonOutput {
        linear: Grid2D::new(axis, linear)?,
        nonlinear: Grid2D::new(axis, nonlinear)?,
    })
}

fn psi_in_transpose(a: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut t = vec![Complex64::new(0.0, 0.0); n * n];
    t.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
        for (i, v) in row.iter_mut().enumerate() {
            *v = a[i * n + j];
        }
    });
    t
}

/// Exponential weights `exp(-kappa k dx)` for `k = 0..n`.
fn decay_table(n: usize, w: &CellWeights) -> Vec<f64> {
    let mut table = Vec::with_capacity(n);
    let mut v = 1.0;
    for _ in 0..n {
        table.push(v);
        v *= w.decay;
    }
    table
}

/// Fill `dpsi(i, j) = -4 kappa^2 exp(-kappa |i - j| dx) q[max(i, j)]`, where
/// `q[p]` is the input weighted over the quadrant beyond the center of cell
/// `p` relative to that center.
fn fill_nonlinear(quadrant: &[Complex64], n: usize, w: &CellWeights) -> Vec<Complex64> {
    let prefactor = -4.0 * w.kappa * w.kappa;
    let table = decay_table(n, w);
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (j, v) in row.iter_mut().enumerate() {
            let (p, d) = if i >= j { (i, i - j) } else { (j, j - i) };
            *v = quadrant[p] * (prefactor * table[d]);
        }
    });
    out
}

fn nonlinear_general(input: &[Complex64], n: usize, w: &CellWeights) -> Vec<Complex64> {
    if w.kappa == 0.0 {
        return vec![Complex64::new(0.0, 0.0); n * n];
    }
    // strip sums: row p beyond the diagonal, weighted from the upper boundary
    // of cell p; likewise for column p
    let strip = |get: &(dyn Fn(usize, usize) -> Complex64 + Sync)| -> Vec<Complex64> {
        (0..n)
            .into_par_iter()
            .map(|p| {
                let mut acc = Complex64::new(0.0, 0.0);
                for b in ((p + 1)..n).rev() {
                    acc = get(p, b) * w.full + acc * w.decay;
                }
                acc
            })
            .collect()
    };
    let row_strip = strip(&|p, b| input[p * n + b]);
    let col_strip = strip(&|p, a| input[a * n + p]);

    let mut quadrant = vec![Complex64::new(0.0, 0.0); n];
    // weight of the quadrant beyond the lower boundary of cell p + 1
    let mut beyond = Complex64::new(0.0, 0.0);
    for p in (0..n).rev() {
        let diag = input[p * n + p];
        let strips = row_strip[p] + col_strip[p];
        quadrant[p] =
            diag * (w.half * w.half) + strips * (w.half * w.half_decay) + beyond * w.decay;
        beyond =
            diag * (w.full * w.full) + strips * (w.full * w.decay) + beyond * (w.decay * w.decay);
    }
    fill_nonlinear(&quadrant, n, w)
}

/// Nonlinear part `∫∫ dU phi_in(x1') phi_in(x2')` of the output for the
/// two-photon product input `phi_in ⊗ phi_in`.
pub fn delta_psi_nonlinear(phi_in: &Grid1D, params: &PhysicalParams) -> Result<Grid2D> {
    let axis = *phi_in.axis();
    let n = axis.len();
    let w = CellWeights::new(params, axis.dx());
    if w.kappa == 0.0 {
        return Ok(Grid2D::zeros(axis));
    }
    let forward = forward_integrals(phi_in.values(), &w);
    let quadrant: Vec<Complex64> = forward.iter().map(|a| a * a).collect();
    let out = fill_nonlinear(&quadrant, n, &w);
    check_left_tail_2d(&out, &axis, &w)?;
    Grid2D::new(axis, out)
}

fn check_length(length: f64) -> Result<()> {
    if length.is_finite() && length > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "L",
            value: length,
            reason: "pulse length must be > 0",
        })
    }
}

/// Closed-form single-photon output for the resonant rectangular pulse
/// `1/sqrt(L)` on `0 < x < L`.
///
/// The branch `0 < x <= L` includes the trailing edge, where the output is
/// `+1/sqrt(L)`.
pub fn rect_phi_out(x: f64, length: f64, params: &PhysicalParams) -> Result<f64> {
    check_length(length)?;
    let kappa = params.kappa();
    let amp = 1.0 / length.sqrt();
    Ok(if x <= 0.0 {
        -2.0 * amp * (-(-kappa * length).exp_m1()) * (kappa * x).exp()
    } else if x <= length {
        -amp * (1.0 - 2.0 * (-kappa * (length - x)).exp())
    } else {
        0.0
    })
}

/// Closed-form nonlinear part of the two-photon output for the rectangular
/// pulse,
///
/// ```text
/// -(4/L) (1 - exp(-kappa (L - M)))^2 exp(kappa (x1 + x2 - 2 M)),  M = max(0, x1, x2),
/// ```
///
/// for both `x_i < L`. Deep inside a long pulse the edge factor is 1.
pub fn rect_delta_psi(x1: f64, x2: f64, length: f64, params: &PhysicalParams) -> Result<f64> {
    check_length(length)?;
    if x1 >= length || x2 >= length {
        return Ok(0.0);
    }
    let kappa = params.kappa();
    let top = x1.max(x2).max(0.0);
    // the remaining pulse beyond `top`; the full length once top <= 0
    let edge = -(-kappa * (length - top)).exp_m1();
    Ok(-4.0 / length * edge * edge * (kappa * (x1 + x2 - 2.0 * top)).exp())
}

/// Long-pulse interior form `-(4/L) exp(-kappa |x1 - x2|)` of the nonlinear
/// part.
pub fn long_pulse_delta_psi(x1: f64, x2: f64, length: f64, params: &PhysicalParams) -> f64 {
    -4.0 / length * (-params.kappa() * (x1 - x2).abs()).exp()
}

/// Long-pulse interior form `(1/L) (1 - 4 exp(-kappa |x1 - x2|))` of the
/// two-photon output.
pub fn long_pulse_psi_out(x1: f64, x2: f64, length: f64, params: &PhysicalParams) -> f64 {
    1.0 / length + long_pulse_delta_psi(x1, x2, length, params)
}

/// Long-pulse probability `16 c / (gamma L)` that the photon pair is
/// scattered out of the transmitted pulse mode.
pub fn scattering_probability(length: f64, params: &PhysicalParams) -> f64 {
    params.warn_if_short(length, "scattering_probability");
    16.0 / (params.kappa() * length)
}

/// Two-photon interaction cross section `8 c / gamma`.
pub fn cross_section(params: &PhysicalParams) -> f64 {
    8.0 * params.coherence_length()
}

/// `1 - |<mode|psi_out>|^2 / (<mode|mode> <psi_out|psi_out>)`: the weight of
/// `psi_out` outside `mode`.
pub fn mode_overlap_loss<W: Wavefunction>(psi_out: &W, mode: &W) -> Result<f64> {
    let overlap = crate::grid::inner_product(mode, psi_out)?;
    Ok(1.0 - overlap.norm_sqr() / (mode.norm_sqr() * psi_out.norm_sqr()))
}

/// Result of [`rect_scattering_quadrature`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringQuadrature {
    /// Loss of overlap with the linearly transmitted mode `phi_out ⊗ phi_out`.
    pub transmitted_mode: f64,
    /// Loss of overlap with the literal input `phi_in ⊗ phi_in`; includes the
    /// single-photon reshaping at the pulse edges.
    pub input_mode: f64,
    /// `<dpsi|dpsi>` over the grid.
    pub nonlinear_norm_sqr: f64,
    /// `<psi_out|psi_out>` over the grid.
    pub output_norm_sqr: f64,
}

/// Scattering probability of the rectangular two-photon pulse evaluated by
/// cell-center quadrature of the closed forms over `axis ⊗ axis`.
///
/// Streams over the grid, so long pulses need no 2D storage.
pub fn rect_scattering_quadrature(
    length: f64,
    params: &PhysicalParams,
    axis: &Axis,
) -> Result<ScatteringQuadrature> {
    check_length(length)?;
    let n = axis.len();
    let phi_out: Vec<f64> = axis
        .centers()
        .map(|x| rect_phi_out(x, length, params))
        .collect::<Result<_>>()?;
    let phi_in: Vec<f64> = axis
        .centers()
        .map(|x| {
            if x > 0.0 && x < length {
                1.0 / length.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let centers: Vec<f64> = axis.centers().collect();
    let dx = axis.dx();

    // per row: (sum phi_out phi_out dpsi, sum phi_in phi_in psi_out, sum dpsi^2, sum phi_out phi_out dpsi cross)
    let sums = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut lin_d = 0.0;
            let mut in_out = 0.0;
            let mut dd = 0.0;
            for j in 0..n {
                let d = rect_delta_psi(centers[i], centers[j], length, params).unwrap_or(0.0);
                let lin = phi_out[i] * phi_out[j];
                lin_d += lin * d;
                in_out += phi_in[i] * phi_in[j] * (lin + d);
                dd += d * d;
            }
            [lin_d, in_out, dd]
        })
        .collect::<Vec<_>>();
    let mut acc = [0.0; 3];
    for s in &sums {
        for k in 0..3 {
            acc[k] += s[k];
        }
    }
    let area = dx * dx;
    let lin_d = acc[0] * area;
    let in_out = acc[1] * area;
    let dd = acc[2] * area;
    let phi_norm = phi_out.iter().map(|v| v * v).sum::<f64>() * dx;
    let in_norm = phi_in.iter().map(|v| v * v).sum::<f64>() * dx;
    let lin_norm = phi_norm * phi_norm;
    let out_norm = lin_norm + 2.0 * lin_d + dd;
    let lin_out = lin_norm + lin_d;
    Ok(ScatteringQuadrature {
        transmitted_mode: 1.0 - lin_out * lin_out / (lin_norm * out_norm),
        input_mode: 1.0 - in_out * in_out / (in_norm * in_norm * out_norm),
        nonlinear_norm_sqr: dd,
        output_norm_sqr: out_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{inner_product, max_abs_difference};
    use crate::pulse;

    fn unit() -> PhysicalParams {
        PhysicalParams::default()
    }

    /// Direct O(n^2) quadrature of the U1 integral with the trapezoid rule on
    /// a refined grid: an independent check of the running-sum kernel.
    fn u1_brute(phi: &Grid1D, params: &PhysicalParams, x: f64, refine: usize) -> Complex64 {
        let axis = phi.axis();
        let kappa = params.kappa();
        let h = axis.dx() / refine as f64;
        let at = |xp: f64| -> Complex64 {
            axis.cell_of(xp)
                .map(|i| phi.values()[i])
                .unwrap_or_default()
        };
        let steps = ((axis.x_max() - x) / h).round() as usize;
        let mut sum = Complex64::new(0.0, 0.0);
        for s in 0..steps {
            let xp = x + (s as f64 + 0.5) * h;
            sum += at(xp) * (-kappa * (xp - x)).exp();
        }
        at(x) - sum * (2.0 * kappa * h)
    }

    #[test]
    fn rect_closed_form_values() {
        let p = unit();
        let l = 20.0;
        let interior = rect_phi_out(10.0, l, &p).unwrap();
        assert!((interior + (1.0 - 2.0 * (-10.0f64).exp()) / l.sqrt()).abs() < 1e-15);
        assert!((rect_phi_out(l, l, &p).unwrap() - 1.0 / l.sqrt()).abs() < 1e-15);
        let left = rect_phi_out(-1e-12, l, &p).unwrap();
        assert!((left + 0.447_213_595_499_958).abs() < 1e-9);
        assert!(rect_phi_out(-800.0, l, &p).unwrap().abs() < 1e-300);
        assert_eq!(rect_phi_out(l + 1.0, l, &p).unwrap(), 0.0);
        assert!(rect_phi_out(1.0, 0.0, &p).is_err());

        let mid = rect_delta_psi(10.0, 10.0, l, &p).unwrap();
        assert!((mid + 0.2).abs() < 1e-4);
        assert!((mid + 0.199_981_840_440_325_74).abs() < 1e-12);
        assert_eq!(rect_delta_psi(25.0, 5.0, l, &p).unwrap(), 0.0);
        assert!(rect_delta_psi(1.0, 1.0, -1.0, &p).is_err());
    }

    #[test]
    fn long_pulse_delta_psi_at_ln4() {
        let p = unit();
        let l = 200.0;
        let d = long_pulse_delta_psi(100.0, 100.0 + 4f64.ln(), l, &p);
        assert!((d + 1.0 / l).abs() < 1e-15);
    }

    #[test]
    fn u1_matches_closed_form_exactly_for_rect() {
        let p = unit();
        let axis = Axis::spanning(-25.0, 25.0, 0.01).unwrap();
        let phi = pulse::rectangular(axis, 20.0).unwrap();
        let out = apply_u1(&phi, &p).unwrap();
        let exact = Grid1D::from_fn(axis, |x| rect_phi_out(x, 20.0, &p).unwrap().into());
        assert!(max_abs_difference(&out, &exact).unwrap() < 1e-12);
    }

    #[test]
    fn u1_matches_brute_force_quadrature_for_smooth_input() {
        let p = PhysicalParams::new(1.3, 0.7).unwrap();
        let axis = Axis::spanning(-30.0, 15.0, 0.05).unwrap();
        let phi = pulse::gaussian(axis, 3.0, 1.5, 0.4).unwrap();
        let out = apply_u1(&phi, &p).unwrap();
        for &x in &[-4.025, 0.025, 2.975, 6.025] {
            let i = axis.cell_of(x).unwrap();
            let brute = u1_brute(&phi, &p, axis.center(i), 40);
            assert!((out.values()[i] - brute).norm() < 1e-4, "x = {x}");
        }
    }

    #[test]
    fn weak_coupling_is_transparent() {
        let p = PhysicalParams::new(1e-10, 1.0).unwrap();
        let axis = Axis::spanning(-5.0, 25.0, 0.01).unwrap();
        let phi = pulse::rectangular(axis, 20.0).unwrap();
        let out = apply_u1(&phi, &p).unwrap();
        assert!(max_abs_difference(&out, &phi).unwrap() < 1e-8);
        let free = apply_u1(&phi, &PhysicalParams::uncoupled(1.0).unwrap()).unwrap();
        assert_eq!(free, phi);
    }

    #[test]
    fn short_grid_reports_required_extension() {
        let p = unit();
        let axis = Axis::spanning(-1.0, 21.0, 0.01).unwrap();
        let phi = pulse::rectangular(axis, 20.0).unwrap();
        match apply_u1(&phi, &p) {
            Err(Error::InsufficientExtent {
                required_extension,
                suggested_x_min,
                ..
            }) => {
                assert!(required_extension > 0.0);
                let retry = Axis::spanning(suggested_x_min.floor(), 21.0, 0.01).unwrap();
                let phi = pulse::rectangular(retry, 20.0).unwrap();
                assert!(apply_u1(&phi, &p).is_ok());
            }
            other => panic!("expected extent error, got {other:?}"),
        }
    }

    #[test]
    fn u1_preserves_rect_norm() {
        let p = unit();
        let axis = Axis::spanning(-30.0, 200.0, 0.01).unwrap();
        let phi = pulse::rectangular(axis, 200.0).unwrap();
        let out = apply_u1(&phi, &p).unwrap();
        let ip = inner_product(&out, &out).unwrap();
        assert!((ip.re - 1.0).abs() < 1e-6, "{ip}");
    }

    #[test]
    fn delta_psi_matches_closed_form_for_rect() {
        let p = unit();
        let l = 6.0;
        let axis = Axis::spanning(-12.0, 8.0, 0.05).unwrap();
        let phi = pulse::rectangular(axis, l).unwrap();
        let d = delta_psi_nonlinear(&phi, &p).unwrap();
        let exact = Grid2D::from_fn(axis, |x1, x2| rect_delta_psi(x1, x2, l, &p).unwrap().into());
        assert!(max_abs_difference(&d, &exact).unwrap() < 1e-12);
    }

    #[test]
    fn product_route_and_general_route_agree() {
        let p = PhysicalParams::new(0.8, 1.1).unwrap();
        let axis = Axis::spanning(-20.0, 10.0, 0.1).unwrap();
        let phi = pulse::double_hump(axis, (1.0, 4.0), 0.7, 1.2).unwrap();
        let product = Grid2D::product(&phi, &phi).unwrap();
        let parts = apply_u2_parts(&product, &p).unwrap();
        let direct = delta_psi_nonlinear(&phi, &p).unwrap();
        assert!(max_abs_difference(&parts.nonlinear, &direct).unwrap() < 1e-12);
        let out1 = apply_u1(&phi, &p).unwrap();
        let lin = Grid2D::product(&out1, &out1).unwrap();
        assert!(max_abs_difference(&parts.linear, &lin).unwrap() < 1e-12);
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let axis = Axis::spanning(-10.0, 5.0, 0.1).unwrap();
        let a = pulse::gaussian(axis, 1.0, 0.5, 0.0).unwrap();
        let b = pulse::gaussian(axis, 3.0, 0.5, 0.0).unwrap();
        let psi = Grid2D::product(&a, &b).unwrap();
        assert!(matches!(
            apply_u2(&psi, &unit()),
            Err(Error::NotExchangeSymmetric { .. })
        ));
    }

    #[test]
    fn distant_photons_do_not_interact() {
        let p = unit();
        let axis = Axis::spanning(-20.0, 45.0, 0.05).unwrap();
        let a = pulse::gaussian(axis, 0.0, 0.7, 0.0).unwrap();
        let b = pulse::gaussian(axis, 40.0, 0.7, 0.0).unwrap();
        let psi = Grid2D::symmetrized_product(&a, &b).unwrap();
        let parts = apply_u2_parts(&psi, &p).unwrap();
        assert!(parts.nonlinear.norm() < 1e-6, "{}", parts.nonlinear.norm());
        let (ua, ub) = (apply_u1(&a, &p).unwrap(), apply_u1(&b, &p).unwrap());
        let one = Complex64::new(1.0, 0.0);
        let sym = |u: &Grid1D, v: &Grid1D| {
            Grid2D::product(u, v)
                .unwrap()
                .combine(one, &Grid2D::product(v, u).unwrap(), one)
                .unwrap()
        };
        // same normalization constant as the input
        let scale = 1.0 / sym(&a, &b).norm();
        let expect = sym(&ua, &ub).scaled(Complex64::new(scale, 0.0));
        let diff = crate::grid::l2_distance(&parts.total(), &expect).unwrap();
        assert!(diff < 1e-5, "{diff}");
    }

    #[test]
    fn cross_section_and_probability() {
        assert_eq!(cross_section(&unit()), 8.0);
        assert_eq!(cross_section(&PhysicalParams::new(2.0, 1.0).unwrap()), 4.0);
        let p = PhysicalParams::new(0.3, 2.0).unwrap();
        assert!((cross_section(&p) - 8.0 * p.coherence_length()).abs() < 1e-12);
        assert!((scattering_probability(100.0, &unit()) - 0.16).abs() < 1e-15);
        assert!((scattering_probability(200.0, &unit()) - 0.08).abs() < 1e-15);
    }
}
