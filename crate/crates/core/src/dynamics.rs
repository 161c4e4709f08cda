//! Lab-frame time evolution of the field and the atom.
//!
//! The field moves to the right at speed `c` and the atom sits at `r = 0`,
//! which must be a cell boundary of the propagation grid. With `dt = dx / c`
//! every cell moves by exactly one cell per step, so transport is exact. The
//! atom couples through
//!
//! ```text
//! d psi_E / dt = -gamma psi_E - i sqrt(2 c gamma) psi(r -> -0)
//! psi(r -> +0) = psi(r -> -0) - i sqrt(2 gamma / c) psi_E
//! ```
//!
//! Within a step the incoming amplitude is held constant and `psi_E` is
//! integrated exactly. The cell crossing the atom picks up the jump with the
//! excitation taken at mid-step.
//!
//! In the two-photon evolution the excitation channels `psi(E, r2)` and
//! `psi(r1, E)` are one-dimensional arrays that advect in their free
//! coordinate. There is no doubly excited amplitude, so a photon that reaches
//! an excited atom passes unchanged. [`evolve_two_harmonic`] replaces the atom
//! by a harmonic oscillator for comparison.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Axis, Grid1D, Grid2D, Wavefunction};
use crate::params::PhysicalParams;

/// Largest excitation probability tolerated by [`extract_comoving_1d`] and
/// [`extract_comoving_2d`].
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Norm allowed to leave the right end of the grid before evolution fails.
pub const EXIT_TOLERANCE: f64 = 1e-10;

/// Norm allowed at `r >= 0` in an initial state.
pub const SUPPORT_TOLERANCE: f64 = 1e-12;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Atom to field couplings and per-step integrator weights.
#[derive(Debug, Clone, Copy)]
struct Stepper {
    dt: f64,
    /// sqrt(2 c gamma), drive of psi_E by the incoming field
    drive: f64,
    /// sqrt(2 gamma / c), emission into the outgoing field
    emit: f64,
    decay: f64,
    half_decay: f64,
    /// ∫_0^dt exp(-gamma s) ds
    full: f64,
    half: f64,
}

impl Stepper {
    fn new(params: &PhysicalParams, dx: f64) -> Self {
        let gamma = params.gamma();
        let dt = dx / params.c();
        let integral = |t: f64| {
            if gamma == 0.0 {
                t
            } else {
                -(-gamma * t).exp_m1() / gamma
            }
        };
        Self {
            dt,
            drive: (2.0 * params.c() * gamma).sqrt(),
            emit: (2.0 * params.kappa()).sqrt(),
            decay: (-gamma * dt).exp(),
            half_decay: (-gamma * dt / 2.0).exp(),
            full: integral(dt),
            half: integral(dt / 2.0),
        }
    }

    #[inline]
    fn excite_full(&self, e: Complex64, incoming: Complex64) -> Complex64 {
        e * self.decay - I * (incoming * (self.drive * self.full))
    }

    #[inline]
    fn excite_half(&self, e: Complex64, incoming: Complex64) -> Complex64 {
        e * self.half_decay - I * (incoming * (self.drive * self.half))
    }

    #[inline]
    fn transmit(&self, incoming: Complex64, e_mid: Complex64) -> Complex64 {
        incoming - I * (e_mid * self.emit)
    }
}

/// Index of the cell boundary at `r = 0`.
fn atom_boundary(axis: &Axis) -> Result<usize> {
    match axis.boundary_index(0.0) {
        Some(a) if a > 0 && a < axis.len() => Ok(a),
        _ => Err(Error::AtomOffBoundary {
            r_min: axis.x_min(),
            dx: axis.dx(),
        }),
    }
}

fn step_count(t: f64, t_end: f64, dt: f64) -> Result<usize> {
    if t_end < t - 1e-12 * dt {
        return Err(Error::BackwardsInTime { t, t_end });
    }
    Ok(((t_end - t) / dt).round().max(0.0) as usize)
}

/// Single-photon state: field on the lab grid plus the excitation amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState1 {
    pub field: Grid1D,
    pub psi_e: Complex64,
    pub t: f64,
}

impl SystemState1 {
    pub fn new(field: Grid1D, psi_e: Complex64, t: f64) -> Result<Self> {
        atom_boundary(field.axis())?;
        Ok(Self { field, psi_e, t })
    }

    /// `Σ|field|² dx + |psi_E|²`
    pub fn total_norm_sqr(&self) -> f64 {
        self.field.norm_sqr() + self.psi_e.norm_sqr()
    }

    /// Continue the evolution to `t_end` without the initial-state checks of
    /// [`evolve_single`].
    ///
    /// On error the state is left at the step that failed.
    pub fn advance_to(&mut self, t_end: f64, params: &PhysicalParams) -> Result<()> {
        let axis = *self.field.axis();
        let a = atom_boundary(&axis)?;
        let s = Stepper::new(params, axis.dx());
        let steps = step_count(self.t, t_end, s.dt)?;
        let n = axis.len();
        // lab index i lives at (i - offset) mod n
        let values = self.field.values_mut();
        let mut offset = 0;
        let mut result = Ok(());
        for _ in 0..steps {
            let last = (2 * n - 1 - offset) % n;
            let lost = values[last].norm_sqr() * axis.dx();
            if lost > EXIT_TOLERANCE {
                result = Err(Error::PulseExitedGrid { t: self.t, lost });
                break;
            }
            let r = (a - 1 + n - offset) % n;
            let incoming = values[r];
            let e_mid = s.excite_half(self.psi_e, incoming);
            self.psi_e = s.excite_full(self.psi_e, incoming);
            values[r] = s.transmit(incoming, e_mid);
            values[last] = ZERO;
            offset = (offset + 1) % n;
            self.t += s.dt;
        }
        values.rotate_right(offset);
        result
    }

    /// Advance by one step `dt = dx / c`.
    pub fn step(&mut self, params: &PhysicalParams) -> Result<()> {
        let t = self.t + self.field.axis().dx() / params.c();
        self.advance_to(t, params)
    }
}

/// Evolve a single-photon state from `initial.t` to `t_end`.
///
/// The initial field must lie entirely at `r < 0`. The number of steps is
/// `(t_end - t) c / dx` rounded to the nearest integer.
pub fn evolve_single(
    initial: SystemState1,
    t_end: f64,
    params: &PhysicalParams,
) -> Result<SystemState1> {
    let axis = *initial.field.axis();
    let a = atom_boundary(&axis)?;
    let mass: f64 = initial.field.values()[a..]
        .iter()
        .map(|v| v.norm_sqr())
        .sum::<f64>()
        * axis.dx();
    if mass > SUPPORT_TOLERANCE {
        return Err(Error::SupportOverlapsAtom { mass });
    }
    let mut state = initial;
    state.advance_to(t_end, params)?;
    Ok(state)
}

/// Field in comoving coordinates `x = r - c t_ref`.
pub fn extract_comoving_1d(
    state: &SystemState1,
    t_ref: f64,
    params: &PhysicalParams,
) -> Result<Grid1D> {
    let residual = state.psi_e.norm_sqr();
    if residual > RESIDUAL_TOLERANCE {
        return Err(Error::ResidualExcitation {
            residual,
            tolerance: RESIDUAL_TOLERANCE,
        });
    }
    Ok(state.field.shifted(-params.c() * t_ref))
}

/// Two-photon state without double excitation.
///
/// `psi_e1[j]` is the amplitude with photon 1 absorbed and photon 2 in cell
/// `j`; `psi_e2[i]` the converse.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState2 {
    pub field: Grid2D,
    pub psi_e1: Grid1D,
    pub psi_e2: Grid1D,
    pub t: f64,
}

impl SystemState2 {
    pub fn new(field: Grid2D, psi_e1: Grid1D, psi_e2: Grid1D, t: f64) -> Result<Self> {
        let axis = *field.axis();
        atom_boundary(&axis)?;
        for e in [&psi_e1, &psi_e2] {
            if !e.axis().same_geometry(&axis) {
                return Err(Error::GeometryMismatch(
                    "excitation channels must share the field axis".into(),
                ));
            }
        }
        Ok(Self {
            field,
            psi_e1,
            psi_e2,
            t,
        })
    }

    /// Two photons in the field, atom in the ground state.
    pub fn from_field(field: Grid2D, t: f64) -> Result<Self> {
        let axis = *field.axis();
        Self::new(field, Grid1D::zeros(axis), Grid1D::zeros(axis), t)
    }

    /// Continue the evolution to `t_end` without the initial-state checks of
    /// [`evolve_two`].
    ///
    /// On error the state is left at the step that failed.
    pub fn advance_to(&mut self, t_end: f64, params: &PhysicalParams) -> Result<()> {
        let steps = step_count(self.t, t_end, self.field.axis().dx() / params.c())?;
        let axis = *self.field.axis();
        let a = atom_boundary(&axis)?;
        let s = Stepper::new(params, axis.dx());
        let mut ring = Ring2::new(
            self.field.values().to_vec(),
            self.psi_e1.values().to_vec(),
            self.psi_e2.values().to_vec(),
        );
        let mut result = Ok(());
        let mut taken = 0;
        for _ in 0..steps {
            if let Err(e) = ring.step(a, &s, axis.dx(), self.t + taken as f64 * s.dt) {
                result = Err(e);
                break;
            }
            taken += 1;
        }
        let (field, e1, e2) = ring.into_lab();
        self.field = Grid2D::new(axis, field)?;
        self.psi_e1 = Grid1D::new(axis, e1)?;
        self.psi_e2 = Grid1D::new(axis, e2)?;
        self.t += taken as f64 * s.dt;
        result
    }

    pub fn excitation_norm_sqr(&self) -> f64 {
        self.psi_e1.norm_sqr() + self.psi_e2.norm_sqr()
    }

    pub fn total_norm_sqr(&self) -> f64 {
        self.field.norm_sqr() + self.excitation_norm_sqr()
    }

    /// Advance by one step `dt = dx / c`.
    pub fn step(&mut self, params: &PhysicalParams) -> Result<()> {
        let t = self.t + self.field.axis().dx() / params.c();
        self.advance_to(t, params)
    }
}

/// Two-photon arrays stored in a ring: lab index `i` lives at storage index
/// `(i - offset) mod n`, so free propagation costs nothing and a step only
/// touches the row and column at the atom.
struct Ring2 {
    field: Vec<Complex64>,
    e1: Vec<Complex64>,
    e2: Vec<Complex64>,
    n: usize,
    offset: usize,
}

impl Ring2 {
    fn new(field: Vec<Complex64>, e1: Vec<Complex64>, e2: Vec<Complex64>) -> Self {
        let n = e1.len();
        Self {
            field,
            e1,
            e2,
            n,
            offset: 0,
        }
    }

    #[inline]
    fn at(&self, lab: usize) -> usize {
        (lab + self.n - self.offset) % self.n
    }

    fn step(&mut self, a: usize, s: &Stepper, dx: f64, t: f64) -> Result<()> {
        let n = self.n;
        let last = self.at(n - 1);
        let lost = {
            let row: f64 = self.field[last * n..(last + 1) * n]
                .iter()
                .map(|v| v.norm_sqr())
                .sum();
            let col: f64 = (0..n)
                .filter(|&i| i != last)
                .map(|i| self.field[i * n + last].norm_sqr())
                .sum();
            (row + col) * dx * dx + (self.e1[last].norm_sqr() + self.e2[last].norm_sqr()) * dx
        };
        if lost > EXIT_TOLERANCE {
            return Err(Error::PulseExitedGrid { t, lost });
        }

        // photon 1 crossing: row a-1 drives psi_e1 along r2
        let r = self.at(a - 1);
        let cross1: Vec<Complex64> = self.field[r * n..(r + 1) * n].to_vec();
        let cross2: Vec<Complex64> = (0..n).map(|i| self.field[i * n + r]).collect();
        let e1_mid: Vec<Complex64> = (0..n)
            .map(|k| s.excite_half(self.e1[k], cross1[k]))
            .collect();
        let e2_mid: Vec<Complex64> = (0..n)
            .map(|k| s.excite_half(self.e2[k], cross2[k]))
            .collect();

        // storage r becomes lab row/column a after the shift
        for k in 0..n {
            if k != r {
                self.field[r * n + k] = s.transmit(cross1[k], e1_mid[k]);
                self.field[k * n + r] = s.transmit(cross2[k], e2_mid[k]);
            }
        }
        // both photons at the atom in the same step
        let both = cross1[r];
        self.field[r * n + r] = both - I * ((e1_mid[r] + e2_mid[r]) * s.emit);

        // In the corner cell each photon leads for half of the cell. When
        // photon 1 leads, the atom sees photon 2 after photon 1's jump, so
        // psi_e2 is driven by the average of the pre- and post-jump field.
        for k in 0..n {
            let (d1, d2) = if k == r {
                (
                    both - I * (e2_mid[r] * (0.5 * s.emit)),
                    both - I * (e1_mid[r] * (0.5 * s.emit)),
                )
            } else {
                (cross1[k], cross2[k])
            };
            self.e1[k] = s.excite_full(self.e1[k], d1);
            self.e2[k] = s.excite_full(self.e2[k], d2);
        }

        // lab cell n-1 wraps around to become lab cell 0
        self.field[last * n..(last + 1) * n].fill(ZERO);
        for i in 0..n {
            self.field[i * n + last] = ZERO;
        }
        self.e1[last] = ZERO;
        self.e2[last] = ZERO;
        self.offset = (self.offset + 1) % n;
        Ok(())
    }

    fn into_lab(self) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
        let n = self.n;
        let idx: Vec<usize> = (0..n).map(|i| self.at(i)).collect();
        let mut field = vec![ZERO; n * n];
        field.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            let src = &self.field[idx[i] * n..(idx[i] + 1) * n];
            for (j, v) in row.iter_mut().enumerate() {
                *v = src[idx[j]];
            }
        });
        let e1 = idx.iter().map(|&k| self.e1[k]).collect();
        let e2 = idx.iter().map(|&k| self.e2[k]).collect();
        (field, e1, e2)
    }
}

fn check_two_photon_initial(initial: &SystemState2) -> Result<usize> {
    let axis = *initial.field.axis();
    let a = atom_boundary(&axis)?;
    let asym = initial.field.max_asymmetry();
    if asym > crate::response::SYMMETRY_RTOL * initial.field.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NotExchangeSymmetric {
            max_deviation: asym,
        });
    }
    let mass = initial.excitation_norm_sqr();
    if mass > 0.0 {
        return Err(Error::InitialExcitation { mass });
    }
    let n = axis.len();
    let f = initial.field.values();
    let beyond: f64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i >= a || j >= a)
        .map(|(i, j)| f[i * n + j].norm_sqr())
        .sum::<f64>()
        * axis.dx()
        * axis.dx();
    if beyond > SUPPORT_TOLERANCE {
        return Err(Error::SupportOverlapsAtom { mass: beyond });
    }
    Ok(a)
}

/// Evolve a two-photon state from `initial.t` to `t_end`.
///
/// The initial field must be exchange symmetric, supported at `r1, r2 < 0`,
/// and the atom must start in the ground state.
pub fn evolve_two(
    initial: SystemState2,
    t_end: f64,
    params: &PhysicalParams,
) -> Result<SystemState2> {
    check_two_photon_initial(&initial)?;
    let mut state = initial;
    state.advance_to(t_end, params)?;
    Ok(state)
}

/// Two-photon field in comoving coordinates `x_i = r_i - c t_ref`.
pub fn extract_comoving_2d(
    state: &SystemState2,
    t_ref: f64,
    params: &PhysicalParams,
) -> Result<Grid2D> {
    let residual = state.excitation_norm_sqr();
    if residual > RESIDUAL_TOLERANCE {
        return Err(Error::ResidualExcitation {
            residual,
            tolerance: RESIDUAL_TOLERANCE,
        });
    }
    Ok(state.field.shifted(-params.c() * t_ref))
}

/// Two-photon state for an atom replaced by a harmonic oscillator.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicState2 {
    pub state: SystemState2,
    /// Doubly excited amplitude `psi(E, E)`.
    pub psi_ee: Complex64,
}

impl HarmonicState2 {
    pub fn total_norm_sqr(&self) -> f64 {
        self.state.total_norm_sqr() + self.psi_ee.norm_sqr()
    }
}

/// [`evolve_two`] with a harmonic oscillator in place of the two-level atom.
///
/// The oscillator admits double excitation, so the evolution is the exact
/// tensor product of two single-photon evolutions and the output carries no
/// nonlinear component.
pub fn evolve_two_harmonic(
    initial: SystemState2,
    t_end: f64,
    params: &PhysicalParams,
) -> Result<HarmonicState2> {
    let a = check_two_photon_initial(&initial)?;
    let axis = *initial.field.axis();
    let n = axis.len();
    let m = n + 1;
    let s = Stepper::new(params, axis.dx());
    let steps = step_count(initial.t, t_end, s.dt)?;

    // augmented (n + 1)^2 array, index n is the excited state; field indices
    // are stored as a ring as in `Ring2`
    let mut aug = vec![ZERO; m * m];
    for i in 0..n {
        aug[i * m..i * m + n].copy_from_slice(initial.field.row(i));
    }
    let mut offset = 0;
    let at = |lab: usize, offset: usize| (lab + n - offset) % n;
    let mut t = initial.t;
    for _ in 0..steps {
        let last = at(n - 1, offset);
        let lost: f64 = (0..m)
            .map(|k| aug[last * m + k].norm_sqr() + aug[k * m + last].norm_sqr())
            .sum::<f64>()
            * axis.dx();
        if lost > EXIT_TOLERANCE {
            return Err(Error::PulseExitedGrid { t, lost });
        }
        let r = at(a - 1, offset);
        // photon 2, every row
        for row in aug.chunks_mut(m) {
            let (incoming, e) = (row[r], row[n]);
            let e_mid = s.excite_half(e, incoming);
            row[n] = s.excite_full(e, incoming);
            row[r] = s.transmit(incoming, e_mid);
            row[last] = ZERO;
        }
        // photon 1, every column
        for j in 0..m {
            let (incoming, e) = (aug[r * m + j], aug[n * m + j]);
            let e_mid = s.excite_half(e, incoming);
            aug[n * m + j] = s.excite_full(e, incoming);
            aug[r * m + j] = s.transmit(incoming, e_mid);
            aug[last * m + j] = ZERO;
        }
        offset = (offset + 1) % n;
        t += s.dt;
    }

    let idx: Vec<usize> = (0..n).map(|i| at(i, offset)).collect();
    let field: Vec<Complex64> = idx
        .iter()
        .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
        .map(|(i, j)| aug[i * m + j])
        .collect();
    let e1: Vec<Complex64> = idx.iter().map(|&j| aug[n * m + j]).collect();
    let e2: Vec<Complex64> = idx.iter().map(|&i| aug[i * m + n]).collect();
    Ok(HarmonicState2 {
        state: SystemState2::new(
            Grid2D::new(axis, field)?,
            Grid1D::new(axis, e1)?,
            Grid1D::new(axis, e2)?,
            t,
        )?,
        psi_ee: aug[n * m + n],
    })
}

/// Lab grid and time span for scattering a pulse that occupies comoving
/// `0 < x < L`.
///
/// The lab grid is `r ∈ [-(L + padding), L + padding]`. The pulse starts at
/// `r ∈ [-L, 0]` at `t_in = -L / c` and the evolution ends at
/// `t_end = padding / c`, when the excitation has decayed by
/// `exp(-2 gamma padding / c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringFrame {
    pub lab: Axis,
    pub t_in: f64,
    pub t_end: f64,
    c: f64,
}

/// Padding, in coherence lengths, of [`ScatteringFrame::new`].
pub const DEFAULT_PADDING: f64 = 10.0;

impl ScatteringFrame {
    pub fn new(length: f64, dx: f64, padding: f64, params: &PhysicalParams) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidParameter {
                name: "L",
                value: length,
                reason: "pulse length must be > 0",
            });
        }
        if !(padding.is_finite() && padding > 0.0) {
            return Err(Error::InvalidParameter {
                name: "padding",
                value: padding,
                reason: "must be > 0",
            });
        }
        let half = length + padding;
        let lab = Axis::spanning(-half, half, dx)?;
        atom_boundary(&lab)?;
        Ok(Self {
            lab,
            t_in: -length / params.c(),
            t_end: padding / params.c(),
            c: params.c(),
        })
    }

    /// Padding of [`DEFAULT_PADDING`] coherence lengths.
    pub fn with_default_padding(length: f64, dx: f64, params: &PhysicalParams) -> Result<Self> {
        let padding = DEFAULT_PADDING * params.coherence_length();
        Self::new(length, dx, padding, params)
    }

    /// Comoving axis of the input at `t_in`.
    pub fn input_axis(&self) -> Axis {
        self.lab.shifted(-self.c * self.t_in)
    }

    /// Comoving axis of the output at `t_end`.
    pub fn output_axis(&self) -> Axis {
        self.lab.shifted(-self.c * self.t_end)
    }

    /// Lab-frame state at `t_in` for a comoving input on [`Self::input_axis`].
    pub fn incoming_1d(&self, phi: &Grid1D) -> Result<SystemState1> {
        self.check_input(phi.axis())?;
        SystemState1::new(phi.shifted(self.c * self.t_in), ZERO, self.t_in)
    }

    pub fn incoming_2d(&self, psi: &Grid2D) -> Result<SystemState2> {
        self.check_input(psi.axis())?;
        SystemState2::from_field(psi.shifted(self.c * self.t_in), self.t_in)
    }

    fn check_input(&self, axis: &Axis) -> Result<()> {
        if axis.same_geometry(&self.input_axis()) {
            Ok(())
        } else {
            Err(Error::GeometryMismatch(
                "input must be sampled on the frame's input axis".into(),
            ))
        }
    }

    /// Scatter a comoving single-photon input and return the comoving output
    /// on [`Self::output_axis`].
    pub fn scatter_1d(&self, phi: &Grid1D, params: &PhysicalParams) -> Result<Grid1D> {
        let out = evolve_single(self.incoming_1d(phi)?, self.t_end, params)?;
        extract_comoving_1d(&out, self.t_end, params)
    }

    pub fn scatter_2d(&self, psi: &Grid2D, params: &PhysicalParams) -> Result<Grid2D> {
        let out = evolve_two(self.incoming_2d(psi)?, self.t_end, params)?;
        extract_comoving_2d(&out, self.t_end, params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::l2_distance;
    use crate::pulse;

    #[test]
    fn atom_must_sit_on_boundary() {
        let axis = Axis::new(-5.05, 0.1, 100).unwrap();
        assert!(matches!(
            SystemState1::new(Grid1D::zeros(axis), ZERO, 0.0),
            Err(Error::AtomOffBoundary { .. })
        ));
    }

    #[test]
    fn spontaneous_emission_decay() {
        let p = PhysicalParams::default();
        let axis = Axis::spanning(-1.0, 20.0, 0.001).unwrap();
        let init = SystemState1::new(Grid1D::zeros(axis), Complex64::new(1.0, 0.0), 0.0).unwrap();
        let mut state = init;
        for k in 1..=4 {
            state.advance_to(k as f64, &p).unwrap();
            let expect = (-2.0 * k as f64).exp();
            assert!((state.psi_e.norm_sqr() - expect).abs() < 1e-9 * expect.max(1e-3));
            assert!(
                (state.total_norm_sqr() - 1.0).abs() < 1e-6,
                "{}",
                state.total_norm_sqr()
            );
        }
        // emitted packet sqrt(2 kappa) exp(-kappa (t - r)) at r in (0, t)
        let t = state.t;
        let i = axis.cell_of(1.5).unwrap();
        let r = axis.center(i);
        let expect = (2.0f64).sqrt() * (-(t - r)).exp();
        assert!((state.field.values()[i].norm() - expect).abs() < 1e-5);
    }

    #[test]
    fn uncoupled_atom_shifts_field() {
        let p = PhysicalParams::uncoupled(1.0).unwrap();
        let frame = ScatteringFrame::new(5.0, 0.05, 3.0, &p).unwrap();
        let phi = pulse::gaussian(frame.input_axis(), 2.5, 0.3, 0.3).unwrap();
        let out = frame.scatter_1d(&phi, &p).unwrap();
        let expect = pulse::gaussian(frame.output_axis(), 2.5, 0.3, 0.3).unwrap();
        assert!(l2_distance(&out, &expect).unwrap() < 1e-12);
    }

    #[test]
    fn rejects_bad_initial_states() {
        let p = PhysicalParams::default();
        let axis = Axis::spanning(-5.0, 5.0, 0.1).unwrap();
        let phi = pulse::gaussian(axis, 0.5, 0.5, 0.0).unwrap();
        let s = SystemState1::new(phi.clone(), ZERO, 0.0).unwrap();
        assert!(matches!(
            evolve_single(s.clone(), 1.0, &p),
            Err(Error::SupportOverlapsAtom { .. })
        ));
        let left = pulse::gaussian(axis, -3.0, 0.3, 0.0).unwrap();
        let s = SystemState1::new(left, ZERO, 0.0).unwrap();
        assert!(matches!(
            evolve_single(s.clone(), 20.0, &p),
            Err(Error::PulseExitedGrid { .. })
        ));
        assert!(matches!(
            evolve_single(s, -1.0, &p),
            Err(Error::BackwardsInTime { .. })
        ));
    }

    #[test]
    fn extraction_requires_decayed_atom() {
        let p = PhysicalParams::default();
        let axis = Axis::spanning(-1.0, 20.0, 0.01).unwrap();
        let s = SystemState1::new(Grid1D::zeros(axis), Complex64::new(1.0, 0.0), 0.0).unwrap();
        let s = evolve_single(s, 2.0, &p).unwrap();
        assert!(matches!(
            extract_comoving_1d(&s, 2.0, &p),
            Err(Error::ResidualExcitation { .. })
        ));
    }

    #[test]
    fn two_photon_step_keeps_exact_symmetry() {
        let p = PhysicalParams::default();
        let frame = ScatteringFrame::new(4.0, 0.05, 6.0, &p).unwrap();
        let a = pulse::gaussian(frame.input_axis(), 1.5, 0.5, 0.2).unwrap();
        let b = pulse::gaussian(frame.input_axis(), 2.5, 0.6, -0.1).unwrap();
        let psi = Grid2D::symmetrized_product(&a, &b).unwrap();
        let mut s = frame.incoming_2d(&psi).unwrap();
        let n0 = s.total_norm_sqr();
        for _ in 0..120 {
            s.step(&p).unwrap();
            assert_eq!(s.field.max_asymmetry(), 0.0);
            assert_eq!(s.psi_e1, s.psi_e2);
        }
        // O(dx^2) drift for a pulse a few coherence lengths long
        assert!(
            (s.total_norm_sqr() - n0).abs() < 5e-3,
            "{} {}",
            s.total_norm_sqr(),
            n0
        );
    }

    #[test]
    fn harmonic_mode_is_a_tensor_product() {
        let p = PhysicalParams::default();
        let frame = ScatteringFrame::new(4.0, 0.1, 10.0, &p).unwrap();
        let phi = pulse::rectangular(frame.input_axis(), 4.0).unwrap();
        let psi = Grid2D::product(&phi, &phi).unwrap();
        let h = evolve_two_harmonic(frame.incoming_2d(&psi).unwrap(), frame.t_end, &p).unwrap();
        let single = frame.scatter_1d(&phi, &p).unwrap();
        let expect = Grid2D::product(&single, &single).unwrap();
        let out = h.state.field.shifted(-frame.t_end);
        assert!(l2_distance(&out, &expect).unwrap() < 1e-12);
        assert!(h.psi_ee.norm_sqr() < 1e-15);
    }

    #[test]
    fn norm_changes_little_per_step() {
        let p = PhysicalParams::default();
        let frame = ScatteringFrame::new(4.0, 0.0125, 6.0, &p).unwrap();
        let phi = pulse::rectangular(frame.input_axis(), 4.0).unwrap();
        let state = frame
            .incoming_2d(&Grid2D::product(&phi, &phi).unwrap())
            .unwrap();
        let dx = frame.lab.dx();
        let a = atom_boundary(&frame.lab).unwrap();
        let s = Stepper::new(&p, dx);
        let mut ring = Ring2::new(
            state.field.values().to_vec(),
            state.psi_e1.values().to_vec(),
            state.psi_e2.values().to_vec(),
        );
        let norm = |r: &Ring2| {
            let f: f64 = r.field.iter().map(|v| v.norm_sqr()).sum();
            let e: f64 = r.e1.iter().chain(&r.e2).map(|v| v.norm_sqr()).sum();
            f * dx * dx + e * dx
        };
        let mut prev = norm(&ring);
        let steps = step_count(frame.t_in, frame.t_end, s.dt).unwrap();
        for k in 0..steps {
            ring.step(a, &s, dx, k as f64).unwrap();
            let now = norm(&ring);
            assert!((now - prev).abs() < 1e-6, "step {k}: {}", now - prev);
            prev = now;
        }

        let single = frame.incoming_1d(&phi).unwrap();
        let mut one = single.clone();
        for _ in 0..steps {
            let before = one.total_norm_sqr();
            one.step(&p).unwrap();
            assert!((one.total_norm_sqr() - before).abs() < 1e-6);
        }
    }
}
