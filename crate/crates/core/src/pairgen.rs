//! Photon pairs from a weak coherent pulse.
//!
//! A coherent pulse `|alpha>` in mode `phi` is expanded to two photons,
//! scattered, and then displaced by `D(alpha)` in `phi`. For long pulses the
//! coherent remainder is `|-alpha>`, which the displacement maps back to the
//! vacuum; what is left at two photons is the nonlinear pair component.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{inner_product, Grid1D, Grid2D, Wavefunction};
use crate::params::PhysicalParams;
use crate::response;

/// `|alpha|^2` at and above which the two-photon truncation is refused.
pub const MAX_MEAN_PHOTONS: f64 = 0.2;

/// `|alpha|^2` above which a truncation warning is logged.
pub const WARN_MEAN_PHOTONS: f64 = 0.05;

/// Pump intensity, as a fraction of `gamma`, above which [`pair_rate`] warns.
pub const WARN_INTENSITY: f64 = 0.1;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Weak coherent pulse `|alpha>` in the normalized mode `pulse`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentInput {
    alpha: Complex64,
    pulse: Grid1D,
    length: f64,
}

impl CoherentInput {
    pub fn new(alpha: Complex64, pulse: Grid1D, length: f64) -> Result<Self> {
        let alpha_sqr = alpha.norm_sqr();
        if !(alpha_sqr < MAX_MEAN_PHOTONS) {
            return Err(Error::AmplitudeTooLarge {
                alpha_sqr,
                limit: MAX_MEAN_PHOTONS,
            });
        }
        if alpha_sqr > WARN_MEAN_PHOTONS {
            log::warn!(
                "|alpha|^2 = {alpha_sqr} above {WARN_MEAN_PHOTONS}: three-photon terms are no longer negligible"
            );
        }
        let norm = pulse.norm_sqr();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidParameter {
                name: "pulse",
                value: norm,
                reason: "pulse mode must be normalized",
            });
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidParameter {
                name: "L",
                value: length,
                reason: "pulse length must be > 0",
            });
        }
        Ok(Self {
            alpha,
            pulse,
            length,
        })
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn pulse(&self) -> &Grid1D {
        &self.pulse
    }

    pub fn length(&self) -> f64 {
        self.length
    }
}

/// Field state truncated at two photons.
///
/// The one- and two-photon parts are `amplitude * grid` with grids that need
/// not be normalized. The physical state is `envelope` times the sum of the
/// parts; for coherent inputs the envelope is `exp(-|alpha|^2 / 2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedState {
    pub vac_amp: Complex64,
    pub one_photon: (Complex64, Grid1D),
    pub two_photon: (Complex64, Grid2D),
    pub envelope: f64,
    /// Reference mode of the expansion.
    pub mode: Grid1D,
    /// Effective pulse length.
    pub length: f64,
}

impl TruncatedState {
    pub fn vacuum_weight(&self) -> f64 {
        self.envelope.powi(2) * self.vac_amp.norm_sqr()
    }

    pub fn one_photon_weight(&self) -> f64 {
        self.envelope.powi(2) * self.one_photon.0.norm_sqr() * self.one_photon.1.norm_sqr()
    }

    pub fn two_photon_weight(&self) -> f64 {
        self.envelope.powi(2) * self.two_photon.0.norm_sqr() * self.two_photon.1.norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.vacuum_weight() + self.one_photon_weight() + self.two_photon_weight()
    }

    /// Two-photon amplitude `amplitude * grid`.
    pub fn two_photon_amplitude(&self) -> Grid2D {
        self.two_photon.1.scaled(self.two_photon.0)
    }

    pub fn one_photon_amplitude(&self) -> Grid1D {
        self.one_photon.1.scaled(self.one_photon.0)
    }
}

/// Expansion `|vac> + alpha |phi> + (alpha^2 / sqrt 2) |phi phi>` of the
/// coherent input, with envelope `exp(-|alpha|^2 / 2)`.
pub fn coherent_expand(input: &CoherentInput) -> Result<TruncatedState> {
    let alpha = input.alpha;
    let phi = input.pulse.clone();
    Ok(TruncatedState {
        vac_amp: ONE,
        one_photon: (alpha, phi.clone()),
        two_photon: (alpha * alpha / 2f64.sqrt(), Grid2D::product(&phi, &phi)?),
        envelope: (-alpha.norm_sqr() / 2.0).exp(),
        mode: phi,
        length: input.length,
    })
}

/// Scatter each photon-number component at the atom.
pub fn interact(state: &TruncatedState, params: &PhysicalParams) -> Result<TruncatedState> {
    params.warn_if_short(state.length, "interact");
    Ok(TruncatedState {
        vac_amp: state.vac_amp,
        one_photon: (
            state.one_photon.0,
            response::apply_u1(&state.one_photon.1, params)?,
        ),
        two_photon: (
            state.two_photon.0,
            response::apply_u2(&state.two_photon.1, params)?,
        ),
        envelope: state.envelope,
        mode: state.mode.clone(),
        length: state.length,
    })
}

/// Generalized Laguerre polynomial `L_n^(k)(x)` for `n <= 2`.
fn laguerre(n: usize, k: usize, x: f64) -> f64 {
    let k = k as f64;
    match n {
        0 => 1.0,
        1 => 1.0 + k - x,
        2 => ((k + 1.0) * (k + 2.0) - 2.0 * (k + 2.0) * x + x * x) / 2.0,
        _ => unreachable!("truncated at two photons"),
    }
}

/// Fock matrix element `<m| D(beta) |n>` of the displacement operator.
pub fn displacement_element(m: usize, n: usize, beta: Complex64) -> Complex64 {
    let x = beta.norm_sqr();
    let fact = |k: usize| (1..=k).product::<usize>() as f64;
    let pre = (-x / 2.0).exp();
    if m >= n {
        beta.powu((m - n) as u32) * (pre * (fact(n) / fact(m)).sqrt() * laguerre(n, m - n, x))
    } else {
        (-beta.conj()).powu((n - m) as u32)
            * (pre * (fact(m) / fact(n)).sqrt() * laguerre(m, n - m, x))
    }
}

/// Outcome of [`displace_remove`].
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementReport {
    pub state: TruncatedState,
    /// Norm of the one-photon amplitude left after displacement.
    pub residual_one_photon: f64,
    /// Error threshold for `residual_one_photon`.
    pub bound: f64,
    /// Part of the residual explained by the scattered one-photon component
    /// outside the reference mode.
    pub mode_mismatch: f64,
}

/// Apply `D(alpha)` in the reference mode and truncate at two photons.
///
/// The one-photon residual is reported. It fails with
/// [`Error::ModeMismatch`] when the residual exceeds ten times `|alpha|^3`
/// plus twice the weight outside the reference mode, which happens when the
/// coherent part is not `|-alpha>`.
pub fn displace_remove(state: &TruncatedState, alpha: Complex64) -> Result<DisplacementReport> {
    let phi = &state.mode;
    let one = state.one_photon_amplitude();
    let two = state.two_photon_amplitude();

    // one photon: p phi + q1
    let p = inner_product(phi, &one)?;
    let q1 = one.combine(ONE, phi, -p)?;

    // two photons: s phi phi + (phi chi + chi phi) + r
    let axis = *phi.axis();
    let n = axis.len();
    let dx = axis.dx();
    let proj: Vec<Complex64> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| phi.values()[i].conj() * two.get(i, j))
                .sum::<Complex64>()
                * dx
        })
        .collect();
    let proj = Grid1D::new(axis, proj)?;
    let s = inner_product(phi, &proj)?;
    let chi = proj.combine(ONE, phi, -s)?;
    let mut r = two.clone();
    {
        let (ph, ch) = (phi.values(), chi.values());
        for i in 0..n {
            for j in 0..n {
                let v = r.get(i, j) - s * ph[i] * ph[j] - ph[i] * ch[j] - ch[i] * ph[j];
                r.set(i, j, v);
            }
        }
    }

    let d = |m, k| displacement_element(m, k, alpha);
    let v = state.vac_amp;
    let out: Vec<Complex64> = (0..3)
        .map(|m| d(m, 0) * v + d(m, 1) * p + d(m, 2) * s)
        .collect();
    let sqrt2 = 2f64.sqrt();
    // orthogonal photon with zero or one photon in phi
    let f1 = q1.combine(d(0, 0), &chi, d(0, 1) * sqrt2)?;
    let f2 = q1.combine(d(1, 0), &chi, d(1, 1) * sqrt2)?;

    let one_out = f1.combine(ONE, phi, out[1])?;
    let mut two_out = r.scaled(d(0, 0));
    {
        let (ph, f) = (phi.values(), f2.values());
        for i in 0..n {
            for j in 0..n {
                let v = two_out.get(i, j)
                    + out[2] * ph[i] * ph[j]
                    + (ph[i] * f[j] + f[i] * ph[j]) / sqrt2;
                two_out.set(i, j, v);
            }
        }
    }

    let residual = state.envelope * one_out.norm();
    let a = alpha.norm();
    let mismatch = state.envelope * (q1.norm() + sqrt2 * a * chi.norm());
    let bound = 10.0 * a.powi(3) + 2.0 * mismatch;
    if residual > bound {
        return Err(Error::ModeMismatch { residual, bound });
    }
    Ok(DisplacementReport {
        state: TruncatedState {
            vac_amp: out[0],
            one_photon: (ONE, one_out),
            two_photon: (ONE, two_out),
            envelope: state.envelope,
            mode: phi.clone(),
            length: state.length,
        },
        residual_one_photon: residual,
        bound,
        mode_mismatch: mismatch,
    })
}

/// Mean number of pairs per pulse, `8 c / (gamma L) |alpha|^4`.
pub fn mean_pairs_per_pulse(alpha: Complex64, length: f64, params: &PhysicalParams) -> f64 {
    params.warn_if_short(length, "mean_pairs_per_pulse");
    8.0 * params.coherence_length() / length * alpha.norm_sqr().powi(2)
}

/// Pump intensity `c |alpha|^2 / L` of a pulse train, photons per unit time.
pub fn intensity(alpha: Complex64, length: f64, params: &PhysicalParams) -> f64 {
    params.c() * alpha.norm_sqr() / length
}

/// Pair rate `8 I^2 / gamma` under continuous pumping at intensity `I`.
pub fn pair_rate(intensity: f64, params: &PhysicalParams) -> f64 {
    if intensity > WARN_INTENSITY * params.gamma() {
        log::warn!(
            "pump intensity {intensity} is not small against gamma = {}; multi-photon terms are ignored",
            params.gamma()
        );
    }
    8.0 * intensity * intensity / params.gamma()
}

/// Empty two-photon grid on the mode's axis, for states without pairs.
pub fn vacuum_state(mode: Grid1D, length: f64) -> TruncatedState {
    let axis = *mode.axis();
    TruncatedState {
        vac_amp: ONE,
        one_photon: (ZERO, Grid1D::zeros(axis)),
        two_photon: (ZERO, Grid2D::zeros(axis)),
        envelope: 1.0,
        mode,
        length,
    }
}
