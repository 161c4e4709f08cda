//! k-space analysis of two-photon outputs.
//!
//! For long pulses the local Fourier coefficients of the output are
//! concentrated on `(0, 0)` and on the anti-diagonal `(n, -n)`, so the
//! k basis already is the Schmidt basis. [`schmidt_decompose`] reads it off
//! directly and reports the weight it leaves out; [`schmidt_spectrum`] does a
//! full singular value decomposition for comparison.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::fourier::KDecomposition;
use crate::params::PhysicalParams;

/// `FWHM(squared Lorentzian) / FWHM(Lorentzian) = sqrt(sqrt(2) - 1)`.
pub const LINEWIDTH_RATIO: f64 = 0.643_594_252_905_582_6;

/// Anti-correlated form `c0 |0;0> + Σ_n p_n |k_n;-k_n>` of a k-space
/// decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtForm {
    length: f64,
    c0: Complex64,
    /// `(n, p_n)` for `n = -n_max..=n_max`, `n != 0`
    pairs: Vec<(i64, Complex64)>,
    residual_weight: f64,
    truncated_weight: f64,
    window_norm_sqr: f64,
}

impl SchmidtForm {
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dk(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn k(&self, n: i64) -> f64 {
        n as f64 * self.dk()
    }

    pub fn c0(&self) -> Complex64 {
        self.c0
    }

    pub fn n_max(&self) -> i64 {
        self.pairs.last().map_or(0, |p| p.0)
    }

    /// Pair amplitude `p_n`; zero for `n = 0` and beyond the cutoff.
    pub fn pair(&self, n: i64) -> Complex64 {
        let m = self.n_max();
        if n == 0 || n.abs() > m {
            return Complex64::new(0.0, 0.0);
        }
        let idx = if n < 0 { n + m } else { n + m - 1 };
        self.pairs[idx as usize].1
    }

    pub fn pairs(&self) -> &[(i64, Complex64)] {
        &self.pairs
    }

    /// `Σ_{n != 0} |p_n|^2`
    pub fn pair_weight(&self) -> f64 {
        self.pairs.iter().map(|p| p.1.norm_sqr()).sum()
    }

    /// Retained weight off the anti-diagonal.
    pub fn residual_weight(&self) -> f64 {
        self.residual_weight
    }

    /// Weight beyond the k cutoff.
    pub fn truncated_weight(&self) -> f64 {
        self.truncated_weight
    }

    /// Real-space norm of the analyzed window.
    pub fn window_norm_sqr(&self) -> f64 {
        self.window_norm_sqr
    }
}

/// Read `c(0, 0)` and the anti-diagonal `c(n, -n)` from `psi_k`.
pub fn schmidt_decompose(psi_k: &KDecomposition) -> SchmidtForm {
    let m = psi_k.n_max() as i64;
    let c0 = psi_k.get(0, 0);
    let pairs: Vec<(i64, Complex64)> = (-m..=m)
        .filter(|&n| n != 0)
        .map(|n| (n, psi_k.get(n, -n)))
        .collect();
    let diagonal: f64 = c0.norm_sqr() + pairs.iter().map(|p| p.1.norm_sqr()).sum::<f64>();
    SchmidtForm {
        length: psi_k.length(),
        c0,
        pairs,
        residual_weight: (psi_k.retained_weight() - diagonal).max(0.0),
        truncated_weight: psi_k.truncated_weight(),
        window_norm_sqr: psi_k.window_norm_sqr(),
    }
}

/// Squared Schmidt coefficients of the retained coefficient matrix, largest
/// first, from a full singular value decomposition.
///
/// Only modes with `|n| <= max_n` enter, which bounds the cost.
pub fn schmidt_spectrum(psi_k: &KDecomposition, max_n: usize) -> Vec<f64> {
    let m = psi_k.n_max().min(max_n) as i64;
    let side = (2 * m + 1) as usize;
    let matrix = DMatrix::from_fn(side, side, |r, c| psi_k.get(r as i64 - m, c as i64 - m));
    let mut values: Vec<f64> = matrix
        .svd(false, false)
        .singular_values
        .iter()
        .map(|s| s * s)
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Diagonal single-photon density matrix in the k basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SinglePhotonDensity {
    dk: f64,
    /// `(n, population)` for `n = -n_max..=n_max`
    populations: Vec<(i64, f64)>,
    c0_population: f64,
}

impl SinglePhotonDensity {
    pub fn dk(&self) -> f64 {
        self.dk
    }

    pub fn populations(&self) -> &[(i64, f64)] {
        &self.populations
    }

    pub fn population(&self, n: i64) -> f64 {
        self.populations
            .iter()
            .find(|p| p.0 == n)
            .map_or(0.0, |p| p.1)
    }

    pub fn trace(&self) -> f64 {
        self.populations.iter().map(|p| p.1).sum()
    }

    /// `|c0|^2`, which approximates `population(0)` for long pulses.
    pub fn c0_population(&self) -> f64 {
        self.c0_population
    }

    /// Scattered fraction `Σ_{n != 0} population(n)`.
    pub fn scattered_fraction(&self) -> f64 {
        self.populations
            .iter()
            .filter(|p| p.0 != 0)
            .map(|p| p.1)
            .sum()
    }
}

/// Reduced density matrix of one photon of a [`SchmidtForm`].
///
/// `population(n) = |p_n|^2` for `n != 0`. The `k = 0` population completes
/// the trace to one (`1 - Σ|p_n|^2`), so the result is normalized even
/// though the analyzed window is not.
pub fn single_photon_density(schmidt: &SchmidtForm) -> SinglePhotonDensity {
    let scattered = schmidt.pair_weight();
    let m = schmidt.n_max();
    let populations = (-m..=m)
        .map(|n| {
            let p = if n == 0 {
                1.0 - scattered
            } else {
                schmidt.pair(n).norm_sqr()
            };
            (n, p)
        })
        .collect();
    SinglePhotonDensity {
        dk: schmidt.dk(),
        populations,
        c0_population: schmidt.c0().norm_sqr(),
    }
}

/// Long-pulse pair amplitude `-8 gamma c / (L (gamma^2 + c^2 k^2))`.
pub fn long_pulse_pair_coefficient(n: i64, length: f64, params: &PhysicalParams) -> f64 {
    let (g, c) = (params.gamma(), params.c());
    let k = 2.0 * PI * n as f64 / length;
    -8.0 * g * c / (length * (g * g + c * c * k * k))
}

/// Scattering spectrum `(16 c / (gamma L)) 2 c gamma^3 / (pi (gamma^2 + c^2 k^2)^2)`.
pub fn scattering_spectrum(k: f64, length: f64, params: &PhysicalParams) -> f64 {
    params.warn_if_short(length, "scattering_spectrum");
    let (g, c) = (params.gamma(), params.c());
    let d = g * g + c * c * k * k;
    16.0 * c / (g * length) * 2.0 * c * g.powi(3) / (PI * d * d)
}

/// Unit-area Lorentzian `c gamma / (pi (gamma^2 + c^2 k^2))`.
pub fn spontaneous_emission_spectrum(k: f64, params: &PhysicalParams) -> f64 {
    let (g, c) = (params.gamma(), params.c());
    c * g / (PI * (g * g + c * c * k * k))
}

/// Quadrature nodes over the whole k axis.
///
/// Maps `k = (gamma / c) tan(theta)` and applies the midpoint rule in
/// `theta`. Lorentzian powers become trigonometric polynomials under this
/// map, which the rule integrates exactly.
pub fn k_nodes(params: &PhysicalParams, n: usize) -> Vec<(f64, f64)> {
    let scale = params.kappa();
    let h = PI / n as f64;
    (0..n)
        .map(|i| {
            let theta = -PI / 2.0 + (i as f64 + 0.5) * h;
            let cos = theta.cos();
            (scale * theta.tan(), scale * h / (cos * cos))
        })
        .collect()
}

/// `∫ f(k) dk` over the real line using [`k_nodes`].
pub fn integrate_k(f: impl Fn(f64) -> f64, params: &PhysicalParams, n: usize) -> f64 {
    k_nodes(params, n).into_iter().map(|(k, w)| f(k) * w).sum()
}

/// Full width at half maximum of a line shape peaked at `k = 0` and
/// decreasing in `|k|`.
pub fn fwhm(f: impl Fn(f64) -> f64, params: &PhysicalParams) -> f64 {
    let half = f(0.0) / 2.0;
    let mut lo = 0.0;
    let mut hi = params.kappa();
    while f(hi) > half {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > half {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    lo + hi
}

/// Width of the scattering spectrum relative to the spontaneous emission
/// line, from the half-maximum points of both shapes.
pub fn linewidth_ratio(params: &PhysicalParams) -> f64 {
    // the pulse length only scales the scattering line
    let length = 1e6 * params.coherence_length();
    let scatter = fwhm(|k| scattering_spectrum(k, length, params), params);
    let lorentz = fwhm(|k| spontaneous_emission_spectrum(k, params), params);
    scatter / lorentz
}

/// Sampled spectrum with quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    pub k: Vec<f64>,
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SpectralDensity {
    /// Sample `f` on [`k_nodes`].
    pub fn sample(f: impl Fn(f64) -> f64, params: &PhysicalParams, n: usize) -> Self {
        let nodes = k_nodes(params, n);
        Self {
            k: nodes.iter().map(|p| p.0).collect(),
            values: nodes.iter().map(|p| f(p.0)).collect(),
            weights: nodes.iter().map(|p| p.1).collect(),
        }
    }

    /// Continuous spectrum `population(n) / dk` of the scattered photons
    /// (`n != 0`) with weights `dk`.
    pub fn from_density(density: &SinglePhotonDensity) -> Self {
        let dk = density.dk();
        let scattered: Vec<&(i64, f64)> =
            density.populations().iter().filter(|p| p.0 != 0).collect();
        Self {
            k: scattered.iter().map(|p| p.0 as f64 * dk).collect(),
            values: scattered.iter().map(|p| p.1 / dk).collect(),
            weights: vec![dk; scattered.len()],
        }
    }

    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v * w)
            .sum()
    }
}
