//! Scenario implementations.
//!
//! Everything written to disk is dimensionless: lengths in units of
//! `c / gamma`, wavenumbers in `gamma / c`, one-photon amplitudes in
//! `sqrt(gamma / c)` and two-photon amplitudes in `gamma / c`.

use std::path::Path;

use atomfwm::dynamics::{
    evolve_single, evolve_two, evolve_two_harmonic, extract_comoving_1d, extract_comoving_2d,
    ScatteringFrame,
};
use atomfwm::pairgen::{
    coherent_expand, displace_remove, intensity, interact, mean_pairs_per_pulse, pair_rate,
    CoherentInput,
};
use atomfwm::response::{
    apply_u1, apply_u2, apply_u2_parts, cross_section, delta_psi_nonlinear, mode_overlap_loss,
    rect_delta_psi, rect_phi_out, scattering_probability,
};
use atomfwm::spectral::{
    fwhm, integrate_k, k_nodes, long_pulse_pair_coefficient, scattering_spectrum,
    schmidt_decompose, single_photon_density, spontaneous_emission_spectrum, SpectralDensity,
};
use atomfwm::{
    inner_product, l2_distance, local_fourier_2d, pulse, Axis, Complex64, Grid1D, Grid2D,
    PhysicalParams, Wavefunction,
};
use serde_json::json;

use crate::config::{PulseSpec, RunConfig, Scenario};
use crate::error::CliError;
use crate::output::{Check, Summary, Table};

/// Unit-area tolerance of the figure spectra.
pub const AREA_TOLERANCE: f64 = 1e-4;

/// Relative tolerance of the figure extrema and plateau.
pub const FIGURE_RTOL: f64 = 0.02;

/// Bound on the L2 norm of the nonlinear component in harmonic mode.
pub const HARMONIC_L2_BOUND: f64 = 1e-3;

/// Quadrature nodes of the `figure3` spectra.
pub const SPECTRUM_NODES: usize = 4001;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub summary: Summary,
    pub cross_section: f64,
    /// Effective pulse length.
    pub length: f64,
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = PhysicalParams::new(cfg.gamma, cfg.c)?;
    let ctx = Context::new(cfg, p)?;
    let (tables, summary) = match cfg.scenario {
        Scenario::Respond1 => ctx.respond1()?,
        Scenario::Respond2 => ctx.respond2()?,
        Scenario::Evolve1 => ctx.evolve1()?,
        Scenario::Evolve2 => ctx.evolve2()?,
        Scenario::Figure2 => ctx.figure2()?,
        Scenario::Figure3 => ctx.figure3()?,
        Scenario::Spectrum => ctx.spectrum()?,
        Scenario::Schmidt => ctx.schmidt()?,
        Scenario::Pairs => ctx.pairs()?,
    };
    Ok(Outcome {
        tables,
        summary,
        cross_section: cross_section(&p),
        length: ctx.length,
    })
}

/// Read a pulse table: lines of `x, re[, im]` separated by commas or
/// whitespace. `#` starts a comment; a leading non-numeric line is taken as
/// a header.
pub fn read_pulse_file(path: &Path) -> Result<(Vec<f64>, Vec<Complex64>), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_pulse_table(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn parse_pulse_table(text: &str) -> Result<(Vec<f64>, Vec<Complex64>), String> {
    let mut xs = Vec::new();
    let mut amps = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let nums: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        let nums = match nums {
            Ok(n) => n,
            Err(_) if xs.is_empty() => continue,
            Err(e) => return Err(format!("line {}: {e}", no + 1)),
        };
        let amp = match nums[..] {
            [_, re] => Complex64::new(re, 0.0),
            [_, re, im] => Complex64::new(re, im),
            _ => return Err(format!("line {}: expected 2 or 3 columns", no + 1)),
        };
        xs.push(nums[0]);
        amps.push(amp);
    }
    if xs.len() < 2 {
        return Err("need at least two samples".into());
    }
    Ok((xs, amps))
}

struct Context<'a> {
    cfg: &'a RunConfig,
    p: PhysicalParams,
    length: f64,
    padding: f64,
    table: Option<(Vec<f64>, Vec<Complex64>)>,
}

impl<'a> Context<'a> {
    fn new(cfg: &'a RunConfig, p: PhysicalParams) -> Result<Self, CliError> {
        let dx = cfg.grid.dx;
        let table = match &cfg.pulse {
            PulseSpec::Rect { .. } => None,
            PulseSpec::File { path, .. } => Some(read_pulse_file(path)?),
        };
        let length = match (cfg.length(), &table) {
            (Some(l), _) => l,
            (None, Some((xs, _))) => (xs[xs.len() - 1] / dx - 1e-9).ceil() * dx,
            (None, None) => unreachable!("rect pulses always carry a length"),
        };
        let cells = length / dx;
        if !(length > 0.0) || (cells - cells.round()).abs() > 1e-6 {
            return Err(CliError::Config(format!(
                "L = {length} must be a positive multiple of dx = {dx}"
            )));
        }
        let mut padding = (cfg.grid.padding / dx - 1e-9).ceil() * dx;
        if let Some((xs, _)) = &table {
            padding = padding.max((-xs[0] / dx - 1e-9).ceil() * dx);
        }
        Ok(Self {
            cfg,
            p,
            length: cells.round() * dx,
            padding,
            table,
        })
    }

    fn dx(&self) -> f64 {
        self.cfg.grid.dx
    }

    fn is_rect(&self) -> bool {
        self.table.is_none()
    }

    /// Comoving axis `[-padding, L]`.
    fn line_axis(&self) -> Result<Axis, CliError> {
        Ok(Axis::spanning(-self.padding, self.length, self.dx())?)
    }

    fn frame(&self) -> Result<ScatteringFrame, CliError> {
        Ok(ScatteringFrame::new(
            self.length,
            self.dx(),
            self.padding,
            &self.p,
        )?)
    }

    fn pulse(&self, axis: Axis) -> Result<Grid1D, CliError> {
        match &self.table {
            None => Ok(pulse::rectangular(axis, self.length)?),
            Some((xs, amps)) => {
                let g = pulse::resample(axis, xs, amps)?;
                if g.norm_sqr() == 0.0 {
                    return Err(CliError::Config(
                        "pulse file has zero norm on the grid".into(),
                    ));
                }
                Ok(g.normalized())
            }
        }
    }

    fn x(&self, x: f64) -> f64 {
        x / self.p.coherence_length()
    }

    fn amp1(&self) -> f64 {
        self.p.coherence_length().sqrt()
    }

    fn amp2(&self) -> f64 {
        self.p.coherence_length()
    }

    fn norm_check(&self, name: &str, value: f64, expected: f64) -> Check {
        Check::absolute(name, value, expected, self.cfg.tolerances.quadrature)
    }

    fn line_table(&self, name: &str, g: &Grid1D, extra: &[(&str, &Grid1D)]) -> Table {
        let mut cols = vec!["x [c/gamma]", "re [sqrt(gamma/c)]", "im [sqrt(gamma/c)]"];
        let names: Vec<String> = extra
            .iter()
            .flat_map(|(n, _)| {
                [
                    format!("{n}_re [sqrt(gamma/c)]"),
                    format!("{n}_im [sqrt(gamma/c)]"),
                ]
            })
            .collect();
        cols.extend(names.iter().map(String::as_str));
        let mut t = Table::new(name, &cols);
        let s = self.amp1();
        for (i, x) in g.axis().centers().enumerate() {
            let mut row = vec![self.x(x), g.values()[i].re * s, g.values()[i].im * s];
            for (_, e) in extra {
                row.push(e.values()[i].re * s);
                row.push(e.values()[i].im * s);
            }
            t.push(row);
        }
        t
    }

    fn plane_table(&self, name: &str, g: &Grid2D, extra: &[(&str, &Grid2D)]) -> Table {
        let mut cols = vec![
            "x1 [c/gamma]",
            "x2 [c/gamma]",
            "re [gamma/c]",
            "im [gamma/c]",
        ];
        let names: Vec<String> = extra
            .iter()
            .flat_map(|(n, _)| [format!("{n}_re [gamma/c]"), format!("{n}_im [gamma/c]")])
            .collect();
        cols.extend(names.iter().map(String::as_str));
        let mut t = Table::new(name, &cols);
        let s = self.amp2();
        let xs: Vec<f64> = g.axis().centers().map(|x| self.x(x)).collect();
        for (i, &x1) in xs.iter().enumerate() {
            for (j, &x2) in xs.iter().enumerate() {
                let v = g.get(i, j);
                let mut row = vec![x1, x2, v.re * s, v.im * s];
                for (_, e) in extra {
                    let w = e.get(i, j);
                    row.push(w.re * s);
                    row.push(w.im * s);
                }
                t.push(row);
            }
        }
        t
    }

    fn respond1(&self) -> Result<(Vec<Table>, Summary), CliError> {
        let axis = self.line_axis()?;
        let phi = self.pulse(axis)?;
        let out = apply_u1(&phi, &self.p)?;
        let mut s = Summary::default();
        s.norm_checks
            .push(self.norm_check("output_norm", out.norm_sqr(), phi.norm_sqr()));
        let t = inner_product(&phi, &out)?;
        s.result("transmission_amplitude", [t.re, t.im]);
        s.result("transmission_probability", t.norm_sqr());
        let mut extra = Vec::new();
        let closed;
        if self.is_rect() {
            closed = Grid1D::from_fn(axis, |x| {
                Complex64::new(
                    rect_phi_out(x, self.length, &self.p).unwrap_or(f64::NAN),
                    0.0,
                )
            });
            let err = atomfwm::max_abs_difference(&out, &closed)? * self.amp1();
            s.residual("closed_form_max_abs", err);
            if self.cfg.check_analytic {
                s.checks.push(Check::at_most(
                    "closed_form_max_abs",
                    err,
                    self.cfg.tolerances.quadrature,
                ));
            }
            extra.push(("closed_form", &closed));
        } else if self.cfg.check_analytic {
            log::warn!("closed forms exist only for rectangular pulses; --check-analytic ignored");
        }
        Ok((vec![self.line_table("respond1", &out, &extra)], s))
    }

    fn respond2(&self) -> Result<(Vec<Table>, Summary), CliError> {
        let axis = self.line_axis()?;
        let phi = self.pulse(axis)?;
        let psi = Grid2D::product(&phi, &phi)?;
        let parts = apply_u2_parts(&psi, &self.p)?;
        let total = parts.total();
        let mut s = Summary::default();
        s.norm_checks
            .push(self.norm_check("output_norm", total.norm_sqr(), psi.norm_sqr()));
        s.scattering_probability = Some(json!({
            "quadrature": mode_overlap_loss(&total, &parts.linear)?,
            "input_mode_quadrature": mode_overlap_loss(&total, &psi)?,
            "long_pulse_formula": scattering_probability(self.length, &self.p),
        }));
        s.result("nonlinear_norm_sqr", parts.nonlinear.norm_sqr());
        if self.is_rect() {
            let mut worst: f64 = 0.0;
            for (i, x1) in axis.centers().enumerate() {
                for (j, x2) in axis.centers().enumerate() {
                    let want = rect_delta_psi(x1, x2, self.length, &self.p)?;
                    worst = worst.max((parts.nonlinear.get(i, j) - want).norm());
                }
            }
            let worst = worst * self.amp2();
            s.residual("closed_form_max_abs", worst);
            if self.cfg.check_analytic {
                s.checks.push(Check::at_most(
                    "closed_form_max_abs",
                    worst,
                    self.cfg.tolerances.quadrature,
                ));
            }
        }
        let table = self.plane_table("respond2", &total, &[("nonlinear", &parts.nonlinear)]);
        Ok((vec![table], s))
    }

    fn evolve1(&self) -> Result<(Vec<Table>, Summary), CliError> {
        let frame = self.frame()?;
        let phi = self.pulse(frame.input_axis())?;
        let start = frame.incoming_1d(&phi)?;
        let n0 = start.total_norm_sqr();
        let end = evolve_single(start, frame.t_end, &self.p)?;
        let out = extract_comoving_1d(&end, frame.t_end, &self.p)?;
        let mut s = Summary::default();
        s.norm_checks
            .push(self.norm_check("total_norm", end.total_norm_sqr(), n0));
        s.residual("excitation", end.psi_e.norm_sqr());
        let mut extra = Vec::new();
        let analytic;
        if self.cfg.check_analytic {
            analytic = apply_u1(&phi, &self.p)?.regrid(frame.output_axis())?;
            let d = l2_distance(&out, &analytic)?;
            s.residual("oracle_l2", d);
            s.checks.push(Check::at_most(
                "oracle_l2",
                d,
                self.cfg.tolerances.oracle_l2,
            ));
            if self.is_rect() {
                let closed = Grid1D::from_fn(frame.output_axis(), |x| {
                    Complex64::new(
                        rect_phi_out(x, self.length, &self.p).unwrap_or(f64::NAN),
                        0.0,
                    )
                });
                s.residual("closed_form_l2", l2_distance(&out, &closed)?);
            }
            extra.push(("analytic", &analytic));
        }
        Ok((vec![self.line_table("evolve1", &out, &extra)], s))
    }

    fn evolve2(&self) -> Result<(Vec<Table>, Summary), CliError> {
        let frame = self.frame()?;
        let phi = self.pulse(frame.input_axis())?;
        let psi = Grid2D::product(&phi, &phi)?;
        let start = frame.incoming_2d(&psi)?;
        let n0 = start.total_norm_sqr();
        let end = evolve_two(start.clone(), frame.t_end, &self.p)?;
        let out = extract_comoving_2d(&end, frame.t_end, &self.p)?;
        let mut s = Summary::default();
        s.norm_checks
            .push(self.norm_check("total_norm", end.total_norm_sqr(), n0));
        s.residual("excitation", end.excitation_norm_sqr());
        if self.cfg.check_analytic {
            let analytic = apply_u2(&psi, &self.p)?.regrid(frame.output_axis())?;
            let d = l2_distance(&out, &analytic)?;
            s.residual("oracle_l2", d);
            s.checks.push(Check::at_most(
                "oracle_l2",
                d,
                self.cfg.tolerances.oracle_l2,
            ));
        }
        let mut extra = Vec::new();
        let harmonic;
        if self.cfg.diagnostic_harmonic {
            let h = evolve_two_harmonic(start, frame.t_end, &self.p)?;
            s.norm_checks
                .push(self.norm_check("harmonic_total_norm", h.total_norm_sqr(), n0));
            s.residual("harmonic_double_excitation", h.psi_ee.norm_sqr());
            harmonic = extract_comoving_2d(&h.state, frame.t_end, &self.p)?;
            let single = frame.scatter_1d(&phi, &self.p)?;
            let product = Grid2D::product(&single, &single)?;
            let d = l2_distance(&harmonic, &product)?;
            s.residual("harmonic_nonlinear_l2", d);
            s.result("two_level_nonlinear_l2", l2_distance(&out, &product)?);
            s.checks.push(Check::at_most(
                "harmonic_nonlinear_l2",
                d,
                HARMONIC_L2_BOUND,
            ));
            extra.push(("harmonic", &harmonic));
        }
        Ok((vec![self.plane_table("evolve2", &out, &extra)], s))
    }

    fn figure2(&self) -> Result<(Vec<Table>, Summary), CliError> {
        if !self.is_rect() {
            return Err(CliError::Config(
                "figure2 uses the rectangular pulse".into(),
            ));
        }
        let l = self.length;
        let dx = self.dx();
        let start = -(l / 2.0 / dx - 1e-9).ceil() * dx;
        let axis = Axis::spanning(start, l, dx)?;
        let phi = pulse::rectangular(axis, l)?;
        let u1 = apply_u1(&phi, &self.p)?;
        let dpsi = delta_psi_nonlinear(&phi, &self.p)?;
        let out = Grid2D::product(&u1, &u1)?.combine(1.0.into(), &dpsi, 1.0.into())?;

        let mut s = Summary::default();
        s.norm_checks
            .push(self.norm_check("output_norm", out.norm_sqr(), 1.0));
        let extrema = |g: &Grid2D| {
            let re = g.values().iter().map(|v| v.re * l);
            let (lo, hi) = re.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                (a.min(v), b.max(v))
            });
            (lo, hi)
        };
        let (out_min, out_max) = extrema(&out);
        let (d_min, d_max) = extrema(&dpsi);
        let plateau = {
            let i = axis.cell_of(0.25 * l).expect("inside");
            let j = axis.cell_of(0.75 * l).expect("inside");
            out.get(i, j).re * l
        };
        s.result("psi_out_min_times_L", out_min);
        s.result("psi_out_max_times_L", out_max);
        s.result("delta_psi_min_times_L", d_min);
        s.result("delta_psi_max_times_L", d_max);
        s.result("plateau_times_L", plateau);
        s.checks.push(Check::relative(
            "delta_psi_min_times_L",
            d_min,
            -4.0,
            FIGURE_RTOL,
        ));
        s.checks.push(Check::relative(
            "psi_out_max_times_L",
            out_max,
            2.0,
            FIGURE_RTOL,
        ));
        s.checks.push(Check::relative(
            "plateau_times_L",
            plateau,
            1.0,
            FIGURE_RTOL,
        ));
        s.scattering_probability = Some(json!({
            "quadrature": mode_overlap_loss(&out, &Grid2D::product(&u1, &u1)?)?,
            "long_pulse_formula": scattering_probability(l, &self.p),
        }));
        let tables = vec![
            self.plane_table("figure2_psi_out", &out, &[]),
            self.plane_table("figure2_delta_psi", &dpsi, &[]),
        ];
        Ok((tables, s))
    }

    fn figure3(&self) -> Result<(Vec<Table>, Summary), CliError> {
        let l = self.length;
        let (g, c) = (self.p.gamma(), self.p.c());
        // the plotted quantities: u = c k / gamma, (gamma^2 L / 16 c^2) I(k)
        let y_scale = g * g * l / (16.0 * c * c);
        let mut t = Table::new(
            "figure3",
            &[
                "u [gamma/c]",
                "weight [gamma/c]",
                "scatter [c/gamma]",
                "lorentzian [c/gamma]",
            ],
        );
        let (mut a_s, mut a_l) = (0.0, 0.0);
        for (k, w) in k_nodes(&self.p, SPECTRUM_NODES) {
            let u = k * c / g;
            let wu = w * c / g;
            let ys = scattering_spectrum(k, l, &self.p) * y_scale;
            let yl = spontaneous_emission_spectrum(k, &self.p) * g / c;
            a_s += wu * ys;
            a_l += wu * yl;
            t.push(vec![u, wu, ys, yl]);
        }
        let mut s = Summary::default();
        s.norm_checks
            .push(Check::absolute("scatter_area", a_s, 1.0, AREA_TOLERANCE));
        s.norm_checks
            .push(Check::absolute("lorentzian_area", a_l, 1.0, AREA_TOLERANCE));
        let integral = integrate_k(
            |k| scattering_spectrum(k, l, &self.p),
            &self.p,
            SPECTRUM_NODES,
        );
        let formula = scattering_probability(l, &self.p);
        s.checks.push(Check::relative(
            "spectrum_integral",
            integral,
            formula,
            1e-3,
        ));
        let ws = fwhm(|k| scattering_spectrum(k, l, &self.p), &self.p) * c / g;
        let wl = fwhm(|k| spontaneous_emission_spectrum(k, &self.p), &self.p) * c / g;
        s.result("fwhm_scatter_u", ws);
        s.result("fwhm_lorentzian_u", wl);
        s.result("fwhm_ratio", ws / wl);
        s.scattering_probability =
            Some(json!({ "spectrum_integral": integral, "long_pulse_formula": formula }));
        Ok((vec![t], s))
    }

    /// Rectangular or file pulse, its linear output and the pair component.
    fn two_photon_output(&self) -> Result<(Grid2D, Grid2D), CliError> {
        let phi = self.pulse(self.line_axis()?)?;
        let u1 = apply_u1(&phi, &self.p)?;
        let dpsi = delta_psi_nonlinear(&phi, &self.p)?;
        let linear = Grid2D::product(&u1, &u1)?;
        Ok((linear, dpsi))
    }

    fn spectrum(&self) -> Result<(Vec<Table>, Summary), CliError> {
        let l = self.length;
        let (linear, dpsi) = self.two_photon_output()?;
        let out = linear.combine(1.0.into(), &dpsi, 1.0.into())?;
        let kd = local_fourier_2d(&out, 0.0, l)?;
        let schmidt = schmidt_decompose(&kd);
        let rho = single_photon_density(&schmidt);
        let sd = SpectralDensity::from_density(&rho);
        let (g, c) = (self.p.gamma(), self.p.c());

        let mut t = Table::new(
            "spectrum",
            &["k [gamma/c]", "numerical [c/gamma]", "analytic [c/gamma]"],
        );
        for (k, v) in sd.k.iter().zip(&sd.values) {
            t.push(vec![
                k * c / g,
                v * g / c,
                scattering_spectrum(*k, l, &self.p) * g / c,
            ]);
        }
        let mut s = Summary::default();
        s.norm_checks
            .push(self.norm_check("output_norm", out.norm_sqr(), 1.0));
        let parseval = (kd.retained_weight() + kd.truncated_weight()) / kd.window_norm_sqr();
        s.norm_checks
            .push(self.norm_check("parseval", parseval, 1.0));
        s.residual("truncated_weight", kd.truncated_weight());
        s.result("n_max", kd.n_max());
        s.result("scattered_fraction", rho.scattered_fraction());
        s.result("c0_population", rho.c0_population());
        s.result("population_0", rho.population(0));
        s.scattering_probability = Some(json!({
            "spectrum_integral": sd.integral(),
            "long_pulse_formula": scattering_probability(l, &self.p),
        }));
        Ok((vec![t], s))
    }

    fn schmidt(&self) -> Result<(Vec<Table>, Summary), CliError> {
        let l = self.length;
        let (_, dpsi) = self.two_photon_output()?;
        let kd = local_fourier_2d(&dpsi, 0.0, l)?;
        let sf = schmidt_decompose(&kd);
        let mut t = Table::new("schmidt", &["n", "k [gamma/c]", "re", "im", "long_pulse"]);
        let kscale = self.p.coherence_length();
        // k = 0 carries no long-pulse pair
        t.push(vec![0.0, 0.0, sf.c0().re, sf.c0().im, 0.0]);
        let mut worst: f64 = 0.0;
        for &(n, v) in sf.pairs() {
            let want = long_pulse_pair_coefficient(n, l, &self.p);
            if n.abs() <= 20 {
                worst = worst.max((v.re - want).abs() / want.abs());
            }
            t.push(vec![n as f64, sf.k(n) * kscale, v.re, v.im, want]);
        }
        t.rows.sort_by(|a, b| a[0].total_cmp(&b[0]));

        let mut s = Summary::default();
        let accounted =
            sf.c0().norm_sqr() + sf.pair_weight() + sf.residual_weight() + sf.truncated_weight();
        s.norm_checks
            .push(self.norm_check("parseval", accounted / sf.window_norm_sqr(), 1.0));
        s.residual("residual_weight", sf.residual_weight());
        s.residual("truncated_weight", sf.truncated_weight());
        s.result("c0", [sf.c0().re, sf.c0().im]);
        s.result("pair_weight", sf.pair_weight());
        s.result(
            "anti_diagonal_weight",
            sf.c0().norm_sqr() + sf.pair_weight(),
        );
        s.result("window_norm_sqr", sf.window_norm_sqr());
        s.result("nonlinear_norm_sqr", dpsi.norm_sqr());
        s.result("n_max", sf.n_max());
        s.result("max_rel_error_n20", worst);
        s.scattering_probability = Some(json!({
            "pair_weight": sf.pair_weight(),
            "long_pulse_formula": scattering_probability(l, &self.p),
        }));
        Ok((vec![t], s))
    }

    fn pairs(&self) -> Result<(Vec<Table>, Summary), CliError> {
        let l = self.length;
        let axis = self.line_axis()?;
        let alpha = Complex64::new(self.cfg.alpha, 0.0);
        let input = CoherentInput::new(alpha, self.pulse(axis)?, l)?;
        let state = coherent_expand(&input)?;
        let out = interact(&state, &self.p)?;
        let rep = displace_remove(&out, alpha)?;

        let mut s = Summary::default();
        let a = self.cfg.alpha;
        s.norm_checks.push(Check::at_most(
            "truncation_deficit",
            1.0 - state.norm_sqr(),
            a.powi(6),
        ));
        s.norm_checks
            .push(self.norm_check("interaction_norm", out.norm_sqr(), state.norm_sqr()));
        s.residual("residual_one_photon", rep.residual_one_photon);
        s.residual("mode_mismatch", rep.mode_mismatch);
        s.residual("bound", rep.bound);

        let formula = mean_pairs_per_pulse(alpha, l, &self.p);
        let weight = rep.state.two_photon_weight();
        let i_in = intensity(alpha, l, &self.p);
        let rate = pair_rate(i_in, &self.p);
        let identity = if rate > 0.0 {
            (formula / (l / self.p.c()) - rate).abs() / rate
        } else {
            0.0
        };
        s.result("mean_pairs_formula", formula);
        s.result("pair_weight", weight);
        s.result("vacuum_weight", rep.state.vacuum_weight());
        s.result("intensity", i_in);
        s.result("pair_rate", rate);
        s.checks
            .push(Check::at_most("rate_identity", identity, 1e-12));

        let pair = rep.state.two_photon_amplitude();
        let resid = rep.state.one_photon_amplitude();
        let mut t = Table::new(
            "pairs",
            &[
                "x [c/gamma]",
                "pair_diag_re [gamma/c]",
                "pair_diag_im [gamma/c]",
                "residual_re [sqrt(gamma/c)]",
                "residual_im [sqrt(gamma/c)]",
            ],
        );
        let env = rep.state.envelope;
        for (i, x) in axis.centers().enumerate() {
            let d = pair.get(i, i) * env * self.amp2();
            let r = resid.values()[i] * env * self.amp1();
            t.push(vec![self.x(x), d.re, d.im, r.re, r.im]);
        }
        Ok((vec![t], s))
    }
}
