//! Acceptance suite. Prints one line per criterion and exits nonzero if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use atomfwm::dynamics::{
    evolve_single, evolve_two, evolve_two_harmonic, extract_comoving_1d, extract_comoving_2d,
    ScatteringFrame,
};
use atomfwm::pairgen::{intensity, mean_pairs_per_pulse, pair_rate};
use atomfwm::response::{
    apply_u1, apply_u2, apply_u2_parts, cross_section, delta_psi_nonlinear, rect_phi_out,
    rect_scattering_quadrature,
};
use atomfwm::spectral::{
    fwhm, integrate_k, long_pulse_pair_coefficient, scattering_spectrum, schmidt_decompose,
    spontaneous_emission_spectrum, SchmidtForm,
};
use atomfwm::{
    l2_distance, local_fourier_2d, pulse, Axis, Complex64, Grid1D, Grid2D, PhysicalParams,
    Wavefunction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn unit() -> PhysicalParams {
    PhysicalParams::default()
}

fn ensure(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn closed_form(axis: Axis, l: f64, p: &PhysicalParams) -> Grid1D {
    Grid1D::from_fn(axis, |x| {
        Complex64::new(rect_phi_out(x, l, p).unwrap(), 0.0)
    })
}

/// Linear output and pair component of the L = 200 rectangular pulse.
struct LongPulse {
    l: f64,
    linear_1d: Grid1D,
    dpsi: Grid2D,
    schmidt: SchmidtForm,
}

fn long_pulse() -> &'static LongPulse {
    static CELL: OnceLock<LongPulse> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = unit();
        let l = 200.0;
        let axis = Axis::spanning(-20.0, l, 0.1).unwrap();
        let phi = pulse::rectangular(axis, l).unwrap();
        let linear_1d = apply_u1(&phi, &p).unwrap();
        let dpsi = delta_psi_nonlinear(&phi, &p).unwrap();
        let schmidt = schmidt_decompose(&local_fourier_2d(&dpsi, 0.0, l).unwrap());
        LongPulse {
            l,
            linear_1d,
            dpsi,
            schmidt,
        }
    })
}

fn within_time(elapsed: Duration, limit: f64) -> bool {
    elapsed.as_secs_f64() < limit
}

fn closed_form_fidelity() -> Verdict {
    let p = unit();
    let l = 20.0;
    let start = Instant::now();
    let axis = Axis::spanning(-30.0, l, 1e-3).unwrap();
    let out = apply_u1(&pulse::rectangular(axis, l).unwrap(), &p).unwrap();
    let elapsed = start.elapsed();
    let err = atomfwm::max_abs_difference(&out, &closed_form(axis, l, &p)).unwrap();
    ensure(
        err < 1e-5 && within_time(elapsed, 5.0),
        format!("max abs {err:.2e}, {:.2} s", elapsed.as_secs_f64()),
    )
}

fn oracle_1d() -> Verdict {
    let p = unit();
    let l = 20.0;
    let start = Instant::now();
    let frame = ScatteringFrame::with_default_padding(l, 0.01, &p).unwrap();
    let phi = pulse::rectangular(frame.input_axis(), l).unwrap();
    let end = evolve_single(frame.incoming_1d(&phi).unwrap(), frame.t_end, &p).unwrap();
    let out = extract_comoving_1d(&end, frame.t_end, &p).unwrap();
    let elapsed = start.elapsed();
    let err = l2_distance(&out, &closed_form(frame.output_axis(), l, &p)).unwrap();
    ensure(
        err < 1e-2 && within_time(elapsed, 10.0),
        format!("L2 {err:.2e}, {:.2} s", elapsed.as_secs_f64()),
    )
}

fn oracle_2d() -> Verdict {
    let p = unit();
    let l = 10.0;
    let start = Instant::now();
    let frame = ScatteringFrame::with_default_padding(l, 0.05, &p).unwrap();
    let phi = pulse::rectangular(frame.input_axis(), l).unwrap();
    let psi = Grid2D::product(&phi, &phi).unwrap();
    let end = evolve_two(frame.incoming_2d(&psi).unwrap(), frame.t_end, &p).unwrap();
    let out = extract_comoving_2d(&end, frame.t_end, &p).unwrap();
    let analytic = apply_u2(&psi, &p)
        .unwrap()
        .regrid(frame.output_axis())
        .unwrap();
    let elapsed = start.elapsed();
    let err = l2_distance(&out, &analytic).unwrap();
    ensure(
        err < 5e-2 && within_time(elapsed, 120.0),
        format!("L2 {err:.2e}, {:.2} s", elapsed.as_secs_f64()),
    )
}

fn scattering_probability_number() -> Verdict {
    let p = unit();
    let l = 200.0;
    let axis = Axis::spanning(-20.0, l, 0.05).unwrap();
    let q = rect_scattering_quadrature(l, &p, &axis).unwrap();
    let want = 16.0 / l;
    let rel = (q.transmitted_mode - want).abs() / want;
    ensure(
        rel < 0.05,
        format!(
            "quadrature {:.5} vs {want}, rel {rel:.2e}",
            q.transmitted_mode
        ),
    )
}

fn cross_section_number() -> Verdict {
    let mut worst: f64 = 0.0;
    for (gamma, c) in [(1.0, 1.0), (0.5, 3.0), (2.0, 0.7)] {
        let p = PhysicalParams::new(gamma, c).unwrap();
        worst = worst.max((cross_section(&p) - 8.0 * c / gamma).abs());
    }
    ensure(worst == 0.0, format!("max deviation {worst:e}"))
}

fn diagonal_amplitudes() -> Verdict {
    let lp = long_pulse();
    let l = lp.l;
    let axis = lp.dpsi.axis();
    let (mut d_err, mut out_err): (f64, f64) = (0.0, 0.0);
    // interior, many coherence lengths from both pulse edges
    for (i, x) in axis.centers().enumerate() {
        if x < 0.25 * l || x > 0.75 * l {
            continue;
        }
        let d = lp.dpsi.get(i, i).re;
        let lin = lp.linear_1d.values()[i] * lp.linear_1d.values()[i];
        let out = lin.re + d;
        d_err = d_err.max((d * l + 4.0).abs() / 4.0);
        out_err = out_err.max((out * l + 3.0).abs() / 3.0);
    }
    ensure(
        d_err < 0.01 && out_err < 0.01,
        format!("max rel: dpsi {d_err:.2e}, psi_out {out_err:.2e}"),
    )
}

fn schmidt_coefficients() -> Verdict {
    let lp = long_pulse();
    let s = &lp.schmidt;
    let mut worst: f64 = 0.0;
    for n in (-20..=20).filter(|&n| n != 0) {
        let want = long_pulse_pair_coefficient(n, lp.l, &unit());
        worst = worst.max((s.pair(n) - want).norm() / want.abs());
    }
    let resid = s.residual_weight() / s.pair_weight();
    ensure(
        worst < 0.05 && resid < 0.02,
        format!("max rel coefficient error {worst:.2e}, residual fraction {resid:.2e}"),
    )
}

fn parseval() -> Verdict {
    let p = unit();
    let lp = long_pulse();
    let s = &lp.schmidt;
    let anti = s.c0().norm_sqr() + s.pair_weight();
    let rel = (anti - s.window_norm_sqr()).abs() / s.window_norm_sqr();
    let l = 100.0;
    let integral = integrate_k(|k| scattering_spectrum(k, l, &p), &p, 4001);
    let want = 16.0 / l;
    let rel_k = (integral - want).abs() / want;
    ensure(
        rel < 0.01 && rel_k < 1e-3,
        format!("coefficient weight rel {rel:.2e}, spectrum integral rel {rel_k:.2e}"),
    )
}

fn line_shape() -> Verdict {
    let p = unit();
    let ratio = fwhm(|k| scattering_spectrum(k, 100.0, &p), &p)
        / fwhm(|k| spontaneous_emission_spectrum(k, &p), &p);
    ensure((ratio - 0.6436).abs() < 1e-3, format!("ratio {ratio:.6}"))
}

fn pair_formulas() -> Verdict {
    let p = unit();
    let a = Complex64::new(0.3, 0.0);
    let m = mean_pairs_per_pulse(a, 100.0, &p);
    let exact = ((m - 6.48e-4) / 6.48e-4).abs() < 1e-12;

    let lp = long_pulse();
    let quad = 0.3f64.powi(4) / 2.0 * lp.dpsi.norm_sqr();
    let m200 = mean_pairs_per_pulse(a, lp.l, &p);
    let rel = (m200 - quad).abs() / quad;

    let mut identity: f64 = 0.0;
    for (alpha, l, gamma, c) in [
        (0.3, 100.0, 1.0, 1.0),
        (0.1, 40.0, 2.0, 0.5),
        (0.4, 1e3, 0.3, 3.0),
    ] {
        let p = PhysicalParams::new(gamma, c).unwrap();
        let a = Complex64::new(alpha, 0.0);
        let per_time = mean_pairs_per_pulse(a, l, &p) / (l / c);
        let rate = pair_rate(intensity(a, l, &p), &p);
        identity = identity.max((per_time - rate).abs() / rate);
    }
    ensure(
        exact && rel < 0.05 && identity < 4.0 * f64::EPSILON,
        format!("mean pairs {m:.6e}, quadrature rel {rel:.2e}, identity {identity:.1e}"),
    )
}

fn random_gaussian(rng: &mut ChaCha8Rng, axis: Axis) -> Grid1D {
    let center = rng.random_range(2.0..8.0);
    let width = rng.random_range(0.5..1.5);
    let k0 = rng.random_range(-2.0..2.0);
    pulse::gaussian(axis, center, width, k0).unwrap()
}

fn properties() -> Verdict {
    let p = unit();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut u1_dev, mut u2_dev, mut asym): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let line = Axis::spanning(-30.0, 25.0, 0.01).unwrap();
    let plane = Axis::spanning(-12.0, 10.0, 0.01).unwrap();
    for _ in 0..10 {
        let phi = random_gaussian(&mut rng, line);
        u1_dev = u1_dev.max((apply_u1(&phi, &p).unwrap().norm_sqr() - 1.0).abs());

        let a = random_gaussian(&mut rng, plane);
        let b = random_gaussian(&mut rng, plane);
        let psi = Grid2D::symmetrized_product(&a, &b).unwrap();
        let parts = apply_u2_parts(&psi, &p).unwrap();
        let total = parts.total();
        u2_dev = u2_dev.max((total.norm_sqr() - 1.0).abs());
        asym = asym.max(total.max_asymmetry() / total.max_abs());
    }

    // a kick at x' leaves the output at x > x' untouched
    let phi = random_gaussian(&mut rng, line);
    let i0 = line.cell_of(4.0).unwrap();
    let mut kicked = phi.clone();
    for v in &mut kicked.values_mut()[i0 - 100..i0] {
        *v += Complex64::new(0.5, -0.2);
    }
    let x = apply_u1(&phi, &p).unwrap();
    let y = apply_u1(&kicked, &p).unwrap();
    let causal = x.values()[i0..] == y.values()[i0..] && x.values()[i0 - 1] != y.values()[i0 - 1];

    let frame = ScatteringFrame::with_default_padding(10.0, 0.05, &p).unwrap();
    let rect = pulse::rectangular(frame.input_axis(), 10.0).unwrap();
    let start = frame
        .incoming_2d(&Grid2D::product(&rect, &rect).unwrap())
        .unwrap();
    let h = evolve_two_harmonic(start, frame.t_end, &p).unwrap();
    let h_out = extract_comoving_2d(&h.state, frame.t_end, &p).unwrap();
    let single = frame.scatter_1d(&rect, &p).unwrap();
    let harmonic = l2_distance(&h_out, &Grid2D::product(&single, &single).unwrap()).unwrap();

    ensure(
        u1_dev < 1e-4 && u2_dev < 1e-4 && causal && asym < 1e-12 && harmonic < 1e-3,
        format!(
            "unitarity u1 {u1_dev:.1e} u2 {u2_dev:.1e}, causal {causal}, asymmetry {asym:.1e}, harmonic L2 {harmonic:.1e}"
        ),
    )
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn figures() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let l = 20.0;
    let run = |args: &[&str]| atomfwm_cli::run_from(args.iter().copied());
    run(&["atomfwm", "figure2", "--L", "20", "--out", out]).map_err(|e| e.to_string())?;
    run(&["atomfwm", "figure3", "--L", "100", "--out", out]).map_err(|e| e.to_string())?;

    let (_, psi_out) = read_csv(&dir.path().join("figure2_psi_out.csv"));
    let (_, dpsi) = read_csv(&dir.path().join("figure2_delta_psi.csv"));
    let span = |rows: &[Vec<f64>], lo: &mut f64, hi: &mut f64| {
        for r in rows {
            *lo = lo.min(r[0]).min(r[1]);
            *hi = hi.max(r[0]).max(r[1]);
        }
    };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    span(&psi_out, &mut lo, &mut hi);
    let dx = 0.025;
    let region = (lo + 10.0 - dx / 2.0).abs() < 1e-9 && (hi - 20.0 + dx / 2.0).abs() < 1e-9;
    let out_max = psi_out
        .iter()
        .map(|r| r[2])
        .fold(f64::NEG_INFINITY, f64::max)
        * l;
    let d_min = dpsi.iter().map(|r| r[2]).fold(f64::INFINITY, f64::min) * l;
    let near = |r: &Vec<f64>, x1: f64, x2: f64| {
        (r[0] - x1).abs() <= dx / 2.0 && (r[1] - x2).abs() <= dx / 2.0
    };
    let plateau = psi_out
        .iter()
        .find(|r| near(r, 0.25 * l, 0.75 * l))
        .ok_or("no plateau cell")?[2]
        * l;
    let fig2 = region
        && (out_max - 2.0).abs() <= 0.02 * 2.0
        && (d_min + 4.0).abs() <= 0.02 * 4.0
        && (plateau - 1.0).abs() <= 0.02;

    let (header, spectra) = read_csv(&dir.path().join("figure3.csv"));
    let col = |name: &str| header.iter().position(|h| h.starts_with(name)).unwrap();
    let (w, s, z) = (col("weight"), col("scatter"), col("lorentzian"));
    let area_s: f64 = spectra.iter().map(|r| r[w] * r[s]).sum();
    let area_l: f64 = spectra.iter().map(|r| r[w] * r[z]).sum();
    let fig3 = (area_s - 1.0).abs() < 1e-4 && (area_l - 1.0).abs() < 1e-4;

    ensure(
        fig2 && fig3,
        format!(
            "psi_out max {out_max:.4}/L, dpsi min {d_min:.4}/L, plateau {plateau:.4}/L, areas {area_s:.6} {area_l:.6}"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("closed-form fidelity", closed_form_fidelity),
        ("oracle equivalence 1D", oracle_1d),
        ("oracle equivalence 2D", oracle_2d),
        ("scattering probability", scattering_probability_number),
        ("cross section", cross_section_number),
        ("diagonal amplitudes", diagonal_amplitudes),
        ("schmidt coefficients", schmidt_coefficients),
        ("parseval and normalization", parseval),
        ("line shape", line_shape),
        ("pair formulas", pair_formulas),
        ("property suites", properties),
        ("figure reproduction", figures),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let verdict = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match verdict {
            Ok(detail) => println!("criterion {} ({name}): PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL ({detail})", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
