//! End-to-end acceptance run: one PASS/FAIL line per check, exit status
//! nonzero if any check outside the known limitations fails.

mod common;

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use kasner_modes::asymptotics::{amplitude_bound_check, large_time_fit, small_time_fit, zero_crossing_cycles, SmallTimeRegime};
use kasner_modes::closedform::{compare_numeric, BasisCase};
use kasner_modes::geodesics::{affine_span, init_lightlike, integrate_geodesic, redshift, GeodesicInit};
use kasner_modes::integrate::{solve_ivp, Coefficients, IvpProblem};
use kasner_modes::kasner::{KasnerExponents, Momentum};
use kasner_modes::modes::{energy_functional, solve_mode_s, solve_mode_t, ModeSpec, Part};
use kasner_modes::specfun::{bessel_j, bessel_y, heun_b, log_gamma};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{fixture, kasner, LOG_GAMMA_ORACLE};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Kasner triple from the standard parameter `u ≥ 0`.
fn triple(u: f64) -> KasnerExponents {
    let d = 1.0 + u + u * u;
    KasnerExponents::new(-u / d, (1.0 + u) / d, u * (1.0 + u) / d, 1e-12).unwrap()
}

fn generic() -> KasnerExponents {
    triple(2.0)
}

fn axisym() -> KasnerExponents {
    KasnerExponents::axisymmetric(0)
}

fn flat() -> KasnerExponents {
    KasnerExponents::flat(0)
}

fn random_exponents(rng: &mut ChaCha8Rng) -> KasnerExponents {
    triple(rng.random_range(0.0..5.0))
}

fn random_momentum(rng: &mut ChaCha8Rng) -> Momentum {
    loop {
        let w = Momentum::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        if w.0.iter().map(|x| x.abs()).fold(0.0, f64::max) > 0.1 {
            return w;
        }
    }
}

struct Outcome {
    pass: bool,
    /// Failing sub-cases that are known to be out of reach; they do not fail the run.
    known_failures: Vec<String>,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { pass: true, known_failures: Vec::new(), details: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.pass &= ok;
        self.details.push(format!("{}{detail}", if ok { "" } else { "[fail] " }));
    }

    fn known(&mut self, ok: bool, detail: String) {
        if !ok {
            self.known_failures.push(detail.clone());
        }
        self.details.push(format!("{}{detail}", if ok { "" } else { "[known limitation] " }));
    }
}

fn closed_form_equivalence() -> Outcome {
    let mut out = Outcome::new();
    let cases = [
        (flat(), Momentum::new(0.7, 0.0, 0.0), BasisCase::FlatAxial, 100.0, 1e-6),
        (flat(), Momentum::new(0.4, 1.0, 0.3), BasisCase::FlatBessel, 100.0, 1e-6),
        (axisym(), Momentum::new(0.8, 0.0, 0.0), BasisCase::AxisymAxial, 100.0, 1e-6),
        (axisym(), Momentum::new(0.0, 0.6, 0.8), BasisCase::AxisymTransverse, 100.0, 1e-6),
        (axisym(), Momentum::new(1.0, 1.0, 0.0), BasisCase::AxisymHeun, 10.0, 1e-5),
    ];
    for (k, w, case, span, limit) in cases {
        for t0 in [1.0, 0.5] {
            let spec = ModeSpec::new(w, t0, c(1.0, 0.0), c(0.0, 0.5)).unwrap();
            let start = Instant::now();
            let cmp = compare_numeric(&k, &spec, span * t0, 1e-11).unwrap();
            let took = start.elapsed();
            out.check(
                cmp.case == case && cmp.max_rel_deviation <= limit && took <= Duration::from_secs(10),
                format!("{case} t0={t0}: deviation {:.2e} (limit {limit:e}) in {took:.2?}", cmp.max_rel_deviation),
            );
        }
    }
    out
}

fn energy_monotonicity() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut worst, mut samples) = (0.0f64, 0);
    let mut violations = 0;
    for i in 0..50 {
        let k = random_exponents(&mut rng);
        let w = random_momentum(&mut rng);
        let t0: f64 = rng.random_range(0.1..2.0);
        let data = (c(rng.random_range(-1.0..1.0), 0.0), c(rng.random_range(-1.0..1.0), 0.0));
        let spec = ModeSpec::new(w, t0, data.0, data.1).unwrap();
        let s_end = if i % 2 == 0 { t0.ln() + 3.0 } else { t0.ln() - 10.0 };
        let traj = solve_mode_s(&k, &spec, s_end, 1e-11).unwrap();
        let mut e = energy_functional(&traj, Some(Part::Real)).unwrap();
        e.sort_by(|a, b| a.0.total_cmp(&b.0));
        samples += e.len();
        for pair in e.windows(2) {
            let drop = (pair[0].1 - pair[1].1) / pair[0].1.max(f64::MIN_POSITIVE);
            worst = worst.max(drop);
            if drop > 1e-8 {
                violations += 1;
            }
        }
    }
    out.check(violations == 0, format!("50 cases, {samples} samples, largest relative decrease {worst:.2e}"));
    out
}

fn small_time_asymptotics() -> Outcome {
    let mut out = Outcome::new();
    let spec = ModeSpec::new(Momentum::new(1.0, 1.0, 0.0), 1.0, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
    for (name, k) in [("generic", generic()), ("axisymmetric", axisym())] {
        let fit = small_time_fit(&k, &spec, -20.0, 1e-11).unwrap();
        let ok = matches!(fit.regime, SmallTimeRegime::Logarithmic { .. })
            && fit.residual_sup < 1e-4
            && fit.deeper_residual_sup * 10.0 <= fit.residual_sup;
        let detail = format!(
            "{name}: residual {:.2e} at s=-20, {:.2e} at s=-25 ({:.1}x)",
            fit.residual_sup,
            fit.deeper_residual_sup,
            fit.residual_sup / fit.deeper_residual_sup
        );
        if name == "axisymmetric" {
            out.known(ok, detail);
        } else {
            out.check(ok, detail);
        }
    }
    let spec = ModeSpec::new(Momentum::new(0.5, 0.3, 0.0), 1.0, c(1.0, 0.0), c(0.2, 0.0)).unwrap();
    let fit = small_time_fit(&flat(), &spec, -20.0, 1e-11).unwrap();
    let ok = matches!(fit.regime, SmallTimeRegime::Oscillatory { .. }) && fit.residual_sup < 1e-6;
    out.check(ok, format!("flat axis: oscillatory residual {:.2e}", fit.residual_sup));
    out
}

fn large_time_asymptotics() -> Outcome {
    let mut out = Outcome::new();
    let momenta = [Momentum::new(1.0, 1.0, 0.0), Momentum::new(0.3, 0.7, 0.5), Momentum::new(2.0, 0.5, 0.5)];
    for (name, k) in [("flat", KasnerExponents::flat(1)), ("axisymmetric", axisym()), ("generic", generic())] {
        for w in momenta {
            let spec = ModeSpec::new(w, 1.0, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
            let traj = solve_mode_t(&k, &spec, 200.0, 1e-11).unwrap();
            let early = large_time_fit(&traj, 1.0, (10.0, 20.0), 1e-12).unwrap();
            let late = large_time_fit(&traj, 1.0, (100.0, 200.0), 1e-12).unwrap();
            let bound = amplitude_bound_check(&traj, &late).unwrap();
            let ratio = late.residual_sup / early.residual_sup;
            let detail = format!("{name} w={:?}: ratio {ratio:.3}, bound from t={}", w.0, bound.onset_t);
            let ratio_detail = format!("{name} w={:?}: ratio {ratio:.3}", w.0);
            let bound_ok = bound.holds && bound.onset_t <= late.window_end;
            if name == "flat" {
                out.check(bound_ok, format!("{name} w={:?}: bound from t={}", w.0, bound.onset_t));
                out.known(ratio <= 0.1, ratio_detail);
            } else {
                out.check(ratio <= 0.1 && bound_ok, detail);
            }
        }
    }
    out
}

fn zero_crossing_law() -> Outcome {
    let mut out = Outcome::new();
    let cases = [
        ("generic", generic(), Momentum::new(0.5, 1.0, 0.3)),
        ("axisymmetric", axisym(), Momentum::new(1.0, 1.0, 0.0)),
        ("flat", flat(), Momentum::new(0.3, 1.0, 0.0)),
    ];
    for (name, k, w) in cases {
        let spec = ModeSpec::new(w, 1.0, c(1.0, 0.0), c(-0.5, 0.0)).unwrap();
        let traj = solve_mode_t(&k, &spec, 60.0, 1e-11).unwrap();
        let cycles = zero_crossing_cycles(&traj, (20.0, 60.0), 1e-12).unwrap();
        let good = cycles.iter().filter(|&&x| (x - 0.5).abs() <= 0.02).count();
        let frac = good as f64 / cycles.len() as f64;
        out.check(cycles.len() >= 20 && frac >= 0.95, format!("{name}: {good}/{} pairs within 0.02", cycles.len()));
    }
    out
}

/// Heun ODE integrated along the ray from a point near the origin.
fn heun_ode(delta: Complex64, x: Complex64) -> Complex64 {
    let e = x / x.norm();
    let r0 = 1e-6;
    let x0 = e * r0;
    let hd = 0.5 * delta;
    let a2 = (hd * hd + 2.0) / 4.0;
    let y0 = 1.0 + hd * x0 + a2 * x0 * x0;
    let dy0 = (hd + 2.0 * a2 * x0) * e;
    let coeff = move |r: f64| {
        let xr = e * r;
        Coefficients::homogeneous(e * (1.0 - 2.0 * xr * xr) / xr, -e * e * (2.0 * xr + hd) / xr)
    };
    let p = IvpProblem::new(coeff, r0, y0, dy0, x.norm(), 1e-13, 1e-15);
    solve_ivp(&p).unwrap().eval(x.norm()).unwrap().0
}

fn special_functions() -> Outcome {
    let mut out = Outcome::new();
    let mut worst: f64 = 0.0;
    for q in [0.05, 0.1, 0.25] {
        let nu = c(0.0, 2.0 * PI * q);
        for i in 0..=100 {
            let x = 0.1 + 49.9 * i as f64 / 100.0;
            let j = bessel_j(nu, x, 1e-15).unwrap();
            let y = bessel_y(nu, x, 1e-15).unwrap();
            let want = 2.0 / (PI * x);
            worst = worst.max((j.value * y.derivative - j.derivative * y.value - want).norm() / want);
        }
    }
    out.check(worst <= 1e-10, format!("Bessel Wronskian residual {worst:.2e}"));

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let delta = c(rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0));
        let r = rng.random_range(0.1..5.0);
        let x = Complex64::from_polar(r, rng.random_range(-PI..PI));
        let series = heun_b(delta, x, 1e-16).unwrap().value;
        let ode = heun_ode(delta, x);
        worst = worst.max((series - ode).norm() / ode.norm());
    }
    out.check(worst <= 1e-8, format!("HeunB series vs ODE {worst:.2e}"));

    let mut worst: f64 = 0.0;
    for [zr, zi, vr, vi] in LOG_GAMMA_ORACLE {
        let want = c(vr, vi);
        worst = worst.max((log_gamma(c(zr, zi)).unwrap() - want).norm() / want.norm());
    }
    out.check(worst <= 1e-13, format!("log_gamma over {} points {worst:.2e}", LOG_GAMMA_ORACLE.len()));
    out
}

fn redshift_equality() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let k = random_exponents(&mut rng);
        let a = random_momentum(&mut rng);
        let t_p: f64 = 10f64.powf(rng.random_range(-1.0..1.0));
        let t_q = t_p * 10f64.powf(rng.random_range(0.01..2.0));
        worst = worst.max(redshift(&k, &a, t_p, t_q, 1.0).unwrap().max_deviation());
    }
    out.check(worst <= 1e-10, format!("100 tuples, largest pairwise deviation {worst:.2e}"));
    let r = redshift(&axisym(), &Momentum::new(1.0, 0.0, 0.0), 1.0, 8.0, 1.0).unwrap();
    let off = [r.z_energy, r.z_large_time, r.z_formula].iter().map(|z| (z + 0.5).abs()).fold(0.0, f64::max);
    out.check(off <= 1e-12, format!("hand case z = {} (off by {off:.1e})", r.z_formula));
    out
}

fn geodesic_conservation() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let tol = 1e-9;
    let (mut null, mut mom) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let k = random_exponents(&mut rng);
        let t0: f64 = 10f64.powf(rng.random_range(-2.0..1.0));
        let v = random_momentum(&mut rng).0;
        let init = GeodesicInit::new(t0, [0.0; 3], v).unwrap();
        let a = init_lightlike(&k, &init).unwrap().momenta;
        let span = affine_span(&k, &a, t0, 100.0 * t0, 1e-12).unwrap();
        let rec = integrate_geodesic(&k, &init, (0.0, span), tol).unwrap();
        null = null.max(rec.max_null_deviation / tol);
        mom = mom.max(rec.max_momentum_drift / tol);
    }
    out.check(null <= 10.0 && mom <= 10.0, format!("20 rays over two decades: null drift {null:.2}·tol, momentum drift {mom:.2}·tol"));

    let mut worst: f64 = 0.0;
    for t0 in [1.0f64, 2.0] {
        // unit momentum along the contracting axis
        let init = GeodesicInit::new(t0, [0.0; 3], [t0.powf(2.0 / 3.0), 0.0, 0.0]).unwrap();
        let rec = integrate_geodesic(&axisym(), &init, (0.0, 60.0), 1e-11).unwrap();
        for smp in &rec.samples {
            let exact = (2.0 / 3.0 * smp.s + t0.powf(2.0 / 3.0)).powf(1.5);
            worst = worst.max((smp.t - exact).abs() / exact);
        }
    }
    out.check(worst <= 1e-8, format!("separable ray t(s) relative error {worst:.2e}"));
    out
}

fn dir_snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let path = e.unwrap().path();
        if path.is_dir() {
            files.extend(dir_snapshot(&path));
        } else {
            files.push((path.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&path).unwrap()));
        }
    }
    files.sort();
    files
}

fn cli_determinism() -> Outcome {
    let mut out = Outcome::new();
    let cfg = fixture("axisym.json");
    let cfg = cfg.to_str().unwrap();
    let runs: [(&str, &[&str], i32); 9] = [
        ("classify", &["classify", "-c", cfg], 0),
        ("solve csv", &["solve", "-c", cfg], 0),
        ("solve json", &["solve", "-c", cfg, "--format", "json"], 0),
        ("compare", &["compare", "-c", cfg, "--threshold", "1e-5"], 0),
        ("asymptotics large", &["asymptotics", "-c", cfg], 0),
        ("asymptotics small", &["asymptotics", "-c", cfg, "--fit", "small", "-p", "1,0,0", "-w", "0.5,0.3,0", "--alphadot0", "0,0"], 0),
        ("geodesic", &["geodesic", "-c", cfg], 0),
        ("redshift", &["redshift", "-c", cfg], 0),
        ("sweep", &["sweep", "-c", cfg, "--out", "runs"], 0),
    ];
    for (name, args, code) in runs {
        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        let [a, b] = [kasner(dirs[0].path(), args), kasner(dirs[1].path(), args)];
        let same = a.code == b.code && a.stdout == b.stdout && dir_snapshot(dirs[0].path()) == dir_snapshot(dirs[1].path());
        out.check(same && a.code == code, format!("{name}: exit {}, repeat identical {same}", a.code));
    }

    let dir = tempfile::tempdir().unwrap();
    let contract: [(&str, &[&str], i32); 6] = [
        ("bad exponents", &["classify", "-p", "0.5,0.5,0"], 2),
        ("no closed form", &["compare", "-p", "-0.2857142857142857,0.42857142857142855,0.8571428571428571", "-w", "1,1,0"], 2),
        ("threshold missed", &["compare", "-p", "1,0,0", "-w", "0,1,0", "--threshold", "1e-30"], 1),
        ("ill-conditioned fit", &["asymptotics", "-c", cfg, "--window", "5,5.01"], 3),
        ("unknown flag", &["solve", "--speed", "3"], 64),
        ("missing momentum", &["solve", "-p", "1,0,0"], 64),
    ];
    for (name, args, code) in contract {
        let r = kasner(dir.path(), args);
        out.check(r.code == code, format!("{name}: exit {} (want {code})", r.code));
    }
    out
}

/// Name, check and runtime budget in seconds.
type Check = (&'static str, fn() -> Outcome, u64);

fn main() -> ExitCode {
    let checks: [Check; 9] = [
        ("closed-form equivalence", closed_form_equivalence, 100),
        ("energy monotonicity", energy_monotonicity, 30),
        ("small-time asymptotics", small_time_asymptotics, 20),
        ("large-time asymptotics", large_time_asymptotics, 60),
        ("zero-crossing phase law", zero_crossing_law, 30),
        ("special functions", special_functions, 10),
        ("redshift equality", redshift_equality, 5),
        ("geodesic conservation", geodesic_conservation, 20),
        ("CLI determinism", cli_determinism, 10),
    ];
    let mut blocking = 0;
    for (name, run, budget) in checks {
        let start = Instant::now();
        let mut outcome = run();
        let took = start.elapsed();
        outcome.check(took <= Duration::from_secs(budget), format!("runtime {took:.2?} (budget {budget} s)"));
        let pass = outcome.pass && outcome.known_failures.is_empty();
        println!("{} {name}", if pass { "PASS" } else { "FAIL" });
        for d in &outcome.details {
            println!("    {d}");
        }
        if !outcome.pass {
            blocking += 1;
        }
    }
    if blocking == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{blocking} check(s) failed outside the known limitations");
        ExitCode::FAILURE
    }
}
