//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xps_susy::algebra::{ladder_coefficients, selfsimilar_spectrum, verify_algebra, DeformedAlgebra};
use xps_susy::extended::{
    charge_phase_witness, integrate_classical, uniform_times, witness_drift, ExtendedSystem, PhaseState,
    Sector,
};
use xps_susy::groundstate::{composite_matrix_element, iterate_groundstate, refine};
use xps_susy::instanton::{breaking_product, instanton_trajectory};
use xps_susy::oracle::{discretize, eigen_lowest, extended_levels};
use xps_susy::potentials::{find_vacua, vacuum_action, vacuum_pair};
use xps_susy::shape::{spectrum_from_remainders, ShapeInvariantFamily};
use xps_susy::{Grid, PartnerSign, Result, SuperPotential};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn unbroken_zero_mode() -> Result<Outcome> {
    let w = SuperPotential::linear(1.0, (-8.0, 8.0))?;
    let grid = Grid::new(-8.0, 8.0, 2001)?;
    let sign = w.zero_mode_sign().expect("harmonic zero mode");
    let spec = eigen_lowest(&discretize(&w, &grid, sign)?, 2)?;
    let (e0, e1) = (spec.levels[0].energy, spec.levels[1].energy);
    outcome(e0.abs() < 1e-4 && (e1 - 1.0).abs() < 1e-4, format!("E0 = {e0:.3e}, E1 - 1 = {:.3e}", e1 - 1.0))
}

fn shape_invariance_spectra() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut pass = true;

    let fam = ShapeInvariantFamily::harmonic((-8.0, 8.0));
    let grid = Grid::new(-8.0, 8.0, 2001)?;
    let chain = spectrum_from_remainders(&fam, 1.0, 5, &grid)?;
    let w = fam.potential(1.0)?;
    let spec = eigen_lowest(&discretize(&w, &grid, w.zero_mode_sign().unwrap())?, 6)?;
    for (c, l) in chain.levels.iter().zip(&spec.levels) {
        let err = (c.energy - l.energy).abs();
        pass &= err <= 1e-4f64.max(l.convergence_estimate) && (c.energy - c.n as f64).abs() < 1e-12;
        worst = worst.max(err);
    }

    let fam = ShapeInvariantFamily::morse(1.0, (-6.0, 30.0));
    let grid = Grid::new(-6.0, 30.0, 8001)?;
    let chain = spectrum_from_remainders(&fam, 3.0, 5, &grid)?;
    let w = fam.potential(3.0)?;
    let spec = eigen_lowest(&discretize(&w, &grid, w.zero_mode_sign().unwrap())?, chain.levels.len())?;
    let e = chain.energies();
    pass &= e.len() == 3 && (e[1] - 2.5).abs() < 1e-9 && (e[2] - 4.0).abs() < 1e-9;
    for (c, l) in chain.levels.iter().zip(&spec.levels) {
        let err = (c.energy - l.energy).abs();
        pass &= err <= 1e-4f64.max(l.convergence_estimate);
        worst = worst.max(err);
    }
    outcome(pass, format!("max |chain - oracle| = {worst:.2e}; Morse levels {e:?}"))
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn instanton_scaling() -> Result<Outcome> {
    let mut dw = Vec::new();
    let mut ln_e0 = Vec::new();
    let mut ln_reduced = Vec::new();
    let mut ratios = Vec::new();
    for i in 0..6 {
        let a = 1.0 + 0.1 * i as f64;
        let (lo, hi) = (-a - 5.0, a + 5.0);
        let w = SuperPotential::double_well(1.0, a, (lo, hi))?;
        let vacua = vacuum_pair(&w, "q")?;
        let delta = vacuum_action(&w, &vacua)?;
        let e0 = eigen_lowest(&discretize(&w, &Grid::new(lo, hi, 16001)?, PartnerSign::Plus)?, 1)?.levels[0].energy;
        let prefactor = vacua.plus.slope / (2.0 * PI);
        dw.push(delta);
        ln_e0.push(e0.ln());
        ln_reduced.push((e0 / prefactor).ln());
        ratios.push(e0 / (prefactor * (-2.0 * delta).exp()));
    }
    let raw = slope(&dw, &ln_e0);
    let reduced = slope(&dw, &ln_reduced);
    let prefactor_ok = ratios.iter().all(|r| (0.5..2.0).contains(r));
    outcome(
        (reduced + 2.0).abs() <= 0.1 && prefactor_ok,
        format!(
            "slope of ln(2pi E0 / W'(q+)) vs dW = {reduced:.4}; raw ln E0 slope = {raw:.4}; \
             E0 / semiclassical in [{:.3}, {:.3}]",
            ratios.iter().copied().fold(f64::INFINITY, f64::min),
            ratios.iter().copied().fold(0.0, f64::max)
        ),
    )
}

fn extended_additivity() -> Result<Outcome> {
    let grid = Grid::new(-8.0, 8.0, 2001)?;
    let w = SuperPotential::double_well(1.0, 1.0, (-8.0, 8.0))?;
    let v = SuperPotential::poschl_teller(3.0, 1.0, (-8.0, 8.0))?;
    let sw = eigen_lowest(&discretize(&w, &grid, PartnerSign::Plus)?, 4)?;
    let sv = eigen_lowest(&discretize(&v, &grid, v.zero_mode_sign().unwrap())?, 3)?;
    let levels = extended_levels(&sw, &sv, 3);
    let worst = levels
        .iter()
        .map(|l| (l.energy - (sw.levels[l.n1].energy - sv.levels[l.n2].energy)).abs())
        .fold(0.0, f64::max);
    let same = extended_levels(&sw, &sw, 4);
    let diagonal_zero = same.iter().filter(|l| l.n1 == l.n2).all(|l| l.energy == 0.0);
    outcome(
        worst <= 1e-15 && diagonal_zero && levels.len() == 9,
        format!("max deviation {worst:.1e}; W = V diagonal exactly zero: {diagonal_zero}"),
    )
}

fn deformed_algebra() -> Result<Outcome> {
    let mut pass = true;
    let mut worst = [0.0f64; 3];
    for q in [0.3, 0.5, 0.9] {
        let alg = DeformedAlgebra::scaling(1.0, q, 0.0)?;
        let rep = ladder_coefficients(&alg, 49)?;
        let check = verify_algebra(&rep, &alg)?;
        let spec = selfsimilar_spectrum(&alg, 1.0, 49)?;
        let tele = spec.iter().map(|l| (l.energy - l.telescoped).abs()).fold(0.0, f64::max);
        worst[0] = worst[0].max(check.res_comm);
        worst[1] = worst[1].max(check.res_casimir);
        worst[2] = worst[2].max(tele);
        pass &= check.res_comm < 1e-12 && check.res_casimir < 1e-12 && tele < 1e-12;
    }
    let near = DeformedAlgebra::scaling(1.0, 0.999, 0.0)?;
    let alpha = 0.999f64.powf(0.0);
    let limit = selfsimilar_spectrum(&near, 1.0, 5)?
        .iter()
        .skip(1)
        .map(|l| (l.energy / (alpha * l.n as f64) - 1.0).abs())
        .fold(0.0, f64::max);
    pass &= limit < 0.01;
    outcome(
        pass,
        format!(
            "commutator {:.1e}, Casimir {:.1e}, telescoped {:.1e}, Q=0.999 rel. dev. {limit:.2e}",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn classical_conservation() -> Result<Outcome> {
    let tol = 1e-10;
    let w = SuperPotential::double_well(1.0, 1.0, (-8.0, 8.0))?;
    let sys = ExtendedSystem::new(w.clone(), Some(w));
    let s0 = PhaseState::new(0.4, 0.9, -0.7, 0.2).with_q_soul(0.3).with_p_soul(-0.2);
    let traj = integrate_classical(&sys, &s0, 100.0, tol, &uniform_times(0.0, 100.0, 2000))?;
    let (db, ds) = traj.hamiltonian_drift(&sys)?;
    let dq = witness_drift(&charge_phase_witness(&sys, &traj, Sector::Q)?);
    let dp = witness_drift(&charge_phase_witness(&sys, &traj, Sector::P)?);

    let h = ExtendedSystem::new(SuperPotential::linear(1.0, (-8.0, 8.0))?, None);
    let ht = integrate_classical(&h, &PhaseState::new(1.3, 0.0, 0.0, 0.0), 100.0, tol, &uniform_times(0.0, 100.0, 2000))?;
    let wit = charge_phase_witness(&h, &ht, Sector::Q)?;
    let target = Complex64::new(0.0, 1.3);
    let harmonic = wit.iter().map(|z| (z - target).norm()).fold(0.0, f64::max);

    outcome(
        db < 1e-7 && ds < 1e-7 && dq.max(dp) < 1e-6 && harmonic <= 1e3 * tol,
        format!(
            "|dH body| {db:.1e}, |dH soul| {ds:.1e}, witness drift {:.1e}, harmonic |I - 1.3i| {harmonic:.1e}",
            dq.max(dp)
        ),
    )
}

fn iteration_self_consistency() -> Result<Outcome> {
    let w = SuperPotential::double_well(1.0, 2.0, (-8.0, 8.0))?;
    let sys = ExtendedSystem::new(w, None);
    let grid = Grid::new(-8.0, 8.0, 4001)?;
    let two = iterate_groundstate(&sys, &grid, &grid, 2)?;
    let three = refine(&sys, &two)?;
    let dist = two.distance(&three)?;
    let h = grid.spacing();
    let (p1, p2) = (&two.q.psi1, &two.q.psi2);
    let n = p1.len();
    let pairing = (0..n).map(|i| (p1[n - 1 - i] - p2[i]).abs()).fold(0.0, f64::max);
    let curvature = p1.windows(3).map(|t| (t[0] - 2.0 * t[1] + t[2]).abs() / (h * h)).fold(0.0, f64::max);
    let bound = 10.0 * h * h * curvature;
    outcome(
        dist < 0.05 && pairing <= bound,
        format!("L2(iter2, iter3) = {dist:.3e}; pairing {pairing:.1e} <= {bound:.1e}"),
    )
}

fn dual_path_identity() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_261_015);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let mut draw = || {
            let lambda = rng.gen_range(0.5..2.0);
            let a = rng.gen_range(0.7..1.6);
            SuperPotential::double_well(lambda, a, (-8.0, 8.0))
        };
        let (w, v) = (draw()?, draw()?);
        let a = breaking_product(&w, Some(&v))?;
        let b = composite_matrix_element(&ExtendedSystem::new(w, Some(v)))?;
        let rel = (a.value - b.value).norm() / b.value.norm();
        worst = worst.max(if a.flag == b.flag { rel } else { f64::INFINITY });
    }
    outcome(worst <= 1e-12, format!("max relative difference over 10 pairs {worst:.1e}"))
}

fn instanton_profile() -> Result<Outcome> {
    let w = SuperPotential::double_well(1.0, 1.0, (-8.0, 8.0))?;
    assert_eq!(find_vacua(&w)?.len(), 2);
    let r = instanton_trajectory(&w, 40.0, 801)?;
    let profile = r.tau.iter().zip(&r.q_c).map(|(t, q)| (q - t.tanh()).abs()).fold(0.0, f64::max);
    let action = (r.action - r.delta_w).abs() / r.delta_w;
    outcome(
        profile < 1e-8 && action < 1e-8,
        format!("max |q_c - tanh| = {profile:.1e}; action rel. error {action:.1e}"),
    )
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 9] = [
        ("unbroken zero mode", unbroken_zero_mode),
        ("shape invariance spectra", shape_invariance_spectra),
        ("instanton scaling", instanton_scaling),
        ("extended additivity", extended_additivity),
        ("deformed algebra", deformed_algebra),
        ("classical conservation", classical_conservation),
        ("iteration self-consistency", iteration_self_consistency),
        ("dual-path identity", dual_path_identity),
        ("instanton trajectory", instanton_profile),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        let (pass, detail) = match result {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {} [{}] {name}: {detail} ({secs:.2} s)",
            i + 1,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
