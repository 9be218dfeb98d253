//! Validation and execution of the individual tasks.

use xps_susy::algebra::{ladder_coefficients, selfsimilar_bound, selfsimilar_spectrum, verify_algebra, DeformedAlgebra};
use xps_susy::extended::{
    charge_phase_witness, extended_hamiltonian, integrate_classical, uniform_times, witness_drift,
    ExtendedSystem, PhaseState, Sector, TRAJECTORY_COLUMNS,
};
use xps_susy::groundstate::{
    auxiliary_expectation, breaking_energy_semiclassical, energy_log_derivative, iterate_groundstate,
    normalization_reference_ln, refine, FlaggedValue, SectorState,
};
use xps_susy::instanton::{breaking_product, instanton_trajectory_at, ASYMPTOTE_TOLERANCE};
use xps_susy::oracle::{
    discretize, eigen_lowest, eigen_lowest_converged, extended_levels, SpectrumResult, DOMAIN_TOLERANCE,
    RESOLUTION_LIMIT,
};
use xps_susy::potentials::find_vacua;
use xps_susy::shape::{chain_step_residual, remainder_check, spectrum_from_remainders, ShapeInvariantFamily, INVARIANCE_TOLERANCE};
use xps_susy::{Family, Grid, PartnerSign, SuperPotential, SusyError};

use crate::config::{ExperimentConfig, InitialState, Params, SignSpec, Task};
use crate::report::{num, Plot, Report, Table};

const DEFAULT_POINTS: usize = 2001;

/// A validated task, ready to run.
#[derive(Debug, Clone)]
pub struct Job {
    pub task: Task,
    sys: Option<ExtendedSystem>,
    grid_q: Option<Grid>,
    grid_p: Option<Grid>,
    family: Option<ShapeInvariantFamily>,
    algebra: Option<DeformedAlgebra>,
    params: Params,
}

fn positive(key: &str, x: Option<f64>) -> Result<(), String> {
    match x {
        Some(v) if !(v > 0.0 && v.is_finite()) => Err(format!("params.{key}: must be positive, got {v}")),
        _ => Ok(()),
    }
}

fn at_least(key: &str, x: Option<usize>, min: usize) -> Result<(), String> {
    match x {
        Some(v) if v < min => Err(format!("params.{key}: must be at least {min}, got {v}")),
        _ => Ok(()),
    }
}

fn default_grid(w: &SuperPotential) -> Result<Grid, String> {
    let (lo, hi) = w.domain();
    Grid::new(lo, hi, DEFAULT_POINTS).map_err(|e| e.to_string())
}

/// Build every physical object named by the config; failures name the offending key.
pub fn prepare(task: Task, cfg: &ExperimentConfig) -> Result<Job, String> {
    if let Some(t) = cfg.task {
        if t != task {
            return Err(format!("task: config names `{}` but `{}` was requested", t.name(), task.name()));
        }
    }
    let p = &cfg.params;
    positive("t_end", p.t_end)?;
    positive("tol", p.tol)?;
    positive("tau_span", p.tau_span)?;
    at_least("n_levels", p.n_levels, 1)?;
    at_least("samples", p.samples, 2)?;
    at_least("iterations", p.iterations, 1)?;
    if let Some(c) = p.central_charges {
        if !c.iter().all(|x| x.is_finite()) {
            return Err("params.central_charges: must be finite".into());
        }
    }
    for (key, x) in [("tau0", p.tau0), ("a0", p.a0), ("h", p.h)] {
        if x.is_some_and(|v| !v.is_finite()) {
            return Err(format!("params.{key}: must be finite"));
        }
    }

    let sys = match &cfg.system {
        Some(s) => {
            let w = s.w.build().map_err(|e| format!("system.W: {e}"))?;
            let v = s.v.as_ref().map(|v| v.build()).transpose().map_err(|e| format!("system.V: {e}"))?;
            let [cq, cp] = p.central_charges.unwrap_or([0.0, 0.0]);
            Some(ExtendedSystem::new(w, v).with_central_charges(cq, cp))
        }
        None => None,
    };
    let family = p.family.as_ref().map(|f| f.build()).transpose().map_err(|e| format!("params.family: {e}"))?;
    let algebra = p.algebra.as_ref().map(|a| a.build()).transpose().map_err(|e| format!("params.algebra: {e}"))?;

    let needs_system = !matches!(task, Task::ShapeCheck | Task::ShapeSpectrum | Task::Algebra | Task::Selfsimilar);
    if needs_system && sys.is_none() {
        return Err(format!("system: required by task {}", task.name()));
    }
    let family = match task {
        Task::ShapeCheck | Task::ShapeSpectrum => match (family, &sys) {
            (Some(f), _) => Some(f),
            (None, Some(s)) => Some(ShapeInvariantFamily::frozen(s.w.clone())),
            (None, None) => return Err("params.family: required (or give system.W)".into()),
        },
        _ => family,
    };
    if matches!(task, Task::Algebra | Task::Selfsimilar) && algebra.is_none() {
        return Err(format!("params.algebra: required by task {}", task.name()));
    }
    if let Some(f) = &family {
        let a0 = p.a0.unwrap_or(1.0);
        if !f.admits(a0) {
            return Err(format!("params.a0: {a0} is outside the range of the {} family", f.name));
        }
        f.potential(a0).map_err(|e| format!("params.a0: {e}"))?;
    }

    let grid_q = match (p.grid, &sys, &family) {
        (Some(g), _, _) => Some(g.build().map_err(|e| format!("params.grid: {e}"))?),
        (None, Some(s), _) => Some(default_grid(&s.w).map_err(|e| format!("params.grid: {e}"))?),
        (None, None, Some(f)) => Some(
            Grid::new(f.domain.0, f.domain.1, DEFAULT_POINTS).map_err(|e| format!("params.family.domain: {e}"))?,
        ),
        _ => None,
    };
    let grid_p = match (p.grid_p, sys.as_ref().and_then(|s| s.v.as_ref())) {
        (Some(g), _) => Some(g.build().map_err(|e| format!("params.grid_p: {e}"))?),
        (None, Some(v)) => Some(default_grid(v).map_err(|e| format!("params.grid_p: {e}"))?),
        _ => None,
    };
    Ok(Job { task, sys, grid_q, grid_p, family, algebra, params: p.clone() })
}

/// A failed run: whatever was produced before the error, plus the error.
#[derive(Debug)]
pub struct Failure {
    pub partial: Box<Report>,
    pub error: SusyError,
}

pub fn execute(job: &Job) -> Result<Report, Failure> {
    let mut rep = Report::new(job.task);
    let res = match job.task {
        Task::Partner => partner(job, &mut rep),
        Task::Dynamics => dynamics(job, &mut rep),
        Task::Groundstate => groundstate(job, &mut rep),
        Task::Breaking => breaking(job, &mut rep),
        Task::Instanton => instanton(job, &mut rep),
        Task::ShapeCheck => shape_check(job, &mut rep),
        Task::ShapeSpectrum => shape_spectrum(job, &mut rep),
        Task::Algebra => algebra(job, &mut rep),
        Task::Selfsimilar => selfsimilar(job, &mut rep),
        Task::Oracle => oracle(job, &mut rep),
    };
    match res {
        Ok(()) => Ok(rep),
        Err(error) => Err(Failure { partial: Box::new(rep), error }),
    }
}

impl Job {
    fn sys(&self) -> &ExtendedSystem {
        self.sys.as_ref().expect("validated")
    }

    fn grid_q(&self) -> Grid {
        self.grid_q.expect("validated")
    }
}

fn sign_label(s: PartnerSign) -> String {
    match s {
        PartnerSign::Plus => "plus",
        PartnerSign::Minus => "minus",
    }
    .into()
}

fn zero_mode_label(w: &SuperPotential) -> String {
    w.zero_mode_sign().map_or_else(|| "none".into(), sign_label)
}

fn vacua_label(w: &SuperPotential) -> Result<String, SusyError> {
    Ok(find_vacua(w)?.iter().map(|v| num(v.location)).collect::<Vec<_>>().join(";"))
}

fn partner(job: &Job, rep: &mut Report) -> Result<(), SusyError> {
    let sys = job.sys();
    let mut t = Table::new("partner", &["sector", "x", "w", "w_prime", "u_plus", "u_minus"]);
    let mut residual = 0.0f64;
    let mut sectors = vec![("q", &sys.w, job.grid_q())];
    if let (Some(v), Some(g)) = (&sys.v, job.grid_p) {
        sectors.push(("p", v, g));
    }
    for (name, w, grid) in &sectors {
        for x in grid.points() {
            let (f, f1, _) = w.eval(x)?;
            let up = w.partner_unchecked(x, PartnerSign::Plus);
            let um = w.partner_unchecked(x, PartnerSign::Minus);
            residual = residual.max((up - um + 2.0 * f1).abs());
            t.push(vec![name.to_string(), num(x), num(f), num(f1), num(up), num(um)]);
        }
    }
    rep.plot = Some(Plot { table: 0, x: "x", ys: vec!["u_plus", "u_minus"], rows: job.grid_q().len() });
    rep.tables.push(t);
    rep.set("zero_mode_q", zero_mode_label(&sys.w));
    rep.set("vacua_q", vacua_label(&sys.w)?);
    if let Some(v) = &sys.v {
        rep.set("zero_mode_p", zero_mode_label(v));
        rep.set("vacua_p", vacua_label(v)?);
    }
    rep.set_num("identity_residual", residual);
    Ok(())
}

fn initial_state(s: InitialState) -> PhaseState {
    PhaseState::new(s.q, s.pi_q, s.p, s.pi_p)
        .with_q_soul(s.q_soul)
        .with_pi_q_soul(s.pi_q_soul)
        .with_p_soul(s.p_soul)
}

fn dynamics(job: &Job, rep: &mut Report) -> Result<(), SusyError> {
    let sys = job.sys();
    let p = &job.params;
    let t_end = p.t_end.unwrap_or(10.0);
    let tol = p.tol.unwrap_or(1e-10);
    let samples = p.samples.unwrap_or(1000);
    let s0 = initial_state(p.initial.unwrap_or_default());
    rep.tolerances.insert("ode_tol", tol);

    let mut columns = TRAJECTORY_COLUMNS.to_vec();
    columns.extend(["witness_q_re", "witness_q_im", "witness_p_re", "witness_p_im"]);
    let mut t = Table::new("dynamics", &columns);
    let traj = match integrate_classical(sys, &s0, t_end, tol, &uniform_times(s0.t, t_end, samples)) {
        Ok(traj) => traj,
        Err(SusyError::DomainExit { t: t_exit, last }) => {
            let h = extended_hamiltonian(sys, &last)?;
            let mut row: Vec<String> = last.row(h).iter().map(|x| num(*x)).collect();
            row.extend(std::iter::repeat_n(String::new(), 4));
            t.push(row);
            rep.tables.push(t);
            rep.set_num("t_final", last.t);
            return Err(SusyError::DomainExit { t: t_exit, last });
        }
        Err(e) => return Err(e),
    };
    let hs = traj.hamiltonians(sys)?;
    let witnesses = if sys.central_q == 0.0 && sys.central_p == 0.0 {
        Some((charge_phase_witness(sys, &traj, Sector::Q)?, charge_phase_witness(sys, &traj, Sector::P)?))
    } else {
        rep.flags.push("central charges set: charge witness not computed".into());
        None
    };
    for (i, (s, h)) in traj.states.iter().zip(&hs).enumerate() {
        let mut row: Vec<String> = s.row(*h).iter().map(|x| num(*x)).collect();
        match &witnesses {
            Some((wq, wp)) => row.extend([num(wq[i].re), num(wq[i].im), num(wp[i].re), num(wp[i].im)]),
            None => row.extend(std::iter::repeat_n(String::new(), 4)),
        }
        t.push(row);
    }
    rep.plot = Some(Plot { table: 0, x: "t", ys: vec!["q_body", "p_body"], rows: t.rows.len() });
    rep.tables.push(t);
    let (db, ds) = traj.hamiltonian_drift(sys)?;
    rep.set_num("t_final", traj.last().map_or(s0.t, |s| s.t));
    rep.set_num("h_body_drift", db);
    rep.set_num("h_soul_drift", ds);
    rep.convergence.insert("h_body_drift".into(), db);
    rep.convergence.insert("h_soul_drift".into(), ds);
    if let Some((wq, wp)) = witnesses {
        let (dq, dp) = (witness_drift(&wq), witness_drift(&wp));
        rep.set_num("witness_drift_q", dq);
        rep.set_num("witness_drift_p", dp);
        rep.convergence.insert("witness_drift_q".into(), dq);
        rep.convergence.insert("witness_drift_p".into(), dp);
    }
    Ok(())
}

fn push_sector(t: &mut Table, name: &str, s: &SectorState) {
    for (i, x) in s.grid.points().enumerate() {
        t.push(vec![name.to_string(), num(x), num(s.psi1[i]), num(s.psi2[i])]);
    }
}

fn groundstate(job: &Job, rep: &mut Report) -> Result<(), SusyError> {
    let sys = job.sys();
    let gq = job.grid_q();
    let gp = job.grid_p.unwrap_or(gq);
    let iterations = job.params.iterations.unwrap_or(2);
    let state = iterate_groundstate(sys, &gq, &gp, iterations)?;
    let mut t = Table::new("groundstate", &["sector", "x", "psi1", "psi2"]);
    push_sector(&mut t, "q", &state.q);
    if let Some(p) = &state.p {
        push_sector(&mut t, "p", p);
    }
    rep.plot = Some(Plot { table: 0, x: "x", ys: vec!["psi1", "psi2"], rows: gq.len() });
    rep.tables.push(t);
    rep.set("iterations", iterations.to_string());

    let dist = state.distance(&refine(sys, &state)?)?;
    rep.set_num("distance_to_next", dist);
    rep.convergence.insert("distance_to_next".into(), dist);
    match energy_log_derivative(&state, sys) {
        Ok((eq, ep)) => {
            rep.set_num("eps_q_log_derivative", eq);
            rep.set_num("eps_p_log_derivative", ep);
        }
        Err(e) => rep.flags.push(format!("log-derivative energy unavailable: {e}")),
    }
    match normalization_reference_ln(sys, &gq, &gp) {
        Ok(n) => rep.set_num("norm_reference_ln", n),
        Err(e) => rep.flags.push(format!("normalization reference unavailable: {e}")),
    }
    Ok(())
}

fn double_well_params(w: &SuperPotential) -> (String, String) {
    match w.family() {
        Family::DoubleWell { lambda, a } if w.scale() == 1.0 => (num(*lambda), num(*a)),
        _ => (String::new(), String::new()),
    }
}

fn set_flagged(rep: &mut Report, re: &str, im: &str, phase: &str, f: &FlaggedValue) {
    rep.set_num(re, f.value.re);
    rep.set_num(im, f.value.im);
    rep.set(phase, f.flag.as_str().into());
}

fn breaking(job: &Job, rep: &mut Report) -> Result<(), SusyError> {
    let sys = job.sys();
    let b = breaking_energy_semiclassical(sys)?;
    let f = auxiliary_expectation(sys)?;
    let (lq, aq) = double_well_params(&sys.w);
    rep.set("lambda_q", lq);
    rep.set("a_q", aq);
    if let Some(v) = &sys.v {
        let (lp, ap) = double_well_params(v);
        rep.set("lambda_p", lp);
        rep.set("a_p", ap);
    }
    rep.set_num("delta_w", b.q.delta);
    if let Some(p) = &b.p {
        rep.set_num("delta_v", p.delta);
    }
    rep.set_num("eps_q", b.eps_q());
    rep.set_num("eps_p", b.eps_p());
    rep.set_num("eps", b.eps());
    set_flagged(rep, "f_expect", "f_expect_im", "phase", &f);
    if f.flag != xps_susy::groundstate::PhaseFlag::Broken {
        rep.flags.push(format!("phase: {}", f.flag.as_str()));
    }
    let mut t = Table::new("breaking", &crate::report::BREAKING_COLUMNS);
    t.push(rep.summary.clone());
    rep.tables.push(t);
    Ok(())
}

fn instanton(job: &Job, rep: &mut Report) -> Result<(), SusyError> {
    let sys = job.sys();
    let p = &job.params;
    let span = p.tau_span.unwrap_or(30.0);
    let n = p.samples.unwrap_or(601);
    rep.tolerances.insert("asymptote_tolerance", ASYMPTOTE_TOLERANCE);
    let r = instanton_trajectory_at(&sys.w, span, n, p.tau0.unwrap_or(0.0))?;
    let mut t = Table::new("instanton", &["tau", "q_c", "w_c"]);
    for i in 0..r.tau.len() {
        t.push(vec![num(r.tau[i]), num(r.q_c[i]), num(r.w_c[i])]);
    }
    rep.plot = Some(Plot { table: 0, x: "tau", ys: vec!["q_c", "w_c"], rows: t.rows.len() });
    rep.tables.push(t);
    let rel = (r.action - r.delta_w).abs() / r.delta_w.abs();
    rep.set_num("action", r.action);
    rep.set_num("delta_w", r.delta_w);
    rep.set_num("action_rel_error", rel);
    rep.convergence.insert("action_rel_error".into(), rel);
    rep.set_num("w_prime_plus", r.w_prime_plus);
    rep.set_num("delta_q", r.delta_q);
    rep.set_num("me_charge_im", r.me_charge.im);
    rep.set_num("me_fermion", r.me_fermion);
    rep.set_num("eps", r.eps());
    let bp = breaking_product(&sys.w, sys.v.as_ref())?;
    set_flagged(rep, "breaking_product_re", "breaking_product_im", "phase", &bp);
    Ok(())
}

fn shape_check(job: &Job, rep: &mut Report) -> Result<(), SusyError> {
    let fam = job.family.as_ref().expect("validated");
    let grid = job.grid_q();
    let a0 = job.params.a0.unwrap_or(1.0);
    rep.tolerances.insert("invariance_tolerance", INVARIANCE_TOLERANCE);
    let c = remainder_check(fam, a0, &grid)?;
    let chain = chain_step_residual(fam, a0, &grid)?;
    rep.set_num("a0", c.a0);
    rep.set_num("a1", c.a1);
    rep.set_num("r_est", c.r_est);
    rep.set_num("residual", c.residual);
    rep.set("invariant", c.is_invariant().to_string());
    rep.set_num("chain_step_residual", chain);
    rep.convergence.insert("residual".into(), c.residual);
    let mut t = Table::new("shape_check", crate::report::summary_columns(Task::ShapeCheck));
    t.push(rep.summary.clone());
    rep.tables.push(t);
    Ok(())
}

fn shape_spectrum(job: &Job, rep: &mut Report) -> Result<(), SusyError> {
    let fam = job.family.as_ref().expect("validated");
    let grid = job.grid_q();
    let a0 = job.params.a0.unwrap_or(1.0);
    rep.tolerances.insert("invariance_tolerance", INVARIANCE_TOLERANCE);
    let s = spectrum_from_remainders(fam, a0, job.params.n_max.unwrap_or(5), &grid)?;
    let mut t = Table::new("shape_spectrum", &["n", "a", "energy", "remainder"]);
    for l in &s.levels {
        let rem = if l.remainder.is_nan() { String::new() } else { num(l.remainder) };
        t.push(vec![l.n.to_string(), num(l.a), num(l.energy), rem]);
    }
    rep.plot = Some(Plot { table: 0, x: "n", ys: vec!["energy"], rows: t.rows.len() });
    rep.tables.push(t);
    let e = s.energies();
    rep.set("levels", e.len().to_string());
    if e.len() > 1 {
        rep.set_num("e_1", e[1]);
    }
    rep.set_num("e_max", *e.last().unwrap_or(&0.0));
    rep.set("truncated", s.truncation.is_some().to_string());
    if let Some(msg) = s.truncation {
        rep.flags.push(msg);
    }
    Ok(())
}

fn algebra(job: &Job, rep: &mut Report) -> Result<(), SusyError> {
    let alg = job.algebra.as_ref().expect("validated");
    let n_max = job.params.n_max.unwrap_or(49);
    let r = ladder_coefficients(alg, n_max)?;
    let mut t = Table::new("algebra", &["n", "h", "xi", "a_sq", "a"]);
    for i in 0..r.dim {
        t.push(vec![i.to_string(), num(r.j3[i]), num(alg.xi(r.j3[i])), num(r.a_sq[i]), num(r.a[i])]);
    }
    rep.plot = Some(Plot { table: 0, x: "h", ys: vec!["a_sq"], rows: t.rows.len() });
    rep.tables.push(t);
    rep.set("dim", r.dim.to_string());
    let c = verify_algebra(&r, alg)?;
    rep.set_num("res_comm", c.res_comm);
    rep.set_num("res_casimir", c.res_casimir);
    rep.set_num("edge_comm", c.edge_comm);
    rep.set_num("edge_casimir", c.edge_casimir);
    rep.set_num("casimir", c.casimir);
    rep.convergence.insert("res_comm".into(), c.res_comm);
    rep.convergence.insert("res_casimir".into(), c.res_casimir);
    Ok(())
}

fn selfsimilar(job: &Job, rep: &mut Report) -> Result<(), SusyError> {
    let alg = job.algebra.as_ref().expect("validated");
    let h = job.params.h.unwrap_or(1.0);
    let n_max = job.params.n_max.unwrap_or(10);
    let levels = selfsimilar_spectrum(alg, h, n_max)?;
    let mut t = Table::new("selfsimilar", &["n", "energy", "telescoped"]);
    for l in &levels {
        t.push(vec![l.n.to_string(), num(l.energy), num(l.telescoped)]);
    }
    rep.plot = Some(Plot { table: 0, x: "n", ys: vec!["energy"], rows: t.rows.len() });
    rep.tables.push(t);
    let dev = levels.iter().map(|l| (l.energy - l.telescoped).abs()).fold(0.0, f64::max);
    if let Some(l) = levels.get(1) {
        rep.set_num("e_1", l.energy);
    }
    rep.set_num("e_n_max", levels.last().map_or(0.0, |l| l.energy));
    rep.set_num("bound", selfsimilar_bound(alg, h)?);
    rep.set_num("telescope_deviation", dev);
    rep.convergence.insert("telescope_deviation".into(), dev);
    Ok(())
}

fn solve(w: &SuperPotential, grid: &Grid, sign: PartnerSign, k: usize, extend: bool) -> Result<SpectrumResult, SusyError> {
    if extend {
        eigen_lowest_converged(w, grid, sign, k)
    } else {
        eigen_lowest(&discretize(w, grid, sign)?, k)
    }
}

fn oracle(job: &Job, rep: &mut Report) -> Result<(), SusyError> {
    let sys = job.sys();
    let p = &job.params;
    let k = p.n_levels.unwrap_or(6);
    let extend = p.extend_domain.unwrap_or(true);
    let sign = p.sign.unwrap_or(SignSpec::ZeroMode);
    rep.tolerances.insert("domain_tolerance", DOMAIN_TOLERANCE);
    rep.tolerances.insert("resolution_limit", RESOLUTION_LIMIT);

    let mut t = Table::new("oracle", &["sector", "sign", "n", "energy", "convergence_estimate"]);
    let mut sectors = vec![("q", &sys.w, job.grid_q())];
    if let (Some(v), Some(g)) = (&sys.v, job.grid_p) {
        sectors.push(("p", v, g));
    }
    let mut spectra = Vec::new();
    for (name, w, grid) in sectors {
        let s = sign.resolve(w);
        let spec = match solve(w, &grid, s, k, extend) {
            Ok(spec) => spec,
            Err(SusyError::NonConvergence { iterations, partial }) => {
                for (n, e) in partial.iter().enumerate() {
                    t.push(vec![name.into(), sign_label(s), n.to_string(), num(*e), String::new()]);
                }
                rep.tables.push(t);
                return Err(SusyError::NonConvergence { iterations, partial });
            }
            Err(e) => return Err(e),
        };
        for l in &spec.levels {
            t.push(vec![name.into(), sign_label(s), l.n.to_string(), num(l.energy), num(l.convergence_estimate)]);
        }
        rep.convergence.insert(format!("max_convergence_estimate_{name}"), spec.max_convergence_estimate());
        if spec.under_resolved {
            rep.flags.push(format!("{name}: grid under-resolves the partner potential"));
        }
        if extend && !spec.domain_converged {
            rep.flags.push(format!("{name}: ground energy still moving after domain extension"));
        }
        spectra.push((name, spec));
    }
    rep.plot = Some(Plot { table: 0, x: "n", ys: vec!["energy"], rows: spectra[0].1.levels.len() });
    rep.tables.push(t);

    let (_, sq) = &spectra[0];
    rep.set_num("e0_q", sq.levels[0].energy);
    if let Some(e) = sq.energy(1) {
        rep.set_num("e1_q", e);
    }
    if let Some((_, sp)) = spectra.get(1) {
        rep.set_num("e0_p", sp.levels[0].energy);
        if let Some(e) = sp.energy(1) {
            rep.set_num("e1_p", e);
        }
        let mut ext = Table::new("extended", &["n1", "n2", "energy"]);
        for l in extended_levels(sq, sp, k) {
            ext.push(vec![l.n1.to_string(), l.n2.to_string(), num(l.energy)]);
        }
        rep.tables.push(ext);
    }
    let max_est = spectra.iter().map(|(_, s)| s.max_convergence_estimate()).fold(0.0, f64::max);
    rep.set_num("max_convergence_estimate", max_est);
    rep.set("extensions_q", sq.extensions.to_string());
    rep.set("domain_converged", spectra.iter().all(|(_, s)| s.domain_converged || !extend).to_string());
    rep.set("under_resolved", spectra.iter().any(|(_, s)| s.under_resolved).to_string());
    Ok(())
}
