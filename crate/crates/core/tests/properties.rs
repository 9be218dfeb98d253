use proptest::prelude::*;

use xps_susy::extended::{integrate_classical, uniform_times, ExtendedSystem, PhaseState};
use xps_susy::instanton::instanton_matrix_elements;
use xps_susy::oracle::{discretize, eigen_lowest};
use xps_susy::shape::{remainder_check, spectrum_from_remainders, ShapeInvariantFamily};
use xps_susy::{Grid, SuperPotential};

/// Chain levels (those with zero-mode parameter `a_n ≥ min_a`) against the oracle.
fn compare_with_oracle(fam: &ShapeInvariantFamily, a0: f64, grid: &Grid, n_max: usize, min_a: f64) {
    let check = remainder_check(fam, a0, grid).unwrap();
    assert!(check.residual < 1e-8 * (1.0 + check.r_est.abs()), "{} a0={a0}: {check:?}", fam.name);
    let chain = spectrum_from_remainders(fam, a0, n_max, grid).unwrap();
    let w = fam.potential(a0).unwrap();
    let sign = w.zero_mode_sign().unwrap();
    let spec = eigen_lowest(&discretize(&w, grid, sign).unwrap(), chain.levels.len()).unwrap();
    for (c, l) in chain.levels.iter().zip(&spec.levels).filter(|(c, _)| c.a >= min_a) {
        let tol = 1e-4f64.max(l.convergence_estimate);
        assert!(
            (c.energy - l.energy).abs() <= tol,
            "{} a0={a0} n={}: chain {} oracle {} (tol {tol:e})",
            fam.name,
            c.n,
            c.energy,
            l.energy
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn harmonic_chain_matches_oracle(a in 0.5f64..2.0) {
        let fam = ShapeInvariantFamily::harmonic((-8.0, 8.0));
        compare_with_oracle(&fam, a, &Grid::new(-8.0, 8.0, 2001).unwrap(), 5, 0.0);
    }

    #[test]
    fn shifted_oscillator_chain_matches_oracle(a in 0.5f64..2.0, c in -1.5f64..1.5) {
        let fam = ShapeInvariantFamily::shifted_oscillator(c, (-9.0, 9.0));
        compare_with_oracle(&fam, a, &Grid::new(-9.0, 9.0, 2251).unwrap(), 5, 0.0);
    }

    #[test]
    fn morse_chain_matches_oracle(a in 1.5f64..4.0, b in 0.5f64..1.2) {
        let fam = ShapeInvariantFamily::morse(b, (-6.0, 30.0));
        compare_with_oracle(&fam, a, &Grid::new(-6.0, 30.0, 8001).unwrap(), 5, 0.5);
    }

    #[test]
    fn poschl_teller_chain_matches_oracle(a in 1.5f64..4.0, b in 0.5f64..1.2) {
        let fam = ShapeInvariantFamily::poschl_teller(b, (-20.0, 20.0));
        compare_with_oracle(&fam, a, &Grid::new(-20.0, 20.0, 8001).unwrap(), 5, 0.5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn extended_hamiltonian_is_conserved(
        lambda in 0.5f64..1.5,
        a in 0.7f64..1.3,
        q in -1.5f64..1.5,
        pi_q in -1.0f64..1.0,
        p in -1.5f64..1.5,
        pi_p in -1.0f64..1.0,
        q_soul in -0.5f64..0.5,
        p_soul in -0.5f64..0.5,
    ) {
        let tol = 1e-10;
        let w = SuperPotential::double_well(lambda, a, (-8.0, 8.0)).unwrap();
        let v = SuperPotential::double_well(1.0, 1.0, (-8.0, 8.0)).unwrap();
        let sys = ExtendedSystem::new(w, Some(v));
        let s0 = PhaseState::new(q, pi_q, p, pi_p).with_q_soul(q_soul).with_p_soul(p_soul);
        let traj = integrate_classical(&sys, &s0, 100.0, tol, &uniform_times(0.0, 100.0, 200)).unwrap();
        let (body, soul) = traj.hamiltonian_drift(&sys).unwrap();
        // souls grow along unstable directions; the step control is relative to them
        let scale = traj
            .states
            .iter()
            .flat_map(|s| [s.q.soul, s.pi_q.soul, s.p.soul, s.pi_p.soul])
            .fold(1.0f64, |m, x| m.max(x.abs()));
        prop_assert!(body <= 100.0 * tol, "body drift {body:e}");
        prop_assert!(soul <= 100.0 * tol * scale, "soul drift {soul:e} at soul scale {scale:e}");
    }
}

#[test]
fn instanton_breaking_energy_scales_with_twice_the_action() {
    let (mut x, mut raw, mut reduced) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..6 {
        let a = 1.0 + 0.1 * i as f64;
        let m = instanton_matrix_elements(&SuperPotential::double_well(1.0, a, (-8.0, 8.0)).unwrap()).unwrap();
        x.push(m.delta_w);
        raw.push(m.eps().ln());
        reduced.push((2.0 * std::f64::consts::PI * m.eps() / m.w_prime_plus).ln());
    }
    let slope = |y: &[f64]| {
        let n = x.len() as f64;
        let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
        x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>()
            / x.iter().map(|a| (a - mx).powi(2)).sum::<f64>()
    };
    assert!((slope(&reduced) + 2.0).abs() <= 1e-9, "reduced slope {}", slope(&reduced));
    // W'(q+) = 2a grows along the family and flattens the raw slope
    assert!((slope(&raw) + 2.0).abs() <= 0.15, "raw slope {}", slope(&raw));
}
