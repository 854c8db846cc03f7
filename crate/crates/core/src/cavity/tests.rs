use nalgebra::DMatrix;
use proptest::prelude::*;

use super::*;
use crate::molecule::ElectronicStructure;
use crate::numerics::{solve_hermitian_all, Grid1D};
use crate::spectra::{absorption_from_transitions, omega_grid};

fn toy_bare(mu: [f64; 4]) -> BareStates {
    // Two even and two odd states; dipoles only across parity.
    let mut d = DMatrix::zeros(4, 4);
    let pairs = [(0, 2), (0, 3), (1, 2), (1, 3)];
    for (k, (a, b)) in pairs.into_iter().enumerate() {
        d[(a, b)] = mu[k];
        d[(b, a)] = mu[k];
    }
    BareStates {
        energies: vec![-1.0, -0.97, -0.88, -0.85],
        dipole: d,
        parity: vec![1, 1, -1, -1],
        excited_weight: vec![0.0, 0.0, 1.0, 1.0],
    }
}

fn two_level(gap: f64, mu: f64) -> BareStates {
    BareStates {
        energies: vec![0.0, gap],
        dipole: DMatrix::from_row_slice(2, 2, &[0.0, mu, mu, 0.0]),
        parity: vec![1, -1],
        excited_weight: vec![0.0, 1.0],
    }
}

fn toy_structure(omega_c: f64) -> ElectronicStructure {
    // Displaced harmonic surfaces crossing E_g + ω_c near R = 3.
    let grid = Grid1D::new(2.0, 4.0, 201).unwrap();
    let eg: Vec<f64> = grid.points().iter().map(|r| 0.2 * (r - 2.9).powi(2)).collect();
    let ee: Vec<f64> = grid.points().iter().map(|r| omega_c + 0.2 * (r - 3.1).powi(2)).collect();
    let mu: Vec<f64> = grid.points().iter().map(|r| 1.3 + 0.1 * (r - 3.0)).collect();
    ElectronicStructure::from_surfaces(grid, eg, ee, mu).unwrap()
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn two_by_two_polaritons_match_closed_form() {
    let omega_c = 0.1;
    let es = toy_structure(omega_c);
    let c = CavityParams::new(omega_c, 0.004, 1).unwrap();
    let ps = coupled_pes_single(&es, &c).unwrap();
    for i in 0..es.grid_r.len() {
        let (eg, ee, mu) = (es.ground()[i], es.excited()[i], es.dipoles[i][(0, 1)]);
        let mean = 0.5 * (eg + omega_c + ee);
        let half = (0.25 * (ee - eg - omega_c).powi(2) + (c.g * mu).powi(2)).sqrt();
        assert!((ps.surface("LP").unwrap()[i] - (mean - half)).abs() < 1e-12);
        assert!((ps.surface("UP").unwrap()[i] - (mean + half)).abs() < 1e-12);
        let mean_g = 0.5 * (eg + ee + omega_c);
        let half_g = (0.25 * (ee + omega_c - eg).powi(2) + (c.g * mu).powi(2)).sqrt();
        assert!((ps.surface("G").unwrap()[i] - (mean_g - half_g)).abs() < 1e-12);
    }
}

#[test]
fn resonance_gives_even_mixing_and_two_g_mu_gap() {
    let omega_c = 0.1;
    let es = toy_structure(omega_c);
    let c = CavityParams::new(omega_c, 0.002, 1).unwrap();
    let ps = coupled_pes_single(&es, &c).unwrap();
    // E_e - E_g - ω_c = 0.2 ((R-3.1)² - (R-2.9)²) vanishes at R = 3.0, a grid point.
    let i = es.grid_r.nearest_index(3.0);
    let gap = ps.surface("UP").unwrap()[i] - ps.surface("LP").unwrap()[i];
    assert!((gap - 2.0 * c.g * es.dipoles[i][(0, 1)]).abs() < 1e-13);
    let lp = ps.index("LP").unwrap();
    assert!((ps.exciton_fraction(lp, i) - 0.5).abs() < 1e-10);
}

#[test]
fn decoupled_surfaces_cross() {
    let omega_c = 0.1;
    let es = toy_structure(omega_c);
    let ps = coupled_pes_single(&es, &CavityParams::new(omega_c, 0.0, 4).unwrap()).unwrap();
    for i in 0..es.grid_r.len() {
        let a = es.excited()[i];
        let b = es.ground()[i] + omega_c;
        assert_eq!(ps.surface("LP").unwrap()[i], a.min(b));
        assert_eq!(ps.surface("UP").unwrap()[i], a.max(b));
        assert_eq!(ps.surface("G").unwrap()[i], es.ground()[i]);
    }
}

#[test]
fn mixing_weights_are_normalized() {
    let es = toy_structure(0.1);
    let ps = coupled_pes_single(&es, &CavityParams::new(0.1, 0.02, 4).unwrap()).unwrap();
    for s in 0..3 {
        for w in &ps.weights[s] {
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }
    for i in 1..es.grid_r.len() {
        for s in 0..3 {
            assert!(ps.surfaces[s][i].is_finite());
        }
        assert!(ps.surfaces[1][i] <= ps.surfaces[2][i]);
    }
}

#[test]
fn far_detuned_lower_polariton_follows_perturbation() {
    let omega_c = 0.1;
    let es = toy_structure(omega_c);
    let c = CavityParams::new(omega_c, 0.001, 1).unwrap();
    let ps = coupled_pes_single(&es, &c).unwrap();
    let i = 0;
    let (eg, ee, mu) = (es.ground()[i], es.excited()[i], es.dipoles[i][(0, 1)]);
    let delta = ee - eg - omega_c;
    let bound = (c.g * mu).powi(2) / delta.abs();
    let lp = ps.surface("LP").unwrap()[i];
    assert!((lp - ee.min(eg + omega_c)).abs() <= bound * (1.0 + 1e-6));
    assert!((lp - (ee.min(eg + omega_c) - bound)).abs() < 1e-2 * bound);
}

#[test]
fn polariton_dipoles_are_continuous() {
    let es = toy_structure(0.1);
    let ps = coupled_pes_single(&es, &CavityParams::new(0.1, 0.004, 4).unwrap()).unwrap();
    for s in 1..3 {
        let d = &ps.ground_dipoles[s];
        for i in 1..d.len() {
            assert!((d[i] - d[i - 1]).abs() < 0.2, "jump at {i}: {} -> {}", d[i - 1], d[i]);
        }
    }
}

#[test]
fn decoupled_cavity_is_bare_plus_replicas() {
    let bare = toy_bare([0.9, 0.2, 0.3, 0.8]);
    let c = CavityParams::new(0.05, 0.0, 3).unwrap();
    let sol = solve_cavity(&bare, &c).unwrap();
    let mut expect: Vec<f64> =
        bare.energies.iter().flat_map(|e| (0..=3).map(move |n| e + n as f64 * 0.05)).collect();
    expect.sort_by(f64::total_cmp);
    for (a, b) in sol.energies.iter().zip(&expect) {
        assert_eq!(a, b);
    }
    assert_eq!(ground_photon_number(&sol).unwrap(), 0.0);
}

#[test]
fn parity_blocks_match_full_matrix() {
    let bare = toy_bare([0.9, 0.2, 0.3, 0.8]);
    let c = CavityParams::new(0.11, 0.03, 5).unwrap();
    let blocked = solve_cavity(&bare, &c).unwrap();
    let full = solve_hermitian_all(&cavity_hamiltonian(&bare, &c).unwrap()).unwrap();
    for (a, b) in blocked.energies.iter().zip(&full.energies) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!(blocked.orthonormality_error() < 1e-12);
    // Cross-parity matrix elements vanish identically.
    let h = cavity_hamiltonian(&bare, &c).unwrap();
    let par = product_parity(&bare, c.n_max);
    for i in 0..h.nrows() {
        for j in 0..h.ncols() {
            if par[i] != par[j] {
                assert_eq!(h[(i, j)], 0.0);
            }
        }
    }
}

#[test]
fn ground_energy_second_order_and_monotone() {
    let (gap, mu, omega_c) = (0.12, 1.4, 0.1);
    let bare = two_level(gap, mu);
    let mut last = 0.0;
    for k in 1..=10 {
        let g = 0.002 * k as f64;
        let sol = solve_exact_cavity(&bare, &CavityParams::new(omega_c, g, 4).unwrap(), 1, 1e-12).unwrap();
        let e0 = sol.solution.energies[0];
        assert!(e0 < last - 1e-10, "no counter-rotating shift at g = {g}");
        last = e0;
        if k == 1 {
            let pt2 = -(g * mu).powi(2) / (gap + omega_c);
            assert!((e0 - pt2).abs() < 1e-3 * pt2.abs());
        }
    }
}

#[test]
fn photon_number_grows_as_g_squared() {
    let bare = two_level(0.12, 1.4);
    let gs = [1e-3, 2e-3, 4e-3, 8e-3];
    let ns: Vec<f64> = gs
        .iter()
        .map(|&g| {
            let s = solve_exact_cavity(&bare, &CavityParams::new(0.1, g, 4).unwrap(), 1, 1e-12).unwrap();
            ground_photon_number(&s.solution).unwrap()
        })
        .collect();
    assert!(ns.windows(2).all(|w| w[1] > w[0]));
    assert!((slope(&gs, &ns) - 2.0).abs() < 0.1);
    // Second-order amplitude of |e,1⟩.
    let expect = (gs[0] * 1.4 / (0.12 + 0.1_f64)).powi(2);
    assert!((ns[0] - expect).abs() < 1e-3 * expect);
}

#[test]
fn fock_escalation_reports_drift() {
    let bare = two_level(0.12, 1.4);
    let c = CavityParams::new(0.1, 0.05, 1).unwrap();
    let s = solve_exact_cavity(&bare, &c, 3, 1e-8).unwrap();
    assert!(s.n_max > 1 && s.drift <= 1e-8);
    let err = solve_exact_cavity(&bare, &c.with_g(5.0), 3, 0.0).unwrap_err();
    assert!(matches!(err, crate::Error::NotConverged { .. }));
}

#[test]
fn decoupled_absorption_is_bitwise_bare() {
    let bare = toy_bare([0.9, 0.2, 0.3, 0.8]);
    let sol = solve_cavity(&bare, &CavityParams::new(0.1, 0.0, 4).unwrap()).unwrap();
    let grid = omega_grid(3.0, 3.0, 801).unwrap();
    let a = absorption_from_transitions(&cavity_transitions(&bare, &sol).unwrap(), 0.05, &grid).unwrap();
    let b = absorption_from_transitions(&bare_state_transitions(&bare).unwrap(), 0.05, &grid).unwrap();
    assert!(a.sigma.iter().zip(&b.sigma).all(|(x, y)| x.to_bits() == y.to_bits()));
}

#[test]
fn usc_ground_residual_is_fourth_order() {
    let es = toy_structure(0.1);
    let gs = [0.002, 0.004, 0.008, 0.016];
    let i = es.grid_r.nearest_index(2.9);
    let mut res = Vec::new();
    for &g in &gs {
        let u = ground_state_pes_usc(&es, &CavityParams::new(0.1, g, 6).unwrap()).unwrap();
        assert!(u.shift_exact().iter().all(|s| *s < 0.0));
        assert!(u.shift_perturbative().iter().all(|s| *s < 0.0));
        res.push(u.exact[i] - u.perturbative[i]);
    }
    assert!((slope(&gs, &res) - 4.0).abs() < 0.1, "slope {}", slope(&gs, &res));
    let u0 = ground_state_pes_usc(&es, &CavityParams::new(0.1, 0.0, 6).unwrap()).unwrap();
    assert_eq!(u0.exact, es.ground().to_vec());
    assert_eq!(u0.perturbative, es.ground().to_vec());
}

#[test]
fn usc_singular_denominator() {
    let grid = Grid1D::new(0.0, 1.0, 11).unwrap();
    let eg = vec![0.5; 11];
    let ee: Vec<f64> = grid.points().iter().map(|r| 0.45 + 0.1 * r).collect();
    let es = ElectronicStructure::from_surfaces(grid, eg, ee, vec![1.0; 11]).unwrap();
    assert!(matches!(
        ground_state_pes_usc(&es, &CavityParams::new(0.05, 0.01, 2).unwrap()),
        Err(crate::Error::Singular(_))
    ));
}

#[test]
fn bond_shift_of_constructed_surfaces() {
    let grid = Grid1D::new(2.0, 4.0, 101).unwrap();
    let d = 3.7e-4;
    let a: Vec<f64> = grid.points().iter().map(|r| 0.3 * (r - 3.0).powi(2)).collect();
    let b: Vec<f64> = grid.points().iter().map(|r| 0.3 * (r - 3.0 - d).powi(2) - 0.01).collect();
    let same = bond_length_shift(&grid, &a, &a).unwrap();
    assert_eq!(same.delta_au, 0.0);
    let s = bond_length_shift(&grid, &a, &b).unwrap();
    assert!((s.delta_au - d).abs() < 1e-9);
    assert!((s.delta_milliangstrom - crate::units::bohr_to_milliangstrom(d)).abs() < 1e-6);
    let edge: Vec<f64> = grid.points().iter().map(|r| r * 0.1).collect();
    assert!(matches!(bond_length_shift(&grid, &a, &edge), Err(crate::Error::Window(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn blocked_solve_equals_dense(
        mu in proptest::array::uniform4(-1.5f64..1.5),
        omega in 0.01f64..0.3,
        g in 0.0f64..0.05,
        n_max in 1usize..5,
    ) {
        let bare = toy_bare(mu);
        let c = CavityParams::new(omega, g, n_max).unwrap();
        let blocked = solve_cavity(&bare, &c).unwrap();
        let full = solve_hermitian_all(&cavity_hamiltonian(&bare, &c).unwrap()).unwrap();
        for (a, b) in blocked.energies.iter().zip(&full.energies) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }
}
