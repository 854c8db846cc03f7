use std::path::Path;

use polaritonic::cavity::{
    bare_state_transitions, bare_states, cavity_transitions, coupled_pes_single, ground_state_pes_usc, solve_cavity,
    usc_bond_shift, zero_detuning_omega, BareStates, CavityParams, ShiftOptions,
};
use polaritonic::molecule::{
    build_bo_structure, calibrate, default_grid_r, measure_report, vibrational_levels, CalibrationOptions,
    ElectronicStructure, Fixture, MoleculeObservables,
};
use polaritonic::multimol::{
    boa_two_transitions, collective_scaling_report, correlation_fits, coupled_pes_two, solve_exact_two, CoupledPES2D,
    MolSampler, PairSurfaces,
};
use polaritonic::nonbo::{
    boa_validity, linearized_model, nonbo_model, nonbo_numeric, polariton_fields, typical_momentum,
};
use polaritonic::numerics::{DerivativeScheme, Grid1D};
use polaritonic::spectra::{
    absorption_from_transitions, bare_transitions, omega_grid, rabi_splitting, spectral_overlap, Spectrum, Transition,
};
use polaritonic::units::au_to_ev;
use serde_json::json;

use crate::config::{OmegaC, OmegaMode, RunConfig, Task};
use crate::error::CliError;
use crate::output::{g_tag, rows_csv, Output};

/// A fixture together with the name used in file names.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub name: String,
    pub source: String,
    pub fixture: Fixture,
}

impl Loaded {
    pub fn text(&self) -> String {
        self.fixture.to_text()
    }
}

/// Resolve a fixture entry: an existing file wins over a built-in name.
pub fn load_fixture(entry: &str) -> Result<Loaded, CliError> {
    let path = Path::new(entry);
    if path.is_file() {
        let fixture = Fixture::load(path).map_err(|e| CliError::Config(format!("fixture {entry}: {e}")))?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("fixture").to_string();
        return Ok(Loaded { name, source: entry.to_string(), fixture });
    }
    match Fixture::builtin(entry) {
        Ok(fixture) => {
            let name = entry.replace('-', "_");
            let name = if name.ends_with("_like") { name } else { format!("{name}_like") };
            Ok(Loaded { name, source: format!("builtin:{entry}"), fixture })
        }
        Err(_) => Err(CliError::Config(format!(
            "fixture '{entry}' is neither a file nor a built-in molecule; create it with `polaritonic calibrate` \
             (a [calibrate] section with targets writes <output>/<name>.params)"
        ))),
    }
}

/// Everything a task needs for one molecule.
struct Molecule<'a> {
    loaded: &'a Loaded,
    cfg: &'a RunConfig,
    grid_x: Grid1D,
    grid_r: Grid1D,
}

impl<'a> Molecule<'a> {
    fn new(loaded: &'a Loaded, cfg: &'a RunConfig) -> Result<Self, CliError> {
        let grid_x = cfg.grids.x.grid()?;
        let grid_r = match &cfg.grids.r {
            Some(r) => r.grid()?,
            None => default_grid_r(&loaded.fixture)?,
        };
        Ok(Self { loaded, cfg, grid_x, grid_r })
    }

    fn mass(&self) -> f64 {
        self.loaded.fixture.params.mass
    }

    fn name(&self) -> &str {
        &self.loaded.name
    }

    fn structure(&self, n_el: usize, grid: &Grid1D, keep: bool) -> Result<ElectronicStructure, CliError> {
        Ok(build_bo_structure(&self.loaded.fixture.params, &self.grid_x, grid, n_el, keep)?)
    }

    fn bare(&self, es: &ElectronicStructure, n: Option<usize>) -> Result<BareStates, CliError> {
        let b = &self.cfg.basis;
        let (ng, ne) = n.map_or((b.n_ground, b.n_excited), |n| (n, n));
        Ok(bare_states(es, self.mass(), ng, ne)?)
    }

    /// Photon-energy grid centred on the vertical gap at the middle of the nuclear grid.
    fn omega_grid(&self, es: &ElectronicStructure) -> Result<Vec<f64>, CliError> {
        let mid = es.grid_r.len() / 2;
        let gap = au_to_ev(es.excited()[mid] - es.ground()[mid]);
        let s = &self.cfg.spectrum;
        Ok(omega_grid(gap, s.half_span_ev, s.points)?)
    }

    fn spectrum(&self, t: &[Transition], grid: &[f64]) -> Result<Spectrum, CliError> {
        Ok(absorption_from_transitions(t, self.cfg.spectrum.epsilon_ev, grid)?)
    }

    /// Cavity frequency in hartree for the configured mode.
    fn omega_c(&self, es: &ElectronicStructure, bare: Option<&BareStates>) -> Result<f64, CliError> {
        match self.cfg.cavity.omega_c {
            OmegaC::Hartree(w) => Ok(w),
            OmegaC::Mode(OmegaMode::Vertical) => {
                let s = MolSampler::new(self.loaded.fixture.params, self.grid_x);
                let (r_e, _) = s.ground_harmonic()?;
                let m = s.at(r_e)?;
                Ok(m.e_e - m.e_g)
            }
            OmegaC::Mode(OmegaMode::Auto) => {
                let owned;
                let bare = match bare {
                    Some(b) => b,
                    None => {
                        owned = self.bare(es, None)?;
                        &owned
                    }
                };
                let grid = self.omega_grid(es)?;
                Ok(zero_detuning_omega(&self.spectrum(&bare_state_transitions(bare)?, &grid)?)?)
            }
        }
    }

    /// Structure on the nuclear grid with the configured number of electronic states.
    fn full_structure(&self) -> Result<ElectronicStructure, CliError> {
        self.structure(self.cfg.basis.electronic_states, &self.grid_r, true)
    }
}

fn record_omega(out: &mut Output, name: &str, omega_c: f64) {
    out.set(&format!("omega_c_{name}"), json!({ "hartree": omega_c, "ev": au_to_ev(omega_c) }));
}

fn spectrum_csv(grid: &[f64], columns: &[(&str, &Spectrum)]) -> String {
    let header = std::iter::once("omega_ev").chain(columns.iter().map(|c| c.0)).collect::<Vec<_>>().join(",");
    rows_csv(
        &header,
        (0..grid.len()).map(|i| std::iter::once(grid[i]).chain(columns.iter().map(|c| c.1.sigma[i])).collect()),
    )
}

pub fn run_task(task: Task, cfg: &RunConfig, fixtures: &[Loaded], out: &mut Output, prefix: &str) -> Result<(), CliError> {
    match task {
        Task::Calibrate => calibrate_task(cfg, fixtures, out),
        Task::Bare => bare_task(cfg, fixtures, out, prefix),
        Task::Absorb => absorb_task(cfg, fixtures, out, prefix),
        Task::Pes1 => pes1_task(cfg, fixtures, out, prefix),
        Task::Pes2 => pes2_task(cfg, fixtures, out, prefix),
        Task::Nonbo => nonbo_task(cfg, fixtures, out, prefix),
        Task::UscScan => usc_task(cfg, fixtures, out, prefix),
        Task::ScalingReport => scaling_task(cfg, fixtures, out, prefix),
    }
}

fn calibrate_task(cfg: &RunConfig, fixtures: &[Loaded], out: &mut Output) -> Result<(), CliError> {
    let c = cfg
        .calibrate
        .as_ref()
        .ok_or_else(|| CliError::Config("task calibrate needs a [calibrate] section with targets".into()))?;
    let init = &fixtures[0];
    let targets = MoleculeObservables {
        omega_vib: c.omega_vib_ev,
        delta_r: c.delta_r,
        transition_energy: c.transition_ev,
        dipole_at_re: c.dipole,
    };
    let opts = CalibrationOptions {
        grid_x: cfg.grids.x.grid()?,
        restarts: c.restarts,
        max_iterations: c.max_iterations,
        seed: cfg.seed,
        ..CalibrationOptions::default()
    };
    let report = calibrate(&targets, &init.fixture.params, &opts)?;
    let mut fixture = init.fixture.clone();
    fixture.params = report.params;
    fixture.header = vec![
        format!("Calibrated from {} by polaritonic {}.", init.source, crate::output::VERSION),
        format!("manifest {}", out.hash()),
        format!(
            "Targets: omega_vib {} eV, delta_R {} bohr, transition {} eV, dipole {} a.u.",
            c.omega_vib_ev, c.delta_r, c.transition_ev, c.dipole
        ),
    ];
    out.text(&format!("{}.params", c.name), &fixture.to_text())?;
    out.json("calibration.json", &report)
}

fn bare_task(cfg: &RunConfig, fixtures: &[Loaded], out: &mut Output, prefix: &str) -> Result<(), CliError> {
    for l in fixtures {
        let m = Molecule::new(l, cfg)?;
        let es = m.full_structure()?;
        let xs = es.grid_r.points();
        let mu = es.mu_eg();
        out.csv(
            &format!("{prefix}bare_{}_surfaces.csv", m.name()),
            &rows_csv("R,E_g,E_e,mu_eg", (0..xs.len()).map(|i| vec![xs[i], es.ground()[i], es.excited()[i], mu[i]])),
        )?;
        let n_show = 5;
        let lg = vibrational_levels(&es, 0, m.mass(), n_show)?;
        let le = vibrational_levels(&es, 1, m.mass(), n_show)?;
        let mut rows = Vec::new();
        for (s, l) in [(0.0, &lg), (1.0, &le)] {
            for v in 0..n_show {
                rows.push(vec![s, v as f64, l.energies[v]]);
            }
        }
        out.csv(&format!("{prefix}bare_{}_levels.csv", m.name()), &rows_csv("surface,v,energy", rows))?;
        let dens: Vec<Vec<f64>> = (0..n_show).map(|v| lg.density(v)).chain((0..n_show).map(|v| le.density(v))).collect();
        let header = std::iter::once("R".to_string())
            .chain((0..n_show).map(|v| format!("g_v{v}")))
            .chain((0..n_show).map(|v| format!("e_v{v}")))
            .collect::<Vec<_>>()
            .join(",");
        out.csv(
            &format!("{prefix}bare_{}_densities.csv", m.name()),
            &rows_csv(&header, (0..xs.len()).map(|i| std::iter::once(xs[i]).chain(dens.iter().map(|d| d[i])).collect())),
        )?;
        let bare = m.bare(&es, None)?;
        let grid = m.omega_grid(&es)?;
        let exact = m.spectrum(&bare_state_transitions(&bare)?, &grid)?;
        let boa = m.spectrum(&bare_transitions(&es, m.mass(), cfg.basis.boa_levels)?, &grid)?;
        out.csv(
            &format!("{prefix}bare_{}_absorption.csv", m.name()),
            &spectrum_csv(&grid, &[("exact", &exact), ("boa", &boa)]),
        )?;
        let report = measure_report(&es, m.mass()).ok();
        let omega = zero_detuning_omega(&exact)?;
        out.json(
            &format!("{prefix}bare_{}.json", m.name()),
            &json!({
                "fixture": l.source,
                "params": l.fixture.params,
                "observables": report,
                "absorption_peak_ev": au_to_ev(omega),
                "exact_boa_overlap": spectral_overlap(&exact, &boa)?,
            }),
        )?;
    }
    Ok(())
}

fn absorb_task(cfg: &RunConfig, fixtures: &[Loaded], out: &mut Output, prefix: &str) -> Result<(), CliError> {
    for l in fixtures {
        let m = Molecule::new(l, cfg)?;
        let es = m.full_structure()?;
        let bare = m.bare(&es, None)?;
        let grid = m.omega_grid(&es)?;
        let wc = m.omega_c(&es, Some(&bare))?;
        record_omega(out, m.name(), wc);
        let mut summary = Vec::new();
        for g in cfg.couplings() {
            let c = CavityParams::new(wc, g, cfg.cavity.n_max)?;
            let sol = solve_cavity(&bare, &c)?;
            let exact = m.spectrum(&cavity_transitions(&bare, &sol)?, &grid)?;
            // Without coupling the polaritonic surfaces are the bare ones.
            let boa_t = if g == 0.0 {
                bare_transitions(&es, m.mass(), cfg.basis.boa_levels)?
            } else {
                coupled_pes_single(&es, &c)?.transitions(m.mass(), cfg.basis.boa_levels)?
            };
            let boa = m.spectrum(&boa_t, &grid)?;
            out.csv(
                &format!("{prefix}absorb_{}_{}.csv", m.name(), g_tag(g)),
                &spectrum_csv(&grid, &[("exact", &exact), ("boa", &boa)]),
            )?;
            let split = if g > 0.0 { rabi_splitting(&exact).unwrap_or(f64::NAN) } else { 0.0 };
            summary.push(vec![g, split, spectral_overlap(&exact, &boa)?]);
        }
        out.csv(&format!("{prefix}absorb_{}_summary.csv", m.name()), &rows_csv("g,rabi_splitting_ev,overlap", summary))?;
    }
    Ok(())
}

fn pes1_task(cfg: &RunConfig, fixtures: &[Loaded], out: &mut Output, prefix: &str) -> Result<(), CliError> {
    for l in fixtures {
        let m = Molecule::new(l, cfg)?;
        let es = m.full_structure()?;
        let wc = m.omega_c(&es, None)?;
        record_omega(out, m.name(), wc);
        let xs = es.grid_r.points();
        for g in cfg.couplings() {
            let c = CavityParams::new(wc, g, cfg.cavity.n_max)?;
            let ps = coupled_pes_single(&es, &c)?;
            let header = ["R", "E_e", "E_g_plus_omega_c"]
                .into_iter()
                .map(String::from)
                .chain(ps.labels.iter().map(|s| format!("E_{s}")))
                .collect::<Vec<_>>()
                .join(",");
            let rows = (0..xs.len()).map(|i| {
                [xs[i], es.excited()[i], es.ground()[i] + wc].into_iter().chain(ps.surfaces.iter().map(|s| s[i])).collect()
            });
            out.csv(&format!("{prefix}pes1_{}_{}.csv", m.name(), g_tag(g)), &rows_csv(&header, rows))?;
        }
    }
    Ok(())
}

fn pair_structures(cfg: &RunConfig, fixtures: &[Loaded]) -> Result<(String, Vec<usize>), CliError> {
    match fixtures.len() {
        1 => Ok((fixtures[0].name.clone(), vec![0, 0])),
        2 => Ok((format!("{}+{}", fixtures[0].name, fixtures[1].name), vec![0, 1])),
        n => Err(CliError::Config(format!("two-molecule tasks take one or two fixtures, got {n} ({:?})", cfg.fixtures))),
    }
}

fn pes2_task(cfg: &RunConfig, fixtures: &[Loaded], out: &mut Output, prefix: &str) -> Result<(), CliError> {
    let (name, idx) = pair_structures(cfg, fixtures)?;
    let m1 = Molecule::new(&fixtures[idx[0]], cfg)?;
    let m2 = Molecule::new(&fixtures[idx[1]], cfg)?;
    let wc = m1.omega_c(&m1.full_structure()?, None)?;
    record_omega(out, &name, wc);
    let lattice = Grid1D::new(m1.grid_r.min(), m1.grid_r.max(), cfg.grids.lattice_points)?;
    let es1 = m1.structure(2, &lattice, false)?;
    let es2 = if idx[1] == idx[0] { es1.clone() } else { m2.structure(2, &lattice, false)? };
    let xs = lattice.points();
    let mut diabatic = Vec::new();
    for (i, &r1) in xs.iter().enumerate() {
        for (j, &r2) in xs.iter().enumerate() {
            let (g1, e1, g2, e2) = (es1.ground()[i], es1.excited()[i], es2.ground()[j], es2.excited()[j]);
            diabatic.push(vec![r1, r2, g1 + g2 + wc, e1 + g2, g1 + e2]);
        }
    }
    out.csv(&format!("{prefix}pes2_{name}_uncoupled.csv"), &rows_csv("R1,R2,E_gg1,E_eg0,E_ge0", diabatic))?;
    let mut fits = Vec::new();
    for g in cfg.couplings() {
        let c = CavityParams::new(wc, g, cfg.cavity.pair_n_max)?;
        let pes = coupled_pes_two(&es1, &es2, &c)?;
        out.csv(&format!("{prefix}pes2_{name}_{}.csv", g_tag(g)), &pes.to_csv())?;
        if cfg.pes2.fit && g > 0.0 && idx[0] == idx[1] {
            let pair = PairSurfaces::identical(m1.loaded.fixture.params, m1.grid_x, c);
            let f = correlation_fits(&pair, f64::INFINITY)?;
            fits.push(json!({
                "g": g,
                "ground": f.ground, "ground_shift": f.ground_shift,
                "lp": f.lp, "ds": f.ds, "up": f.up,
                "beta_over_alpha": {
                    "ground": f.ground.beta_over_alpha(), "lp": f.lp.beta_over_alpha(),
                    "ds": f.ds.beta_over_alpha(), "up": f.up.beta_over_alpha(),
                },
            }));
        }
    }
    if !fits.is_empty() {
        out.json(&format!("{prefix}pes2_{name}_fits.json"), &fits)?;
    }
    Ok(())
}

fn nonbo_task(cfg: &RunConfig, fixtures: &[Loaded], out: &mut Output, prefix: &str) -> Result<(), CliError> {
    for l in fixtures {
        let m = Molecule::new(l, cfg)?;
        let es = m.structure(2, &m.grid_r, false)?;
        let wc = m.omega_c(&m.full_structure()?, None)?;
        record_omega(out, m.name(), wc);
        let (_, omega_vib) = MolSampler::new(l.fixture.params, m.grid_x).ground_harmonic()?;
        let p_typ = typical_momentum(m.mass(), omega_vib);
        let mut reports = Vec::new();
        for g in cfg.couplings() {
            let c = CavityParams::new(wc, g, 1)?;
            let lin = linearized_model(&es, m.mass(), &c)?;
            // Five widths around the crossing, clipped to the nuclear grid of the fixture.
            let half = 5.0 * lin.fwhm();
            let fine = Grid1D::new((lin.r_c - half).max(m.grid_r.min()), (lin.r_c + half).min(m.grid_r.max()), 301)?;
            let esf = m.structure(2, &fine, true)?;
            let (minus, plus) = polariton_fields(&esf, &c)?;
            let num = nonbo_numeric(&minus, &plus, &fine, DerivativeScheme::Richardson)?;
            let model = nonbo_model(&lin, &fine)?;
            out.csv(&format!("{prefix}nonbo_{}_{}_numeric.csv", m.name(), g_tag(g)), &num.terms.to_csv())?;
            out.csv(&format!("{prefix}nonbo_{}_{}_model.csv", m.name(), g_tag(g)), &model.to_csv())?;
            reports.push(json!({
                "g": g,
                "model": lin,
                "validity": boa_validity(&lin, p_typ)?,
                "numeric_peak": num.terms.p_peak().1.abs(),
                "numeric_fwhm": num.terms.p_fwhm()?,
                "relative_l2": num.terms.p_relative_l2(&model)?,
            }));
        }
        out.json(&format!("{prefix}nonbo_{}.json", m.name()), &reports)?;
    }
    Ok(())
}

fn usc_task(cfg: &RunConfig, fixtures: &[Loaded], out: &mut Output, prefix: &str) -> Result<(), CliError> {
    for l in fixtures {
        let m = Molecule::new(l, cfg)?;
        let wc = m.omega_c(&m.full_structure()?, None)?;
        record_omega(out, m.name(), wc);
        let (r_e, _) = MolSampler::new(l.fixture.params, m.grid_x).ground_harmonic()?;
        let local = Grid1D::centered(r_e, 0.05, 13)?;
        let es = m.structure(2, &local, false)?;
        let mid = local.len() / 2;
        let mut rows = Vec::new();
        for g in cfg.couplings() {
            let c = CavityParams::new(wc, g, cfg.cavity.n_max)?;
            let ground = ground_state_pes_usc(&es, &c)?;
            let shift = usc_bond_shift(&l.fixture.params, &m.grid_x, &c, ShiftOptions::default())?;
            rows.push(vec![
                g,
                au_to_ev(ground.exact[mid] - ground.bare[mid]),
                shift.delta_milliangstrom,
                ground.photon_number[mid],
            ]);
        }
        out.csv(
            &format!("{prefix}usc_{}.csv", m.name()),
            &rows_csv("g,delta_e0_ev,delta_r0_milliangstrom,photon_number", rows),
        )?;
    }
    Ok(())
}

fn scaling_task(cfg: &RunConfig, fixtures: &[Loaded], out: &mut Output, prefix: &str) -> Result<(), CliError> {
    for l in fixtures {
        let m = Molecule::new(l, cfg)?;
        let wc = m.omega_c(&m.full_structure()?, None)?;
        record_omega(out, m.name(), wc);
        let g: Vec<f64> = cfg.couplings().into_iter().filter(|&g| g > 0.0).collect();
        let report = collective_scaling_report(&l.fixture.params, &m.grid_x, wc, &g, cfg.cavity.n_max)?;
        out.json(&format!("{prefix}scaling_{}.json", m.name()), &report)?;
        let rows = report.rows.iter().map(|r| {
            vec![r.n_mol as f64, r.g, au_to_ev(r.omega_r), au_to_ev(r.delta_e0), r.delta_r0_milliangstrom]
        });
        out.csv(
            &format!("{prefix}scaling_{}.csv", m.name()),
            &rows_csv("n_mol,g,omega_r_ev,delta_e0_ev,delta_r0_milliangstrom", rows),
        )?;
    }
    Ok(())
}

/// Two-molecule absorption, exact and in the two-dimensional BOA.
pub fn absorb_two(cfg: &RunConfig, fixtures: &[Loaded], out: &mut Output, prefix: &str) -> Result<(), CliError> {
    for l in fixtures {
        let m = Molecule::new(l, cfg)?;
        let es = m.full_structure()?;
        let wc = m.omega_c(&es, None)?;
        record_omega(out, m.name(), wc);
        let es2 = m.structure(2, &m.grid_r, false)?;
        let small = m.bare(&es, Some(cfg.basis.two_mol_states))?;
        let grid = m.omega_grid(&es)?;
        let mut summary = Vec::new();
        for g in cfg.couplings() {
            let c = CavityParams::new(wc, g, cfg.cavity.two_mol_n_max)?;
            let exact = m.spectrum(&solve_exact_two(&small, &c)?.transitions()?, &grid)?;
            let pes: CoupledPES2D = coupled_pes_two(&es2, &es2, &c)?;
            let boa = m.spectrum(&boa_two_transitions(&pes, es2.ground(), m.mass(), cfg.basis.product_levels)?, &grid)?;
            out.csv(
                &format!("{prefix}absorb2_{}_{}.csv", m.name(), g_tag(g)),
                &spectrum_csv(&grid, &[("exact", &exact), ("boa", &boa)]),
            )?;
            let split = if g > 0.0 { rabi_splitting(&exact).unwrap_or(f64::NAN) } else { 0.0 };
            summary.push(vec![g, split, spectral_overlap(&exact, &boa)?]);
        }
        out.csv(&format!("{prefix}absorb2_{}_summary.csv", m.name()), &rows_csv("g,rabi_splitting_ev,overlap", summary))?;
    }
    Ok(())
}

/// `|β/α|` of the three single-excitation surfaces and the ground surface versus `g`.
pub fn correlation_table(cfg: &RunConfig, fixtures: &[Loaded], out: &mut Output, prefix: &str) -> Result<(), CliError> {
    for l in fixtures {
        let m = Molecule::new(l, cfg)?;
        let wc = m.omega_c(&m.full_structure()?, None)?;
        record_omega(out, m.name(), wc);
        let mut rows = Vec::new();
        for g in cfg.couplings() {
            let c = CavityParams::new(wc, g, cfg.cavity.pair_n_max)?;
            let f = correlation_fits(&PairSurfaces::identical(l.fixture.params, m.grid_x, c), f64::INFINITY)?;
            rows.push(vec![
                g,
                f.lp.beta_over_alpha(),
                f.ds.beta_over_alpha(),
                f.up.beta_over_alpha(),
                f.ground.beta_over_alpha(),
                f.ground_shift.beta,
                f.lp.residual.max(f.ds.residual).max(f.up.residual),
            ]);
        }
        out.csv(
            &format!("{prefix}correlation_{}.csv", m.name()),
            &rows_csv("g,beta_over_alpha_LP,beta_over_alpha_DS,beta_over_alpha_UP,beta_over_alpha_G,ground_shift_beta,max_residual", rows),
        )?;
    }
    Ok(())
}
