use crate::config::{Couplings, OmegaC, OmegaMode, RunConfig, Task};
use crate::error::CliError;
use crate::output::Output;
use crate::tasks::{absorb_two, correlation_table, run_task, Loaded};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FigureTag {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
}

impl FigureTag {
    pub fn name(self) -> &'static str {
        match self {
            FigureTag::Fig2 => "fig2",
            FigureTag::Fig3 => "fig3",
            FigureTag::Fig4 => "fig4",
            FigureTag::Fig5 => "fig5",
            FigureTag::Fig6 => "fig6",
            FigureTag::Fig7 => "fig7",
            FigureTag::Fig8 => "fig8",
        }
    }

    /// Fixtures each figure is drawn for, by role.
    pub fn fixtures(self) -> &'static [Role] {
        match self {
            FigureTag::Fig2 | FigureTag::Fig4 | FigureTag::Fig6 => &[Role::Slow, Role::Fast],
            FigureTag::Fig3 | FigureTag::Fig5 | FigureTag::Fig8 => &[Role::Fast],
            FigureTag::Fig7 => &[Role::Slow],
        }
    }
}

/// The two model molecules: slow small-offset vibration and fast large-offset vibration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Slow,
    Fast,
}

impl Role {
    pub fn builtin(self) -> &'static str {
        match self {
            Role::Slow => "r6g_like",
            Role::Fast => "anthracene_like",
        }
    }
}

const SINGLE_G: [f64; 5] = [0.002, 0.004, 0.008, 0.012, 0.016];

fn with_g(cfg: &RunConfig, g: &[f64]) -> RunConfig {
    RunConfig { cavity: crate::config::CavityConfig { g: Couplings::Many(g.to_vec()), ..cfg.cavity.clone() }, ..cfg.clone() }
}

/// Write the data files of one figure. Panel files carry the figure tag as prefix.
pub fn reproduce(tag: FigureTag, cfg: &RunConfig, fixtures: &[Loaded], out: &mut Output) -> Result<(), CliError> {
    let p = format!("{}_", tag.name());
    match tag {
        FigureTag::Fig2 => run_task(Task::Bare, cfg, fixtures, out, &p),
        FigureTag::Fig3 => run_task(Task::Pes1, &with_g(cfg, &[0.001, 0.008]), fixtures, out, &p),
        FigureTag::Fig4 => run_task(Task::Absorb, &with_g(cfg, &SINGLE_G), fixtures, out, &p),
        FigureTag::Fig5 => {
            let mut c = with_g(cfg, &[0.0, 0.002, 0.013]);
            c.pes2.fit = false;
            run_task(Task::Pes2, &c, fixtures, out, &p)
        }
        FigureTag::Fig6 => {
            let scaled: Vec<f64> = SINGLE_G.iter().map(|g| g / 2f64.sqrt()).collect();
            absorb_two(&with_g(cfg, &scaled), fixtures, out, &p)
        }
        FigureTag::Fig7 => {
            let mut c = with_g(cfg, &[0.002, 0.004, 0.006, 0.008, 0.01]);
            c.cavity.omega_c = OmegaC::Mode(OmegaMode::Vertical);
            c.cavity.pair_n_max = 1;
            correlation_table(&c, fixtures, out, &p)
        }
        FigureTag::Fig8 => run_task(Task::Nonbo, &with_g(cfg, &[0.002]), fixtures, out, &p),
    }
}
