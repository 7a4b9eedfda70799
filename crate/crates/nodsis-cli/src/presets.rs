//! Named experiment presets. Each preset pins the model constants of one
//! reference experiment; anything the preset leaves open (seeds, initial
//! conditions, output paths) keeps its default or comes from flags.

use crate::config::{GraphSource, ResolvedConfig};
use crate::CliError;

pub const FIG4_CONTACT: &str = include_str!("../graphs/fig4_contact.txt");
pub const FIG4_COOP: &str = include_str!("../graphs/fig4_coop.txt");
pub const FIG4_ANT: &str = include_str!("../graphs/fig4_ant.txt");

pub const PRESET_SUMMARY: &str = "\
fig1a      transmissibility sweep at low basal urgency (u0 = 0.2): plain \
SIS-like diagram with one transcritical event\n\
fig1b      transmissibility sweep at high basal urgency (u0 = 0.7): four \
branches, fold plus two transcritical events\n\
fig2       trajectory fan (12 seeded runs) at delta=0.3, kp=0.7, kx=0.3, \
u0=0.7; pick the regime with --beta (default 0.75)\n\
fig3       trajectory fan (12 seeded runs) under strong peer pressure \
(beta=0.75, u0=0.9, kp=0.7, kx=0.7): averse starts eradicate\n\
fig4-coop  5-node run with the cooperative communication ring (beta=0.5, \
delta=0.3, kp=0.5, kx=0.3, u0=0.7); initial opinions share the sign given \
by --x0-sign (default neg)\n\
fig4-ant   5-node run with the two-camp antagonistic communication ring; \
mixed seeded initial opinions split into camps\n\
Initial conditions, seeds, and graph topologies are this tool's documented \
choices; the scalar constants are pinned by the preset.";

pub fn apply_preset(name: &str, cfg: &mut ResolvedConfig) -> Result<(), CliError> {
    match name {
        "fig1a" | "fig1b" => {
            cfg.model.beta = 0.5;
            cfg.model.delta = 0.3;
            cfg.model.kp = 0.7;
            cfg.model.kx = 0.3;
            cfg.model.u0 = if name == "fig1a" { 0.2 } else { 0.7 };
            cfg.model.taux = 1.0;
            cfg.sweep.parameter = "beta".into();
            cfg.sweep.min = 0.01;
            cfg.sweep.max = 0.99;
            cfg.sweep.points = 400;
        }
        "fig2" => {
            cfg.model.beta = 0.75;
            cfg.model.delta = 0.3;
            cfg.model.kp = 0.7;
            cfg.model.kx = 0.3;
            cfg.model.u0 = 0.7;
            cfg.model.taux = 1.0;
            cfg.experiment.runs = 12;
        }
        "fig3" => {
            cfg.model.beta = 0.75;
            cfg.model.delta = 0.3;
            cfg.model.kp = 0.7;
            cfg.model.kx = 0.7;
            cfg.model.u0 = 0.9;
            cfg.model.taux = 1.0;
            cfg.experiment.runs = 12;
        }
        "fig4-coop" | "fig4-ant" => {
            cfg.model.beta = 0.5;
            cfg.model.delta = 0.3;
            cfg.model.kp = 0.5;
            cfg.model.kx = 0.3;
            cfg.model.u0 = 0.7;
            cfg.model.taux = 1.0;
            cfg.network.contact = Some(GraphSource::Embedded {
                name: "fig4_contact",
                text: FIG4_CONTACT,
            });
            if name == "fig4-coop" {
                cfg.network.communication = Some(GraphSource::Embedded {
                    name: "fig4_coop",
                    text: FIG4_COOP,
                });
                cfg.network.x0_sign = "neg".into();
            } else {
                cfg.network.communication = Some(GraphSource::Embedded {
                    name: "fig4_ant",
                    text: FIG4_ANT,
                });
                cfg.network.x0_sign = "mixed".into();
            }
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown preset {other:?} (available: fig1a, fig1b, fig2, fig3, fig4-coop, fig4-ant)"
            )))
        }
    }
    cfg.preset = Some(name.to_string());
    Ok(())
}
