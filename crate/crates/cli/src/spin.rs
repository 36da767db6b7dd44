use thinning::measures::decode;
use thinning::spin_chain::{
    cw_ground_profile, cw_interaction, energy_identity_check, gibbs, ground_states_exhaustive, pressure_sequence,
    subadditivity_sweep, CwPhase, Interaction, MagnetizationSet,
};

use crate::measure::config_label;
use crate::output::{num, Report};
use crate::{check_finite, read_file, ChainArgs, CliError, SpinCommand};

fn interaction(chain: &ChainArgs, report: &mut Report) -> Result<Interaction, CliError> {
    match &chain.interaction {
        Some(p) => {
            report.meta("interaction", p.display());
            Interaction::from_json(&read_file(p)?).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
        }
        None => {
            check_finite("b", chain.b)?;
            report.meta("interaction", format!("curie-weiss, b = {}", chain.b));
            Ok(cw_interaction(chain.b))
        }
    }
}

fn check_beta(beta: f64) -> Result<(), CliError> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(CliError::Precondition(format!("--beta must be finite and >= 0, got {beta}")));
    }
    Ok(())
}

pub(crate) fn run(cmd: &SpinCommand, command_line: &str) -> Result<String, CliError> {
    let mut out = Report::new(command_line);
    match cmd {
        SpinCommand::Gibbs { chain, beta, big_n, k } => {
            check_beta(*beta)?;
            let phi = interaction(chain, &mut out)?;
            let g = gibbs(&phi, *big_n, *beta)?;
            let id = energy_identity_check(&phi, *big_n, *beta)?;
            out.meta("log_partition", num(g.log_partition))
                .meta("energy_per_site", num(id.lhs))
                .meta("thinned_interaction_mean", num(id.rhs))
                .meta("energy_identity_gap", num(id.gap));
            match k {
                None => {
                    out.header(["config", "energy", "probability"]);
                    for (i, (e, p)) in g.energies.iter().zip(g.measure.weights()).enumerate() {
                        out.row(vec![config_label(phi.alphabet(), i, *big_n), num(*e), num(*p)]);
                    }
                }
                Some(k) => {
                    let t = g.measure.thin_to(*k)?;
                    out.meta("thinned_to", k);
                    out.header(["config", "probability"]);
                    for (i, p) in t.weights().iter().enumerate() {
                        out.row(vec![config_label(phi.alphabet(), i, *k), num(*p)]);
                    }
                }
            }
        }
        SpinCommand::Pressure { chain, beta, n_max } => {
            check_beta(*beta)?;
            let phi = interaction(chain, &mut out)?;
            out.meta("beta", num(*beta));
            out.header(["N", "omega", "omega_over_N", "difference"]);
            for e in pressure_sequence(&phi, *beta, *n_max)? {
                out.row(vec![e.n_sites.to_string(), num(e.omega), num(e.omega_per_site), num(e.difference)]);
            }
        }
        SpinCommand::Subadd { chain, beta, n_max } => {
            check_beta(*beta)?;
            let phi = interaction(chain, &mut out)?;
            let r = subadditivity_sweep(&phi, *beta, *n_max)?;
            out.meta("beta", num(*beta))
                .meta("max_gap", num(r.max_gap()))
                .meta("min_lower_bound_margin", num(r.min_lower_margin()));
            out.header(["N1", "N2", "gap"]);
            for e in &r.entries {
                out.row(vec![e.n1.to_string(), e.n2.to_string(), num(e.gap)]);
            }
        }
        SpinCommand::Ground { chain, big_n } => {
            let phi = interaction(chain, &mut out)?;
            let r = ground_states_exhaustive(&phi, *big_n)?;
            out.meta("ground_energy", num(r.energy)).meta("degeneracy", r.degeneracy);
            out.header(["config", "energy"]);
            let m = phi.alphabet().len();
            for cfg in &r.minimizers {
                let idx = cfg.iter().fold(0usize, |acc, &x| acc * m + x);
                let e = thinning::spin_chain::hamiltonian(&phi, &decode(idx, m, *big_n))?;
                out.row(vec![config_label(phi.alphabet(), idx, *big_n), num(e)]);
            }
        }
        SpinCommand::Phase { b } => {
            check_finite("b", *b)?;
            let s = cw_ground_profile(*b)?;
            let phase = match s.phase {
                CwPhase::Uniform => "|b| < 1: two uniform ground states (all -1, all +1)",
                CwPhase::KinkContinuum => "|b| = 1: continuum of kink ground states, every magnetization optimal",
                CwPhase::MidpointKink => "|b| > 1: unique kink ground state at t = 1/2",
            };
            let mags = match &s.magnetizations {
                MagnetizationSet::Discrete(v) => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
                MagnetizationSet::Interval(a, b) => format!("[{a}, {b}]"),
            };
            out.meta("b", *b)
                .meta("phase", phase)
                .meta("optimal_magnetization", mags)
                .meta("optimal_energy", num(s.energy));
            if s.phase == CwPhase::KinkContinuum {
                out.meta("note", "profiles listed for magnetization -1, -1/2, 0, 1/2, 1");
            }
            out.header(["profile", "t_start", "t_end", "p(-1)", "p(+1)"]);
            for (i, p) in s.profiles.iter().enumerate() {
                for (r, nu) in p.measures().iter().enumerate() {
                    out.row(vec![
                        i.to_string(),
                        num(p.breakpoints()[r]),
                        num(p.breakpoints()[r + 1]),
                        num(nu[0]),
                        num(nu[1]),
                    ]);
                }
            }
        }
    }
    out.render()
}
