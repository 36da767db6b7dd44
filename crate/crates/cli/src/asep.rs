use thinning::asep::{
    figure1_data, figure1_qs, finite_n_profile_comparison, residual_sweep, stationary_measure, unit_grid, AsepModel,
    ProfileSolution,
};

use crate::output::{num, Report};
use crate::{check_finite, AsepCommand, CliError};

fn parse_sweep(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Input(format!("--q-sweep: expected start:stop:step, got {s:?}")))?;
    let [start, stop, step] = parts[..] else {
        return Err(CliError::Input(format!("--q-sweep: expected start:stop:step, got {s:?}")));
    };
    if !(step > 0.0) || stop < start {
        return Err(CliError::Precondition(format!("--q-sweep: need step > 0 and stop >= start, got {s:?}")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

pub(crate) fn run(cmd: &AsepCommand, command_line: &str) -> Result<String, CliError> {
    let mut out = Report::new(command_line);
    match cmd {
        AsepCommand::Stationary { q, big_n, n } => {
            let model = AsepModel::new(*big_n, *q)?;
            let sm = stationary_measure(&model, *n)?;
            out.meta("q", num(*q)).meta("residual", num(sm.residual));
            out.header(["config", "weight"]);
            for (eta, w) in sm.configs.iter().zip(&sm.weights) {
                let label = eta.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" ");
                out.row(vec![label, num(*w)]);
            }
        }
        AsepCommand::Profile { q, rho, step } => {
            check_finite("q", *q)?;
            let sol = ProfileSolution::new(*q, *rho)?;
            out.meta("q", num(*q)).meta("rho", num(*rho));
            if sol.is_symmetric() {
                out.meta("assumption", "q = 1/2 is the symmetric point; the profile is flat, phi = rho");
            }
            out.header(["t", "u", "phi"]);
            for t in unit_grid(*step)? {
                out.row(vec![num(t), num(sol.u(t)?), num(sol.phi(t)?)]);
            }
        }
        AsepCommand::Compare { q, rho, big_n, summary } => {
            let rows = finite_n_profile_comparison(*q, *rho, big_n)?;
            out.meta("q", num(*q)).meta("rho", num(*rho)).meta("evaluation", "phi at cell midpoints (x - 1/2)/N");
            if *summary {
                out.header(["N", "particles", "l1_error"]);
                for r in &rows {
                    out.row(vec![r.n_sites.to_string(), r.particles.to_string(), num(r.l1_error)]);
                }
            } else {
                out.header(["N", "x", "empirical", "closed_form", "abs_err", "l1_error"]);
                for r in &rows {
                    for (x, (e, c)) in r.empirical.iter().zip(&r.closed_form).enumerate() {
                        out.row(vec![
                            r.n_sites.to_string(),
                            (x + 1).to_string(),
                            num(*e),
                            num(*c),
                            num((e - c).abs()),
                            num(r.l1_error),
                        ]);
                    }
                }
            }
        }
        AsepCommand::Figure1 { rho, step, q_sweep } => {
            let mut data = figure1_data(*rho, *step)?;
            if let Some(s) = q_sweep {
                let qs = parse_sweep(s)?;
                data.phi = qs
                    .iter()
                    .map(|&q| {
                        let sol = ProfileSolution::new(q, *rho)?;
                        data.ts.iter().map(|&t| sol.phi(t)).collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<_, thinning::Error>>()?;
                data.qs = qs;
            }
            out.meta("rho", num(*rho)).meta("step", num(*step));
            if data.qs == figure1_qs() && *rho == 0.5 {
                out.meta("assumption", "density rho = 0.5 (not stated for the original figure)");
            }
            let mut header = vec!["t".to_string()];
            header.extend(data.qs.iter().map(|q| format!("phi_q{q:.3}")));
            out.header(header);
            for (i, t) in data.ts.iter().enumerate() {
                let mut row = vec![num(*t)];
                row.extend(data.phi.iter().map(|col| num(col[i])));
                out.row(row);
            }
        }
        AsepCommand::Residual { q, rho, step, order } => {
            let ts: Vec<f64> = unit_grid(*step)?.into_iter().filter(|&t| t > 0.0 && t < 1.0).collect();
            let rows = residual_sweep(q, rho, &ts, *order)?;
            let worst = rows.iter().map(|r| r.residual.abs()).fold(0.0, f64::max);
            out.meta("quadrature_order", order).meta("max_abs_residual", num(worst));
            out.header(["q", "rho", "t", "residual"]);
            for r in rows {
                out.row(vec![num(r.q), num(r.rho), num(r.t), num(r.residual)]);
            }
        }
    }
    out.render()
}
