use thinning::sampling::{empirical_joint, first_moment_report, lln_check, second_moment_report, Interval};

use crate::measure::{config_label, Source};
use crate::output::{num, Report};
use crate::{CliError, SampleCommand, SeedArgs};

fn parse_intervals(s: &str) -> Result<Vec<Interval>, CliError> {
    s.split(',')
        .map(|part| {
            let (a, b) = part
                .split_once(':')
                .ok_or_else(|| CliError::Input(format!("--intervals: expected a:b, got {part:?}")))?;
            let a: f64 = a.trim().parse().map_err(|_| CliError::Input(format!("--intervals: bad number {a:?}")))?;
            let b: f64 = b.trim().parse().map_err(|_| CliError::Input(format!("--intervals: bad number {b:?}")))?;
            Ok(Interval::new(a, b)?)
        })
        .collect()
}

fn parse_functions(s: &str) -> Result<Vec<Vec<f64>>, CliError> {
    s.split(';')
        .map(|f| {
            f.split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| CliError::Input(format!("--functions: bad number {v:?}"))))
                .collect()
        })
        .collect()
}

fn seed_meta(out: &mut Report, s: &SeedArgs) -> Result<(), CliError> {
    if s.samples == 0 {
        return Err(CliError::Precondition("--samples must be positive".into()));
    }
    out.meta("seed", s.seed)
        .meta("samples", s.samples)
        .meta("rng", "ChaCha8, one stream per sample index");
    Ok(())
}

pub(crate) fn run(cmd: &SampleCommand, command_line: &str) -> Result<String, CliError> {
    let mut out = Report::new(command_line);
    match cmd {
        SampleCommand::Lln { source, seed, n, intervals, functions } => {
            seed_meta(&mut out, seed)?;
            let src = Source::load(source)?;
            let profile = src.single()?;
            let ivs = parse_intervals(intervals)?;
            let m = profile.alphabet().len();
            let fs = match functions {
                Some(f) => parse_functions(f)?,
                None => (0..ivs.len())
                    .map(|r| (0..m).map(|x| if x == r % m { 1.0 } else { 0.0 }).collect())
                    .collect(),
            };
            let r = lln_check(profile, &ivs, &fs, n, seed.samples, seed.seed)?;
            out.meta("gaps_shrink", r.gaps_shrink());
            out.header(["n", "estimate", "stderr", "closed_form", "gap"]);
            for row in &r.rows {
                out.row(vec![row.n.to_string(), num(row.estimate), num(row.stderr), num(row.closed_form), num(row.gap)]);
            }
        }
        SampleCommand::Moments { seed, n, second } => {
            seed_meta(&mut out, seed)?;
            if *second {
                out.meta("exact", "j(k+1)/((n+1)(n+2))")
                    .meta("uncorrected", "j(k+1)/(n(n+1)), fails already at n = 1");
                out.header(["n", "j", "k", "empirical", "stderr", "exact", "uncorrected", "z_score"]);
                for &nn in n {
                    for r in second_moment_report(nn, seed.samples, seed.seed)? {
                        out.row(vec![
                            r.n.to_string(),
                            r.j.to_string(),
                            r.k.to_string(),
                            num(r.empirical),
                            num(r.stderr),
                            num(r.exact),
                            num(r.uncorrected),
                            num(r.z_score),
                        ]);
                    }
                }
            } else {
                out.header(["n", "k", "empirical", "stderr", "exact", "z_score"]);
                for r in first_moment_report(n, seed.samples, seed.seed)? {
                    out.row(vec![
                        r.n.to_string(),
                        r.k.to_string(),
                        num(r.empirical),
                        num(r.stderr),
                        num(r.exact),
                        num(r.z_score),
                    ]);
                }
            }
        }
        SampleCommand::Joint { source, seed, n } => {
            seed_meta(&mut out, seed)?;
            let src = Source::load(source)?;
            let profile = src.single()?;
            let emp = empirical_joint(profile, *n, seed.samples, seed.seed)?;
            let exact = src.joint(*n)?;
            out.meta("tv", num(emp.tv_distance(&exact)?));
            out.header(["config", "empirical", "exact"]);
            for (i, (e, x)) in emp.weights().iter().zip(exact.weights()).enumerate() {
                out.row(vec![config_label(profile.alphabet(), i, *n), num(*e), num(*x)]);
            }
        }
    }
    out.render()
}
