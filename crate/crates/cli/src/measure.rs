use thinning::measures::{decode, JointMeasure};
use thinning::profile::{build_joint, kink_profile, mixture_joint, PiecewiseProfile};
use thinning::check_thinning_invariance;

use crate::output::{num, Report};
use crate::{read_file, BuildArgs, CheckArgs, CliError, ProfileSource, ThinArgs};

pub(crate) enum Source {
    Single(PiecewiseProfile),
    Mixture(Vec<(f64, PiecewiseProfile)>),
}

impl Source {
    pub(crate) fn load(src: &ProfileSource) -> Result<Self, CliError> {
        if let Some(s) = src.kink {
            if !src.mix.is_empty() {
                return Err(CliError::Precondition("--mix needs --profile files".into()));
            }
            return Ok(Source::Single(kink_profile(s)?));
        }
        if src.profiles.is_empty() {
            return Err(CliError::Input("give --profile FILE or --kink S".into()));
        }
        let profiles = src
            .profiles
            .iter()
            .map(|p| {
                PiecewiseProfile::from_json(&read_file(p)?)
                    .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if profiles.len() == 1 && src.mix.is_empty() {
            return Ok(Source::Single(profiles.into_iter().next().unwrap()));
        }
        if src.mix.len() != profiles.len() {
            return Err(CliError::Precondition(format!(
                "--mix has {} weights for {} profiles",
                src.mix.len(),
                profiles.len()
            )));
        }
        Ok(Source::Mixture(src.mix.iter().copied().zip(profiles).collect()))
    }

    pub(crate) fn joint(&self, n: usize) -> Result<JointMeasure, CliError> {
        Ok(match self {
            Source::Single(p) => build_joint(p, n)?,
            Source::Mixture(c) => mixture_joint(c, n)?,
        })
    }

    pub(crate) fn single(&self) -> Result<&PiecewiseProfile, CliError> {
        match self {
            Source::Single(p) => Ok(p),
            Source::Mixture(_) => Err(CliError::Precondition("this command needs a single profile, not a mixture".into())),
        }
    }
}

pub(crate) fn config_label(mu_alphabet: &thinning::Alphabet, idx: usize, n: usize) -> String {
    decode(idx, mu_alphabet.len(), n)
        .into_iter()
        .map(|x| mu_alphabet.symbol(x))
        .collect::<Vec<_>>()
        .join(" ")
}

pub(crate) fn thin(a: &ThinArgs) -> Result<String, CliError> {
    let mu = JointMeasure::from_json(&read_file(&a.input)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", a.input.display())))?;
    Ok(mu.thin_to(a.k)?.to_json(a.sparse))
}

pub(crate) fn build(a: &BuildArgs) -> Result<String, CliError> {
    Ok(Source::load(&a.source)?.joint(a.n)?.to_json(a.sparse))
}

pub(crate) fn check(a: &CheckArgs, command_line: &str) -> Result<String, CliError> {
    if !(a.tol >= 0.0) {
        return Err(CliError::Precondition(format!("--tol must be nonnegative, got {}", a.tol)));
    }
    let family: Vec<JointMeasure> = if a.family.is_empty() {
        let src = Source::load(&a.source)?;
        if a.big_k == 0 {
            return Err(CliError::Precondition("--K must be at least 1".into()));
        }
        (1..=a.big_k).map(|n| src.joint(n)).collect::<Result<_, _>>()?
    } else {
        let mut fam = a
            .family
            .iter()
            .map(|p| JointMeasure::from_json(&read_file(p)?).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))))
            .collect::<Result<Vec<_>, _>>()?;
        fam.sort_by_key(|m| m.n());
        fam
    };
    let report = check_thinning_invariance(&family, a.tol)?;
    let mut out = Report::new(command_line);
    out.meta("tolerance", num(a.tol))
        .meta("max_tv_error", num(report.max_tv_error))
        .meta("result", if report.pass { "PASS" } else { "FAIL" });
    if let Some(w) = report.worst() {
        out.meta("worst", format!("n = {}, k = {}, tv = {}", w.n, w.k, num(w.tv)));
    }
    out.header(["n", "k", "tv"]);
    for e in &report.per_level_errors {
        out.row(vec![e.n.to_string(), e.k.to_string(), num(e.tv)]);
    }
    out.render()
}
