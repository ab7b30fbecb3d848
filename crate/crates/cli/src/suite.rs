use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use idlaw_core::{ClosedForm, JumpAtom, LawSpec};

use crate::commands::{run_identity, CheckParams};
use crate::output::{emit, load_law};
use crate::{quad_config, CliResult, Failure, Format, Identity, SuiteArgs};

/// A law given inline or as a path relative to the config file.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SuiteLaw {
    File(PathBuf),
    Inline { name: String, law: LawSpec },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub identities: Vec<Identity>,
    #[serde(default)]
    pub laws: Vec<SuiteLaw>,
    #[serde(default = "default_betas")]
    pub betas: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Monte Carlo sample count per sampler.
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Conditioning times for the area identity.
    #[serde(default = "default_u")]
    pub u: Vec<f64>,
}

fn default_betas() -> Vec<f64> {
    vec![0.5, 1.0, 2.0, 3.0]
}

fn default_tol() -> f64 {
    1e-8
}

fn default_n() -> usize {
    200_000
}

fn default_seed() -> u64 {
    1
}

fn default_u() -> Vec<f64> {
    vec![1.0, 2.0]
}

fn builtin_laws() -> Vec<SuiteLaw> {
    let jumps = vec![JumpAtom { x: vec![2.0], p: 0.5 }, JumpAtom { x: vec![-2.0], p: 0.5 }];
    let gaussian = ClosedForm::Gaussian { mean: vec![0.0], cov: vec![vec![1.0]] };
    let cp = ClosedForm::CompoundPoisson { rate: 2.0, jumps: jumps.clone() };
    let mut mixture = cp.to_triplet().expect("valid compound Poisson");
    mixture.cov = vec![vec![1.0]];
    vec![
        SuiteLaw::Inline { name: "gaussian".into(), law: LawSpec::ClosedForm(gaussian) },
        SuiteLaw::Inline { name: "drift".into(), law: LawSpec::ClosedForm(ClosedForm::Drift { shift: vec![1.0] }) },
        SuiteLaw::Inline { name: "compound_poisson".into(), law: LawSpec::ClosedForm(cp) },
        SuiteLaw::Inline { name: "gaussian_plus_cp".into(), law: LawSpec::Triplet(mixture) },
    ]
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            identities: vec![
                Identity::Eq3,
                Identity::Eq15,
                Identity::Cor1a,
                Identity::Prop2,
                Identity::Cor5,
                Identity::Eq2Timechange,
                Identity::Area,
            ],
            laws: builtin_laws(),
            betas: default_betas(),
            tol: default_tol(),
            n: default_n(),
            seed: default_seed(),
            u: default_u(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SuiteEntry {
    pub identity: String,
    pub law: Option<String>,
    pub beta: Option<f64>,
    pub u: Option<f64>,
    /// Worst residual, or worst |z| for the Monte Carlo identity.
    pub metric: f64,
    pub threshold: f64,
    pub pass: bool,
    pub seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SuiteSummary {
    pub entries: Vec<SuiteEntry>,
    pub passed: usize,
    pub failed: usize,
    pub seconds: f64,
    pub pass: bool,
}

fn resolve(laws: &[SuiteLaw], base: &Path) -> CliResult<Vec<(String, LawSpec)>> {
    laws.iter()
        .map(|l| match l {
            SuiteLaw::Inline { name, law } => Ok((name.clone(), law.clone())),
            SuiteLaw::File(p) => {
                let path = if p.is_absolute() { p.clone() } else { base.join(p) };
                Ok((p.display().to_string(), load_law(&path)?))
            }
        })
        .collect()
}

fn load_config(path: &Path) -> CliResult<SuiteConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn table(s: &SuiteSummary) -> String {
    let mut out = format!("{:<15} {:<18} {:>5} {:>12} {:>10}  result\n", "identity", "law", "param", "metric", "threshold");
    for e in &s.entries {
        let param = e.beta.or(e.u).map_or(String::from("-"), |v| v.to_string());
        let verdict = match (&e.error, e.pass) {
            (Some(err), _) => format!("ERROR {err}"),
            (None, true) => "pass".into(),
            (None, false) => "FAIL".into(),
        };
        out.push_str(&format!(
            "{:<15} {:<18} {:>5} {:>12.3e} {:>10.1e}  {verdict}\n",
            e.identity,
            e.law.as_deref().unwrap_or("-"),
            param,
            e.metric,
            e.threshold
        ));
    }
    out.push_str(&format!("{} passed, {} failed in {:.1} s\n", s.passed, s.failed, s.seconds));
    out
}

pub fn run(a: SuiteArgs) -> CliResult<()> {
    let cfg = quad_config()?;
    let (mut config, base) = match &a.config {
        Some(p) => (load_config(p)?, p.parent().map(Path::to_path_buf).unwrap_or_default()),
        None => (SuiteConfig::default(), PathBuf::new()),
    };
    if let Some(t) = a.tol {
        config.tol = t;
    }
    if let Some(n) = a.n {
        config.n = n;
    }
    if let Some(s) = a.seed {
        config.seed = s;
    }
    if config.identities.is_empty() {
        return Err(Failure::Input("suite config lists no identities".into()));
    }
    if !(config.tol > 0.0) {
        return Err(Failure::Input(format!("tolerance {} must be > 0", config.tol)));
    }
    let laws = resolve(&config.laws, &base)?;
    let needs_laws = config.identities.iter().any(|i| *i != Identity::Area);
    if needs_laws && (laws.is_empty() || config.betas.is_empty()) {
        return Err(Failure::Input("suite config needs at least one law and one beta".into()));
    }

    let start = Instant::now();
    let mut entries = Vec::new();
    let mut record = |identity: Identity, law: Option<&(String, LawSpec)>, beta: Option<f64>, u: Option<f64>| {
        let t0 = Instant::now();
        let params = CheckParams {
            law: law.map(|l| &l.1),
            beta: beta.unwrap_or(1.0),
            tol: config.tol,
            grid: &[],
            n: config.n,
            seed: config.seed,
            u: u.unwrap_or(1.0),
            cfg: &cfg,
        };
        let (metric, threshold, pass, error) = match run_identity(identity, &params) {
            Ok(r) => (r.metric(), r.threshold(), r.pass(), None),
            Err(f) => (f64::NAN, config.tol, false, Some(f.message().to_string())),
        };
        entries.push(SuiteEntry {
            identity: identity.as_str().to_string(),
            law: law.map(|l| l.0.clone()),
            beta,
            u,
            metric,
            threshold,
            pass,
            seconds: t0.elapsed().as_secs_f64(),
            error,
        });
    };
    for &identity in &config.identities {
        if identity == Identity::Area {
            for &u in &config.u {
                record(identity, None, None, Some(u));
            }
            continue;
        }
        for law in &laws {
            for &b in &config.betas {
                record(identity, Some(law), Some(b), None);
            }
        }
    }
    let failed = entries.iter().filter(|e| !e.pass).count();
    let summary = SuiteSummary {
        passed: entries.len() - failed,
        failed,
        seconds: start.elapsed().as_secs_f64(),
        pass: failed == 0,
        entries,
    };
    eprint!("{}", table(&summary));
    emit(
        &a.output,
        Format::Json,
        || Ok(serde_json::to_string_pretty(&summary)?),
        || {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["identity", "law", "beta", "u", "metric", "threshold", "pass", "seconds", "error"])?;
            let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
            for e in &summary.entries {
                w.write_record([
                    e.identity.clone(),
                    e.law.clone().unwrap_or_default(),
                    opt(e.beta),
                    opt(e.u),
                    e.metric.to_string(),
                    e.threshold.to_string(),
                    e.pass.to_string(),
                    e.seconds.to_string(),
                    e.error.clone().unwrap_or_default(),
                ])?;
            }
            Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf-8"))
        },
    )?;
    if summary.pass {
        Ok(())
    } else {
        Err(Failure::Check(format!("{failed} suite checks failed")))
    }
}
