use serde::Serialize;

use idlaw_core::factor::{
    clock_identity_check, default_grid, default_radius_grid, default_t_grid, identity_e_check,
    levy_area_demo, spectral_factor_check, ubeta_f_membership, verify_factorization,
    AreaDemoReport, FactorizationReport,
};
use idlaw_core::maps::jbeta_triplet;
use idlaw_core::simulate::{
    default_mc_grid, empirical_cf, mc_vs_quadrature, sample_map, time_change_equivalence,
    with_workers,
};
use idlaw_core::{IntegralMap, LawSpec, McReport, QuadConfig, SimSpec};

use crate::output::{emit, format_of, load_law, points, write_text};
use crate::{
    quad_config, AreaArgs, CliResult, EvalArgs, Failure, Format, Identity, MapName, SimReport,
    SimulateArgs, TransformArgs, VerifyArgs,
};

/// z-score threshold of the two-sample check.
pub const Z_MAX: f64 = 4.0;

#[derive(Debug, Serialize)]
struct EvalPoint {
    y: Vec<f64>,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize)]
struct EvalReport {
    map: Option<String>,
    beta: Option<f64>,
    points: Vec<EvalPoint>,
}

fn parse_map(name: MapName, beta: f64) -> CliResult<IntegralMap> {
    Ok(IntegralMap::parse(name.as_str(), beta)?)
}

pub fn eval(a: EvalArgs) -> CliResult<()> {
    let cfg = quad_config()?;
    let law = load_law(&a.law)?;
    let mut phi = law.exponent()?;
    let map = a.map.map(|m| parse_map(m, a.beta)).transpose()?;
    if let Some(m) = map {
        phi = phi.mapped(m)?;
    }
    let ys = points(&a.y, phi.dim())?;
    let mut pts = Vec::with_capacity(ys.len());
    for y in ys {
        let v = phi.eval_with(&y, &cfg)?;
        pts.push(EvalPoint { y, re: v.re, im: v.im });
    }
    let report = EvalReport {
        map: map.map(|m| m.name().to_string()),
        beta: map.and_then(|m| m.beta()),
        points: pts,
    };
    if a.output.format.is_none() && a.output.out.is_none() {
        let text: String = report.points.iter().map(|p| format!("{}\t{}\n", p.re, p.im)).collect();
        return write_text(&a.output, &text);
    }
    emit(
        &a.output,
        Format::Json,
        || Ok(serde_json::to_string_pretty(&report)?),
        || {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["y", "re", "im"])?;
            for p in &report.points {
                let y = p.y.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";");
                w.write_record([y, p.re.to_string(), p.im.to_string()])?;
            }
            Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf-8"))
        },
    )
}

pub fn transform(a: TransformArgs) -> CliResult<()> {
    if a.map != MapName::Jbeta {
        return Err(Failure::Input(format!(
            "map '{}' has no triplet transform; use `eval --map {}` for its exponent",
            a.map.as_str(),
            a.map.as_str()
        )));
    }
    if format_of(&a.output, Format::Json) == Format::Csv {
        return Err(Failure::Input("transform writes a JSON law file".into()));
    }
    let law = load_law(&a.law)?;
    let image = jbeta_triplet(&law.triplet()?, a.beta)?;
    emit(
        &a.output,
        Format::Json,
        || Ok(serde_json::to_string_pretty(&LawSpec::Triplet(image))?),
        || unreachable!(),
    )
}

/// Result of one identity check in any of its three report shapes.
#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum CheckReport {
    Factorization(FactorizationReport),
    MonteCarlo(McReport),
    Area(AreaDemoReport),
}

impl CheckReport {
    pub fn pass(&self) -> bool {
        match self {
            CheckReport::Factorization(r) => r.pass,
            CheckReport::MonteCarlo(r) => r.pass,
            CheckReport::Area(r) => r.pass,
        }
    }

    /// Worst residual, or worst |z| for Monte Carlo checks.
    pub fn metric(&self) -> f64 {
        match self {
            CheckReport::Factorization(r) => r.max_residual,
            CheckReport::MonteCarlo(r) => r.max_abs_z,
            CheckReport::Area(r) => r.i_part.max_residual.max(r.product.max_residual),
        }
    }

    pub fn threshold(&self) -> f64 {
        match self {
            CheckReport::Factorization(r) => r.tolerance,
            CheckReport::MonteCarlo(r) => r.z_max,
            CheckReport::Area(r) => r.i_part.tolerance,
        }
    }

    pub fn to_json(&self) -> idlaw_core::Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_csv(&self) -> idlaw_core::Result<String> {
        match self {
            CheckReport::Factorization(r) => r.to_csv(),
            CheckReport::MonteCarlo(r) => {
                let mut buf = Vec::new();
                r.write_csv(&mut buf)?;
                Ok(String::from_utf8(buf).expect("utf-8"))
            }
            CheckReport::Area(r) => area_csv(r),
        }
    }
}

fn area_csv(r: &AreaDemoReport) -> idlaw_core::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "i_part", "log_ratio", "residual", "chi", "chi_cosh"])?;
    for (p, c) in r.i_part.points.iter().zip(&r.cosh_variant.points) {
        w.write_record([
            p.input[0].to_string(),
            p.lhs_re.to_string(),
            p.rhs_re.to_string(),
            p.residual.to_string(),
            c[1].to_string(),
            c[2].to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf-8"))
}

/// Parameters shared by `verify` and the suite runner.
pub struct CheckParams<'a> {
    pub law: Option<&'a LawSpec>,
    pub beta: f64,
    pub tol: f64,
    pub grid: &'a [f64],
    pub n: usize,
    pub seed: u64,
    pub u: f64,
    pub cfg: &'a QuadConfig,
}

pub fn run_identity(identity: Identity, p: &CheckParams) -> CliResult<CheckReport> {
    if identity == Identity::Area {
        let t = if p.grid.is_empty() { default_t_grid() } else { p.grid.to_vec() };
        return Ok(CheckReport::Area(levy_area_demo(p.u, &t, p.tol, p.cfg)?));
    }
    let law = p
        .law
        .ok_or_else(|| Failure::Input(format!("identity {} needs --law", identity.as_str())))?;
    let dim = law.dim();
    let ys = || -> CliResult<Vec<Vec<f64>>> {
        if p.grid.is_empty() {
            Ok(default_grid(dim))
        } else {
            points(p.grid, dim)
        }
    };
    let r = match identity {
        Identity::Eq3 => verify_factorization(&law.exponent()?, p.beta, &ys()?, p.tol, p.cfg)?,
        Identity::Eq15 => identity_e_check(&law.exponent()?, p.beta, &ys()?, p.tol, p.cfg)?,
        Identity::Cor1a => ubeta_f_membership(&law.exponent()?, p.beta, &ys()?, p.tol, p.cfg)?,
        Identity::Prop2 => clock_identity_check(&law.exponent()?, p.beta, &ys()?, p.tol, p.cfg)?,
        Identity::Cor5 => {
            let g = law.triplet()?.levy;
            let radii = if p.grid.is_empty() { default_radius_grid(&g) } else { p.grid.to_vec() };
            spectral_factor_check(&g, p.beta, &radii, p.tol)?
        }
        Identity::Eq2Timechange => {
            let spec = SimSpec::from_law(law)?;
            return Ok(CheckReport::MonteCarlo(time_change_equivalence(&spec, p.beta, p.n, p.seed, Z_MAX)?));
        }
        Identity::Area => unreachable!(),
    };
    Ok(CheckReport::Factorization(r))
}

pub fn verify(a: VerifyArgs) -> CliResult<()> {
    let cfg = quad_config()?;
    let law = a.law.as_deref().map(load_law).transpose()?;
    let params = CheckParams {
        law: law.as_ref(),
        beta: a.beta,
        tol: a.tol,
        grid: &a.y,
        n: a.n,
        seed: a.seed,
        u: a.u,
        cfg: &cfg,
    };
    let report = run_identity(a.identity, &params)?;
    emit(&a.output, Format::Json, || report.to_json(), || report.to_csv())?;
    if report.pass() {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "{} failed: {:e} exceeds {:e}",
            a.identity.as_str(),
            report.metric(),
            report.threshold()
        )))
    }
}

pub fn simulate(a: SimulateArgs) -> CliResult<()> {
    let cfg = quad_config()?;
    let law = load_law(&a.law)?;
    let spec = SimSpec::from_law(&law)?;
    let map = parse_map(a.map, a.beta)?;
    let grid = if a.y.is_empty() { default_mc_grid(spec.dim) } else { points(&a.y, spec.dim)? };
    let job = || -> CliResult<Option<McReport>> {
        match a.report {
            SimReport::Samples => {
                if format_of(&a.output, Format::Csv) == Format::Json {
                    return Err(Failure::Input("samples are written as CSV".into()));
                }
                let s = sample_map(&spec, map, a.s_max, a.n, a.seed)?;
                emit(&a.output, Format::Csv, || unreachable!(), || s.to_csv())?;
                Ok(None)
            }
            SimReport::Ecf => {
                let s = sample_map(&spec, map, a.s_max, a.n, a.seed)?;
                let e = empirical_cf(&s, &grid)?;
                emit(&a.output, Format::Json, || e.to_json(), || {
                    let mut buf = Vec::new();
                    e.write_csv(&mut buf)?;
                    Ok(String::from_utf8(buf).expect("utf-8"))
                })?;
                Ok(None)
            }
            SimReport::Compare => {
                let r = mc_vs_quadrature(&spec, map, &grid, a.n, a.seed, a.z_max, a.s_max, &cfg)?;
                emit(&a.output, Format::Json, || r.to_json(), || {
                    let mut buf = Vec::new();
                    r.write_csv(&mut buf)?;
                    Ok(String::from_utf8(buf).expect("utf-8"))
                })?;
                Ok(Some(r))
            }
        }
    };
    let result = match a.workers {
        Some(w) => with_workers(w, job)?,
        None => job(),
    }?;
    match result {
        Some(r) if !r.pass => Err(Failure::Check(format!(
            "Monte Carlo check failed: max |z| = {:.3} > {}",
            r.max_abs_z, r.z_max
        ))),
        _ => Ok(()),
    }
}

pub fn area_demo(a: AreaArgs) -> CliResult<()> {
    let cfg = quad_config()?;
    let t = if a.y.is_empty() { default_t_grid() } else { a.y.clone() };
    let r = levy_area_demo(a.u, &t, a.tol, &cfg)?;
    let report = CheckReport::Area(r);
    emit(&a.output, Format::Json, || report.to_json(), || report.to_csv())?;
    if report.pass() {
        Ok(())
    } else {
        Err(Failure::Check(format!("area demo failed: residual {:e}", report.metric())))
    }
}
