use std::fmt;
use std::fs;
use std::io::Write as _;

use charpoly_core::asymptotics::sinc;
use charpoly_core::{
    condensed, contour_coefficient, convergence_study, f_values, full_system, normalized_ratio,
    validate_fourth_moment, ContourPlan, MomentProfile, Precision, RatioKind, Real, ScaledWindow,
    WignerSampler,
};

use crate::config::RunConfig;
use crate::output::{format_f64, format_real, gnuplot_script, Table};
use crate::{McArgs, PointArgs, Route, StudyArgs};

#[derive(Debug)]
pub enum CliError {
    Core(charpoly_core::Error),
    Usage(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(msg) => write!(f, "cli: usage error: {msg}"),
            CliError::Io(msg) => write!(f, "cli: {msg}"),
        }
    }
}

impl From<charpoly_core::Error> for CliError {
    fn from(e: charpoly_core::Error) -> Self {
        CliError::Core(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn parse_b(text: &str, prec: Precision) -> Result<Real> {
    let b = prec.parse(text)?;
    validate_fourth_moment(&b)?;
    Ok(b)
}

fn no_gnuplot(config: &RunConfig, command: &str) -> Result<()> {
    if config.gnuplot_path.is_some() {
        return Err(CliError::Usage(format!(
            "--gnuplot applies to converge and ratio, not {command}"
        )));
    }
    Ok(())
}

fn check_gnuplot(config: &RunConfig) -> Result<()> {
    if config.gnuplot_path.is_some() && config.output_path.is_none() {
        return Err(CliError::Usage(
            "--gnuplot needs --out for the data file".into(),
        ));
    }
    Ok(())
}

fn emit(config: &RunConfig, table: &Table, plot: Option<(&[usize], bool)>) -> Result<()> {
    let csv = table.to_csv();
    match &config.output_path {
        Some(path) => fs::write(path, csv)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(csv.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("cannot write output: {e}")))?;
        }
    }
    if let (Some(script_path), Some(data), Some((ys, log_y))) =
        (&config.gnuplot_path, &config.output_path, plot)
    {
        fs::write(script_path, gnuplot_script(data, table, ys, log_y))
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", script_path.display())))?;
    }
    Ok(())
}

pub fn exact(config: &RunConfig, point: &PointArgs, route: Route) -> Result<()> {
    no_gnuplot(config, "exact")?;
    if point.nodes.is_some() && route != Route::Contour {
        return Err(CliError::Usage(
            "--nodes only applies to the contour route".into(),
        ));
    }
    let p = config.precision;
    let n = point.n;
    let mu = p.parse(&point.mu)?;
    let nu = p.parse(&point.nu)?;
    let b = parse_b(&point.b, p)?;
    let fact = p.real(Real::factorial(n as u32));

    let (f, c, imag) = match route {
        Route::Full => {
            let f = full_system(n, &mu, &nu, &b, p)?.f.swap_remove(n);
            let c = p.real(&f / &fact);
            (f, c, p.zero())
        }
        Route::Condensed => {
            let state = condensed(n, &mu, &nu, &b, p)?;
            (state.f(n, p), state.c[n].clone(), p.zero())
        }
        Route::Series => {
            let f = f_values(&mu, &nu, &b, n).swap_remove(n);
            let c = p.real(&f / &fact);
            (f, c, p.zero())
        }
        Route::Contour => {
            let mut plan = match point.nodes {
                Some(nodes) => ContourPlan::with_nodes(n, nodes, p)?,
                None => ContourPlan::new(n, p)?,
            };
            if let Some(bound) = config.tolerance("contour-imag") {
                plan = plan.with_imag_bound(bound);
            }
            let result = contour_coefficient(&mu, &nu, &b, &plan, p)?;
            let imag = p.real(result.relative_imag());
            (p.real(&result.value * &fact), result.value, imag)
        }
    };

    let mut table = Table::new(&["route", "precision", "N", "f", "c", "imag_residue"]);
    table.push(vec![
        route_name(route).into(),
        p.bits().to_string(),
        n.to_string(),
        format_real(&f, p),
        format_real(&c, p),
        format_real(&imag, p),
    ]);
    emit(config, &table, None)
}

fn route_name(route: Route) -> &'static str {
    match route {
        Route::Full => "full",
        Route::Condensed => "condensed",
        Route::Series => "series",
        Route::Contour => "contour",
    }
}

fn window(args: &StudyArgs, prec: Precision) -> Result<ScaledWindow> {
    let xi = prec.parse(&args.xi)?;
    let mu_off = prec.parse(&args.mu_off)?;
    let nu_off = prec.parse(&args.nu_off)?;
    Ok(ScaledWindow::new(xi, mu_off, nu_off)?)
}

pub fn converge(config: &RunConfig, args: &StudyArgs) -> Result<()> {
    check_gnuplot(config)?;
    let p = config.precision;
    let w = window(args, p)?;
    let b = parse_b(&args.b, p)?;
    let rows = convergence_study(&w, &b, &args.n_list, p)?;
    let mut table = Table::new(&["N", "prelimit", "limit", "abs_dev", "rel_dev"]);
    for row in &rows {
        table.push(vec![
            row.n.to_string(),
            format_real(&row.prelimit, p),
            format_real(&row.limit, p),
            format_real(&row.abs_dev, p),
            format_real(&row.rel_dev(), p),
        ]);
    }
    emit(config, &table, Some((&[3, 4], true)))
}

pub fn ratio(config: &RunConfig, args: &StudyArgs, centered: bool) -> Result<()> {
    check_gnuplot(config)?;
    let p = config.precision;
    let w = window(args, p)?;
    let b = parse_b(&args.b, p)?;
    let kind = if centered {
        RatioKind::Centered
    } else {
        RatioKind::Raw
    };
    let diff = p.real(w.mu_off() - w.nu_off());
    let limit = sinc(&(p.pi() * diff), p);
    let mut ns = args.n_list.clone();
    ns.sort_unstable();
    let mut table = Table::new(&["N", "ratio", "limit", "abs_dev"]);
    for n in ns {
        let r = normalized_ratio(&w, n, &b, kind, p)?;
        let dev = Real::with_val(r.prec(), &r - &limit).abs();
        table.push(vec![
            n.to_string(),
            format_real(&r, p),
            format_real(&limit, p),
            format_real(&dev, p),
        ]);
    }
    emit(config, &table, Some((&[1, 2], false)))
}

pub fn mc(config: &RunConfig, args: &McArgs) -> Result<()> {
    no_gnuplot(config, "mc")?;
    let p = config.precision;
    let mu = p.parse(&args.mu)?;
    let nu = p.parse(&args.nu)?;
    let profile = MomentProfile::from_label(&args.law)?;
    let b = profile.b(p);
    let mut sampler = WignerSampler::new(profile, config.seed, 0)?;
    if let Some(tol) = config.tolerance("mc-imag") {
        sampler = sampler.with_imag_tol(tol);
    }
    let exact = condensed(args.n, &mu, &nu, &b, p)?.f(args.n, p);
    let est =
        charpoly_core::mc_correlation(args.n, mu.to_f64(), nu.to_f64(), &sampler, args.samples)?;
    let z = est.z_score(&exact);
    let mut table = Table::new(&[
        "N",
        "mu",
        "nu",
        "n_samples",
        "mean",
        "std_error",
        "exact",
        "z",
    ]);
    table.push(vec![
        args.n.to_string(),
        format_real(&mu, p),
        format_real(&nu, p),
        est.n_samples.to_string(),
        format_real(&est.mean, Precision::P53),
        format_real(&est.std_error, Precision::P53),
        format_real(&exact, p),
        format_f64(z),
    ]);
    emit(config, &table, None)
}
