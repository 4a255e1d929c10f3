use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::Args;
use serde_json::json;

use signorini_core::classifier::{classify_all, coincidence_set, ClassifierConfig, PointSelection};
use signorini_core::functionals::{
    default_radii, geometric_radii, monneau, radial_profile, write_pairs, write_profile_csv, PhiColumns,
};
use signorini_core::geometry::io::{parse_field, write_field_annotated, write_slice_csv};
use signorini_core::geometry::ScalarField;
use signorini_core::poly::text::parse_poly_infer;
use signorini_core::poly::{HomPoly, Obstacle};
use signorini_core::solver::{complementarity_check, normalize, psor_solve, SignoriniProblem};
use signorini_core::verify::{self, Scale, CRITERIA};

use crate::{Common, VERSION};

#[derive(Args, Debug)]
pub struct ProfileArgs {
    /// Field dump to analyse.
    #[arg(long)]
    pub field: PathBuf,
    /// Centre on the thin plane, comma separated, last coordinate 0.
    #[arg(long)]
    pub x0: Option<String>,
    /// Homogeneities for the Weiss column, comma separated.
    #[arg(long, default_value = "2")]
    pub kappa: String,
    /// Truncation order; when positive the field is normalized at `x0` and
    /// the generalized frequency is written.
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    /// Values of C_M for the generalized frequency, comma separated.
    #[arg(long, default_value = "1")]
    pub cm: String,
    /// Obstacle as polynomial text in the plane variables, or `zero`.
    #[arg(long, default_value = "zero")]
    pub obstacle: String,
    /// Polynomial file with the Monneau candidate.
    #[arg(long)]
    pub monneau: Option<PathBuf>,
    /// Radius ladder `lo:hi:count` (geometric).
    #[arg(long)]
    pub radii: Option<String>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Field dump to classify.
    #[arg(long)]
    pub field: PathBuf,
    /// Obstacle as polynomial text in the plane variables, or `zero`.
    #[arg(long, default_value = "zero")]
    pub obstacle: String,
    /// Truncation order for normalization (at least 2 with an obstacle).
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    /// `auto`, `all`, `stride:N`, or points `x1,..,xn;...`.
    #[arg(long, default_value = "auto")]
    pub points: String,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Criteria to run, comma separated (default all).
    #[arg(long)]
    pub only: Option<String>,
    /// Also write `verify.json` to the output directory.
    #[arg(long)]
    pub json: bool,
}

fn create_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write_file(dir: &Path, name: &str, body: impl FnOnce(&mut BufWriter<fs::File>) -> Result<()>) -> Result<()> {
    let path = dir.join(name);
    let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    body(&mut w).with_context(|| format!("writing {}", path.display()))?;
    w.flush()?;
    Ok(())
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<()> {
    write_file(dir, name, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .with_context(|| format!("invalid {what} '{s}'"))
        })
        .collect()
}

fn read_field(path: &Path) -> Result<(ScalarField, Vec<String>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let field = parse_field(&text).with_context(|| format!("parsing {}", path.display()))?;
    let notes = text
        .lines()
        .take_while(|l| l.trim_start().starts_with('#') || l.trim().is_empty())
        .filter_map(|l| l.trim_start().strip_prefix('#'))
        .map(|l| l.trim().to_string())
        .collect();
    Ok((field, notes))
}

pub fn solve(common: &Common) -> Result<u8> {
    let path = common.config.as_ref().context("solve needs --config")?;
    let source = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut problem = SignoriniProblem::from_config_str(&source).with_context(|| format!("in {}", path.display()))?;
    if let Some(m) = common.m {
        problem.grid = signorini_core::geometry::Grid::new(problem.grid.n(), m)?;
        problem.validate()?;
    }
    let resolved = problem.to_config_string();

    let (u, stats) = psor_solve(&problem);
    let comp = complementarity_check(&u, &problem.obstacle);
    let contact = coincidence_set(&u, &problem.obstacle, ClassifierConfig::default().tol_lambda).len();

    let out = &common.out;
    create_out(out)?;
    let preamble = format!("tool = {VERSION}\n{resolved}");
    write_file(out, "u.field", |w| Ok(write_field_annotated(&u, &preamble, w)?))?;
    let plane = u.grid().center_index();
    let n = u.grid().n();
    write_file(out, "u_plane.csv", |w| {
        writeln!(w, "# tool = {VERSION}")?;
        for line in resolved.lines() {
            writeln!(w, "# {line}")?;
        }
        Ok(write_slice_csv(&u, n - 1, plane, w)?)
    })?;
    write_json(
        out,
        "stats.json",
        &json!({
            "version": "stats/1",
            "tool": VERSION,
            "config": resolved,
            "stats": stats,
            "energy_monotone": stats.energy_monotone(),
        }),
    )?;
    write_json(
        out,
        "complementarity.json",
        &json!({
            "version": "complementarity/1",
            "tool": VERSION,
            "config": resolved,
            "contact_nodes": contact,
            "contact_empty": contact == 0,
            "report": comp,
        }),
    )?;
    println!(
        "{} after {} sweeps (residual {:.3e}); complementarity {}; {} contact nodes",
        if stats.converged { "converged" } else { "NOT converged" },
        stats.iterations,
        stats.residual,
        if comp.pass { "pass" } else { "FAIL" },
        contact
    );
    Ok(if stats.converged { 0 } else { 2 })
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

pub fn profile(common: &Common, args: &ProfileArgs) -> Result<u8> {
    let (u, notes) = read_field(&args.field)?;
    let grid = *u.grid();
    let n = grid.n();
    let x0 = match &args.x0 {
        Some(s) => parse_list(s, "coordinate")?,
        None => vec![0.0; n],
    };
    ensure!(x0.len() == n, "x0 has {} coordinates, the field has dimension {n}", x0.len());
    ensure!(x0[n - 1] == 0.0, "x0 = {x0:?} is not on the thin plane");
    ensure!(grid.contains(&x0), "x0 = {x0:?} is outside the grid");
    let kappas = parse_list(&args.kappa, "kappa")?;
    let cms = parse_list(&args.cm, "C_M")?;
    let obstacle = Obstacle::parse(&args.obstacle, n - 1)?;

    let (v, center) = if args.k >= 1 {
        (normalize(&u, &obstacle, &x0, args.k)?, vec![0.0; n])
    } else {
        ensure!(obstacle.is_zero(), "a nonzero obstacle needs --k");
        (u, x0.clone())
    };
    let (radii, ladder) = match &args.radii {
        Some(spec) => {
            let parts: Vec<&str> = spec.split(':').collect();
            ensure!(parts.len() == 3, "radii must be lo:hi:count, got '{spec}'");
            let lo: f64 = parts[0].trim().parse().context("radii lo")?;
            let hi: f64 = parts[1].trim().parse().context("radii hi")?;
            let count: usize = parts[2].trim().parse().context("radii count")?;
            ensure!(lo > 0.0 && hi >= lo && count >= 1, "invalid radius ladder '{spec}'");
            (geometric_radii(lo, hi, count), spec.clone())
        }
        None => (default_radii(&v, &center), "default".to_string()),
    };
    ensure!(!radii.is_empty(), "no admissible radii about {x0:?}");
    let prof = radial_profile(&v, &center, &radii)?;

    let candidate = match &args.monneau {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let p = HomPoly::from_poly(parse_poly_infer(&text)?)?;
            Some((path.display().to_string(), p))
        }
        None => None,
    };
    let m_col = match &candidate {
        Some((_, p)) => Some(monneau(&v, &center, p, &prof.radii)?),
        None => None,
    };
    let phis: Vec<(f64, PhiColumns)> = if args.k >= 1 {
        cms.iter().map(|&c| Ok((c, prof.phi_k(args.k, c)?))).collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let mut preamble = format!(
        "tool = {VERSION}\ncommand = profile\nfield = {}\nx0 = {}\nkappa = {}\nk = {}\ncm = {}\nobstacle = {}\nradii = {ladder}\n",
        args.field.display(),
        x0.iter().map(|c| fmt_num(*c)).collect::<Vec<_>>().join(","),
        args.kappa,
        args.k,
        args.cm,
        obstacle.to_text(),
    );
    if let Some((path, _)) = &candidate {
        preamble.push_str(&format!("monneau = {path}\n"));
    }
    for note in &notes {
        preamble.push_str(&format!("field: {note}\n"));
    }

    let out = &common.out;
    create_out(out)?;
    for &kappa in &kappas {
        if phis.is_empty() {
            let name = format!("profile_kappa{}.csv", fmt_num(kappa));
            write_file(out, &name, |w| Ok(write_profile_csv(w, &preamble, &prof, kappa, m_col.as_deref(), None)?))?;
        }
        for (cm, cols) in &phis {
            let name = format!("profile_kappa{}_cm{}.csv", fmt_num(kappa), fmt_num(*cm));
            write_file(out, &name, |w| {
                Ok(write_profile_csv(w, &preamble, &prof, kappa, m_col.as_deref(), Some(cols))?)
            })?;
        }
        let w_col = prof.weiss(kappa).w;
        write_file(out, &format!("W_kappa{}.dat", fmt_num(kappa)), |w| {
            Ok(write_pairs(w, &preamble, "W", &prof.radii, &w_col)?)
        })?;
    }
    write_file(out, "N.dat", |w| Ok(write_pairs(w, &preamble, "N", &prof.radii, &prof.frequency())?))?;
    if let Some(m) = &m_col {
        write_file(out, "M.dat", |w| Ok(write_pairs(w, &preamble, "M", &prof.radii, m)?))?;
    }
    for (cm, cols) in &phis {
        write_file(out, &format!("Phi_cm{}.dat", fmt_num(*cm)), |w| {
            Ok(write_pairs(w, &preamble, "Phi", &prof.radii, &cols.phi)?)
        })?;
    }
    println!("{} radii about {x0:?} written to {}", prof.len(), out.display());
    Ok(0)
}

fn parse_selection(text: &str) -> Result<PointSelection> {
    let t = text.trim();
    Ok(match t {
        "auto" => PointSelection::Auto,
        "all" => PointSelection::All,
        _ if t.starts_with("stride:") => {
            let s: usize = t["stride:".len()..].trim().parse().context("stride")?;
            ensure!(s >= 1, "stride must be positive");
            PointSelection::Stride(s)
        }
        _ => PointSelection::Explicit(
            t.split(';')
                .filter(|p| !p.trim().is_empty())
                .map(|p| parse_list(p, "coordinate"))
                .collect::<Result<_>>()?,
        ),
    })
}

pub fn classify(common: &Common, args: &ClassifyArgs) -> Result<u8> {
    let cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ClassifierConfig::from_config_str(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => ClassifierConfig::default(),
    };
    let (u, notes) = read_field(&args.field)?;
    let n = u.grid().n();
    let obstacle = Obstacle::parse(&args.obstacle, n - 1)?;
    let selection = parse_selection(&args.points)?;
    let report = classify_all(&u, &obstacle, args.k, &cfg, &selection)?;

    let mut value = serde_json::to_value(&report)?;
    if let serde_json::Value::Object(map) = &mut value {
        map.insert("tool".into(), json!(VERSION));
        map.insert("field".into(), json!(args.field.display().to_string()));
        map.insert("field_notes".into(), json!(notes));
        map.insert("points_selection".into(), json!(args.points));
    }
    let out = &common.out;
    create_out(out)?;
    write_json(out, "fbreport.json", &value)?;
    let count = |c| report.count(c);
    use signorini_core::classifier::PointClass::*;
    println!(
        "{} free-boundary nodes; {} points: {} regular, {} singular, {} other, {} degenerate, {} unresolved",
        report.free_boundary_nodes,
        report.points.len(),
        count(Regular),
        count(Singular),
        count(Other),
        count(Degenerate),
        count(Unresolved)
    );
    Ok(0)
}

pub fn verify(common: &Common, args: &VerifyArgs) -> Result<u8> {
    let scale = if common.quick { Scale::Quick } else { Scale::Full };
    let ids: Vec<usize> = match &args.only {
        Some(s) => s
            .split(',')
            .map(|t| {
                let id: usize = t.trim().parse().with_context(|| format!("invalid criterion '{t}'"))?;
                if !(1..=CRITERIA.len()).contains(&id) {
                    bail!("criterion {id} does not exist (1..={})", CRITERIA.len());
                }
                Ok(id)
            })
            .collect::<Result<_>>()?,
        None => (1..=CRITERIA.len()).collect(),
    };
    let mut outcomes = Vec::new();
    for id in ids {
        let o = verify::run(id, scale);
        println!("{o}");
        outcomes.push(o);
    }
    let all = outcomes.iter().all(|o| o.pass);
    println!(
        "{}/{} criteria passed",
        outcomes.iter().filter(|o| o.pass).count(),
        outcomes.len()
    );
    if args.json {
        create_out(&common.out)?;
        write_json(
            &common.out,
            "verify.json",
            &json!({ "version": "verify/1", "tool": VERSION, "scale": scale, "outcomes": outcomes }),
        )?;
    }
    Ok(if all { 0 } else { 2 })
}
