//! Experiment command-line front end: convergence study, decay runs for both
//! schemes, functional-inequality checks, closed-form validation, and mesh
//! utilities.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use entrofv::cases::TestCase;
use entrofv::ddfv::Combiner;
use entrofv::diagnostics::{self, write_series_csv};
use entrofv::experiments::{self, RunOutput};
use entrofv::geom::Point;
use entrofv::kernels::MeanKind;
use entrofv::mesh::PrimalMesh;
use entrofv::{Error, Result};

#[derive(Parser)]
#[command(
    name = "entrofv",
    about = "Nonlinear TPFA/DDFV finite-volume experiments for drift-diffusion equations",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// L² space-convergence table for the TPFA scheme (tpfa_mixed case).
    Convergence(RunArgs),
    /// Long-time TPFA decay run with Newton statistics.
    DecayTpfa(RunArgs),
    /// Long-time DDFV entropy-decay run (isotropic, anisotropic or
    /// degenerate depending on --eps/--lambda11).
    DecayDdfv(RunArgs),
    /// Calibrate and validate the discrete functional inequalities on
    /// random draws.
    CheckInequalities(RunArgs),
    /// Check the closed-form solutions against the PDE and their boundary
    /// conditions with a finite-difference oracle.
    ValidateCase(RunArgs),
    /// Mesh utilities.
    Mesh {
        #[command(subcommand)]
        action: MeshCmd,
    },
}

#[derive(Subcommand)]
enum MeshCmd {
    /// Print a regularity report for a mesh spec or file.
    Info { spec: String },
    /// Generate a mesh from a spec and write it to a file.
    Generate {
        spec: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-export a mesh (spec or file) in the canonical text format.
    Export {
        spec: String,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Flags shared by all experiment subcommands. Every flag can also be given
/// in a `key=value` config file; explicit flags win over the file.
#[derive(Args, Clone, Default)]
struct RunArgs {
    /// Config file with key=value lines mirroring these flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Mesh spec: `cartesian:N`, `cartesian:NXxNY`, `triangular:LEVEL`,
    /// `distorted:N:AMPLITUDE`, or a mesh file path.
    #[arg(long)]
    mesh: Option<String>,
    /// Mean function: arithmetic|logarithmic|sqrtsquare|max|all.
    #[arg(long)]
    mean: Option<String>,
    /// DDFV combiner of the primal/dual means: arithmetic|max.
    #[arg(long)]
    combiner: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    tfinal: Option<f64>,
    /// Perturbation amplitude of the ddfv_eps case.
    #[arg(long)]
    eps: Option<f64>,
    /// Anisotropy ratio Λ₁₁ of the ddfv_eps case.
    #[arg(long)]
    lambda11: Option<f64>,
    /// Test case id: tpfa_mixed|ddfv_eps.
    #[arg(long)]
    case: Option<String>,
    /// Comma-separated entropy exponents, e.g. `1,2`.
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Finest refinement level of the convergence study.
    #[arg(long)]
    levels: Option<usize>,
}

/// Fully resolved configuration (flags over config file over defaults).
struct Resolved {
    values: BTreeMap<String, String>,
}

impl Resolved {
    fn build(args: &RunArgs, defaults: &[(&str, &str)]) -> Result<Self> {
        let mut values: BTreeMap<String, String> = defaults
            .iter()
            .map(|&(k, v)| (k.to_string(), v.to_string()))
            .collect();
        if let Some(path) = &args.config {
            for (lineno, line) in fs::read_to_string(path)?.lines().enumerate() {
                let line = line.split('#').next().unwrap().trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| Error::MeshParse {
                    line: lineno + 1,
                    msg: format!("config line '{line}' is not key=value"),
                })?;
                let k = k.trim();
                if !values.contains_key(k) {
                    return Err(Error::InvalidArgument(format!(
                        "unknown config key '{k}' for this subcommand"
                    )));
                }
                values.insert(k.to_string(), v.trim().to_string());
            }
        }
        let overrides = [
            ("mesh", args.mesh.clone()),
            ("mean", args.mean.clone()),
            ("combiner", args.combiner.clone()),
            ("dt", args.dt.map(|v| v.to_string())),
            ("tfinal", args.tfinal.map(|v| v.to_string())),
            ("eps", args.eps.map(|v| v.to_string())),
            ("lambda11", args.lambda11.map(|v| v.to_string())),
            ("case", args.case.clone()),
            ("p", args.p.clone()),
            ("seed", args.seed.map(|v| v.to_string())),
            (
                "out",
                args.out.as_ref().map(|v| v.display().to_string()),
            ),
            ("levels", args.levels.map(|v| v.to_string())),
        ];
        for (k, v) in overrides {
            if let Some(v) = v {
                if !values.contains_key(k) {
                    return Err(Error::InvalidArgument(format!(
                        "flag --{k} does not apply to this subcommand"
                    )));
                }
                values.insert(k.to_string(), v);
            }
        }
        Ok(Self { values })
    }

    fn get(&self, key: &str) -> &str {
        &self.values[key]
    }

    fn f64(&self, key: &str) -> Result<f64> {
        self.get(key)
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("{key} = '{}' is not a number", self.get(key))))
    }

    fn usize(&self, key: &str) -> Result<usize> {
        self.get(key)
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("{key} = '{}' is not an integer", self.get(key))))
    }

    fn p_list(&self) -> Result<Vec<f64>> {
        self.get("p")
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad entropy exponent '{s}'")))
            })
            .collect()
    }

    fn out_dir(&self) -> Result<PathBuf> {
        let dir = PathBuf::from(self.get("out"));
        fs::create_dir_all(&dir)?;
        Ok(dir)
    }

    /// `key=value` echo of the fully resolved configuration.
    fn echo(&self) -> String {
        self.values
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }
}

fn parse_mesh_spec(spec: &str) -> Result<PrimalMesh> {
    if let Some(rest) = spec.strip_prefix("cartesian:") {
        let (nx, ny) = match rest.split_once('x') {
            Some((a, b)) => (a.parse(), b.parse()),
            None => (rest.parse(), rest.parse()),
        };
        let (nx, ny) = (
            nx.map_err(|_| Error::InvalidArgument(format!("bad cartesian spec '{spec}'")))?,
            ny.map_err(|_| Error::InvalidArgument(format!("bad cartesian spec '{spec}'")))?,
        );
        return PrimalMesh::generate_cartesian(nx, ny, [0.0, 1.0, 0.0, 1.0]);
    }
    if let Some(rest) = spec.strip_prefix("triangular:") {
        let level = rest
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad triangular spec '{spec}'")))?;
        return PrimalMesh::generate_triangular(level);
    }
    if let Some(rest) = spec.strip_prefix("distorted:") {
        let (n, amp) = rest
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("bad distorted spec '{spec}'")))?;
        let n = n
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad distorted spec '{spec}'")))?;
        let amp = amp
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad distorted spec '{spec}'")))?;
        return PrimalMesh::generate_distorted_quad(n, amp);
    }
    PrimalMesh::import(spec)
}

fn mean_list(spec: &str) -> Result<Vec<MeanKind>> {
    if spec == "all" {
        Ok(MeanKind::ALL.to_vec())
    } else {
        spec.split(',').map(|s| MeanKind::parse(s.trim())).collect()
    }
}

fn regularity_text(mesh: &PrimalMesh) -> String {
    let r = mesh.regularity_report();
    format!(
        "cells={} interior_edges={} dirichlet_edges={} neumann_edges={}\n\
         size={:.6} zeta={:.6} orthogonal={} area={:.12}\n",
        r.n_cells,
        r.n_interior_edges,
        r.n_dirichlet_edges,
        r.n_neumann_edges,
        r.size,
        r.zeta,
        r.orthogonal,
        r.area
    )
}

fn write_summary(dir: &Path, resolved: &Resolved, body: &str) -> Result<()> {
    let mut f = fs::File::create(dir.join("summary.txt"))?;
    write!(f, "# configuration\n{}\n{body}", resolved.echo())?;
    Ok(())
}

fn write_series(dir: &Path, name: &str, p_list: &[f64], out: &RunOutput) -> Result<()> {
    let mut f = fs::File::create(dir.join(name))?;
    write_series_csv(&mut f, p_list, &out.records)
}

fn cmd_convergence(args: &RunArgs) -> Result<()> {
    let resolved = Resolved::build(
        args,
        &[
            ("mean", "all"),
            ("levels", "3"),
            ("dt", "1e-2"),
            ("out", "out/convergence"),
        ],
    )?;
    let means = mean_list(resolved.get("mean"))?;
    let levels = resolved.usize("levels")?;
    let dt0 = resolved.f64("dt")?;
    let rows = experiments::convergence_table(&means, levels, dt0)?;

    let dir = resolved.out_dir()?;
    let mut csv = fs::File::create(dir.join("table.csv"))?;
    writeln!(csv, "mean,level,h,dt,error_l2,order")?;
    let mut body = String::from("# L2 errors at T = 0.1\n");
    for r in &rows {
        let order = r.order.map_or(String::from(""), |o| format!("{o:.4}"));
        writeln!(
            csv,
            "{},{},{},{},{:e},{}",
            r.mean.name(),
            r.level,
            r.h,
            r.dt,
            r.error_l2,
            order
        )?;
        body.push_str(&format!(
            "mean={:<12} level={} h={:.5} dt={:.2e} error={:.4e} order={}\n",
            r.mean.name(),
            r.level,
            r.h,
            r.dt,
            r.error_l2,
            if order.is_empty() { "-" } else { &order }
        ));
    }
    body.push_str("\n# coarsest mesh\n");
    body.push_str(&regularity_text(&PrimalMesh::generate_triangular(0)?));
    write_summary(&dir, &resolved, &body)?;
    println!("{body}");
    Ok(())
}

fn cmd_decay_tpfa(args: &RunArgs) -> Result<()> {
    let resolved = Resolved::build(
        args,
        &[
            ("mesh", "triangular:0"),
            ("mean", "all"),
            ("dt", "1e-4"),
            ("tfinal", "2.0"),
            ("p", "1,2"),
            ("out", "out/decay-tpfa"),
        ],
    )?;
    let means = mean_list(resolved.get("mean"))?;
    let dt = resolved.f64("dt")?;
    let tfinal = resolved.f64("tfinal")?;
    let p_list = resolved.p_list()?;
    let dir = resolved.out_dir()?;
    let case = TestCase::TpfaMixed;

    let mut body = String::new();
    for mean in means {
        let mesh = parse_mesh_spec(resolved.get("mesh"))?;
        if body.is_empty() {
            body.push_str("# mesh\n");
            body.push_str(&regularity_text(&mesh));
            body.push('\n');
        }
        let out = experiments::run_tpfa(mesh, &case, mean, dt, tfinal, &p_list)?;
        write_series(&dir, &format!("series_{}.csv", mean.name()), &p_list, &out)?;
        let fit = diagnostics::fit_decay(&out.series(|r| r.l1), (0.2, 2.0))?;
        body.push_str(&format!(
            "mean={:<12} l1_rate={:.4} fit_residual={:.2e} newton_mean[0,0.5]={:.3} \
             newton_max={} \n",
            mean.name(),
            fit.rate,
            fit.residual,
            out.newton_mean(0.0, 0.5),
            out.newton_max
        ));
    }
    body.push_str("\n# reference rate pi^2 + 1/4 = 10.1196\n");
    write_summary(&dir, &resolved, &body)?;
    println!("{body}");
    Ok(())
}

fn cmd_decay_ddfv(args: &RunArgs) -> Result<()> {
    let resolved = Resolved::build(
        args,
        &[
            ("mesh", "cartesian:32"),
            ("mean", "arithmetic"),
            ("combiner", "arithmetic"),
            ("dt", "1e-3"),
            ("tfinal", "10"),
            ("eps", "1e-2"),
            ("lambda11", "1"),
            ("p", "1"),
            ("out", "out/decay-ddfv"),
        ],
    )?;
    let mesh = parse_mesh_spec(resolved.get("mesh"))?;
    let mean = MeanKind::parse(resolved.get("mean"))?;
    let combiner = Combiner::parse(resolved.get("combiner"))?;
    let dt = resolved.f64("dt")?;
    let tfinal = resolved.f64("tfinal")?;
    let p_list = resolved.p_list()?;
    let case = TestCase::DdfvEps {
        eps: resolved.f64("eps")?,
        lambda11: resolved.f64("lambda11")?,
    };
    let dir = resolved.out_dir()?;

    let mut body = String::from("# mesh\n");
    body.push_str(&regularity_text(&mesh));
    body.push('\n');
    let out = experiments::run_ddfv(mesh, &case, mean, combiner, dt, tfinal, &p_list)?;
    write_series(&dir, "series.csv", &p_list, &out)?;
    let entropy = out.series(|r| r.entropies[0]);
    let early = diagnostics::fit_decay(&entropy, (0.05, 0.6))?;
    body.push_str(&format!(
        "early_rate={:.4} fit_residual={:.2e} samples={}\n",
        early.rate, early.residual, early.samples
    ));
    match diagnostics::fit_decay(&entropy, (4.0, 10.0)) {
        Ok(late) => {
            body.push_str(&format!(
                "late_rate={:.4} fit_residual={:.2e} samples={}\n",
                late.rate, late.residual, late.samples
            ));
            if late.rate > 0.0 {
                body.push_str(&format!("rate_ratio={:.4}\n", early.rate / late.rate));
            }
        }
        Err(_) => body.push_str("late_rate=unavailable (series below round-off floor)\n"),
    }
    match diagnostics::slope_change_onset(&entropy, early.rate) {
        Some((t, v)) => body.push_str(&format!("slope_change_onset t={t:.3} entropy={v:.4e}\n")),
        None => body.push_str("slope_change_onset=none (single regime)\n"),
    }
    body.push_str(&format!("newton_max={}\n", out.newton_max));
    write_summary(&dir, &resolved, &body)?;
    println!("{body}");
    Ok(())
}

fn cmd_check_inequalities(args: &RunArgs) -> Result<()> {
    let resolved = Resolved::build(
        args,
        &[
            ("mesh", "cartesian:4"),
            ("seed", "1234"),
            ("out", "out/check-inequalities"),
        ],
    )?;
    let mesh = parse_mesh_spec(resolved.get("mesh"))?;
    let seed = resolved
        .get("seed")
        .parse()
        .map_err(|_| Error::InvalidArgument("seed must be an integer".into()))?;
    let reports = experiments::check_inequalities(&mesh, seed, 1000, 1000)?;
    let dir = resolved.out_dir()?;
    let mut body = String::from("# mesh\n");
    body.push_str(&regularity_text(&mesh));
    body.push('\n');
    for r in &reports {
        body.push_str(&format!(
            "{:<22} calibrated_max={:.6} validation_max={:.6} pass={}\n",
            r.family, r.calibrated_max, r.validation_max, r.pass
        ));
    }
    write_summary(&dir, &resolved, &body)?;
    println!("{body}");
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(
            "an inequality validation sample exceeded the calibrated constant".into(),
        ))
    }
}

fn cmd_validate_case(args: &RunArgs) -> Result<()> {
    let resolved = Resolved::build(
        args,
        &[
            ("case", "tpfa_mixed"),
            ("eps", "1e-2"),
            ("lambda11", "0.1"),
            ("out", "out/validate-case"),
        ],
    )?;
    let case = TestCase::parse(
        resolved.get("case"),
        resolved.f64("eps")?,
        resolved.f64("lambda11")?,
    )?;
    let report = case.validate();
    let mut body = format!(
        "case={}\nmax_pde_residual={:.3e}\nmax_dirichlet_error={:.3e}\nmax_neumann_flux={:.3e}\n\
         pass={}\n",
        report.case,
        report.max_pde_residual,
        report.max_dirichlet_error,
        report.max_neumann_flux,
        report.passes(1e-6)
    );
    if let TestCase::TpfaMixed = case {
        // demonstrate that the opposite potential sign is inconsistent
        let u = |p: Point, t: f64| case.exact(p, t);
        let bad = |p: Point| p.x;
        let res = entrofv::cases::pde_residual_scaled(&u, &bad, 1.0, 1.0, Point::new(0.3, 0.5), 0.1);
        body.push_str(&format!(
            "flipped_sign_residual={res:.3e} (V = +x1 is not a solution)\n"
        ));
    }
    let dir = resolved.out_dir()?;
    write_summary(&dir, &resolved, &body)?;
    println!("{body}");
    if report.passes(1e-6) {
        Ok(())
    } else {
        Err(Error::InvalidArgument("case validation failed".into()))
    }
}

fn cmd_mesh(action: &MeshCmd) -> Result<()> {
    match action {
        MeshCmd::Info { spec } => {
            let mesh = parse_mesh_spec(spec)?;
            print!("{}", regularity_text(&mesh));
        }
        MeshCmd::Generate { spec, out } | MeshCmd::Export { spec, out } => {
            let mesh = parse_mesh_spec(spec)?;
            mesh.export(out)?;
            println!("wrote {} cells to {}", mesh.cells.len(), out.display());
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Convergence(a) => cmd_convergence(a),
        Cmd::DecayTpfa(a) => cmd_decay_tpfa(a),
        Cmd::DecayDdfv(a) => cmd_decay_ddfv(a),
        Cmd::CheckInequalities(a) => cmd_check_inequalities(a),
        Cmd::ValidateCase(a) => cmd_validate_case(a),
        Cmd::Mesh { action } => cmd_mesh(action),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
