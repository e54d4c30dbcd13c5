//! High-level experiment drivers: full time loops with per-step diagnostics,
//! and the space-convergence study. Shared by the CLI and the acceptance
//! tests.

use crate::cases::TestCase;
use crate::ddfv::{Combiner, DdfvProblem};
use crate::ddfv_mesh::DdfvMesh;
use crate::diagnostics::{
    self, dissipation_ddfv, dissipation_tpfa, entropy, l1_distance, l2_distance, EntropyRecord,
};
use crate::geom::Point;
use crate::kernels::{EntropyGenerator, MeanKind};
use crate::mesh::PrimalMesh;
use crate::newton::{self, NewtonConfig, TimeStepScheme};
use crate::sparse::BandSolver;
use crate::tpfa::TpfaProblem;
use crate::Result;

/// Output of a full time loop.
#[derive(Debug, Clone)]
pub struct RunOutput {
    /// One record per step, starting with the initial state at `t = 0`.
    pub records: Vec<EntropyRecord>,
    pub final_state: Vec<f64>,
    pub steady: Vec<f64>,
    /// Largest Newton iteration count over all steps.
    pub newton_max: usize,
}

impl RunOutput {
    /// `(t, value)` series of one record field, selected by a closure.
    pub fn series(&self, f: impl Fn(&EntropyRecord) -> f64) -> Vec<(f64, f64)> {
        self.records.iter().map(|r| (r.t, f(r))).collect()
    }

    /// Mean Newton iterations over steps with `t` in the half-open window
    /// `(t0, t1]` (the initial record is excluded automatically).
    pub fn newton_mean(&self, t0: f64, t1: f64) -> f64 {
        let steps: Vec<usize> = self
            .records
            .iter()
            .skip(1)
            .filter(|r| r.t > t0 && r.t <= t1)
            .map(|r| r.newton_iters)
            .collect();
        steps.iter().sum::<usize>() as f64 / steps.len() as f64
    }
}

fn generators(p_list: &[f64]) -> Result<Vec<EntropyGenerator>> {
    p_list.iter().map(|&p| EntropyGenerator::new(p)).collect()
}

/// Runs the TPFA scheme on `case` until `t_final`, recording diagnostics at
/// every step. Boundary tags are taken from the case.
pub fn run_tpfa(
    mut mesh: PrimalMesh,
    case: &TestCase,
    mean: MeanKind,
    dt: f64,
    t_final: f64,
    p_list: &[f64],
) -> Result<RunOutput> {
    mesh.set_boundary_tags(|p| case.boundary_tag(p));
    let gens = generators(p_list)?;
    let gen1 = EntropyGenerator::new(1.0)?;
    let dir_fn = |p: Point| case.dirichlet(p).unwrap();
    let dirichlet: Option<&dyn Fn(Point) -> f64> = if case.dirichlet(Point::new(0.5, 0.5)).is_some()
    {
        Some(&dir_fn)
    } else {
        None
    };
    let problem = TpfaProblem::new(mesh, |p| case.potential(p), dirichlet, mean, dt)?;
    let config = NewtonConfig::default();
    let mut u: Vec<f64> = TpfaProblem::initial_state(&problem.mesh, |p| case.initial(p))
        .iter()
        .map(|&v| v.max(config.floor))
        .collect();
    let steady = problem.steady_state(&u)?;
    let weights: Vec<f64> = problem.mesh.cells.iter().map(|c| c.area).collect();
    let solver = BandSolver::from_adjacency(&problem.adjacency());

    let record = |t: f64, state: &[f64], iters: usize| -> EntropyRecord {
        let mass: f64 = weights.iter().zip(state).map(|(&w, &v)| w * v).sum();
        EntropyRecord {
            t,
            entropies: gens.iter().map(|g| entropy(&weights, state, &steady, g)).collect(),
            i1: dissipation_tpfa(&problem, state, &steady, &gen1),
            mass_primal: mass,
            mass_dual: mass,
            l1: l1_distance(&weights, state, &steady),
            l2: l2_distance(&weights, state, &steady),
            newton_iters: iters,
        }
    };

    let n_steps = (t_final / dt).round() as usize;
    let mut records = Vec::with_capacity(n_steps + 1);
    let mut newton_max = 0;
    records.push(record(0.0, &u, 0));
    for n in 1..=n_steps {
        let (u_new, report) = newton::solve_step(&problem, &u, &config, &solver)?;
        newton_max = newton_max.max(report.iterations);
        u = u_new;
        records.push(record(n as f64 * dt, &u, report.iterations));
    }
    Ok(RunOutput {
        records,
        final_state: u,
        steady,
        newton_max,
    })
}

/// Runs the DDFV scheme on `case` until `t_final`, recording diagnostics at
/// every step.
pub fn run_ddfv(
    mut primal: PrimalMesh,
    case: &TestCase,
    mean: MeanKind,
    combiner: Combiner,
    dt: f64,
    t_final: f64,
    p_list: &[f64],
) -> Result<RunOutput> {
    primal.set_boundary_tags(|p| case.boundary_tag(p));
    let gens = generators(p_list)?;
    let mesh = DdfvMesh::build(primal, &|p| case.lambda(p))?;
    let problem = DdfvProblem::new(mesh, |p| case.potential(p), mean, combiner, dt)?;
    let config = NewtonConfig::default();
    let mut u: Vec<f64> = DdfvProblem::initial_state(&problem.mesh, |p| case.initial(p))
        .iter()
        .map(|&v| v.max(config.floor))
        .collect();
    // Steady-state normalization uses the projected initial masses — exactly
    // the masses the scheme conserves.
    let steady = problem.steady_state(&u)?;
    let weights = problem.mass_diag();
    let solver = BandSolver::from_adjacency(&TimeStepScheme::adjacency(&problem));

    let record = |t: f64, state: &[f64], iters: usize| -> EntropyRecord {
        EntropyRecord {
            t,
            entropies: gens.iter().map(|g| entropy(&weights, state, &steady, g)).collect(),
            i1: dissipation_ddfv(&problem, state, &steady),
            mass_primal: problem.mesh.primal_mass(state),
            mass_dual: problem.mesh.dual_mass(state),
            l1: l1_distance(&weights, state, &steady),
            l2: l2_distance(&weights, state, &steady),
            newton_iters: iters,
        }
    };

    let n_steps = (t_final / dt).round() as usize;
    let mut records = Vec::with_capacity(n_steps + 1);
    let mut newton_max = 0;
    records.push(record(0.0, &u, 0));
    for n in 1..=n_steps {
        let (u_new, report) = newton::solve_step(&problem, &u, &config, &solver)?;
        newton_max = newton_max.max(report.iterations);
        u = u_new;
        records.push(record(n as f64 * dt, &u, report.iterations));
    }
    Ok(RunOutput {
        records,
        final_state: u,
        steady,
        newton_max,
    })
}

/// One row of the space-convergence table.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceRow {
    pub mean: MeanKind,
    pub level: usize,
    pub h: f64,
    pub dt: f64,
    pub error_l2: f64,
    /// Observed order against the previous level of the same mean.
    pub order: Option<f64>,
}

/// Time step used at a refinement level: the base step is divided by 4 per
/// level for the second-order means and by 2 per level for the first-order
/// Max mean, so the time error stays subordinate to the space error.
pub fn convergence_dt(mean: MeanKind, dt0: f64, level: usize) -> f64 {
    let factor: f64 = if mean == MeanKind::Max { 2.0 } else { 4.0 };
    dt0 / factor.powi(level as i32)
}

/// L² convergence study of the TPFA scheme on the triangular mesh family for
/// the `tpfa_mixed` case: errors at `T = 0.1` against the exact solution,
/// with observed orders between consecutive levels.
pub fn convergence_table(
    means: &[MeanKind],
    max_level: usize,
    dt0: f64,
) -> Result<Vec<ConvergenceRow>> {
    let case = TestCase::TpfaMixed;
    let t_final = 0.1;
    let mut rows = Vec::new();
    for &mean in means {
        let mut prev_err: Option<f64> = None;
        for level in 0..=max_level {
            let mesh = PrimalMesh::generate_triangular(level)?;
            let h = mesh.size;
            let dt = convergence_dt(mean, dt0, level);
            let out = run_tpfa(mesh.clone(), &case, mean, dt, t_final, &[1.0])?;
            let error_l2: f64 = mesh
                .cells
                .iter()
                .zip(&out.final_state)
                .map(|(c, &v)| {
                    let d = v - case.exact(c.center, t_final);
                    c.area * d * d
                })
                .sum::<f64>()
                .sqrt();
            let order = prev_err.map(|e| (e / error_l2).log2());
            prev_err = Some(error_l2);
            rows.push(ConvergenceRow {
                mean,
                level,
                h,
                dt,
                error_l2,
                order,
            });
        }
    }
    Ok(rows)
}

/// Report of the inequality calibration/validation protocol.
#[derive(Debug, Clone)]
pub struct InequalityReport {
    pub family: String,
    /// Largest LHS/(weight·seminorm) ratio over the calibration draws.
    pub calibrated_max: f64,
    /// Largest ratio over the validation draws.
    pub validation_max: f64,
    /// Validation passes when no fresh sample exceeds 1.05× the calibration
    /// maximum.
    pub pass: bool,
}

impl InequalityReport {
    pub fn new(family: impl Into<String>, calibrated_max: f64, validation_max: f64) -> Self {
        let pass = validation_max <= 1.05 * calibrated_max.max(f64::MIN_POSITIVE);
        Self {
            family: family.into(),
            calibrated_max,
            validation_max,
            pass,
        }
    }
}

/// Maximizer of the Poincaré–Wirtinger Rayleigh quotient
/// `f ↦ (Σ m μ (f − μf)²) / (Σ τ (f_K − f_L)²)` for a fixed probability
/// measure: the top mode of the pencil `B f = λ L f` with
/// `B = diag(mμ) − (mμ)(mμ)ᵀ` and `L` the τ-weighted graph Laplacian,
/// computed by power iteration on `L⁻¹B` (constants projected out).
fn pw_optimal_mode(mesh: &PrimalMesh, areas: &[f64], mu: &[f64]) -> Vec<f64> {
    use crate::mesh::EdgeKind;
    use nalgebra::{DMatrix, DVector};

    let n = areas.len();
    let a: Vec<f64> = areas.iter().zip(mu).map(|(&m, &w)| m * w).collect();
    let mut l = DMatrix::zeros(n, n);
    for e in &mesh.edges {
        if e.kind != EdgeKind::Interior {
            continue;
        }
        let (k, j) = (e.cells.0, e.cells.1.unwrap());
        l[(k, k)] += e.tau;
        l[(j, j)] += e.tau;
        l[(k, j)] -= e.tau;
        l[(j, k)] -= e.tau;
    }
    // regularize the constant null space; iterates are projected onto
    // zero-mean vectors so the shift does not affect the result
    let shift = l.trace() / n as f64;
    for i in 0..n {
        for j in 0..n {
            l[(i, j)] += shift / n as f64;
        }
    }
    let lu = l.lu();
    let mut x = DVector::from_fn(n, |i, _| {
        let c = mesh.cells[i].center;
        c.x + 2.0 * c.y
    });
    for _ in 0..80 {
        let am: f64 = a.iter().zip(x.iter()).map(|(&ai, &xi)| ai * xi).sum();
        let b = DVector::from_fn(n, |i, _| a[i] * (x[i] - am));
        let mut y = lu.solve(&b).unwrap_or_else(|| b.clone());
        let mean = y.sum() / n as f64;
        y.add_scalar_mut(-mean);
        let norm = y.amax();
        if norm <= 0.0 {
            break;
        }
        y /= norm;
        x = y;
    }
    x.iter().copied().collect()
}

/// Builds random probability measures and value vectors on a mesh and runs
/// the calibration/validation protocol for the three single-mesh functional
/// inequalities plus the two-mesh log-Sobolev inequality. Returns one report
/// per family.
pub fn check_inequalities(
    mesh: &PrimalMesh,
    seed: u64,
    calibration_draws: usize,
    validation_draws: usize,
) -> Result<Vec<InequalityReport>> {
    use diagnostics::InequalityKind::{Beckner, LogSobolev, PoincareWirtinger};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    let n = mesh.cells.len();
    let areas: Vec<f64> = mesh.cells.iter().map(|c| c.area).collect();
    let draw = |rng: &mut ChaCha8Rng| -> (Vec<f64>, Vec<f64>) {
        let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
        let mass: f64 = areas.iter().zip(&raw).map(|(&a, &w)| a * w).sum();
        let mu: Vec<f64> = raw.iter().map(|&w| w / mass).collect();
        let f: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..3.0)).collect();
        (mu, f)
    };

    // Calibration-only extremal probes. For each candidate measure, the
    // Poincaré–Wirtinger ratio is maximized exactly over f (generalized
    // eigenproblem solved by power iteration on L⁻¹B); the Beckner and
    // log-Sobolev families linearize to the same quadratic form around
    // f ≡ 1, so positive perturbations `1 + s·ĝ` along the optimal mode are
    // near-extremal for them too. This makes the calibrated maxima dominate
    // fresh random validation samples with a solid gap.
    let area_total: f64 = areas.iter().sum();
    let mut probe_mus: Vec<Vec<f64>> = vec![vec![1.0 / area_total; n]];
    for k in 0..n.min(64) {
        let raw: Vec<f64> = (0..n).map(|i| if i == k { 1.0 } else { 0.05 }).collect();
        let mass: f64 = areas.iter().zip(&raw).map(|(&a, &w)| a * w).sum();
        probe_mus.push(raw.iter().map(|&w| w / mass).collect());
    }
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
        for _ in 0..100.min(calibration_draws) {
            probe_mus.push(draw(&mut rng).0);
        }
    }

    let kinds = [
        ("poincare_wirtinger", PoincareWirtinger),
        ("beckner_p1.5", Beckner(1.5)),
        ("log_sobolev", LogSobolev),
    ];
    let mut cal_max = [0.0f64; 3];
    for mu in &probe_mus {
        let g = pw_optimal_mode(mesh, &areas, mu);
        let pw = diagnostics::verify_pw_beckner_logsob(mesh, mu, &g, PoincareWirtinger)?;
        cal_max[0] = cal_max[0].max(pw.ratio);
        let sup = g.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        for s in [0.3, 0.6, 0.9] {
            let f: Vec<f64> = g.iter().map(|&x| 1.0 + s * x / sup).collect();
            for (i, (_, kind)) in kinds.iter().enumerate().skip(1) {
                let sides = diagnostics::verify_pw_beckner_logsob(mesh, mu, &f, *kind)?;
                cal_max[i] = cal_max[i].max(sides.ratio);
            }
        }
    }

    let mut reports = Vec::new();
    for (i, (name, kind)) in kinds.iter().enumerate() {
        let phase = |seed_offset: u64, draws: usize| -> Result<f64> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ seed_offset);
            let mut worst = 0.0f64;
            for _ in 0..draws {
                let (mu, f) = draw(&mut rng);
                let sides = diagnostics::verify_pw_beckner_logsob(mesh, &mu, &f, *kind)?;
                worst = worst.max(sides.ratio);
            }
            Ok(worst)
        };
        let cal = cal_max[i].max(phase(0, calibration_draws)?);
        let val = phase(0x9e3779b9, validation_draws)?;
        reports.push(InequalityReport::new(*name, cal, val));
    }

    // Two-mesh log-Sobolev on the DDFV reconstruction of the same mesh.
    let dd = DdfvMesh::build(mesh.clone(), &|_| crate::geom::Tensor::identity())?;
    let nu = dd.n_unknowns();
    let np = dd.n_primal();
    let normalize = |w: &mut Vec<f64>| {
        let mp = dd.primal_mass(w);
        for x in w[..np].iter_mut() {
            *x /= mp;
        }
        let md = dd.dual_mass(w);
        for x in w[np..].iter_mut() {
            *x /= md;
        }
    };
    let eval = |v: &[f64], v_inf: &[f64]| -> Result<f64> {
        let sides = diagnostics::verify_logsob_ddfv(&dd, v, v_inf)?;
        Ok(if sides.rhs_scaled() > 0.0 {
            sides.lhs / sides.rhs_scaled()
        } else {
            0.0
        })
    };
    let phase = |seed_offset: u64, draws: usize, use_probes: bool| -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ seed_offset);
        let mut worst = 0.0f64;
        if use_probes {
            // spike probes on every unknown against a flat reference
            let mut flat = vec![1.0; nu];
            normalize(&mut flat);
            for k in 0..nu {
                let mut v: Vec<f64> = (0..nu).map(|i| if i == k { 1.0 } else { 1e-3 }).collect();
                normalize(&mut v);
                worst = worst.max(eval(&v, &flat)?);
                worst = worst.max(eval(&flat, &v)?);
            }
        }
        for _ in 0..draws {
            let mut v: Vec<f64> = (0..nu).map(|_| rng.gen_range(0.1..2.0)).collect();
            let mut v_inf: Vec<f64> = (0..nu).map(|_| rng.gen_range(0.1..2.0)).collect();
            normalize(&mut v);
            normalize(&mut v_inf);
            worst = worst.max(eval(&v, &v_inf)?);
        }
        Ok(worst)
    };
    let cal = phase(1, calibration_draws, true)?;
    let val = phase(0x517cc1b7, validation_draws, false)?;
    reports.push(InequalityReport::new("log_sobolev_ddfv", cal, val));
    Ok(reports)
}
