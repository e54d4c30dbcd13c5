//! Entropy/dissipation functionals, distances to the steady state, decay-rate
//! fitting, and numerical verifiers for the discrete functional inequalities
//! (Poincaré–Wirtinger, Beckner, logarithmic Sobolev, the means lemma and the
//! Csiszár–Kullback inequality).

use std::io::Write as IoWrite;

use crate::ddfv::DdfvProblem;
use crate::ddfv_mesh::DdfvMesh;
use crate::kernels::EntropyGenerator;
use crate::mesh::{EdgeKind, PrimalMesh};
use crate::tpfa::TpfaProblem;
use crate::{Error, Result};

/// Values below this are treated as the round-off plateau and excluded from
/// decay fits and slope detection.
pub const FIT_FLOOR: f64 = 1e-13;

/// Relative Φ-entropy `Σ w_i u_i^∞ Φ(u_i/u_i^∞)` for a weight vector `w`
/// (cell areas for a single mesh, the half-weighted two-mesh diagonal for
/// DDFV; zero-weight entries are skipped).
pub fn entropy(weights: &[f64], state: &[f64], steady: &[f64], gen: &EntropyGenerator) -> f64 {
    weights
        .iter()
        .zip(state)
        .zip(steady)
        .filter(|((&w, _), _)| w != 0.0)
        .map(|((&w, &u), &s)| w * s * gen.phi(u / s))
        .sum()
}

/// Weighted L¹ distance `Σ w_i |u_i − s_i|`.
pub fn l1_distance(weights: &[f64], state: &[f64], steady: &[f64]) -> f64 {
    weights
        .iter()
        .zip(state)
        .zip(steady)
        .map(|((&w, &u), &s)| w * (u - s).abs())
        .sum()
}

/// Weighted L² distance `(Σ w_i (u_i − s_i)²)^{1/2}`.
pub fn l2_distance(weights: &[f64], state: &[f64], steady: &[f64]) -> f64 {
    weights
        .iter()
        .zip(state)
        .zip(steady)
        .map(|((&w, &u), &s)| w * (u - s) * (u - s))
        .sum::<f64>()
        .sqrt()
}

/// Entropy dissipation of the TPFA scheme,
/// `𝕀_Φ = Σ_σ τ_σ ū_σ D_σ log(u/u^∞) · D_σ Φ′(u/u^∞)`, summed over interior
/// and Dirichlet edges (`ū_σ` is the scheme's mean of the two edge values).
pub fn dissipation_tpfa(
    problem: &TpfaProblem,
    state: &[f64],
    steady: &[f64],
    gen: &EntropyGenerator,
) -> f64 {
    let mut total = 0.0;
    for (eid, e) in problem.mesh.edges.iter().enumerate() {
        if e.kind == EdgeKind::Neumann {
            continue;
        }
        let k = e.cells.0;
        let (u_k, u_nb) = (state[k], problem.neighbor_value(state, k, eid));
        let (s_k, s_nb) = (steady[k], problem.neighbor_value(steady, k, eid));
        let (rk, rn) = (u_k / s_k, u_nb / s_nb);
        let r = problem.mean.value(u_k, u_nb);
        total += e.tau * r * (rk.ln() - rn.ln()) * (gen.phi_prime(rk) - gen.phi_prime(rn));
    }
    total
}

/// Square-root form of the dissipation,
/// `Î_p = (4/p) Σ_σ τ_σ min(u_K^∞, u_σ^∞) (D_σ (u/u^∞)^{p/2})²`, over the
/// same edge set as [`dissipation_tpfa`]; satisfies `Î_p ≤ 𝕀_p`.
pub fn dissipation_hat(problem: &TpfaProblem, state: &[f64], steady: &[f64], p: f64) -> f64 {
    let mut total = 0.0;
    for (eid, e) in problem.mesh.edges.iter().enumerate() {
        if e.kind == EdgeKind::Neumann {
            continue;
        }
        let k = e.cells.0;
        let (u_k, u_nb) = (state[k], problem.neighbor_value(state, k, eid));
        let (s_k, s_nb) = (steady[k], problem.neighbor_value(steady, k, eid));
        let d = (u_k / s_k).powf(0.5 * p) - (u_nb / s_nb).powf(0.5 * p);
        total += e.tau * s_k.min(s_nb) * d * d;
    }
    4.0 / p * total
}

/// Entropy dissipation of the DDFV scheme: the quadratic form
/// `T_𝔇(u; g, g)` with `g = log(u/u^∞)`.
pub fn dissipation_ddfv(problem: &DdfvProblem, state: &[f64], steady: &[f64]) -> f64 {
    let g: Vec<f64> = state
        .iter()
        .zip(steady)
        .map(|(&u, &s)| (u / s).ln())
        .collect();
    problem.bilinear_t(state, &g, &g)
}

/// Least-squares exponential decay fit of a positive time series.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    pub window: (f64, f64),
    /// Decay rate `ν` in `value ≈ c e^{−νt}` (positive for decaying data).
    pub rate: f64,
    /// Root-mean-square residual of the linear fit in log space.
    pub residual: f64,
    pub samples: usize,
}

/// Fits `log(value)` against `t` by least squares over the samples inside
/// `window` that sit above the round-off floor. Requires at least 5 such
/// samples.
pub fn fit_decay(series: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|&&(t, v)| t >= window.0 && t <= window.1 && v > FIT_FLOOR)
        .map(|&(t, v)| (t, v.ln()))
        .collect();
    if pts.len() < 5 {
        return Err(Error::InvalidArgument(format!(
            "decay fit needs at least 5 usable samples in [{}, {}], found {}",
            window.0,
            window.1,
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let (st, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (tm, ym) = (st / n, sy / n);
    let (mut num, mut den) = (0.0, 0.0);
    for &(t, y) in &pts {
        num += (t - tm) * (y - ym);
        den += (t - tm) * (t - tm);
    }
    if den == 0.0 {
        return Err(Error::InvalidArgument(
            "decay fit window collapses to a single time".into(),
        ));
    }
    let slope = num / den;
    let rss: f64 = pts
        .iter()
        .map(|&(t, y)| {
            let e = y - ym - slope * (t - tm);
            e * e
        })
        .sum();
    Ok(DecayFit {
        window,
        rate: -slope,
        residual: (rss / n).sqrt(),
        samples: pts.len(),
    })
}

/// Detects the onset of a slower decay regime: the first time at which the
/// local log-slope (measured over a `0.25`-wide sliding window, above the
/// round-off floor) drops below half of `early_rate`. Returns `(t, value)` at
/// the onset, or `None` for a single-regime series.
pub fn slope_change_onset(series: &[(f64, f64)], early_rate: f64) -> Option<(f64, f64)> {
    const SPAN: f64 = 0.25;
    let usable: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|&(_, v)| v > FIT_FLOOR)
        .collect();
    let mut j = 0;
    for i in 0..usable.len() {
        let (ti, vi) = usable[i];
        if ti < SPAN {
            continue; // skip the initial transient
        }
        while j < usable.len() && usable[j].0 < ti + SPAN {
            j += 1;
        }
        if j >= usable.len() {
            break;
        }
        let (tj, vj) = usable[j];
        let local = (vi.ln() - vj.ln()) / (tj - ti);
        if local < 0.5 * early_rate {
            return Some((ti, vi));
        }
    }
    None
}

/// Which functional inequality [`verify_pw_beckner_logsob`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InequalityKind {
    PoincareWirtinger,
    Beckner(f64),
    LogSobolev,
}

/// Both sides of a functional inequality on a mesh.
#[derive(Debug, Clone, Copy)]
pub struct IneqSides {
    pub lhs: f64,
    /// Gradient seminorm `Σ_{σ=K|L} τ_σ (f_K − f_L)²` over interior edges.
    pub seminorm: f64,
    /// Mesh/measure weight multiplying the seminorm (`μ^∞/ζ` or `√μ^∞/ζ²`).
    pub weight: f64,
    /// `lhs / (weight · seminorm)`; an empirical constant estimate.
    pub ratio: f64,
}

/// Evaluates one of the discrete Poincaré–Wirtinger / Beckner / log-Sobolev
/// inequalities for a probability measure `μ` (`Σ m_K μ_K = 1`) and cell
/// values `f`, returning the left-hand side, the gradient seminorm, and their
/// ratio normalized by the measure weight.
pub fn verify_pw_beckner_logsob(
    mesh: &PrimalMesh,
    mu: &[f64],
    f: &[f64],
    which: InequalityKind,
) -> Result<IneqSides> {
    let m: Vec<f64> = mesh.cells.iter().map(|c| c.area).collect();
    if mu.len() != m.len() || f.len() != m.len() {
        return Err(Error::InvalidArgument(
            "measure and value vectors must have one entry per cell".into(),
        ));
    }
    if mu.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidArgument("measure must be nonnegative".into()));
    }
    let total: f64 = m.iter().zip(mu).map(|(&a, &w)| a * w).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "measure mass {total} is not 1"
        )));
    }
    let mu_sup = mu.iter().cloned().fold(0.0, f64::max);
    let zeta = mesh.zeta;
    let lhs = match which {
        InequalityKind::PoincareWirtinger => {
            let mean: f64 = m
                .iter()
                .zip(mu)
                .zip(f)
                .map(|((&a, &w), &v)| a * w * v)
                .sum();
            m.iter()
                .zip(mu)
                .zip(f)
                .map(|((&a, &w), &v)| a * w * (v - mean) * (v - mean))
                .sum()
        }
        InequalityKind::Beckner(p) => {
            if !(1.0 < p && p <= 2.0) {
                return Err(Error::InvalidArgument(format!(
                    "Beckner exponent p = {p} outside (1, 2]"
                )));
            }
            if f.iter().any(|&v| v < 0.0) {
                return Err(Error::InvalidArgument(
                    "Beckner requires nonnegative values".into(),
                ));
            }
            let sq: f64 = m
                .iter()
                .zip(mu)
                .zip(f)
                .map(|((&a, &w), &v)| a * w * v * v)
                .sum();
            let frac: f64 = m
                .iter()
                .zip(mu)
                .zip(f)
                .map(|((&a, &w), &v)| a * w * v.powf(2.0 / p))
                .sum();
            sq - frac.powf(p)
        }
        InequalityKind::LogSobolev => {
            if f.iter().any(|&v| v <= 0.0) {
                return Err(Error::InvalidArgument(
                    "log-Sobolev requires positive values".into(),
                ));
            }
            let norm2: f64 = m
                .iter()
                .zip(mu)
                .zip(f)
                .map(|((&a, &w), &v)| a * w * v * v)
                .sum();
            m.iter()
                .zip(mu)
                .zip(f)
                .map(|((&a, &w), &v)| a * w * v * v * (v * v / norm2).ln())
                .sum()
        }
    };
    let seminorm: f64 = mesh
        .edges
        .iter()
        .filter(|e| e.kind == EdgeKind::Interior)
        .map(|e| {
            let (k, l) = (e.cells.0, e.cells.1.unwrap());
            e.tau * (f[k] - f[l]) * (f[k] - f[l])
        })
        .sum();
    let weight = match which {
        InequalityKind::LogSobolev => mu_sup.sqrt() / (zeta * zeta),
        _ => mu_sup / zeta,
    };
    if seminorm == 0.0 && lhs > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "zero gradient seminorm with nonzero left-hand side {lhs}"
        )));
    }
    let ratio = if seminorm == 0.0 {
        0.0
    } else {
        lhs / (weight * seminorm)
    };
    Ok(IneqSides {
        lhs,
        seminorm,
        weight,
        ratio,
    })
}

/// Means lemma: `‖g − μg‖_{L^q_μ} ≤ 2‖g − ḡ‖_{L^q_μ}` where `μg` is the
/// μ-weighted mean and `ḡ` the area-weighted mean. Cell areas `m` and
/// probability weights `μ` satisfy `Σ m_i μ_i = 1`; `q ∈ [1, ∞]` (pass
/// `f64::INFINITY` for the sup norm).
pub fn verify_means_lemma(m: &[f64], mu: &[f64], g: &[f64], q: f64) -> bool {
    let mu_mean: f64 = m.iter().zip(mu).zip(g).map(|((&a, &w), &v)| a * w * v).sum();
    let area: f64 = m.iter().sum();
    let bar: f64 = m.iter().zip(g).map(|(&a, &v)| a * v).sum::<f64>() / area;
    let norm = |center: f64| -> f64 {
        if q.is_infinite() {
            m.iter()
                .zip(mu)
                .zip(g)
                .filter(|((_, &w), _)| w > 0.0)
                .map(|((_, _), &v)| (v - center).abs())
                .fold(0.0, f64::max)
        } else {
            m.iter()
                .zip(mu)
                .zip(g)
                .map(|((&a, &w), &v)| a * w * (v - center).abs().powf(q))
                .sum::<f64>()
                .powf(1.0 / q)
        }
    };
    norm(mu_mean) <= 2.0 * norm(bar) + 1e-12
}

/// Csiszár–Kullback inequality `(Σ m μ |g−1|)² ≤ 2 Σ m μ g log g` for a
/// probability measure (`Σ m μ = 1`) and positive `g` with `Σ m μ g = 1`.
pub fn verify_csiszar_kullback(m: &[f64], mu: &[f64], g: &[f64]) -> Result<bool> {
    let mass: f64 = m.iter().zip(mu).map(|(&a, &w)| a * w).sum();
    let gmass: f64 = m.iter().zip(mu).zip(g).map(|((&a, &w), &v)| a * w * v).sum();
    if (mass - 1.0).abs() > 1e-12 || (gmass - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "Csiszár–Kullback requires unit masses, got μ-mass {mass} and g-mass {gmass}"
        )));
    }
    if g.iter().any(|&v| v <= 0.0) {
        return Err(Error::InvalidArgument("g must be positive".into()));
    }
    let l1: f64 = m
        .iter()
        .zip(mu)
        .zip(g)
        .map(|((&a, &w), &v)| a * w * (v - 1.0).abs())
        .sum();
    let ent: f64 = m
        .iter()
        .zip(mu)
        .zip(g)
        .map(|((&a, &w), &v)| a * w * v * v.ln())
        .sum();
    Ok(l1 * l1 <= 2.0 * ent + 1e-12)
}

/// Both sides of the DDFV log-Sobolev inequality (up to the mesh constant).
#[derive(Debug, Clone, Copy)]
pub struct LogSobDdfvSides {
    /// `⟦v log(v/v^∞), 1⟧` over the two meshes.
    pub lhs: f64,
    /// `Σ_D m_D |∇^D √(v/v^∞)|²`.
    pub grad_sum: f64,
    /// Common mass `M¹`.
    pub m1: f64,
    /// `M^∞ = sup v^∞` over both meshes.
    pub m_inf: f64,
}

impl LogSobDdfvSides {
    /// Right-hand side without the constant: `(M¹M^∞)^{1/2} · grad_sum`.
    pub fn rhs_scaled(&self) -> f64 {
        (self.m1 * self.m_inf).sqrt() * self.grad_sum
    }
}

/// Evaluates the two-mesh log-Sobolev inequality
/// `⟦v log(v/v^∞), 1⟧ ≤ C (M¹M^∞)^{1/2} Σ_D m_D |∇^D √(v/v^∞)|²` for positive
/// vectors with equal masses on the primal and dual meshes (`v` and `v^∞`
/// each, to 1e−8 relative).
pub fn verify_logsob_ddfv(mesh: &DdfvMesh, v: &[f64], v_inf: &[f64]) -> Result<LogSobDdfvSides> {
    for (i, &x) in v.iter().chain(v_inf.iter()).enumerate() {
        if x <= 0.0 {
            return Err(Error::NonPositiveState {
                index: i % v.len(),
                value: x,
            });
        }
    }
    let m1 = mesh.primal_mass(v);
    for (label, mass) in [
        ("dual mass of v", mesh.dual_mass(v)),
        ("primal mass of v_inf", mesh.primal_mass(v_inf)),
        ("dual mass of v_inf", mesh.dual_mass(v_inf)),
    ] {
        if (mass - m1).abs() > 1e-8 * m1.abs() {
            return Err(Error::InvalidArgument(format!(
                "{label} = {mass} differs from primal mass {m1}"
            )));
        }
    }
    let m_inf = v_inf.iter().cloned().fold(0.0, f64::max);
    let mut lhs = 0.0;
    for (k, c) in mesh.primal.cells.iter().enumerate() {
        lhs += 0.5 * c.area * v[k] * (v[k] / v_inf[k]).ln();
    }
    for d in &mesh.dual {
        let i = mesh.dual_index(d.vertex);
        lhs += 0.5 * d.area * v[i] * (v[i] / v_inf[i]).ln();
    }
    let f: Vec<f64> = v
        .iter()
        .zip(v_inf)
        .map(|(&a, &b)| (a / b).sqrt())
        .collect();
    let grad_sum: f64 = (0..mesh.diamonds.len())
        .map(|d| {
            let g = mesh.discrete_gradient(&f, d);
            mesh.diamonds[d].area * g.norm_squared()
        })
        .sum();
    Ok(LogSobDdfvSides {
        lhs,
        grad_sum,
        m1,
        m_inf,
    })
}

/// One time sample of the solver diagnostics.
#[derive(Debug, Clone)]
pub struct EntropyRecord {
    pub t: f64,
    /// Relative entropies, aligned with the requested p-list.
    pub entropies: Vec<f64>,
    /// Boltzmann entropy dissipation.
    pub i1: f64,
    pub mass_primal: f64,
    /// Dual-mesh mass (equals `mass_primal` for single-mesh schemes).
    pub mass_dual: f64,
    pub l1: f64,
    pub l2: f64,
    pub newton_iters: usize,
}

/// Writes an [`EntropyRecord`] series as CSV with one `E{p}` column per
/// requested entropy exponent. Output is deterministic for identical inputs.
pub fn write_series_csv(
    out: &mut dyn IoWrite,
    p_list: &[f64],
    records: &[EntropyRecord],
) -> Result<()> {
    let mut header = String::from("t");
    for p in p_list {
        header.push_str(&format!(",E{p}"));
    }
    header.push_str(",I1,mass_primal,mass_dual,L1,L2,newton_iters");
    writeln!(out, "{header}")?;
    for r in records {
        let mut line = format!("{}", r.t);
        for e in &r.entropies {
            line.push_str(&format!(",{e:e}"));
        }
        line.push_str(&format!(
            ",{:e},{:e},{:e},{:e},{:e},{}",
            r.i1, r.mass_primal, r.mass_dual, r.l1, r.l2, r.newton_iters
        ));
        writeln!(out, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ddfv::Combiner;
    use crate::geom::Tensor;
    use crate::kernels::MeanKind;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn entropy_examples() {
        let w = [1.0, 1.0];
        let steady = [1.0, 1.0];
        let g2 = EntropyGenerator::new(2.0).unwrap();
        assert_relative_eq!(entropy(&w, &[2.0, 0.0], &steady, &g2), 2.0);
        let g1 = EntropyGenerator::new(1.0).unwrap();
        assert_relative_eq!(
            entropy(&w, &[2.0, 0.0], &steady, &g1),
            2.0 * f64::ln(2.0),
            max_relative = 1e-14
        );
        assert_relative_eq!(entropy(&w, &steady, &steady, &g1), 0.0);
    }

    fn two_cell_problem(mean: MeanKind) -> TpfaProblem {
        let mesh = PrimalMesh::generate_cartesian(2, 1, [0.0, 1.0, 0.0, 1.0]).unwrap();
        TpfaProblem::new(mesh, |_| 0.0, None, mean, 1e-3).unwrap()
    }

    #[test]
    fn dissipation_hand_case() {
        // Single interior edge, τ = length/d = 1/0.5 = 2, V = 0, u^∞ = (1,1),
        // u = (1,e): 𝕀₂ = τ·r(1,e)·(log e − log 1)·2(e−1). The logarithmic
        // mean gives r = e−1, hence 𝕀₂ = 2·2(e−1)².
        let p = two_cell_problem(MeanKind::Logarithmic);
        let e = std::f64::consts::E;
        let g2 = EntropyGenerator::new(2.0).unwrap();
        let val = dissipation_tpfa(&p, &[1.0, e], &[1.0, 1.0], &g2);
        assert_relative_eq!(val, 4.0 * (e - 1.0) * (e - 1.0), max_relative = 1e-13);
        assert_relative_eq!(dissipation_tpfa(&p, &[1.0, 1.0], &[1.0, 1.0], &g2), 0.0);
    }

    #[test]
    fn hat_dissipation_below_full() {
        let mesh = PrimalMesh::generate_cartesian(4, 4, [0.0, 1.0, 0.0, 1.0]).unwrap();
        let p = TpfaProblem::new(mesh, |q| -q.x, None, MeanKind::Logarithmic, 1e-3).unwrap();
        let steady = p
            .steady_state(&vec![1.0; p.n_cells()])
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for pp in [1.0, 1.4, 2.0] {
            let gen = EntropyGenerator::new(pp).unwrap();
            for _ in 0..100 {
                let u: Vec<f64> = (0..p.n_cells()).map(|_| rng.gen_range(0.1..3.0)).collect();
                let full = dissipation_tpfa(&p, &u, &steady, &gen);
                let hat = dissipation_hat(&p, &u, &steady, pp);
                assert!(full >= -1e-12, "dissipation {full:.3e} negative");
                assert!(
                    hat <= full + 1e-10,
                    "hat {hat:.6e} exceeds full {full:.6e} at p={pp}"
                );
            }
        }
    }

    #[test]
    fn fit_decay_examples() {
        let series: Vec<(f64, f64)> = (0..200)
            .map(|i| {
                let t = i as f64 * 0.01;
                (t, (-3.0 * t).exp())
            })
            .collect();
        let fit = fit_decay(&series, (0.0, 2.0)).unwrap();
        assert_relative_eq!(fit.rate, 3.0, max_relative = 1e-10);
        assert!(fit.residual < 1e-12);

        let two: Vec<(f64, f64)> = (0..700)
            .map(|i| {
                let t = i as f64 * 0.01;
                (t, (-10.0 * t).exp() + 1e-8 * (-t).exp())
            })
            .collect();
        assert_relative_eq!(
            fit_decay(&two, (0.0, 1.0)).unwrap().rate,
            10.0,
            max_relative = 0.05
        );
        assert_relative_eq!(
            fit_decay(&two, (3.0, 6.0)).unwrap().rate,
            1.0,
            max_relative = 0.05
        );

        let flat: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 2.0)).collect();
        assert_relative_eq!(fit_decay(&flat, (0.0, 10.0)).unwrap().rate, 0.0);

        assert!(fit_decay(&series[..3], (0.0, 1.0)).is_err());
    }

    #[test]
    fn onset_detector() {
        let two: Vec<(f64, f64)> = (0..1000)
            .map(|i| {
                let t = i as f64 * 0.01;
                (t, (-10.0 * t).exp() + 1e-8 * (-t).exp())
            })
            .collect();
        let (t, v) = slope_change_onset(&two, 10.0).unwrap();
        // crossover where e^{−10t} = 1e−8 e^{−t} is near t ≈ 2.05
        assert!((1.2..=2.4).contains(&t), "onset t = {t}");
        assert!(v > FIT_FLOOR);
        let single: Vec<(f64, f64)> = (0..1000)
            .map(|i| {
                let t = i as f64 * 0.01;
                (t, (-10.0 * t).exp())
            })
            .collect();
        assert!(slope_change_onset(&single, 10.0).is_none());
    }

    #[test]
    fn pw_two_cell_example() {
        let mesh = PrimalMesh::generate_cartesian(2, 1, [0.0, 1.0, 0.0, 1.0]).unwrap();
        let zeta = mesh.zeta;
        let sides = verify_pw_beckner_logsob(
            &mesh,
            &[1.0, 1.0],
            &[0.0, 2.0],
            InequalityKind::PoincareWirtinger,
        )
        .unwrap();
        // μf = 1, LHS = ½·1 + ½·1 = 1; seminorm = τ·4 = 8.
        assert_relative_eq!(sides.lhs, 1.0);
        assert_relative_eq!(sides.seminorm, 8.0);
        assert_relative_eq!(sides.ratio, zeta / 8.0);
    }

    #[test]
    fn beckner_p2_equals_pw() {
        let mesh = PrimalMesh::generate_cartesian(3, 3, [0.0, 1.0, 0.0, 1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = mesh.cells.len();
        let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..2.0)).collect();
        let mass: f64 = mesh.cells.iter().zip(&raw).map(|(c, &w)| c.area * w).sum();
        let mu: Vec<f64> = raw.iter().map(|&w| w / mass).collect();
        let f: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..3.0)).collect();
        let pw =
            verify_pw_beckner_logsob(&mesh, &mu, &f, InequalityKind::PoincareWirtinger).unwrap();
        let be = verify_pw_beckner_logsob(&mesh, &mu, &f, InequalityKind::Beckner(2.0)).unwrap();
        assert_relative_eq!(pw.lhs, be.lhs, max_relative = 1e-12);
        // constant f gives zero LHS for all three
        let c = vec![1.3; n];
        for kind in [
            InequalityKind::PoincareWirtinger,
            InequalityKind::Beckner(1.5),
            InequalityKind::LogSobolev,
        ] {
            let s = verify_pw_beckner_logsob(&mesh, &mu, &c, kind).unwrap();
            assert!(s.lhs.abs() < 1e-13 && s.seminorm == 0.0);
        }
    }

    #[test]
    fn csiszar_kullback_two_atoms() {
        // LHS = (½·½ + ½·½)² = 0.25; RHS = 2(¼ log ½ + ¾ log 3/2) ≈ 0.2616.
        let m = [1.0, 1.0];
        let mu = [0.5, 0.5];
        let g = [0.5, 1.5];
        let rhs = 2.0 * (0.25 * 0.5f64.ln() + 0.75 * 1.5f64.ln());
        assert_relative_eq!(rhs, 0.26162, max_relative = 1e-4);
        assert!(verify_csiszar_kullback(&m, &mu, &g).unwrap());
        assert!(verify_csiszar_kullback(&m, &mu, &[1.0, 1.0]).unwrap());
        assert!(verify_csiszar_kullback(&m, &mu, &[1.0, 2.0]).is_err()); // g-mass ≠ 1
    }

    #[test]
    fn means_lemma_examples() {
        let m = [0.5, 0.3, 0.2];
        // probability weights: Σ m μ = 1
        let mu = [1.0, 1.25, 0.625];
        let g = [0.0, 2.0, -1.0];
        for q in [1.0, 2.0, 4.0, f64::INFINITY] {
            assert!(verify_means_lemma(&m, &mu, &g, q));
        }
        assert!(verify_means_lemma(&m, &mu, &[3.0, 3.0, 3.0], 2.0));
    }

    #[test]
    fn logsob_ddfv_zero_at_steady() {
        let mesh = PrimalMesh::generate_cartesian(3, 3, [0.0, 1.0, 0.0, 1.0]).unwrap();
        let dd = DdfvMesh::build(mesh, &|_| Tensor::identity()).unwrap();
        let v = vec![2.0; dd.n_unknowns()];
        let sides = verify_logsob_ddfv(&dd, &v, &v).unwrap();
        assert_relative_eq!(sides.lhs, 0.0);
        assert_relative_eq!(sides.grad_sum, 0.0);
        assert_relative_eq!(sides.m1, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn ddfv_dissipation_is_quadratic_form() {
        let mesh = PrimalMesh::generate_cartesian(3, 3, [0.0, 1.0, 0.0, 1.0]).unwrap();
        let dd = DdfvMesh::build(mesh, &|_| Tensor::identity()).unwrap();
        let p = DdfvProblem::new(dd, |q| -q.y, MeanKind::Logarithmic, Combiner::Max, 1e-3)
            .unwrap();
        let steady = p.steady_state(&vec![1.0; p.mesh.n_unknowns()]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let u: Vec<f64> = (0..p.mesh.n_unknowns())
            .map(|_| rng.gen_range(0.5..2.0))
            .collect();
        let val = dissipation_ddfv(&p, &u, &steady);
        assert!(val >= 0.0);
        assert_relative_eq!(dissipation_ddfv(&p, &steady, &steady), 0.0);
    }

    #[test]
    fn csv_roundtrip_shape() {
        let rec = EntropyRecord {
            t: 0.5,
            entropies: vec![1.0, 2.0],
            i1: 3.0,
            mass_primal: 1.0,
            mass_dual: 1.0,
            l1: 0.1,
            l2: 0.2,
            newton_iters: 2,
        };
        let mut buf = Vec::new();
        write_series_csv(&mut buf, &[1.0, 2.0], &[rec]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,E1,E2,I1,mass_primal,mass_dual,L1,L2,newton_iters"
        );
        assert_eq!(lines.next().unwrap().split(',').count(), 9);
    }
}
