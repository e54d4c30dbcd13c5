//! Nonlinear DDFV scheme: the bilinear form `T_𝔇`, backward-Euler residuals
//! on primal and dual unknowns, analytic Jacobians and the two-mesh steady
//! state. Boundary conditions are Neumann-only.
//!
//! The step solves `⟦(u − u_old)/Δt, ψ⟧ + T_𝔇(u; g, ψ) = 0` for all test
//! vectors `ψ`, with `g = log u + V` and
//! `T_𝔇(u; g, ψ) = Σ_D r^D(u) δ^D g · A^D δ^D ψ`; testing against indicator
//! vectors gives one residual entry per unknown. Degenerate boundary cells
//! carry no mass and enter only through the flux terms.

use crate::ddfv_mesh::DdfvMesh;
use crate::geom::Point;
use crate::kernels::MeanKind;
use crate::newton::TimeStepScheme;
use crate::par;
use crate::sparse::Triplets;
use crate::{Error, Result};

/// Combiner `f` of the two per-mesh means in `r^D = f(r(u_K,u_L), r(u_K*,u_L*))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combiner {
    Max,
    Arithmetic,
}

impl Combiner {
    pub fn name(self) -> &'static str {
        match self {
            Combiner::Max => "max",
            Combiner::Arithmetic => "arithmetic",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "max" => Ok(Combiner::Max),
            "arithmetic" | "arith" => Ok(Combiner::Arithmetic),
            other => Err(Error::InvalidArgument(format!("unknown combiner '{other}'"))),
        }
    }

    #[inline]
    fn value_and_derivs(self, x: f64, y: f64) -> (f64, f64, f64) {
        match self {
            Combiner::Arithmetic => (0.5 * (x + y), 0.5, 0.5),
            Combiner::Max => {
                if x >= y {
                    (x, 1.0, 0.0)
                } else {
                    (y, 0.0, 1.0)
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct DdfvProblem {
    pub mesh: DdfvMesh,
    /// Potential at every unknown location (primal block then dual block).
    pub v: Vec<f64>,
    pub mean: MeanKind,
    pub combiner: Combiner,
    pub dt: f64,
}

impl DdfvProblem {
    pub fn new(
        mesh: DdfvMesh,
        potential: impl Fn(Point) -> f64,
        mean: MeanKind,
        combiner: Combiner,
        dt: f64,
    ) -> Result<Self> {
        if dt <= 0.0 {
            return Err(Error::InvalidArgument("dt must be positive".into()));
        }
        let v = mesh.sample(&potential);
        Ok(Self {
            mesh,
            v,
            mean,
            combiner,
            dt,
        })
    }

    fn check_positive(&self, u: &[f64]) -> Result<()> {
        for (i, &v) in u.iter().enumerate() {
            if v <= 0.0 {
                return Err(Error::NonPositiveState { index: i, value: v });
            }
        }
        Ok(())
    }

    /// Mobility reconstruction `r^D(u) = f(r(u_K,u_L), r(u_K*,u_L*))`.
    pub fn reconstruct_rd(&self, u: &[f64], d: usize) -> f64 {
        let dm = &self.mesh.diamonds[d];
        let r1 = self.mean.value(u[dm.k], u[dm.l]);
        let r2 = self
            .mean
            .value(u[self.mesh.dual_index(dm.kstar)], u[self.mesh.dual_index(dm.lstar)]);
        self.combiner.value_and_derivs(r1, r2).0
    }

    /// `T_𝔇(u; g, ψ) = Σ_D r^D(u) δ^D g · A^D δ^D ψ`; symmetric in `g ↔ ψ`.
    pub fn bilinear_t(&self, u: &[f64], g: &[f64], psi: &[f64]) -> f64 {
        par::sum_indexed(self.mesh.diamonds.len(), |d| {
            let dm = &self.mesh.diamonds[d];
            let dg = self.mesh.delta(g, d);
            let dp = self.mesh.delta(psi, d);
            let rd = self.reconstruct_rd(u, d);
            rd * (dm.a[0] * dg.0 * dp.0
                + dm.a[1] * (dg.0 * dp.1 + dg.1 * dp.0)
                + dm.a[2] * dg.1 * dp.1)
        })
    }

    /// `g = log u + V` at every unknown.
    pub fn log_state(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(&self.v).map(|(&ui, &vi)| ui.ln() + vi).collect()
    }

    /// Diagonal of the two-mesh mass bilinear form `⟦·,·⟧` (zero on the
    /// degenerate boundary cells).
    pub fn mass_diag(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.mesh.n_unknowns()];
        for (k, c) in self.mesh.primal.cells.iter().enumerate() {
            m[k] = 0.5 * c.area;
        }
        for d in &self.mesh.dual {
            m[self.mesh.dual_index(d.vertex)] = 0.5 * d.area;
        }
        m
    }

    /// Backward-Euler residual at `u_new`.
    pub fn residual(&self, u_new: &[f64], u_old: &[f64]) -> Result<Vec<f64>> {
        self.check_positive(u_new)?;
        let mut out = vec![0.0; self.mesh.n_unknowns()];
        self.residual_into(u_new, u_old, &mut out);
        Ok(out)
    }

    fn residual_into(&self, u_new: &[f64], u_old: &[f64], out: &mut [f64]) {
        let mass = self.mass_diag();
        for i in 0..out.len() {
            out[i] = mass[i] * (u_new[i] - u_old[i]) / self.dt;
        }
        let flux = par::map_indexed(self.mesh.diamonds.len(), |d| {
            let dm = &self.mesh.diamonds[d];
            let g = |i: usize| u_new[i].ln() + self.v[i];
            let dg = (
                g(dm.k) - g(dm.l),
                g(self.mesh.dual_index(dm.kstar)) - g(self.mesh.dual_index(dm.lstar)),
            );
            let rd = self.reconstruct_rd(u_new, d);
            (
                rd * (dm.a[0] * dg.0 + dm.a[1] * dg.1),
                rd * (dm.a[1] * dg.0 + dm.a[2] * dg.1),
            )
        });
        for (d, dm) in self.mesh.diamonds.iter().enumerate() {
            let (w1, w2) = flux[d];
            out[dm.k] += w1;
            out[dm.l] -= w1;
            out[self.mesh.dual_index(dm.kstar)] += w2;
            out[self.mesh.dual_index(dm.lstar)] -= w2;
        }
    }

    /// Analytic Jacobian (each diamond couples its four corners).
    pub fn jacobian(&self, u: &[f64]) -> Result<Triplets> {
        self.check_positive(u)?;
        Ok(self.jacobian_unchecked(u))
    }

    fn jacobian_unchecked(&self, u: &[f64]) -> Triplets {
        let n = self.mesh.n_unknowns();
        let mass = self.mass_diag();
        // Per-diamond 4×4 blocks, computed in parallel, scattered serially.
        let blocks = par::map_indexed(self.mesh.diamonds.len(), |d| {
            let dm = &self.mesh.diamonds[d];
            let idx = [
                dm.k,
                dm.l,
                self.mesh.dual_index(dm.kstar),
                self.mesh.dual_index(dm.lstar),
            ];
            let g = |i: usize| u[i].ln() + self.v[i];
            let dg = (g(idx[0]) - g(idx[1]), g(idx[2]) - g(idx[3]));
            let (r1, r1k, r1l) = self.mean.value_and_derivs(u[idx[0]], u[idx[1]]);
            let (r2, r2k, r2l) = self.mean.value_and_derivs(u[idx[2]], u[idx[3]]);
            let (rd, f1, f2) = self.combiner.value_and_derivs(r1, r2);
            let drd = [f1 * r1k, f1 * r1l, f2 * r2k, f2 * r2l];
            let w = (
                dm.a[0] * dg.0 + dm.a[1] * dg.1,
                dm.a[1] * dg.0 + dm.a[2] * dg.1,
            );
            // δg derivative of corner b: component (first for K/L, second for
            // K*/L*) with sign, times 1/u_b.
            let dgd = [
                (1.0 / u[idx[0]], 0.0),
                (-1.0 / u[idx[1]], 0.0),
                (0.0, 1.0 / u[idx[2]]),
                (0.0, -1.0 / u[idx[3]]),
            ];
            let mut block = [[0.0f64; 4]; 4];
            for (bi, (dd, &dr)) in dgd.iter().zip(&drd).enumerate() {
                let dw = (
                    dm.a[0] * dd.0 + dm.a[1] * dd.1,
                    dm.a[1] * dd.0 + dm.a[2] * dd.1,
                );
                // Rows: K (+w1), L (−w1), K* (+w2), L* (−w2).
                block[0][bi] = dr * w.0 + rd * dw.0;
                block[1][bi] = -block[0][bi];
                block[2][bi] = dr * w.1 + rd * dw.1;
                block[3][bi] = -block[2][bi];
            }
            (idx, block)
        });
        let mut t = Triplets::new(n);
        for (i, &m) in mass.iter().enumerate() {
            t.push(i, i, m / self.dt);
        }
        for (idx, block) in &blocks {
            for (ai, row) in block.iter().enumerate() {
                for (bi, &v) in row.iter().enumerate() {
                    t.push(idx[ai], idx[bi], v);
                }
            }
        }
        t
    }

    /// Two-mesh thermal equilibrium `ρ e^{−V}` / `ρ* e^{−V}`, with `ρ`, `ρ*`
    /// fixed by the primal and dual masses of the supplied state (use the
    /// positivity-projected initial state, whose masses the scheme
    /// conserves).
    pub fn steady_state(&self, u0: &[f64]) -> Result<Vec<f64>> {
        let emv: Vec<f64> = self.v.iter().map(|&v| (-v).exp()).collect();
        let mp = self.mesh.primal_mass(u0);
        let md = self.mesh.dual_mass(u0);
        if mp <= 0.0 || md <= 0.0 {
            return Err(Error::InvalidArgument(
                "steady state requires positive masses on both meshes".into(),
            ));
        }
        let rho = mp / self.mesh.primal_mass(&emv);
        let rho_star = md / self.mesh.dual_mass(&emv);
        let np = self.mesh.n_primal();
        Ok(emv
            .iter()
            .enumerate()
            .map(|(i, &e)| if i < np { rho * e } else { rho_star * e })
            .collect())
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj: Vec<Vec<usize>> = (0..self.mesh.n_unknowns()).map(|i| vec![i]).collect();
        for dm in &self.mesh.diamonds {
            let idx = [
                dm.k,
                dm.l,
                self.mesh.dual_index(dm.kstar),
                self.mesh.dual_index(dm.lstar),
            ];
            for &a in &idx {
                for &b in &idx {
                    if a != b {
                        adj[a].push(b);
                    }
                }
            }
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }

    /// Initial state: point values of `u0` on interior cells and dual
    /// vertices, zero on the degenerate boundary cells.
    pub fn initial_state(mesh: &DdfvMesh, u0: impl Fn(Point) -> f64) -> Vec<f64> {
        let mut u = mesh.sample(&u0);
        for b in mesh.n_cells()..mesh.n_primal() {
            u[b] = 0.0;
        }
        u
    }
}

impl TimeStepScheme for DdfvProblem {
    fn n_unknowns(&self) -> usize {
        self.mesh.n_unknowns()
    }

    fn residual(&self, u: &[f64], u_old: &[f64], out: &mut [f64]) {
        self.residual_into(u, u_old, out);
    }

    fn jacobian(&self, u: &[f64]) -> Triplets {
        self.jacobian_unchecked(u)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        DdfvProblem::adjacency(self)
    }
}
