//! Nonlinear two-point flux scheme on admissible meshes: backward-Euler
//! residuals, analytic Jacobians and thermal-equilibrium steady states.
//!
//! One step solves, for every cell `K`,
//! `m_K (u_K − u_K_old)/Δt + Σ_{σ∈E_K} F_{K,σ} = 0` with the nonlinear flux
//! `F_{K,σ} = −τ_σ r(u_K, u_{K,σ}) (g_{K,σ} − g_K)`, `g = log u + V`, where
//! the neighbor value `u_{K,σ}` is the opposite cell value on interior
//! edges, the boundary datum on Dirichlet edges and `u_K` itself on Neumann
//! edges (which makes Neumann fluxes vanish).

use crate::geom::Point;
use crate::kernels::MeanKind;
use crate::mesh::{EdgeKind, PrimalMesh};
use crate::newton::TimeStepScheme;
use crate::par;
use crate::sparse::Triplets;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct TpfaProblem {
    pub mesh: PrimalMesh,
    /// `V(x_K)` per cell.
    pub v_cell: Vec<f64>,
    /// `V(x_σ)` per edge (only read on Dirichlet edges).
    pub v_edge: Vec<f64>,
    /// Dirichlet data `u_σ^D` per edge (`NaN` on non-Dirichlet edges).
    pub u_dirichlet: Vec<f64>,
    pub mean: MeanKind,
    pub dt: f64,
}

impl TpfaProblem {
    /// Assemble a problem from nodal potential values and (optional)
    /// Dirichlet data. Dirichlet data must be in thermal equilibrium:
    /// `log u_σ^D + V_σ` constant across Dirichlet edges.
    pub fn new(
        mesh: PrimalMesh,
        potential: impl Fn(Point) -> f64,
        dirichlet: Option<&dyn Fn(Point) -> f64>,
        mean: MeanKind,
        dt: f64,
    ) -> Result<Self> {
        if dt <= 0.0 {
            return Err(Error::InvalidArgument("dt must be positive".into()));
        }
        let v_cell: Vec<f64> = mesh.cells.iter().map(|c| potential(c.center)).collect();
        let v_edge: Vec<f64> = mesh.edges.iter().map(|e| potential(e.midpoint)).collect();
        let mut u_dirichlet = vec![f64::NAN; mesh.edges.len()];
        let mut alpha: Option<f64> = None;
        for (eid, e) in mesh.edges.iter().enumerate() {
            if e.kind == EdgeKind::Dirichlet {
                let f = dirichlet.ok_or_else(|| {
                    Error::InvalidArgument("mesh has Dirichlet edges but no data supplied".into())
                })?;
                let ud = f(e.midpoint);
                if ud <= 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "non-positive Dirichlet datum {ud:.3e}"
                    )));
                }
                let a = ud.ln() + v_edge[eid];
                match alpha {
                    None => alpha = Some(a),
                    Some(a0) if (a - a0).abs() > 1e-10 => {
                        return Err(Error::InvalidArgument(format!(
                            "Dirichlet data not in thermal equilibrium: log u^D + V varies \
                             ({a0:.12} vs {a:.12})"
                        )));
                    }
                    _ => {}
                }
                u_dirichlet[eid] = ud;
            }
        }
        Ok(Self {
            mesh,
            v_cell,
            v_edge,
            u_dirichlet,
            mean,
            dt,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.mesh.cells.len()
    }

    fn check_positive(&self, u: &[f64]) -> Result<()> {
        for (i, &v) in u.iter().enumerate() {
            if v <= 0.0 {
                return Err(Error::NonPositiveState { index: i, value: v });
            }
        }
        Ok(())
    }

    /// Neighbor value of cell `k` across edge `eid`.
    pub fn neighbor_value(&self, u: &[f64], k: usize, eid: usize) -> f64 {
        let e = &self.mesh.edges[eid];
        match e.kind {
            EdgeKind::Interior => u[e.other_cell(k).unwrap()],
            EdgeKind::Dirichlet => self.u_dirichlet[eid],
            EdgeKind::Neumann => u[k],
        }
    }

    /// Flux `F_{K,σ}` leaving cell `k` through edge `eid`; antisymmetric on
    /// interior edges and identically zero on Neumann edges.
    pub fn flux(&self, u: &[f64], k: usize, eid: usize) -> Result<f64> {
        self.check_positive(u)?;
        let e = &self.mesh.edges[eid];
        let sign = if e.cells.0 == k { 1.0 } else { -1.0 };
        Ok(sign * self.oriented_flux(u, eid).0)
    }

    /// Flux through `eid` oriented out of `edge.cells.0`, plus its
    /// derivatives with respect to (u_K0, u_neighbor).
    #[inline]
    fn oriented_flux(&self, u: &[f64], eid: usize) -> (f64, f64, f64) {
        let e = &self.mesh.edges[eid];
        let k = e.cells.0;
        match e.kind {
            EdgeKind::Neumann => (0.0, 0.0, 0.0),
            EdgeKind::Interior => {
                let l = e.cells.1.unwrap();
                let d = (u[l].ln() + self.v_cell[l]) - (u[k].ln() + self.v_cell[k]);
                let (r, r1, r2) = self.mean.value_and_derivs(u[k], u[l]);
                (
                    -e.tau * r * d,
                    -e.tau * (r1 * d - r / u[k]),
                    -e.tau * (r2 * d + r / u[l]),
                )
            }
            EdgeKind::Dirichlet => {
                let ud = self.u_dirichlet[eid];
                let d = (ud.ln() + self.v_edge[eid]) - (u[k].ln() + self.v_cell[k]);
                let (r, r1, _) = self.mean.value_and_derivs(u[k], ud);
                (-e.tau * r * d, -e.tau * (r1 * d - r / u[k]), 0.0)
            }
        }
    }

    /// Backward-Euler residual at `u_new` given the previous state.
    pub fn residual(&self, u_new: &[f64], u_old: &[f64]) -> Result<Vec<f64>> {
        self.check_positive(u_new)?;
        let mut out = vec![0.0; self.n_cells()];
        self.residual_into(u_new, u_old, &mut out);
        Ok(out)
    }

    fn residual_into(&self, u_new: &[f64], u_old: &[f64], out: &mut [f64]) {
        let fluxes = par::map_indexed(self.mesh.edges.len(), |eid| {
            self.oriented_flux(u_new, eid).0
        });
        for (k, cell) in self.mesh.cells.iter().enumerate() {
            out[k] = cell.area * (u_new[k] - u_old[k]) / self.dt;
        }
        for (eid, e) in self.mesh.edges.iter().enumerate() {
            out[e.cells.0] += fluxes[eid];
            if let Some(l) = e.cells.1 {
                out[l] -= fluxes[eid];
            }
        }
    }

    /// Analytic Jacobian of the residual (cell-adjacency sparsity).
    pub fn jacobian(&self, u: &[f64]) -> Result<Triplets> {
        self.check_positive(u)?;
        Ok(self.jacobian_unchecked(u))
    }

    fn jacobian_unchecked(&self, u: &[f64]) -> Triplets {
        let derivs = par::map_indexed(self.mesh.edges.len(), |eid| {
            let (_, dk, dl) = self.oriented_flux(u, eid);
            (dk, dl)
        });
        let mut t = Triplets::new(self.n_cells());
        for (k, cell) in self.mesh.cells.iter().enumerate() {
            t.push(k, k, cell.area / self.dt);
        }
        for (eid, e) in self.mesh.edges.iter().enumerate() {
            let (dk, dl) = derivs[eid];
            let k = e.cells.0;
            match e.cells.1 {
                Some(l) => {
                    t.push(k, k, dk);
                    t.push(k, l, dl);
                    t.push(l, k, -dk);
                    t.push(l, l, -dl);
                }
                None => t.push(k, k, dk),
            }
        }
        t
    }

    /// Thermal-equilibrium steady state `u_K^∞ = ρ e^{−V_K}`. With Dirichlet
    /// edges `ρ = exp(α^D)`; in the pure Neumann case `ρ` is fixed by the
    /// initial mass carried by `u0`.
    pub fn steady_state(&self, u0: &[f64]) -> Result<Vec<f64>> {
        let rho = match self
            .mesh
            .edges
            .iter()
            .position(|e| e.kind == EdgeKind::Dirichlet)
        {
            Some(eid) => (self.u_dirichlet[eid].ln() + self.v_edge[eid]).exp(),
            None => {
                let mass: f64 = self
                    .mesh
                    .cells
                    .iter()
                    .zip(u0)
                    .map(|(c, &u)| c.area * u)
                    .sum();
                if mass <= 0.0 {
                    return Err(Error::InvalidArgument(
                        "steady state requires positive initial mass".into(),
                    ));
                }
                let z: f64 = self
                    .mesh
                    .cells
                    .iter()
                    .zip(&self.v_cell)
                    .map(|(c, &v)| c.area * (-v).exp())
                    .sum();
                mass / z
            }
        };
        Ok(self.v_cell.iter().map(|&v| rho * (-v).exp()).collect())
    }

    /// Cell adjacency of the Jacobian (for the linear solver ordering).
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj: Vec<Vec<usize>> = (0..self.n_cells()).map(|k| vec![k]).collect();
        for e in &self.mesh.edges {
            if let Some(l) = e.cells.1 {
                adj[e.cells.0].push(l);
                adj[l].push(e.cells.0);
            }
        }
        adj
    }

    /// Point-evaluate an initial datum at the scheme points `x_K`.
    pub fn initial_state(mesh: &PrimalMesh, u0: impl Fn(Point) -> f64) -> Vec<f64> {
        mesh.cells.iter().map(|c| u0(c.center)).collect()
    }

    /// Cell averages of an initial datum by the edge-midpoint rule (exact
    /// for quadratics on triangles; falls back per-vertex for polygons).
    pub fn initial_state_quadrature(mesh: &PrimalMesh, u0: impl Fn(Point) -> f64) -> Vec<f64> {
        mesh.cells
            .iter()
            .map(|c| {
                let n = c.vertices.len();
                let mut s = 0.0;
                for i in 0..n {
                    let a = mesh.vertices[c.vertices[i]];
                    let b = mesh.vertices[c.vertices[(i + 1) % n]];
                    s += u0(0.5 * (a + b));
                }
                s / n as f64
            })
            .collect()
    }
}

/// View of a problem implementing the Newton time-step interface.
impl TimeStepScheme for TpfaProblem {
    fn n_unknowns(&self) -> usize {
        self.n_cells()
    }

    fn residual(&self, u: &[f64], u_old: &[f64], out: &mut [f64]) {
        self.residual_into(u, u_old, out);
    }

    fn jacobian(&self, u: &[f64]) -> Triplets {
        self.jacobian_unchecked(u)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        TpfaProblem::adjacency(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_cell_problem(mean: MeanKind) -> TpfaProblem {
        // [0,1]² split into two 0.5×1 cells: interior edge with τ = 2.
        let mesh = PrimalMesh::generate_cartesian(2, 1, [0.0, 1.0, 0.0, 1.0]).unwrap();
        TpfaProblem::new(mesh, |_| 0.0, None, mean, 0.1).unwrap()
    }

    fn interior_edge(p: &TpfaProblem) -> usize {
        p.mesh.edges.iter().position(|e| !e.is_boundary()).unwrap()
    }

    #[test]
    fn neighbor_value_cases() {
        let p = two_cell_problem(MeanKind::Arithmetic);
        let u = [1.0, 3.0];
        let eid = interior_edge(&p);
        assert_relative_eq!(p.neighbor_value(&u, 0, eid), 3.0);
        let neu = p.mesh.edges.iter().position(|e| e.is_boundary()).unwrap();
        let k = p.mesh.edges[neu].cells.0;
        assert_relative_eq!(p.neighbor_value(&u, k, neu), u[k]);
        assert_relative_eq!(p.flux(&u, k, neu).unwrap(), 0.0);
    }

    #[test]
    fn flux_hand_values() {
        // Logarithmic mean: r·Δlog(u) telescopes to u_L − u_K, so
        // F = −τ(u_L − u_K) = −2·2 = −4.
        let p = two_cell_problem(MeanKind::Logarithmic);
        let u = [1.0, 3.0];
        let eid = interior_edge(&p);
        let k = p.mesh.edges[eid].cells.0;
        let f = p.flux(&u, k, eid).unwrap();
        let sgn = if u[k] == 1.0 { 1.0 } else { -1.0 };
        assert_relative_eq!(sgn * f, -4.0, max_relative = 1e-12);

        let p = two_cell_problem(MeanKind::Arithmetic);
        let f = p.flux(&u, k, eid).unwrap();
        assert_relative_eq!(sgn * f, -2.0 * 2.0 * 3.0f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn flux_antisymmetry_exact() {
        let p = two_cell_problem(MeanKind::SqrtSquare);
        let u = [0.37, 2.11];
        let eid = interior_edge(&p);
        let fk = p.flux(&u, 0, eid).unwrap();
        let fl = p.flux(&u, 1, eid).unwrap();
        assert_eq!(fk, -fl); // bitwise: same expression, negated
    }

    #[test]
    fn steady_state_zero_residual() {
        let mesh = PrimalMesh::generate_cartesian(3, 3, [0.0, 1.0, 0.0, 1.0]).unwrap();
        let p = TpfaProblem::new(mesh, |x| -x.x, None, MeanKind::Arithmetic, 0.1).unwrap();
        let u0 = vec![1.0; p.n_cells()];
        let s = p.steady_state(&u0).unwrap();
        let r = p.residual(&s, &s).unwrap();
        for v in r {
            assert!(v.abs() < 1e-12, "residual {v:.3e}");
        }
        // mass matches
        let m0: f64 = p.mesh.cells.iter().zip(&u0).map(|(c, u)| c.area * u).sum();
        let ms: f64 = p.mesh.cells.iter().zip(&s).map(|(c, u)| c.area * u).sum();
        assert_relative_eq!(m0, ms, max_relative = 1e-12);
    }

    #[test]
    fn constant_steady_state_for_zero_potential() {
        let mesh = PrimalMesh::generate_cartesian(2, 2, [0.0, 1.0, 0.0, 1.0]).unwrap();
        let p = TpfaProblem::new(mesh, |_| 0.0, None, MeanKind::Max, 0.1).unwrap();
        let s = p.steady_state(&vec![1.0; 4]).unwrap();
        for v in s {
            assert_relative_eq!(v, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mesh = PrimalMesh::generate_cartesian(4, 4, [0.0, 1.0, 0.0, 1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for mean in MeanKind::ALL {
            let p = TpfaProblem::new(mesh.clone(), |x| -x.x, None, mean, 0.05).unwrap();
            let n = p.n_cells();
            let u: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
            let u_old = vec![1.0; n];
            let jac = p.jacobian(&u).unwrap();
            let mut dense = vec![vec![0.0; n]; n];
            for &(i, j, v) in &jac.entries {
                dense[i as usize][j as usize] += v;
            }
            for j in 0..n {
                let h = 1e-6 * u[j];
                let mut up = u.clone();
                let mut um = u.clone();
                up[j] += h;
                um[j] -= h;
                let rp = p.residual(&up, &u_old).unwrap();
                let rm = p.residual(&um, &u_old).unwrap();
                for i in 0..n {
                    let fd = (rp[i] - rm[i]) / (2.0 * h);
                    if fd.abs() > 1e-9 || dense[i][j].abs() > 1e-9 {
                        assert_relative_eq!(dense[i][j], fd, max_relative = 1e-5);
                    }
                }
            }
        }
    }

    #[test]
    fn dirichlet_equilibrium_enforced() {
        let mut mesh = PrimalMesh::generate_cartesian(2, 2, [0.0, 1.0, 0.0, 1.0]).unwrap();
        mesh.set_boundary_tags(|p| {
            if p.x < 1e-12 || p.x > 1.0 - 1e-12 {
                crate::mesh::BoundaryTag::Dirichlet
            } else {
                crate::mesh::BoundaryTag::Neumann
            }
        });
        // u^D = e^{x}, V = −x: equilibrium (α^D = 0) — accepted.
        let ok = TpfaProblem::new(
            mesh.clone(),
            |x| -x.x,
            Some(&|x: Point| x.x.exp()),
            MeanKind::Arithmetic,
            0.1,
        );
        assert!(ok.is_ok());
        // u^D = 1 with V = −x is not in equilibrium — rejected.
        let bad = TpfaProblem::new(
            mesh,
            |x| -x.x,
            Some(&|_: Point| 1.0),
            MeanKind::Arithmetic,
            0.1,
        );
        assert!(bad.is_err());
    }
}
