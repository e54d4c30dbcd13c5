//! Dual and diamond meshes for the DDFV scheme, with per-diamond geometry,
//! discrete gradients and the local matrices `A^D` encoding the anisotropy.
//!
//! Unknowns live on an extended primal mesh `M̄` (interior cells plus one
//! degenerate cell per boundary edge, located at the edge midpoint) and on
//! the vertex-centered dual mesh `M̄*`. One diamond is attached to every
//! primal edge; its diagonals are the edge `σ` (connecting the two dual
//! centers) and the segment `σ*` connecting the two primal centers. On the
//! boundary the diamond degenerates to a triangle.

use crate::geom::{segment_intersection, triangle_area, Point, Tensor};
use crate::mesh::PrimalMesh;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualKind {
    Interior,
    Boundary,
}

/// Vertex-centered dual cell; its area is accumulated from the diamond
/// sub-triangles, so dual cells tile the domain exactly.
#[derive(Debug, Clone)]
pub struct DualCell {
    pub vertex: usize,
    pub kind: DualKind,
    pub area: f64,
    pub diamonds: Vec<usize>,
}

/// Diamond cell attached to one primal edge.
#[derive(Debug, Clone)]
pub struct Diamond {
    pub edge: usize,
    /// Primal unknown indices (interior cell id, or extended index of the
    /// degenerate boundary cell for `l`).
    pub k: usize,
    pub l: usize,
    /// Dual unknown positions (vertex ids of the primal edge).
    pub kstar: usize,
    pub lstar: usize,
    pub m_sigma: f64,
    pub m_sigma_star: f64,
    pub sin_alpha: f64,
    pub area: f64,
    pub diameter: f64,
    /// Diagonal intersection, where the anisotropy tensor is sampled.
    pub x_d: Point,
    pub n_sigma_k: Point,
    pub n_sigma_star_kstar: Point,
    /// Local matrix entries `(A_σσ, A_σσ*, A_σ*σ*)`.
    pub a: [f64; 3],
    pub theta: f64,
    pub theta_tilde: f64,
}

impl Diamond {
    /// Diagonal dominance bound `B^D = diag(|A_σσ|+|A_σσ*|, |A_σ*σ*|+|A_σσ*|)`.
    pub fn b_matrix(&self) -> (f64, f64) {
        (
            self.a[0].abs() + self.a[1].abs(),
            self.a[2].abs() + self.a[1].abs(),
        )
    }

    /// Quadratic form `w · A^D w`.
    pub fn quad_form(&self, w: (f64, f64)) -> f64 {
        self.a[0] * w.0 * w.0 + 2.0 * self.a[1] * w.0 * w.1 + self.a[2] * w.1 * w.1
    }
}

/// Primal + dual + diamond structure derived from a primal mesh.
#[derive(Debug, Clone)]
pub struct DdfvMesh {
    pub primal: PrimalMesh,
    /// Boundary edge ids, in order of the degenerate-cell indices.
    pub boundary_edges: Vec<usize>,
    /// Location of every primal unknown (cell centers, then boundary edge
    /// midpoints).
    pub primal_points: Vec<Point>,
    pub dual: Vec<DualCell>,
    pub diamonds: Vec<Diamond>,
    /// Regularity bound `Θ = max_D max(θ_D, θ̃_D)`.
    pub theta: f64,
}

impl DdfvMesh {
    /// Number of interior primal cells.
    pub fn n_cells(&self) -> usize {
        self.primal.cells.len()
    }

    /// Number of primal unknowns (interior + degenerate boundary cells).
    pub fn n_primal(&self) -> usize {
        self.primal.cells.len() + self.boundary_edges.len()
    }

    /// Total unknown count (primal block followed by the dual block).
    pub fn n_unknowns(&self) -> usize {
        self.n_primal() + self.primal.vertices.len()
    }

    /// Index of the dual unknown at vertex `v`.
    pub fn dual_index(&self, v: usize) -> usize {
        self.n_primal() + v
    }

    /// Build the dual/diamond structure; the primal mesh need not be
    /// TPFA-admissible. `lambda` is sampled at each diamond center.
    pub fn build(primal: PrimalMesh, lambda: &dyn Fn(Point) -> Tensor) -> Result<Self> {
        let n_cells = primal.cells.len();
        let boundary_edges: Vec<usize> = primal
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_boundary())
            .map(|(i, _)| i)
            .collect();
        let mut bcell_of_edge = vec![usize::MAX; primal.edges.len()];
        for (b, &eid) in boundary_edges.iter().enumerate() {
            bcell_of_edge[eid] = n_cells + b;
        }
        let mut primal_points: Vec<Point> = primal.cells.iter().map(|c| c.center).collect();
        primal_points.extend(boundary_edges.iter().map(|&e| primal.edges[e].midpoint));

        let mut dual: Vec<DualCell> = (0..primal.vertices.len())
            .map(|v| DualCell {
                vertex: v,
                kind: DualKind::Interior,
                area: 0.0,
                diamonds: Vec::new(),
            })
            .collect();
        for &eid in &boundary_edges {
            for &v in &primal.edges[eid].vertices {
                dual[v].kind = DualKind::Boundary;
            }
        }

        let mut diamonds = Vec::with_capacity(primal.edges.len());
        let mut theta_max: f64 = 1.0;
        for (eid, e) in primal.edges.iter().enumerate() {
            let (kstar, lstar) = (e.vertices[0], e.vertices[1]);
            let (a_pt, b_pt) = (primal.vertices[kstar], primal.vertices[lstar]);
            let k = e.cells.0;
            let xk = primal.cells[k].center;
            let (l, xl) = match e.cells.1 {
                Some(cl) => (cl, primal.cells[cl].center),
                None => (bcell_of_edge[eid], e.midpoint),
            };
            let t_sigma = b_pt - a_pt;
            let m_sigma = t_sigma.norm();
            let t_star = xl - xk;
            let m_star = t_star.norm();
            let sin_alpha = (t_sigma.perp(&t_star)).abs() / (m_sigma * m_star);
            if sin_alpha < 1e-12 {
                return Err(Error::InvalidMesh(format!(
                    "degenerate diamond on edge {:?} (sin α = {sin_alpha:.3e})",
                    e.vertices
                )));
            }
            let area = 0.5 * m_sigma * m_star * sin_alpha;
            // Unit normals: across σ away from K, across σ* away from K*.
            let mut n_k = Point::new(t_sigma.y, -t_sigma.x) / m_sigma;
            if n_k.dot(&(e.midpoint - xk)) < 0.0 {
                n_k = -n_k;
            }
            let mut n_ks = Point::new(t_star.y, -t_star.x) / m_star;
            if n_ks.dot(&(0.5 * (xk + xl) - a_pt)) < 0.0 {
                n_ks = -n_ks;
            }
            let x_d = segment_intersection(a_pt, b_pt, xk, xl).ok_or_else(|| {
                Error::InvalidMesh(format!("parallel diagonals on edge {:?}", e.vertices))
            })?;
            let lam = lambda(x_d);
            let c = 1.0 / (4.0 * area);
            let a_ss = c * m_sigma * m_sigma * (lam * n_k).dot(&n_k);
            let a_cross = c * m_sigma * m_star * (lam * n_k).dot(&n_ks);
            let a_xx = c * m_star * m_star * (lam * n_ks).dot(&n_ks);

            let theta = 0.5 / sin_alpha * (m_sigma / m_star + m_star / m_sigma);
            // Sub-areas on either side of each diagonal (zero-area parts of
            // degenerate boundary diamonds are skipped).
            let parts = [
                triangle_area(xk, a_pt, b_pt),
                triangle_area(xl, a_pt, b_pt),
                triangle_area(a_pt, xk, xl),
                triangle_area(b_pt, xk, xl),
            ];
            let mut theta_tilde: f64 = 1.0;
            for s in parts {
                if s > 1e-14 * area {
                    theta_tilde = theta_tilde.max(area / s);
                }
            }
            theta_max = theta_max.max(theta.max(theta_tilde));

            // Dual sub-triangle split (diamond ∩ dual cell).
            dual[kstar].area += parts[2];
            dual[lstar].area += parts[3];
            dual[kstar].diamonds.push(diamonds.len());
            dual[lstar].diamonds.push(diamonds.len());

            let pts = [xk, a_pt, xl, b_pt];
            let mut diameter: f64 = 0.0;
            for i in 0..4 {
                for j in (i + 1)..4 {
                    diameter = diameter.max((pts[i] - pts[j]).norm());
                }
            }
            diamonds.push(Diamond {
                edge: eid,
                k,
                l,
                kstar,
                lstar,
                m_sigma,
                m_sigma_star: m_star,
                sin_alpha,
                area,
                diameter,
                x_d,
                n_sigma_k: n_k,
                n_sigma_star_kstar: n_ks,
                a: [a_ss, a_cross, a_xx],
                theta,
                theta_tilde,
            });
        }
        for d in &dual {
            if d.area <= 0.0 {
                return Err(Error::InvalidMesh(format!(
                    "inverted or empty dual cell at vertex {}",
                    d.vertex
                )));
            }
        }
        Ok(Self {
            primal,
            boundary_edges,
            primal_points,
            dual,
            diamonds,
            theta: theta_max,
        })
    }

    /// Per-diamond difference vector `δ^D u = (u_K − u_L, u_K* − u_L*)`.
    pub fn delta(&self, u: &[f64], d: usize) -> (f64, f64) {
        let dm = &self.diamonds[d];
        (
            u[dm.k] - u[dm.l],
            u[self.dual_index(dm.kstar)] - u[self.dual_index(dm.lstar)],
        )
    }

    /// Diamond-wise discrete gradient
    /// `∇^D u = (1/(2 m_D)) (m_σ (u_L − u_K) n_σK + m_σ* (u_L* − u_K*) n_σ*K*)`.
    pub fn discrete_gradient(&self, u: &[f64], d: usize) -> Point {
        let dm = &self.diamonds[d];
        let (d1, d2) = self.delta(u, d);
        (dm.m_sigma * (-d1) * dm.n_sigma_k + dm.m_sigma_star * (-d2) * dm.n_sigma_star_kstar)
            / (2.0 * dm.area)
    }

    /// Evaluate a function at all unknown locations (primal then dual).
    pub fn sample(&self, f: impl Fn(Point) -> f64) -> Vec<f64> {
        let mut v: Vec<f64> = self.primal_points.iter().map(|&p| f(p)).collect();
        v.extend(self.primal.vertices.iter().map(|&p| f(p)));
        v
    }

    /// Mass of the interior-primal block of a state.
    pub fn primal_mass(&self, u: &[f64]) -> f64 {
        self.primal
            .cells
            .iter()
            .zip(u)
            .map(|(c, &v)| c.area * v)
            .sum()
    }

    /// Mass of the dual block of a state.
    pub fn dual_mass(&self, u: &[f64]) -> f64 {
        self.dual
            .iter()
            .map(|d| d.area * u[self.dual_index(d.vertex)])
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn identity(_: Point) -> Tensor {
        Tensor::identity()
    }

    fn cartesian_ddfv(n: usize) -> DdfvMesh {
        let m = PrimalMesh::generate_cartesian(n, n, [0.0, 1.0, 0.0, 1.0]).unwrap();
        DdfvMesh::build(m, &identity).unwrap()
    }

    #[test]
    fn cartesian_diamond_geometry() {
        let n = 4;
        let dd = cartesian_ddfv(n);
        let h = 1.0 / n as f64;
        for d in &dd.diamonds {
            if dd.primal.edges[d.edge].is_boundary() {
                continue;
            }
            assert_relative_eq!(d.m_sigma, h, max_relative = 1e-12);
            assert_relative_eq!(d.m_sigma_star, h, max_relative = 1e-12);
            assert_relative_eq!(d.sin_alpha, 1.0, max_relative = 1e-12);
            assert_relative_eq!(d.area, 0.5 * h * h, max_relative = 1e-12);
            assert_relative_eq!(d.a[0], 0.5, max_relative = 1e-12);
            assert_relative_eq!(d.a[2], 0.5, max_relative = 1e-12);
            assert!(d.a[1].abs() < 1e-12);
            assert_relative_eq!(d.theta, 1.0, max_relative = 1e-12);
            let b = d.b_matrix();
            assert_relative_eq!(b.0, 0.5, max_relative = 1e-12);
            assert_relative_eq!(b.1, 0.5, max_relative = 1e-12);
        }
    }

    #[test]
    fn partitions_of_unity() {
        for dd in [
            cartesian_ddfv(5),
            DdfvMesh::build(
                PrimalMesh::generate_distorted_quad(8, 0.3).unwrap(),
                &identity,
            )
            .unwrap(),
            DdfvMesh::build(PrimalMesh::generate_triangular(1).unwrap(), &identity).unwrap(),
        ] {
            let a_d: f64 = dd.diamonds.iter().map(|d| d.area).sum();
            let a_dual: f64 = dd.dual.iter().map(|d| d.area).sum();
            let a_primal = dd.primal.area();
            assert_relative_eq!(a_d, a_primal, max_relative = 1e-10);
            assert_relative_eq!(a_dual, a_primal, max_relative = 1e-10);
        }
    }

    #[test]
    fn gradient_exact_on_affine() {
        for dd in [
            cartesian_ddfv(4),
            DdfvMesh::build(
                PrimalMesh::generate_distorted_quad(6, 0.25).unwrap(),
                &identity,
            )
            .unwrap(),
        ] {
            let (ax, ay, b) = (1.7, -0.6, 0.3);
            let u = dd.sample(|p| ax * p.x + ay * p.y + b);
            for d in 0..dd.diamonds.len() {
                let g = dd.discrete_gradient(&u, d);
                assert_relative_eq!(g.x, ax, max_relative = 1e-10, epsilon = 1e-10);
                assert_relative_eq!(g.y, ay, max_relative = 1e-10, epsilon = 1e-10);
            }
            let c = dd.sample(|_| 2.5);
            for d in 0..dd.diamonds.len() {
                assert!(dd.discrete_gradient(&c, d).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn delta_examples() {
        let dd = cartesian_ddfv(2);
        let mut u = vec![0.0; dd.n_unknowns()];
        let dm = dd.diamonds[0].clone();
        u[dm.k] = 3.0;
        u[dm.l] = 1.0;
        u[dd.dual_index(dm.kstar)] = 5.0;
        u[dd.dual_index(dm.lstar)] = 2.0;
        assert_eq!(dd.delta(&u, 0), (2.0, 3.0));
    }

    #[test]
    fn quad_form_identity_and_b_domination() {
        let lam = |_: Point| Tensor::new(0.35, 0.1, 0.1, 1.4);
        let dd = DdfvMesh::build(PrimalMesh::generate_distorted_quad(6, 0.25).unwrap(), &lam)
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u: Vec<f64> = (0..dd.n_unknowns()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let l = lam(Point::new(0.0, 0.0));
        for d in 0..dd.diamonds.len() {
            let dm = &dd.diamonds[d];
            let delta = dd.delta(&u, d);
            let g = dd.discrete_gradient(&u, d);
            assert_relative_eq!(
                dm.quad_form(delta),
                dm.area * (l * g).dot(&g),
                max_relative = 1e-10,
                epsilon = 1e-12
            );
        }
        // w·A w ≤ w·B w and positive definiteness.
        for _ in 0..1000 {
            let d = rng.gen_range(0..dd.diamonds.len());
            let dm = &dd.diamonds[d];
            let w = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let b = dm.b_matrix();
            assert!(dm.quad_form(w) <= b.0 * w.0 * w.0 + b.1 * w.1 * w.1 + 1e-12);
            if w.0 != 0.0 || w.1 != 0.0 {
                assert!(dm.quad_form(w) > 0.0);
            }
        }
        // θ, θ̃ ≥ 1 and Θ consistent.
        for dm in &dd.diamonds {
            assert!(dm.theta >= 1.0 - 1e-12);
            assert!(dm.theta_tilde >= 1.0 - 1e-12);
        }
        assert!(dd.theta >= 1.0);
    }
}
