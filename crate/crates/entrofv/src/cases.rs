//! Built-in test cases with closed-form solutions, plus a finite-difference
//! PDE-residual oracle that checks the closed forms against the model
//! `∂t u = div(Λ(∇u + u ∇V))` and their boundary conditions.

use std::f64::consts::PI;

use crate::geom::{Point, Tensor};
use crate::mesh::BoundaryTag;
use crate::{Error, Result};

/// Decay rate `π² + 1/4` of the transient modes in both closed forms.
pub const BASE_RATE: f64 = PI * PI + 0.25;

/// A test case: potential, anisotropy, boundary conditions, and exact
/// solution.
#[derive(Debug, Clone, Copy)]
pub enum TestCase {
    /// Isotropic problem with `V = −x₁`, Dirichlet data `u^D = e^{x₁}` on the
    /// left/right edges (thermal equilibrium) and no-flux top/bottom; exact
    /// solution `e^{x₁} + e^{x₁/2 − (π²+1/4)t} sin(πx₁)`.
    TpfaMixed,
    /// Anisotropic no-flux problem with `V = −x₂`, `Λ = diag(Λ₁₁, 1)`, and a
    /// perturbed exact solution whose `ε cos(πx₁)` mode decays at the slow
    /// rate `π²Λ₁₁`.
    DdfvEps { eps: f64, lambda11: f64 },
}

impl TestCase {
    pub fn parse(id: &str, eps: f64, lambda11: f64) -> Result<Self> {
        match id {
            "tpfa_mixed" => Ok(TestCase::TpfaMixed),
            "ddfv_eps" => Ok(TestCase::DdfvEps { eps, lambda11 }),
            other => Err(Error::InvalidArgument(format!("unknown test case '{other}'"))),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            TestCase::TpfaMixed => "tpfa_mixed",
            TestCase::DdfvEps { .. } => "ddfv_eps",
        }
    }

    pub fn potential(&self, p: Point) -> f64 {
        match self {
            TestCase::TpfaMixed => -p.x,
            TestCase::DdfvEps { .. } => -p.y,
        }
    }

    /// Constant diagonal anisotropy `(Λ₁₁, Λ₂₂)`.
    pub fn lambda_diag(&self) -> (f64, f64) {
        match self {
            TestCase::TpfaMixed => (1.0, 1.0),
            TestCase::DdfvEps { lambda11, .. } => (*lambda11, 1.0),
        }
    }

    pub fn lambda(&self, _p: Point) -> Tensor {
        let (l1, l2) = self.lambda_diag();
        Tensor::new(l1, 0.0, 0.0, l2)
    }

    pub fn exact(&self, p: Point, t: f64) -> f64 {
        match self {
            TestCase::TpfaMixed => {
                p.x.exp() + (0.5 * p.x - BASE_RATE * t).exp() * (PI * p.x).sin()
            }
            TestCase::DdfvEps { eps, lambda11 } => {
                PI * (p.y - 0.5).exp()
                    + (-BASE_RATE * t + 0.5 * p.y).exp()
                        * (PI * (PI * p.y).cos() + 0.5 * (PI * p.y).sin())
                    + eps * (-PI * PI * lambda11 * t).exp() * (PI * p.x).cos()
            }
        }
    }

    pub fn initial(&self, p: Point) -> f64 {
        self.exact(p, 0.0)
    }

    /// Boundary tag by edge-midpoint position.
    pub fn boundary_tag(&self, p: Point) -> BoundaryTag {
        match self {
            TestCase::TpfaMixed => {
                if p.x < 1e-12 || p.x > 1.0 - 1e-12 {
                    BoundaryTag::Dirichlet
                } else {
                    BoundaryTag::Neumann
                }
            }
            TestCase::DdfvEps { .. } => BoundaryTag::Neumann,
        }
    }

    /// Dirichlet data, where applicable.
    pub fn dirichlet(&self, p: Point) -> Option<f64> {
        match self {
            TestCase::TpfaMixed => Some(p.x.exp()),
            TestCase::DdfvEps { .. } => None,
        }
    }

    /// Runs the PDE-residual and boundary-condition oracle on this case.
    ///
    /// The no-flux check on `ddfv_eps` uses the unperturbed (`ε = 0`)
    /// profile: the perturbation mode is an interior solution of the model
    /// but carries an `O(ε)` flux through the top/bottom boundaries, which
    /// is precisely what seeds the slow parasite mode in the discrete
    /// dynamics.
    pub fn validate(&self) -> ValidationReport {
        let (l1, l2) = self.lambda_diag();
        let u = |p: Point, t: f64| self.exact(p, t);
        let v = |p: Point| self.potential(p);
        let interior: Vec<f64> = (0..5).map(|i| 0.1 + 0.2 * i as f64).collect();
        let times = [0.02, 0.1, 0.3];
        let mut max_pde = 0.0f64;
        for &x in &interior {
            for &y in &interior {
                for &t in &times {
                    max_pde = max_pde.max(pde_residual_scaled(&u, &v, l1, l2, Point::new(x, y), t));
                }
            }
        }
        let mut max_dirichlet = 0.0f64;
        if let TestCase::TpfaMixed = self {
            for &y in &interior {
                for &t in &times {
                    for x in [0.0, 1.0] {
                        let p = Point::new(x, y);
                        max_dirichlet =
                            max_dirichlet.max((self.exact(p, t) - self.dirichlet(p).unwrap()).abs());
                    }
                }
            }
        }
        let noflux_case = match self {
            TestCase::TpfaMixed => *self,
            TestCase::DdfvEps { lambda11, .. } => TestCase::DdfvEps {
                eps: 0.0,
                lambda11: *lambda11,
            },
        };
        let u0 = |p: Point, t: f64| noflux_case.exact(p, t);
        let mut max_flux = 0.0f64;
        for &s in &interior {
            for &t in &times {
                // top/bottom edges: second flux component
                for y in [0.0, 1.0] {
                    let p = Point::new(s, y);
                    max_flux = max_flux.max((l2 * flux_component(&u0, &v, p, t, false)).abs());
                }
                if matches!(self, TestCase::DdfvEps { .. }) {
                    // left/right edges are also no-flux for this case
                    for x in [0.0, 1.0] {
                        let p = Point::new(x, s);
                        max_flux = max_flux.max((l1 * flux_component(&u0, &v, p, t, true)).abs());
                    }
                }
            }
        }
        ValidationReport {
            case: self.id(),
            max_pde_residual: max_pde,
            max_dirichlet_error: max_dirichlet,
            max_neumann_flux: max_flux,
        }
    }
}

/// Outcome of [`TestCase::validate`]; all fields should be below `1e-6` for a
/// consistent case.
#[derive(Debug, Clone, Copy)]
pub struct ValidationReport {
    pub case: &'static str,
    /// Max scaled interior residual of `∂t u − div(Λ(∇u + u∇V))`.
    pub max_pde_residual: f64,
    /// Max mismatch between the exact solution and the Dirichlet data.
    pub max_dirichlet_error: f64,
    /// Max normal flux `Λ(∇u + u∇V)·n` over the no-flux boundary.
    pub max_neumann_flux: f64,
}

impl ValidationReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_pde_residual < tol
            && self.max_dirichlet_error < tol
            && self.max_neumann_flux < tol
    }
}

/// Fourth-order central first derivative.
fn d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Fourth-order central second derivative.
fn d2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h))
        / (12.0 * h * h)
}

const H_SPACE: f64 = 1e-2;
const H_TIME: f64 = 1e-3;

/// One component of `∇u + u ∇V` at `(p, t)` (`x_dir` selects the component),
/// with all derivatives taken by finite differences of the closed forms.
fn flux_component(
    u: &impl Fn(Point, f64) -> f64,
    v: &impl Fn(Point) -> f64,
    p: Point,
    t: f64,
    x_dir: bool,
) -> f64 {
    if x_dir {
        let du = d1(|x| u(Point::new(x, p.y), t), p.x, H_SPACE);
        let dv = d1(|x| v(Point::new(x, p.y)), p.x, H_SPACE);
        du + u(p, t) * dv
    } else {
        let du = d1(|y| u(Point::new(p.x, y), t), p.y, H_SPACE);
        let dv = d1(|y| v(Point::new(p.x, y)), p.y, H_SPACE);
        du + u(p, t) * dv
    }
}

/// Scaled residual `|∂t u − div(Λ(∇u + u∇V))|` of the model at one point,
/// for constant diagonal `Λ = diag(λ₁, λ₂)`, evaluated by fourth-order
/// finite differences of the closed forms `u` and `V`.
pub fn pde_residual_scaled(
    u: &impl Fn(Point, f64) -> f64,
    v: &impl Fn(Point) -> f64,
    l1: f64,
    l2: f64,
    p: Point,
    t: f64,
) -> f64 {
    let ut = d1(|s| u(p, s), t, H_TIME);
    let uxx = d2(|x| u(Point::new(x, p.y), t), p.x, H_SPACE);
    let uyy = d2(|y| u(Point::new(p.x, y), t), p.y, H_SPACE);
    // div(u ∇V) by differencing x ↦ u·∂V, with ∂V itself differenced
    let dx_uvx = d1(
        |x| {
            let q = Point::new(x, p.y);
            u(q, t) * d1(|xi| v(Point::new(xi, p.y)), x, H_SPACE)
        },
        p.x,
        H_SPACE,
    );
    let dy_uvy = d1(
        |y| {
            let q = Point::new(p.x, y);
            u(q, t) * d1(|yi| v(Point::new(p.x, yi)), y, H_SPACE)
        },
        p.y,
        H_SPACE,
    );
    let res = ut - l1 * (uxx + dx_uvx) - l2 * (uyy + dy_uvy);
    let scale = 1.0 + ut.abs() + (l1 * uxx).abs() + (l2 * uyy).abs();
    res.abs() / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_solution_spot_values() {
        let c = TestCase::TpfaMixed;
        assert_relative_eq!(c.exact(Point::new(0.0, 0.3), 0.7), 1.0);
        assert_relative_eq!(
            c.exact(Point::new(0.5, 0.9), 0.0),
            f64::exp(0.5) + f64::exp(0.25),
            max_relative = 1e-15
        );
        let d = TestCase::DdfvEps {
            eps: 1e-2,
            lambda11: 0.1,
        };
        // t = 0, x = (0, 0): π e^{−1/2} + π + ε
        assert_relative_eq!(
            d.exact(Point::new(0.0, 0.0), 0.0),
            PI * f64::exp(-0.5) + PI + 1e-2,
            max_relative = 1e-14
        );
    }

    #[test]
    fn tpfa_mixed_validates() {
        let r = TestCase::TpfaMixed.validate();
        assert!(r.max_pde_residual < 1e-6, "pde {:.3e}", r.max_pde_residual);
        assert!(
            r.max_dirichlet_error < 1e-12,
            "dirichlet {:.3e}",
            r.max_dirichlet_error
        );
        assert!(r.max_neumann_flux < 1e-6, "flux {:.3e}", r.max_neumann_flux);
        assert!(r.passes(1e-6));
    }

    #[test]
    fn ddfv_eps_validates() {
        for (eps, l11) in [(1e-2, 0.1), (0.0, 1.0), (1e-2, 1.0)] {
            let r = TestCase::DdfvEps { eps, lambda11: l11 }.validate();
            assert!(
                r.max_pde_residual < 1e-6,
                "pde {:.3e} at eps={eps}, l11={l11}",
                r.max_pde_residual
            );
            assert!(r.max_neumann_flux < 1e-6, "flux {:.3e}", r.max_neumann_flux);
        }
    }

    #[test]
    fn wrong_potential_sign_is_flagged() {
        // With V = +x₁ the closed form does not solve the model: the
        // residual is order one instead of round-off.
        let c = TestCase::TpfaMixed;
        let u = |p: Point, t: f64| c.exact(p, t);
        let bad = |p: Point| p.x;
        let res = pde_residual_scaled(&u, &bad, 1.0, 1.0, Point::new(0.3, 0.5), 0.1);
        assert!(res > 1e-2, "residual {res:.3e} too small to flag the sign");
        let good = |p: Point| -p.x;
        assert!(pde_residual_scaled(&u, &good, 1.0, 1.0, Point::new(0.3, 0.5), 0.1) < 1e-7);
    }
}
