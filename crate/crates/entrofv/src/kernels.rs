//! Scalar kernels shared by both schemes: two-point mean functions,
//! entropy generators, and the elementary inequalities they satisfy.

use crate::{Error, Result};

/// Two-point mean `r(x, y)` used to reconstruct the mobility on an edge.
///
/// Every variant is symmetric, positively 1-homogeneous, monotone in both
/// arguments, satisfies `r(x, x) = x`, and is bounded between the logarithmic
/// mean and `max(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanKind {
    Arithmetic,
    Logarithmic,
    SqrtSquare,
    Max,
}

/// Relative switch threshold for the logarithmic mean: below it the closed
/// form `(x−y)/(log x − log y)` is replaced by a series expansion, keeping
/// the function and its derivatives smooth for Newton.
const LOG_MEAN_SWITCH: f64 = 1e-5;

impl MeanKind {
    pub const ALL: [MeanKind; 4] = [
        MeanKind::Arithmetic,
        MeanKind::Logarithmic,
        MeanKind::SqrtSquare,
        MeanKind::Max,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeanKind::Arithmetic => "arithmetic",
            MeanKind::Logarithmic => "logarithmic",
            MeanKind::SqrtSquare => "sqrtsquare",
            MeanKind::Max => "max",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "arithmetic" | "arith" => Ok(MeanKind::Arithmetic),
            "logarithmic" | "log" => Ok(MeanKind::Logarithmic),
            "sqrtsquare" | "sqrt" => Ok(MeanKind::SqrtSquare),
            "max" => Ok(MeanKind::Max),
            other => Err(Error::InvalidArgument(format!("unknown mean '{other}'"))),
        }
    }

    /// Mean value; both arguments must be positive.
    pub fn value(self, x: f64, y: f64) -> f64 {
        debug_assert!(x > 0.0 && y > 0.0);
        match self {
            MeanKind::Arithmetic => 0.5 * (x + y),
            MeanKind::Max => x.max(y),
            MeanKind::SqrtSquare => {
                let s = 0.5 * (x.sqrt() + y.sqrt());
                s * s
            }
            MeanKind::Logarithmic => {
                let u = (y / x).ln();
                if u.abs() < LOG_MEAN_SWITCH {
                    x * (1.0 + u * (0.5 + u / 12.0))
                } else {
                    (x - y) / (x / y).ln()
                }
            }
        }
    }

    /// Mean value together with its partial derivatives `(r, ∂r/∂x, ∂r/∂y)`.
    pub fn value_and_derivs(self, x: f64, y: f64) -> (f64, f64, f64) {
        debug_assert!(x > 0.0 && y > 0.0);
        match self {
            MeanKind::Arithmetic => (0.5 * (x + y), 0.5, 0.5),
            MeanKind::Max => {
                if x >= y {
                    (x, 1.0, 0.0)
                } else {
                    (y, 0.0, 1.0)
                }
            }
            MeanKind::SqrtSquare => {
                let (sx, sy) = (x.sqrt(), y.sqrt());
                let s = 0.5 * (sx + sy);
                (s * s, 0.5 * s / sx, 0.5 * s / sy)
            }
            MeanKind::Logarithmic => {
                let u = (y / x).ln();
                if u.abs() < LOG_MEAN_SWITCH {
                    // r = x(1 + u/2 + u²/12), u = log(y/x); differentiate with
                    // ∂u/∂x = −1/x, ∂u/∂y = 1/y.
                    let r = x * (1.0 + u * (0.5 + u / 12.0));
                    let dr_du = x * (0.5 + u / 6.0);
                    (r, r / x - dr_du / x, dr_du / y)
                } else {
                    let l = (x / y).ln();
                    let d = x - y;
                    ((d / l), (l - d / x) / (l * l), (-l + d / y) / (l * l))
                }
            }
        }
    }
}

/// Generator `Φ_p` of the relative entropy, `p ∈ [1, 2]`.
///
/// `p = 1` selects the Boltzmann generator `Φ₁(s) = s log s − s + 1` exactly
/// (no limit blending); `p ∈ (1, 2]` gives the Tsallis family
/// `Φ_p(s) = (s^p − p s)/(p−1) + 1`.
#[derive(Debug, Clone, Copy)]
pub struct EntropyGenerator {
    pub p: f64,
}

impl EntropyGenerator {
    pub fn new(p: f64) -> Result<Self> {
        if !(1.0..=2.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("p = {p} outside [1, 2]")));
        }
        Ok(Self { p })
    }

    /// `Φ_p(s)` for `s ≥ 0` (`Φ₁(0) = 1` by continuous extension).
    pub fn phi(&self, s: f64) -> f64 {
        assert!(s >= 0.0, "phi requires s >= 0, got {s}");
        if self.p == 1.0 {
            if s == 0.0 {
                1.0
            } else {
                s * s.ln() - s + 1.0
            }
        } else {
            (s.powf(self.p) - self.p * s) / (self.p - 1.0) + 1.0
        }
    }

    /// `Φ′_p(s)`; requires `s > 0` when `p = 1`.
    pub fn phi_prime(&self, s: f64) -> f64 {
        if self.p == 1.0 {
            assert!(s > 0.0, "phi_prime at p=1 requires s > 0, got {s}");
            s.ln()
        } else {
            assert!(s >= 0.0, "phi_prime requires s >= 0, got {s}");
            self.p * (s.powf(self.p - 1.0) - 1.0) / (self.p - 1.0)
        }
    }
}

/// `(4/p)(x^{p/2} − y^{p/2})² ≤ (x − y)(Φ′_p(x) − Φ′_p(y))`, `p ∈ [1, 2]`.
pub fn check_ineq_func(p: f64, x: f64, y: f64) -> bool {
    let gen = EntropyGenerator { p };
    let lhs = 4.0 / p * (x.powf(0.5 * p) - y.powf(0.5 * p)).powi(2);
    let rhs = (x - y) * (gen.phi_prime(x) - gen.phi_prime(y));
    lhs <= rhs + 1e-12
}

/// `(x^{p/2} − y^{p/2})² ≥ x^p − y^p − p y^{p−1}(x − y)`, `p ∈ (1, 2]`.
pub fn check_ineq_sub_quadratic(p: f64, x: f64, y: f64) -> bool {
    let lhs = (x.powf(0.5 * p) - y.powf(0.5 * p)).powi(2);
    let rhs = x.powf(p) - y.powf(p) - p * y.powf(p - 1.0) * (x - y);
    lhs + 1e-12 >= rhs
}

/// `4(√x − √y)² ≤ (x − y)(log x − log y)`.
pub fn check_sqrt_log_ineq(x: f64, y: f64) -> bool {
    let lhs = 4.0 * (x.sqrt() - y.sqrt()).powi(2);
    let rhs = (x - y) * (x.ln() - y.ln());
    lhs <= rhs + 1e-12
}
