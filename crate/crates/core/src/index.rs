//! Degree-pair functions h(x, y) and the edge-sum index TI(G) = Σ h(d_u, d_v).

use std::fmt;

use thiserror::Error;

use crate::expr::HExpression;
use crate::graph::Graph;
use crate::scalar::{real, real_usize, Real};

/// Largest vertex degree the registration grid checks. Chain realizations
/// stay well below this (degrees 2..4).
pub const MAX_DEGREE: usize = 16;

/// Absolute tolerance for the numeric symmetry check at registration.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum IndexError {
    #[error("unknown index '{0}'")]
    UnknownIndex(String),
    #[error("h is not symmetric: h({x},{y})={left} but h({y},{x})={right}")]
    Asymmetric { x: usize, y: usize, left: f64, right: f64 },
    #[error("h({x},{y}) is not finite")]
    NonFinite { x: usize, y: usize },
}

/// The built-in degree-pair functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Sombor,
    GeometricArithmetic,
    InverseSumIndeg,
    SecondZagreb,
    FirstZagreb,
    Randic,
    Harmonic,
    SumConnectivity,
}

impl Builtin {
    pub const ALL: [Builtin; 8] = [
        Builtin::Sombor,
        Builtin::GeometricArithmetic,
        Builtin::InverseSumIndeg,
        Builtin::SecondZagreb,
        Builtin::FirstZagreb,
        Builtin::Randic,
        Builtin::Harmonic,
        Builtin::SumConnectivity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Sombor => "sombor",
            Builtin::GeometricArithmetic => "ga",
            Builtin::InverseSumIndeg => "isi",
            Builtin::SecondZagreb => "m2",
            Builtin::FirstZagreb => "m1",
            Builtin::Randic => "randic",
            Builtin::Harmonic => "harmonic",
            Builtin::SumConnectivity => "sum_connectivity",
        }
    }

    /// Expression-string twin of the built-in; parsing it must reproduce
    /// the function on the whole degree grid.
    pub fn formula(self) -> &'static str {
        match self {
            Builtin::Sombor => "sqrt(x^2+y^2)",
            Builtin::GeometricArithmetic => "2*sqrt(x*y)/(x+y)",
            Builtin::InverseSumIndeg => "x*y/(x+y)",
            Builtin::SecondZagreb => "x*y",
            Builtin::FirstZagreb => "x+y",
            Builtin::Randic => "1/sqrt(x*y)",
            Builtin::Harmonic => "2/(x+y)",
            Builtin::SumConnectivity => "1/sqrt(x+y)",
        }
    }

    pub fn from_name(name: &str) -> Option<Builtin> {
        Builtin::ALL.iter().copied().find(|b| b.name() == name)
    }

    pub fn eval<F: Real>(self, x: F, y: F) -> F {
        let two = real::<F>(2.0);
        match self {
            Builtin::Sombor => (x * x + y * y).sqrt(),
            Builtin::GeometricArithmetic => two * (x * y).sqrt() / (x + y),
            Builtin::InverseSumIndeg => x * y / (x + y),
            Builtin::SecondZagreb => x * y,
            Builtin::FirstZagreb => x + y,
            Builtin::Randic => (x * y).sqrt().recip(),
            Builtin::Harmonic => two / (x + y),
            Builtin::SumConnectivity => (x + y).sqrt().recip(),
        }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Builtin(Builtin),
    Expr(HExpression),
}

/// A symmetric degree-pair function, either from the catalog or parsed from
/// a user expression. Registration checks symmetry and finiteness on the
/// `1..=MAX_DEGREE` grid, so evaluation never has to.
#[derive(Debug, Clone)]
pub struct IndexFunction {
    name: String,
    kind: Kind,
}

impl IndexFunction {
    /// Looks up a catalog entry by name.
    pub fn builtin(name: &str) -> Result<IndexFunction, IndexError> {
        let b = Builtin::from_name(name).ok_or_else(|| IndexError::UnknownIndex(name.into()))?;
        Ok(IndexFunction::from_builtin(b))
    }

    pub fn from_builtin(builtin: Builtin) -> IndexFunction {
        IndexFunction {
            name: builtin.name().to_owned(),
            kind: Kind::Builtin(builtin),
        }
    }

    /// Registers a parsed expression as an index function named "custom".
    ///
    /// Fails with a witness pair if the expression is asymmetric or
    /// non-finite anywhere on the degree grid.
    pub fn from_expression(expr: HExpression) -> Result<IndexFunction, IndexError> {
        let f = IndexFunction { name: "custom".to_owned(), kind: Kind::Expr(expr) };
        f.check_grid()?;
        Ok(f)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// h(x, y) where x, y are vertex degrees cast to the scalar type.
    #[inline]
    pub fn eval<F: Real>(&self, x: F, y: F) -> F {
        match &self.kind {
            Kind::Builtin(b) => b.eval(x, y),
            Kind::Expr(e) => e.eval(x, y),
        }
    }

    #[inline]
    fn eval_degrees<F: Real>(&self, du: usize, dv: usize) -> F {
        self.eval(real_usize(du), real_usize(dv))
    }

    /// Symmetry and finiteness over the full degree grid.
    pub fn check_grid(&self) -> Result<(), IndexError> {
        for x in 1..=MAX_DEGREE {
            for y in x..=MAX_DEGREE {
                let left: f64 = self.eval_degrees(x, y);
                let right: f64 = self.eval_degrees(y, x);
                if !left.is_finite() {
                    return Err(IndexError::NonFinite { x, y });
                }
                if !right.is_finite() {
                    return Err(IndexError::NonFinite { x: y, y: x });
                }
                if (left - right).abs() > SYMMETRY_TOL {
                    return Err(IndexError::Asymmetric { x, y, left, right });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for IndexFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Builtin(b) => write!(f, "{} = {}", b.name(), b.formula()),
            Kind::Expr(e) => write!(f, "custom = {e}"),
        }
    }
}

/// TI(G) = Σ_{uv ∈ E} h(d_u, d_v), summed in sorted edge order so runs are
/// bit-reproducible.
pub fn topological_index<F: Real>(g: &Graph, f: &IndexFunction) -> F {
    let degrees = g.degrees();
    let mut total = F::zero();
    for (u, v) in g.edge_list() {
        total += f.eval_degrees(degrees[u], degrees[v]);
    }
    total
}

/// Σ_v (d_v)^(a+1) over all vertices.
///
/// For h(x, y) = x^a + y^a the edge sum TI(G) telescopes to exactly this
/// vertex sum, which the invariant tests exercise.
pub fn vertex_power_sum<F: Real>(g: &Graph, a: F) -> F {
    let exponent = a + F::one();
    let mut total = F::zero();
    for d in g.degrees() {
        total += real_usize::<F>(d).powf(exponent);
    }
    total
}
