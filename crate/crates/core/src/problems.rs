//! Manufactured test problems `-Δu = f` on the unit interval/square.

use std::f64::consts::PI;

use crate::basis::gauss_rule;
use crate::error::{Error, Result};
use crate::reconstruction::Bc;

#[derive(Clone, Copy)]
pub struct ProblemSpec {
    pub name: &'static str,
    pub dim: usize,
    pub bc: Bc,
    pub u: fn(&[f64]) -> f64,
    pub grad: fn(&[f64]) -> [f64; 2],
    pub f: fn(&[f64]) -> f64,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ProblemSpec({}, {}D, {})", self.name, self.dim, self.bc)
    }
}

// x sin πx and derivatives
fn s(x: f64) -> f64 {
    x * (PI * x).sin()
}
fn ds(x: f64) -> f64 {
    (PI * x).sin() + PI * x * (PI * x).cos()
}
fn dds(x: f64) -> f64 {
    2.0 * PI * (PI * x).cos() - PI * PI * x * (PI * x).sin()
}

static REGISTRY: [ProblemSpec; 4] = [
    ProblemSpec {
        name: "xsinpix",
        dim: 1,
        bc: Bc::Dirichlet,
        u: |x| s(x[0]),
        grad: |x| [ds(x[0]), 0.0],
        f: |x| -dds(x[0]),
    },
    ProblemSpec {
        name: "xsinpix-ysinpiy",
        dim: 2,
        bc: Bc::Dirichlet,
        u: |x| s(x[0]) * s(x[1]),
        grad: |x| [ds(x[0]) * s(x[1]), s(x[0]) * ds(x[1])],
        f: |x| -(dds(x[0]) * s(x[1]) + s(x[0]) * dds(x[1])),
    },
    ProblemSpec {
        name: "sin2pix",
        dim: 1,
        bc: Bc::Periodic,
        u: |x| (2.0 * PI * x[0]).sin(),
        grad: |x| [2.0 * PI * (2.0 * PI * x[0]).cos(), 0.0],
        f: |x| 4.0 * PI * PI * (2.0 * PI * x[0]).sin(),
    },
    ProblemSpec {
        name: "sin2pix-sin4piy",
        dim: 2,
        bc: Bc::Periodic,
        u: |x| (2.0 * PI * x[0]).sin() * (4.0 * PI * x[1]).sin(),
        grad: |x| {
            [
                2.0 * PI * (2.0 * PI * x[0]).cos() * (4.0 * PI * x[1]).sin(),
                4.0 * PI * (2.0 * PI * x[0]).sin() * (4.0 * PI * x[1]).cos(),
            ]
        },
        f: |x| 20.0 * PI * PI * (2.0 * PI * x[0]).sin() * (4.0 * PI * x[1]).sin(),
    },
];

pub fn registry() -> &'static [ProblemSpec] {
    &REGISTRY
}

/// Looks up a registered problem and re-checks it against its boundary
/// condition.
pub fn find(name: &str) -> Result<&'static ProblemSpec> {
    let p = REGISTRY
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownProblem(name.to_string()))?;
    check(p)?;
    Ok(p)
}

const SAMPLES: usize = 17;

fn incompatible(p: &ProblemSpec, what: impl Into<String>) -> Error {
    Error::IncompatibleProblem {
        name: p.name.to_string(),
        what: what.into(),
    }
}

/// Sampling check: boundary values (Dirichlet: zero; periodic: equal on
/// opposite sides, zero mean), and `f = -Δu` by central differences.
pub fn check(p: &ProblemSpec) -> Result<()> {
    let t = |k: usize| k as f64 / (SAMPLES - 1) as f64;
    let point = |a: f64, b: f64| if p.dim == 1 { vec![a] } else { vec![a, b] };
    for k in 0..SAMPLES {
        for axis in 0..p.dim {
            let side = |v: f64| {
                let mut q = point(t(k), t(k));
                q[axis] = v;
                (p.u)(&q)
            };
            let (lo, hi) = (side(0.0), side(1.0));
            let ok = match p.bc {
                Bc::Dirichlet => lo.abs() <= 1e-12 && hi.abs() <= 1e-12,
                Bc::Periodic => (lo - hi).abs() <= 1e-12,
            };
            if !ok {
                return Err(incompatible(p, format!("{} boundary values on axis {axis}", p.bc)));
            }
        }
    }
    if p.bc == Bc::Periodic {
        let rule = gauss_rule(12).expect("valid order");
        let mean = match p.dim {
            1 => rule.integrate(|x| (p.u)(&[x])),
            _ => rule.integrate(|y| rule.integrate(|x| (p.u)(&[x, y]))),
        };
        if mean.abs() > 1e-12 {
            return Err(incompatible(p, "zero mean"));
        }
    }
    let e = 1e-4;
    for k in 1..SAMPLES - 1 {
        let x = point(t(k), t(SAMPLES - 1 - k).max(0.1));
        let mut lap = 0.0;
        for axis in 0..p.dim {
            let mut a = x.clone();
            let mut b = x.clone();
            a[axis] += e;
            b[axis] -= e;
            lap += ((p.u)(&a) - 2.0 * (p.u)(&x) + (p.u)(&b)) / (e * e);
            let g = ((p.u)(&a) - (p.u)(&b)) / (2.0 * e);
            if (g - (p.grad)(&x)[axis]).abs() > 1e-5 * (1.0 + g.abs()) {
                return Err(incompatible(p, "gradient consistency"));
            }
        }
        let f = (p.f)(&x);
        if (f + lap).abs() > 1e-4 * (1.0 + f.abs()) {
            return Err(incompatible(p, "f = -Δu"));
        }
    }
    Ok(())
}
