//! Reference-element polynomial machinery.
//!
//! Stencil cells are unit intervals `[r, r+1]` in the reference coordinate
//! `x̂`, with the owner cell at `[0, 1]`. The Lagrange basis here interpolates
//! on the stencil nodes `-m..=m+1`; the derivative of the interpolant of the
//! running sums of cell averages is the reconstruction itself.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// Polynomial with exact rational coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<Rational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `x - root`
    pub fn linear_factor(root: &Rational) -> Self {
        Self::new(vec![-root.clone(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.to_f64_coeffs()
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c)
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(crate::rational::to_f64).collect()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(p, c)| c * int(p as i64))
                .collect(),
        )
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Self {
        let mut out = vec![Rational::zero()];
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(p, c)| c / int(p as i64 + 1)),
        );
        Self::new(out)
    }

    /// Exact `∫_a^b p(x) dx`.
    pub fn integrate(&self, a: &Rational, b: &Rational) -> Rational {
        let anti = self.antiderivative();
        anti.eval(b) - anti.eval(a)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
                    let b = other.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
                    a + b
                })
                .collect(),
        )
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }
}

/// Lagrange basis polynomial `L_k` on the nodes `-m..=m+1`.
pub fn lagrange_basis(m: usize, k: i64) -> Result<RationalPoly> {
    let lo = -(m as i64);
    let hi = m as i64 + 1;
    if m == 0 || k < lo || k > hi {
        return Err(Error::NodeOutOfRange { k, m });
    }
    let mut num = RationalPoly::constant(Rational::one());
    let mut den = Rational::one();
    for r in lo..=hi {
        if r == k {
            continue;
        }
        num = num.mul(&RationalPoly::linear_factor(&int(r)));
        den *= int(k - r);
    }
    Ok(num.scale(&(Rational::one() / den)))
}

/// Gauss–Legendre rule on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫_0^1 f`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Legendre polynomial `P_n(x)` on `[-1, 1]` and its derivative.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn legendre(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    legendre_with_derivative(n, x).0
}

/// `q`-point Gauss–Legendre rule mapped to `[0, 1]`, nodes ascending.
pub fn gauss_rule(q: usize) -> Result<QuadratureRule> {
    if !(1..=16).contains(&q) {
        return Err(Error::QuadratureOrder(q));
    }
    let mut nodes = Vec::with_capacity(q);
    let mut weights = Vec::with_capacity(q);
    for i in 0..q {
        // roots come out descending from this initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        if q == 1 {
            x = 0.0;
        } else {
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(q, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
        }
        let w = if q == 1 {
            2.0
        } else {
            let (_, dp) = legendre_with_derivative(q, x);
            2.0 / ((1.0 - x * x) * dp * dp)
        };
        nodes.push(0.5 * (1.0 + x));
        weights.push(0.5 * w);
    }
    nodes.reverse();
    weights.reverse();
    Ok(QuadratureRule { nodes, weights })
}

/// Legendre moment `(∏ (2α_i+1)/h_i) ∫_K L_K^α f` over the box
/// `[lower, upper]`, using `rule` per direction.
pub fn legendre_moment(
    f: impl Fn(&[f64]) -> f64,
    lower: &[f64],
    upper: &[f64],
    alpha: &[usize],
    rule: &QuadratureRule,
) -> f64 {
    let d = lower.len();
    assert!(upper.len() == d && alpha.len() == d && (1..=2).contains(&d));
    let norm: f64 = alpha.iter().map(|&a| (2 * a + 1) as f64).product();
    let map = |a: usize, t: f64| lower[a] + t * (upper[a] - lower[a]);
    let mut acc = 0.0;
    if d == 1 {
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            acc += w * legendre(alpha[0], 2.0 * t - 1.0) * f(&[map(0, t)]);
        }
    } else {
        for (&ty, &wy) in rule.nodes.iter().zip(&rule.weights) {
            let ly = legendre(alpha[1], 2.0 * ty - 1.0);
            let y = map(1, ty);
            for (&tx, &wx) in rule.nodes.iter().zip(&rule.weights) {
                acc += wx * wy * legendre(alpha[0], 2.0 * tx - 1.0) * ly * f(&[map(0, tx), y]);
            }
        }
    }
    norm * acc
}
