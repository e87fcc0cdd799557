//! Convex potential functions on phase space.
//!
//! A potential maps R^d to the extended reals; +infinity is a dedicated
//! sentinel ([`ExtReal::PosInf`]) and never enters arithmetic as an IEEE
//! infinity. Built-ins carry analytic gradients and, where they exist,
//! closed-form conjugates and proximal maps; everything else falls back to
//! central finite differences and the iterative solvers in
//! [`crate::conjugate`].
//!
//! Lower semicontinuity is assumed, not checked. Convexity can be
//! spot-checked with [`midpoint_convexity_check`].

use std::ops::Add;

use crate::error::{Error, Result};
use crate::matrix::{cholesky, Matrix};
use crate::tol;

/// Value of a potential: finite, or the +infinity sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInf => None,
        }
    }

    /// Finite value or a domain error.
    pub fn expect_finite(self) -> Result<f64> {
        self.finite().ok_or(Error::OutOfDomain)
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, other: ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::PosInf,
        }
    }
}

/// Outcome of a registered closed-form conjugate.
#[derive(Debug, Clone)]
pub enum ClosedFormConjugate {
    /// Finite supremum with (a) maximizer. For indicator-type conjugates the
    /// supremum may only be approached, in which case `argmax` is the
    /// limiting boundary point.
    Value { value: f64, argmax: Vec<f64> },
    /// The supremum is +infinity at this target.
    Unbounded,
}

/// A convex lower-semicontinuous potential on R^d.
///
/// Implementations assume correctly sized inputs; the free functions
/// [`eval`] and [`gradient`] validate dimensions first. Potentials are
/// immutable after construction, so they are `Send + Sync` and batch
/// evaluation may run data-parallel.
pub trait Potential: Send + Sync {
    fn dim(&self) -> usize;

    /// F(z), with the +infinity sentinel outside the effective domain.
    fn value(&self, z: &[f64]) -> ExtReal;

    /// Strict-interior predicate; gradients are only defined here.
    fn in_domain(&self, z: &[f64]) -> bool;

    /// Analytic gradient, if one is registered.
    fn gradient_analytic(&self, z: &[f64]) -> Option<Vec<f64>> {
        let _ = z;
        None
    }

    /// A strictly feasible point used to start iterative solvers.
    fn interior_start(&self) -> Vec<f64> {
        vec![0.0; self.dim()]
    }

    /// Registered closed-form Fenchel conjugate, if any.
    fn conjugate_closed_form(&self, target: &[f64]) -> Option<ClosedFormConjugate> {
        let _ = target;
        None
    }

    /// Registered closed-form proximal map `argmin_u F(u) + |u - z|^2 / 2`.
    fn prox_closed_form(&self, z: &[f64]) -> Option<Vec<f64>> {
        let _ = z;
        None
    }
}

impl<P: Potential + ?Sized> Potential for &P {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, z: &[f64]) -> ExtReal {
        (**self).value(z)
    }
    fn in_domain(&self, z: &[f64]) -> bool {
        (**self).in_domain(z)
    }
    fn gradient_analytic(&self, z: &[f64]) -> Option<Vec<f64>> {
        (**self).gradient_analytic(z)
    }
    fn interior_start(&self) -> Vec<f64> {
        (**self).interior_start()
    }
    fn conjugate_closed_form(&self, target: &[f64]) -> Option<ClosedFormConjugate> {
        (**self).conjugate_closed_form(target)
    }
    fn prox_closed_form(&self, z: &[f64]) -> Option<Vec<f64>> {
        (**self).prox_closed_form(z)
    }
}

impl<P: Potential + ?Sized> Potential for Box<P> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, z: &[f64]) -> ExtReal {
        (**self).value(z)
    }
    fn in_domain(&self, z: &[f64]) -> bool {
        (**self).in_domain(z)
    }
    fn gradient_analytic(&self, z: &[f64]) -> Option<Vec<f64>> {
        (**self).gradient_analytic(z)
    }
    fn interior_start(&self) -> Vec<f64> {
        (**self).interior_start()
    }
    fn conjugate_closed_form(&self, target: &[f64]) -> Option<ClosedFormConjugate> {
        (**self).conjugate_closed_form(target)
    }
    fn prox_closed_form(&self, z: &[f64]) -> Option<Vec<f64>> {
        (**self).prox_closed_form(z)
    }
}

/// Dimension-checked evaluation.
pub fn eval(f: &dyn Potential, z: &[f64]) -> Result<ExtReal> {
    if z.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: z.len(),
        });
    }
    Ok(f.value(z))
}

/// Gradient at a strict-interior point: the registered analytic map when
/// present, otherwise central finite differences with per-coordinate step
/// `step * (1 + |z_i|)`.
pub fn gradient(f: &dyn Potential, z: &[f64], step: f64) -> Result<Vec<f64>> {
    if z.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: z.len(),
        });
    }
    if !f.in_domain(z) {
        return Err(Error::OutOfDomain);
    }
    if let Some(g) = f.gradient_analytic(z) {
        return Ok(g);
    }
    let mut g = vec![0.0; z.len()];
    let mut probe = z.to_vec();
    for i in 0..z.len() {
        let h = step * (1.0 + z[i].abs());
        probe[i] = z[i] + h;
        let plus = f.value(&probe).expect_finite()?;
        probe[i] = z[i] - h;
        let minus = f.value(&probe).expect_finite()?;
        probe[i] = z[i];
        g[i] = (plus - minus) / (2.0 * h);
    }
    Ok(g)
}

/// Gradient with the default finite-difference step.
pub fn gradient_default(f: &dyn Potential, z: &[f64]) -> Result<Vec<f64>> {
    gradient(f, z, tol::GRAD_STEP)
}

/// Midpoint convexity probe: checks
/// `F((a+b)/2) <= (F(a) + F(b))/2 + 1e-9` for every in-domain pair,
/// skipping pairs with an endpoint outside the domain.
pub fn midpoint_convexity_check(f: &dyn Potential, samples: &[Vec<f64>]) -> bool {
    for a in samples {
        for b in samples {
            let (fa, fb) = match (f.value(a).finite(), f.value(b).finite()) {
                (Some(fa), Some(fb)) => (fa, fb),
                _ => continue,
            };
            let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
            if let Some(fm) = f.value(&mid).finite() {
                if fm > 0.5 * (fa + fb) + 1e-9 {
                    return false;
                }
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Built-in potentials
// ---------------------------------------------------------------------------

/// `F(z) = z' A z / 2 + b' z + c` with A symmetric positive-definite.
#[derive(Debug, Clone)]
pub struct Quadratic {
    a: Matrix,
    a_inv: Matrix,
    b: Vec<f64>,
    c: f64,
}

impl Quadratic {
    pub fn new(a: Matrix, b: Vec<f64>, c: f64) -> Result<Self> {
        cholesky(&a)?;
        if b.len() != a.rows() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                got: b.len(),
            });
        }
        let a_inv = a.inverse()?;
        Ok(Self { a, a_inv, b, c })
    }

    /// `|z|^2 / 2`.
    pub fn isotropic(dim: usize) -> Self {
        Self::new(Matrix::identity(dim), vec![0.0; dim], 0.0).expect("identity is SPD")
    }

    /// `lambda |z|^2 / 2`.
    pub fn scaled(dim: usize, lambda: f64) -> Result<Self> {
        Self::new(Matrix::identity(dim).scale(lambda), vec![0.0; dim], 0.0)
    }

    pub fn curvature(&self) -> &Matrix {
        &self.a
    }

    /// The conjugate `F*(t) = (t-b)' A^-1 (t-b) / 2 - c` as a potential,
    /// for biconjugation checks.
    pub fn conjugate_potential(&self) -> Quadratic {
        let b_star: Vec<f64> = self
            .a_inv
            .matvec(&self.b)
            .expect("shape")
            .iter()
            .map(|v| -v)
            .collect();
        let bab: f64 = self
            .b
            .iter()
            .zip(self.a_inv.matvec(&self.b).expect("shape"))
            .map(|(x, y)| x * y)
            .sum();
        Quadratic::new(self.a_inv.clone(), b_star, 0.5 * bab - self.c).expect("inverse is SPD")
    }
}

impl Potential for Quadratic {
    fn dim(&self) -> usize {
        self.a.rows()
    }

    fn value(&self, z: &[f64]) -> ExtReal {
        let az = self.a.matvec(z).expect("dimension checked by caller");
        let quad: f64 = z.iter().zip(&az).map(|(x, y)| x * y).sum();
        let lin: f64 = self.b.iter().zip(z).map(|(x, y)| x * y).sum();
        ExtReal::Finite(0.5 * quad + lin + self.c)
    }

    fn in_domain(&self, _z: &[f64]) -> bool {
        true
    }

    fn gradient_analytic(&self, z: &[f64]) -> Option<Vec<f64>> {
        let mut g = self.a.matvec(z).expect("dimension checked by caller");
        for (gi, bi) in g.iter_mut().zip(&self.b) {
            *gi += bi;
        }
        Some(g)
    }

    fn conjugate_closed_form(&self, target: &[f64]) -> Option<ClosedFormConjugate> {
        let shifted: Vec<f64> = target.iter().zip(&self.b).map(|(t, b)| t - b).collect();
        let argmax = self.a_inv.matvec(&shifted).expect("shape");
        let value: f64 =
            0.5 * shifted.iter().zip(&argmax).map(|(x, y)| x * y).sum::<f64>() - self.c;
        Some(ClosedFormConjugate::Value { value, argmax })
    }

    fn prox_closed_form(&self, z: &[f64]) -> Option<Vec<f64>> {
        // argmin_u F(u) + |u - z|^2/2 solves (A + I) u = z - b.
        let shifted: Vec<f64> = z.iter().zip(&self.b).map(|(zi, bi)| zi - bi).collect();
        let a_plus_i = self
            .a
            .add(&Matrix::identity(self.dim()))
            .expect("same shape");
        Some(a_plus_i.solve(&shifted).expect("SPD + I is invertible"))
    }
}

/// Negative entropy `F(z) = sum z_i ln z_i` on the positive orthant.
///
/// The lsc closure is finite at coordinates equal to zero (0 ln 0 = 0);
/// the strict interior used for gradients is `z_i > 0`.
#[derive(Debug, Clone)]
pub struct Entropy {
    dim: usize,
}

impl Entropy {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl Potential for Entropy {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, z: &[f64]) -> ExtReal {
        let mut total = 0.0;
        for &v in z {
            if v < 0.0 {
                return ExtReal::PosInf;
            }
            if v > 0.0 {
                total += v * v.ln();
            }
        }
        ExtReal::Finite(total)
    }

    fn in_domain(&self, z: &[f64]) -> bool {
        z.iter().all(|&v| v > 0.0)
    }

    fn gradient_analytic(&self, z: &[f64]) -> Option<Vec<f64>> {
        if !self.in_domain(z) {
            return None;
        }
        Some(z.iter().map(|v| v.ln() + 1.0).collect())
    }

    fn interior_start(&self) -> Vec<f64> {
        vec![1.0; self.dim]
    }

    fn conjugate_closed_form(&self, target: &[f64]) -> Option<ClosedFormConjugate> {
        // sup_x t x - x ln x is attained at x = exp(t - 1), value exp(t - 1).
        let argmax: Vec<f64> = target.iter().map(|t| (t - 1.0).exp()).collect();
        let value = argmax.iter().sum();
        Some(ClosedFormConjugate::Value { value, argmax })
    }
}

/// `F(z) = sum exp(z_i)`.
#[derive(Debug, Clone)]
pub struct Exponential {
    dim: usize,
}

impl Exponential {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl Potential for Exponential {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, z: &[f64]) -> ExtReal {
        ExtReal::Finite(z.iter().map(|v| v.exp()).sum())
    }

    fn in_domain(&self, _z: &[f64]) -> bool {
        true
    }

    fn gradient_analytic(&self, z: &[f64]) -> Option<Vec<f64>> {
        Some(z.iter().map(|v| v.exp()).collect())
    }

    fn conjugate_closed_form(&self, target: &[f64]) -> Option<ClosedFormConjugate> {
        // sup_x t x - exp(x): unbounded for t < 0, attained at x = ln t for
        // t > 0 with value t ln t - t. The supremum at t = 0 is finite but
        // unattained; leave that boundary case to the iterative solver.
        if target.iter().any(|&t| t < 0.0) {
            return Some(ClosedFormConjugate::Unbounded);
        }
        if target.iter().any(|&t| t == 0.0) {
            return None;
        }
        let argmax: Vec<f64> = target.iter().map(|t| t.ln()).collect();
        let value = target.iter().map(|t| t * t.ln() - t).sum();
        Some(ClosedFormConjugate::Value { value, argmax })
    }
}

/// `F(z) = ln sum exp(z_i)`, evaluated stably.
#[derive(Debug, Clone)]
pub struct LogSumExp {
    dim: usize,
}

impl LogSumExp {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }

    fn softmax(z: &[f64]) -> Vec<f64> {
        let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
        let total: f64 = exps.iter().sum();
        exps.iter().map(|e| e / total).collect()
    }
}

impl Potential for LogSumExp {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, z: &[f64]) -> ExtReal {
        let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let total: f64 = z.iter().map(|v| (v - m).exp()).sum();
        ExtReal::Finite(m + total.ln())
    }

    fn in_domain(&self, _z: &[f64]) -> bool {
        true
    }

    fn gradient_analytic(&self, z: &[f64]) -> Option<Vec<f64>> {
        Some(Self::softmax(z))
    }

    fn conjugate_closed_form(&self, target: &[f64]) -> Option<ClosedFormConjugate> {
        // Conjugate is sum t ln t on the probability simplex, +inf outside.
        let sum: f64 = target.iter().sum();
        if target.iter().any(|&t| t < -1e-12) || (sum - 1.0).abs() > 1e-9 {
            return Some(ClosedFormConjugate::Unbounded);
        }
        if target.iter().any(|&t| t <= 0.0) {
            // Finite but only approached; let the solver report it.
            return None;
        }
        let value = target.iter().map(|t| t * t.ln()).sum();
        let argmax = target.iter().map(|t| t.ln()).collect();
        Some(ClosedFormConjugate::Value { value, argmax })
    }
}

/// One-dimensional convex generators for the perspective transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// `f(u) = u^2`, conjugate `v^2 / 4`.
    Square,
    /// `f(u) = exp(u)`, conjugate `v ln v - v` on `v >= 0`.
    Exp,
}

impl Generator {
    pub fn eval(self, u: f64) -> f64 {
        match self {
            Generator::Square => u * u,
            Generator::Exp => u.exp(),
        }
    }

    pub fn deriv(self, u: f64) -> f64 {
        match self {
            Generator::Square => 2.0 * u,
            Generator::Exp => u.exp(),
        }
    }

    pub fn conjugate(self, v: f64) -> ExtReal {
        match self {
            Generator::Square => ExtReal::Finite(0.25 * v * v),
            Generator::Exp => {
                if v < 0.0 {
                    ExtReal::PosInf
                } else if v == 0.0 {
                    ExtReal::Finite(0.0)
                } else {
                    ExtReal::Finite(v * v.ln() - v)
                }
            }
        }
    }
}

/// Perspective transform `F(x, y) = x f(y / x)` on the half-plane `x > 0`,
/// jointly convex for convex `f`.
#[derive(Debug, Clone)]
pub struct Perspective {
    generator: Generator,
}

impl Perspective {
    pub fn new(generator: Generator) -> Self {
        Self { generator }
    }

    pub fn generator(&self) -> Generator {
        self.generator
    }
}

impl Potential for Perspective {
    fn dim(&self) -> usize {
        2
    }

    fn value(&self, z: &[f64]) -> ExtReal {
        let (x, y) = (z[0], z[1]);
        if x <= 0.0 {
            return ExtReal::PosInf;
        }
        ExtReal::Finite(x * self.generator.eval(y / x))
    }

    fn in_domain(&self, z: &[f64]) -> bool {
        z[0] > 0.0
    }

    fn gradient_analytic(&self, z: &[f64]) -> Option<Vec<f64>> {
        let (x, y) = (z[0], z[1]);
        if x <= 0.0 {
            return None;
        }
        let u = y / x;
        let fu = self.generator.eval(u);
        let du = self.generator.deriv(u);
        Some(vec![fu - u * du, du])
    }

    fn interior_start(&self) -> Vec<f64> {
        vec![1.0, 0.0]
    }

    fn conjugate_closed_form(&self, target: &[f64]) -> Option<ClosedFormConjugate> {
        // sup_{x>0, y} t1 x + t2 y - x f(y/x) = sup_{x>0} x (t1 + f*(t2)):
        // zero when t1 + f*(t2) <= 0 (approached as x -> 0+), else +inf.
        let fstar = match self.generator.conjugate(target[1]) {
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => return Some(ClosedFormConjugate::Unbounded),
        };
        if target[0] + fstar <= tol::INDICATOR_SLACK {
            Some(ClosedFormConjugate::Value {
                value: 0.0,
                argmax: vec![0.0, 0.0],
            })
        } else {
            Some(ClosedFormConjugate::Unbounded)
        }
    }
}

/// Separable sum `F(z) = F1(x) + F2(y)` over the split `z = (x, y)`.
#[derive(Debug)]
pub struct Separable<P1, P2> {
    first: P1,
    second: P2,
}

impl<P1: Potential, P2: Potential> Separable<P1, P2> {
    pub fn new(first: P1, second: P2) -> Self {
        Self { first, second }
    }

    pub fn first(&self) -> &P1 {
        &self.first
    }

    pub fn second(&self) -> &P2 {
        &self.second
    }

    fn split<'a>(&self, z: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        z.split_at(self.first.dim())
    }
}

impl<P1: Potential, P2: Potential> Potential for Separable<P1, P2> {
    fn dim(&self) -> usize {
        self.first.dim() + self.second.dim()
    }

    fn value(&self, z: &[f64]) -> ExtReal {
        let (x, y) = self.split(z);
        self.first.value(x) + self.second.value(y)
    }

    fn in_domain(&self, z: &[f64]) -> bool {
        let (x, y) = self.split(z);
        self.first.in_domain(x) && self.second.in_domain(y)
    }

    fn gradient_analytic(&self, z: &[f64]) -> Option<Vec<f64>> {
        let (x, y) = self.split(z);
        let mut g = self.first.gradient_analytic(x)?;
        g.extend(self.second.gradient_analytic(y)?);
        Some(g)
    }

    fn interior_start(&self) -> Vec<f64> {
        let mut start = self.first.interior_start();
        start.extend(self.second.interior_start());
        start
    }

    fn conjugate_closed_form(&self, target: &[f64]) -> Option<ClosedFormConjugate> {
        let (tx, ty) = self.split(target);
        let first = self.first.conjugate_closed_form(tx)?;
        let second = self.second.conjugate_closed_form(ty)?;
        match (first, second) {
            (
                ClosedFormConjugate::Value {
                    value: v1,
                    argmax: mut a1,
                },
                ClosedFormConjugate::Value {
                    value: v2,
                    argmax: a2,
                },
            ) => {
                a1.extend(a2);
                Some(ClosedFormConjugate::Value {
                    value: v1 + v2,
                    argmax: a1,
                })
            }
            _ => Some(ClosedFormConjugate::Unbounded),
        }
    }

    fn prox_closed_form(&self, z: &[f64]) -> Option<Vec<f64>> {
        let (x, y) = self.split(z);
        let mut w = self.first.prox_closed_form(x)?;
        w.extend(self.second.prox_closed_form(y)?);
        Some(w)
    }
}

/// Affine generator change `F_bar(t) = F(A t + b) + <c, t> + d` with A
/// invertible; Bregman divergences are invariant under it.
#[derive(Debug)]
pub struct AffineReparam<P> {
    inner: P,
    a: Matrix,
    a_inv: Matrix,
    b: Vec<f64>,
    c: Vec<f64>,
    d: f64,
}

impl<P: Potential> AffineReparam<P> {
    pub fn new(inner: P, a: Matrix, b: Vec<f64>, c: Vec<f64>, d: f64) -> Result<Self> {
        let dim = inner.dim();
        if a.rows() != dim || a.cols() != dim || b.len() != dim || c.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: a.rows().max(b.len()).max(c.len()),
            });
        }
        let a_inv = a.inverse()?;
        Ok(Self {
            inner,
            a,
            a_inv,
            b,
            c,
            d,
        })
    }

    /// Maps an outer point to the inner one: `theta_bar = A^-1 (theta - b)`.
    pub fn pull_back(&self, theta: &[f64]) -> Vec<f64> {
        let shifted: Vec<f64> = theta.iter().zip(&self.b).map(|(t, b)| t - b).collect();
        self.a_inv.matvec(&shifted).expect("shape")
    }

    fn push_forward(&self, t: &[f64]) -> Vec<f64> {
        let mut z = self.a.matvec(t).expect("shape");
        for (zi, bi) in z.iter_mut().zip(&self.b) {
            *zi += bi;
        }
        z
    }
}

impl<P: Potential> Potential for AffineReparam<P> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, t: &[f64]) -> ExtReal {
        let lin: f64 = self.c.iter().zip(t).map(|(x, y)| x * y).sum();
        self.inner.value(&self.push_forward(t)) + ExtReal::Finite(lin + self.d)
    }

    fn in_domain(&self, t: &[f64]) -> bool {
        self.inner.in_domain(&self.push_forward(t))
    }

    fn gradient_analytic(&self, t: &[f64]) -> Option<Vec<f64>> {
        let inner_grad = self.inner.gradient_analytic(&self.push_forward(t))?;
        let mut g = self.a.transpose().matvec(&inner_grad).expect("shape");
        for (gi, ci) in g.iter_mut().zip(&self.c) {
            *gi += ci;
        }
        Some(g)
    }

    fn interior_start(&self) -> Vec<f64> {
        self.pull_back(&self.inner.interior_start())
    }
}
