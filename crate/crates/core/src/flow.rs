//! Switched ODE integration: the driven flow on the state box, the
//! skew-product flow on state × signal, and the product metric.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::graph::DirectedGraph;
use crate::signal::{same_step, SwitchingSignal};

/// Velocity evaluator writing `dx/dt` at `x` into the output slice.
pub type FieldFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

#[derive(Clone)]
pub enum VectorField {
    /// One-dimensional `sum_k c[k] x^k`.
    Polynomial(Vec<f64>),
    /// `A x + b`.
    Linear { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
    /// One expression per state component.
    Expression(Vec<Expression>),
    Custom { dimension: usize, f: Arc<FieldFn> },
}

impl VectorField {
    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::arg("polynomial needs at least one coefficient"));
        }
        Ok(Self::Polynomial(coefficients))
    }

    pub fn linear(matrix: Vec<Vec<f64>>, offset: Vec<f64>) -> Result<Self> {
        let d = offset.len();
        if d == 0 || matrix.len() != d || matrix.iter().any(|row| row.len() != d) {
            return Err(Error::arg("linear field needs a square matrix matching the offset"));
        }
        Ok(Self::Linear { matrix, offset })
    }

    /// Parses one expression per component over `x1..xd`.
    pub fn expressions<S: AsRef<str>>(components: &[S]) -> Result<Self> {
        let d = components.len();
        if d == 0 {
            return Err(Error::arg("expression field needs at least one component"));
        }
        components
            .iter()
            .map(|s| Expression::parse(s.as_ref(), d))
            .collect::<Result<Vec<_>>>()
            .map(Self::Expression)
    }

    pub fn custom(dimension: usize, f: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static) -> Self {
        Self::Custom {
            dimension,
            f: Arc::new(f),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Self::Polynomial(_) => 1,
            Self::Linear { offset, .. } => offset.len(),
            Self::Expression(e) => e.len(),
            Self::Custom { dimension, .. } => *dimension,
        }
    }

    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Self::Polynomial(c) => out[0] = c.iter().rev().fold(0.0, |acc, &ck| acc * x[0] + ck),
            Self::Linear { matrix, offset } => {
                for (o, (row, b)) in out.iter_mut().zip(matrix.iter().zip(offset)) {
                    *o = row.iter().zip(x).map(|(a, xi)| a * xi).sum::<f64>() + b;
                }
            }
            Self::Expression(e) => {
                for (o, ei) in out.iter_mut().zip(e) {
                    *o = ei.eval(x);
                }
            }
            Self::Custom { f, .. } => f(x, out),
        }
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Polynomial(c) => f.debug_tuple("Polynomial").field(c).finish(),
            Self::Linear { matrix, offset } => f
                .debug_struct("Linear")
                .field("matrix", matrix)
                .field("offset", offset)
                .finish(),
            Self::Expression(e) => {
                let src: Vec<&str> = e.iter().map(Expression::source).collect();
                f.debug_tuple("Expression").field(&src).finish()
            }
            Self::Custom { dimension, .. } => f.debug_struct("Custom").field("dimension", dimension).finish(),
        }
    }
}

/// Axis-aligned closed box `prod [lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl StateBox {
    pub fn new(bounds: &[(f64, f64)]) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::arg("box needs at least one axis"));
        }
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::arg(format!("axis {i}: degenerate interval [{lo}, {hi}]")));
            }
        }
        Ok(Self {
            lo: bounds.iter().map(|b| b.0).collect(),
            hi: bounds.iter().map(|b| b.1).collect(),
        })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(&[(lo, hi)])
    }

    pub fn dimension(&self) -> usize {
        self.lo.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lo
    }

    pub fn upper(&self) -> &[f64] {
        &self.hi
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension() && x.iter().zip(&self.lo).zip(&self.hi).all(|((v, lo), hi)| lo <= v && v <= hi)
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for ((v, lo), hi) in x.iter_mut().zip(&self.lo).zip(&self.hi) {
            *v = v.clamp(*lo, *hi);
        }
    }
}

/// A family of vector fields indexed by graph vertices, integrated with
/// fixed-step RK4 at `substeps` steps per switching cell of length `h`.
#[derive(Debug, Clone)]
pub struct SwitchedSystem {
    bounds: StateBox,
    h: f64,
    substeps: usize,
    fields: Vec<VectorField>,
    clamp: bool,
}

impl SwitchedSystem {
    pub fn new(g: &DirectedGraph, bounds: StateBox, h: f64, substeps: usize, fields: Vec<VectorField>) -> Result<Self> {
        if fields.len() != g.vertex_count() {
            return Err(Error::arg(format!(
                "{} fields given for a graph on {} vertices",
                fields.len(),
                g.vertex_count()
            )));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::arg(format!("step h must be positive, got {h}")));
        }
        if substeps == 0 {
            return Err(Error::arg("substeps must be at least 1"));
        }
        let d = bounds.dimension();
        if let Some(i) = fields.iter().position(|f| f.dimension() != d) {
            return Err(Error::arg(format!(
                "field {i} has dimension {} but the box has dimension {d}",
                fields[i].dimension()
            )));
        }
        Ok(Self {
            bounds,
            h,
            substeps,
            fields,
            clamp: false,
        })
    }

    /// Project onto the box after every RK4 substep.
    pub fn with_clamp(mut self, clamp: bool) -> Self {
        self.clamp = clamp;
        self
    }

    pub fn bounds(&self) -> &StateBox {
        &self.bounds
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn substeps(&self) -> usize {
        self.substeps
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    pub fn clamps(&self) -> bool {
        self.clamp
    }

    pub fn dimension(&self) -> usize {
        self.bounds.dimension()
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(Error::arg(format!(
                "state has dimension {} but the system has dimension {}",
                x.len(),
                self.dimension()
            )));
        }
        Ok(())
    }

    fn check_signal(&self, f: &SwitchingSignal) -> Result<()> {
        if !same_step(f.step(), self.h) {
            return Err(Error::arg(format!(
                "signal step {} differs from system step {}",
                f.step(),
                self.h
            )));
        }
        Ok(())
    }

    /// Flow of field `field` alone for time `dt` (negative runs backward),
    /// using `ceil(|dt|/h) * substeps` RK4 steps.
    pub fn integrate_segment(&self, field: usize, x0: &[f64], dt: f64) -> Result<Vec<f64>> {
        let vf = self
            .fields
            .get(field)
            .ok_or(Error::VertexOutOfRange {
                vertex: field,
                count: self.fields.len(),
            })?;
        self.check_point(x0)?;
        let mut x = x0.to_vec();
        self.advance(vf, &mut x, dt)?;
        Ok(x)
    }

    fn advance(&self, vf: &VectorField, x: &mut [f64], dt: f64) -> Result<()> {
        if dt == 0.0 {
            return Ok(());
        }
        if !dt.is_finite() {
            return Err(Error::Integration(format!("non-finite duration {dt}")));
        }
        let cells = (dt.abs() / self.h - 1e-9).ceil().max(1.0) as usize;
        let steps = cells * self.substeps;
        let step = dt / steps as f64;
        let d = x.len();
        let mut k = [vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]];
        let mut tmp = vec![0.0; d];
        for _ in 0..steps {
            vf.eval(x, &mut k[0]);
            for i in 0..d {
                tmp[i] = x[i] + 0.5 * step * k[0][i];
            }
            vf.eval(&tmp, &mut k[1]);
            for i in 0..d {
                tmp[i] = x[i] + 0.5 * step * k[1][i];
            }
            vf.eval(&tmp, &mut k[2]);
            for i in 0..d {
                tmp[i] = x[i] + step * k[2][i];
            }
            vf.eval(&tmp, &mut k[3]);
            for i in 0..d {
                x[i] += step / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
            }
            if self.clamp {
                self.bounds.clamp(x);
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::Integration(format!("state became non-finite: {x:?}")));
            }
        }
        Ok(())
    }

    /// `phi(t, x0, f)`: integrates piecewise between the switching times of
    /// `f` in `[0, t]` (or `[t, 0]`), using on each piece the field of the
    /// vertex active there.
    pub fn switched_flow(&self, t: f64, x0: &[f64], f: &SwitchingSignal) -> Result<Vec<f64>> {
        self.check_point(x0)?;
        self.check_signal(f)?;
        let mut x = x0.to_vec();
        let (h, phase) = (self.h, f.phase());
        let min_piece = 1e-12 * h;
        let boundary = |k: i64| (k as f64 + phase) * h;
        if t > 0.0 {
            let mut s = 0.0;
            let mut k = (-phase).floor() as i64;
            while s < t {
                let end = boundary(k + 1).min(t);
                if end - s > min_piece {
                    self.advance(&self.fields[f.base().at(k)], &mut x, end - s)?;
                }
                s = end;
                k += 1;
            }
        } else if t < 0.0 {
            let mut s = 0.0;
            let mut k = -1i64;
            while s > t {
                let start = boundary(k).max(t);
                if s - start > min_piece {
                    self.advance(&self.fields[f.base().at(k)], &mut x, start - s)?;
                }
                s = start;
                k -= 1;
            }
        }
        Ok(x)
    }

    /// `Phi_t(x, f) = (phi(t, x, f), f shifted by t)`.
    pub fn skew_product(&self, t: f64, s0: &HybridState) -> Result<HybridState> {
        Ok(HybridState {
            x: self.switched_flow(t, &s0.x, &s0.f)?,
            f: s0.f.shift(t),
        })
    }

    /// Flows many initial conditions in parallel.
    pub fn flow_many(&self, t: f64, xs: &[Vec<f64>], f: &SwitchingSignal) -> Result<Vec<Vec<f64>>> {
        xs.par_iter().map(|x| self.switched_flow(t, x, f)).collect()
    }

    /// Samples the driven trajectory at `0, dt, 2 dt, ...` up to and including
    /// `t_end`. Every sample is reached from the previous one, so the cost is
    /// linear in `t_end`.
    pub fn trajectory(&self, x0: &[f64], f: &SwitchingSignal, t_end: f64, sample_dt: f64) -> Result<Vec<Sample>> {
        let (samples, status) = self.trajectory_partial(x0, f, t_end, sample_dt);
        status.map(|_| samples)
    }

    /// As [`SwitchedSystem::trajectory`], but keeps the samples computed
    /// before a failure.
    pub fn trajectory_partial(
        &self,
        x0: &[f64],
        f: &SwitchingSignal,
        t_end: f64,
        sample_dt: f64,
    ) -> (Vec<Sample>, Result<()>) {
        let mut out = Vec::new();
        if !(sample_dt > 0.0) || !(t_end >= 0.0) || !t_end.is_finite() {
            return (out, Err(Error::arg("need t_end >= 0 and sample_dt > 0")));
        }
        if let Err(e) = self.check_point(x0).and_then(|_| self.check_signal(f)) {
            return (out, Err(e));
        }
        let count = (t_end / sample_dt - 1e-9).ceil() as usize;
        let mut x = x0.to_vec();
        out.push(Sample {
            t: 0.0,
            x: x.clone(),
            vertex: f.value_at(0.0),
        });
        let mut prev = 0.0;
        for i in 1..=count {
            let t = (i as f64 * sample_dt).min(t_end);
            x = match self.switched_flow(t - prev, &x, &f.shift(prev)) {
                Ok(x) => x,
                Err(e) => return (out, Err(e)),
            };
            out.push(Sample {
                t,
                x: x.clone(),
                vertex: f.value_at(t),
            });
            prev = t;
        }
        (out, Ok(()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: Vec<f64>,
    /// Vertex active on `[t, t + )`.
    pub vertex: usize,
}

/// A point of state × signal space.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridState {
    pub x: Vec<f64>,
    pub f: SwitchingSignal,
}

impl HybridState {
    pub fn new(x: Vec<f64>, f: SwitchingSignal) -> Self {
        Self { x, f }
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

/// Euclidean distance of the states plus the signal metric.
pub fn product_metric(a: &HybridState, b: &HybridState, tol: f64) -> Result<f64> {
    if a.x.len() != b.x.len() {
        return Err(Error::arg("states of different dimension"));
    }
    Ok(euclidean(&a.x, &b.x) + a.f.distance(&b.f, tol)?)
}
