//! Symplectic calculus on flat phase charts.
//!
//! # Conventions
//!
//! Coordinates are ordered `(p_1, .., p_n, q_1, .., q_n)` and the symplectic
//! form is `ω = Σ dp_i ∧ dq_i`. The Hamiltonian vector field is fixed by
//! `i_{sgrad H} ω = −dH`, which gives
//!
//! ```text
//! ṗ_i = −∂H/∂q_i,    q̇_i = ∂H/∂p_i
//! ```
//!
//! and the Poisson bracket is `{F, G} = ω(sgrad G, sgrad F) = dF(sgrad G)`,
//! so `{p, q} = −1`. Along a trajectory of `G` one has `dF/dt = {F, G}`.
//! The literature uses both signs; every module in this crate uses this one.
//!
//! Any `q` coordinate may be flagged periodic (a flat torus factor, period 1).
//! Operations that return points reduce those coordinates to `[0, 1)`.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhaseError {
    #[error("phase chart needs at least one coordinate pair")]
    EmptyChart,
    #[error("periodicity mask has {got} entries, chart has {expected} q-coordinates")]
    MaskLength { expected: usize, got: usize },
    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite gradient at x = {point:?}, t = {time}")]
    NonFinite { point: Vec<f64>, time: f64 },
    #[error("autonomize called on a Hamiltonian declared autonomous")]
    AlreadyAutonomous,
}

/// Wraps `x` into `[0, 1)`.
#[inline]
pub fn wrap_unit(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Signed representative of `x` modulo 1 in `[-1/2, 1/2)`.
#[inline]
pub fn wrap_centered(x: f64) -> f64 {
    let r = wrap_unit(x + 0.5) - 0.5;
    if r < -0.5 {
        r + 1.0
    } else {
        r
    }
}

/// A flat chart `R^n × R^n` with optional torus factors in the `q` block.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseChart {
    dim_pairs: usize,
    periodic: Vec<bool>,
}

impl PhaseChart {
    pub fn flat(dim_pairs: usize) -> Result<Self, PhaseError> {
        Self::new(dim_pairs, vec![false; dim_pairs])
    }

    /// All `q` coordinates periodic: the cotangent bundle of `T^n`.
    pub fn cotangent_torus(dim_pairs: usize) -> Result<Self, PhaseError> {
        Self::new(dim_pairs, vec![true; dim_pairs])
    }

    pub fn new(dim_pairs: usize, periodic: Vec<bool>) -> Result<Self, PhaseError> {
        if dim_pairs == 0 {
            return Err(PhaseError::EmptyChart);
        }
        if periodic.len() != dim_pairs {
            return Err(PhaseError::MaskLength {
                expected: dim_pairs,
                got: periodic.len(),
            });
        }
        Ok(Self { dim_pairs, periodic })
    }

    pub fn dim_pairs(&self) -> usize {
        self.dim_pairs
    }

    pub fn dim(&self) -> usize {
        2 * self.dim_pairs
    }

    /// Whether `q_i` (zero-based) is periodic.
    pub fn is_periodic(&self, i: usize) -> bool {
        self.periodic[i]
    }

    pub fn has_periodic(&self) -> bool {
        self.periodic.iter().any(|&b| b)
    }

    pub fn labels(&self) -> Vec<String> {
        let n = self.dim_pairs;
        (1..=n)
            .map(|i| format!("p{i}"))
            .chain((1..=n).map(|i| format!("q{i}")))
            .collect()
    }

    /// Reduces periodic coordinates of `coords` into `[0, 1)` in place.
    pub fn reduce(&self, coords: &mut [f64]) {
        let n = self.dim_pairs;
        for (i, &per) in self.periodic.iter().enumerate() {
            if per {
                coords[n + i] = wrap_unit(coords[n + i]);
            }
        }
    }

    pub fn point(&self, coords: Vec<f64>) -> Result<PhasePoint, PhaseError> {
        if coords.len() != self.dim() {
            return Err(PhaseError::DimensionMismatch {
                expected: self.dim(),
                got: coords.len(),
            });
        }
        let mut coords = coords;
        self.reduce(&mut coords);
        Ok(PhasePoint { coords })
    }

    /// `b − a` with periodic components taken in `[-1/2, 1/2)`.
    pub fn displacement(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let n = self.dim_pairs;
        let mut d: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
        for (i, &per) in self.periodic.iter().enumerate() {
            if per {
                d[n + i] = wrap_centered(d[n + i]);
            }
        }
        d
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        self.displacement(a, b).iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Chart of `M × T*S^1` with the extra pair `(r, θ)`, `θ` periodic.
    pub fn extended(&self) -> PhaseChart {
        let mut periodic = self.periodic.clone();
        periodic.push(true);
        PhaseChart {
            dim_pairs: self.dim_pairs + 1,
            periodic,
        }
    }
}

/// A point of a phase chart, periodic coordinates already reduced.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    coords: Vec<f64>,
}

impl PhasePoint {
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

impl std::ops::Deref for PhasePoint {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.coords
    }
}

/// How a Hamiltonian depends on time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeDependence {
    Autonomous,
    /// Periodic with period 1.
    Periodic,
}

/// A smooth function on `chart × S^1` with an analytic gradient.
pub trait Hamiltonian: Send + Sync {
    fn chart(&self) -> &PhaseChart;

    fn value(&self, x: &[f64], t: f64) -> f64;

    /// Writes `dH` at `(x, t)` into `grad` (length `2n`, chart order).
    fn gradient(&self, x: &[f64], t: f64, grad: &mut [f64]);

    fn time_dependence(&self) -> TimeDependence;

    /// `∂H/∂t`. The default is a five-point stencil, used only when no
    /// analytic derivative was supplied.
    fn time_derivative(&self, x: &[f64], t: f64) -> f64 {
        if self.time_dependence() == TimeDependence::Autonomous {
            return 0.0;
        }
        let h = 1e-4;
        let f = |s: f64| self.value(x, t + s);
        (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h)
    }

    fn is_autonomous(&self) -> bool {
        self.time_dependence() == TimeDependence::Autonomous
    }
}

pub type HamiltonianRef = Arc<dyn Hamiltonian>;

type ValueFn = dyn Fn(&[f64], f64) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64], f64, &mut [f64]) + Send + Sync;

/// Closure-backed Hamiltonian.
#[derive(Clone)]
pub struct FnHamiltonian {
    chart: PhaseChart,
    value: Arc<ValueFn>,
    gradient: Arc<GradFn>,
    dt: Option<Arc<ValueFn>>,
    time: TimeDependence,
}

impl FnHamiltonian {
    pub fn new(
        chart: PhaseChart,
        time: TimeDependence,
        value: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64], f64, &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        Self {
            chart,
            value: Arc::new(value),
            gradient: Arc::new(gradient),
            dt: None,
            time,
        }
    }

    pub fn with_time_derivative(
        mut self,
        dt: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.dt = Some(Arc::new(dt));
        self
    }

    pub fn zero(chart: PhaseChart) -> Self {
        Self::new(
            chart,
            TimeDependence::Autonomous,
            |_, _| 0.0,
            |_, _, g| g.fill(0.0),
        )
    }

    pub fn into_ref(self) -> HamiltonianRef {
        Arc::new(self)
    }
}

impl std::fmt::Debug for FnHamiltonian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnHamiltonian")
            .field("chart", &self.chart)
            .field("time", &self.time)
            .finish_non_exhaustive()
    }
}

impl Hamiltonian for FnHamiltonian {
    fn chart(&self) -> &PhaseChart {
        &self.chart
    }

    fn value(&self, x: &[f64], t: f64) -> f64 {
        (self.value)(x, t)
    }

    fn gradient(&self, x: &[f64], t: f64, grad: &mut [f64]) {
        (self.gradient)(x, t, grad)
    }

    fn time_dependence(&self) -> TimeDependence {
        self.time
    }

    fn time_derivative(&self, x: &[f64], t: f64) -> f64 {
        match (&self.dt, self.time) {
            (_, TimeDependence::Autonomous) => 0.0,
            (Some(dt), _) => dt(x, t),
            (None, _) => {
                let h = 1e-4;
                let f = |s: f64| (self.value)(x, t + s);
                (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h)
            }
        }
    }
}

/// Pointwise sum of Hamiltonians on a common chart.
pub struct Sum {
    terms: Vec<HamiltonianRef>,
}

impl Sum {
    pub fn new(terms: Vec<HamiltonianRef>) -> Self {
        assert!(!terms.is_empty(), "empty sum");
        let dim = terms[0].chart().dim();
        assert!(terms.iter().all(|h| h.chart().dim() == dim));
        Self { terms }
    }
}

impl Hamiltonian for Sum {
    fn chart(&self) -> &PhaseChart {
        self.terms[0].chart()
    }

    fn value(&self, x: &[f64], t: f64) -> f64 {
        self.terms.iter().map(|h| h.value(x, t)).sum()
    }

    fn gradient(&self, x: &[f64], t: f64, grad: &mut [f64]) {
        grad.fill(0.0);
        let mut buf = vec![0.0; grad.len()];
        for h in &self.terms {
            h.gradient(x, t, &mut buf);
            for (g, b) in grad.iter_mut().zip(&buf) {
                *g += b;
            }
        }
    }

    fn time_dependence(&self) -> TimeDependence {
        if self.terms.iter().all(|h| h.is_autonomous()) {
            TimeDependence::Autonomous
        } else {
            TimeDependence::Periodic
        }
    }

    fn time_derivative(&self, x: &[f64], t: f64) -> f64 {
        self.terms.iter().map(|h| h.time_derivative(x, t)).sum()
    }
}

/// Pointwise product `A·B` (product rule gradient).
pub struct Product {
    a: HamiltonianRef,
    b: HamiltonianRef,
}

impl Product {
    pub fn new(a: HamiltonianRef, b: HamiltonianRef) -> Self {
        assert_eq!(a.chart().dim(), b.chart().dim());
        Self { a, b }
    }
}

impl Hamiltonian for Product {
    fn chart(&self) -> &PhaseChart {
        self.a.chart()
    }

    fn value(&self, x: &[f64], t: f64) -> f64 {
        self.a.value(x, t) * self.b.value(x, t)
    }

    fn gradient(&self, x: &[f64], t: f64, grad: &mut [f64]) {
        let mut ga = vec![0.0; grad.len()];
        let mut gb = vec![0.0; grad.len()];
        self.a.gradient(x, t, &mut ga);
        self.b.gradient(x, t, &mut gb);
        let (va, vb) = (self.a.value(x, t), self.b.value(x, t));
        for i in 0..grad.len() {
            grad[i] = ga[i] * vb + va * gb[i];
        }
    }

    fn time_dependence(&self) -> TimeDependence {
        if self.a.is_autonomous() && self.b.is_autonomous() {
            TimeDependence::Autonomous
        } else {
            TimeDependence::Periodic
        }
    }

    fn time_derivative(&self, x: &[f64], t: f64) -> f64 {
        self.a.time_derivative(x, t) * self.b.value(x, t)
            + self.a.value(x, t) * self.b.time_derivative(x, t)
    }
}

/// Autonomous polynomial in the chart coordinates.
#[derive(Debug, Clone)]
pub struct Polynomial {
    chart: PhaseChart,
    terms: Vec<(f64, Vec<u32>)>,
}

impl Polynomial {
    pub fn new(chart: PhaseChart, terms: Vec<(f64, Vec<u32>)>) -> Self {
        assert!(terms.iter().all(|(_, e)| e.len() == chart.dim()));
        Self { chart, terms }
    }

    /// Single coordinate `x_index`.
    pub fn coordinate(chart: PhaseChart, index: usize) -> Self {
        let mut e = vec![0; chart.dim()];
        e[index] = 1;
        Self::new(chart, vec![(1.0, e)])
    }

    /// Random polynomial with `n_terms` monomials of total degree `1..=degree`
    /// and coefficients in `[-1, 1]`.
    pub fn random(chart: PhaseChart, degree: u32, n_terms: usize, rng: &mut impl Rng) -> Self {
        let dim = chart.dim();
        let terms = (0..n_terms)
            .map(|_| {
                let deg = rng.gen_range(1..=degree);
                let mut e = vec![0u32; dim];
                for _ in 0..deg {
                    e[rng.gen_range(0..dim)] += 1;
                }
                (rng.gen_range(-1.0..1.0), e)
            })
            .collect();
        Self::new(chart, terms)
    }
}

impl Hamiltonian for Polynomial {
    fn chart(&self) -> &PhaseChart {
        &self.chart
    }

    fn value(&self, x: &[f64], _t: f64) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c * e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }

    fn gradient(&self, x: &[f64], _t: f64, grad: &mut [f64]) {
        grad.fill(0.0);
        for (c, e) in &self.terms {
            for j in 0..x.len() {
                if e[j] == 0 {
                    continue;
                }
                let mut m = c * e[j] as f64;
                for (i, (&k, &xi)) in e.iter().zip(x).enumerate() {
                    let k = if i == j { k - 1 } else { k };
                    m *= xi.powi(k as i32);
                }
                grad[j] += m;
            }
        }
    }

    fn time_dependence(&self) -> TimeDependence {
        TimeDependence::Autonomous
    }
}

fn checked_gradient(h: &dyn Hamiltonian, x: &[f64], t: f64, grad: &mut [f64]) -> Result<(), PhaseError> {
    let dim = h.chart().dim();
    if x.len() != dim {
        return Err(PhaseError::DimensionMismatch {
            expected: dim,
            got: x.len(),
        });
    }
    h.gradient(x, t, grad);
    if grad.iter().all(|g| g.is_finite()) {
        Ok(())
    } else {
        Err(PhaseError::NonFinite {
            point: x.to_vec(),
            time: t,
        })
    }
}

/// Maps a covector `dH` to `sgrad H` in place of `out`.
#[inline]
pub fn sgrad_from_gradient(grad: &[f64], out: &mut [f64]) {
    let n = grad.len() / 2;
    for i in 0..n {
        out[i] = -grad[n + i];
        out[n + i] = grad[i];
    }
}

/// The Hamiltonian vector field `sgrad H` at `(x, t)`.
pub fn sgrad(h: &dyn Hamiltonian, x: &[f64], t: f64) -> Result<Vec<f64>, PhaseError> {
    let mut grad = vec![0.0; h.chart().dim()];
    checked_gradient(h, x, t, &mut grad)?;
    let mut out = vec![0.0; grad.len()];
    sgrad_from_gradient(&grad, &mut out);
    Ok(out)
}

/// `{F, G}` from the two gradients. Swapping the arguments negates every
/// summand exactly, so antisymmetry holds bit for bit.
#[inline]
pub fn bracket_from_gradients(df: &[f64], dg: &[f64]) -> f64 {
    let n = df.len() / 2;
    let mut acc = 0.0;
    for i in 0..n {
        acc += df[n + i] * dg[i] - df[i] * dg[n + i];
    }
    acc
}

/// `{F, G} = dF(sgrad G)`.
pub fn poisson_bracket(
    f: &dyn Hamiltonian,
    g: &dyn Hamiltonian,
    x: &[f64],
    t: f64,
) -> Result<f64, PhaseError> {
    let dim = f.chart().dim();
    let mut df = vec![0.0; dim];
    let mut dg = vec![0.0; dim];
    checked_gradient(f, x, t, &mut df)?;
    checked_gradient(g, x, t, &mut dg)?;
    Ok(bracket_from_gradients(&df, &dg))
}

/// `H(x, r, θ) = G(x, θ) + r` on `M × T*S^1`.
///
/// Extended coordinates are `(p_1..p_n, r, q_1..q_n, θ)`; `θ` is periodic.
/// Along the flow `θ̇ = 1` and `ṙ = −∂G/∂t`, so the projection to `M` is a
/// trajectory of `G` started at time `θ(0)`.
pub struct Autonomized {
    inner: HamiltonianRef,
    chart: PhaseChart,
}

impl Autonomized {
    pub fn inner(&self) -> &HamiltonianRef {
        &self.inner
    }

    /// Splits an extended point into `(x, r, θ)`.
    pub fn split(&self, ext: &[f64]) -> (Vec<f64>, f64, f64) {
        let n = self.inner.chart().dim_pairs();
        let mut x = Vec::with_capacity(2 * n);
        x.extend_from_slice(&ext[..n]);
        x.extend_from_slice(&ext[n + 1..2 * n + 1]);
        (x, ext[n], ext[2 * n + 1])
    }

    pub fn join(&self, x: &[f64], r: f64, theta: f64) -> Vec<f64> {
        let n = self.inner.chart().dim_pairs();
        let mut ext = Vec::with_capacity(2 * n + 2);
        ext.extend_from_slice(&x[..n]);
        ext.push(r);
        ext.extend_from_slice(&x[n..]);
        ext.push(wrap_unit(theta));
        ext
    }
}

impl Hamiltonian for Autonomized {
    fn chart(&self) -> &PhaseChart {
        &self.chart
    }

    fn value(&self, ext: &[f64], _t: f64) -> f64 {
        let (x, r, theta) = self.split(ext);
        self.inner.value(&x, theta) + r
    }

    fn gradient(&self, ext: &[f64], _t: f64, grad: &mut [f64]) {
        let n = self.inner.chart().dim_pairs();
        let (x, _, theta) = self.split(ext);
        let mut g = vec![0.0; 2 * n];
        self.inner.gradient(&x, theta, &mut g);
        grad[..n].copy_from_slice(&g[..n]);
        grad[n] = 1.0;
        grad[n + 1..2 * n + 1].copy_from_slice(&g[n..]);
        grad[2 * n + 1] = self.inner.time_derivative(&x, theta);
    }

    fn time_dependence(&self) -> TimeDependence {
        TimeDependence::Autonomous
    }
}

pub fn autonomize(g: HamiltonianRef) -> Result<Autonomized, PhaseError> {
    if g.is_autonomous() {
        return Err(PhaseError::AlreadyAutonomous);
    }
    let chart = g.chart().extended();
    Ok(Autonomized { inner: g, chart })
}

/// Result of comparing `ω_τ^n` with `ω^n` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeFactor {
    /// `sign · (det ω_τ / det ω)^{1/2}`, sign from the Pfaffian.
    pub determinant_ratio: f64,
    /// `1 − τ{F, G}`.
    pub analytic: f64,
    /// `τ{F,G} ≥ 1`: `ω_τ` is not symplectic (or has flipped orientation) here.
    pub degenerate: bool,
}

/// Pfaffian of a skew-symmetric matrix by pivoted skew elimination.
pub fn pfaffian(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    if n % 2 == 1 {
        return 0.0;
    }
    let mut a = m.clone();
    let mut pf = 1.0;
    let mut k = 0;
    while k + 1 < n {
        let (mut piv, mut best) = (k + 1, a[(k, k + 1)].abs());
        for j in k + 2..n {
            if a[(k, j)].abs() > best {
                best = a[(k, j)].abs();
                piv = j;
            }
        }
        if piv != k + 1 {
            a.swap_rows(k + 1, piv);
            a.swap_columns(k + 1, piv);
            pf = -pf;
        }
        let akk1 = a[(k, k + 1)];
        if akk1 == 0.0 {
            return 0.0;
        }
        pf *= akk1;
        let tau: Vec<f64> = (k + 2..n).map(|j| a[(k, j)] / akk1).collect();
        for (ii, i) in (k + 2..n).enumerate() {
            for (jj, j) in (k + 2..n).enumerate() {
                a[(i, j)] += -tau[ii] * a[(k + 1, j)] + tau[jj] * a[(k + 1, i)];
            }
        }
        k += 2;
    }
    pf
}

/// Matrix of `ω` in chart order: `ω(v, w) = vᵀ Ω w`.
pub fn standard_form(dim_pairs: usize) -> DMatrix<f64> {
    let n = dim_pairs;
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, n + i)] = 1.0;
        m[(n + i, i)] = -1.0;
    }
    m
}

/// Compares the top power of `ω_τ = ω + τ dF∧dG` with `ω^n` at `x` in two
/// independent ways: through the 2n×2n matrix of `ω_τ`, and through the
/// pointwise identity `ω_τ^n = (1 − τ{F,G}) ω^n`.
pub fn volume_factor(
    f: &dyn Hamiltonian,
    g: &dyn Hamiltonian,
    tau: f64,
    x: &[f64],
    t: f64,
) -> Result<VolumeFactor, PhaseError> {
    let n = f.chart().dim_pairs();
    let dim = 2 * n;
    let mut df = vec![0.0; dim];
    let mut dg = vec![0.0; dim];
    checked_gradient(f, x, t, &mut df)?;
    checked_gradient(g, x, t, &mut dg)?;

    let omega = standard_form(n);
    let mut a = omega.clone();
    for i in 0..dim {
        for j in 0..dim {
            a[(i, j)] += tau * (df[i] * dg[j] - dg[i] * df[j]);
        }
    }
    let det_ratio = a.determinant() / omega.determinant();
    let sign = (pfaffian(&a) / pfaffian(&omega)).signum();
    let determinant_ratio = sign * det_ratio.abs().sqrt();
    let bracket = bracket_from_gradients(&df, &dg);
    Ok(VolumeFactor {
        determinant_ratio,
        analytic: 1.0 - tau * bracket,
        degenerate: tau * bracket >= 1.0,
    })
}
