//! The three model contact manifolds, their Reeb flows and symplectizations.
//!
//! Points of `Σ` are stored in coordinates of the ambient chart's shape:
//!
//! | model                  | point of `Σ`       | ambient chart | embedding `(x, s)` |
//! |------------------------|--------------------|---------------|--------------------|
//! | `Circle`               | `[u]`              | `(p, q)`, q periodic | `(s, u)`    |
//! | `UnitCotangentTorus(k)`| `[p̂; q]`, `|p̂|=1`  | `T*T^k`       | `(s·p̂, q)`         |
//! | `ContactSphere(k)`     | `[p; q]`, `|z|=1`  | `C^k = R^2k`  | `√s·z`             |
//!
//! On each ambient chart the function `s` is itself a Hamiltonian whose flow
//! is the Reeb flow on every level (see [`ContactModel::s_value`]).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::phase::{wrap_centered, wrap_unit, PhaseChart};

/// Admissible distance of an input point from `Σ`.
pub const SIGMA_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContactError {
    #[error("point is off the contact manifold (constraint residual {residual:e})")]
    OffSigma { residual: f64 },
    #[error("expected {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("dimension parameter k must be at least 1")]
    ZeroDimension,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContactModel {
    Circle,
    UnitCotangentTorus { k: usize },
    ContactSphere { k: usize },
}

impl ContactModel {
    pub fn validate(&self) -> Result<(), ContactError> {
        match *self {
            ContactModel::UnitCotangentTorus { k: 0 } | ContactModel::ContactSphere { k: 0 } => {
                Err(ContactError::ZeroDimension)
            }
            _ => Ok(()),
        }
    }

    pub fn k(&self) -> usize {
        match *self {
            ContactModel::Circle => 1,
            ContactModel::UnitCotangentTorus { k } | ContactModel::ContactSphere { k } => k,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            ContactModel::Circle => "circle".into(),
            ContactModel::UnitCotangentTorus { k } => format!("unit_cotangent_torus({k})"),
            ContactModel::ContactSphere { k } => format!("contact_sphere({k})"),
        }
    }

    /// Length of a point of `Σ` in storage coordinates.
    pub fn sigma_len(&self) -> usize {
        match self {
            ContactModel::Circle => 1,
            _ => 2 * self.k(),
        }
    }

    pub fn ambient_chart(&self) -> PhaseChart {
        match *self {
            ContactModel::Circle => PhaseChart::cotangent_torus(1),
            ContactModel::UnitCotangentTorus { k } => PhaseChart::cotangent_torus(k),
            ContactModel::ContactSphere { k } => PhaseChart::flat(k),
        }
        .expect("validated model")
    }

    /// Exclusive (`Circle`, torus) or inclusive (sphere) upper bound on `T`.
    pub fn t_bound(&self) -> (f64, bool) {
        match self {
            ContactModel::Circle => (1.0, false),
            ContactModel::UnitCotangentTorus { .. } => (0.5, false),
            ContactModel::ContactSphere { .. } => (std::f64::consts::FRAC_PI_4, true),
        }
    }

    pub fn t_admissible(&self, t: f64) -> bool {
        let (b, inclusive) = self.t_bound();
        t > 0.0 && (t < b || (inclusive && t <= b))
    }

    pub fn constraint_residual(&self, x: &[f64]) -> f64 {
        let k = self.k();
        match self {
            ContactModel::Circle => 0.0,
            ContactModel::UnitCotangentTorus { .. } => (norm(&x[..k]) - 1.0).abs(),
            ContactModel::ContactSphere { .. } => (norm2(x) - 1.0).abs(),
        }
    }

    fn check(&self, x: &[f64]) -> Result<(), ContactError> {
        if x.len() != self.sigma_len() {
            return Err(ContactError::Dimension {
                expected: self.sigma_len(),
                got: x.len(),
            });
        }
        let residual = self.constraint_residual(x);
        if residual > SIGMA_TOL || !residual.is_finite() {
            return Err(ContactError::OffSigma { residual });
        }
        Ok(())
    }

    /// Closed-form Reeb flow `ψ_t` of `λ0`.
    pub fn reeb_flow(&self, x: &[f64], t: f64) -> Result<Vec<f64>, ContactError> {
        self.check(x)?;
        Ok(self.reeb_flow_unchecked(x, t))
    }

    pub(crate) fn reeb_flow_unchecked(&self, x: &[f64], t: f64) -> Vec<f64> {
        let k = self.k();
        match self {
            ContactModel::Circle => vec![wrap_unit(x[0] + t)],
            ContactModel::UnitCotangentTorus { .. } => {
                let mut y = x.to_vec();
                for i in 0..k {
                    y[k + i] = wrap_unit(x[k + i] + x[i] * t);
                }
                y
            }
            ContactModel::ContactSphere { .. } => rotate(x, 2.0 * t),
        }
    }

    /// The Reeb vector at `x` in storage coordinates.
    pub fn reeb_vector(&self, x: &[f64]) -> Vec<f64> {
        let k = self.k();
        match self {
            ContactModel::Circle => vec![1.0],
            ContactModel::UnitCotangentTorus { .. } => {
                let mut v = vec![0.0; 2 * k];
                v[k..].copy_from_slice(&x[..k]);
                v
            }
            ContactModel::ContactSphere { .. } => {
                let mut v = vec![0.0; 2 * k];
                for i in 0..k {
                    v[i] = -2.0 * x[k + i];
                    v[k + i] = 2.0 * x[i];
                }
                v
            }
        }
    }

    /// `λ0` at `x` applied to the tangent vector `v`.
    pub fn lambda0(&self, x: &[f64], v: &[f64]) -> f64 {
        let k = self.k();
        match self {
            ContactModel::Circle => v[0],
            ContactModel::UnitCotangentTorus { .. } => (0..k).map(|i| x[i] * v[k + i]).sum(),
            ContactModel::ContactSphere { .. } => {
                0.5 * (0..k).map(|i| x[i] * v[k + i] - x[k + i] * v[i]).sum::<f64>()
            }
        }
    }

    /// Ambient primitive `θ` with `dθ = ω`, applied to an ambient tangent vector.
    pub fn ambient_primitive(&self, y: &[f64], v: &[f64]) -> f64 {
        let n = self.ambient_chart().dim_pairs();
        match self {
            ContactModel::ContactSphere { .. } => {
                0.5 * (0..n).map(|i| y[i] * v[n + i] - y[n + i] * v[i]).sum::<f64>()
            }
            _ => (0..n).map(|i| y[i] * v[n + i]).sum(),
        }
    }

    /// Symplectization embedding `Σ × R_+ → ambient`.
    pub fn embed(&self, x: &[f64], s: f64) -> Vec<f64> {
        let k = self.k();
        match self {
            ContactModel::Circle => vec![s, wrap_unit(x[0])],
            ContactModel::UnitCotangentTorus { .. } => {
                let mut y = x.to_vec();
                for v in &mut y[..k] {
                    *v *= s;
                }
                for v in &mut y[k..] {
                    *v = wrap_unit(*v);
                }
                y
            }
            ContactModel::ContactSphere { .. } => x.iter().map(|v| v * s.sqrt()).collect(),
        }
    }

    /// Inverse of [`embed`](Self::embed) away from the zero section / origin.
    pub fn project(&self, y: &[f64]) -> (Vec<f64>, f64) {
        let k = self.k();
        match self {
            ContactModel::Circle => (vec![wrap_unit(y[1])], y[0]),
            ContactModel::UnitCotangentTorus { .. } => {
                let s = norm(&y[..k]);
                let mut x = y.to_vec();
                for v in &mut x[..k] {
                    *v /= s;
                }
                (x, s)
            }
            ContactModel::ContactSphere { .. } => {
                let s = norm2(y);
                let r = s.sqrt();
                (y.iter().map(|v| v / r).collect(), s)
            }
        }
    }

    /// The symplectization coordinate `s` as a function on the ambient chart.
    pub fn s_value(&self, y: &[f64]) -> f64 {
        let k = self.k();
        match self {
            ContactModel::Circle => y[0],
            ContactModel::UnitCotangentTorus { .. } => norm(&y[..k]),
            ContactModel::ContactSphere { .. } => norm2(y),
        }
    }

    pub fn s_gradient(&self, y: &[f64], grad: &mut [f64]) {
        let k = self.k();
        grad.fill(0.0);
        match self {
            ContactModel::Circle => grad[0] = 1.0,
            ContactModel::UnitCotangentTorus { .. } => {
                let r = norm(&y[..k]);
                for i in 0..k {
                    grad[i] = y[i] / r;
                }
            }
            ContactModel::ContactSphere { .. } => {
                for (g, v) in grad.iter_mut().zip(y) {
                    *g = 2.0 * v;
                }
            }
        }
    }

    /// Ambient Reeb flow on each level of `s`.
    pub fn ambient_reeb_flow(&self, y: &[f64], t: f64) -> Vec<f64> {
        let (x, s) = self.project(y);
        self.embed(&self.reeb_flow_unchecked(&x, t), s)
    }

    /// Dimension of the Legendrian `L`.
    pub fn legendrian_dim(&self) -> usize {
        self.k() - 1
    }

    /// Number of connected pieces of `L` parametrized separately.
    pub fn legendrian_patches(&self) -> usize {
        match self {
            ContactModel::Circle => 1,
            _ if self.k() == 1 => 2,
            _ => 1,
        }
    }

    /// Parameter ranges `(lo, hi, periodic)` of the Legendrian chart.
    pub fn legendrian_box(&self) -> Vec<(f64, f64, bool)> {
        sphere_angle_box(self.legendrian_dim())
    }

    /// The point of `L` with the given patch and angles.
    pub fn legendrian_point(&self, patch: usize, angles: &[f64]) -> Vec<f64> {
        let k = self.k();
        match self {
            ContactModel::Circle => vec![0.0],
            _ => {
                let mut x = vec![0.0; 2 * k];
                if k == 1 {
                    x[0] = if patch == 0 { 1.0 } else { -1.0 };
                } else {
                    x[..k].copy_from_slice(&unit_vector(angles));
                }
                x
            }
        }
    }

    /// Distance on `Σ` from `x` to `L`, up to a model-dependent constant factor.
    pub fn legendrian_distance(&self, x: &[f64]) -> f64 {
        let k = self.k();
        match self {
            ContactModel::Circle => wrap_centered(x[0]).abs(),
            ContactModel::UnitCotangentTorus { .. } => {
                norm(&x[k..].iter().map(|&q| wrap_centered(q)).collect::<Vec<_>>())
            }
            ContactModel::ContactSphere { .. } => norm(&x[k..]),
        }
    }
}

pub(crate) fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    norm2(x).sqrt()
}

/// Multiplies `z = p + iq` by `e^{iθ}`.
pub(crate) fn rotate(z: &[f64], theta: f64) -> Vec<f64> {
    let k = z.len() / 2;
    let (s, c) = theta.sin_cos();
    let mut w = vec![0.0; 2 * k];
    for i in 0..k {
        w[i] = c * z[i] - s * z[k + i];
        w[k + i] = s * z[i] + c * z[k + i];
    }
    w
}

/// Hyperspherical angle box for `S^d`: `d − 1` polar angles in `[0, π]`
/// and one periodic azimuth in `[0, 2π)`.
pub fn sphere_angle_box(d: usize) -> Vec<(f64, f64, bool)> {
    use std::f64::consts::PI;
    if d == 0 {
        return Vec::new();
    }
    let mut b = vec![(0.0, PI, false); d - 1];
    b.push((0.0, 2.0 * PI, true));
    b
}

/// Unit vector in `R^{d+1}` from `d` hyperspherical angles.
pub fn unit_vector(angles: &[f64]) -> Vec<f64> {
    let d = angles.len();
    let mut v = vec![0.0; d + 1];
    let mut prod = 1.0;
    for i in 0..d {
        v[i] = prod * angles[i].cos();
        prod *= angles[i].sin();
    }
    v[d] = prod;
    v
}
