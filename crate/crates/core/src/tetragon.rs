//! Lagrangian tetragons in the symplectization of a model contact manifold.
//!
//! With `L` the model Legendrian and `ψ_t` its Reeb flow, the four regions are
//!
//! - floor `{(ψ_t x, R0) : x ∈ L, t ∈ [0, T]}` and ceiling (same at `R1`),
//! - high wall `{(x, s) : x ∈ L, s ∈ [R0, R1]}` at Reeb time `0`,
//! - low wall `{(ψ_T x, s)}` at Reeb time `T`,
//!
//! all mapped into the ambient chart. A [`Region`] is either a *sweep*
//! (fixed `s`, Reeb time in `[0, t_max]`) or a *wall* (fixed Reeb time `c`,
//! `s` in an interval). Both expose membership, distance and a signed
//! `level` whose zero set is a hypersurface containing the region; the chord
//! search uses it for event detection.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contact::{norm, norm2, rotate, ContactError, ContactModel};
use crate::phase::{wrap_centered, wrap_unit};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TetragonError {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error(transparent)]
    Contact(#[from] ContactError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionShape {
    /// `ψ_t(L)` at level `s`, `t ∈ [0, t_max]`.
    Sweep { s: f64, t_max: f64 },
    /// `ψ_c(L) × [s_lo, s_hi]`.
    Wall { c: f64, s_lo: f64, s_hi: f64 },
}

/// One parameter axis: `(lo, hi, periodic)`.
pub type Axis = (f64, f64, bool);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub name: String,
    pub model: ContactModel,
    pub shape: RegionShape,
}

impl Region {
    pub fn new(name: impl Into<String>, model: ContactModel, shape: RegionShape) -> Self {
        Self {
            name: name.into(),
            model,
            shape,
        }
    }

    pub fn patches(&self) -> usize {
        self.model.legendrian_patches()
    }

    /// Legendrian angles followed by the Reeb time (sweep) or `s` (wall).
    pub fn param_box(&self) -> Vec<Axis> {
        let mut b = self.model.legendrian_box();
        b.push(match self.shape {
            RegionShape::Sweep { t_max, .. } => (0.0, t_max, false),
            RegionShape::Wall { s_lo, s_hi, .. } => (s_lo, s_hi, false),
        });
        b
    }

    pub fn point(&self, patch: usize, params: &[f64]) -> Vec<f64> {
        let d = self.model.legendrian_dim();
        let x = self.model.legendrian_point(patch, &params[..d]);
        let last = params[d];
        match self.shape {
            RegionShape::Sweep { s, .. } => {
                self.model.embed(&self.model.reeb_flow_unchecked(&x, last), s)
            }
            RegionShape::Wall { c, .. } => {
                self.model.embed(&self.model.reeb_flow_unchecked(&x, c), last)
            }
        }
    }

    /// Deterministic grid of about `n` member points as `(patch, params)`.
    pub fn samples(&self, n: usize) -> Vec<(usize, Vec<f64>)> {
        let per_patch = (n / self.patches()).max(1);
        let grid = grid_points(&self.param_box(), per_patch);
        (0..self.patches())
            .flat_map(|p| grid.iter().map(move |g| (p, g.clone())))
            .collect()
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        self.distance(y) <= tol
    }

    /// Euclidean distance in the ambient chart (periodic coordinates wrapped).
    pub fn distance(&self, y: &[f64]) -> f64 {
        let k = self.model.k();
        match (self.model, self.shape) {
            (ContactModel::Circle, RegionShape::Sweep { s, t_max }) => {
                let w = wrap_unit(y[1]);
                let dq = if w <= t_max { 0.0 } else { (w - t_max).min(1.0 - w) };
                (y[0] - s).hypot(dq)
            }
            (ContactModel::Circle, RegionShape::Wall { c, s_lo, s_hi }) => {
                interval_gap(y[0], s_lo, s_hi).hypot(wrap_centered(y[1] - c))
            }
            (ContactModel::UnitCotangentTorus { .. }, shape) => {
                let p = &y[..k];
                let q: Vec<f64> = y[k..].iter().map(|&v| wrap_centered(v)).collect();
                // Point (a·p̂, b·p̂); for fixed (a, b) the best p̂ is along a·p + b·q.
                let dist_at = |a: f64, b: f64| -> f64 {
                    let w: Vec<f64> = (0..k).map(|i| a * p[i] + b * q[i]).collect();
                    let nw = norm(&w);
                    let dir: Vec<f64> = if nw > 0.0 {
                        w.iter().map(|v| v / nw).collect()
                    } else {
                        let mut e = vec![0.0; k];
                        e[0] = 1.0;
                        e
                    };
                    (0..k)
                        .map(|i| (p[i] - a * dir[i]).powi(2) + (q[i] - b * dir[i]).powi(2))
                        .sum::<f64>()
                        .sqrt()
                };
                match shape {
                    RegionShape::Sweep { s, t_max } => minimize_1d(|t| dist_at(s, t), 0.0, t_max).1,
                    RegionShape::Wall { c, s_lo, s_hi } => {
                        minimize_1d(|s| dist_at(s, c), s_lo, s_hi).1
                    }
                }
            }
            (ContactModel::ContactSphere { .. }, RegionShape::Sweep { s, t_max }) => {
                let r = s.sqrt();
                let dist_at = |phi: f64| -> f64 {
                    let (sn, cs) = phi.sin_cos();
                    let w: Vec<f64> = (0..k).map(|i| cs * y[i] + sn * y[k + i]).collect();
                    let nw = norm(&w);
                    let x: Vec<f64> = if nw > 0.0 {
                        w.iter().map(|v| v / nw).collect()
                    } else {
                        let mut e = vec![0.0; k];
                        e[0] = 1.0;
                        e
                    };
                    (0..k)
                        .map(|i| (y[i] - r * cs * x[i]).powi(2) + (y[k + i] - r * sn * x[i]).powi(2))
                        .sum::<f64>()
                        .sqrt()
                };
                minimize_1d(dist_at, 0.0, 2.0 * t_max).1
            }
            (ContactModel::ContactSphere { .. }, RegionShape::Wall { c, s_lo, s_hi }) => {
                let z = rotate(y, -2.0 * c);
                let np = norm(&z[..k]);
                norm(&z[k..]).hypot(interval_gap(np, s_lo.sqrt(), s_hi.sqrt()))
            }
        }
    }

    /// Signed function vanishing on a hypersurface that contains the region.
    /// For sweeps it is `s − s_region`; for walls it is Reeb time minus `c`.
    pub fn level(&self, y: &[f64]) -> f64 {
        let k = self.model.k();
        match self.shape {
            RegionShape::Sweep { s, .. } => self.model.s_value(y) - s,
            RegionShape::Wall { c, .. } => match self.model {
                ContactModel::Circle => wrap_centered(y[1] - c),
                ContactModel::UnitCotangentTorus { .. } => {
                    let np = norm(&y[..k]);
                    let dot: f64 = (0..k).map(|i| y[i] * wrap_centered(y[k + i])).sum();
                    dot / np.max(1e-300) - c
                }
                ContactModel::ContactSphere { .. } => {
                    let z = rotate(y, -2.0 * c);
                    let np = norm(&z[..k]);
                    let dot: f64 = (0..k).map(|i| z[i] * z[k + i]).sum();
                    0.5 * (dot / np.max(1e-300)).atan2(np)
                }
            },
        }
    }
}

/// Distance from `x` to `[lo, hi]`.
pub fn interval_gap(x: f64, lo: f64, hi: f64) -> f64 {
    if x < lo {
        lo - x
    } else if x > hi {
        x - hi
    } else {
        0.0
    }
}

/// Minimum of `f` on `[a, b]` by coarse sampling and golden-section polish.
pub fn minimize_1d(f: impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    if b <= a {
        return (a, f(a));
    }
    const N: usize = 16;
    let h = (b - a) / N as f64;
    let (mut best_i, mut best) = (0, f64::INFINITY);
    for i in 0..=N {
        let v = f(a + h * i as f64);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let mut lo = (a + h * (best_i as f64 - 1.0)).max(a);
    let mut hi = (a + h * (best_i as f64 + 1.0)).min(b);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if hi - lo < 1e-13 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    let (xm, fm) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if fm <= best {
        (xm, fm)
    } else {
        (a + h * best_i as f64, best)
    }
}

/// Points per axis for about `n` grid points over `dims` axes.
pub fn per_axis(n: usize, dims: usize) -> usize {
    if dims == 0 {
        return 1;
    }
    let m = (n as f64).powf(1.0 / dims as f64).round() as usize;
    m.max(2)
}

/// Uniform tensor grid: closed axes include both endpoints, periodic ones
/// exclude the right endpoint.
pub fn grid_points(axes: &[Axis], n: usize) -> Vec<Vec<f64>> {
    let m = per_axis(n, axes.len());
    let ticks: Vec<Vec<f64>> = axes
        .iter()
        .map(|&(lo, hi, periodic)| {
            if hi <= lo {
                return vec![lo];
            }
            if periodic {
                (0..m).map(|i| lo + (hi - lo) * i as f64 / m as f64).collect()
            } else {
                (0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect()
            }
        })
        .collect();
    let mut out = vec![Vec::new()];
    for t in &ticks {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                t.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tetragon {
    pub model: ContactModel,
    pub r0: f64,
    pub r1: f64,
    pub t: f64,
    pub floor: Region,
    pub ceiling: Region,
    pub low_wall: Region,
    pub high_wall: Region,
}

impl Tetragon {
    pub fn regions(&self) -> [&Region; 4] {
        [&self.floor, &self.ceiling, &self.low_wall, &self.high_wall]
    }

    /// Euclidean area `(R1 − R0)·T` of the `(s, t)` rectangle.
    pub fn rectangle_area(&self) -> f64 {
        (self.r1 - self.r0) * self.t
    }

    /// The Reeb chord target `ψ_c(L)` thickened over `s ∈ [s_lo, s_hi]`.
    pub fn reeb_target(&self, c: f64, s_lo: f64, s_hi: f64) -> Region {
        Region::new("reeb_target", self.model, RegionShape::Wall { c, s_lo, s_hi })
    }
}

pub fn build_tetragon(model: ContactModel, r0: f64, r1: f64, t: f64) -> Result<Tetragon, TetragonError> {
    model.validate()?;
    if !(r0 > 0.0 && r1 > r0 && r1.is_finite()) {
        return Err(TetragonError::Parameter(format!(
            "need 0 < R0 < R1, got R0 = {r0}, R1 = {r1}"
        )));
    }
    if !model.t_admissible(t) {
        let (b, inclusive) = model.t_bound();
        let rel = if inclusive { "≤" } else { "<" };
        return Err(TetragonError::Parameter(format!(
            "{} requires 0 < T {rel} {b}, got T = {t}",
            model.name()
        )));
    }
    // ψ_t(L) ∩ L = ∅ for t ∈ (0, T], checked on samples.
    let box_ = model.legendrian_box();
    for patch in 0..model.legendrian_patches() {
        for angles in grid_points(&box_, 64) {
            let x = model.legendrian_point(patch, &angles);
            for i in 1..=64 {
                let tt = t * i as f64 / 64.0;
                let y = model.reeb_flow_unchecked(&x, tt);
                if model.legendrian_distance(&y) < 1e-9 {
                    return Err(TetragonError::Geometry(format!(
                        "Reeb flow returns to L at time {tt}"
                    )));
                }
            }
        }
    }
    Ok(Tetragon {
        model,
        r0,
        r1,
        t,
        floor: Region::new("floor", model, RegionShape::Sweep { s: r0, t_max: t }),
        ceiling: Region::new("ceiling", model, RegionShape::Sweep { s: r1, t_max: t }),
        low_wall: Region::new("low_wall", model, RegionShape::Wall { c: t, s_lo: r0, s_hi: r1 }),
        high_wall: Region::new("high_wall", model, RegionShape::Wall { c: 0.0, s_lo: r0, s_hi: r1 }),
    })
}

/// The tetragon with its corners rounded along `γ_ε ⊂ [R0, R1] × [0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothedTetragon {
    pub tetragon: Tetragon,
    pub eps: f64,
    pub area: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LagrangianResidual {
    pub max_abs: f64,
    pub samples: usize,
}

pub fn smooth_tetragon(tet: &Tetragon, eps: f64) -> Result<SmoothedTetragon, TetragonError> {
    let limit = 0.5 * (tet.r1 - tet.r0).min(tet.t);
    if !(eps > 0.0 && eps < limit) {
        return Err(TetragonError::Parameter(format!(
            "need 0 < eps < min(R1 − R0, T)/2 = {limit}, got {eps}"
        )));
    }
    Ok(SmoothedTetragon {
        tetragon: tet.clone(),
        eps,
        area: tet.rectangle_area() - (4.0 - std::f64::consts::PI) * eps * eps,
    })
}

impl SmoothedTetragon {
    fn sides(&self) -> (f64, f64) {
        let t = &self.tetragon;
        (t.r1 - t.r0 - 2.0 * self.eps, t.t - 2.0 * self.eps)
    }

    pub fn perimeter(&self) -> f64 {
        let (w, h) = self.sides();
        2.0 * (w + h) + 2.0 * std::f64::consts::PI * self.eps
    }

    /// Point and unit tangent of `γ_ε` at `σ ∈ [0, 1)`, counterclockwise in
    /// the `(s, t)` plane from the middle-left of the bottom edge.
    pub fn loop_point(&self, sigma: f64) -> ((f64, f64), (f64, f64)) {
        use std::f64::consts::FRAC_PI_2;
        let tet = &self.tetragon;
        let e = self.eps;
        let (w, h) = self.sides();
        let arc = FRAC_PI_2 * e;
        let mut l = wrap_unit(sigma) * self.perimeter();
        let corners = [
            (tet.r1 - e, e, -FRAC_PI_2),
            (tet.r1 - e, tet.t - e, 0.0),
            (tet.r0 + e, tet.t - e, FRAC_PI_2),
            (tet.r0 + e, e, std::f64::consts::PI),
        ];
        let starts = [(tet.r0 + e, 0.0), (tet.r1, e), (tet.r1 - e, tet.t), (tet.r0, tet.t - e)];
        let dirs = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        let lens = [w, h, w, h];
        for side in 0..4 {
            if l <= lens[side] {
                let (x0, y0) = starts[side];
                let (dx, dy) = dirs[side];
                return ((x0 + dx * l, y0 + dy * l), (dx, dy));
            }
            l -= lens[side];
            if l <= arc {
                let (cx, cy, a0) = corners[side];
                let a = a0 + l / e;
                return ((cx + e * a.cos(), cy + e * a.sin()), (-a.sin(), a.cos()));
            }
            l -= arc;
        }
        (starts[0], dirs[0])
    }

    /// `Φ(x, (s, t)) = (ψ_t x, s)` in ambient coordinates.
    pub fn phi(&self, patch: usize, angles: &[f64], s: f64, t: f64) -> Vec<f64> {
        let m = self.tetragon.model;
        let x = m.legendrian_point(patch, angles);
        m.embed(&m.reeb_flow_unchecked(&x, t), s)
    }

    /// Max of `|ω(∂_i Φ, ∂_j Φ)|` over about `n` sample points of the surface
    /// `L × γ_ε`. Identically zero when the surface is a curve.
    pub fn lagrangian_residual(&self, n: usize) -> LagrangianResidual {
        let m = self.tetragon.model;
        let d = m.legendrian_dim();
        if d == 0 {
            return LagrangianResidual {
                max_abs: 0.0,
                samples: n,
            };
        }
        let chart = m.ambient_chart();
        let kk = chart.dim_pairs();
        let omega = |v: &[f64], w: &[f64]| -> f64 {
            (0..kk).map(|i| v[i] * w[kk + i] - v[kk + i] * w[i]).sum()
        };
        let mut axes = m.legendrian_box();
        axes.push((0.0, 1.0, true));
        let h = 1e-5;
        let mut max_abs: f64 = 0.0;
        let mut count = 0;
        for patch in 0..m.legendrian_patches() {
            for params in grid_points(&axes, n / m.legendrian_patches()) {
                let angles = &params[..d];
                let ((s, t), (ds, dt)) = self.loop_point(params[d]);
                let diff = |f: &dyn Fn(f64) -> Vec<f64>| -> Vec<f64> {
                    chart.displacement(&f(-h), &f(h)).iter().map(|v| v / (2.0 * h)).collect()
                };
                let d_s = diff(&|e| self.phi(patch, angles, s + e, t));
                let d_t = diff(&|e| self.phi(patch, angles, s, t + e));
                let d_loop: Vec<f64> = d_s.iter().zip(&d_t).map(|(a, b)| ds * a + dt * b).collect();
                let d_ang: Vec<Vec<f64>> = (0..d)
                    .map(|j| {
                        diff(&|e| {
                            let mut a = angles.to_vec();
                            a[j] += e;
                            self.phi(patch, &a, s, t)
                        })
                    })
                    .collect();
                for i in 0..d {
                    max_abs = max_abs.max(omega(&d_ang[i], &d_loop).abs());
                    for j in i + 1..d {
                        max_abs = max_abs.max(omega(&d_ang[i], &d_ang[j]).abs());
                    }
                }
                count += 1;
            }
        }
        LagrangianResidual {
            max_abs,
            samples: count,
        }
    }
}

/// `|z|` for the sphere and `|p|` for the cotangent torus: the radial increment
/// coordinate used by scenario reports.
pub fn radial_coordinate(model: ContactModel, y: &[f64]) -> f64 {
    match model {
        ContactModel::Circle => y[0],
        ContactModel::UnitCotangentTorus { k } => norm(&y[..k]),
        ContactModel::ContactSphere { .. } => norm2(y).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn all_tetragons() -> Vec<Tetragon> {
        vec![
            build_tetragon(ContactModel::Circle, 1.0, 2.0, 0.25).unwrap(),
            build_tetragon(ContactModel::UnitCotangentTorus { k: 1 }, 1.0, 2.0, 0.25).unwrap(),
            build_tetragon(ContactModel::UnitCotangentTorus { k: 2 }, 1.0, 2.0, 0.25).unwrap(),
            build_tetragon(ContactModel::ContactSphere { k: 1 }, 1.0, 2.0, FRAC_PI_4).unwrap(),
            build_tetragon(ContactModel::ContactSphere { k: 2 }, 1.0, 2.0, FRAC_PI_4).unwrap(),
            build_tetragon(ContactModel::ContactSphere { k: 3 }, 0.5, 1.5, 0.6).unwrap(),
        ]
    }

    #[test]
    fn sphere_walls_are_shells() {
        let tet = build_tetragon(ContactModel::ContactSphere { k: 1 }, 1.0, 2.0, FRAC_PI_4).unwrap();
        let r2 = 2f64.sqrt();
        assert!(tet.high_wall.contains(&[1.2, 0.0], 1e-12));
        assert!(tet.high_wall.contains(&[-r2, 0.0], 1e-12));
        assert_abs_diff_eq!(tet.high_wall.distance(&[1.5, 0.0]), 1.5 - r2, epsilon = 1e-12);
        assert!(tet.low_wall.contains(&[0.0, 1.3], 1e-12));
        assert!(tet.low_wall.contains(&[0.0, -1.0], 1e-12));
        assert!(!tet.low_wall.contains(&[0.0, 0.9], 1e-6));
        assert!(tet.floor.contains(&[0.6, 0.8], 1e-12));
        assert!(tet.ceiling.contains(&[1.0, 1.0], 1e-12));
    }

    #[test]
    fn circle_quadrilateral() {
        let tet = build_tetragon(ContactModel::Circle, 1.0, 2.0, 0.25).unwrap();
        assert_eq!(tet.rectangle_area(), 0.25);
        assert!(tet.floor.contains(&[1.0, 0.1], 0.0));
        assert!(tet.high_wall.contains(&[1.5, 0.0], 0.0));
        assert!(tet.low_wall.contains(&[1.5, 0.25], 0.0));
        assert_abs_diff_eq!(tet.floor.distance(&[1.0, 0.95]), 0.05, epsilon = 1e-12);
    }

    #[test]
    fn parameter_errors() {
        let torus = ContactModel::UnitCotangentTorus { k: 2 };
        assert!(matches!(build_tetragon(torus, 1.0, 2.0, 0.6), Err(TetragonError::Parameter(_))));
        assert!(build_tetragon(ContactModel::Circle, 2.0, 1.0, 0.2).is_err());
        assert!(build_tetragon(ContactModel::Circle, 1.0, 2.0, 1.0).is_err());
        assert!(build_tetragon(ContactModel::ContactSphere { k: 1 }, 1.0, 2.0, FRAC_PI_4).is_ok());
        assert!(build_tetragon(ContactModel::ContactSphere { k: 1 }, 1.0, 2.0, 0.8).is_err());
    }

    #[test]
    fn samples_are_members_and_levels_vanish() {
        for tet in all_tetragons() {
            for r in tet.regions() {
                for (patch, params) in r.samples(200) {
                    let y = r.point(patch, &params);
                    assert!(r.contains(&y, 1e-12), "{} {:?}", r.name, tet.model);
                    assert!(r.level(&y).abs() < 1e-12, "{} {:?}", r.name, tet.model);
                }
            }
        }
    }

    #[test]
    fn regions_meet_only_at_corners() {
        for tet in all_tetragons() {
            let [f, c, lw, hw] = tet.regions();
            for (patch, params) in f.samples(100) {
                let y = f.point(patch, &params);
                assert!(c.distance(&y) > 0.1);
                let tau = *params.last().unwrap();
                if tau > 1e-9 {
                    assert!(hw.distance(&y) > 1e-9);
                }
                if tau < tet.t - 1e-9 {
                    assert!(lw.distance(&y) > 1e-9);
                }
            }
            for (patch, params) in hw.samples(100) {
                let y = hw.point(patch, &params);
                assert!(lw.distance(&y) > 1e-3);
            }
        }
    }

    #[test]
    fn floor_flows_to_far_edge() {
        for tet in all_tetragons() {
            for (patch, params) in tet.floor.samples(100) {
                let y = tet.floor.point(patch, &params);
                let tau = *params.last().unwrap();
                let z = tet.model.ambient_reeb_flow(&y, tet.t - tau);
                assert!(tet.low_wall.distance(&z) < 1e-10);
                assert!(tet.floor.distance(&z) < 1e-10);
            }
        }
    }

    #[test]
    fn distance_matches_brute_force() {
        for tet in all_tetragons() {
            let chart = tet.model.ambient_chart();
            for r in tet.regions() {
                let pts: Vec<Vec<f64>> =
                    r.samples(4000).iter().map(|(p, a)| r.point(*p, a)).collect();
                for i in 0..10 {
                    let mut y = pts[(i * 37) % pts.len()].clone();
                    for (j, v) in y.iter_mut().enumerate() {
                        *v += 0.05 * ((i * 3 + j * 7) % 5) as f64 - 0.1;
                    }
                    let brute = pts.iter().map(|p| chart.distance(p, &y)).fold(f64::INFINITY, f64::min);
                    let d = r.distance(&y);
                    assert!(d <= brute + 1e-9, "{} {:?}: {d} vs {brute}", r.name, tet.model);
                    assert!(d >= brute - 0.08, "{} {:?}: {d} vs {brute}", r.name, tet.model);
                }
            }
        }
    }

    #[test]
    fn smoothing_area_and_loop() {
        let tet = build_tetragon(ContactModel::Circle, 1.0, 2.0, 0.25).unwrap();
        let sm = smooth_tetragon(&tet, 0.05).unwrap();
        assert_abs_diff_eq!(sm.area, 0.25 - (4.0 - PI) * 0.0025, epsilon = 1e-15);
        assert!(smooth_tetragon(&tet, 0.2).is_err());
        // Shoelace area of the sampled loop converges to a(ε).
        let n = 20000;
        let pts: Vec<(f64, f64)> = (0..n).map(|i| sm.loop_point(i as f64 / n as f64).0).collect();
        let mut a = 0.0;
        for i in 0..n {
            let (x0, y0) = pts[i];
            let (x1, y1) = pts[(i + 1) % n];
            a += x0 * y1 - x1 * y0;
        }
        assert_abs_diff_eq!(0.5 * a, sm.area, epsilon = 1e-6);
        // Continuity of the loop.
        for i in 0..n {
            let (x0, y0) = pts[i];
            let (x1, y1) = pts[(i + 1) % n];
            assert!((x1 - x0).hypot(y1 - y0) <= 1.01 * sm.perimeter() / n as f64);
        }
    }

    #[test]
    fn smoothed_surfaces_are_lagrangian() {
        for tet in all_tetragons() {
            let eps = 0.1 * (tet.r1 - tet.r0).min(tet.t);
            let sm = smooth_tetragon(&tet, eps).unwrap();
            let res = sm.lagrangian_residual(1000);
            assert!(res.max_abs <= 1e-8, "{:?}: {}", tet.model, res.max_abs);
        }
    }

    #[test]
    fn grids() {
        let g = grid_points(&[(0.0, 1.0, false), (0.0, 2.0, true)], 16);
        assert_eq!(g.len(), 16);
        assert!(g.contains(&vec![1.0, 1.5]));
        assert!(!g.iter().any(|p| p[1] == 2.0));
        let (x, fx) = minimize_1d(|x| (x - 0.3).powi(2), 0.0, 1.0);
        assert_abs_diff_eq!(x, 0.3, epsilon = 1e-6);
        assert!(fx < 1e-12);
    }
}
