//! Gridded `pb4+` problems: windows, constraint masks, discrete brackets.

use serde::{Deserialize, Serialize};

use super::Pb4Error;

/// Node grid on `[s_min, s_max] × [u_min, u_max]`, `s` playing `p` and `u`
/// playing `q`. Nodes are indexed `(i, j)` with `i` along `s`, stored
/// row-major in `j`: `index = j * ns + i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub s_min: f64,
    pub s_max: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub ns: usize,
    pub nu: usize,
    /// Cylinder window: `u` is periodic with period `u_max − u_min` and the
    /// frame only consists of the two `s` edges.
    pub periodic_u: bool,
}

impl Grid {
    pub fn plane(s: (f64, f64), u: (f64, f64), ns: usize, nu: usize) -> Self {
        Self {
            s_min: s.0,
            s_max: s.1,
            u_min: u.0,
            u_max: u.1,
            ns,
            nu,
            periodic_u: false,
        }
    }

    pub fn cylinder(s: (f64, f64), u: (f64, f64), ns: usize, nu: usize) -> Self {
        Self {
            periodic_u: true,
            ..Self::plane(s, u, ns, nu)
        }
    }

    pub fn len(&self) -> usize {
        self.ns * self.nu
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ds(&self) -> f64 {
        (self.s_max - self.s_min) / (self.ns - 1) as f64
    }

    /// Node spacing in `u`; on a cylinder nodes cover the period without repeat.
    pub fn du(&self) -> f64 {
        let span = self.u_max - self.u_min;
        if self.periodic_u {
            span / self.nu as f64
        } else {
            span / (self.nu - 1) as f64
        }
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.ns + i
    }

    pub fn s(&self, i: usize) -> f64 {
        self.s_min + self.ds() * i as f64
    }

    pub fn u(&self, j: usize) -> f64 {
        self.u_min + self.du() * j as f64
    }

    pub fn on_frame(&self, i: usize, j: usize) -> bool {
        i == 0 || i + 1 == self.ns || (!self.periodic_u && (j == 0 || j + 1 == self.nu))
    }

    /// Neighbours in `u` of row `j`, wrapping on a cylinder.
    #[inline]
    fn u_neighbours(&self, j: usize) -> Option<(usize, usize)> {
        if self.periodic_u {
            Some(((j + self.nu - 1) % self.nu, (j + 1) % self.nu))
        } else if j == 0 || j + 1 == self.nu {
            None
        } else {
            Some((j - 1, j + 1))
        }
    }

    /// Visits every interior node with its stencil `(c, s−, s+, u−, u+)`.
    pub fn for_each_interior(&self, mut f: impl FnMut(usize, usize, usize, usize, usize)) {
        for j in 0..self.nu {
            let Some((jm, jp)) = self.u_neighbours(j) else { continue };
            for i in 1..self.ns - 1 {
                f(
                    self.idx(i, j),
                    self.idx(i - 1, j),
                    self.idx(i + 1, j),
                    self.idx(i, jm),
                    self.idx(i, jp),
                );
            }
        }
    }
}

/// Which constraint a mask carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaskRole {
    X0,
    X1,
    Y0,
    Y1,
}

impl MaskRole {
    pub const ALL: [MaskRole; 4] = [MaskRole::X0, MaskRole::X1, MaskRole::Y0, MaskRole::Y1];

    pub fn name(self) -> &'static str {
        match self {
            MaskRole::X0 => "X0",
            MaskRole::X1 => "X1",
            MaskRole::Y0 => "Y0",
            MaskRole::Y1 => "Y1",
        }
    }
}

/// Axis-aligned segment `{s} × [u_a, u_b]` or `[s_a, s_b] × {u}`, or a
/// rectangle when both ranges are proper.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub s: (f64, f64),
    pub u: (f64, f64),
}

impl Segment {
    pub fn vertical(s: f64, u: (f64, f64)) -> Self {
        Self { s: (s, s), u }
    }

    pub fn horizontal(s: (f64, f64), u: f64) -> Self {
        Self { s, u: (u, u) }
    }
}

/// Node set of a grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mask {
    pub nodes: Vec<bool>,
}

impl Mask {
    pub fn empty(grid: &Grid) -> Self {
        Self {
            nodes: vec![false; grid.len()],
        }
    }

    /// Nodes within half a cell of the segment.
    pub fn rasterize(grid: &Grid, seg: &Segment) -> Self {
        let (ds, du) = (grid.ds(), grid.du());
        let mut m = Self::empty(grid);
        for j in 0..grid.nu {
            for i in 0..grid.ns {
                let (s, u) = (grid.s(i), grid.u(j));
                let in_s = s >= seg.s.0 - 0.5 * ds && s <= seg.s.1 + 0.5 * ds;
                let in_u = u >= seg.u.0 - 0.5 * du && u <= seg.u.1 + 0.5 * du;
                m.nodes[grid.idx(i, j)] = in_s && in_u;
            }
        }
        m
    }

    /// Box dilation by `r` cells.
    pub fn dilate(&self, grid: &Grid, r: usize) -> Self {
        let mut out = self.clone();
        let r = r as isize;
        for j in 0..grid.nu {
            for i in 0..grid.ns {
                if !self.nodes[grid.idx(i, j)] {
                    continue;
                }
                for dj in -r..=r {
                    for di in -r..=r {
                        let ii = i as isize + di;
                        let mut jj = j as isize + dj;
                        if grid.periodic_u {
                            jj = jj.rem_euclid(grid.nu as isize);
                        }
                        if ii >= 0 && jj >= 0 && (ii as usize) < grid.ns && (jj as usize) < grid.nu {
                            out.nodes[grid.idx(ii as usize, jj as usize)] = true;
                        }
                    }
                }
            }
        }
        out
    }

    pub fn count(&self) -> usize {
        self.nodes.iter().filter(|&&b| b).count()
    }

    pub fn intersects(&self, other: &Mask) -> bool {
        self.nodes.iter().zip(&other.nodes).any(|(a, b)| *a && *b)
    }

    pub fn is_subset(&self, other: &Mask) -> bool {
        self.nodes.iter().zip(&other.nodes).all(|(a, b)| !*a || *b)
    }

    pub fn and(&self, other: &Mask) -> Mask {
        Mask {
            nodes: self.nodes.iter().zip(&other.nodes).map(|(a, b)| *a && *b).collect(),
        }
    }
}

/// A `pb4+` instance: constraints `F ≤ 0` on `X0`, `F ≥ 1` on `X1`,
/// `G ≤ 0` on `Y0`, `G ≥ 1` on `Y1`, and `F = G = 0` on the frame.
/// Stored masks are already thickened.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pb4Problem {
    pub grid: Grid,
    pub x0: Mask,
    pub x1: Mask,
    pub y0: Mask,
    pub y1: Mask,
    pub thicken: usize,
}

/// Constraint tolerance for feasibility checks.
pub const FEAS_TOL: f64 = 1e-12;

impl Pb4Problem {
    /// Thickens the raw masks by `thicken` cells and checks admissibility.
    pub fn new(grid: Grid, raw: [Mask; 4], thicken: usize) -> Result<Self, Pb4Error> {
        if grid.ns < 5 || grid.nu < 5 {
            return Err(Pb4Error::Problem(format!("grid {}×{} too small", grid.ns, grid.nu)));
        }
        let [x0, x1, y0, y1] = raw.map(|m| m.dilate(&grid, thicken));
        let p = Self {
            grid,
            x0,
            x1,
            y0,
            y1,
            thicken,
        };
        if p.x0.intersects(&p.x1) {
            return Err(Pb4Error::Problem("thickened X0 and X1 intersect".into()));
        }
        if p.y0.intersects(&p.y1) {
            return Err(Pb4Error::Problem("thickened Y0 and Y1 intersect".into()));
        }
        for role in MaskRole::ALL {
            let m = p.mask(role);
            let touches = (0..grid.nu).any(|j| (0..grid.ns).any(|i| grid.on_frame(i, j) && m.nodes[grid.idx(i, j)]));
            if touches && matches!(role, MaskRole::X1 | MaskRole::Y1) {
                return Err(Pb4Error::Problem(format!("{} touches the window frame", role.name())));
            }
        }
        Ok(p)
    }

    /// From segments, rasterized to nodes within half a cell.
    pub fn from_segments(grid: Grid, segs: [&[Segment]; 4], thicken: usize) -> Result<Self, Pb4Error> {
        let raw = segs.map(|list| {
            let mut m = Mask::empty(&grid);
            for seg in list {
                let r = Mask::rasterize(&grid, seg);
                for (a, b) in m.nodes.iter_mut().zip(r.nodes) {
                    *a |= b;
                }
            }
            m
        });
        Self::new(grid, raw, thicken)
    }

    pub fn mask(&self, role: MaskRole) -> &Mask {
        match role {
            MaskRole::X0 => &self.x0,
            MaskRole::X1 => &self.x1,
            MaskRole::Y0 => &self.y0,
            MaskRole::Y1 => &self.y1,
        }
    }

    /// The instance `(Y1, Y0, X0, X1)`; it has the same `pb4+`.
    pub fn antisymmetric(&self) -> Self {
        Self {
            grid: self.grid,
            x0: self.y1.clone(),
            x1: self.y0.clone(),
            y0: self.x0.clone(),
            y1: self.x1.clone(),
            thicken: self.thicken,
        }
    }

    /// Projects `(F, G)` onto the constraint set in place.
    pub fn project(&self, f: &mut [f64], g: &mut [f64]) {
        let grid = &self.grid;
        for j in 0..grid.nu {
            for i in 0..grid.ns {
                let k = grid.idx(i, j);
                if grid.on_frame(i, j) {
                    f[k] = 0.0;
                    g[k] = 0.0;
                    continue;
                }
                if self.x0.nodes[k] {
                    f[k] = f[k].min(0.0);
                }
                if self.x1.nodes[k] {
                    f[k] = f[k].max(1.0);
                }
                if self.y0.nodes[k] {
                    g[k] = g[k].min(0.0);
                }
                if self.y1.nodes[k] {
                    g[k] = g[k].max(1.0);
                }
            }
        }
    }

    /// First violated constraint, if any.
    pub fn check(&self, f: &[f64], g: &[f64]) -> Result<(), Pb4Error> {
        let grid = &self.grid;
        if f.len() != grid.len() || g.len() != grid.len() {
            return Err(Pb4Error::Problem("field length does not match the grid".into()));
        }
        let fail = |mask: &str, k: usize, field: &str, value: f64| Pb4Error::Infeasible {
            mask: mask.into(),
            field: field.into(),
            node: (k % grid.ns, k / grid.ns),
            value,
        };
        for j in 0..grid.nu {
            for i in 0..grid.ns {
                let k = grid.idx(i, j);
                if !f[k].is_finite() || !g[k].is_finite() {
                    return Err(fail("finite", k, "F,G", f[k] + g[k]));
                }
                if grid.on_frame(i, j) {
                    if f[k].abs() > FEAS_TOL {
                        return Err(fail("frame", k, "F", f[k]));
                    }
                    if g[k].abs() > FEAS_TOL {
                        return Err(fail("frame", k, "G", g[k]));
                    }
                }
                if self.x0.nodes[k] && f[k] > FEAS_TOL {
                    return Err(fail("X0", k, "F", f[k]));
                }
                if self.x1.nodes[k] && f[k] < 1.0 - FEAS_TOL {
                    return Err(fail("X1", k, "F", f[k]));
                }
                if self.y0.nodes[k] && g[k] > FEAS_TOL {
                    return Err(fail("Y0", k, "G", g[k]));
                }
                if self.y1.nodes[k] && g[k] < 1.0 - FEAS_TOL {
                    return Err(fail("Y1", k, "G", g[k]));
                }
            }
        }
        Ok(())
    }
}

/// Discrete bracket `{F, G} = F_u·G_s − F_s·G_u` with centered differences
/// at every interior node (`NaN`-free; frame nodes are skipped).
pub fn bracket_field(grid: &Grid, f: &[f64], g: &[f64]) -> Vec<f64> {
    let (h2s, h2u) = (2.0 * grid.ds(), 2.0 * grid.du());
    let mut b = vec![f64::NEG_INFINITY; grid.len()];
    grid.for_each_interior(|c, sm, sp, um, up| {
        let fu = (f[up] - f[um]) / h2u;
        let fs = (f[sp] - f[sm]) / h2s;
        let gu = (g[up] - g[um]) / h2u;
        let gs = (g[sp] - g[sm]) / h2s;
        b[c] = fu * gs - fs * gu;
    });
    b
}

pub fn max_bracket(grid: &Grid, f: &[f64], g: &[f64]) -> f64 {
    bracket_field(grid, f, g).into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// Validated value `max {F, G}` of a feasible pair.
pub fn feasible_pair_value(problem: &Pb4Problem, f: &[f64], g: &[f64]) -> Result<f64, Pb4Error> {
    problem.check(f, g)?;
    Ok(max_bracket(&problem.grid, f, g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Pb4Problem {
        let grid = Grid::plane((0.0, 3.0), (0.0, 1.0), 31, 21);
        Pb4Problem::from_segments(
            grid,
            [
                &[Segment::vertical(1.0, (0.25, 0.75))],
                &[Segment::vertical(2.0, (0.25, 0.75))],
                &[Segment::horizontal((1.0, 2.0), 0.75)],
                &[Segment::horizontal((1.0, 2.0), 0.25)],
            ],
            1,
        )
        .unwrap()
    }

    #[test]
    fn zero_f_is_infeasible() {
        let p = small();
        let f = vec![0.0; p.grid.len()];
        let mut g = vec![0.0; p.grid.len()];
        p.project(&mut f.clone(), &mut g);
        match feasible_pair_value(&p, &f, &g) {
            Err(Pb4Error::Infeasible { mask, .. }) => assert_eq!(mask, "X1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn separable_fields_give_product() {
        let grid = Grid::plane((0.0, 1.0), (0.0, 1.0), 21, 21);
        let f: Vec<f64> = (0..grid.len()).map(|k| grid.s(k % 21).powi(2)).collect();
        let g: Vec<f64> = (0..grid.len()).map(|k| (3.0 * grid.u(k / 21)).sin()).collect();
        let b = bracket_field(&grid, &f, &g);
        let mut best = f64::NEG_INFINITY;
        for j in 1..20 {
            for i in 1..20 {
                let (s, u) = (grid.s(i), grid.u(j));
                let gu = ((3.0 * (u + 0.05)).sin() - (3.0 * (u - 0.05)).sin()) / 0.1;
                let expect = -(2.0 * s) * gu;
                assert!((b[grid.idx(i, j)] - expect).abs() < 1e-12);
                best = best.max(expect);
            }
        }
        assert!((max_bracket(&grid, &f, &g) - best).abs() < 1e-12);
    }

    #[test]
    fn masks_thicken_and_stay_disjoint() {
        let p = small();
        assert_eq!(p.x0.count(), 3 * 13);
        assert!(!p.x0.intersects(&p.x1));
        let a = p.antisymmetric();
        assert_eq!(a.x0, p.y1);
        assert_eq!(a.y1, p.x1);
        let grid = Grid::plane((0.0, 3.0), (0.0, 1.0), 31, 21);
        let bad = Pb4Problem::from_segments(
            grid,
            [&[Segment::vertical(1.0, (0.2, 0.8))], &[Segment::vertical(1.1, (0.2, 0.8))], &[], &[]],
            1,
        );
        assert!(matches!(bad, Err(Pb4Error::Problem(_))));
    }

    #[test]
    fn cylinder_stencil_wraps() {
        let grid = Grid::cylinder((0.0, 1.0), (0.0, 1.0), 11, 10);
        let mut count = 0;
        grid.for_each_interior(|_, _, _, um, up| {
            assert_ne!(um, up);
            count += 1;
        });
        assert_eq!(count, 9 * 10);
        let f: Vec<f64> = (0..grid.len()).map(|k| (2.0 * std::f64::consts::PI * grid.u(k / 11)).sin()).collect();
        let g: Vec<f64> = (0..grid.len()).map(|k| grid.s(k % 11)).collect();
        let b = bracket_field(&grid, &f, &g);
        // {F, G} = F_u·G_s = F_u.
        let k = grid.idx(5, 0);
        let h = grid.du();
        let expect = ((2.0 * std::f64::consts::PI * h).sin() - (2.0 * std::f64::consts::PI * (-h)).sin()) / (2.0 * h);
        assert!((b[k] - expect).abs() < 1e-12);
    }
}
