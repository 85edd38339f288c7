//! Estimation of the Poisson bracket invariant `pb4+` on two-dimensional
//! gridded windows, the wall-witness Hamiltonian, and a smooth feasible pair
//! for the circle-model tetragon.
//!
//! `pb4+(X0, X1, Y0, Y1)` is the infimum of `max {F, G}` over compactly
//! supported pairs with `F ≤ 0` on `X0`, `F ≥ 1` on `X1`, `G ≤ 0` on `Y0`,
//! `G ≥ 1` on `Y1`. Any feasible grid pair gives an upper estimate up to
//! discretization error; the report carries a two-grid difference as a
//! proxy for that error.

mod grid;
mod optimize;
mod pair;
mod witness;

pub use grid::{
    bracket_field, feasible_pair_value, max_bracket, Grid, Mask, MaskRole, Pb4Problem, Segment, FEAS_TOL,
};
pub use optimize::{
    estimate_from, estimate_pb4_plus, harmonic_start, separable_start, Pb4Config, Pb4Report, StartKind,
    StartSummary, TraceEntry, TwoGrid,
};
pub use pair::PrototypePair;
pub use witness::{wall_witness, WallWitness, WitnessCheck};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Pb4Error {
    #[error("ill-formed problem: {0}")]
    Problem(String),
    #[error("infeasible pair: {field} violates {mask} at node {node:?} (value {value})")]
    Infeasible {
        mask: String,
        field: String,
        node: (usize, usize),
        value: f64,
    },
    #[error("bad optimizer configuration: {0}")]
    Config(String),
    #[error("optimizer did not converge: every start ended above its initial value")]
    NonConvergence { trace: Vec<TraceEntry> },
    #[error("invalid witness parameters: {0}")]
    Parameter(String),
}

/// Circle-model tetragon on a plane window with margins of one eighth of
/// each side: `X0` floor `s = R0`, `X1` ceiling `s = R1`, `Y0` low wall
/// `u = T`, `Y1` high wall `u = 0`. Its `pb4+` is `1/((R1 − R0)·T)`.
pub fn prototype_problem(r0: f64, r1: f64, t: f64, n: usize, thicken: usize) -> Result<Pb4Problem, Pb4Error> {
    if !(r0 > 0.0 && r1 > r0 && t > 0.0 && t < 1.0) {
        return Err(Pb4Error::Problem(format!("need 0 < R0 < R1 and 0 < T < 1, got {r0}, {r1}, {t}")));
    }
    let (ms, mu) = ((r1 - r0) / 8.0, t / 8.0);
    let grid = Grid::plane((r0 - ms, r1 + ms), (-mu, t + mu), n, n);
    Pb4Problem::from_segments(
        grid,
        [
            &[Segment::vertical(r0, (0.0, t))],
            &[Segment::vertical(r1, (0.0, t))],
            &[Segment::horizontal((r0, r1), t)],
            &[Segment::horizontal((r0, r1), 0.0)],
        ],
        thicken,
    )
}

/// Exact `pb4+` of the prototype tetragon.
pub fn prototype_exact(r0: f64, r1: f64, t: f64) -> f64 {
    1.0 / ((r1 - r0) * t)
}

/// Estimates the prototype at `n²` and `(2n)²` nodes and reports the
/// coarse estimate with the two-grid difference attached.
pub fn estimate_prototype(r0: f64, r1: f64, t: f64, n: usize, cfg: &Pb4Config) -> Result<Pb4Report, Pb4Error> {
    let coarse = prototype_problem(r0, r1, t, n, 1)?;
    let fine = prototype_problem(r0, r1, t, 2 * n, 1)?;
    let mut report = estimate_pb4_plus(&coarse, cfg)?;
    let fine_report = estimate_pb4_plus(&fine, cfg)?;
    report.two_grid = Some(TwoGrid {
        coarse_n: n,
        fine_n: 2 * n,
        coarse: report.estimate,
        fine: fine_report.estimate,
        difference: (report.estimate - fine_report.estimate).abs(),
    });
    report.exact = Some(prototype_exact(r0, r1, t));
    Ok(report)
}
