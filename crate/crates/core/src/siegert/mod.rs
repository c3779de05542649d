//! Numerical Stark energies of hydrogen from the separated parabolic channel
//! equations.
//!
//! With `ψ = χ₁(ξ) χ₂(η) e^{imφ} / √(ξη)` the Schrödinger equation in a field
//! `F` along `z` splits into
//!
//! ```text
//! χ₁″ + [E/2 + β₁/ξ − (m²−1)/(4ξ²) − (F/4) ξ] χ₁ = 0,   χ₁(0) = 0, χ₁ → 0,
//! χ₂″ + [E/2 + β₂/η − (m²−1)/(4η²) + (F/4) η] χ₂ = 0,   χ₂(0) = 0, outgoing,
//! β₁ + β₂ = 1,
//! ```
//!
//! with `n₁` and `n₂` interior nodes. Each channel is integrated with Numerov
//! on a uniform grid, started from the regular Frobenius series at the origin.
//! The ξ channel is a real Sturm–Liouville problem in `β₁` and is bracketed by
//! node counting before a complex secant polish. Beyond the η barrier the
//! coordinate is rotated into the complex plane (exterior complex scaling),
//! which turns the outgoing wave into a decaying one; below a weak-field
//! threshold the tunnelling width is far below `f64` resolution and a plain
//! decaying condition is used instead. The complex energy is found by secant
//! iteration on the η mismatch, repeated on successively halved grids and
//! Richardson-extrapolated.

use std::fmt;

use num_complex::Complex;
use thiserror::Error;

use crate::perturbation::{stark_energy, Order, ParabolicState};
use crate::scalar::{lit, Real};

mod channel;

pub use channel::{Channel, ChannelProblem};
use channel::{build_layout, mismatch, outward, Kernel, Layout};

/// Rotation angle of the exterior complex scaling tail, radians.
pub const DEFAULT_THETA: f64 = 0.3;

/// Grid step per unit principal quantum number.
pub const DEFAULT_H_PER_N: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Bracket,
    SeparationConstant,
    Energy,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Bracket => "separation-constant bracketing",
            Stage::SeparationConstant => "separation-constant secant",
            Stage::Energy => "energy secant",
        })
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SiegertError {
    #[error("{stage} did not converge within {iterations} iterations")]
    NoConvergence { stage: Stage, iterations: usize },
    #[error("xi-channel root has {found} nodes, expected {expected}")]
    NodeMismatch { expected: u32, found: u32 },
    #[error("solution has node counts {found:?}, expected {expected:?}")]
    StateMisidentified { expected: (u32, u32), found: (u32, u32) },
    #[error("domain end {x_max} lies below the eta barrier top {barrier}")]
    BarrierNotResolved { x_max: f64, barrier: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// Uniform grid of one solve: coarsest step `h`, domain cap `x_max`, and the
/// number of times the step is halved for Richardson extrapolation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub h: f64,
    pub x_max: f64,
    pub refinements: u32,
}

impl Grid {
    pub const DEFAULT_REFINEMENTS: u32 = 3;

    /// `h = h_per_n · n`, `x_max = max(30n², 4n² + 80n, 6/√F)`. The last
    /// term bounds `3η_b` for any `β₂ ≤ 1`.
    pub fn for_state(n: u32, field: f64, h_per_n: f64) -> Self {
        let nf = f64::from(n);
        let mut x_max = (30.0 * nf * nf).max(4.0 * nf * nf + 80.0 * nf);
        if field > 0.0 {
            x_max = x_max.max(6.0 / field.sqrt());
        }
        Self {
            h: h_per_n * nf,
            x_max,
            refinements: Self::DEFAULT_REFINEMENTS,
        }
    }

    fn validate(&self) -> Result<(), SiegertError> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(SiegertError::InvalidGrid(format!("step {} must be positive", self.h)));
        }
        if !(self.x_max > 10.0 * self.h) {
            return Err(SiegertError::InvalidGrid(format!(
                "domain {} too short for step {}",
                self.x_max, self.h
            )));
        }
        if self.refinements > 6 {
            return Err(SiegertError::InvalidGrid("at most 6 refinements".into()));
        }
        Ok(())
    }
}

/// How the η channel is closed at large distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// `χ₂ → 0`; energy is real.
    Decaying,
    /// Outgoing wave via a complex-rotated tail; energy is complex.
    Outgoing,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Bound on `|mismatch|` for a solution to count as converged.
    pub tol: f64,
    pub max_iter: usize,
    pub h_per_n: f64,
    /// Overrides the default domain cap.
    pub x_max: Option<f64>,
    /// Fields below this use the decaying η condition; `None` means
    /// `1/(50 n⁴)`.
    pub weak_field_threshold: Option<f64>,
    pub theta: f64,
    pub refinements: u32,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 100,
            h_per_n: DEFAULT_H_PER_N,
            x_max: None,
            weak_field_threshold: None,
            theta: DEFAULT_THETA,
            refinements: Grid::DEFAULT_REFINEMENTS,
        }
    }
}

impl SolverOptions {
    pub fn threshold_for(&self, n: u32) -> f64 {
        self.weak_field_threshold
            .unwrap_or_else(|| 1.0 / (50.0 * f64::from(n).powi(4)))
    }

    fn grid(&self, n: u32, field: f64) -> Grid {
        let mut grid = Grid::for_state(n, field, self.h_per_n);
        if let Some(x_max) = self.x_max {
            grid.x_max = x_max;
        }
        grid.refinements = self.refinements;
        grid
    }
}

/// A converged (or best-effort) channel solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SiegertSolution<T> {
    pub energy: Complex<T>,
    pub beta1: Complex<T>,
    pub beta2: Complex<T>,
    pub iterations: usize,
    pub residual: T,
    pub converged: bool,
    pub node_counts: (u32, u32),
    pub boundary: Boundary,
}

/// The separated channel equations realized by this module.
pub fn channel_odes_spec() -> &'static str {
    "chi1'' + [E/2 + beta1/xi - (m^2-1)/(4 xi^2) - (F/4) xi] chi1 = 0, chi1(0) = 0, chi1 -> 0, n1 nodes\n\
     chi2'' + [E/2 + beta2/eta - (m^2-1)/(4 eta^2) + (F/4) eta] chi2 = 0, chi2(0) = 0, outgoing, n2 nodes\n\
     beta1 + beta2 = 1, psi = chi1 chi2 exp(i m phi) / sqrt(xi eta)"
}

/// Relative step below which secant iterations stop.
const STEP_TOL: f64 = 64.0 * f64::EPSILON;

fn c<T: Real>(x: f64) -> Complex<T> {
    Complex::from(lit::<T>(x))
}

fn to_c64<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())
}

/// Complex secant iteration on `f` from seeds `a`, `b`.
fn secant<T: Real, E>(
    mut a: Complex<T>,
    mut b: Complex<T>,
    max_iter: usize,
    stage: Stage,
    mut f: impl FnMut(Complex<T>) -> Result<Complex<T>, E>,
) -> Result<(Complex<T>, Complex<T>, usize), E>
where
    E: From<SiegertError>,
{
    let step_tol: T = lit(STEP_TOL);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    let mut evals = 2;
    for _ in 0..max_iter {
        if fb.norm().is_zero() {
            return Ok((b, fb, evals));
        }
        let denom = fb - fa;
        if denom.norm().is_zero() {
            return Ok((b, fb, evals));
        }
        let next = b - fb * (b - a) / denom;
        if !(next.re.is_finite() && next.im.is_finite()) {
            break;
        }
        a = b;
        fa = fb;
        b = next;
        fb = f(b)?;
        evals += 1;
        if (b - a).norm() <= step_tol * b.norm().max(T::one()) {
            return Ok((b, fb, evals));
        }
    }
    Err(SiegertError::NoConvergence {
        stage,
        iterations: evals,
    }
    .into())
}

/// State of the ξ-channel solve, kept across energy iterations.
struct XiSolver<T> {
    field: T,
    n1: u32,
    m: u32,
    layout: Layout,
    max_iter: usize,
}

impl<T: Real> XiSolver<T> {
    fn kernel(&self, energy: Complex<T>, beta: Complex<T>) -> Kernel<T> {
        Kernel::new(Channel::Xi, energy, self.field, beta, self.m)
    }

    fn mismatch(&self, energy: Complex<T>, beta: Complex<T>, level: u32) -> Complex<T> {
        mismatch(&self.kernel(energy, beta), &self.layout.level(level))
    }

    /// Sturm count: zeros of the regular solution on the whole ξ domain.
    fn zeros_below(&self, energy: f64, beta: f64) -> u32 {
        let lvl = self.layout.level(0);
        let end = match lvl.tail {
            channel::Tail::Decaying { end } => end,
            channel::Tail::Rotated { r, .. } => r,
        };
        let kernel = self.kernel(c(energy), c(beta));
        outward(&kernel, lvl.h, lvl.start, end - 1).nodes
    }

    /// Real `β₁` whose Dirichlet problem has exactly `n₁` nodes, by bisection
    /// on the node count at `Re E`.
    fn bracket(&self, energy: f64) -> Result<f64, SiegertError> {
        let target = self.n1 + 1;
        let mut lo = 0.0;
        let mut guard = 0;
        while self.zeros_below(energy, lo) >= target {
            lo = lo * 2.0 - 1.0;
            guard += 1;
            if guard > 60 {
                return Err(SiegertError::NoConvergence {
                    stage: Stage::Bracket,
                    iterations: guard,
                });
            }
        }
        let mut hi = 1.0f64.max(lo + 1.0);
        while self.zeros_below(energy, hi) < target {
            hi *= 2.0;
            guard += 1;
            if guard > 60 {
                return Err(SiegertError::NoConvergence {
                    stage: Stage::Bracket,
                    iterations: guard,
                });
            }
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.zeros_below(energy, mid) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-10 * hi.abs().max(1.0) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    fn polish(&self, energy: Complex<T>, seed: Complex<T>, level: u32) -> Result<(Complex<T>, usize), SiegertError> {
        let nudge = seed * lit::<T>(1e-7) + c(1e-9);
        let (beta, _, evals) = secant(seed, seed + nudge, self.max_iter, Stage::SeparationConstant, |b| {
            Ok::<_, SiegertError>(self.mismatch(energy, b, level))
        })?;
        Ok((beta, evals))
    }

    fn nodes(&self, energy: Complex<T>, beta: Complex<T>) -> u32 {
        let lvl = self.layout.level(0);
        outward(&self.kernel(energy, beta), lvl.h, lvl.start, lvl.matching).nodes
    }
}

fn xi_layout(energy: f64, field: f64, n1: u32, m: u32, n: u32, grid: &Grid) -> Result<Layout, SiegertError> {
    let beta = (f64::from(n1) + 0.5 * f64::from(m + 1)) / f64::from(n);
    build_layout(Channel::Xi, energy, field, beta, m, grid, None)
}

/// Principal number implied by an energy estimate, for landmark placement.
fn nominal_n(energy: f64) -> u32 {
    if energy < 0.0 {
        ((0.5 / -energy).sqrt().round() as u32).max(1)
    } else {
        1
    }
}

fn richardson<T: Real>(values: &[Complex<T>]) -> Complex<T> {
    let mut table: Vec<Complex<T>> = values.to_vec();
    let mut factor: T = lit(16.0);
    for j in 1..values.len() {
        for i in (j..values.len()).rev() {
            table[i] = table[i] + (table[i] - table[i - 1]) / (factor - T::one());
        }
        factor = factor * lit(4.0);
    }
    *table.last().expect("at least one level")
}

/// `β₁` of the ξ channel at energy `E` with `n₁` nodes, Richardson-extrapolated
/// over `grid.refinements` halvings.
pub fn solve_xi_channel<T: Real>(
    energy: Complex<T>,
    field: T,
    n1: u32,
    m: u32,
    grid: &Grid,
) -> Result<Complex<T>, SiegertError> {
    grid.validate()?;
    let e_re = energy.re.to_f64_lossy();
    let n = nominal_n(e_re).max(n1 + m + 1);
    let xi = XiSolver {
        field,
        n1,
        m,
        layout: xi_layout(e_re, field.to_f64_lossy(), n1, m, n, grid)?,
        max_iter: 100,
    };
    let mut beta = c::<T>(xi.bracket(e_re)?);
    let mut values = Vec::new();
    for level in 0..=grid.refinements {
        beta = xi.polish(energy, beta, level)?.0;
        values.push(beta);
    }
    let found = xi.nodes(energy, values[0]);
    if found != n1 {
        return Err(SiegertError::NodeMismatch { expected: n1, found });
    }
    Ok(richardson(&values))
}

fn eta_layout(
    energy: f64,
    field: f64,
    beta2: f64,
    m: u32,
    grid: &Grid,
    boundary: Boundary,
    theta: f64,
) -> Result<Layout, SiegertError> {
    let rotated = match boundary {
        Boundary::Outgoing if field > 0.0 => Some(theta),
        _ => None,
    };
    build_layout(Channel::Eta, energy, field, beta2, m, grid, rotated)
}

/// Richardson-extrapolated η-channel mismatch at `(E, β₂)`: outgoing
/// (complex-scaled) condition for `F > 0`, decaying for `F = 0`.
pub fn eta_mismatch<T: Real>(
    energy: Complex<T>,
    field: T,
    beta2: Complex<T>,
    m: u32,
    grid: &Grid,
) -> Result<Complex<T>, SiegertError> {
    grid.validate()?;
    let f = field.to_f64_lossy();
    let boundary = if f > 0.0 { Boundary::Outgoing } else { Boundary::Decaying };
    let layout = eta_layout(
        energy.re.to_f64_lossy(),
        f,
        beta2.re.to_f64_lossy(),
        m,
        grid,
        boundary,
        DEFAULT_THETA,
    )?;
    let kernel = Kernel::new(Channel::Eta, energy, field, beta2, m);
    let values: Vec<_> = (0..=grid.refinements)
        .map(|level| mismatch(&kernel, &layout.level(level)))
        .collect();
    Ok(richardson(&values))
}

/// Node count of the η-channel regular solution inside its allowed well.
fn eta_nodes<T: Real>(layout: &Layout, energy: Complex<T>, field: T, beta2: Complex<T>, m: u32) -> u32 {
    let lvl = layout.level(0);
    let kernel = Kernel::new(Channel::Eta, energy, field, beta2, m);
    outward(&kernel, lvl.h, lvl.start, lvl.matching).nodes
}

/// Complex Stark energy of `state` at field `F` (negative `F` is the
/// mirrored state at `|F|`).
pub fn siegert_energy<T: Real>(
    state: &ParabolicState,
    field: T,
    opts: &SolverOptions,
) -> Result<SiegertSolution<T>, SiegertError> {
    if field < T::zero() {
        let mut sol = siegert_energy(&state.mirrored(), -field, opts)?;
        std::mem::swap(&mut sol.beta1, &mut sol.beta2);
        sol.node_counts = (sol.node_counts.1, sol.node_counts.0);
        return Ok(sol);
    }
    let seed = stark_energy(state, field.to_f64_lossy(), Order::Second);
    solve_from_seed(state, field, opts, seed, None)
}

fn solve_from_seed<T: Real>(
    state: &ParabolicState,
    field: T,
    opts: &SolverOptions,
    seed: f64,
    beta_seed: Option<Complex<T>>,
) -> Result<SiegertSolution<T>, SiegertError> {
    let n = state.principal();
    let f = field.to_f64_lossy();
    let grid = opts.grid(n, f);
    grid.validate()?;
    let boundary = if f > 0.0 && f >= opts.threshold_for(n) {
        Boundary::Outgoing
    } else {
        Boundary::Decaying
    };

    let xi = XiSolver {
        field,
        n1: state.n1,
        m: state.m,
        layout: xi_layout(seed, f, state.n1, state.m, n, &grid)?,
        max_iter: opts.max_iter,
    };
    let e_seed = c::<T>(seed);
    let mut evals = 0;
    let mut beta = match beta_seed {
        Some(b) => b,
        None => c(xi.bracket(seed)?),
    };
    let (b, k) = xi.polish(e_seed, beta, 0)?;
    beta = b;
    evals += k;
    let beta2_seed = (Complex::from(T::one()) - beta).re.to_f64_lossy();
    let eta = eta_layout(seed, f, beta2_seed, state.m, &grid, boundary, opts.theta)?;

    let mut energies = Vec::new();
    let mut betas = Vec::new();
    let mut residual = T::zero();
    let mut e_a = e_seed;
    let mut e_b = e_seed * lit::<T>(1.0 + 1e-6);
    for level in 0..=grid.refinements {
        let mut beta_now = beta;
        let mut inner = 0;
        let (e, m_final, k) = secant(e_a, e_b, opts.max_iter, Stage::Energy, |e| {
            let (b, k) = xi.polish(e, beta_now, level)?;
            inner += k;
            beta_now = b;
            let kernel = Kernel::new(Channel::Eta, e, field, Complex::from(T::one()) - b, state.m);
            Ok::<_, SiegertError>(mismatch(&kernel, &eta.level(level)))
        })?;
        evals += k + inner;
        // β at the returned energy: the last evaluation was at `e`.
        beta = beta_now;
        residual = residual.max(m_final.norm());
        energies.push(e);
        betas.push(beta);
        e_a = e;
        e_b = e + e * lit::<T>(1e-9);
    }

    let found = (
        xi.nodes(energies[0], betas[0]),
        eta_nodes(&eta, energies[0], field, Complex::from(T::one()) - betas[0], state.m),
    );
    if found != (state.n1, state.n2) {
        return Err(SiegertError::StateMisidentified {
            expected: (state.n1, state.n2),
            found,
        });
    }

    let mut energy = richardson(&energies);
    let beta1 = richardson(&betas);
    if boundary == Boundary::Decaying {
        energy.im = T::zero();
    } else if energy.im > T::zero() {
        // Widths far below the discretization error come out as noise of
        // either sign; a decaying state cannot have Im E > 0.
        energy.im = T::zero();
    }
    let tol: T = lit(opts.tol);
    Ok(SiegertSolution {
        energy,
        beta1,
        beta2: Complex::from(T::one()) - beta1,
        iterations: evals,
        residual,
        converged: residual <= tol,
        node_counts: found,
        boundary,
    })
}

/// Solutions along an ascending list of fields, each warm-started from the
/// previous converged energy plus the perturbative increment. Failures are
/// kept per point.
pub fn energy_scan<T: Real>(
    state: &ParabolicState,
    fields: &[T],
    opts: &SolverOptions,
) -> Vec<Result<SiegertSolution<T>, SiegertError>> {
    let mut out = Vec::with_capacity(fields.len());
    let mut prev: Option<(f64, SiegertSolution<T>)> = None;
    for &field in fields {
        let f = field.to_f64_lossy();
        let pert = stark_energy(state, f, Order::Second);
        let result = match &prev {
            Some((f_prev, sol)) if field >= T::zero() => {
                let seed = sol.energy.re.to_f64_lossy() + pert - stark_energy(state, *f_prev, Order::Second);
                solve_from_seed(state, field, opts, seed, None).or_else(|_| siegert_energy(state, field, opts))
            }
            _ => siegert_energy(state, field, opts),
        };
        if let Ok(sol) = &result {
            prev = Some((f, *sol));
        }
        out.push(result);
    }
    out
}

/// `Re E` in `f64`, for reporting.
pub fn real_energy<T: Real>(sol: &SiegertSolution<T>) -> f64 {
    to_c64(sol.energy).re
}
