//! Exact perturbative Stark corrections for hydrogen in parabolic quantum
//! numbers.
//!
//! Every correction is available twice: as the closed polynomial in
//! `(n₁, n₂, m)` and recomputed from the Laguerre overlap integrals of
//! [`crate::integrals`]. The two routes must agree exactly.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::exact::{factorial, integer, rational};
use crate::integrals::{z_closed_form, ZQuery};

pub mod wavefunction;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("parabolic quantum numbers must be nonnegative, got n1={n1}, n2={n2}")]
    NegativeQuantumNumber { n1: i64, n2: i64 },
    #[error("channel index {k} is neither n1 nor n2 of state {state}")]
    ChannelNotInState { k: u32, state: ParabolicState },
    #[error("point r={r}, z={z} violates |z| <= r")]
    OutsideCone { r: f64, z: f64 },
    #[error("principal quantum number must be at least 1")]
    ZeroPrincipal,
}

/// Parabolic quantum numbers `(n₁, n₂, m)` with `m ≥ 0`.
///
/// States with `±m` are degenerate, so only the nonnegative representative
/// is stored; [`ParabolicState::from_signed`] folds a signed `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParabolicState {
    pub n1: u32,
    pub n2: u32,
    pub m: u32,
}

impl ParabolicState {
    pub const GROUND: Self = Self { n1: 0, n2: 0, m: 0 };

    pub fn new(n1: u32, n2: u32, m: u32) -> Self {
        Self { n1, n2, m }
    }

    pub fn from_signed(n1: i64, n2: i64, m: i64) -> Result<Self, StateError> {
        if n1 < 0 || n2 < 0 {
            return Err(StateError::NegativeQuantumNumber { n1, n2 });
        }
        Ok(Self::new(n1 as u32, n2 as u32, m.unsigned_abs() as u32))
    }

    /// `n = n₁ + n₂ + m + 1`.
    pub fn principal(&self) -> u32 {
        self.n1 + self.n2 + self.m + 1
    }

    /// Same state seen in a field pointing the other way.
    pub fn mirrored(&self) -> Self {
        Self::new(self.n2, self.n1, self.m)
    }

    /// The perturbative triple `(E⁽⁰⁾, E⁽¹⁾, E⁽²⁾)`.
    pub fn expansion(&self) -> StarkExpansion {
        StarkExpansion {
            e0: e0(self),
            e1: e1_closed(self),
            e2: e2_closed(self),
        }
    }
}

impl fmt::Display for ParabolicState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n1, self.n2, self.m)
    }
}

/// Truncation order of the field expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Zeroth = 0,
    First = 1,
    Second = 2,
}

impl TryFrom<u8> for Order {
    type Error = u8;

    fn try_from(value: u8) -> Result<Self, u8> {
        match value {
            0 => Ok(Order::Zeroth),
            1 => Ok(Order::First),
            2 => Ok(Order::Second),
            other => Err(other),
        }
    }
}

/// Exact `E = e0 + e1 F + e2 F²` coefficients in atomic units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarkExpansion {
    pub e0: BigRational,
    pub e1: BigRational,
    pub e2: BigRational,
}

impl StarkExpansion {
    /// Energy at field `field`, truncated after `order`.
    pub fn energy(&self, field: f64, order: Order) -> f64 {
        let e0 = self.e0.to_f64().unwrap_or(f64::NAN);
        let e1 = self.e1.to_f64().unwrap_or(f64::NAN);
        let e2 = self.e2.to_f64().unwrap_or(f64::NAN);
        match order {
            Order::Zeroth => e0,
            Order::First => e0 + e1 * field,
            Order::Second => e0 + e1 * field + e2 * field * field,
        }
    }
}

/// A point in parabolic coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoordinatePoint {
    pub xi: f64,
    pub eta: f64,
    pub phi: f64,
}

impl CoordinatePoint {
    pub fn r(&self) -> f64 {
        0.5 * (self.xi + self.eta)
    }

    pub fn z(&self) -> f64 {
        0.5 * (self.xi - self.eta)
    }
}

/// `(ξ, η) = (r + z, r − z)`.
pub fn to_parabolic(r: f64, z: f64) -> Result<(f64, f64), StateError> {
    if !(z.abs() <= r) {
        return Err(StateError::OutsideCone { r, z });
    }
    Ok((r + z, r - z))
}

/// Volume element `(ξ + η)/4` of `dξ dη dφ`.
pub fn jacobian(xi: f64, eta: f64) -> f64 {
    0.25 * (xi + eta)
}

/// `E⁽⁰⁾ = −1/(2n²)`.
pub fn e0(state: &ParabolicState) -> BigRational {
    let n = i64::from(state.principal());
    rational(-1, 2 * n * n)
}

/// A quantity of the form `coeff / π`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverPi {
    pub coeff: BigRational,
}

impl OverPi {
    pub fn to_f64(&self) -> f64 {
        self.coeff.to_f64().unwrap_or(f64::NAN) / std::f64::consts::PI
    }
}

impl fmt::Display for OverPi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/pi", self.coeff)
    }
}

/// Square of the normalization factor,
/// `A² = n₁! n₂! / (π n⁴ (n₁+m)! (n₂+m)!)`.
pub fn normalization_a(state: &ParabolicState) -> OverPi {
    let n = i64::from(state.principal());
    let num = factorial(state.n1) * factorial(state.n2);
    let den = factorial(state.n1 + state.m) * factorial(state.n2 + state.m) * (n * n * n * n);
    OverPi {
        coeff: BigRational::new(num, den),
    }
}

/// `E⁽¹⁾ = (3/2) n (n₁ − n₂)`.
pub fn e1_closed(state: &ParabolicState) -> BigRational {
    let n = i64::from(state.principal());
    rational(3 * n * (i64::from(state.n1) - i64::from(state.n2)), 2)
}

/// `π n⁴ A² / 4 · ∫x² u_k² dx · ∫u_ℓ² dy` for the state's normalization.
///
/// With `(k, ℓ) = (n₁, n₂)` this is the ξ half of `⟨(ξ−η)/2⟩`, and with the
/// indices swapped the η half.
pub fn first_order_half(state: &ParabolicState, k: u32, l: u32) -> BigRational {
    let n = i64::from(state.principal());
    let prefactor = normalization_a(state).coeff * integer(n.pow(4)) / integer(4);
    let m = state.m;
    prefactor * z_closed_form(ZQuery::new(2, k, k, m)) * z_closed_form(ZQuery::new(0, l, l, m))
}

/// `E⁽¹⁾` recomputed from the overlap integrals.
pub fn e1_from_integrals(state: &ParabolicState) -> BigRational {
    first_order_half(state, state.n1, state.n2) - first_order_half(state, state.n2, state.n1)
}

/// One term `coefficient · u_{index,m}` of a Φ expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiTerm {
    pub index: u32,
    pub coefficient: BigRational,
}

/// Expansion of the first-order channel function `Φ_{k,m}` over
/// `u_{k−2,m} … u_{k+2,m}`.
///
/// The coefficients solve the channel's inhomogeneous Laguerre equation: the
/// `u_{k±1}` terms carry `3n − m − 3 − 2k` and `3n − m + 1 − 2k` with the
/// channel's own `k`, and the upper two terms enter with a minus sign relative
/// to the lower ones. The `u_k` coefficient is `3k`, which makes the
/// correction orthogonal to the unperturbed state. Terms with negative index
/// are dropped.
pub fn phi_expansion(state: &ParabolicState, k: u32) -> Result<Vec<PhiTerm>, StateError> {
    if k != state.n1 && k != state.n2 {
        return Err(StateError::ChannelNotInState { k, state: *state });
    }
    let n = i64::from(state.principal());
    let m = i64::from(state.m);
    let ki = i64::from(k);
    let raw = [
        (ki - 2, rational((ki + m) * (ki + m - 1), 2)),
        (ki - 1, integer(-(3 * n - m - 3 - 2 * ki) * (ki + m))),
        (ki, integer(3 * ki)),
        (ki + 1, integer((3 * n - m + 1 - 2 * ki) * (ki + 1))),
        (ki + 2, rational(-(ki + 1) * (ki + 2), 2)),
    ];
    Ok(raw
        .into_iter()
        .filter(|(index, _)| *index >= 0)
        .map(|(index, coefficient)| PhiTerm {
            index: index as u32,
            coefficient,
        })
        .collect())
}

/// `E⁽²⁾ = −(n⁴/16) [17n² − 3(n₁−n₂)² − 9m² + 19]`.
pub fn e2_closed(state: &ParabolicState) -> BigRational {
    let n = i64::from(state.principal());
    let d = i64::from(state.n1) - i64::from(state.n2);
    let m = i64::from(state.m);
    let bracket = 17 * n * n - 3 * d * d - 9 * m * m + 19;
    rational(-n.pow(4) * bracket, 16)
}

fn phi_moment(terms: &[PhiTerm], k: u32, alpha: u32, m: u32) -> BigRational {
    terms.iter().fold(BigRational::zero(), |acc, t| {
        acc + &t.coefficient * z_closed_form(ZQuery::new(alpha, t.index, k, m))
    })
}

/// `K_{i,j} = (π n⁷ A²/16) [∫x²Φ_i u_i ∫u_j² − ∫x²u_i² ∫Φ_j u_j]`, the
/// channel-`i` half of `E⁽²⁾`, with every integral taken from
/// [`z_closed_form`].
pub fn second_order_half(state: &ParabolicState, i: u32, j: u32) -> Result<BigRational, StateError> {
    let m = state.m;
    let n = i64::from(state.principal());
    let phi_i = phi_expansion(state, i)?;
    let phi_j = phi_expansion(state, j)?;
    let prefactor = normalization_a(state).coeff * integer(n.pow(7)) / integer(16);
    let left = phi_moment(&phi_i, i, 2, m) * z_closed_form(ZQuery::new(0, j, j, m));
    let right = z_closed_form(ZQuery::new(2, i, i, m)) * phi_moment(&phi_j, j, 0, m);
    Ok(prefactor * (left - right))
}

/// `E⁽²⁾` recomputed from Φ and the overlap integrals.
pub fn e2_from_integrals(state: &ParabolicState) -> BigRational {
    let (a, b) = (state.n1, state.n2);
    // Both indices belong to the state, so neither call can fail.
    let ka = second_order_half(state, a, b).expect("n1 belongs to the state");
    let kb = second_order_half(state, b, a).expect("n2 belongs to the state");
    ka + kb
}

/// The typeset closed form for `K_{i,j}`, kept only to document its
/// disagreement with the final `E⁽²⁾`:
///
/// ```text
/// (n³/16)[4i(i²−1) + 6i(i+im+m²+m−1) + (m²+3m+2)(3i−3j+2m−3) + 18(i²+im+i)(i−j−2n)]
/// ```
pub fn printed_k(i: u32, j: u32, m: u32, n: u32) -> BigRational {
    let (i, j, m, n) = (i64::from(i), i64::from(j), i64::from(m), i64::from(n));
    let bracket = 4 * i * (i * i - 1)
        + 6 * i * (i + i * m + m * m + m - 1)
        + (m * m + 3 * m + 2) * (3 * i - 3 * j + 2 * m - 3)
        + 18 * (i * i + i * m + i) * (i - j - 2 * n);
    rational(n.pow(3) * bracket, 16)
}

/// Side-by-side second-order values for one state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecondOrderReport {
    pub state: ParabolicState,
    pub closed: BigRational,
    pub from_integrals: BigRational,
    /// `K_{n₁,n₂} + K_{n₂,n₁}` from [`printed_k`].
    pub printed_k_sum: BigRational,
}

impl SecondOrderReport {
    pub fn new(state: ParabolicState) -> Self {
        let n = state.principal();
        let printed_k_sum =
            printed_k(state.n1, state.n2, state.m, n) + printed_k(state.n2, state.n1, state.m, n);
        Self {
            state,
            closed: e2_closed(&state),
            from_integrals: e2_from_integrals(&state),
            printed_k_sum,
        }
    }

    pub fn routes_agree(&self) -> bool {
        self.closed == self.from_integrals
    }

    pub fn printed_k_agrees(&self) -> bool {
        self.printed_k_sum == self.closed
    }
}

impl fmt::Display for SecondOrderReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: closed {} | from integrals {} | printed K sum {}{}",
            self.state,
            self.closed,
            self.from_integrals,
            self.printed_k_sum,
            if self.printed_k_agrees() { "" } else { " (disagrees)" }
        )
    }
}

/// `E(F)` truncated after `order`, evaluated in `f64` from the exact
/// coefficients. A negative field is the same as the mirrored state in `|F|`.
pub fn stark_energy(state: &ParabolicState, field: f64, order: Order) -> f64 {
    state.expansion().energy(field, order)
}

/// Shift `E(F) − E⁽⁰⁾` at the requested order.
pub fn splitting(state: &ParabolicState, field: f64, order: Order) -> f64 {
    let exp = state.expansion();
    let e1 = exp.e1.to_f64().unwrap_or(f64::NAN);
    let e2 = exp.e2.to_f64().unwrap_or(f64::NAN);
    match order {
        Order::Zeroth => 0.0,
        Order::First => e1 * field,
        Order::Second => e1 * field + e2 * field * field,
    }
}

/// All `m ≥ 0` substates of shell `n`, by increasing `m` and, within one
/// `m`, decreasing `n₁`.
pub fn enumerate_states(n: u32) -> Result<Vec<ParabolicState>, StateError> {
    if n == 0 {
        return Err(StateError::ZeroPrincipal);
    }
    let mut out = Vec::with_capacity((n * (n + 1) / 2) as usize);
    for m in 0..n {
        let budget = n - m - 1;
        for n1 in (0..=budget).rev() {
            out.push(ParabolicState::new(n1, budget - n1, m));
        }
    }
    Ok(out)
}

/// Every state with principal number `1..=n_max`.
pub fn states_up_to(n_max: u32) -> Vec<ParabolicState> {
    (1..=n_max)
        .flat_map(|n| enumerate_states(n).unwrap_or_default())
        .collect()
}

/// `true` when the quadratic coefficient is strictly negative.
pub fn is_red_shifted_quadratically(state: &ParabolicState) -> bool {
    e2_closed(state).is_negative()
}
