//! Unperturbed and first-order parabolic wavefunctions, and the residual of
//! the first-order (Dalgarno–Lewis) equation
//!
//! ```text
//! (H₀ − E⁽⁰⁾) ψ₁ + (V − E⁽¹⁾) ψ₀ = 0,   V = (ξ − η)/2,
//! ```
//!
//! evaluated pointwise with analytic derivatives. The azimuthal factor
//! `e^{imφ}` is common to every term and omitted.

use crate::laguerre::BasisFunction;
use crate::scalar::{lit, Real};

use super::{e0, e1_closed, normalization_a, phi_expansion, ParabolicState, PhiTerm};

/// Value and derivatives of a channel function at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Jet<T> {
    v: T,
    d1: T,
    d2: T,
}

impl<T: Real> Jet<T> {
    /// `f' + x f''`, the radial part of `∂(x ∂f)`.
    fn radial(&self, x: T) -> T {
        self.d1 + x * self.d2
    }
}

fn basis_jet<T: Real>(k: u32, m: u32, x: T) -> Jet<T> {
    let (v, d1, d2) = BasisFunction::new(k, m).eval_with_derivatives(x);
    Jet { v, d1, d2 }
}

fn phi_jet<T: Real>(terms: &[(u32, T)], m: u32, x: T) -> Jet<T> {
    terms.iter().fold(
        Jet {
            v: T::zero(),
            d1: T::zero(),
            d2: T::zero(),
        },
        |acc, &(k, c)| {
            let j = basis_jet(k, m, x);
            Jet {
                v: acc.v + c * j.v,
                d1: acc.d1 + c * j.d1,
                d2: acc.d2 + c * j.d2,
            }
        },
    )
}

fn to_real<T: Real>(terms: Vec<PhiTerm>) -> Vec<(u32, T)> {
    terms
        .into_iter()
        .map(|t| (t.index, T::from_rational(&t.coefficient)))
        .collect()
}

/// Pointwise magnitude of the first-order equation at one `(ξ, η)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualSample<T> {
    pub xi: T,
    pub eta: T,
    /// `|(H₀ − E⁽⁰⁾)ψ₁ + (V − E⁽¹⁾)ψ₀|`.
    pub residual: T,
    /// Largest magnitude among the individual terms of the sum.
    pub scale: T,
}

/// `ψ₀` and `ψ₁` of one parabolic state, ready for pointwise evaluation.
#[derive(Clone, Debug)]
pub struct FirstOrderPair<T> {
    state: ParabolicState,
    n: T,
    a: T,
    e0: T,
    e1: T,
    phi1: Vec<(u32, T)>,
    phi2: Vec<(u32, T)>,
}

impl<T: Real> FirstOrderPair<T> {
    pub fn new(state: ParabolicState) -> Self {
        let norm = normalization_a(&state);
        let a = (T::from_rational(&norm.coeff) / T::PI()).sqrt();
        let phi1 = phi_expansion(&state, state.n1).expect("n1 belongs to the state");
        let phi2 = phi_expansion(&state, state.n2).expect("n2 belongs to the state");
        Self {
            state,
            n: lit(f64::from(state.principal())),
            a,
            e0: T::from_rational(&e0(&state)),
            e1: T::from_rational(&e1_closed(&state)),
            phi1: to_real(phi1),
            phi2: to_real(phi2),
        }
    }

    pub fn state(&self) -> ParabolicState {
        self.state
    }

    /// `ψ₀ = A u_{n₁,m}(ξ/n) u_{n₂,m}(η/n)`.
    pub fn psi0(&self, xi: T, eta: T) -> T {
        let m = self.state.m;
        self.a
            * BasisFunction::new(self.state.n1, m).eval(xi / self.n)
            * BasisFunction::new(self.state.n2, m).eval(eta / self.n)
    }

    /// `ψ₁ = (n³A/4) [Φ_{n₁}(ξ/n) u_{n₂}(η/n) − u_{n₁}(ξ/n) Φ_{n₂}(η/n)]`.
    pub fn psi1(&self, xi: T, eta: T) -> T {
        let (x, y) = (xi / self.n, eta / self.n);
        let m = self.state.m;
        let p1 = phi_jet(&self.phi1, m, x).v;
        let p2 = phi_jet(&self.phi2, m, y).v;
        let u1 = BasisFunction::new(self.state.n1, m).eval(x);
        let u2 = BasisFunction::new(self.state.n2, m).eval(y);
        self.prefactor() * (p1 * u2 - u1 * p2)
    }

    fn prefactor(&self) -> T {
        self.n * self.n * self.n * self.a / lit(4.0)
    }

    /// Residual of the first-order equation at `(ξ, η)`, both positive.
    pub fn residual(&self, xi: T, eta: T) -> ResidualSample<T> {
        let n = self.n;
        let m = self.state.m;
        let (x, y) = (xi / n, eta / n);
        let u1 = basis_jet(self.state.n1, m, x);
        let u2 = basis_jet(self.state.n2, m, y);
        let p1 = phi_jet(&self.phi1, m, x);
        let p2 = phi_jet(&self.phi2, m, y);
        let c = self.prefactor();

        let psi0 = self.a * u1.v * u2.v;
        let psi1 = c * (p1.v * u2.v - u1.v * p2.v);
        // ∂ξ(ξ∂ξ ψ₁) + ∂η(η∂η ψ₁)
        let radial = c
            * (p1.radial(x) * u2.v + p1.v * u2.radial(y) - u1.radial(x) * p2.v - u1.v * p2.radial(y))
            / n;

        let sum = xi + eta;
        let four: T = lit(4.0);
        let half: T = lit(0.5);
        let m2: T = lit(f64::from(m * m));
        let kinetic_radial = -half * four / sum * radial;
        let kinetic_azimuthal = half * m2 / (xi * eta) * psi1;
        let coulomb = -lit::<T>(2.0) / sum * psi1;
        let shift = -self.e0 * psi1;
        let field = half * (xi - eta) * psi0;
        let first = -self.e1 * psi0;

        let terms = [kinetic_radial, kinetic_azimuthal, coulomb, shift, field, first];
        let total = terms.iter().fold(T::zero(), |acc, &t| acc + t);
        let scale = terms.iter().fold(T::zero(), |acc, &t| acc.max(t.abs()));
        ResidualSample {
            xi,
            eta,
            residual: total.abs(),
            scale,
        }
    }

    /// Worst `residual / scale` over a `points × points` grid on
    /// `[lo, hi]²`, with `scale` the largest term anywhere on the grid.
    pub fn max_relative_residual(&self, lo: T, hi: T, points: usize) -> T {
        assert!(points >= 2, "grid needs at least two points per axis");
        let step = (hi - lo) / lit((points - 1) as f64);
        let mut worst = T::zero();
        let mut scale = T::zero();
        for i in 0..points {
            let xi = lo + step * lit(i as f64);
            for j in 0..points {
                let eta = lo + step * lit(j as f64);
                let s = self.residual(xi, eta);
                worst = worst.max(s.residual);
                scale = scale.max(s.scale);
            }
        }
        worst / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturbation::states_up_to;

    #[test]
    fn ground_state_residual_vanishes() {
        let pair = FirstOrderPair::<f64>::new(ParabolicState::GROUND);
        for &(xi, eta) in &[(0.3, 0.7), (1.0, 1.0), (2.5, 0.1), (6.0, 4.0)] {
            let s = pair.residual(xi, eta);
            assert!(s.residual <= 1e-13 * s.scale.max(1e-300), "{s:?}");
        }
    }

    #[test]
    fn residual_is_small_for_low_states() {
        for st in states_up_to(3) {
            let n = f64::from(st.principal());
            let pair = FirstOrderPair::<f64>::new(st);
            let rel = pair.max_relative_residual(0.1, 20.0 * n, 25);
            assert!(rel < 1e-10, "{st}: {rel}");
        }
    }

    #[test]
    fn psi0_is_normalized() {
        // ∫∫ ψ₀² (ξ+η)/4 dξ dη · 2π = 1, checked with a tensor Simpson rule.
        for st in states_up_to(2) {
            let n = f64::from(st.principal());
            let pair = FirstOrderPair::<f64>::new(st);
            let (pts, top) = (401, 40.0 * n);
            let h = top / (pts - 1) as f64;
            let w = |i: usize| -> f64 {
                if i == 0 || i == pts - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                }
            };
            let mut total = 0.0;
            for i in 0..pts {
                for j in 0..pts {
                    let (xi, eta) = (i as f64 * h, j as f64 * h);
                    let p = pair.psi0(xi, eta);
                    total += w(i) * w(j) * p * p * 0.25 * (xi + eta);
                }
            }
            total *= h * h / 9.0 * 2.0 * std::f64::consts::PI;
            assert!((total - 1.0).abs() < 1e-5, "{st}: {total}");
        }
    }

    #[test]
    fn psi1_changes_sign_under_mirroring() {
        let st = ParabolicState::new(1, 0, 0);
        let a = FirstOrderPair::<f64>::new(st);
        let b = FirstOrderPair::<f64>::new(st.mirrored());
        let (xi, eta) = (1.3, 2.9);
        assert!((a.psi1(xi, eta) + b.psi1(eta, xi)).abs() < 1e-12);
        assert!((a.psi0(xi, eta) - b.psi0(eta, xi)).abs() < 1e-15);
    }
}
