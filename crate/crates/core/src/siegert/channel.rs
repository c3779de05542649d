//! One separated channel: its potential, the regular start at the origin, the
//! Numerov sweeps and the grid layout they run on.

use num_complex::Complex;

use crate::scalar::{lit, Real};

use super::{Grid, SiegertError};

/// Which parabolic coordinate a channel equation lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Channel {
    /// `ξ = r + z`; the field confines, every state is bound.
    Xi,
    /// `η = r − z`; the field opens a barrier the electron tunnels through.
    Eta,
}

impl Channel {
    /// Sign of the linear field term in `Q`.
    pub fn field_sign(self) -> f64 {
        match self {
            Channel::Xi => -1.0,
            Channel::Eta => 1.0,
        }
    }
}

/// One channel equation `χ″ + Q(x) χ = 0` with
/// `Q(x) = E/2 + β/x + (1 − m²)/(4x²) ± (F/4) x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelProblem<T> {
    pub channel: Channel,
    pub energy: Complex<T>,
    pub field: T,
    pub beta: Complex<T>,
    pub m: u32,
    pub grid: Grid,
}

impl<T: Real> ChannelProblem<T> {
    pub(crate) fn kernel(&self) -> Kernel<T> {
        Kernel::new(self.channel, self.energy, self.field, self.beta, self.m)
    }

    /// `Q(x)` at a complex point.
    pub fn q(&self, x: Complex<T>) -> Complex<T> {
        self.kernel().q(x)
    }
}

/// The coefficients of `Q`, stripped of everything else.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Kernel<T> {
    half_e: Complex<T>,
    beta: Complex<T>,
    centrifugal: T,
    slope: T,
    m: u32,
}

impl<T: Real> Kernel<T> {
    pub fn new(channel: Channel, energy: Complex<T>, field: T, beta: Complex<T>, m: u32) -> Self {
        let mf: T = lit(f64::from(m));
        Self {
            half_e: energy * lit::<T>(0.5),
            beta,
            centrifugal: (T::one() - mf * mf) / lit(4.0),
            slope: field * lit::<T>(channel.field_sign() / 4.0),
            m,
        }
    }

    pub fn q(&self, x: Complex<T>) -> Complex<T> {
        let inv = x.inv();
        self.half_e + self.beta * inv + inv * inv * self.centrifugal + x * self.slope
    }

    pub fn q_real(&self, x: T) -> Complex<T> {
        let inv = T::one() / x;
        self.half_e + self.beta * inv + Complex::from(self.centrifugal * inv * inv + self.slope * x)
    }

    /// Regular solution `x^{(m+1)/2} Σ c_j x^j` with `c₀ = 1`, from
    /// `j(j+m) c_j = −(β c_{j−1} + (E/2) c_{j−2} ± (F/4) c_{j−3})`.
    pub fn regular(&self, x: T) -> Complex<T> {
        let zero = Complex::from(T::zero());
        let mut c = [Complex::from(T::one()), zero, zero];
        let mut sum = c[0];
        let mut power = T::one();
        let mf: T = lit(f64::from(self.m));
        let mut quiet = 0;
        for j in 1..400 {
            let jf: T = lit(j as f64);
            let next = -(self.beta * c[0] + self.half_e * c[1] + c[2] * self.slope) / (jf * (jf + mf));
            c = [next, c[0], c[1]];
            power = power * x;
            let term = next * power;
            sum = sum + term;
            if term.norm() <= T::epsilon() * lit(1e-3) * sum.norm() {
                quiet += 1;
                if quiet >= 3 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        sum * x.sqrt().powi(self.m as i32 + 1)
    }

    /// `χ(x₀ + t)` from `χ(x₀)` and `χ′(x₀)` by the Taylor series of the
    /// equation about the real point `x₀`.
    pub fn taylor(&self, x0: T, y0: Complex<T>, dy0: Complex<T>, t: T) -> Complex<T> {
        const TERMS: usize = 80;
        let inv = T::one() / x0;
        let mut q = Vec::with_capacity(TERMS);
        let mut inv_pow = inv;
        let mut sign = T::one();
        for j in 0..TERMS {
            inv_pow = inv_pow * inv; // inv^{j+2}
            let jf: T = lit(j as f64);
            let mut qj = (self.beta * (inv_pow * x0) + Complex::from(self.centrifugal * (jf + T::one()) * inv_pow))
                * sign;
            if j == 0 {
                qj = qj + self.half_e + Complex::from(self.slope * x0);
            } else if j == 1 {
                qj = qj + Complex::from(self.slope);
            }
            q.push(qj);
            sign = -sign;
        }
        let mut a: Vec<Complex<T>> = Vec::with_capacity(TERMS);
        a.push(y0);
        a.push(dy0);
        let mut sum = y0 + dy0 * t;
        let mut tp = t;
        let mut quiet = 0;
        for k in 0..TERMS - 2 {
            let conv = (0..=k).fold(Complex::from(T::zero()), |acc, j| acc + q[j] * a[k - j]);
            let kf: T = lit(k as f64);
            let next = -conv / ((kf + lit(2.0)) * (kf + T::one()));
            a.push(next);
            tp = tp * t;
            let term = next * tp;
            sum = sum + term;
            if term.norm() <= T::epsilon() * lit(1e-3) * sum.norm() {
                quiet += 1;
                if quiet >= 3 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        sum
    }
}

/// Numerov recurrence for `y″ = −q y` in summed form: with `w = (1 + h²q/12) y`
/// the second difference of `w` is accumulated in `delta`, so the small
/// `h² q y` increments are never lost against `y` at fine steps.
struct Numerov<T> {
    h2: T,
    q_cur: Complex<T>,
    w: Complex<T>,
    delta: Complex<T>,
    y_prev: Complex<T>,
    y_cur: Complex<T>,
}

impl<T: Real> Numerov<T> {
    fn new(h: T, q_prev: Complex<T>, q_cur: Complex<T>, y_prev: Complex<T>, y_cur: Complex<T>) -> Self {
        let h2 = h * h;
        let w_prev = Self::weight(h2, q_prev) * y_prev;
        let w = Self::weight(h2, q_cur) * y_cur;
        Self {
            h2,
            q_cur,
            w,
            delta: w - w_prev,
            y_prev,
            y_cur,
        }
    }

    fn weight(h2: T, q: Complex<T>) -> Complex<T> {
        Complex::from(T::one()) + q * (h2 / lit(12.0))
    }

    fn advance(&mut self, q_next: Complex<T>) {
        self.delta = self.delta - self.q_cur * self.y_cur * self.h2;
        self.w = self.w + self.delta;
        self.y_prev = self.y_cur;
        self.y_cur = self.w / Self::weight(self.h2, q_next);
        self.q_cur = q_next;
    }

    /// Keeps magnitudes inside the exponent range; the sweeps only ever use
    /// ratios and signs.
    fn rescale(&mut self) {
        let big: T = lit(1e120);
        if self.y_cur.norm() > big || self.y_prev.norm() > big {
            let shrink: T = lit(1e-120);
            self.y_cur = self.y_cur * shrink;
            self.y_prev = self.y_prev * shrink;
            self.w = self.w * shrink;
            self.delta = self.delta * shrink;
        }
    }
}

/// Sign-change tracker on the real part.
#[derive(Default)]
struct Nodes {
    last: Option<bool>,
    count: u32,
}

impl Nodes {
    fn push<T: Real>(&mut self, y: Complex<T>) {
        if y.re.is_zero() || y.re.is_nan() {
            return;
        }
        let positive = y.re > T::zero();
        if let Some(prev) = self.last {
            if prev != positive {
                self.count += 1;
            }
        }
        self.last = Some(positive);
    }
}

/// Values at `stop` and `stop + 1` of a sweep, plus the nodes it crossed.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Sweep<T> {
    pub at: Complex<T>,
    pub next: Complex<T>,
    pub nodes: u32,
}

impl<T: Real> Sweep<T> {
    pub fn log_ratio(&self) -> Complex<T> {
        self.next / self.at
    }
}

/// Outer boundary condition of a channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Tail {
    /// `χ = 0` at grid index `end`, deep in a forbidden region.
    Decaying { end: usize },
    /// Real grid up to index `r`, then `steps` sub-steps of `h/sub` along
    /// `x_R + s e^{iθ}` with `χ = 0` at the far end.
    Rotated { r: usize, steps: usize, sub: usize, theta: f64 },
}

/// Grid indices (at the coarsest step `h0`) shared by every refinement level
/// and every iteration of one solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Layout {
    pub h0: f64,
    /// Last index filled from the regular series.
    pub start: usize,
    /// Matching index; the mismatch compares `χ(x_{m+1})/χ(x_m)`.
    pub matching: usize,
    pub tail: Tail,
}

/// A [`Layout`] refined `2^level` times.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Level {
    pub h: f64,
    pub start: usize,
    pub matching: usize,
    pub tail: Tail,
}

impl Layout {
    pub fn level(&self, level: u32) -> Level {
        let k = 1usize << level;
        let tail = match self.tail {
            Tail::Decaying { end } => Tail::Decaying { end: end * k },
            Tail::Rotated { r, steps, sub, theta } => Tail::Rotated {
                r: r * k,
                steps: steps * k,
                sub,
                theta,
            },
        };
        Level {
            h: self.h0 / k as f64,
            start: self.start * k,
            matching: self.matching * k,
            tail,
        }
    }
}

/// Outward sweep from the regular series to `stop + 1`.
pub(crate) fn outward<T: Real>(kernel: &Kernel<T>, h: f64, start: usize, stop: usize) -> Sweep<T> {
    debug_assert!(stop > start);
    let hh: T = lit(h);
    let x = |i: usize| hh * lit(i as f64);
    let mut nodes = Nodes::default();
    for i in 1..=start + 1 {
        nodes.push(kernel.regular(x(i)));
    }
    let mut s = Numerov::new(
        hh,
        kernel.q_real(x(start)),
        kernel.q_real(x(start + 1)),
        kernel.regular(x(start)),
        kernel.regular(x(start + 1)),
    );
    for i in start + 1..=stop {
        s.rescale();
        s.advance(kernel.q_real(x(i + 1)));
        nodes.push(s.y_cur);
    }
    Sweep {
        at: s.y_prev,
        next: s.y_cur,
        nodes: nodes.count,
    }
}

/// Inward sweep over the real grid from `(χ_{from}, χ_{from−1})` down to
/// `stop`.
fn inward_real<T: Real>(
    kernel: &Kernel<T>,
    h: f64,
    from: usize,
    y_from: Complex<T>,
    y_below: Complex<T>,
    stop: usize,
) -> Sweep<T> {
    let hh: T = lit(h);
    let x = |i: usize| hh * lit(i as f64);
    let mut s = Numerov::new(hh, kernel.q_real(x(from)), kernel.q_real(x(from - 1)), y_from, y_below);
    let mut i = from - 1;
    while i > stop {
        s.rescale();
        s.advance(kernel.q_real(x(i - 1)));
        i -= 1;
    }
    Sweep {
        at: s.y_cur,
        next: s.y_prev,
        nodes: 0,
    }
}

/// Inward sweep from the outer boundary of `level` down to its matching
/// index.
pub(crate) fn inward<T: Real>(kernel: &Kernel<T>, level: &Level) -> Sweep<T> {
    let zero = Complex::from(T::zero());
    let one = Complex::from(T::one());
    match level.tail {
        Tail::Decaying { end } => inward_real(kernel, level.h, end, zero, one, level.matching),
        Tail::Rotated { r, steps, sub, theta } => {
            let h: T = lit(level.h);
            let hc: T = h / lit(sub as f64);
            let rot = Complex::from_polar(T::one(), lit(theta));
            let rot2 = rot * rot;
            let x_r: T = h * lit(r as f64);
            let qr = |j: f64| -> Complex<T> { kernel.q(rot * (hc * lit(j)) + x_r) * rot2 };
            let mut s = Numerov::new(hc, qr(steps as f64), qr(steps as f64 - 1.0), zero, one);
            // After the loop: y_prev = χ(s=h_c), y_cur = χ(0).
            let mut j = steps - 1;
            while j > 0 {
                s.rescale();
                s.advance(qr(j as f64 - 1.0));
                j -= 1;
            }
            s.rescale();
            let (y1, y0) = (s.y_prev, s.y_cur);
            let q1 = qr(1.0);
            let qm1 = qr(-1.0);
            s.advance(qm1);
            let ym1 = s.y_cur;
            let sixth = hc * hc / lit(6.0);
            let dyds = (y1 * (Complex::from(T::one()) + q1 * sixth) - ym1 * (Complex::from(T::one()) + qm1 * sixth))
                / (hc + hc);
            let dydx = dyds / rot;
            let y_below = kernel.taylor(x_r, y0, dydx, -h);
            inward_real(kernel, level.h, r, y0, y_below, level.matching)
        }
    }
}

/// `(χ_in(x_{m+1})/χ_in(x_m) − χ_out(x_{m+1})/χ_out(x_m)) / h`: zero exactly
/// at the discrete eigenvalues, wherever the matching index sits.
pub(crate) fn mismatch<T: Real>(kernel: &Kernel<T>, level: &Level) -> Complex<T> {
    let out = outward(kernel, level.h, level.start, level.matching);
    let inn = inward(kernel, level);
    (inn.log_ratio() - out.log_ratio()) / lit::<T>(level.h)
}

/// Largest positive root of `(E/2)x² + βx + (1 − m²)/4`, the outer classical
/// turning point of the Coulomb part of `Q`.
pub(crate) fn coulomb_turning_point(energy: f64, beta: f64, m: u32) -> Option<f64> {
    let a = 0.5 * energy;
    if a >= 0.0 {
        return None;
    }
    let c = (1.0 - f64::from(m * m)) / 4.0;
    let disc = beta * beta - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let root = (beta + disc.sqrt()) / (-2.0 * a);
    (root > 0.0).then_some(root)
}

/// Real part of `Q` in `f64`, for placing grid landmarks.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RealQ {
    pub energy: f64,
    pub beta: f64,
    pub m: u32,
    pub slope: f64,
}

impl RealQ {
    pub fn new(channel: Channel, energy: f64, field: f64, beta: f64, m: u32) -> Self {
        Self {
            energy,
            beta,
            m,
            slope: channel.field_sign() * field / 4.0,
        }
    }

    pub fn at(&self, x: f64) -> f64 {
        let c = (1.0 - f64::from(self.m * self.m)) / 4.0;
        0.5 * self.energy + self.beta / x + c / (x * x) + self.slope * x
    }

    pub fn at_complex(&self, z: Complex<f64>) -> Complex<f64> {
        let c = (1.0 - f64::from(self.m * self.m)) / 4.0;
        let inv = z.inv();
        0.5 * self.energy + self.beta * inv + c * inv * inv + self.slope * z
    }

    /// Matching point: the Coulomb turning point, pushed out to the edge of
    /// the allowed well when the field term widens it (η channel).
    pub fn matching_point(&self, limit: f64, h0: f64) -> f64 {
        let fallback = 2.0 / (-2.0 * self.energy).max(1e-12).sqrt();
        let mut x = coulomb_turning_point(self.energy, self.beta, self.m).unwrap_or(fallback);
        if self.slope > 0.0 {
            while x < limit && self.at(x) > 0.0 {
                x += h0;
            }
        }
        x
    }

    /// Walks outward from `from` until `∫ √(−Q) dx` reaches `depth`, the field
    /// term turns the region allowed again, or `limit` is hit.
    pub fn decay_end(&self, from: f64, depth: f64, limit: f64, h0: f64) -> f64 {
        let mut x = from;
        let mut acc = 0.0;
        let mut forbidden = false;
        while x < limit && acc < depth {
            let q = self.at(x);
            if q < 0.0 {
                forbidden = true;
                acc += (-q).sqrt() * h0;
            } else if forbidden && self.slope > 0.0 {
                break;
            }
            x += h0;
        }
        x.min(limit)
    }
}

/// Builds the layout for one channel solve.
pub(crate) fn build_layout(
    channel: Channel,
    energy: f64,
    field: f64,
    beta: f64,
    m: u32,
    grid: &Grid,
    rotated: Option<f64>,
) -> Result<Layout, SiegertError> {
    const DEPTH: f64 = 40.0;
    let h0 = grid.h;
    let rq = RealQ::new(channel, energy, field, beta, m);
    let barrier = if channel == Channel::Eta && field > 0.0 {
        2.0 * (beta.max(0.0) / field).sqrt()
    } else {
        f64::INFINITY
    };
    let x_m = rq.matching_point(barrier.min(grid.x_max), h0);
    let x_s = (0.5 * x_m).min(1.0);
    let start = ((x_s / h0).floor() as usize).max(1);
    let matching = ((x_m / h0).round() as usize).max(start + 2);
    let cap = (grid.x_max / h0).floor() as usize;
    let tail = match rotated {
        None => {
            let end_x = rq.decay_end(matching as f64 * h0, DEPTH, grid.x_max, h0);
            let end = ((end_x / h0).ceil() as usize).min(cap).max(matching + 4);
            Tail::Decaying { end }
        }
        Some(theta) => {
            if grid.x_max < barrier {
                return Err(SiegertError::BarrierNotResolved {
                    x_max: grid.x_max,
                    barrier,
                });
            }
            let x_r = (1.2 * barrier).max((matching + 20) as f64 * h0).min(grid.x_max);
            let r = ((x_r / h0).ceil() as usize).max(matching + 4);
            let x_r = r as f64 * h0;
            let rot = Complex::from_polar(1.0, theta);
            let mut acc = 0.0;
            let mut steps = 0usize;
            let mut k_far = 0.0f64;
            while acc < DEPTH {
                let z = x_r + rot * (steps as f64 * h0);
                let k = rq.at_complex(z).sqrt();
                acc += (k * rot).im.abs() * h0;
                k_far = k_far.max(k.norm());
                steps += 1;
                if steps > 50_000_000 {
                    return Err(SiegertError::InvalidGrid(
                        "complex-scaled tail does not decay; field too weak for outgoing boundary".into(),
                    ));
                }
            }
            let steps = steps.max(8);
            let sub = ((h0 * k_far / 0.05).ceil() as usize).max(1);
            Tail::Rotated {
                r,
                steps: steps * sub,
                sub,
                theta,
            }
        }
    };
    Ok(Layout {
        h0,
        start,
        matching,
        tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernel(channel: Channel, e: f64, f: f64, beta: f64, m: u32) -> Kernel<f64> {
        Kernel::new(channel, Complex::from(e), f, Complex::from(beta), m)
    }

    #[test]
    fn regular_series_matches_field_free_solution() {
        // χ ∝ x^{(m+1)/2} e^{−x/2n} L_k^m(x/n) at E = −1/2n², β = (k + (m+1)/2)/n.
        for &(k, m, n) in &[(0u32, 0u32, 1u32), (1, 0, 2), (0, 1, 2), (2, 3, 6)] {
            let nf = f64::from(n);
            let beta = (f64::from(k) + 0.5 * f64::from(m + 1)) / nf;
            let kern = kernel(Channel::Xi, -0.5 / (nf * nf), 0.0, beta, m);
            for &x in &[0.1f64, 0.7, 1.5] {
                let exact = x.powf(0.5 * f64::from(m + 1))
                    * (-x / (2.0 * nf)).exp()
                    * crate::laguerre::laguerre_eval(k, m, x / nf)
                    / crate::laguerre::laguerre_eval(k, m, 0.0);
                let got = kern.regular(x).re;
                assert!((got - exact).abs() <= 1e-14 * exact.abs().max(1e-3), "{k} {m} {x}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn taylor_step_matches_series() {
        let kern = Kernel::new(Channel::Eta, Complex::new(-0.52, -0.01), 0.1, Complex::new(0.4, 0.02), 1);
        let x0 = 1.0;
        let d = 1e-5;
        let y0 = kern.regular(x0);
        // reference derivative by a wide-stencil difference of the series
        let dy0 = (kern.regular(x0 - 2.0 * d) - kern.regular(x0 + 2.0 * d) + (kern.regular(x0 + d) - kern.regular(x0 - d)) * 8.0)
            / (12.0 * d);
        let got = kern.taylor(x0, y0, dy0, -0.2);
        let want = kern.regular(0.8);
        assert!((got - want).norm() < 1e-9 * want.norm(), "{got} vs {want}");
    }

    #[test]
    fn turning_point_of_ground_state_channel() {
        let x = coulomb_turning_point(-0.5, 0.5, 0).unwrap();
        assert!((x - (0.5 + 0.5f64.sqrt()) / 0.5).abs() < 1e-14);
        assert!(coulomb_turning_point(0.1, 0.5, 0).is_none());
    }
}
