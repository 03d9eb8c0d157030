use serde::{Deserialize, Serialize};
use upfrac_core::{Error, GaussLegendre, Result};

/// Zeros `+-x_n + i y_n` with `x_n = n^alpha` and `y_n = n^{alpha-1}`
/// for `alpha <= 1/2`, `y_n = 1` otherwise, each of multiplicity `ell`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSequence {
    pub alpha: f64,
    pub ell: u32,
    /// Largest admissible truncation index.
    #[serde(default = "default_n_max")]
    pub n_max: u64,
    /// Tail tolerance for `phi` and `phi'`, relative to [`PhaseSequence::envelope`].
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Same for `phi^(k)`, `k >= 2`, whose tails use a coarser power bound.
    #[serde(default = "default_high_order_tolerance")]
    pub high_order_tolerance: f64,
}

fn default_n_max() -> u64 {
    1_000_000
}
fn default_tolerance() -> f64 {
    1e-10
}
fn default_high_order_tolerance() -> f64 {
    1e-3
}

/// A truncated sum with a bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub value: f64,
    pub tail_bound: f64,
    /// Number of indices `n` summed explicitly.
    pub n_used: u64,
}

impl PhaseSequence {
    pub fn new(alpha: f64, ell: u32) -> Result<Self> {
        let seq = Self {
            alpha,
            ell,
            n_max: default_n_max(),
            tolerance: default_tolerance(),
            high_order_tolerance: default_high_order_tolerance(),
        };
        seq.validate()?;
        Ok(seq)
    }

    pub fn with_n_max(mut self, n_max: u64) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_ell(mut self, ell: u32) -> Self {
        self.ell = ell;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Parameter(format!("alpha must lie in (0,1), got {}", self.alpha)));
        }
        if self.ell == 0 {
            return Err(Error::Parameter("ell must be a positive integer".into()));
        }
        if self.n_max < 16 {
            return Err(Error::Parameter("n_max must be at least 16".into()));
        }
        for t in [self.tolerance, self.high_order_tolerance] {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Parameter(format!("tolerance must be positive, got {t}")));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let seq: Self = serde_json::from_str(text).map_err(|e| Error::Input(format!("phase config: {e}")))?;
        seq.validate()?;
        Ok(seq)
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.alpha
    }

    /// `(x_n, y_n)`.
    pub fn zero(&self, n: u64) -> (f64, f64) {
        let nf = n as f64;
        let x = nf.powf(self.alpha);
        let y = if self.alpha <= 0.5 { x / nf } else { 1.0 };
        (x, y)
    }

    /// `ell (1 + |x|)^{k (beta - 1)}` for `k >= 1` and `ell (1 + |x|)^beta` for `phi` itself.
    pub fn envelope(&self, x: f64, k: u32) -> f64 {
        let p = if k == 0 { self.beta() } else { k as f64 * (self.beta() - 1.0) };
        self.ell as f64 * (1.0 + x.abs()).powf(p)
    }

    /// Exponent `q` with `y_n / x_n^{m} = n^{-q}`.
    fn decay_exponent(&self, m: f64) -> f64 {
        if self.alpha <= 0.5 {
            1.0 - self.alpha + self.alpha * m
        } else {
            self.alpha * m
        }
    }

    /// Smallest `N` with `x_N >= |x| + 2`; beyond it every summand used by
    /// the enclosures is decreasing and convex in `n`.
    fn n_convex(&self, x: f64) -> u64 {
        ((x.abs() + 2.0).powf(self.beta())).ceil() as u64
    }

    /// Smallest `N` with `x_N >= 2|x| + 2`, so `|x +- x_n| >= x_n / 2` beyond it.
    fn n_far(&self, x: f64) -> u64 {
        ((2.0 * x.abs() + 2.0).powf(self.beta())).ceil() as u64
    }

    fn check_n(&self, n: u64) -> Result<()> {
        if n > self.n_max {
            return Err(Error::Truncation {
                bound: f64::INFINITY,
                tol: self.tolerance,
                suggested: n,
            });
        }
        Ok(())
    }
}

/// Compensated summation in ascending index order.
#[derive(Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    c: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.c += (self.sum - t) + v;
        } else {
            self.c += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.c
    }
}

/// `P_v^{(m)}(u)` for the kernel `P_v(u) = v / (u^2 + v^2)`.
pub fn poisson_derivative(m: u32, u: f64, v: f64) -> f64 {
    if m == 0 {
        return v / (u * u + v * v);
    }
    // P_v(u) = Im 1/(u - iv), so P^{(m)} = Im (-1)^m m! (u - iv)^{-m-1}
    let d = u * u + v * v;
    let (wr, wi) = (u / d, v / d);
    let (mut pr, mut pi) = (wr, wi);
    let mut fact = 1.0;
    for j in 1..=m {
        let nr = pr * wr - pi * wi;
        pi = pr * wi + pi * wr;
        pr = nr;
        fact *= j as f64;
    }
    if m % 2 == 1 {
        -fact * pi
    } else {
        fact * pi
    }
}

/// Summand of `phi` for `x >= 0`: `atan((x + x_n)/y_n) - atan((x_n - x)/y_n)`.
fn phase_term(x: f64, xn: f64, yn: f64) -> f64 {
    (2.0 * x * yn).atan2(yn * yn + xn * xn - x * x)
}

fn first_term(x: f64, xn: f64, yn: f64) -> f64 {
    let a = x - xn;
    let b = x + xn;
    yn / (a * a + yn * yn) + yn / (b * b + yn * yn)
}

const TAIL_ORDER: usize = 24;

/// `int_{N}^inf g(t) dt` for a summand written in `u = t^alpha`, using the
/// substitution `u = x + (U - x) e^tau`.
fn tail_integral(seq: &PhaseSequence, x: f64, from_t: f64, term: &dyn Fn(f64, f64) -> f64) -> f64 {
    let alpha = seq.alpha;
    let beta = seq.beta();
    let u0 = from_t.powf(alpha);
    let gap = u0 - x;
    let y_of = |u: f64| if alpha <= 0.5 { u.powf(1.0 - beta) } else { 1.0 };
    // dt = beta u^{beta - 1} du, du = (u - x) dtau
    let integrand = |tau: f64| {
        let u = x + gap * tau.exp();
        term(u, y_of(u)) * beta * u.powf(beta - 1.0) * (u - x)
    };
    // integrand ~ exp(-rate tau) for large tau
    let rate = if alpha <= 0.5 { 1.0 } else { 2.0 - beta };
    let tau_max = 40.0 / rate;
    let gl = GaussLegendre::new(TAIL_ORDER);
    let panels = (tau_max / 0.5).ceil() as usize;
    let h = tau_max / panels as f64;
    let mut acc = Neumaier::default();
    for p in 0..panels {
        for (t, w) in gl.mapped(p as f64 * h, (p + 1) as f64 * h) {
            acc.add(w * integrand(t));
        }
    }
    // power-law remainder past tau_max
    acc.add(integrand(tau_max) / rate);
    acc.total()
}

/// `int_a^b g(t) dt` over a short range in `t`.
fn short_integral(seq: &PhaseSequence, a: f64, b: f64, term: &dyn Fn(f64, f64) -> f64) -> f64 {
    let gl = GaussLegendre::new(TAIL_ORDER);
    gl.integrate(a, b, |t| {
        let u = t.powf(seq.alpha);
        let y = if seq.alpha <= 0.5 { u / t } else { 1.0 };
        term(u, y)
    })
}

/// Encloses `sum_{n > N} g(n)` for `g` positive, decreasing and convex on
/// `[N, inf)`: the trapezoid rule over-estimates and the midpoint rule
/// under-estimates the integral.
fn convex_tail(seq: &PhaseSequence, x: f64, n: u64, term: &dyn Fn(f64, f64) -> f64) -> (f64, f64) {
    let nf = n as f64;
    let upper = tail_integral(seq, x, nf + 0.5, term);
    let (xn, yn) = seq.zero(n);
    let lower = upper + short_integral(seq, nf, nf + 0.5, term) - 0.5 * term(xn, yn);
    let mid = 0.5 * (upper + lower);
    let half = 0.5 * (upper - lower).abs() + 1e-14 * mid.abs();
    (mid, half)
}

/// `phi(x)` normalized by `phi(0) = 0`, at a fixed truncation.
pub fn phase_fixed(seq: &PhaseSequence, x: f64, n: u64) -> Result<Evaluation> {
    let ax = x.abs();
    if n < seq.n_convex(ax) {
        return Err(Error::Truncation { bound: f64::INFINITY, tol: seq.tolerance, suggested: seq.n_convex(ax) });
    }
    if ax == 0.0 {
        return Ok(Evaluation { value: 0.0, tail_bound: 0.0, n_used: n });
    }
    let mut acc = Neumaier::default();
    for j in 1..=n {
        let (xn, yn) = seq.zero(j);
        acc.add(phase_term(ax, xn, yn));
    }
    let term = |u: f64, y: f64| phase_term(ax, u, y);
    let (tail, half) = convex_tail(seq, ax, n, &term);
    let ell = seq.ell as f64;
    Ok(Evaluation { value: x.signum() * ell * (acc.total() + tail), tail_bound: ell * half, n_used: n })
}

/// `phi^{(k)}(x)` at a fixed truncation, `k >= 1`.
pub fn phase_derivative_fixed(seq: &PhaseSequence, x: f64, k: u32, n: u64) -> Result<Evaluation> {
    if k == 0 {
        return phase_fixed(seq, x, n);
    }
    let ell = seq.ell as f64;
    if k == 1 {
        let ax = x.abs();
        if n < seq.n_convex(ax) {
            return Err(Error::Truncation { bound: f64::INFINITY, tol: seq.tolerance, suggested: seq.n_convex(ax) });
        }
        let mut acc = Neumaier::default();
        for j in 1..=n {
            let (xn, yn) = seq.zero(j);
            acc.add(first_term(ax, xn, yn));
        }
        let term = |u: f64, y: f64| first_term(ax, u, y);
        let (tail, half) = convex_tail(seq, ax, n, &term);
        return Ok(Evaluation { value: ell * (acc.total() + tail), tail_bound: ell * half, n_used: n });
    }
    if n < seq.n_far(x) {
        return Err(Error::Truncation { bound: f64::INFINITY, tol: seq.high_order_tolerance, suggested: seq.n_far(x) });
    }
    let m = k - 1;
    let mut acc = Neumaier::default();
    for j in 1..=n {
        let (xn, yn) = seq.zero(j);
        acc.add(poisson_derivative(m, x - xn, yn) + poisson_derivative(m, x + xn, yn));
    }
    Ok(Evaluation { value: ell * acc.total(), tail_bound: ell * power_tail(seq, k, n), n_used: n })
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

/// `sum_{n > N} 2 k! 2^{k+1} y_n / x_n^{k+1}`, bounding both Poisson-derivative
/// terms once `x_n >= 2|x|` because `|P^{(k-1)}_v(u)| <= k! v / |u - iv|^{k+1}`.
fn power_tail(seq: &PhaseSequence, k: u32, n: u64) -> f64 {
    let q = seq.decay_exponent(k as f64 + 1.0);
    2.0 * factorial(k) * 2f64.powi(k as i32 + 1) * (n as f64).powf(1.0 - q) / (q - 1.0)
}

/// `phi^{(k)}(x)` (`phi` itself for `k = 0`) with the truncation grown until
/// the tail bound meets the tolerance.
pub fn phase_derivative(seq: &PhaseSequence, x: f64, k: u32) -> Result<Evaluation> {
    seq.validate()?;
    if !x.is_finite() {
        return Err(Error::Parameter("x must be finite".into()));
    }
    let env = seq.envelope(x, k);
    if k >= 2 {
        let tol = seq.high_order_tolerance * env;
        let q = seq.decay_exponent(k as f64 + 1.0);
        let c = 2.0 * seq.ell as f64 * factorial(k) * 2f64.powi(k as i32 + 1) / (q - 1.0);
        let needed = (c / tol).powf(1.0 / (q - 1.0)).ceil();
        let n = (needed.min(1e18) as u64).max(seq.n_far(x)).max(16);
        seq.check_n(n).map_err(|_| Error::Truncation { bound: c * (seq.n_max as f64).powf(1.0 - q), tol, suggested: n })?;
        return phase_derivative_fixed(seq, x, k, n);
    }
    let tol = seq.tolerance * env;
    let mut n = seq.n_convex(x).max(16);
    loop {
        seq.check_n(n)?;
        let e = phase_derivative_fixed(seq, x, k, n)?;
        if e.tail_bound <= tol {
            return Ok(e);
        }
        if n.saturating_mul(2) > seq.n_max {
            return Err(Error::Truncation { bound: e.tail_bound, tol, suggested: n.saturating_mul(2) });
        }
        n *= 2;
    }
}

/// `sum_n Im z_n / |x0 - z_n|^{2k+2}` over all zeros `+-x_n + i y_n`, with a
/// power-law tail bound; finite partial sum plus finite bound certifies
/// convergence.
pub fn condition_sum(seq: &PhaseSequence, x0: f64, k: u32, n: u64) -> Result<Evaluation> {
    seq.validate()?;
    let n = n.max(seq.n_far(x0));
    seq.check_n(n)?;
    let p = k as i32 + 1;
    let mut acc = Neumaier::default();
    for j in 1..=n {
        let (xn, yn) = seq.zero(j);
        let a = x0 - xn;
        let b = x0 + xn;
        acc.add(yn / (a * a + yn * yn).powi(p) + yn / (b * b + yn * yn).powi(p));
    }
    // |x0 +- x_n| >= x_n / 2 beyond n_far
    let q = seq.decay_exponent(2.0 * k as f64 + 2.0);
    let tail = 2.0 * 4f64.powi(p) * (n as f64).powf(1.0 - q) / (q - 1.0);
    Ok(Evaluation { value: acc.total(), tail_bound: tail, n_used: n })
}
