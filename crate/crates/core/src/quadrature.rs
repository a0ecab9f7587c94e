//! Gauss–Legendre rules (fixed, composite, adaptive) and tanh-sinh.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::summation::{neumaier_sum, pairwise_sum};

fn legendre_nodes_f64(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 0 { 0.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((-x, w));
        if 2 * i + 1 != n {
            out.push((x, w));
        }
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// Nodes and weights on [-1, 1], computed once per order and cached.
pub fn gauss_legendre_f64(n: usize) -> &'static [(f64, f64)] {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static [(f64, f64)]>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| Box::leak(legendre_nodes_f64(n).into_boxed_slice()))
}

/// A Gauss–Legendre rule converted to the working scalar type.
#[derive(Debug, Clone)]
pub struct GaussLegendre<F> {
    nodes: Vec<F>,
    weights: Vec<F>,
}

impl<F: Real> GaussLegendre<F> {
    pub fn new(n: usize) -> Self {
        let table = gauss_legendre_f64(n);
        Self {
            nodes: table.iter().map(|p| F::of(p.0)).collect(),
            weights: table.iter().map(|p| F::of(p.1)).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: F, b: F) -> impl Iterator<Item = (F, F)> + '_ {
        let half = (b - a) / F::of(2.0);
        let mid = (a + b) / F::of(2.0);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<G: Fn(F) -> F>(&self, f: G, a: F, b: F) -> F {
        neumaier_sum(self.mapped(a, b).map(|(x, w)| w * f(x)))
    }

    /// Returns (∫f, ∫|f|) estimated with the same nodes.
    fn integrate_with_abs<G: Fn(F) -> F>(&self, f: &G, a: F, b: F) -> (F, F) {
        let mut s = crate::summation::Neumaier::new();
        let mut sa = crate::summation::Neumaier::new();
        for (x, w) in self.mapped(a, b) {
            let v = f(x);
            s.add(w * v);
            sa.add(w * v.abs());
        }
        (s.value(), sa.value())
    }

    /// Composite rule with `panels` equal panels.
    pub fn composite<G: Fn(F) -> F>(&self, f: G, a: F, b: F, panels: usize) -> F {
        let panels = panels.max(1);
        let width = (b - a) / F::of_usize(panels);
        let parts: Vec<F> = (0..panels)
            .map(|k| {
                let lo = a + width * F::of_usize(k);
                let hi = if k + 1 == panels { b } else { lo + width };
                self.integrate(&f, lo, hi)
            })
            .collect();
        pairwise_sum(&parts)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadValue<F> {
    pub value: F,
    pub error: F,
    pub panels: usize,
}

/// Adaptive Gauss–Legendre integrator: each panel is accepted when the
/// 16-point estimate on the panel and on its two halves agree.
#[derive(Debug, Clone)]
pub struct Adaptive<F> {
    pub abs_tol: F,
    pub rel_tol: F,
    pub initial_panels: usize,
    pub max_panels: usize,
    rule: GaussLegendre<F>,
}

impl<F: Real> Default for Adaptive<F> {
    fn default() -> Self {
        Self::new(F::of(1e-13), F::of(1e-12))
    }
}

impl<F: Real> Adaptive<F> {
    pub fn new(abs_tol: F, rel_tol: F) -> Self {
        Self {
            abs_tol,
            rel_tol,
            initial_panels: 1,
            max_panels: 200_000,
            rule: GaussLegendre::new(16),
        }
    }

    pub fn with_initial_panels(mut self, panels: usize) -> Self {
        self.initial_panels = panels.max(1);
        self
    }

    pub fn with_max_panels(mut self, panels: usize) -> Self {
        self.max_panels = panels;
        self
    }

    /// Initial panel count for an integrand oscillating like `cos(freq·x)`
    /// over `[a, b]`: panel width at most π/4 of a radian period.
    pub fn for_frequency(mut self, freq: F, a: F, b: F) -> Self {
        let width = (b - a).abs();
        let max_w = F::PI() / (F::of(4.0) * freq.abs().max(F::epsilon()));
        let needed = (width / max_w).ceil().to_usize().unwrap_or(1);
        self.initial_panels = self.initial_panels.max(needed.clamp(1, self.max_panels / 2));
        self
    }

    pub fn integrate<G: Fn(F) -> F>(&self, f: G, a: F, b: F) -> Result<QuadValue<F>> {
        if a == b {
            return Ok(QuadValue {
                value: F::zero(),
                error: F::zero(),
                panels: 0,
            });
        }
        let (lo, hi, sign) = if a < b { (a, b, F::one()) } else { (b, a, -F::one()) };
        let total = hi - lo;
        let n0 = self.initial_panels.max(1);
        let w0 = total / F::of_usize(n0);

        let mut stack: Vec<(F, F, F, usize)> = Vec::new();
        let mut abs_scale = F::zero();
        let mut initial = Vec::with_capacity(n0);
        for k in 0..n0 {
            let pa = lo + w0 * F::of_usize(k);
            let pb = if k + 1 == n0 { hi } else { pa + w0 };
            let (v, va) = self.rule.integrate_with_abs(&f, pa, pb);
            abs_scale = abs_scale + va;
            initial.push((pa, pb, v, 0usize));
        }
        for item in initial.into_iter().rev() {
            stack.push(item);
        }
        let tol = self.abs_tol.max(self.rel_tol * abs_scale);
        let mut accepted: Vec<F> = Vec::new();
        let mut err_total = F::zero();
        let mut panels = 0usize;

        while let Some((pa, pb, whole, depth)) = stack.pop() {
            let mid = (pa + pb) / F::of(2.0);
            let (left, left_abs) = self.rule.integrate_with_abs(&f, pa, mid);
            let (right, right_abs) = self.rule.integrate_with_abs(&f, mid, pb);
            let refined = left + right;
            if !refined.is_finite() {
                return Err(Error::Numerical(format!(
                    "non-finite integrand on [{pa:e}, {pb:e}]"
                )));
            }
            let diff = (refined - whole).abs();
            // rounding floor: node positions carry an absolute error of order
            // eps·|x|, which the halves comparison cannot resolve
            let offset = F::one() + mid.abs() / (pb - pa);
            let noise = F::epsilon() * F::of(64.0) * offset * (left_abs + right_abs);
            let local_tol = (tol * ((pb - pa) / total)).max(noise);
            if diff <= local_tol || depth > 60 || (pb - pa) <= total * F::epsilon() * F::of(16.0) {
                accepted.push(refined);
                err_total = err_total + diff;
                panels += 1;
            } else {
                if stack.len() + panels > self.max_panels {
                    return Err(Error::Numerical(format!(
                        "adaptive quadrature exceeded {} panels on [{lo:e}, {hi:e}]",
                        self.max_panels
                    )));
                }
                stack.push((mid, pb, right, depth + 1));
                stack.push((pa, mid, left, depth + 1));
            }
        }
        Ok(QuadValue {
            value: sign * pairwise_sum(&accepted),
            error: err_total,
            panels,
        })
    }

    /// Integrates over consecutive breakpoints, splitting at kinks.
    pub fn integrate_pieces<G: Fn(F) -> F>(&self, f: G, breaks: &[F]) -> Result<F> {
        let mut parts = Vec::with_capacity(breaks.len());
        for w in breaks.windows(2) {
            parts.push(self.integrate(&f, w[0], w[1])?.value);
        }
        Ok(pairwise_sum(&parts))
    }
}

/// ∫_a^b |f| for smooth f: sign changes are bracketed on a grid of spacing
/// at most `step`, located by the Illinois method, and f is integrated over
/// each sign-constant piece.
pub fn abs_integral<F: Real, G: Fn(F) -> F>(f: G, a: F, b: F, step: F, q: &Adaptive<F>) -> Result<F> {
    let n = ((b - a) / step).ceil().to_usize().unwrap_or(1).max(1);
    let h = (b - a) / F::of_usize(n);
    let mut breaks = vec![a];
    let mut x0 = a;
    let mut f0 = f(a);
    for k in 1..=n {
        let x1 = if k == n { b } else { a + h * F::of_usize(k) };
        let f1 = f(x1);
        if f0 * f1 < F::zero() {
            breaks.push(illinois(&f, x0, x1, f0, f1));
        }
        x0 = x1;
        f0 = f1;
    }
    breaks.push(b);
    let mut parts = Vec::with_capacity(breaks.len());
    for w in breaks.windows(2) {
        parts.push(q.integrate(&f, w[0], w[1])?.value.abs());
    }
    Ok(pairwise_sum(&parts))
}

fn illinois<F: Real, G: Fn(F) -> F>(f: &G, mut a: F, mut b: F, mut fa: F, mut fb: F) -> F {
    for _ in 0..100 {
        if (b - a).abs() <= F::epsilon() * F::of(4.0) * (F::one() + b.abs()) {
            break;
        }
        let c = b - fb * (b - a) / (fb - fa);
        let fc = f(c);
        if fc == F::zero() {
            return c;
        }
        if fc * fb < F::zero() {
            a = b;
            fa = fb;
        } else {
            fa = fa / F::of(2.0);
        }
        b = c;
        fb = fc;
    }
    b
}

/// Double-exponential (tanh-sinh) quadrature on a finite interval. Suited to
/// integrands with endpoint singularities or flat endpoints.
pub fn tanh_sinh<F: Real, G: Fn(F) -> F>(f: G, a: F, b: F, tol: F) -> Result<F> {
    let half = (b - a) / F::of(2.0);
    let mid = (a + b) / F::of(2.0);
    let pi2 = F::FRAC_PI_2();
    let tiny = F::min_positive_value();

    // Evaluates the symmetric node pair at abscissa parameter s.
    let pair = |s: F| -> Option<F> {
        let u = pi2 * s.sinh();
        let cosh_u = u.cosh();
        // distance from the nearer endpoint, 1 - tanh(u)
        let delta = (-u).exp() / cosh_u;
        let w = pi2 * s.cosh() / (cosh_u * cosh_u);
        if !w.is_finite() || w < tiny || delta * half.abs() <= F::zero() {
            return None;
        }
        let xr = b - half * delta;
        let xl = a + half * delta;
        // a node that rounds onto its endpoint carries negligible weight
        let right = if xr == b { F::zero() } else { f(xr) };
        let left = if xl == a { F::zero() } else { f(xl) };
        if xr == b && xl == a {
            return None;
        }
        Some(w * (left + right))
    };

    let mut h = F::one();
    let mut total = {
        let mut acc = crate::summation::Neumaier::new();
        acc.add(pi2 * f(mid));
        let mut k = 1usize;
        while let Some(v) = pair(h * F::of_usize(k)) {
            acc.add(v);
            k += 1;
            if k > 64 {
                break;
            }
        }
        acc.value()
    };
    let mut estimate = half * h * total;
    for _level in 0..14 {
        h = h / F::of(2.0);
        let mut acc = crate::summation::Neumaier::new();
        let mut k = 1usize;
        loop {
            match pair(h * F::of_usize(k)) {
                Some(v) => acc.add(v),
                None => break,
            }
            k += 2;
            if k > 1 << 16 {
                break;
            }
        }
        total = total + acc.value();
        let next = half * h * total;
        if !next.is_finite() {
            return Err(Error::Numerical("tanh-sinh produced a non-finite sum".into()));
        }
        if (next - estimate).abs() <= tol * next.abs().max(F::one()) {
            return Ok(next);
        }
        estimate = next;
    }
    Ok(estimate)
}
