//! Integrals against the tilted measure
//! `nu_m(dx) ∝ exp(-[V(x) + kappa |x - m|^2 / 2] / sigma^2) dx`
//! and against the one-particle Gibbs measure `∝ exp(-V(x)/sigma^2)`.
//!
//! Everything goes through a vector-valued adaptive Simpson rule so that the
//! mass, first and second moments share one panel set.

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Maximum number of Simpson panels (accepted plus split) per integral.
pub const PANEL_BUDGET: usize = 1 << 18;

/// Default absolute tolerance on the (peak-normalized) integrals.
pub const DEFAULT_TOL: f64 = 1e-10;

const INITIAL_PANELS: usize = 64;
const SCAN_POINTS: usize = 2049;
/// Window endpoints must sit this far (in log units) below the sampled peak.
const TAIL_LOG_DROP: f64 = 36.0;
/// Threshold used to trim the window to the effective support.
const SUPPORT_LOG_DROP: f64 = 40.0;
const MAX_DOUBLINGS: usize = 60;

/// Moments of `nu_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct NuMoments {
    pub m: f64,
    /// `ln z`, where `z = ∫ exp(-[V(x) + kappa |x-m|^2/2]/sigma^2) dx`.
    /// Kept in log form since `z` under- or overflows for large `|m|`.
    pub log_z: f64,
    /// `f(m)`.
    pub mean: f64,
    pub variance: f64,
    /// `max(|lo|, |hi|)` of the integration window.
    pub truncation_radius: f64,
    /// Richardson error estimate on the peak-normalized integrals.
    pub estimated_error: f64,
}

impl NuMoments {
    pub fn z(&self) -> f64 {
        self.log_z.exp()
    }
}

/// `-[V(x) + kappa |x - m|^2 / 2] / sigma^2`.
#[inline]
pub fn log_weight(params: &ModelParams, m: f64, x: f64) -> f64 {
    let d = x - m;
    -(params.potential.value(x) + 0.5 * params.kappa * d * d) / params.temperature()
}

/// Result of integrating a vector-valued function.
#[derive(Clone, Copy, Debug)]
pub struct Integral<const K: usize> {
    pub value: [f64; K],
    pub error: f64,
    pub panels: usize,
}

#[inline]
fn simpson<const K: usize>(h: f64, fa: &[f64; K], fm: &[f64; K], fb: &[f64; K]) -> [f64; K] {
    let mut out = [0.0; K];
    for k in 0..K {
        out[k] = h / 6.0 * (fa[k] + 4.0 * fm[k] + fb[k]);
    }
    out
}

struct Panel<const K: usize> {
    a: f64,
    b: f64,
    fa: [f64; K],
    fm: [f64; K],
    fb: [f64; K],
    whole: [f64; K],
}

/// Adaptive Simpson rule with interval halving.
///
/// The tolerance is absolute and is shared across the window in proportion to
/// panel width, so the summed error estimate stays below `tol`. Every component
/// must meet it on a panel before the panel is accepted.
pub fn adaptive_simpson<const K: usize, F>(
    f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    initial_panels: usize,
    budget: usize,
) -> Result<Integral<K>>
where
    F: Fn(f64) -> [f64; K],
{
    assert!(hi > lo && tol > 0.0);
    let width = hi - lo;
    let n0 = initial_panels.max(1);
    let mut stack: Vec<Panel<K>> = Vec::with_capacity(64);
    let step = width / n0 as f64;
    let mut fa = f(lo);
    for i in 0..n0 {
        let a = lo + step * i as f64;
        let b = if i + 1 == n0 { hi } else { lo + step * (i + 1) as f64 };
        let fm = f(0.5 * (a + b));
        let fb = f(b);
        stack.push(Panel {
            a,
            b,
            fa,
            fm,
            fb,
            whole: simpson(b - a, &fa, &fm, &fb),
        });
        fa = fb;
    }
    // pop from the left end first
    stack.reverse();

    let mut value = [0.0; K];
    let mut error = 0.0;
    let mut panels = n0;
    while let Some(p) = stack.pop() {
        let mid = 0.5 * (p.a + p.b);
        let flm = f(0.5 * (p.a + mid));
        let frm = f(0.5 * (mid + p.b));
        let h = 0.5 * (p.b - p.a);
        let left = simpson(h, &p.fa, &flm, &p.fm);
        let right = simpson(h, &p.fm, &frm, &p.fb);
        let local_tol = tol * (p.b - p.a) / width;
        let mut diff: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for k in 0..K {
            diff = diff.max((left[k] + right[k] - p.whole[k]).abs());
            scale = scale.max(left[k].abs() + right[k].abs());
        }
        // refining below roundoff cannot help
        let tiny = p.b - p.a <= 64.0 * f64::EPSILON * (p.a.abs() + p.b.abs() + 1.0);
        if diff <= 15.0 * local_tol || diff <= 64.0 * f64::EPSILON * scale || tiny {
            for k in 0..K {
                let s2 = left[k] + right[k];
                value[k] += s2 + (s2 - p.whole[k]) / 15.0;
            }
            error += diff / 15.0;
            continue;
        }
        panels += 2;
        if panels > budget {
            return Err(Error::QuadratureNonConvergence { lo, hi, budget });
        }
        stack.push(Panel {
            a: mid,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
        });
        stack.push(Panel {
            a: p.a,
            b: mid,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
        });
    }
    Ok(Integral { value, error, panels })
}

/// Effective support of an unnormalized log-density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
    /// Largest sampled log-density; integrands are rescaled by `exp(-log_peak)`.
    pub log_peak: f64,
    /// Location of the sampled peak.
    pub peak_at: f64,
}

fn scan(log_w: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let n = SCAN_POINTS;
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let ls: Vec<f64> = xs.iter().map(|&x| log_w(x)).collect();
    (xs, ls)
}

/// Finds an integration window for `exp(log_w)`.
///
/// Starts from `[centre - half_width, centre + half_width]` and doubles the
/// half-width until both endpoint values are below `exp(-36)` times the largest
/// sampled value, then trims to the region where the density is within
/// `exp(-40)` of the peak (plus one scan cell on each side).
pub fn find_window(log_w: impl Fn(f64) -> f64, centre: f64, half_width: f64) -> Window {
    let mut hw = half_width;
    let (mut xs, mut ls) = scan(&log_w, centre - hw, centre + hw);
    for _ in 0..MAX_DOUBLINGS {
        let peak = ls.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let (l0, l1) = (ls[0], ls[ls.len() - 1]);
        if l0 < peak - TAIL_LOG_DROP && l1 < peak - TAIL_LOG_DROP {
            break;
        }
        hw *= 2.0;
        (xs, ls) = scan(&log_w, centre - hw, centre + hw);
    }
    let (mut imax, mut peak) = (0, f64::NEG_INFINITY);
    for (i, &l) in ls.iter().enumerate() {
        if l > peak {
            peak = l;
            imax = i;
        }
    }
    let cut = peak - SUPPORT_LOG_DROP;
    let first = ls.iter().position(|&l| l >= cut).unwrap_or(0);
    let last = ls.iter().rposition(|&l| l >= cut).unwrap_or(ls.len() - 1);
    let lo = xs[first.saturating_sub(1)];
    let hi = xs[(last + 1).min(xs.len() - 1)];
    Window {
        lo,
        hi,
        log_peak: peak,
        peak_at: xs[imax],
    }
}

/// Mass, mean and variance of `exp(log_w)` over a window.
#[derive(Clone, Copy, Debug)]
pub struct RawMoments {
    pub log_mass: f64,
    pub mean: f64,
    pub variance: f64,
    pub error: f64,
    pub window: Window,
}

/// Integrates `(1, x, x^2) exp(log_w)` on one panel set. Moments are taken
/// about the peak location to limit cancellation in the variance.
pub fn moments(log_w: impl Fn(f64) -> f64, centre: f64, half_width: f64, tol: f64) -> Result<RawMoments> {
    let window = find_window(&log_w, centre, half_width);
    let c = window.peak_at;
    let shift = window.log_peak;
    // exp(log_w - shift) carries relative noise of order eps * |shift|
    let tol = tol.max(16.0 * f64::EPSILON * (1.0 + shift.abs()) * (window.hi - window.lo));
    let integral = adaptive_simpson(
        |x| {
            let w = (log_w(x) - shift).exp();
            let d = x - c;
            [w, d * w, d * d * w]
        },
        window.lo,
        window.hi,
        tol,
        INITIAL_PANELS,
        PANEL_BUDGET,
    )?;
    let [m0, m1, m2] = integral.value;
    let d1 = m1 / m0;
    let variance = (m2 / m0 - d1 * d1).max(0.0);
    Ok(RawMoments {
        log_mass: m0.ln() + shift,
        mean: c + d1,
        variance,
        error: integral.error,
        window,
    })
}

/// A critical point of `V(x) + kappa (x - m)^2 / 2`, found by bisection on its
/// derivative, and the initial search half-width around it.
fn nu_centre(params: &ModelParams, m: f64) -> (f64, f64) {
    let du = |x: f64| params.potential.grad(x) + params.kappa * (x - m);
    let mut r = m.abs() + 2.0;
    while du(-r) >= 0.0 || du(r) <= 0.0 {
        r *= 2.0;
        if !r.is_finite() {
            return (m / (1.0 + params.kappa), 8.0 * params.sigma + 4.0);
        }
    }
    let (mut lo, mut hi) = (-r, r);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if du(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi), 8.0 * params.sigma + 4.0)
}

/// Mass, mean `f(m)` and variance of `nu_m`.
pub fn nu_moments(params: &ModelParams, m: f64, tol: f64) -> Result<NuMoments> {
    assert!(tol > 0.0, "tolerance must be positive");
    let (centre, hw) = nu_centre(params, m);
    let raw = moments(|x| log_weight(params, m, x), centre, hw, tol)?;
    Ok(NuMoments {
        m,
        log_z: raw.log_mass,
        mean: raw.mean,
        variance: raw.variance,
        truncation_radius: raw.window.lo.abs().max(raw.window.hi.abs()),
        estimated_error: raw.error,
    })
}

/// The self-consistency map `f(m) = ∫ x nu_m(dx)`.
pub fn f_of_m(params: &ModelParams, m: f64, tol: f64) -> Result<f64> {
    Ok(nu_moments(params, m, tol)?.mean)
}

/// `f'(m) = (kappa / sigma^2) Var(nu_m)`, which is positive.
pub fn f_prime(params: &ModelParams, m: f64, tol: f64) -> Result<f64> {
    Ok(params.kappa_eff() * nu_moments(params, m, tol)?.variance)
}

/// The normalized one-particle Gibbs density `exp(-V(x)/sigma^2) / Z_1`.
///
/// With a single particle the interaction term vanishes, so this is the
/// invariant law of the `N = 1` dynamics.
#[derive(Clone, Debug)]
pub struct GibbsDensity {
    params: ModelParams,
    pub log_z: f64,
    pub window: Window,
    tol: f64,
}

impl GibbsDensity {
    pub fn new(params: &ModelParams, tol: f64) -> Result<Self> {
        let p = params.clone();
        let raw = moments(
            |x| -p.potential.value(x) / p.temperature(),
            0.0,
            8.0 * p.sigma + 4.0,
            tol,
        )?;
        Ok(Self {
            params: p,
            log_z: raw.log_mass,
            window: raw.window,
            tol,
        })
    }

    #[inline]
    pub fn log_density(&self, x: f64) -> f64 {
        -self.params.potential.value(x) / self.params.temperature() - self.log_z
    }

    pub fn density(&self, x: f64) -> f64 {
        self.log_density(x).exp()
    }

    /// Probability of `[a, b]`.
    pub fn mass(&self, a: f64, b: f64) -> Result<f64> {
        mass_of(|x| self.density(x), a, b, self.tol)
    }
}

/// `gibbs_density_1particle(params, x)`.
pub fn gibbs_density_1particle(params: &ModelParams, x: f64) -> Result<f64> {
    Ok(GibbsDensity::new(params, DEFAULT_TOL)?.density(x))
}

/// `∫_a^b density` by adaptive Simpson.
pub fn mass_of(density: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let r = adaptive_simpson(|x| [density(x)], a, b, tol, 16, PANEL_BUDGET)?;
    Ok(r.value[0])
}

/// Tabulated CDF of a one-dimensional density, inverted by interpolation.
#[derive(Clone, Debug)]
pub struct QuantileTable {
    xs: Vec<f64>,
    cdf: Vec<f64>,
}

impl QuantileTable {
    /// Tabulates the CDF of `exp(log_w)` on `cells` cells of its window, using
    /// Simpson's rule on every cell.
    pub fn from_log_density(log_w: impl Fn(f64) -> f64, centre: f64, half_width: f64, cells: usize) -> Self {
        let window = find_window(&log_w, centre, half_width);
        let cells = cells.max(2);
        let h = (window.hi - window.lo) / cells as f64;
        let w = |x: f64| (log_w(x) - window.log_peak).exp();
        let mut xs = Vec::with_capacity(cells + 1);
        let mut cdf = Vec::with_capacity(cells + 1);
        xs.push(window.lo);
        cdf.push(0.0);
        let mut acc = 0.0;
        let mut fa = w(window.lo);
        for i in 0..cells {
            let a = window.lo + h * i as f64;
            let b = a + h;
            let fb = w(b);
            acc += h / 6.0 * (fa + 4.0 * w(a + 0.5 * h) + fb);
            xs.push(b);
            cdf.push(acc);
            fa = fb;
        }
        for c in cdf.iter_mut() {
            *c /= acc;
        }
        Self { xs, cdf }
    }

    /// Quantile table of `nu_m`.
    pub fn for_nu(params: &ModelParams, m: f64, cells: usize) -> Self {
        let (centre, hw) = nu_centre(params, m);
        Self::from_log_density(|x| log_weight(params, m, x), centre, hw, cells)
    }

    /// Smallest tabulated `x` with `F(x) >= p`, linearly interpolated.
    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        let i = self.cdf.partition_point(|&c| c < p);
        if i == 0 {
            return self.xs[0];
        }
        if i >= self.cdf.len() {
            return *self.xs.last().unwrap();
        }
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let t = if c1 > c0 { (p - c0) / (c1 - c0) } else { 0.0 };
        self.xs[i - 1] + t * (self.xs[i] - self.xs[i - 1])
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let i = self.xs.partition_point(|&v| v < x);
        if i == 0 {
            return 0.0;
        }
        if i >= self.xs.len() {
            return 1.0;
        }
        let t = (x - self.xs[i - 1]) / (self.xs[i] - self.xs[i - 1]);
        self.cdf[i - 1] + t * (self.cdf[i] - self.cdf[i - 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_weight_examples() {
        let p1 = ModelParams::double_well(1.0);
        assert_eq!(log_weight(&p1, 0.0, 0.0), 0.0);
        assert_eq!(log_weight(&p1, 0.0, 1.0), -0.25);
        let p = ModelParams::double_well(0.5);
        assert_eq!(log_weight(&p, 1.0, 1.0), 1.0);
    }

    #[test]
    fn simpson_integrates_cubic_exactly() {
        let r = adaptive_simpson(|x| [x * x * x - 2.0 * x + 1.0], -1.0, 2.0, 1e-12, 4, 1 << 10).unwrap();
        // ∫_{-1}^{2} x^3 - 2x + 1 = 15/4 - 3 + 3
        assert!((r.value[0] - 3.75).abs() < 1e-13);
    }

    #[test]
    fn simpson_gaussian() {
        let r = adaptive_simpson(|x: f64| [(-0.5 * x * x).exp()], -12.0, 12.0, 1e-12, 8, 1 << 16).unwrap();
        let exact = (2.0 * std::f64::consts::PI).sqrt();
        assert!((r.value[0] - exact).abs() < 1e-11);
        assert!(r.error <= 1e-12);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let err = adaptive_simpson(|x: f64| [(1.0 / x).sin()], 1e-6, 1.0, 1e-14, 1, 64).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }

    #[test]
    fn symmetric_tilt_has_zero_mean() {
        let p = ModelParams::double_well(0.5);
        let nu = nu_moments(&p, 0.0, DEFAULT_TOL).unwrap();
        assert!(nu.mean.abs() < 1e-10);
        assert!(nu.variance > 0.0);
        assert!(nu.estimated_error < DEFAULT_TOL);
        assert!(nu.mean.abs() <= nu.truncation_radius);
    }

    #[test]
    fn variance_at_origin_matches_closed_form() {
        // m = 0, kappa = 1: V + x^2/2 = x^4/4, so nu_0 ∝ exp(-x^4 / (4 sigma^2))
        // and Var = 2 sigma Γ(3/4)/Γ(1/4).
        let gamma_ratio = 1.225_416_702_465_178 / 3.625_609_908_221_908;
        for sigma in [0.3, 0.5, 0.68, 1.0] {
            let p = ModelParams::double_well(sigma);
            let nu = nu_moments(&p, 0.0, DEFAULT_TOL).unwrap();
            let exact = 2.0 * sigma * gamma_ratio;
            assert!((nu.variance - exact).abs() < 1e-10, "sigma={sigma}");
        }
    }

    #[test]
    fn large_tilt_is_sublinear() {
        let p = ModelParams::double_well(0.5);
        let nu = nu_moments(&p, 50.0, DEFAULT_TOL).unwrap();
        assert!(nu.mean / 50.0 < 0.1);
        assert!(nu.mean > 3.0);
        assert!(nu.log_z.is_finite());
    }

    #[test]
    fn f_prime_examples() {
        let p = ModelParams::double_well(0.5);
        assert!(f_prime(&p, 0.0, DEFAULT_TOL).unwrap() > 1.0);
        for m in [-3.0, -1.0, 0.2, 2.0, 10.0] {
            assert!(f_prime(&p, m, DEFAULT_TOL).unwrap() > 0.0);
        }
    }

    #[test]
    fn gibbs_density_is_normalized_and_bimodal() {
        let p = ModelParams::double_well(0.5);
        let g = GibbsDensity::new(&p, DEFAULT_TOL).unwrap();
        let total = g.mass(g.window.lo, g.window.hi).unwrap();
        assert!((total - 1.0).abs() < 1e-8);
        for x in [0.1, 0.7, 1.3, 2.0] {
            assert_eq!(g.density(x), g.density(-x));
        }
        let xs: Vec<f64> = (0..=4000).map(|i| -2.0 + 0.001 * i as f64).collect();
        let argmax = xs
            .iter()
            .cloned()
            .filter(|&x| x > 0.0)
            .max_by(|a, b| g.density(*a).partial_cmp(&g.density(*b)).unwrap())
            .unwrap();
        assert!((argmax - 1.0).abs() < 1e-3);
        assert!(g.density(0.0) < g.density(1.0));
    }

    #[test]
    fn quantile_table_inverts_cdf() {
        let p = ModelParams::double_well(0.5);
        let q = QuantileTable::for_nu(&p, 0.9, 20_000);
        for pr in [0.01, 0.2, 0.5, 0.77, 0.99] {
            let x = q.quantile(pr);
            assert!((q.cdf(x) - pr).abs() < 1e-9);
        }
        let nu = nu_moments(&p, 0.9, DEFAULT_TOL).unwrap();
        // midpoint-rule mean of the quantile function
        let n = 20_000;
        let mean: f64 = (0..n).map(|i| q.quantile((i as f64 + 0.5) / n as f64)).sum::<f64>() / n as f64;
        assert!((mean - nu.mean).abs() < 1e-4);
    }
}
