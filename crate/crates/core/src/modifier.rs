//! Modified drift that removes every stationary state but one while leaving
//! the dynamics untouched as long as the barycenter stays in a domain
//! `D = [a, ∞)`.
//!
//! Work is done in units where the temperature is one, so the coupling that
//! enters here is `k = kappa / sigma^2` (see [`ModelParams::kappa_eff`]). With
//! `f` the self-consistency map, the construction is:
//!
//! * `m_*`: the unique fixed point of `f` in `D`, `m_-`: the smallest fixed
//!   point of `f`, and `eps > 0` such that `[a - eps, a]` has no fixed point;
//! * `a' = k f^{-1}(a)`, `a'' = k f^{-1}(a - eps)`, so `k m_- < a'' < a' < k m_*`;
//! * an increasing `C^2` map `r` with `r(z) = z` above `a'`, slope one below
//!   `k m_-`, `r(k m_-) >= a''` and `0 < r' <= 1`;
//! * `h'(y) = r^{-1}(k f^{-1}(y)) - k f^{-1}(y)`, anchored by `h(m_*) = 0`.
//!
//! `h` vanishes on `D`, is convex with bounded derivatives, and the reduced
//! free energy `w` has derivative `w'(θ) = θ/k - f(r(θ)/k)` with a single
//! zero at `k m_*`. In the particle system the drift gains `-sigma^2 h'(x̄)`.
//!
//! `D = (-∞, b]` is handled by reflection: for an even potential the model is
//! invariant under `x -> -x`, so the plan is built for `[-b, ∞)` and `h'` is
//! mirrored.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixedpoint::{f_inverse, find_all_fixed_points, DEFAULT_GRID_N, DEFAULT_M_MAX};
use crate::model::ModelParams;
use crate::quadrature::{f_of_m, nu_moments, DEFAULT_TOL};

/// Fraction of `a' - a''` that `∫ r'` over the transition band may use.
pub const SLOPE_MARGIN: f64 = 0.9;
pub const H_KNOTS: usize = 2048;
const EPS_SCAN_STEPS: usize = 64;

/// Metastable domain of the barycenter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// `[a, ∞)`.
    AtLeast(f64),
    /// `(-∞, b]`.
    AtMost(f64),
    /// `[a, b]`; not supported by the construction.
    Interval(f64, f64),
}

impl Domain {
    #[inline]
    pub fn contains(&self, y: f64) -> bool {
        match *self {
            Domain::AtLeast(a) => y >= a,
            Domain::AtMost(b) => y <= b,
            Domain::Interval(a, b) => a <= y && y <= b,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Direct,
    /// Plan built for the mirrored model; physical `y` maps to `-y`.
    Reflected,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModifierPlan {
    /// Left edge of the (possibly mirrored) domain `[a, ∞)`.
    pub a: f64,
    pub m_star: f64,
    pub m_minus: f64,
    pub epsilon: f64,
    pub a_prime: f64,
    pub a_double_prime: f64,
    /// `kappa / sigma^2`.
    pub kappa: f64,
    pub orientation: Orientation,
}

/// Chooses `m_*`, `m_-`, `eps`, `a'` and `a''` for the domain.
pub fn plan_domain(params: &ModelParams, domain: Domain, tol: f64) -> Result<ModifierPlan> {
    params.validate().into_result()?;
    let (a, orientation) = match domain {
        Domain::AtLeast(a) => (a, Orientation::Direct),
        Domain::AtMost(b) => (-b, Orientation::Reflected),
        Domain::Interval(a, b) => {
            return Err(Error::InvalidDomain(format!(
                "bounded domain [{a}, {b}] is not supported; use [a, inf) or (-inf, b]"
            )))
        }
    };
    let kappa = params.kappa_eff();
    let report = find_all_fixed_points(params, DEFAULT_M_MAX.max(a.abs() + 1.0), DEFAULT_GRID_N, tol)?;
    let roots = report.root_values();

    if roots.iter().any(|&m| (m - a).abs() < 1e-8) {
        return Err(Error::InvalidDomain(format!("a = {a} is itself a fixed point of f")));
    }
    let above: Vec<&crate::fixedpoint::FixedPoint> = report.roots.iter().filter(|r| r.m > a).collect();
    let m_star = match above.as_slice() {
        [only] if only.stable => only.m,
        [only] => {
            return Err(Error::InvalidDomain(format!(
                "fixed point {} in the domain is unstable (f' = {})",
                only.m, only.f_prime_at_m
            )))
        }
        [] => {
            return Err(Error::InvalidDomain(format!(
                "no fixed point of f above a = {a} (roots: {roots:?})"
            )))
        }
        _ => {
            return Err(Error::InvalidDomain(format!(
                "several fixed points above a = {a} (roots: {roots:?})"
            )))
        }
    };
    // f has no fixed point left of m_-
    let (m_minus, nearest_below) = match (roots.first(), roots.iter().rev().find(|&&m| m < a)) {
        (Some(&lo), Some(&near)) => (lo, near),
        _ => {
            return Err(Error::InvalidDomain(format!("no fixed point of f below a = {a}")));
        }
    };

    // Walk down from a until a step meets a root; keep half of the clean gap.
    let g = |m: f64| -> Result<f64> { Ok(f_of_m(params, m, DEFAULT_TOL)? - m) };
    let step = (a - nearest_below) / EPS_SCAN_STEPS as f64;
    let mut g_hi = g(a)?;
    let mut clean = None;
    for k in 0..EPS_SCAN_STEPS {
        let lo = a - (k + 1) as f64 * step;
        let g_lo = g(lo)?;
        if g_lo * g_hi <= 0.0 || g_lo.abs() < tol {
            clean = Some(k);
            break;
        }
        g_hi = g_lo;
    }
    let clean_steps = clean.unwrap_or(EPS_SCAN_STEPS);
    if clean_steps == 0 {
        return Err(Error::InvalidDomain(format!(
            "a fixed point lies within {step:e} below a = {a}"
        )));
    }
    let epsilon = 0.5 * clean_steps as f64 * step;

    let a_prime = kappa * f_inverse(params, a, 1e-12)?;
    let a_double_prime = kappa * f_inverse(params, a - epsilon, 1e-12)?;
    let plan = ModifierPlan {
        a,
        m_star,
        m_minus,
        epsilon,
        a_prime,
        a_double_prime,
        kappa,
        orientation,
    };
    if !(kappa * m_minus < a_double_prime && a_double_prime < a_prime && a_prime < kappa * m_star) {
        return Err(Error::InvalidDomain(format!(
            "ordering k m_- < a'' < a' < k m_* fails: {plan:?}"
        )));
    }
    Ok(plan)
}

/// Quintic smoothstep `6t^5 - 15t^4 + 10t^3`: zero first and second
/// derivatives at both ends.
#[inline]
fn smoothstep(t: f64) -> f64 {
    t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

#[inline]
fn smoothstep_d(t: f64) -> f64 {
    30.0 * t * t * (t - 1.0) * (t - 1.0)
}

/// `∫_0^t smoothstep`.
#[inline]
fn smoothstep_int(t: f64) -> f64 {
    let t2 = t * t;
    t2 * t2 * (t * (t - 3.0) + 2.5)
}

/// The increasing map `r`. Its derivative is `1 - (1 - s) B(z)`, where `B`
/// vanishes outside `(lo, hi) = (k m_-, a')`, equals one away from the ends,
/// and ramps up and down with quintic smoothsteps of width `ramp`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RMap {
    pub lo: f64,
    pub hi: f64,
    pub ramp: f64,
    /// Smallest slope of `r`, attained on the plateau of `B`.
    pub slope: f64,
    /// `r(lo)`.
    pub r_lo: f64,
}

impl RMap {
    /// `r = id`.
    pub fn identity() -> Self {
        Self {
            lo: 0.0,
            hi: 1.0,
            ramp: 0.25,
            slope: 1.0,
            r_lo: 0.0,
        }
    }

    fn bump(&self, z: f64) -> f64 {
        let q = self.ramp;
        if z <= self.lo || z >= self.hi {
            0.0
        } else if z < self.lo + q {
            smoothstep((z - self.lo) / q)
        } else if z > self.hi - q {
            smoothstep((self.hi - z) / q)
        } else {
            1.0
        }
    }

    fn bump_d(&self, z: f64) -> f64 {
        let q = self.ramp;
        if z <= self.lo || z >= self.hi {
            0.0
        } else if z < self.lo + q {
            smoothstep_d((z - self.lo) / q) / q
        } else if z > self.hi - q {
            -smoothstep_d((self.hi - z) / q) / q
        } else {
            0.0
        }
    }

    /// `∫_lo^z B`.
    fn bump_int(&self, z: f64) -> f64 {
        let q = self.ramp;
        let width = self.hi - self.lo;
        if z <= self.lo {
            0.0
        } else if z < self.lo + q {
            q * smoothstep_int((z - self.lo) / q)
        } else if z <= self.hi - q {
            0.5 * q + (z - self.lo - q)
        } else if z < self.hi {
            0.5 * q + (width - 2.0 * q) + q * (0.5 - smoothstep_int((self.hi - z) / q))
        } else {
            width - q
        }
    }

    #[inline]
    pub fn value(&self, z: f64) -> f64 {
        if z >= self.hi {
            z
        } else if z <= self.lo {
            self.r_lo + (z - self.lo)
        } else {
            self.r_lo + (z - self.lo) - (1.0 - self.slope) * self.bump_int(z)
        }
    }

    pub fn derivative(&self, z: f64) -> f64 {
        1.0 - (1.0 - self.slope) * self.bump(z)
    }

    pub fn second_derivative(&self, z: f64) -> f64 {
        -(1.0 - self.slope) * self.bump_d(z)
    }

    /// `r^{-1}`, exact outside the band and by bisection inside it.
    pub fn inverse(&self, y: f64) -> f64 {
        if y >= self.hi {
            return y;
        }
        if y <= self.r_lo {
            return y - self.r_lo + self.lo;
        }
        let (mut a, mut b) = (self.lo, self.hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if b - a <= 2.0 * f64::EPSILON * (1.0 + mid.abs()) {
                return mid;
            }
            if self.value(mid) < y {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    }
}

/// Builds `r` from a plan. `∫ r'` over the band is `0.9 (a' - a'')`, which
/// forces `r(k m_-) >= a''` with room to spare. The ramps are half that
/// integral wide (at most a quarter of the band), so the plateau slope
/// `s = (target - ramp) / (width - ramp)` is positive.
pub fn build_r(plan: &ModifierPlan) -> Result<RMap> {
    let lo = plan.kappa * plan.m_minus;
    let hi = plan.a_prime;
    let width = hi - lo;
    let target = SLOPE_MARGIN * (hi - plan.a_double_prime);
    if !(target > 0.0 && target < width) {
        return Err(Error::InfeasibleBump(target / width));
    }
    let ramp = (0.5 * target).min(0.25 * width);
    // ∫ r' = width - (1 - s)(width - ramp)
    let slope = (target - ramp) / (width - ramp);
    if !(slope > 0.0) {
        return Err(Error::InfeasibleBump(slope));
    }
    Ok(RMap {
        lo,
        hi,
        ramp,
        slope,
        r_lo: hi - target,
    })
}

/// Checks of the four defining properties of `r` on a sampled grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RProperties {
    /// `r(z) = z` for `z >= a'`.
    pub r1: bool,
    /// `r(k m_-) >= a''`.
    pub r2: bool,
    /// Unit slope below `k m_-`.
    pub r3: bool,
    /// `0 < r' <= 1`.
    pub r4: bool,
}

impl RProperties {
    pub fn all(&self) -> bool {
        self.r1 && self.r2 && self.r3 && self.r4
    }
}

pub fn check_r_properties(plan: &ModifierPlan, r: &RMap, samples: usize) -> RProperties {
    let lo = plan.kappa * plan.m_minus;
    let span = (plan.a_prime - lo).max(1.0);
    let grid = |a: f64, b: f64| (0..samples).map(move |i| a + (b - a) * i as f64 / (samples - 1) as f64);
    let r1 = grid(plan.a_prime, plan.a_prime + 10.0 * span).all(|z| r.value(z) == z);
    let r2 = r.value(lo) >= plan.a_double_prime;
    let r_at_lo = r.value(lo);
    let r3 = grid(lo - 10.0 * span, lo).all(|z| (r.value(z) - (r_at_lo + z - lo)).abs() <= 1e-12 * (1.0 + z.abs()));
    let r4 = grid(lo - span, plan.a_prime + span).all(|z| {
        let d = r.derivative(z);
        d > 0.0 && d <= 1.0
    });
    RProperties { r1, r2, r3, r4 }
}

/// Tabulated `h'` and `h` on knots `y_k = f(r(θ_k)/k)` with `θ_k` uniform on
/// `[k m_-, a']`, using the exact `h''` at the knots for cubic Hermite
/// interpolation. `h'` is constant below the first knot.
#[derive(Clone, Debug, Serialize)]
pub struct HTable {
    ys: Vec<f64>,
    hp: Vec<f64>,
    hpp: Vec<f64>,
    h: Vec<f64>,
    /// Value of `h'` on `(-∞, m_-]`.
    pub low_slope: f64,
}

impl HTable {
    fn locate(&self, y: f64) -> (usize, f64, f64) {
        let i = self
            .ys
            .partition_point(|&v| v <= y)
            .saturating_sub(1)
            .min(self.ys.len() - 2);
        let d = self.ys[i + 1] - self.ys[i];
        (i, (y - self.ys[i]) / d, d)
    }

    /// `h'` in plan coordinates.
    #[inline]
    pub fn h_prime(&self, y: f64, a: f64, m_minus: f64) -> f64 {
        if y >= a {
            return 0.0;
        }
        if y <= m_minus || y <= self.ys[0] {
            return self.low_slope;
        }
        let (i, t, d) = self.locate(y);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.hp[i]
            + (t3 - 2.0 * t2 + t) * d * self.hpp[i]
            + (-2.0 * t3 + 3.0 * t2) * self.hp[i + 1]
            + (t3 - t2) * d * self.hpp[i + 1]
    }

    /// `h` in plan coordinates.
    pub fn h(&self, y: f64, a: f64) -> f64 {
        if y >= a {
            return 0.0;
        }
        if y <= self.ys[0] {
            return self.h[0] + self.low_slope * (y - self.ys[0]);
        }
        let (i, t, d) = self.locate(y);
        self.h[i] + hermite_integral(t, d, self.hp[i], self.hpp[i], self.hp[i + 1], self.hpp[i + 1])
    }
}

/// `∫_0^t` of the cubic Hermite interpolant on a cell of width `d`, times `d`.
fn hermite_integral(t: f64, d: f64, p0: f64, d0: f64, p1: f64, d1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let i00 = 0.5 * t4 - t3 + t;
    let i10 = 0.25 * t4 - 2.0 * t3 / 3.0 + 0.5 * t2;
    let i01 = -0.5 * t4 + t3;
    let i11 = 0.25 * t4 - t3 / 3.0;
    d * (p0 * i00 + d * d0 * i10 + p1 * i01 + d * d1 * i11)
}

/// The full modification: plan, `r` and the tabulated `h`.
#[derive(Clone, Debug, Serialize)]
pub struct ModifiedDrift {
    pub plan: ModifierPlan,
    pub r: RMap,
    pub table: HTable,
}

impl ModifiedDrift {
    /// Builds `r` and tabulates `h` on [`H_KNOTS`] knots spanning `[f(r(k m_-)/k), a]`.
    pub fn build(params: &ModelParams, plan: ModifierPlan) -> Result<Self> {
        let r = build_r(&plan)?;
        Self::with_r(params, plan, r)
    }

    /// The unmodified drift (`r = id`, `h = 0`), for comparison.
    pub fn unmodified(params: &ModelParams, plan: ModifierPlan) -> Result<Self> {
        Self::with_r(params, plan, RMap::identity())
    }

    fn with_r(params: &ModelParams, plan: ModifierPlan, r: RMap) -> Result<Self> {
        let k = plan.kappa;
        let (t_lo, t_hi) = (k * plan.m_minus, plan.a_prime);
        let n = H_KNOTS;
        let rows: Vec<(f64, f64, f64)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let theta = t_lo + (t_hi - t_lo) * i as f64 / (n - 1) as f64;
                let z = r.value(theta);
                let nu = nu_moments(params, z / k, DEFAULT_TOL)?;
                let hp = theta - z;
                let hpp = (1.0 / r.derivative(theta) - 1.0) / nu.variance;
                Ok((nu.mean, hp, hpp))
            })
            .collect::<Result<_>>()?;
        let mut ys: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let mut hp: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let hpp: Vec<f64> = rows.iter().map(|r| r.2).collect();
        // the last knot is f(f^{-1}(a)) = a up to tolerance
        ys[n - 1] = plan.a;
        hp[n - 1] = 0.0;
        let mut h = vec![0.0; n];
        for i in (0..n - 1).rev() {
            let d = ys[i + 1] - ys[i];
            h[i] = h[i + 1] - hermite_integral(1.0, d, hp[i], hpp[i], hp[i + 1], hpp[i + 1]);
        }
        let low_slope = r.lo - r.value(r.lo);
        Ok(Self {
            plan,
            r,
            table: HTable {
                ys,
                hp,
                hpp,
                h,
                low_slope,
            },
        })
    }

    #[inline]
    fn to_plan(&self, y: f64) -> f64 {
        match self.plan.orientation {
            Orientation::Direct => y,
            Orientation::Reflected => -y,
        }
    }

    /// Tabulated `h'` at a physical barycenter `y` (exact zero inside the domain).
    #[inline]
    pub fn h_prime_interp(&self, y: f64) -> f64 {
        let v = self.table.h_prime(self.to_plan(y), self.plan.a, self.plan.m_minus);
        match self.plan.orientation {
            Orientation::Direct => v,
            Orientation::Reflected => -v,
        }
    }

    /// The physical domain this drift was built for.
    pub fn domain(&self) -> Domain {
        match self.plan.orientation {
            Orientation::Direct => Domain::AtLeast(self.plan.a),
            Orientation::Reflected => Domain::AtMost(-self.plan.a),
        }
    }
}

pub fn build_modified_drift(params: &ModelParams, domain: Domain, tol: f64) -> Result<ModifiedDrift> {
    let plan = plan_domain(params, domain, tol)?;
    ModifiedDrift::build(params, plan)
}

/// `h'(y) = r^{-1}(k f^{-1}(y)) - k f^{-1}(y)` in plan coordinates, through
/// `f^{-1}`. Returns exactly zero for `y >= a` and the exact constant for
/// `y <= m_-`.
pub fn h_prime(params: &ModelParams, drift: &ModifiedDrift, y: f64, tol: f64) -> Result<f64> {
    let plan = &drift.plan;
    if y >= plan.a {
        return Ok(0.0);
    }
    if y <= plan.m_minus {
        return Ok(drift.r.lo - drift.r.value(drift.r.lo));
    }
    let z = plan.kappa * f_inverse(params, y, tol)?;
    Ok(drift.r.inverse(z) - z)
}

/// `h(y)` in plan coordinates, anchored by `h(m_*) = 0`.
pub fn h_value(drift: &ModifiedDrift, y: f64) -> f64 {
    drift.table.h(y, drift.plan.a)
}

/// `w'(θ) = θ/k - f(r(θ)/k)`.
pub fn w_prime(params: &ModelParams, drift: &ModifiedDrift, theta: f64, tol: f64) -> Result<f64> {
    let k = drift.plan.kappa;
    Ok(theta / k - f_of_m(params, drift.r.value(theta) / k, tol)?)
}

/// `f~(m) = f(r(k m)/k)`; its fixed points are `θ/k` for the critical points
/// `θ` of `w`. Reduces to `f(r(m))` when `k = 1`.
pub fn f_tilde(params: &ModelParams, drift: &ModifiedDrift, m: f64, tol: f64) -> Result<f64> {
    let k = drift.plan.kappa;
    f_of_m(params, drift.r.value(k * m) / k, tol)
}

/// Self-consistency map of the modified mean-field dynamics written directly
/// with `h'`: the stationary law at barycenter `y` is `nu` tilted at
/// `y - h'(y)/k`. Has the same fixed points as [`f_tilde`].
pub fn modified_self_consistency(params: &ModelParams, drift: &ModifiedDrift, y: f64, tol: f64) -> Result<f64> {
    let hp = h_prime(params, drift, y, tol.max(1e-13))?;
    f_of_m(params, y - hp / drift.plan.kappa, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub points: usize,
    pub half_width: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points: 400,
            half_width: 20.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoercivityReport {
    pub theta_grid: Vec<f64>,
    pub w_prime_values: Vec<f64>,
    /// `min (θ - k m_*) w'(θ) / (θ - k m_*)^2` over the grid.
    pub eta_measured: f64,
    pub unique_critical_point: bool,
    pub w_prime_at_critical: f64,
    pub f_tilde_fixed_points: Vec<f64>,
    pub r_properties: RProperties,
    pub m_star: f64,
}

impl CoercivityReport {
    pub fn is_valid(&self) -> bool {
        self.eta_measured > 0.0
            && self.unique_critical_point
            && self.f_tilde_fixed_points.len() == 1
            && self.r_properties.all()
    }

    /// `theta,w_prime` rows.
    pub fn w_prime_csv(&self) -> String {
        let mut out = String::from("theta,w_prime\n");
        for (t, w) in self.theta_grid.iter().zip(&self.w_prime_values) {
            out.push_str(&format!("{t},{w}\n"));
        }
        out
    }
}

/// Fixed points of `f~` on `[-m_max, m_max]` by scan and bisection.
pub fn f_tilde_fixed_points(
    params: &ModelParams,
    drift: &ModifiedDrift,
    m_max: f64,
    grid_n: usize,
    tol: f64,
) -> Result<Vec<f64>> {
    let g = |m: f64| -> Result<f64> { Ok(f_tilde(params, drift, m, DEFAULT_TOL)? - m) };
    let grid: Vec<f64> = (0..grid_n)
        .map(|i| -m_max + 2.0 * m_max * i as f64 / (grid_n - 1) as f64)
        .collect();
    let gs: Vec<f64> = grid.par_iter().map(|&m| g(m)).collect::<Result<_>>()?;
    let mut roots = Vec::new();
    for i in 0..grid_n - 1 {
        if gs[i] == 0.0 {
            roots.push(grid[i]);
            continue;
        }
        if gs[i] * gs[i + 1] < 0.0 {
            let (mut lo, mut hi, mut glo) = (grid[i], grid[i + 1], gs[i]);
            let mut mid = 0.5 * (lo + hi);
            for _ in 0..200 {
                mid = 0.5 * (lo + hi);
                let gm = g(mid)?;
                if gm.abs() < tol || hi - lo < 1e-15 {
                    break;
                }
                if (gm > 0.0) == (glo > 0.0) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            roots.push(mid);
        }
    }
    Ok(roots)
}

/// Evaluates `w'` on a grid around `k m_*`, measures the coercivity constant,
/// counts critical points, lists the fixed points of `f~` and checks `r`.
/// Fails with [`Error::VerificationFailed`] when the construction is not valid.
pub fn verify_modifier(params: &ModelParams, drift: &ModifiedDrift, grid: GridSpec) -> Result<CoercivityReport> {
    let k = drift.plan.kappa;
    let centre = k * drift.plan.m_star;
    let n = grid.points.max(3);
    let theta_grid: Vec<f64> = (0..n)
        .map(|i| centre - grid.half_width + 2.0 * grid.half_width * i as f64 / (n - 1) as f64)
        .collect();
    let w_prime_values: Vec<f64> = theta_grid
        .par_iter()
        .map(|&t| w_prime(params, drift, t, DEFAULT_TOL))
        .collect::<Result<_>>()?;

    let mut eta = f64::INFINITY;
    for (&t, &w) in theta_grid.iter().zip(&w_prime_values) {
        let d = t - centre;
        if d.abs() < 1e-6 {
            continue;
        }
        eta = eta.min(w / d);
    }
    let nonzero: Vec<f64> = w_prime_values.iter().cloned().filter(|w| w.abs() > 1e-12).collect();
    let sign_changes = nonzero.windows(2).filter(|p| p[0] * p[1] < 0.0).count();
    let w_prime_at_critical = w_prime(params, drift, centre, DEFAULT_TOL)?;
    let unique_critical_point = sign_changes == 1 && w_prime_at_critical.abs() < 1e-6;

    let f_tilde_fixed_points = f_tilde_fixed_points(params, drift, DEFAULT_M_MAX, DEFAULT_GRID_N, 1e-12)?;
    let r_properties = check_r_properties(&drift.plan, &drift.r, 1000);

    let report = CoercivityReport {
        theta_grid,
        w_prime_values,
        eta_measured: eta,
        unique_critical_point,
        w_prime_at_critical,
        f_tilde_fixed_points,
        r_properties,
        m_star: drift.plan.m_star,
    };
    if report.is_valid() {
        Ok(report)
    } else {
        Err(Error::VerificationFailed(Box::new(report)))
    }
}
