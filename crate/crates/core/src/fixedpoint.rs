//! Fixed points of the self-consistency map `f`, their stability, the inverse
//! of `f`, and the phase diagram of the stationary means.

use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::quadrature::{f_of_m, f_prime, DEFAULT_TOL};

/// Stopping rule of the plain iteration used for the phase diagram figure.
pub const FIGURE_ITERATION_TOL: f64 = 1e-5;
pub const DEFAULT_MAX_ITER: usize = 200_000;
/// Default half-width of the scanned interval for the double well.
pub const DEFAULT_M_MAX: f64 = 5.0;
pub const DEFAULT_GRID_N: usize = 401;
/// A fixed point above this threshold counts as a symmetry-broken branch.
pub const BRANCH_THRESHOLD: f64 = 1e-4;
const BRACKET_LIMIT: f64 = 1e6;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct FixedPoint {
    pub m: f64,
    pub f_prime_at_m: f64,
    /// `f'(m) < 1`.
    pub stable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPointReport {
    pub sigma: f64,
    pub roots: Vec<FixedPoint>,
    /// Left end of each bisected bracket and the bisection steps it needed.
    pub iterations_used: Vec<(f64, usize)>,
    pub tolerance: f64,
    pub warnings: Vec<String>,
}

impl FixedPointReport {
    pub fn root_values(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.m).collect()
    }

    /// Largest root, if any.
    pub fn largest(&self) -> Option<&FixedPoint> {
        self.roots.last()
    }
}

/// Plain iteration `m_{k+1} = f(m_k)`, stopped at the first `|m_k - m_{k-1}| < tol`.
pub fn iterate_to_fixed_point(params: &ModelParams, m0: f64, tol: f64, max_iter: usize) -> Result<(f64, usize)> {
    assert!(tol > 0.0);
    let qtol = DEFAULT_TOL.min(tol * 1e-3);
    let mut m = m0;
    let mut step = f64::INFINITY;
    for k in 1..=max_iter {
        let next = f_of_m(params, m, qtol)?;
        step = (next - m).abs();
        m = next;
        if step < tol {
            return Ok((m, k));
        }
    }
    Err(Error::NoConvergence {
        start: m0,
        max_iter,
        last_step: step,
    })
}

fn g(params: &ModelParams, m: f64) -> Result<f64> {
    Ok(f_of_m(params, m, DEFAULT_TOL)? - m)
}

/// Bisects `g(m) = f(m) - m` on a bracket with `g(lo) * g(hi) < 0`.
fn bisect_g(params: &ModelParams, mut lo: f64, mut hi: f64, mut glo: f64, tol: f64) -> Result<(f64, usize)> {
    let mut steps = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        let gm = g(params, mid)?;
        steps += 1;
        if gm.abs() < tol || hi - lo < 1e-15 * (1.0 + mid.abs()) || steps > 200 {
            return Ok((mid, steps));
        }
        if (gm > 0.0) == (glo > 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
}

/// Scans `g = f - id` on a uniform grid over `[-m_max, m_max]`, bisects every
/// sign change to `|g| < tol`, deduplicates within `10 tol`, and classifies
/// each root by `f'`.
pub fn find_all_fixed_points(params: &ModelParams, m_max: f64, grid_n: usize, tol: f64) -> Result<FixedPointReport> {
    assert!(grid_n >= 64, "grid must have at least 64 points");
    assert!(m_max > 0.0 && tol > 0.0);
    let grid: Vec<f64> = (0..grid_n)
        .map(|i| -m_max + 2.0 * m_max * i as f64 / (grid_n - 1) as f64)
        .collect();
    let gs: Vec<f64> = grid.par_iter().map(|&m| g(params, m)).collect::<Result<_>>()?;

    let mut warnings = Vec::new();
    if gs[0] <= 0.0 || gs[grid_n - 1] >= 0.0 {
        warnings.push(format!(
            "g(-m_max) = {:.3e}, g(m_max) = {:.3e}: expected positive then negative; roots may lie outside the scan",
            gs[0],
            gs[grid_n - 1]
        ));
    }

    let mut found: Vec<f64> = Vec::new();
    let mut iterations_used = Vec::new();
    for i in 0..grid_n {
        if gs[i].abs() < tol {
            found.push(grid[i]);
            iterations_used.push((grid[i], 0));
        }
        if i + 1 < grid_n && gs[i] * gs[i + 1] < 0.0 && gs[i].abs() >= tol && gs[i + 1].abs() >= tol {
            let (root, steps) = bisect_g(params, grid[i], grid[i + 1], gs[i], tol)?;
            found.push(root);
            iterations_used.push((grid[i], steps));
        }
    }
    found.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut roots: Vec<f64> = Vec::new();
    for m in found {
        match roots.last() {
            Some(&last) if (m - last).abs() < 10.0 * tol => {}
            _ => roots.push(m),
        }
    }
    let roots = roots
        .into_iter()
        .map(|m| {
            let fp = f_prime(params, m, DEFAULT_TOL)?;
            Ok(FixedPoint {
                m,
                f_prime_at_m: fp,
                stable: fp < 1.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FixedPointReport {
        sigma: params.sigma,
        roots,
        iterations_used,
        tolerance: tol,
        warnings,
    })
}

/// Largest fixed point in `(floor, m_max]`, found by scanning `g` from the
/// top down and bisecting the first sign change.
pub fn largest_fixed_point_above(
    params: &ModelParams,
    floor: f64,
    m_max: f64,
    grid_n: usize,
    tol: f64,
) -> Result<Option<f64>> {
    let grid: Vec<f64> = (0..grid_n)
        .map(|i| floor + (m_max - floor) * i as f64 / (grid_n - 1) as f64)
        .collect();
    let gs: Vec<f64> = grid.par_iter().map(|&m| g(params, m)).collect::<Result<_>>()?;
    for i in (0..grid_n - 1).rev() {
        if gs[i + 1].abs() < tol && i + 1 > 0 {
            return Ok(Some(grid[i + 1]));
        }
        if gs[i] * gs[i + 1] < 0.0 {
            return bisect_g(params, grid[i], grid[i + 1], gs[i], tol).map(|(m, _)| Some(m));
        }
    }
    Ok(None)
}

/// `f^{-1}(y)`: expanding bracket around `y` then bisection, using that `f`
/// is an increasing bijection of the real line.
pub fn f_inverse(params: &ModelParams, y: f64, tol: f64) -> Result<f64> {
    let qtol = DEFAULT_TOL.min(tol * 1e-2);
    let h = |m: f64| -> Result<f64> { Ok(f_of_m(params, m, qtol)? - y) };
    let mut lo = y - 1.0;
    let mut hi = y + 1.0;
    let mut hlo = h(lo)?;
    let mut width = 1.0;
    while hlo > 0.0 {
        width *= 2.0;
        lo = y - width;
        if lo.abs() > BRACKET_LIMIT {
            return Err(Error::BracketNotFound {
                target: y,
                limit: BRACKET_LIMIT,
            });
        }
        hlo = h(lo)?;
    }
    let mut hhi = h(hi)?;
    width = 1.0;
    while hhi < 0.0 {
        width *= 2.0;
        hi = y + width;
        if hi.abs() > BRACKET_LIMIT {
            return Err(Error::BracketNotFound {
                target: y,
                limit: BRACKET_LIMIT,
            });
        }
        hhi = h(hi)?;
    }
    if hlo.abs() < tol {
        return Ok(lo);
    }
    if hhi.abs() < tol {
        return Ok(hi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let hm = h(mid)?;
        if hm.abs() < tol || hi - lo < 4.0 * f64::EPSILON * (1.0 + mid.abs()) {
            return Ok(mid);
        }
        if hm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bisection in `sigma` on the predicate "the largest fixed point exceeds
/// 1e-4". Returns the midpoint of the final bracket of width `< tol`.
pub fn critical_sigma(template: &ModelParams, sigma_lo: f64, sigma_hi: f64, tol: f64) -> Result<f64> {
    let broken = |sigma: f64| -> Result<bool> {
        let p = template.with_sigma(sigma);
        Ok(largest_fixed_point_above(&p, BRANCH_THRESHOLD, DEFAULT_M_MAX, 128, 1e-12)?.is_some())
    };
    if !(sigma_lo > 0.0 && sigma_hi > sigma_lo) {
        return Err(Error::PredicateNotBracketed(format!(
            "need 0 < sigma_lo < sigma_hi (got {sigma_lo}, {sigma_hi})"
        )));
    }
    if !broken(sigma_lo)? {
        return Err(Error::PredicateNotBracketed(format!(
            "no non-zero fixed point at sigma_lo = {sigma_lo}"
        )));
    }
    if broken(sigma_hi)? {
        return Err(Error::PredicateNotBracketed(format!(
            "non-zero fixed point still present at sigma_hi = {sigma_hi}"
        )));
    }
    let (mut lo, mut hi) = (sigma_lo, sigma_hi);
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        if broken(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    NoConvergence,
}

impl RowStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::NoConvergence => "no_convergence",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseRow {
    pub sigma: f64,
    pub m_plus: f64,
    pub m_minus: f64,
    pub status: RowStatus,
}

/// Stationary means as a function of `sigma`, by iterating `f` from `+1` and
/// `-1` until two consecutive iterates differ by less than `tol` (the figure
/// uses `1e-5`). Rows are computed in parallel; output order follows the grid.
pub fn phase_diagram(template: &ModelParams, sigma_grid: &[f64], tol: f64) -> Result<Vec<PhaseRow>> {
    sigma_grid
        .par_iter()
        .map(|&sigma| {
            let p = template.with_sigma(sigma);
            let plus = iterate_to_fixed_point(&p, 1.0, tol, DEFAULT_MAX_ITER);
            let minus = iterate_to_fixed_point(&p, -1.0, tol, DEFAULT_MAX_ITER);
            let mut status = RowStatus::Ok;
            let mut value = |r: Result<(f64, usize)>| -> Result<f64> {
                match r {
                    Ok((m, _)) => Ok(m),
                    Err(Error::NoConvergence { .. }) => {
                        status = RowStatus::NoConvergence;
                        Ok(f64::NAN)
                    }
                    Err(e) => Err(e),
                }
            };
            let m_plus = value(plus)?;
            let m_minus = value(minus)?;
            Ok(PhaseRow {
                sigma,
                m_plus,
                m_minus,
                status,
            })
        })
        .collect()
}

/// Formats with 9 significant digits, shortest round-trip representation.
pub fn fmt_sig9(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.8e}").parse().unwrap();
    format!("{rounded}")
}

/// CSV with header `sigma,m_plus,m_minus,status`.
pub fn phase_diagram_csv(rows: &[PhaseRow]) -> String {
    let mut out = String::from("sigma,m_plus,m_minus,status\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_sig9(r.sigma),
            fmt_sig9(r.m_plus),
            fmt_sig9(r.m_minus),
            r.status.as_str()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iteration_above_critical_goes_to_zero() {
        let p = ModelParams::double_well(0.8);
        let (m, _) = iterate_to_fixed_point(&p, 1.0, 1e-8, DEFAULT_MAX_ITER).unwrap();
        assert!(m.abs() < 1e-4);
    }

    #[test]
    fn iteration_below_critical_is_symmetric() {
        let p = ModelParams::double_well(0.5);
        let (mp, _) = iterate_to_fixed_point(&p, 1.0, 1e-12, DEFAULT_MAX_ITER).unwrap();
        let (mm, _) = iterate_to_fixed_point(&p, -1.0, 1e-12, DEFAULT_MAX_ITER).unwrap();
        assert!(mp > 0.5);
        assert!((f_of_m(&p, mp, DEFAULT_TOL).unwrap() - mp).abs() < 1e-8);
        assert!((mp + mm).abs() < 1e-8);
    }

    #[test]
    fn iteration_budget_is_enforced() {
        let p = ModelParams::double_well(0.5);
        let err = iterate_to_fixed_point(&p, 3.0, 1e-14, 2).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { max_iter: 2, .. }));
    }

    #[test]
    fn three_roots_below_one_above() {
        let p = ModelParams::double_well(0.5);
        let rep = find_all_fixed_points(&p, DEFAULT_M_MAX, DEFAULT_GRID_N, 1e-10).unwrap();
        assert_eq!(rep.roots.len(), 3, "{:?}", rep.roots);
        let stab: Vec<bool> = rep.roots.iter().map(|r| r.stable).collect();
        assert_eq!(stab, vec![true, false, true]);
        assert!(rep.roots[1].m.abs() < 1e-9);
        assert!((rep.roots[0].m + rep.roots[2].m).abs() < 1e-8);
        for r in &rep.roots {
            assert!((f_of_m(&p, r.m, DEFAULT_TOL).unwrap() - r.m).abs() < 1e-10);
        }
        let (it, _) = iterate_to_fixed_point(&p, 1.0, 1e-12, DEFAULT_MAX_ITER).unwrap();
        assert!((it - rep.roots[2].m).abs() < 1e-6);

        let p = ModelParams::double_well(0.8);
        let rep = find_all_fixed_points(&p, DEFAULT_M_MAX, DEFAULT_GRID_N, 1e-10).unwrap();
        assert_eq!(rep.roots.len(), 1);
        assert!(rep.roots[0].m.abs() < 1e-9);
        assert!(rep.roots[0].stable);
        assert!(rep.warnings.is_empty());
    }

    #[test]
    fn inverse_round_trip() {
        let p = ModelParams::double_well(0.5);
        let y = f_of_m(&p, 0.7, DEFAULT_TOL).unwrap();
        assert!((f_inverse(&p, y, 1e-12).unwrap() - 0.7).abs() < 1e-8);
        assert!(f_inverse(&p, 0.0, 1e-12).unwrap().abs() < 1e-8);
        let (mp, _) = iterate_to_fixed_point(&p, 1.0, 1e-13, DEFAULT_MAX_ITER).unwrap();
        assert!((f_inverse(&p, mp, 1e-12).unwrap() - mp).abs() < 1e-8);
    }

    #[test]
    fn inverse_outside_range_fails() {
        // f is bounded on |m| <= 1e6 by roughly (1e6)^(1/3)
        let p = ModelParams::double_well(0.5);
        let err = f_inverse(&p, 500.0, 1e-10).unwrap_err();
        assert!(matches!(err, Error::BracketNotFound { .. }));
    }

    #[test]
    fn critical_sigma_bracket_errors() {
        let p = ModelParams::double_well(0.5);
        assert!(matches!(
            critical_sigma(&p, 0.8, 0.9, 1e-3),
            Err(Error::PredicateNotBracketed(_))
        ));
        assert!(matches!(
            critical_sigma(&p, 0.3, 0.5, 1e-3),
            Err(Error::PredicateNotBracketed(_))
        ));
    }

    #[test]
    fn phase_rows_are_symmetric() {
        let p = ModelParams::double_well(0.5);
        let rows = phase_diagram(&p, &[0.1, 0.5, 0.8], FIGURE_ITERATION_TOL).unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert_eq!(r.status, RowStatus::Ok);
            assert!((r.m_plus + r.m_minus).abs() < 1e-8);
        }
        assert!(rows[0].m_plus > 0.9 && rows[0].m_plus < 1.1);
        assert!(rows[2].m_plus.abs() < 1e-3);
        let csv = phase_diagram_csv(&rows);
        assert!(csv.starts_with("sigma,m_plus,m_minus,status\n0.1,"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn sig9_formatting() {
        assert_eq!(fmt_sig9(0.123456789123), "0.123456789");
        assert_eq!(fmt_sig9(0.5), "0.5");
        assert_eq!(fmt_sig9(1234567891234.0), "1234567890000");
        assert_eq!(fmt_sig9(f64::NAN), "NaN");
    }
}
