//! Exact partial sums of f, the large-prime/smooth decomposition, the
//! smooth-sum filter set, and a Parseval identity check.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::primes::PrimeTable;
use crate::rmf::{self, RmfSample};
use crate::util::{Compensated, CompensatedComplex};

/// Sample points x on which partial sums are evaluated. The canonical grid
/// is x_r = X^{8/7} e^{2 pi r} for integer r in [0, 2 log X / (21 pi)], which
/// keeps every point inside [X^{8/7}, X^{4/3}].
#[derive(Clone, Debug)]
pub struct XGrid {
    x_anchor: f64,
    r_values: Vec<i64>,
    points: Vec<f64>,
}

impl XGrid {
    /// The integer-r grid; at desk-scale anchors this can be a single point.
    pub fn paper(x_anchor: f64) -> Result<Self> {
        if x_anchor <= 1.0 {
            return Err(Error::Precondition(format!("x anchor {x_anchor} <= 1")));
        }
        let r_max = (2.0 * x_anchor.ln() / (21.0 * std::f64::consts::PI)).floor() as i64;
        let base = x_anchor.powf(8.0 / 7.0);
        let mut r_values = Vec::new();
        let mut points = Vec::new();
        for r in 0..=r_max.max(0) {
            r_values.push(r);
            points.push(base * (2.0 * std::f64::consts::PI * r as f64).exp());
        }
        Ok(XGrid {
            x_anchor,
            r_values,
            points,
        })
    }

    /// Geometric grid of `count` points spanning [lo, hi]; r is the index.
    pub fn geometric(x_anchor: f64, lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count == 0 || lo <= 0.0 || hi < lo {
            return Err(Error::Precondition(format!(
                "bad geometric grid: lo={lo} hi={hi} count={count}"
            )));
        }
        let points = if count == 1 {
            vec![lo]
        } else {
            (0..count)
                .map(|i| {
                    let s = i as f64 / (count - 1) as f64;
                    (lo.ln() + s * (hi.ln() - lo.ln())).exp()
                })
                .collect()
        };
        Ok(XGrid {
            x_anchor,
            r_values: (0..count as i64).collect(),
            points,
        })
    }

    /// The paper range [X^{8/7}, X^{4/3}] sampled at `count` geometric points.
    pub fn paper_range(x_anchor: f64, count: usize) -> Result<Self> {
        let lo = x_anchor.powf(8.0 / 7.0);
        let hi = x_anchor.powf(4.0 / 3.0);
        Self::geometric(x_anchor, lo, hi, count)
    }

    pub fn from_points(x_anchor: f64, points: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition(
                "grid points must be nonempty and strictly increasing".into(),
            ));
        }
        Ok(XGrid {
            x_anchor,
            r_values: (0..points.len() as i64).collect(),
            points,
        })
    }

    pub fn x_anchor(&self) -> f64 {
        self.x_anchor
    }

    pub fn r_values(&self) -> &[i64] {
        &self.r_values
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_point(&self) -> f64 {
        *self.points.last().unwrap()
    }
}

/// Exact partial sums on a grid: totals, X-smooth parts, and the
/// large-prime double-sum parts, each computed by an independent route.
#[derive(Clone, Debug)]
pub struct PartialSumSeries {
    pub grid: XGrid,
    pub totals: Vec<Complex64>,
    pub smooth_parts: Vec<Complex64>,
    pub large_prime_parts: Vec<Complex64>,
}

/// The random set of admitted grid indices whose smooth sums stay below
/// sqrt(x_r) (loglog X)^threshold_exponent.
#[derive(Clone, Debug)]
pub struct SmoothFilter {
    pub threshold_exponent: f64,
    pub admitted_r: Vec<i64>,
    pub total_r: usize,
}

impl SmoothFilter {
    pub fn admitted_fraction(&self) -> f64 {
        if self.total_r == 0 {
            return 0.0;
        }
        self.admitted_r.len() as f64 / self.total_r as f64
    }
}

/// Prefix sums S(k) = sum_{m<=k} f(m) for k = 0..=upto, compensated.
pub fn prefix_sums(sample: &RmfSample, upto: usize) -> Result<Vec<Complex64>> {
    let vt = rmf::values_up_to(sample, upto)?;
    let mut out = Vec::with_capacity(upto + 1);
    let mut acc = CompensatedComplex::new();
    out.push(Complex64::new(0.0, 0.0));
    for n in 1..=upto {
        acc.add(vt.value(n));
        out.push(acc.value());
    }
    Ok(out)
}

/// One pass over a value table, accumulating totals and X-smooth totals with
/// snapshots at each grid point; the large-prime part is assembled separately
/// from prefix smooth sums so the decomposition identity is a real check.
pub fn partial_sums(
    sample: &RmfSample,
    grid: &XGrid,
    table: &PrimeTable,
) -> Result<PartialSumSeries> {
    let x_split = grid.x_anchor();
    let n_max = grid.max_point().floor() as usize;
    if n_max > table.limit() {
        return Err(Error::Range(format!(
            "grid needs n up to {n_max}, table limit {}",
            table.limit()
        )));
    }
    let vt = rmf::values_up_to(sample, n_max)?;

    // totals and smooth parts in one enumeration pass
    let mut totals = Vec::with_capacity(grid.len());
    let mut smooth_parts = Vec::with_capacity(grid.len());
    let mut total_acc = CompensatedComplex::new();
    let mut smooth_acc = CompensatedComplex::new();
    let mut smooth = vec![false; n_max + 1];
    if n_max >= 1 {
        smooth[1] = true;
    }
    let mut next = 0usize;
    for n in 1..=n_max {
        if n >= 2 {
            let p = table.spf(n) as usize;
            smooth[n] = (p as f64) <= x_split && smooth[n / p];
        }
        let v = vt.value(n);
        total_acc.add(v);
        if smooth[n] {
            smooth_acc.add(v);
        }
        while next < grid.len() && (n + 1) as f64 > grid.points()[next] {
            totals.push(total_acc.value());
            smooth_parts.push(smooth_acc.value());
            next += 1;
        }
    }
    while next < grid.len() {
        totals.push(total_acc.value());
        smooth_parts.push(smooth_acc.value());
        next += 1;
    }

    // large-prime part: sum over X < p <= x of f(p) * S(x/p), with the
    // prefix sums S over m < X precomputed once (m < X is automatically
    // X-smooth)
    let prefix_len = (grid.max_point() / x_split).floor() as usize + 1;
    let prefix = prefix_sums(sample, prefix_len.min(n_max))?;
    let large_prime_parts = crate::parallel::try_map_indexed(grid.len(), |i| {
        let x = grid.points()[i];
        let ps = table.primes_in(x_split, x.min(table.limit() as f64))?;
        let mut acc = CompensatedComplex::new();
        for &p in ps {
            let idx = (x / p as f64).floor() as usize;
            if idx == 0 {
                continue;
            }
            acc.add(sample.prime_value_of(p as usize)? * prefix[idx]);
        }
        Ok(acc.value())
    })?;

    Ok(PartialSumSeries {
        grid: grid.clone(),
        totals,
        smooth_parts,
        large_prime_parts,
    })
}

/// Direct sum of f(n) over X-smooth n <= x.
pub fn smooth_sum(sample: &RmfSample, x: f64, x_split: f64, table: &PrimeTable) -> Result<Complex64> {
    let n_max = x.floor() as usize;
    if n_max > table.limit() {
        return Err(Error::Range(format!(
            "x = {x} exceeds table limit {}",
            table.limit()
        )));
    }
    if n_max == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let vt = rmf::values_up_to(sample, n_max)?;
    let mut smooth = vec![false; n_max + 1];
    smooth[1] = true;
    let mut acc = CompensatedComplex::new();
    acc.add(vt.value(1));
    for n in 2..=n_max {
        let p = table.spf(n) as usize;
        smooth[n] = (p as f64) <= x_split && smooth[n / p];
        if smooth[n] {
            acc.add(vt.value(n));
        }
    }
    Ok(acc.value())
}

/// Admit the grid indices whose smooth sums pass the threshold rule.
pub fn select_r(series: &PartialSumSeries, threshold_exponent: f64) -> Result<SmoothFilter> {
    let x_anchor = series.grid.x_anchor();
    if x_anchor <= std::f64::consts::E {
        return Err(Error::Precondition(format!(
            "select_r needs loglog X > 0, got X = {x_anchor}"
        )));
    }
    let loglog = x_anchor.ln().ln();
    let mut admitted = Vec::new();
    for (i, &r) in series.grid.r_values().iter().enumerate() {
        let x = series.grid.points()[i];
        let threshold = x.sqrt() * loglog.powf(threshold_exponent);
        if series.smooth_parts[i].norm() < threshold {
            admitted.push(r);
        }
    }
    Ok(SmoothFilter {
        threshold_exponent,
        admitted_r: admitted,
        total_r: series.grid.len(),
    })
}

/// Both sides of the Parseval identity for a finite coefficient sequence
/// a_1..a_K (dense from n = 1):
/// lhs = int_0^inf |sum_{n<=x} a_n|^2 x^{-1-2 sigma} dx, piecewise exact;
/// rhs = (1/2 pi) int_{-T}^{T} |A(sigma+it)/(sigma+it)|^2 dt by Simpson,
/// with a closed-form bound on the discarded |t| > T tail.
#[derive(Clone, Copy, Debug)]
pub struct ParsevalCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub tail_bound: f64,
}

pub fn parseval_residual(coefficients: &[Complex64], sigma: f64, t_height: f64) -> Result<ParsevalCheck> {
    if sigma <= 0.0 {
        return Err(Error::Precondition(format!("sigma must be > 0, got {sigma}")));
    }
    if coefficients.is_empty() {
        return Err(Error::Precondition("empty coefficient sequence".into()));
    }
    let k_max = coefficients.len();

    // lhs: the inner sum is a step function, constant on [n, n+1), so each
    // interval contributes |S_n|^2 (n^{-2s} - (n+1)^{-2s}) / (2s) exactly;
    // beyond the support the constant tail integrates in closed form.
    let two_sigma = 2.0 * sigma;
    let mut prefix = Complex64::new(0.0, 0.0);
    let mut lhs = Compensated::new();
    for (i, &a) in coefficients.iter().enumerate() {
        let n = (i + 1) as f64;
        prefix += a;
        let upper = if i + 1 == k_max {
            0.0
        } else {
            (n + 1.0).powf(-two_sigma)
        };
        lhs.add(prefix.norm_sqr() * (n.powf(-two_sigma) - upper) / two_sigma);
    }

    // rhs by composite Simpson; the fastest oscillation frequency is
    // log k_max, and the 1/|s|^2 factor varies on scale sigma.
    let max_log = (k_max as f64).ln().max(1e-9);
    let step = (1.0 / (4.0 * max_log)).min(sigma / 4.0).min(0.1);
    let m = ((2.0 * t_height / step).ceil() as usize).next_multiple_of(2);
    let h = 2.0 * t_height / m as f64;
    let lns: Vec<f64> = (1..=k_max).map(|n| (n as f64).ln()).collect();
    let eval = |t: f64| -> f64 {
        let mut a = CompensatedComplex::new();
        for (i, &c) in coefficients.iter().enumerate() {
            a.add(c * Complex64::new(0.0, -t * lns[i]).exp() * (-sigma * lns[i]).exp());
        }
        let s = Complex64::new(sigma, t);
        a.value().norm_sqr() / s.norm_sqr()
    };
    let values = crate::parallel::map_indexed(m + 1, |k| eval(-t_height + k as f64 * h));
    let mut acc = Compensated::new();
    acc.add(values[0]);
    acc.add(values[m]);
    for (k, &v) in values.iter().enumerate().take(m).skip(1) {
        acc.add(if k % 2 == 1 { 4.0 * v } else { 2.0 * v });
    }
    let rhs = acc.value() * h / 3.0 / (2.0 * std::f64::consts::PI);

    let a_bound: f64 = coefficients
        .iter()
        .enumerate()
        .map(|(i, c)| c.norm() * ((i + 1) as f64).powf(-sigma))
        .sum();
    let tail_bound = a_bound * a_bound / (std::f64::consts::PI * t_height);

    Ok(ParsevalCheck {
        lhs: lhs.value(),
        rhs,
        tail_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::PrimeTable;
    use crate::rmf::{sample_model, ModelKind, RmfSample};
    use crate::rng::CounterRng;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn arc_table(limit: usize) -> Arc<PrimeTable> {
        Arc::new(PrimeTable::build(limit).unwrap())
    }

    #[test]
    fn paper_grid_stays_in_band() {
        let g = XGrid::paper(1.0e6).unwrap();
        assert!(g.len() >= 1);
        let lo = 1.0e6f64.powf(8.0 / 7.0);
        let hi = 1.0e6f64.powf(4.0 / 3.0);
        for &x in g.points() {
            assert!(x >= lo * 0.999 && x <= hi * 1.001);
        }
        for w in g.points().windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn degenerate_total_counts_integers() {
        let t = arc_table(3000);
        let ones = RmfSample::degenerate_ones(Arc::clone(&t), 3000).unwrap();
        let grid = XGrid::from_points(50.0, vec![100.5]).unwrap();
        let s = partial_sums(&ones, &grid, &t).unwrap();
        assert_eq!(s.totals[0], Complex64::new(100.0, 0.0));
    }

    #[test]
    fn degenerate_moebius_total_is_mertens_function() {
        let t = arc_table(3000);
        let moeb = RmfSample::degenerate_moebius(Arc::clone(&t), 3000).unwrap();
        let grid = XGrid::from_points(5.0, vec![10.0]).unwrap();
        let s = partial_sums(&moeb, &grid, &t).unwrap();
        assert_eq!(s.totals[0], Complex64::new(-1.0, 0.0)); // M(10) = -1
    }

    #[test]
    fn decomposition_identity_within_tolerance() {
        let t = arc_table(3000);
        let grid = XGrid::geometric(50.0, 60.0, 2000.0, 12).unwrap();
        for kind in [ModelKind::Steinhaus, ModelKind::Rademacher] {
            let s = sample_model(kind, 31, 3000, &t).unwrap();
            let series = partial_sums(&s, &grid, &t).unwrap();
            for i in 0..grid.len() {
                let resid =
                    (series.totals[i] - series.smooth_parts[i] - series.large_prime_parts[i]).norm();
                assert!(
                    resid <= 1e-9 * (1.0 + series.totals[i].norm()),
                    "{kind:?} x={} resid={resid}",
                    grid.points()[i]
                );
            }
        }
    }

    #[test]
    fn decomposition_against_independent_enumeration() {
        // brute-force the large-prime part as a double sum over (p, m)
        let t = arc_table(2100);
        let s = sample_model(ModelKind::Steinhaus, 7, 2100, &t).unwrap();
        let grid = XGrid::from_points(50.0, vec![2000.0]).unwrap();
        let series = partial_sums(&s, &grid, &t).unwrap();
        let mut brute = Complex64::new(0.0, 0.0);
        for &p in t.primes_in(50.0, 2000.0).unwrap() {
            let inner_limit = (2000.0 / p as f64).floor() as usize;
            let mut inner = Complex64::new(0.0, 0.0);
            for m in 1..=inner_limit {
                inner += crate::rmf::value_at(&s, m).unwrap();
            }
            brute += s.prime_value_of(p as usize).unwrap() * inner;
        }
        assert!((series.large_prime_parts[0] - brute).norm() < 1e-9);
    }

    #[test]
    fn prefix_consistency() {
        let t = arc_table(3000);
        let s = sample_model(ModelKind::Rademacher, 11, 3000, &t).unwrap();
        let grid = XGrid::from_points(50.0, vec![500.0, 1500.0]).unwrap();
        let series = partial_sums(&s, &grid, &t).unwrap();
        let mut diff = Complex64::new(0.0, 0.0);
        for n in 501..=1500 {
            diff += crate::rmf::value_at(&s, n).unwrap();
        }
        assert!((series.totals[1] - series.totals[0] - diff).norm() < 1e-9);
    }

    #[test]
    fn totals_bounded_by_x() {
        let t = arc_table(3000);
        let s = sample_model(ModelKind::Steinhaus, 13, 3000, &t).unwrap();
        let grid = XGrid::geometric(50.0, 100.0, 2500.0, 8).unwrap();
        let series = partial_sums(&s, &grid, &t).unwrap();
        for (i, &x) in grid.points().iter().enumerate() {
            assert!(series.totals[i].norm() <= x);
        }
        let ones = RmfSample::degenerate_ones(Arc::clone(&t), 3000).unwrap();
        let series = partial_sums(&ones, &grid, &t).unwrap();
        for (i, &x) in grid.points().iter().enumerate() {
            assert_eq!(series.totals[i].norm(), x.floor());
        }
    }

    #[test]
    fn smooth_sum_examples() {
        let t = arc_table(3000);
        let ones = RmfSample::degenerate_ones(Arc::clone(&t), 3000).unwrap();
        // X >= x: the full partial sum
        assert_eq!(
            smooth_sum(&ones, 10.0, 10.0, &t).unwrap(),
            Complex64::new(10.0, 0.0)
        );
        // 2-smooth n <= 10: 1, 2, 4, 8
        assert_eq!(
            smooth_sum(&ones, 10.0, 2.0, &t).unwrap(),
            Complex64::new(4.0, 0.0)
        );
        // 3-smooth squarefree: mu(1)+mu(2)+mu(3)+mu(6) = 0
        let moeb = RmfSample::degenerate_moebius(Arc::clone(&t), 3000).unwrap();
        assert_eq!(
            smooth_sum(&moeb, 10.0, 3.0, &t).unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn smooth_part_matches_direct_smooth_sum() {
        let t = arc_table(3000);
        let s = sample_model(ModelKind::Steinhaus, 5, 3000, &t).unwrap();
        let grid = XGrid::from_points(30.0, vec![700.0]).unwrap();
        let series = partial_sums(&s, &grid, &t).unwrap();
        let direct = smooth_sum(&s, 700.0, 30.0, &t).unwrap();
        assert!((series.smooth_parts[0] - direct).norm() < 1e-10);
    }

    #[test]
    fn select_r_threshold_extremes() {
        let t = arc_table(3000);
        let s = sample_model(ModelKind::Steinhaus, 21, 3000, &t).unwrap();
        let grid = XGrid::geometric(50.0, 100.0, 2000.0, 6).unwrap();
        let series = partial_sums(&s, &grid, &t).unwrap();
        // huge exponent admits everything ((loglog 50)^300 is astronomical)
        let all = select_r(&series, 300.0).unwrap();
        assert_eq!(all.admitted_r.len(), 6);
        // the all-ones sample's smooth sums are Psi(x, X) > sqrt(x) (loglog X)^0.01
        let ones = RmfSample::degenerate_ones(Arc::clone(&t), 3000).unwrap();
        let series = partial_sums(&ones, &grid, &t).unwrap();
        for (i, &x) in grid.points().iter().enumerate() {
            let psi = series.smooth_parts[i].re;
            let count = t.smooth_count(x.floor() as usize, 50).unwrap() as f64;
            assert_eq!(psi, count);
            assert!(psi > x.sqrt() * 50f64.ln().ln().powf(0.01));
        }
        let none = select_r(&series, 0.01).unwrap();
        assert!(none.admitted_r.is_empty());
    }

    #[test]
    fn parseval_trivial_cases() {
        // a_1 = 1, sigma = 1/2: lhs = 1 exactly, rhs -> 1 as T -> inf
        let one = [Complex64::new(1.0, 0.0)];
        let c = parseval_residual(&one, 0.5, 1000.0).unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-12);
        assert!(c.rhs >= 0.999 && c.rhs <= 1.0);
        // sigma = 1: lhs = int_1^inf x^{-3} = 1/2
        let c = parseval_residual(&one, 1.0, 100.0).unwrap();
        assert!((c.lhs - 0.5).abs() < 1e-12);
    }

    #[test]
    fn parseval_random_coefficients() {
        let mut rng = CounterRng::new(60, 0);
        let coeffs: Vec<Complex64> = (0..50)
            .map(|_| {
                let phi = 2.0 * std::f64::consts::PI * rng.next_f64();
                Complex64::new(phi.cos(), phi.sin())
            })
            .collect();
        let c = parseval_residual(&coeffs, 0.5, 10_000.0).unwrap();
        assert!(
            (c.lhs - c.rhs).abs() / c.lhs <= 0.01,
            "lhs={} rhs={} tail={}",
            c.lhs,
            c.rhs,
            c.tail_bound
        );
    }

    #[test]
    fn parseval_lhs_partition_refinement_invariant() {
        // recomputing the piecewise-exact lhs on a partition refined at
        // half-integers changes nothing: the step function is constant there
        let mut rng = CounterRng::new(61, 0);
        let coeffs: Vec<Complex64> = (0..20)
            .map(|_| Complex64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5))
            .collect();
        let sigma = 0.7;
        let two_sigma = 2.0 * sigma;
        let base = parseval_residual(&coeffs, sigma, 10.0).unwrap().lhs;
        let mut refined = 0.0;
        let mut prefix = Complex64::new(0.0, 0.0);
        for (i, &a) in coeffs.iter().enumerate() {
            let n = (i + 1) as f64;
            prefix += a;
            let upper = if i + 1 == coeffs.len() {
                0.0
            } else {
                (n + 1.0).powf(-two_sigma)
            };
            let mid = (n + 0.5).powf(-two_sigma);
            refined += prefix.norm_sqr() * (n.powf(-two_sigma) - mid) / two_sigma;
            refined += prefix.norm_sqr() * (mid - upper) / two_sigma;
        }
        assert!((base - refined).abs() <= 1e-12 * base.abs().max(1.0));
    }

    #[test]
    fn parseval_rejects_nonpositive_sigma() {
        let one = [Complex64::new(1.0, 0.0)];
        assert!(parseval_residual(&one, 0.0, 10.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn decomposition_identity_random_seeds(seed in 0u64..500, kind_sel in 0u8..2) {
            let t = arc_table(2600);
            let kind = if kind_sel == 0 { ModelKind::Steinhaus } else { ModelKind::Rademacher };
            let s = sample_model(kind, seed, 2600, &t).unwrap();
            let grid = XGrid::geometric(50.0, 60.0, 2500.0, 5).unwrap();
            let series = partial_sums(&s, &grid, &t).unwrap();
            for i in 0..grid.len() {
                let resid = (series.totals[i] - series.smooth_parts[i] - series.large_prime_parts[i]).norm();
                prop_assert!(resid <= 1e-9 * (1.0 + series.totals[i].norm()));
            }
        }
    }
}
