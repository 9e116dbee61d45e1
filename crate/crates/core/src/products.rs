//! Random Euler products F_j(s), closed-form mixed-moment expectations with
//! explicit error radii, an exact per-prime expectation oracle, and Monte
//! Carlo estimates of the same moments.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::primes::PrimeTable;
use crate::rmf::{self, ModelKind, RmfSample};
use crate::util::{pairwise_sum, Compensated, CompensatedComplex};

/// Mixed-moment specification: E prod_j |1 -+ f(p) p^{-1/2-sigma-i t_j}|^{-+2 alpha_j}
/// over the prime window (x, y].
#[derive(Clone, Debug)]
pub struct MomentSpec {
    pub alphas: Vec<f64>,
    pub ts: Vec<f64>,
    pub sigma: f64,
    pub window: (f64, f64),
}

impl MomentSpec {
    pub fn new(alphas: Vec<f64>, ts: Vec<f64>, sigma: f64, window: (f64, f64)) -> Result<Self> {
        if alphas.is_empty() || alphas.len() != ts.len() {
            return Err(Error::Precondition(
                "alphas and ts must be nonempty and equal length".into(),
            ));
        }
        let (x, y) = window;
        if !(2.0 <= x && x <= y) {
            return Err(Error::Precondition(format!("bad prime window ({x}, {y}]")));
        }
        if sigma < -1.0 / y.ln() {
            return Err(Error::Precondition(format!(
                "sigma = {sigma} below -1/log y = {}",
                -1.0 / y.ln()
            )));
        }
        Ok(MomentSpec {
            alphas,
            ts,
            sigma,
            window,
        })
    }

    pub fn k(&self) -> usize {
        self.alphas.len()
    }

    pub fn alpha_sum(&self) -> f64 {
        self.alphas.iter().map(|a| a.abs()).sum()
    }

    /// M = max(sum |alpha|, (sum |alpha|)^3), the error-radius scale.
    pub fn m_constant(&self) -> f64 {
        let s = self.alpha_sum();
        s.max(s * s * s)
    }
}

/// log F_j(1/2 + sigma + i t): the sum over p <= X^{exp(-j)} of the
/// principal-branch factor logarithm. Every factor satisfies
/// |f(p) p^{-s}| < 1, so each lies in the right half-plane.
pub fn log_euler_product(
    sample: &RmfSample,
    sigma: f64,
    t: f64,
    level: u32,
    x_anchor: f64,
    table: &PrimeTable,
) -> Result<Complex64> {
    if 0.5 + sigma <= 0.0 {
        return Err(Error::Precondition(format!(
            "sigma = {sigma} makes factor modulus >= 1"
        )));
    }
    let cutoff = level_cutoff(x_anchor, level);
    if cutoff > table.limit() as f64 {
        return Err(Error::Range(format!(
            "product cutoff {cutoff} exceeds table limit {}",
            table.limit()
        )));
    }
    if cutoff > sample.prime_limit() as f64 {
        return Err(Error::Coverage(format!(
            "product cutoff {cutoff} beyond sample coverage {}",
            sample.prime_limit()
        )));
    }
    let mut acc = CompensatedComplex::new();
    let rademacher = sample.kind() == ModelKind::Rademacher;
    for (i, &p) in table.primes().iter().enumerate() {
        if p as f64 > cutoff {
            break;
        }
        let lp = (p as f64).ln();
        let z = sample.value_by_index(i) * (-(0.5 + sigma + 0.0) * lp).exp()
            * Complex64::new(0.0, -t * lp).exp();
        if rademacher {
            acc.add((Complex64::new(1.0, 0.0) + z).ln());
        } else {
            acc.add(-((Complex64::new(1.0, 0.0) - z).ln()));
        }
    }
    Ok(acc.value())
}

/// Prime cutoff X^{exp(-j)} for level j.
pub fn level_cutoff(x_anchor: f64, level: u32) -> f64 {
    x_anchor.powf((-(level as f64)).exp())
}

/// log F_j(1/2 + sigma + i t) over a t-grid and a ladder of levels,
/// computed incrementally: coarser levels are obtained from finer ones by
/// subtracting the factors of the primes between the two cutoffs, in fixed
/// descending-prime order. Each prime is touched exactly once per t.
pub struct EulerGrid {
    pub sigma: f64,
    pub t_grid: Vec<f64>,
    pub levels: Vec<u32>,
    pub x_anchor: f64,
    log_values: Vec<Complex64>, // [level_idx * t_len + t_idx]
}

impl EulerGrid {
    pub fn log_value(&self, level_idx: usize, t_idx: usize) -> Complex64 {
        self.log_values[level_idx * self.t_grid.len() + t_idx]
    }

    /// |F_j| at a grid node, from the stored logarithm.
    pub fn modulus(&self, level_idx: usize, t_idx: usize) -> f64 {
        self.log_value(level_idx, t_idx).re.exp()
    }

    pub fn find_level(&self, level: u32) -> Option<usize> {
        self.levels.iter().position(|&l| l == level)
    }

    pub fn find_t(&self, t: f64) -> Option<usize> {
        self.t_grid.iter().position(|&u| (u - t).abs() <= 1e-12)
    }
}

pub fn evaluate_grid(
    sample: &RmfSample,
    sigma: f64,
    t_grid: &[f64],
    levels: &[u32],
    x_anchor: f64,
    table: &PrimeTable,
) -> Result<EulerGrid> {
    if t_grid.is_empty() || levels.is_empty() {
        return Err(Error::Precondition("empty grid or level list".into()));
    }
    if t_grid.len().saturating_mul(levels.len()) > (1 << 26) {
        return Err(Error::Capacity {
            what: "euler grid",
            requested: t_grid.len() * levels.len(),
            budget: 1 << 26,
        });
    }
    if 0.5 + sigma <= 0.0 {
        return Err(Error::Precondition(format!("sigma = {sigma} too negative")));
    }
    let mut order: Vec<usize> = (0..levels.len()).collect();
    order.sort_by_key(|&i| levels[i]); // ascending level = descending cutoff
    let finest = levels[order[0]];
    let finest_cut = level_cutoff(x_anchor, finest);
    if finest_cut > sample.prime_limit() as f64 {
        return Err(Error::Coverage(format!(
            "level {finest} cutoff {finest_cut} beyond sample coverage {}",
            sample.prime_limit()
        )));
    }
    if finest_cut > table.limit() as f64 {
        return Err(Error::Range(format!(
            "level {finest} cutoff {finest_cut} beyond table limit"
        )));
    }
    let rademacher = sample.kind() == ModelKind::Rademacher;
    let n_primes = table.prime_count(finest_cut);
    let primes = table.primes();

    let columns = crate::parallel::map_indexed(t_grid.len(), |ti| {
        let t = t_grid[ti];
        // factor logs for this t, by prime index
        let mut factor = vec![Complex64::new(0.0, 0.0); n_primes];
        for i in 0..n_primes {
            let lp = (primes[i] as f64).ln();
            let z = sample.value_by_index(i)
                * (-(0.5 + sigma) * lp).exp()
                * Complex64::new(0.0, -t * lp).exp();
            factor[i] = if rademacher {
                (Complex64::new(1.0, 0.0) + z).ln()
            } else {
                -((Complex64::new(1.0, 0.0) - z).ln())
            };
        }
        let mut col = vec![Complex64::new(0.0, 0.0); levels.len()];
        // finest level: full compensated sum
        let mut acc = CompensatedComplex::new();
        for &f in &factor {
            acc.add(f);
        }
        let mut current = acc.value();
        let mut current_count = n_primes;
        col[order[0]] = current;
        // subtract prime bands in descending order for the coarser levels
        for w in order.windows(2) {
            let next_cut = level_cutoff(x_anchor, levels[w[1]]);
            let next_count = table.prime_count(next_cut);
            for i in (next_count..current_count).rev() {
                current -= factor[i];
            }
            current_count = next_count;
            col[w[1]] = current;
        }
        col
    });

    let mut log_values = vec![Complex64::new(0.0, 0.0); levels.len() * t_grid.len()];
    for (ti, col) in columns.iter().enumerate() {
        for (li, &v) in col.iter().enumerate() {
            log_values[li * t_grid.len() + ti] = v;
        }
    }
    Ok(EulerGrid {
        sigma,
        t_grid: t_grid.to_vec(),
        levels: levels.to_vec(),
        x_anchor,
        log_values,
    })
}

/// The closed-form main term of the mixed-moment expectation together with
/// the error radius M / (sqrt(x) log x); callers form the guaranteed
/// interval exp(log_main +- radius).
#[derive(Clone, Copy, Debug)]
pub struct MomentFormula {
    pub value: f64,
    pub log_main: f64,
    pub error_radius: f64,
}

pub fn expected_moment_formula(
    kind: ModelKind,
    spec: &MomentSpec,
    table: &PrimeTable,
) -> Result<MomentFormula> {
    let (x, y) = spec.window;
    let hypothesis = 100.0 * (1.0 + spec.alpha_sum() * spec.alpha_sum());
    if x < hypothesis {
        return Err(Error::Precondition(format!(
            "window start {x} below hypothesis threshold {hypothesis}"
        )));
    }
    let ps = table.primes_in(x, y)?;
    let k = spec.k();
    let mut acc = Compensated::new();
    for &p in ps {
        let p = p as f64;
        let lp = p.ln();
        let mut num = 0.0;
        match kind {
            ModelKind::Steinhaus => {
                for j in 0..k {
                    num += spec.alphas[j] * spec.alphas[j];
                    for l in (j + 1)..k {
                        num += 2.0
                            * spec.alphas[j]
                            * spec.alphas[l]
                            * ((spec.ts[l] - spec.ts[j]) * lp).cos();
                    }
                }
            }
            ModelKind::Rademacher => {
                for j in 0..k {
                    let a = spec.alphas[j];
                    num += a * a + (a * a - a) * (2.0 * spec.ts[j] * lp).cos();
                    for l in (j + 1)..k {
                        num += 2.0
                            * a
                            * spec.alphas[l]
                            * (((spec.ts[l] - spec.ts[j]) * lp).cos()
                                + ((spec.ts[l] + spec.ts[j]) * lp).cos());
                    }
                }
            }
        }
        acc.add(num / p.powf(1.0 + 2.0 * spec.sigma));
    }
    let log_main = acc.value();
    Ok(MomentFormula {
        value: log_main.exp(),
        log_main,
        error_radius: spec.m_constant() / (x.sqrt() * x.ln()),
    })
}

/// Exact expectation by independence: the product over primes in the window
/// of a one-prime expectation. Steinhaus uses trapezoid quadrature over the
/// angle (spectrally accurate for the periodic integrand), doubling the
/// point count until the change is below 1e-10; Rademacher is a two-point
/// average. No hypothesis on the window is needed.
pub fn expected_moment_oracle(
    kind: ModelKind,
    spec: &MomentSpec,
    table: &PrimeTable,
    quadrature_points: usize,
) -> Result<f64> {
    let (x, y) = spec.window;
    let ps = table.primes_in(x, y)?;
    let k = spec.k();
    let logs = crate::parallel::map_indexed(ps.len(), |pi| {
        let p = ps[pi] as f64;
        let lp = p.ln();
        let zs: Vec<Complex64> = (0..k)
            .map(|j| {
                (-(0.5 + spec.sigma) * lp).exp() * Complex64::new(0.0, -spec.ts[j] * lp).exp()
            })
            .collect();
        let one_prime = |f: Complex64| -> f64 {
            // log of prod_j |1 -+ f z_j|^{-+2 alpha_j}
            let mut s = 0.0;
            for j in 0..k {
                let m = match kind {
                    ModelKind::Steinhaus => (Complex64::new(1.0, 0.0) - f * zs[j]).norm(),
                    ModelKind::Rademacher => (Complex64::new(1.0, 0.0) + f * zs[j]).norm(),
                };
                s += match kind {
                    ModelKind::Steinhaus => -2.0 * spec.alphas[j] * m.ln(),
                    ModelKind::Rademacher => 2.0 * spec.alphas[j] * m.ln(),
                };
            }
            s
        };
        match kind {
            ModelKind::Rademacher => {
                let plus = one_prime(Complex64::new(1.0, 0.0)).exp();
                let minus = one_prime(Complex64::new(-1.0, 0.0)).exp();
                (0.5 * (plus + minus)).ln()
            }
            ModelKind::Steinhaus => {
                let mut q = quadrature_points.max(16);
                let mut prev = f64::NAN;
                loop {
                    let mut acc = Compensated::new();
                    for i in 0..q {
                        let theta = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / q as f64;
                        acc.add(one_prime(Complex64::new(theta.cos(), theta.sin())).exp());
                    }
                    let mean = (acc.value() / q as f64).ln();
                    if !prev.is_nan() && (mean - prev).abs() < 1e-10 {
                        return mean;
                    }
                    prev = mean;
                    q *= 2;
                    if q > (1 << 20) {
                        return mean;
                    }
                }
            }
        }
    });
    Ok(pairwise_sum(&logs).exp())
}

/// Monte Carlo estimate of the mixed moment over independent realizations,
/// replica-indexed seeds, deterministic pairwise aggregation.
pub fn monte_carlo_moment(
    kind: ModelKind,
    spec: &MomentSpec,
    replicas: usize,
    master_seed: u64,
    table: &PrimeTable,
) -> Result<(f64, f64)> {
    if replicas < 2 {
        return Err(Error::Precondition("need at least 2 replicas".into()));
    }
    let (x, y) = spec.window;
    let ps: Vec<u32> = table.primes_in(x, y)?.to_vec();
    let k = spec.k();
    let pre: Vec<(f64, Vec<Complex64>)> = ps
        .iter()
        .map(|&p| {
            let lp = (p as f64).ln();
            let zs = (0..k)
                .map(|j| {
                    (-(0.5 + spec.sigma) * lp).exp()
                        * Complex64::new(0.0, -spec.ts[j] * lp).exp()
                })
                .collect();
            (lp, zs)
        })
        .collect();
    let values = crate::parallel::map_indexed(replicas, |rep| {
        let seed = crate::rng::keyed(master_seed, rep as u64);
        let mut log_val = 0.0;
        for (pi, &p) in ps.iter().enumerate() {
            let f = rmf::prime_value(kind, seed, p as u64);
            let zs = &pre[pi].1;
            for j in 0..k {
                let m = match kind {
                    ModelKind::Steinhaus => (Complex64::new(1.0, 0.0) - f * zs[j]).norm(),
                    ModelKind::Rademacher => (Complex64::new(1.0, 0.0) + f * zs[j]).norm(),
                };
                log_val += match kind {
                    ModelKind::Steinhaus => -2.0 * spec.alphas[j] * m.ln(),
                    ModelKind::Rademacher => 2.0 * spec.alphas[j] * m.ln(),
                };
            }
        }
        log_val.exp()
    });
    let mean = pairwise_sum(&values) / replicas as f64;
    let sq: Vec<f64> = values.iter().map(|&v| (v - mean) * (v - mean)).collect();
    let stderr = (pairwise_sum(&sq) / ((replicas - 1) as f64 * replicas as f64)).sqrt();
    Ok((mean, stderr))
}
