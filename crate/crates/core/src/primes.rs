//! Prime sieving, smooth-number counting, prime sums with complex exponents,
//! and a mean-value check for Dirichlet polynomials supported on prime powers.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::util::{Compensated, CompensatedComplex};

/// Hard cap on the sieve range (smallest-prime-factor array is 4 bytes/entry).
pub const MAX_SIEVE_LIMIT: usize = 1 << 26;

/// Linear sieve output: the primes up to `limit` and the smallest prime
/// factor of every integer in [2, limit].
pub struct PrimeTable {
    limit: usize,
    primes: Vec<u32>,
    spf: Vec<u32>,
}

impl PrimeTable {
    /// Build the table with a linear (Euler) sieve: each composite is struck
    /// exactly once by its smallest prime factor.
    pub fn build(limit: usize) -> Result<Self> {
        if limit < 2 {
            return Err(Error::Precondition(format!("sieve limit {limit} < 2")));
        }
        if limit > MAX_SIEVE_LIMIT {
            return Err(Error::Capacity {
                what: "prime sieve",
                requested: limit,
                budget: MAX_SIEVE_LIMIT,
            });
        }
        let mut spf = vec![0u32; limit + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=limit {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            for &p in &primes {
                let p = p as usize;
                if p > spf[i] as usize || i * p > limit {
                    break;
                }
                spf[i * p] = p as u32;
            }
        }
        Ok(PrimeTable { limit, primes, spf })
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Smallest prime factor of n (n in [2, limit]).
    #[inline]
    pub fn spf(&self, n: usize) -> u32 {
        self.spf[n]
    }

    pub fn is_prime(&self, n: usize) -> bool {
        n >= 2 && n <= self.limit && self.spf[n] as usize == n
    }

    /// Number of primes <= x.
    pub fn prime_count(&self, x: f64) -> usize {
        if x < 2.0 {
            return 0;
        }
        self.primes.partition_point(|&p| (p as f64) <= x)
    }

    /// Primes p with x < p <= y, as a slice of the internal list.
    pub fn primes_in(&self, x: f64, y: f64) -> Result<&[u32]> {
        if y > self.limit as f64 {
            return Err(Error::Range(format!(
                "prime range end {y} exceeds table limit {}",
                self.limit
            )));
        }
        if x > y {
            return Err(Error::Range(format!("empty-inverted prime range ({x}, {y}]")));
        }
        let lo = self.primes.partition_point(|&p| (p as f64) <= x);
        let hi = self.primes.partition_point(|&p| (p as f64) <= y);
        Ok(&self.primes[lo..hi])
    }

    /// Factorization of n as (prime, exponent) pairs, smallest prime first.
    pub fn factorize(&self, n: usize) -> Result<Vec<(u32, u32)>> {
        if n == 0 || n > self.limit {
            return Err(Error::Range(format!(
                "cannot factorize {n} with table limit {}",
                self.limit
            )));
        }
        let mut out = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.spf[m];
            let mut e = 0;
            while m % p as usize == 0 {
                m /= p as usize;
                e += 1;
            }
            out.push((p, e));
        }
        Ok(out)
    }

    /// von Mangoldt Lambda(n): log p when n = p^k, else 0.
    pub fn von_mangoldt(&self, n: usize) -> Result<f64> {
        let f = self.factorize(n)?;
        match f.as_slice() {
            [(p, _)] => Ok((*p as f64).ln()),
            _ => Ok(0.0),
        }
    }

    /// Exact sum of p^{-s} over primes x < p <= y, compensated accumulation.
    pub fn prime_power_sum(&self, x: f64, y: f64, s: Complex64) -> Result<Complex64> {
        if s.re <= 0.0 {
            return Err(Error::Precondition(format!(
                "prime_power_sum needs Re(s) > 0, got {}",
                s.re
            )));
        }
        let ps = self.primes_in(x, y)?;
        let mut acc = CompensatedComplex::new();
        for &p in ps {
            let lp = (p as f64).ln();
            acc.add((-s * lp).exp());
        }
        Ok(acc.value())
    }

    /// sum_{x < p <= y} 1/p - (loglog y - loglog x). The Mertens constant
    /// cancels in the difference, so this stays small.
    pub fn mertens_residual(&self, x: f64, y: f64) -> Result<f64> {
        if !(100.0..=y).contains(&x) {
            return Err(Error::Precondition(format!(
                "mertens_residual needs 100 <= x <= y, got x={x} y={y}"
            )));
        }
        let ps = self.primes_in(x, y)?;
        let mut acc = Compensated::new();
        for &p in ps {
            acc.add(1.0 / p as f64);
        }
        Ok(acc.value() - (y.ln().ln() - x.ln().ln()))
    }

    /// Count of `smoothness`-smooth n <= limit (1 counts as smooth).
    pub fn smooth_count(&self, limit: usize, smoothness: usize) -> Result<u64> {
        if limit > self.limit {
            return Err(Error::Range(format!(
                "smooth_count limit {limit} exceeds table limit {}",
                self.limit
            )));
        }
        if limit == 0 {
            return Ok(0);
        }
        let mut smooth = vec![false; limit + 1];
        smooth[1] = true;
        let mut count = 1u64;
        for n in 2..=limit {
            let p = self.spf[n] as usize;
            if p <= smoothness && smooth[n / p] {
                smooth[n] = true;
                count += 1;
            }
        }
        Ok(count)
    }
}

/// A Dirichlet polynomial with explicit finite support; the weighted form
/// carries coefficients a_n Lambda(n)/n.
#[derive(Clone, Debug)]
pub struct DirichletPolynomial {
    coefficients: BTreeMap<u64, Complex64>,
    von_mangoldt_weighted: bool,
}

impl DirichletPolynomial {
    pub fn new(coefficients: BTreeMap<u64, Complex64>, von_mangoldt_weighted: bool) -> Self {
        DirichletPolynomial {
            coefficients,
            von_mangoldt_weighted,
        }
    }

    pub fn coefficients(&self) -> &BTreeMap<u64, Complex64> {
        &self.coefficients
    }

    pub fn is_weighted(&self) -> bool {
        self.von_mangoldt_weighted
    }
}

/// Both sides of the prime-supported mean value bound:
/// lhs = int_{-T}^{T} |sum a_n Lambda(n) n^{-1-it}|^2 dt (composite midpoint),
/// rhs = sum |a_n|^2 Lambda(n)/n.
///
/// The quadrature step is clamped to 1/(4 max log n) so the fastest
/// oscillation e^{-it log n} is resolved.
pub fn mean_value_check(
    table: &PrimeTable,
    poly: &DirichletPolynomial,
    t_height: f64,
    quadrature_step: f64,
) -> Result<(f64, f64)> {
    if !poly.is_weighted() {
        return Err(Error::Precondition(
            "mean_value_check requires the von-Mangoldt-weighted form".into(),
        ));
    }
    if t_height < 1.0 {
        return Err(Error::Precondition(format!("T must be >= 1, got {t_height}")));
    }
    if quadrature_step <= 0.0 {
        return Err(Error::Precondition("quadrature step must be positive".into()));
    }
    let min_n = t_height.powf(1.01);
    let mut terms: Vec<(f64, Complex64)> = Vec::new();
    let mut rhs = Compensated::new();
    for (&n, &a) in poly.coefficients() {
        let n = n as usize;
        if (n as f64) < min_n {
            return Err(Error::Precondition(format!(
                "support point {n} below T^1.01 = {min_n:.3}"
            )));
        }
        let lambda = table.von_mangoldt(n)?;
        if lambda == 0.0 {
            continue;
        }
        terms.push(((n as f64).ln(), a * lambda / n as f64));
        rhs.add(a.norm_sqr() * lambda / n as f64);
    }
    if terms.is_empty() {
        return Ok((0.0, 0.0));
    }
    let max_log = terms.iter().map(|t| t.0).fold(0.0f64, f64::max);
    let step = quadrature_step.min(1.0 / (4.0 * max_log));
    let m = ((2.0 * t_height) / step).ceil() as usize;
    let h = 2.0 * t_height / m as f64;
    let mut lhs = Compensated::new();
    for k in 0..m {
        let t = -t_height + (k as f64 + 0.5) * h;
        let mut val = CompensatedComplex::new();
        for &(ln_n, c) in &terms {
            val.add(c * Complex64::new(0.0, -t * ln_n).exp());
        }
        lhs.add(val.value().norm_sqr());
    }
    Ok((lhs.value() * h, rhs.value()))
}
