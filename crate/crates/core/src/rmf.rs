//! Steinhaus and Rademacher random multiplicative functions with
//! reproducible, order-independent per-prime randomness.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::PrimeTable;
use crate::rng;

/// Cap on bulk value tables (16 bytes per entry).
pub const MAX_VALUE_TABLE: usize = 1 << 24;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Steinhaus,
    Rademacher,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelKind::Steinhaus => write!(f, "steinhaus"),
            ModelKind::Rademacher => write!(f, "rademacher"),
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "steinhaus" => Ok(ModelKind::Steinhaus),
            "rademacher" => Ok(ModelKind::Rademacher),
            other => Err(Error::Config(format!("unknown model '{other}'"))),
        }
    }
}

/// The f(p) value for a given (seed, p); a pure function of its arguments,
/// so generation order and thread layout cannot matter.
pub fn prime_value(kind: ModelKind, master_seed: u64, p: u64) -> Complex64 {
    let word = rng::keyed(master_seed, p);
    match kind {
        ModelKind::Steinhaus => {
            let theta = 2.0 * PI * rng::unit_f64(word);
            Complex64::new(theta.cos(), theta.sin())
        }
        ModelKind::Rademacher => {
            if word >> 63 == 1 {
                Complex64::new(-1.0, 0.0)
            } else {
                Complex64::new(1.0, 0.0)
            }
        }
    }
}

/// A seeded realization of f: the per-prime values for all p <= prime_limit.
/// Values of f(n) for composite n are always derived, never stored here.
#[derive(Clone)]
pub struct RmfSample {
    kind: ModelKind,
    master_seed: u64,
    prime_limit: usize,
    table: Arc<PrimeTable>,
    values: Vec<Complex64>,
}

impl RmfSample {
    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn prime_limit(&self) -> usize {
        self.prime_limit
    }

    pub fn table(&self) -> &Arc<PrimeTable> {
        &self.table
    }

    /// f(p) by prime index into the table's prime list.
    #[inline]
    pub fn value_by_index(&self, idx: usize) -> Complex64 {
        self.values[idx]
    }

    /// f(p) for a prime p within coverage.
    pub fn prime_value_of(&self, p: usize) -> Result<Complex64> {
        if p > self.prime_limit {
            return Err(Error::Coverage(format!(
                "prime {p} beyond sample coverage {}",
                self.prime_limit
            )));
        }
        let idx = self
            .table
            .primes()
            .binary_search(&(p as u32))
            .map_err(|_| Error::Precondition(format!("{p} is not prime")))?;
        Ok(self.values[idx])
    }

    /// Replace f(p) at one prime; the sensitivity control used by the
    /// identity suite's fault injection.
    pub fn perturb_prime(&mut self, p: usize, value: Complex64) -> Result<()> {
        let idx = self
            .table
            .primes()
            .binary_search(&(p as u32))
            .map_err(|_| Error::Precondition(format!("{p} is not prime")))?;
        if p > self.prime_limit {
            return Err(Error::Coverage(format!("prime {p} beyond coverage")));
        }
        self.values[idx] = value;
        Ok(())
    }

    /// All-ones degenerate Steinhaus sample (f(n) = 1 for every n).
    pub fn degenerate_ones(table: Arc<PrimeTable>, prime_limit: usize) -> Result<Self> {
        Self::degenerate(table, prime_limit, ModelKind::Steinhaus, Complex64::new(1.0, 0.0))
    }

    /// All-minus-one degenerate Rademacher sample (f(n) = mu(n)).
    pub fn degenerate_moebius(table: Arc<PrimeTable>, prime_limit: usize) -> Result<Self> {
        Self::degenerate(table, prime_limit, ModelKind::Rademacher, Complex64::new(-1.0, 0.0))
    }

    fn degenerate(
        table: Arc<PrimeTable>,
        prime_limit: usize,
        kind: ModelKind,
        v: Complex64,
    ) -> Result<Self> {
        if prime_limit > table.limit() {
            return Err(Error::Range(format!(
                "prime limit {prime_limit} exceeds table limit {}",
                table.limit()
            )));
        }
        let n = table.prime_count(prime_limit as f64);
        Ok(RmfSample {
            kind,
            master_seed: 0,
            prime_limit,
            values: vec![v; n],
            table,
        })
    }
}

/// Draw a model realization: every prime p <= prime_limit gets the value
/// prime_value(kind, master_seed, p).
pub fn sample_model(
    kind: ModelKind,
    master_seed: u64,
    prime_limit: usize,
    table: &Arc<PrimeTable>,
) -> Result<RmfSample> {
    if prime_limit > table.limit() {
        return Err(Error::Range(format!(
            "prime limit {prime_limit} exceeds table limit {}",
            table.limit()
        )));
    }
    let n = table.prime_count(prime_limit as f64);
    let primes = table.primes();
    let values = crate::parallel::map_indexed(n, |i| prime_value(kind, master_seed, primes[i] as u64));
    Ok(RmfSample {
        kind,
        master_seed,
        prime_limit,
        table: Arc::clone(table),
        values,
    })
}

/// Freeze f(p) for p <= resample_above and redraw the larger primes from
/// fresh_seed: the computational form of conditioning on the small primes.
pub fn hybrid_sample(base: &RmfSample, resample_above: usize, fresh_seed: u64) -> RmfSample {
    let primes = base.table.primes();
    let values = base
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let p = primes[i] as usize;
            if p <= resample_above {
                v
            } else {
                prime_value(base.kind, fresh_seed, p as u64)
            }
        })
        .collect();
    RmfSample {
        kind: base.kind,
        master_seed: base.master_seed,
        prime_limit: base.prime_limit,
        table: Arc::clone(&base.table),
        values,
    }
}

/// Evaluate f(n) by smallest-prime-factor extraction. Multiplications are
/// performed in the same order as the bulk recursion in [`values_up_to`],
/// so the two agree bit for bit.
pub fn value_at(sample: &RmfSample, n: usize) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Range("f(0) undefined".into()));
    }
    if n == 1 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if n > sample.table.limit() {
        return Err(Error::Range(format!(
            "{n} exceeds table limit {}",
            sample.table.limit()
        )));
    }
    let mut factors: Vec<u32> = Vec::new();
    let mut m = n;
    let mut squarefree = true;
    let mut last = 0u32;
    while m > 1 {
        let p = sample.table.spf(m);
        if p as usize > sample.prime_limit {
            return Err(Error::Coverage(format!(
                "prime factor {p} of {n} beyond sample coverage {}",
                sample.prime_limit
            )));
        }
        if p == last {
            squarefree = false;
        }
        factors.push(p);
        last = p;
        m /= p as usize;
    }
    if sample.kind == ModelKind::Rademacher && !squarefree {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut v = Complex64::new(1.0, 0.0);
    for &p in factors.iter().rev() {
        v *= sample.prime_value_of(p as usize)?;
    }
    Ok(v)
}

/// Bulk cache of f(n) for 1 <= n <= n_max.
pub struct ValueTable {
    n_max: usize,
    values: Vec<Complex64>,
}

impl ValueTable {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// f(n); index 0 holds zero by convention.
    #[inline]
    pub fn value(&self, n: usize) -> Complex64 {
        self.values[n]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Build the table by the one-multiplication recursion
/// f(n) = f(n / spf(n)) * f(spf(n)); O(n_max) multiplications total.
pub fn values_up_to(sample: &RmfSample, n_max: usize) -> Result<ValueTable> {
    if n_max > sample.table.limit() {
        return Err(Error::Range(format!(
            "n_max {n_max} exceeds table limit {}",
            sample.table.limit()
        )));
    }
    if n_max > MAX_VALUE_TABLE {
        return Err(Error::Capacity {
            what: "value table",
            requested: n_max,
            budget: MAX_VALUE_TABLE,
        });
    }
    if n_max >= 2 && sample.prime_limit < n_max {
        return Err(Error::Coverage(format!(
            "sample covers primes up to {}, need {n_max}",
            sample.prime_limit
        )));
    }
    let mut values = vec![Complex64::new(0.0, 0.0); n_max + 1];
    if n_max >= 1 {
        values[1] = Complex64::new(1.0, 0.0);
    }
    // seed the primes directly so the composite recursion needs no lookups
    for (i, &p) in sample.table.primes().iter().enumerate() {
        let p = p as usize;
        if p > n_max {
            break;
        }
        values[p] = sample.values[i];
    }
    let rademacher = sample.kind == ModelKind::Rademacher;
    for n in 2..=n_max {
        let p = sample.table.spf(n) as usize;
        if p == n {
            continue;
        }
        let m = n / p;
        values[n] = if rademacher && m % p == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            values[m] * values[p]
        };
    }
    Ok(ValueTable { n_max, values })
}
