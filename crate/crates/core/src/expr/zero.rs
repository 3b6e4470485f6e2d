//! Probabilistic zero testing: the oracle behind every "residual
//! vanishes" verdict.
//!
//! An expression is declared [`ZeroVerdict::Zero`] when it normalizes
//! (or clears, see [`Expr::clear_denominators`]) to the zero
//! polynomial, or when its value stays below a cancellation-aware
//! tolerance at every sampled point of the domain. Sampling is a
//! deterministic jittered grid over the declared intervals, driven by a
//! SplitMix64 stream so identical seeds reproduce identical verdicts
//! bit for bit.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{Bindings, Expr};

/// Deterministic 64-bit PRNG (SplitMix64). Used instead of an external
/// RNG so that seeded runs stay byte-reproducible across dependency
/// upgrades.
#[derive(Clone, Debug)]
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform in `[lo, hi)`.
    pub fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }
}

/// Per-symbol sampling intervals plus declared singular sets
/// (expressions that must stay away from zero at sample points).
#[derive(Clone, Debug)]
pub struct SampleDomain {
    pub default_interval: (f64, f64),
    pub intervals: BTreeMap<String, (f64, f64)>,
    pub avoid: Vec<Expr>,
}

impl Default for SampleDomain {
    fn default() -> SampleDomain {
        SampleDomain {
            default_interval: (0.5, 2.0),
            intervals: BTreeMap::new(),
            avoid: Vec::new(),
        }
    }
}

impl SampleDomain {
    pub fn new() -> SampleDomain {
        SampleDomain::default()
    }

    pub fn with_default(mut self, lo: f64, hi: f64) -> SampleDomain {
        self.default_interval = (lo, hi);
        self
    }

    pub fn with_interval(mut self, name: &str, lo: f64, hi: f64) -> SampleDomain {
        self.intervals.insert(name.to_string(), (lo, hi));
        self
    }

    pub fn with_avoid(mut self, e: Expr) -> SampleDomain {
        self.avoid.push(e);
        self
    }

    pub fn interval(&self, name: &str) -> (f64, f64) {
        self.intervals
            .get(name)
            .copied()
            .unwrap_or(self.default_interval)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZeroOptions {
    pub trials: u32,
    pub tol: f64,
    pub seed: u64,
}

impl Default for ZeroOptions {
    fn default() -> ZeroOptions {
        ZeroOptions {
            trials: 24,
            tol: 1e-9,
            seed: 0x5EED,
        }
    }
}

/// A point at which the expression was observed away from zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub bindings: BTreeMap<String, f64>,
    pub value: f64,
    /// Local magnitude estimate (sum of |term| over the top-level sum)
    /// against which the tolerance was scaled.
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ZeroVerdict {
    Zero,
    NonZero(Witness),
    /// Some samples hit domain errors and no sample exceeded the
    /// tolerance.
    Inconclusive,
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroVerdict::Zero)
    }
}

pub fn is_zero(e: &Expr, domain: &SampleDomain, options: &ZeroOptions) -> ZeroVerdict {
    let normalized = match e.normalize() {
        Ok(n) => n,
        Err(_) => return ZeroVerdict::Inconclusive,
    };
    if normalized.is_zero_literal() {
        return ZeroVerdict::Zero;
    }
    if let Ok(cleared) = normalized.clear_denominators() {
        if cleared.is_zero_literal() {
            return ZeroVerdict::Zero;
        }
    }
    if !normalized.opaque_names().is_empty() {
        // Uninstantiated functions cannot be sampled.
        return ZeroVerdict::Inconclusive;
    }

    let mut symbols: Vec<String> = normalized.free_symbols().into_iter().collect();
    for avoid in &domain.avoid {
        for s in avoid.free_symbols() {
            if !symbols.contains(&s) {
                symbols.push(s);
            }
        }
    }
    symbols.sort();

    let trials = options.trials.max(1);
    let mut rng = SplitMix64::new(options.seed);
    let mut failures = 0u32;

    'trial: for trial in 0..trials {
        let mut bindings = Bindings::new();
        let mut attempts = 0;
        loop {
            for name in &symbols {
                let (lo, hi) = domain.interval(name);
                // Jittered grid: the trial picks the stratum, the
                // stream the offset within it.
                let u = (trial as f64 + rng.unit()) / trials as f64;
                bindings.set(name, lo + (hi - lo) * u);
            }
            let clear = domain.avoid.iter().all(|a| match a.eval(&bindings) {
                Ok(v) => v.abs() > 1e-6,
                Err(_) => false,
            });
            if clear {
                break;
            }
            attempts += 1;
            if attempts >= 8 {
                failures += 1;
                continue 'trial;
            }
        }

        let (value, scale) = match magnitude_aware_eval(&normalized, &bindings) {
            Ok(vs) => vs,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        if value.abs() > options.tol * (1.0 + scale) {
            let named = bindings
                .symbols()
                .map(|(k, v)| (k.clone(), *v))
                .collect::<BTreeMap<_, _>>();
            return ZeroVerdict::NonZero(Witness {
                bindings: named,
                value,
                scale,
            });
        }
    }

    if failures == 0 {
        ZeroVerdict::Zero
    } else {
        ZeroVerdict::Inconclusive
    }
}

/// Evaluates a canonical expression term by term, returning the total
/// and the sum of term magnitudes (the cancellation scale).
fn magnitude_aware_eval(e: &Expr, b: &Bindings) -> Result<(f64, f64), super::EvalError> {
    match e {
        Expr::Sum(ts) => {
            let mut total = 0.0;
            let mut scale = 0.0;
            for t in ts {
                let v = t.eval(b)?;
                total += v;
                scale += v.abs();
            }
            Ok((total, scale))
        }
        other => {
            let v = other.eval(b)?;
            Ok((v, v.abs()))
        }
    }
}
