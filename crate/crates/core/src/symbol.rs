//! Multiplier symbols: finite complex sequences with derived statistics.

use faer::c64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Sign classification of a symbol.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SignPattern {
    AllPositiveReal,
    AllNegativeReal,
    /// Mixed signs, nonzero imaginary parts, or zeros.
    Mixed,
}

impl SignPattern {
    /// `+1` / `-1` for signed symbols.
    pub fn sign(self) -> Option<f64> {
        match self {
            SignPattern::AllPositiveReal => Some(1.0),
            SignPattern::AllNegativeReal => Some(-1.0),
            SignPattern::Mixed => None,
        }
    }
}

/// Exact statistics of a symbol `m`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SymbolStats {
    /// `a = min |m_n|`
    pub inf_abs: f64,
    /// `b = max |m_n|`
    pub sup_abs: f64,
    /// `λ = max |m_n − 1|`
    pub lambda: f64,
    pub sign: SignPattern,
    pub has_zero: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Symbol {
    values: Vec<c64>,
}

impl Symbol {
    pub fn new(values: Vec<c64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("symbol must be nonempty".into()));
        }
        Ok(Symbol { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| c64::new(x, 0.0)).collect())
    }

    pub fn constant(len: usize, c: c64) -> Result<Self> {
        Self::new(vec![c; len])
    }

    pub fn ones(len: usize) -> Result<Self> {
        Self::constant(len, c64::ONE)
    }

    /// Real entries drawn uniformly from `[lo, hi]`, deterministic in `seed`.
    pub fn uniform_real(len: usize, lo: f64, hi: f64, seed: u64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::InvalidArgument(format!("empty range [{lo}, {hi}]")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals = (0..len)
            .map(|_| c64::new(lo + (hi - lo) * rng.random::<f64>(), 0.0))
            .collect();
        Self::new(vals)
    }

    pub fn values(&self) -> &[c64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn stats(&self) -> SymbolStats {
        let mut inf_abs = f64::INFINITY;
        let mut sup_abs = 0.0f64;
        let mut lambda = 0.0f64;
        let (mut pos, mut neg) = (true, true);
        for z in &self.values {
            let r = z.norm();
            inf_abs = inf_abs.min(r);
            sup_abs = sup_abs.max(r);
            lambda = lambda.max((z - c64::ONE).norm());
            pos &= z.im == 0.0 && z.re > 0.0;
            neg &= z.im == 0.0 && z.re < 0.0;
        }
        let sign = if pos {
            SignPattern::AllPositiveReal
        } else if neg {
            SignPattern::AllNegativeReal
        } else {
            SignPattern::Mixed
        };
        SymbolStats {
            inf_abs,
            sup_abs,
            lambda,
            sign,
            has_zero: inf_abs == 0.0,
        }
    }

    pub fn conj(&self) -> Symbol {
        Symbol {
            values: self.values.iter().map(|z| z.conj()).collect(),
        }
    }

    /// `1/m`; fails on a zero entry.
    pub fn reciprocal(&self) -> Result<Symbol> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(index, z)| {
                if *z == c64::ZERO {
                    Err(Error::ZeroSymbol { index })
                } else {
                    Ok(c64::ONE / z)
                }
            })
            .collect::<Result<_>>()?;
        Ok(Symbol { values })
    }

    /// Entrywise moduli `|m_n|`.
    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    /// `‖m‖_p` for `p ≥ 1`; `p = ∞` gives the max modulus.
    pub fn p_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.stats().sup_abs;
        }
        self.values
            .iter()
            .map(|z| z.norm().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }

    pub fn first_zero(&self) -> Option<usize> {
        self.values.iter().position(|z| *z == c64::ZERO)
    }
}
