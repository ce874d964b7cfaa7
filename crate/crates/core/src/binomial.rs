//! Exact binomial coefficients and alternating binomial sums.

use crate::error::{Error, Result};
use crate::vector::Vector;

/// Largest supported `n` in [`binomial`].
pub const MAX_BINOMIAL_N: u32 = 30;

const TABLE_SIZE: usize = MAX_BINOMIAL_N as usize + 1;

const fn pascal_table() -> [[u64; TABLE_SIZE]; TABLE_SIZE] {
    let mut table = [[0u64; TABLE_SIZE]; TABLE_SIZE];
    let mut n = 0;
    while n < TABLE_SIZE {
        table[n][0] = 1;
        let mut k = 1;
        while k <= n {
            table[n][k] = table[n - 1][k - 1] + table[n - 1][k];
            k += 1;
        }
        n += 1;
    }
    table
}

static PASCAL: [[u64; TABLE_SIZE]; TABLE_SIZE] = pascal_table();

/// `C(n, k)` in exact integer arithmetic; zero when `k` is outside `0..=n`.
pub fn binomial(n: u32, k: i64) -> Result<u64> {
    if n > MAX_BINOMIAL_N {
        return Err(Error::BinomialOverflow {
            n,
            max: MAX_BINOMIAL_N,
        });
    }
    if k < 0 || k > i64::from(n) {
        return Ok(0);
    }
    Ok(PASCAL[n as usize][k as usize])
}

/// Table lookup for call sites that already validated `k <= n <= 30`.
pub(crate) fn binomial_unchecked(n: usize, k: usize) -> u64 {
    PASCAL[n][k]
}

/// `Σ_{i=0}^{p} (-1)^i C(p, i) values[i]`, the `p`-th backward difference
/// when `values[i]` is the sample `i` steps in the past.
pub fn alternating_binomial_sum(p: usize, values: &[Vector]) -> Result<Vector> {
    if p == 0 || p > MAX_BINOMIAL_N as usize {
        return Err(Error::OrderOutOfRange {
            order: p,
            max: MAX_BINOMIAL_N as usize,
        });
    }
    if values.len() != p + 1 {
        return Err(Error::DimensionMismatch {
            expected: p + 1,
            actual: values.len(),
        });
    }
    let dim = values[0].dim();
    let mut acc = Vector::zeros(dim);
    for (i, value) in values.iter().enumerate() {
        value.check_dim(dim)?;
        let weight = binomial_unchecked(p, i) as f64;
        let signed = if i % 2 == 0 { weight } else { -weight };
        acc.axpy(signed, value);
    }
    Ok(acc)
}
