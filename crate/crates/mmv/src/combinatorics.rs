//! Lexicographic subset enumeration with explicit budgets.

use crate::error::{Error, Result};

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Enumerate all size-`k` subsets of `0..n` in lexicographic order after
/// checking the count against `budget`.
pub fn for_each_subset<F: FnMut(&[usize])>(
    n: usize,
    k: usize,
    budget: u128,
    mut f: F,
) -> Result<()> {
    let required = binomial(n, k);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    if k > n {
        return Ok(());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        if idx[i] == i + n - k {
            return Ok(());
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
