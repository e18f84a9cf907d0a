use crate::error::{Error, Result};
use crate::rational::Int;
use num::integer::Integer as _;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Work limits for factorization and divisor enumeration.
#[derive(Clone, Debug)]
pub struct Budget {
    pub trial_limit: u64,
    pub rho_rounds: u32,
    pub rho_iterations: u64,
    pub max_divisors: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            trial_limit: 1_000_000,
            rho_rounds: 40,
            rho_iterations: 2_000_000,
            max_divisors: 200_000,
        }
    }
}

/// Deterministic Miller–Rabin for arbitrary size; the witness set is
/// sufficient below 3.3·10^24 and probabilistically overwhelming above.
pub fn is_probable_prime(n: &Int) -> bool {
    if *n < Int::from(2) {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for w in WITNESSES {
        if *n == Int::from(w) {
            return true;
        }
        if (n % Int::from(w)).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u8;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d: Int = &n_minus_1 >> s;
    'witness: for w in WITNESSES {
        let mut x = Int::from(w).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 0..s.saturating_sub(1) {
            x = x.modpow(&Int::from(2u8), n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn brent_rho(n: &Int, budget: &Budget) -> Option<Int> {
    // Brent's cycle-finding variant of Pollard rho with batched gcds.
    let one = Int::one();
    for round in 1..=budget.rho_rounds {
        let c = Int::from(round * 2 + 1);
        let mut y = Int::from(round + 2);
        let mut g = Int::one();
        let (mut x, mut ys) = (y.clone(), y.clone());
        let mut r: u64 = 1;
        let mut iters: u64 = 0;
        let m: u64 = 128;
        while g.is_one() && iters < budget.rho_iterations {
            x = y.clone();
            for _ in 0..r {
                y = (&y * &y + &c) % n;
            }
            let mut k = 0u64;
            while k < r && g.is_one() {
                ys = y.clone();
                let mut q = Int::one();
                for _ in 0..m.min(r - k) {
                    y = (&y * &y + &c) % n;
                    q = (q * (&x - &y).abs()) % n;
                }
                g = q.gcd(n);
                k += m;
                iters += m;
            }
            r *= 2;
        }
        if g == *n {
            // Backtrack one step at a time to recover a proper factor.
            loop {
                ys = (&ys * &ys + &c) % n;
                g = (&x - &ys).abs().gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if g != one && g != *n {
            return Some(g);
        }
    }
    None
}

fn factor_into(n: Int, budget: &Budget, out: &mut BTreeMap<Int, u32>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if is_probable_prime(&n) {
        *out.entry(n).or_insert(0) += 1;
        return Ok(());
    }
    let d = brent_rho(&n, budget)
        .ok_or_else(|| Error::FactorBudget(n.to_string()))?;
    let q = &n / &d;
    factor_into(d, budget, out)?;
    factor_into(q, budget, out)
}

/// Prime factorization of |n| as prime → exponent, sign ignored; n must be
/// nonzero.
pub fn factorize(n: &Int, budget: &Budget) -> Result<BTreeMap<Int, u32>> {
    assert!(!n.is_zero(), "factorize(0)");
    let mut m = n.abs();
    let mut out = BTreeMap::new();
    let mut p: u64 = 2;
    while p <= budget.trial_limit {
        let pi = Int::from(p);
        if (&pi * &pi) > m {
            break;
        }
        while (&m % &pi).is_zero() {
            m /= &pi;
            *out.entry(pi.clone()).or_insert(0) += 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !m.is_one() {
        factor_into(m, budget, &mut out)?;
    }
    Ok(out)
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: &Int, p: &Int) -> u32 {
    assert!(!n.is_zero());
    let mut m = n.abs();
    let mut v = 0;
    while (&m % p).is_zero() {
        m /= p;
        v += 1;
    }
    v
}

/// All positive divisors of |n| in increasing order; errors out if the count
/// exceeds the budget.
pub fn divisors(n: &Int, budget: &Budget) -> Result<Vec<Int>> {
    let factors = factorize(n, budget)?;
    let mut count: usize = 1;
    for e in factors.values() {
        count = count.saturating_mul(*e as usize + 1);
        if count > budget.max_divisors {
            return Err(Error::FactorBudget(format!(
                "divisor count for {n} exceeds {}",
                budget.max_divisors
            )));
        }
    }
    let mut divs = vec![Int::one()];
    for (p, e) in &factors {
        let mut next = Vec::with_capacity(divs.len() * (*e as usize + 1));
        for d in &divs {
            let mut pk = Int::one();
            for _ in 0..=*e {
                next.push(d * &pk);
                pk *= p;
            }
        }
        divs = next;
    }
    divs.sort();
    Ok(divs)
}
