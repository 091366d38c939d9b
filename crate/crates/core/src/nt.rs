//! Integer helpers: primality, factorisation and modular exponents.

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % small == 0 {
            return n == small;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = num_integer::gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn factor_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    let mut n = n;
    for small in 2u64..1000 {
        while n % small == 0 {
            out.push(small);
            n /= small;
        }
        if n == 1 {
            return;
        }
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Prime factorisation of a 64-bit integer, sorted, with multiplicities.
pub fn factor(n: u64) -> Vec<(u64, u32)> {
    let mut raw = Vec::new();
    factor_into(n, &mut raw);
    merge(raw)
}

fn merge(mut raw: Vec<u64>) -> Vec<(u64, u32)> {
    raw.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for r in raw {
        match out.last_mut() {
            Some((q, k)) if *q == r => *k += 1,
            _ => out.push((r, 1)),
        }
    }
    out
}

/// Factorisation of `p^k - 1` for even `k`, via `(p^{k/2} - 1)(p^{k/2} + 1)`.
pub fn factor_prime_power_minus_one(p: u64, k: u32) -> Vec<(u64, u32)> {
    let mut raw = Vec::new();
    if k % 2 == 0 {
        let half = p.pow(k / 2);
        factor_into(half - 1, &mut raw);
        factor_into(half + 1, &mut raw);
    } else {
        factor_into(p.pow(k) - 1, &mut raw);
    }
    merge(raw)
}

/// `(g, x, y)` with `a x + b y = g`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u128, m: u128) -> Option<u128> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd(a as i128, m as i128);
    (g == 1).then(|| x.rem_euclid(m as i128) as u128)
}

pub fn gcd_u128(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd_u128(b, a % b)
    }
}

pub fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Euler's totient for small arguments.
pub fn totient(n: u64) -> u64 {
    factor(n)
        .into_iter()
        .fold(n, |acc, (r, _)| acc / r * (r - 1))
}

/// Kronecker symbol `(a/n)` for `n > 0`.
pub fn kronecker(a: i64, n: u64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    let mut n = n;
    while n % 2 == 0 {
        n /= 2;
        match a.rem_euclid(8) {
            0 | 2 | 4 | 6 => return 0,
            3 | 5 => result = -result,
            _ => {}
        }
    }
    // Jacobi symbol for odd n.
    let mut a = a.rem_euclid(n as i64) as u64;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_factors() {
        assert!(is_prime(2) && is_prime(13) && is_prime(1_000_000_007));
        assert!(!is_prime(1) && !is_prime(91));
        assert_eq!(factor(63), vec![(3, 2), (7, 1)]);
        assert_eq!(factor_prime_power_minus_one(2, 6), vec![(3, 2), (7, 1)]);
        let f = factor_prime_power_minus_one(7, 24);
        let prod: u128 = f.iter().map(|&(r, k)| (r as u128).pow(k)).product();
        assert_eq!(prod, 7u128.pow(24) - 1);
    }

    #[test]
    fn kronecker_values() {
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(-3, 3), 0);
        assert_eq!(kronecker(-3, 7), 1);
        assert_eq!(kronecker(-4, 13), 1);
        assert_eq!(kronecker(-3, 11), -1);
    }

    #[test]
    fn inverses() {
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(2, 4), None);
        assert_eq!(totient(8), 4);
    }
}
