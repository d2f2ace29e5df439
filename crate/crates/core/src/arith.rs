//! Small integer helpers: trial-division factorization, prime powers,
//! modular arithmetic. Sized for desk-scale inputs.

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization as `(prime, exponent)` pairs in increasing order.
/// Returns an empty list for `n <= 1`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `Some((p, e))` with `n = p^e`, `e ≥ 1`, when `n` is a prime power.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    match factorize(n).as_slice() {
        [(p, e)] => Some((*p, *e)),
        _ => None,
    }
}

pub fn is_prime_power(n: u64) -> bool {
    prime_power(n).is_some()
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Residues in `[1, m)` coprime to `m`.
pub fn units(m: u64) -> Vec<u64> {
    (1..m).filter(|&u| gcd(u, m) == 1).collect()
}

/// `a² + b² = n` for some integers `a, b ≥ 0`.
pub fn is_sum_of_two_squares(n: u64) -> bool {
    let mut a = 0u64;
    while a * a <= n {
        let rest = n - a * a;
        let b = rest.isqrt();
        if b * b == rest {
            return true;
        }
        a += 1;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_prime_powers() {
        let primes: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(prime_power(16), Some((2, 4)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(factorize(4095), vec![(3, 2), (5, 1), (7, 1), (13, 1)]);
    }

    #[test]
    fn modular_helpers() {
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(7, 21), None);
        assert_eq!(pow_mod(2, 12, 13), 1);
        assert_eq!(units(7).len(), 6);
        assert_eq!(units(21), vec![1, 2, 4, 5, 8, 10, 11, 13, 16, 17, 19, 20]);
    }

    #[test]
    fn sums_of_two_squares_match_enumeration() {
        for n in 0..200u64 {
            let brute = (0..=n).any(|a| (0..=n).any(|b| a * a + b * b == n));
            assert_eq!(is_sum_of_two_squares(n), brute, "n = {n}");
        }
    }
}
