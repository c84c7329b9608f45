//! Small modular-arithmetic helpers used across the crate.

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Extended Euclid: returns (g, s, t) with s*a + t*b = g = gcd(a, b).
pub(crate) fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        let sign = if a < 0 { -1 } else { 1 };
        return (a.abs(), sign, 0);
    }
    let (g, s, t) = ext_gcd(b, a.rem_euclid(b));
    (g, t, s - (a.div_euclid(b)) * t)
}

/// Multiplicative inverse of `a` modulo `n`, if it exists.
pub(crate) fn mod_inverse(a: u64, n: u64) -> Option<u64> {
    let (g, s, _) = ext_gcd(a as i128, n as i128);
    if g != 1 {
        return None;
    }
    Some(s.rem_euclid(n as i128) as u64)
}

/// Least nonnegative solution `x` of `a*x ≡ b (mod n)`, if any.
pub(crate) fn solve_congruence(a: u64, b: u64, n: u64) -> Option<u64> {
    let g = gcd(a, n);
    if b % g != 0 {
        return None;
    }
    let n1 = n / g;
    let inv = mod_inverse((a / g) % n1, n1)?;
    Some((b / g % n1).wrapping_mul(inv) % n1)
}

/// Prime factorization as (prime, multiplicity) pairs, ascending.
pub(crate) fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// p-adic valuation of n (n > 0).
pub(crate) fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_gcd_bezout() {
        for a in 0..40i128 {
            for b in 0..40i128 {
                let (g, s, t) = ext_gcd(a, b);
                assert_eq!(g, gcd(a as u64, b as u64) as i128);
                assert_eq!(s * a + t * b, g);
            }
        }
    }

    #[test]
    fn congruences() {
        assert_eq!(solve_congruence(2, 2, 4), Some(1));
        assert_eq!(solve_congruence(2, 1, 4), None);
        assert_eq!(mod_inverse(5, 6), Some(5));
        assert_eq!(mod_inverse(2, 6), None);
    }

    #[test]
    fn factorization() {
        assert_eq!(prime_factors(12), vec![(2, 2), (3, 1)]);
        assert_eq!(prime_factors(1), vec![]);
        assert_eq!(valuation(24, 2), 3);
    }
}
