//! Small integer helpers shared by the group constructors and sentence generators.

/// Prime factorization by trial division, as `(prime, exponent)` pairs in
/// increasing prime order. `factorize(1)` is empty.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Returns `(p, z)` with `q = p^z`, `z >= 1`, or `None` if `q` is not a prime power.
pub fn prime_power_parts(q: u64) -> Option<(u64, u32)> {
    match factorize(q).as_slice() {
        [(p, z)] => Some((*p, *z)),
        _ => None,
    }
}

pub fn is_prime_power(q: u64) -> bool {
    prime_power_parts(q).is_some()
}

/// Number of binary digits of `n >= 1`, i.e. `floor(log2 n) + 1`.
pub fn bit_len(n: u64) -> u32 {
    64 - n.leading_zeros()
}

/// `ceil(log2 n)` for `n >= 1`.
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        bit_len(n - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization() {
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(999_983), vec![(999_983, 1)]);
        assert_eq!(prime_power_parts(27), Some((3, 3)));
        assert_eq!(prime_power_parts(12), None);
        assert!(!is_prime_power(1));
    }

    #[test]
    fn logs() {
        assert_eq!(bit_len(1), 1);
        assert_eq!(bit_len(8), 4);
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(8), 3);
        assert_eq!(ceil_log2(120), 7);
    }
}
