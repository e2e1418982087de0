//! Small integer helpers shared by the sieves and the residue arithmetic.

/// `base^exp`, or `None` on overflow.
pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

/// Floor of the `k`-th root of `n`.
pub fn iroot(n: u64, k: u32) -> u64 {
    assert!(k >= 1, "root index must be positive");
    if k == 1 || n < 2 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / k as f64) as u64;
    // float estimate can be off by one in either direction
    while r > 0 && checked_pow(r, k).is_none_or(|v| v > n) {
        r -= 1;
    }
    while checked_pow(r + 1, k).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}

/// Smallest `q` with `q^k >= n`.
pub fn iroot_ceil(n: u64, k: u32) -> u64 {
    let r = iroot(n, k);
    if checked_pow(r, k) == Some(n) {
        r
    } else {
        r + 1
    }
}

/// Inverse of `a` modulo `m` when `gcd(a, m) = 1`.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// `(a * b) mod m` without overflow.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Solve `step * t ≡ c (mod m)`; returns `(t0, period)` describing all solutions
/// `t ≡ t0 (mod period)`, or `None` when there are none.
pub fn solve_linear_congruence(step: u64, c: u64, m: u64) -> Option<(u64, u64)> {
    let g = num_integer::gcd(step % m, m);
    let g = if g == 0 { m } else { g };
    if c % g != 0 {
        return None;
    }
    let period = m / g;
    if period == 1 {
        return Some((0, 1));
    }
    let inv = mod_inverse((step / g) % period, period)?;
    Some((mul_mod((c / g) % period, inv, period), period))
}
