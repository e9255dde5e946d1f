//! Dense polynomials over the prime field F_p, coefficients low degree first.
//!
//! Only what the residue-field machinery needs: arithmetic, gcd, modular
//! exponentiation and Rabin's irreducibility test. Polynomials are kept
//! trimmed (no trailing zero coefficients); the zero polynomial is `[]`.

pub type FpPoly = Vec<u64>;

pub fn trim(mut a: FpPoly) -> FpPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn reduce(a: &[i64], p: u64) -> FpPoly {
    trim(a.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect())
}

pub fn add(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
        .collect();
    trim(out)
}

pub fn sub(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
        .collect();
    trim(out)
}

pub fn mul(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Quotient and remainder of `a` by a nonzero `b`.
pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (FpPoly, FpPoly) {
    let db = degree(b).expect("division by zero polynomial");
    let lead_inv = inv_mod(b[db], p);
    let mut r: Vec<u64> = trim(a.to_vec());
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![0u64; r.len() - db];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = r[dr] * lead_inv % p;
        q[dr - db] = c;
        for i in 0..=db {
            let k = dr - db + i;
            r[k] = (r[k] + p - c * b[i] % p) % p;
        }
        r = trim(r);
    }
    (trim(q), r)
}

pub fn rem(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    divrem(a, b, p).1
}

pub fn monic(a: &[u64], p: u64) -> FpPoly {
    match degree(a) {
        None => Vec::new(),
        Some(d) => {
            let inv = inv_mod(a[d], p);
            trim(a.iter().map(|&c| c * inv % p).collect())
        }
    }
}

pub fn gcd(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    monic(&x, p)
}

pub fn derivative(a: &[u64], p: u64) -> FpPoly {
    trim(a.iter().enumerate().skip(1).map(|(i, &c)| (i as u64 % p) * c % p).collect())
}

pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> FpPoly {
    rem(&mul(a, b, p), m, p)
}

pub fn powmod(base: &[u64], mut e: u128, m: &[u64], p: u64) -> FpPoly {
    let mut r: FpPoly = rem(&[1], m, p);
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(&r, &b, m, p);
        }
        b = mulmod(&b, &b, m, p);
        e >>= 1;
    }
    r
}

pub fn eval(a: &[u64], x: u64, p: u64) -> u64 {
    a.iter().rev().fold(0u64, |acc, &c| (acc * x + c) % p)
}

/// True when `a` has no repeated factor over the algebraic closure.
pub fn is_squarefree(a: &[u64], p: u64) -> bool {
    let d = derivative(a, p);
    if d.is_empty() {
        return false;
    }
    gcd(a, &d, p).len() == 1
}

/// Rabin's test: `g` of degree n is irreducible iff x^(p^n) = x mod g and
/// gcd(x^(p^(n/r)) - x, g) = 1 for every prime r dividing n.
pub fn is_irreducible(g: &[u64], p: u64) -> bool {
    let g = trim(g.to_vec());
    let n = match degree(&g) {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n,
    };
    let x: FpPoly = vec![0, 1];
    let frob_iter = |k: usize| {
        let mut h = x.clone();
        for _ in 0..k {
            h = powmod(&h, p as u128, &g, p);
        }
        h
    };
    if sub(&frob_iter(n), &rem(&x, &g, p), p) != Vec::<u64>::new() {
        return false;
    }
    for r in prime_factors(n as u64) {
        let h = sub(&frob_iter(n / r as usize), &x, p);
        if gcd(&h, &g, p).len() != 1 {
            return false;
        }
    }
    true
}

/// The least monic irreducible polynomial of degree `n` over F_p, ordering
/// candidates by the integer c_0 + c_1 p + ... + c_{n-1} p^(n-1).
pub fn least_irreducible(p: u64, n: usize) -> FpPoly {
    assert!(n >= 1);
    let total = (p as u128).pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let mut poly = Vec::with_capacity(n + 1);
        for _ in 0..n {
            poly.push((c % p as u128) as u64);
            c /= p as u128;
        }
        poly.push(1);
        if is_irreducible(&poly, p) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Write `q` as p^f with p prime.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let p = *prime_factors(q).first()?;
    let mut f = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        f += 1;
    }
    (r == 1).then_some((p, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count_irreducible_brute(p: u64, n: usize) -> usize {
        // monic polynomials of degree n with no factor of degree <= n/2
        let total = (p as u128).pow(n as u32);
        let mut count = 0;
        for code in 0..total {
            let mut c = code;
            let mut poly = Vec::new();
            for _ in 0..n {
                poly.push((c % p as u128) as u64);
                c /= p as u128;
            }
            poly.push(1);
            let mut reducible = false;
            'outer: for dd in 1..=n / 2 {
                let tot = (p as u128).pow(dd as u32);
                for code2 in 0..tot {
                    let mut c2 = code2;
                    let mut f = Vec::new();
                    for _ in 0..dd {
                        f.push((c2 % p as u128) as u64);
                        c2 /= p as u128;
                    }
                    f.push(1);
                    if rem(&poly, &f, p).is_empty() {
                        reducible = true;
                        break 'outer;
                    }
                }
            }
            if !reducible {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn rabin_matches_trial_division() {
        for (p, n) in [(2u64, 4usize), (3, 3), (5, 2), (2, 6), (3, 4)] {
            let total = (p as u128).pow(n as u32);
            let mut count = 0;
            for code in 0..total {
                let mut c = code;
                let mut poly = Vec::new();
                for _ in 0..n {
                    poly.push((c % p as u128) as u64);
                    c /= p as u128;
                }
                poly.push(1);
                if is_irreducible(&poly, p) {
                    count += 1;
                }
            }
            assert_eq!(count, count_irreducible_brute(p, n), "p={p} n={n}");
        }
    }

    #[test]
    fn least_irreducible_small_cases() {
        assert_eq!(least_irreducible(2, 2), vec![1, 1, 1]);
        assert_eq!(least_irreducible(3, 2), vec![1, 0, 1]);
        assert_eq!(least_irreducible(7, 1), vec![0, 1]);
        assert_eq!(least_irreducible(2, 3), vec![1, 1, 0, 1]);
    }

    #[test]
    fn prime_power_decomposition() {
        assert_eq!(prime_power(49), Some((7, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn squarefree_detection() {
        // x^3 + x over F_7 = x (x^2 + 1) squarefree; (x+1)^2 is not
        assert!(is_squarefree(&[0, 1, 0, 1], 7));
        assert!(!is_squarefree(&[1, 2, 1], 7));
    }
}
