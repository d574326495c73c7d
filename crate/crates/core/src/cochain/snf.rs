//! Diagonalization of integer matrices over ℤ/q for prime powers `q`.
//!
//! The pivot is an entry of minimal valuation, so it divides every
//! remaining entry and one elimination pass per row and column suffices.
//! Composite moduli are handled by splitting along [`prime_power_parts`].

use num_integer::Integer;

/// `P·A·Q = diag(p_0, …)` over ℤ/k, with `Q` and `Q⁻¹` tracked.
#[derive(Clone, Debug)]
pub struct SnfMod {
    pub k: u64,
    pub rows: usize,
    pub cols: usize,
    /// Pivot values; entries beyond `pivots.len()` are zero.
    pub pivots: Vec<u64>,
    /// Column transform, row-major `cols × cols`.
    pub q: Vec<u64>,
    pub q_inv: Vec<u64>,
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m as i128) as u64
}

/// Solves `p·x ≡ e (mod k)` given `gcd(p, k) | e`.
fn divide(e: u64, p: u64, k: u64) -> u64 {
    let d = p.gcd(&k);
    debug_assert_eq!(e % d, 0);
    let m = k / d;
    if m == 1 {
        return 0;
    }
    ((((e / d) % m) as u128 * mod_inverse((p / d) % m, m) as u128) % m as u128) as u64
}

impl SnfMod {
    /// `a` is row-major `rows × cols` with entries already reduced mod `k`,
    /// a prime power.
    pub fn new(mut a: Vec<u64>, rows: usize, cols: usize, k: u64) -> SnfMod {
        assert!(k >= 2 && a.len() == rows * cols);
        assert_eq!(prime_powers(k).len(), 1, "modulus must be a prime power");
        let mut q = identity(cols);
        let mut q_inv = identity(cols);
        let mut pivots = Vec::new();
        let mulmod = |x: u64, y: u64| ((x as u128 * y as u128) % k as u128) as u64;
        for t in 0..rows.min(cols) {
            // pivot with minimal gcd against k
            let mut best: Option<(u64, usize, usize)> = None;
            'search: for i in t..rows {
                for j in t..cols {
                    let e = a[i * cols + j];
                    if e == 0 {
                        continue;
                    }
                    let d = e.gcd(&k);
                    if best.is_none_or(|(bd, _, _)| d < bd) {
                        best = Some((d, i, j));
                        if d == 1 {
                            break 'search;
                        }
                    }
                }
            }
            let Some((_, pi, pj)) = best else { break };
            if pi != t {
                for j in 0..cols {
                    a.swap(pi * cols + j, t * cols + j);
                }
            }
            if pj != t {
                for i in 0..rows {
                    a.swap(i * cols + pj, i * cols + t);
                }
                for i in 0..cols {
                    q.swap(i * cols + pj, i * cols + t);
                }
                for j in 0..cols {
                    q_inv.swap(pj * cols + j, t * cols + j);
                }
            }
            let p = a[t * cols + t];
            // clear column t below the pivot
            for i in t + 1..rows {
                let e = a[i * cols + t];
                if e == 0 {
                    continue;
                }
                let x = divide(e, p, k);
                for j in t..cols {
                    let s = mulmod(x, a[t * cols + j]);
                    a[i * cols + j] = (a[i * cols + j] + k - s) % k;
                }
            }
            // clear row t right of the pivot: col_j -= x·col_t
            for j in t + 1..cols {
                let e = a[t * cols + j];
                if e == 0 {
                    continue;
                }
                let x = divide(e, p, k);
                a[t * cols + j] = 0;
                for i in 0..cols {
                    let s = mulmod(x, q[i * cols + t]);
                    q[i * cols + j] = (q[i * cols + j] + k - s) % k;
                }
                for c in 0..cols {
                    let s = mulmod(x, q_inv[j * cols + c]);
                    q_inv[t * cols + c] = (q_inv[t * cols + c] + s) % k;
                }
            }
            pivots.push(p);
        }
        SnfMod {
            k,
            rows,
            cols,
            pivots,
            q,
            q_inv,
        }
    }

    /// Column `j` of `Q`.
    pub fn q_column(&self, j: usize) -> Vec<u64> {
        (0..self.cols).map(|i| self.q[i * self.cols + j]).collect()
    }

    /// `Q⁻¹ v`.
    pub fn apply_q_inv(&self, v: &[u64]) -> Vec<u64> {
        (0..self.cols)
            .map(|i| {
                let row = &self.q_inv[i * self.cols..(i + 1) * self.cols];
                let s: u128 = row.iter().zip(v).map(|(&a, &b)| a as u128 * b as u128).sum();
                (s % self.k as u128) as u64
            })
            .collect()
    }

    /// `gcd(p_t, k)` per coordinate, `k` for the zero diagonal slots.
    pub fn divisors(&self) -> Vec<u64> {
        (0..self.cols)
            .map(|t| self.pivots.get(t).map_or(self.k, |&p| p.gcd(&self.k)))
            .collect()
    }

    /// Generators of `{x : A x ≡ 0}`.
    pub fn kernel(&self) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        for (t, d) in self.divisors().into_iter().enumerate() {
            if t < self.pivots.len() {
                if d == 1 {
                    continue;
                }
                let scale = self.k / d;
                out.push(self.q_column(t).into_iter().map(|x| (x * scale) % self.k).collect());
            } else {
                out.push(self.q_column(t));
            }
        }
        out
    }

    /// Cyclic orders of the cokernel `(ℤ/k)^rows / im A`, trivial ones dropped.
    pub fn cokernel(&self) -> Vec<u64> {
        let mut orders: Vec<u64> = self.pivots.iter().map(|&p| p.gcd(&self.k)).collect();
        orders.extend(std::iter::repeat_n(self.k, self.rows - self.pivots.len()));
        invariant_factors(&orders)
    }
}

fn identity(n: usize) -> Vec<u64> {
    let mut m = vec![0; n * n];
    for i in 0..n {
        m[i * n + i] = 1;
    }
    m
}

fn prime_powers(mut n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut q = 1;
            while n % p == 0 {
                n /= p;
                q *= p;
            }
            out.push((p, q));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, n));
    }
    out
}

/// The prime-power factors of `k`.
pub fn prime_power_parts(k: u64) -> Vec<u64> {
    prime_powers(k).into_iter().map(|(_, q)| q).collect()
}

/// The CRT idempotent that is 1 mod `q` and 0 mod `k/q`.
pub fn crt_idempotent(q: u64, k: u64) -> u64 {
    let r = k / q;
    if r == 1 {
        return 1;
    }
    (r as u128 * mod_inverse(r % q, q) as u128 % k as u128) as u64
}

/// Invariant factors `d_1 | d_2 | …` of `⊕ ℤ/n_i`, ones dropped.
pub fn invariant_factors(orders: &[u64]) -> Vec<u64> {
    let mut by_prime: std::collections::BTreeMap<u64, Vec<u64>> = Default::default();
    for &n in orders {
        for (p, q) in prime_powers(n) {
            by_prime.entry(p).or_default().push(q);
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for mut qs in by_prime.into_values() {
        qs.sort_unstable_by(|a, b| b.cmp(a));
        for (i, q) in qs.into_iter().enumerate() {
            out[len - 1 - i] *= q;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat_mul(a: &[u64], b: &[u64], n: usize, k: u64) -> Vec<u64> {
        let mut c = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                c[i * n + j] = (0..n).map(|l| a[i * n + l] * b[l * n + j]).sum::<u64>() % k;
            }
        }
        c
    }

    #[test]
    fn invariant_factor_normal_form() {
        assert_eq!(invariant_factors(&[2, 3]), vec![6]);
        assert_eq!(invariant_factors(&[4, 2, 1]), vec![2, 4]);
        assert_eq!(invariant_factors(&[1, 1]), Vec::<u64>::new());
        assert_eq!(invariant_factors(&[6, 4]), vec![2, 12]);
    }

    #[test]
    fn kernel_and_q_inverse() {
        // d: C¹(Bℤ₄) → C²(Bℤ₄) restricted to a 2×2 toy block over ℤ/4
        let a = vec![2, 0, 0, 3];
        let s = SnfMod::new(a.clone(), 2, 2, 4);
        assert_eq!(mat_mul(&s.q, &s.q_inv, 2, 4), identity(2));
        let ker = s.kernel();
        assert_eq!(ker.len(), 1);
        let v = &ker[0];
        assert_eq!((2 * v[0]) % 4, 0);
        assert_eq!((3 * v[1]) % 4, 0);
        assert_eq!(s.cokernel(), vec![2]);
    }

    #[test]
    fn prime_power_modulus() {
        let a = vec![2, 4, 6, 3, 0, 7, 4, 4, 0];
        let s = SnfMod::new(a.clone(), 3, 3, 8);
        assert_eq!(mat_mul(&s.q, &s.q_inv, 3, 8), identity(3));
        for v in s.kernel() {
            for i in 0..3 {
                let r: u64 = (0..3).map(|j| a[i * 3 + j] * v[j]).sum();
                assert_eq!(r % 8, 0);
            }
        }
    }

    #[test]
    fn crt_parts() {
        assert_eq!(prime_power_parts(12), vec![4, 3]);
        for q in prime_power_parts(12) {
            let e = crt_idempotent(q, 12);
            assert_eq!((e % q, e % (12 / q)), (1, 0));
        }
        assert_eq!(crt_idempotent(8, 8), 1);
    }
}
