//! Integer combinations of `n`-th roots of unity for `n = p^k`.
//!
//! Elements live in `Z[zeta_n]`, stored as sparse exponent -> coefficient maps.
//! With `s = p^(k-1)`, the only relations are `sum_j zeta^(r + j s) = 0`, so an
//! element vanishes iff every fiber `{r + j s : 0 <= j < p}` carries one
//! repeated coefficient.

use std::collections::HashMap;

use num_complex::Complex;

#[derive(Debug, Clone)]
pub(crate) struct CyclotomicSum {
    p: u64,
    exponent: u32,
    order: u64,
    coeffs: HashMap<u64, i64>,
}

impl CyclotomicSum {
    pub fn new(p: u64, k: u32) -> Self {
        CyclotomicSum {
            p,
            exponent: k,
            order: p.pow(k),
            coeffs: HashMap::new(),
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn add_term(&mut self, exponent: u64, c: i64) {
        let e = exponent % self.order;
        *self.coeffs.entry(e).or_insert(0) += c;
    }

    pub fn from_counts(p: u64, k: u32, counts: HashMap<u64, i64>) -> Self {
        let mut s = CyclotomicSum::new(p, k);
        s.coeffs = counts;
        s
    }

    /// `sign * zeta^shift * self`
    pub fn rotated(&self, shift: u64, sign: i64) -> Self {
        let mut out = CyclotomicSum {
            p: self.p,
            exponent: self.exponent,
            order: self.order,
            coeffs: HashMap::with_capacity(self.coeffs.len()),
        };
        for (e, c) in &self.coeffs {
            out.add_term(e + shift, sign * c);
        }
        out
    }

    pub fn scaled(&self, factor: i64) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c *= factor;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!((self.p, self.order), (other.p, other.order));
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            out.add_term(*e, -c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        if self.order == 1 {
            return self.coeffs.get(&0).copied().unwrap_or(0) == 0;
        }
        let stride = self.order / self.p;
        let mut seen = std::collections::HashSet::new();
        for &e in self.coeffs.keys() {
            let r = e % stride;
            if !seen.insert(r) {
                continue;
            }
            let first = self.coeffs.get(&r).copied().unwrap_or(0);
            for j in 1..self.p {
                if self.coeffs.get(&(r + j * stride)).copied().unwrap_or(0) != first {
                    return false;
                }
            }
        }
        true
    }

    /// Floating-point value, summed in exponent order.
    pub fn to_complex(&self) -> Complex<f64> {
        let mut terms: Vec<(u64, i64)> = self
            .coeffs
            .iter()
            .filter(|(_, c)| **c != 0)
            .map(|(e, c)| (*e, *c))
            .collect();
        terms.sort_unstable();
        let n = self.order as f64;
        let values: Vec<Complex<f64>> = terms
            .iter()
            .map(|(e, c)| {
                let (s, co) = (std::f64::consts::TAU * (*e as f64) / n).sin_cos();
                Complex::new(co, s) * (*c as f64)
            })
            .collect();
        crate::gauss::pairwise_sum(&values)
    }

    /// The quadratic Gauss sum `sum_t (t/p) zeta_p^t`, equal to `sqrt p` or `i sqrt p`.
    pub fn quadratic_gauss_sum(p: u64, k: u32) -> Self {
        debug_assert!(p % 2 == 1 && k >= 1);
        let mut out = CyclotomicSum::new(p, k);
        let step = out.order / p;
        for t in 1..p {
            let sym = if (1..p).any(|x| x * x % p == t) {
                1
            } else {
                -1
            };
            out.add_term(t * step, sym);
        }
        out
    }

    /// `zeta_8 + zeta_8^{-1} = sqrt 2`, for `8 | n`.
    pub fn sqrt_two(k: u32) -> Self {
        debug_assert!(k >= 3);
        let mut out = CyclotomicSum::new(2, k);
        let eighth = out.order / 8;
        out.add_term(eighth, 1);
        out.add_term(out.order - eighth, 1);
        out
    }
}
