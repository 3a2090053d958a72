//! Exact coefficient engines.
//!
//! Ordered trees with gamma at most `k` satisfy
//! `F = x + F^2 - 2^(k-1) x^(k+1)`; unordered ones satisfy
//! `W = x + W^2/2 + W(x^2)/2 - x^(k+1)`. Both are solved coefficient by
//! coefficient in big integers. The unordered half terms use the classical
//! odd/even split so that no intermediate value leaves the integers.
//!
//! Tables are memoized per thread and grown on demand.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::tree::{self, BinaryTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Ordered,
    Unordered,
}

/// Upper bound on gamma. `Unbounded` is the unconstrained family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cap {
    At(usize),
    Unbounded,
}

impl Cap {
    fn excludes_size(self, n: usize) -> bool {
        matches!(self, Cap::At(k) if n == k + 1)
    }
}

/// Coefficients `[x^n]` for `n = 1, 2, ...` of one capped generating function.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    family: Family,
    cap: Cap,
    // index 0 is a zero placeholder so that coeffs[n] is the size-n count
    coeffs: Vec<BigInt>,
}

impl CoefficientTable {
    pub fn new(family: Family, cap: Cap) -> Self {
        CoefficientTable {
            family,
            cap,
            coeffs: vec![BigInt::zero()],
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn cap(&self) -> Cap {
        self.cap
    }

    /// Counts for sizes `1..=len`, as computed so far.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs[1..]
    }

    pub fn len(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coefficient(&mut self, n: usize) -> &BigInt {
        self.extend_to(n);
        &self.coeffs[n]
    }

    pub fn extend_to(&mut self, n: usize) {
        while self.coeffs.len() <= n {
            let next = self.next_coefficient();
            self.coeffs.push(next);
        }
    }

    fn next_coefficient(&self) -> BigInt {
        let n = self.coeffs.len();
        let c = &self.coeffs;
        if self.cap == Cap::At(0) {
            return BigInt::zero();
        }
        if n == 1 {
            return BigInt::one();
        }
        let mut acc = BigInt::zero();
        for i in 1..n.div_ceil(2) {
            acc += &c[i] * &c[n - i];
        }
        match self.family {
            Family::Ordered => {
                acc <<= 1;
                if n.is_multiple_of(2) {
                    acc += &c[n / 2] * &c[n / 2];
                }
                if let Cap::At(k) = self.cap {
                    if self.cap.excludes_size(n) {
                        // 2^(k-2) caterpillars of size k, hung left or right of a leaf
                        acc -= BigInt::one() << (k - 1);
                    }
                }
            }
            Family::Unordered => {
                if n.is_multiple_of(2) {
                    let h = &c[n / 2];
                    acc += (h * (h + 1u32)) >> 1;
                }
                if self.cap.excludes_size(n) {
                    acc -= 1u32;
                }
            }
        }
        acc
    }
}

#[derive(Default)]
struct Tables {
    tables: HashMap<(Family, Cap), CoefficientTable>,
    catalan_deficits: HashMap<usize, BigInt>,
}

impl Tables {
    fn coefficient(&mut self, family: Family, cap: Cap, n: usize) -> BigInt {
        self.tables
            .entry((family, cap))
            .or_insert_with(|| CoefficientTable::new(family, cap))
            .coefficient(n)
            .clone()
    }
}

thread_local! {
    static TABLES: RefCell<Tables> = RefCell::new(Tables::default());
}

fn memo(family: Family, cap: Cap, n: usize) -> BigInt {
    assert!(n >= 1, "sizes start at 1");
    TABLES.with(|t| t.borrow_mut().coefficient(family, cap, n))
}

/// Number of ordered trees with `n` leaves: 1, 1, 2, 5, 14, 42, ...
pub fn catalan(n: usize) -> BigInt {
    memo(Family::Ordered, Cap::Unbounded, n)
}

/// Ordered trees of size `n` whose biggest caterpillar has at most `k` leaves.
/// `k = 0` gives 0.
pub fn f_minus(k: usize, n: usize) -> BigInt {
    memo(Family::Ordered, Cap::At(k), n)
}

/// Ordered trees of size `n` with gamma at least `k`.
pub fn f_plus(k: usize, n: usize) -> BigInt {
    catalan(n) - f_minus(k.saturating_sub(1), n)
}

/// Ordered trees of size `n` with gamma exactly `k`.
pub fn f_exact(k: usize, n: usize) -> BigInt {
    f_minus(k, n) - f_minus(k.saturating_sub(1), n)
}

/// Unordered trees with `n` leaves: 1, 1, 1, 2, 3, 6, 11, 23, 46, 98, ...
pub fn wedderburn(n: usize) -> BigInt {
    memo(Family::Unordered, Cap::Unbounded, n)
}

/// Unordered trees of size `n` with gamma at most `k`.
pub fn w_minus(k: usize, n: usize) -> BigInt {
    memo(Family::Unordered, Cap::At(k), n)
}

/// Unordered trees of size `n` with gamma exactly `k`.
pub fn w_exact(k: usize, n: usize) -> BigInt {
    w_minus(k, n) - w_minus(k.saturating_sub(1), n)
}

/// Count of trees of size `n` with gamma at most `k`, in either family.
pub fn count_at_most(family: Family, k: usize, n: usize) -> BigInt {
    memo(family, Cap::At(k), n)
}

/// Count of all trees of size `n` in a family.
pub fn count_all(family: Family, n: usize) -> BigInt {
    memo(family, Cap::Unbounded, n)
}

/// A full table of `n = 1..=n_max` coefficients.
pub fn table(family: Family, cap: Cap, n_max: usize) -> CoefficientTable {
    let mut t = CoefficientTable::new(family, cap);
    t.extend_to(n_max);
    t
}

/// `[x^n] (C(x) - F_k(x))`: the ordered trees of size `n` with gamma > `k`.
///
/// Computed from `D = 2 C D - D^2 + 2^(k-1) x^(k+1)`, which only involves
/// coefficients `k+1..=n` of `D`, instead of differencing two full tables.
fn catalan_deficit(k: usize, n: usize, catalans: &[BigInt]) -> BigInt {
    if n <= k {
        return BigInt::zero();
    }
    let mut d = vec![BigInt::zero(); n + 1];
    for j in k + 1..=n {
        let mut acc = BigInt::zero();
        for i in 1..j - k {
            acc += &catalans[i] * &d[j - i];
        }
        acc <<= 1;
        if j >= 2 * k + 2 {
            let mut sq = BigInt::zero();
            for a in k + 1..j.div_ceil(2) {
                sq += &d[a] * &d[j - a];
            }
            sq <<= 1;
            if j % 2 == 0 {
                sq += &d[j / 2] * &d[j / 2];
            }
            acc -= sq;
        }
        if j == k + 1 {
            acc += BigInt::one() << (k - 1);
        }
        d[j] = acc;
    }
    d.swap_remove(n)
}

/// Exact mean of gamma over the `catalan(n)` ordered trees of size `n`:
/// `1 + sum_{k=1}^{n-1} (C_n - f_k(n)) / C_n`.
pub fn expected_gamma_exact(n: usize) -> BigRational {
    assert!(n >= 1, "sizes start at 1");
    let cn = catalan(n);
    let catalans: Vec<BigInt> = std::iter::once(BigInt::zero())
        .chain((1..=n).map(catalan))
        .collect();
    let total = TABLES.with(|t| {
        if let Some(v) = t.borrow().catalan_deficits.get(&n) {
            return v.clone();
        }
        let mut total = BigInt::zero();
        for k in 1..n {
            total += catalan_deficit(k, n, &catalans);
        }
        t.borrow_mut().catalan_deficits.insert(n, total.clone());
        total
    });
    let (q, r) = total.div_rem(&cn);
    BigRational::from_integer(q + 1u32) + BigRational::new(r, cn)
}

/// Exhaustive gamma histogram over every tree of size `n`, computed by
/// enumeration. Keys run over every achievable range (`2..=n`, or `{1}` when
/// `n = 1`) and include zero counts.
pub fn gamma_histogram_oracle(n: usize, family: Family) -> Result<BTreeMap<usize, BigInt>> {
    let mut hist: BTreeMap<usize, BigInt> = if n == 1 {
        BTreeMap::from([(1, BigInt::zero())])
    } else {
        (2..=n).map(|k| (k, BigInt::zero())).collect()
    };
    let mut bump = |g: usize| *hist.entry(g).or_default() += 1u32;
    match family {
        Family::Ordered => tree::enumerate_ordered(n)?.for_each(|t| bump(t.gamma())),
        Family::Unordered => tree::enumerate_unordered(n)?.for_each(|t| bump(t.gamma())),
    }
    Ok(hist)
}

/// Histogram predicted by the coefficient engines, keyed like
/// [`gamma_histogram_oracle`].
pub fn gamma_histogram(n: usize, family: Family) -> BTreeMap<usize, BigInt> {
    let range = if n == 1 { 1..=1 } else { 2..=n };
    range
        .map(|k| {
            let c = match family {
                Family::Ordered => f_exact(k, n),
                Family::Unordered => w_exact(k, n),
            };
            (k, c)
        })
        .collect()
}
