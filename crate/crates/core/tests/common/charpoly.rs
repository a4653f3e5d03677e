//! Exact eigenvalues of small integer symmetric matrices.
//!
//! The characteristic polynomial is built with rational arithmetic, split
//! into squarefree factors (Yun) so multiplicities are known exactly, and
//! the real roots of each factor are isolated with Sturm sequences and
//! refined by bisection at dyadic points.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Coefficients, lowest degree first; no trailing zeros.
type Poly = Vec<BigRational>;

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn degree(p: &Poly) -> usize {
    p.len().saturating_sub(1)
}

fn eval(p: &Poly, x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

fn derivative(p: &Poly) -> Poly {
    trim(p.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64)).collect())
}

fn sub(a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    let z = BigRational::zero();
    trim((0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect())
}

/// Quotient and remainder.
fn divmod(a: &Poly, b: &Poly) -> (Poly, Poly) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = a.clone();
    let db = degree(b);
    let lead = b.last().unwrap().clone();
    let mut quot = vec![BigRational::zero(); a.len().saturating_sub(db).max(1)];
    while !r.is_empty() && r.len() > db {
        let shift = r.len() - 1 - db;
        let c = r.last().unwrap() / &lead;
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] -= &c * bc;
        }
        quot[shift] = c;
        r.pop();
        r = trim(r);
    }
    (trim(quot), r)
}

fn monic(p: Poly) -> Poly {
    let lead = p.last().unwrap().clone();
    p.into_iter().map(|c| c / &lead).collect()
}

fn gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let (_, r) = divmod(&a, &b);
        a = b;
        b = r;
    }
    monic(a)
}

fn exact_div(a: &Poly, b: &Poly) -> Poly {
    let (quot, r) = divmod(a, b);
    assert!(r.is_empty(), "inexact polynomial division");
    quot
}

/// `det(xI - A)` by the Faddeev–LeVerrier recurrence.
pub fn char_poly(a: &[Vec<i64>]) -> Vec<BigRational> {
    let n = a.len();
    let am: Vec<Vec<BigRational>> = a.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigRational::zero();
                for l in 0..n {
                    s += &am[i][l] * &m[l][j];
                }
                next[i][j] = s;
            }
            next[i][i] += &coeffs[n - k + 1];
        }
        m = next;
        let mut tr = BigRational::zero();
        for i in 0..n {
            for l in 0..n {
                tr += &am[i][l] * &m[l][i];
            }
        }
        coeffs[n - k] = -tr / q(k as i64);
    }
    coeffs
}

/// Squarefree factors with their multiplicities (Yun's algorithm).
fn squarefree(f: &Poly) -> Vec<(Poly, usize)> {
    let df = derivative(f);
    let a0 = gcd(f, &df);
    let mut b = exact_div(f, &a0);
    let c = exact_div(&df, &a0);
    let mut d = sub(&c, &derivative(&b));
    let mut out = Vec::new();
    let mut i = 1;
    while degree(&b) > 0 {
        let a = if d.is_empty() { b.clone() } else { gcd(&b, &d) };
        let nb = exact_div(&b, &a);
        let nc = if d.is_empty() { Vec::new() } else { exact_div(&d, &a) };
        if degree(&a) > 0 {
            out.push((a, i));
        }
        d = sub(&nc, &derivative(&nb));
        b = nb;
        i += 1;
    }
    out
}

fn sturm_chain(p: &Poly) -> Vec<Poly> {
    let mut chain = vec![p.clone(), derivative(p)];
    loop {
        let k = chain.len();
        let (_, r) = divmod(&chain[k - 2], &chain[k - 1]);
        if r.is_empty() {
            break;
        }
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    chain
}

fn sign_changes(chain: &[Poly], x: &BigRational) -> usize {
    let signs: Vec<bool> =
        chain.iter().map(|p| eval(p, x)).filter(|v| !v.is_zero()).map(|v| v.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn isolate(chain: &[Poly], lo: BigRational, hi: BigRational, tol: &BigRational, out: &mut Vec<f64>) {
    let count = sign_changes(chain, &lo) - sign_changes(chain, &hi);
    if count == 0 {
        return;
    }
    if count == 1 {
        out.push(refine(&chain[0], lo, hi, tol).to_f64().unwrap());
        return;
    }
    let mid = (&lo + &hi) / q(2);
    isolate(chain, lo, mid.clone(), tol, out);
    isolate(chain, mid, hi, tol, out);
}

/// Bisects the single simple root of `p` in `(lo, hi]`.
fn refine(p: &Poly, mut lo: BigRational, mut hi: BigRational, tol: &BigRational) -> BigRational {
    let mut at_hi = eval(p, &hi);
    if at_hi.is_zero() {
        return hi;
    }
    while &hi - &lo >= *tol {
        let mid = (&lo + &hi) / q(2);
        let v = eval(p, &mid);
        if v.is_zero() {
            return mid;
        }
        // One simple root: the sign flips only across it.
        if v.is_positive() == at_hi.is_positive() {
            hi = mid;
            at_hi = v;
        } else {
            lo = mid;
        }
    }
    (lo + hi) / q(2)
}

/// All eigenvalues of the integer symmetric matrix `a`, ascending, to
/// within `1e-10`. Every root must lie in `(-bound, bound]`.
pub fn exact_eigenvalues(a: &[Vec<i64>], bound: i64) -> Vec<f64> {
    let p = char_poly(a);
    let tol = BigRational::new(BigInt::one(), BigInt::from(1u64 << 34));
    let mut roots = Vec::new();
    for (factor, mult) in squarefree(&p) {
        let chain = sturm_chain(&factor);
        let mut found = Vec::new();
        isolate(&chain, q(-bound), q(bound), &tol, &mut found);
        assert_eq!(found.len(), degree(&factor), "factor has non-real or out-of-range roots");
        for r in found {
            roots.extend(std::iter::repeat_n(r, mult));
        }
    }
    assert_eq!(roots.len(), a.len());
    roots.sort_by(f64::total_cmp);
    roots
}
