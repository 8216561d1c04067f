//! Exact linear algebra over Q for small Hecke matrices: characteristic polynomials, Sturm root
//! isolation, and adjugates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Matrix = Vec<Vec<BigRational>>;
/// Coefficients from the constant term upwards.
pub type Poly = Vec<BigRational>;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { q(1) } else { q(0) }).collect()).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| a[i].iter().zip(b).fold(q(0), |s, (x, row)| s + x * &row[j]))
                .collect()
        })
        .collect()
}

/// Monic characteristic polynomial det(xI − A) by Faddeev–LeVerrier.
pub fn charpoly(a: &Matrix) -> Poly {
    let n = a.len();
    let mut c = vec![q(0); n + 1];
    c[n] = q(1);
    let mut m = vec![vec![q(0); n]; n];
    for k in 1..=n {
        // M_k = A M_{k−1} + c_{n−k+1} I, c_{n−k} = −tr(A M_k)/k
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += &c[n - k + 1];
        }
        m = mat_mul(a, &m);
        let tr = (0..n).fold(q(0), |s, i| s + &m[i][i]);
        c[n - k] = -tr / q(k as i64);
    }
    c
}

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

pub fn eval(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter().rev().fold(q(0), |acc, c| acc * x + c)
}

pub fn derivative(p: &[BigRational]) -> Poly {
    if p.len() <= 1 {
        return vec![q(0)];
    }
    p.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64)).collect()
}

pub fn rem(a: &[BigRational], b: &[BigRational]) -> Poly {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    let lead = b.last().expect("nonempty divisor").clone();
    while r.len() >= b.len() && !(r.len() == 1 && r[0].is_zero()) {
        let t = r.last().unwrap() / &lead;
        let shift = r.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &t * c;
        }
        r.pop();
        r = trim(r);
        if r.is_empty() {
            r.push(q(0));
        }
    }
    r
}

fn degree(p: &[BigRational]) -> usize {
    trim(p.to_vec()).len() - 1
}

pub fn gcd(a: &[BigRational], b: &[BigRational]) -> Poly {
    let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
    while !(y.len() == 1 && y[0].is_zero()) {
        let r = rem(&x, &y);
        x = y;
        y = r;
    }
    x
}

pub fn is_squarefree(p: &[BigRational]) -> bool {
    degree(&gcd(p, &derivative(p))) == 0
}

fn sturm_chain(p: &[BigRational]) -> Vec<Poly> {
    let mut chain = vec![trim(p.to_vec()), trim(derivative(p))];
    loop {
        let n = chain.len();
        let r: Poly = rem(&chain[n - 2], &chain[n - 1]).into_iter().map(|c| -c).collect();
        if r.len() == 1 && r[0].is_zero() {
            break;
        }
        chain.push(r);
    }
    chain
}

fn sign_changes(chain: &[Poly], x: &BigRational) -> usize {
    let signs: Vec<i8> = chain
        .iter()
        .map(|p| {
            let v = eval(p, x);
            if v.is_zero() {
                0
            } else if v.is_positive() {
                1
            } else {
                -1
            }
        })
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots in (a, b].
fn roots_in(chain: &[Poly], a: &BigRational, b: &BigRational) -> usize {
    sign_changes(chain, a) - sign_changes(chain, b)
}

/// Isolates every real root of a squarefree polynomial and bisects each isolating interval to
/// width 2^{−bits}; returns the midpoints in increasing order.
pub fn real_roots(p: &[BigRational], bits: u32) -> Vec<BigRational> {
    let p = trim(p.to_vec());
    let lead = p.last().unwrap().abs();
    let bound = p.iter().fold(q(0), |m, c| if c.abs() > m { c.abs() } else { m }) / lead + q(1);
    let chain = sturm_chain(&p);
    let mut stack = vec![(-bound.clone(), bound)];
    let mut isolated = Vec::new();
    while let Some((a, b)) = stack.pop() {
        match roots_in(&chain, &a, &b) {
            0 => {}
            1 => isolated.push((a, b)),
            _ => {
                let mid = (&a + &b) / q(2);
                stack.push((mid.clone(), b));
                stack.push((a, mid));
            }
        }
    }
    let width = BigRational::new(BigInt::one(), BigInt::one() << bits as usize);
    let mut roots: Vec<BigRational> = isolated
        .into_iter()
        .map(|(mut a, mut b)| {
            while &b - &a > width {
                let mid = (&a + &b) / q(2);
                if eval(&p, &mid).is_zero() {
                    return mid;
                }
                if roots_in(&chain, &a, &mid) == 1 {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            (a + b) / q(2)
        })
        .collect();
    roots.sort();
    roots
}

pub fn determinant(a: &Matrix) -> BigRational {
    let n = a.len();
    let mut m = a.clone();
    let mut det = q(1);
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return q(0);
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..n {
                let t = &f * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    det
}

/// adj(A)_{ij} = (−1)^{i+j} det(A with row j and column i removed).
pub fn adjugate(a: &Matrix) -> Matrix {
    let n = a.len();
    if n == 1 {
        return vec![vec![q(1)]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let minor: Matrix = (0..n)
                        .filter(|&r| r != j)
                        .map(|r| (0..n).filter(|&c| c != i).map(|c| a[r][c].clone()).collect())
                        .collect();
                    let d = determinant(&minor);
                    if (i + j) % 2 == 0 {
                        d
                    } else {
                        -d
                    }
                })
                .collect()
        })
        .collect()
}
