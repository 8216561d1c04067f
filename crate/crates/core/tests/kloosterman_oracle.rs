//! Number-field Kloosterman sums against a brute-force enumeration that uses only coordinate
//! arithmetic and floating-point embeddings.

mod common;

use common::brute_force;
use num_complex::Complex64;
use rankin_core::kloosterman::{kloosterman_nf, moduli_up_to, KloostermanQuery};
use rankin_core::{BaseField, QuadInt, QuadraticField};

fn check_field(d: i64, max_norm: u64) {
    let f = QuadraticField::new(d).unwrap();
    let eta = f.tp_unit_generator;
    let alphas = [QuadInt::ONE, QuadInt::new(0, 1), QuadInt::new(2, 1), QuadInt::new(-3, 2)];
    for c in moduli_up_to(&f, max_norm).unwrap() {
        for &alpha in &alphas {
            for e in [QuadInt::ONE, eta] {
                let mut q = KloostermanQuery::new(BaseField::Quadratic(f.clone()), alpha, c);
                q.eta = e;
                let fast = kloosterman_nf::<f64>(&q).unwrap();
                let slow = brute_force(d, (alpha.a, alpha.b), (c.a, c.b), (e.a, e.b));
                let fast = Complex64::new(fast.re, fast.im);
                assert!(
                    (fast - slow).norm() < 1e-8,
                    "Q(√{d}), alpha {alpha}, c {c}, eta {e}: {fast} vs {slow}"
                );
            }
        }
    }
}

#[test]
fn golden_field_matches_brute_force() {
    check_field(5, 50);
}

#[test]
fn other_real_quadratic_fields_match_brute_force() {
    check_field(2, 50);
    check_field(13, 30);
}

#[test]
fn rational_rows_are_real() {
    for c in 1..=60i128 {
        let q = KloostermanQuery::new(BaseField::Rational, QuadInt::new(7, 0), QuadInt::new(c, 0));
        let kl = kloosterman_nf::<f64>(&q).unwrap();
        let direct: f64 = (0..c)
            .filter(|&x| num_integer_gcd(x, c) == 1)
            .map(|x| {
                let xb = (0..c).find(|&y| (x * y) % c == 1 % c).unwrap();
                (std::f64::consts::TAU * ((7 * x + xb) % c) as f64 / c as f64).cos()
            })
            .sum();
        assert!((kl.re - direct).abs() < 1e-9 && kl.im == 0.0);
    }
}

fn num_integer_gcd(a: i128, b: i128) -> i128 {
    if b == 0 { a.abs() } else { num_integer_gcd(b, a % b) }
}
