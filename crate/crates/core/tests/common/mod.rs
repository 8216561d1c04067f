//! Brute-force oracles shared by the integration tests.

use num_complex::Complex64;

/// Multiplication of a + bω with ω² = tω + n.
fn mul(t: i128, n: i128, x: (i128, i128), y: (i128, i128)) -> (i128, i128) {
    let (a, b) = x;
    let (c, d) = y;
    (a * c + n * b * d, a * d + b * c + t * b * d)
}

/// Sum over residues y mod c of e(Tr(η(αy + D ȳ)/(δc))), enumerated over the box
/// [0, N)² which covers each class of O/c exactly N = |N(c)| times.
pub fn brute_force(d: i64, alpha: (i128, i128), c: (i128, i128), eta: (i128, i128)) -> Complex64 {
    let (t, n) = if d % 4 == 1 { (1i128, (d as i128 - 1) / 4) } else { (0, d as i128) };
    let disc = if d % 4 == 1 { d as f64 } else { 4.0 * d as f64 };
    let sq = (d as f64).sqrt();
    let omegas = if d % 4 == 1 { [(1.0 + sq) / 2.0, (1.0 - sq) / 2.0] } else { [sq, -sq] };
    let delta = if d % 4 == 1 { (-1i128, 2i128) } else { (0, 2) };
    let norm_c = (c.0 * c.0 + t * c.0 * c.1 - n * c.1 * c.1).abs();
    let c_conj = (c.0 + t * c.1, -c.1);
    // x ∈ cO iff x·conj(c) has both coordinates divisible by N(c).
    let in_c = |x: (i128, i128)| {
        let p = mul(t, n, x, c_conj);
        p.0 % norm_c == 0 && p.1 % norm_c == 0
    };
    let embed = |x: (i128, i128), i: usize| x.0 as f64 + x.1 as f64 * omegas[i];
    let dc = mul(t, n, delta, c);
    let mut sum = Complex64::new(0.0, 0.0);
    for ya in 0..norm_c {
        for yb in 0..norm_c {
            let y = (ya, yb);
            let mut inv = None;
            'search: for za in 0..norm_c {
                for zb in 0..norm_c {
                    let p = mul(t, n, y, (za, zb));
                    if in_c((p.0 - 1, p.1)) {
                        inv = Some((za, zb));
                        break 'search;
                    }
                }
            }
            let Some(z) = inv else { continue };
            let ay = mul(t, n, alpha, y);
            let arg = mul(t, n, eta, (ay.0 + (disc as i128) * z.0, ay.1 + (disc as i128) * z.1));
            let theta: f64 = (0..2).map(|i| embed(arg, i) / embed(dc, i)).sum();
            sum += Complex64::from_polar(1.0, std::f64::consts::TAU * theta);
        }
    }
    sum / norm_c as f64
}
