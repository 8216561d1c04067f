//! Real quadratic fields Q(√D) with exact integral arithmetic in the basis (1, ω).

use crate::arith::factorize;
use crate::error::{Error, Result};
use crate::scalar::Real;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// Element a + bω of the ring of integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadInt {
    pub a: i128,
    pub b: i128,
}

impl QuadInt {
    pub const ZERO: QuadInt = QuadInt { a: 0, b: 0 };
    pub const ONE: QuadInt = QuadInt { a: 1, b: 0 };

    pub fn new(a: i128, b: i128) -> Self {
        QuadInt { a, b }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn add(self, o: QuadInt) -> QuadInt {
        QuadInt::new(self.a + o.a, self.b + o.b)
    }

    pub fn sub(self, o: QuadInt) -> QuadInt {
        QuadInt::new(self.a - o.a, self.b - o.b)
    }

    pub fn scale(self, k: i128) -> QuadInt {
        QuadInt::new(self.a * k, self.b * k)
    }

    pub fn neg(self) -> QuadInt {
        QuadInt::new(-self.a, -self.b)
    }
}

impl std::fmt::Display for QuadInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}+{}w", self.a, self.b)
    }
}

/// Q or a real quadratic field.
#[derive(Debug, Clone, PartialEq)]
pub enum BaseField {
    Rational,
    Quadratic(QuadraticField),
}

impl BaseField {
    /// 1 for Q, D for Q(√D).
    pub fn field_disc(&self) -> i64 {
        match self {
            BaseField::Rational => 1,
            BaseField::Quadratic(f) => f.d,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticField {
    /// Squarefree D > 1.
    pub d: i64,
    /// ω² = trace_w·ω + norm_w.
    pub trace_w: i128,
    pub norm_w: i128,
    pub fundamental_unit: QuadInt,
    pub tp_unit_generator: QuadInt,
    pub different_gen: QuadInt,
    pub narrow_class_number: u32,
}

impl QuadraticField {
    pub fn new(d: i64) -> Result<Self> {
        if d <= 1 || factorize(d as u64).iter().any(|&(_, e)| e > 1) {
            return Err(Error::InvalidArgument(format!("D = {d} is not a squarefree integer > 1")));
        }
        let (trace_w, norm_w) = if d % 4 == 1 {
            (1, (d as i128 - 1) / 4)
        } else {
            (0, d as i128)
        };
        let mut f = QuadraticField {
            d,
            trace_w,
            norm_w,
            fundamental_unit: QuadInt::ONE,
            tp_unit_generator: QuadInt::ONE,
            different_gen: if d % 4 == 1 { QuadInt::new(-1, 2) } else { QuadInt::new(0, 2) },
            narrow_class_number: 0,
        };
        f.fundamental_unit = f.find_fundamental_unit()?;
        f.tp_unit_generator = if f.norm(f.fundamental_unit) == 1 {
            f.fundamental_unit
        } else {
            f.mul(f.fundamental_unit, f.fundamental_unit)
        };
        f.narrow_class_number = narrow_class_number(f.discriminant())?;
        Ok(f)
    }

    pub fn discriminant(&self) -> i64 {
        if self.d % 4 == 1 {
            self.d
        } else {
            4 * self.d
        }
    }

    pub fn require_narrow_class_one(&self) -> Result<()> {
        if self.narrow_class_number != 1 {
            return Err(Error::UnsupportedField(format!(
                "Q(sqrt {}) has narrow class number {}",
                self.d, self.narrow_class_number
            )));
        }
        Ok(())
    }

    /// Index [O^{×+} : O^{×2}].
    pub fn unit_index(&self) -> u32 {
        if self.norm(self.fundamental_unit) == 1 {
            2
        } else {
            1
        }
    }

    pub fn mul(&self, x: QuadInt, y: QuadInt) -> QuadInt {
        let bb = x.b * y.b;
        QuadInt::new(x.a * y.a + bb * self.norm_w, x.a * y.b + x.b * y.a + bb * self.trace_w)
    }

    pub fn pow(&self, x: QuadInt, e: u32) -> QuadInt {
        (0..e).fold(QuadInt::ONE, |acc, _| self.mul(acc, x))
    }

    pub fn conj(&self, x: QuadInt) -> QuadInt {
        QuadInt::new(x.a + x.b * self.trace_w, -x.b)
    }

    pub fn norm(&self, x: QuadInt) -> i128 {
        self.mul(x, self.conj(x)).a
    }

    pub fn trace(&self, x: QuadInt) -> i128 {
        2 * x.a + x.b * self.trace_w
    }

    /// Inverse of a unit.
    pub fn unit_inverse(&self, u: QuadInt) -> Option<QuadInt> {
        match self.norm(u) {
            1 => Some(self.conj(u)),
            -1 => Some(self.conj(u).neg()),
            _ => None,
        }
    }

    /// g^t for the totally positive generator g, t ∈ Z.
    pub fn tp_unit_power(&self, t: i64) -> QuadInt {
        let g = if t >= 0 {
            self.tp_unit_generator
        } else {
            self.conj(self.tp_unit_generator)
        };
        self.pow(g, t.unsigned_abs() as u32)
    }

    /// The two real embeddings (ω ↦ (t ± √D')/2).
    pub fn embed<T: Real>(&self, x: QuadInt) -> (T, T) {
        let sq = T::from_i64_exact(self.d).sqrt();
        let (w1, w2) = if self.trace_w == 1 {
            let h = T::lit(0.5);
            (h + h * sq, h - h * sq)
        } else {
            (sq, -sq)
        };
        let a = T::from_i128(x.a).unwrap();
        let b = T::from_i128(x.b).unwrap();
        (a + b * w1, a + b * w2)
    }

    fn find_fundamental_unit(&self) -> Result<QuadInt> {
        let d = self.d as i128;
        let limit = 10_000_000i128;
        for y in 1..limit {
            let base = d * y * y;
            let targets: [i128; 2] = if self.trace_w == 1 { [base - 4, base + 4] } else { [base - 1, base + 1] };
            for t in targets {
                if t <= 0 {
                    continue;
                }
                let x = isqrt(t);
                if x * x == t {
                    return Ok(if self.trace_w == 1 {
                        QuadInt::new((x - y) / 2, y)
                    } else {
                        QuadInt::new(x, y)
                    });
                }
            }
        }
        Err(Error::UnsupportedField(format!("fundamental unit of Q(sqrt {}) too large", self.d)))
    }

    /// Lattice cO in Hermite form: representatives i + jω, 0 ≤ i < a, 0 ≤ j < b, with (s, b) ∈ cO.
    pub fn residue_lattice(&self, c: QuadInt) -> Result<ResidueLattice> {
        if c.is_zero() {
            return Err(Error::InvalidArgument("modulus must be nonzero".into()));
        }
        let v1 = c;
        let v2 = self.mul(c, QuadInt::new(0, 1));
        let e = v1.b.extended_gcd(&v2.b);
        let b = e.gcd.abs();
        let sign = if e.gcd < 0 { -1 } else { 1 };
        let s = sign * (e.x * v1.a + e.y * v2.a);
        let n = self.norm(c).abs();
        let a = n / b;
        Ok(ResidueLattice { a, b, s: s.rem_euclid(a) })
    }

    pub fn reduce(&self, lat: &ResidueLattice, x: QuadInt) -> QuadInt {
        let j = x.b.rem_euclid(lat.b);
        let q = (x.b - j) / lat.b;
        let i = (x.a - q * lat.s).rem_euclid(lat.a);
        QuadInt::new(i, j)
    }

    /// All residues of O/cO, lexicographic in (j, i).
    pub fn residues(&self, lat: &ResidueLattice) -> Vec<QuadInt> {
        let mut out = Vec::with_capacity((lat.a * lat.b) as usize);
        for j in 0..lat.b {
            for i in 0..lat.a {
                out.push(QuadInt::new(i, j));
            }
        }
        out
    }

    /// Inverse of y modulo c via an integer Hermite reduction of (y, yω, c, cω); None if not a unit.
    pub fn inverse_mod(&self, y: QuadInt, c: QuadInt) -> Option<QuadInt> {
        let w = QuadInt::new(0, 1);
        let cols = [y, self.mul(y, w), c, self.mul(c, w)];
        let mut m: Vec<[i128; 2]> = cols.iter().map(|v| [v.a, v.b]).collect();
        let mut u: Vec<[i128; 4]> = (0..4)
            .map(|i| {
                let mut r = [0i128; 4];
                r[i] = 1;
                r
            })
            .collect();
        // Column echelon: row 0 gcd into column 0, then row 1 gcd into column 1.
        for (row, pivot) in [(0usize, 0usize), (1, 1)] {
            for j in pivot + 1..4 {
                if m[j][row] == 0 {
                    continue;
                }
                let e = m[pivot][row].extended_gcd(&m[j][row]);
                let (p, q) = (m[pivot][row] / e.gcd, m[j][row] / e.gcd);
                let (mp, mj) = (m[pivot], m[j]);
                let (up, uj) = (u[pivot], u[j]);
                for r in 0..2 {
                    m[pivot][r] = e.x * mp[r] + e.y * mj[r];
                    m[j][r] = -q * mp[r] + p * mj[r];
                }
                for r in 0..4 {
                    u[pivot][r] = e.x * up[r] + e.y * uj[r];
                    u[j][r] = -q * up[r] + p * uj[r];
                }
            }
        }
        // Lower-triangular H = [[h00, 0], [h10, h11]]; solve H w = (1, 0).
        let (h00, h10, h11) = (m[0][0], m[0][1], m[1][1]);
        if h00.abs() != 1 || h11.abs() != 1 {
            return None;
        }
        let w0 = h00;
        let w1 = -h10 * w0 * h11;
        let coeff: Vec<i128> = (0..4).map(|r| w0 * u[0][r] + w1 * u[1][r]).collect();
        let z = QuadInt::new(coeff[0], coeff[1]);
        let lat = self.residue_lattice(c).ok()?;
        let z = self.reduce(&lat, z);
        debug_assert_eq!(self.reduce(&lat, self.mul(y, z)), self.reduce(&lat, QuadInt::ONE));
        Some(z)
    }

    /// Number of integral ideals dividing (c), by enumeration of Hermite-form sublattices.
    pub fn ideal_divisor_count(&self, c: QuadInt) -> u64 {
        let n = self.norm(c).unsigned_abs();
        let mut count = 0;
        for m in 1..=n {
            if n % m == 0 {
                count += self
                    .ideals_of_norm(m as i128)
                    .iter()
                    .filter(|lat| lat.contains(c))
                    .count() as u64;
            }
        }
        count
    }

    /// Integral ideals of norm n as Hermite lattices.
    pub fn ideals_of_norm(&self, n: i128) -> Vec<ResidueLattice> {
        let mut out = Vec::new();
        for a in 1..=n {
            if n % a != 0 {
                continue;
            }
            let b = n / a;
            for s in 0..a {
                let lat = ResidueLattice { a, b, s };
                let w = QuadInt::new(0, 1);
                if lat.contains(self.mul(QuadInt::new(a, 0), w)) && lat.contains(self.mul(QuadInt::new(s, b), w)) {
                    out.push(lat);
                }
            }
        }
        out
    }
}

/// Sublattice with basis (a, 0), (s, b) in ω-coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidueLattice {
    pub a: i128,
    pub b: i128,
    pub s: i128,
}

impl ResidueLattice {
    pub fn index(&self) -> i128 {
        self.a * self.b
    }

    pub fn contains(&self, x: QuadInt) -> bool {
        x.b % self.b == 0 && (x.a - (x.b / self.b) * self.s) % self.a == 0
    }
}

pub fn isqrt(n: i128) -> i128 {
    if n < 0 {
        return -1;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Proper equivalence classes of primitive indefinite forms of discriminant `disc`, via cycles of
/// reduced forms.
pub fn narrow_class_number(disc: i64) -> Result<u32> {
    let disc = disc as i128;
    let r = isqrt(disc);
    if r * r == disc {
        return Err(Error::InvalidArgument("discriminant is a square".into()));
    }
    let sq = (disc as f64).sqrt();
    let is_reduced = |a: i128, b: i128| b > 0 && (b as f64) < sq && ((sq - 2.0 * a.abs() as f64).abs()) < b as f64;
    let mut forms = Vec::new();
    for b in 1..=r {
        if (b * b - disc) % 4 != 0 {
            continue;
        }
        let ac = (b * b - disc) / 4;
        for a in 1..=ac.abs() {
            if ac % a != 0 {
                continue;
            }
            for sa in [a, -a] {
                let c = ac / sa;
                if is_reduced(sa, b) && sa.gcd(&b).gcd(&c) == 1 {
                    forms.push((sa, b, c));
                }
            }
        }
    }
    forms.sort();
    let rho = |(_, b, c): (i128, i128, i128)| {
        let m = 2 * c.abs();
        let lo = r - m + 1;
        let nb = lo + (-b - lo).rem_euclid(m);
        (c, nb, (nb * nb - disc) / (4 * c))
    };
    let mut seen = vec![false; forms.len()];
    let mut cycles = 0;
    for start in 0..forms.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut cur = forms[start];
        for _ in 0..=forms.len() {
            let idx = forms
                .binary_search(&cur)
                .map_err(|_| Error::Enumeration(format!("rho left the reduced set at {cur:?}")))?;
            if seen[idx] {
                break;
            }
            seen[idx] = true;
            cur = rho(cur);
        }
    }
    Ok(cycles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn narrow_class_numbers() {
        assert_eq!(narrow_class_number(5).unwrap(), 1);
        assert_eq!(narrow_class_number(8).unwrap(), 1);
        assert_eq!(narrow_class_number(12).unwrap(), 2);
        assert_eq!(narrow_class_number(13).unwrap(), 1);
        assert_eq!(narrow_class_number(40).unwrap(), 2);
        assert_eq!(narrow_class_number(21).unwrap(), 2);
        assert_eq!(narrow_class_number(60).unwrap(), 4);
    }

    #[test]
    fn golden_field_data() {
        let f = QuadraticField::new(5).unwrap();
        assert_eq!(f.fundamental_unit, QuadInt::new(0, 1));
        assert_eq!(f.norm(f.fundamental_unit), -1);
        assert_eq!(f.tp_unit_generator, QuadInt::new(1, 1));
        assert_eq!(f.norm(f.different_gen), -5);
        assert_eq!(f.narrow_class_number, 1);
        assert_eq!(f.unit_index(), 1);
        let (g1, g2): (f64, f64) = f.embed(f.tp_unit_generator);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((g1 - phi * phi).abs() < 1e-14 && (g1 * g2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn other_fields() {
        let f = QuadraticField::new(3).unwrap();
        assert_eq!(f.fundamental_unit, QuadInt::new(2, 1));
        assert_eq!(f.norm(f.different_gen).abs(), 12);
        assert!(f.require_narrow_class_one().is_err());
        let f = QuadraticField::new(2).unwrap();
        assert_eq!(f.fundamental_unit, QuadInt::new(1, 1));
        assert!(QuadraticField::new(8).is_err());
    }

    #[test]
    fn residue_inverse_matches_search() {
        let f = QuadraticField::new(5).unwrap();
        for c in [QuadInt::new(2, 0), QuadInt::new(3, 1), QuadInt::new(4, -1), QuadInt::new(7, 0)] {
            let lat = f.residue_lattice(c).unwrap();
            assert_eq!(lat.index(), f.norm(c).abs());
            let res = f.residues(&lat);
            let one = f.reduce(&lat, QuadInt::ONE);
            for &y in &res {
                let brute = res.iter().find(|&&z| f.reduce(&lat, f.mul(y, z)) == one).copied();
                assert_eq!(f.inverse_mod(y, c), brute, "y = {y}, c = {c}");
            }
        }
    }

    #[test]
    fn ideal_counts_by_lattices() {
        let f = QuadraticField::new(5).unwrap();
        let expected = [1usize, 0, 0, 1, 1, 0, 0, 0, 1, 0, 2];
        for (n, &e) in expected.iter().enumerate() {
            assert_eq!(f.ideals_of_norm(n as i128 + 1).len(), e, "norm {}", n + 1);
        }
        assert_eq!(f.ideal_divisor_count(QuadInt::new(2, 0)), 2);
        assert_eq!(f.ideal_divisor_count(QuadInt::new(11, 0)), 4);
    }
}
