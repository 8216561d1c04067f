//! Unevaluated-sum (hi + lo) arithmetic from error-free transformations.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Dd<T> {
    pub hi: T,
    pub lo: T,
}

fn two_sum<T: Real>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum<T: Real>(a: T, b: T) -> (T, T) {
    let s = a + b;
    (s, b - (s - a))
}

fn split<T: Real>(a: T) -> (T, T) {
    let splitter = T::lit(2.0).powi(((T::BITS + 1) / 2) as i32) + T::one();
    let t = splitter * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

fn two_prod<T: Real>(a: T, b: T) -> (T, T) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl<T: Real> Dd<T> {
    pub fn new(x: T) -> Self {
        Dd { hi: x, lo: T::zero() }
    }

    pub fn value(self) -> T {
        self.hi + self.lo
    }

    pub fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(s, e + self.lo + o.lo);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Self {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(p, e + self.hi * o.lo + self.lo * o.hi);
        Dd { hi, lo }
    }

    pub fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(Dd::new(q1)).neg());
        let q2 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_rounding_errors() {
        let third = Dd::new(1.0f64).div(Dd::new(3.0));
        let back = third.mul(Dd::new(3.0));
        assert!((back.hi - 1.0).abs() + back.lo.abs() < 1e-30);
        let h = 2f64.powi(-30);
        let (p, e) = two_prod(1.0 + h, 1.0 - h);
        assert_eq!(p, 1.0);
        assert_eq!(e, -h * h);
    }
}
