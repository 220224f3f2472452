//! Exact coefficient arithmetic: arbitrary-precision rationals and elements of
//! the cyclotomic fields Q(zeta_N).
//!
//! - [`Rational`]: arbitrary-precision rational, always reduced, denominator > 0.
//! - [`CycNumber`]: element of Q(zeta_N) as a polynomial in zeta_N reduced
//!   modulo the N-th cyclotomic polynomial Phi_N, so equality is decidable.
//!
//! Orbifold averages must collapse back to rationals; [`CycNumber::try_rational`]
//! and [`CycNumber::reduced`] (descent to the minimal cyclotomic subfield) make
//! that collapse observable.  No floating point is used anywhere in this module.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;
use thiserror::Error;

/// Exact rational scalar. `num_rational` keeps the value reduced with a
/// positive denominator, which is exactly the invariant we need.
pub type Rational = BigRational;

/// `p/q` as a rational, panicking on `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Integer as a rational.
pub fn rat_int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Canonical `"p/q"` rendering (denominator always printed).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse `"p/q"` or a bare integer `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational, CoeffError> {
    let bad = || CoeffError::Parse(s.to_string());
    let mut it = s.splitn(2, '/');
    let p: BigInt = it.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let q: BigInt = match it.next() {
        Some(q) => q.trim().parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if q.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoeffError {
    /// `cyc_embed` target order is not a multiple of the current order.
    #[error("incompatible cyclotomic order: {order} does not divide {target}")]
    IncompatibleOrder { order: u32, target: u32 },
    #[error("cannot parse rational from `{0}`")]
    Parse(String),
}

/// Euler totient.
pub fn euler_phi(n: u32) -> u32 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn prime_divisors(mut n: u32) -> Vec<u32> {
    let mut ps = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            ps.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        ps.push(n);
    }
    ps
}

/// Coefficients (ascending, monic) of the N-th cyclotomic polynomial Phi_N,
/// computed by dividing x^N - 1 by the Phi_d for proper divisors d and memoized.
fn cyclotomic_poly(n: u32) -> Vec<BigInt> {
    static CACHE: Lazy<Mutex<HashMap<u32, Vec<BigInt>>>> = Lazy::new(|| Mutex::new(HashMap::new()));
    if let Some(p) = CACHE.lock().unwrap().get(&n) {
        return p.clone();
    }
    let poly = if n == 1 {
        vec![BigInt::from(-1), BigInt::one()]
    } else {
        // x^n - 1
        let mut num = vec![BigInt::zero(); n as usize + 1];
        num[0] = BigInt::from(-1);
        num[n as usize] = BigInt::one();
        for d in 1..n {
            if n % d == 0 {
                num = int_poly_div_exact(&num, &cyclotomic_poly(d));
            }
        }
        num
    };
    CACHE.lock().unwrap().insert(n, poly.clone());
    poly
}

/// Exact division of integer polynomials (ascending coefficients, monic divisor).
fn int_poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    debug_assert!(den[dd].is_one());
    let qd = rem.len() - 1 - dd;
    let mut quot = vec![BigInt::zero(); qd + 1];
    for k in (0..=qd).rev() {
        let c = rem[k + dd].clone();
        if !c.is_zero() {
            for (i, d) in den.iter().enumerate() {
                rem[k + i] -= &c * d;
            }
        }
        quot[k] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    quot
}

/// Reduce a rational polynomial (ascending) modulo the monic Phi_n, returning
/// exactly phi(n) coordinates.
fn reduce_mod_cyclotomic(mut poly: Vec<Rational>, n: u32) -> Vec<Rational> {
    let phi = euler_phi(n) as usize;
    let modulus = cyclotomic_poly(n);
    while poly.len() > phi {
        let top = poly.len() - 1;
        let c = poly.pop().unwrap();
        if !c.is_zero() {
            let shift = top - phi;
            for (i, m) in modulus.iter().take(phi).enumerate() {
                poly[shift + i] -= &c * Rational::from_integer(m.clone());
            }
        }
    }
    poly.resize(phi, Rational::zero());
    poly
}

/// Element of Q(zeta_N): `coords[i]` is the coefficient of zeta_N^i, with the
/// representation reduced modulo Phi_N (so `coords.len() == phi(N)`).
///
/// Mixed-order arithmetic promotes both operands to the lcm of their orders.
/// Equality compares in the common field, so it is mathematical equality.
#[derive(Clone, Debug)]
pub struct CycNumber {
    order: u32,
    coords: Vec<Rational>,
}

impl CycNumber {
    pub fn zero() -> Self {
        CycNumber { order: 1, coords: vec![Rational::zero()] }
    }

    pub fn one() -> Self {
        CycNumber { order: 1, coords: vec![Rational::one()] }
    }

    pub fn from_rational(r: Rational) -> Self {
        CycNumber { order: 1, coords: vec![r] }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat_int(n))
    }

    /// zeta_n^k, stored in the minimal cyclotomic subfield.
    pub fn zeta(n: u32, k: i64) -> Self {
        assert!(n >= 1, "cyclotomic order must be positive");
        let k = k.rem_euclid(n as i64) as usize;
        let mut poly = vec![Rational::zero(); k + 1];
        poly[k] = Rational::one();
        let coords = reduce_mod_cyclotomic(poly, n);
        CycNumber { order: n, coords }.reduced()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Image in Q(zeta_target) via zeta_N -> zeta_target^{target/N}; the value
    /// is unchanged as a complex number.
    pub fn embed(&self, target: u32) -> Result<CycNumber, CoeffError> {
        if target == 0 || target % self.order != 0 {
            return Err(CoeffError::IncompatibleOrder { order: self.order, target });
        }
        if target == self.order {
            return Ok(self.clone());
        }
        let step = (target / self.order) as usize;
        let mut poly = vec![Rational::zero(); (self.coords.len() - 1) * step + 1];
        for (i, c) in self.coords.iter().enumerate() {
            if !c.is_zero() {
                poly[i * step] = c.clone();
            }
        }
        Ok(CycNumber { order: target, coords: reduce_mod_cyclotomic(poly, target) })
    }

    /// The rational value when the element lies in the prime field.
    pub fn try_rational(&self) -> Option<Rational> {
        let r = self.reduced();
        if r.order == 1 {
            Some(r.coords[0].clone())
        } else {
            None
        }
    }

    /// Canonical form: descend to the minimal cyclotomic subfield Q(zeta_d),
    /// d | N, containing the value.
    pub fn reduced(&self) -> CycNumber {
        let mut cur = self.clone();
        'outer: loop {
            if cur.order == 1 {
                return cur;
            }
            if cur.coords.iter().skip(1).all(|c| c.is_zero()) {
                return CycNumber { order: 1, coords: vec![cur.coords[0].clone()] };
            }
            for p in prime_divisors(cur.order) {
                let sub = cur.order / p;
                if sub >= 1 {
                    if let Some(x) = cur.express_in(sub) {
                        cur = x;
                        continue 'outer;
                    }
                }
            }
            return cur;
        }
    }

    /// Try to rewrite the element in Q(zeta_sub) for `sub | order`, by solving
    /// for coordinates in the embedded power basis of the subfield.
    fn express_in(&self, sub: u32) -> Option<CycNumber> {
        let phi_n = self.coords.len();
        let phi_s = euler_phi(sub) as usize;
        let step = (self.order / sub) as usize;
        // columns: zeta_N^{j*step} reduced, j < phi_s
        let mut cols = Vec::with_capacity(phi_s);
        for j in 0..phi_s {
            let mut poly = vec![Rational::zero(); j * step + 1];
            poly[j * step] = Rational::one();
            cols.push(reduce_mod_cyclotomic(poly, self.order));
        }
        let sol = solve_linear(&cols, &self.coords, phi_n)?;
        Some(CycNumber { order: sub, coords: sol })
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<CycNumber> {
        if self.is_zero() {
            return None;
        }
        if self.order == 1 {
            return Some(CycNumber::from_rational(self.coords[0].recip()));
        }
        let modulus: Vec<Rational> = cyclotomic_poly(self.order)
            .iter()
            .map(|c| Rational::from_integer(c.clone()))
            .collect();
        let inv = poly_mod_inverse(&self.coords, &modulus)?;
        Some(CycNumber { order: self.order, coords: reduce_mod_cyclotomic(inv, self.order) })
    }

    pub fn pow(&self, e: i64) -> CycNumber {
        if e == 0 {
            return CycNumber::one();
        }
        let base = if e < 0 {
            self.inv().expect("pow of zero to a negative exponent")
        } else {
            self.clone()
        };
        let mut exp = e.unsigned_abs();
        let mut acc = CycNumber::one();
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &sq;
            }
            exp >>= 1;
            if exp > 0 {
                sq = &sq * &sq;
            }
        }
        acc
    }

    pub fn mul_rational(&self, r: &Rational) -> CycNumber {
        CycNumber {
            order: self.order,
            coords: self.coords.iter().map(|c| c * r).collect(),
        }
    }

    /// If the value is exactly a root of unity, return `(k, m)` with
    /// `self == zeta_m^k` and `m` twice the stored order at most.
    pub fn root_of_unity_log(&self) -> Option<(i64, u32)> {
        let r = self.reduced();
        let m = if r.order % 2 == 0 { r.order } else { 2 * r.order };
        for k in 0..m {
            if r == CycNumber::zeta(m, k as i64) {
                return Some((k as i64, m));
            }
        }
        None
    }

    fn promote_pair(a: &CycNumber, b: &CycNumber) -> (CycNumber, CycNumber, u32) {
        let n = num_integer::lcm(a.order, b.order);
        (a.embed(n).unwrap(), b.embed(n).unwrap(), n)
    }
}

/// Solve `cols * x = rhs` over Q by Gaussian elimination; `None` if inconsistent.
fn solve_linear(cols: &[Vec<Rational>], rhs: &[Rational], rows: usize) -> Option<Vec<Rational>> {
    let ncols = cols.len();
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|i| {
            let mut row: Vec<Rational> = cols.iter().map(|c| c[i].clone()).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    let mut pivot_of_col = vec![usize::MAX; ncols];
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for j in c..=ncols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=ncols {
                    let sub = &f * &m[r][j];
                    m[i][j] = &m[i][j] - sub;
                }
            }
        }
        pivot_of_col[c] = r;
        r += 1;
        if r == rows {
            break;
        }
    }
    // inconsistent if a zero row has nonzero rhs
    for i in 0..rows {
        if m[i][..ncols].iter().all(|v| v.is_zero()) && !m[i][ncols].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rational::zero(); ncols];
    for c in 0..ncols {
        if pivot_of_col[c] != usize::MAX {
            x[c] = m[pivot_of_col[c]][ncols].clone();
        }
    }
    // verify (guards against free-variable underdetermination, which cannot
    // happen for a basis but is cheap to check)
    for i in 0..rows {
        let mut acc = Rational::zero();
        for (c, col) in cols.iter().enumerate() {
            acc += &x[c] * &col[i];
        }
        if acc != rhs[i] {
            return None;
        }
    }
    Some(x)
}

/// Inverse of `a` modulo the monic polynomial `m` over Q (extended Euclid).
fn poly_mod_inverse(a: &[Rational], m: &[Rational]) -> Option<Vec<Rational>> {
    fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
        while p.len() > 1 && p.last().unwrap().is_zero() {
            p.pop();
        }
        p
    }
    fn is_zero_poly(p: &[Rational]) -> bool {
        p.iter().all(|c| c.is_zero())
    }
    fn divmod(num: &[Rational], den: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let mut rem = num.to_vec();
        let dd = den.len() - 1;
        if rem.len() <= dd {
            return (vec![Rational::zero()], trim(rem));
        }
        let lead = den[dd].recip();
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lead;
            if !c.is_zero() {
                for (i, d) in den.iter().enumerate() {
                    let sub = &c * d;
                    rem[k + i] = &rem[k + i] - sub;
                }
            }
            quot[k] = c;
        }
        (trim(quot), trim(rem))
    }
    fn mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(out)
    }
    fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut out = a.to_vec();
        out.resize(a.len().max(b.len()), Rational::zero());
        for (i, y) in b.iter().enumerate() {
            out[i] = &out[i] - y;
        }
        trim(out)
    }

    // invariant: r0 = s0*a mod m, r1 = s1*a mod m
    let mut r0 = m.to_vec();
    let mut r1 = trim(a.to_vec());
    let mut s0: Vec<Rational> = vec![Rational::zero()];
    let mut s1: Vec<Rational> = vec![Rational::one()];
    while !is_zero_poly(&r1) {
        let (q, r) = divmod(&r0, &r1);
        let s = sub(&s0, &mul(&q, &s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    // r0 = gcd; must be a nonzero constant since Phi_N is irreducible
    if r0.len() != 1 || r0[0].is_zero() {
        return None;
    }
    let inv = r0[0].recip();
    Some(s0.iter().map(|c| c * &inv).collect())
}

impl PartialEq for CycNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coords == other.coords;
        }
        let (a, b, _) = CycNumber::promote_pair(self, other);
        a.coords == b.coords
    }
}

impl Eq for CycNumber {}

impl std::ops::Add for &CycNumber {
    type Output = CycNumber;
    fn add(self, rhs: &CycNumber) -> CycNumber {
        let (mut a, b, n) = CycNumber::promote_pair(self, rhs);
        for (x, y) in a.coords.iter_mut().zip(&b.coords) {
            *x += y;
        }
        CycNumber { order: n, coords: a.coords }
    }
}

impl std::ops::Sub for &CycNumber {
    type Output = CycNumber;
    fn sub(self, rhs: &CycNumber) -> CycNumber {
        let (mut a, b, n) = CycNumber::promote_pair(self, rhs);
        for (x, y) in a.coords.iter_mut().zip(&b.coords) {
            *x -= y;
        }
        CycNumber { order: n, coords: a.coords }
    }
}

impl std::ops::Mul for &CycNumber {
    type Output = CycNumber;
    fn mul(self, rhs: &CycNumber) -> CycNumber {
        // fast paths: rational scalars stay in the partner's field
        if self.order == 1 {
            return rhs.mul_rational(&self.coords[0]);
        }
        if rhs.order == 1 {
            return self.mul_rational(&rhs.coords[0]);
        }
        let (a, b, n) = CycNumber::promote_pair(self, rhs);
        let mut poly = vec![Rational::zero(); a.coords.len() + b.coords.len() - 1];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                if !y.is_zero() {
                    poly[i + j] += x * y;
                }
            }
        }
        CycNumber { order: n, coords: reduce_mod_cyclotomic(poly, n) }
    }
}

impl std::ops::Neg for &CycNumber {
    type Output = CycNumber;
    fn neg(self) -> CycNumber {
        CycNumber {
            order: self.order,
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.reduced();
        if r.order == 1 {
            return write!(f, "{}", format_rational(&r.coords[0]));
        }
        let mut first = true;
        for (i, c) in r.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i == 0 {
                write!(f, "{}", format_rational(c))?;
            } else {
                write!(f, "{}*z{}^{}", format_rational(c), r.order, i)?;
            }
        }
        if first {
            write!(f, "0/1")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u32, k: i64) -> CycNumber {
        CycNumber::zeta(n, k)
    }

    #[test]
    fn zeta_power_relations() {
        for n in [1u32, 2, 3, 4, 5, 6, 8, 12] {
            assert_eq!(z(n, n as i64), CycNumber::one(), "zeta_{n}^{n} = 1");
            // sum over a of zeta^{a k} = n * [k == 0 mod n]
            for k in 0..n as i64 {
                let mut s = CycNumber::zero();
                for a in 0..n as i64 {
                    s = &s + &z(n, a * k);
                }
                let expect = if k == 0 { CycNumber::from_int(n as i64) } else { CycNumber::zero() };
                assert_eq!(s, expect, "root-of-unity sum for n={n}, k={k}");
            }
        }
    }

    #[test]
    fn embed_examples() {
        // zeta_2 = -1 embeds to order 4 as a rational
        let m1 = z(2, 1);
        assert_eq!(m1.try_rational(), Some(rat_int(-1)));
        let e = m1.embed(4).unwrap();
        assert_eq!(e.try_rational(), Some(rat_int(-1)));
        // zeta_4 -> zeta_8^2
        assert_eq!(z(4, 1).embed(8).unwrap(), z(8, 2));
        // non-divisible target rejected
        assert!(matches!(z(4, 1).embed(6), Err(CoeffError::IncompatibleOrder { .. })));
    }

    #[test]
    fn embed_numeric_oracle() {
        // 1 + zeta_3 == 1 + zeta_12^4, checked against complex doubles
        let a = &CycNumber::one() + &z(3, 1);
        let b = &CycNumber::one() + &z(12, 4);
        assert_eq!(a, b);
        let (xa, ya) = eval_complex(&a);
        let (xb, yb) = eval_complex(&b);
        assert!((xa - xb).abs() < 1e-12 && (ya - yb).abs() < 1e-12);
    }

    /// Numeric oracle used by tests only: evaluate at zeta_N = e^{2 pi i / N}.
    fn eval_complex(x: &CycNumber) -> (f64, f64) {
        let n = x.order() as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, c) in x.coords().iter().enumerate() {
            let cf = c.numer().to_string().parse::<f64>().unwrap()
                / c.denom().to_string().parse::<f64>().unwrap();
            let t = 2.0 * std::f64::consts::PI * (i as f64) / n;
            re += cf * t.cos();
            im += cf * t.sin();
        }
        (re, im)
    }

    #[test]
    fn try_rational_examples() {
        // (1/D) * sum of all D-th roots = 0 for D = 5
        let mut s = CycNumber::zero();
        for a in 0..5 {
            s = &s + &z(5, a);
        }
        assert_eq!(s.mul_rational(&rat(1, 5)).try_rational(), Some(rat_int(0)));
        assert_eq!(z(4, 1).try_rational(), None);
        // zeta_6 + zeta_6^{-1} = 1
        let s = &z(6, 1) + &z(6, -1);
        assert_eq!(s.try_rational(), Some(rat_int(1)));
    }

    #[test]
    fn inverse_and_field_ops() {
        let a = &z(8, 3) + &CycNumber::from_rational(rat(2, 3));
        let inv = a.inv().unwrap();
        assert_eq!(&a * &inv, CycNumber::one());
        assert!(CycNumber::zero().inv().is_none());
    }

    #[test]
    fn reduced_descends_to_minimal_subfield() {
        // zeta_8^2 = i lives in Q(zeta_4)
        let x = z(8, 2);
        assert_eq!(x.order(), 4);
        assert_eq!(x, z(4, 1));
        // zeta_6 lives in Q(zeta_3): zeta_6 = -zeta_3^2
        let x = z(6, 1);
        assert_eq!(x.order(), 3);
        assert_eq!(x, &CycNumber::zero() - &z(3, 2));
    }

    #[test]
    fn root_of_unity_log_finds_signed_roots() {
        assert_eq!(CycNumber::from_int(-1).root_of_unity_log(), Some((1, 2)));
        let (k, m) = z(3, 2).root_of_unity_log().unwrap();
        assert_eq!(CycNumber::zeta(m, k), z(3, 2));
        let minus_z3 = &CycNumber::zero() - &z(3, 1);
        let (k, m) = minus_z3.root_of_unity_log().unwrap();
        assert_eq!(CycNumber::zeta(m, k), minus_z3);
        assert!(CycNumber::from_int(2).root_of_unity_log().is_none());
    }

    proptest::proptest! {
        #![proptest_config(proptest::test_runner::Config::with_cases(200))]
        #[test]
        fn field_axioms(
            a0 in -6i64..7, a1 in -6i64..7, b0 in -6i64..7, b1 in -6i64..7,
            c0 in -6i64..7, c1 in -6i64..7,
        ) {
            let x = &CycNumber::from_int(a0) + &CycNumber::zeta(12, 1).mul_rational(&rat_int(a1));
            let y = &CycNumber::from_int(b0) + &CycNumber::zeta(8, 3).mul_rational(&rat_int(b1));
            let w = &CycNumber::from_int(c0) + &CycNumber::zeta(12, 5).mul_rational(&rat_int(c1));
            proptest::prop_assert_eq!(&(&x * &y) * &w, &x * &(&y * &w));
            proptest::prop_assert_eq!(&x * &(&y + &w), &(&x * &y) + &(&x * &w));
            if !x.is_zero() {
                proptest::prop_assert_eq!(&x * &x.inv().unwrap(), CycNumber::one());
            }
            // promotion commutes with + and *
            let n = 24;
            let xe = x.embed(n).unwrap();
            let ye = y.embed(n).unwrap();
            proptest::prop_assert_eq!((&x + &y).embed(n).unwrap(), &xe + &ye);
            proptest::prop_assert_eq!((&x * &y).embed(n).unwrap(), &xe * &ye);
        }
    }
}
