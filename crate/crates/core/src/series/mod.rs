//! Sparse bivariate formal Laurent series in (q, y) with rational exponents of
//! bounded denominator, plus the polynomial extension by nilpotent cohomology
//! generators ([`xseries`]).
//!
//! Exponents are stored as scaled integers over a per-series denominator M
//! (`exp_denom`), keeping term keys exactly comparable; M grows by lcm on
//! mixed operations and is re-minimized on canonicalization.  Truncation is
//! tracked per series: terms with q-exponent above `q_max` are unknown, not
//! zero, and every operation computes the honest attainable bound.
//!
//! Division comes in two strengths:
//! - [`QYSeries::invert`] requires a monomial-leading series (unique minimal
//!   q-slice consisting of a single y-monomial); anything else would force
//!   infinite y-support per q-slice and is rejected.
//! - [`QYSeries::div_exact`] divides slice by slice with exact y-Laurent
//!   polynomial division and fails unless the quotient is exactly
//!   representable.  Balanced theta quotients are computed through it.

pub mod xseries;

use crate::coeff::{format_rational, parse_rational, rat_int, CycNumber, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    /// Inverting a series whose minimal q-slice is not a single y-monomial.
    #[error("series is not invertible: minimal q-slice is not a single y-monomial")]
    NotInvertible,
    /// Coefficient requested beyond the truncation order (unknown, not zero).
    #[error("coefficient at q^{0} lies beyond the truncation order {1}")]
    BeyondTruncation(String, String),
    /// c^beta with fractional beta requires c to be a root of unity.
    #[error("fractional power of a coefficient that is not a root of unity")]
    FractionalRootOfUnit,
    /// Exact division left a nonzero remainder: the quotient has no
    /// finite-y-support representation.
    #[error("exact division failed: quotient is not representable")]
    NotDivisible,
}

/// Truncation request: results are exact for q-exponents `<= q_order`;
/// `guard` extra orders are carried internally for composite formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Precision {
    q_order: Rational,
    guard: Rational,
}

impl Precision {
    pub fn new(q_order: i64) -> Self {
        Precision { q_order: rat_int(q_order), guard: Rational::zero() }
    }

    pub fn from_rational(q_order: Rational) -> Self {
        assert!(!q_order.is_negative(), "q_order must be >= 0");
        Precision { q_order, guard: Rational::zero() }
    }

    pub fn with_guard(mut self, guard: Rational) -> Self {
        assert!(!guard.is_negative(), "guard must be >= 0");
        self.guard = guard;
        self
    }

    pub fn q_order(&self) -> &Rational {
        &self.q_order
    }

    /// Order carried internally: `q_order + guard`.
    pub fn working_order(&self) -> Rational {
        &self.q_order + &self.guard
    }
}

/// Sparse truncated Laurent series in q and y over cyclotomic coefficients.
///
/// Terms are keyed by `(q_num, y_num)` in units of `1/exp_denom` and kept in a
/// `BTreeMap`, so iteration is sorted by (q-exponent, y-exponent) and JSON
/// output is deterministic.
#[derive(Clone, Debug)]
pub struct QYSeries {
    exp_denom: i64,
    terms: BTreeMap<(i64, i64), CycNumber>,
    q_min: Rational,
    q_max: Rational,
}

impl QYSeries {
    pub fn zero(q_max: Rational) -> Self {
        QYSeries { exp_denom: 1, terms: BTreeMap::new(), q_min: Rational::zero(), q_max }
    }

    pub fn one(q_max: Rational) -> Self {
        Self::monomial(CycNumber::one(), Rational::zero(), Rational::zero(), q_max)
    }

    pub fn monomial(coeff: CycNumber, q_exp: Rational, y_exp: Rational, q_max: Rational) -> Self {
        let m = lcm_big(q_exp.denom(), y_exp.denom());
        let m = m.to_i64().expect("exponent denominator overflow");
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert((scale_to(&q_exp, m), scale_to(&y_exp, m)), coeff);
        }
        let mut s = QYSeries { exp_denom: m, terms, q_min: q_exp, q_max };
        s.normalize();
        s
    }

    /// Series from explicit terms; exponents are rationals, truncation `q_max`.
    pub fn from_terms(terms: &[(Rational, Rational, CycNumber)], q_max: Rational) -> Self {
        let mut m = BigInt::one();
        for (q, y, _) in terms {
            m = lcm_big(&m, q.denom());
            m = lcm_big(&m, y.denom());
        }
        let m = m.to_i64().expect("exponent denominator overflow");
        let mut map: BTreeMap<(i64, i64), CycNumber> = BTreeMap::new();
        for (q, y, c) in terms {
            if c.is_zero() {
                continue;
            }
            let key = (scale_to(q, m), scale_to(y, m));
            insert_add(&mut map, key, c.clone());
        }
        let mut s = QYSeries { exp_denom: m, terms: map, q_min: Rational::zero(), q_max };
        s.q_min = s.support_q_min().unwrap_or_else(Rational::zero);
        s.normalize();
        s
    }

    pub fn exp_denom(&self) -> i64 {
        self.exp_denom
    }

    pub fn q_max(&self) -> &Rational {
        &self.q_max
    }

    pub fn q_min(&self) -> &Rational {
        &self.q_min
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterate terms as (q-exponent, y-exponent, coefficient), sorted.
    pub fn iter_terms(&self) -> impl Iterator<Item = (Rational, Rational, &CycNumber)> + '_ {
        let m = self.exp_denom;
        self.terms.iter().map(move |(&(a, b), c)| (unscale(a, m), unscale(b, m), c))
    }

    /// Smallest cyclotomic order accommodating every coefficient.
    pub fn cyc_order(&self) -> u32 {
        let mut n = 1u32;
        for c in self.terms.values() {
            n = num_integer::lcm(n, c.reduced().order());
        }
        n
    }

    fn support_q_min(&self) -> Option<Rational> {
        self.terms.keys().next().map(|&(a, _)| unscale(a, self.exp_denom))
    }

    fn support_q_max(&self) -> Option<Rational> {
        self.terms.keys().next_back().map(|&(a, _)| unscale(a, self.exp_denom))
    }

    /// Drop zero coefficients and re-minimize the exponent denominator.
    fn normalize(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
        let mut g = BigInt::from(self.exp_denom);
        for &(a, b) in self.terms.keys() {
            g = g.gcd(&BigInt::from(a)).gcd(&BigInt::from(b));
            if g.is_one() {
                break;
            }
        }
        let g = g.to_i64().unwrap();
        if g > 1 {
            let old = std::mem::take(&mut self.terms);
            self.terms = old.into_iter().map(|((a, b), c)| ((a / g, b / g), c)).collect();
            self.exp_denom /= g;
        }
        if let Some(min) = self.support_q_min() {
            if self.q_min > min {
                self.q_min = min;
            }
        }
    }

    /// Canonical form: minimal exponent denominator and, per coefficient,
    /// minimal cyclotomic subfield. Idempotent.
    pub fn canonicalize(&mut self) {
        let old = std::mem::take(&mut self.terms);
        self.terms = old
            .into_iter()
            .filter_map(|(k, c)| {
                let c = c.reduced();
                if c.is_zero() {
                    None
                } else {
                    Some((k, c))
                }
            })
            .collect();
        self.normalize();
    }

    fn rescaled(&self, m: i64) -> QYSeries {
        debug_assert!(m % self.exp_denom == 0);
        let f = m / self.exp_denom;
        if f == 1 {
            return self.clone();
        }
        QYSeries {
            exp_denom: m,
            terms: self.terms.iter().map(|(&(a, b), c)| ((a * f, b * f), c.clone())).collect(),
            q_min: self.q_min.clone(),
            q_max: self.q_max.clone(),
        }
    }

    fn common_denom(a: &QYSeries, b: &QYSeries) -> i64 {
        num_integer::lcm(a.exp_denom, b.exp_denom)
    }

    pub fn add(&self, rhs: &QYSeries) -> QYSeries {
        let m = Self::common_denom(self, rhs);
        let mut a = self.rescaled(m);
        let b = rhs.rescaled(m);
        for (k, c) in b.terms {
            insert_add(&mut a.terms, k, c);
        }
        a.q_max = self.q_max.clone().min(rhs.q_max.clone());
        a.q_min = self.q_min.clone().min(rhs.q_min.clone());
        a.normalize();
        a
    }

    pub fn sub(&self, rhs: &QYSeries) -> QYSeries {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> QYSeries {
        QYSeries {
            exp_denom: self.exp_denom,
            terms: self.terms.iter().map(|(&k, c)| (k, -c)).collect(),
            q_min: self.q_min.clone(),
            q_max: self.q_max.clone(),
        }
    }

    pub fn scale(&self, c: &CycNumber) -> QYSeries {
        if c.is_zero() {
            return QYSeries::zero(self.q_max.clone());
        }
        let mut out = QYSeries {
            exp_denom: self.exp_denom,
            terms: self.terms.iter().map(|(&k, v)| (k, v * c)).collect(),
            q_min: self.q_min.clone(),
            q_max: self.q_max.clone(),
        };
        out.normalize();
        out
    }

    pub fn scale_rational(&self, r: &Rational) -> QYSeries {
        self.scale(&CycNumber::from_rational(r.clone()))
    }

    /// Multiply by an exact monomial `c * q^dq * y^dy`; truncation shifts by `dq`.
    pub fn mul_monomial(&self, c: &CycNumber, dq: &Rational, dy: &Rational) -> QYSeries {
        let m = BigInt::from(self.exp_denom);
        let m = lcm_big(&lcm_big(&m, dq.denom()), dy.denom()).to_i64().unwrap();
        let s = self.rescaled(m);
        let dqn = scale_to(dq, m);
        let dyn_ = scale_to(dy, m);
        let mut out = QYSeries {
            exp_denom: m,
            terms: s
                .terms
                .iter()
                .map(|(&(a, b), v)| ((a + dqn, b + dyn_), v * c))
                .collect(),
            q_min: &self.q_min + dq,
            q_max: &self.q_max + dq,
        };
        out.normalize();
        out
    }

    /// Product with the honest attainable truncation
    /// `min(a.q_max + b.q_min, b.q_max + a.q_min)`.
    pub fn mul(&self, rhs: &QYSeries) -> QYSeries {
        let q_max = (&self.q_max + &rhs.q_min).min(&rhs.q_max + &self.q_min);
        let q_min = &self.q_min + &rhs.q_min;
        let m = Self::common_denom(self, rhs);
        let a = self.rescaled(m);
        let b = rhs.rescaled(m);
        let cutoff = floor_scaled(&q_max, m);
        let mut terms: BTreeMap<(i64, i64), CycNumber> = BTreeMap::new();
        for (&(qa, ya), ca) in &a.terms {
            // b is sorted by q-exponent: stop once the product exceeds q_max
            for (&(qb, yb), cb) in &b.terms {
                let q = qa + qb;
                if q > cutoff {
                    break;
                }
                let prod = ca * cb;
                if !prod.is_zero() {
                    insert_add(&mut terms, (q, ya + yb), prod);
                }
            }
        }
        let mut out = QYSeries { exp_denom: m, terms, q_min, q_max };
        out.normalize();
        out
    }

    /// Integer power; negative exponents go through [`QYSeries::invert`].
    pub fn pow(&self, e: i64) -> Result<QYSeries, SeriesError> {
        if e == 0 {
            return Ok(QYSeries::one(self.q_max.clone()));
        }
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc: Option<QYSeries> = None;
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul(&sq),
                });
            }
            exp >>= 1;
            if exp > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc.unwrap())
    }

    /// Leading term when the minimal q-slice is a single monomial.
    fn leading_monomial(&self) -> Option<(i64, i64, CycNumber)> {
        let (&(q0, y0), c) = self.terms.iter().next()?;
        let next = self.terms.range((q0, y0 + 1)..).next();
        if let Some((&(q1, _), _)) = next {
            if q1 == q0 {
                return None;
            }
        }
        Some((q0, y0, c.clone()))
    }

    /// Inverse of a monomial-leading series: `a * invert(a) = 1` up to
    /// truncation, leading term `c^{-1} q^{-a0} y^{-b0}`.
    pub fn invert(&self) -> Result<QYSeries, SeriesError> {
        let (q0, y0, lead) = self.leading_monomial().ok_or(SeriesError::NotInvertible)?;
        let m = self.exp_denom;
        let lead_inv = lead.inv().ok_or(SeriesError::NotInvertible)?;
        // out has leading exponent -q0; correct up to q_max - 2*q0
        let out_max = &self.q_max - &(unscale(q0, m) * rat_int(2));
        let out_cut = floor_scaled(&out_max, m);
        let mut out: BTreeMap<(i64, i64), CycNumber> = BTreeMap::new();
        out.insert((-q0, -y0), lead_inv.clone());
        // slices of self above the lead, relative offsets > 0
        let mut result_slices: BTreeMap<i64, Vec<(i64, CycNumber)>> = BTreeMap::new();
        result_slices.insert(-q0, vec![(-y0, lead_inv.clone())]);
        // iterate target absolute q-exponents on the 1/m grid
        let mut sigma = -q0 + 1;
        while sigma <= out_cut {
            // rhs = - sum_{tau < sigma} out_tau * self_{sigma - tau + ... }
            let mut rhs: BTreeMap<i64, CycNumber> = BTreeMap::new();
            for (&tau, slice) in result_slices.range(..sigma) {
                let need = sigma - tau + q0; // absolute q-exp in self, > q0
                for (ys, cs) in self.slice(need) {
                    for (yo, co) in slice {
                        let prod = &cs * co;
                        if !prod.is_zero() {
                            add_into(&mut rhs, ys + yo, prod);
                        }
                    }
                }
            }
            rhs.retain(|_, c| !c.is_zero());
            if !rhs.is_empty() {
                let mut slice = Vec::new();
                for (yy, c) in rhs {
                    let v = -&(&c * &lead_inv);
                    if !v.is_zero() {
                        out.insert((sigma, yy - y0), v.clone());
                        slice.push((yy - y0, v));
                    }
                }
                if !slice.is_empty() {
                    result_slices.insert(sigma, slice);
                }
            }
            sigma += 1;
        }
        let mut res = QYSeries {
            exp_denom: m,
            terms: out,
            q_min: unscale(-q0, m),
            q_max: out_max,
        };
        res.normalize();
        Ok(res)
    }

    fn slice(&self, q_num: i64) -> Vec<(i64, CycNumber)> {
        self.terms
            .range((q_num, i64::MIN)..=(q_num, i64::MAX))
            .map(|(&(_, b), c)| (b, c.clone()))
            .collect()
    }

    /// Exact division: the unique series `s` with `s * rhs = self`, when it is
    /// representable.  Works for divisors whose minimal q-slice is any nonzero
    /// y-Laurent polynomial; fails with [`SeriesError::NotDivisible`] when a
    /// slice division leaves a remainder.
    pub fn div_exact(&self, rhs: &QYSeries) -> Result<QYSeries, SeriesError> {
        if rhs.is_zero() {
            return Err(SeriesError::NotDivisible);
        }
        let m = Self::common_denom(self, rhs);
        let a = self.rescaled(m);
        let b = rhs.rescaled(m);
        let d0q = b.terms.keys().next().unwrap().0;
        let lead: Vec<(i64, CycNumber)> = b.slice(d0q);
        // truncation: mul rule applied to self * rhs^{-1}
        let delta0 = unscale(d0q, m);
        let inv_max = &b.q_max - &(delta0.clone() * rat_int(2));
        let out_max = (&a.q_max - &delta0).min(&inv_max + &a.q_min);
        let out_cut = floor_scaled(&out_max, m);
        if a.is_zero() {
            return Ok(QYSeries::zero(out_max));
        }
        let a0q = a.terms.keys().next().unwrap().0;
        let mut out_slices: BTreeMap<i64, Vec<(i64, CycNumber)>> = BTreeMap::new();
        let mut sigma = a0q - d0q;
        while sigma <= out_cut {
            // rhs_slice = a_{sigma + d0q} - sum_{tau < sigma} out_tau * b_{sigma - tau + d0q}
            let mut acc: BTreeMap<i64, CycNumber> = BTreeMap::new();
            for (ya, ca) in a.slice(sigma + d0q) {
                add_into(&mut acc, ya, ca);
            }
            for (&tau, slice) in out_slices.range(..sigma) {
                let bq = sigma - tau + d0q;
                for (yb, cb) in b.slice(bq) {
                    for (yo, co) in slice {
                        let prod = &cb * co;
                        if !prod.is_zero() {
                            add_into(&mut acc, yb + yo, -&prod);
                        }
                    }
                }
            }
            acc.retain(|_, c| !c.is_zero());
            if !acc.is_empty() {
                let num: Vec<(i64, CycNumber)> = acc.into_iter().collect();
                let quot = laurent_div_exact(&num, &lead)?;
                if !quot.is_empty() {
                    out_slices.insert(sigma, quot);
                }
            }
            sigma += 1;
        }
        let mut terms = BTreeMap::new();
        for (sigma, slice) in out_slices {
            for (yy, c) in slice {
                terms.insert((sigma, yy), c);
            }
        }
        let mut res = QYSeries {
            exp_denom: m,
            terms,
            q_min: &a.q_min - &delta0,
            q_max: out_max,
        };
        res.normalize();
        Ok(res)
    }

    /// Substitute `y -> c * q^dq * y^dy`.  Each term `c0 q^a y^b` maps to
    /// `c0 * c^b * q^{a + b dq} * y^{b dy}`; the resulting truncation is
    /// recomputed conservatively from the observed y-support.
    pub fn subst_monomial(
        &self,
        c: &CycNumber,
        dq: &Rational,
        dy: &Rational,
    ) -> Result<QYSeries, SeriesError> {
        let m_old = self.exp_denom;
        let mut m = BigInt::from(m_old);
        m = lcm_big(&m, &(dq.denom() * BigInt::from(m_old)));
        m = lcm_big(&m, &(dy.denom() * BigInt::from(m_old)));
        // c^beta may enlarge the coefficient field only; exponent grid:
        let m = m.to_i64().expect("exponent denominator overflow");
        let root_log = c.root_of_unity_log();
        let c_is_one = c == &CycNumber::one();
        let mut terms: BTreeMap<(i64, i64), CycNumber> = BTreeMap::new();
        let mut y_min: Option<Rational> = None;
        let mut y_max: Option<Rational> = None;
        for (q, y, coeff) in self.iter_terms() {
            let factor = if c_is_one || y.is_zero() {
                CycNumber::one()
            } else if y.is_integer() {
                c.pow(y.to_integer().to_i64().expect("exponent overflow"))
            } else {
                let (k, r) = root_log.ok_or(SeriesError::FractionalRootOfUnit)?;
                let num = y.numer().to_i64().expect("exponent overflow");
                let den = y.denom().to_i64().expect("exponent overflow");
                CycNumber::zeta(r * den as u32, k * num)
            };
            let coeff = coeff * &factor;
            if coeff.is_zero() {
                continue;
            }
            let nq = &q + &(&y * dq);
            let ny = &y * dy;
            insert_add(&mut terms, (scale_to(&nq, m), scale_to(&ny, m)), coeff);
            y_min = Some(match y_min {
                None => y.clone(),
                Some(v) => v.min(y.clone()),
            });
            y_max = Some(match y_max {
                None => y,
                Some(v) => v.max(y),
            });
        }
        // conservative truncation: unknown slices are assumed to keep their
        // y-exponents within the observed window
        let q_max = match (&y_min, &y_max) {
            (Some(lo), Some(hi)) => {
                let c1 = &self.q_max + &(lo * dq);
                let c2 = &self.q_max + &(hi * dq);
                c1.min(c2)
            }
            _ => self.q_max.clone(),
        };
        let mut out = QYSeries { exp_denom: m, terms, q_min: Rational::zero(), q_max };
        out.q_min = out.support_q_min().unwrap_or_else(Rational::zero);
        // substitution may land terms above the sound truncation; drop them
        let out = out.truncated(&out.q_max.clone());
        Ok(out)
    }

    /// Exact coefficient of `q^alpha y^beta`; beyond `q_max` the value is
    /// unknown and an error is returned.
    pub fn coefficient(&self, alpha: &Rational, beta: &Rational) -> Result<CycNumber, SeriesError> {
        if alpha > &self.q_max {
            return Err(SeriesError::BeyondTruncation(
                format_rational(alpha),
                format_rational(&self.q_max),
            ));
        }
        let m = BigInt::from(self.exp_denom);
        if !(alpha.denom() * BigInt::from(self.exp_denom) / alpha.denom().gcd(&m)).is_one()
            && !(alpha * rat_int(self.exp_denom)).is_integer()
        {
            return Ok(CycNumber::zero());
        }
        if !(alpha * rat_int(self.exp_denom)).is_integer()
            || !(beta * rat_int(self.exp_denom)).is_integer()
        {
            return Ok(CycNumber::zero());
        }
        let key = (scale_to(alpha, self.exp_denom), scale_to(beta, self.exp_denom));
        Ok(self.terms.get(&key).cloned().unwrap_or_else(CycNumber::zero))
    }

    /// Logarithmic derivative `D(a) / a` with `D = y d/dy`; requires a
    /// monomial-leading series.  Satisfies `d_log(ab) = d_log(a) + d_log(b)`.
    pub fn d_log(&self) -> Result<QYSeries, SeriesError> {
        Ok(self.d_y().mul(&self.invert()?))
    }

    /// The derivation `D = y d/dy`: multiplies the coefficient of `q^a y^b` by `b`.
    pub fn d_y(&self) -> QYSeries {
        let m = self.exp_denom;
        let mut out = QYSeries {
            exp_denom: m,
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| ((a, b), c.mul_rational(&unscale(b, m))))
                .collect(),
            q_min: self.q_min.clone(),
            q_max: self.q_max.clone(),
        };
        out.normalize();
        out
    }

    /// Same series with truncation lowered to `q_max` (terms above dropped).
    pub fn truncated(&self, q_max: &Rational) -> QYSeries {
        let cut = floor_scaled(q_max, self.exp_denom);
        let mut out = QYSeries {
            exp_denom: self.exp_denom,
            terms: self
                .terms
                .iter()
                .filter(|(&(a, _), _)| a <= cut)
                .map(|(&k, c)| (k, c.clone()))
                .collect(),
            q_min: self.q_min.clone(),
            q_max: q_max.clone().min(self.q_max.clone()),
        };
        out.normalize();
        out
    }

    /// The q^0 slice as a series in y (empty when q^0 is absent).
    pub fn q0_slice(&self) -> QYSeries {
        let mut out = QYSeries {
            exp_denom: self.exp_denom,
            terms: self
                .terms
                .iter()
                .filter(|(&(a, _), _)| a == 0)
                .map(|(&k, c)| (k, c.clone()))
                .collect(),
            q_min: Rational::zero(),
            q_max: Rational::zero(),
        };
        out.normalize();
        out
    }

    /// Sum of all coefficients of the q^0 slice (the y -> 1 value).
    pub fn q0_at_y1(&self) -> CycNumber {
        let mut acc = CycNumber::zero();
        for (&(a, _), c) in &self.terms {
            if a == 0 {
                acc = &acc + c;
            }
        }
        acc
    }

    /// True when both series agree on every stored term up to the smaller
    /// truncation order.
    pub fn eq_up_to_truncation(&self, rhs: &QYSeries) -> bool {
        self.first_discrepancy(rhs).is_none()
    }

    /// First differing monomial up to the common truncation:
    /// `(q_exp, y_exp, lhs_coeff, rhs_coeff)`.
    pub fn first_discrepancy(
        &self,
        rhs: &QYSeries,
    ) -> Option<(Rational, Rational, CycNumber, CycNumber)> {
        let q_max = self.q_max.clone().min(rhs.q_max.clone());
        let m = Self::common_denom(self, rhs);
        let a = self.rescaled(m).truncated(&q_max);
        let b = rhs.rescaled(m).truncated(&q_max);
        let mut keys: Vec<(i64, i64)> = a.terms.keys().chain(b.terms.keys()).cloned().collect();
        keys.sort();
        keys.dedup();
        for k in keys {
            let ca = a.terms.get(&k).cloned().unwrap_or_else(CycNumber::zero);
            let cb = b.terms.get(&k).cloned().unwrap_or_else(CycNumber::zero);
            if ca != cb {
                return Some((unscale(k.0, m), unscale(k.1, m), ca, cb));
            }
        }
        None
    }

    /// Deterministic JSON document (terms sorted lexicographically by
    /// (q-exponent, y-exponent) in units of `1/expDenom`).
    pub fn to_json(&self) -> Value {
        let mut s = self.clone();
        s.canonicalize();
        let order = s.cyc_order();
        let terms: Vec<Value> = s
            .terms
            .iter()
            .map(|(&(a, b), c)| {
                let c = c.embed(order).unwrap();
                let coords: Vec<Value> =
                    c.coords().iter().map(|r| Value::String(format_rational(r))).collect();
                let coeff = if order == 1 {
                    coords.into_iter().next().unwrap()
                } else {
                    json!({ "order": order, "coords": coords })
                };
                json!([a.to_string(), b.to_string(), coeff])
            })
            .collect();
        json!({
            "expDenom": s.exp_denom,
            "cycOrder": order,
            "qMax": format_rational(&s.q_max),
            "terms": terms,
        })
    }

    pub fn from_json(v: &Value) -> Option<QYSeries> {
        let m = v.get("expDenom")?.as_i64()?;
        let order = v.get("cycOrder")?.as_u64()? as u32;
        let q_max = parse_rational(v.get("qMax")?.as_str()?).ok()?;
        let mut terms = BTreeMap::new();
        for t in v.get("terms")?.as_array()? {
            let t = t.as_array()?;
            let a: i64 = t[0].as_str()?.parse().ok()?;
            let b: i64 = t[1].as_str()?.parse().ok()?;
            let c = match &t[2] {
                Value::String(s) => CycNumber::from_rational(parse_rational(s).ok()?),
                obj => {
                    let coords = obj.get("coords")?.as_array()?;
                    let ord = obj.get("order")?.as_u64()? as u32;
                    let mut x = CycNumber::zero();
                    for (i, cv) in coords.iter().enumerate() {
                        let r = parse_rational(cv.as_str()?).ok()?;
                        x = &x + &CycNumber::zeta(ord, i as i64).mul_rational(&r);
                    }
                    let _ = order;
                    x
                }
            };
            terms.insert((a, b), c);
        }
        let mut s = QYSeries { exp_denom: m, terms, q_min: Rational::zero(), q_max };
        s.q_min = s.support_q_min().unwrap_or_else(Rational::zero);
        s.normalize();
        Some(s)
    }

    /// Plain-text rendering with exact fractional exponents, for tables.
    pub fn to_table_string(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut rows = Vec::new();
        for (q, y, c) in self.iter_terms() {
            rows.push(format!("q^{} y^{}  {}", format_exp(&q), format_exp(&y), c));
        }
        rows.join("\n")
    }
}

fn format_exp(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn lcm_big(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return BigInt::one();
    }
    (a * b).abs() / a.gcd(b)
}

fn scale_to(r: &Rational, m: i64) -> i64 {
    let v = r * rat_int(m);
    debug_assert!(v.is_integer(), "exponent {r} not on the 1/{m} grid");
    v.to_integer().to_i64().expect("scaled exponent overflow")
}

/// Largest multiple of 1/m at most r, as a scaled integer.
fn floor_scaled(r: &Rational, m: i64) -> i64 {
    let v = r * rat_int(m);
    v.floor().to_integer().to_i64().expect("scaled exponent overflow")
}

fn unscale(a: i64, m: i64) -> Rational {
    rat_int(a) / rat_int(m)
}

fn insert_add(map: &mut BTreeMap<(i64, i64), CycNumber>, key: (i64, i64), c: CycNumber) {
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let s = &*e.get() + &c;
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

fn add_into(map: &mut BTreeMap<i64, CycNumber>, key: i64, c: CycNumber) {
    let entry = map.entry(key).or_insert_with(CycNumber::zero);
    *entry = &*entry + &c;
}

/// Exact division of y-Laurent polynomials given as sorted (exponent, coeff)
/// slices; fails unless the remainder is exactly zero.
fn laurent_div_exact(
    num: &[(i64, CycNumber)],
    den: &[(i64, CycNumber)],
) -> Result<Vec<(i64, CycNumber)>, SeriesError> {
    debug_assert!(!den.is_empty());
    if num.is_empty() {
        return Ok(Vec::new());
    }
    let mut rem: BTreeMap<i64, CycNumber> = num.iter().cloned().collect();
    let (d_lo, d_lo_c) = (den[0].0, &den[0].1);
    let d_hi = den.last().unwrap().0;
    let n_hi = num.last().unwrap().0;
    let q_hi = n_hi - d_hi;
    let d_lo_inv = d_lo_c.inv().expect("nonzero leading coefficient");
    let mut quot: Vec<(i64, CycNumber)> = Vec::new();
    while let Some((&r_lo, _)) = rem.iter().next() {
        let qe = r_lo - d_lo;
        if qe > q_hi {
            return Err(SeriesError::NotDivisible);
        }
        let qc = &rem[&r_lo] * &d_lo_inv;
        for (de, dc) in den {
            let k = qe + de;
            let sub = &qc * dc;
            if !sub.is_zero() {
                add_into(&mut rem, k, -&sub);
            }
        }
        rem.retain(|_, c| !c.is_zero());
        quot.push((qe, qc));
    }
    Ok(quot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;

    fn q() -> QYSeries {
        QYSeries::monomial(CycNumber::one(), rat_int(1), rat_int(0), rat_int(10))
    }

    fn y(e: Rational) -> QYSeries {
        QYSeries::monomial(CycNumber::one(), rat_int(0), e, rat_int(10))
    }

    #[test]
    fn mul_difference_of_squares() {
        // (y^{1/2} - y^{-1/2}) (y^{1/2} + y^{-1/2}) = y - y^{-1}
        let a = y(rat(1, 2)).sub(&y(rat(-1, 2)));
        let b = y(rat(1, 2)).add(&y(rat(-1, 2)));
        let p = a.mul(&b);
        let expect = y(rat_int(1)).sub(&y(rat_int(-1)));
        assert!(p.eq_up_to_truncation(&expect));
    }

    #[test]
    fn mul_telescopes() {
        // (1 - qy)(1 + qy + q^2 y^2) = 1 - q^3 y^3
        let qy = q().mul(&y(rat_int(1)));
        let a = QYSeries::one(rat_int(10)).sub(&qy);
        let b = QYSeries::one(rat_int(10)).add(&qy).add(&qy.mul(&qy));
        let p = a.mul(&b);
        let expect = QYSeries::one(rat_int(10)).sub(&qy.pow(3).unwrap());
        assert!(p.eq_up_to_truncation(&expect));
    }

    #[test]
    fn geometric_times_complement_is_one() {
        // (sum_{n>=0} q^n)(1 - q) = 1 to q^10
        let mut geo = QYSeries::zero(rat_int(10));
        for n in 0..=10 {
            geo = geo.add(&QYSeries::monomial(
                CycNumber::one(),
                rat_int(n),
                rat_int(0),
                rat_int(10),
            ));
        }
        let p = geo.mul(&QYSeries::one(rat_int(10)).sub(&q()));
        assert!(p.eq_up_to_truncation(&QYSeries::one(rat_int(9))));
        assert_eq!(p.q_max(), &rat_int(10));
    }

    #[test]
    fn invert_geometric() {
        let a = QYSeries::one(rat_int(3)).sub(&q().truncated(&rat_int(3)));
        let inv = a.invert().unwrap();
        for n in 0..=3 {
            assert_eq!(
                inv.coefficient(&rat_int(n), &rat_int(0)).unwrap(),
                CycNumber::one()
            );
        }
        assert!(a.mul(&inv).eq_up_to_truncation(&QYSeries::one(rat_int(3))));
    }

    #[test]
    fn invert_rejects_multi_monomial_lead() {
        let a = y(rat(1, 2)).sub(&y(rat(-1, 2)));
        assert_eq!(a.invert().unwrap_err(), SeriesError::NotInvertible);
        // but q^{-1/2}(y^{1/2} - y^{-1/2} q) is monomial-leading
        let b = QYSeries::from_terms(
            &[
                (rat(-1, 2), rat(1, 2), CycNumber::one()),
                (rat(1, 2), rat(-1, 2), -&CycNumber::one()),
            ],
            rat_int(5),
        );
        let inv = b.invert().unwrap();
        assert!(b.mul(&inv).eq_up_to_truncation(&QYSeries::one(rat_int(4))));
    }

    #[test]
    fn div_exact_matches_known_quotient() {
        // ((y^{1/2} - y^{-1/2}) * (1 - q)) / (y^{1/2} - y^{-1/2}) = 1 - q
        let s = y(rat(1, 2)).sub(&y(rat(-1, 2)));
        let f = QYSeries::one(rat_int(6)).sub(&q().truncated(&rat_int(6)));
        let n = s.mul(&f);
        let d = n.div_exact(&s).unwrap();
        assert!(d.eq_up_to_truncation(&f));
        // non-divisible case
        let bad = QYSeries::one(rat_int(6));
        assert_eq!(bad.div_exact(&s).unwrap_err(), SeriesError::NotDivisible);
    }

    #[test]
    fn subst_examples() {
        // y -> qy on y^{1/2} - y^{-1/2}
        let a = y(rat(1, 2)).sub(&y(rat(-1, 2)));
        let s = a.subst_monomial(&CycNumber::one(), &rat_int(1), &rat_int(1)).unwrap();
        let expect = QYSeries::from_terms(
            &[
                (rat(1, 2), rat(1, 2), CycNumber::one()),
                (rat(-1, 2), rat(-1, 2), -&CycNumber::one()),
            ],
            rat_int(9),
        );
        assert!(s.eq_up_to_truncation(&expect));
        // torsion specialization y -> -1 kills y - y^{-1}
        let b = y(rat_int(1)).sub(&y(rat_int(-1)));
        let t = b.subst_monomial(&CycNumber::zeta(2, 1), &rat_int(0), &rat_int(0)).unwrap();
        assert!(t.is_zero());
        // y -> zeta_3 q^{1/3} y on 1 + qy
        let c = QYSeries::one(rat_int(10)).add(&q().mul(&y(rat_int(1))));
        let u = c
            .subst_monomial(&CycNumber::zeta(3, 1), &rat(1, 3), &rat_int(1))
            .unwrap();
        assert_eq!(
            u.coefficient(&rat(4, 3), &rat_int(1)).unwrap(),
            CycNumber::zeta(3, 1)
        );
        assert_eq!(u.coefficient(&rat_int(0), &rat_int(0)).unwrap(), CycNumber::one());
    }

    #[test]
    fn d_log_examples() {
        // d_log(y^c) = c
        let a = y(rat(3, 2));
        let d = a.d_log().unwrap();
        assert_eq!(d.coefficient(&rat_int(0), &rat_int(0)).unwrap(), CycNumber::from_rational(rat(3, 2)));
        // d_log(1 - qy) = -qy - q^2 y^2 - ...
        let b = QYSeries::one(rat_int(6)).sub(&q().mul(&y(rat_int(1))).truncated(&rat_int(6)));
        let d = b.d_log().unwrap();
        for n in 1..=5 {
            assert_eq!(
                d.coefficient(&rat_int(n), &rat_int(n)).unwrap(),
                CycNumber::from_int(-1)
            );
        }
    }

    #[test]
    fn coefficient_beyond_truncation() {
        let a = QYSeries::one(rat_int(1)).sub(&q().truncated(&rat_int(1)).mul(&y(rat_int(1))));
        assert_eq!(a.coefficient(&rat_int(1), &rat_int(1)).unwrap(), CycNumber::from_int(-1));
        assert!(matches!(
            a.coefficient(&rat_int(2), &rat_int(0)),
            Err(SeriesError::BeyondTruncation(..))
        ));
    }

    #[test]
    fn canonicalize_idempotent() {
        let mut a = QYSeries::from_terms(
            &[
                (rat(2, 4), rat_int(0), CycNumber::zeta(8, 2).pow(2)), // = -1 at q^{1/2}
                (rat_int(1), rat(6, 3), CycNumber::from_int(3)),
            ],
            rat_int(5),
        );
        a.canonicalize();
        let before = a.clone();
        a.canonicalize();
        assert!(a.eq_up_to_truncation(&before));
        assert_eq!(a.exp_denom(), before.exp_denom());
        assert_eq!(a.cyc_order(), 1);
    }

    #[test]
    fn json_round_trip() {
        let a = QYSeries::from_terms(
            &[
                (rat(-1, 2), rat(3, 2), CycNumber::zeta(4, 1)),
                (rat_int(2), rat_int(-1), CycNumber::from_rational(rat(7, 3))),
            ],
            rat(13, 2),
        );
        let v = a.to_json();
        let b = QYSeries::from_json(&v).unwrap();
        assert!(a.eq_up_to_truncation(&b));
        assert_eq!(v, b.to_json());
    }
}
