//! Exact Laurent polynomials in three variables `a, b, c`, the closed-form
//! generating functions `Z_m(a, b, c)`, their shuffle recurrences, and the
//! face weights that realize them as sums over perfect matchings.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::diamond::Diamond;
use crate::error::{Error, Result};
use crate::height::height_function;
use crate::lattice::Orientation;
use crate::matching::{minimal_matching, Matching};
use crate::order::Order;
use crate::ZPoly;

/// `a^i b^j c^k` with integer exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Monomial(pub [i32; 3]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0, 0, 0]);
    pub const A: Monomial = Monomial([1, 0, 0]);
    pub const B: Monomial = Monomial([0, 1, 0]);
    pub const C: Monomial = Monomial([0, 0, 1]);
    /// `q = abc`.
    pub const Q: Monomial = Monomial([1, 1, 1]);

    pub const fn new(i: i32, j: i32, k: i32) -> Monomial {
        Monomial([i, j, k])
    }

    pub fn degree(self) -> i32 {
        self.0.iter().sum()
    }

    pub fn inv(self) -> Monomial {
        Monomial(self.0.map(|e| -e))
    }

    pub fn pow(self, k: i32) -> Monomial {
        Monomial(self.0.map(|e| e * k))
    }

    /// The image of this monomial when `a, b, c` are replaced by `images`.
    pub fn substitute(self, images: &[Monomial; 3]) -> Monomial {
        (0..3).fold(Monomial::ONE, |acc, v| acc * images[v].pow(self.0[v]))
    }
}

impl Mul for Monomial {
    type Output = Monomial;
    fn mul(self, o: Monomial) -> Monomial {
        Monomial([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Div for Monomial {
    type Output = Monomial;
    fn div(self, o: Monomial) -> Monomial {
        Monomial([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

/// Graded order: by total degree, then `a` before `b` before `c`
/// (larger exponents of earlier variables first).
impl Ord for Monomial {
    fn cmp(&self, o: &Monomial) -> Ordering {
        self.degree().cmp(&o.degree()).then_with(|| o.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Monomial) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, e) in ["a", "b", "c"].iter().zip(self.0) {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                f.write_str(name)?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// Coefficient rings usable in [`LaurentPoly`].
pub trait Coefficient:
    Clone + Debug + PartialEq + Zero + One + Add<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
}

impl<T> Coefficient for T where
    T: Clone + Debug + PartialEq + Zero + One + Add<Output = T> + Mul<Output = T> + Neg<Output = T>
{
}

/// A finite sum of monomials with nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly<C> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coefficient> LaurentPoly<C> {
    pub fn zero() -> Self {
        LaurentPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::term(Monomial::ONE, C::one())
    }

    pub fn term(m: Monomial, c: C) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn monomial(m: Monomial) -> Self {
        Self::term(m, C::one())
    }

    /// `1 + m`.
    pub fn one_plus(m: Monomial) -> Self {
        let mut p = Self::one();
        p.add_term(m, C::one());
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&m) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in graded order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: Monomial) -> C {
        self.terms.get(&m).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coefficient(Monomial::ONE)
    }

    /// The smallest term in graded order.
    pub fn lowest_term(&self) -> Option<(Monomial, C)> {
        self.terms.iter().next().map(|(m, c)| (*m, c.clone()))
    }

    pub fn mul_monomial(&self, m: Monomial) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(k, c)| (*k * m, c.clone())).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Multiplies by `(1 + m)^k` without forming the power.
    pub fn mul_one_plus_pow(&self, m: Monomial, k: u32) -> Self {
        let mut p = self.clone();
        for _ in 0..k {
            let mut next = p.clone();
            for (t, c) in &p.terms {
                next.add_term(*t * m, c.clone());
            }
            p = next;
        }
        p
    }

    /// Replaces `a, b, c` by the given monomials.
    pub fn substitute(&self, images: &[Monomial; 3]) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (m.substitute(images), c.clone())))
    }

    /// Sum of the coefficients.
    pub fn evaluate_at_ones(&self) -> C {
        self.terms.values().cloned().fold(C::zero(), |acc, c| acc + c)
    }

    /// Value at a point of a field containing the coefficients.
    pub fn evaluate<R>(&self, point: &[R; 3]) -> R
    where
        R: Clone + Zero + One + Add<Output = R> + Mul<Output = R> + Div<Output = R> + From<C>,
    {
        let power = |x: &R, e: i32| -> R {
            let mut r = R::one();
            for _ in 0..e.unsigned_abs() {
                r = r * x.clone();
            }
            if e < 0 {
                R::one() / r
            } else {
                r
            }
        };
        self.terms.iter().fold(R::zero(), |acc, (m, c)| {
            let v = (0..3).fold(R::from(c.clone()), |v, i| v * power(&point[i], m.0[i]));
            acc + v
        })
    }
}

impl<C: Coefficient> Add for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn add(self, o: &LaurentPoly<C>) -> LaurentPoly<C> {
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.add_term(*m, c.clone());
        }
        p
    }
}

impl<C: Coefficient> Neg for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn neg(self) -> LaurentPoly<C> {
        LaurentPoly { terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }
}

impl<C: Coefficient> Sub for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn sub(self, o: &LaurentPoly<C>) -> LaurentPoly<C> {
        self + &(-o)
    }
}

impl<C: Coefficient> Mul for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn mul(self, o: &LaurentPoly<C>) -> LaurentPoly<C> {
        let mut p = LaurentPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                p.add_term(*m1 * *m2, c1.clone() * c2.clone());
            }
        }
        p
    }
}

macro_rules! by_value {
    ($tr:ident, $f:ident) => {
        impl<C: Coefficient> $tr for LaurentPoly<C> {
            type Output = LaurentPoly<C>;
            fn $f(self, o: LaurentPoly<C>) -> LaurentPoly<C> {
                (&self).$f(&o)
            }
        }
    };
}
by_value!(Add, add);
by_value!(Sub, sub);
by_value!(Mul, mul);

impl<C: Coefficient + Display + PartialOrd> Display for LaurentPoly<C> {
    /// Terms in graded order, e.g. `1 + c + b*c + b*c^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let negative = *c < C::zero();
            let magnitude = if negative { -c.clone() } else { c.clone() };
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if *m == Monomial::ONE {
                write!(f, "{magnitude}")?;
            } else if magnitude.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{magnitude}*{m}")?;
            }
        }
        Ok(())
    }
}

/// The closed form of `Z_m(a, b, c)`:
/// `Z_n = Π_{i<n} (1 + a^i b^i c^{i+1})^{n-i} (1 + a^i b^{i+1} c^{i+1})^{n-i}` and
/// `Z_{n+1/2} = Π_{i≤n} (1 + a^{i+1} b^i c^i)^{n-i+1} Π_{i<n} (1 + a^{i+1} b^{i+1} c^i)^{n-i}`.
pub fn closed_form_z(m: Order) -> ZPoly {
    let n = m.floor() as i32;
    let mut z = ZPoly::one();
    if m.is_integer() {
        for i in 0..n {
            let k = (n - i) as u32;
            z = z.mul_one_plus_pow(Monomial::new(i, i, i + 1), k);
            z = z.mul_one_plus_pow(Monomial::new(i, i + 1, i + 1), k);
        }
    } else {
        for i in 0..=n {
            z = z.mul_one_plus_pow(Monomial::new(i + 1, i, i), (n - i + 1) as u32);
        }
        for i in 0..n {
            z = z.mul_one_plus_pow(Monomial::new(i + 1, i + 1, i), (n - i) as u32);
        }
    }
    z
}

/// Whether `Z_m(1, 1, 1)` equals the number of perfect matchings of `D_m`.
pub fn verify_specialization(m: Order) -> bool {
    let z = closed_form_z(m);
    z.evaluate_at_ones() == BigInt::from(crate::enumerate::count_formula(m))
}

/// Result of checking one recurrence step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecurrenceCheck {
    pub holds: bool,
    /// Monomial that normalizes the right side to constant term 1.
    pub normalizer: Option<Monomial>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecurrenceReport {
    pub n: u32,
    /// `Z_{n+1/2}(x,y,z) = K'·(1+x)^{n+1}·Z_n(x, (zx)^{-1}, (yx)^{-1})`.
    pub half_step: RecurrenceCheck,
    /// `Z_{n+1}(x,y,z) = K''·(1+z)^{n+1}·Z_{n+1/2}((yz)^{-1}, (xz)^{-1}, z)`.
    pub integer_step: RecurrenceCheck,
    /// `Z_{n+1}(a,b,c) = (1+c)^{n+1}·(1+q/a)^{n+1}·Z_n(a/q, b, qc)`, normalized the same way.
    pub combined: RecurrenceCheck,
}

impl RecurrenceReport {
    pub fn holds(&self) -> bool {
        self.half_step.holds && self.integer_step.holds && self.combined.holds
    }
}

fn normalized_equal(rhs: &ZPoly, lhs: &ZPoly) -> RecurrenceCheck {
    match rhs.lowest_term() {
        Some((m, c)) if c.is_one() => {
            let k = m.inv();
            RecurrenceCheck { holds: rhs.mul_monomial(k) == *lhs, normalizer: Some(k) }
        }
        _ => RecurrenceCheck { holds: false, normalizer: None },
    }
}

/// Checks both half steps and the combined integer step from `Z_n`.
pub fn verify_recurrence(n: u32) -> RecurrenceReport {
    let (a, b, c, q) = (Monomial::A, Monomial::B, Monomial::C, Monomial::Q);
    let zn = closed_form_z(Order::integer(n));
    let zh = closed_form_z(Order::from_halves(2 * n + 1));
    let zn1 = closed_form_z(Order::integer(n + 1));

    let half_rhs = zn.substitute(&[a, (c * a).inv(), (b * a).inv()]).mul_one_plus_pow(a, n + 1);
    let int_rhs = zh.substitute(&[(b * c).inv(), (a * c).inv(), c]).mul_one_plus_pow(c, n + 1);
    let comb_rhs = zn.substitute(&[a / q, b, q * c]).mul_one_plus_pow(c, n + 1).mul_one_plus_pow(q / a, n + 1);

    RecurrenceReport {
        n,
        half_step: normalized_equal(&half_rhs, &zh),
        integer_step: normalized_equal(&int_rhs, &zn1),
        combined: normalized_equal(&comb_rhs, &zn1),
    }
}

/// Flip weight of a square, determined by its orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OrientationWeights(pub [Monomial; 6]);

impl OrientationWeights {
    /// NE and SW squares weigh `a`, N and S squares `b`, NW and SE squares `c`.
    pub const STANDARD: OrientationWeights = {
        // indexed in Orientation::ALL order: N, NE, SE, S, SW, NW
        let (a, b, c) = (Monomial::A, Monomial::B, Monomial::C);
        OrientationWeights([b, a, c, b, a, c])
    };

    pub fn weight(&self, o: Orientation) -> Monomial {
        self.0[o as usize]
    }
}

impl Display for OrientationWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, o) in Orientation::ALL.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{o}:{}", self.weight(*o))?;
        }
        Ok(())
    }
}

/// Flip weights of the squares of one diamond, indexed like `Diamond::squares`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightScheme {
    pub order: Order,
    pub face_weights: Vec<Monomial>,
}

impl WeightScheme {
    pub fn from_orientations(d: &Diamond, w: &OrientationWeights) -> WeightScheme {
        WeightScheme { order: d.order(), face_weights: d.squares().iter().map(|s| w.weight(s.orientation)).collect() }
    }
}

/// For each matching, how many flips above the minimal matching it sits at
/// each square: `(h(f) - h_min(f)) / 6`.
pub fn flip_counts(d: &Diamond, matchings: &[Matching]) -> Result<Vec<Vec<i64>>> {
    let hmin = if d.is_empty() { None } else { Some(height_function(d, &minimal_matching(d)?)?) };
    matchings
        .iter()
        .map(|m| {
            let h = height_function(d, m)?;
            let base = hmin.as_ref();
            h.values()
                .iter()
                .enumerate()
                .map(|(f, &v)| {
                    let diff = v - base.map_or(0, |b| b.at(f as u32));
                    if diff < 0 || diff % 6 != 0 {
                        Err(Error::Invariant(format!("height difference {diff} at square {f}")))
                    } else {
                        Ok(diff / 6)
                    }
                })
                .collect()
        })
        .collect()
}

/// `Σ_M Π_f μ(f)^{(h_M(f) - h_min(f))/6}` over the given matchings.
pub fn weighted_sum(d: &Diamond, scheme: &WeightScheme, matchings: &[Matching]) -> Result<ZPoly> {
    let counts = flip_counts(d, matchings)?;
    let mut z = ZPoly::zero();
    for k in counts {
        let m = k
            .iter()
            .zip(&scheme.face_weights)
            .fold(Monomial::ONE, |acc, (&e, &w)| acc * w.pow(e as i32));
        z.add_term(m, BigInt::one());
    }
    Ok(z)
}

/// All orientation weightings with values in `{a, b, c}` under which the
/// weighted sum over perfect matchings of `d` equals `Z_m`.
#[derive(Clone, Debug)]
pub struct WeightSolution {
    pub order: Order,
    /// Orientations of the diamond's squares; weights of the others are unconstrained.
    pub present: Vec<Orientation>,
    pub schemes: Vec<OrientationWeights>,
}

impl WeightSolution {
    pub fn admits(&self, w: &OrientationWeights) -> bool {
        self.schemes.iter().any(|s| self.present.iter().all(|&o| s.weight(o) == w.weight(o)))
    }
}

/// Solves for face weights on `d` by brute force over its perfect matchings.
pub fn derive_weight_scheme(d: &Diamond) -> Result<WeightSolution> {
    let matchings = crate::enumerate::list_matchings(d)?;
    let target = closed_form_z(d.order());
    let counts = flip_counts(d, &matchings)?;
    // Aggregate flips per orientation; matchings with equal totals weigh the same.
    let mut groups: HashMap<[i64; 6], u64> = HashMap::new();
    for k in &counts {
        let mut per = [0i64; 6];
        for (f, &e) in k.iter().enumerate() {
            per[d.squares()[f].orientation as usize] += e;
        }
        *groups.entry(per).or_default() += 1;
    }
    let mut present: Vec<Orientation> = d.squares().iter().map(|s| s.orientation).collect();
    present.sort();
    present.dedup();
    let choices = [Monomial::A, Monomial::B, Monomial::C];
    let mut schemes = Vec::new();
    for code in 0..3usize.pow(present.len() as u32) {
        let mut w = [Monomial::ONE; 6];
        let mut rest = code;
        for &o in &present {
            w[o as usize] = choices[rest % 3];
            rest /= 3;
        }
        let mut z = ZPoly::zero();
        for (per, &count) in &groups {
            let m = (0..6).fold(Monomial::ONE, |acc, o| acc * w[o].pow(per[o] as i32));
            z.add_term(m, BigInt::from(count));
        }
        if z == target {
            schemes.push(OrientationWeights(w));
        }
    }
    if schemes.is_empty() {
        return Err(Error::Invariant(format!("no orientation weighting reproduces Z_{}", d.order())));
    }
    Ok(WeightSolution { order: d.order(), present, schemes })
}
