//! Counting perfect matchings three independent ways: the closed form,
//! exhaustive backtracking, and a Kasteleyn determinant.

use std::collections::VecDeque;
use std::ops::{Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::diamond::Diamond;
use crate::error::{Error, Result};
use crate::lattice::classify;
use crate::matching::Matching;
use crate::order::Order;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Backtracking,
    Kasteleyn,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountResult {
    pub order: Order,
    /// Written as a decimal string; counts outgrow JSON numbers quickly.
    #[serde(serialize_with = "as_decimal")]
    pub count: BigUint,
    pub method: Method,
    /// Set when the graph has unequal color classes, so no perfect matching exists.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub unbalanced: bool,
}

fn as_decimal<S: Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

impl CountResult {
    pub fn to_json(&self) -> String {
        crate::json::to_sorted_string(self)
    }
}

/// `2^{n(n+1)}` for `m = n`, `2^{(n+1)²}` for `m = n + 1/2`.
pub fn count_formula(m: Order) -> BigUint {
    let n = u64::from(m.floor());
    let e = if m.is_integer() { n * (n + 1) } else { (n + 1) * (n + 1) };
    BigUint::one() << e
}

pub fn formula_count(m: Order) -> CountResult {
    CountResult { order: m, count: count_formula(m), method: Method::ClosedForm, unbalanced: false }
}

/// Search nodes allowed before enumeration gives up.
pub const DEFAULT_BUDGET: u64 = 2_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Count,
    List,
}

#[derive(Clone, Debug)]
pub enum Enumeration {
    Count(CountResult),
    List(Vec<Matching>),
}

struct Search<'a> {
    d: &'a Diamond,
    covered: Vec<bool>,
    chosen: Vec<u32>,
    found: u128,
    list: Option<Vec<Matching>>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn stranded(&self, x: u32) -> bool {
        !self.covered[x as usize]
            && self.d.incident_edges(x).iter().all(|&e| self.covered[self.d.other_end(e, x) as usize])
    }

    fn neighbors_stranded(&self, v: u32) -> bool {
        self.d.incident_edges(v).iter().any(|&e| self.stranded(self.d.other_end(e, v)))
    }

    fn run(&mut self, from: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::ResourceLimit(format!(
                "enumerating D_{} took more than {} search nodes",
                self.d.order(),
                self.budget
            )));
        }
        let Some(v) = (from..self.covered.len()).find(|&i| !self.covered[i]) else {
            self.found += 1;
            if let Some(list) = &mut self.list {
                list.push(Matching::from_edge_ids(self.d, self.chosen.iter().copied())?);
            }
            return Ok(());
        };
        let v = v as u32;
        for &e in self.d.incident_edges(v) {
            let w = self.d.other_end(e, v);
            if self.covered[w as usize] {
                continue;
            }
            self.covered[v as usize] = true;
            self.covered[w as usize] = true;
            self.chosen.push(e);
            if !self.neighbors_stranded(v) && !self.neighbors_stranded(w) {
                self.run(v as usize + 1)?;
            }
            self.chosen.pop();
            self.covered[v as usize] = false;
            self.covered[w as usize] = false;
        }
        Ok(())
    }
}

/// Exhaustive backtracking: branch on the lowest uncovered vertex, trying its
/// edges in order, and cut branches that leave a vertex with no free neighbor.
pub fn enumerate_matchings(d: &Diamond, mode: Mode, budget: u64) -> Result<Enumeration> {
    let mut s = Search {
        d,
        covered: vec![false; d.vertices().len()],
        chosen: Vec::new(),
        found: 0,
        list: (mode == Mode::List).then(Vec::new),
        nodes: 0,
        budget,
    };
    s.run(0)?;
    Ok(match s.list {
        Some(list) => Enumeration::List(list),
        None => Enumeration::Count(CountResult {
            order: d.order(),
            count: BigUint::from(s.found),
            method: Method::Backtracking,
            unbalanced: false,
        }),
    })
}

pub fn count_matchings(d: &Diamond) -> Result<CountResult> {
    match enumerate_matchings(d, Mode::Count, DEFAULT_BUDGET)? {
        Enumeration::Count(c) => Ok(c),
        Enumeration::List(_) => unreachable!("count mode returns a count"),
    }
}

/// All perfect matchings of `d`, in search order.
pub fn list_matchings(d: &Diamond) -> Result<Vec<Matching>> {
    match enumerate_matchings(d, Mode::List, DEFAULT_BUDGET)? {
        Enumeration::List(l) => Ok(l),
        Enumeration::Count(_) => unreachable!("list mode returns a list"),
    }
}

/// Signs (`true` = negative) for every edge such that each square has an odd
/// number of negative edges. Edges of a BFS spanning tree stay positive; the
/// remaining edges are fixed one face at a time, always on a face with a
/// single unfixed edge.
pub fn kasteleyn_signs(d: &Diamond) -> Result<Vec<bool>> {
    let ne = d.edges().len();
    let mut fixed = vec![false; ne];
    let mut negative = vec![false; ne];
    let mut seen = vec![false; d.vertices().len()];
    if !d.is_empty() {
        seen[0] = true;
        let mut queue = VecDeque::from([0u32]);
        while let Some(v) = queue.pop_front() {
            for &e in d.incident_edges(v) {
                let w = d.other_end(e, v);
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    fixed[e as usize] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let faces = d.squares().len() as u32;
    let mut faces_of_edge = vec![Vec::new(); ne];
    for f in 0..faces {
        for e in d.face_edges(f) {
            faces_of_edge[e as usize].push(f);
        }
    }
    let unfixed = |f: u32, fixed: &[bool]| d.face_edges(f).into_iter().filter(|&e| !fixed[e as usize]).count();
    let mut done = vec![false; faces as usize];
    let mut queue: VecDeque<u32> = (0..faces).filter(|&f| unfixed(f, &fixed) == 1).collect();
    while let Some(f) = queue.pop_front() {
        if done[f as usize] || unfixed(f, &fixed) != 1 {
            continue;
        }
        let edges = d.face_edges(f);
        let last = edges.into_iter().find(|&e| !fixed[e as usize]).expect("one unfixed edge");
        let negatives = edges.iter().filter(|&&e| fixed[e as usize] && negative[e as usize]).count();
        negative[last as usize] = negatives % 2 == 0;
        fixed[last as usize] = true;
        done[f as usize] = true;
        for &g in &faces_of_edge[last as usize] {
            if !done[g as usize] && unfixed(g, &fixed) == 1 {
                queue.push_back(g);
            }
        }
    }
    for f in 0..faces {
        let odd = d.face_edges(f).iter().filter(|&&e| negative[e as usize]).count() % 2 == 1;
        if !done[f as usize] || !odd {
            return Err(Error::Invariant(format!("could not sign the square {f} of D_{}", d.order())));
        }
    }
    Ok(negative)
}

/// Determinant by fraction-free (Bareiss) elimination; every division is exact.
pub fn bareiss_determinant<T>(mut a: Vec<Vec<T>>) -> T
where
    T: Clone + Zero + One + PartialEq + Neg<Output = T>,
    for<'x> &'x T: Mul<&'x T, Output = T> + Sub<&'x T, Output = T> + Div<&'x T, Output = T>,
{
    let n = a.len();
    if n == 0 {
        return T::one();
    }
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = &num / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Absolute value of the determinant of the Kasteleyn-signed black-by-white
/// adjacency matrix.
pub fn kasteleyn_count(d: &Diamond) -> Result<CountResult> {
    let mut black = Vec::new();
    let mut white = Vec::new();
    let mut slot = vec![0usize; d.vertices().len()];
    for (i, &v) in d.vertices().iter().enumerate() {
        let list = if classify(v)?.is_black() { &mut black } else { &mut white };
        slot[i] = list.len();
        list.push(i as u32);
    }
    if black.len() != white.len() {
        return Ok(CountResult { order: d.order(), count: BigUint::zero(), method: Method::Kasteleyn, unbalanced: true });
    }
    let negative = kasteleyn_signs(d)?;
    let n = black.len();
    let mut a = vec![vec![BigInt::zero(); n]; n];
    for (k, e) in d.edges().iter().enumerate() {
        let (b, w) = if classify(d.vertex(e.u))?.is_black() { (e.u, e.v) } else { (e.v, e.u) };
        a[slot[b as usize]][slot[w as usize]] = if negative[k] { -BigInt::one() } else { BigInt::one() };
    }
    let det = bareiss_determinant(a);
    Ok(CountResult {
        order: d.order(),
        count: det.abs().to_biguint().expect("absolute value is nonnegative"),
        method: Method::Kasteleyn,
        unbalanced: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diamond::build_diamond;

    fn d(h: u32) -> Diamond {
        build_diamond(Order::from_halves(h)).unwrap()
    }

    #[test]
    fn formula_values() {
        assert_eq!(count_formula(Order::ZERO), BigUint::from(1u32));
        assert_eq!(count_formula(Order::integer(1)), BigUint::from(4u32));
        assert_eq!(count_formula(Order::integer(3)), BigUint::from(4096u32));
        assert_eq!(count_formula(Order::from_halves(1)), BigUint::from(2u32));
        assert_eq!(count_formula(Order::from_halves(5)), BigUint::from(512u32));
        assert_eq!(count_formula(Order::integer(100)), BigUint::one() << 10100u32);
    }

    #[test]
    fn determinant_of_small_integer_matrices() {
        let m = |rows: &[&[i64]]| rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        assert_eq!(bareiss_determinant::<BigInt>(m(&[&[2, 1], &[1, 3]])), BigInt::from(5));
        assert_eq!(bareiss_determinant::<BigInt>(m(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(bareiss_determinant::<BigInt>(m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]])), BigInt::from(-3));
        assert_eq!(bareiss_determinant::<BigInt>(m(&[&[1, 2], &[2, 4]])), BigInt::zero());
        assert_eq!(bareiss_determinant::<i64>(vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]), -1);
    }

    #[test]
    fn backtracking_small_orders() {
        let want = [1u32, 2, 4, 16, 64];
        for (h, &w) in want.iter().enumerate() {
            assert_eq!(count_matchings(&d(h as u32)).unwrap().count, BigUint::from(w));
        }
    }

    #[test]
    fn listed_matchings_are_distinct_and_perfect() {
        let dm = d(3);
        let list = list_matchings(&dm).unwrap();
        assert_eq!(list.len(), 16);
        let set: std::collections::HashSet<_> = list.iter().cloned().collect();
        assert_eq!(set.len(), 16);
        assert!(list.iter().all(|m| m.is_perfect(&dm).unwrap()));
    }

    #[test]
    fn budget_overflow_is_an_error() {
        let err = enumerate_matchings(&d(6), Mode::Count, 100).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit(_)));
    }

    #[test]
    fn kasteleyn_small_orders() {
        assert_eq!(kasteleyn_count(&d(1)).unwrap().count, BigUint::from(2u32));
        assert_eq!(kasteleyn_count(&d(4)).unwrap().count, BigUint::from(64u32));
    }

    #[test]
    fn count_json_uses_strings() {
        let j = formula_count(Order::integer(3)).to_json();
        assert_eq!(j, r#"{"count":"4096","method":"closed_form","order":3}"#);
    }
}
