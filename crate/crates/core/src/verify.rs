//! The invariant suite behind `dp3 verify`.
//!
//! Each check runs up to the requested order, capped where exhaustive work
//! stops being cheap.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::diamond::{matching_size, Diamond};
use crate::enumerate::{count_formula, count_matchings, kasteleyn_count, list_matchings};
use crate::error::Result;
use crate::genfun::{closed_form_z, verify_recurrence, verify_specialization, weighted_sum, OrientationWeights, WeightScheme};
use crate::height::{height_function, loop_sum_around};
use crate::matching::{apply_flip, flip_direction, flippable_faces, meet, minimal_matching, FlipDirection, Matching};
use crate::order::Order;
use crate::shuffle::{grow, shuffle, DiamondCache, MaskBits, SeededBits};

pub const BRUTE_FORCE_MAX: Order = Order::integer(3);
pub const KASTELEYN_MAX: Order = Order::integer(4);
pub const SHUFFLE_IDENTITY_MAX: Order = Order::from_halves(3);
pub const HEIGHTS_MAX: Order = Order::integer(2);
pub const WEIGHTS_MAX: Order = Order::from_halves(5);
pub const TRAJECTORY_SEEDS: u64 = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<Order>,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub max_order: Order,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        crate::json::to_sorted_string(self)
    }
}

struct Suite {
    checks: Vec<CheckResult>,
}

impl Suite {
    fn record(&mut self, name: &str, order: Option<Order>, outcome: Result<std::result::Result<(), String>>) {
        let (passed, detail) = match outcome {
            Ok(Ok(())) => (true, String::new()),
            Ok(Err(why)) => (false, why),
            Err(e) => (false, e.to_string()),
        };
        self.checks.push(CheckResult { name: name.to_string(), order, passed, detail });
    }
}

fn expect(ok: bool, why: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

/// Runs every check for orders up to `max`.
pub fn run(max: Order) -> VerifyReport {
    let mut suite = Suite { checks: Vec::new() };
    let mut cache = DiamondCache::new();
    for m in max.up_to() {
        let d = match cache.get(m) {
            Ok(d) => d,
            Err(e) => {
                suite.record("build", Some(m), Err(e));
                continue;
            }
        };
        suite.record("vertex_count", Some(m), Ok(check_vertex_count(&d)));
        suite.record("closed_form_specialization", Some(m), Ok(expect(verify_specialization(m), || "Z(1,1,1) differs".into())));
        if m <= BRUTE_FORCE_MAX {
            suite.record("brute_force_count", Some(m), check_brute_force(&d));
        }
        if m <= KASTELEYN_MAX {
            suite.record("kasteleyn_count", Some(m), check_kasteleyn(&d));
        }
        if m <= HEIGHTS_MAX {
            suite.record("heights_and_flips", Some(m), check_heights(&d));
            suite.record("meet_is_minimum", Some(m), check_meet(&d));
        }
        if m <= WEIGHTS_MAX {
            suite.record("weighted_enumeration", Some(m), check_weights(&d));
        }
        if m < max && m <= SHUFFLE_IDENTITY_MAX {
            suite.record("shuffle_identity", Some(m), check_shuffle_identity(&d, &mut cache));
        }
    }
    for n in 0..=max.floor() {
        let r = verify_recurrence(n);
        suite.record("recurrences", Some(Order::integer(n)), Ok(expect(r.holds(), || format!("{r:?}"))));
    }
    if max > Order::ZERO {
        suite.record("shuffle_trajectories", Some(max), check_trajectories(max, &mut cache));
    }
    let passed = suite.checks.iter().all(|c| c.passed);
    VerifyReport { max_order: max, passed, checks: suite.checks }
}

fn check_vertex_count(d: &Diamond) -> std::result::Result<(), String> {
    let want = 2 * matching_size(d.order()) as usize;
    expect(d.vertices().len() == want, || format!("{} vertices, expected {want}", d.vertices().len()))
}

fn check_brute_force(d: &Diamond) -> Result<std::result::Result<(), String>> {
    let got = count_matchings(d)?.count;
    let want = count_formula(d.order());
    Ok(expect(got == want, || format!("backtracking found {got}, expected {want}")))
}

fn check_kasteleyn(d: &Diamond) -> Result<std::result::Result<(), String>> {
    let got = kasteleyn_count(d)?.count;
    let want = count_formula(d.order());
    Ok(expect(got == want, || format!("determinant gave {got}, expected {want}")))
}

fn check_heights(d: &Diamond) -> Result<std::result::Result<(), String>> {
    for m in list_matchings(d)? {
        let h = height_function(d, &m)?;
        for &v in d.vertices() {
            if let Some(s) = loop_sum_around(d, &m, v) {
                if s != 0 {
                    return Ok(Err(format!("loop sum {s} around {v}")));
                }
            }
        }
        for f in flippable_faces(d, &m) {
            let dir = flip_direction(d, &m, f).expect("flippable face has a direction");
            let h1 = height_function(d, &apply_flip(d, &m, f)?)?;
            for g in 0..d.squares().len() as u32 {
                let want = match (g == f, dir) {
                    (false, _) => 0,
                    (true, FlipDirection::Up) => 6,
                    (true, FlipDirection::Down) => -6,
                };
                if h1.at(g) - h.at(g) != want {
                    return Ok(Err(format!("flip at face {f} changed face {g} by {}", h1.at(g) - h.at(g))));
                }
            }
        }
    }
    Ok(Ok(()))
}

fn check_meet(d: &Diamond) -> Result<std::result::Result<(), String>> {
    let ms = list_matchings(d)?;
    let hs = ms.iter().map(|m| height_function(d, m)).collect::<Result<Vec<_>>>()?;
    for i in 0..ms.len() {
        for j in 0..ms.len() {
            let x = meet(d, &ms[i], &ms[j])?;
            if height_function(d, &x)? != hs[i].min(&hs[j]) {
                return Ok(Err(format!("meet of matchings {i} and {j} is not the pointwise minimum")));
            }
        }
    }
    let min = minimal_matching(d)?;
    let hmin = height_function(d, &min)?;
    let lowest = hs.iter().all(|h| h.values().iter().zip(hmin.values()).all(|(a, b)| a >= b));
    Ok(expect(lowest, || "minimal matching is not below every other".into()))
}

fn check_weights(d: &Diamond) -> Result<std::result::Result<(), String>> {
    let ms = list_matchings(d)?;
    let scheme = WeightScheme::from_orientations(d, &OrientationWeights::STANDARD);
    let got = weighted_sum(d, &scheme, &ms)?;
    let want = closed_form_z(d.order());
    Ok(expect(got == want, || format!("weighted sum {got} differs from {want}")))
}

fn check_shuffle_identity(d: &Diamond, cache: &mut DiamondCache) -> Result<std::result::Result<(), String>> {
    let n = d.order().floor() as usize;
    let after: HashSet<Matching> = list_matchings(&*cache.get(d.order().next())?)?.into_iter().collect();
    let before = list_matchings(d)?;
    // output -> (preimage count, annihilations on the way there)
    let mut preimages: HashMap<Matching, (usize, usize)> = HashMap::new();
    for m in &before {
        let mut mask = 0u64;
        loop {
            let (_, img, trace) = shuffle(d, m, &mut MaskBits::new(mask))?;
            let (c, a) = (trace.creations(), trace.annihilations());
            if c != a + n + 1 {
                return Ok(Err(format!("{c} creations against {a} annihilations")));
            }
            let entry = preimages.entry(img).or_insert((0, a));
            if entry.1 != a {
                return Ok(Err("one output reached with different annihilation counts".into()));
            }
            entry.0 += 1;
            mask += 1;
            if mask >= 1 << c {
                break;
            }
        }
    }
    if preimages.keys().any(|m| !after.contains(m)) || preimages.len() != after.len() {
        return Ok(Err("shuffle images differ from the perfect matchings of the next diamond".into()));
    }
    if let Some((count, a)) = preimages.values().find(|&&(count, a)| count != 1 << a) {
        return Ok(Err(format!("an output with {a} annihilations has {count} preimages")));
    }
    Ok(expect(after.len() == (1 << (n + 1)) * before.len(), || {
        format!("{} matchings after, {} before", after.len(), before.len())
    }))
}

fn check_trajectories(max: Order, cache: &mut DiamondCache) -> Result<std::result::Result<(), String>> {
    for seed in 0..TRAJECTORY_SEEDS {
        let mut prev = 0usize;
        let mut failure = None;
        grow(cache, max, |s| SeededBits::new(seed, s), |t, next, m| {
            if failure.is_some() {
                return;
            }
            let n = t.order_before.floor() as usize;
            if t.tails_added != 2 * n + 1 {
                failure = Some(format!("seed {seed}: {} tails from D_{}", t.tails_added, t.order_before));
            } else if t.creations() != t.annihilations() + n + 1 {
                failure = Some(format!("seed {seed}: creation balance off from D_{}", t.order_before));
            } else if m.len() != prev + 3 * n + 2 || !m.is_perfect(next).unwrap_or(false) {
                failure = Some(format!("seed {seed}: matching on D_{} is not perfect", t.order_after));
            }
            prev = m.len();
        })?;
        if let Some(f) = failure {
            return Ok(Err(f));
        }
    }
    Ok(Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_through_two_and_a_half() {
        let r = run(Order::from_halves(5));
        assert!(r.passed, "{:?}", r.failures().collect::<Vec<_>>());
        let names: HashSet<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
        assert!(names.contains("meet_is_minimum") && names.contains("shuffle_identity"));
    }

    #[test]
    fn report_json_has_sorted_keys() {
        let r = run(Order::ZERO);
        let j = r.to_json();
        assert!(j.starts_with("{\"checks\":[{\"name\":"));
        assert!(j.contains("\"max_order\":0"));
    }
}
