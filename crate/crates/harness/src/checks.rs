//! Oracle-equivalence and algebraic-identity checks.
//!
//! Each check compares a formula-level or table-level computation with an
//! independent direct computation and counts disagreements.

use grouplog_core::gen::{pi, random_formula, theta};
use grouplog_core::group::{ut3_entries, ut3_index};
use grouplog_core::{
    build_group, definable_set, eval_sentence, eval_with, relation, Env, EvalOptions, Family, FiniteGroup, Mode,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::NamedGroup;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub cases: u64,
    pub mismatches: u64,
    /// First disagreement, for diagnosis.
    pub first: Option<String>,
}

impl CheckOutcome {
    fn new(name: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            cases: 0,
            mismatches: 0,
            first: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.mismatches += 1;
            if self.first.is_none() {
                self.first = Some(describe());
            }
        }
    }

    fn merge(mut self, other: CheckOutcome) -> Self {
        self.cases += other.cases;
        self.mismatches += other.mismatches;
        self.first = self.first.or(other.first);
        self
    }

    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.cases > 0
    }
}

fn env(pairs: &[(&str, usize)]) -> Env {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn merge_all(name: &str, parts: Vec<CheckOutcome>) -> CheckOutcome {
    parts.into_iter().fold(CheckOutcome::new(name), CheckOutcome::merge)
}

/// `θ_n(x, y)` against `x^n = y` for all `x`, `y` and `1 ≤ n ≤ max_n`.
pub fn theta_vs_power(groups: &[NamedGroup], max_n: u64) -> CheckOutcome {
    let formulas: Vec<_> = (1..=max_n).map(|n| theta(n).expect("n >= 1")).collect();
    let parts = groups
        .par_iter()
        .map(|ng| {
            let g = &ng.group;
            let mut out = CheckOutcome::new("theta");
            for (i, f) in formulas.iter().enumerate() {
                let n = i as u64 + 1;
                for x in 0..g.order() {
                    let set = definable_set(g, f, "y", &env(&[("x", x)]), &EvalOptions::default());
                    let expected = g.power(x, n as i64);
                    for y in 0..g.order() {
                        let got = set.as_ref().map(|(s, _)| s.contains(y)).ok();
                        out.record(got == Some(y == expected), || format!("{} n={n} x={x} y={y}", ng.name));
                    }
                }
            }
            out
        })
        .collect();
    merge_all("theta vs power", parts)
}

/// `π(g; x1, x2)` against subgroup closure for all generator pairs, which
/// covers every generating set of size at most 2.
pub fn pi_vs_closure(groups: &[NamedGroup]) -> CheckOutcome {
    let parts = groups
        .par_iter()
        .map(|ng| {
            let g = &ng.group;
            let f = pi(2, g.order() as u64);
            let mut out = CheckOutcome::new("pi");
            for x1 in 0..g.order() {
                for x2 in x1..g.order() {
                    let closure = g.subgroup_closure(&[x1, x2]).0;
                    let set = definable_set(g, &f, "g", &env(&[("x1", x1), ("x2", x2)]), &EvalOptions::default());
                    for e in 0..g.order() {
                        let got = set.as_ref().map(|(s, _)| s.contains(e)).ok();
                        out.record(got == Some(closure.contains(e)), || {
                            format!("{} g={e} x1={x1} x2={x2}", ng.name)
                        });
                    }
                }
            }
            let empty = pi(0, g.order() as u64);
            let set = definable_set(g, &empty, "g", &Env::new(), &EvalOptions::default());
            for e in 0..g.order() {
                let got = set.as_ref().map(|(s, _)| s.contains(e)).ok();
                out.record(got == Some(e == g.identity()), || {
                    format!("{} g={e} with no generators", ng.name)
                });
            }
            out
        })
        .collect();
    merge_all("pi vs closure", parts)
}

/// Naive, grounded and relational evaluation on `count` random formulas
/// with at most 3 quantifiers, plus the outer-block search on their
/// existential closures. Each formula runs on one group, in rotation.
pub fn engines_agree(groups: &[NamedGroup], count: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = CheckOutcome::new("engines agree");
    if groups.is_empty() {
        return out;
    }
    for i in 0..count {
        let f = random_formula(&mut rng, 3, &["p"]);
        let ng = &groups[i % groups.len()];
        let g = &ng.group;
        let run =
            |f: &grouplog_core::Formula, e: &Env, mode: Mode| eval_with(g, f, e, &EvalOptions::mode(mode)).map(|r| r.0);
        for p in 0..g.order() {
            let e = env(&[("p", p)]);
            let naive = run(&f, &e, Mode::Naive);
            let grounded = run(&f, &e, Mode::Grounded);
            let relational = run(&f, &e, Mode::Relational);
            out.record(naive.is_ok() && naive == grounded && naive == relational, || {
                format!(
                    "{} p={p} {f}: naive {naive:?} grounded {grounded:?} relational {relational:?}",
                    ng.name
                )
            });
        }
        let closed = grouplog_core::Formula::exists("p", f.clone());
        let naive = run(&closed, &Env::new(), Mode::Naive);
        let search = eval_sentence(g, &closed, &EvalOptions::default()).map(|o| o.holds);
        let nonempty = relation(g, &f).map(|r| !r.is_empty());
        out.record(naive.is_ok() && naive == search && naive == nonempty, || {
            format!(
                "{} {closed}: naive {naive:?} search {search:?} relation {nonempty:?}",
                ng.name
            )
        });
    }
    out
}

fn ut3_gens(n: usize) -> (usize, usize) {
    (ut3_index(n, 1, 0, 0), ut3_index(n, 0, 1, 0))
}

fn ut3(n: usize) -> FiniteGroup {
    build_group(&Family::Ut3(n)).expect("small ut3")
}

/// `a^α1 b^β1 c^γ1 · a^α2 b^β2 c^γ2 = a^(α1+α2) b^(β1+β2) c^(γ1+γ2-α2β1)`
/// with `a = t12(1)`, `b = t23(1)`, `c = [a, b]`, all exponents in `0..n`.
pub fn ut3_multiplication_law(n: usize) -> CheckOutcome {
    let g = ut3(n);
    let (a, b) = ut3_gens(n);
    let c = g.commutator(a, b);
    let mut out = CheckOutcome::new(format!("ut3({n}) multiplication law"));
    let word = |x: i64, y: i64, z: i64| g.mul(g.mul(g.power(a, x), g.power(b, y)), g.power(c, z));
    let m = n as i64;
    for a1 in 0..m {
        for b1 in 0..m {
            for c1 in 0..m {
                let left = word(a1, b1, c1);
                for a2 in 0..m {
                    for b2 in 0..m {
                        for c2 in 0..m {
                            let lhs = g.mul(left, word(a2, b2, c2));
                            let rhs = word(a1 + a2, b1 + b2, (c1 + c2 - a2 * b1).rem_euclid(m));
                            out.record(lhs == rhs, || format!("({a1},{b1},{c1})*({a2},{b2},{c2})"));
                        }
                    }
                }
            }
        }
    }
    let entries_ok = (0..g.order()).all(|x| {
        let (p, q, r) = ut3_entries(n, x);
        ut3_index(n, p, q, r) == x
    });
    out.record(entries_ok, || "index encoding is not a bijection".to_string());
    out
}

/// `[x^m1 y^n1, x^m2 y^n2] = [x, y]^(m1·n2 − m2·n1)` for `x = a`, `y = b`.
pub fn ut3_commutator_identity(n: usize) -> CheckOutcome {
    let g = ut3(n);
    let (x, y) = ut3_gens(n);
    let c = g.commutator(x, y);
    let mut out = CheckOutcome::new(format!("ut3({n}) commutator identity"));
    let m = n as i64;
    for m1 in 0..m {
        for n1 in 0..m {
            let u = g.mul(g.power(x, m1), g.power(y, n1));
            for m2 in 0..m {
                for n2 in 0..m {
                    let v = g.mul(g.power(x, m2), g.power(y, n2));
                    let ok = g.commutator(u, v) == g.power(c, m1 * n2 - m2 * n1);
                    out.record(ok, || format!("m1={m1} n1={n1} m2={m2} n2={n2}"));
                }
            }
        }
    }
    out
}

/// The center has exactly `n` elements and equals the set of commutators.
pub fn ut3_center(n: usize) -> CheckOutcome {
    let g = ut3(n);
    let center = g.center();
    let comms = g.commutator_set();
    let mut out = CheckOutcome::new(format!("ut3({n}) center"));
    out.record(center.len() == n, || format!("center has {} elements", center.len()));
    for e in 0..g.order() {
        out.record(center.contains(e) == comms.contains(e), || format!("element {e}"));
        let (p, q, _) = ut3_entries(n, e);
        out.record(center.contains(e) == (p == 0 && q == 0), || {
            format!("element {e} is not t13(z)")
        });
    }
    out
}
