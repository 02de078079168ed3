//! Bottom-up evaluation into tables of satisfying assignments.
//!
//! Every subformula becomes a relation over its free variables (sorted by
//! name). Subformulas with the same syntax share one table.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use fixedbitset::FixedBitSet;

use super::{CTerm, Env, EvalError, EvalStats, Scope};
use crate::formula::Formula;
use crate::group::FiniteGroup;

/// Largest number of free variables a subformula may have.
pub const DEFAULT_ARITY_CAP: usize = 4;

const DENSE_MAX_ARITY: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Rows {
    /// Bit `Σ t_i·n^(k-1-i)` is set for each tuple `t`.
    Dense(FixedBitSet),
    Sparse(BTreeSet<Vec<u32>>),
}

/// The set of assignments to `columns` that satisfy a formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    columns: Vec<String>,
    order: usize,
    rows: Rows,
}

fn index(t: &[u32], n: usize) -> usize {
    t.iter().fold(0, |acc, &v| acc * n + v as usize)
}

/// Calls `f` on every tuple in `0..n` of length `k`, in lexicographic order.
fn for_each_tuple(k: usize, n: usize, mut f: impl FnMut(&[u32])) {
    let mut t = vec![0u32; k];
    loop {
        f(&t);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            t[i] += 1;
            if (t[i] as usize) < n {
                break;
            }
            t[i] = 0;
        }
    }
}

impl Relation {
    fn tabulate(columns: Vec<String>, n: usize, mut pred: impl FnMut(&[u32]) -> bool) -> Relation {
        let k = columns.len();
        let rows = if k <= DENSE_MAX_ARITY {
            let mut bits = FixedBitSet::with_capacity(n.pow(k as u32));
            for_each_tuple(k, n, |t| {
                if pred(t) {
                    bits.insert(index(t, n));
                }
            });
            Rows::Dense(bits)
        } else {
            let mut set = BTreeSet::new();
            for_each_tuple(k, n, |t| {
                if pred(t) {
                    set.insert(t.to_vec());
                }
            });
            Rows::Sparse(set)
        };
        Relation {
            columns,
            order: n,
            rows,
        }
    }

    fn from_rows(columns: Vec<String>, n: usize, rows: impl IntoIterator<Item = Vec<u32>>) -> Relation {
        if columns.len() <= DENSE_MAX_ARITY {
            let mut bits = FixedBitSet::with_capacity(n.pow(columns.len() as u32));
            for r in rows {
                bits.insert(index(&r, n));
            }
            Relation {
                columns,
                order: n,
                rows: Rows::Dense(bits),
            }
        } else {
            Relation {
                columns,
                order: n,
                rows: Rows::Sparse(rows.into_iter().collect()),
            }
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn arity(&self) -> usize {
        self.columns.len()
    }

    pub fn len(&self) -> usize {
        match &self.rows {
            Rows::Dense(b) => b.count_ones(..),
            Rows::Sparse(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Membership of a tuple given in column order.
    pub fn contains(&self, tuple: &[usize]) -> bool {
        let t: Vec<u32> = tuple.iter().map(|&v| v as u32).collect();
        self.contains_raw(&t)
    }

    fn contains_raw(&self, t: &[u32]) -> bool {
        if t.len() != self.columns.len() || t.iter().any(|&v| v as usize >= self.order) {
            return false;
        }
        match &self.rows {
            Rows::Dense(b) => b.contains(index(t, self.order)),
            Rows::Sparse(s) => s.contains(t),
        }
    }

    fn raw_rows(&self) -> Vec<Vec<u32>> {
        match &self.rows {
            Rows::Dense(b) => {
                let k = self.columns.len();
                b.ones()
                    .map(|mut i| {
                        let mut t = vec![0u32; k];
                        for slot in t.iter_mut().rev() {
                            *slot = (i % self.order) as u32;
                            i /= self.order;
                        }
                        t
                    })
                    .collect()
            }
            Rows::Sparse(s) => s.iter().cloned().collect(),
        }
    }

    /// All tuples, in lexicographic order.
    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.raw_rows()
            .into_iter()
            .map(|r| r.into_iter().map(|v| v as usize).collect())
            .collect()
    }
}

struct Builder<'g> {
    g: &'g FiniteGroup,
    cap: usize,
    memo: HashMap<Formula, Rc<Relation>>,
    stats: EvalStats,
}

fn positions(from: &[String], to: &[String]) -> Vec<usize> {
    from.iter()
        .map(|c| to.iter().position(|x| x == c).expect("column present"))
        .collect()
}

impl Builder<'_> {
    fn build(&mut self, f: &Formula) -> Result<Rc<Relation>, EvalError> {
        if let Some(r) = self.memo.get(f) {
            return Ok(Rc::clone(r));
        }
        let columns: Vec<String> = f.free_vars().into_iter().collect();
        if columns.len() > self.cap {
            return Err(EvalError::ArityCapExceeded {
                formula: f.to_string(),
                arity: columns.len(),
                cap: self.cap,
            });
        }
        let n = self.g.order();
        let rel = match f {
            Formula::Eq(a, b) => {
                let mut scope = Scope::default();
                for c in &columns {
                    scope.bind(c);
                }
                let (a, b): (CTerm, CTerm) = (scope.term(a)?, scope.term(b)?);
                let g = self.g;
                Relation::tabulate(columns, n, |t| a.eval(g, t) == b.eval(g, t))
            }
            Formula::Not(h) => {
                let r = self.build(h)?;
                Relation::tabulate(columns, n, |t| !r.contains_raw(t))
            }
            Formula::Or(a, b) | Formula::Implies(a, b) => {
                let (ra, rb) = (self.build(a)?, self.build(b)?);
                let (pa, pb) = (positions(&ra.columns, &columns), positions(&rb.columns, &columns));
                let imp = matches!(f, Formula::Implies(..));
                let mut ta = Vec::new();
                let mut tb = Vec::new();
                Relation::tabulate(columns, n, |t| {
                    ta.clear();
                    ta.extend(pa.iter().map(|&i| t[i]));
                    tb.clear();
                    tb.extend(pb.iter().map(|&i| t[i]));
                    ra.contains_raw(&ta) != imp || rb.contains_raw(&tb)
                })
            }
            Formula::And(a, b) => {
                let (ra, rb) = (self.build(a)?, self.build(b)?);
                let pa = positions(&ra.columns, &columns);
                let pb = positions(&rb.columns, &columns);
                let shared: Vec<(usize, usize)> = ra
                    .columns
                    .iter()
                    .enumerate()
                    .filter_map(|(i, c)| rb.columns.iter().position(|x| x == c).map(|j| (i, j)))
                    .collect();
                let mut index_b: HashMap<Vec<u32>, Vec<Vec<u32>>> = HashMap::new();
                for r in rb.raw_rows() {
                    let key = shared.iter().map(|&(_, j)| r[j]).collect();
                    index_b.entry(key).or_default().push(r);
                }
                let mut out = Vec::new();
                for r in ra.raw_rows() {
                    let key: Vec<u32> = shared.iter().map(|&(i, _)| r[i]).collect();
                    for s in index_b.get(&key).into_iter().flatten() {
                        let mut t = vec![0u32; columns.len()];
                        for (k, &p) in pa.iter().enumerate() {
                            t[p] = r[k];
                        }
                        for (k, &p) in pb.iter().enumerate() {
                            t[p] = s[k];
                        }
                        out.push(t);
                    }
                }
                Relation::from_rows(columns, n, out)
            }
            Formula::Exists(v, h) | Formula::Forall(v, h) => {
                let r = self.build(h)?;
                match r.columns.iter().position(|c| c == v) {
                    None => (*r).clone(),
                    Some(drop) => {
                        let project = |row: &[u32]| -> Vec<u32> {
                            row.iter()
                                .enumerate()
                                .filter(|&(i, _)| i != drop)
                                .map(|(_, &x)| x)
                                .collect()
                        };
                        if matches!(f, Formula::Exists(..)) {
                            Relation::from_rows(columns, n, r.raw_rows().iter().map(|row| project(row)))
                        } else {
                            let mut counts: HashMap<Vec<u32>, usize> = HashMap::new();
                            for row in r.raw_rows() {
                                *counts.entry(project(&row)).or_default() += 1;
                            }
                            Relation::from_rows(columns, n, counts.into_iter().filter(|&(_, c)| c == n).map(|(k, _)| k))
                        }
                    }
                }
            }
        };
        self.stats.relations_built += 1;
        self.stats.max_relation_rows = self.stats.max_relation_rows.max(rel.len() as u64);
        let rc = Rc::new(rel);
        self.memo.insert(f.clone(), Rc::clone(&rc));
        Ok(rc)
    }
}

/// Satisfying assignments of `f` over its free variables, sorted by name.
pub fn relation(g: &FiniteGroup, f: &Formula) -> Result<Relation, EvalError> {
    relation_with_cap(g, f, DEFAULT_ARITY_CAP)
}

pub fn relation_with_cap(g: &FiniteGroup, f: &Formula, cap: usize) -> Result<Relation, EvalError> {
    let mut b = Builder {
        g,
        cap,
        memo: HashMap::new(),
        stats: EvalStats::default(),
    };
    b.build(f).map(|r| (*r).clone())
}

pub(super) fn eval_via_relation(g: &FiniteGroup, f: &Formula, env: &Env) -> Result<(bool, EvalStats), EvalError> {
    let (_, values) = Scope::with_env(g, f, env)?;
    let mut b = Builder {
        g,
        cap: DEFAULT_ARITY_CAP,
        memo: HashMap::new(),
        stats: EvalStats::default(),
    };
    let r = b.build(f)?;
    Ok((r.contains_raw(&values), b.stats))
}
