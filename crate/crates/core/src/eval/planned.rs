//! The planned ("grounded") engine.
//!
//! Compilation turns every maximal existential block (after pushing
//! negations through `∧`, `∨`, `→`, `¬` and `∀`) into a search over its
//! variables. Variables that occur once in an equation whose other variables
//! are already bound are solved for; the rest are enumerated, preferring ones
//! constrained to a materialized set. Independent variable groups are
//! searched separately. Two set shapes are recognized and built once per
//! parameter binding:
//!
//! * generation towers `∃u∃v[g = u·v ∧ ∀w[(w = u ∨ w = v) → R(w)]]`, whose
//!   solution set is `S·S` for `S = {w : R(w)}`;
//! * solution images `∃v⃗[s = t(v⃗) ∧ rest(v⃗)]` with `s` free of `v⃗`, i.e.
//!   `s ∈ {t(v⃗) : rest(v⃗)}`, when `s` has parameters `rest` does not use.

use std::collections::HashMap;
use std::rc::Rc;

use fixedbitset::FixedBitSet;

use super::{CTerm, Env, EvalError, EvalStats, Scope};
use crate::formula::{Formula, Term};
use crate::group::FiniteGroup;

type NodeId = usize;
type SetId = usize;

const MEMO_MIN_COST: f64 = 32.0;

#[derive(Debug)]
enum PNode {
    Const(bool),
    Eq(CTerm, CTerm),
    Not(NodeId),
    And(Vec<NodeId>),
    Or(Vec<NodeId>),
    Search(Search),
    Member { elem: CTerm, set: SetId },
}

#[derive(Debug)]
struct NodeInfo {
    node: PNode,
    free: Vec<u32>,
    memo: bool,
}

#[derive(Debug)]
enum Bind {
    Enumerate,
    FromSet(SetId),
    Assign(CTerm),
}

#[derive(Debug)]
struct Step {
    slot: u32,
    bind: Bind,
    checks: Vec<NodeId>,
}

#[derive(Debug, Default)]
struct Search {
    steps: Vec<Step>,
}

#[derive(Debug)]
enum SetExpr {
    Product(SetId),
    Comprehension {
        slot: u32,
        body: NodeId,
    },
    /// Values of `term` over all solutions of `search`.
    Solutions {
        search: Search,
        term: CTerm,
    },
}

/// Size model for generation towers: words of length at most `len` over
/// `gens` generators.
#[derive(Debug, Clone, Copy)]
struct WordModel {
    gens: f64,
    len: f64,
}

#[derive(Debug)]
struct SetInfo {
    expr: SetExpr,
    free: Vec<u32>,
    size: f64,
    model: Option<WordModel>,
}

#[derive(Debug, Default)]
struct PlanData {
    nodes: Vec<NodeInfo>,
    sets: Vec<SetInfo>,
    slot_count: usize,
    order: usize,
}

struct Lit {
    node: NodeId,
    eq: Option<(CTerm, CTerm)>,
}

struct Compiler<'g> {
    g: &'g FiniteGroup,
    scope: Scope,
    data: PlanData,
}

fn sorted_union(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    v.dedup();
    v
}

fn term_slots(t: &CTerm) -> Vec<u32> {
    let mut v = Vec::new();
    t.slots(&mut v);
    sorted_union(v)
}

fn count_slot(t: &CTerm, s: u32) -> usize {
    match t {
        CTerm::Slot(x) => usize::from(*x == s),
        CTerm::One => 0,
        CTerm::Inv(a) => count_slot(a, s),
        CTerm::Mul(a, b) => count_slot(a, s) + count_slot(b, s),
    }
}

/// Rewrites `t = rhs` (with `s` occurring exactly once in `t`) into `s = term`.
fn solve(t: &CTerm, s: u32, rhs: CTerm) -> CTerm {
    match t {
        CTerm::Slot(_) => rhs,
        CTerm::Inv(a) => solve(a, s, CTerm::Inv(Box::new(rhs))),
        CTerm::Mul(a, b) => {
            if count_slot(a, s) > 0 {
                solve(a, s, CTerm::Mul(Box::new(rhs), Box::new(CTerm::Inv(b.clone()))))
            } else {
                solve(b, s, CTerm::Mul(Box::new(CTerm::Inv(a.clone())), Box::new(rhs)))
            }
        }
        CTerm::One => unreachable!("solve called on a term without the slot"),
    }
}

/// Matches `∃u∃v[g = u·v ∧ ∀w[(w = u ∨ w = v) → R]]`, returning `(g, w, R)`.
fn match_tower(f: &Formula) -> Option<(&Term, &str, &Formula)> {
    let Formula::Exists(u, b1) = f else { return None };
    let Formula::Exists(v, b2) = b1.as_ref() else {
        return None;
    };
    let Formula::And(l, r) = b2.as_ref() else { return None };
    let Formula::Eq(g, Term::Mul(mu, mv)) = l.as_ref() else {
        return None;
    };
    if u == v || **mu != Term::Var(u.clone()) || **mv != Term::Var(v.clone()) {
        return None;
    }
    let Formula::Forall(w, imp) = r.as_ref() else {
        return None;
    };
    let Formula::Implies(ante, body) = imp.as_ref() else {
        return None;
    };
    let Formula::Or(e1, e2) = ante.as_ref() else {
        return None;
    };
    let wv = Term::Var(w.clone());
    if **e1 != Formula::Eq(wv.clone(), Term::Var(u.clone())) || **e2 != Formula::Eq(wv, Term::Var(v.clone())) {
        return None;
    }
    if w == u || w == v || g.mentions(u) || g.mentions(v) {
        return None;
    }
    let fv = body.free_vars();
    if fv.contains(u) || fv.contains(v) {
        return None;
    }
    Some((g, w, body))
}

fn word_count(m: WordModel, cap: f64) -> f64 {
    if m.gens <= 1.0 {
        return (m.gens * m.len + 1.0).min(cap);
    }
    let total = (m.gens.powf(m.len + 1.0) - 1.0) / (m.gens - 1.0);
    if total.is_finite() {
        total.min(cap)
    } else {
        cap
    }
}

impl<'g> Compiler<'g> {
    fn new(g: &'g FiniteGroup, scope: Scope) -> Self {
        Compiler {
            g,
            scope,
            data: PlanData {
                order: g.order(),
                ..Default::default()
            },
        }
    }

    fn n(&self) -> f64 {
        self.g.order() as f64
    }

    fn push(&mut self, node: PNode) -> NodeId {
        let free = match &node {
            PNode::Const(_) => Vec::new(),
            PNode::Eq(a, b) => {
                let mut v = term_slots(a);
                v.extend(term_slots(b));
                sorted_union(v)
            }
            PNode::Not(c) => self.data.nodes[*c].free.clone(),
            PNode::And(cs) | PNode::Or(cs) => sorted_union(
                cs.iter()
                    .flat_map(|&c| self.data.nodes[c].free.iter().copied())
                    .collect(),
            ),
            PNode::Member { elem, set } => {
                let mut v = term_slots(elem);
                v.extend(self.data.sets[*set].free.iter().copied());
                sorted_union(v)
            }
            PNode::Search(s) => self.search_free(s, None),
        };
        let is_search = matches!(node, PNode::Search(_));
        self.data.nodes.push(NodeInfo {
            node,
            free,
            memo: false,
        });
        let id = self.data.nodes.len() - 1;
        if is_search && self.data.nodes[id].free.len() <= 2 {
            let cost = est(&self.data, id, 1.0);
            self.data.nodes[id].memo = cost >= MEMO_MIN_COST;
        }
        id
    }

    fn search_free(&self, s: &Search, term: Option<&CTerm>) -> Vec<u32> {
        let mut v = Vec::new();
        if let Some(t) = term {
            t.slots(&mut v);
        }
        for st in &s.steps {
            match &st.bind {
                Bind::Assign(t) => t.slots(&mut v),
                Bind::FromSet(set) => v.extend(self.data.sets[*set].free.iter().copied()),
                Bind::Enumerate => {}
            }
            for &c in &st.checks {
                v.extend(self.data.nodes[c].free.iter().copied());
            }
        }
        let own: Vec<u32> = s.steps.iter().map(|st| st.slot).collect();
        v.retain(|x| !own.contains(x));
        sorted_union(v)
    }

    fn push_set(&mut self, expr: SetExpr) -> SetId {
        let n = self.n();
        let (free, size, model) = match &expr {
            SetExpr::Product(inner) => {
                let s = &self.data.sets[*inner];
                let model = s.model.map(|m| WordModel {
                    gens: m.gens,
                    len: m.len * 2.0,
                });
                let size = match model {
                    Some(m) => word_count(m, n),
                    None => (s.size * s.size).min(n),
                };
                (s.free.clone(), size, model)
            }
            SetExpr::Comprehension { slot, body } => {
                let mut free = self.data.nodes[*body].free.clone();
                free.retain(|x| x != slot);
                let (size, model) = self.comprehension_model(*slot, *body);
                (free, size.min(n), model)
            }
            SetExpr::Solutions { search, term } => {
                let free = self.search_free(search, Some(term));
                (free, expected_solutions(&self.data, search).clamp(1.0, n), None)
            }
        };
        self.data.sets.push(SetInfo {
            expr,
            free,
            size,
            model,
        });
        self.data.sets.len() - 1
    }

    /// Recognizes `w = t1 ∨ … ∨ w = tk` bodies, which bound the set size.
    fn comprehension_model(&self, slot: u32, body: NodeId) -> (f64, Option<WordModel>) {
        let disjuncts: Vec<NodeId> = match &self.data.nodes[body].node {
            PNode::Or(cs) => cs.clone(),
            PNode::Eq(..) => vec![body],
            _ => return (self.n(), None),
        };
        let mut has_one = false;
        for &d in &disjuncts {
            let PNode::Eq(a, b) = &self.data.nodes[d].node else {
                return (self.n(), None);
            };
            let other = match (a, b) {
                (CTerm::Slot(s), t) if *s == slot && count_slot(t, slot) == 0 => t,
                (t, CTerm::Slot(s)) if *s == slot && count_slot(t, slot) == 0 => t,
                _ => return (self.n(), None),
            };
            has_one |= *other == CTerm::One;
        }
        let k = disjuncts.len() as f64;
        if has_one {
            let m = WordModel {
                gens: k - 1.0,
                len: 1.0,
            };
            (word_count(m, self.n()), Some(m))
        } else {
            (k, None)
        }
    }

    fn compile(&mut self, f: &Formula) -> Result<NodeId, EvalError> {
        match f {
            Formula::Eq(a, b) => {
                let (a, b) = (self.scope.term(a)?, self.scope.term(b)?);
                Ok(self.push(PNode::Eq(a, b)))
            }
            Formula::Not(g) => {
                let c = self.compile(g)?;
                Ok(self.push(PNode::Not(c)))
            }
            Formula::And(..) => {
                let parts = f.conjuncts();
                let ids = parts
                    .into_iter()
                    .map(|p| self.compile(p))
                    .collect::<Result<Vec<_>, _>>()?;
                let ids = self.order_by_cost(ids);
                Ok(self.push(PNode::And(ids)))
            }
            Formula::Or(..) => {
                let mut parts = Vec::new();
                let mut stack = vec![f];
                while let Some(x) = stack.pop() {
                    match x {
                        Formula::Or(a, b) => {
                            stack.push(b);
                            stack.push(a);
                        }
                        other => parts.push(other),
                    }
                }
                let ids = parts
                    .into_iter()
                    .map(|p| self.compile(p))
                    .collect::<Result<Vec<_>, _>>()?;
                let ids = self.order_by_cost(ids);
                Ok(self.push(PNode::Or(ids)))
            }
            Formula::Implies(a, b) => {
                let a = self.compile(a)?;
                let na = self.push(PNode::Not(a));
                let b = self.compile(b)?;
                Ok(self.push(PNode::Or(vec![na, b])))
            }
            Formula::Exists(..) => {
                if let Some(id) = self.tower(f)? {
                    return Ok(id);
                }
                self.block(f, true)
            }
            Formula::Forall(v, body) => {
                if !body.free_vars().contains(v) {
                    return self.compile(body);
                }
                if let Formula::And(..) = body.as_ref() {
                    let parts: Vec<Formula> = body.conjuncts().into_iter().cloned().collect();
                    let ids = parts
                        .into_iter()
                        .map(|p| self.compile(&Formula::forall(v.clone(), p)))
                        .collect::<Result<Vec<_>, _>>()?;
                    let ids = self.order_by_cost(ids);
                    return Ok(self.push(PNode::And(ids)));
                }
                self.block(f, false)
            }
        }
    }

    fn order_by_cost(&self, mut ids: Vec<NodeId>) -> Vec<NodeId> {
        let costs: Vec<(f64, NodeId)> = ids.iter().map(|&i| (est(&self.data, i, 1.0), i)).collect();
        let lookup: HashMap<NodeId, f64> = costs.into_iter().map(|(c, i)| (i, c)).collect();
        ids.sort_by(|a, b| lookup[a].total_cmp(&lookup[b]));
        ids
    }

    fn tower(&mut self, f: &Formula) -> Result<Option<NodeId>, EvalError> {
        let Some((g, w, body)) = match_tower(f) else {
            return Ok(None);
        };
        let elem = self.scope.term(g)?;
        let inner = self.tower_set(w, body)?;
        let set = self.push_set(SetExpr::Product(inner));
        Ok(Some(self.push(PNode::Member { elem, set })))
    }

    fn tower_set(&mut self, w: &str, body: &Formula) -> Result<SetId, EvalError> {
        if let Some((g2, w2, body2)) = match_tower(body) {
            if *g2 == Term::Var(w.to_string()) {
                let inner = self.tower_set(w2, body2)?;
                return Ok(self.push_set(SetExpr::Product(inner)));
            }
        }
        let slot = self.scope.bind(w);
        let compiled = self.compile(body);
        self.scope.unbind();
        let body = compiled?;
        Ok(self.push_set(SetExpr::Comprehension { slot, body }))
    }

    fn collect(&mut self, f: &Formula, pol: bool, vars: &mut Vec<u32>, lits: &mut Vec<Lit>) -> Result<(), EvalError> {
        match (f, pol) {
            (Formula::And(a, b), true) | (Formula::Or(a, b), false) => {
                self.collect(a, pol, vars, lits)?;
                self.collect(b, pol, vars, lits)
            }
            (Formula::Implies(a, b), false) => {
                self.collect(a, true, vars, lits)?;
                self.collect(b, false, vars, lits)
            }
            (Formula::Not(g), p) => self.collect(g, !p, vars, lits),
            (Formula::Exists(v, g), true) | (Formula::Forall(v, g), false) => {
                if pol {
                    if let Some(node) = self.tower(f)? {
                        lits.push(Lit { node, eq: None });
                        return Ok(());
                    }
                }
                let s = self.scope.bind(v);
                vars.push(s);
                let r = self.collect(g, pol, vars, lits);
                self.scope.unbind();
                r
            }
            (Formula::Forall(v, g), true) if matches!(g.as_ref(), Formula::And(..)) => {
                for part in g.conjuncts() {
                    let node = self.compile(&Formula::forall(v.clone(), part.clone()))?;
                    lits.push(Lit { node, eq: None });
                }
                Ok(())
            }
            (Formula::Eq(a, b), true) => {
                let (a, b) = (self.scope.term(a)?, self.scope.term(b)?);
                let node = self.push(PNode::Eq(a.clone(), b.clone()));
                lits.push(Lit { node, eq: Some((a, b)) });
                Ok(())
            }
            _ => {
                let mut node = self.compile(f)?;
                if !pol {
                    node = self.push(PNode::Not(node));
                }
                lits.push(Lit { node, eq: None });
                Ok(())
            }
        }
    }

    /// Compiles `∃…` (`positive`) or `∀…` (as `¬∃¬…`).
    fn block(&mut self, f: &Formula, positive: bool) -> Result<NodeId, EvalError> {
        let mut vars = Vec::new();
        let mut lits = Vec::new();
        self.collect(f, positive, &mut vars, &mut lits)?;
        let id = self.plan_block(&vars, lits);
        Ok(if positive { id } else { self.push(PNode::Not(id)) })
    }

    fn plan_block(&mut self, vars: &[u32], lits: Vec<Lit>) -> NodeId {
        let deps: Vec<Vec<u32>> = lits
            .iter()
            .map(|l| {
                self.data.nodes[l.node]
                    .free
                    .iter()
                    .copied()
                    .filter(|s| vars.contains(s))
                    .collect()
            })
            .collect();
        // union-find over block variables
        let mut parent: HashMap<u32, u32> = vars.iter().map(|&v| (v, v)).collect();
        fn find(p: &mut HashMap<u32, u32>, x: u32) -> u32 {
            let up = p[&x];
            if up == x {
                return x;
            }
            let r = find(p, up);
            p.insert(x, r);
            r
        }
        for d in &deps {
            for w in d.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                if a != b {
                    parent.insert(a.max(b), a.min(b));
                }
            }
        }
        let mut parts: Vec<NodeId> = Vec::new();
        let mut groups: Vec<(u32, Vec<usize>)> = Vec::new();
        for (i, d) in deps.iter().enumerate() {
            if d.is_empty() {
                parts.push(lits[i].node);
                continue;
            }
            let root = find(&mut parent, d[0]);
            match groups.iter_mut().find(|(r, _)| *r == root) {
                Some((_, v)) => v.push(i),
                None => groups.push((root, vec![i])),
            }
        }
        for (_, members) in groups {
            let mut cvars: Vec<u32> = members.iter().flat_map(|&i| deps[i].iter().copied()).collect();
            cvars = sorted_union(cvars);
            cvars.sort_by_key(|v| vars.iter().position(|x| x == v));
            let node = match self.solutions_member(&cvars, &members, &lits, &deps) {
                Some(node) => node,
                None => {
                    let search = self.plan_search(&cvars, &members, &lits, &deps);
                    self.push(PNode::Search(search))
                }
            };
            parts.push(node);
        }
        match parts.len() {
            0 => self.push(PNode::Const(true)),
            1 => parts[0],
            _ => {
                let parts = self.order_by_cost(parts);
                self.push(PNode::And(parts))
            }
        }
    }

    /// Rewrites `∃v⃗[s = t(v⃗) ∧ rest(v⃗)]` as `s ∈ {t(v⃗) : rest(v⃗)}` when `s`
    /// carries parameters that nothing else in the block uses, so the set is
    /// shared across all their values.
    fn solutions_member(
        &mut self,
        cvars: &[u32],
        members: &[usize],
        lits: &[Lit],
        deps: &[Vec<u32>],
    ) -> Option<NodeId> {
        let external = |li: usize| -> Vec<u32> {
            self.data.nodes[lits[li].node]
                .free
                .iter()
                .copied()
                .filter(|s| !cvars.contains(s))
                .collect()
        };
        let mut best: Option<(usize, usize, bool)> = None;
        for &li in members {
            let Some((a, b)) = &lits[li].eq else { continue };
            for (flip, (s, t)) in [(false, (a, b)), (true, (b, a))] {
                let s_slots = term_slots(s);
                let t_slots = term_slots(t);
                if s_slots.iter().any(|x| cvars.contains(x)) || !t_slots.iter().any(|x| cvars.contains(x)) {
                    continue;
                }
                let mut rest: Vec<u32> = t_slots.into_iter().filter(|x| !cvars.contains(x)).collect();
                for &lj in members.iter().filter(|&&lj| lj != li) {
                    rest.extend(external(lj));
                }
                let gain = s_slots.iter().filter(|x| !rest.contains(x)).count();
                if gain > 0 && best.map_or(true, |(g, _, _)| gain > g) {
                    best = Some((gain, li, flip));
                }
            }
        }
        let (_, li, flip) = best?;
        let (a, b) = lits[li].eq.clone().expect("equation literal");
        let (elem, term) = if flip { (b, a) } else { (a, b) };
        let others: Vec<usize> = members.iter().copied().filter(|&x| x != li).collect();
        let search = self.plan_search(cvars, &others, lits, deps);
        let set = self.push_set(SetExpr::Solutions { search, term });
        Some(self.push(PNode::Member { elem, set }))
    }

    fn plan_search(&mut self, cvars: &[u32], members: &[usize], lits: &[Lit], deps: &[Vec<u32>]) -> Search {
        let mut bound: Vec<u32> = Vec::new();
        let mut pending: Vec<usize> = members.to_vec();
        let mut steps = Vec::new();
        let ready = |bound: &[u32], i: usize| deps[i].iter().all(|s| bound.contains(s));
        while bound.len() < cvars.len() {
            let mut choice: Option<(u32, Bind, Option<usize>)> = None;
            for &li in &pending {
                let Some((a, b)) = &lits[li].eq else { continue };
                let unbound: Vec<u32> = deps[li].iter().copied().filter(|s| !bound.contains(s)).collect();
                if let [v] = unbound[..] {
                    let (ca, cb) = (count_slot(a, v), count_slot(b, v));
                    if ca + cb == 1 {
                        let term = if ca == 1 {
                            solve(a, v, b.clone())
                        } else {
                            solve(b, v, a.clone())
                        };
                        choice = Some((v, Bind::Assign(term), Some(li)));
                        break;
                    }
                }
            }
            if choice.is_none() {
                let mut best: Option<((bool, usize), u32, Option<(usize, SetId)>)> = None;
                for &v in cvars.iter().filter(|v| !bound.contains(v)) {
                    let domain = pending
                        .iter()
                        .find_map(|&li| match &self.data.nodes[lits[li].node].node {
                            PNode::Member {
                                elem: CTerm::Slot(s),
                                set,
                            } if *s == v
                                && self.data.sets[*set]
                                    .free
                                    .iter()
                                    .all(|x| !cvars.contains(x) || bound.contains(x)) =>
                            {
                                Some((li, *set))
                            }
                            _ => None,
                        });
                    let mut with_v = bound.clone();
                    with_v.push(v);
                    let newly = pending
                        .iter()
                        .filter(|&&li| Some(li) != domain.map(|d| d.0) && ready(&with_v, li))
                        .count();
                    let score = (domain.is_some(), newly);
                    if best.as_ref().map_or(true, |(b, _, _)| score > *b) {
                        best = Some((score, v, domain));
                    }
                }
                let (_, v, domain) = best.expect("an unbound variable remains");
                choice = Some(match domain {
                    Some((li, set)) => (v, Bind::FromSet(set), Some(li)),
                    None => (v, Bind::Enumerate, None),
                });
            }
            let (v, bind, consumed) = choice.expect("chosen above");
            bound.push(v);
            if let Some(li) = consumed {
                pending.retain(|&x| x != li);
            }
            let (now, later): (Vec<usize>, Vec<usize>) = pending.iter().partition(|&&li| ready(&bound, li));
            pending = later;
            let checks = self.order_by_cost(now.into_iter().map(|li| lits[li].node).collect());
            steps.push(Step { slot: v, bind, checks });
        }
        debug_assert!(pending.is_empty());
        Search { steps }
    }
}

/// Estimated total cost of `calls` evaluations of node `id`.
fn est(d: &PlanData, id: NodeId, calls: f64) -> f64 {
    let n = d.order as f64;
    let info = &d.nodes[id];
    let eff = if info.memo {
        calls.min(n.powi(info.free.len() as i32))
    } else {
        calls
    };
    calls
        + match &info.node {
            PNode::Const(_) | PNode::Eq(..) => 0.0,
            PNode::Not(c) => est(d, *c, calls),
            PNode::And(cs) | PNode::Or(cs) => cs.iter().map(|&c| est(d, c, calls)).sum(),
            PNode::Member { set, .. } => est_set(d, *set, calls),
            PNode::Search(s) => search_cost(d, s, eff),
        }
}

fn search_cost(d: &PlanData, s: &Search, calls: f64) -> f64 {
    let n = d.order as f64;
    let mut mult = calls;
    let mut total = 0.0;
    for st in &s.steps {
        let domain = match &st.bind {
            Bind::Enumerate => n,
            Bind::Assign(_) => 1.0,
            Bind::FromSet(set) => {
                total += est_set(d, *set, mult);
                d.sets[*set].size
            }
        };
        mult *= domain;
        total += mult;
        for &c in &st.checks {
            total += est(d, c, mult);
            mult = (mult * sel(d, c)).max(calls);
        }
    }
    total
}

fn est_set(d: &PlanData, set: SetId, calls: f64) -> f64 {
    let n = d.order as f64;
    let info = &d.sets[set];
    let eff = calls.min(n.powi(info.free.len() as i32));
    calls
        + match &info.expr {
            SetExpr::Product(inner) => {
                let s = d.sets[*inner].size;
                est_set(d, *inner, eff) + eff * s * s
            }
            SetExpr::Comprehension { body, .. } => eff * n + est(d, *body, eff * n),
            SetExpr::Solutions { search, .. } => search_cost(d, search, eff),
        }
}

fn expected_solutions(d: &PlanData, s: &Search) -> f64 {
    let n = d.order as f64;
    let mut expected = 1.0;
    for st in &s.steps {
        expected *= match &st.bind {
            Bind::Enumerate => n,
            Bind::Assign(_) => 1.0,
            Bind::FromSet(set) => d.sets[*set].size,
        };
        for &c in &st.checks {
            expected *= sel(d, c);
        }
    }
    expected
}

/// Heuristic fraction of bindings that satisfy node `id`.
fn sel(d: &PlanData, id: NodeId) -> f64 {
    let n = d.order as f64;
    let floor = 1.0 / n;
    match &d.nodes[id].node {
        PNode::Const(b) => {
            if *b {
                1.0
            } else {
                floor
            }
        }
        PNode::Eq(..) => floor,
        PNode::Not(c) => (1.0 - sel(d, *c)).max(floor),
        PNode::And(cs) => cs.iter().map(|&c| sel(d, c)).product::<f64>().max(floor),
        PNode::Or(cs) => cs.iter().map(|&c| sel(d, c)).sum::<f64>().min(1.0),
        PNode::Member { set, .. } => (d.sets[*set].size / n).clamp(floor, 1.0),
        PNode::Search(s) => expected_solutions(d, s).clamp(floor, 1.0),
    }
}

struct Runtime<'p> {
    data: &'p PlanData,
    g: &'p FiniteGroup,
    env: Vec<u32>,
    node_memo: HashMap<(NodeId, u64), bool>,
    set_memo: HashMap<(SetId, Vec<u32>), Rc<FixedBitSet>>,
    stats: EvalStats,
}

impl<'p> Runtime<'p> {
    fn new(data: &'p PlanData, g: &'p FiniteGroup, init: &[u32]) -> Self {
        let mut env = vec![0u32; data.slot_count];
        env[..init.len()].copy_from_slice(init);
        Runtime {
            data,
            g,
            env,
            node_memo: HashMap::new(),
            set_memo: HashMap::new(),
            stats: EvalStats::default(),
        }
    }

    fn sat(&mut self, id: NodeId) -> bool {
        self.stats.nodes_visited += 1;
        let data = self.data;
        let info = &data.nodes[id];
        let key = if info.memo {
            let mut k = 0u64;
            for &s in &info.free {
                k = (k << 32) | u64::from(self.env[s as usize]);
            }
            if let Some(&r) = self.node_memo.get(&(id, k)) {
                return r;
            }
            Some(k)
        } else {
            None
        };
        let r = match &info.node {
            PNode::Const(b) => *b,
            PNode::Eq(a, b) => a.eval(self.g, &self.env) == b.eval(self.g, &self.env),
            PNode::Not(c) => !self.sat(*c),
            PNode::And(cs) => cs.iter().all(|&c| self.sat(c)),
            PNode::Or(cs) => cs.iter().any(|&c| self.sat(c)),
            PNode::Member { elem, set } => {
                let e = elem.eval(self.g, &self.env);
                self.set(*set).contains(e)
            }
            PNode::Search(s) => self.search(s, 0),
        };
        if let Some(k) = key {
            self.node_memo.insert((id, k), r);
        }
        r
    }

    fn checks(&mut self, st: &Step) -> bool {
        st.checks.iter().all(|&c| self.sat(c))
    }

    fn search(&mut self, s: &'p Search, i: usize) -> bool {
        let Some(st) = s.steps.get(i) else { return true };
        let slot = st.slot as usize;
        match &st.bind {
            Bind::Assign(t) => {
                self.env[slot] = t.eval(self.g, &self.env) as u32;
                self.checks(st) && self.search(s, i + 1)
            }
            Bind::Enumerate => {
                for e in 0..self.g.order() as u32 {
                    self.env[slot] = e;
                    if self.checks(st) && self.search(s, i + 1) {
                        return true;
                    }
                }
                false
            }
            Bind::FromSet(set) => {
                let members = self.set(*set);
                for e in members.ones() {
                    self.env[slot] = e as u32;
                    if self.checks(st) && self.search(s, i + 1) {
                        return true;
                    }
                }
                false
            }
        }
    }

    fn collect_all(&mut self, s: &'p Search, i: usize, term: &CTerm, out: &mut FixedBitSet) {
        let Some(st) = s.steps.get(i) else {
            out.insert(term.eval(self.g, &self.env));
            return;
        };
        let slot = st.slot as usize;
        match &st.bind {
            Bind::Assign(t) => {
                self.env[slot] = t.eval(self.g, &self.env) as u32;
                if self.checks(st) {
                    self.collect_all(s, i + 1, term, out);
                }
            }
            Bind::Enumerate => {
                for e in 0..self.g.order() as u32 {
                    self.env[slot] = e;
                    if self.checks(st) {
                        self.collect_all(s, i + 1, term, out);
                    }
                }
            }
            Bind::FromSet(set) => {
                let members = self.set(*set);
                for e in members.ones() {
                    self.env[slot] = e as u32;
                    if self.checks(st) {
                        self.collect_all(s, i + 1, term, out);
                    }
                }
            }
        }
    }

    fn set(&mut self, id: SetId) -> Rc<FixedBitSet> {
        let data = self.data;
        let info = &data.sets[id];
        let key: Vec<u32> = info.free.iter().map(|&s| self.env[s as usize]).collect();
        if let Some(s) = self.set_memo.get(&(id, key.clone())) {
            return Rc::clone(s);
        }
        let n = self.g.order();
        let mut out = FixedBitSet::with_capacity(n);
        match &info.expr {
            SetExpr::Product(inner) => {
                let s = self.set(*inner);
                let members: Vec<usize> = s.ones().collect();
                for &x in &members {
                    for &y in &members {
                        out.insert(self.g.mul(x, y));
                    }
                }
            }
            SetExpr::Comprehension { slot, body } => {
                for e in 0..n {
                    self.env[*slot as usize] = e as u32;
                    if self.sat(*body) {
                        out.insert(e);
                    }
                }
            }
            SetExpr::Solutions { search, term } => self.collect_all(search, 0, term, &mut out),
        }
        self.stats.relations_built += 1;
        self.stats.max_relation_rows = self.stats.max_relation_rows.max(out.count_ones(..) as u64);
        let rc = Rc::new(out);
        self.set_memo.insert((id, key), Rc::clone(&rc));
        rc
    }
}

/// A compiled formula with its free variables bound from an environment.
pub(super) struct Plan<'g> {
    g: &'g FiniteGroup,
    data: PlanData,
    root: NodeId,
    init: Vec<u32>,
}

impl<'g> Plan<'g> {
    pub(super) fn compile(g: &'g FiniteGroup, f: &Formula, env: &Env) -> Result<Self, EvalError> {
        let (scope, init) = Scope::with_env(g, f, env)?;
        let mut c = Compiler::new(g, scope);
        let root = c.compile(f)?;
        let mut data = c.data;
        data.slot_count = c.scope.slot_count();
        Ok(Plan { g, data, root, init })
    }

    pub(super) fn estimate(&self) -> f64 {
        est(&self.data, self.root, 1.0)
    }

    pub(super) fn run(&self) -> (bool, EvalStats) {
        let mut rt = Runtime::new(&self.data, self.g, &self.init);
        let r = rt.sat(self.root);
        let mut stats = rt.stats;
        stats.estimate = self.estimate();
        (r, stats)
    }

    /// Values of the free variable in `slot` that satisfy the plan, with
    /// memo tables shared across values.
    pub(super) fn sweep(&self, slot: u32) -> (FixedBitSet, EvalStats) {
        let mut rt = Runtime::new(&self.data, self.g, &self.init);
        let mut out = FixedBitSet::with_capacity(self.g.order());
        for e in 0..self.g.order() {
            rt.env[slot as usize] = e as u32;
            if rt.sat(self.root) {
                out.insert(e);
            }
        }
        let mut stats = rt.stats;
        stats.estimate = self.estimate() * self.g.order() as f64;
        (out, stats)
    }
}

/// Outer-block witness search for `∃a1…∃am φ`.
pub(super) struct GroundedPlan<'g> {
    g: &'g FiniteGroup,
    data: PlanData,
    names: Vec<String>,
    pre: Vec<NodeId>,
    search: Search,
}

impl<'g> GroundedPlan<'g> {
    pub(super) fn compile(g: &'g FiniteGroup, f: &Formula) -> Result<Self, EvalError> {
        let mut names = Vec::new();
        let mut body = f;
        while let Formula::Exists(v, b) = body {
            names.push(v.clone());
            body = b;
        }
        if names.is_empty() || !f.is_closed() {
            return Err(EvalError::ShapeMismatch);
        }
        let mut c = Compiler::new(g, Scope::default());
        let slots: Vec<u32> = names.iter().map(|n| c.scope.bind(n)).collect();
        let mut levels: Vec<Vec<NodeId>> = vec![Vec::new(); names.len() + 1];
        for conj in body.conjuncts() {
            let id = c.compile(conj)?;
            let level = c.data.nodes[id]
                .free
                .iter()
                .filter_map(|s| slots.iter().position(|x| x == s))
                .max()
                .map_or(0, |p| p + 1);
            levels[level].push(id);
        }
        // A closed conjunct costlier than the whole outer search is checked
        // last; it runs at most once either way.
        let pre = std::mem::take(&mut levels[0]);
        let probe = |levels: &[Vec<NodeId>], data: &PlanData| {
            let steps = slots
                .iter()
                .zip(levels.iter().skip(1))
                .map(|(&slot, checks)| Step {
                    slot,
                    bind: Bind::Enumerate,
                    checks: checks.clone(),
                })
                .collect();
            search_cost(data, &Search { steps }, 1.0)
        };
        let outer_cost = probe(&levels, &c.data);
        let (late, early): (Vec<NodeId>, Vec<NodeId>) =
            pre.into_iter().partition(|&p| est(&c.data, p, 1.0) > outer_cost);
        levels[0] = early;
        levels[names.len()].extend(late);
        let mut levels: Vec<Vec<NodeId>> = levels.into_iter().map(|l| c.order_by_cost(l)).collect();
        let pre = std::mem::take(&mut levels[0]);
        let steps = slots
            .iter()
            .zip(levels.into_iter().skip(1))
            .map(|(&slot, checks)| Step {
                slot,
                bind: Bind::Enumerate,
                checks,
            })
            .collect();
        let mut data = c.data;
        data.slot_count = c.scope.slot_count();
        Ok(GroundedPlan {
            g,
            data,
            names,
            pre,
            search: Search { steps },
        })
    }

    pub(super) fn estimate(&self) -> f64 {
        let pre: f64 = self.pre.iter().map(|&p| est(&self.data, p, 1.0)).sum();
        pre + search_cost(&self.data, &self.search, 1.0)
    }

    pub(super) fn run(&self) -> (Option<Vec<(String, usize)>>, EvalStats) {
        let mut rt = Runtime::new(&self.data, self.g, &[]);
        let ok = self.pre.iter().all(|&p| rt.sat(p)) && rt.search(&self.search, 0);
        let witness = ok.then(|| {
            self.names
                .iter()
                .enumerate()
                .map(|(i, n)| (n.clone(), rt.env[i] as usize))
                .collect()
        });
        let mut stats = rt.stats;
        stats.estimate = self.estimate();
        (witness, stats)
    }
}
