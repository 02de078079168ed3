//! Direct structural recursion; quantifiers loop over all elements.

use super::{CTerm, Env, EvalError, EvalStats, Scope};
use crate::formula::Formula;
use crate::group::FiniteGroup;

enum Node {
    Eq(CTerm, CTerm),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Forall(u32, Box<Node>),
    Exists(u32, Box<Node>),
}

fn compile(f: &Formula, scope: &mut Scope) -> Result<Node, EvalError> {
    Ok(match f {
        Formula::Eq(a, b) => Node::Eq(scope.term(a)?, scope.term(b)?),
        Formula::Not(g) => Node::Not(Box::new(compile(g, scope)?)),
        Formula::And(a, b) => Node::And(Box::new(compile(a, scope)?), Box::new(compile(b, scope)?)),
        Formula::Or(a, b) => Node::Or(Box::new(compile(a, scope)?), Box::new(compile(b, scope)?)),
        Formula::Implies(a, b) => Node::Implies(Box::new(compile(a, scope)?), Box::new(compile(b, scope)?)),
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            let s = scope.bind(v);
            let body = Box::new(compile(g, scope)?);
            scope.unbind();
            if matches!(f, Formula::Forall(..)) {
                Node::Forall(s, body)
            } else {
                Node::Exists(s, body)
            }
        }
    })
}

struct Run<'g> {
    g: &'g FiniteGroup,
    env: Vec<u32>,
    visited: u64,
}

impl Run<'_> {
    fn sat(&mut self, n: &Node) -> bool {
        self.visited += 1;
        match n {
            Node::Eq(a, b) => a.eval(self.g, &self.env) == b.eval(self.g, &self.env),
            Node::Not(f) => !self.sat(f),
            Node::And(a, b) => self.sat(a) && self.sat(b),
            Node::Or(a, b) => self.sat(a) || self.sat(b),
            Node::Implies(a, b) => !self.sat(a) || self.sat(b),
            Node::Forall(s, f) => {
                let saved = self.env[*s as usize];
                let ok = (0..self.g.order() as u32).all(|e| {
                    self.env[*s as usize] = e;
                    self.sat(f)
                });
                self.env[*s as usize] = saved;
                ok
            }
            Node::Exists(s, f) => {
                let saved = self.env[*s as usize];
                let ok = (0..self.g.order() as u32).any(|e| {
                    self.env[*s as usize] = e;
                    self.sat(f)
                });
                self.env[*s as usize] = saved;
                ok
            }
        }
    }
}

pub(super) fn eval(g: &FiniteGroup, f: &Formula, env: &Env, estimate: f64) -> Result<(bool, EvalStats), EvalError> {
    let (mut scope, values) = Scope::with_env(g, f, env)?;
    let node = compile(f, &mut scope)?;
    let mut slots = values;
    slots.resize(scope.slot_count(), 0);
    let mut run = Run {
        g,
        env: slots,
        visited: 0,
    };
    let holds = run.sat(&node);
    Ok((
        holds,
        EvalStats {
            nodes_visited: run.visited,
            estimate,
            ..Default::default()
        },
    ))
}

/// `Σ_nodes |G|^(quantifier depth)`.
pub(super) fn estimate(g: &FiniteGroup, f: &Formula) -> f64 {
    fn go(f: &Formula, weight: f64, n: f64) -> f64 {
        weight
            + match f {
                Formula::Eq(..) => 0.0,
                Formula::Not(g) => go(g, weight, n),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => go(a, weight, n) + go(b, weight, n),
                Formula::Forall(_, g) | Formula::Exists(_, g) => go(g, weight * n, n),
            }
    }
    go(f, 1.0, g.order() as f64)
}
