//! First-order terms and formulas over the group signature `(·, ⁻¹, 1, =)`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    One,
    Inv(Box<Term>),
    Mul(Box<Term>, Box<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot fold an empty list of formulas")]
pub struct EmptyFold;

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn inv(t: Term) -> Term {
        Term::Inv(Box::new(t))
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    /// Left-associated product; the empty product is `One`.
    pub fn product<I: IntoIterator<Item = Term>>(terms: I) -> Term {
        terms.into_iter().reduce(Term::mul).unwrap_or(Term::One)
    }

    /// `[a, b]` expanded as `a⁻¹·b⁻¹·a·b`.
    pub fn commutator(a: Term, b: Term) -> Term {
        Term::mul(Term::mul(Term::mul(Term::inv(a.clone()), Term::inv(b.clone())), a), b)
    }

    pub fn length(&self) -> usize {
        match self {
            Term::Var(_) | Term::One => 1,
            Term::Inv(t) => 1 + t.length(),
            Term::Mul(a, b) => 1 + a.length() + b.length(),
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::One => {}
            Term::Inv(t) => t.vars(out),
            Term::Mul(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Term::Var(v) => v == name,
            Term::One => false,
            Term::Inv(t) => t.mentions(name),
            Term::Mul(a, b) => a.mentions(name) || b.mentions(name),
        }
    }
}

/// `inv(t1)·inv(t2)·t1·t2`.
pub fn macro_commutator(t1: Term, t2: Term) -> Term {
    Term::commutator(t1, t2)
}

/// Right-associated conjunction of a nonempty list.
pub fn bigand(fs: Vec<Formula>) -> Result<Formula, EmptyFold> {
    fs.into_iter()
        .rev()
        .reduce(|acc, f| Formula::and(f, acc))
        .ok_or(EmptyFold)
}

/// Right-associated disjunction of a nonempty list.
pub fn bigor(fs: Vec<Formula>) -> Result<Formula, EmptyFold> {
    fs.into_iter()
        .rev()
        .reduce(|acc, f| Formula::or(f, acc))
        .ok_or(EmptyFold)
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn neq(a: Term, b: Term) -> Formula {
        Formula::not(Formula::Eq(a, b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(v: impl Into<String>, f: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(f))
    }

    pub fn exists(v: impl Into<String>, f: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(f))
    }

    /// `∃v1 … ∃vk f`, outermost first.
    pub fn exists_all<S: Into<String>>(vars: impl IntoIterator<Item = S>, f: Formula) -> Formula {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        vars.into_iter().rev().fold(f, |acc, v| Formula::exists(v, acc))
    }

    pub fn forall_all<S: Into<String>>(vars: impl IntoIterator<Item = S>, f: Formula) -> Formula {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        vars.into_iter().rev().fold(f, |acc, v| Formula::forall(v, acc))
    }

    /// Symbol count: every variable, constant, function symbol, `=`,
    /// connective and quantifier counts one; a quantifier plus its variable
    /// counts two. Parentheses are not counted.
    pub fn length(&self) -> usize {
        match self {
            Formula::Eq(a, b) => 1 + a.length() + b.length(),
            Formula::Not(f) => 1 + f.length(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.length() + b.length(),
            Formula::Forall(_, f) | Formula::Exists(_, f) => 2 + f.length(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Eq(a, b) => {
                let mut vs = BTreeSet::new();
                a.vars(&mut vs);
                b.vars(&mut vs);
                out.extend(vs.into_iter().filter(|v| !bound.contains(&v.as_str())));
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, f) | Formula::Exists(v, f) => {
                bound.push(v);
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Number of quantifier nodes.
    pub fn quantifier_count(&self) -> usize {
        match self {
            Formula::Eq(..) => 0,
            Formula::Not(f) => f.quantifier_count(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.quantifier_count() + b.quantifier_count()
            }
            Formula::Forall(_, f) | Formula::Exists(_, f) => 1 + f.quantifier_count(),
        }
    }

    /// Flattens nested `And` nodes into a list of conjuncts.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                Formula::And(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
                other => out.push(other),
            }
        }
        out
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::One => f.write_str("1"),
            Term::Inv(t) => write!(f, "(inv {t})"),
            Term::Mul(a, b) => write!(f, "(* {a} {b})"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(a, b) => write!(f, "(and {a} {b})"),
            Formula::Or(a, b) => write!(f, "(or {a} {b})"),
            Formula::Implies(a, b) => write!(f, "(imp {a} {b})"),
            Formula::Forall(v, g) => write!(f, "(all {v} {g})"),
            Formula::Exists(v, g) => write!(f, "(ex {v} {g})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Term {
        Term::var("x")
    }
    fn y() -> Term {
        Term::var("y")
    }

    #[test]
    fn lengths() {
        assert_eq!(Formula::eq(x(), Term::One).length(), 3);
        assert_eq!(Formula::exists("y", Formula::eq(y(), x())).length(), 5);
        assert_eq!(macro_commutator(x(), y()).length(), 9);
        let atoms = vec![Formula::eq(x(), Term::One); 3];
        assert_eq!(bigand(atoms).unwrap().length(), 11);
    }

    #[test]
    fn folds() {
        let f = Formula::eq(x(), y());
        assert_eq!(bigand(vec![f.clone()]).unwrap(), f);
        assert_eq!(bigor(vec![]), Err(EmptyFold));
        let g = Formula::eq(y(), Term::One);
        assert_eq!(bigor(vec![f.clone(), g.clone()]).unwrap(), Formula::or(f, g));
    }

    #[test]
    fn free_variables() {
        let f = Formula::exists("y", Formula::eq(Term::mul(x(), y()), Term::One));
        assert_eq!(f.free_vars(), BTreeSet::from(["x".to_string()]));
        let g = Formula::forall("x", f.clone());
        assert!(g.is_closed());
        // shadowing: inner binder does not leak
        let h = Formula::and(Formula::exists("x", Formula::eq(x(), x())), Formula::eq(x(), y()));
        assert_eq!(h.free_vars(), BTreeSet::from(["x".to_string(), "y".to_string()]));
    }

    #[test]
    fn printing() {
        assert_eq!(Formula::eq(x(), Term::One).to_string(), "(= x 1)");
        let f = Formula::forall(
            "x",
            Formula::implies(Formula::neq(x(), Term::One), Formula::eq(Term::inv(x()), x())),
        );
        assert_eq!(f.to_string(), "(all x (imp (not (= x 1)) (= (inv x) x)))");
    }
}
