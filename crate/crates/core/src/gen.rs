//! Describing formulas and sentences.
//!
//! Every bound variable introduced here gets a fresh name of the form
//! `{hint}_{n}`. The free variables of the public building blocks and the
//! outer variables of sentences (`a1`, `a2`, …, `a`, `b`, `x`) contain no
//! underscore, so they can never be captured.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::arith::{bit_len, ceil_log2, factorize, prime_power_parts};
use crate::formula::{bigand, bigor, Formula, Term};
use crate::group::Family;
use crate::presentation::{Presentation, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("presentation has no relator g0^{0}, so g0 cannot be the {0}-cycle")]
    NoCycleGenerator(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SentenceFamily {
    Cyclic2,
    Abelian,
    Symmetric,
    Simple,
    Ut3,
}

impl SentenceFamily {
    pub const ALL: [SentenceFamily; 5] = [
        SentenceFamily::Cyclic2,
        SentenceFamily::Abelian,
        SentenceFamily::Symmetric,
        SentenceFamily::Simple,
        SentenceFamily::Ut3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SentenceFamily::Cyclic2 => "cyclic2",
            SentenceFamily::Abelian => "abelian",
            SentenceFamily::Symmetric => "symmetric",
            SentenceFamily::Simple => "simple",
            SentenceFamily::Ut3 => "ut3",
        }
    }
}

impl fmt::Display for SentenceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SentenceFamily {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        SentenceFamily::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| format!("unknown family {s:?}"))
    }
}

/// A sentence meant to characterize one finite group up to isomorphism.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySentence {
    pub formula: Formula,
    pub family: SentenceFamily,
    pub params: Vec<u64>,
    pub target_order: u128,
    /// The group the sentence describes, when it is one of the built-in families.
    pub target: Option<Family>,
    /// Presentation used, in text form.
    pub notes: Option<String>,
    pub length: usize,
}

impl FamilySentence {
    fn new(formula: Formula, family: SentenceFamily, params: Vec<u64>, target_order: u128) -> Self {
        debug_assert!(formula.is_closed());
        let length = formula.length();
        FamilySentence {
            formula,
            family,
            params,
            target_order,
            target: None,
            notes: None,
            length,
        }
    }

    /// Stable identifier such as `abelian-2.4` or `ut3-3`.
    pub fn id(&self) -> String {
        let params: Vec<String> = self.params.iter().map(u64::to_string).collect();
        if params.is_empty() {
            format!("{}-{}", self.family, self.target_order)
        } else {
            format!("{}-{}", self.family, params.join("."))
        }
    }

    pub fn with_target(mut self, target: Family) -> Self {
        self.target = Some(target);
        self
    }
}

/// Source of fresh bound-variable names.
#[derive(Debug, Default)]
pub struct Fresh {
    next: usize,
}

impl Fresh {
    pub fn name(&mut self, hint: &str) -> String {
        self.next += 1;
        format!("{hint}_{}", self.next)
    }

    fn var(&mut self, hint: &str) -> (String, Term) {
        let n = self.name(hint);
        let t = Term::Var(n.clone());
        (n, t)
    }
}

fn truth() -> Formula {
    Formula::eq(Term::One, Term::One)
}

fn conj(fs: Vec<Formula>) -> Formula {
    bigand(fs).unwrap_or_else(|_| truth())
}

/// Binary digits of `n`, most significant first.
fn binary_digits(n: u64) -> Vec<bool> {
    (0..bit_len(n)).rev().map(|i| (n >> i) & 1 == 1).collect()
}

/// `x^n = y` by repeated squaring over the `⌊log₂ n⌋ + 1` binary digits of `n`.
pub fn theta_with(fr: &mut Fresh, n: u64, x: &Term, y: &Term) -> Formula {
    assert!(n >= 1, "theta needs n >= 1");
    let digits = binary_digits(n);
    let vars: Vec<(String, Term)> = digits.iter().map(|_| fr.var("y")).collect();
    let k = vars.len();
    let mut parts = vec![
        Formula::eq(vars[0].1.clone(), x.clone()),
        Formula::eq(vars[k - 1].1.clone(), y.clone()),
    ];
    for i in 0..k - 1 {
        let yi = &vars[i].1;
        let tail = if digits[i + 1] { x.clone() } else { Term::One };
        parts.push(Formula::eq(
            vars[i + 1].1.clone(),
            Term::mul(Term::mul(yi.clone(), yi.clone()), tail),
        ));
    }
    Formula::exists_all(vars.into_iter().map(|(n, _)| n), conj(parts))
}

/// `θ_n(x, y)`: holds iff `x^n = y`.
pub fn theta(n: u64) -> Result<Formula, GenError> {
    if n == 0 {
        return Err(GenError::BadParameter("theta needs n >= 1".into()));
    }
    Ok(theta_with(&mut Fresh::default(), n, &Term::var("x"), &Term::var("y")))
}

/// `δ_i(g; xs)`: `g` is a product of at most `2^i` of the `xs` (empty product allowed).
pub fn delta_with(fr: &mut Fresh, i: u32, g: &Term, xs: &[Term]) -> Formula {
    if i == 0 {
        let mut alts: Vec<Formula> = xs.iter().map(|x| Formula::eq(g.clone(), x.clone())).collect();
        alts.push(Formula::eq(g.clone(), Term::One));
        return bigor(alts).expect("nonempty");
    }
    let (u, ut) = fr.var("u");
    let (v, vt) = fr.var("v");
    let (w, wt) = fr.var("w");
    let inner = delta_with(fr, i - 1, &wt, xs);
    let guard = Formula::or(Formula::eq(wt.clone(), ut.clone()), Formula::eq(wt, vt.clone()));
    Formula::exists(
        u,
        Formula::exists(
            v,
            Formula::and(
                Formula::eq(g.clone(), Term::mul(ut, vt)),
                Formula::forall(w, Formula::implies(guard, inner)),
            ),
        ),
    )
}

fn param_vars(m: usize) -> Vec<Term> {
    (1..=m).map(|j| Term::var(format!("x{j}"))).collect()
}

/// `δ_i(g; x1, …, xm)`.
pub fn delta(i: u32, m: usize) -> Formula {
    delta_with(&mut Fresh::default(), i, &Term::var("g"), &param_vars(m))
}

/// `π(g; xs)` for groups of order at most `order`: `δ_k` with `k = ⌈log₂ order⌉`.
pub fn pi_with(fr: &mut Fresh, order: u64, g: &Term, xs: &[Term]) -> Formula {
    delta_with(fr, ceil_log2(order.max(1)), g, xs)
}

/// `π(g; x1, …, xm)`: membership of `g` in `⟨x1, …, xm⟩` in any group of order at most `order`.
pub fn pi(m: usize, order: u64) -> Formula {
    pi_with(&mut Fresh::default(), order, &Term::var("g"), &param_vars(m))
}

/// `π′(g; x) = δ_k(g; x)` with `k = ⌈log₂ p⌉`: `g = x^z` for some `0 ≤ z ≤ 2^k`.
pub fn pi_prime_with(fr: &mut Fresh, p: u64, g: &Term, x: &Term) -> Formula {
    delta_with(fr, ceil_log2(p.max(1)), g, std::slice::from_ref(x))
}

/// `π′(g; x)` with free variables `g`, `x`.
pub fn pi_prime(p: u64) -> Result<Formula, GenError> {
    if p == 0 {
        return Err(GenError::BadParameter("pi_prime needs p >= 1".into()));
    }
    Ok(pi_prime_with(
        &mut Fresh::default(),
        p,
        &Term::var("g"),
        &Term::var("x"),
    ))
}

/// `w(gens) = 1` as `∃b1…∃bk[⋀ θ_{|z_i|}(a_i^{±1}, b_i) ∧ b1·…·bk = 1]`.
pub fn tau_with(fr: &mut Fresh, w: &Word, gens: &[Term]) -> Formula {
    let syllables = w.syllables();
    if syllables.is_empty() {
        return truth();
    }
    let bs: Vec<(String, Term)> = syllables.iter().map(|_| fr.var("b")).collect();
    let mut parts = Vec::with_capacity(syllables.len() + 1);
    for (&(gen, exp), (_, b)) in syllables.iter().zip(&bs) {
        let base = if exp < 0 {
            Term::inv(gens[gen].clone())
        } else {
            gens[gen].clone()
        };
        parts.push(theta_with(fr, exp.unsigned_abs(), &base, b));
    }
    parts.push(Formula::eq(Term::product(bs.iter().map(|(_, t)| t.clone())), Term::One));
    Formula::exists_all(bs.into_iter().map(|(n, _)| n), conj(parts))
}

/// `τ` over the named generator variables.
pub fn tau(w: &Word, gen_vars: &[&str]) -> Result<Formula, GenError> {
    if let Some(&(g, _)) = w.syllables().iter().find(|(g, _)| *g >= gen_vars.len()) {
        return Err(GenError::BadParameter(format!(
            "word uses generator g{g} but only {} names given",
            gen_vars.len()
        )));
    }
    let gens: Vec<Term> = gen_vars.iter().map(|v| Term::var(*v)).collect();
    Ok(tau_with(&mut Fresh::default(), w, &gens))
}

/// Conjunction of `τ` over the relators.
pub fn zeta_with(fr: &mut Fresh, p: &Presentation, gens: &[Term]) -> Formula {
    conj(p.relators().iter().map(|r| tau_with(fr, r, gens)).collect())
}

/// `ζ(x1, …, xm)` for the presentation.
pub fn zeta(p: &Presentation) -> Formula {
    zeta_with(&mut Fresh::default(), p, &param_vars(p.ngens()))
}

fn outer_vars(m: usize) -> Vec<String> {
    (1..=m).map(|j| format!("a{j}")).collect()
}

fn double(t: &Term) -> Term {
    Term::mul(t.clone(), t.clone())
}

/// The sentence for the cyclic group of order `2^n`.
pub fn sentence_cyclic2(n: u32) -> Result<FamilySentence, GenError> {
    if n == 0 || n > 127 {
        return Err(GenError::BadParameter(format!("cyclic2 needs 1 <= n <= 127, got {n}")));
    }
    let mut fr = Fresh::default();
    let x = Term::var("x");

    let (y, yt) = fr.var("y");
    let (z, zt) = fr.var("z");
    let (w, wt) = fr.var("w");
    let (t, tt) = fr.var("t");
    let no_root = Formula::forall(y, Formula::neq(double(&yt), x.clone()));
    let two_roots = Formula::exists(
        z,
        Formula::exists(
            w,
            conj(vec![
                Formula::eq(double(&zt), x.clone()),
                Formula::eq(double(&wt), x.clone()),
                Formula::forall(
                    t,
                    Formula::implies(
                        Formula::eq(double(&tt), x.clone()),
                        Formula::or(Formula::eq(tt.clone(), zt.clone()), Formula::eq(tt, wt.clone())),
                    ),
                ),
            ]),
        ),
    );
    let psi1 = Formula::or(no_root, two_roots);

    // x_2 … x_{n+1}
    let chain2: Vec<(String, Term)> = (2..=n + 1).map(|_| fr.var("x")).collect();
    let mut parts = vec![Formula::eq(double(&x), chain2[0].1.clone())];
    for i in 0..chain2.len() - 1 {
        parts.push(Formula::eq(double(&chain2[i].1), chain2[i + 1].1.clone()));
    }
    parts.push(Formula::neq(chain2[chain2.len() - 1].1.clone(), Term::One));
    let psi2 = Formula::not(Formula::exists_all(chain2.into_iter().map(|(n, _)| n), conj(parts)));

    // x_1 … x_n
    let chain1: Vec<(String, Term)> = (1..=n).map(|_| fr.var("x")).collect();
    let mut parts = Vec::new();
    for i in 0..chain1.len() - 1 {
        parts.push(Formula::eq(double(&chain1[i].1), chain1[i + 1].1.clone()));
    }
    parts.push(Formula::neq(chain1[chain1.len() - 1].1.clone(), Term::One));
    let psi3 = Formula::exists_all(chain1.into_iter().map(|(n, _)| n), conj(parts));

    let f = Formula::forall("x", conj(vec![psi1, psi2, psi3]));
    let order = 1u128 << n;
    let s = FamilySentence::new(f, SentenceFamily::Cyclic2, vec![u64::from(n)], order);
    Ok(match usize::try_from(order) {
        Ok(o) => s.with_target(Family::Cyclic(o)),
        Err(_) => s,
    })
}

/// `∃a1…∃am[ζ ∧ ∀h π(h; a) ∧ extra]`.
fn presented(p: &Presentation, order: u64, extra: impl FnOnce(&[Term]) -> Formula) -> Formula {
    let mut fr = Fresh::default();
    let names = outer_vars(p.ngens());
    let gens: Vec<Term> = names.iter().map(Term::var).collect();
    let psi1 = zeta_with(&mut fr, p, &gens);
    let (h, ht) = fr.var("h");
    let psi2 = Formula::forall(h, pi_with(&mut fr, order, &ht, &gens));
    let psi3 = extra(&gens);
    Formula::exists_all(names, conj(vec![psi1, psi2, psi3]))
}

/// The sentence for a simple group given by a presentation whose first
/// generator is not the identity.
pub fn sentence_simple(p: &Presentation, order: u64) -> Result<FamilySentence, GenError> {
    if order < 2 {
        return Err(GenError::BadParameter("a simple group has order at least 2".into()));
    }
    let f = presented(p, order, |a| Formula::neq(a[0].clone(), Term::One));
    let mut s = FamilySentence::new(f, SentenceFamily::Simple, vec![], order.into());
    s.notes = Some(p.to_text());
    Ok(s)
}

/// The sentence for `A5` from `⟨a, b | a², b³, (ab)⁵⟩`.
pub fn sentence_a5() -> FamilySentence {
    sentence_simple(&Presentation::alternating5(), 60)
        .expect("order 60")
        .with_target(Family::Alternating(5))
}

/// The sentence for `S_n`. Generator `g0` of the presentation must be the
/// `n`-cycle and carry the relator `g0^n`.
pub fn sentence_symmetric(n: usize, presentation: Option<&Presentation>) -> Result<FamilySentence, GenError> {
    if !(3..=20).contains(&n) {
        return Err(GenError::BadParameter(format!("symmetric needs 3 <= n <= 20, got {n}")));
    }
    let default;
    let p = match presentation {
        Some(p) => p,
        None => {
            default = Presentation::symmetric(n);
            &default
        }
    };
    let has_cycle = p
        .relators()
        .iter()
        .any(|r| matches!(r.syllables(), [(0, e)] if e.unsigned_abs() == n as u64));
    if !has_cycle {
        return Err(GenError::NoCycleGenerator(n));
    }
    let order: u64 = (1..=n as u64).product();
    let f = presented(p, order, |a| {
        let eta = &a[0];
        Formula::and(
            Formula::neq(eta.clone(), Term::One),
            Formula::neq(double(eta), Term::One),
        )
    });
    let mut s = FamilySentence::new(f, SentenceFamily::Symmetric, vec![n as u64], order.into())
        .with_target(Family::Symmetric(n));
    s.notes = Some(p.to_text());
    Ok(s)
}

/// How the independence conjunct `ξ` of the abelian sentence relates the
/// generators `a_j` to the universally quantified `b_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum XiForm {
    /// `b_j` ranges over the small multiples of `a_j`: `π′(b_j; a_j)`.
    #[default]
    Multiples,
    /// `a_j` is a small multiple of `b_j`: `π′(a_j; b_j)`.
    Divisors,
}

/// The sentence for `⊕ ℤ_{q_i}` with every `q_i` a prime power.
pub fn sentence_abelian(qs: &[u64]) -> Result<FamilySentence, GenError> {
    sentence_abelian_with(qs, XiForm::Multiples)
}

pub fn sentence_abelian_with(qs: &[u64], xi: XiForm) -> Result<FamilySentence, GenError> {
    if qs.is_empty() {
        return Err(GenError::BadParameter("abelian needs at least one factor".into()));
    }
    let parts: Vec<(u64, u32)> = qs
        .iter()
        .map(|&q| prime_power_parts(q).ok_or(GenError::NotPrimePower(q)))
        .collect::<Result<_, _>>()?;
    let order = qs.iter().try_fold(1u64, |acc, &q| acc.checked_mul(q));
    let order = order.ok_or_else(|| GenError::BadParameter("order overflows u64".into()))?;

    let mut fr = Fresh::default();
    let names = outer_vars(qs.len());
    let a: Vec<Term> = names.iter().map(Term::var).collect();
    let one = Term::One;

    let (g, gt) = fr.var("g");
    let (h, ht) = fr.var("h");
    let mut psi1 = vec![Formula::forall(
        g,
        Formula::forall(h, Formula::eq(Term::commutator(gt, ht), one.clone())),
    )];
    for (ai, &q) in a.iter().zip(qs) {
        psi1.push(theta_with(&mut fr, q, ai, &one));
    }

    let (g, gt) = fr.var("g");
    let psi2 = Formula::forall(g, pi_with(&mut fr, order, &gt, &a));

    let mut psi3 = Vec::new();
    for (ai, &(p, z)) in a.iter().zip(&parts) {
        psi3.push(Formula::not(theta_with(&mut fr, p.pow(z - 1), ai, &one)));
    }
    let mut classes: Vec<(u64, Vec<usize>)> = Vec::new();
    for (i, &(p, _)) in parts.iter().enumerate() {
        match classes.iter_mut().find(|(q, _)| *q == p) {
            Some((_, members)) => members.push(i),
            None => classes.push((p, vec![i])),
        }
    }
    for (p, members) in &classes {
        psi3.push(xi_formula(&mut fr, *p, members.iter().map(|&j| &a[j]).collect(), xi));
    }

    let mut all = psi1;
    all.push(psi2);
    all.extend(psi3);
    let f = Formula::exists_all(names, conj(all));
    let target = Family::Abelian(qs.to_vec());
    Ok(FamilySentence::new(f, SentenceFamily::Abelian, qs.to_vec(), order.into()).with_target(target))
}

/// `ξ` for one prime `p` and the generators `a_j` of that prime.
fn xi_formula(fr: &mut Fresh, p: u64, a: Vec<&Term>, form: XiForm) -> Formula {
    let mut parts = Vec::new();
    for aj in &a {
        let (b, bt) = fr.var("b");
        parts.push(Formula::not(Formula::exists(b, theta_with(fr, p, &bt, aj))));
    }
    let bs: Vec<(String, Term)> = a.iter().map(|_| fr.var("b")).collect();
    let mut premise = Vec::new();
    for (aj, (_, bj)) in a.iter().zip(&bs) {
        premise.push(match form {
            XiForm::Multiples => pi_prime_with(fr, p, bj, aj),
            XiForm::Divisors => pi_prime_with(fr, p, aj, bj),
        });
    }
    let (c, ct) = fr.var("c");
    let sum = Term::product(bs.iter().map(|(_, t)| t.clone()));
    premise.push(Formula::exists(c, theta_with(fr, p, &ct, &sum)));
    let cs: Vec<(String, Term)> = a.iter().map(|_| fr.var("c")).collect();
    let conclusion = conj(
        cs.iter()
            .zip(&bs)
            .map(|((_, cj), (_, bj))| theta_with(fr, p, cj, bj))
            .collect(),
    );
    let conclusion = Formula::exists_all(cs.into_iter().map(|(n, _)| n), conclusion);
    parts.push(Formula::forall_all(
        bs.into_iter().map(|(n, _)| n),
        Formula::implies(conj(premise), conclusion),
    ));
    conj(parts)
}

/// `φ(h, x, y, z; a, b)`: `h = u·v·z` with `u ∈ ⟨a⟩`, `v ∈ ⟨b⟩`, `z` central,
/// `x = [u, b]` and `y = [a, v]`.
fn ut3_phi(fr: &mut Fresh, n: u64, h: &Term, x: &Term, y: &Term, z: &Term, a: &Term, b: &Term) -> Formula {
    let (u, ut) = fr.var("u");
    let (v, vt) = fr.var("v");
    let (w, wt) = fr.var("w");
    let body = conj(vec![
        pi_prime_with(fr, n, &ut, a),
        pi_prime_with(fr, n, &vt, b),
        Formula::forall(w, Formula::eq(Term::commutator(z.clone(), wt), Term::One)),
        Formula::eq(h.clone(), Term::mul(Term::mul(ut.clone(), vt.clone()), z.clone())),
        Formula::eq(x.clone(), Term::commutator(ut, b.clone())),
        Formula::eq(y.clone(), Term::commutator(a.clone(), vt)),
    ]);
    Formula::exists(u, Formula::exists(v, body))
}

/// The sentence for `UT₃(n)`, the upper unitriangular 3×3 matrices over `ℤ_n`.
pub fn sentence_ut3(n: u64) -> Result<FamilySentence, GenError> {
    if n < 2 {
        return Err(GenError::BadParameter(format!("ut3 needs n >= 2, got {n}")));
    }
    let order = n
        .checked_pow(3)
        .ok_or_else(|| GenError::BadParameter("order overflows u64".into()))?;
    let mut fr = Fresh::default();
    let (a, b) = (Term::var("a"), Term::var("b"));
    let c = Term::commutator(a.clone(), b.clone());
    let one = Term::One;
    let comm = Term::commutator;

    let psi1 = vec![theta_with(&mut fr, n, &a, &one), theta_with(&mut fr, n, &b, &one)];

    let mut psi2 = vec![theta_with(&mut fr, n, &c, &one)];
    let factors = factorize(n);
    let cis: Vec<(String, Term)> = factors.iter().map(|_| fr.var("c")).collect();
    let mut blocks = Vec::new();
    for (&(p, z), (_, ci)) in factors.iter().zip(&cis) {
        blocks.push(pi_prime_with(&mut fr, n, ci, &c));
        blocks.push(theta_with(&mut fr, p.pow(z), ci, &one));
        blocks.push(Formula::not(theta_with(&mut fr, p.pow(z - 1), ci, &one)));
    }
    psi2.push(Formula::exists_all(cis.into_iter().map(|(n, _)| n), conj(blocks)));

    let psi3 = {
        let [r, s, t, u, v, w] = ["r", "s", "t", "u", "v", "w"].map(|h| fr.var(h));
        let closed = Formula::forall_all(
            [&r.0, &s.0, &t.0, &u.0].map(String::clone),
            Formula::exists_all(
                [v.0.clone(), w.0.clone()],
                Formula::eq(
                    Term::mul(comm(r.1.clone(), s.1.clone()), comm(t.1.clone(), u.1.clone())),
                    comm(v.1, w.1),
                ),
            ),
        );
        let [r, s, h] = ["r", "s", "h"].map(|x| fr.var(x));
        let class2 = Formula::forall_all([r.0, s.0, h.0], Formula::eq(comm(comm(r.1, s.1), h.1), one.clone()));
        let [z, h, r, s] = ["z", "h", "r", "s"].map(|x| fr.var(x));
        let central = Formula::forall(h.0, Formula::eq(comm(z.1.clone(), h.1), one.clone()));
        let is_comm = Formula::exists_all([r.0, s.0], Formula::eq(comm(r.1, s.1), z.1.clone()));
        let in_c = pi_prime_with(&mut fr, n, &z.1, &c);
        let centre = Formula::forall(z.0, Formula::implies(central, Formula::and(is_comm, in_c)));
        vec![closed, class2, centre]
    };

    let psi4 = {
        let [h, x, y, z] = ["h", "x", "y", "z"].map(|v| fr.var(v));
        let phi = ut3_phi(&mut fr, n, &h.1, &x.1, &y.1, &z.1, &a, &b);
        Formula::forall(h.0, Formula::exists_all([x.0, y.0, z.0], phi))
    };

    let psi5 = {
        let [h, x1, x2, y1, y2, z1, z2] = ["h", "x", "x", "y", "y", "z", "z"].map(|v| fr.var(v));
        let phi1 = ut3_phi(&mut fr, n, &h.1, &x1.1, &y1.1, &z1.1, &a, &b);
        let phi2 = ut3_phi(&mut fr, n, &h.1, &x2.1, &y2.1, &z2.1, &a, &b);
        let same = conj(vec![
            Formula::eq(x1.1.clone(), x2.1.clone()),
            Formula::eq(y1.1.clone(), y2.1.clone()),
            Formula::eq(z1.1.clone(), z2.1.clone()),
        ]);
        Formula::forall_all(
            [h.0, x1.0, x2.0, y1.0, y2.0, z1.0, z2.0],
            Formula::implies(Formula::and(phi1, phi2), same),
        )
    };

    let psi6 = {
        let [x, y, z, g, h] = ["x", "y", "z", "g", "h"].map(|v| fr.var(v));
        let central = Formula::forall(
            g.0,
            conj(vec![
                Formula::eq(comm(x.1.clone(), g.1.clone()), one.clone()),
                Formula::eq(comm(y.1.clone(), g.1.clone()), one.clone()),
                Formula::eq(comm(z.1.clone(), g.1), one.clone()),
            ]),
        );
        let phi = ut3_phi(&mut fr, n, &h.1, &x.1, &y.1, &z.1, &a, &b);
        Formula::forall_all([x.0, y.0, z.0], Formula::implies(central, Formula::exists(h.0, phi)))
    };

    let mut all = psi1;
    all.extend(psi2);
    all.extend(psi3);
    all.push(psi4);
    all.push(psi5);
    all.push(psi6);
    let f = Formula::exists_all(["a", "b"], conj(all));
    Ok(FamilySentence::new(f, SentenceFamily::Ut3, vec![n], order.into()).with_target(Family::Ut3(n as usize)))
}

/// Random formula with at most `max_quantifiers` quantifiers whose free
/// variables are among `free`. Bound names are drawn from `v0, v1, …` and may
/// shadow each other.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, max_quantifiers: usize, free: &[&str]) -> Formula {
    let mut scope: Vec<String> = free.iter().map(|s| s.to_string()).collect();
    let mut budget = max_quantifiers;
    random_node(rng, &mut scope, &mut budget, 4)
}

fn random_term<R: Rng + ?Sized>(rng: &mut R, scope: &[String], depth: u32) -> Term {
    let leaf = depth == 0 || rng.gen_bool(0.4);
    if leaf {
        if scope.is_empty() || rng.gen_bool(0.15) {
            Term::One
        } else {
            Term::Var(scope[rng.gen_range(0..scope.len())].clone())
        }
    } else if rng.gen_bool(0.3) {
        Term::inv(random_term(rng, scope, depth - 1))
    } else {
        Term::mul(random_term(rng, scope, depth - 1), random_term(rng, scope, depth - 1))
    }
}

fn random_node<R: Rng + ?Sized>(rng: &mut R, scope: &mut Vec<String>, budget: &mut usize, depth: u32) -> Formula {
    let choice = if depth == 0 { 0 } else { rng.gen_range(0..8) };
    match choice {
        0 | 1 => Formula::eq(random_term(rng, scope, 2), random_term(rng, scope, 2)),
        2 => Formula::not(random_node(rng, scope, budget, depth - 1)),
        3 => Formula::and(
            random_node(rng, scope, budget, depth - 1),
            random_node(rng, scope, budget, depth - 1),
        ),
        4 => Formula::or(
            random_node(rng, scope, budget, depth - 1),
            random_node(rng, scope, budget, depth - 1),
        ),
        5 => Formula::implies(
            random_node(rng, scope, budget, depth - 1),
            random_node(rng, scope, budget, depth - 1),
        ),
        _ if *budget == 0 => Formula::eq(random_term(rng, scope, 2), random_term(rng, scope, 2)),
        _ => {
            *budget -= 1;
            let name = format!("v{}", rng.gen_range(0..3));
            scope.push(name.clone());
            let body = random_node(rng, scope, budget, depth - 1);
            scope.pop();
            if choice == 6 {
                Formula::forall(name, body)
            } else {
                Formula::exists(name, body)
            }
        }
    }
}
