//! Dense Cayley-table groups.
//!
//! Every group is stored as its full multiplication table with the identity
//! pinned at index 0. Constructors exist for each family used by the sentence
//! generators and for the confounder families used by uniqueness tests.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::arith::is_prime_power;

/// Default cap on the order of constructed groups (7!).
pub const DEFAULT_ORDER_CAP: usize = 5040;
/// Groups up to this order get an exhaustive associativity check.
pub const EXHAUSTIVE_AXIOM_LIMIT: usize = 512;
const SPOT_CHECK_TRIPLES: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("group order {order} exceeds the cap of {cap}")]
    OrderCapExceeded { order: usize, cap: usize },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("invalid family parameter: {0}")]
    BadParameter(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("row or column {0} is not a permutation (Latin square violation)")]
    NotLatin(String),
    #[error("element 0 is not the identity")]
    IdentityNotZero,
    #[error("associativity fails for ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
}

/// A finite group given by its Cayley table. Element 0 is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    op: Vec<u32>,
    inv: Vec<u32>,
    labels: Option<Vec<String>>,
    family_tag: Option<String>,
}

/// Descriptor accepted by [`build_group`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Cyclic(usize),
    /// Direct sum of cyclic groups of the given prime-power orders.
    Abelian(Vec<u64>),
    Symmetric(usize),
    Alternating(usize),
    /// Dihedral group of the regular `n`-gon (order `2n`).
    Dihedral(usize),
    Quaternion8,
    Ut3(usize),
    Product(Box<Family>, Box<Family>),
}

impl Family {
    /// Order of the group this descriptor builds, without building it.
    pub fn order(&self) -> Option<usize> {
        match self {
            Family::Cyclic(n) => Some(*n),
            Family::Abelian(qs) => qs
                .iter()
                .try_fold(1usize, |acc, &q| acc.checked_mul(usize::try_from(q).ok()?)),
            Family::Symmetric(n) => (1..=*n).try_fold(1usize, |acc, k| acc.checked_mul(k)),
            Family::Alternating(n) => Family::Symmetric(*n).order().map(|o| if *n >= 2 { o / 2 } else { o }),
            Family::Dihedral(n) => n.checked_mul(2),
            Family::Quaternion8 => Some(8),
            Family::Ut3(n) => n.checked_mul(*n)?.checked_mul(*n),
            Family::Product(a, b) => a.order()?.checked_mul(b.order()?),
        }
    }

    /// Short name such as `Z8`, `S4`, `UT3(3)` or `Z2xS3`.
    pub fn name(&self) -> String {
        match self {
            Family::Cyclic(n) => format!("Z{n}"),
            Family::Abelian(qs) => {
                let parts: Vec<String> = qs.iter().map(|q| format!("Z{q}")).collect();
                if parts.is_empty() {
                    "Z1".to_string()
                } else {
                    parts.join("+")
                }
            }
            Family::Symmetric(n) => format!("S{n}"),
            Family::Alternating(n) => format!("A{n}"),
            Family::Dihedral(n) => format!("D{n}"),
            Family::Quaternion8 => "Q8".to_string(),
            Family::Ut3(n) => format!("UT3({n})"),
            Family::Product(a, b) => format!("{}x{}", a.name(), b.name()),
        }
    }
}

/// Parses the names produced by [`Family::name`]. Products split at every
/// top-level `x` and associate to the right.
impl std::str::FromStr for Family {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, GroupError> {
        let bad = || GroupError::BadParameter(format!("unknown group name {s:?}"));
        let mut depth = 0i32;
        for (i, c) in s.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                'x' if depth == 0 => {
                    let a = s[..i].parse()?;
                    let b = s[i + 1..].parse()?;
                    return Ok(Family::Product(Box::new(a), Box::new(b)));
                }
                _ => {}
            }
        }
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad());
        if s == "Q8" {
            Ok(Family::Quaternion8)
        } else if let Some(inner) = s.strip_prefix("UT3(").and_then(|t| t.strip_suffix(')')) {
            Ok(Family::Ut3(num(inner)?))
        } else if s.contains('+') {
            let qs = s
                .split('+')
                .map(|part| {
                    part.strip_prefix('Z')
                        .ok_or_else(bad)
                        .and_then(|t| t.parse::<u64>().map_err(|_| bad()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Family::Abelian(qs))
        } else if let Some(t) = s.strip_prefix('Z') {
            Ok(Family::Cyclic(num(t)?))
        } else if let Some(t) = s.strip_prefix('S') {
            Ok(Family::Symmetric(num(t)?))
        } else if let Some(t) = s.strip_prefix('A') {
            Ok(Family::Alternating(num(t)?))
        } else if let Some(t) = s.strip_prefix('D') {
            Ok(Family::Dihedral(num(t)?))
        } else {
            Err(bad())
        }
    }
}

/// Builds a group from a family descriptor under the default order cap.
pub fn build_group(family: &Family) -> Result<FiniteGroup, GroupError> {
    build_group_capped(family, DEFAULT_ORDER_CAP)
}

pub fn build_group_capped(family: &Family, cap: usize) -> Result<FiniteGroup, GroupError> {
    let order = family
        .order()
        .ok_or(GroupError::OrderCapExceeded { order: usize::MAX, cap })?;
    if order > cap {
        return Err(GroupError::OrderCapExceeded { order, cap });
    }
    let mut g = match family {
        Family::Cyclic(n) => {
            if *n == 0 {
                return Err(GroupError::BadParameter("cyclic order must be >= 1".into()));
            }
            cyclic(*n)
        }
        Family::Abelian(qs) => {
            let mut g = cyclic(1);
            for &q in qs {
                if !is_prime_power(q) {
                    return Err(GroupError::NotPrimePower(q));
                }
                g = FiniteGroup::direct_product(&g, &cyclic(q as usize));
            }
            g
        }
        Family::Symmetric(n) => {
            if *n == 0 {
                return Err(GroupError::BadParameter("symmetric degree must be >= 1".into()));
            }
            permutation_group(*n, false)
        }
        Family::Alternating(n) => {
            if *n < 3 {
                return Err(GroupError::BadParameter("alternating degree must be >= 3".into()));
            }
            permutation_group(*n, true)
        }
        Family::Dihedral(n) => {
            if *n < 3 {
                return Err(GroupError::BadParameter("dihedral n must be >= 3".into()));
            }
            dihedral(*n)
        }
        Family::Quaternion8 => quaternion8(),
        Family::Ut3(n) => {
            if *n < 2 {
                return Err(GroupError::BadParameter("ut3 n must be >= 2".into()));
            }
            ut3(*n)
        }
        Family::Product(a, b) => {
            let ga = build_group_capped(a, cap)?;
            let gb = build_group_capped(b, cap)?;
            FiniteGroup::direct_product(&ga, &gb)
        }
    };
    g.family_tag = Some(family.name());
    Ok(g)
}

/// Index of the matrix with entries `(1,2) = p12`, `(2,3) = p23`, `(1,3) = p13`
/// in [`Family::Ut3`].
pub fn ut3_index(n: usize, p12: usize, p23: usize, p13: usize) -> usize {
    (p12 % n) + n * (p23 % n) + n * n * (p13 % n)
}

/// Inverse of [`ut3_index`]: returns `(p12, p23, p13)`.
pub fn ut3_entries(n: usize, idx: usize) -> (usize, usize, usize) {
    (idx % n, (idx / n) % n, idx / (n * n))
}

fn cyclic(n: usize) -> FiniteGroup {
    let mut op = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            op.push(((a + b) % n) as u32);
        }
    }
    let labels = (0..n).map(|i| i.to_string()).collect();
    FiniteGroup::from_valid_table(n, op, Some(labels))
}

fn dihedral(n: usize) -> FiniteGroup {
    // r^i s^j stored at i + n*j
    let m = 2 * n;
    let mut op = Vec::with_capacity(m * m);
    for x in 0..m {
        let (i, a) = (x % n, x / n);
        for y in 0..m {
            let (k, b) = (y % n, y / n);
            let rot = if a == 0 { (i + k) % n } else { (i + n - k) % n };
            op.push((rot + n * ((a + b) % 2)) as u32);
        }
    }
    let labels = (0..m)
        .map(|x| {
            let (i, a) = (x % n, x / n);
            match (i, a) {
                (0, 0) => "e".to_string(),
                (_, 0) => format!("r{i}"),
                (0, _) => "s".to_string(),
                _ => format!("r{i}s"),
            }
        })
        .collect();
    FiniteGroup::from_valid_table(m, op, Some(labels))
}

fn quaternion8() -> FiniteGroup {
    // units 1,i,j,k as 0..3; element = unit + 4*sign
    const UNIT_MUL: [[(usize, usize); 4]; 4] = [
        [(0, 0), (1, 0), (2, 0), (3, 0)],
        [(1, 0), (0, 1), (3, 0), (2, 1)],
        [(2, 0), (3, 1), (0, 1), (1, 0)],
        [(3, 0), (2, 0), (1, 1), (0, 1)],
    ];
    let mut op = Vec::with_capacity(64);
    for x in 0..8 {
        for y in 0..8 {
            let (u, s) = UNIT_MUL[x % 4][y % 4];
            let sign = (x / 4 + y / 4 + s) % 2;
            op.push((u + 4 * sign) as u32);
        }
    }
    let names = ["1", "i", "j", "k"];
    let labels = (0..8)
        .map(|x| format!("{}{}", if x >= 4 { "-" } else { "" }, names[x % 4]))
        .collect();
    FiniteGroup::from_valid_table(8, op, Some(labels))
}

fn ut3(n: usize) -> FiniteGroup {
    let m = n * n * n;
    let mut op = Vec::with_capacity(m * m);
    for x in 0..m {
        let (p1, q1, r1) = ut3_entries(n, x);
        for y in 0..m {
            let (p2, q2, r2) = ut3_entries(n, y);
            op.push(ut3_index(n, p1 + p2, q1 + q2, r1 + r2 + p1 * q2) as u32);
        }
    }
    let labels = (0..m)
        .map(|x| {
            let (p, q, r) = ut3_entries(n, x);
            format!("t({p},{q},{r})")
        })
        .collect();
    FiniteGroup::from_valid_table(m, op, Some(labels))
}

fn permutation_group(n: usize, even_only: bool) -> FiniteGroup {
    let mut perms: Vec<Vec<u8>> = Vec::new();
    let mut cur: Vec<u8> = (0..n as u8).collect();
    loop {
        if !even_only || is_even(&cur) {
            perms.push(cur.clone());
        }
        if !next_permutation(&mut cur) {
            break;
        }
    }
    let index: HashMap<&[u8], u32> = perms
        .iter()
        .enumerate()
        .map(|(i, p)| (p.as_slice(), i as u32))
        .collect();
    let m = perms.len();
    let mut op = Vec::with_capacity(m * m);
    let mut buf = vec![0u8; n];
    for p in &perms {
        for q in &perms {
            // apply p first, then q
            for i in 0..n {
                buf[i] = q[p[i] as usize];
            }
            op.push(index[buf.as_slice()]);
        }
    }
    let labels = perms.iter().map(|p| cycle_notation(p)).collect();
    FiniteGroup::from_valid_table(m, op, Some(labels))
}

fn next_permutation(v: &mut [u8]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn is_even(p: &[u8]) -> bool {
    let mut inversions = 0usize;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 0
}

/// Cycle notation on the points 1..n, e.g. `(1 2 3)`; the identity is `()`.
pub fn cycle_notation(p: &[u8]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] as usize == start {
            continue;
        }
        out.push('(');
        let mut i = start;
        let mut first = true;
        while !seen[i] {
            seen[i] = true;
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{}", i + 1);
            i = p[i] as usize;
        }
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

impl FiniteGroup {
    fn from_valid_table(order: usize, op: Vec<u32>, labels: Option<Vec<String>>) -> Self {
        let inv = compute_inverses(order, &op).expect("constructor produced a table without inverses");
        FiniteGroup {
            order,
            op,
            inv,
            labels,
            family_tag: None,
        }
    }

    /// Validates a raw table (row-major, `order * order` entries) and builds a group.
    pub fn from_table(order: usize, op: Vec<u32>) -> Result<Self, GroupError> {
        if order == 0 {
            return Err(GroupError::BadParameter("order must be positive".into()));
        }
        if op.len() != order * order {
            return Err(GroupError::BadParameter(format!(
                "expected {} table entries, found {}",
                order * order,
                op.len()
            )));
        }
        if op.iter().any(|&x| x as usize >= order) {
            return Err(GroupError::BadParameter("table entry out of range".into()));
        }
        check_latin(order, &op)?;
        for a in 0..order {
            if op[a] as usize != a || op[a * order] as usize != a {
                return Err(GroupError::IdentityNotZero);
            }
        }
        let inv = compute_inverses(order, &op).ok_or(GroupError::IdentityNotZero)?;
        let g = FiniteGroup {
            order,
            op,
            inv,
            labels: None,
            family_tag: None,
        };
        g.check_associativity()?;
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.op[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn table(&self) -> &[u32] {
        &self.op
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, a: usize) -> String {
        match &self.labels {
            Some(l) => l[a].clone(),
            None => a.to_string(),
        }
    }

    /// Finds the element carrying the given label.
    pub fn element_by_label(&self, label: &str) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|l| l == label)
    }

    pub fn family_tag(&self) -> Option<&str> {
        self.family_tag.as_deref()
    }

    pub fn with_family_tag(mut self, tag: impl Into<String>) -> Self {
        self.family_tag = Some(tag.into());
        self
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.order);
        self.labels = Some(labels);
        self
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (a + 1..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Direct product; element `(i, j)` sits at `i * |b| + j`.
    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> FiniteGroup {
        let (na, nb) = (a.order, b.order);
        let m = na * nb;
        let mut op = Vec::with_capacity(m * m);
        for x in 0..m {
            let (x1, x2) = (x / nb, x % nb);
            for y in 0..m {
                let (y1, y2) = (y / nb, y % nb);
                op.push((a.mul(x1, y1) * nb + b.mul(x2, y2)) as u32);
            }
        }
        let labels = match (na, nb) {
            (1, _) => b.labels.clone(),
            (_, 1) => a.labels.clone(),
            _ => Some(
                (0..m)
                    .map(|x| format!("({},{})", a.label(x / nb), b.label(x % nb)))
                    .collect(),
            ),
        };
        FiniteGroup::from_valid_table(m, op, labels)
    }

    /// Full axiom check: Latin square, identity at 0, inverses, associativity
    /// (exhaustive up to [`EXHAUSTIVE_AXIOM_LIMIT`], spot-checked above).
    pub fn check_axioms(&self) -> Result<(), GroupError> {
        check_latin(self.order, &self.op)?;
        for a in 0..self.order {
            if self.mul(0, a) != a || self.mul(a, 0) != a {
                return Err(GroupError::IdentityNotZero);
            }
            if self.mul(a, self.inv(a)) != 0 || self.mul(self.inv(a), a) != 0 {
                return Err(GroupError::BadParameter(format!("bad inverse for {a}")));
            }
        }
        self.check_associativity()
    }

    fn check_associativity(&self) -> Result<(), GroupError> {
        let n = self.order;
        if n <= EXHAUSTIVE_AXIOM_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    let ab = self.mul(a, b);
                    for c in 0..n {
                        if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                            return Err(GroupError::NotAssociative(a, b, c));
                        }
                    }
                }
            }
        } else {
            let mut rng = StdRng::seed_from_u64(0x5eed_0f_a550c);
            for _ in 0..SPOT_CHECK_TRIPLES {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                    return Err(GroupError::NotAssociative(a, b, c));
                }
            }
        }
        Ok(())
    }

    /// `x^n` by binary exponentiation; negative exponents use the inverse.
    pub fn power(&self, x: usize, n: i64) -> usize {
        let mut base = if n < 0 { self.inv(x) } else { x };
        let mut e = n.unsigned_abs();
        let mut acc = 0;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `[x, y] = x⁻¹ y⁻¹ x y`.
    pub fn commutator(&self, x: usize, y: usize) -> usize {
        let xi_yi = self.mul(self.inv(x), self.inv(y));
        self.mul(self.mul(xi_yi, x), y)
    }

    pub fn element_order(&self, x: usize) -> usize {
        let mut k = 1;
        let mut acc = x;
        while acc != 0 {
            acc = self.mul(acc, x);
            k += 1;
        }
        k
    }

    /// Map from element order to the number of elements of that order.
    pub fn order_profile(&self) -> BTreeMap<usize, usize> {
        let mut profile = BTreeMap::new();
        for x in 0..self.order {
            *profile.entry(self.element_order(x)).or_insert(0) += 1;
        }
        profile
    }

    /// Size of the centralizer of `x`.
    pub fn centralizer_size(&self, x: usize) -> usize {
        (0..self.order).filter(|&g| self.mul(x, g) == self.mul(g, x)).count()
    }

    pub fn subset<I: IntoIterator<Item = usize>>(&self, elems: I) -> Subset<'_> {
        let mut members = FixedBitSet::with_capacity(self.order);
        for e in elems {
            members.insert(e);
        }
        Subset { parent: self, members }
    }

    /// Closure of `gens ∪ {1}` under the group operation, together with the
    /// largest BFS depth (word length over `gens` and their inverses).
    pub fn subgroup_closure(&self, gens: &[usize]) -> (Subset<'_>, usize) {
        let mut steps: Vec<usize> = Vec::with_capacity(gens.len() * 2);
        for &g in gens {
            steps.push(g);
            steps.push(self.inv(g));
        }
        steps.sort_unstable();
        steps.dedup();
        let mut members = FixedBitSet::with_capacity(self.order);
        members.insert(0);
        let mut queue = VecDeque::from([(0usize, 0usize)]);
        let mut depth = 0;
        while let Some((x, d)) = queue.pop_front() {
            depth = depth.max(d);
            for &s in &steps {
                let y = self.mul(s, x);
                if !members.put(y) {
                    queue.push_back((y, d + 1));
                }
            }
        }
        (Subset { parent: self, members }, depth)
    }

    pub fn center(&self) -> Subset<'_> {
        self.subset((0..self.order).filter(|&z| self.centralizer_size(z) == self.order))
    }

    /// The set `{[x, y] : x, y ∈ G}` (not necessarily a subgroup).
    pub fn commutator_set(&self) -> Subset<'_> {
        let mut members = FixedBitSet::with_capacity(self.order);
        for x in 0..self.order {
            for y in 0..self.order {
                members.insert(self.commutator(x, y));
            }
        }
        Subset { parent: self, members }
    }

    pub fn derived_subgroup(&self) -> Subset<'_> {
        let comms: Vec<usize> = self.commutator_set().elements().collect();
        self.subgroup_closure(&comms).0
    }

    /// Serializes to the Cayley text format (labels included when present).
    pub fn to_cayley_string(&self) -> String {
        let mut out = String::with_capacity(self.order * self.order * 3 + 16);
        let _ = writeln!(out, "{}", self.order);
        for a in 0..self.order {
            let row = &self.op[a * self.order..(a + 1) * self.order];
            for (i, x) in row.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{x}");
            }
            out.push('\n');
        }
        if let Some(labels) = &self.labels {
            for (i, l) in labels.iter().enumerate() {
                let _ = writeln!(out, "# label {i} {l}");
            }
        }
        out
    }
}

fn check_latin(order: usize, op: &[u32]) -> Result<(), GroupError> {
    let mut seen = FixedBitSet::with_capacity(order);
    for a in 0..order {
        seen.clear();
        for b in 0..order {
            if seen.put(op[a * order + b] as usize) {
                return Err(GroupError::NotLatin(format!("row {a}")));
            }
        }
    }
    for b in 0..order {
        seen.clear();
        for a in 0..order {
            if seen.put(op[a * order + b] as usize) {
                return Err(GroupError::NotLatin(format!("column {b}")));
            }
        }
    }
    Ok(())
}

fn compute_inverses(order: usize, op: &[u32]) -> Option<Vec<u32>> {
    (0..order)
        .map(|a| (0..order).find(|&b| op[a * order + b] == 0).map(|b| b as u32))
        .collect()
}

/// Parses the Cayley text format.
pub fn load_cayley(text: &str) -> Result<FiniteGroup, GroupError> {
    let mut lines = text.lines().enumerate();
    let (order, first_line) = loop {
        let Some((ln, line)) = lines.next() else {
            return Err(GroupError::Parse {
                line: 1,
                column: 1,
                message: "empty input".into(),
            });
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let order: usize = trimmed.parse().map_err(|_| GroupError::Parse {
            line: ln + 1,
            column: 1,
            message: format!("expected group order, found {trimmed:?}"),
        })?;
        break (order, ln);
    };
    if order == 0 {
        return Err(GroupError::Parse {
            line: first_line + 1,
            column: 1,
            message: "order must be positive".into(),
        });
    }
    let mut op = Vec::with_capacity(order * order);
    let mut rows = 0;
    let mut labels: Option<Vec<String>> = None;
    for (ln, line) in lines {
        if let Some(rest) = line.strip_prefix('#') {
            let mut parts = rest.trim().splitn(3, ' ');
            if parts.next() == Some("label") {
                let idx = parts
                    .next()
                    .and_then(|s| s.parse::<usize>().ok())
                    .filter(|&i| i < order);
                let Some(idx) = idx else {
                    return Err(GroupError::Parse {
                        line: ln + 1,
                        column: 1,
                        message: "bad label line".into(),
                    });
                };
                let name = parts.next().unwrap_or("").to_string();
                labels.get_or_insert_with(|| (0..order).map(|i| i.to_string()).collect())[idx] = name;
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        if rows == order {
            return Err(GroupError::Parse {
                line: ln + 1,
                column: 1,
                message: "too many rows".into(),
            });
        }
        let mut count = 0;
        let mut column = 1;
        for tok in line.split(' ') {
            if tok.is_empty() {
                column += 1;
                continue;
            }
            let v: u32 = tok.parse().map_err(|_| GroupError::Parse {
                line: ln + 1,
                column,
                message: format!("expected element index, found {tok:?}"),
            })?;
            if v as usize >= order {
                return Err(GroupError::Parse {
                    line: ln + 1,
                    column,
                    message: format!("index {v} out of range"),
                });
            }
            op.push(v);
            count += 1;
            column += tok.len() + 1;
        }
        if count != order {
            return Err(GroupError::Parse {
                line: ln + 1,
                column: 1,
                message: format!("expected {order} entries, found {count}"),
            });
        }
        rows += 1;
    }
    if rows != order {
        return Err(GroupError::Parse {
            line: text.lines().count(),
            column: 1,
            message: format!("expected {order} rows, found {rows}"),
        });
    }
    let g = FiniteGroup::from_table(order, op)?;
    Ok(match labels {
        Some(l) => g.with_labels(l),
        None => g,
    })
}

/// A subset of a group's elements.
#[derive(Debug, Clone)]
pub struct Subset<'g> {
    parent: &'g FiniteGroup,
    members: FixedBitSet,
}

impl<'g> Subset<'g> {
    pub fn parent(&self) -> &'g FiniteGroup {
        self.parent
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(x)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.members
    }
}

impl PartialEq for Subset<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.parent, other.parent) && self.members == other.members
    }
}
