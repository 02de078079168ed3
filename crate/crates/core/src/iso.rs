//! Exhaustive isomorphism test for small groups.
//!
//! Cheap invariants are compared first. The search then fixes a small
//! generating set of `G` and backtracks over images in `H` with matching
//! element order and centralizer size, extending each partial assignment
//! along the Cayley graph and rejecting it on the first inconsistency.

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::group::FiniteGroup;

/// Largest group order accepted by [`isomorphic`].
pub const ISO_ORDER_CAP: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IsoError {
    #[error("group of order {order} exceeds the isomorphism cap {cap}")]
    SizeCap { order: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsoResult {
    pub isomorphic: bool,
    /// `mapping[x]` is the image of element `x` of the first group.
    pub mapping: Option<Vec<usize>>,
    /// Invariant that already differs, when the search was not needed.
    pub invariant_mismatch: Option<String>,
}

impl IsoResult {
    fn mismatch(reason: &str) -> Self {
        IsoResult {
            isomorphic: false,
            mapping: None,
            invariant_mismatch: Some(reason.to_string()),
        }
    }
}

/// Greedy generating set: repeatedly adds the element whose inclusion grows
/// the generated subgroup most. Each step at least doubles the subgroup, so
/// the result has at most `log₂ |G|` elements.
pub fn minimal_generating_set(g: &FiniteGroup) -> Vec<usize> {
    let n = g.order();
    let mut gens: Vec<usize> = Vec::new();
    let mut current = g.subgroup_closure(&gens).0.bits().clone();
    while current.count_ones(..) < n {
        let mut best: Option<(usize, FixedBitSet)> = None;
        let mut best_len = 0;
        for x in 0..n {
            if current.contains(x) {
                continue;
            }
            gens.push(x);
            let bits = g.subgroup_closure(&gens).0.bits().clone();
            gens.pop();
            let len = bits.count_ones(..);
            if len > best_len {
                best_len = len;
                best = Some((x, bits));
                if len == n {
                    break;
                }
            }
        }
        let (x, bits) = best.expect("an element outside a proper subgroup exists");
        gens.push(x);
        current = bits;
    }
    gens
}

struct Search<'a> {
    g: &'a FiniteGroup,
    h: &'a FiniteGroup,
    gens: Vec<usize>,
    candidates: Vec<Vec<usize>>,
    images: Vec<usize>,
}

const UNSET: usize = usize::MAX;

impl Search<'_> {
    /// Extends the assignment of the first `images.len()` generators along the
    /// Cayley graph. Returns the partial map when it is consistent and injective.
    fn extend(&self) -> Option<Vec<usize>> {
        let n = self.g.order();
        let mut map = vec![UNSET; n];
        let mut used = vec![false; n];
        map[self.g.identity()] = self.h.identity();
        used[self.h.identity()] = true;
        let mut queue = vec![self.g.identity()];
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            for (&gj, &hj) in self.gens.iter().zip(&self.images) {
                let y = self.g.mul(x, gj);
                let hy = self.h.mul(map[x], hj);
                if map[y] == UNSET {
                    if used[hy] {
                        return None;
                    }
                    map[y] = hy;
                    used[hy] = true;
                    queue.push(y);
                } else if map[y] != hy {
                    return None;
                }
            }
        }
        Some(map)
    }

    fn run(&mut self, depth: usize) -> Option<Vec<usize>> {
        if depth == self.gens.len() {
            return self
                .extend()
                .filter(|map| map.iter().all(|&y| y != UNSET) && is_homomorphism(self.g, self.h, map));
        }
        for i in 0..self.candidates[depth].len() {
            let c = self.candidates[depth][i];
            self.images.push(c);
            if self.extend().is_some() {
                if let Some(map) = self.run(depth + 1) {
                    return Some(map);
                }
            }
            self.images.pop();
        }
        None
    }
}

fn is_homomorphism(g: &FiniteGroup, h: &FiniteGroup, map: &[usize]) -> bool {
    (0..g.order()).all(|a| (0..g.order()).all(|b| map[g.mul(a, b)] == h.mul(map[a], map[b])))
}

/// Decides `G ≅ H`, returning an explicit isomorphism when one exists.
pub fn isomorphic(g: &FiniteGroup, h: &FiniteGroup) -> Result<IsoResult, IsoError> {
    for x in [g, h] {
        if x.order() > ISO_ORDER_CAP {
            return Err(IsoError::SizeCap {
                order: x.order(),
                cap: ISO_ORDER_CAP,
            });
        }
    }
    if g.order() != h.order() {
        return Ok(IsoResult::mismatch("order"));
    }
    if g.order_profile() != h.order_profile() {
        return Ok(IsoResult::mismatch("order profile"));
    }
    if g.center().len() != h.center().len() {
        return Ok(IsoResult::mismatch("center size"));
    }
    let gens = minimal_generating_set(g);
    let h_keys: Vec<(usize, usize)> = (0..h.order())
        .map(|y| (h.element_order(y), h.centralizer_size(y)))
        .collect();
    let candidates = gens
        .iter()
        .map(|&x| {
            let key = (g.element_order(x), g.centralizer_size(x));
            (0..h.order()).filter(|&y| h_keys[y] == key).collect()
        })
        .collect();
    let mut search = Search {
        g,
        h,
        gens,
        candidates,
        images: Vec::new(),
    };
    let mapping = search.run(0);
    Ok(IsoResult {
        isomorphic: mapping.is_some(),
        mapping,
        invariant_mismatch: None,
    })
}
