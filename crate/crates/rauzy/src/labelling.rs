//! Consistent labellings of arcs, the cyclic quasimetric `q_n`, and the
//! predicted-invariant calculus for one-edge insertion and removal.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::invariants::cycle_invariant;
use crate::perm::{Perm, Side};

/// Smallest nonnegative `q` with `x + q = y (mod n)`.
pub fn q_mod(n: usize, x: usize, y: usize) -> usize {
    debug_assert!(x < n && y < n);
    if y >= x {
        y - x
    } else {
        n - x + y
    }
}

/// Top arc consecutive to bottom arc `b` in the traversal order (the top
/// arc entered right after leaving `b`); boundary paths are hopped.
pub fn succ_top_of_bottom(p: &Perm, b: usize) -> usize {
    let n = p.n();
    let mut v = p.at(b + 1);
    if v == n {
        v = p.at(1);
    }
    v
}

/// Bottom arc consecutive to top arc `a`.
pub fn succ_bottom_of_top(p: &Perm, a: usize) -> usize {
    let n = p.n();
    let mut pos = p.pos_of(a + 1);
    if pos == n {
        pos = p.pos_of(1);
    }
    pos
}

/// Successor bottom arc of bottom arc `b` in its cycle's cyclic order.
pub fn consecutive_bottom(p: &Perm, b: usize) -> usize {
    succ_bottom_of_top(p, succ_top_of_bottom(p, b))
}

/// Successor top arc of top arc `a` in its cycle's cyclic order.
pub fn consecutive_top(p: &Perm, a: usize) -> usize {
    succ_top_of_bottom(p, succ_bottom_of_top(p, a))
}

/// A label `t_{index, cycle_len, copy}` or `b_{index, cycle_len, copy}`:
/// top indices are odd, bottom indices even, both modulo `2 * cycle_len`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ArcLabel {
    pub index: usize,
    pub cycle_len: usize,
    pub copy: usize,
}

/// A consistent labelling `(Pi_b, Pi_t)` of all bottom and top arcs.
#[derive(Clone, Debug)]
pub struct Labelling {
    pub pi_b: BTreeMap<usize, ArcLabel>,
    pub pi_t: BTreeMap<usize, ArcLabel>,
}

impl Labelling {
    pub fn label(&self, side: Side, arc: usize) -> Option<&ArcLabel> {
        match side {
            Side::Top => self.pi_t.get(&arc),
            Side::Bottom => self.pi_b.get(&arc),
        }
    }

    /// Inverse lookup: the arc carrying a given label.
    pub fn arc_of(&self, side: Side, label: ArcLabel) -> Result<usize> {
        let map = match side {
            Side::Top => &self.pi_t,
            Side::Bottom => &self.pi_b,
        };
        map.iter()
            .find(|(_, l)| **l == label)
            .map(|(a, _)| *a)
            .ok_or_else(|| Error::RangeError(format!("no arc with label {label:?}")))
    }
}

/// Builds the canonical consistent labelling: each cycle starts (index 0)
/// at its minimum-position bottom arc; among cycles of equal length, copies
/// are numbered by that minimum position.
pub fn build_labelling(p: &Perm) -> Labelling {
    let ci = cycle_invariant(p);
    // a cycle made of top arcs and boundary paths only has no starting
    // bottom arc; it stays unlabelled
    let mut starts: Vec<(usize, usize)> = ci
        .cycles
        .iter()
        .filter_map(|c| Some((c.cycle_len(), *c.bots().iter().min()?)))
        .collect();
    starts.sort_unstable();
    let mut pi_b = BTreeMap::new();
    let mut pi_t = BTreeMap::new();
    let mut copies: BTreeMap<usize, usize> = BTreeMap::new();
    for (len, b0) in starts {
        let copy = copies.entry(len).and_modify(|c| *c += 1).or_insert(1);
        let copy = *copy;
        let m = 2 * len;
        let mut b = b0;
        let mut idx = 0usize;
        for _ in 0..len {
            pi_b.insert(b, ArcLabel { index: idx % m, cycle_len: len, copy });
            let t = succ_top_of_bottom(p, b);
            pi_t.insert(t, ArcLabel { index: (idx + 1) % m, cycle_len: len, copy });
            b = succ_bottom_of_top(p, t);
            idx += 2;
        }
        debug_assert_eq!(b, b0, "labelling walk must close");
    }
    Labelling { pi_b, pi_t }
}

/// Predicted cycle multiset after inserting one edge within arcs of two
/// distinct cycles of lengths `l`, `l2`: the cycles merge into `l + l2 + 1`.
pub fn predict_insert_two_cycles(
    lambda: &[usize],
    alpha: ArcLabel,
    beta: ArcLabel,
) -> Result<Vec<usize>> {
    if (alpha.cycle_len, alpha.copy) == (beta.cycle_len, beta.copy) {
        return Err(Error::SameCycle);
    }
    let mut out = lambda.to_vec();
    remove_one(&mut out, alpha.cycle_len)?;
    remove_one(&mut out, beta.cycle_len)?;
    out.push(alpha.cycle_len + beta.cycle_len + 1);
    out.sort_unstable();
    Ok(out)
}

/// Predicted multiset after inserting one edge within two arcs
/// `t_{2x+1, l, k}` and `b_{2y, l, k}` of one cycle: the cycle splits into
/// parts `(q_{2l}(2x+1, 2y) + 1) / 2` and `(q_{2l}(2y, 2x+1) + 1) / 2`.
pub fn predict_insert_one_cycle(
    lambda: &[usize],
    alpha: ArcLabel,
    beta: ArcLabel,
) -> Result<Vec<usize>> {
    if (alpha.cycle_len, alpha.copy) != (beta.cycle_len, beta.copy) {
        return Err(Error::DistinctCycles);
    }
    let l = alpha.cycle_len;
    let m = 2 * l;
    let (a, b) = (alpha.index, beta.index);
    let mut out = lambda.to_vec();
    remove_one(&mut out, l)?;
    out.push((q_mod(m, a, b) + 1) / 2);
    out.push((q_mod(m, b, a) + 1) / 2);
    out.sort_unstable();
    Ok(out)
}

fn remove_one(v: &mut Vec<usize>, x: usize) -> Result<()> {
    let i = v
        .iter()
        .position(|&y| y == x)
        .ok_or_else(|| Error::RangeError(format!("part {x} not in lambda {v:?}")))?;
    v.remove(i);
    Ok(())
}

/// Which of the two cycles created by a same-cycle insertion an old arc
/// joins.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Affiliation {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Half {
    Left,
    Right,
}

/// Affiliation of every arc of the host cycle after a same-cycle insertion
/// at top arc `alpha`, bottom arc `beta`; the two host arcs each split into
/// a left and a right part.
pub fn arc_correspondence(
    tau: &Perm,
    alpha: usize,
    beta: usize,
) -> Result<BTreeMap<(Side, usize, Option<Half>), Affiliation>> {
    let lab = build_labelling(tau);
    let la = *lab
        .label(Side::Top, alpha)
        .ok_or(Error::ArcOutOfRange(alpha, tau.n()))?;
    let lb = *lab
        .label(Side::Bottom, beta)
        .ok_or(Error::ArcOutOfRange(beta, tau.n()))?;
    if (la.cycle_len, la.copy) != (lb.cycle_len, lb.copy) {
        return Err(Error::DistinctCycles);
    }
    let m = 2 * la.cycle_len;
    let (ax, by) = (la.index, lb.index);
    let mut out = BTreeMap::new();
    for (side, map) in [(Side::Top, &lab.pi_t), (Side::Bottom, &lab.pi_b)] {
        for (&arc, l) in map {
            if (l.cycle_len, l.copy) != (la.cycle_len, la.copy) {
                continue;
            }
            if (side == Side::Top && arc == alpha) || (side == Side::Bottom && arc == beta)
            {
                continue;
            }
            let q = q_mod(m, ax, l.index);
            let aff = if 0 < q && q < q_mod(m, ax, by) {
                Affiliation::First
            } else {
                Affiliation::Second
            };
            out.insert((side, arc, None), aff);
        }
    }
    out.insert((Side::Top, alpha, Some(Half::Left)), Affiliation::Second);
    out.insert((Side::Top, alpha, Some(Half::Right)), Affiliation::First);
    out.insert((Side::Bottom, beta, Some(Half::Left)), Affiliation::First);
    out.insert((Side::Bottom, beta, Some(Half::Right)), Affiliation::Second);
    Ok(out)
}

/// Predicted cycle multiset of the reduction obtained by removing the edge
/// at bottom position `i`, from the labels of the two top arcs adjacent to
/// its top endpoint.
pub fn predict_remove_edge(p: &Perm, i: usize) -> Result<Vec<usize>> {
    let n = p.n();
    let j = p.at(i);
    if !(2..=n - 1).contains(&i) || !(2..=n - 1).contains(&j) {
        return Err(Error::GrayAtBoundary(i, j));
    }
    let lab = build_labelling(p);
    let left = lab.pi_t[&(j - 1)];
    let right = lab.pi_t[&j];
    let mut lambda = cycle_invariant(p).lambda;
    if (left.cycle_len, left.copy) == (right.cycle_len, right.copy) {
        let l = left.cycle_len;
        let q = q_mod(2 * l, left.index, right.index);
        debug_assert_eq!(q % 2, 0);
        let x = q / 2;
        remove_one(&mut lambda, l)?;
        lambda.push(x - 1);
        lambda.push(l - x);
    } else {
        remove_one(&mut lambda, left.cycle_len)?;
        remove_one(&mut lambda, right.cycle_len)?;
        lambda.push(left.cycle_len + right.cycle_len - 1);
    }
    lambda.sort_unstable();
    Ok(lambda)
}

/// Convenience: the `(alpha, beta)` host arcs of the edge at bottom
/// position `i` (requires the edge away from the boundary).
pub fn host_arcs(p: &Perm, i: usize) -> Result<(usize, usize)> {
    let n = p.n();
    let j = p.at(i);
    if !(2..=n - 1).contains(&i) || !(2..=n - 1).contains(&j) {
        return Err(Error::GrayAtBoundary(i, j));
    }
    Ok((j - 1, i - 1))
}
