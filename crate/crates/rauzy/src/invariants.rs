//! Cycle invariant via arc tracing on the doubled diagram, principal
//! cycles, X/H type, the Arf-style sign invariant, and the invariant-based
//! class-counting oracle.

use crate::error::{Error, Result};
use crate::perm::Perm;

/// Subset-enumeration limit for the Arf sum (2^n terms).
pub const ARF_LIMIT: usize = 24;

/// One step of a cycle traversal in the doubled diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    /// Top arc `a` (between top points `a` and `a+1`).
    TopArc(usize),
    /// Bottom arc `a`.
    BotArc(usize),
    /// The top boundary path (top-left of 1 to bottom-right of n).
    TopPath,
    /// The bottom boundary path (top-right of n to bottom-left of 1).
    BotPath,
}

/// A closed cycle of the doubled diagram, in traversal order.
#[derive(Clone, Debug)]
pub struct Cycle {
    pub trav: Vec<Step>,
    pub top_path: bool,
    pub bot_path: bool,
}

impl Cycle {
    /// Cycle length: the number of top arcs it traverses.
    pub fn cycle_len(&self) -> usize {
        self.trav
            .iter()
            .filter(|s| matches!(s, Step::TopArc(_)))
            .count()
    }

    pub fn tops(&self) -> Vec<usize> {
        self.trav
            .iter()
            .filter_map(|s| match s {
                Step::TopArc(a) => Some(*a),
                _ => None,
            })
            .collect()
    }

    pub fn bots(&self) -> Vec<usize> {
        self.trav
            .iter()
            .filter_map(|s| match s {
                Step::BotArc(a) => Some(*a),
                _ => None,
            })
            .collect()
    }
}

/// Full cycle decomposition of a permutation's doubled diagram.
#[derive(Clone, Debug)]
pub struct CycleInvariant {
    /// Sorted multiset of all cycle lengths (sums to n-1).
    pub lambda: Vec<usize>,
    pub cycles: Vec<Cycle>,
    /// Index into `cycles` of the cycle holding the top boundary path.
    pub top_principal: usize,
    /// Index of the cycle holding the bottom boundary path.
    pub bottom_principal: usize,
}

impl CycleInvariant {
    pub fn ell(&self) -> usize {
        self.lambda.len() - 1
    }

    /// Length of the top principal cycle.
    pub fn rank(&self) -> usize {
        self.cycles[self.top_principal].cycle_len()
    }

    /// Derived genus-like quantity `(n - ell + 1) / 2`.
    pub fn genus(&self, n: usize) -> usize {
        (n - self.ell() + 1) / 2
    }
}

// Doubled-diagram node encoding: (side, half, pos) with side 0=top/1=bottom,
// half 0=left/1=right, pos 1..n, packed as ((side*2 + half) * n) + pos - 1.
fn node(side: usize, half: usize, pos: usize, n: usize) -> usize {
    (side * 2 + half) * n + pos - 1
}

/// Traces all cycles of the doubled diagram.
pub fn cycle_invariant(p: &Perm) -> CycleInvariant {
    let n = p.n();
    let total = 4 * n;
    let mut edge = vec![usize::MAX; total];
    let mut arc = vec![usize::MAX; total];
    // arc identity attached to a node, when its connection is a plain arc
    let mut arc_of: Vec<Option<Step>> = vec![None; total];
    let (t, b, l, r) = (0usize, 1usize, 0usize, 1usize);
    for i in 1..=n {
        let j = p.at(i);
        edge[node(b, l, i, n)] = node(t, r, j, n);
        edge[node(t, r, j, n)] = node(b, l, i, n);
        edge[node(b, r, i, n)] = node(t, l, j, n);
        edge[node(t, l, j, n)] = node(b, r, i, n);
    }
    for a in 1..n {
        for s in [t, b] {
            arc[node(s, r, a, n)] = node(s, l, a + 1, n);
            arc[node(s, l, a + 1, n)] = node(s, r, a, n);
            let step = if s == t { Step::TopArc(a) } else { Step::BotArc(a) };
            arc_of[node(s, r, a, n)] = Some(step);
            arc_of[node(s, l, a + 1, n)] = Some(step);
        }
    }
    // boundary paths
    let tp_a = node(t, l, 1, n);
    let tp_b = node(b, r, n, n);
    let bp_a = node(t, r, n, n);
    let bp_b = node(b, l, 1, n);
    arc[tp_a] = tp_b;
    arc[tp_b] = tp_a;
    arc[bp_a] = bp_b;
    arc[bp_b] = bp_a;

    let mut seen = vec![false; total];
    let mut cycles = Vec::new();
    for start in 0..total {
        if seen[start] {
            continue;
        }
        let mut trav = Vec::new();
        let mut cur = start;
        let (mut has_tp, mut has_bp) = (false, false);
        loop {
            seen[cur] = true;
            let nxt = arc[cur];
            if (cur, nxt) == (tp_a, tp_b) || (cur, nxt) == (tp_b, tp_a) {
                has_tp = true;
                trav.push(Step::TopPath);
            } else if (cur, nxt) == (bp_a, bp_b) || (cur, nxt) == (bp_b, bp_a) {
                has_bp = true;
                trav.push(Step::BotPath);
            } else {
                trav.push(arc_of[cur].expect("interior node must carry an arc"));
            }
            seen[nxt] = true;
            cur = edge[nxt];
            if cur == start {
                break;
            }
        }
        cycles.push(Cycle { trav, top_path: has_tp, bot_path: has_bp });
    }
    let mut lambda: Vec<usize> = cycles.iter().map(Cycle::cycle_len).collect();
    lambda.sort_unstable();
    let top_principal = cycles.iter().position(|c| c.top_path).unwrap();
    let bottom_principal = cycles.iter().position(|c| c.bot_path).unwrap();
    CycleInvariant { lambda, cycles, top_principal, bottom_principal }
}

/// Sorted cycle-length multiset.
pub fn lambda(p: &Perm) -> Vec<usize> {
    cycle_invariant(p).lambda
}

/// Length of the top principal cycle.
pub fn rank(p: &Perm) -> usize {
    cycle_invariant(p).rank()
}

/// Structural type of a permutation's principal cycles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PermType {
    /// Distinct principal cycles; `r` = top principal length, `i` = bottom
    /// principal length.
    X { r: usize, i: usize },
    /// A single principal cycle; `r1` = number of top arcs on the segment
    /// from the top path to the bottom path, `r2` = the complementary count
    /// plus one, so `r1 + r2 = rank + 1`.
    H { r1: usize, r2: usize },
}

/// Classifies the principal-cycle structure.
pub fn perm_type(p: &Perm) -> PermType {
    let ci = cycle_invariant(p);
    if ci.top_principal != ci.bottom_principal {
        return PermType::X {
            r: ci.cycles[ci.top_principal].cycle_len(),
            i: ci.cycles[ci.bottom_principal].cycle_len(),
        };
    }
    let tr = &ci.cycles[ci.top_principal].trav;
    let m = tr.len();
    let tp = tr.iter().position(|s| *s == Step::TopPath).unwrap();
    let bp = tr.iter().position(|s| *s == Step::BotPath).unwrap();
    let count_tops = |from: usize, to: usize| {
        let mut k = (from + 1) % m;
        let mut c = 0;
        while k != to {
            if matches!(tr[k], Step::TopArc(_)) {
                c += 1;
            }
            k = (k + 1) % m;
        }
        c
    };
    PermType::H { r1: count_tops(tp, bp), r2: count_tops(bp, tp) + 1 }
}

/// The signed subset sum `Abar = sum over I of (-1)^{|I| + chi(I)}` where
/// `chi(I)` counts non-crossing pairs `{i, i'}` in `I` (pairs with
/// `(i - i') (sigma(i) - sigma(i')) > 0`). Gray-code enumeration with
/// incremental chi updates.
pub fn arf(p: &Perm) -> Result<i64> {
    let n = p.n();
    if n > ARF_LIMIT {
        return Err(Error::TooLarge(n, ARF_LIMIT));
    }
    // nc[j] = bitmask of i != j forming a non-crossing pair with j
    let mut nc = vec![0u32; n];
    for i in 0..n {
        for j in 0..n {
            if i != j
                && (i as i64 - j as i64) * (p.at(i + 1) as i64 - p.at(j + 1) as i64) > 0
            {
                nc[j] |= 1 << i;
            }
        }
    }
    let mut sum: i64 = 1; // empty set contributes (-1)^0
    let mut cur: u32 = 0;
    let mut chi: u32 = 0;
    let mut card: u32 = 0;
    for g in 1..(1u64 << n) {
        let j = g.trailing_zeros() as usize;
        let bit = 1u32 << j;
        if cur & bit != 0 {
            cur ^= bit;
            card -= 1;
            chi -= (cur & nc[j]).count_ones();
        } else {
            chi += (cur & nc[j]).count_ones();
            cur ^= bit;
            card += 1;
        }
        sum += if (card + chi) % 2 == 0 { 1 } else { -1 };
    }
    Ok(sum)
}

/// `chi(I)` for an explicit subset of positions (1-based); exposed for
/// fixture tests of the Arf sum.
pub fn chi(p: &Perm, subset: &[usize]) -> usize {
    let mut c = 0;
    for (a, &i) in subset.iter().enumerate() {
        for &ip in &subset[a + 1..] {
            if (i as i64 - ip as i64) * (p.at(i) as i64 - p.at(ip) as i64) > 0 {
                c += 1;
            }
        }
    }
    c
}

/// Normalized sign `s = 2^{-(n+ell)/2} Abar`, in `{-1, 0, +1}`.
///
/// `Abar` is the Gauss sum of the quadratic form
/// `q(I) = |I| + chi(I) mod 2` over `GF(2)^n`, whose polar form is the
/// non-crossing adjacency matrix. Rather than summing the `2^n` subsets,
/// the form is reduced to a symplectic basis: each hyperbolic pair
/// contributes its Arf term and the sum vanishes exactly when `q` is
/// non-zero on the radical.
pub fn sign(p: &Perm) -> Result<i8> {
    let n = p.n();
    if n > 127 {
        return Err(Error::TooLarge(n, 127));
    }
    // rows of the polar form: bit j of rows[i] set iff {i, j} non-crossing
    let mut rows = vec![0u128; n];
    for i in 0..n {
        for j in 0..n {
            if i != j
                && (i as i64 - j as i64) * (p.at(i + 1) as i64 - p.at(j + 1) as i64) > 0
            {
                rows[i] |= 1 << j;
            }
        }
    }
    // q and B evaluated on masks over the original coordinates
    let q = |x: u128| -> u8 {
        let mut acc = x.count_ones();
        for i in 0..n {
            if x >> i & 1 == 1 {
                acc += (rows[i] & x & ((1u128 << i) - 1)).count_ones();
            }
        }
        (acc % 2) as u8
    };
    // bm[i] bit j = B(basis[i], basis[j]), kept in sync with the basis as
    // it is orthogonalized; dead entries are masked out by `alive`
    let mut basis: Vec<u128> = (0..n).map(|i| 1u128 << i).collect();
    let mut bm = rows.clone();
    let mut alive: u128 = (1u128 << n) - 1;
    let mut arf_bit = 0u8;
    while let Some(ia) = (0..n).find(|&i| alive >> i & 1 == 1 && bm[i] & alive != 0) {
        let ib = (bm[ia] & alive).trailing_zeros() as usize;
        let (va, vb) = (basis[ia], basis[ib]);
        let (ra, rb) = (bm[ia], bm[ib]);
        arf_bit ^= q(va) & q(vb);
        alive &= !(1u128 << ia | 1u128 << ib);
        // every survivor i gains d_i = B(c_i,vb) va + B(c_i,va) vb; the
        // matrix update follows by bilinearity in both arguments
        let ca_mask = rb & alive;
        let cb_mask = ra & alive;
        for i in 0..n {
            if alive >> i & 1 == 0 {
                continue;
            }
            let mut delta = 0u128;
            if ca_mask >> i & 1 == 1 {
                basis[i] ^= va;
                delta ^= ra ^ cb_mask;
            }
            if cb_mask >> i & 1 == 1 {
                basis[i] ^= vb;
                delta ^= rb ^ ca_mask;
            }
            if ra >> i & 1 == 1 {
                delta ^= ca_mask;
            }
            if rb >> i & 1 == 1 {
                delta ^= cb_mask;
            }
            bm[i] ^= delta;
        }
    }
    // the survivors span the radical, where q is linear
    for i in 0..n {
        if alive >> i & 1 == 1 && q(basis[i]) == 1 {
            return Ok(0);
        }
    }
    Ok(if arf_bit == 0 { 1 } else { -1 })
}

/// Invariant data identifying a class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClassFingerprint {
    /// Sorted multiset of all cycle lengths.
    pub lambda: Vec<usize>,
    /// Top principal cycle length; meaningful for the non-extended dynamics.
    pub rank: Option<usize>,
    pub sign: i8,
    /// Member of the exceptional (hyperelliptic) class Id_n.
    pub hyperelliptic: bool,
}

/// Computes the fingerprint of an irreducible permutation.
pub fn fingerprint(p: &Perm) -> Result<ClassFingerprint> {
    crate::search_clock::aux_track(0, || fingerprint_inner(p))
}

fn fingerprint_inner(p: &Perm) -> Result<ClassFingerprint> {
    let ci = cycle_invariant(p);
    Ok(ClassFingerprint {
        rank: Some(ci.rank()),
        lambda: ci.lambda,
        sign: sign(p)?,
        hyperelliptic: is_exceptional(p),
    })
}

/// Invariants (lambda, sign) of the exceptional class Id_n.
pub fn exceptional_invariants(n: usize) -> (Vec<usize>, i8) {
    let lam = if n % 2 == 0 {
        vec![n - 1]
    } else {
        vec![(n - 1) / 2, (n - 1) / 2]
    };
    // sign by n mod 8, for residues 0..7
    const SIGNS: [i8; 8] = [1, 0, -1, -1, -1, 0, 1, 1];
    (lam, SIGNS[n % 8])
}

/// True iff `p` lies in the exceptional class: its standardization matches
/// one of the `id_i = L^i(id_n)` forms.
pub fn is_exceptional(p: &Perm) -> bool {
    crate::search_clock::aux_track(1, || is_exceptional_inner(p))
}

fn is_exceptional_inner(p: &Perm) -> bool {
    let std = crate::pathfinder::standardize(p)
        .map(|z| z.result)
        .unwrap_or_else(|_| p.clone());
    let n = std.n();
    let mut idf = Perm::identity(n);
    for _ in 0..n {
        if std == idf {
            return true;
        }
        idf = crate::dynamics::l(&idf);
    }
    false
}

/// Predicted number of extended Rauzy classes with the fingerprint's
/// `(lambda, sign)`, counting the exceptional class.
pub fn classify(fp: &ClassFingerprint, n: usize) -> Result<usize> {
    if fp.lambda.contains(&1) {
        return Err(Error::UnsupportedCycleOne);
    }
    if n < 4 {
        return Err(Error::RangeError(format!("classify requires n >= 4, got {n}")));
    }
    let mut count = 0;
    let (id_lam, id_sign) = exceptional_invariants(n);
    if fp.lambda == id_lam && fp.sign == id_sign {
        count += 1;
    }
    if n <= 7 {
        // frozen small-size table of non-exceptional classes
        let table: &[(Vec<usize>, i8)] = match n {
            4 | 5 => &[],
            6 => &[(vec![5], -1)],
            _ => &[(vec![2, 4], 0), (vec![3, 3], -1)],
        };
        count += table
            .iter()
            .filter(|(l, s)| *l == fp.lambda && *s == fp.sign)
            .count();
    } else {
        let evens = fp.lambda.iter().filter(|&&x| x % 2 == 0).count();
        if evens == 0 {
            if fp.sign != 0 {
                count += 1;
            }
        } else if evens % 2 == 0 && fp.sign == 0 {
            count += 1;
        }
    }
    Ok(count)
}
