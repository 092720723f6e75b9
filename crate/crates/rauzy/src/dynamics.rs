//! All generator families as invertible operators: the extended family
//! L, L', R, R', the sliding family S_e, the pivotless family, the
//! size-increasing operators T_i / TS_i, the partial maps q_k, plus the
//! boosted and pivotless projections relating a colored permutation to its
//! reduction.

use crate::error::{Error, Result};
use crate::labelling::{build_labelling, ArcLabel};
use crate::perm::{reduce, ArcRef, Colored, Perm, Side};
use crate::word::{Gen, Word};
use std::collections::{HashSet, VecDeque};

/// `L`: rotates the values strictly above `sigma(1)` (value n drops to
/// `sigma(1) + 1`, the others go up by one).
pub fn l(p: &Perm) -> Perm {
    let n = p.n();
    let c = p.at(1);
    let f = |v: usize| {
        if v <= c {
            v
        } else if v == n {
            c + 1
        } else {
            v + 1
        }
    };
    Perm::from_slice(&p.values().map(f).collect::<Vec<_>>()).unwrap()
}

/// `L'`: rotates the positions after `sigma^{-1}(1)` (the last edge's
/// bottom endpoint moves to just after it).
pub fn l_prime(p: &Perm) -> Perm {
    let n = p.n();
    let k = p.pos_of(1);
    let mut vals: Vec<usize> = p.values().collect();
    if k < n {
        let mut seg = vec![p.at(n)];
        seg.extend((k + 1..n).map(|x| p.at(x)));
        vals[k..].copy_from_slice(&seg);
    }
    Perm::from_slice(&vals).unwrap()
}

/// `R`: rotates the positions strictly left of `sigma^{-1}(n)` (the
/// position-1 edge moves to the end of the block).
pub fn r(p: &Perm) -> Perm {
    let m = p.pos_of(p.n());
    let mut vals: Vec<usize> = p.values().collect();
    if m > 1 {
        let mut seg: Vec<usize> = (2..m).map(|x| p.at(x)).collect();
        seg.push(p.at(1));
        vals[..m - 1].copy_from_slice(&seg);
    }
    Perm::from_slice(&vals).unwrap()
}

/// `R'`: rotates the values strictly below `sigma(n)` (value 1 climbs to
/// `sigma(n) - 1`).
pub fn r_prime(p: &Perm) -> Perm {
    let c = p.at(p.n());
    let f = |v: usize| {
        if v >= c {
            v
        } else if v == 1 {
            c - 1
        } else {
            v - 1
        }
    };
    Perm::from_slice(&p.values().map(f).collect::<Vec<_>>()).unwrap()
}

/// Order of `L` on `p`'s family: `L^{n - sigma(1)} = id`.
pub fn l_order(p: &Perm) -> usize {
    (p.n() - p.at(1)).max(1)
}

/// Order of `R` on `p`'s family: `R^{m-1} = id` with `m = sigma^{-1}(n)`.
pub fn r_order(p: &Perm) -> usize {
    (p.pos_of(p.n()) - 1).max(1)
}

/// The exceptional standard forms `id_i = L^i(id_n)`.
pub fn id_i(n: usize, i: usize) -> Perm {
    let mut p = Perm::identity(n);
    for _ in 0..i {
        p = l(&p);
    }
    p
}

/// Pivotless `L^{i,j}`: values above `i` rotate up by `j`.
pub fn lpiv(i: usize, j: usize, p: &Perm) -> Result<Perm> {
    let n = p.n();
    if i >= n || j == 0 || j >= n - i {
        return Err(Error::RangeError(format!("Lpiv({i},{j}) at size {n}")));
    }
    let f = |v: usize| {
        if v <= i {
            v
        } else {
            let vv = v + j;
            if vv <= n {
                vv
            } else {
                vv - (n - i)
            }
        }
    };
    Ok(Perm::from_slice(&p.values().map(f).collect::<Vec<_>>()).unwrap())
}

/// Pivotless `R^{i,j}`: positions `1..i-1` rotate forward by `j`. The
/// value `i = n+1` (rotate every position) is admitted for projections of
/// hosts whose pivot edge is not red.
pub fn rpiv(i: usize, j: usize, p: &Perm) -> Result<Perm> {
    let n = p.n();
    if i > n + 1 || j == 0 || j >= i {
        return Err(Error::RangeError(format!("Rpiv({i},{j}) at size {n}")));
    }
    let mut vals: Vec<usize> = p.values().collect();
    for x in 1..i {
        vals[x - 1] = p.at((x - 1 + j) % (i - 1) + 1);
    }
    Ok(Perm::from_slice(&vals).unwrap())
}

/// Slides the edge at bottom position `i` rightward along its two
/// right-adjacent edges; returns the result and the edge's new bottom
/// position. Endpoints landing on the last position/value hop past the
/// boundary path.
pub fn s_e(p: &Perm, i: usize) -> Result<(Perm, usize)> {
    let n = p.n();
    if !p.is_standard() {
        return Err(Error::NotStandard);
    }
    if i == 0 || i > n {
        return Err(Error::RangeError(format!("edge position {i} at size {n}")));
    }
    let j = p.at(i);
    if i == 1 {
        return Err(Error::EdgeIsAnchor);
    }
    // e_t: edge whose top endpoint is immediately right of j
    let jt = if j < n { j + 1 } else { 2 };
    let it = p.pos_of(jt);
    // e_b: edge at the bottom position right of i
    let ib = if i < n { i + 1 } else { 2 };
    let jb = p.at(ib);
    // remove e
    let keep: Vec<usize> = (1..=n).filter(|&x| x != i).collect();
    let tau = p.restrict(&keep);
    let m = n - 1;
    // coordinates of e_t's bottom and e_b's top in tau
    let itp = if it > i { it - 1 } else { it };
    let jbp = if jb > j { jb - 1 } else { jb };
    // bottom endpoint just right of e_t's bottom; hop the top path if last
    let bpos = if itp < m { itp } else { tau.pos_of(1) };
    // top endpoint just right of e_b's top; hop the bottom path if last
    let tval = if jbp < m { jbp } else { tau.at(1) };
    let out = crate::perm::insert(
        &tau,
        1,
        ArcRef { side: Side::Top, pos: tval },
        ArcRef { side: Side::Bottom, pos: bpos },
    )?;
    Ok((out, bpos + 1))
}

/// Labelling-based sliding: reduce the edge, move its host-arc labels one
/// step along their cycles, and re-insert. Defined when the edge touches
/// neither boundary.
pub fn s_e_labelled(p: &Perm, i: usize) -> Result<Perm> {
    if i == 1 {
        return Err(Error::EdgeIsAnchor);
    }
    let c = Colored::new(p.clone(), vec![i])?;
    let (tau, alpha, beta) = reduce(&c)?;
    let lab = build_labelling(&tau);
    let la = *lab
        .label(Side::Top, alpha.pos)
        .ok_or(Error::ArcOutOfRange(alpha.pos, tau.n()))?;
    let lb = *lab
        .label(Side::Bottom, beta.pos)
        .ok_or(Error::ArcOutOfRange(beta.pos, tau.n()))?;
    // sigma = tau|(1, t_{2x+1,l,k}, b_{2y,l',k'}) slides to
    // tau|(1, t_{2y+1 mod 2l',l',k'}, b_{2x+2 mod 2l,l,k})
    let new_top = ArcLabel {
        index: (lb.index + 1) % (2 * lb.cycle_len),
        cycle_len: lb.cycle_len,
        copy: lb.copy,
    };
    let new_bot = ArcLabel {
        index: (la.index + 1) % (2 * la.cycle_len),
        cycle_len: la.cycle_len,
        copy: la.copy,
    };
    let a2 = lab.arc_of(Side::Top, new_top)?;
    let b2 = lab.arc_of(Side::Bottom, new_bot)?;
    crate::perm::insert(
        &tau,
        1,
        ArcRef { side: Side::Top, pos: a2 },
        ArcRef { side: Side::Bottom, pos: b2 },
    )
}

/// Mirror by 180-degree rotation of the diagram.
pub fn mirror(p: &Perm) -> Perm {
    let n = p.n();
    Perm::from_slice(&(1..=n).map(|x| n + 1 - p.at(n + 1 - x)).collect::<Vec<_>>())
        .unwrap()
}

/// The involution `Theta = inverse of the 180-degree rotation`; fixes
/// X-type parameters and swaps H-type parameters.
pub fn theta(p: &Perm) -> Perm {
    mirror(p).inverse()
}

/// `T_i`: inserts the edges `(i+1, 1)` and `(i+2, sigma(i)+1)`, old values
/// at or above `sigma(i)` shifting by two. Grows the top principal cycle by
/// two and preserves the sign.
pub fn t_i(i: usize, p: &Perm) -> Result<Perm> {
    let n = p.n();
    if i == 0 || i > n {
        return Err(Error::RangeError(format!("T_{i} at size {n}")));
    }
    let c = p.at(i);
    let v = |y: usize| if y < c { y + 1 } else { y + 2 };
    let mut out = Vec::with_capacity(n + 2);
    for x in 1..=n + 2 {
        if x <= i {
            out.push(v(p.at(x)));
        } else if x == i + 1 {
            out.push(1);
        } else if x == i + 2 {
            out.push(c + 1);
        } else {
            out.push(v(p.at(x - 2)));
        }
    }
    Perm::from_slice(&out)
}

/// `TS_i`: the Theta-conjugate of T, inserting edges `(i+1, sigma(i))` and
/// `(n+2, sigma(i)+1)`.
pub fn ts_i(i: usize, p: &Perm) -> Result<Perm> {
    let n = p.n();
    if i == 0 || i > n {
        return Err(Error::RangeError(format!("TS_{i} at size {n}")));
    }
    let c = p.at(i);
    let w = |y: usize| if y < c { y } else { y + 2 };
    let mut out = Vec::with_capacity(n + 2);
    for x in 1..=n + 2 {
        if x <= i {
            out.push(w(p.at(x)));
        } else if x == i + 1 {
            out.push(c);
        } else if x == n + 2 {
            out.push(c + 1);
        } else {
            out.push(w(p.at(x - 1)));
        }
    }
    Perm::from_slice(&out)
}

/// `T_min`: `T_i` at the position of value 1.
pub fn t_min(p: &Perm) -> Result<Perm> {
    t_i(p.pos_of(1), p)
}

/// `q_k(tau) = R(prepend_one(tau))`, defined when `prepend_one(tau)` has
/// rank `k`.
pub fn q_k(k: usize, tau: &Perm) -> Result<Perm> {
    let pre = tau.prepend_one();
    let found = crate::invariants::rank(&pre);
    if found != k {
        return Err(Error::RankMismatch { expected: k, found });
    }
    Ok(r(&pre))
}

/// Applies a single generator.
pub fn apply(g: Gen, p: &Perm) -> Result<Perm> {
    Ok(match g {
        Gen::L => l(p),
        Gen::LPrime => l_prime(p),
        Gen::R => r(p),
        Gen::RPrime => r_prime(p),
        Gen::S(i) => s_e(p, i)?.0,
        Gen::Lpiv(i, j) => lpiv(i, j, p)?,
        Gen::Rpiv(i, j) => rpiv(i, j, p)?,
        Gen::T(i) => t_i(i, p)?,
        Gen::TS(i) => ts_i(i, p)?,
        Gen::Q1 => q_k(1, p)?,
        Gen::Q2 => q_k(2, p)?,
    })
}

/// Order of a rotation letter on `p`'s family (`g^order = id`).
pub fn letter_order(g: Gen, p: &Perm) -> Result<usize> {
    Ok(match g {
        Gen::L => l_order(p),
        Gen::LPrime => (p.n() - p.pos_of(1)).max(1),
        Gen::R => r_order(p),
        Gen::RPrime => (p.at(p.n()) - 1).max(1),
        _ => return Err(Error::RangeError(format!("{g} is not a rotation letter"))),
    })
}

/// Applies `g^j` in a single pass when `g` is a rotation letter (the
/// exponent wraps modulo the letter's order); other letters fall back to
/// repeated application.
pub fn apply_run(g: Gen, j: usize, p: &Perm) -> Result<Perm> {
    let n = p.n();
    match g {
        Gen::L => {
            let c = p.at(1);
            let ord = (n - c).max(1);
            let j = j % ord;
            let f = |v: usize| if v <= c { v } else { c + 1 + (v - c - 1 + j) % ord };
            Ok(Perm::from_slice(&p.values().map(f).collect::<Vec<_>>()).unwrap())
        }
        Gen::RPrime => {
            let c = p.at(n);
            let ord = (c - 1).max(1);
            let j = j % ord;
            let f = |v: usize| if v >= c { v } else { 1 + (v - 1 + ord - j) % ord };
            Ok(Perm::from_slice(&p.values().map(f).collect::<Vec<_>>()).unwrap())
        }
        Gen::LPrime => {
            let k = p.pos_of(1);
            let ord = (n - k).max(1);
            let j = j % ord;
            let mut vals: Vec<usize> = p.values().collect();
            for t in 0..n - k {
                vals[k + t] = p.at(k + 1 + (t + ord - j) % ord);
            }
            Ok(Perm::from_slice(&vals).unwrap())
        }
        Gen::R => {
            let m = p.pos_of(n);
            let ord = (m - 1).max(1);
            let j = j % ord;
            let mut vals: Vec<usize> = p.values().collect();
            for t in 0..m - 1 {
                vals[t] = p.at(1 + (t + j) % ord);
            }
            Ok(Perm::from_slice(&vals).unwrap())
        }
        _ => {
            let mut cur = p.clone();
            for _ in 0..j {
                cur = apply(g, &cur)?;
            }
            Ok(cur)
        }
    }
}

/// Applies a word left to right; maximal rotation runs are applied in one
/// pass each.
pub fn apply_word(w: &Word, p: &Perm) -> Result<Perm> {
    let mut cur = p.clone();
    let mut idx = 0;
    while idx < w.0.len() {
        let g = w.0[idx];
        let mut j = 1;
        if matches!(g, Gen::L | Gen::LPrime | Gen::R | Gen::RPrime) {
            while idx + j < w.0.len() && w.0[idx + j] == g {
                j += 1;
            }
        }
        cur = if j > 1 {
            apply_run(g, j, &cur)?
        } else {
            apply(g, &cur)?
        };
        idx += j;
    }
    Ok(cur)
}

/// How bottom positions move under one generator application: returns the
/// map old position -> new position (1-based; index 0 unused).
pub fn position_map(g: Gen, p: &Perm) -> Result<Vec<usize>> {
    let n = p.n();
    let mut map: Vec<usize> = (0..=n).collect();
    match g {
        Gen::L | Gen::RPrime | Gen::Lpiv(..) => {}
        Gen::R => {
            let m = p.pos_of(n);
            if m > 1 {
                map[1] = m - 1;
                for x in 2..m {
                    map[x] = x - 1;
                }
            }
        }
        Gen::LPrime => {
            let k = p.pos_of(1);
            if k < n {
                map[n] = k + 1;
                for x in k + 1..n {
                    map[x] = x + 1;
                }
            }
        }
        Gen::Rpiv(i, j) => {
            // new(x) = p((x-1+j) mod (i-1) + 1): old y lands where
            // (x-1+j) = y-1 mod (i-1)
            if i > n || j >= i {
                return Err(Error::RangeError(format!("Rpiv({i},{j})")));
            }
            for y in 1..i {
                map[y] = (y + (i - 1) - 1 - j) % (i - 1) + 1;
            }
        }
        Gen::S(i) => {
            let (_, new_pos) = s_e(p, i)?;
            // removal at i, insertion at new_pos
            for x in 1..=n {
                if x == i {
                    map[x] = new_pos;
                } else {
                    let after_remove = if x > i { x - 1 } else { x };
                    map[x] = if after_remove >= new_pos {
                        after_remove + 1
                    } else {
                        after_remove
                    };
                }
            }
        }
        Gen::T(i) => {
            for x in 1..=n {
                map[x] = if x > i { x + 2 } else { x };
            }
        }
        Gen::TS(i) => {
            for x in 1..=n {
                map[x] = if x > i { x + 1 } else { x };
            }
        }
        Gen::Q1 | Gen::Q2 => {
            // prepend (positions shift by one), then R on the result
            let pre = p.prepend_one();
            let inner = position_map(Gen::R, &pre)?;
            for x in 1..=n {
                map[x] = inner[x + 1];
            }
        }
    }
    Ok(map)
}

/// Applies a generator to a colored permutation, carrying the colored
/// positions along.
pub fn apply_colored(g: Gen, c: &Colored) -> Result<Colored> {
    let map = position_map(g, &c.perm)?;
    let perm = apply(g, &c.perm)?;
    let gray: Vec<usize> = c.gray.iter().map(|&x| map[x]).collect();
    Colored::new(perm, gray)
}

/// Applies a word to a colored permutation.
pub fn apply_word_colored(w: &Word, c: &Colored) -> Result<Colored> {
    let mut cur = c.clone();
    for &g in &w.0 {
        cur = apply_colored(g, &cur)?;
    }
    Ok(cur)
}


/// All single-letter lifts of `g` on the reduction of `cur`: host words
/// whose application turns the host's reduction into `target`.
/// Rotation letters enumerate every host exponent over one full cycle; the
/// sliding letter searches interleaved slides of the gray edges and of the
/// hosted edge breadth-first.
fn lift_candidates(g: Gen, cur: &Colored, target: &Perm) -> Result<Vec<(Word, Colored)>> {
    let mut out: Vec<(Word, Colored)> = Vec::new();
    match g {
        Gen::L | Gen::LPrime | Gen::R | Gen::RPrime => {
            let n = cur.perm.n();
            let mut state = cur.clone();
            let mut w = Word::new();
            for _ in 0..n + 2 {
                state = apply_colored(g, &state)?;
                w.push(g);
                if state.reduction() == *target {
                    out.push((w.clone(), state.clone()));
                }
                if state.perm == cur.perm {
                    break;
                }
            }
        }
        Gen::S(_) => {
            // the hosted edge may be blocked (or its cycle split) by a
            // gray edge, so a single reduced slide can require several
            // host moves: gray slides project to the identity, and any
            // other edge returning around its full cycle does too.
            // Search all-slide words breadth-first and keep every state
            // whose reduction matches the target.
            let n = cur.perm.n();
            let mut seen: HashSet<(Vec<u8>, Vec<usize>)> = HashSet::new();
            let mut queue: VecDeque<(Colored, Word)> = VecDeque::new();
            seen.insert((cur.perm.as_bytes().to_vec(), cur.gray.clone()));
            queue.push_back((cur.clone(), Word::new()));
            let mut nodes = 0usize;
            let mut first_hit: Option<usize> = None;
            while let Some((st, w)) = queue.pop_front() {
                nodes += 1;
                if nodes > 50_000 || w.0.len() > 4 * n || out.len() >= 16 {
                    break;
                }
                // alternatives near the shortest lift are enough for
                // backtracking; don't flood far past it
                if let Some(d) = first_hit {
                    if w.0.len() > d + 2 {
                        break;
                    }
                }
                if !w.0.is_empty() && st.reduction() == *target {
                    first_hit.get_or_insert(w.0.len());
                    out.push((w.clone(), st.clone()));
                    // further moves from a matching state belong to the
                    // next letter's search
                    continue;
                }
                for mp in 2..=n {
                    let mv = Gen::S(mp);
                    let Ok(t) = apply_colored(mv, &st) else {
                        continue;
                    };
                    let key = (t.perm.as_bytes().to_vec(), t.gray.clone());
                    if seen.insert(key) {
                        let mut nw = w.clone();
                        nw.push(mv);
                        queue.push_back((t, nw));
                    }
                }
            }
        }
        _ => {
            return Err(Error::HelperFailure(format!(
                "boost only lifts L, L', R, R', S letters, got {g}"
            )))
        }
    }
    // drop duplicate resulting states, keeping the shortest lift
    out.sort_by_key(|(w, _)| w.graph_length());
    let mut seen: Vec<Colored> = Vec::new();
    out.retain(|(_, c)| {
        if seen.contains(c) {
            false
        } else {
            seen.push(c.clone());
            true
        }
    });
    Ok(out)
}

/// Lifts a word over `{L, L', R, R', S_e}` on the reduction to a word on
/// the colored host so that the reduction square commutes: applying the
/// returned word to the host and reducing equals applying `word` to
/// `host.reduction()`. Each letter may have several candidate lifts (the
/// host exponent matching the reduction is not always unique, and a wrong
/// choice can strand the gray edges); the search backtracks over them.
pub fn boost(word: &Word, host: &Colored) -> Result<(Word, Colored)> {
    crate::search_clock::track(|| boost_inner(word, host))
}

fn boost_inner(word: &Word, host: &Colored) -> Result<(Word, Colored)> {
    let mut taus = vec![host.reduction()];
    for &g in &word.0 {
        let next = apply(g, taus.last().unwrap())?;
        taus.push(next);
    }
    let len = word.0.len();
    let mut states: Vec<Colored> = vec![host.clone()];
    let mut chosen: Vec<Word> = Vec::new();
    let mut frames: Vec<(Vec<(Word, Colored)>, usize)> = Vec::new();
    let mut budget = 200_000usize;
    loop {
        let level = chosen.len();
        if level == len {
            let mut out = Word::new();
            for w in &chosen {
                out.extend(w);
            }
            return Ok((out, states.last().unwrap().clone()));
        }
        if frames.len() == level {
            let cands =
                lift_candidates(word.0[level], &states[level], &taus[level + 1])?;
            frames.push((cands, 0));
        }
        let (cands, next) = frames.last_mut().unwrap();
        if *next < cands.len() {
            let (w, c) = cands[*next].clone();
            *next += 1;
            states.push(c);
            chosen.push(w);
        } else {
            frames.pop();
            if chosen.pop().is_none() {
                return Err(Error::HelperFailure(format!(
                    "no boost lift of {word} over {host}"
                )));
            }
            states.pop();
        }
        budget = budget.saturating_sub(1);
        if budget == 0 {
            return Err(Error::SearchBudgetExceeded("boost backtracking".into()));
        }
    }
}

/// Bottom position in the host of the reduction's `i`-th edge (the `i`-th
/// non-gray position).
pub fn host_position(c: &Colored, i: usize) -> Option<usize> {
    (1..=c.perm.n()).filter(|x| !c.gray.contains(x)).nth(i - 1)
}

/// Projects a word over `{L, R}` runs on a red-colored host onto the
/// pivotless dynamics of the red-edge pattern: the red restriction of
/// `word(host)` equals the returned word applied to `host.marked_pattern()`.
pub fn pivotless_project(word: &Word, host: &Colored) -> Result<Word> {
    let reds = &host.gray;
    let n_red = reds.len();
    let mut out = Word::new();
    let mut cur = host.clone();
    let mut idx = 0;
    while idx < word.0.len() {
        let g = word.0[idx];
        let mut j = 0;
        while idx < word.0.len() && word.0[idx] == g {
            j += 1;
            idx += 1;
        }
        match g {
            Gen::R => {
                let p = &cur.perm;
                let m = p.pos_of(p.n());
                if m > 1 {
                    let jn = j % (m - 1);
                    let r_cnt = cur.gray.iter().filter(|&&x| x < m).count();
                    let jp = cur.gray.iter().filter(|&&x| x <= jn).count();
                    if r_cnt > 0 {
                        let jeff = jp % r_cnt;
                        if jeff > 0 {
                            out.push(Gen::Rpiv(r_cnt + 1, jeff));
                        }
                    }
                }
            }
            Gen::L => {
                let p = &cur.perm;
                let n = p.n();
                let c = p.at(1);
                if c < n {
                    let jn = j % (n - c);
                    let vals: Vec<usize> = cur.gray.iter().map(|&x| p.at(x)).collect();
                    let below = vals.iter().filter(|&&v| v <= c).count();
                    let above = n_red - below;
                    let jp = vals.iter().filter(|&&v| v > n - jn).count();
                    if above > 0 {
                        let jeff = jp % above;
                        if jeff > 0 {
                            out.push(Gen::Lpiv(below, jeff));
                        }
                    }
                }
            }
            _ => {
                return Err(Error::HelperFailure(format!(
                    "pivotless projection only handles L and R runs, got {g}"
                )))
            }
        }
        for _ in 0..j {
            cur = apply_colored(g, &cur)?;
        }
    }
    Ok(out)
}

/// Number of descents (`sigma(i) = sigma(i+1) + 1`).
pub fn descents(p: &Perm) -> usize {
    (1..p.n()).filter(|&i| p.at(i) == p.at(i + 1) + 1).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{cycle_invariant, lambda, perm_type, rank, sign, PermType};
    use crate::perm::{all_irreducibles, all_standards, insert};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> Perm {
        s.parse().unwrap()
    }

    fn pow(f: fn(&Perm) -> Perm, q: &Perm, k: usize) -> Perm {
        let mut out = q.clone();
        for _ in 0..k {
            out = f(&out);
        }
        out
    }

    #[test]
    fn id_family() {
        for n in 3..=8 {
            let id = Perm::identity(n);
            let forms: Vec<Perm> = (0..n).map(|i| id_i(n, i)).collect();
            // n-1 distinct standard members (i = n-1 wraps to id)
            for i in 0..n - 1 {
                assert!(forms[i].is_standard(), "n={n} i={i}");
                assert_eq!(forms[i], pow(l_prime, &id, n - 1 - i), "n={n} i={i}");
            }
            assert_eq!(forms[n - 1], id);
            let distinct: std::collections::BTreeSet<&Perm> =
                forms[..n - 1].iter().collect();
            assert_eq!(distinct.len(), n - 1);
        }
    }

    #[test]
    fn operators_preserve_invariants() {
        for n in 2..=6 {
            for q in all_irreducibles(n) {
                let lam = lambda(&q);
                for f in [l, l_prime, r, r_prime] {
                    let img = f(&q);
                    assert!(img.is_irreducible(), "{q:?}");
                    assert_eq!(lambda(&img), lam, "{q:?}");
                }
                assert_eq!(rank(&l(&q)), rank(&q), "{q:?}");
                assert_eq!(rank(&r(&q)), rank(&q), "{q:?}");
            }
        }
    }

    #[test]
    fn operator_orders_and_inverses() {
        for q in all_irreducibles(6) {
            let n = q.n();
            assert_eq!(pow(l, &q, l_order(&q)), q, "{q:?}");
            assert_eq!(pow(r, &q, r_order(&q)), q, "{q:?}");
            // L' rotates the n - sigma^{-1}(1) trailing positions, R' the
            // sigma(n) - 1 lowest values
            assert_eq!(pow(l_prime, &q, (n - q.pos_of(1)).max(1)), q, "{q:?}");
            assert_eq!(pow(r_prime, &q, (q.at(n) - 1).max(1)), q, "{q:?}");
        }
    }

    #[test]
    fn pivotless_consistency() {
        for n in 3..=6 {
            for q in all_irreducibles(n) {
                let i = q.at(1);
                for j in 1..n.saturating_sub(i) {
                    assert_eq!(lpiv(i, j, &q).unwrap(), pow(l, &q, j), "{q:?} j={j}");
                }
                let m = q.pos_of(n);
                for j in 1..m {
                    assert_eq!(rpiv(m, j, &q).unwrap(), pow(r, &q, j), "{q:?} j={j}");
                }
            }
        }
    }

    #[test]
    fn pivotless_breaks_few_descents() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let n = rng.gen_range(4..=10);
            let q = random_perm(&mut rng, n);
            let before = descents(&q);
            let img = if rng.gen_bool(0.5) {
                let i = rng.gen_range(0..n - 1);
                if n - i < 2 {
                    continue;
                }
                let j = rng.gen_range(1..n - i);
                lpiv(i, j, &q).unwrap()
            } else {
                let i = rng.gen_range(2..=n);
                let j = rng.gen_range(1..i);
                rpiv(i, j, &q).unwrap()
            };
            let after = descents(&img);
            assert!(after + 2 >= before, "broke too many descents on {q:?}");
        }
    }

    fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Perm {
        use rand::seq::SliceRandom;
        let mut vals: Vec<usize> = (1..=n).collect();
        vals.shuffle(rng);
        Perm::from_slice(&vals).unwrap()
    }

    #[test]
    fn sliding_preserves_structure() {
        for n in 3..=6 {
            for q in all_standards(n) {
                for i in 2..=n {
                    let (img, new_pos) = s_e(&q, i).unwrap();
                    assert!(img.is_standard(), "{q:?} i={i}");
                    assert_eq!(lambda(&img), lambda(&q), "{q:?} i={i}");
                    // after one application, neither endpoint of the slid
                    // edge sits at the right boundary
                    assert_ne!(new_pos, img.n(), "{q:?} i={i}");
                    assert_ne!(img.at(new_pos), img.n(), "{q:?} i={i}");
                }
            }
        }
    }

    #[test]
    fn sliding_periodicity() {
        for n in 4..=6 {
            for q in all_standards(n) {
                for i in 2..=n {
                    let j = q.at(i);
                    if i == n || j == n || j == 1 {
                        continue;
                    }
                    let c = Colored::new(q.clone(), vec![i]).unwrap();
                    let (tau, alpha, beta) = reduce(&c).unwrap();
                    let lab = build_labelling(&tau);
                    let la = lab.label(Side::Top, alpha.pos).unwrap();
                    let lb = lab.label(Side::Bottom, beta.pos).unwrap();
                    let period = crate::pathfinder::lcm(2 * la.cycle_len, 2 * lb.cycle_len);
                    let mut cur = q.clone();
                    let mut pos = i;
                    for _ in 0..period {
                        let (nxt, np) = s_e(&cur, pos).unwrap();
                        cur = nxt;
                        pos = np;
                    }
                    assert_eq!(cur, q, "{q:?} i={i}");
                    assert_eq!(pos, i, "{q:?} i={i}");
                }
            }
        }
    }

    #[test]
    fn sliding_direct_vs_labelled() {
        for n in 3..=7 {
            for q in all_standards(n) {
                for i in 2..=n {
                    let j = q.at(i);
                    if i == n || j == n || j == 1 {
                        continue;
                    }
                    let direct = s_e(&q, i).unwrap().0;
                    let via_labels = s_e_labelled(&q, i).unwrap();
                    assert_eq!(direct, via_labels, "{q:?} i={i}");
                }
            }
        }
    }

    #[test]
    fn t_action_on_invariants() {
        for n in 3..=5 {
            for q in all_standards(n) {
                let r0 = rank(&q);
                let mut lam0 = lambda(&q);
                lam0.remove(lam0.iter().position(|&x| x == r0).unwrap());
                lam0.push(r0 + 2);
                lam0.sort_unstable();
                let s0 = sign(&q).unwrap();
                for i in 1..=n {
                    let img = t_i(i, &q).unwrap();
                    assert_eq!(rank(&img), r0 + 2, "{q:?} i={i}");
                    assert_eq!(lambda(&img), lam0, "{q:?} i={i}");
                    assert_eq!(sign(&img).unwrap(), s0, "{q:?} i={i}");
                    // reduce round-trip: graying the two new edges gives q
                    let c = Colored::new(img.clone(), vec![i + 1, i + 2]).unwrap();
                    assert_eq!(c.reduction(), q, "{q:?} i={i}");
                    match (perm_type(&q), perm_type(&img)) {
                        (PermType::X { r, i: xi }, PermType::X { r: r2, i: xi2 }) => {
                            assert_eq!((r2, xi2), (r + 2, xi));
                        }
                        (PermType::H { r1, r2 }, PermType::H { r1: a, r2: b }) => {
                            assert_eq!((a, b), (r1, r2 + 2));
                        }
                        other => panic!("type changed: {other:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn ts_action_on_invariants() {
        for n in 3..=5 {
            for q in all_standards(n) {
                for i in 1..=n {
                    let img = ts_i(i, &q).unwrap();
                    assert_eq!(
                        img,
                        theta(&t_i(n + 1 - q.at(i), &theta(&q)).unwrap()),
                        "{q:?} i={i}"
                    );
                    assert_eq!(rank(&img), rank(&q) + 2);
                    assert_eq!(sign(&img).unwrap(), sign(&q).unwrap());
                    match (perm_type(&q), perm_type(&img)) {
                        (PermType::X { r, i: xi }, PermType::X { r: r2, i: xi2 }) => {
                            assert_eq!((r2, xi2), (r + 2, xi));
                        }
                        (PermType::H { r1, r2 }, PermType::H { r1: a, r2: b }) => {
                            assert_eq!((a, b), (r1 + 2, r2));
                        }
                        other => panic!("type changed: {other:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn theta_is_involution() {
        for q in all_irreducibles(6) {
            assert_eq!(theta(&theta(&q)), q);
        }
    }

    #[test]
    fn q_k_roundtrip() {
        for n in 3..=7 {
            for q in all_standards(n) {
                let k = rank(&q);
                if k > 2 {
                    continue;
                }
                let tau = q.d_map();
                assert_eq!(q_k(k, &tau).unwrap(), r(&q), "{q:?}");
                assert_eq!(rank(&q_k(k, &tau).unwrap()), k, "{q:?}");
                let other = if k == 1 { 2 } else { 1 };
                assert!(matches!(
                    q_k(other, &tau),
                    Err(Error::RankMismatch { .. })
                ));
            }
        }
    }

    #[test]
    fn boost_commuting_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut tried = 0;
        while tried < 400 {
            let n = rng.gen_range(4..=8);
            let stds = all_standards(n);
            let tau = stds[rng.gen_range(0..stds.len())].clone();
            let a = rng.gen_range(1..n);
            let b = rng.gen_range(1..n);
            let host = insert(
                &tau,
                1,
                ArcRef { side: Side::Top, pos: a },
                ArcRef { side: Side::Bottom, pos: b },
            )
            .unwrap();
            if !host.is_standard() {
                continue;
            }
            let host = Colored::new(host, vec![b + 1]).unwrap();
            assert_eq!(host.reduction(), tau);
            // random word over L, L', S_e on the evolving reduction
            let mut word = Word::new();
            let mut cur = tau.clone();
            for _ in 0..rng.gen_range(1..=10) {
                let g = match rng.gen_range(0..3) {
                    0 => Gen::L,
                    1 => Gen::LPrime,
                    _ => Gen::S(rng.gen_range(2..=cur.n())),
                };
                cur = apply(g, &cur).unwrap();
                word.push(g);
            }
            let (hosted, final_host) = boost(&word, &host).unwrap();
            assert_eq!(final_host.reduction(), cur, "word={word} host={host}");
            let replay = apply_word_colored(&hosted, &host).unwrap();
            assert_eq!(replay, final_host);
            // boosting only raises exponents inside runs, so the
            // alternation length never grows
            assert!(hosted.alternation_length() <= word.alternation_length());
            assert!(hosted.graph_length() <= 6 * n * word.graph_length());
            tried += 1;
        }
    }

    #[test]
    fn pivotless_projection_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..400 {
            let n = rng.gen_range(5..=10);
            let q = random_perm(&mut rng, n);
            // random nonempty red set
            let mut reds: Vec<usize> = (1..=n).filter(|_| rng.gen_bool(0.5)).collect();
            if reds.is_empty() {
                reds.push(rng.gen_range(1..=n));
            }
            let host = Colored::new(q, reds).unwrap();
            let mut word = Word::new();
            let mut probe = host.clone();
            for _ in 0..rng.gen_range(1..=6) {
                let g = if rng.gen_bool(0.5) { Gen::L } else { Gen::R };
                let j = rng.gen_range(1..=4);
                for _ in 0..j {
                    word.push(g);
                    probe = apply_colored(g, &probe).unwrap();
                }
            }
            let projected = pivotless_project(&word, &host).unwrap();
            let mut tau = host.marked_pattern();
            for &g in &projected.0 {
                tau = apply(g, &tau).unwrap();
            }
            assert_eq!(
                tau,
                probe.marked_pattern(),
                "word={word} host={host} projected={projected}"
            );
            assert!(projected.alternation_length() <= word.alternation_length());
        }
    }

    #[test]
    fn pivotless_projection_fixture() {
        // A coloring with 2 red edges among values <= sigma(1) and 2 red
        // edges among the top j values projects L^j to L^{2,2}.
        let q = p("5 1 9 2 6 10 3 8 4 7");
        // sigma(1)=5; red values {1,2} below, {6,9,10} above, of which
        // {9,10} lie in the top j=3 values
        let reds: Vec<usize> = [1, 2, 6, 9, 10].iter().map(|&v| q.pos_of(v)).collect();
        let host = Colored::new(q, reds).unwrap();
        let word = Word::repeated(Gen::L, 3);
        let projected = pivotless_project(&word, &host).unwrap();
        assert_eq!(projected.0, vec![Gen::Lpiv(2, 2)]);
    }

    #[test]
    fn position_maps_are_faithful() {
        // moving a marked edge through an operator lands where the operator
        // moved that edge's value
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..500 {
            let n = rng.gen_range(4..=9);
            let stds = all_standards(n);
            let q = stds[rng.gen_range(0..stds.len())].clone();
            let g = match rng.gen_range(0..5) {
                0 => Gen::L,
                1 => Gen::LPrime,
                2 => Gen::R,
                3 => Gen::RPrime,
                _ => Gen::S(rng.gen_range(2..=n)),
            };
            let img = match apply(g, &q) {
                Ok(x) => x,
                Err(_) => continue,
            };
            let map = position_map(g, &q).unwrap();
            // multiset of values moves consistently: value at old pos x must
            // appear at map[x] unless the operator renames values (L, R')
            match g {
                Gen::R | Gen::LPrime => {
                    for x in 1..=n {
                        assert_eq!(img.at(map[x]), q.at(x), "{q:?} {g} x={x}");
                    }
                }
                Gen::S(i) => {
                    // the slid edge changes both endpoints, so the check is
                    // pattern-based: the other edges keep their relative
                    // order, and the slid edge lands at s_e's new position
                    let (_, new_pos) = s_e(&q, i).unwrap();
                    assert_eq!(map[i], new_pos, "{q:?} {g}");
                    let mut imgpos: Vec<usize> =
                        (1..=n).filter(|&x| x != i).map(|x| map[x]).collect();
                    imgpos.sort_unstable();
                    let keep: Vec<usize> = (1..=n).filter(|&x| x != i).collect();
                    assert_eq!(
                        img.restrict(&imgpos),
                        q.restrict(&keep),
                        "{q:?} {g}"
                    );
                }
                _ => {
                    for x in 1..=n {
                        assert_eq!(map[x], x);
                    }
                }
            }
        }
    }
}
