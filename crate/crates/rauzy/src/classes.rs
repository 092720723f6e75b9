//! Orbit enumeration for each dynamics, class fingerprinting, and machine
//! verification of the classification statements.

use std::collections::{HashMap, HashSet, VecDeque};

use rayon::prelude::*;

use crate::dynamics::{self, apply};
use crate::error::{Error, Result};
use crate::invariants::{self, ClassFingerprint};
use crate::perm::{all_irreducibles, all_perms, all_standards, Perm};
use crate::word::Gen;

/// The generator families whose orbits are enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dynamics {
    /// L, L', R, R' on irreducible permutations.
    Extended,
    /// L, L' and the sliding family on standard permutations.
    Sliding,
    /// L, R on irreducible permutations.
    Rauzy,
    /// All pivotless operators on arbitrary permutations.
    Pivotless,
}

/// Default size budget for exhaustive enumeration.
pub const ENUM_BUDGET: usize = 9;

/// The ground set partitioned by the dynamics.
pub fn ground_set(n: usize, d: Dynamics) -> Vec<Perm> {
    match d {
        Dynamics::Extended | Dynamics::Rauzy => all_irreducibles(n),
        Dynamics::Sliding => all_standards(n),
        Dynamics::Pivotless => all_perms(n),
    }
}

/// Valid generator letters at `p`.
pub fn generators(d: Dynamics, p: &Perm) -> Vec<Gen> {
    let n = p.n();
    match d {
        Dynamics::Extended => vec![Gen::L, Gen::LPrime, Gen::R, Gen::RPrime],
        Dynamics::Rauzy => vec![Gen::L, Gen::R],
        Dynamics::Sliding => {
            let mut g = vec![Gen::L, Gen::LPrime];
            g.extend((2..=n).map(Gen::S));
            g
        }
        Dynamics::Pivotless => {
            let mut g = Vec::new();
            for i in 0..n {
                for j in 1..n - i {
                    g.push(Gen::Lpiv(i, j));
                }
            }
            for i in 2..=n {
                for j in 1..i {
                    g.push(Gen::Rpiv(i, j));
                }
            }
            g
        }
    }
}

/// One-step neighbors of `p`.
pub fn neighbors(d: Dynamics, p: &Perm) -> Vec<Perm> {
    generators(d, p)
        .into_iter()
        .filter_map(|g| apply(g, p).ok())
        .collect()
}

/// Neighbors in the alternation metric: every power of every generator run
/// counts as a single move.
pub fn run_neighbors(d: Dynamics, p: &Perm) -> Vec<Perm> {
    let mut out = Vec::new();
    match d {
        Dynamics::Extended | Dynamics::Rauzy => {
            for g in generators(d, p) {
                let mut cur = apply(g, p).unwrap();
                while cur != *p {
                    out.push(cur.clone());
                    cur = apply(g, &cur).unwrap();
                }
            }
        }
        Dynamics::Sliding => {
            for g in [Gen::L, Gen::LPrime] {
                let mut cur = apply(g, p).unwrap();
                while cur != *p {
                    out.push(cur.clone());
                    cur = apply(g, &cur).unwrap();
                }
            }
            for i in 2..=p.n() {
                // follow the same edge along its sliding run
                let (mut cur, mut pos) = match dynamics::s_e(p, i) {
                    Ok(x) => x,
                    Err(_) => continue,
                };
                let mut steps = 0;
                while cur != *p && steps < 4 * p.n() * p.n() {
                    out.push(cur.clone());
                    let (nxt, np) = dynamics::s_e(&cur, pos).unwrap();
                    cur = nxt;
                    pos = np;
                    steps += 1;
                }
            }
        }
        Dynamics::Pivotless => {
            out = neighbors(d, p);
        }
    }
    out
}

fn key(p: &Perm) -> u64 {
    p.pack_key().expect("enumeration sizes fit packed keys")
}

/// Breadth-first closure of `p` under the dynamics.
pub fn orbit_of(p: &Perm, d: Dynamics) -> Vec<Perm> {
    let mut seen: HashSet<u64> = HashSet::new();
    let mut queue = VecDeque::new();
    let mut members = Vec::new();
    seen.insert(key(p));
    queue.push_back(p.clone());
    while let Some(cur) = queue.pop_front() {
        for nb in neighbors(d, &cur) {
            if seen.insert(key(&nb)) {
                queue.push_back(nb);
            }
        }
        members.push(cur);
    }
    members.sort_unstable();
    members
}

/// One enumerated orbit.
#[derive(Clone, Debug)]
pub struct OrbitReport {
    pub dynamics: Dynamics,
    /// Lexicographically minimal member.
    pub representative: Perm,
    pub size: usize,
    pub fingerprint: ClassFingerprint,
    pub diameter_graph: Option<usize>,
    pub diameter_alternation: Option<usize>,
}

/// Partitions the ground set into orbits; deterministic order by
/// representative.
pub fn enumerate_classes(n: usize, d: Dynamics) -> Result<Vec<OrbitReport>> {
    if n > ENUM_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "enumeration at n={n} exceeds the budget {ENUM_BUDGET}"
        )));
    }
    let mut visited: HashSet<u64> = HashSet::new();
    let mut reports = Vec::new();
    for p in ground_set(n, d) {
        if visited.contains(&key(&p)) {
            continue;
        }
        let members = orbit_of(&p, d);
        for m in &members {
            visited.insert(key(m));
        }
        let representative = members[0].clone();
        let fingerprint = if d == Dynamics::Pivotless {
            // pivotless orbits do not preserve the cycle invariant; record
            // the representative's data without class meaning
            invariants::fingerprint(&representative).unwrap_or(ClassFingerprint {
                lambda: vec![],
                rank: None,
                sign: 0,
                hyperelliptic: false,
            })
        } else {
            invariants::fingerprint(&representative)?
        };
        reports.push(OrbitReport {
            dynamics: d,
            representative,
            size: members.len(),
            fingerprint,
            diameter_graph: None,
            diameter_alternation: None,
        });
    }
    reports.sort_by(|a, b| a.representative.cmp(&b.representative));
    Ok(reports)
}

/// Which metric a diameter is measured in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Graph,
    Alternation,
}

/// Exact diameter of one orbit (maximum eccentricity over all sources).
pub fn measure_diameter(members: &[Perm], d: Dynamics, metric: Metric) -> Result<usize> {
    let v = members.len();
    if v == 0 {
        return Ok(0);
    }
    let index: HashMap<u64, u32> = members
        .iter()
        .enumerate()
        .map(|(i, p)| (key(p), i as u32))
        .collect();
    // adjacency once, BFS per source
    let adj: Vec<Vec<u32>> = members
        .par_iter()
        .map(|p| {
            let nbs = match metric {
                Metric::Graph => neighbors(d, p),
                Metric::Alternation => run_neighbors(d, p),
            };
            let mut ids: Vec<u32> = nbs
                .iter()
                .map(|q| *index.get(&key(q)).expect("orbit must be closed"))
                .collect();
            ids.sort_unstable();
            ids.dedup();
            ids
        })
        .collect();
    let diameter = (0..v)
        .into_par_iter()
        .map(|src| {
            let mut dist = vec![u32::MAX; v];
            let mut queue = VecDeque::new();
            dist[src] = 0;
            queue.push_back(src as u32);
            let mut ecc = 0;
            while let Some(cur) = queue.pop_front() {
                let dc = dist[cur as usize];
                ecc = ecc.max(dc);
                for &nb in &adj[cur as usize] {
                    if dist[nb as usize] == u32::MAX {
                        dist[nb as usize] = dc + 1;
                        queue.push_back(nb);
                    }
                }
            }
            ecc as usize
        })
        .max()
        .unwrap_or(0);
    Ok(diameter)
}

/// Graph distance between two permutations under the dynamics, by BFS.
pub fn bfs_distance(from: &Perm, to: &Perm, d: Dynamics) -> Option<usize> {
    if from == to {
        return Some(0);
    }
    let mut dist: HashMap<u64, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    dist.insert(key(from), 0);
    queue.push_back(from.clone());
    while let Some(cur) = queue.pop_front() {
        let dc = dist[&key(&cur)];
        for nb in neighbors(d, &cur) {
            if nb == *to {
                return Some(dc + 1);
            }
            if !dist.contains_key(&key(&nb)) {
                dist.insert(key(&nb), dc + 1);
                queue.push_back(nb);
            }
        }
    }
    None
}

/// Checks the exceptional-class invariant table over a range of sizes:
/// computed (lambda, sign) of the identity versus the frozen table rows.
pub fn verify_exceptional_table(
    range: std::ops::RangeInclusive<usize>,
) -> Result<Vec<(usize, bool)>> {
    let mut out = Vec::new();
    for n in range {
        let id = Perm::identity(n);
        let (lam, s) = invariants::exceptional_invariants(n);
        let ok = invariants::lambda(&id) == lam && invariants::sign(&id)? == s;
        out.push((n, ok));
    }
    Ok(out)
}

/// The frozen classification table for n = 4..7: every extended class as
/// (lambda, sign, hyperelliptic).
pub fn small_table(n: usize) -> Vec<(Vec<usize>, i8, bool)> {
    let (id_lam, id_sign) = invariants::exceptional_invariants(n);
    let mut rows = vec![(id_lam, id_sign, true)];
    match n {
        4 | 5 => {}
        6 => rows.push((vec![5], -1, false)),
        7 => {
            rows.push((vec![2, 4], 0, false));
            rows.push((vec![3, 3], -1, false));
        }
        _ => panic!("small_table covers n = 4..7"),
    }
    rows.sort();
    rows
}
