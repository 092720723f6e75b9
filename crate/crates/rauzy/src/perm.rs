//! Permutation representation, structural predicates and edge-level surgery.
//!
//! A permutation of size `n` is stored in one-line notation: position `i`
//! (a bottom endpoint of the diagram) maps to the value `sigma(i)` (the top
//! endpoint). Positions and values are 1-based throughout the crate.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Maximum supported size; keeps invariant computations in machine words.
pub const MAX_SIZE: usize = 64;

/// An immutable permutation in one-line notation (1-based values).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u8>);

impl Perm {
    /// Builds a permutation from 1-based one-line notation.
    pub fn new(mapping: Vec<u8>) -> Result<Self> {
        let n = mapping.len();
        if n == 0 || n > MAX_SIZE {
            return Err(Error::TooLarge(n, MAX_SIZE));
        }
        let mut seen = vec![false; n + 1];
        for &v in &mapping {
            let v = v as usize;
            if v == 0 || v > n || seen[v] {
                return Err(Error::Parse(format!("not a bijection on 1..{n}")));
            }
            seen[v] = true;
        }
        Ok(Perm(mapping))
    }

    /// Builds from a slice of usize values (convenience for tests).
    pub fn from_slice(vals: &[usize]) -> Result<Self> {
        Self::new(vals.iter().map(|&v| v as u8).collect())
    }

    pub fn identity(n: usize) -> Self {
        Perm((1..=n as u8).collect())
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// `sigma(i)` with 1-based `i`.
    #[inline]
    pub fn at(&self, i: usize) -> usize {
        self.0[i - 1] as usize
    }

    pub fn values(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&v| v as usize)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// The inverse permutation.
    pub fn inverse(&self) -> Perm {
        let n = self.n();
        let mut out = vec![0u8; n];
        for i in 1..=n {
            out[self.at(i) - 1] = i as u8;
        }
        Perm(out)
    }

    /// Position of a value (1-based).
    pub fn pos_of(&self, v: usize) -> usize {
        self.0.iter().position(|&x| x as usize == v).unwrap() + 1
    }

    /// True iff no proper prefix of values fills a top-suffix block:
    /// `{sigma(1..k)} != {n-k+1..n}` for all `1 <= k < n`.
    pub fn is_irreducible(&self) -> bool {
        let n = self.n();
        let mut min_seen = usize::MAX;
        for k in 1..n {
            min_seen = min_seen.min(self.at(k));
            if min_seen == n - k + 1 {
                return false;
            }
        }
        true
    }

    /// Standard: irreducible with `sigma(1) = 1`.
    pub fn is_standard(&self) -> bool {
        self.at(1) == 1 && self.is_irreducible()
    }

    /// Pattern of the permutation restricted to a sorted list of bottom
    /// positions; values are renumbered order-preservingly.
    pub fn restrict(&self, keep: &[usize]) -> Perm {
        let mut vals: Vec<usize> = keep.iter().map(|&i| self.at(i)).collect();
        let mut sorted = vals.clone();
        sorted.sort_unstable();
        for v in &mut vals {
            *v = sorted.binary_search(v).unwrap() + 1;
        }
        Perm(vals.into_iter().map(|v| v as u8).collect())
    }

    /// Deletes the entry holding value 1 and decrements every value.
    pub fn d_map(&self) -> Perm {
        let k = self.pos_of(1);
        let vals: Vec<u8> = (1..=self.n())
            .filter(|&i| i != k)
            .map(|i| (self.at(i) - 1) as u8)
            .collect();
        Perm(vals)
    }

    /// Inverse of `d_map` on standard permutations: prepends the edge (1,1).
    pub fn prepend_one(&self) -> Perm {
        let mut vals = Vec::with_capacity(self.n() + 1);
        vals.push(1u8);
        vals.extend(self.0.iter().map(|&v| v + 1));
        Perm(vals)
    }

    /// ASCII matrix grid: a bullet at Cartesian coordinate `(i, sigma(i))`.
    pub fn render_grid(&self) -> String {
        let n = self.n();
        let mut out = String::new();
        for row in (1..=n).rev() {
            for i in 1..=n {
                out.push(if self.at(i) == row { '*' } else { '.' });
            }
            out.push('\n');
        }
        out
    }

    /// Packs into a 64-bit key when `n <= 16` (4 bits per entry).
    pub fn pack_key(&self) -> Option<u64> {
        if self.n() > 16 {
            return None;
        }
        let mut key = 0u64;
        for &v in &self.0 {
            key = (key << 4) | (v as u64 - 1);
        }
        Some(key)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strs: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", strs.join(" "))
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl FromStr for Perm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let vals: Vec<u8> = s
            .split_whitespace()
            .map(|t| {
                t.parse::<u8>()
                    .map_err(|_| Error::Parse(format!("bad token {t:?}")))
            })
            .collect::<Result<_>>()?;
        if vals.is_empty() {
            return Err(Error::Parse("empty permutation".into()));
        }
        Perm::new(vals)
    }
}

/// All permutations of size `n` (n! entries; intended for small n).
pub fn all_perms(n: usize) -> Vec<Perm> {
    fn rec(vals: &mut Vec<u8>, k: usize, out: &mut Vec<Perm>) {
        if k == vals.len() {
            out.push(Perm(vals.clone()));
            return;
        }
        for i in k..vals.len() {
            vals.swap(k, i);
            rec(vals, k + 1, out);
            vals.swap(k, i);
        }
    }
    let mut out = Vec::new();
    let mut vals: Vec<u8> = (1..=n as u8).collect();
    rec(&mut vals, 0, &mut out);
    out.sort_unstable();
    out
}

/// All irreducible permutations of size `n`.
pub fn all_irreducibles(n: usize) -> Vec<Perm> {
    all_perms(n).into_iter().filter(Perm::is_irreducible).collect()
}

/// All standard permutations of size `n`.
pub fn all_standards(n: usize) -> Vec<Perm> {
    all_perms(n).into_iter().filter(Perm::is_standard).collect()
}

/// Which side of the diagram an arc lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Top,
    Bottom,
}

/// An arc between adjacent endpoints: arc `a` (1..n-1) lies between points
/// `a` and `a+1` on its side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ArcRef {
    pub side: Side,
    pub pos: usize,
}

/// A permutation together with a set of gray (or red) bottom positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Colored {
    pub perm: Perm,
    /// Sorted bottom positions of the gray edges.
    pub gray: Vec<usize>,
}

impl Colored {
    pub fn new(perm: Perm, mut gray: Vec<usize>) -> Result<Self> {
        gray.sort_unstable();
        gray.dedup();
        if gray.iter().any(|&g| g == 0 || g > perm.n()) {
            return Err(Error::RangeError("gray position out of range".into()));
        }
        Ok(Colored { perm, gray })
    }

    /// The reduction: restriction to the black (non-gray) edges.
    pub fn reduction(&self) -> Perm {
        let keep: Vec<usize> = (1..=self.perm.n())
            .filter(|i| !self.gray.contains(i))
            .collect();
        self.perm.restrict(&keep)
    }

    /// Restriction to the marked edges themselves (the red-edge pattern of
    /// the pivotless calculus, where `gray` holds the red positions).
    pub fn marked_pattern(&self) -> Perm {
        self.perm.restrict(&self.gray)
    }
}

impl fmt::Display for Colored {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gray.is_empty() {
            write!(f, "{}", self.perm)
        } else {
            let g: Vec<String> = self.gray.iter().map(|v| v.to_string()).collect();
            write!(f, "g:{} | {}", g.join(","), self.perm)
        }
    }
}

impl FromStr for Colored {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if let Some((head, tail)) = s.split_once('|') {
            let head = head.trim();
            let tail = tail.trim();
            let gray = head
                .strip_prefix("g:")
                .ok_or_else(|| Error::Parse("expected g:<positions> | <perm>".into()))?
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad gray position {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            Colored::new(tail.parse()?, gray)
        } else {
            Colored::new(s.parse()?, vec![])
        }
    }
}

/// Reduces a single-gray coloring to `(tau, alpha, beta)` with
/// `insert(tau, 1, alpha, beta) = host`. The gray edge `(i, j)` must satisfy
/// `2 <= i, j <= n-1` for the arc pair to exist.
pub fn reduce(c: &Colored) -> Result<(Perm, ArcRef, ArcRef)> {
    if c.gray.len() != 1 {
        return Err(Error::NotSingleGray(c.gray.len()));
    }
    let i = c.gray[0];
    let j = c.perm.at(i);
    let n = c.perm.n();
    if i == 1 || i == n || j == 1 || j == n {
        return Err(Error::GrayAtBoundary(i, j));
    }
    let tau = c.reduction();
    Ok((
        tau,
        ArcRef { side: Side::Top, pos: j - 1 },
        ArcRef { side: Side::Bottom, pos: i - 1 },
    ))
}

/// Inserts `m` consecutive parallel edges within top arc `alpha` and bottom
/// arc `beta`: the new edges fill bottom positions `beta+1..beta+m` and top
/// values `alpha+1..alpha+m`.
pub fn insert(tau: &Perm, m: usize, alpha: ArcRef, beta: ArcRef) -> Result<Perm> {
    let n = tau.n();
    debug_assert!(m >= 1);
    if alpha.side != Side::Top || beta.side != Side::Bottom {
        return Err(Error::Parse("insert expects (top, bottom) arcs".into()));
    }
    // Arc 0 and arc n are allowed here (insertion at the outer boundary);
    // strict interior arcs are 1..n-1.
    if alpha.pos > n || beta.pos > n {
        return Err(Error::ArcOutOfRange(alpha.pos.max(beta.pos), n));
    }
    let (a, b) = (alpha.pos, beta.pos);
    let mut vals = Vec::with_capacity(n + m);
    for x in 1..=n + m {
        if x > b && x <= b + m {
            vals.push((a + (x - b)) as u8);
        } else {
            let old = if x <= b { x } else { x - m };
            let ov = tau.at(old);
            vals.push(if ov <= a { ov as u8 } else { (ov + m) as u8 });
        }
    }
    Perm::new(vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Perm {
        s.parse().unwrap()
    }

    #[test]
    fn parse_render_roundtrip() {
        let s = "4 1 5 8 3 6 2 7";
        assert_eq!(p(s).to_string(), s);
        assert!("1 1".parse::<Perm>().is_err());
        assert!("".parse::<Perm>().is_err());
    }

    #[test]
    fn irreducibility() {
        assert!(p("1").is_irreducible());
        assert!(!p("2 3 1").is_irreducible());
        assert!(p("1 2 7 8 9 6 3 4 5").is_irreducible());
        assert!(p("1 2 7 8 9 6 3 4 5").is_standard());
        assert!(!p("2 1").is_standard());
        // brute-force cross-check at n <= 7
        for n in 1..=7usize {
            for q in all_perms(n) {
                let brute = (1..n).all(|k| {
                    let pref: std::collections::BTreeSet<usize> =
                        (1..=k).map(|i| q.at(i)).collect();
                    let suff: std::collections::BTreeSet<usize> =
                        (n - k + 1..=n).collect();
                    pref != suff
                });
                assert_eq!(q.is_irreducible(), brute, "{q:?}");
            }
        }
    }

    #[test]
    fn d_map_and_prepend() {
        assert_eq!(p("1 3 2").d_map(), p("2 1"));
        assert_eq!(p("1 2 3 4").d_map(), p("1 2 3"));
        assert_eq!(p("1").prepend_one(), p("1 2"));
        assert_eq!(p("2 1").prepend_one(), p("1 3 2"));
        for q in all_perms(5) {
            assert_eq!(q.prepend_one().d_map(), q);
        }
    }

    #[test]
    fn insert_reduce_roundtrip() {
        // id2 + edge in (top 1, bottom 1) = id3
        let got = insert(
            &p("1 2"),
            1,
            ArcRef { side: Side::Top, pos: 1 },
            ArcRef { side: Side::Bottom, pos: 1 },
        )
        .unwrap();
        assert_eq!(got, p("1 2 3"));

        // reduce of id3 middle edge
        let c = Colored::new(p("1 2 3"), vec![2]).unwrap();
        let (tau, a, b) = reduce(&c).unwrap();
        assert_eq!(tau, p("1 2"));
        assert_eq!((a.pos, b.pos), (1, 1));

        // random roundtrips
        for tau in all_perms(5) {
            for a in 0..=5 {
                for b in 0..=5 {
                    let host = insert(
                        &tau,
                        1,
                        ArcRef { side: Side::Top, pos: a },
                        ArcRef { side: Side::Bottom, pos: b },
                    )
                    .unwrap();
                    let c = Colored::new(host.clone(), vec![b + 1]).unwrap();
                    assert_eq!(c.reduction(), tau);
                    if a >= 1 && a <= 4 && b >= 1 && b <= 4 {
                        let (t2, a2, b2) = reduce(&c).unwrap();
                        assert_eq!((t2, a2.pos, b2.pos), (tau.clone(), a, b));
                    }
                }
            }
        }
    }

    #[test]
    fn d_map_matches_gray_reduction_on_standards() {
        for q in all_perms(6) {
            if q.is_standard() {
                let c = Colored::new(q.clone(), vec![1]).unwrap();
                assert_eq!(c.reduction(), q.d_map());
            }
        }
    }

    #[test]
    fn boundary_gray_rejected() {
        let q = p("2 4 1 3");
        let c = Colored::new(q.clone(), vec![q.pos_of(4)]).unwrap();
        assert!(matches!(reduce(&c), Err(Error::GrayAtBoundary(..))));
    }

    #[test]
    fn colored_text_format() {
        let c: Colored = "g:3 | 4 1 5 8 3 6 2 7".parse().unwrap();
        assert_eq!(c.gray, vec![3]);
        assert_eq!(c.to_string(), "g:3 | 4 1 5 8 3 6 2 7");
    }

    #[test]
    fn grid_has_one_bullet_per_row() {
        let g = p("3 1 2").render_grid();
        assert_eq!(g, "*..\n..*\n.*.\n");
    }
}
