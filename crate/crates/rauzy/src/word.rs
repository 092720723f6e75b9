//! Operator words: generator tokens, text format, and the two length
//! accountings (graph length and alternation length).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A single generator letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gen {
    L,
    LPrime,
    R,
    RPrime,
    /// Sliding operator acting on the edge at the given bottom position.
    S(usize),
    /// Pivotless left operator `L^{i,j}`.
    Lpiv(usize, usize),
    /// Pivotless right operator `R^{i,j}`.
    Rpiv(usize, usize),
    /// Size-increasing operator `T_i`.
    T(usize),
    /// Mirrored size-increasing operator `TS_i`.
    TS(usize),
    Q1,
    Q2,
}

impl Gen {
    /// Discriminant used for alternation-run accounting: letters with equal
    /// kind belong to the same run regardless of parameters.
    pub fn kind(&self) -> u8 {
        match self {
            Gen::L => 0,
            Gen::LPrime => 1,
            Gen::R => 2,
            Gen::RPrime => 3,
            Gen::S(_) => 4,
            Gen::Lpiv(..) => 5,
            Gen::Rpiv(..) => 6,
            Gen::T(_) => 7,
            Gen::TS(_) => 8,
            Gen::Q1 => 9,
            Gen::Q2 => 10,
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::L => write!(f, "L"),
            Gen::LPrime => write!(f, "L'"),
            Gen::R => write!(f, "R"),
            Gen::RPrime => write!(f, "R'"),
            Gen::S(p) => write!(f, "S@{p}"),
            Gen::Lpiv(i, j) => write!(f, "Lp{i},{j}"),
            Gen::Rpiv(i, j) => write!(f, "Rp{i},{j}"),
            Gen::T(i) => write!(f, "T{i}"),
            Gen::TS(i) => write!(f, "TS{i}"),
            Gen::Q1 => write!(f, "q1"),
            Gen::Q2 => write!(f, "q2"),
        }
    }
}

fn parse_gen(tok: &str) -> Result<Gen> {
    let bad = || Error::Parse(format!("unknown generator token {tok:?}"));
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    let pair = |s: &str| -> Result<(usize, usize)> {
        let (a, b) = s.split_once(',').ok_or_else(bad)?;
        Ok((num(a)?, num(b)?))
    };
    Ok(match tok {
        "L" => Gen::L,
        "L'" => Gen::LPrime,
        "R" => Gen::R,
        "R'" => Gen::RPrime,
        "q1" => Gen::Q1,
        "q2" => Gen::Q2,
        _ => {
            if let Some(rest) = tok.strip_prefix("S@") {
                Gen::S(num(rest)?)
            } else if let Some(rest) = tok.strip_prefix("Lp") {
                let (i, j) = pair(rest)?;
                Gen::Lpiv(i, j)
            } else if let Some(rest) = tok.strip_prefix("Rp") {
                let (i, j) = pair(rest)?;
                Gen::Rpiv(i, j)
            } else if let Some(rest) = tok.strip_prefix("TS") {
                Gen::TS(num(rest)?)
            } else if let Some(rest) = tok.strip_prefix('T') {
                Gen::T(num(rest)?)
            } else {
                return Err(bad());
            }
        }
    })
}

/// A sequence of generators, applied left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Word(pub Vec<Gen>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn push(&mut self, g: Gen) {
        self.0.push(g);
    }

    pub fn extend(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn repeated(g: Gen, k: usize) -> Self {
        Word(vec![g; k])
    }

    /// Number of letters.
    pub fn graph_length(&self) -> usize {
        self.0.len()
    }

    /// Number of maximal runs of letters of equal kind; a power like `L^j`
    /// or `S_e^m` counts as a single alternation step.
    pub fn alternation_length(&self) -> usize {
        let mut count = 0;
        let mut last: Option<u8> = None;
        for g in &self.0 {
            let k = g.kind();
            if last != Some(k) {
                count += 1;
                last = Some(k);
            }
        }
        count
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "(empty)");
        }
        // run-length render: identical consecutive letters collapse to ^k
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let g = self.0[i];
            let mut k = 1;
            while i + k < self.0.len() && self.0[i + k] == g {
                k += 1;
            }
            if k == 1 {
                parts.push(g.to_string());
            } else {
                parts.push(format!("{g}^{k}"));
            }
            i += k;
        }
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "(empty)" || s.trim().is_empty() {
            return Ok(Word::new());
        }
        let mut out = Vec::new();
        for tok in s.split_whitespace() {
            let (base, rep) = match tok.split_once('^') {
                Some((b, k)) => (
                    b,
                    k.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad exponent in {tok:?}")))?,
                ),
                None => (tok, 1),
            };
            let g = parse_gen(base)?;
            out.extend(std::iter::repeat(g).take(rep));
        }
        Ok(Word(out))
    }
}
