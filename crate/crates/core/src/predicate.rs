//! Predicates `D: {0..n} → {−1, +1}` on Hamming weights and their degree
//! measures.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sign for each Hamming weight `0..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Predicate {
    signs: Vec<i8>,
}

/// Sign changes at distance one and two.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub deg: usize,
    pub deg2: usize,
    pub flips1: BTreeSet<usize>,
    pub flips2: BTreeSet<usize>,
}

/// Outcome of the window/parity search used by the AND-into-XOR reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftSelection {
    pub reversed: bool,
    pub s: usize,
    pub odd_parity: bool,
    pub window_flips: usize,
}

/// Named predicate families used for test corpora and the CLI.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Constant { positive: bool },
    Parity,
    /// −1 below `t`, +1 at or above.
    Threshold { t: usize },
    /// +1 iff `i mod m` is one of `residues`.
    ModClass { m: usize, residues: BTreeSet<usize> },
}

impl Predicate {
    /// Builds a predicate from a sequence of ±1 values; `n` is `len − 1`.
    pub fn new<T: Copy + Into<i64>>(signs: &[T]) -> Result<Self> {
        if signs.len() < 2 {
            return Err(Error::TooShort(signs.len()));
        }
        let signs = signs
            .iter()
            .enumerate()
            .map(|(index, &v)| match v.into() {
                1 => Ok(1i8),
                -1 => Ok(-1i8),
                value => Err(Error::NotASign { index, value }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Predicate { signs })
    }

    pub fn from_fn(n: usize, mut positive: impl FnMut(usize) -> bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::TooShort(1));
        }
        let signs = (0..=n).map(|i| if positive(i) { 1 } else { -1 }).collect();
        Ok(Predicate { signs })
    }

    /// Predicate whose bit `i` of `bits` (set = +1) gives `D(i)`; `n ≤ 63`.
    pub fn from_bits(n: usize, bits: u64) -> Result<Self> {
        if n >= 64 {
            return Err(Error::Gate { what: "from_bits", n, max: 63 });
        }
        Self::from_fn(n, |i| bits >> i & 1 == 1)
    }

    /// All `2^{n+1}` predicates on `{0..n}`.
    pub fn all(n: usize) -> impl Iterator<Item = Predicate> {
        assert!((1..=20).contains(&n), "exhaustive enumeration is limited to 1 ≤ n ≤ 20");
        (0..1u64 << (n + 1)).map(move |bits| Predicate::from_bits(n, bits).unwrap())
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        assert!(n >= 1);
        Predicate { signs: (0..=n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect() }
    }

    pub fn n(&self) -> usize {
        self.signs.len() - 1
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// `D(i)`. Panics when `i > n`.
    pub fn at(&self, i: usize) -> i8 {
        self.signs[i]
    }

    pub fn is_constant(&self) -> bool {
        self.signs.iter().all(|&s| s == self.signs[0])
    }

    fn flips(&self, gap: usize) -> BTreeSet<usize> {
        (0..self.signs.len().saturating_sub(gap))
            .filter(|&i| self.signs[i] != self.signs[i + gap])
            .collect()
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let flips1 = self.flips(1);
        let flips2 = self.flips(2);
        DegreeProfile { deg: flips1.len(), deg2: flips2.len(), flips1, flips2 }
    }

    /// Number of sign changes `|{i : D(i) ≠ D(i+1)}|`.
    pub fn deg(&self) -> usize {
        self.signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// `|{i : D(i) ≠ D(i+2)}|`.
    pub fn deg2(&self) -> usize {
        self.signs.windows(3).filter(|w| w[0] != w[2]).count()
    }

    /// `i ↦ D(n − i)`.
    pub fn reverse(&self) -> Predicate {
        let mut signs = self.signs.clone();
        signs.reverse();
        Predicate { signs }
    }

    /// `i ↦ D(start + i)` on `{0..length−1}`.
    pub fn restrict(&self, start: usize, length: usize) -> Result<Predicate> {
        if length < 2 || start + length > self.signs.len() {
            return Err(Error::WindowOutOfRange { start, length, n: self.n() });
        }
        Ok(Predicate { signs: self.signs[start..start + length].to_vec() })
    }

    /// Restricts to the window of length `2^a + 1` (largest `2^a ≤ n`) that
    /// keeps the most distance-two flips; ties go to the smallest start.
    /// The result keeps at least `⌈deg₂/2⌉` of them.
    pub fn normalize_pow2(&self) -> (Predicate, usize) {
        let n = self.n();
        let width = 1usize << (usize::BITS - 1 - n.leading_zeros());
        if width == n {
            return (self.clone(), 0);
        }
        let flips2 = self.flips(2);
        let mut best = (0usize, 0usize);
        for start in 0..=n - width {
            // window {start..start+width} holds flips2 indices start..=start+width-2
            let count = flips2.range(start..start + width - 1).count();
            if count > best.0 {
                best = (count, start);
            }
        }
        (self.restrict(best.1, width + 1).expect("window fits"), best.1)
    }

    /// Chooses reversal, parity class and shift `s ∈ {0, q, …, 15q}`
    /// (`q = n/32`) maximising the number of distance-two flips of that
    /// parity inside `[s, s + q)`.
    pub fn select_shift(&self) -> Result<ShiftSelection> {
        let n = self.n();
        if !n.is_power_of_two() || n < 64 {
            return Err(Error::NotEmbeddable(n));
        }
        let flips2 = self.flips(2);
        let lower_half = flips2.range(..n / 2).count();
        let reversed = lower_half < flips2.len().div_ceil(2);
        let flips2 = if reversed { self.reverse().flips(2) } else { flips2 };
        let q = n / 32;
        let mut best = ShiftSelection { reversed, s: 0, odd_parity: false, window_flips: 0 };
        let mut best_count = None;
        for j in 0..16 {
            let s = j * q;
            for odd in [false, true] {
                let count = flips2.range(s..s + q).filter(|&&i| (i % 2 == 1) == odd).count();
                if best_count.is_none_or(|c| count > c) {
                    best_count = Some(count);
                    best = ShiftSelection { reversed, s, odd_parity: odd, window_flips: count };
                }
            }
        }
        Ok(best)
    }
}

/// Builds a member of a named family on `{0..n}`.
pub fn family(kind: &Family, n: usize) -> Result<Predicate> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    match kind {
        Family::Constant { positive } => Predicate::from_fn(n, |_| *positive),
        Family::Parity => Predicate::from_fn(n, |i| i % 2 == 0),
        Family::Threshold { t } => {
            if *t > n + 1 {
                return Err(Error::InvalidParameter(format!("threshold t = {t} outside 0..={}", n + 1)));
            }
            Predicate::from_fn(n, |i| i >= *t)
        }
        Family::ModClass { m, residues } => {
            if *m == 0 {
                return Err(Error::InvalidParameter("modulus must be positive".into()));
            }
            if let Some(r) = residues.iter().find(|&&r| r >= *m) {
                return Err(Error::InvalidParameter(format!("residue {r} not below modulus {m}")));
            }
            Predicate::from_fn(n, |i| residues.contains(&(i % m)))
        }
    }
}

fn parse_family(expr: &str) -> Result<Predicate> {
    let (kind, args) = expr.split_once(':').unwrap_or((expr, ""));
    let mut n = None;
    let mut t = None;
    let mut m = None;
    let mut residues = None;
    let mut positive = true;
    for pair in args.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got {pair:?}")))?;
        let num = |v: &str| v.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad integer {v:?}")));
        match key.trim() {
            "n" => n = Some(num(value)?),
            "t" => t = Some(num(value)?),
            "m" => m = Some(num(value)?),
            "r" | "residues" => {
                residues = Some(value.split('/').map(num).collect::<Result<BTreeSet<_>>>()?);
            }
            "sign" => {
                positive = match value.trim() {
                    "+" | "+1" | "1" => true,
                    "-" | "-1" => false,
                    other => return Err(Error::Parse(format!("bad sign {other:?}"))),
                }
            }
            other => return Err(Error::Parse(format!("unknown parameter {other:?}"))),
        }
    }
    let n = n.ok_or_else(|| Error::Parse("missing n=".into()))?;
    let kind = match kind.trim() {
        "constant" => Family::Constant { positive },
        "parity" => Family::Parity,
        "threshold" => Family::Threshold { t: t.ok_or_else(|| Error::Parse("missing t=".into()))? },
        "mod_class" | "mod" => Family::ModClass {
            m: m.ok_or_else(|| Error::Parse("missing m=".into()))?,
            residues: residues.ok_or_else(|| Error::Parse("missing r=".into()))?,
        },
        other => return Err(Error::Parse(format!("unknown family {other:?}"))),
    };
    family(&kind, n)
}

/// Parses either a sign string (`"--+++"`) or a family expression such as
/// `threshold:n=16,t=5`, `parity:n=8`, `constant:n=5,sign=-` or
/// `mod_class:n=5,m=3,r=0/2`.
pub fn parse_expr(expr: &str) -> Result<Predicate> {
    let trimmed = expr.trim();
    if trimmed.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
        parse_family(trimmed)
    } else {
        trimmed.parse()
    }
}

impl FromStr for Predicate {
    type Err = Error;

    /// Sign-string form: one `+` or `-` per weight, index 0 leftmost,
    /// whitespace ignored.
    fn from_str(s: &str) -> Result<Self> {
        let signs = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .enumerate()
            .map(|(i, c)| match c {
                '+' => Ok(1i8),
                '-' => Ok(-1i8),
                other => Err(Error::Parse(format!("position {i} is {other:?}, expected '+' or '-'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Predicate::new(&signs)
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.signs {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl Serialize for Predicate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Predicate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}
