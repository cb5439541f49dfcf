use std::cmp::Ordering;
use std::fmt;

use num::Integer;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Orientation of a simple closed curve relative to its slope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> i64 {
        match self {
            Orientation::Positive => 1,
            Orientation::Negative => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }
}

/// Oriented simple closed curve on the once-punctured torus: coprime `(p, q)` with `q ≥ 0`
/// (and `p = 1` when `q = 0`), plus an orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize)]
pub struct CurveSlope {
    p: i64,
    q: i64,
    orientation: Orientation,
}

impl CurveSlope {
    pub fn new(p: i64, q: i64, orientation: Orientation) -> Result<Self> {
        let valid = q > 0 && p.gcd(&q) == 1 || q == 0 && p == 1;
        if !valid {
            return Err(Error::InvalidInput(format!("{p}/{q} is not a normalized primitive slope")));
        }
        Ok(CurveSlope { p, q, orientation })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// `|p| + q`.
    pub fn complexity(&self) -> i64 {
        self.p.abs() + self.q
    }

    /// Same slope, opposite orientation.
    pub fn reversed(&self) -> Self {
        CurveSlope { orientation: self.orientation.flipped(), ..*self }
    }

    /// Homology class `±(p, q)`.
    pub fn homology(&self) -> (i64, i64) {
        let s = self.orientation.sign();
        (s * self.p, s * self.q)
    }

    fn cmp_slope(&self, other: &Self) -> Ordering {
        // p/q with q = 0 read as +∞
        match (self.q, other.q) {
            (0, 0) => Ordering::Equal,
            (0, _) => Ordering::Greater,
            (_, 0) => Ordering::Less,
            _ => (self.p as i128 * other.q as i128).cmp(&(other.p as i128 * self.q as i128)),
        }
    }
}

impl fmt::Display for CurveSlope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.orientation {
            Orientation::Positive => '+',
            Orientation::Negative => '-',
        };
        write!(f, "{}/{}{}", self.p, self.q, sign)
    }
}

impl Serialize for CurveSlope {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl std::str::FromStr for CurveSlope {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (body, orientation) = match text.chars().last() {
            Some('+') => (&text[..text.len() - 1], Orientation::Positive),
            Some('-') => (&text[..text.len() - 1], Orientation::Negative),
            _ => (text, Orientation::Positive),
        };
        let (p, q) = body.split_once('/').ok_or_else(|| Error::InvalidInput(format!("bad slope `{text}`")))?;
        let parse = |s: &str| s.trim().parse::<i64>().map_err(|_| Error::InvalidInput(format!("bad slope `{text}`")));
        CurveSlope::new(parse(p)?, parse(q)?, orientation)
    }
}

/// All oriented slopes with `|p| + q ≤ max_complexity`, ordered by complexity, then slope value,
/// then orientation (`+` first).
pub fn enumerate_curves(max_complexity: i64) -> Vec<CurveSlope> {
    let mut slopes = Vec::new();
    for n in 1..=max_complexity.max(0) {
        let mut level = Vec::new();
        for q in 0..=n {
            let a = n - q;
            let candidates: &[i64] = if a == 0 { &[0] } else { &[a, -a] };
            for &p in candidates {
                if let Ok(s) = CurveSlope::new(p, q, Orientation::Positive) {
                    level.push(s);
                }
            }
        }
        level.sort_by(|x, y| x.cmp_slope(y));
        level.dedup();
        for s in level {
            slopes.push(s);
            slopes.push(s.reversed());
        }
    }
    slopes
}

/// Letter of a word in the free group on `A`, `B`; lowercase letters are inverses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    A,
    B,
    InvA,
    InvB,
}

impl Letter {
    pub fn inverse(self) -> Self {
        match self {
            Letter::A => Letter::InvA,
            Letter::InvA => Letter::A,
            Letter::B => Letter::InvB,
            Letter::InvB => Letter::B,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'A',
            Letter::B => 'B',
            Letter::InvA => 'a',
            Letter::InvB => 'b',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'A' => Some(Letter::A),
            'B' => Some(Letter::B),
            'a' => Some(Letter::InvA),
            'b' => Some(Letter::InvB),
            _ => None,
        }
    }
}

/// Cyclically reduced word representing a conjugacy class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CurveWord {
    letters: Vec<Letter>,
}

impl CurveWord {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidInput("empty word".into()));
        }
        let n = letters.len();
        for i in 0..n {
            if letters[i].inverse() == letters[(i + 1) % n] && n > 1 {
                return Err(Error::InvalidInput("word is not cyclically reduced".into()));
            }
        }
        Ok(CurveWord { letters })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        CurveWord { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    /// Cyclic rotation by `k` letters.
    pub fn rotated(&self, k: usize) -> Self {
        let mut letters = self.letters.clone();
        let n = letters.len();
        letters.rotate_left(k % n);
        CurveWord { letters }
    }

    /// Exponent sums of `A` and `B`.
    pub fn abelianization(&self) -> (i64, i64) {
        self.letters.iter().fold((0, 0), |(a, b), l| match l {
            Letter::A => (a + 1, b),
            Letter::InvA => (a - 1, b),
            Letter::B => (a, b + 1),
            Letter::InvB => (a, b - 1),
        })
    }
}

impl fmt::Display for CurveWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl Serialize for CurveWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl std::str::FromStr for CurveWord {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let letters = text
            .chars()
            .map(|c| Letter::from_char(c).ok_or_else(|| Error::InvalidInput(format!("bad letter `{c}`"))))
            .collect::<Result<_>>()?;
        CurveWord::new(letters)
    }
}

/// Christoffel word of the slope: `|p|` copies of `A` (or `a` when `p < 0`) and `q` copies of `B`;
/// the negative orientation gives the inverse word.
pub fn slope_to_word(s: &CurveSlope) -> CurveWord {
    let (p, q) = (s.p().unsigned_abs(), s.q() as u64);
    let n = p + q;
    let a = if s.p() >= 0 { Letter::A } else { Letter::InvA };
    let letters =
        (1..=n).map(|i| if (i * p).div_ceil(n) > ((i - 1) * p).div_ceil(n) { a } else { Letter::B }).collect();
    let word = CurveWord { letters };
    match s.orientation() {
        Orientation::Positive => word,
        Orientation::Negative => word.inverse(),
    }
}
