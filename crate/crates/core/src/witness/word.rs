use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::WitnessError;

/// A formal derivation of a distance from the base distance 1.
///
/// Each constructor names the rule that produces the new distance from the
/// inner one(s); [`super::Builder`] turns a word into a witness set.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DistanceWord {
    One,
    Sqrt3(Box<DistanceWord>),
    Double(Box<DistanceWord>),
    Triple(Box<DistanceWord>),
    Sqrt2(Box<DistanceWord>),
    TwoSqrt2Over3(Box<DistanceWord>),
    /// `√(a² − b²)`, requires `a > b`.
    PythagSub(Box<DistanceWord>, Box<DistanceWord>),
}

impl DistanceWord {
    pub fn sqrt3(w: DistanceWord) -> DistanceWord {
        DistanceWord::Sqrt3(Box::new(w))
    }

    pub fn double(w: DistanceWord) -> DistanceWord {
        DistanceWord::Double(Box::new(w))
    }

    pub fn triple(w: DistanceWord) -> DistanceWord {
        DistanceWord::Triple(Box::new(w))
    }

    pub fn sqrt2(w: DistanceWord) -> DistanceWord {
        DistanceWord::Sqrt2(Box::new(w))
    }

    pub fn two_sqrt2_over3(w: DistanceWord) -> DistanceWord {
        DistanceWord::TwoSqrt2Over3(Box::new(w))
    }

    pub fn pythag_sub(a: DistanceWord, b: DistanceWord) -> DistanceWord {
        DistanceWord::PythagSub(Box::new(a), Box::new(b))
    }

    /// `(2√2/3)^k · (√3)^l`: all `TwoSqrt2Over3` steps innermost, then the `Sqrt3` steps.
    pub fn power(k: u32, l: u32) -> DistanceWord {
        let mut w = DistanceWord::One;
        for _ in 0..k {
            w = DistanceWord::two_sqrt2_over3(w);
        }
        for _ in 0..l {
            w = DistanceWord::sqrt3(w);
        }
        w
    }

    /// Recover `(k, l)` if the word has the [`DistanceWord::power`] shape.
    pub fn as_power(&self) -> Option<(u32, u32)> {
        let mut w = self;
        let mut l = 0;
        while let DistanceWord::Sqrt3(inner) = w {
            l += 1;
            w = inner;
        }
        let mut k = 0;
        while let DistanceWord::TwoSqrt2Over3(inner) = w {
            k += 1;
            w = inner;
        }
        (*w == DistanceWord::One).then_some((k, l))
    }

    /// Longest chain of rule applications; `k + l` for power words.
    pub fn depth(&self) -> usize {
        match self {
            DistanceWord::One => 0,
            DistanceWord::Sqrt3(w)
            | DistanceWord::Double(w)
            | DistanceWord::Triple(w)
            | DistanceWord::Sqrt2(w)
            | DistanceWord::TwoSqrt2Over3(w) => 1 + w.depth(),
            DistanceWord::PythagSub(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Direct sub-words.
    pub fn children(&self) -> Vec<&DistanceWord> {
        match self {
            DistanceWord::One => vec![],
            DistanceWord::Sqrt3(w)
            | DistanceWord::Double(w)
            | DistanceWord::Triple(w)
            | DistanceWord::Sqrt2(w)
            | DistanceWord::TwoSqrt2Over3(w) => vec![w],
            DistanceWord::PythagSub(a, b) => vec![a, b],
        }
    }
}

impl fmt::Display for DistanceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceWord::One => write!(f, "1"),
            DistanceWord::Sqrt3(w) => write!(f, "sqrt3({})", w),
            DistanceWord::Double(w) => write!(f, "double({})", w),
            DistanceWord::Triple(w) => write!(f, "triple({})", w),
            DistanceWord::Sqrt2(w) => write!(f, "sqrt2({})", w),
            DistanceWord::TwoSqrt2Over3(w) => write!(f, "two_sqrt2_over_3({})", w),
            DistanceWord::PythagSub(a, b) => write!(f, "pythag({}, {})", a, b),
        }
    }
}

impl fmt::Debug for DistanceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, what: &str) -> WitnessError {
        WitnessError::Parse(format!("{} at byte {} of {:?}", what, self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> Result<(), WitnessError> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c)))
        }
    }

    fn word(&mut self) -> Result<DistanceWord, WitnessError> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(rest.len());
        let name = &rest[..len];
        self.pos += len;
        let unary =
            |p: &mut Parser<'a>, ctor: fn(DistanceWord) -> DistanceWord| -> Result<DistanceWord, WitnessError> {
                p.eat('(')?;
                let inner = p.word()?;
                p.eat(')')?;
                Ok(ctor(inner))
            };
        match name {
            "1" => Ok(DistanceWord::One),
            "sqrt3" => unary(self, DistanceWord::sqrt3),
            "double" => unary(self, DistanceWord::double),
            "triple" => unary(self, DistanceWord::triple),
            "sqrt2" => unary(self, DistanceWord::sqrt2),
            "two_sqrt2_over_3" => unary(self, DistanceWord::two_sqrt2_over3),
            "pythag" => {
                self.eat('(')?;
                let a = self.word()?;
                self.eat(',')?;
                let b = self.word()?;
                self.eat(')')?;
                Ok(DistanceWord::pythag_sub(a, b))
            }
            "" => Err(self.err("expected a word")),
            other => Err(self.err(&format!("unknown rule {:?}", other))),
        }
    }
}

impl FromStr for DistanceWord {
    type Err = WitnessError;

    fn from_str(s: &str) -> Result<DistanceWord, WitnessError> {
        let mut p = Parser { src: s, pos: 0 };
        let w = p.word()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(w)
    }
}

impl Serialize for DistanceWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DistanceWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<DistanceWord, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
