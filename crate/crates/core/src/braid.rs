//! Twist functors along the two cores and the braid words they generate.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::category::Vertex;
use crate::complex::{ComplexMap, Summand, TwistedComplex};
use crate::equiv::{equivalent, require_valid, Verdict};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::hom::HomComplex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BraidLetter {
    pub vertex: Vertex,
    /// `+1` or `-1`.
    pub power: i8,
}

impl BraidLetter {
    pub const ALL: [BraidLetter; 4] = [
        BraidLetter { vertex: 0, power: 1 },
        BraidLetter { vertex: 0, power: -1 },
        BraidLetter { vertex: 1, power: 1 },
        BraidLetter { vertex: 1, power: -1 },
    ];

    pub fn new(vertex: Vertex, power: i8) -> Self {
        assert!(vertex <= 1 && (power == 1 || power == -1), "invalid braid letter");
        Self { vertex, power }
    }

    pub fn inverse(self) -> Self {
        Self { vertex: self.vertex, power: -self.power }
    }
}

impl fmt::Display for BraidLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.power > 0 { 's' } else { 'S' };
        write!(f, "{s}{}", self.vertex)
    }
}

impl FromStr for BraidLetter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s0" => Ok(Self::new(0, 1)),
            "S0" => Ok(Self::new(0, -1)),
            "s1" => Ok(Self::new(1, 1)),
            "S1" => Ok(Self::new(1, -1)),
            _ => Err(Error::Parse(format!("unknown braid letter {s:?} (expected s0, S0, s1, S1)"))),
        }
    }
}

/// Free word in the twists, applied left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BraidWord(pub Vec<BraidLetter>);

impl BraidWord {
    pub fn new(letters: Vec<BraidLetter>) -> Self {
        Self(letters)
    }

    pub fn letters(&self) -> &[BraidLetter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Word undoing `self`.
    pub fn inverse(&self) -> Self {
        Self(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn then(&self, other: &Self) -> Self {
        Self(self.0.iter().chain(&other.0).copied().collect())
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for BraidWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl Serialize for BraidWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BraidWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `T_i^power(c)`, computed as a chain-level cone and then minimized.
pub fn twist<F: Field>(c: &TwistedComplex<F>, i: Vertex, power: i8) -> Result<TwistedComplex<F>> {
    require_valid(c)?;
    let cat = c.category();
    let core = TwistedComplex::core(cat, i, 0);
    match power {
        1 => {
            // cone of evaluation ⊕_A HF^A(Q_i, c) ⊗ Q_i[-A] -> c
            let hom = HomComplex::new(&core, c)?;
            let mut summands = Vec::new();
            let mut reps = Vec::new();
            for a in hom.degrees().collect::<Vec<_>>() {
                for z in hom.cohomology_representatives(a) {
                    summands.push(Summand::new(i, a));
                    reps.push((a, z));
                }
            }
            let source = TwistedComplex::from_parts(cat, summands, Vec::new());
            let mut ev = ComplexMap::zero(0, source.len(), c.len());
            for (r, (a, z)) in reps.iter().enumerate() {
                let m = hom.to_map(*a, z);
                for b in 0..c.len() {
                    ev.set(r, b, m.get(0, b).clone());
                }
            }
            Ok(source.cone(c, &ev)?.minimize())
        }
        -1 => {
            // cone of coevaluation c -> ⊕_A HF^A(c, Q_i)^∨ ⊗ Q_i[A], shifted back by one
            let hom = HomComplex::new(c, &core)?;
            let mut summands = Vec::new();
            let mut reps = Vec::new();
            for a in hom.degrees().collect::<Vec<_>>() {
                for z in hom.cohomology_representatives(a) {
                    summands.push(Summand::new(i, -a));
                    reps.push((a, z));
                }
            }
            let target = TwistedComplex::from_parts(cat, summands, Vec::new());
            let mut coev = ComplexMap::zero(0, c.len(), target.len());
            for (r, (a, z)) in reps.iter().enumerate() {
                let m = hom.to_map(*a, z);
                for b in 0..c.len() {
                    coev.set(b, r, m.get(b, 0).clone());
                }
            }
            Ok(c.cone(&target, &coev)?.shift(-1).minimize())
        }
        _ => Err(Error::PreconditionViolated(format!("twist power must be +1 or -1, got {power}"))),
    }
}

pub fn apply_letter<F: Field>(letter: BraidLetter, c: &TwistedComplex<F>) -> Result<TwistedComplex<F>> {
    twist(c, letter.vertex, letter.power)
}

/// Applies the letters of `w` in order, first letter first.
pub fn apply_braid<F: Field>(w: &BraidWord, c: &TwistedComplex<F>) -> Result<TwistedComplex<F>> {
    require_valid(c)?;
    w.letters().iter().try_fold(c.minimize(), |acc, l| apply_letter(*l, &acc))
}

pub fn braid_relation_words() -> (BraidWord, BraidWord) {
    let (s0, s1) = (BraidLetter::new(0, 1), BraidLetter::new(1, 1));
    (BraidWord(vec![s0, s1, s0]), BraidWord(vec![s1, s0, s1]))
}

pub fn check_braid_relation<F: Field>(c: &TwistedComplex<F>) -> Result<Verdict> {
    let (left, right) = braid_relation_words();
    equivalent(&apply_braid(&left, c)?, &apply_braid(&right, c)?)
}

/// All words of exactly `len` letters, in lexicographic order of `BraidLetter::ALL`.
pub fn words_of_length(len: usize) -> Vec<BraidWord> {
    let mut out = vec![BraidWord::default()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| BraidLetter::ALL.iter().map(move |l| w.then(&BraidWord(vec![*l]))))
            .collect();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitWitness {
    pub word: BraidWord,
    /// `apply_braid(word, Q0)` is equivalent to `shift(Q1, shift)`.
    pub shift: i64,
}

pub const ORBIT_SEARCH_DEPTH: usize = 4;

/// Breadth-first search for a word carrying Q0 to a shift of Q1.
pub fn core_orbit_witness<F: Field>(cat: &std::sync::Arc<crate::category::Category<F>>) -> Result<OrbitWitness> {
    if !cat.params().is_spherical() {
        return Err(Error::PreconditionViolated("orbit witness search needs spherical cores".into()));
    }
    let q0 = TwistedComplex::core(cat, 0, 0);
    let mut queue = VecDeque::from([(BraidWord::default(), q0)]);
    while let Some((w, c)) = queue.pop_front() {
        if let [s] = c.summands() {
            if s.vertex == 1 {
                let shift = -s.position;
                let target = TwistedComplex::core(cat, 1, 0).shift(shift);
                if equivalent(&c, &target)? == Verdict::Yes {
                    return Ok(OrbitWitness { word: w, shift });
                }
            }
        }
        if w.len() == ORBIT_SEARCH_DEPTH {
            continue;
        }
        for l in BraidLetter::ALL {
            if w.letters().last() == Some(&l.inverse()) {
                continue;
            }
            let next = apply_letter(l, &c)?;
            queue.push_back((w.then(&BraidWord(vec![l])), next));
        }
    }
    Err(Error::SearchExhausted(format!(
        "no word of length <= {ORBIT_SEARCH_DEPTH} carries Q0 to a shift of Q1"
    )))
}
