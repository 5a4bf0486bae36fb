//! Complexity-driven reduction of admissible complexes to copies of one core.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::braid::{apply_braid, apply_letter, words_of_length, BraidLetter, BraidWord};
use crate::category::{BasisKind, Morphism, Vertex, E0, E1, F0, F1, P, Q};
use crate::complex::{Summand, TwistedComplex};
use crate::equiv::{equivalent, require_valid, Verdict};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::hom::hf_ranks;
use crate::matrix::Matrix;

/// Longest word tried when neither case letter lowers complexity at the bottom.
pub const BASE_SEARCH_DEPTH: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityReport {
    /// Position subtracted to put the lowest occupied index at 0.
    pub offset: i64,
    /// Top occupied index after normalization.
    pub top: i64,
    pub u_profile: Vec<usize>,
    pub v_profile: Vec<usize>,
    pub cx: i64,
}

impl ComplexityReport {
    pub fn u(&self, i: i64) -> usize {
        usize::try_from(i).ok().and_then(|i| self.u_profile.get(i).copied()).unwrap_or(0)
    }

    pub fn v(&self, i: i64) -> usize {
        usize::try_from(i).ok().and_then(|i| self.v_profile.get(i).copied()).unwrap_or(0)
    }
}

/// `|U_i| = 2i + 1`, `|V_j| = 2j` over occupied slots, relative to the lowest position.
pub fn complexity<F: Field>(c: &TwistedComplex<F>) -> ComplexityReport {
    let Some((lo, hi)) = c.position_range() else {
        return ComplexityReport { offset: 0, top: 0, u_profile: Vec::new(), v_profile: Vec::new(), cx: 0 };
    };
    let len = (hi - lo + 1) as usize;
    let (mut u, mut v) = (vec![0; len], vec![0; len]);
    for s in c.summands() {
        let i = (s.position - lo) as usize;
        if s.vertex == 0 {
            u[i] += 1;
        } else {
            v[i] += 1;
        }
    }
    let weights: Vec<i64> = (0..len as i64)
        .flat_map(|i| {
            let a = (u[i as usize] > 0).then_some(2 * i + 1);
            let b = (v[i as usize] > 0).then_some(2 * i);
            a.into_iter().chain(b)
        })
        .collect();
    let cx = weights.iter().max().unwrap() - weights.iter().min().unwrap();
    ComplexityReport { offset: lo, top: hi - lo, u_profile: u, v_profile: v, cx }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub negative_degrees: Vec<i64>,
}

/// Endomorphism cohomology must vanish in negative degrees.
pub fn admissible<F: Field>(c: &TwistedComplex<F>) -> Result<Admissibility> {
    require_valid(c)?;
    let ranks = hf_ranks(c, c)?;
    let negative_degrees: Vec<i64> = ranks.keys().copied().filter(|&d| d < 0).collect();
    Ok(Admissibility { admissible: negative_degrees.is_empty(), negative_degrees })
}

/// `V_0 ≠ 0 ⇔ U_N ≠ 0` for a nonempty complex spanning more than one index.
pub fn first_step_holds(report: &ComplexityReport) -> bool {
    report.top == 0 || ((report.v(0) > 0) == (report.u(report.top) > 0))
}

/// The strict isomorphism exchanging the cores: `Q1 ↦ Q0` placed `n − 2`
/// positions lower, `Q0 ↦ Q1`, with `p ↔ q`, `e0 ↔ e1`, `f0 ↔ f1`.
/// Applying it twice translates every position down by `n − 2`.
pub fn relabel<F: Field>(c: &TwistedComplex<F>) -> Result<TwistedComplex<F>> {
    let cat = c.category();
    if !cat.params().is_spherical() {
        return Err(Error::PreconditionViolated("relabelling needs two spherical cores".into()));
    }
    let n = cat.n();
    let summands = c
        .summands()
        .iter()
        .map(|s| if s.vertex == 1 { Summand::new(0, s.position - (n - 2)) } else { Summand::new(1, s.position) })
        .collect();
    let swap = |id| match id {
        E0 => E1,
        E1 => E0,
        P => Q,
        Q => P,
        F0 => F1,
        F1 => F0,
        _ => unreachable!("spherical category has six basis elements"),
    };
    let entries = c
        .entries()
        .map(|(a, b, m)| {
            let terms = m.terms().iter().map(|(id, x)| (swap(*id), x.clone())).collect();
            (a, b, Morphism::from_terms(c.field(), terms))
        })
        .collect();
    Ok(TwistedComplex::from_parts(cat, summands, entries))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    /// `V_0 ≠ 0`, top `n − 1` columns of `V` empty: inverse twist in Q0.
    A1,
    /// `V_0 ≠ 0`, bottom `n − 1` columns of `U` empty: twist in Q1.
    A2,
    /// `V_0 = 0`, relabelled A1: inverse twist in Q1.
    B1,
    /// `V_0 = 0`, relabelled A2: twist in Q0.
    B2,
    /// Top index at most `n − 2`, one of the two case letters lowered complexity.
    ABase,
    BBase,
    /// Top index at most `n − 2`, found by bounded word search.
    BaseSearch,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseTag::A1 => "A1",
            CaseTag::A2 => "A2",
            CaseTag::B1 => "B1",
            CaseTag::B2 => "B2",
            CaseTag::ABase => "A-base",
            CaseTag::BBase => "B-base",
            CaseTag::BaseSearch => "base-search",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Step<F: Field> {
    pub word: BraidWord,
    pub case: CaseTag,
    pub cx_before: i64,
    pub cx_after: i64,
    /// Result of the step, positions as in the input.
    pub complex: TwistedComplex<F>,
}

/// Rank of the `p`-labelled block from `U_i` to `V_i`; positions relative to `offset`.
fn p_block_rank<F: Field>(c: &TwistedComplex<F>, offset: i64, i: i64) -> (usize, usize, usize) {
    let pos = offset + i;
    let us: Vec<usize> = (0..c.len()).filter(|&k| c.summands()[k] == Summand::new(0, pos)).collect();
    let vs: Vec<usize> = (0..c.len()).filter(|&k| c.summands()[k] == Summand::new(1, pos)).collect();
    let field = c.field();
    let mut m = Matrix::zeros(field, us.len(), vs.len());
    for (r, &a) in us.iter().enumerate() {
        for (s, &b) in vs.iter().enumerate() {
            if let Some(x) = c.entry(a, b).coeff(P) {
                m.set(r, s, x.clone());
            }
        }
    }
    (us.len(), vs.len(), m.rank())
}

/// Case A consistency from admissibility: `U_i → V_i` injective near the
/// bottom and `U_{N−i} → V_{N−i}` surjective near the top.
fn case_a_structure<F: Field>(c: &TwistedComplex<F>, r: &ComplexityReport) -> Result<()> {
    let n = c.category().n();
    for i in 0..=(n - 2).min(r.top - 1) {
        let (nu, _, rank) = p_block_rank(c, r.offset, i);
        if rank < nu {
            return Err(Error::StructuralCheck(format!("U_{i} -> V_{i} is not injective (rank {rank}, dim U {nu})")));
        }
    }
    for i in 0..=(n - 2).min(r.top - 1) {
        let j = r.top - i;
        let (_, nv, rank) = p_block_rank(c, r.offset, j);
        if rank < nv {
            return Err(Error::StructuralCheck(format!("U_{j} -> V_{j} is not surjective (rank {rank}, dim V {nv})")));
        }
    }
    Ok(())
}

enum Choice {
    Letter(BraidLetter, CaseTag),
    /// Top index at most `n − 2`; no case condition applies.
    Base,
}

/// Case A analysis: `V_0 ≠ 0` assumed.
fn case_a_choice<F: Field>(c: &TwistedComplex<F>, r: &ComplexityReport) -> Result<Choice> {
    let n = c.category().n();
    case_a_structure(c, r)?;
    let top_v_empty = (0..=n - 2).all(|i| r.v(r.top - i) == 0);
    let bottom_u_empty = (0..=n - 2).all(|j| r.u(j) == 0);
    if top_v_empty {
        Ok(Choice::Letter(BraidLetter::new(0, -1), CaseTag::A1))
    } else if bottom_u_empty {
        Ok(Choice::Letter(BraidLetter::new(1, 1), CaseTag::A2))
    } else if r.top <= n - 2 {
        Ok(Choice::Base)
    } else {
        Err(Error::StructuralCheck(format!(
            "case A dead end: neither the top {} columns of V nor the bottom {} columns of U are empty (N = {})",
            n - 1,
            n - 1,
            r.top
        )))
    }
}

fn swap_vertex(l: BraidLetter) -> BraidLetter {
    BraidLetter::new(1 - l.vertex, l.power)
}

fn try_word<F: Field>(c: &TwistedComplex<F>, w: &BraidWord, cx: i64) -> Result<Option<(TwistedComplex<F>, i64)>> {
    let out = apply_braid(w, c)?;
    let after = complexity(&out).cx;
    Ok((after < cx).then_some((out, after)))
}

/// One complexity-lowering move. The input must be admissible with `cx > 0`.
pub fn reduction_step<F: Field>(c: &TwistedComplex<F>) -> Result<Step<F>> {
    let adm = admissible(c)?;
    if !adm.admissible {
        return Err(Error::NotAdmissible(adm.negative_degrees));
    }
    reduction_step_unchecked(c)
}

fn reduction_step_unchecked<F: Field>(c: &TwistedComplex<F>) -> Result<Step<F>> {
    let c = c.minimize();
    let r = complexity(&c);
    if r.cx == 0 {
        return Err(Error::PreconditionViolated("complexity is already 0".into()));
    }
    if !first_step_holds(&r) {
        return Err(Error::StructuralCheck(format!(
            "V_0 {} 0 but U_N {} 0 (N = {})",
            if r.v(0) > 0 { "!=" } else { "=" },
            if r.u(r.top) > 0 { "!=" } else { "=" },
            r.top
        )));
    }
    let case_a = r.v(0) > 0;
    let choice = if case_a {
        case_a_choice(&c, &r)?
    } else {
        let w = relabel(&c)?;
        let wr = complexity(&w);
        if wr.v(0) == 0 {
            return Err(Error::StructuralCheck("relabelled complex is not in case A".into()));
        }
        match case_a_choice(&w, &wr)? {
            Choice::Letter(l, CaseTag::A1) => Choice::Letter(swap_vertex(l), CaseTag::B1),
            Choice::Letter(l, _) => Choice::Letter(swap_vertex(l), CaseTag::B2),
            Choice::Base => Choice::Base,
        }
    };
    let (word, case, out, after) = match choice {
        Choice::Letter(l, case) => {
            let w = BraidWord(vec![l]);
            let out = apply_letter(l, &c)?;
            let after = complexity(&out).cx;
            if after >= r.cx {
                return Err(Error::ComplexityNotReduced { case: case.to_string(), before: r.cx, after });
            }
            (w, case, out, after)
        }
        Choice::Base => {
            let (l1, l2, tag) = if case_a {
                (BraidLetter::new(0, -1), BraidLetter::new(1, 1), CaseTag::ABase)
            } else {
                (BraidLetter::new(1, -1), BraidLetter::new(0, 1), CaseTag::BBase)
            };
            let mut found = None;
            for l in [l1, l2] {
                let w = BraidWord(vec![l]);
                if let Some((out, after)) = try_word(&c, &w, r.cx)? {
                    found = Some((w, tag, out, after));
                    break;
                }
            }
            if found.is_none() {
                'search: for len in 1..=BASE_SEARCH_DEPTH {
                    for w in words_of_length(len) {
                        if let Some((out, after)) = try_word(&c, &w, r.cx)? {
                            found = Some((w, CaseTag::BaseSearch, out, after));
                            break 'search;
                        }
                    }
                }
            }
            found.ok_or_else(|| {
                Error::SearchExhausted(format!(
                    "no word of length <= {BASE_SEARCH_DEPTH} lowers complexity {}",
                    r.cx
                ))
            })?
        }
    };
    Ok(Step { word, case, cx_before: r.cx, cx_after: after, complex: out })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub word: BraidWord,
    pub case: CaseTag,
    pub cx_before: i64,
    pub cx_after: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub word: BraidWord,
    pub target_vertex: Vertex,
    /// The result is `multiplicity` copies of `Q_target[shift]`.
    pub shift: i64,
    pub multiplicity: usize,
    pub trace: Vec<TraceStep>,
}

/// Reduces an admissible complex to copies of one shifted core and re-verifies
/// the resulting certificate against the input.
pub fn normalize<F: Field>(c: &TwistedComplex<F>) -> Result<Certificate> {
    let adm = admissible(c)?;
    if !adm.admissible {
        return Err(Error::NotAdmissible(adm.negative_degrees));
    }
    let mut cur = c.minimize();
    let limit = complexity(&cur).cx as usize + 1;
    let mut word = BraidWord::default();
    let mut trace = Vec::new();
    for _ in 0..=limit {
        let r = complexity(&cur);
        if r.cx == 0 {
            let cert = match cur.summands().first() {
                None => Certificate { word, target_vertex: 0, shift: 0, multiplicity: 0, trace },
                Some(s) => Certificate {
                    word,
                    target_vertex: s.vertex,
                    shift: -s.position,
                    multiplicity: cur.len(),
                    trace,
                },
            };
            verify_certificate(c, &cert)?;
            return Ok(cert);
        }
        let step = reduction_step_unchecked(&cur)?;
        word = word.then(&step.word);
        trace.push(TraceStep {
            word: step.word,
            case: step.case,
            cx_before: step.cx_before,
            cx_after: step.cx_after,
        });
        cur = step.complex;
    }
    Err(Error::IterationLimit(limit))
}

/// The core sum a certificate claims the input is carried to.
pub fn certificate_target<F: Field>(cat: &std::sync::Arc<crate::category::Category<F>>, cert: &Certificate) -> Result<TwistedComplex<F>> {
    let core = TwistedComplex::core(cat, cert.target_vertex, -cert.shift);
    TwistedComplex::sum_all(cat, &vec![core; cert.multiplicity])
}

pub fn verify_certificate<F: Field>(c: &TwistedComplex<F>, cert: &Certificate) -> Result<()> {
    for (k, t) in cert.trace.iter().enumerate() {
        if t.cx_after >= t.cx_before {
            return Err(Error::CertificateRejected(format!(
                "trace step {k} does not lower complexity ({} -> {})",
                t.cx_before, t.cx_after
            )));
        }
    }
    let image = apply_braid(&cert.word, c)?;
    let target = certificate_target(c.category(), cert)?;
    match equivalent(&image, &target)? {
        Verdict::Yes => Ok(()),
        v => Err(Error::CertificateRejected(format!(
            "image of the word is not equivalent to the claimed core sum (verdict {v})"
        ))),
    }
}

/// Positions and vertices of the occupied slots, for diagnostics.
pub fn slot_profile<F: Field>(c: &TwistedComplex<F>) -> BTreeMap<(i64, Vertex), usize> {
    let mut out = BTreeMap::new();
    for s in c.summands() {
        *out.entry((s.position, s.vertex)).or_insert(0) += 1;
    }
    out
}

/// Whether every differential entry of a complex is free of identities.
pub fn is_minimal<F: Field>(c: &TwistedComplex<F>) -> bool {
    let cat = c.category();
    c.entries().all(|(_, _, m)| m.terms().iter().all(|(id, _)| cat.element(*id).kind != BasisKind::Unit))
}
