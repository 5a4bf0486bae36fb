//! Cover specialization, indecomposable splitting, fibre ranks, and the
//! Betti-number feasibility inequality for twists along a non-sphere.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::category::{BasisKind, Morphism, Vertex};
use crate::complex::TwistedComplex;
use crate::equiv::require_valid;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::hom::{hf_ranks, total_rank};
use crate::matrix::Matrix;
use crate::normalizer::admissible;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverIndex {
    Finite(u64),
    Infinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverSpec {
    pub covered_vertex: Vertex,
    pub index: CoverIndex,
}

impl CoverSpec {
    /// The fundamental class pulls back to zero when the characteristic
    /// divides a finite index; an infinite cover kills it in any characteristic.
    pub fn check(&self, characteristic: u64) -> Result<()> {
        match self.index {
            CoverIndex::Infinite => Ok(()),
            CoverIndex::Finite(0) => Err(Error::PreconditionViolated("cover index must be positive".into())),
            CoverIndex::Finite(index) if characteristic != 0 && index % characteristic == 0 => Ok(()),
            CoverIndex::Finite(index) => Err(Error::CoverCharacteristic { index, characteristic }),
        }
    }
}

/// Minimizes, then deletes every fundamental-class arrow on the covered vertex.
pub fn specialize<F: Field>(c: &TwistedComplex<F>, cover: &CoverSpec) -> Result<TwistedComplex<F>> {
    require_valid(c)?;
    cover.check(c.field().characteristic())?;
    let cat = c.category();
    let killed = cat.fundamental(cover.covered_vertex);
    let m = c.minimize();
    let entries = m
        .entries()
        .map(|(a, b, x)| {
            let terms = x.terms().iter().filter(|(id, _)| *id != killed).cloned().collect();
            (a, b, Morphism::from_terms(c.field(), terms))
        })
        .filter(|(_, _, x)| !x.is_zero())
        .collect();
    let out = TwistedComplex::from_parts(cat, m.summands().to_vec(), entries);
    require_valid(&out)?;
    Ok(out)
}

/// Minimal model split along connected components of the support graph.
pub fn decompose<F: Field>(c: &TwistedComplex<F>) -> Result<Vec<TwistedComplex<F>>> {
    require_valid(c)?;
    let m = c.minimize();
    let len = m.len();
    let mut parent: Vec<usize> = (0..len).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for (a, b, _) in m.entries() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..len {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    Ok(groups.into_values().map(|idx| subcomplex(&m, &idx)).collect())
}

/// Restriction to the given summands (in the given order).
pub fn subcomplex<F: Field>(c: &TwistedComplex<F>, idx: &[usize]) -> TwistedComplex<F> {
    let summands = idx.iter().map(|&i| c.summands()[i]).collect();
    let mut entries = Vec::new();
    for (na, &a) in idx.iter().enumerate() {
        for (nb, &b) in idx.iter().enumerate() {
            let x = c.entry(a, b);
            if !x.is_zero() {
                entries.push((na, nb, x.clone()));
            }
        }
    }
    TwistedComplex::from_parts(c.category(), summands, entries)
}

/// Cohomology of the complex with one generator per vertex-`i` summand in
/// degree equal to its position, differential given by identity arrows only.
pub fn fibre_rank<F: Field>(c: &TwistedComplex<F>, i: Vertex) -> Result<BTreeMap<i64, usize>> {
    require_valid(c)?;
    let cat = c.category();
    let unit = cat.unit(i);
    let gens: Vec<usize> = (0..c.len()).filter(|&k| c.summands()[k].vertex == i).collect();
    let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for &g in &gens {
        by_degree.entry(c.summands()[g].position).or_default().push(g);
    }
    let field = c.field();
    let diff = |d: i64| -> Matrix<F> {
        let src = by_degree.get(&d).cloned().unwrap_or_default();
        let tgt = by_degree.get(&(d + 1)).cloned().unwrap_or_default();
        let mut m = Matrix::zeros(field, tgt.len(), src.len());
        for (col, &a) in src.iter().enumerate() {
            for (row, &b) in tgt.iter().enumerate() {
                if let Some(x) = c.entry(a, b).coeff(unit) {
                    m.set(row, col, x.clone());
                }
            }
        }
        m
    };
    let mut out = BTreeMap::new();
    for (&d, g) in &by_degree {
        let r = g.len() - diff(d).rank() - diff(d - 1).rank();
        if r > 0 {
            out.insert(d, r);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiVector(pub Vec<u32>);

impl BettiVector {
    pub fn new(b: Vec<u32>) -> Result<Self> {
        if b.len() < 2 || b[0] != 1 || b[b.len() - 1] != 1 {
            return Err(Error::InvalidParams(format!("betti vector {b:?} must start and end with 1")));
        }
        Ok(Self(b))
    }

    pub fn n(&self) -> usize {
        self.0.len() - 1
    }

    /// Sum of the Betti numbers strictly between degree 0 and degree n.
    pub fn beta(&self) -> u64 {
        self.0[1..self.n()].iter().map(|&x| x as u64).sum()
    }
}

impl FromStr for BettiVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let b = s
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad betti entry {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(b)
    }
}

impl fmt::Display for BettiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

pub const SPHERE_ANNOTATION: &str = "homology sphere: the spherical twist exists";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub betti: BettiVector,
    pub beta: u64,
    pub feasible: bool,
    /// Smallest `dim V >= 2` with `dim V * (beta - 2) <= -2`, for `beta > 0`.
    pub min_dim_v: Option<u64>,
    /// `dim V - 1 - beta` at `min_dim_v`.
    pub boundary_rank: Option<i64>,
    pub annotation: Option<String>,
}

/// Rank of the boundary slots as a function of the total multiplicity.
pub fn boundary_rank(dim_v: u64, beta: u64) -> i64 {
    dim_v as i64 - 1 - beta as i64
}

pub fn truncation_feasibility(betti: &BettiVector) -> FeasibilityReport {
    let beta = betti.beta();
    let slack = beta as i64 - 2;
    let satisfies = |dim_v: u64| dim_v as i64 * slack <= -2;
    if beta == 0 {
        return FeasibilityReport {
            betti: betti.clone(),
            beta,
            feasible: true,
            min_dim_v: None,
            boundary_rank: None,
            annotation: Some(SPHERE_ANNOTATION.into()),
        };
    }
    // the left side is nondecreasing in dim V once beta >= 2, so dim V = 2 decides
    let min_dim_v = if slack < 0 { (2..).find(|&d| satisfies(d)) } else { None };
    FeasibilityReport {
        betti: betti.clone(),
        beta,
        feasible: min_dim_v.is_some(),
        min_dim_v,
        boundary_rank: min_dim_v.map(|d| boundary_rank(d, beta)),
        annotation: None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimCheck {
    pub claim: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryRankReport {
    /// Ranks of `HF(c, Q0)`.
    pub hf_against_q0: BTreeMap<i64, usize>,
    /// Ranks of `HF(C, Q0)` for the part `C` of `c` built from Q0 alone.
    pub hf_core_part: BTreeMap<i64, usize>,
    pub outer_multiplicities: (usize, usize),
    pub claims: Vec<ClaimCheck>,
}

impl BoundaryRankReport {
    pub fn pass(&self) -> bool {
        self.claims.iter().all(|c| c.pass)
    }
}

pub const CLAIM_RANK_TWO: &str = "hf-rank-two";
pub const CLAIM_OUTER_ONE: &str = "outer-multiplicities-one";

/// Checks the rank constraints on a complex made of copies of a non-spherical
/// Q0 and a single sphere Q1.
pub fn boundary_rank_check<F: Field>(c: &TwistedComplex<F>) -> Result<BoundaryRankReport> {
    let cat = c.category();
    let spheres: Vec<usize> = (0..c.len()).filter(|&k| c.summands()[k].vertex == 1).collect();
    if spheres.len() != 1 {
        return Err(Error::PreconditionViolated(format!(
            "expected exactly one Q1 summand, found {}",
            spheres.len()
        )));
    }
    let adm = admissible(c)?;
    if !adm.admissible {
        return Err(Error::NotAdmissible(adm.negative_degrees));
    }
    let core_idx: Vec<usize> = (0..c.len()).filter(|&k| c.summands()[k].vertex == 0).collect();
    let core_part = subcomplex(c, &core_idx);
    if !core_part.is_valid() {
        return Err(Error::PreconditionViolated(
            "removing the Q1 summand does not leave a twisted complex".into(),
        ));
    }
    let q0 = TwistedComplex::core(cat, 0, 0);
    let hf_against_q0 = hf_ranks(c, &q0)?;
    let hf_core_part = hf_ranks(&core_part, &q0)?;
    let rank = total_rank(&hf_core_part);

    let mut per_position: BTreeMap<i64, usize> = BTreeMap::new();
    for s in core_part.summands() {
        *per_position.entry(s.position).or_default() += 1;
    }
    let outer = match (per_position.first_key_value(), per_position.last_key_value()) {
        (Some((_, lo)), Some((_, hi))) => (*lo, *hi),
        _ => (0, 0),
    };
    let claims = vec![
        ClaimCheck {
            claim: CLAIM_RANK_TWO.into(),
            pass: rank == 2,
            detail: format!("total rank of HF(C, Q0) is {rank}"),
        },
        ClaimCheck {
            claim: CLAIM_OUTER_ONE.into(),
            pass: outer == (1, 1),
            detail: format!("outermost Q0 multiplicities are {} and {}", outer.0, outer.1),
        },
    ];
    Ok(BoundaryRankReport { hf_against_q0, hf_core_part, outer_multiplicities: outer, claims })
}

/// Whether any differential entry carries a fundamental class on `v`.
pub fn has_fundamental_arrows<F: Field>(c: &TwistedComplex<F>, v: Vertex) -> bool {
    let cat = c.category();
    c.entries().any(|(_, _, x)| {
        x.terms().iter().any(|(id, _)| cat.element(*id).kind == BasisKind::Fundamental && cat.element(*id).source == v)
    })
}
