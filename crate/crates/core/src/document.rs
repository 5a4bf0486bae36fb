//! JSON interchange format for twisted complexes.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::category::{Category, CategoryParams, Morphism, Vertex};
use crate::complex::{Summand, TwistedComplex};
use crate::equiv::require_valid;
use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummandDoc {
    pub vertex: Vertex,
    pub position: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDoc {
    pub from: usize,
    pub to: usize,
    pub basis: String,
    /// Decimal string, `num/den` allowed.
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDocument {
    pub n: i64,
    pub char: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub betti0: Option<Vec<u32>>,
    pub summands: Vec<SummandDoc>,
    #[serde(default)]
    pub differential: Vec<EntryDoc>,
}

impl ComplexDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("schema error at line {} column {}: {e}", e.line(), e.column())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn params(&self) -> CategoryParams {
        CategoryParams { n: self.n, betti0: self.betti0.clone(), field: FieldSpec::new(self.char) }
    }

    /// Builds and validates the complex over `cat`, whose parameters must match the document.
    pub fn build<F: Field>(&self, cat: &Arc<Category<F>>) -> Result<TwistedComplex<F>> {
        if cat.params() != &self.params() {
            return Err(Error::InvalidParams(format!(
                "document declares n={} char={} betti0={:?}, category has n={} char={} betti0={:?}",
                self.n,
                self.char,
                self.betti0,
                cat.n(),
                cat.params().field.characteristic,
                cat.params().betti0
            )));
        }
        let field = cat.field();
        let mut summands = Vec::with_capacity(self.summands.len());
        for (i, s) in self.summands.iter().enumerate() {
            if s.vertex > 1 {
                return Err(Error::Parse(format!("summands[{i}]: vertex {} is not 0 or 1", s.vertex)));
            }
            summands.push(Summand::new(s.vertex, s.position));
        }
        let m = summands.len();
        let mut entries: Vec<(usize, usize, Morphism<F>)> = Vec::new();
        for (k, e) in self.differential.iter().enumerate() {
            if e.from >= m || e.to >= m {
                return Err(Error::Parse(format!(
                    "differential[{k}]: entry {}->{} refers to a summand outside 0..{m}",
                    e.from, e.to
                )));
            }
            let id = cat
                .lookup(&e.basis)
                .ok_or_else(|| Error::Parse(format!("differential[{k}]: unknown basis element {:?}", e.basis)))?;
            let x = field
                .parse(&e.coeff)
                .map_err(|err| Error::Parse(format!("differential[{k}]: coefficient {:?}: {err}", e.coeff)))?;
            entries.push((e.from, e.to, Morphism::basis(field, id, x)));
        }
        let c = TwistedComplex::from_parts(cat, summands, entries);
        require_valid(&c)?;
        Ok(c)
    }

    /// Canonical document: entries sorted by (from, to, basis id), zero terms dropped.
    pub fn from_complex<F: Field>(c: &TwistedComplex<F>) -> Self {
        let cat = c.category();
        let params = cat.params();
        let summands = c.summands().iter().map(|s| SummandDoc { vertex: s.vertex, position: s.position }).collect();
        let mut differential = Vec::new();
        for (a, b, x) in c.entries() {
            for (id, coeff) in x.terms() {
                differential.push(EntryDoc {
                    from: a,
                    to: b,
                    basis: cat.element(*id).name.clone(),
                    coeff: c.field().render(coeff),
                });
            }
        }
        Self { n: params.n, char: params.field.characteristic, betti0: params.betti0.clone(), summands, differential }
    }
}

/// Parses and validates a document against `cat`.
pub fn parse_complex<F: Field>(text: &str, cat: &Arc<Category<F>>) -> Result<TwistedComplex<F>> {
    ComplexDocument::from_json(text)?.build(cat)
}

pub fn serialize_complex<F: Field>(c: &TwistedComplex<F>) -> String {
    ComplexDocument::from_complex(c).to_json()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn rational_cat(n: i64) -> Arc<Category<Rationals>> {
        Arc::new(Category::new(Rationals, CategoryParams::sphere(n, FieldSpec::rationals())).unwrap())
    }

    #[test]
    fn minimal_document() {
        let cat = rational_cat(4);
        let c = parse_complex(r#"{"n":4,"char":0,"summands":[{"vertex":0,"position":0}],"differential":[]}"#, &cat).unwrap();
        assert_eq!(c, TwistedComplex::core(&cat, 0, 0));
    }

    #[test]
    fn obstruction_names_the_slot() {
        // V_1 -q-> U_0 -p-> V_0 at n = 3: p∘q = f1 is nonzero
        let cat = rational_cat(3);
        let text = r#"{"n":3,"char":0,
            "summands":[{"vertex":1,"position":1},{"vertex":0,"position":0},{"vertex":1,"position":0}],
            "differential":[{"from":0,"to":1,"basis":"q","coeff":"1"},{"from":1,"to":2,"basis":"p","coeff":"1"}]}"#;
        let err = parse_complex(text, &cat).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::InvalidComplex(_)));
        assert!(msg.contains("(V_1 -> V_0)"), "{msg}");
    }

    #[test]
    fn located_schema_errors() {
        let cat = rational_cat(3);
        let bad_basis = r#"{"n":3,"char":0,"summands":[{"vertex":0,"position":0},{"vertex":1,"position":0}],
            "differential":[{"from":0,"to":1,"basis":"z","coeff":"1"}]}"#;
        assert!(parse_complex(bad_basis, &cat).unwrap_err().to_string().contains("differential[0]"));
        let bad_vertex = r#"{"n":3,"char":0,"summands":[{"vertex":2,"position":0}]}"#;
        assert!(parse_complex(bad_vertex, &cat).unwrap_err().to_string().contains("summands[0]"));
        let wrong_n = r#"{"n":4,"char":0,"summands":[]}"#;
        assert!(matches!(parse_complex(wrong_n, &cat), Err(Error::InvalidParams(_))));
        assert!(matches!(parse_complex("{", &cat), Err(Error::Parse(_))));
    }

    #[test]
    fn round_trip_is_canonical() {
        let field = PrimeField::new(7).unwrap();
        let cat = Arc::new(Category::new(field, CategoryParams::sphere(3, FieldSpec::new(7))).unwrap());
        let text = r#"{"n":3,"char":7,
            "summands":[{"vertex":0,"position":0},{"vertex":1,"position":0}],
            "differential":[{"from":0,"to":1,"basis":"p","coeff":"3"},{"from":0,"to":1,"basis":"p","coeff":"10/2"}]}"#;
        let c = parse_complex(text, &cat).unwrap();
        let canon = serialize_complex(&c);
        assert_eq!(parse_complex(&canon, &cat).unwrap(), c);
        assert_eq!(serialize_complex(&parse_complex(&canon, &cat).unwrap()), canon);
        assert_eq!(ComplexDocument::from_json(&canon).unwrap().differential[0].coeff, "1");
    }
}
