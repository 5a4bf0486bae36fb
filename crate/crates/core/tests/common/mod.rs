#![allow(dead_code)]

use std::sync::Arc;

use plumbtw::{apply_braid, BraidLetter, BraidWord, Category, CategoryParams, FieldSpec, PrimeField, TwistedComplex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SEED: u64 = 20_240_601;

pub type Fp = PrimeField;

pub fn sphere_cat(n: i64) -> Arc<Category<Fp>> {
    let spec = FieldSpec::default();
    Arc::new(Category::new(PrimeField::new(spec.characteristic).unwrap(), CategoryParams::sphere(n, spec)).unwrap())
}

pub fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> BraidWord {
    let len = rng.gen_range(1..=max_len);
    BraidWord((0..len).map(|_| BraidLetter::ALL[rng.gen_range(0..4)]).collect())
}

pub struct OrbitSample {
    pub word: BraidWord,
    pub start: u8,
    pub complex: TwistedComplex<Fp>,
}

/// `count` complexes `apply_braid(w, Q_j)` with random words and starting core.
pub fn orbit_corpus(cat: &Arc<Category<Fp>>, count: usize, max_len: usize, seed: u64) -> Vec<OrbitSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ cat.n() as u64);
    (0..count)
        .map(|_| {
            let word = random_word(&mut rng, max_len);
            let start = rng.gen_range(0..2u8);
            let complex = apply_braid(&word, &TwistedComplex::core(cat, start, 0)).unwrap();
            OrbitSample { word, start, complex }
        })
        .collect()
}
