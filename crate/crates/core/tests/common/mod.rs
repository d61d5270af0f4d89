#![allow(dead_code)]

pub mod brute;

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use recollement_core::dg::{DgAlgebra, DgModule};
use recollement_core::kernel::{smith, Domain, GradedModule, Matrix, Scalar};

/// A random complex of at most three terms over ℤ (some draws over ℤ[1/p]
/// when `invert` is set). `d² = 0` is forced by drawing the second
/// differential from the left kernel of the first.
pub fn random_complex(rng: &mut ChaCha8Rng, alg: &Arc<DgAlgebra>, invert: Option<u64>) -> Arc<DgModule> {
    let dom = match invert {
        Some(p) if rng.gen_bool(0.3) => Domain::localized([p].into()),
        _ => Domain::Integer,
    };
    let terms = rng.gen_range(1..=3usize);
    let ranks: Vec<usize> = (0..terms).map(|_| rng.gen_range(1..=2)).collect();
    let base = rng.gen_range(-2..=1);
    let entry = |rng: &mut ChaCha8Rng| [0, 0, 1, -1, 2, 3, 4, 5, 6, -2][rng.gen_range(0..10)];
    let mut diffs: Vec<Matrix> = Vec::new();
    for t in 0..terms.saturating_sub(1) {
        let (src, tgt) = (ranks[t], ranks[t + 1]);
        let mut m = Matrix::zeros(tgt, src);
        match diffs.last() {
            None => {
                for r in 0..tgt {
                    for c in 0..src {
                        m.set(r, c, Scalar::from_i64(entry(rng)));
                    }
                }
            }
            Some(prev) => {
                // rows of m annihilate the image of prev
                let left_kernel = smith(&Domain::Integer, &prev.transpose()).kernel();
                for r in 0..tgt {
                    for v in &left_kernel {
                        let k = Scalar::from_i64(entry(rng));
                        for (&c, x) in v {
                            m.add_to(&Domain::Integer, r, c, &Domain::Integer.mul(&k, x));
                        }
                    }
                }
            }
        }
        diffs.push(m);
    }
    let degrees: Vec<i32> = ranks.iter().enumerate().flat_map(|(t, &r)| vec![base + t as i32; r]).collect();
    let labels = (0..degrees.len()).map(|i| format!("x{i}")).collect();
    let n = degrees.len();
    let mut d = Matrix::zeros(n, n);
    let offsets: Vec<usize> = ranks
        .iter()
        .scan(0, |acc, &r| {
            let o = *acc;
            *acc += r;
            Some(o)
        })
        .collect();
    for (t, m) in diffs.iter().enumerate() {
        for (r, c, x) in m.entries() {
            d.set(offsets[t + 1] + r, offsets[t] + c, x.clone());
        }
    }
    let module = GradedModule::new(dom, degrees, labels);
    Arc::new(DgModule::over_ground("X", alg.clone(), module, d).unwrap())
}
