//! Product-of-quadratics instance families.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, SparseSymMatrix};
use crate::model::{build_product, EdgeList, Instance, ProductFactor};
use crate::rng::NormalRng;

/// `max −(zᵀD₁z + ω₁)(wᵀD₂w + ω₂)` over `z, w ∈ {0,1}ˡ`, with `Dᵢ = Mᵢ/‖Mᵢ‖`
/// for symmetrized standard-normal `Mᵢ` and standard-normal `ωᵢ`. Draw
/// order: all of `M₁` (row-major), all of `M₂`, then `ω₁`, `ω₂`.
pub fn gen_product_random(l: usize, seed: u64) -> Result<Instance> {
    if l == 0 {
        return Err(Error::InvalidConfig("l must be positive"));
    }
    let mut rng = NormalRng::seed_from_u64(seed);
    let draw_sym = |rng: &mut NormalRng| {
        let raw: Vec<f64> = (0..l * l).map(|_| rng.normal()).collect();
        let sym: Vec<f64> = (0..l * l)
            .map(|k| 0.5 * (raw[k] + raw[(k % l) * l + k / l]))
            .collect();
        SparseSymMatrix::from_dense(l, &sym)
    };
    let m1 = draw_sym(&mut rng)?;
    let m2 = draw_sym(&mut rng)?;
    let omegas = [rng.normal(), rng.normal()];
    let factors = [m1, m2]
        .into_iter()
        .zip(omegas)
        .map(|(m, omega)| {
            let norm = spectral_norm(&m);
            let d = if norm > 0.0 { m.scaled(1.0 / norm) } else { m };
            let q = d.scaled(0.25);
            let mut row_sums = vec![0.0; l];
            for (i, _, v) in q.iter() {
                row_sums[i] += v;
            }
            let c: Vec<f64> = row_sums.iter().map(|s| 2.0 * s).collect();
            let a = row_sums.iter().sum::<f64>() + omega;
            ProductFactor { q, c, a }
        })
        .collect();
    build_product(factors)
}

/// `max cut₁(x)·cut₂(y)` with both cuts measured on spectrally normalized
/// weights: `Q₁ = −¼W̄₁`, `a₁ = ¼eᵀW̄₁e`, `Q₂ = ¼W̄₂`, `a₂ = −¼eᵀW̄₂e`.
pub fn gen_product_maxcut(w1: &EdgeList, w2: &EdgeList) -> Result<Instance> {
    if w1.n != w2.n {
        return Err(Error::DimensionMismatch {
            expected: w1.n,
            found: w2.n,
        });
    }
    let n = w1.n;
    let factor = |w: &EdgeList, sign: f64| -> Result<ProductFactor> {
        let w = w.weight_matrix()?;
        let norm = spectral_norm(&w);
        let wbar = if norm > 0.0 {
            w.scaled(1.0 / norm)
        } else {
            SparseSymMatrix::zeros(n)
        };
        let total: f64 = wbar.iter().map(|(_, _, v)| v).sum();
        Ok(ProductFactor {
            q: wbar.scaled(-0.25 * sign),
            c: vec![0.0; n],
            a: 0.25 * sign * total,
        })
    };
    build_product(vec![factor(w1, 1.0)?, factor(w2, -1.0)?])
}
