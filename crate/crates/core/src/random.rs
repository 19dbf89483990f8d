//! Seeded random states, nodes and collective maps.

use crate::symstate::{CollectiveMap, NodeState, SymmetricState};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

pub type SeededRng = ChaCha20Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Independent stream for the `index`-th use of a base seed.
pub fn rng_stream(seed: u64, index: u64) -> SeededRng {
    let mut r = ChaCha20Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Unit-norm state with independent complex-normal Dicke amplitudes.
pub fn random_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> SymmetricState {
    loop {
        let v: Vec<Complex64> = (0..=n_qubits).map(|_| complex_normal(rng)).collect();
        let s = SymmetricState::new(v).expect("finite amplitudes");
        if let Ok((unit, _)) = s.rescaled() {
            return unit;
        }
    }
}

/// Uniformly distributed point on the Bloch sphere.
pub fn random_node<R: Rng + ?Sized>(rng: &mut R) -> NodeState {
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    NodeState::new(z.acos(), phi).expect("angles in range")
}

/// Haar-random element of SU(2).
pub fn haar_su2<R: Rng + ?Sized>(rng: &mut R) -> CollectiveMap {
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let a = Complex64::new(q[0] / n, q[1] / n);
    let b = Complex64::new(q[2] / n, q[3] / n);
    CollectiveMap::unitary(a, b, -b.conj(), a.conj()).expect("unit quaternion")
}

/// Random unit-determinant map whose entries all have modulus at most
/// `bound`. Samples `a, b, d` in the disc and solves for `f`.
pub fn random_special<R: Rng + ?Sized>(bound: f64, rng: &mut R) -> CollectiveMap {
    let disc = |rng: &mut R| loop {
        let z = Complex64::new(rng.random_range(-bound..bound), rng.random_range(-bound..bound));
        if z.norm() <= bound {
            return z;
        }
    };
    loop {
        let a = disc(rng);
        let b = disc(rng);
        let d = disc(rng);
        if a.norm() < 0.1 {
            continue;
        }
        let f = (Complex64::new(1.0, 0.0) + b * d) / a;
        if f.norm() <= bound {
            if let Ok(g) = CollectiveMap::special(a, b, d, f) {
                return g;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn states_are_normalized_and_reproducible() {
        let s1 = random_state(6, &mut rng(11));
        let s2 = random_state(6, &mut rng(11));
        assert_eq!(s1, s2);
        assert!((s1.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn maps_have_the_declared_shape() {
        let mut r = rng(5);
        for _ in 0..50 {
            let u = haar_su2(&mut r);
            assert!(u.is_unitary(1e-12) && u.is_special(1e-12));
            let g = random_special(2.0, &mut r);
            assert!(g.is_special(1e-12));
            assert!(g.matrix().iter().flatten().all(|z| z.norm() <= 2.0));
        }
    }
}
