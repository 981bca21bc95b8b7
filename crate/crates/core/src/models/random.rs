//! Random Hermitian generators, states and unitary families for audits.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::matkernel::{CMatrix, Hermitian};
use crate::scalar::{Real, C};

use super::{unitary_family, StateVector, UnitaryFamily};

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C::new(T::lit(re), T::lit(im))
}

/// GUE-distributed `n×n` Hermitian matrix, `(A + A†)/2` with complex normal `A`.
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Hermitian<T> {
    let a = CMatrix::from_fn(n, n, |_, _| gaussian::<T, R>(rng));
    Hermitian::new(a.add(&a.adjoint()).scale(C::new(T::lit(0.5), T::zero())))
        .expect("(A + A†)/2 is Hermitian")
}

/// Haar-uniform pure state of dimension `n ≥ 1`.
pub fn random_state<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> StateVector<T> {
    loop {
        let v: Vec<C<T>> = (0..n).map(|_| gaussian::<T, R>(rng)).collect();
        if let Ok(s) = StateVector::normalized(v) {
            return s;
        }
    }
}

/// Unitary family with `d` GUE generators acting on a random initial state.
pub fn random_unitary_family<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    d: usize,
) -> Result<UnitaryFamily<T>> {
    let gens = (0..d).map(|_| random_hermitian(rng, n)).collect();
    let psi0 = random_state(rng, n);
    unitary_family(gens, psi0)
}

/// Uniform point in `[−π, π)^d`.
pub fn random_angles<T: Real, R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<T> {
    (0..d)
        .map(|_| T::lit(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)))
        .collect()
}
