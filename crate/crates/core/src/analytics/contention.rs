//! Channel-access analysis: the probability that an AP holding a packet
//! wins its contention neighborhood in a slot.
//!
//! Contenders form a thinned PPP of intensity λ₂(1−π₀); each draws an
//! i.i.d. priority and wins iff it beats every contender within the
//! suppression radius. Conditioning on the number of contenders in the
//! region gives an exact enumeration; summing it in closed form gives the
//! familiar Matérn-style retention probability. Two closed-form variants
//! are kept: `Corrected` (the one that actually matches the enumeration)
//! and `Paper` (a legacy variant that differs by a dropped term and can
//! exceed 1 when contention is sparse).

use crate::config::FormulaMode;
use crate::scalar::Scalar;

/// Matérn-style retention probability (1 − e^{−m})/m for a contention mass
/// m ≥ 0, continuously extended to 1 at m = 0.
pub fn matern_retention<F: Scalar>(mass: F) -> F {
    if mass == F::zero() {
        return F::one();
    }
    -(-mass).exp_m1() / mass
}

/// Per-contender win probability, closed form. Returns the value and a
/// flag that is set when the formula exceeded 1 (possible only in `Paper`
/// mode, for small ν); the value is returned unclamped so callers can see
/// the overshoot.
pub fn access_probability_closed<F: Scalar>(pi0: F, nu: F, mode: FormulaMode) -> (F, bool) {
    let busy = F::one() - pi0;
    let value = match mode {
        FormulaMode::Corrected => matern_retention(nu * busy),
        FormulaMode::Paper => {
            if busy == F::zero() {
                // 1/(1−π₀) pole; report the (infinite) overshoot honestly.
                return (F::infinity(), true);
            }
            -(-nu).exp_m1() / (nu * busy)
        }
    };
    (value, value > F::one())
}

/// Per-contender win probability by direct enumeration: condition on the
/// number m of APs in the suppression region (Poisson with mean ν), then on
/// how many of them hold packets (binomial with success 1−π₀); the holder
/// of the best of i contending priorities wins with probability 1/i.
///
/// The Poisson sum is truncated once its remaining tail is below
/// `poisson_tail_tol`. This is the reference the closed forms are checked
/// against.
pub fn access_probability_enumerated<F: Scalar>(pi0: F, nu: F, poisson_tail_tol: F) -> F {
    if nu == F::zero() {
        return F::one();
    }
    let busy = F::one() - pi0;
    let mut poisson = (-nu).exp(); // P[m−1 = 0]
    let mut cum = poisson;
    let mut total = F::zero();
    let mut others = 0usize; // m − 1, the *other* APs in the region
    // The tail test cannot fire if e^{−ν} underflowed to zero; the count
    // cap keeps such degenerate inputs from spinning forever.
    let max_others = (10.0 * nu.as_f64() + 1000.0) as usize;
    loop {
        // Inner sum over i−1 = number of the `others` that are contending;
        // conditioned on joining them, this AP wins with probability 1/i.
        let inner = if busy == F::zero() {
            F::one()
        } else if pi0 == F::zero() {
            F::one() / F::of(others as f64 + 1.0)
        } else {
            let mut term = pi0.powi(others as i32); // all others idle
            let mut sum = term; // i = 1
            for j in 1..=others {
                // term ratio: C(others, j) (1−π₀)^j π₀^{others−j}
                term = term * busy / pi0 * F::of((others - j + 1) as f64) / F::of(j as f64);
                sum += term / F::of(j as f64 + 1.0);
            }
            sum
        };
        total += poisson * inner;
        if F::one() - cum < poisson_tail_tol || others >= max_others {
            break;
        }
        others += 1;
        poisson = poisson * nu / F::of(others as f64);
        cum += poisson;
    }
    total
}

/// The binomially weighted share sum Σ_{i=1}^{m} C(m−1, i−1) xⁱ / i that
/// underlies the closed forms above (x plays the role of the busy/idle
/// odds). Has the closed form ((x+1)^m − 1)/m; the legacy variant keeps
/// (x+1)^m/m, i.e. is larger by exactly 1/m.
pub fn weighted_share_series<F: Scalar>(m: usize, x: F) -> F {
    assert!(m >= 1);
    let mut sum = F::zero();
    let mut coeff = F::one(); // C(m−1, i−1) x^i, starting at i = 1
    let mut coeff_x = x;
    for i in 1..=m {
        sum += coeff_x / F::of(i as f64);
        // advance C(m−1, i−1) → C(m−1, i) and x^i → x^{i+1}
        coeff = coeff * F::of((m - i) as f64) / F::of(i as f64);
        coeff_x = coeff * x.powi(i as i32 + 1);
    }
    sum
}

/// Closed form of [`weighted_share_series`] in both variants.
pub fn weighted_share_closed<F: Scalar>(m: usize, x: F, mode: FormulaMode) -> F {
    let mf = F::of(m as f64);
    match mode {
        FormulaMode::Corrected => ((x + F::one()).powi(m as i32) - F::one()) / mf,
        FormulaMode::Paper => (x + F::one()).powi(m as i32) / mf,
    }
}
