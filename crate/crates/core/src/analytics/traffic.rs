//! Per-cell traffic model: how a cell's user population and the per-user
//! request rate turn into demand on the serving AP's one-packet buffer.

use crate::scalar::Scalar;

/// Probability that at least one of `n` users requests in a slot when each
/// requests independently with probability `lambda`:
/// λₙ = 1 − (1−λ)ⁿ, computed via log1p/expm1 so that tiny rates and large
/// populations don't lose precision.
pub fn aggregate_request_probability<F: Scalar>(lambda: F, n: usize) -> F {
    if lambda <= F::zero() || n == 0 {
        return F::zero();
    }
    if lambda >= F::one() {
        return F::one();
    }
    // 1 − exp(n·ln(1−λ))
    -(F::of(n as f64) * (-lambda).ln_1p()).exp_m1()
}

/// Stationary per-slot service share an AP must win for its buffer to keep
/// up, given the cell's aggregate request probability and the buffer-empty
/// probability: the balance of a two-state (empty/holding) chain where a
/// holding AP empties with the service rate and an empty AP fills with the
/// aggregate arrival rate.
///
/// μ = λₙπ₀ / (λₙπ₀ + (1−λₙ)(1−π₀))
pub fn required_service_share<F: Scalar>(lambda_n: F, pi0: F) -> F {
    if lambda_n <= F::zero() {
        return F::zero();
    }
    if lambda_n >= F::one() {
        // Saturated cell: the buffer refills every slot, so only an AP that
        // is served every slot keeps up, independent of π₀.
        return F::one();
    }
    let num = lambda_n * pi0;
    let den = num + (F::one() - lambda_n) * (F::one() - pi0);
    if den == F::zero() {
        // lambda_n > 0 with pi0 == 0: an always-full buffer needs no wins
        // "per empty slot"; the limit of the ratio is 0.
        return F::zero();
    }
    num / den
}

/// Distribution of the number of users in one Voronoi cell when users and
/// APs are independent PPPs with density ratio ρ = λ₁/λ₂. The standard
/// gamma-mixed Poisson approximation with shape K gives a negative
/// binomial:
///
///   P(0) = (K/(ρ+K))^K,   P(n+1) = P(n) · q · (K+n)/(n+1),  q = ρ/(ρ+K)
///
/// The table is truncated once the remaining tail mass is below `tail_tol`.
#[derive(Clone, Debug)]
pub struct CellPopulationPmf<F> {
    probs: Vec<F>,
    tail_bound: F,
}

impl<F: Scalar> CellPopulationPmf<F> {
    pub fn new(lambda_u: F, lambda_a: F, shape_k: F, tail_tol: F) -> CellPopulationPmf<F> {
        assert!(lambda_a > F::zero(), "AP density must be positive");
        assert!(lambda_u >= F::zero(), "user density must be non-negative");
        if lambda_u == F::zero() {
            return CellPopulationPmf {
                probs: vec![F::one()],
                tail_bound: F::zero(),
            };
        }
        let rho = lambda_u / lambda_a;
        let q = rho / (rho + shape_k);
        // log-space start guards against underflow for extreme ratios
        let ln_p0 = shape_k * (shape_k / (rho + shape_k)).ln();
        let mut p = ln_p0.exp();
        let mut probs = vec![p];
        let mut cum = p;
        // The tail criterion always terminates in exact arithmetic; the
        // count cap is a guard for low-precision scalars whose cumulative
        // sum can stagnate just below 1.
        let max_terms = (10.0 * rho.as_f64() + 2000.0) as usize;
        for n in 0..max_terms {
            if F::one() - cum < tail_tol {
                break;
            }
            let nf = F::of(n as f64);
            p = p * q * (shape_k + nf) / (nf + F::one());
            probs.push(p);
            cum += p;
        }
        CellPopulationPmf {
            probs,
            tail_bound: (F::one() - cum).max(F::zero()),
        }
    }

    /// Default truncation used by the analytics pipeline.
    pub fn with_default_tail(lambda_u: F, lambda_a: F, shape_k: F) -> CellPopulationPmf<F> {
        CellPopulationPmf::new(lambda_u, lambda_a, shape_k, F::of(1e-10))
    }

    /// Wraps an explicit distribution (probs[n] = P(n users)). Intended for
    /// handcrafted fixtures; the table must sum to at most 1.
    pub fn from_probs(probs: Vec<F>) -> CellPopulationPmf<F> {
        assert!(!probs.is_empty());
        let mass: F = probs.iter().copied().sum();
        assert!(
            mass <= F::one() + F::of(1e-9) && probs.iter().all(|&p| p >= F::zero()),
            "not a (sub-)distribution"
        );
        let tail_bound = (F::one() - mass).max(F::zero());
        CellPopulationPmf { probs, tail_bound }
    }

    #[inline]
    pub fn prob(&self, n: usize) -> F {
        self.probs.get(n).copied().unwrap_or_else(F::zero)
    }

    /// Number of stored entries (support is 0..len).
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false // always at least P(0)
    }

    /// Mass beyond the stored entries (≤ the construction tolerance).
    pub fn tail_bound(&self) -> F {
        self.tail_bound
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, F)> + '_ {
        self.probs.iter().copied().enumerate()
    }

    pub fn mean(&self) -> F {
        self.iter().map(|(n, p)| F::of(n as f64) * p).sum()
    }
}

/// Cell-size-averaged demand: the service share an AP needs, weighted over
/// the population PMF. Empty cells contribute nothing. Returns the value
/// together with a degeneracy flag for λ = 0, where the series vanishes
/// identically and a fixed-point solver must not interpret 0 as "solved".
pub fn expected_demand<F: Scalar>(
    pi0: F,
    pmf: &CellPopulationPmf<F>,
    lambda: F,
) -> (F, bool) {
    if lambda <= F::zero() {
        return (F::zero(), true);
    }
    let mut acc = F::zero();
    for (n, p) in pmf.iter().skip(1) {
        let lambda_n = aggregate_request_probability(lambda, n);
        acc += p * required_service_share(lambda_n, pi0);
    }
    (acc, false)
}
