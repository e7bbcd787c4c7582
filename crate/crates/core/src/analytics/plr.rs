//! Packet loss rate, decomposed by cause.
//!
//! Losses per arriving packet, averaged over cell populations and the
//! stationary AP state. With i users in a cell, j of them requesting in a
//! slot (binomial), and the AP state/service from the fixed point:
//!
//!   access   — AP holds a packet and loses contention: the j new arrivals
//!              are all turned away; weight (1−π₀)(1−μ) · j/(j+1).
//!   sinr     — AP wins and transmits but the link fails:
//!              weight (1−π₀)·μ·(1−p) · 1/(j+1).
//!   overflow — empty AP receives j ≥ 1 arrivals and can buffer only one:
//!              weight π₀ · (j−1)/j; plus the arrivals competing with a
//!              departing packet, weight (1−π₀)·μ · j/(j+1).
//!
//! The j/(j+1)-style shares weight each loss by the packets present at the
//! AP in that slot (the buffered one plus the j fresh ones), which is how
//! the source model normalizes "per packet". The three causes are disjoint
//! and `total` is their exact sum.

use crate::analytics::fixed_point::StateSolution;
use crate::analytics::traffic::CellPopulationPmf;
use crate::numerics::ln_factorial;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlrBreakdown<F> {
    /// Sum of the three disjoint causes below.
    pub total: F,
    /// Losses because the serving AP could not win channel access.
    pub access: F,
    /// Losses because a transmitted packet failed the SINR threshold.
    pub sinr: F,
    /// Buffer-overflow losses not attributable to a lost contention
    /// (single-buffer collisions at empty or just-serviced APs).
    pub overflow: F,
}

impl<F: Scalar> PlrBreakdown<F> {
    pub fn zero() -> Self {
        PlrBreakdown {
            total: F::zero(),
            access: F::zero(),
            sinr: F::zero(),
            overflow: F::zero(),
        }
    }
}

/// Binomial(i, λ) weights b_j for j = 0..=i, computed by the stable ratio
/// recursion with a log-space restart if the starting term underflows.
fn binomial_weights<F: Scalar>(i: usize, lambda: F) -> Vec<F> {
    let mut w = vec![F::zero(); i + 1];
    if lambda <= F::zero() {
        w[0] = F::one();
        return w;
    }
    if lambda >= F::one() {
        w[i] = F::one();
        return w;
    }
    let b0 = (F::one() - lambda).powi(i as i32);
    if b0 > F::zero() {
        let ratio = lambda / (F::one() - lambda);
        let mut b = b0;
        w[0] = b;
        for j in 0..i {
            b = b * ratio * F::of((i - j) as f64) / F::of(j as f64 + 1.0);
            w[j + 1] = b;
        }
    } else {
        // (1−λ)^i underflowed: evaluate each term in log space.
        let ln_l = lambda.ln();
        let ln_1ml = (-lambda).ln_1p();
        let ln_fact_i = ln_factorial::<F>(i);
        for (j, slot) in w.iter_mut().enumerate() {
            let ln_c = ln_fact_i - ln_factorial::<F>(j) - ln_factorial::<F>(i - j);
            *slot = (ln_c + F::of(j as f64) * ln_l + F::of((i - j) as f64) * ln_1ml).exp();
        }
    }
    w
}

/// Cause-decomposed packet loss rate at the operating point `solution`
/// with link success probability `p`. `pmf` and `lambda` must be the same
/// population law and request rate the operating point was solved under.
pub fn packet_loss_rate<F: Scalar>(
    pmf: &CellPopulationPmf<F>,
    lambda: F,
    solution: &StateSolution<F>,
    p: F,
) -> PlrBreakdown<F> {
    if lambda <= F::zero() {
        return PlrBreakdown::zero();
    }
    let pi0 = solution.pi0;
    let busy = F::one() - pi0;
    let mu = solution.expected_mu;

    // Population-averaged binomial shares:
    //   s_next = E[ j/(j+1) ],  s_inv = E[ 1/(j+1) ],  s_over = E[ (j−1)/j ; j≥1 ]
    let mut s_next = F::zero();
    let mut s_inv = F::zero();
    let mut s_over = F::zero();
    for (i, p_i) in pmf.iter().skip(1) {
        let w = binomial_weights(i, lambda);
        let mut c_next = F::zero();
        let mut c_inv = F::zero();
        let mut c_over = F::zero();
        for (j, &b) in w.iter().enumerate() {
            let jf = F::of(j as f64);
            c_next += b * jf / (jf + F::one());
            c_inv += b / (jf + F::one());
            if j >= 1 {
                c_over += b * (jf - F::one()) / jf;
            }
        }
        s_next += p_i * c_next;
        s_inv += p_i * c_inv;
        s_over += p_i * c_over;
    }

    let access = busy * (F::one() - mu) * s_next;
    let sinr = busy * mu * (F::one() - p) * s_inv;
    let overflow = pi0 * s_over + busy * mu * s_next;
    PlrBreakdown {
        total: access + sinr + overflow,
        access,
        sinr,
        overflow,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::FormulaMode;

    fn solution(pi0: f64, mu: f64) -> StateSolution<f64> {
        StateSolution {
            pi0,
            pi1: 1.0 - pi0,
            expected_mu: mu,
            residual: 0.0,
            mode: FormulaMode::Corrected,
            degenerate: false,
            mu_exceeds_unity: false,
            extra_roots: Vec::new(),
        }
    }

    #[test]
    fn binomial_weights_match_direct_formula() {
        let w = binomial_weights(7, 0.3f64);
        let direct = |j: u32| {
            let c = (1..=7).map(|k| k as f64).product::<f64>()
                / ((1..=j).map(|k| k as f64).product::<f64>()
                    * (1..=(7 - j)).map(|k| k as f64).product::<f64>());
            c * 0.3f64.powi(j as i32) * 0.7f64.powi(7 - j as i32)
        };
        for j in 0..=7u32 {
            assert!((w[j as usize] - direct(j)).abs() < 1e-14, "j = {j}");
        }
        let mass: f64 = w.iter().sum();
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn binomial_weights_degenerate_rates() {
        let w0 = binomial_weights(5, 0.0f64);
        assert_eq!(w0[0], 1.0);
        assert!(w0[1..].iter().all(|&b| b == 0.0));
        let w1 = binomial_weights(5, 1.0f64);
        assert_eq!(w1[5], 1.0);
        assert!(w1[..5].iter().all(|&b| b == 0.0));
    }

    #[test]
    fn binomial_weights_survive_underflow() {
        // (1−0.9999)^9000 underflows f64; the log-space path must still
        // produce a normalized distribution concentrated near j = i.
        let w = binomial_weights(9000, 0.9999f64);
        let mass: f64 = w.iter().sum();
        assert!((mass - 1.0).abs() < 1e-9);
        assert!(w[8999] > 0.0);
    }

    #[test]
    fn single_user_saturated_cell_hand_value() {
        // Every cell has exactly one user and λ = 1 means j = 1 always.
        // Shares: j/(j+1) = 1/2, 1/(j+1) = 1/2, (j−1)/j = 0.
        // With π₀ = 0.2, μ = 0.6, p = 0.9:
        //   access   = 0.8·0.4·0.5       = 0.16
        //   sinr     = 0.8·0.6·0.1·0.5   = 0.024
        //   overflow = 0 + 0.8·0.6·0.5   = 0.24
        let pmf = CellPopulationPmf::from_probs(vec![0.0f64, 1.0]);
        let plr = packet_loss_rate(&pmf, 1.0, &solution(0.2, 0.6), 0.9);
        assert!((plr.access - 0.16).abs() < 1e-15);
        assert!((plr.sinr - 0.024).abs() < 1e-15);
        assert!((plr.overflow - 0.24).abs() < 1e-15);
        assert!((plr.total - 0.424).abs() < 1e-15);
    }

    #[test]
    fn zero_rate_loses_nothing() {
        let pmf = CellPopulationPmf::with_default_tail(1e-3f64, 1e-4, 3.5);
        let plr = packet_loss_rate(&pmf, 0.0, &solution(0.5, 0.5), 0.9);
        assert_eq!(plr, PlrBreakdown::zero());
    }

    #[test]
    fn perfect_link_has_no_sinr_loss() {
        let pmf = CellPopulationPmf::with_default_tail(1e-3f64, 1e-4, 3.5);
        let plr = packet_loss_rate(&pmf, 0.3, &solution(0.4, 0.2), 1.0);
        assert_eq!(plr.sinr, 0.0);
        assert!(plr.access > 0.0 && plr.overflow > 0.0);
        assert!((plr.total - (plr.access + plr.sinr + plr.overflow)).abs() < 1e-15);
    }

    #[test]
    fn worse_link_only_raises_sinr_component() {
        let pmf = CellPopulationPmf::with_default_tail(1e-3f64, 1e-4, 3.5);
        let good = packet_loss_rate(&pmf, 0.3, &solution(0.4, 0.2), 0.95);
        let bad = packet_loss_rate(&pmf, 0.3, &solution(0.4, 0.2), 0.80);
        assert!(bad.sinr > good.sinr);
        assert_eq!(bad.access, good.access);
        assert_eq!(bad.overflow, good.overflow);
        assert!(bad.total > good.total);
    }

    #[test]
    fn components_stay_in_unit_interval() {
        let pmf = CellPopulationPmf::with_default_tail(2e-3f64, 1e-4, 3.5);
        for &(pi0, mu, p) in &[(0.1f64, 0.05, 0.9), (0.9, 0.99, 0.2), (0.5, 0.5, 0.5)] {
            let plr = packet_loss_rate(&pmf, 0.7, &solution(pi0, mu), p);
            for v in [plr.total, plr.access, plr.sinr, plr.overflow] {
                assert!((0.0..=1.0).contains(&v), "out of range: {v}");
            }
        }
    }
}
