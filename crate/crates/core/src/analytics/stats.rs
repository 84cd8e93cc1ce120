use super::AnalyticsError;
use crate::scalar::Scalar;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for x ≥ 1.
fn ln_gamma<F: Scalar>(x: F) -> F {
    let x = x - F::one();
    let mut a = F::lit(LANCZOS[0]);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a = a + F::lit(*c) / (x + F::lit(i as f64));
    }
    let t = x + F::lit(LANCZOS_G + 0.5);
    F::lit(0.5 * (2.0 * std::f64::consts::PI).ln()) + (x + F::lit(0.5)) * t.ln() - t + a.ln()
}

/// ln C(n, k) for k ≤ n.
pub fn ln_choose<F: Scalar>(n: u64, k: u64) -> F {
    debug_assert!(k <= n);
    if k == 0 || k == n {
        return F::zero();
    }
    let f = |x: u64| F::from_u64(x).expect("representable count");
    ln_gamma(f(n) + F::one()) - ln_gamma(f(k) + F::one()) - ln_gamma(f(n - k) + F::one())
}

/// P[X ≥ k] for X hypergeometric: `n` draws from `N` items of which `K`
/// are marked. Summed in log space.
#[allow(non_snake_case)]
pub fn hypergeom_tail<F: Scalar>(k: u64, n: u64, K: u64, N: u64) -> Result<F, AnalyticsError> {
    if K > N || n > N || k > n.min(K) {
        return Err(AnalyticsError::DomainError(format!("k={k} n={n} K={K} N={N}")));
    }
    if k <= (n + K).saturating_sub(N) {
        return Ok(F::one());
    }
    let denom = ln_choose::<F>(N, n);
    let terms: Vec<F> = (k..=n.min(K)).map(|i| ln_choose::<F>(K, i) + ln_choose::<F>(N - K, n - i) - denom).collect();
    let max = terms.iter().copied().fold(F::neg_infinity(), F::max);
    let sum = terms.iter().fold(F::zero(), |acc, t| acc + (*t - max).exp());
    let p = (max + sum.ln()).exp();
    Ok(p.max(F::zero()).min(F::one()))
}

/// Benjamini-Hochberg step-up adjustment, in input order.
pub fn bh_adjust<F: Scalar>(pvalues: &[F]) -> Vec<F> {
    let m = pvalues.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvalues[a].partial_cmp(&pvalues[b]).expect("p-values are not NaN"));
    let mut out = vec![F::zero(); m];
    let mut running = F::one();
    let total = F::from_usize(m).expect("count");
    for (rank, &i) in order.iter().enumerate().rev() {
        let scaled = pvalues[i] * (total / F::from_usize(rank + 1).expect("count"));
        running = running.min(scaled);
        out[i] = running.min(F::one()).max(pvalues[i]);
    }
    out
}

pub fn bonferroni_adjust<F: Scalar>(pvalues: &[F]) -> Vec<F> {
    let m = F::from_usize(pvalues.len()).expect("count");
    pvalues.iter().map(|p| (*p * m).min(F::one())).collect()
}
