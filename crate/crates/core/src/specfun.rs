//! Special functions and combinatorics used by the coverage closed forms.
//!
//! Everything here is real-valued and works on `f64`. The incomplete Beta
//! and Gauss hypergeometric routines only cover the negative-argument
//! region the interference Laplace transforms need.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};

/// Largest derivative order accepted by [`partitions`] unless a caller
/// asks for a different cap.
pub const DEFAULT_PARTITION_CAP: usize = 12;

/// Series/quadrature switch-over for [`incomplete_beta_neg`].
pub const BETA_SERIES_RADIUS: f64 = 0.95;

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

/// Natural log of the Gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the Lanczos sum in its accurate range.
        return Ok(ln_gamma(x + 1.0)? - x.ln());
    }
    let z = x - 1.0;
    let mut sum = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + sum.ln())
}

/// Rising factorial `a (a + 1) … (a + n − 1)`; the empty product is 1.
pub fn rising_pochhammer(a: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (a + k as f64))
}

/// `n!` as a float. Only small arguments occur here.
pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Binomial coefficient `C(n, k)` as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// A multiset of parts for an integer partition of `p`, stored as
/// multiplicities: `multiplicities[j - 1]` is how many times part `j`
/// occurs, so `Σ j·q_j = p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartitionMultiset {
    multiplicities: Vec<u32>,
}

impl PartitionMultiset {
    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    /// Multiplicity of part `j` (1-based); zero outside the stored range.
    pub fn count(&self, j: usize) -> u32 {
        if j == 0 {
            return 0;
        }
        self.multiplicities.get(j - 1).copied().unwrap_or(0)
    }

    /// The integer being partitioned, `Σ j·q_j`.
    pub fn weight(&self) -> usize {
        self.multiplicities
            .iter()
            .enumerate()
            .map(|(i, &q)| (i + 1) * q as usize)
            .sum()
    }

    /// Total number of parts, `Σ q_j`.
    pub fn parts(&self) -> usize {
        self.multiplicities.iter().map(|&q| q as usize).sum()
    }
}

/// All partitions of `p` as multiplicity vectors, with the default cap.
pub fn partitions(p: usize) -> Result<Vec<PartitionMultiset>> {
    partitions_capped(p, DEFAULT_PARTITION_CAP)
}

/// All partitions of `p`, refusing orders above `cap`.
pub fn partitions_capped(p: usize, cap: usize) -> Result<Vec<PartitionMultiset>> {
    if p > cap {
        return Err(Error::Limit {
            what: "partition order",
            requested: p,
            cap,
        });
    }
    let mut out = Vec::new();
    let mut current = vec![0u32; p];
    fill_partitions(p, p, &mut current, &mut out);
    Ok(out)
}

// Distributes `remaining` over parts no larger than `largest`.
fn fill_partitions(
    remaining: usize,
    largest: usize,
    current: &mut Vec<u32>,
    out: &mut Vec<PartitionMultiset>,
) {
    if remaining == 0 {
        out.push(PartitionMultiset {
            multiplicities: current.clone(),
        });
        return;
    }
    if largest == 0 {
        return;
    }
    for copies in (0..=remaining / largest).rev() {
        current[largest - 1] = copies as u32;
        fill_partitions(remaining - copies * largest, largest - 1, current, out);
    }
    current[largest - 1] = 0;
}

/// Faà di Bruno term for one partition: `k! / Π q_j! (j!)^{q_j}`
/// together with the multiset itself.
struct WeightedPartition {
    coefficient: f64,
    parts: PartitionMultiset,
}

fn partition_table() -> &'static [Vec<WeightedPartition>] {
    static TABLE: OnceLock<Vec<Vec<WeightedPartition>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..=DEFAULT_PARTITION_CAP)
            .map(|k| {
                partitions(k)
                    .expect("within cap")
                    .into_iter()
                    .map(|parts| {
                        let denom: f64 = parts
                            .multiplicities()
                            .iter()
                            .enumerate()
                            .map(|(i, &q)| factorial(q as usize) * factorial(i + 1).powi(q as i32))
                            .product();
                        WeightedPartition {
                            coefficient: factorial(k) / denom,
                            parts,
                        }
                    })
                    .collect()
            })
            .collect()
    })
}

/// Derivatives `d^k/ds^k exp(−η(s))` for `k = 0..=n`, given
/// `eta_derivs = [η, η′, …, η^{(n)}]` at the same point.
///
/// Uses Faà di Bruno's formula over integer partitions; the outer
/// function is the exponential, so every outer derivative is `e^{−η}`.
pub fn exp_composition_derivatives(eta_derivs: &[f64], n: usize) -> Result<Vec<f64>> {
    if n > DEFAULT_PARTITION_CAP {
        return Err(Error::Limit {
            what: "partition order",
            requested: n,
            cap: DEFAULT_PARTITION_CAP,
        });
    }
    if eta_derivs.len() < n + 1 {
        return Err(Error::domain(format!(
            "need {} exponent derivatives, got {}",
            n + 1,
            eta_derivs.len()
        )));
    }
    let base = (-eta_derivs[0]).exp();
    let table = partition_table();
    Ok((0..=n)
        .map(|k| {
            let sum: f64 = table[k]
                .iter()
                .map(|wp| {
                    let prod: f64 = wp
                        .parts
                        .multiplicities()
                        .iter()
                        .enumerate()
                        .filter(|(_, &q)| q > 0)
                        .map(|(i, &q)| (-eta_derivs[i + 1]).powi(q as i32))
                        .product();
                    wp.coefficient * prod
                })
                .sum();
            sum * base
        })
        .collect())
}

/// Real incomplete Beta integral at a non-positive argument:
/// `∫_0^x |t|^{a−1} (1 − t)^{b−1} dt` for `x ≤ 0`.
///
/// Equals `−∫_0^{|x|} τ^{a−1} (1 + τ)^{b−1} dτ`. The principal-branch
/// `B(x; a, b)` differs from this by the constant phase `(−1)^{a−1}`.
/// Uses the Pochhammer power series inside `|x| < 0.95` and adaptive
/// quadrature outside.
pub fn incomplete_beta_neg(x: f64, a: f64, b: f64) -> Result<f64> {
    check_beta_args(x, a)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.abs() < BETA_SERIES_RADIUS {
        match incomplete_beta_neg_series(x, a, b) {
            Ok(v) => return Ok(v),
            Err(Error::Numerical { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    incomplete_beta_neg_quad(x, a, b)
}

fn check_beta_args(x: f64, a: f64) -> Result<()> {
    if !(a > 0.0) {
        return Err(Error::domain(format!("incomplete Beta requires a > 0, got {a}")));
    }
    if !(x <= 0.0) {
        return Err(Error::domain(format!(
            "incomplete Beta is only defined here for x <= 0, got {x}"
        )));
    }
    Ok(())
}

const BETA_SERIES_MAX_TERMS: usize = 20_000;

/// Power-series branch of [`incomplete_beta_neg`]:
/// `−Σ_k (−1)^k (1−b)_k / k! · z^{a+k} / (a+k)` with `z = |x| < 1`.
pub fn incomplete_beta_neg_series(x: f64, a: f64, b: f64) -> Result<f64> {
    check_beta_args(x, a)?;
    let z = -x;
    if z >= 1.0 {
        return Err(Error::Numerical {
            what: "incomplete Beta series (outside radius of convergence)",
            estimate: f64::INFINITY,
        });
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    // coef_k = (−1)^k (1−b)_k / k! · z^k
    let mut coef = 1.0;
    let mut sum = 0.0;
    let za = z.powf(a);
    for k in 0..BETA_SERIES_MAX_TERMS {
        let term = coef / (a + k as f64);
        sum += term;
        let next = coef * -(1.0 - b + k as f64) / (k as f64 + 1.0) * z;
        if next == 0.0 {
            return Ok(-za * sum);
        }
        if term.abs() < 1e-17 * sum.abs() && next.abs() <= coef.abs() {
            return Ok(-za * sum);
        }
        coef = next;
    }
    Err(Error::Numerical {
        what: "incomplete Beta series (term cap)",
        estimate: (za * coef).abs(),
    })
}

/// Quadrature branch of [`incomplete_beta_neg`]; valid for any `x ≤ 0`.
pub fn incomplete_beta_neg_quad(x: f64, a: f64, b: f64) -> Result<f64> {
    check_beta_args(x, a)?;
    let z = -x;
    if z == 0.0 {
        return Ok(0.0);
    }
    let tol = Tolerance::new(0.0, 1e-13);
    let q = if a < 1.0 {
        // w = τ^a removes the τ^{a−1} endpoint singularity.
        let inv_a = 1.0 / a;
        let q = quad::integrate(|w| (1.0 + w.powf(inv_a)).powf(b - 1.0), 0.0, z.powf(a), tol)?;
        quad::Quadrature {
            value: q.value * inv_a,
            ..q
        }
    } else {
        quad::integrate(|t| t.powf(a - 1.0) * (1.0 + t).powf(b - 1.0), 0.0, z, tol)?
    };
    Ok(-q.value)
}

const HYPERGEOMETRIC_MAX_TERMS: usize = 2_000_000;

/// Gauss hypergeometric `₂F₁(a, b; c; z)` for `z ≤ 0`.
///
/// The Pfaff transformation `₂F₁(a,b;c;z) = (1−z)^{−a} ₂F₁(a, c−b; c; z/(z−1))`
/// maps the argument into `[0, 1)` where the defining series converges.
/// `a` and `b` are ordered first so that the result is exactly symmetric.
pub fn gauss_2f1_negz(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if c <= 0.0 && c.fract() == 0.0 {
        return Err(Error::domain(format!(
            "2F1 undefined for non-positive integer c = {c}"
        )));
    }
    if !(z <= 0.0) {
        return Err(Error::domain(format!("2F1 here requires z <= 0, got {z}")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let (a, b) = if a.total_cmp(&b).is_le() { (a, b) } else { (b, a) };
    let w = z / (z - 1.0);
    let series = hypergeometric_series(a, c - b, c, w)?;
    Ok((1.0 - z).powf(-a) * series)
}

// Plain ₂F₁ series for 0 ≤ w < 1.
fn hypergeometric_series(a: f64, b: f64, c: f64, w: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..HYPERGEOMETRIC_MAX_TERMS {
        let nf = n as f64;
        let ratio = (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * w;
        term *= ratio;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        // Only stop once the terms are shrinking for good.
        let next_ratio = ((a + nf + 1.0) * (b + nf + 1.0) / ((c + nf + 1.0) * (nf + 2.0)) * w).abs();
        if term.abs() < 1e-15 * sum.abs() && next_ratio < 1.0 {
            return Ok(sum);
        }
    }
    Err(Error::Numerical {
        what: "2F1 series (iteration cap)",
        estimate: term.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Stirling series with upward recurrence; independent of Lanczos.
    fn ln_gamma_stirling(x: f64) -> f64 {
        let mut shift = 0.0;
        let mut y = x;
        while y < 20.0 {
            shift -= y.ln();
            y += 1.0;
        }
        let inv = 1.0 / y;
        let inv2 = inv * inv;
        let series = inv
            * (1.0 / 12.0
                - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
        shift + (y - 0.5) * y.ln() - y + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
    }

    // Composite Gauss–Legendre (5 point) on a uniform mesh; test-only oracle.
    fn gl_oracle<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
        const X: [f64; 5] = [
            0.0,
            -0.538_469_310_105_683_1,
            0.538_469_310_105_683_1,
            -0.906_179_845_938_664,
            0.906_179_845_938_664,
        ];
        const W: [f64; 5] = [
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
            0.236_926_885_056_189_1,
        ];
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|i| {
                let c = a + (i as f64 + 0.5) * h;
                X.iter().zip(W).map(|(x, w)| w * f(c + 0.5 * h * x)).sum::<f64>() * 0.5 * h
            })
            .sum()
    }

    #[test]
    fn ln_gamma_known_values() {
        assert_eq!(ln_gamma(1.0).unwrap().abs() < 1e-15, true);
        assert!((ln_gamma(5.0).unwrap() - 24f64.ln()).abs() < 1e-13);
        for n in 1..=20usize {
            let exact = factorial(n - 1);
            let got = ln_gamma(n as f64).unwrap().exp();
            assert!(((got - exact) / exact).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn ln_gamma_matches_stirling_oracle() {
        // Γ(2.5) = 3√π/4
        let exact = (0.75 * std::f64::consts::PI.sqrt()).ln();
        assert!((ln_gamma_stirling(2.5) - exact).abs() < 1e-14);
        for &x in &[0.1, 0.5, 1.5, 2.5, 3.7, 10.25, 42.0] {
            let d = ln_gamma(x).unwrap() - ln_gamma_stirling(x);
            assert!(d.abs() < 1e-12, "x={x} diff={d}");
        }
    }

    #[test]
    fn ln_gamma_rejects_non_positive() {
        assert!(matches!(ln_gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(ln_gamma(-2.5), Err(Error::Domain(_))));
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(rising_pochhammer(3.0, 0), 1.0);
        assert_eq!(rising_pochhammer(2.0, 3), 24.0);
        let direct = 1.5 * 2.5 * 3.5 * 4.5;
        assert_eq!(direct, 59.0625);
        assert!((rising_pochhammer(1.5, 4) - direct).abs() < 1e-12);
        // (m)_a = Γ(m + a) / Γ(m)
        let via_gamma = (ln_gamma(3.0 + 4.0).unwrap() - ln_gamma(3.0).unwrap()).exp();
        assert!((rising_pochhammer(3.0, 4) - via_gamma).abs() < 1e-9);
    }

    #[test]
    fn partitions_small_cases() {
        let p0 = partitions(0).unwrap();
        assert_eq!(p0.len(), 1);
        assert_eq!(p0[0].weight(), 0);
        let p1 = partitions(1).unwrap();
        assert_eq!(p1, vec![PartitionMultiset { multiplicities: vec![1] }]);
        // 4, 3+1, 2+2, 2+1+1, 1+1+1+1
        let p4 = partitions(4).unwrap();
        assert_eq!(p4.len(), 5);
        let mut shapes: Vec<Vec<u32>> = p4.iter().map(|p| p.multiplicities().to_vec()).collect();
        shapes.sort();
        let mut expected = vec![
            vec![0, 0, 0, 1],
            vec![1, 0, 1, 0],
            vec![0, 2, 0, 0],
            vec![2, 1, 0, 0],
            vec![4, 0, 0, 0],
        ];
        expected.sort();
        assert_eq!(shapes, expected);
    }

    #[test]
    fn partition_counts_follow_sequence() {
        let expected = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77];
        for (p, &n) in expected.iter().enumerate() {
            let parts = partitions(p).unwrap();
            assert_eq!(parts.len(), n, "p={p}");
            let unique: std::collections::HashSet<_> = parts.iter().cloned().collect();
            assert_eq!(unique.len(), n);
            assert!(parts.iter().all(|q| q.weight() == p));
        }
    }

    #[test]
    fn partition_cap_is_enforced() {
        assert!(matches!(
            partitions(13),
            Err(Error::Limit { requested: 13, cap: 12, .. })
        ));
        assert_eq!(partitions_capped(13, 20).unwrap().len(), 101);
    }

    #[test]
    fn incomplete_beta_trivial_cases() {
        assert_eq!(incomplete_beta_neg(0.0, 2.0, -1.0).unwrap(), 0.0);
        assert!((incomplete_beta_neg(-0.5, 1.0, 1.0).unwrap() + 0.5).abs() < 1e-15);
        assert!(matches!(incomplete_beta_neg(-0.5, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(incomplete_beta_neg(0.5, 1.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn incomplete_beta_against_quadrature_oracle() {
        // a = 0.5, b = 0: integrand |t|^{-1/2} (1 − t)^{-1} on [−0.5, 0].
        // Substitute |t| = u² so the oracle sees a smooth integrand.
        let oracle = -gl_oracle(|u| 2.0 / (1.0 + u * u), 0.0, 0.5f64.sqrt(), 200);
        // closed form for this pair: −2 arctan(√0.5)
        assert!((oracle + 2.0 * 0.5f64.sqrt().atan()).abs() < 1e-14);
        let got = incomplete_beta_neg(-0.5, 0.5, 0.0).unwrap();
        assert!((got - oracle).abs() < 1e-13 * oracle.abs(), "{got} vs {oracle}");
    }

    #[test]
    fn incomplete_beta_large_argument_uses_quadrature() {
        // a = 0.5, b = 0 has antiderivative −2 arctan(√z) for any z.
        for &z in &[0.95, 1.0, 3.0, 250.0] {
            let got = incomplete_beta_neg(-z, 0.5, 0.0).unwrap();
            let exact = -2.0 * z.sqrt().atan();
            assert!(((got - exact) / exact).abs() < 1e-11, "z={z}");
        }
        assert!(incomplete_beta_neg_series(-1.5, 0.5, 0.0).is_err());
    }

    #[test]
    fn incomplete_beta_series_and_quadrature_agree_on_overlap() {
        for &z in &[0.5, 0.6, 0.7, 0.8, 0.9, 0.95] {
            for &a in &[0.25, 0.5, 1.0, 1.5, 2.5] {
                for m in 1..=4 {
                    let b = 1.0 - m as f64;
                    let s = incomplete_beta_neg_series(-z, a, b).unwrap();
                    let q = incomplete_beta_neg_quad(-z, a, b).unwrap();
                    assert!(((s - q) / q).abs() < 1e-8, "z={z} a={a} b={b}: {s} vs {q}");
                }
            }
        }
    }

    #[test]
    fn hypergeometric_identities() {
        assert_eq!(gauss_2f1_negz(2.3, -0.7, 1.9, 0.0).unwrap(), 1.0);
        let ln2 = gauss_2f1_negz(1.0, 1.0, 2.0, -1.0).unwrap();
        assert!((ln2 - 2f64.ln()).abs() < 1e-13);
        let quarter_pi = gauss_2f1_negz(1.0, 0.5, 1.5, -1.0).unwrap();
        assert!((quarter_pi - std::f64::consts::FRAC_PI_4).abs() < 1e-13);
    }

    #[test]
    fn hypergeometric_matches_raw_series_and_euler_integral() {
        // Inside |z| < 1 the untransformed series converges; compare directly.
        let raw = |a: f64, b: f64, c: f64, z: f64| {
            let mut term = 1.0;
            let mut sum = 1.0;
            for n in 0..5000 {
                let nf = n as f64;
                term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
                sum += term;
            }
            sum
        };
        let z = -0.5;
        let got = gauss_2f1_negz(1.0, 1.0, 2.0, z).unwrap();
        assert!((got - raw(1.0, 1.0, 2.0, z)).abs() < 1e-13);
        assert!((got - (-(1.0f64 - z).ln() / z)).abs() < 1e-13);

        // Euler: 2F1(a,b;c;z) = Γ(c)/(Γ(b)Γ(c−b)) ∫_0^1 t^{b−1}(1−t)^{c−b−1}(1−zt)^{−a} dt
        // with a = 1, b = 0.5, c = 1.5: prefactor 1/2, t = u² removes the singularity.
        for &z in &[-1.0, -4.0, -30.0] {
            let euler = gl_oracle(|u| 1.0 / (1.0 - z * u * u), 0.0, 1.0, 400);
            let got = gauss_2f1_negz(1.0, 0.5, 1.5, z).unwrap();
            assert!(((got - euler) / euler).abs() < 1e-11, "z={z}");
            let arctan = (-z).sqrt().atan() / (-z).sqrt();
            assert!(((got - arctan) / arctan).abs() < 1e-11);
        }
    }

    #[test]
    fn hypergeometric_rejects_bad_arguments() {
        assert!(matches!(gauss_2f1_negz(1.0, 1.0, -2.0, -0.5), Err(Error::Domain(_))));
        assert!(matches!(gauss_2f1_negz(1.0, 1.0, 2.0, 0.5), Err(Error::Domain(_))));
        // Pfaff argument ≈ 1 − 1e-12: the series cannot finish in the cap.
        assert!(matches!(
            gauss_2f1_negz(1.0, 1.0, 2.0, -1e12),
            Err(Error::Numerical { .. })
        ));
    }

    // Recurrence y^{(k+1)} = −Σ C(k,i) η^{(i+1)} y^{(k−i)}, independent of partitions.
    fn exp_derivs_by_recurrence(eta: &[f64], n: usize) -> Vec<f64> {
        let mut y = vec![(-eta[0]).exp()];
        for k in 0..n {
            let next: f64 = (0..=k).map(|i| -binomial(k, i) * eta[i + 1] * y[k - i]).sum();
            y.push(next);
        }
        y
    }

    #[test]
    fn exp_composition_low_orders() {
        let eta = [0.3, 1.2, -0.4, 2.0];
        let d = exp_composition_derivatives(&eta, 3).unwrap();
        let e = (-0.3f64).exp();
        assert!((d[0] - e).abs() < 1e-15);
        assert!((d[1] + 1.2 * e).abs() < 1e-15);
        assert!((d[2] - (1.2 * 1.2 + 0.4) * e).abs() < 1e-14);
        let rec = exp_derivs_by_recurrence(&eta, 3);
        for (a, b) in d.iter().zip(&rec) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn exp_composition_matches_finite_differences_for_square() {
        // η(s) = s²: η′ = 2s, η″ = 2.
        let s = 0.7;
        let f = |x: f64| (-(x * x)).exp();
        let h = 1e-5;
        let fd2 = (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h);
        let d = exp_composition_derivatives(&[s * s, 2.0 * s, 2.0, 0.0, 0.0], 4).unwrap();
        assert!(((d[2] - fd2) / d[2]).abs() < 1e-4);
        assert!((d[2] - (4.0 * s * s - 2.0) * f(s)).abs() < 1e-14);
    }

    #[test]
    fn exp_composition_respects_cap() {
        let eta = vec![0.0; 20];
        assert!(matches!(
            exp_composition_derivatives(&eta, 13),
            Err(Error::Limit { .. })
        ));
        assert!(exp_composition_derivatives(&eta[..2], 3).is_err());
    }

    proptest! {
        #[test]
        fn hypergeometric_is_symmetric(a in -3.0f64..3.0, b in -3.0f64..3.0, c in 0.1f64..4.0, z in -5.0f64..0.0) {
            let x = gauss_2f1_negz(a, b, c, z);
            let y = gauss_2f1_negz(b, a, c, z);
            match (x, y) {
                (Ok(x), Ok(y)) => prop_assert_eq!(x.to_bits(), y.to_bits()),
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "asymmetric failure"),
            }
        }

        #[test]
        fn exp_composition_agrees_with_recurrence(
            eta in proptest::collection::vec(-2.0f64..2.0, 7),
        ) {
            let fdb = exp_composition_derivatives(&eta, 6).unwrap();
            let rec = exp_derivs_by_recurrence(&eta, 6);
            for (a, b) in fdb.iter().zip(&rec) {
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
            }
        }

        #[test]
        fn exp_composition_matches_central_differences(
            c0 in -1.0f64..1.0, c1 in -1.0f64..1.0, c2 in -0.5f64..0.5, s in 0.1f64..1.5,
        ) {
            // η(s) = c0 + c1 s + c2 s² + 0.3 sin(s)
            let eta = |x: f64| c0 + c1 * x + c2 * x * x + 0.3 * x.sin();
            let derivs = [
                eta(s),
                c1 + 2.0 * c2 * s + 0.3 * s.cos(),
                2.0 * c2 - 0.3 * s.sin(),
                -0.3 * s.cos(),
                0.3 * s.sin(),
            ];
            let d = exp_composition_derivatives(&derivs, 4).unwrap();
            let f = |x: f64| (-eta(x)).exp();
            let h = 1e-2;
            // fourth-order central stencils
            let fd1 = (f(s - 2.0 * h) - 8.0 * f(s - h) + 8.0 * f(s + h) - f(s + 2.0 * h)) / (12.0 * h);
            let fd2 = (-f(s - 2.0 * h) + 16.0 * f(s - h) - 30.0 * f(s) + 16.0 * f(s + h) - f(s + 2.0 * h)) / (12.0 * h * h);
            let fd3 = (f(s - 3.0 * h) - 8.0 * f(s - 2.0 * h) + 13.0 * f(s - h) - 13.0 * f(s + h) + 8.0 * f(s + 2.0 * h) - f(s + 3.0 * h)) / (8.0 * h.powi(3));
            let fd4 = (-f(s - 3.0 * h) + 12.0 * f(s - 2.0 * h) - 39.0 * f(s - h) + 56.0 * f(s) - 39.0 * f(s + h) + 12.0 * f(s + 2.0 * h) - f(s + 3.0 * h)) / (6.0 * h.powi(4));
            let scale = f(s);
            for (k, fd) in [(1, fd1), (2, fd2), (3, fd3), (4, fd4)] {
                let tol = 1e-4 * d[k].abs().max(scale);
                prop_assert!((d[k] - fd).abs() < tol, "order {}: {} vs {}", k, d[k], fd);
            }
        }
    }
}
