//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.
//!
//! Semi-infinite integrals in this crate are always mapped onto a finite
//! interval by the caller (an exponential-weight substitution for the
//! serving-distance integrals, a power substitution for the interference
//! kernels), so only the finite rule lives here.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Stopping rule: accept once `error <= max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            max_intervals: 2000,
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kron += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).abs();
    Segment { a, b, value, error }
}

/// Integrates `f` over `[a, b]`.
///
/// Fails with [`Error::Numerical`] when the subdivision budget is spent
/// before reaching the tolerance, or when the integrand produces a
/// non-finite value.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }
    if b < a {
        return integrate(f, b, a, tol).map(|q| Quadrature {
            value: -q.value,
            ..q
        });
    }

    let first = kronrod(&f, a, b);
    let mut segments = vec![first];
    let mut total = first.value;
    let mut err = first.error;

    while err > tol.target(total) {
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::Numerical {
                what: "adaptive quadrature (non-finite integrand)",
                estimate: err,
            });
        }
        if segments.len() >= tol.max_intervals {
            return Err(Error::Numerical {
                what: "adaptive quadrature (subdivision limit)",
                estimate: err,
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("segment list is never empty");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // interval collapsed to machine resolution
            return Err(Error::Numerical {
                what: "adaptive quadrature (interval underflow)",
                estimate: err,
            });
        }
        let left = kronrod(&f, seg.a, mid);
        let right = kronrod(&f, mid, seg.b);
        total += left.value + right.value - seg.value;
        err += left.error + right.error - seg.error;
        segments.push(left);
        segments.push(right);

        // Periodically resum to keep the running totals honest.
        if segments.len() % 64 == 0 {
            total = segments.iter().map(|s| s.value).sum();
            err = segments.iter().map(|s| s.error).sum();
        }
    }

    let value: f64 = segments.iter().map(|s| s.value).sum();
    if !value.is_finite() {
        return Err(Error::Numerical {
            what: "adaptive quadrature (non-finite integrand)",
            estimate: err,
        });
    }
    Ok(Quadrature {
        value,
        error: segments.iter().map(|s| s.error).sum(),
        intervals: segments.len(),
    })
}
