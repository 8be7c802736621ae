//! Adaptive Gauss–Kronrod (7/15) quadrature and a log-space integrator for
//! unimodal integrands over the whole real line.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

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
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Settings for the quadrature oracle.
///
/// Each real-line integral is mapped onto `(−1, 1)` by
/// `x = mode + scale·t/(1 − t²)`, with `mode` and `scale` taken from the
/// integrand itself, so no truncation bounds are needed. Scale parameters
/// are integrated over their logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Target relative error of each integral.
    pub rel_tol: f64,
    /// Number of equal panels the mapped interval starts with.
    pub initial_panels: usize,
    /// Subdivision budget; exceeding it is a convergence failure.
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-10,
            initial_panels: 8,
            max_panels: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadratureSpec {
            rel_tol,
            ..Default::default()
        }
    }
}

/// An integral estimate and its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (i, &x) in XGK[..7].iter().enumerate() {
        let s = f(c - h * x) + f(c + h * x);
        kronrod += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * h,
        error: ((kronrod - gauss) * h).abs(),
    }
}

/// `∫_a^b f` to relative accuracy `spec.rel_tol` by global adaptive
/// bisection of the panel with the largest error.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::usage(format!("bad integration interval [{a}, {b}]")));
    }
    let panels = spec.initial_panels.max(1);
    let width = (b - a) / panels as f64;
    let mut heap = BinaryHeap::new();
    for i in 0..panels {
        let lo = a + width * i as f64;
        let hi = if i + 1 == panels { b } else { lo + width };
        heap.push(gauss_kronrod(&mut f, lo, hi));
    }
    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature { estimate: value, error });
        }
        if error <= spec.rel_tol * value.abs() || error == 0.0 {
            return Ok(Estimate { value, error });
        }
        if heap.len() >= spec.max_panels {
            return Err(Error::Quadrature { estimate: value, error });
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            return Err(Error::Quadrature { estimate: value, error });
        }
        heap.push(gauss_kronrod(&mut f, worst.a, mid));
        heap.push(gauss_kronrod(&mut f, mid, worst.b));
    }
}

/// Maximizer of a unimodal `g` by bracketing from `start` then golden-section
/// search.
pub fn find_mode<F: FnMut(f64) -> f64>(mut g: F, start: f64) -> f64 {
    let mut step = 1.0f64.max(start.abs() * 1e-3);
    let (g0, gp, gm) = (g(start), g(start + step), g(start - step));
    let (mut lo, mut hi);
    if gp >= g0 && gp >= gm {
        // climb right
        let (mut x, mut gx) = (start + step, gp);
        lo = start;
        loop {
            step *= 2.0;
            let gn = g(x + step);
            if !(gn > gx) || step > 1e300 {
                hi = x + step;
                break;
            }
            lo = x;
            x += step;
            gx = gn;
        }
    } else if gm > g0 {
        let (mut x, mut gx) = (start - step, gm);
        hi = start;
        loop {
            step *= 2.0;
            let gn = g(x - step);
            if !(gn > gx) || step > 1e300 {
                lo = x - step;
                break;
            }
            hi = x;
            x -= step;
            gx = gn;
        }
    } else {
        lo = start - step;
        hi = start + step;
    }
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..200 {
        if hi - lo <= 1e-12 * (1.0 + c.abs()) {
            break;
        }
        if gc >= gd {
            hi = d;
            d = c;
            gd = gc;
            c = hi - ratio * (hi - lo);
            gc = g(c);
        } else {
            lo = c;
            c = d;
            gc = gd;
            d = lo + ratio * (hi - lo);
            gd = g(d);
        }
    }
    0.5 * (lo + hi)
}

/// `ln ∫_ℝ exp(log_f(x)) dx` for a unimodal, log-concave-ish integrand.
///
/// Returns the log of the integral and the relative error estimate.
pub fn log_integrate_line<F: FnMut(f64) -> f64>(mut log_f: F, start: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let mode = find_mode(&mut log_f, start);
    let peak = log_f(mode);
    if !peak.is_finite() {
        return Err(Error::Quadrature {
            estimate: peak,
            error: f64::INFINITY,
        });
    }
    // widen or shrink the probe until the log-density drops by O(1)
    let mut h = 1e-3 * (1.0 + mode.abs());
    let mut drop = 0.0;
    let mut shrinking = false;
    for _ in 0..400 {
        drop = peak - 0.5 * (log_f(mode + h) + log_f(mode - h));
        if !drop.is_finite() || drop > 8.0 {
            h *= 0.25;
            shrinking = true;
        } else if drop < 0.05 {
            h *= if shrinking { 2.0 } else { 16.0 };
            if !h.is_finite() {
                break;
            }
        } else {
            break;
        }
    }
    let scale = if drop.is_finite() && drop > 0.0 {
        h / (2.0 * drop).sqrt()
    } else {
        1.0
    };
    let mapped = |t: f64| {
        let q = 1.0 - t * t;
        if q <= 0.0 {
            return 0.0;
        }
        let x = mode + scale * t / q;
        let v = (log_f(x) - peak).exp();
        if v == 0.0 {
            return 0.0;
        }
        v * scale * (1.0 + t * t) / (q * q)
    };
    let est = integrate(mapped, -1.0, 1.0, spec)?;
    if !(est.value > 0.0) {
        return Err(Error::Quadrature {
            estimate: est.value,
            error: est.error,
        });
    }
    Ok(Estimate {
        value: peak + est.value.ln(),
        error: est.error / est.value,
    })
}
