//! Closed-form killed Brownian motion probabilities (unit diffusion, generator `½Δ`).

use libm::erfc;
use std::f64::consts::{PI, SQRT_2};

/// `P(B_s ∈ (0, width) for s ≤ t | B_0 = start)`.
///
/// Uses the image sum for short times and the sine series otherwise; both are summed until
/// their terms fall below `1e-18`.
pub fn interval_survival(width: f64, start: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return if start > 0.0 && start < width { 1.0 } else { 0.0 };
    }
    if t <= width * width {
        interval_survival_images(width, start, t)
    } else {
        interval_survival_series(width, start, t)
    }
}

/// Sine-series form `Σ_n (2/(nπ))(1 − (−1)^n) sin(nπx/a) e^{−n²π²t/(2a²)}`.
pub fn interval_survival_series(width: f64, start: f64, t: f64) -> f64 {
    let mut total = 0.0;
    for n in (1..).step_by(2) {
        let k = n as f64 * PI / width;
        let decay = (-0.5 * k * k * t).exp();
        if decay < 1e-18 {
            break;
        }
        total += 4.0 / (n as f64 * PI) * (k * start).sin() * decay;
    }
    total
}

/// Image form: the killed heat kernel `Σ_k φ_t(y − x + 2ka) − φ_t(y + x + 2ka)` integrated
/// over `(0, a)`.
pub fn interval_survival_images(width: f64, start: f64, t: f64) -> f64 {
    let cdf = |z: f64| 0.5 * erfc(-z / (SQRT_2 * t.sqrt()));
    let term = |k: f64| {
        let shift = 2.0 * k * width;
        cdf(width - start + shift) - cdf(-start + shift) - cdf(width + start + shift) + cdf(start + shift)
    };
    let mut total = term(0.0);
    for k in 1.. {
        let pair = term(k as f64) + term(-(k as f64));
        total += pair;
        if pair.abs() < 1e-18 && (2 * k - 1) as f64 * width > 8.0 * t.sqrt() {
            break;
        }
    }
    total
}

/// `P(B leaves (−width/2, width/2) by t | B_0 = 0)` by the reflection principle:
/// `2 Σ_{k≥1} (−1)^{k−1} erfc((2k−1) h / √(2t))`, `h = width/2`; accurate in the far tail.
pub fn interval_exit(width: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t > width * width {
        return 1.0 - interval_survival_series(width, 0.5 * width, t);
    }
    let h = 0.5 * width;
    let mut total = 0.0;
    for k in 1.. {
        let term = erfc((2 * k - 1) as f64 * h / (SQRT_2 * t.sqrt()));
        total += if k % 2 == 1 { term } else { -term };
        if term < 1e-300 || term < 1e-18 * total {
            break;
        }
    }
    2.0 * total
}

/// Survival in the square of side `side` centred at the origin, from `start`.
pub fn box_survival(side: f64, start: [f64; 2], t: f64) -> f64 {
    start.iter().map(|x| interval_survival(side, x + 0.5 * side, t)).product()
}

/// `P(X leaves Q_r by t | X_0 = 0)` for planar Brownian motion: `2e − e²` with `e` the
/// one-axis exit probability.
pub fn escape_oracle(r: f64, t: f64) -> f64 {
    let e = interval_exit(r, t);
    2.0 * e - e * e
}

/// Leading tail term `4 · P(sup_{s≤t} B_s ≥ r/2) = 4 erfc(r / (2√(2t)))`.
pub fn escape_leading_order(r: f64, t: f64) -> f64 {
    4.0 * erfc(r / (2.0 * SQRT_2 * t.sqrt()))
}

/// `P(leave Q_inner, stay in Q_outer) / P(stay in Q_inner)` for Brownian motion from the origin.
pub fn annulus_ratio(inner: f64, outer: f64, t: f64) -> f64 {
    let stay_inner = box_survival(inner, [0.0; 2], t);
    (box_survival(outer, [0.0; 2], t) - stay_inner) / stay_inner
}
