//! Smooth cutoff primitives shared by Littlewood–Paley blocks and mollifiers.

/// Smooth monotone step: 0 for `s <= 0`, 1 for `s >= 1`, `C^∞` in between.
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    // e^{-1/s} / (e^{-1/s} + e^{-1/(1-s)}) with a single exponential
    1.0 / (1.0 + (1.0 / s - 1.0 / (1.0 - s)).exp())
}

/// Smooth plateau: 1 for `r <= inner`, 0 for `r >= outer`.
pub fn plateau(r: f64, inner: f64, outer: f64) -> f64 {
    1.0 - smooth_step((r - inner) / (outer - inner))
}

/// Unnormalised bump `exp(-1/(1-(2x)^2))` supported on `(-1/2, 1/2)`.
pub fn bump(x: f64) -> f64 {
    let y = 2.0 * x;
    if y.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - y * y)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_is_monotone_and_symmetric() {
        let mut last = 0.0;
        for i in 0..=100 {
            let s = i as f64 / 100.0;
            let v = smooth_step(s);
            assert!(v >= last);
            assert!((v + smooth_step(1.0 - s) - 1.0).abs() < 1e-15);
            last = v;
        }
        assert_eq!(plateau(0.4, 0.5, 1.0), 1.0);
        assert_eq!(plateau(1.0, 0.5, 1.0), 0.0);
    }
}
