//! The odd C^2 profile `g`: identity on `[0, 1/2]`, increasing and concave on
//! `[1/2, 7/8]`, constant `3/4` beyond `7/8`.
//!
//! On the transition interval `g''` is a trapezoid: zero until `5/8`, a
//! linear ramp down, a flat part and a linear ramp back to zero at `7/8`.
//! Every piece of `g` is therefore a polynomial of degree at most three and
//! `g''` is continuous everywhere.
//!
//! The constraint `|g''| <= 3` cannot be met together with the plateau value
//! `3/4`: any admissible profile has `sup |g''| >= 4` (see
//! [`MIN_FEASIBLE_SECOND_DERIVATIVE`]). This profile reaches `32/7`.

use serde::Serialize;

pub const LINEAR_END: f64 = 0.5;
pub const PLATEAU_START: f64 = 0.875;
pub const PLATEAU_VALUE: f64 = 0.75;

/// Length of each linear ramp of `g''`, as a fraction of the transition
/// interval.
const RAMP_FRACTION: f64 = 1.0 / 12.0;
/// `g''` vanishes on the first third of the transition interval so that the
/// density `-g''` has mean position `2/3`, which pins `g(7/8) = 3/4`.
const FLAT_FRACTION: f64 = 1.0 / 3.0;

/// Lower bound on `sup |g''|` for any profile with `g(t) = t` on `[0, 1/2]`,
/// `g = 3/4` on `[7/8, inf)` and `0 <= g' <= 1`.
pub const MIN_FEASIBLE_SECOND_DERIVATIVE: f64 = 4.0;

#[derive(Debug, Clone, Copy, Serialize)]
struct Piece {
    start: f64,
    g: f64,
    dg: f64,
    /// `g''` at `start`.
    ddg: f64,
    /// Constant `g'''` on the piece.
    dddg: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BumpProfile {
    pieces: Vec<Piece>,
    max_second: f64,
}

impl Default for BumpProfile {
    fn default() -> Self {
        build_bump()
    }
}

/// Builds the fixed profile by integrating its piecewise-linear `g''`.
pub fn build_bump() -> BumpProfile {
    let len = PLATEAU_START - LINEAR_END;
    let height = 1.0 / ((1.0 - FLAT_FRACTION) - RAMP_FRACTION) / len;
    let b1 = LINEAR_END + FLAT_FRACTION * len;
    let b2 = b1 + RAMP_FRACTION * len;
    let b4 = PLATEAU_START;
    let b3 = b4 - RAMP_FRACTION * len;
    let slope = height / (RAMP_FRACTION * len);
    // (start, g''' on the piece)
    let layout = [
        (0.0, 0.0),
        (b1, -slope),
        (b2, 0.0),
        (b3, slope),
        (b4, 0.0),
    ];
    let mut pieces = Vec::with_capacity(layout.len());
    let (mut g, mut dg, mut ddg) = (0.0, 1.0, 0.0);
    for (k, &(start, dddg)) in layout.iter().enumerate() {
        if k > 0 {
            let prev: &Piece = &pieces[k - 1];
            let s = start - prev.start;
            g = prev.g + prev.dg * s + prev.ddg * s * s / 2.0 + prev.dddg * s * s * s / 6.0;
            dg = prev.dg + prev.ddg * s + prev.dddg * s * s / 2.0;
            ddg = prev.ddg + prev.dddg * s;
        }
        pieces.push(Piece { start, g, dg, ddg, dddg });
    }
    // The plateau piece starts exactly at (3/4, 0, 0) up to rounding.
    let last = pieces.last_mut().expect("non-empty layout");
    debug_assert!((last.g - PLATEAU_VALUE).abs() < 1e-12);
    debug_assert!(last.dg.abs() < 1e-12 && last.ddg.abs() < 1e-9);
    *last = Piece { start: b4, g: PLATEAU_VALUE, dg: 0.0, ddg: 0.0, dddg: 0.0 };
    BumpProfile { pieces, max_second: height }
}

impl BumpProfile {
    /// `[g(t), g'(t), g''(t)]` with the odd extension for `t < 0`.
    pub fn eval(&self, t: f64) -> [f64; 3] {
        let s = t.abs();
        let p = self
            .pieces
            .iter()
            .rev()
            .find(|p| s >= p.start)
            .unwrap_or(&self.pieces[0]);
        let h = s - p.start;
        let g = p.g + p.dg * h + p.ddg * h * h / 2.0 + p.dddg * h * h * h / 6.0;
        let dg = p.dg + p.ddg * h + p.dddg * h * h / 2.0;
        let ddg = p.ddg + p.dddg * h;
        if t < 0.0 {
            [-g, dg, -ddg]
        } else {
            [g, dg, ddg]
        }
    }

    /// `[g_rho(t), g_rho'(t), g_rho''(t)]` for `g_rho(t) = rho * g(t / rho)`.
    pub fn eval_scaled(&self, rho: f64, t: f64) -> [f64; 3] {
        let [g, dg, ddg] = self.eval(t / rho);
        [rho * g, dg, ddg / rho]
    }

    /// `sup |g''|`.
    pub fn max_second_derivative(&self) -> f64 {
        self.max_second
    }

    /// Breakpoints of the piecewise-polynomial representation on `[0, inf)`.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces.iter().map(|p| p.start).collect()
    }
}
