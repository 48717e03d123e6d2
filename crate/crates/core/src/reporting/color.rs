//! Blue-to-red color ramp for difficulty maps.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Ramp stops: blue, cyan, green, yellow, red.
const STOPS: [[f64; 3]; 5] = [
    [0.0, 0.0, 255.0],
    [0.0, 255.0, 255.0],
    [0.0, 255.0, 0.0],
    [255.0, 255.0, 0.0],
    [255.0, 0.0, 0.0],
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub enum ColorScale {
    /// Field minimum maps to blue, field maximum to red.
    #[default]
    Auto,
    /// Fixed range; values outside are clamped.
    Fixed { lo: f64, hi: f64 },
}

impl FromStr for ColorScale {
    type Err = String;

    /// `auto` or `LO:HI`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(ColorScale::Auto);
        }
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| format!("scale `{s}` is neither `auto` nor `LO:HI`"))?;
        let lo: f64 = lo.trim().parse().map_err(|e| format!("scale low bound: {e}"))?;
        let hi: f64 = hi.trim().parse().map_err(|e| format!("scale high bound: {e}"))?;
        ColorScale::fixed(lo, hi)
    }
}

impl ColorScale {
    pub fn fixed(lo: f64, hi: f64) -> Result<Self, String> {
        if lo < hi {
            Ok(ColorScale::Fixed { lo, hi })
        } else {
            Err(format!("scale needs lo < hi, got {lo}:{hi}"))
        }
    }

    /// Resolves the scale against a field's values.
    pub fn range(&self, values: &[f64]) -> (f64, f64) {
        match *self {
            ColorScale::Fixed { lo, hi } => (lo, hi),
            ColorScale::Auto => {
                let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if lo.is_finite() {
                    (lo, hi)
                } else {
                    (0.0, 1.0)
                }
            }
        }
    }
}

/// Position on the ramp in `[0, 1]`. A degenerate range maps everything to blue.
pub fn ramp_position(value: f64, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        ((value - lo) / (hi - lo)).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

pub fn ramp_color(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (t.floor() as usize).min(STOPS.len() - 2);
    let f = t - i as f64;
    std::array::from_fn(|c| (STOPS[i][c] + (STOPS[i + 1][c] - STOPS[i][c]) * f).round() as u8)
}
