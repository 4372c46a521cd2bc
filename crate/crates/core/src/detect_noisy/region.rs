//! Certainty regions for successive base-frequency refinement.
//!
//! Level `c` observes `2^c ω (mod 2π)`. An estimate `ω̂_c` certifies
//! `2^c ω ∈ (ω̂_c - π/2, ω̂_c + π/2) (mod 2π)`, which in terms of `ω` is a
//! union of `2^c` arcs of width `π / 2^c`. Arcs are kept as intervals of the
//! real line; `ω` is understood modulo `2π`.

use std::f64::consts::{FRAC_PI_2, TAU};

/// Union of disjoint open intervals of the real line, read modulo `2π`.
#[derive(Clone, Debug, PartialEq)]
pub struct CertaintyRegion {
    arcs: Vec<(f64, f64)>,
}

impl CertaintyRegion {
    /// Level-0 region `(ω̂_0 - π/2, ω̂_0 + π/2)`.
    pub fn initial(estimate: f64) -> Self {
        Self {
            arcs: vec![(estimate - FRAC_PI_2, estimate + FRAC_PI_2)],
        }
    }

    /// Every arc of the level-`c` region `Ω_c / 2^c`, in `[0, 2π)` order of
    /// their left ends relative to `(ω̂_c - π/2) / 2^c`.
    pub fn unwrapped(estimate: f64, level: u32) -> Self {
        let scale = (1u64 << level) as f64;
        let arcs = (0..1u64 << level)
            .map(|j| {
                let shift = TAU * j as f64;
                (
                    (estimate - FRAC_PI_2 + shift) / scale,
                    (estimate + FRAC_PI_2 + shift) / scale,
                )
            })
            .collect();
        Self { arcs }
    }

    pub fn arcs(&self) -> &[(f64, f64)] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Total angular measure.
    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(|(a, b)| b - a).sum()
    }

    /// Intersects with the level-`c` region of `estimate`. Only the level-`c`
    /// arcs that overlap an existing arc are generated.
    pub fn refine(&mut self, estimate: f64, level: u32) {
        let scale = (1u64 << level) as f64;
        let mut next = Vec::with_capacity(self.arcs.len() * 2);
        for &(a, b) in &self.arcs {
            // Level arc j spans ((est - π/2 + 2πj) / 2^c, (est + π/2 + 2πj) / 2^c).
            let j_lo = ((a * scale - estimate - FRAC_PI_2) / TAU).floor() as i64;
            let j_hi = ((b * scale - estimate + FRAC_PI_2) / TAU).ceil() as i64;
            for j in j_lo..=j_hi {
                let shift = TAU * j as f64;
                let lo = ((estimate - FRAC_PI_2 + shift) / scale).max(a);
                let hi = ((estimate + FRAC_PI_2 + shift) / scale).min(b);
                if lo < hi {
                    next.push((lo, hi));
                }
            }
        }
        self.arcs = next;
    }

    /// Drops arcs that contain no grid point `2πk / n`.
    pub fn prune_to_grid(&mut self, n: usize) {
        self.arcs.retain(|&(a, b)| grid_range(a, b, n).is_some());
    }

    /// Grid indices `k ∈ [0, n)` with `2πk / n` inside the region, in arc
    /// order.
    pub fn grid_points(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        self.arcs.iter().flat_map(move |&(a, b)| {
            let (lo, hi) = grid_range(a, b, n).unwrap_or((1, 0));
            (lo..=hi).map(move |k| k.rem_euclid(n as i64) as usize)
        })
    }
}

/// Integer range `[lo, hi]` of `k` with `a <= 2πk/n <= b`.
fn grid_range(a: f64, b: f64, n: usize) -> Option<(i64, i64)> {
    let step = TAU / n as f64;
    let lo = (a / step).ceil() as i64;
    let hi = (b / step).floor() as i64;
    (lo <= hi).then_some((lo, hi))
}

/// Measure of the level-`c` unwrapped region; always `π`.
pub fn unwrapped_measure(estimate: f64, level: u32) -> f64 {
    CertaintyRegion::unwrapped(estimate, level).measure()
}
