//! Integer bookkeeping behind the non-admissibility of an intersection of
//! aisles on the projective plane.
//!
//! Objects are complexes `U ⊗ O(1) -> W ⊗ O(2)` with `dim V = 3`, where `V`
//! is the space of linear forms. Only dimensions are modelled.

use serde::Serialize;

/// Dimension of `V`, the space of linear forms on the plane.
pub const VDIM: i64 = 3;

/// Euler pairing `χ(O(a), O(b))` on the projective plane.
pub fn chi_line(a: i64, b: i64) -> i64 {
    let d = b - a;
    (d + 1) * (d + 2) / 2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuiverRepDims {
    pub u: i64,
    pub w: i64,
}

impl QuiverRepDims {
    pub fn new(u: i64, w: i64) -> Self {
        debug_assert!(u >= 0 && w >= 0);
        QuiverRepDims { u, w }
    }

    /// Dimensions of an object in the intersection, where `dim U = 2 dim W`.
    pub fn balanced(w: i64) -> Self {
        QuiverRepDims { u: 2 * w, w }
    }
}

/// Euler characteristic of the two-term complex
/// `U* ⊗ U' ⊕ W* ⊗ W' -> U* ⊗ W' ⊗ V*` computing `Hom(F, G')`.
pub fn homfp_euler(r1: QuiverRepDims, r2: QuiverRepDims) -> i64 {
    r1.u * r2.u + r1.w * r2.w - VDIM * r1.u * r2.w
}

/// `χ(F, G)` for `G = O(-1)[1]`: the only nonzero group is `Hom¹(F, G) = W*`.
pub fn chi_against_shifted_line(f: QuiverRepDims) -> i64 {
    -f.w
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub w: i64,
    /// `χ(F, G)`.
    pub chi_fg: i64,
    /// `χ(F, G')` as a function of `w'` is `-w * w'`; this is its solution.
    pub forced_w_prime: Option<i64>,
    pub vacuous: bool,
    pub contradiction: bool,
    pub reason: String,
}

/// Solves `-w = χ(F, G) = χ(F, G') = -w * w'` for `w'`.
///
/// For `w >= 1` the only solution is `w' = 1`, but no indecomposable object
/// of the intersection has `dim W = 1`, so the adjoint cannot exist.
pub fn admissibility_contradiction(w: i64) -> AdmissibilityReport {
    let f = QuiverRepDims::balanced(w);
    let chi_fg = chi_against_shifted_line(f);
    if w == 0 {
        return AdmissibilityReport {
            w,
            chi_fg,
            forced_w_prime: None,
            vacuous: true,
            contradiction: false,
            reason: "dim W = 0: both sides vanish for every w'".into(),
        };
    }
    // -w = -w * w' is linear in w' with nonzero slope, so search is exact.
    let forced = (0..=w.abs() + 1)
        .find(|&wp| homfp_euler(f, QuiverRepDims::balanced(wp)) == chi_fg)
        .expect("w' = 1 always solves the equation");
    AdmissibilityReport {
        w,
        chi_fg,
        forced_w_prime: Some(forced),
        vacuous: false,
        contradiction: forced == 1,
        reason: "no indecomposable object of the intersection has dim W = 1".into(),
    }
}

impl std::fmt::Display for AdmissibilityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "dim W = {}, dim U = {}", self.w, 2 * self.w)?;
        writeln!(f, "chi(F, G) = {}", self.chi_fg)?;
        writeln!(f, "chi(F, G') = -{} * w'", self.w)?;
        match self.forced_w_prime {
            None => writeln!(f, "vacuous: {}", self.reason),
            Some(wp) => {
                writeln!(f, "forced w' = {wp}")?;
                if self.contradiction {
                    writeln!(f, "contradiction: {}", self.reason)
                } else {
                    writeln!(f, "no contradiction")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `h⁰(O(d))` on the plane, counted as monomials of degree `d` in three
    /// variables.
    fn sections(d: i64) -> i64 {
        (0..=d).map(|i| d - i + 1).sum()
    }

    #[test]
    fn line_pairings() {
        assert_eq!(chi_line(0, 0), 1);
        assert_eq!(chi_line(0, 1), VDIM);
        assert_eq!(chi_line(1, 0), 0);
        // For -2 <= b - a the pairing is h⁰(O(b - a)); O(-1) and O(-2) have no
        // cohomology at all.
        for a in -3..=3 {
            for b in a - 2..=a + 3 {
                assert_eq!(chi_line(a, b), sections(b - a), "({a}, {b})");
            }
        }
        // Serre duality: h²(O(-3)) = h⁰(O(0)) = 1.
        assert_eq!(chi_line(3, 0), 1);
    }

    #[test]
    fn hom_complex() {
        assert_eq!(homfp_euler(QuiverRepDims::new(2, 1), QuiverRepDims::new(2, 1)), -1);
        assert_eq!(homfp_euler(QuiverRepDims::new(7, 3), QuiverRepDims::new(0, 0)), 0);
        for w in 0..=20 {
            for wp in 0..=20 {
                let chi = homfp_euler(QuiverRepDims::balanced(w), QuiverRepDims::balanced(wp));
                assert_eq!(chi, -w * wp);
            }
        }
    }

    #[test]
    fn contradiction_report() {
        for w in [1, 5, 37] {
            let r = admissibility_contradiction(w);
            assert_eq!(r.forced_w_prime, Some(1));
            assert!(r.contradiction && !r.vacuous);
            assert_eq!(r.chi_fg, -w);
        }
        let r = admissibility_contradiction(0);
        assert!(r.vacuous && !r.contradiction);
        assert_eq!(r.forced_w_prime, None);
    }
}
