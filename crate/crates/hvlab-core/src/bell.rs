//! Pair relationships and two-particle product-space states.
//!
//! A pair source emits two field vectors whose instantaneous components are
//! locked together by one of four relationships ([`BellKind`]). Writing the
//! first particle's components `(f, g)`, the pair lives in the four-product
//! basis `{e_x1 e_x2, e_x1 e_y2, e_y1 e_x2, e_y1 e_y2}` as a rank-one
//! product vector ([`VectorBellState`]); correlation structure emerges when
//! `(f, g) = (cos v, sin v)` fluctuates from window to window.
//!
//! The module also carries the four-particle swap identity: the product of
//! two same-kind antisymmetric pairs re-expands over the crossed (1,4)/(2,3)
//! pairings, in both the product-vector convention and the standard
//! two-level ket convention (the two differ by one coefficient sign).

use num_complex::Complex;
use thiserror::Error;

use crate::linalg::{LinalgError, TensorState, Vec2C};
use crate::rng::CounterRng;
use crate::scalar::{cast, Real};

/// The four pair relationships.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PhiMinus,
        BellKind::PsiPlus,
        BellKind::PsiMinus,
    ];

    /// Partner components for a first particle carrying `(f, g)`.
    ///
    /// Every rule is an isometry of the plane, so partner power equals
    /// source power exactly.
    pub fn map_components<T: Real>(self, f: T, g: T) -> (T, T) {
        match self {
            BellKind::PhiPlus => (f, g),
            BellKind::PsiMinus => (g, -f),
            BellKind::PsiPlus => (g, f),
            BellKind::PhiMinus => (f, -g),
        }
    }

    /// Where the partner's analyzer axis lands when station A filters at
    /// `alpha`: the image of the `alpha` axis under the component rule.
    ///
    /// Double filtering a partner stream uses this as its first axis; it
    /// yields the coincidence laws `cos^2(alpha - beta)` (PhiPlus),
    /// `sin^2(alpha - beta)` (PsiMinus), `cos^2(alpha + beta)` (PhiMinus)
    /// and `sin^2(alpha + beta)` (PsiPlus).
    pub fn mapped_axis<T: Real>(self, alpha: T) -> T {
        match self {
            BellKind::PhiPlus => alpha,
            BellKind::PsiMinus => alpha - T::FRAC_PI_2(),
            BellKind::PsiPlus => T::FRAC_PI_2() - alpha,
            BellKind::PhiMinus => -alpha,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BellKind::PhiPlus => "phi+",
            BellKind::PhiMinus => "phi-",
            BellKind::PsiPlus => "psi+",
            BellKind::PsiMinus => "psi-",
        }
    }
}

impl std::str::FromStr for BellKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "phi+" | "phi_plus" | "phiplus" => Ok(BellKind::PhiPlus),
            "phi-" | "phi_minus" | "phiminus" => Ok(BellKind::PhiMinus),
            "psi+" | "psi_plus" | "psiplus" => Ok(BellKind::PsiPlus),
            "psi-" | "psi_minus" | "psiminus" => Ok(BellKind::PsiMinus),
            other => Err(format!(
                "unknown pair kind `{other}` (expected phi+, phi-, psi+ or psi-)"
            )),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum BellError {
    #[error("pair slots must be distinct")]
    DegeneratePair,
    #[error("state parameters (f, g) must not both be zero")]
    ZeroNorm,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Two-particle product-space state of a pair with components `(f, g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorBellState<T: Real> {
    pub kind: BellKind,
    pub f: T,
    pub g: T,
    state: TensorState<T>,
}

/// Builds the pair state: first factor `(f, g)`, second factor the kind's
/// partner components.
pub fn make_bell<T: Real>(kind: BellKind, f: T, g: T) -> VectorBellState<T> {
    let (f2, g2) = kind.map_components(f, g);
    let a = Vec2C::from_real(f, g);
    let b = Vec2C::from_real(f2, g2);
    VectorBellState {
        kind,
        f,
        g,
        state: TensorState::product(&[a, b]),
    }
}

impl<T: Real> VectorBellState<T> {
    pub fn state(&self) -> &TensorState<T> {
        &self.state
    }

    /// First-particle factor.
    pub fn a_factor(&self) -> Vec2C<T> {
        Vec2C::from_real(self.f, self.g)
    }

    /// Second-particle factor.
    pub fn b_factor(&self) -> Vec2C<T> {
        let (f2, g2) = self.kind.map_components(self.f, self.g);
        Vec2C::from_real(f2, g2)
    }
}

/// Norm of a pair state; equals `f^2 + g^2` exactly for every kind.
pub fn bell_norm<T: Real>(s: &VectorBellState<T>) -> T {
    s.state.norm()
}

/// Euclidean inner product of two pair states at the same `(f, g)` instant.
/// Amplitudes are real, so the result is real.
pub fn bell_inner<T: Real>(s1: &VectorBellState<T>, s2: &VectorBellState<T>) -> T {
    s1.state
        .inner(&s2.state)
        .expect("pair states share the two-slot shape")
        .re
}

/// Mean and standard error of a sampled quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate<T> {
    pub mean: T,
    pub std_err: T,
    pub n: u64,
}

/// Averages `bell_inner(kind1, kind2)` over the window ensemble
/// `(f, g) = (cos v, sin v)`, `v` uniform on `[0, pi)`.
///
/// Same-kind inners average to 1 (unit power); cross-kind inners average to
/// zero, either identically (the orthogonal pairs) or through the `v`
/// fluctuations (all remaining pairs).
pub fn time_avg_inner<T: Real>(
    kind1: BellKind,
    kind2: BellKind,
    n_samples: u64,
    rng: &CounterRng,
) -> MeanEstimate<T> {
    assert!(n_samples >= 2, "need at least two samples for a std error");
    let mut sum = T::zero();
    let mut sum_sq = T::zero();
    for i in 0..n_samples {
        let v: T = rng.angle(i, 0);
        let (f, g) = (v.cos(), v.sin());
        let x = bell_inner(&make_bell(kind1, f, g), &make_bell(kind2, f, g));
        sum += x;
        sum_sq += x * x;
    }
    let n = cast::<T>(n_samples as f64);
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(T::zero());
    MeanEstimate {
        mean,
        std_err: (var / n).sqrt(),
        n: n_samples,
    }
}

// ---------------------------------------------------------------------------
// Four-particle states and the swap identity
// ---------------------------------------------------------------------------

/// Tensor product of two two-slot states placed on arbitrary distinct slots
/// of a larger register: slots `p_slots` carry `p`, slots `q_slots` carry
/// `q` (1-based slot labels).
pub fn place_pairs<T: Real>(
    p: &TensorState<T>,
    p_slots: (usize, usize),
    q: &TensorState<T>,
    q_slots: (usize, usize),
    total: usize,
) -> TensorState<T> {
    assert_eq!(p.slots(), 2);
    assert_eq!(q.slots(), 2);
    let mut used = [false; 16];
    for s in [p_slots.0, p_slots.1, q_slots.0, q_slots.1] {
        assert!(s >= 1 && s <= total && !used[s], "slots must be distinct");
        used[s] = true;
    }
    let bit = |idx: usize, slot: usize| (idx >> (total - slot)) & 1;
    let amps = (0..1usize << total)
        .map(|idx| {
            let pa = p.amps()[(bit(idx, p_slots.0) << 1) | bit(idx, p_slots.1)];
            let qa = q.amps()[(bit(idx, q_slots.0) << 1) | bit(idx, q_slots.1)];
            pa * qa
        })
        .collect();
    TensorState::from_amps(total, amps)
}

/// Product-vector convention of the crossed-pair expansion, all four terms
/// written over slots (1, 2, 3, 4). Factor sign conventions are fixed here
/// once; the identity test consumes them as-is.
fn vector_swap_rhs<T: Real>(f: T, g: T) -> TensorState<T> {
    let v = |x: T, y: T| Vec2C::from_real(x, y);
    // Every term shares slot 1 = (f, g) and slot 2 = (g, -f).
    let terms: [([Vec2C<T>; 4], T); 4] = [
        // psi+(1,4) x psi+(2,3)
        (
            [v(f, g), v(g, -f), v(-f, g), v(g, f)],
            T::one(),
        ),
        // psi-(1,4) x psi-(2,3)
        (
            [v(f, g), v(g, -f), v(-f, -g), v(g, -f)],
            -T::one(),
        ),
        // phi+(1,4) x phi+(2,3)
        (
            [v(f, g), v(g, -f), v(g, -f), v(f, g)],
            T::one(),
        ),
        // phi-(1,4) x phi-(2,3)
        (
            [v(f, g), v(g, -f), v(g, f), v(f, -g)],
            T::one(),
        ),
    ];
    let half = Complex::new(cast::<T>(0.5), T::zero());
    let mut acc = TensorState::zero(4);
    for (factors, sign) in terms {
        let term = TensorState::product(&factors).scale(Complex::new(sign, T::zero()));
        acc = acc.add(&term).expect("four-slot shapes match");
    }
    acc.scale(half)
}

/// Residual of the crossed-pair identity in the product-vector convention
/// (coefficient signs +, -, +, +): largest amplitude difference between
/// `psi-(1,2) x psi-(3,4)` and the four-term expansion.
pub fn swap_identity_residual<T: Real>(f: T, g: T) -> T {
    let a = Vec2C::from_real(f, g);
    let b = Vec2C::from_real(g, -f);
    let lhs = TensorState::product(&[a, b, a, b]);
    let rhs = vector_swap_rhs(f, g);
    lhs.sub(&rhs).expect("four-slot shapes match").max_abs()
}

/// Standard two-level Bell ket over two slots.
pub fn qm_bell_ket<T: Real>(kind: BellKind) -> TensorState<T> {
    let h = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
    let z = Complex::new(T::zero(), T::zero());
    let amps = match kind {
        // (|xy> + |yx>)/sqrt(2)
        BellKind::PsiPlus => vec![z, h, h, z],
        // (|xy> - |yx>)/sqrt(2)
        BellKind::PsiMinus => vec![z, h, -h, z],
        // (|xx> + |yy>)/sqrt(2)
        BellKind::PhiPlus => vec![h, z, z, h],
        // (|xx> - |yy>)/sqrt(2)
        BellKind::PhiMinus => vec![h, z, z, -h],
    };
    TensorState::from_amps(2, amps)
}

/// Residual of the crossed-pair identity in the ket convention
/// (coefficient signs +, -, -, +). Parameter-free: the kets carry no
/// `(f, g)` dependence.
pub fn swap_identity_residual_ket<T: Real>() -> T {
    let psi_m = qm_bell_ket::<T>(BellKind::PsiMinus);
    let lhs = place_pairs(&psi_m, (1, 2), &psi_m, (3, 4), 4);
    let kinds_signs = [
        (BellKind::PsiPlus, T::one()),
        (BellKind::PsiMinus, -T::one()),
        (BellKind::PhiPlus, -T::one()),
        (BellKind::PhiMinus, T::one()),
    ];
    let mut rhs = TensorState::zero(4);
    for (kind, sign) in kinds_signs {
        let pair = qm_bell_ket::<T>(kind);
        let term = place_pairs(&pair, (1, 4), &pair, (2, 3), 4)
            .scale(Complex::new(sign, T::zero()));
        rhs = rhs.add(&term).expect("four-slot shapes match");
    }
    rhs = rhs.scale(Complex::new(cast::<T>(0.5), T::zero()));
    lhs.sub(&rhs).expect("four-slot shapes match").max_abs()
}

/// Contracts slots `(i, j)` of `state` against the normalized pair state of
/// `kind` at `(f, g)`: slot `i` against the first factor, slot `j` against
/// the second. Returns the residual state on the remaining slots.
pub fn project_bell_pair<T: Real>(
    state: &TensorState<T>,
    pair: (usize, usize),
    kind: BellKind,
    f: T,
    g: T,
) -> Result<TensorState<T>, BellError> {
    let (i, j) = pair;
    if i == j {
        return Err(BellError::DegeneratePair);
    }
    let n = (f * f + g * g).sqrt();
    if n == T::zero() {
        return Err(BellError::ZeroNorm);
    }
    let inv = Complex::new(T::one() / n, T::zero());
    let bell = make_bell(kind, f, g);
    let a_hat = bell.a_factor().scale(inv);
    let b_hat = bell.b_factor().scale(inv);
    // Contract the higher slot first so the lower slot index stays valid.
    let (first_slot, first_axis, second_slot, second_axis) = if i > j {
        (i, &a_hat, j, &b_hat)
    } else {
        (j, &b_hat, i, &a_hat)
    };
    let once = state.partial_project(first_slot, first_axis)?;
    Ok(once.partial_project(second_slot, second_axis)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    fn random_fg(rng: &CounterRng, i: u64) -> (f64, f64) {
        let v: f64 = rng.angle(i, 0);
        (v.cos(), v.sin())
    }

    #[test]
    fn component_maps_match_amp_tables() {
        let (f, g) = (0.8, -0.3);
        let re = |s: &VectorBellState<f64>, i: usize| s.state().amps()[i].re;
        let psi_m = make_bell(BellKind::PsiMinus, f, g);
        // (fg, -f^2, g^2, -gf)
        assert!(close(re(&psi_m, 0), f * g));
        assert!(close(re(&psi_m, 1), -f * f));
        assert!(close(re(&psi_m, 2), g * g));
        assert!(close(re(&psi_m, 3), -g * f));
        let phi_p = make_bell(BellKind::PhiPlus, f, g);
        // (f^2, fg, gf, g^2)
        assert!(close(re(&phi_p, 0), f * f));
        assert!(close(re(&phi_p, 1), f * g));
        assert!(close(re(&phi_p, 2), g * f));
        assert!(close(re(&phi_p, 3), g * g));
        let psi_p = make_bell(BellKind::PsiPlus, f, g);
        assert!(close(re(&psi_p, 1), f * f));
        let phi_m = make_bell(BellKind::PhiMinus, f, g);
        assert!(close(re(&phi_m, 3), -g * g));
    }

    #[test]
    fn norms_equal_power_for_every_kind() {
        let rng = CounterRng::new(6);
        for i in 0..100 {
            let (f, g) = random_fg(&rng, i);
            // Use non-unit power too.
            let scale = 1.0 + 0.5 * rng.uniform::<f64>(i, 1);
            let (f, g) = (f * scale, g * scale);
            for kind in BellKind::ALL {
                let s = make_bell(kind, f, g);
                assert!(
                    (bell_norm(&s) - (f * f + g * g)).abs() < 1e-12,
                    "{kind:?} at ({f}, {g})"
                );
            }
        }
    }

    #[test]
    fn gram_zero_pattern_is_exact() {
        let rng = CounterRng::new(7);
        for i in 0..100 {
            let (f, g) = random_fg(&rng, i);
            let states: Vec<_> = BellKind::ALL
                .iter()
                .map(|&k| make_bell(k, f, g))
                .collect();
            for (a, sa) in states.iter().enumerate() {
                for (b, sb) in states.iter().enumerate() {
                    let x = bell_inner(sa, sb);
                    let pair = (BellKind::ALL[a], BellKind::ALL[b]);
                    let identically_zero = matches!(
                        pair,
                        (BellKind::PsiMinus, BellKind::PhiPlus)
                            | (BellKind::PhiPlus, BellKind::PsiMinus)
                            | (BellKind::PsiPlus, BellKind::PhiMinus)
                            | (BellKind::PhiMinus, BellKind::PsiPlus)
                    );
                    if identically_zero {
                        assert!(x.abs() < 1e-12, "{pair:?}: {x}");
                    }
                }
            }
        }
    }

    #[test]
    fn cross_inner_closed_forms() {
        let (f, g) = (0.6, 0.7);
        let n2 = f * f + g * g;
        let s = |k| make_bell::<f64>(k, f, g);
        assert!(close(
            bell_inner(&s(BellKind::PsiPlus), &s(BellKind::PhiPlus)),
            2.0 * f * g * n2
        ));
        assert!(close(
            bell_inner(&s(BellKind::PsiMinus), &s(BellKind::PsiPlus)),
            (g * g - f * f) * n2
        ));
        assert!(close(
            bell_inner(&s(BellKind::PhiPlus), &s(BellKind::PhiMinus)),
            (f * f - g * g) * n2
        ));
        assert!(close(
            bell_inner(&s(BellKind::PsiMinus), &s(BellKind::PhiMinus)),
            2.0 * f * g * n2
        ));
    }

    #[test]
    fn same_kind_average_is_unit() {
        let est = time_avg_inner::<f64>(
            BellKind::PsiMinus,
            BellKind::PsiMinus,
            1000,
            &CounterRng::new(11),
        );
        assert!(close(est.mean, 1.0));
        assert!(est.std_err < 1e-12);
    }

    #[test]
    fn cross_kind_averages_vanish() {
        let rng = CounterRng::new(12);
        let pairs = [
            (BellKind::PsiPlus, BellKind::PhiPlus),
            (BellKind::PsiMinus, BellKind::PsiPlus),
            (BellKind::PhiPlus, BellKind::PhiMinus),
            (BellKind::PsiMinus, BellKind::PhiMinus),
        ];
        for (i, (k1, k2)) in pairs.into_iter().enumerate() {
            let est = time_avg_inner::<f64>(k1, k2, 200_000, &rng.substream(i as u64));
            assert!(
                est.mean.abs() < 4.0 * est.std_err,
                "{k1:?} x {k2:?}: {} +- {}",
                est.mean,
                est.std_err
            );
        }
    }

    #[test]
    fn swap_identity_residual_is_tiny() {
        let rng = CounterRng::new(14);
        for i in 0..100 {
            let (f, g) = random_fg(&rng, i);
            let r = swap_identity_residual(f, g);
            assert!(r < 1e-12, "residual {r} at ({f}, {g})");
        }
    }

    #[test]
    fn ket_swap_identity_holds() {
        assert!(swap_identity_residual_ket::<f64>() < 1e-12);
    }

    #[test]
    fn place_pairs_matches_plain_product_on_adjacent_slots() {
        let p = qm_bell_ket::<f64>(BellKind::PhiPlus);
        let q = qm_bell_ket::<f64>(BellKind::PsiMinus);
        let direct = p.tensor(&q);
        let placed = place_pairs(&p, (1, 2), &q, (3, 4), 4);
        assert!(direct.sub(&placed).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn projecting_swap_state_onto_crossed_antisymmetric_pair() {
        let rng = CounterRng::new(15);
        for i in 0..20 {
            let (f, g) = random_fg(&rng, i);
            let a = Vec2C::from_real(f, g);
            let b = Vec2C::from_real(g, -f);
            let four = TensorState::product(&[a, b, a, b]);
            let resid = project_bell_pair(&four, (1, 4), BellKind::PsiMinus, f, g).unwrap();
            // The leftover (2,3) state is again an antisymmetric pair, whose
            // first factor is particle 2's instantaneous vector (g, -f).
            let expected = make_bell(BellKind::PsiMinus, g, -f);
            let overlap = resid
                .inner(expected.state())
                .unwrap()
                .re;
            let cosine = overlap / (resid.norm() * bell_norm(&expected));
            assert!(
                (cosine.abs() - 1.0).abs() < 1e-9,
                "not collinear at ({f}, {g}): cosine {cosine}"
            );
            // And the projection coefficient is the full pair power.
            assert!((resid.norm() - (f * f + g * g)).abs() < 1e-9);
        }
    }

    #[test]
    fn projecting_swap_state_onto_symmetric_pair_gives_zero() {
        let rng = CounterRng::new(16);
        for i in 0..20 {
            let (f, g) = random_fg(&rng, i);
            let a = Vec2C::from_real(f, g);
            let b = Vec2C::from_real(g, -f);
            let four = TensorState::product(&[a, b, a, b]);
            let resid = project_bell_pair(&four, (1, 4), BellKind::PhiPlus, f, g).unwrap();
            assert!(resid.max_abs() < 1e-12, "at ({f}, {g})");
        }
    }

    #[test]
    fn crossed_psi_plus_overlap_averages_to_zero() {
        // Projecting onto the symmetric-exchange pair leaves a residual
        // whose overlap with the antisymmetric (2,3) pair carries the
        // window-to-window factor g^2 - f^2; its ensemble mean vanishes.
        let rng = CounterRng::new(17);
        let n = 100_000u64;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for i in 0..n {
            let (f, g) = random_fg(&rng, i);
            let a = Vec2C::from_real(f, g);
            let b = Vec2C::from_real(g, -f);
            let four = TensorState::product(&[a, b, a, b]);
            let resid = project_bell_pair(&four, (1, 4), BellKind::PsiPlus, f, g).unwrap();
            let target = make_bell(BellKind::PsiMinus, g, -f);
            let x = resid.inner(target.state()).unwrap().re;
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / n as f64;
        let se = ((sum_sq / n as f64 - mean * mean) / n as f64).sqrt();
        assert!(mean.abs() < 4.0 * se, "mean {mean} +- {se}");
    }

    #[test]
    fn orthogonal_product_projects_to_zero() {
        // A pure product state of two orthogonal vectors, projected onto the
        // symmetric pair built from the first vector.
        let u = Vec2C::from_real(1.0, 0.0);
        let w = Vec2C::from_real(0.0, 1.0);
        let prod = TensorState::product(&[u, w]);
        let resid = project_bell_pair(&prod, (1, 2), BellKind::PhiPlus, 1.0, 0.0).unwrap();
        assert!(resid.max_abs() < 1e-15);
    }

    #[test]
    fn pair_errors() {
        let s = TensorState::<f64>::zero(4);
        assert_eq!(
            project_bell_pair(&s, (2, 2), BellKind::PhiPlus, 1.0, 0.0).unwrap_err(),
            BellError::DegeneratePair
        );
        assert_eq!(
            project_bell_pair(&s, (1, 2), BellKind::PhiPlus, 0.0, 0.0).unwrap_err(),
            BellError::ZeroNorm
        );
        assert!(matches!(
            project_bell_pair(&s, (1, 5), BellKind::PhiPlus, 1.0, 0.0),
            Err(BellError::Linalg(LinalgError::SlotOutOfRange { .. }))
        ));
    }

    #[test]
    fn kind_labels_round_trip() {
        for kind in BellKind::ALL {
            let parsed: BellKind = kind.label().parse().unwrap();
            assert_eq!(parsed, kind);
        }
        assert!("phi*".parse::<BellKind>().is_err());
    }

    proptest! {
        #[test]
        fn mapped_axis_consistent_with_component_map(alpha in -3.0f64..3.0) {
            use crate::scalar::axis_distance;
            // The partner of a source polarized exactly along alpha is
            // polarized along mapped_axis(alpha).
            for kind in BellKind::ALL {
                let (pf, pg) = kind.map_components(alpha.cos(), alpha.sin());
                let partner_angle = pg.atan2(pf);
                let d = axis_distance(partner_angle, kind.mapped_axis(alpha));
                prop_assert!(d < 1e-9, "{:?}: {} vs {}", kind, partner_angle, kind.mapped_axis(alpha));
            }
        }

        #[test]
        fn swap_residual_small_everywhere(f in -2.0f64..2.0, g in -2.0f64..2.0) {
            prop_assert!(swap_identity_residual(f, g) < 1e-10);
        }
    }
}
