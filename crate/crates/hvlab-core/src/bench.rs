//! Event-level optical bench: splitters, wave plates, windowed detection,
//! photon bunching, entanglement swapping and the triple-coincidence
//! generation pipeline.
//!
//! Fields are continuous two-component vectors; detectors integrate energy
//! over fixed windows and fire once a full unit `u` has arrived. Photon
//! talk ("both photons at one gate") is shorthand for how the integrated
//! energy distributes over output gates within a window.
//!
//! Two post-selection experiments are built from these parts:
//!
//! * [`swap_run`] interferes one particle from each of two independent
//!   antisymmetric pairs on a balanced splitter and keeps windows where
//!   both output detectors fire together; on the kept ensemble the two
//!   leftover particles show the antisymmetric coincidence law
//!   `sin^2(alpha - beta)/2`, up to a bias of order `tol^2` from the
//!   finite coincidence window. Without the post-selection the same
//!   statistic is flat at 1/4.
//! * [`ghz_pipeline_run`] routes two independent pairs through a
//!   trigger splitter, a half-wave plate, a balanced splitter and a
//!   polarizing splitter; pulses where all four detectors fire in one
//!   window carry the symmetric triple-particle state, and discrete
//!   integrate-and-fire counters reproduce the analytic count table of
//!   [`crate::ghz`].

use std::io::{self, Write as IoWrite};

use num_complex::Complex;

use crate::bell::BellKind;
use crate::ghz::{outcome_axis, setting_operator, GhzConfig, Setting};
use crate::linalg::{Mat, TensorState, Vec2C, C};
use crate::rng::CounterRng;
use crate::scalar::{cast, fold_angle, Real};
use crate::stream::HvStream;

/// Two integrated energies closer than this are an exact tie; the event is
/// discarded rather than decided arbitrarily.
pub const TIE_TOLERANCE: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

/// Catalogue of bench elements. The three wave-plate style elements carry
/// their axis angle and act through a standard 2x2 polarization matrix;
/// the two splitters have port semantics provided by [`bs_transform`] and
/// [`pbs_split`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpticalElement<T: Real> {
    /// Balanced non-polarizing splitter.
    BeamSplitter,
    /// Polarizing splitter: transmits the x component, reflects y.
    PolarizingBs,
    /// Half-wave plate, fast axis at the given angle.
    HalfWave(T),
    /// Quarter-wave plate, fast axis at the given angle.
    QuarterWave(T),
    /// Ideal linear polarizer along the given angle.
    Polarizer(T),
}

impl<T: Real> OpticalElement<T> {
    /// The 2x2 polarization matrix, for the elements that act on a single
    /// beam (`None` for the two splitters).
    pub fn jones(&self) -> Option<Mat<C<T>>> {
        let re = |x: T| Complex::new(x, T::zero());
        match *self {
            OpticalElement::BeamSplitter | OpticalElement::PolarizingBs => None,
            OpticalElement::HalfWave(theta) => {
                let (s, c) = ((theta + theta).sin(), (theta + theta).cos());
                Some(Mat::from_rows(&[&[re(c), re(s)], &[re(s), re(-c)]]))
            }
            OpticalElement::QuarterWave(theta) => {
                let (s, c) = (theta.sin(), theta.cos());
                let i = Complex::new(T::zero(), T::one());
                let one = Complex::new(T::one(), T::zero());
                let m00 = re(c * c) + i * re(s * s);
                let m11 = re(s * s) + i * re(c * c);
                let m01 = re(c * s) * (one - i);
                Some(Mat::from_rows(&[&[m00, m01], &[m01, m11]]))
            }
            OpticalElement::Polarizer(theta) => {
                let (s, c) = (theta.sin(), theta.cos());
                Some(Mat::from_rows(&[
                    &[re(c * c), re(c * s)],
                    &[re(c * s), re(s * s)],
                ]))
            }
        }
    }
}

/// Balanced splitter: `vc = (va + vb)/sqrt(2)`, `vd = (va - vb)/sqrt(2)`.
pub fn bs_transform<T: Real>(va: &Vec2C<T>, vb: &Vec2C<T>) -> (Vec2C<T>, Vec2C<T>) {
    let h = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
    (va.add(vb).scale(h), va.sub(vb).scale(h))
}

/// Polarizing splitter on one beam: (transmitted x part, reflected y part).
pub fn pbs_split<T: Real>(v: &Vec2C<T>) -> (Vec2C<T>, Vec2C<T>) {
    let zero = Complex::new(T::zero(), T::zero());
    (Vec2C::new(v.x, zero), Vec2C::new(zero, v.y))
}

/// Energy collected from a stream inside the window
/// `[start, start + len)`, with partial overlap of boundary intervals
/// counted proportionally.
pub fn window_integral<T: Real>(s: &HvStream<T>, start: T, len: T) -> T {
    assert!(len >= T::zero(), "window length must be non-negative");
    let dt = s.dt();
    let end = start + len;
    let mut total = T::zero();
    for (k, iv) in s.intervals().iter().enumerate() {
        let k_t = cast::<T>(k as f64);
        let lo = k_t * dt;
        let hi = lo + dt;
        let overlap = (hi.min(end) - lo.max(start)).max(T::zero());
        total += iv.p * overlap;
    }
    total
}

// ---------------------------------------------------------------------------
// Photon bunching at a balanced splitter
// ---------------------------------------------------------------------------

/// How a window's two input photons distribute over the splitter outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HomOutcome {
    /// Both photons exit gate C: counts (2, 0).
    BothAtC,
    /// Both photons exit gate D: counts (0, 2).
    BothAtD,
    /// One photon at each gate: counts (1, 1).
    Coincidence,
    /// Exact tie under the winner-take-all rule; the window is dropped.
    Discarded,
}

impl HomOutcome {
    /// Photon counts at (C, D); `None` for a discarded window.
    pub fn gate_counts(self) -> Option<(u8, u8)> {
        match self {
            HomOutcome::BothAtC => Some((2, 0)),
            HomOutcome::BothAtD => Some((0, 2)),
            HomOutcome::Coincidence => Some((1, 1)),
            HomOutcome::Discarded => None,
        }
    }
}

/// Output-gate energy integrals `(m_c, m_d)` for a pair of kind `kind`
/// whose first particle sits at hidden angle `v`, at unit power and unit
/// detection quantum.
pub fn hom_integrals<T: Real>(kind: BellKind, v: T) -> (T, T) {
    let va = Vec2C::from_angle(v);
    let (f2, g2) = kind.map_components(v.cos(), v.sin());
    let vb = Vec2C::from_real(f2, g2);
    let (vc, vd) = bs_transform(&va, &vb);
    (vc.norm_sqr(), vd.norm_sqr())
}

/// Splitter outcome for one window of a `kind` pair at hidden angle `v`.
///
/// The symmetric kind sends all energy to C in every window; the
/// antisymmetric kind delivers exactly one unit to each gate in every
/// window. The two remaining kinds split the energy unevenly and the
/// winner-take-all rule books both photons at the gate with the larger
/// integral, discarding exact ties.
pub fn hom_outcome<T: Real>(kind: BellKind, v: T) -> HomOutcome {
    let (m_c, m_d) = hom_integrals(kind, v);
    match kind {
        BellKind::PhiPlus => {
            debug_assert!(m_d < cast::<T>(TIE_TOLERANCE));
            HomOutcome::BothAtC
        }
        BellKind::PsiMinus => {
            debug_assert!((m_c - T::one()).abs() < cast::<T>(TIE_TOLERANCE));
            debug_assert!((m_d - T::one()).abs() < cast::<T>(TIE_TOLERANCE));
            HomOutcome::Coincidence
        }
        BellKind::PhiMinus | BellKind::PsiPlus => {
            if (m_c - m_d).abs() <= cast::<T>(TIE_TOLERANCE) {
                HomOutcome::Discarded
            } else if m_c > m_d {
                HomOutcome::BothAtC
            } else {
                HomOutcome::BothAtD
            }
        }
    }
}

/// Outcome totals over repeated windows.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HomTally {
    pub both_c: u64,
    pub both_d: u64,
    pub coincidence: u64,
    pub discarded: u64,
}

/// Runs `n` independent windows of a `kind` pair with uniformly random
/// hidden angles.
pub fn hom_trials<T: Real>(kind: BellKind, n: u64, rng: &CounterRng) -> HomTally {
    let mut tally = HomTally::default();
    for i in 0..n {
        let v: T = rng.angle(i, 0);
        match hom_outcome(kind, v) {
            HomOutcome::BothAtC => tally.both_c += 1,
            HomOutcome::BothAtD => tally.both_d += 1,
            HomOutcome::Coincidence => tally.coincidence += 1,
            HomOutcome::Discarded => tally.discarded += 1,
        }
    }
    tally
}

// ---------------------------------------------------------------------------
// Entanglement swapping
// ---------------------------------------------------------------------------

/// Parameters of a swap run: window count, the two leftover-particle
/// analyzer angles and the coincidence-window tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapConfig<T> {
    pub n_windows: u64,
    pub alpha: T,
    pub beta: T,
    /// Both splitter detectors must integrate within `tol` of one unit for
    /// the window to count as a simultaneous detection.
    pub tol: T,
}

impl<T: Real> SwapConfig<T> {
    /// Default coincidence tolerance 0.02 (keeps about 1.3% of windows).
    pub fn new(n_windows: u64, alpha: T, beta: T) -> Self {
        SwapConfig {
            n_windows,
            alpha,
            beta,
            tol: cast::<T>(0.02),
        }
    }
}

/// Statistics of a swap run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapRunResult<T> {
    pub n_windows: u64,
    pub kept: u64,
    pub kept_fraction: T,
    /// Mean coincidence weight over the post-selected windows.
    pub coincidence_rate: T,
    pub coincidence_se: T,
    /// Mean of the same weight over every window, post-selection ignored.
    pub unconditioned_rate: T,
    pub unconditioned_se: T,
}

/// One run of the swap experiment.
///
/// Each window draws two independent antisymmetric pairs; particles 1 and 4
/// meet on a balanced splitter whose output integrals are `1 +- V1.V4`.
/// Simultaneous firing of both outputs requires `|cos(v1 - v4)| <= tol`,
/// which pins the leftover particles 2 and 3 into the antisymmetric
/// relationship. The kept-window coincidence weight measures particle 2 at
/// `alpha` and particle 3 at the `alpha` axis carried through the pair's
/// actual relative rotation, exactly as the stream model's double filter.
pub fn swap_run<T: Real>(cfg: &SwapConfig<T>, rng: &CounterRng) -> SwapRunResult<T> {
    assert!(cfg.n_windows >= 1);
    let half_pi = T::FRAC_PI_2();
    let mut kept = 0u64;
    let mut kept_sum = T::zero();
    let mut kept_sq = T::zero();
    let mut all_sum = T::zero();
    let mut all_sq = T::zero();

    for i in 0..cfg.n_windows {
        let v1: T = rng.angle(i, 0);
        let v3: T = rng.angle(i, 1);
        let v2 = fold_angle(v1 - half_pi);
        let v4 = fold_angle(v3 - half_pi);
        // Splitter integrals are 1 +- cos(v1 - v4); both detectors fire
        // together only in the narrow band around orthogonal inputs.
        let overlap = (v1 - v4).cos();
        let delta = v3 - v2;
        let q = (v2 - cfg.alpha).cos().powi(2)
            * (cfg.alpha + delta - cfg.beta).cos().powi(2);
        all_sum += q;
        all_sq += q * q;
        if overlap.abs() <= cfg.tol {
            kept += 1;
            kept_sum += q;
            kept_sq += q * q;
        }
    }

    let n = cast::<T>(cfg.n_windows as f64);
    let mean_se = |sum: T, sq: T, count: u64| {
        if count == 0 {
            return (T::zero(), T::zero());
        }
        let c = cast::<T>(count as f64);
        let mean = sum / c;
        let var = (sq / c - mean * mean).max(T::zero());
        (mean, (var / c).sqrt())
    };
    let (coincidence_rate, coincidence_se) = mean_se(kept_sum, kept_sq, kept);
    let (unconditioned_rate, unconditioned_se) = mean_se(all_sum, all_sq, cfg.n_windows);
    SwapRunResult {
        n_windows: cfg.n_windows,
        kept,
        kept_fraction: cast::<T>(kept as f64) / n,
        coincidence_rate,
        coincidence_se,
        unconditioned_rate,
        unconditioned_se,
    }
}

/// One grid point of a swap sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint<T> {
    pub delta: T,
    pub kept: u64,
    pub rate: T,
    pub rate_se: T,
    pub unconditioned_rate: T,
    pub unconditioned_se: T,
}

/// Sweeps the analyzer offset `delta = alpha - beta` over a grid, running
/// an independent swap experiment per point (alpha fixed at zero).
pub fn swap_sweep<T: Real>(
    n_windows_per_point: u64,
    deltas: &[T],
    tol: T,
    rng: &CounterRng,
) -> Vec<SweepPoint<T>> {
    deltas
        .iter()
        .enumerate()
        .map(|(k, &delta)| {
            let cfg = SwapConfig {
                n_windows: n_windows_per_point,
                alpha: T::zero(),
                beta: -delta,
                tol,
            };
            let res = swap_run(&cfg, &rng.substream(k as u64));
            SweepPoint {
                delta,
                kept: res.kept,
                rate: res.coincidence_rate,
                rate_se: res.coincidence_se,
                unconditioned_rate: res.unconditioned_rate,
                unconditioned_se: res.unconditioned_se,
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Triple-coincidence generation pipeline
// ---------------------------------------------------------------------------

/// Pipeline parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineConfig {
    pub n_pulses: u64,
    /// Record a per-pulse event log (integrals, flags, status).
    pub record_events: bool,
}

/// Why a pulse was kept or dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseStatus {
    Kept,
    /// The trigger detector did not fire; the pulse is not counted at all.
    NoTrigger,
    /// The trigger fired but some other detector stayed below threshold.
    MissingDetection,
    /// Exact energy tie at the polarizing splitter.
    SplitterTie,
}

impl PulseStatus {
    pub fn label(self) -> &'static str {
        match self {
            PulseStatus::Kept => "kept",
            PulseStatus::NoTrigger => "no_trigger",
            PulseStatus::MissingDetection => "missing_detection",
            PulseStatus::SplitterTie => "splitter_tie",
        }
    }
}

/// Event-log entry for one pulse: window integrals at (T, D1, D2, D3),
/// their firing flags, and the pulse's fate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineEvent<T> {
    pub pulse: u64,
    pub integrals: [T; 4],
    pub fired: [bool; 4],
    pub status: PulseStatus,
}

/// Outcome of a pipeline run: pulse bookkeeping plus the discrete
/// triple-count table accumulated over the kept ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult<T> {
    pub n_pulses: u64,
    pub kept: u64,
    pub no_trigger: u64,
    pub missing_detection: u64,
    pub ties: u64,
    /// Discrete counts per (configuration, outcome triple), all 64 cells.
    pub counts: Vec<(GhzConfig, [i8; 3], u64)>,
    pub events: Option<Vec<PipelineEvent<T>>>,
}

impl<T: Real> PipelineResult<T> {
    /// Count fractions normalized within each configuration.
    pub fn fractions(&self) -> Vec<(GhzConfig, [i8; 3], T)> {
        self.counts
            .iter()
            .map(|&(cfg, outcomes, count)| {
                let config_total: u64 = self
                    .counts
                    .iter()
                    .filter(|(c, _, _)| *c == cfg)
                    .map(|&(_, _, n)| n)
                    .sum();
                let f = if config_total == 0 {
                    T::zero()
                } else {
                    cast::<T>(count as f64) / cast::<T>(config_total as f64)
                };
                (cfg, outcomes, f)
            })
            .collect()
    }
}

fn outcome_triples() -> [[i8; 3]; 8] {
    let mut out = [[1i8; 3]; 8];
    for (idx, triple) in out.iter_mut().enumerate() {
        for slot in 0..3 {
            if (idx >> (2 - slot)) & 1 == 1 {
                triple[slot] = -1;
            }
        }
    }
    out
}

/// Runs the generation pipeline.
///
/// Per pulse, two independent pairs are drawn with powers uniform in
/// `[u/2, 3u/2]`. One pair contributes a horizontal photon to the trigger
/// and a vertical photon to the splitter; the other contributes a
/// horizontal photon to the splitter and a vertical photon that a half-wave
/// plate rotates to the diagonal before the polarizing splitter. Window
/// integrals work out to `(P_a, P_b, (P_a+P_b)/2, (P_a+P_b)/2)` at
/// (T, D1, D2, D3), so all four detectors fire exactly when both pair
/// powers reach one unit, which keeps about a quarter of the pulses.
///
/// Exactly two discrete routings put one photon on each detector (see
/// [`enumerate_routings`]); their coherent sum, with the D3 axes relabeled
/// a quarter turn, is the symmetric triple-particle state. Kept pulses
/// feed 64 integrate-and-fire counters, one per (configuration, outcome)
/// cell, with the squared projection weight of that pulse's state.
pub fn ghz_pipeline_run<T: Real>(cfg: &PipelineConfig, rng: &CounterRng) -> PipelineResult<T> {
    assert!(cfg.n_pulses >= 1);
    let unit = T::one();
    let half = cast::<T>(0.5);

    // Projection tensors for all 64 cells, in table order.
    let cells: Vec<(GhzConfig, [i8; 3], TensorState<T>)> = GhzConfig::all()
        .iter()
        .flat_map(|&config| {
            outcome_triples().into_iter().map(move |outcomes| {
                let axes: Vec<Vec2C<T>> = (0..3)
                    .map(|s| outcome_axis(config.0[s], outcomes[s]))
                    .collect();
                (config, outcomes, TensorState::product(&axes))
            })
        })
        .collect();
    let relabel = setting_operator::<T>(Setting::L);

    let mut acc = vec![T::zero(); cells.len()];
    let mut counts = vec![0u64; cells.len()];
    let mut kept = 0u64;
    let mut no_trigger = 0u64;
    let mut missing = 0u64;
    let mut ties = 0u64;
    let mut events = cfg.record_events.then(Vec::new);

    for pulse in 0..cfg.n_pulses {
        let p_a: T = rng.uniform_in(pulse, 0, half, cast::<T>(1.5));
        let p_b: T = rng.uniform_in(pulse, 1, half, cast::<T>(1.5));
        let shared = (p_a + p_b) * half;
        let integrals = [p_a, p_b, shared, shared];
        let fired = integrals.map(|m| m >= unit);

        let status = if !fired[0] {
            PulseStatus::NoTrigger
        } else if !(fired[1] && fired[2] && fired[3]) {
            PulseStatus::MissingDetection
        } else if (p_a - p_b).abs() <= cast::<T>(2.0 * TIE_TOLERANCE) {
            // The two beams meeting at the polarizing splitter carry
            // exactly equal energy: no winner, drop the pulse.
            PulseStatus::SplitterTie
        } else {
            PulseStatus::Kept
        };

        match status {
            PulseStatus::NoTrigger => no_trigger += 1,
            PulseStatus::MissingDetection => missing += 1,
            PulseStatus::SplitterTie => ties += 1,
            PulseStatus::Kept => {
                kept += 1;
                // Coherent sum of the two routings that light all four
                // detectors, in the (D1, D2, D3) slot order: vertical at
                // D1 and D2 with horizontal at D3, plus horizontal at D1
                // and D2 with vertical at D3. Both carry the same weight;
                // splitter path phases cancel against each other.
                let w = Complex::new(
                    p_a.sqrt() * p_b / (cast::<T>(2.0) * T::SQRT_2()),
                    T::zero(),
                );
                let mut amps = vec![Complex::new(T::zero(), T::zero()); 8];
                amps[0b110] = w;
                amps[0b001] = w;
                let state = TensorState::from_amps(3, amps)
                    .apply_one(3, &relabel)
                    .expect("three-slot state");
                for (k, (_, _, axes)) in cells.iter().enumerate() {
                    let weight = axes
                        .inner(&state)
                        .expect("three-slot shapes match")
                        .norm_sqr();
                    acc[k] += weight;
                    while acc[k] >= unit {
                        counts[k] += 1;
                        acc[k] -= unit;
                    }
                }
            }
        }
        if let Some(log) = events.as_mut() {
            log.push(PipelineEvent {
                pulse,
                integrals,
                fired,
                status,
            });
        }
    }

    PipelineResult {
        n_pulses: cfg.n_pulses,
        kept,
        no_trigger,
        missing_detection: missing,
        ties,
        counts: cells
            .iter()
            .zip(counts)
            .map(|((config, outcomes, _), n)| (*config, *outcomes, n))
            .collect(),
        events,
    }
}

/// Writes the pipeline event log as CSV.
pub fn write_event_csv<T: Real, W: IoWrite>(
    events: &[PipelineEvent<T>],
    mut w: W,
) -> io::Result<()> {
    writeln!(
        w,
        "pulse,m_t,m_d1,m_d2,m_d3,fired_t,fired_d1,fired_d2,fired_d3,status"
    )?;
    for e in events {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            e.pulse,
            e.integrals[0],
            e.integrals[1],
            e.integrals[2],
            e.integrals[3],
            e.fired[0] as u8,
            e.fired[1] as u8,
            e.fired[2] as u8,
            e.fired[3] as u8,
            e.status.label()
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Discrete routing enumeration
// ---------------------------------------------------------------------------

/// One discrete way the three movable photons can route through the bench:
/// the two splitter inputs each choose an output, and the wave-plate
/// photon leaves the polarizing splitter as one of its two components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Routing {
    /// Vertical photon of pair a exits the splitter toward D3 (else it
    /// turns toward the polarizing splitter).
    pub va_to_c: bool,
    /// Horizontal photon of pair b exits the splitter toward D3.
    pub hb_to_c: bool,
    /// The rotated photon leaves the polarizing splitter as its horizontal
    /// component (toward D2) rather than its vertical one (toward D1).
    pub hwp_as_horizontal: bool,
    /// Photon count at (T, D1, D2, D3).
    pub occupancy: [u8; 4],
    /// Polarization letters seen at (D1, D2, D3) when each detector holds
    /// exactly one photon.
    pub detector_axes: Option<[char; 3]>,
}

/// Enumerates all eight discrete routings and their detector occupancies.
/// Exactly two of them put one photon on every detector.
pub fn enumerate_routings() -> Vec<Routing> {
    let mut out = Vec::with_capacity(8);
    for va_to_c in [false, true] {
        for hb_to_c in [false, true] {
            for hwp_as_horizontal in [false, true] {
                // T always holds the trigger photon.
                let mut occ = [1u8, 0, 0, 0];
                let mut axes = ['\0'; 3];
                // Splitter output c feeds D3; output d feeds the
                // polarizing splitter, which sorts by polarization:
                // horizontal to D1, vertical to D2.
                if va_to_c {
                    occ[3] += 1;
                    axes[2] = 'y';
                } else {
                    occ[2] += 1;
                    axes[1] = 'y';
                }
                if hb_to_c {
                    occ[3] += 1;
                    axes[2] = 'x';
                } else {
                    occ[1] += 1;
                    axes[0] = 'x';
                }
                if hwp_as_horizontal {
                    occ[2] += 1;
                    axes[1] = 'x';
                } else {
                    occ[1] += 1;
                    axes[0] = 'y';
                }
                let fourfold = occ == [1, 1, 1, 1];
                out.push(Routing {
                    va_to_c,
                    hb_to_c,
                    hwp_as_horizontal,
                    occupancy: occ,
                    detector_axes: fourfold.then_some(axes),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ghz::full_table;
    use crate::stats::fit_sin2;
    use crate::stream::Interval;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn splitter_special_cases() {
        let va = Vec2C::from_real(0.3, -0.4);
        let (vc, vd) = bs_transform(&va, &va);
        assert!(close(vc.norm_sqr(), 2.0 * va.norm_sqr()));
        assert!(close(vd.norm_sqr(), 0.0));
        let (vc, vd) = bs_transform(&va, &Vec2C::zero());
        assert!(close(vc.norm_sqr(), 0.5 * va.norm_sqr()));
        assert!(close(vd.norm_sqr(), 0.5 * va.norm_sqr()));
    }

    #[test]
    fn pbs_sorts_components() {
        let v = Vec2C::from_real(0.6, 0.8);
        let (t, r) = pbs_split(&v);
        assert!(close(t.norm_sqr(), 0.36));
        assert!(close(r.norm_sqr(), 0.64));
        assert!(close(t.norm_sqr() + r.norm_sqr(), v.norm_sqr()));
    }

    #[test]
    fn wave_plates_conserve_energy() {
        let rng = CounterRng::new(21);
        for i in 0..50 {
            let v = Vec2C::from_angle(rng.angle::<f64>(i, 0)).scale(Complex::new(1.3, 0.0));
            let theta: f64 = rng.angle(i, 1);
            for element in [
                OpticalElement::HalfWave(theta),
                OpticalElement::QuarterWave(theta),
            ] {
                let m = element.jones().unwrap();
                let w = crate::linalg::apply2(&m, &v);
                assert!(
                    (w.norm_sqr() - v.norm_sqr()).abs() < 1e-12,
                    "{element:?} at {theta}"
                );
            }
        }
        assert!(OpticalElement::<f64>::BeamSplitter.jones().is_none());
        assert!(OpticalElement::<f64>::PolarizingBs.jones().is_none());
    }

    #[test]
    fn half_wave_plate_rotates_vertical_to_diagonal() {
        let hwp = OpticalElement::HalfWave(3.0 * std::f64::consts::FRAC_PI_8);
        let m = hwp.jones().unwrap();
        let out = crate::linalg::apply2(&m, &Vec2C::from_real(0.0, 1.0));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(out.x.re, h));
        assert!(close(out.y.re, h));
    }

    #[test]
    fn polarizer_is_idempotent_projector() {
        let pol = OpticalElement::Polarizer(0.7_f64);
        let m = pol.jones().unwrap();
        let twice = m.mul(&m.clone());
        for r in 0..2 {
            for c in 0..2 {
                assert!((twice.get(r, c) - m.get(r, c)).norm() < 1e-12);
            }
        }
        let v = Vec2C::from_real(1.0, -2.0);
        let once = crate::linalg::apply2(&m, &v);
        // Output is polarized along the polarizer axis.
        let axis = Vec2C::from_angle(0.7_f64);
        let overlap = crate::linalg::inner(&axis, &once).re;
        assert!(close(once.norm_sqr(), overlap * overlap / axis.norm_sqr()));
    }

    #[test]
    fn window_integral_basics() {
        let s = HvStream::new(1.0, vec![Interval { v: 0.0, p: 1.0 }; 4]);
        assert!(close(window_integral(&s, 0.0, 1.0), 1.0));
        assert!(close(window_integral(&s, 0.0, 0.0), 0.0));
        let zero = HvStream::new(1.0, vec![Interval { v: 0.0, p: 0.0 }; 4]);
        assert!(close(window_integral(&zero, 0.0, 3.0), 0.0));
        // Additivity over disjoint windows.
        let parts =
            window_integral(&s, 0.0, 1.5) + window_integral(&s, 1.5, 1.0) + window_integral(&s, 2.5, 1.5);
        assert!(close(parts, window_integral(&s, 0.0, 4.0)));
        // Partial overlap weights by covered length.
        let ramp = HvStream::new(1.0, vec![Interval { v: 0.0, p: 1.0 }, Interval { v: 0.0, p: 2.0 }]);
        assert!(close(window_integral(&ramp, 0.5, 1.0), 0.5 + 1.0));
    }

    #[test]
    fn hom_integral_tables() {
        let v = 0.7_f64;
        let (f, g) = (v.cos(), v.sin());
        let (c, d) = hom_integrals(BellKind::PhiPlus, v);
        assert!(close(c, 2.0) && close(d, 0.0));
        let (c, d) = hom_integrals(BellKind::PsiMinus, v);
        assert!(close(c, 1.0) && close(d, 1.0));
        let (c, d) = hom_integrals(BellKind::PhiMinus, v);
        assert!(close(c, 2.0 * f * f) && close(d, 2.0 * g * g));
        let (c, d) = hom_integrals(BellKind::PsiPlus, v);
        assert!(close(c, (f + g).powi(2)) && close(d, (f - g).powi(2)));
    }

    #[test]
    fn bunching_table_over_random_windows() {
        let n = 10_000u64;
        let phi_plus = hom_trials::<f64>(BellKind::PhiPlus, n, &CounterRng::new(31));
        assert_eq!(phi_plus.both_c, n);
        let psi_minus = hom_trials::<f64>(BellKind::PsiMinus, n, &CounterRng::new(32));
        assert_eq!(psi_minus.coincidence, n);
        for (kind, seed) in [(BellKind::PhiMinus, 33), (BellKind::PsiPlus, 34)] {
            let t = hom_trials::<f64>(kind, n, &CounterRng::new(seed));
            assert_eq!(t.coincidence, 0, "{kind:?}");
            assert_eq!(t.discarded, 0, "{kind:?}");
            assert_eq!(t.both_c + t.both_d, n, "{kind:?}");
            // Both bunching directions occur; shares are near one half.
            let sigma = (0.25 / n as f64).sqrt();
            let share = t.both_c as f64 / n as f64;
            assert!((share - 0.5).abs() < 5.0 * sigma, "{kind:?}: {share}");
        }
    }

    #[test]
    fn hom_tie_is_discarded() {
        // An exact tie is reachable only on a measure-zero set; force it.
        assert_eq!(
            hom_outcome(BellKind::PhiMinus, std::f64::consts::FRAC_PI_4),
            HomOutcome::Discarded
        );
        assert_eq!(hom_outcome(BellKind::PsiPlus, 0.0), HomOutcome::Discarded);
        assert_eq!(
            hom_outcome(BellKind::PsiPlus, std::f64::consts::FRAC_PI_4),
            HomOutcome::BothAtC
        );
        assert_eq!(hom_outcome(BellKind::PhiMinus, 0.0), HomOutcome::BothAtC);
        assert_eq!(HomOutcome::Discarded.gate_counts(), None);
        assert_eq!(HomOutcome::BothAtD.gate_counts(), Some((0, 2)));
    }

    #[test]
    fn swap_keeps_the_expected_fraction() {
        let cfg = SwapConfig::new(200_000u64, 0.3, 0.9);
        let res = swap_run::<f64>(&cfg, &CounterRng::new(41));
        let expect = 2.0 * (0.02_f64).asin() / std::f64::consts::PI;
        let sigma = (expect * (1.0 - expect) / cfg.n_windows as f64).sqrt();
        assert!(
            ((res.kept_fraction) - expect).abs() < 5.0 * sigma,
            "kept fraction {} vs {expect}",
            res.kept_fraction
        );
    }

    #[test]
    fn swap_rate_follows_antisymmetric_law() {
        let delta = std::f64::consts::FRAC_PI_4;
        let cfg = SwapConfig::new(400_000u64, 0.0, -delta);
        let res = swap_run::<f64>(&cfg, &CounterRng::new(42));
        let want = 0.5 * delta.sin().powi(2);
        assert!(
            (res.coincidence_rate - want).abs() < 4.0 * res.coincidence_se + cfg.tol * cfg.tol,
            "rate {} vs {want} (se {})",
            res.coincidence_rate,
            res.coincidence_se
        );
        // Equal analyzer angles: rate at the tolerance floor.
        let cfg0 = SwapConfig::new(400_000u64, 0.4, 0.4);
        let res0 = swap_run::<f64>(&cfg0, &CounterRng::new(43));
        assert!(
            res0.coincidence_rate < 3.0 * res0.coincidence_se + cfg0.tol * cfg0.tol,
            "rate {} (se {})",
            res0.coincidence_rate,
            res0.coincidence_se
        );
    }

    #[test]
    fn swap_unconditioned_is_flat() {
        for (seed, delta) in [(44, 0.0_f64), (45, 0.6), (46, 1.3)] {
            let cfg = SwapConfig::new(200_000u64, 0.0, -delta);
            let res = swap_run::<f64>(&cfg, &CounterRng::new(seed));
            assert!(
                (res.unconditioned_rate - 0.25).abs() < 4.0 * res.unconditioned_se,
                "delta {delta}: {} vs 0.25",
                res.unconditioned_rate
            );
        }
    }

    #[test]
    fn sweep_fits_sine_squared() {
        let deltas: Vec<f64> = (0..9)
            .map(|k| k as f64 * std::f64::consts::FRAC_PI_2 / 8.0)
            .collect();
        let points = swap_sweep(120_000, &deltas, 0.02, &CounterRng::new(47));
        let total_kept: u64 = points.iter().map(|p| p.kept).sum();
        assert!(total_kept >= 10_000, "kept {total_kept}");
        let ys: Vec<f64> = points.iter().map(|p| p.rate).collect();
        let fit = fit_sin2(&deltas, &ys);
        assert!(fit.r_squared > 0.99, "R^2 = {}", fit.r_squared);
        assert!((fit.amplitude - 0.5).abs() < 0.05, "A = {}", fit.amplitude);
    }

    #[test]
    fn routing_enumeration_finds_the_two_fourfold_cases() {
        let routings = enumerate_routings();
        assert_eq!(routings.len(), 8);
        let fourfold: Vec<_> = routings
            .iter()
            .filter(|r| r.occupancy == [1, 1, 1, 1])
            .collect();
        assert_eq!(fourfold.len(), 2);
        let axes: Vec<[char; 3]> = fourfold
            .iter()
            .map(|r| r.detector_axes.unwrap())
            .collect();
        assert!(axes.contains(&['y', 'y', 'x']));
        assert!(axes.contains(&['x', 'x', 'y']));
        for r in &routings {
            assert_eq!(
                r.occupancy.iter().map(|&x| x as u32).sum::<u32>(),
                4,
                "four photons total"
            );
        }
    }

    #[test]
    fn pipeline_bookkeeping_is_complete() {
        let cfg = PipelineConfig {
            n_pulses: 5_000,
            record_events: true,
        };
        let res = ghz_pipeline_run::<f64>(&cfg, &CounterRng::new(51));
        assert_eq!(
            res.kept + res.no_trigger + res.missing_detection + res.ties,
            res.n_pulses
        );
        assert_eq!(res.ties, 0, "continuous draws never tie exactly");
        // Keep rate is near one quarter.
        let sigma = (0.25 * 0.75 / cfg.n_pulses as f64).sqrt();
        let frac = res.kept as f64 / cfg.n_pulses as f64;
        assert!((frac - 0.25).abs() < 5.0 * sigma, "kept fraction {frac}");
        let events = res.events.as_ref().unwrap();
        assert_eq!(events.len(), cfg.n_pulses as usize);
        for e in events.iter().take(200) {
            // Fourfold firing is equivalent to both pair powers reaching
            // the unit, and kept pulses are exactly the fourfold ones.
            let fourfold = e.integrals[0] >= 1.0 && e.integrals[1] >= 1.0;
            assert_eq!(e.fired.iter().all(|&f| f), fourfold);
            assert_eq!(e.status == PulseStatus::Kept, fourfold);
            if !e.fired[0] {
                assert_eq!(e.status, PulseStatus::NoTrigger);
            }
        }
        // Without recording, no log is kept.
        let res2 = ghz_pipeline_run::<f64>(
            &PipelineConfig {
                n_pulses: 10,
                record_events: false,
            },
            &CounterRng::new(51),
        );
        assert!(res2.events.is_none());
    }

    #[test]
    fn pipeline_counts_match_analytic_table() {
        let cfg = PipelineConfig {
            n_pulses: 40_000,
            record_events: false,
        };
        let res = ghz_pipeline_run::<f64>(&cfg, &CounterRng::new(52));
        let table = full_table::<f64>();
        for (config, outcomes, fraction) in res.fractions() {
            let want = table.get(&config, outcomes).unwrap();
            let config_total: u64 = res
                .counts
                .iter()
                .filter(|(c, _, _)| *c == config)
                .map(|&(_, _, n)| n)
                .sum();
            // Integrate-and-fire counts drift from the expectation by at
            // most one unit per cell, plus the pulse-to-pulse energy
            // spread; a binomial bound is generous.
            let sigma = (want.max(1e-9) * (1.0 - want) / config_total as f64)
                .sqrt()
                .max(2.0 / config_total as f64);
            assert!(
                (fraction - want).abs() < 4.0 * sigma,
                "{} {:?}: {} vs {}",
                config.label(),
                outcomes,
                fraction,
                want
            );
        }
    }

    #[test]
    fn event_csv_is_well_formed() {
        let cfg = PipelineConfig {
            n_pulses: 50,
            record_events: true,
        };
        let res = ghz_pipeline_run::<f64>(&cfg, &CounterRng::new(53));
        let mut buf = Vec::new();
        write_event_csv(res.events.as_ref().unwrap(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.trim_end().lines().collect();
        assert_eq!(lines.len(), 51);
        assert!(lines[0].starts_with("pulse,m_t,"));
        for line in &lines[1..] {
            assert_eq!(line.split(',').count(), 10);
        }
    }

    proptest! {
        #[test]
        fn splitter_conserves_energy(
            ax in -2.0f64..2.0, ay in -2.0f64..2.0,
            bx in -2.0f64..2.0, by in -2.0f64..2.0,
        ) {
            let va = Vec2C::from_real(ax, ay);
            let vb = Vec2C::from_real(bx, by);
            let (vc, vd) = bs_transform(&va, &vb);
            let before = va.norm_sqr() + vb.norm_sqr();
            let after = vc.norm_sqr() + vd.norm_sqr();
            prop_assert!((before - after).abs() < 1e-12);
        }

        #[test]
        fn hom_energy_totals_two_units(v in 0.0f64..std::f64::consts::PI) {
            for kind in BellKind::ALL {
                let (c, d) = hom_integrals(kind, v);
                prop_assert!((c + d - 2.0).abs() < 1e-12);
            }
        }
    }
}
