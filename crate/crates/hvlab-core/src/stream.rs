//! Piecewise-constant hidden-variable field streams and threshold counting.
//!
//! A source emits a transverse field whose polarization angle `v(t)` is
//! constant on intervals of length `dt` and jumps independently between
//! intervals; the power is constant at 1. Detection is not event-by-event:
//! a threshold detector converts accumulated field energy into counts,
//! `N = (1/u) * sum(p_i * dt)`. All counts stay real-valued internally;
//! rounding happens only where discrete detections are explicitly modeled
//! ([`detection_schedule`]).

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::bell::BellKind;
use crate::boolean::BellAngles;
use crate::rng::CounterRng;
use crate::scalar::{cast, fold_angle, Real};

/// One constant-polarization interval: angle `v` in `[0, pi)`, power `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    pub v: T,
    pub p: T,
}

/// A finite run of piecewise-constant field intervals with common width `dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct HvStream<T> {
    dt: T,
    intervals: Vec<Interval<T>>,
}

/// Threshold detector: one count per `unit` of integrated field energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdDetector<T> {
    pub unit: T,
}

impl<T: Real> ThresholdDetector<T> {
    pub fn new(unit: T) -> Self {
        assert!(unit > T::zero(), "detection unit must be positive");
        Self { unit }
    }

    /// The convention that makes a full unpolarized run count as `N = 1`:
    /// `u = n_intervals * dt`.
    pub fn normalized_for(n_intervals: u64, dt: T) -> Self {
        Self::new(cast::<T>(n_intervals as f64) * dt)
    }
}

impl<T: Real> HvStream<T> {
    pub fn new(dt: T, intervals: Vec<Interval<T>>) -> Self {
        assert!(dt > T::zero(), "interval width must be positive");
        Self { dt, intervals }
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn intervals(&self) -> &[Interval<T>] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Writes the stream as CSV (full round-trip precision).
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "# hvstream v1")?;
        writeln!(w, "# dt={}", self.dt)?;
        writeln!(w, "index,v,p")?;
        for (i, iv) in self.intervals.iter().enumerate() {
            writeln!(w, "{},{},{}", i, iv.v, iv.p)?;
        }
        Ok(())
    }

    /// Reads a stream written by [`HvStream::write_csv`].
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self, StreamCsvError> {
        let mut dt: Option<T> = None;
        let mut saw_header = false;
        let mut intervals = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(value) = rest.strip_prefix("dt=") {
                    let parsed: f64 = value
                        .parse()
                        .map_err(|_| StreamCsvError::Parse { line: lineno + 1 })?;
                    dt = Some(cast(parsed));
                }
                continue;
            }
            if line == "index,v,p" {
                saw_header = true;
                continue;
            }
            let mut fields = line.split(',');
            let _index = fields.next().ok_or(StreamCsvError::Parse { line: lineno + 1 })?;
            let v: f64 = fields
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or(StreamCsvError::Parse { line: lineno + 1 })?;
            let p: f64 = fields
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or(StreamCsvError::Parse { line: lineno + 1 })?;
            intervals.push(Interval {
                v: cast(v),
                p: cast(p),
            });
        }
        if !saw_header {
            return Err(StreamCsvError::MissingHeader);
        }
        let dt = dt.ok_or(StreamCsvError::MissingDt)?;
        Ok(Self::new(dt, intervals))
    }
}

#[derive(Debug, Error)]
pub enum StreamCsvError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("missing `index,v,p` header row")]
    MissingHeader,
    #[error("missing `# dt=` metadata line")]
    MissingDt,
    #[error("unparsable field at line {line}")]
    Parse { line: usize },
}

/// Generates an unpolarized stream: `v_i` i.i.d. uniform on `[0, pi)`,
/// constant power 1. Fully determined by the generator's seed.
pub fn gen_unpolarized<T: Real>(n_intervals: u64, dt: T, rng: &CounterRng) -> HvStream<T> {
    assert!(n_intervals >= 1, "need at least one interval");
    let intervals = (0..n_intervals)
        .map(|i| Interval {
            v: rng.angle(i, 0),
            p: T::one(),
        })
        .collect();
    HvStream::new(dt, intervals)
}

/// Derives the partner stream of `a` for a given pair relationship.
///
/// Per interval the field components `(f, g) = sqrt(p) * (cos v, sin v)`
/// map through the kind's component rule; every rule is an isometry, so the
/// partner's power equals the source's exactly and only the angle moves.
pub fn pair_stream<T: Real>(a: &HvStream<T>, kind: BellKind) -> HvStream<T> {
    let intervals = a
        .intervals()
        .iter()
        .map(|iv| {
            let sp = iv.p.sqrt();
            let (f, g) = (sp * iv.v.cos(), sp * iv.v.sin());
            let (f2, g2) = kind.map_components(f, g);
            Interval {
                v: fold_angle(g2.atan2(f2)),
                p: iv.p,
            }
        })
        .collect();
    HvStream::new(a.dt(), intervals)
}

/// Total threshold count of a stream: `N = (1/u) * sum(p_i * dt)`.
pub fn count_total<T: Real>(s: &HvStream<T>, det: ThresholdDetector<T>) -> T {
    let energy = s
        .intervals()
        .iter()
        .fold(T::zero(), |acc, iv| acc + iv.p * s.dt());
    energy / det.unit
}

/// Count behind an analyzer at `alpha`:
/// `N_alpha = (1/u) * sum(p_i * cos^2(v_i - alpha) * dt)`.
pub fn count_after_analyzer<T: Real>(s: &HvStream<T>, alpha: T, det: ThresholdDetector<T>) -> T {
    let energy = s.intervals().iter().fold(T::zero(), |acc, iv| {
        let c = (iv.v - alpha).cos();
        acc + iv.p * c * c * s.dt()
    });
    energy / det.unit
}

/// Double-plus coincidence count for a pair source.
///
/// Builds the partner stream for `kind`, passes it through the analyzer
/// axis that the pair relationship maps `alpha` to, then through the `beta`
/// analyzer (double filtering). For `PhiPlus` the mapped axis is `alpha`
/// itself and the result collapses to `cos^2(alpha - beta) * N_alpha`
/// exactly, stream by stream, not just on average.
pub fn coincidences<T: Real>(
    a: &HvStream<T>,
    kind: BellKind,
    alpha: T,
    beta: T,
    det: ThresholdDetector<T>,
) -> T {
    let b = pair_stream(a, kind);
    coincidences_with_partner(&b, kind, alpha, beta, det)
}

/// Same as [`coincidences`], taking a precomputed partner stream.
pub fn coincidences_with_partner<T: Real>(
    b: &HvStream<T>,
    kind: BellKind,
    alpha: T,
    beta: T,
    det: ThresholdDetector<T>,
) -> T {
    let m = kind.mapped_axis(alpha);
    let second = (m - beta).cos();
    let second2 = second * second;
    let energy = b.intervals().iter().fold(T::zero(), |acc, iv| {
        let c = (iv.v - m).cos();
        acc + iv.p * c * c * second2 * b.dt()
    });
    energy / det.unit
}

/// Source configuration for a correlation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSourceConfig<T> {
    pub kind: BellKind,
    pub n_intervals: u64,
    pub dt: T,
}

impl<T: Real> PairSourceConfig<T> {
    pub fn new(kind: BellKind, n_intervals: u64) -> Self {
        Self {
            kind,
            n_intervals,
            dt: T::one(),
        }
    }
}

/// Everything a four-setting correlation run produces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorChshResult<T> {
    /// Correlators at (a,b), (a,b'), (a',b), (a',b').
    pub correlators: [T; 4],
    /// CHSH combination `E(a,b) - E(a,b') + E(a',b) + E(a',b')`.
    pub s: T,
    /// Clauser-Horne combination with singles, same sign placement.
    pub j_ch: T,
    /// Total count `N` of the source stream.
    pub n_total: T,
}

/// Runs the four-setting correlation experiment on one generated stream.
///
/// Correlators come from double-plus counts via `E = 4 * (N_pp / N) - 1`;
/// the Clauser-Horne `J` additionally uses the two single-station counts.
pub fn chsh_experiment<T: Real>(
    cfg: PairSourceConfig<T>,
    angles: &BellAngles<T>,
    det: ThresholdDetector<T>,
    rng: &CounterRng,
) -> VectorChshResult<T> {
    let a = gen_unpolarized(cfg.n_intervals, cfg.dt, rng);
    let b = pair_stream(&a, cfg.kind);
    let n = count_total(&a, det);
    let four = cast::<T>(4.0);
    let pairs = [
        (angles.a, angles.b),
        (angles.a, angles.b_prime),
        (angles.a_prime, angles.b),
        (angles.a_prime, angles.b_prime),
    ];
    let mut pp = [T::zero(); 4];
    let mut correlators = [T::zero(); 4];
    for (i, (alpha, beta)) in pairs.iter().enumerate() {
        pp[i] = coincidences_with_partner(&b, cfg.kind, *alpha, *beta, det);
        correlators[i] = four * (pp[i] / n) - T::one();
    }
    let s = correlators[0] - correlators[1] + correlators[2] + correlators[3];
    let singles_a = count_after_analyzer(&a, angles.a_prime, det);
    let singles_b = count_after_analyzer(&b, angles.b, det);
    let j_ch = (pp[0] - pp[1] + pp[2] + pp[3] - singles_a - singles_b) / n;
    VectorChshResult {
        correlators,
        s,
        j_ch,
        n_total: n,
    }
}

/// Discrete detections from integrate-and-fire threshold counting.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionSchedule<T> {
    /// Timestamps on the `+` gate (analyzer axis).
    pub plus: Vec<T>,
    /// Timestamps on the `-` gate (axis rotated a quarter turn).
    pub minus: Vec<T>,
}

/// Deterministic detection timestamps for a stream entering a two-gate
/// analyzer at `alpha`.
///
/// Each gate accumulates its projected energy; a detection is emitted every
/// time the accumulator crosses a multiple of the detection unit, with the
/// timestamp interpolated inside the interval (energy grows linearly there).
/// The schedule over any prefix of the stream depends only on that prefix.
pub fn detection_schedule<T: Real>(
    s: &HvStream<T>,
    alpha: T,
    det: ThresholdDetector<T>,
) -> DetectionSchedule<T> {
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    let mut acc_plus = T::zero();
    let mut acc_minus = T::zero();
    let mut fired_plus: u64 = 0;
    let mut fired_minus: u64 = 0;
    let mut t = T::zero();
    for iv in s.intervals() {
        let c = (iv.v - alpha).cos();
        let rate_plus = iv.p * c * c;
        let rate_minus = iv.p * (T::one() - c * c);
        for (acc, fired, out, rate) in [
            (&mut acc_plus, &mut fired_plus, &mut plus, rate_plus),
            (&mut acc_minus, &mut fired_minus, &mut minus, rate_minus),
        ] {
            let end = *acc + rate * s.dt();
            while cast::<T>((*fired + 1) as f64) * det.unit <= end {
                let next = cast::<T>((*fired + 1) as f64) * det.unit;
                // Linear growth inside the interval gives the crossing time.
                let frac = if rate > T::zero() {
                    (next - *acc) / rate
                } else {
                    T::zero()
                };
                out.push(t + frac);
                *fired += 1;
            }
            *acc = end;
        }
        t = t + s.dt();
    }
    DetectionSchedule { plus, minus }
}
