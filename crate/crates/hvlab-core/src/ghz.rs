//! Triple-particle product-space vector, station operators, basis
//! expansions, projection chains and the full triple-coincidence table.
//!
//! The state under study is the symmetric two-term vector
//! `(e_x1 e_x2 e_x3 + e_y1 e_y2 e_y3)/sqrt(2)`. Each station applies one of
//! two local operations: `l` swaps the linear components, `r` rotates them
//! through the circular phase (`x -> i y`, `y -> -i x`). Four of the eight
//! operation triples leave the state invariant up to a sign; the product of
//! those four signs is -1, which is the quantitative seed of the
//! instruction-table contradiction checked in [`crate::nogo`].
//!
//! Counts are expressed as fractions of the run total `N`: the squared
//! magnitude of the chained projection coefficient onto per-station axes
//! chosen by the (operation letter, outcome sign) dictionary.

use num_complex::Complex;

use crate::linalg::{LinalgError, Mat, TensorState, Vec2C, C};
use crate::scalar::{cast, Real};

/// Per-station operation letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Setting {
    /// Linear swap: `x <-> y`.
    L,
    /// Circular rotation: `x -> i y`, `y -> -i x`.
    R,
}

impl Setting {
    pub fn letter(self) -> char {
        match self {
            Setting::L => 'l',
            Setting::R => 'r',
        }
    }
}

/// Operation letters for the three stations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GhzConfig(pub [Setting; 3]);

impl GhzConfig {
    /// All eight configurations, `lll` first, `rrr` last.
    pub fn all() -> [GhzConfig; 8] {
        let mut out = [GhzConfig([Setting::L; 3]); 8];
        for (idx, cfg) in out.iter_mut().enumerate() {
            for slot in 0..3 {
                if (idx >> (2 - slot)) & 1 == 1 {
                    cfg.0[slot] = Setting::R;
                }
            }
        }
        out
    }

    pub fn label(self) -> String {
        self.0.iter().map(|s| s.letter()).collect()
    }
}

impl std::str::FromStr for GhzConfig {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.to_ascii_lowercase().chars().collect();
        if chars.len() != 3 {
            return Err(format!("configuration `{s}` must have three letters"));
        }
        let mut ops = [Setting::L; 3];
        for (i, c) in chars.into_iter().enumerate() {
            ops[i] = match c {
                'l' => Setting::L,
                'r' => Setting::R,
                other => return Err(format!("unknown operation letter `{other}`")),
            };
        }
        Ok(GhzConfig(ops))
    }
}

/// The triple-particle state with its power bookkeeping factor.
#[derive(Debug, Clone, PartialEq)]
pub struct GhzVector<T: Real> {
    state: TensorState<T>,
    power_scale: T,
}

impl<T: Real> GhzVector<T> {
    pub fn state(&self) -> &TensorState<T> {
        &self.state
    }

    pub fn power_scale(&self) -> T {
        self.power_scale
    }
}

/// Builds the symmetric two-term state at the given power factor: the
/// amplitudes on `xxx` and `yyy` are `power_scale / sqrt(2)`.
pub fn make_vghz_scaled<T: Real>(power_scale: T) -> GhzVector<T> {
    let mut amps = vec![Complex::new(T::zero(), T::zero()); 8];
    let a = Complex::new(power_scale * T::FRAC_1_SQRT_2(), T::zero());
    amps[0b000] = a;
    amps[0b111] = a;
    GhzVector {
        state: TensorState::from_amps(3, amps),
        power_scale,
    }
}

/// Unit-power triple-particle state.
pub fn make_vghz<T: Real>() -> GhzVector<T> {
    make_vghz_scaled(T::one())
}

/// The 2x2 station operator for a setting letter.
pub fn setting_operator<T: Real>(s: Setting) -> Mat<C<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    match s {
        Setting::L => Mat::from_rows(&[&[zero, one], &[one, zero]]),
        Setting::R => Mat::from_rows(&[&[zero, -i], &[i, zero]]),
    }
}

/// Applies the per-station operators of `cfg` to a three-slot state.
///
/// Returns the transformed state together with `Some(sign)` when the result
/// is exactly that scalar multiple of the input (the station operators are
/// involutions, so the only possible eigenvalues are +1 and -1), or `None`
/// when the input is not an eigenstate.
pub fn apply_config<T: Real>(
    state: &TensorState<T>,
    cfg: &GhzConfig,
) -> (TensorState<T>, Option<i8>) {
    let mut out = state.clone();
    for (slot, &s) in cfg.0.iter().enumerate() {
        out = out
            .apply_one(slot + 1, &setting_operator(s))
            .expect("three-slot state");
    }
    let tol = cast::<T>(1e-12) * state.max_abs().max(T::one());
    let eigen = [1i8, -1].into_iter().find(|&sign| {
        let scaled = state.scale(Complex::new(cast::<T>(sign as f64), T::zero()));
        match out.sub(&scaled) {
            Ok(diff) => diff.max_abs() < tol,
            Err(_) => false,
        }
    });
    (out, eigen)
}

/// The configurations that reproduce the state up to a sign, with their
/// signs, in `GhzConfig::all()` order.
pub fn eigen_configs<T: Real>() -> Vec<(GhzConfig, i8)> {
    let v = make_vghz::<T>();
    GhzConfig::all()
        .into_iter()
        .filter_map(|cfg| apply_config(v.state(), &cfg).1.map(|sign| (cfg, sign)))
        .collect()
}

/// Which polarization axis a station projects on, given its operation
/// letter and the outcome sign registered there.
pub fn outcome_axis<T: Real>(setting: Setting, outcome: i8) -> Vec2C<T> {
    assert!(outcome == 1 || outcome == -1, "outcomes are +1 or -1");
    let h = T::FRAC_1_SQRT_2();
    let re = |x: T, y: T| Vec2C::new(Complex::new(x, T::zero()), Complex::new(y, T::zero()));
    match (setting, outcome) {
        (Setting::L, 1) => re(h, h),
        (Setting::L, -1) => re(h, -h),
        (Setting::R, 1) => Vec2C::new(Complex::new(h, T::zero()), Complex::new(T::zero(), h)),
        (Setting::R, -1) => Vec2C::new(Complex::new(h, T::zero()), Complex::new(T::zero(), -h)),
        _ => unreachable!(),
    }
}

/// Diagonal (`+`/`-`) or circular (`R`/`L`) product basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisFamily {
    Diagonal,
    Circular,
}

fn family_axis<T: Real>(family: BasisFamily, positive: bool) -> (char, Vec2C<T>) {
    match (family, positive) {
        (BasisFamily::Diagonal, true) => ('+', outcome_axis(Setting::L, 1)),
        (BasisFamily::Diagonal, false) => ('-', outcome_axis(Setting::L, -1)),
        (BasisFamily::Circular, true) => ('R', outcome_axis(Setting::R, 1)),
        (BasisFamily::Circular, false) => ('L', outcome_axis(Setting::R, -1)),
    }
}

/// Expands a three-slot state over one of the two product bases; returns
/// the eight `(label, coefficient)` pairs, first slot's letter leftmost.
pub fn basis_expand<T: Real>(
    state: &TensorState<T>,
    family: BasisFamily,
) -> Vec<(String, C<T>)> {
    assert_eq!(state.slots(), 3, "expansion is defined for three slots");
    (0..8usize)
        .map(|idx| {
            let mut label = String::new();
            let mut axes = Vec::with_capacity(3);
            for slot in 0..3 {
                let positive = (idx >> (2 - slot)) & 1 == 0;
                let (letter, axis) = family_axis::<T>(family, positive);
                label.push(letter);
                axes.push(axis);
            }
            let basis_vec = TensorState::product(&axes);
            let coeff = basis_vec.inner(state).expect("three-slot shapes match");
            (label, coeff)
        })
        .collect()
}

/// Sequential partial projections onto `axes` at the given original slot
/// labels (1-based, distinct); later steps account for slots already
/// removed, so callers always name slots in the input state's numbering.
pub fn chain_project<T: Real>(
    state: &TensorState<T>,
    steps: &[(usize, Vec2C<T>)],
) -> Result<TensorState<T>, LinalgError> {
    let mut out = state.clone();
    let mut done: Vec<usize> = Vec::with_capacity(steps.len());
    for (slot, axis) in steps {
        let removed_below = done.iter().filter(|&&d| d < *slot).count();
        if done.contains(slot) {
            return Err(LinalgError::SlotOutOfRange {
                slot: *slot,
                slots: out.slots(),
            });
        }
        out = out.partial_project(slot - removed_below, axis)?;
        done.push(*slot);
    }
    Ok(out)
}

/// Expected fraction of the run total collected in one cell of the
/// triple-coincidence table: the squared magnitude of the full projection
/// coefficient onto the three per-station outcome axes.
pub fn triple_count_fraction<T: Real>(cfg: &GhzConfig, outcomes: [i8; 3]) -> T {
    let v = make_vghz::<T>();
    let steps: Vec<(usize, Vec2C<T>)> = (0..3)
        .map(|slot| (slot + 1, outcome_axis(cfg.0[slot], outcomes[slot])))
        .collect();
    let reduced = chain_project(v.state(), &steps).expect("slots 1..3 are distinct");
    reduced.scalar_value().norm_sqr()
}

/// One table cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountRow<T> {
    pub config: GhzConfig,
    pub outcomes: [i8; 3],
    pub fraction: T,
}

/// All 64 expected count fractions, grouped by configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct CountTable<T> {
    rows: Vec<CountRow<T>>,
}

impl<T: Real> CountTable<T> {
    pub fn rows(&self) -> &[CountRow<T>] {
        &self.rows
    }

    pub fn get(&self, cfg: &GhzConfig, outcomes: [i8; 3]) -> Option<T> {
        self.rows
            .iter()
            .find(|r| r.config == *cfg && r.outcomes == outcomes)
            .map(|r| r.fraction)
    }

    pub fn config_sum(&self, cfg: &GhzConfig) -> T {
        self.rows
            .iter()
            .filter(|r| r.config == *cfg)
            .fold(T::zero(), |acc, r| acc + r.fraction)
    }

    /// CSV rendering: `config,i,j,k,fraction`, one row per cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("config,i,j,k,fraction\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{:.14e}\n",
                r.config.label(),
                r.outcomes[0],
                r.outcomes[1],
                r.outcomes[2],
                r.fraction
            ));
        }
        out
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

/// Computes the full 64-entry table.
pub fn full_table<T: Real>() -> CountTable<T> {
    let mut rows = Vec::with_capacity(64);
    for cfg in GhzConfig::all() {
        for outcomes in outcome_triples() {
            rows.push(CountRow {
                config: cfg,
                outcomes,
                fraction: triple_count_fraction(&cfg, outcomes),
            });
        }
    }
    CountTable { rows }
}
