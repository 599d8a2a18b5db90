//! Exact no-go checks and small geometric demonstrations.
//!
//! Two 3x3 operator squares are verified with integer arithmetic: a grid of
//! two-particle spin operators whose row and column products are all `+I`
//! except one line at `-I`, and a grid of 90-degree rotation factor pairs
//! whose squared line products are all identity except one, which inverts
//! every vector lying in the plane. In both cases an exhaustive search over
//! classical sign assignments shows no table can reproduce all six line
//! signs; a two-line parity certificate explains why.
//!
//! The triple-particle analog enumerates all 64 per-station instruction
//! tables against the four eigen-configuration signs of [`crate::ghz`]; the
//! best table honors 7 of the 8 configurations, so a uniformly random
//! configuration choice exposes a discrepancy with probability 1/8.
//!
//! The demos at the end make the underlying non-commutativity tangible:
//! composing two 90-degree rotations in either order, half-turn dot
//! products in the plane, and the order sensitivity of repeated projections.

use serde::Serialize;
use thiserror::Error;

use crate::ghz::{eigen_configs, GhzConfig};
use crate::linalg::{pauli, rot3, two_qubit, Axis3, Gi, Mat, PauliAxis};
use crate::scalar::{cast, Real};

#[derive(Debug, Error, PartialEq)]
pub enum NogoError {
    #[error("vector must be nonzero")]
    ZeroVector,
    #[error("angle must lie strictly between 0 and pi/2")]
    DegenerateAngle,
}

// ---------------------------------------------------------------------------
// Spin-operator square
// ---------------------------------------------------------------------------

/// 3x3 grid of two-particle spin operators, stored as per-particle axis
/// letters (identity where the cell names no operator for that particle).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliSquare {
    cells: [[(PauliAxis, PauliAxis); 3]; 3],
}

/// The standard two-particle operator square.
pub fn mermin_peres_square() -> PauliSquare {
    use PauliAxis::{I, X, Y, Z};
    PauliSquare {
        cells: [
            [(Z, I), (I, Z), (Z, Z)],
            [(I, X), (X, I), (X, X)],
            [(Z, X), (X, Z), (Y, Y)],
        ],
    }
}

impl PauliSquare {
    /// The per-particle letters in one cell.
    pub fn cell_axes(&self, row: usize, col: usize) -> (PauliAxis, PauliAxis) {
        self.cells[row][col]
    }

    /// The 4x4 operator in one cell (exact Gaussian-integer entries).
    pub fn cell(&self, row: usize, col: usize) -> Mat<Gi> {
        let (a, b) = self.cells[row][col];
        two_qubit(&pauli(a), &pauli(b))
    }

    pub fn row_product(&self, row: usize) -> Mat<Gi> {
        (0..3)
            .map(|c| self.cell(row, c))
            .reduce(|acc, m| acc.mul(&m))
            .unwrap()
    }

    pub fn col_product(&self, col: usize) -> Mat<Gi> {
        (0..3)
            .map(|r| self.cell(r, col))
            .reduce(|acc, m| acc.mul(&m))
            .unwrap()
    }
}

/// The six line products: rows 1-3 then columns 1-3.
pub fn row_col_products(sq: &PauliSquare) -> [Mat<Gi>; 6] {
    [
        sq.row_product(0),
        sq.row_product(1),
        sq.row_product(2),
        sq.col_product(0),
        sq.col_product(1),
        sq.col_product(2),
    ]
}

/// Line signs of the spin square (each line product is exactly a signed
/// identity).
pub fn pauli_square_targets() -> [i8; 6] {
    let sq = mermin_peres_square();
    row_col_products(&sq).map(|m| {
        let s = m
            .signed_identity()
            .expect("line products are signed identities");
        if s == Gi::new(1, 0) {
            1
        } else {
            -1
        }
    })
}

// ---------------------------------------------------------------------------
// Classical sign-assignment search over a 3x3 square
// ---------------------------------------------------------------------------

/// Result of the exhaustive search over all 512 sign tables.
#[derive(Debug, Clone, Serialize)]
pub struct KsSearchReport {
    /// Line sign targets, rows 1-3 then columns 1-3.
    pub targets: [i8; 6],
    /// Largest number of line constraints any table satisfies.
    pub best_satisfied: usize,
    /// Number of tables achieving every constraint.
    pub n_full: usize,
    /// `histogram[k]` = number of tables satisfying exactly `k` constraints;
    /// sums to 512.
    pub histogram: [usize; 7],
    /// Every maximizing table (row-major 3x3 of signs).
    pub witnesses: Vec<[[i8; 3]; 3]>,
    /// Product over the six lines of the classical line values. Each cell
    /// sits in exactly one row and one column, so this is +1 for every
    /// table.
    pub classical_parity: i8,
    /// Product of the six targets. When this is -1, no table can satisfy
    /// all six lines.
    pub target_parity: i8,
}

/// Enumerates all `2^9` sign tables for a 3x3 square and counts how many of
/// the six line-product constraints each satisfies.
pub fn ks_assignment_search(targets: [i8; 6]) -> KsSearchReport {
    let mut histogram = [0usize; 7];
    let mut best = 0usize;
    let mut witnesses: Vec<[[i8; 3]; 3]> = Vec::new();
    let mut classical_parity_all = 1i8;
    let mut parity_constant = true;

    for bits in 0..512u32 {
        let mut table = [[0i8; 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                table[r][c] = if (bits >> (r * 3 + c)) & 1 == 1 { -1 } else { 1 };
            }
        }
        let mut lines = [1i8; 6];
        for k in 0..3 {
            lines[k] = table[k][0] * table[k][1] * table[k][2];
            lines[3 + k] = table[0][k] * table[1][k] * table[2][k];
        }
        let parity: i8 = lines.iter().product();
        if bits == 0 {
            classical_parity_all = parity;
        } else if parity != classical_parity_all {
            parity_constant = false;
        }
        let satisfied = lines
            .iter()
            .zip(targets.iter())
            .filter(|(line, target)| line == target)
            .count();
        histogram[satisfied] += 1;
        match satisfied.cmp(&best) {
            std::cmp::Ordering::Greater => {
                best = satisfied;
                witnesses.clear();
                witnesses.push(table);
            }
            std::cmp::Ordering::Equal => witnesses.push(table),
            std::cmp::Ordering::Less => {}
        }
    }
    assert!(parity_constant, "line parity must not depend on the table");

    KsSearchReport {
        targets,
        best_satisfied: best,
        n_full: histogram[6],
        histogram,
        witnesses,
        classical_parity: classical_parity_all,
        target_parity: targets.iter().product(),
    }
}

// ---------------------------------------------------------------------------
// Rotation square
// ---------------------------------------------------------------------------

/// 3x3 grid of 90-degree rotation factor pairs: each cell names a rotation
/// axis per space, `None` standing for the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationSquare {
    cells: [[(Option<Axis3>, Option<Axis3>); 3]; 3],
}

/// The rotation analog of the spin square, cell for cell.
pub fn rotation_square() -> RotationSquare {
    use Axis3::{X, Y, Z};
    RotationSquare {
        cells: [
            [(Some(Z), None), (None, Some(Z)), (Some(Z), Some(Z))],
            [(None, Some(X)), (Some(X), None), (Some(X), Some(X))],
            [(Some(Z), Some(X)), (Some(X), Some(Z)), (Some(Y), Some(Y))],
        ],
    }
}

fn factor(axis: Option<Axis3>) -> Mat<i64> {
    axis.map_or_else(|| Mat::identity(3), rot3)
}

impl RotationSquare {
    /// The per-space rotation axes in one cell (`None` = identity).
    pub fn cell_axes(&self, row: usize, col: usize) -> (Option<Axis3>, Option<Axis3>) {
        self.cells[row][col]
    }

    /// Per-space 3x3 factors in one cell.
    pub fn cell_factors(&self, row: usize, col: usize) -> (Mat<i64>, Mat<i64>) {
        let (a, b) = self.cells[row][col];
        (factor(a), factor(b))
    }

    /// Per-space composition along a row, cells multiplied in written
    /// order (leftmost cell leftmost in the product).
    pub fn row_factors(&self, row: usize) -> (Mat<i64>, Mat<i64>) {
        (0..3)
            .map(|c| self.cell_factors(row, c))
            .reduce(|(a1, a2), (b1, b2)| (a1.mul(&b1), a2.mul(&b2)))
            .unwrap()
    }

    /// Per-space composition down a column, top cell leftmost.
    pub fn col_factors(&self, col: usize) -> (Mat<i64>, Mat<i64>) {
        (0..3)
            .map(|r| self.cell_factors(r, col))
            .reduce(|(a1, a2), (b1, b2)| (a1.mul(&b1), a2.mul(&b2)))
            .unwrap()
    }
}

/// Squares of the six line compositions (rows 1-3 then columns 1-3), each a
/// pair of per-space 3x3 matrices. Rotations do not commute, so the
/// observable is the squared line product: all six squares are the
/// identity in both spaces except the third row, whose second-space factor
/// is the half-turn `diag(-1, -1, 1)`.
pub fn squared_products(sq: &RotationSquare) -> [(Mat<i64>, Mat<i64>); 6] {
    let lines = [
        sq.row_factors(0),
        sq.row_factors(1),
        sq.row_factors(2),
        sq.col_factors(0),
        sq.col_factors(1),
        sq.col_factors(2),
    ];
    lines.map(|(a, b)| (a.square(), b.square()))
}

/// Product of all six squared line pairs, per space.
pub fn combined_observable(sq: &RotationSquare) -> (Mat<i64>, Mat<i64>) {
    squared_products(sq)
        .into_iter()
        .reduce(|(a1, a2), (b1, b2)| (a1.mul(&b1), a2.mul(&b2)))
        .unwrap()
}

/// Detection convention for the rotation form: the final vector maps to
/// `-1` whenever its third component is non-positive (the boundary counts
/// as `-1`; every in-plane vector therefore reads `-1` once inverted).
pub fn rotation_outcome<T: Real>(v: [T; 3]) -> i8 {
    if v[2] <= T::zero() {
        -1
    } else {
        1
    }
}

fn action_sign(m: &Mat<i64>, v: [i64; 3]) -> Option<i8> {
    let w = m.apply(&v);
    if w == v {
        Some(1)
    } else if w.iter().zip(v.iter()).all(|(a, b)| *a == -b) {
        Some(-1)
    } else {
        None
    }
}

/// Value of the combined squared observable on the in-plane vector
/// `(a, b, 0)`: the product over both spaces of the sign with which each
/// factor maps the vector to itself.
pub fn inplane_witness<T: Real>(a: T, b: T) -> Result<i8, NogoError> {
    if a == T::zero() && b == T::zero() {
        return Err(NogoError::ZeroVector);
    }
    let (m1, m2) = combined_observable(&rotation_square());
    let value = [m1, m2]
        .iter()
        .map(|m| {
            let v = [a, b, T::zero()];
            let w: Vec<T> = (0..3)
                .map(|i| {
                    (0..3).fold(T::zero(), |acc, j| {
                        acc + cast::<T>(*m.get(i, j) as f64) * v[j]
                    })
                })
                .collect();
            if (0..3).all(|i| w[i] == v[i]) {
                1i8
            } else {
                debug_assert!((0..3).all(|i| w[i] == -v[i]));
                -1i8
            }
        })
        .product();
    Ok(value)
}

/// Line sign targets of the rotation square for in-plane vectors, derived
/// from the squared line products.
pub fn rotation_square_targets() -> [i8; 6] {
    squared_products(&rotation_square()).map(|(m1, m2)| {
        let probe = [1i64, 1, 0];
        let s1 = action_sign(&m1, probe).expect("squared products are signed on the plane");
        let s2 = action_sign(&m2, probe).expect("squared products are signed on the plane");
        s1 * s2
    })
}

// ---------------------------------------------------------------------------
// Triple-particle instruction search
// ---------------------------------------------------------------------------

/// Pre-assigned local answers: one sign per station for each of the two
/// operation letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InstructionMatrix {
    pub l: [i8; 3],
    pub r: [i8; 3],
}

impl InstructionMatrix {
    /// Classical product a configuration would yield under this table.
    pub fn config_product(&self, cfg: &GhzConfig) -> i8 {
        (0..3)
            .map(|station| match cfg.0[station] {
                crate::ghz::Setting::L => self.l[station],
                crate::ghz::Setting::R => self.r[station],
            })
            .product()
    }
}

/// Target signs per configuration; `None` leaves a configuration
/// unconstrained (it counts as satisfied for every table).
pub type GhzTargets = Vec<(GhzConfig, Option<i8>)>;

/// The targets dictated by the eigen-configuration oracle: the four
/// sign-preserving configurations carry their signs, the other four are
/// unconstrained.
pub fn ghz_qm_targets() -> GhzTargets {
    let eigen = eigen_configs::<f64>();
    GhzConfig::all()
        .into_iter()
        .map(|cfg| {
            let sign = eigen.iter().find(|(c, _)| *c == cfg).map(|&(_, s)| s);
            (cfg, sign)
        })
        .collect()
}

/// Result of enumerating all 64 instruction tables.
#[derive(Debug, Clone, Serialize)]
pub struct GhzSearchReport {
    /// Configuration labels with their target signs (empty = unconstrained).
    pub targets: Vec<(String, Option<i8>)>,
    /// Largest number of configurations any table satisfies (of all 8).
    pub best_satisfied: usize,
    /// Number of tables satisfying every configuration.
    pub n_full: usize,
    /// `histogram[k]` = tables satisfying exactly `k` configurations; sums
    /// to 64.
    pub histogram: [usize; 9],
    /// Every maximizing table.
    pub witnesses: Vec<InstructionMatrix>,
    /// Product over the four constrained configurations of the classical
    /// products; every station letter appears twice there, so it is +1 for
    /// every table.
    pub classical_parity: i8,
    /// Product of the constrained target signs.
    pub target_parity: i8,
    /// `(8 - best) / 8`: how often a uniformly random configuration choice
    /// catches the best table deviating.
    pub min_discrepancy_probability: f64,
}

/// Enumerates all 64 instruction tables against per-configuration targets.
pub fn ghz_instruction_search(targets: &GhzTargets) -> GhzSearchReport {
    let constrained: Vec<(&GhzConfig, i8)> = targets
        .iter()
        .filter_map(|(cfg, t)| t.map(|s| (cfg, s)))
        .collect();
    let mut histogram = [0usize; 9];
    let mut best = 0usize;
    let mut witnesses = Vec::new();
    let mut classical_parity_all = 1i8;
    let mut parity_constant = true;

    for bits in 0..64u32 {
        let sign = |k: u32| if (bits >> k) & 1 == 1 { -1i8 } else { 1 };
        let table = InstructionMatrix {
            l: [sign(0), sign(1), sign(2)],
            r: [sign(3), sign(4), sign(5)],
        };
        let parity: i8 = constrained
            .iter()
            .map(|(cfg, _)| table.config_product(cfg))
            .product();
        if bits == 0 {
            classical_parity_all = parity;
        } else if parity != classical_parity_all {
            parity_constant = false;
        }
        let satisfied = targets
            .iter()
            .filter(|(cfg, t)| match t {
                Some(sign) => table.config_product(cfg) == *sign,
                None => true,
            })
            .count();
        histogram[satisfied] += 1;
        match satisfied.cmp(&best) {
            std::cmp::Ordering::Greater => {
                best = satisfied;
                witnesses.clear();
                witnesses.push(table);
            }
            std::cmp::Ordering::Equal => witnesses.push(table),
            std::cmp::Ordering::Less => {}
        }
    }
    assert!(parity_constant, "constraint parity must not depend on the table");

    GhzSearchReport {
        targets: targets
            .iter()
            .map(|(cfg, t)| (cfg.label(), *t))
            .collect(),
        best_satisfied: best,
        n_full: histogram[8],
        histogram,
        witnesses,
        classical_parity: classical_parity_all,
        target_parity: constrained.iter().map(|&(_, s)| s).product(),
        min_discrepancy_probability: (8 - best) as f64 / 8.0,
    }
}

/// Two-particle control case: stations answer for letters `l` and `r`,
/// targets `ll -> +1` and `rr -> -1`. Returns how many of the 16 tables
/// satisfy both (four do), with the satisfying tables.
pub fn two_qubit_instruction_search() -> (usize, Vec<[i8; 4]>) {
    let mut witnesses = Vec::new();
    for bits in 0..16u32 {
        let sign = |k: u32| if (bits >> k) & 1 == 1 { -1i8 } else { 1 };
        let (l1, l2, r1, r2) = (sign(0), sign(1), sign(2), sign(3));
        if l1 * l2 == 1 && r1 * r2 == -1 {
            witnesses.push([l1, l2, r1, r2]);
        }
    }
    (witnesses.len(), witnesses)
}

// ---------------------------------------------------------------------------
// Demos
// ---------------------------------------------------------------------------

/// A quarter turn about the x or z axis, as used in the playing-card demo.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CardRotation {
    Rx90,
    Rz90,
}

impl CardRotation {
    fn matrix(self) -> Mat<i64> {
        match self {
            CardRotation::Rx90 => rot3(Axis3::X),
            CardRotation::Rz90 => rot3(Axis3::Z),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CardRotation::Rx90 => "rx90",
            CardRotation::Rz90 => "rz90",
        }
    }
}

/// Where the three coordinate axes end up under a rotation sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrameImages {
    pub x: [i64; 3],
    pub y: [i64; 3],
    pub z: [i64; 3],
}

fn images(m: &Mat<i64>) -> FrameImages {
    let col = |k: usize| [*m.get(0, k), *m.get(1, k), *m.get(2, k)];
    FrameImages {
        x: col(0),
        y: col(1),
        z: col(2),
    }
}

/// Axis images under a sequence of quarter turns, reported under both
/// composition conventions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CardDemo {
    pub sequence: Vec<String>,
    /// Rotations about the fixed laboratory axes, first rotation applied
    /// first: `M = R_last ... R_first`.
    pub fixed_frame: FrameImages,
    /// Rotations about the card's own (carried-along) axes:
    /// `M = R_first ... R_last`.
    pub body_frame: FrameImages,
}

/// Composes a quarter-turn sequence and reports where the coordinate axes
/// land. Running it for the two opposite orders of the same two turns shows
/// the results differ, in either convention.
pub fn card_demo(order: &[CardRotation]) -> CardDemo {
    let fixed = order
        .iter()
        .fold(Mat::identity(3), |acc, r| r.matrix().mul(&acc));
    let body = order
        .iter()
        .fold(Mat::identity(3), |acc, r| acc.mul(&r.matrix()));
    CardDemo {
        sequence: order.iter().map(|r| r.label().to_string()).collect(),
        fixed_frame: images(&fixed),
        body_frame: images(&body),
    }
}

/// Dot products of a unit in-plane vector with its image under three
/// successive plane rotations, for the three half-turn/quarter-turn
/// mixtures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PlaneRotationDemo {
    /// Three half-turns: the image is the inverted vector.
    pub three_half_turns: i64,
    /// Two half-turns and one quarter-turn: the image is orthogonal.
    pub two_half_one_quarter: i64,
    /// One half-turn and two quarter-turns: the image is the vector itself.
    pub one_half_two_quarters: i64,
}

/// Evaluates the three plane-rotation dot products exactly.
pub fn plane_rotation_demo() -> PlaneRotationDemo {
    let half = Mat::from_rows(&[&[-1i64, 0], &[0, -1]]);
    let quarter = Mat::from_rows(&[&[0i64, -1], &[1, 0]]);
    let v = [1i64, 0];
    let dot = |m: &Mat<i64>| {
        let w = m.apply(&v);
        w[0] * v[0] + w[1] * v[1]
    };
    PlaneRotationDemo {
        three_half_turns: dot(&half.mul(&half).mul(&half)),
        two_half_one_quarter: dot(&half.mul(&half).mul(&quarter)),
        one_half_two_quarters: dot(&half.mul(&quarter).mul(&quarter)),
    }
}

/// Successive-projection order demo: two analyzer pairs rotated by `theta`
/// against each other. The direct overlap of the crossed axes is zero, yet
/// projecting through an intermediate axis leaks a `cos(theta) sin(theta)`
/// component.
pub fn filtering_order_demo<T: Real>(theta: T) -> Result<(T, T), NogoError> {
    if theta <= T::zero() || theta >= T::FRAC_PI_2() {
        return Err(NogoError::DegenerateAngle);
    }
    use crate::linalg::{inner, project, Vec2C};
    let b = Vec2C::from_real(T::one(), T::zero());
    let s = Vec2C::from_real(theta.cos(), theta.sin());
    let c = Vec2C::from_real(theta.sin(), -theta.cos());
    let sc_overlap = inner(&s, &c).re;
    let sbc_overlap = project(&s, &project(&b, &c)).norm();
    Ok((sc_overlap, sbc_overlap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ghz::Setting;

    #[test]
    fn spin_square_line_products_are_signed_identities() {
        let targets = pauli_square_targets();
        assert_eq!(targets, [1, 1, 1, 1, 1, -1]);
    }

    #[test]
    fn spin_square_lines_commute_internally() {
        let sq = mermin_peres_square();
        for k in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    let (r1, r2) = (sq.cell(k, a), sq.cell(k, b));
                    assert_eq!(r1.mul(&r2), r2.mul(&r1), "row {k}: cells {a},{b}");
                    let (c1, c2) = (sq.cell(a, k), sq.cell(b, k));
                    assert_eq!(c1.mul(&c2), c2.mul(&c1), "col {k}: cells {a},{b}");
                }
            }
        }
        // An off-grid pair does not commute.
        let za = two_qubit(&pauli(PauliAxis::Z), &pauli(PauliAxis::I));
        let xa = two_qubit(&pauli(PauliAxis::X), &pauli(PauliAxis::I));
        assert_ne!(za.mul(&xa), xa.mul(&za));
    }

    #[test]
    fn assignment_search_tops_out_at_five() {
        let report = ks_assignment_search(pauli_square_targets());
        assert_eq!(report.best_satisfied, 5);
        assert_eq!(report.n_full, 0);
        assert_eq!(report.histogram.iter().sum::<usize>(), 512);
        assert_eq!(report.classical_parity, 1);
        assert_eq!(report.target_parity, -1);
        assert!(!report.witnesses.is_empty());
        // Every witness misses exactly one line.
        for w in &report.witnesses {
            let mut satisfied = 0;
            for k in 0..3 {
                if w[k][0] * w[k][1] * w[k][2] == report.targets[k] {
                    satisfied += 1;
                }
                if w[0][k] * w[1][k] * w[2][k] == report.targets[3 + k] {
                    satisfied += 1;
                }
            }
            assert_eq!(satisfied, 5);
        }
    }

    #[test]
    fn assignment_search_control_with_trivial_targets() {
        let report = ks_assignment_search([1; 6]);
        assert_eq!(report.best_satisfied, 6);
        assert!(report.n_full > 0);
        assert_eq!(report.target_parity, 1);
    }

    #[test]
    fn rotation_square_squared_lines() {
        let sq = rotation_square();
        let squared = squared_products(&sq);
        let id = Mat::<i64>::identity(3);
        let half_turn = Mat::from_rows(&[&[-1i64, 0, 0], &[0, -1, 0], &[0, 0, 1]]);
        for (k, (m1, m2)) in squared.iter().enumerate() {
            if k == 2 {
                assert_eq!(*m1, id, "third row, first space");
                assert_eq!(*m2, half_turn, "third row, second space");
            } else {
                assert_eq!(*m1, id, "line {k}");
                assert_eq!(*m2, id, "line {k}");
            }
        }
    }

    #[test]
    fn row_three_second_space_composition_is_a_quarter_turn_about_z() {
        // The un-squared second-space composition of the third row equals the
        // plain z quarter-turn, whose square is the half-turn above.
        let sq = rotation_square();
        let (_, m2) = sq.row_factors(2);
        assert_eq!(m2, rot3(Axis3::Z));
    }

    #[test]
    fn fourth_powers_are_identity() {
        for axis in [Axis3::X, Axis3::Y, Axis3::Z] {
            let m = rot3(axis);
            assert_eq!(m.square().square(), Mat::identity(3));
        }
    }

    #[test]
    fn combined_observable_and_witness() {
        let (m1, m2) = combined_observable(&rotation_square());
        assert_eq!(m1, Mat::identity(3));
        assert_eq!(
            m2,
            Mat::from_rows(&[&[-1i64, 0, 0], &[0, -1, 0], &[0, 0, 1]])
        );
        assert_eq!(inplane_witness(1.0, 0.0).unwrap(), -1);
        assert_eq!(inplane_witness(0.3, -2.0).unwrap(), -1);
        assert_eq!(inplane_witness(0.0, 0.0).unwrap_err(), NogoError::ZeroVector);
    }

    #[test]
    fn rotation_outcome_convention() {
        assert_eq!(rotation_outcome([0.0, 0.0, 1.0]), 1);
        assert_eq!(rotation_outcome([0.0, 0.0, -1.0]), -1);
        // In-plane vectors sit on the boundary and read -1.
        assert_eq!(rotation_outcome([1.0, -0.5, 0.0]), -1);
    }

    #[test]
    fn rotation_targets_match_spin_targets_up_to_line_position() {
        let rot = rotation_square_targets();
        assert_eq!(rot, [1, 1, -1, 1, 1, 1]);
        // Same parity certificate as the spin square, so the same search
        // bound applies.
        let report = ks_assignment_search(rot);
        assert_eq!(report.best_satisfied, 5);
        assert_eq!(report.n_full, 0);
    }

    #[test]
    fn instruction_search_caps_at_seven() {
        let report = ghz_instruction_search(&ghz_qm_targets());
        assert_eq!(report.best_satisfied, 7);
        assert_eq!(report.n_full, 0);
        assert_eq!(report.histogram.iter().sum::<usize>(), 64);
        assert_eq!(report.classical_parity, 1);
        assert_eq!(report.target_parity, -1);
        assert!((report.min_discrepancy_probability - 0.125).abs() < 1e-15);
    }

    #[test]
    fn instruction_search_unconstrained_is_trivial() {
        let targets: GhzTargets = GhzConfig::all().into_iter().map(|c| (c, None)).collect();
        let report = ghz_instruction_search(&targets);
        assert_eq!(report.best_satisfied, 8);
        assert_eq!(report.n_full, 64);
    }

    #[test]
    fn config_product_multiplies_station_entries() {
        let table = InstructionMatrix {
            l: [1, -1, 1],
            r: [-1, 1, -1],
        };
        let cfg = GhzConfig([Setting::R, Setting::L, Setting::R]);
        assert_eq!(table.config_product(&cfg), (-1) * (-1) * (-1));
    }

    #[test]
    fn two_qubit_tables_exist() {
        let (n, witnesses) = two_qubit_instruction_search();
        assert_eq!(n, 4);
        for [l1, l2, r1, r2] in witnesses {
            assert_eq!(l1 * l2, 1);
            assert_eq!(r1 * r2, -1);
        }
    }

    #[test]
    fn card_demo_orders_differ() {
        let xz = card_demo(&[CardRotation::Rx90, CardRotation::Rz90]);
        let zx = card_demo(&[CardRotation::Rz90, CardRotation::Rx90]);
        assert_ne!(xz.fixed_frame, zx.fixed_frame);
        assert_ne!(xz.body_frame, zx.body_frame);
        // The two conventions describe the same pair of experiments from
        // opposite sides.
        assert_eq!(xz.fixed_frame, zx.body_frame);
    }

    #[test]
    fn card_demo_single_turn_maps_y_to_z() {
        let demo = card_demo(&[CardRotation::Rx90]);
        assert_eq!(demo.fixed_frame.y, [0, 0, 1]);
        assert_eq!(demo.body_frame.y, [0, 0, 1]);
    }

    #[test]
    fn card_demo_exact_axis_images_for_both_orders() {
        let xz = card_demo(&[CardRotation::Rx90, CardRotation::Rz90]);
        // Fixed frame, x turn first: M = Rz * Rx.
        assert_eq!(xz.fixed_frame.x, [0, 1, 0]);
        assert_eq!(xz.fixed_frame.y, [0, 0, 1]);
        assert_eq!(xz.fixed_frame.z, [1, 0, 0]);
        // Body frame: M = Rx * Rz.
        assert_eq!(xz.body_frame.x, [0, 0, 1]);
        assert_eq!(xz.body_frame.y, [-1, 0, 0]);
        assert_eq!(xz.body_frame.z, [0, -1, 0]);
    }

    #[test]
    fn plane_rotation_dot_products() {
        let demo = plane_rotation_demo();
        assert_eq!(demo.three_half_turns, -1);
        assert_eq!(demo.two_half_one_quarter, 0);
        assert_eq!(demo.one_half_two_quarters, 1);
    }

    #[test]
    fn filtering_order_leaks_through_intermediate_axis() {
        let (sc, sbc) = filtering_order_demo(std::f64::consts::FRAC_PI_4).unwrap();
        assert!(sc.abs() < 1e-15);
        assert!((sbc - 0.5).abs() < 1e-12);
        for theta in [0.2_f64, 0.9, 1.4] {
            let (sc, sbc) = filtering_order_demo(theta).unwrap();
            assert!(sc.abs() < 1e-15);
            assert!((sbc - (theta.cos() * theta.sin()).abs()).abs() < 1e-12);
        }
        assert_eq!(
            filtering_order_demo(0.0).unwrap_err(),
            NogoError::DegenerateAngle
        );
        assert_eq!(
            filtering_order_demo(std::f64::consts::FRAC_PI_2).unwrap_err(),
            NogoError::DegenerateAngle
        );
    }

    #[test]
    fn double_projection_onto_same_axis_is_idempotent() {
        use crate::linalg::{project, Vec2C};
        let axis = Vec2C::from_real(0.6, 0.8);
        let v = Vec2C::from_real(-1.0, 2.0);
        let once = project(&axis, &v);
        let twice = project(&axis, &once);
        assert!(once.sub(&twice).norm() < 1e-12);
    }
}
