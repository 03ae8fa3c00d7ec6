//! Operation modes of the closed 4RC chain in both assembly modes.
//!
//! First assembly (`v2 = v1`):
//! * `A`: the original vertical Darboux motion, driven by `v1`;
//! * `B`: the sextic mode, driven by `v1`;
//! * `C+`, `C−`: rotations about the z-axis, driven by `v3` (degenerate
//!   designs only).
//!
//! Second assembly (`v2 = −1/v1`, degenerate designs only), driven by `v3`:
//! * `II-rot±`: `v4 = c/b` and `v1` fixed by a quadratic;
//! * `II-curve±`: `v4 = (v3² − 1)/(2 v3)` and `v1` one of the two roots of a
//!   quadratic whose coefficients depend on `v3`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{ModeError, SampleSkip};
use crate::ext::ExtReal;
use crate::factor::{self, DesignParams, Factorization};
use crate::linkage::{self, ClosureResidual, JointValues};
use crate::poly::MotionPolynomial;

pub use crate::linkage::Assembly;

/// Half-width of the discriminant band classified as [`Realness::Boundary`].
pub const REALNESS_DEAD_ZONE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BranchLabel {
    A,
    B,
    CPlus,
    CMinus,
    IIRotPlus,
    IIRotMinus,
    IICurvePlus,
    IICurveMinus,
}

impl BranchLabel {
    pub const ALL: [Self; 8] = [
        Self::A,
        Self::B,
        Self::CPlus,
        Self::CMinus,
        Self::IIRotPlus,
        Self::IIRotMinus,
        Self::IICurvePlus,
        Self::IICurveMinus,
    ];

    pub fn assembly(self) -> Assembly {
        match self {
            Self::A | Self::B | Self::CPlus | Self::CMinus => Assembly::First,
            _ => Assembly::Second,
        }
    }

    pub fn driver(self) -> Driver {
        match self {
            Self::A | Self::B => Driver::V1,
            _ => Driver::V3,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::A => "A",
            Self::B => "B",
            Self::CPlus => "C+",
            Self::CMinus => "C-",
            Self::IIRotPlus => "II-rot+",
            Self::IIRotMinus => "II-rot-",
            Self::IICurvePlus => "II-curve+",
            Self::IICurveMinus => "II-curve-",
        }
    }
}

impl fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BranchLabel {
    type Err = ModeError;

    /// Accepts the display names; `−` (U+2212) is read as `-`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().replace('\u{2212}', "-");
        Self::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(&norm))
            .ok_or_else(|| ModeError::UnknownBranch(s.to_owned()))
    }
}

/// Joint variable that parametrizes a mode curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Driver {
    V1,
    V3,
}

impl fmt::Display for Driver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::V1 => "v1",
            Self::V3 => "v3",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Realness {
    Real,
    Complex,
    /// Discriminant within [`REALNESS_DEAD_ZONE`] of zero.
    Boundary,
}

impl Realness {
    pub fn classify(discriminant: f64) -> Self {
        if discriminant > REALNESS_DEAD_ZONE {
            Self::Real
        } else if discriminant < -REALNESS_DEAD_ZONE {
            Self::Complex
        } else {
            Self::Boundary
        }
    }

    /// Real and boundary branches carry real configurations.
    pub fn is_real(self) -> bool {
        self != Self::Complex
    }
}

impl fmt::Display for Realness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Real => "real",
            Self::Complex => "complex",
            Self::Boundary => "boundary",
        })
    }
}

/// The resultant factor `F(v1, v3)` of the first assembly whose zero set is
/// mode B.
pub fn eval_f(v1: f64, v3: f64, params: &DesignParams) -> f64 {
    let (b, c) = (params.b(), params.c());
    let q = params.q1().powi(2) + params.q2().powi(2);
    let (b2, c2) = (b * b, c * c);
    let (b4, c4) = (b2 * b2, c2 * c2);
    let (v1_2, v1_3) = (v1 * v1, v1 * v1 * v1);
    8. * b * c * q * v1_3 * v3
        + b4 * v1_3
        - b4 * v1_2 * v3
        + 2. * b2 * c2 * v1_3
        - 2. * b2 * c2 * v1_2 * v3
        + 4. * b2 * q * v1_3
        + 12. * b2 * q * v1_2 * v3
        + c4 * v1_3
        - c4 * v1_2 * v3
        - 4. * c2 * q * v1_3
        - 12. * c2 * q * v1_2 * v3
        - 24. * b * c * q * v1_2
        - 24. * b * c * q * v1 * v3
        + b4 * v1
        - b4 * v3
        + 2. * b2 * c2 * v1
        - 2. * b2 * c2 * v3
        - 12. * b2 * q * v1
        - 4. * b2 * q * v3
        + c4 * v1
        - c4 * v3
        + 12. * c2 * q * v1
        + 4. * c2 * q * v3
        + 8. * b * c * q
}

fn s_first(params: &DesignParams, v1: f64) -> f64 {
    -(params.b() * v1 - params.c()) / (v1 * v1 + 1.)
}

/// `τ = −(v3 v4 + 1)/(v3 − v4)` in homogeneous coordinates.
fn tau_first(v3: ExtReal, v4: ExtReal) -> Option<ExtReal> {
    let ((a3, b3), (a4, b4)) = (v3.homogeneous(), v4.homogeneous());
    ExtReal::from_ratio(-(a3 * a4 + b3 * b4), a3 * b4 - a4 * b3)
}

/// `τ = (v3 − v4)/(v3 v4 + 1)` in homogeneous coordinates.
fn tau_second(v3: ExtReal, v4: ExtReal) -> Option<ExtReal> {
    let ((a3, b3), (a4, b4)) = (v3.homogeneous(), v4.homogeneous());
    ExtReal::from_ratio(a3 * b4 - a4 * b3, a3 * a4 + b3 * b4)
}

/// Mode A at `v1`: `v2 = v3 = v1`, `v4 = (v1² − 1)/(2 v1)`, `τ = −v1`.
pub fn mode_a(params: &DesignParams, v1: f64) -> JointValues {
    let v4 = ExtReal::from_ratio(v1 * v1 - 1., 2. * v1).unwrap_or(ExtReal::Infinity);
    JointValues {
        v1: v1.into(),
        v2: v1.into(),
        v3: v1.into(),
        v4,
        tau: (-v1).into(),
        s: s_first(params, v1),
    }
}

/// `(numerator, denominator)` of `v3(v1)` on mode B, ascending in `v1`.
fn mode_b_v3_coeffs(params: &DesignParams) -> ([f64; 4], [f64; 4]) {
    let (b, c) = (params.b(), params.c());
    let s2 = (b * b + c * c).powi(2);
    let q4 = 4. * (params.q1().powi(2) + params.q2().powi(2));
    let d = b * b - c * c;
    let bc = b * c;
    let num = [2. * bc * q4, s2 - 3. * d * q4, -6. * bc * q4, s2 + d * q4];
    let den = [s2 + d * q4, 6. * bc * q4, s2 - 3. * d * q4, -2. * bc * q4];
    (num, den)
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0., |acc, c| acc * x + c)
}

/// Mode B at `v1`. Poles of the closed forms are passed through the
/// extended reals; a `0/0` is reported as [`SampleSkip::Indeterminate`].
pub fn mode_b(params: &DesignParams, v1: f64) -> Result<JointValues, SampleSkip> {
    let (b, c) = (params.b(), params.c());
    let (num, den) = if params.is_degenerate() {
        // numerator and denominator share b v1² − 2c v1 − b, which vanishes
        // where mode B meets the special rotation modes
        (c - b * v1, c * v1 + b)
    } else {
        let (num, den) = mode_b_v3_coeffs(params);
        (horner(&num, v1), horner(&den, v1))
    };
    let v3 = ExtReal::from_ratio(num, den).ok_or(SampleSkip::Indeterminate)?;
    let v4 = ExtReal::from_ratio(
        -(b * v1 + c * v1 + b - c) * (b * v1 - c * v1 - b - c),
        2. * (c * v1 + b) * (b * v1 - c),
    )
    .ok_or(SampleSkip::Indeterminate)?;
    let tau = tau_first(v3, v4).ok_or(SampleSkip::Indeterminate)?;
    Ok(JointValues { v1: v1.into(), v2: v1.into(), v3, v4, tau, s: s_first(params, v1) })
}

/// Factors of the mode-B motion: a vertical Darboux motion and a
/// quadratically parametrized rotation about the z-axis. Their product at
/// `t = v1` is the displacement of the cylindrical joint along mode B, i.e.
/// the conjugate of the coupler transform.
pub fn mode_b_decomposition(params: &DesignParams) -> (MotionPolynomial, MotionPolynomial) {
    let (b, c) = (params.b(), params.c());
    let q = params.q1().powi(2) + params.q2().powi(2);
    let (d, g) = (b * b + c * c + 4. * q, params.condition());
    let vd = MotionPolynomial::from_components([
        &[-c, b, -c, b],
        &[],
        &[],
        &[-b, -c, -b, -c],
        &[-b * c, b * b - c * c, b * c],
        &[],
        &[],
        &[c * c, -2. * b * c, b * b],
    ]);
    let rot = MotionPolynomial::from_components([
        &[b * d, 2. * c * d, -b * d],
        &[],
        &[],
        &[-c * g, 2. * b * g, c * g],
        &[],
        &[],
        &[],
        &[],
    ]);
    (vd, rot)
}

/// Whether the second assembly mode exists, i.e. `b² + c² = 4(q1² + q2²)`
/// up to a relative tolerance.
pub fn assembly2_exists(params: &DesignParams) -> bool {
    factor::is_degenerate(params.b(), params.c(), params.q1(), params.q2())
}

/// `s = (−z(b² + c²)(v1² + 1) + 2 b v1 − 2 c) / (2(v1² + 1))` in homogeneous
/// coordinates so that `v1 = ∞` is admissible.
fn s_second(params: &DesignParams, v1: ExtReal) -> f64 {
    let (b, c) = (params.b(), params.c());
    let z = params.z().unwrap_or(0.);
    let (n, d) = v1.homogeneous();
    let w = n * n + d * d;
    (-z * (b * b + c * c) * w + 2. * b * n * d - 2. * c * d * d) / (2. * w)
}

fn assembly2_joints(params: &DesignParams, v1: ExtReal, v3: ExtReal, v4: ExtReal) -> Result<JointValues, SampleSkip> {
    let (n, d) = v1.homogeneous();
    let v2 = ExtReal::from_ratio(-d, n).ok_or(SampleSkip::Indeterminate)?;
    let tau = tau_second(v3, v4).ok_or(SampleSkip::Indeterminate)?;
    Ok(JointValues { v1, v2, v3, v4, tau, s: s_second(params, v1) })
}

fn frozen_v4(params: &DesignParams) -> ExtReal {
    ExtReal::from_ratio(params.c(), params.b()).unwrap_or(ExtReal::Infinity)
}

/// Solutions of the second-assembly curve branch at one value of `v3`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveSolutions {
    /// Discriminant of the quadratic in `v1`.
    pub discriminant: f64,
    /// `[+ sheet, − sheet]` when real, empty otherwise.
    pub solutions: Vec<JointValues>,
}

/// `(v1², v1, 1)` coefficients of the curve-branch quadratic at `v3`.
fn curve_quadratic(params: &DesignParams, v3: f64) -> (f64, f64, f64) {
    let (b, c, z3) = (params.b(), params.c(), params.z3());
    let w = v3 * v3;
    (-w * z3 + c * v3 + b - z3, c * w + c, b * w - w * z3 + c * v3 + 2. * b - z3)
}

/// Second-assembly curve branch at `v3`: `v4 = (v3² − 1)/(2 v3)` and `v1`
/// from the quadratic `A v1² + B v1 + C = 0`. The `+` sheet is
/// `(−B + √Δ)/(2A)`, the `−` sheet `(−B − √Δ)/(2A)`; a vanishing `A` sends
/// one sheet to `v1 = ∞`.
pub fn assembly2_curve_branch(params: &DesignParams, v3: f64) -> Result<CurveSolutions, ModeError> {
    if !assembly2_exists(params) {
        return Err(ModeError::NoSecondAssembly { condition: params.condition() });
    }
    if v3 == 0. {
        return Err(ModeError::CurvePole);
    }
    let (a, bq, cq) = curve_quadratic(params, v3);
    let disc = bq * bq - 4. * a * cq;
    if !Realness::classify(disc).is_real() {
        return Ok(CurveSolutions { discriminant: disc, solutions: Vec::new() });
    }
    let root = disc.max(0.).sqrt();
    // cancellation-free pairs (numerator, denominator)
    let (plus, minus) = if bq >= 0. {
        ((2. * cq, -bq - root), (-bq - root, 2. * a))
    } else {
        ((-bq + root, 2. * a), (2. * cq, -bq + root))
    };
    let v4 = ExtReal::from_ratio(v3 * v3 - 1., 2. * v3).unwrap_or(ExtReal::Infinity);
    let solutions = [plus, minus]
        .into_iter()
        .filter_map(|(n, d)| ExtReal::from_ratio(n, d))
        .filter_map(|v1| assembly2_joints(params, v1, v3.into(), v4).ok())
        .collect();
    Ok(CurveSolutions { discriminant: disc, solutions })
}

/// A one-parameter family of closed configurations.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSolution {
    pub branch: BranchLabel,
    pub realness: Realness,
    /// Discriminant deciding realness, where one exists. For the curve
    /// branch this is the largest value over a sweep of `v3`.
    pub discriminant: Option<f64>,
    /// Driving-parameter values where a joint formula has a pole.
    pub poles: Vec<f64>,
    params: DesignParams,
    fixed_v1: Option<f64>,
}

impl ModeSolution {
    fn new(branch: BranchLabel, params: &DesignParams) -> Self {
        Self {
            branch,
            realness: Realness::Real,
            discriminant: None,
            poles: Vec::new(),
            params: *params,
            fixed_v1: None,
        }
    }

    pub fn assembly(&self) -> Assembly {
        self.branch.assembly()
    }

    pub fn driver(&self) -> Driver {
        self.branch.driver()
    }

    pub fn params(&self) -> &DesignParams {
        &self.params
    }

    /// Frozen `v1` of the branches that have one (real part for complex
    /// branches).
    pub fn fixed_v1(&self) -> Option<f64> {
        self.fixed_v1
    }

    /// Configuration at driving parameter `t`. `f` supplies the factors for
    /// branches whose cylindrical joint is closed numerically.
    pub fn at(&self, f: &Factorization, t: f64) -> Result<JointValues, SampleSkip> {
        if self.realness == Realness::Complex {
            return Err(SampleSkip::Complex(self.discriminant.unwrap_or(f64::NAN)));
        }
        let p = &self.params;
        match self.branch {
            BranchLabel::A => Ok(mode_a(p, t)),
            BranchLabel::B => mode_b(p, t),
            BranchLabel::CPlus | BranchLabel::CMinus => {
                let v1 = self.fixed_v1.expect("special modes fix v1");
                let jv = JointValues {
                    v1: v1.into(),
                    v2: v1.into(),
                    v3: t.into(),
                    v4: frozen_v4(p),
                    tau: ExtReal::Infinity,
                    s: 0.,
                };
                let (tau, s) = linkage::close_cylinder(linkage::coupler_transform(f, &jv));
                Ok(JointValues { tau, s, ..jv })
            }
            BranchLabel::IIRotPlus | BranchLabel::IIRotMinus => {
                let v1 = self.fixed_v1.expect("rotation branch fixes v1");
                assembly2_joints(p, v1.into(), t.into(), frozen_v4(p))
            }
            BranchLabel::IICurvePlus | BranchLabel::IICurveMinus => {
                let sols = assembly2_curve_branch(p, t).map_err(|_| SampleSkip::Indeterminate)?;
                let sheet = usize::from(self.branch == BranchLabel::IICurveMinus);
                if sols.solutions.len() == 2 {
                    Ok(sols.solutions[sheet])
                } else if Realness::classify(sols.discriminant).is_real() {
                    Err(SampleSkip::Indeterminate)
                } else {
                    Err(SampleSkip::Complex(sols.discriminant))
                }
            }
        }
    }

    pub fn residual(&self, f: &Factorization, jv: &JointValues) -> ClosureResidual {
        linkage::closure_residual(linkage::chain_pose(f, jv), self.assembly(), &self.params)
    }

    /// Closure residuals over the given driving parameters.
    pub fn sweep(&self, f: &Factorization, ts: &[f64]) -> SweepReport {
        let mut report = SweepReport { max_residual: 0., min_half_turn: f64::INFINITY, evaluated: 0, skipped: Vec::new() };
        for &t in ts {
            match self.at(f, t) {
                Ok(jv) => {
                    let r = self.residual(f, &jv);
                    report.max_residual = report.max_residual.max(r.max());
                    if self.assembly() == Assembly::Second {
                        report.min_half_turn = report.min_half_turn.min(r.half_turn);
                    }
                    report.evaluated += 1;
                }
                Err(skip) => report.skipped.push((t, skip)),
            }
        }
        report
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub max_residual: f64,
    /// Smallest `c_i² + c_j²` seen (second assembly; `∞` otherwise).
    pub min_half_turn: f64,
    pub evaluated: usize,
    pub skipped: Vec<(f64, SampleSkip)>,
}

impl SweepReport {
    pub fn is_closed(&self, tol: f64) -> bool {
        self.max_residual < tol && (self.min_half_turn.is_infinite() || self.min_half_turn > tol)
    }
}

/// Real roots of the polynomial with ascending `coeffs`, sorted.
fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let scale = coeffs.iter().fold(0., |m: f64, c| m.max(c.abs()));
    let mut deg = coeffs.len();
    while deg > 0 && coeffs[deg - 1].abs() <= 1e-14 * scale {
        deg -= 1;
    }
    if deg < 2 {
        return Vec::new();
    }
    let c = &coeffs[..deg];
    let n = deg - 1;
    let lead = c[n];
    let companion = DMatrix::from_fn(n, n, |r, k| {
        if r == 0 {
            -c[n - 1 - k] / lead
        } else if r == k + 1 {
            1.
        } else {
            0.
        }
    });
    let deriv: Vec<f64> = c.iter().enumerate().skip(1).map(|(i, v)| i as f64 * v).collect();
    let mut roots: Vec<f64> = companion
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= 1e-7 * (1. + z.re.abs()))
        .map(|z| {
            let mut x = z.re;
            for _ in 0..3 {
                let d = horner(&deriv, x);
                if d != 0. {
                    x -= horner(c, x) / d;
                }
            }
            x
        })
        .collect();
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1. + b.abs()));
    roots
}

fn mode_a_solution(params: &DesignParams) -> ModeSolution {
    ModeSolution { poles: vec![0.], ..ModeSolution::new(BranchLabel::A, params) }
}

fn mode_b_solution(params: &DesignParams) -> ModeSolution {
    let (b, c) = (params.b(), params.c());
    let mut poles = if params.is_degenerate() { Vec::new() } else { real_roots(&mode_b_v3_coeffs(params).1) };
    if c != 0. {
        poles.push(-b / c);
    }
    if b != 0. {
        poles.push(c / b);
    }
    poles.sort_by(f64::total_cmp);
    poles.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1. + b.abs()));
    ModeSolution { poles, ..ModeSolution::new(BranchLabel::B, params) }
}

/// The two z-axis rotation modes `v1 = (c ± √(b² + c²))/b`, `v4 = c/b` of
/// a degenerate design; empty otherwise.
pub fn special_rotation_modes(params: &DesignParams) -> Result<Vec<ModeSolution>, ModeError> {
    if !params.is_degenerate() {
        return Ok(Vec::new());
    }
    let (b, c) = (params.b(), params.c());
    if b == 0. {
        return Err(ModeError::ZeroB);
    }
    let r = b.hypot(c);
    Ok([(BranchLabel::CPlus, c + r), (BranchLabel::CMinus, c - r)]
        .into_iter()
        .map(|(branch, n)| ModeSolution { fixed_v1: Some(n / b), ..ModeSolution::new(branch, params) })
        .collect())
}

/// The second-assembly rotation branch `v4 = c/b`,
/// `v1 = (−c ± √(−3b² + 8b z3 + c² − 4 z3²))/(b − 2 z3)`. Both solutions are
/// returned with their realness; empty when the second assembly does not
/// exist.
pub fn assembly2_rot_branch(params: &DesignParams) -> Result<Vec<ModeSolution>, ModeError> {
    if !assembly2_exists(params) {
        return Ok(Vec::new());
    }
    let (b, c, z3) = (params.b(), params.c(), params.z3());
    let den = b - 2. * z3;
    if den.abs() <= 1e-12 * (b.abs() + 2. * z3.abs()) {
        return Err(ModeError::SingularRotationBranch);
    }
    let disc = -3. * b * b + 8. * b * z3 + c * c - 4. * z3 * z3;
    let realness = Realness::classify(disc);
    let root = disc.max(0.).sqrt();
    Ok([(BranchLabel::IIRotPlus, root), (BranchLabel::IIRotMinus, -root)]
        .into_iter()
        .map(|(branch, r)| ModeSolution {
            realness,
            discriminant: Some(disc),
            fixed_v1: Some((-c + r) / den),
            ..ModeSolution::new(branch, params)
        })
        .collect())
}

/// Both sheets of the second-assembly curve branch; realness is decided by
/// the largest discriminant over a sweep of `v3`, normalized by `(1 + v3²)²`
/// so that it stays bounded.
fn assembly2_curve_solutions(params: &DesignParams) -> Vec<ModeSolution> {
    if !assembly2_exists(params) {
        return Vec::new();
    }
    let best = linkage::full_circle_samples(720)
        .into_iter()
        .map(|v3| {
            let (a, b, c) = curve_quadratic(params, v3);
            (b * b - 4. * a * c) / (1. + v3 * v3).powi(2)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    [BranchLabel::IICurvePlus, BranchLabel::IICurveMinus]
        .into_iter()
        .map(|branch| ModeSolution {
            realness: Realness::classify(best),
            discriminant: Some(best),
            poles: vec![0.],
            ..ModeSolution::new(branch, params)
        })
        .collect()
}

/// All operation modes of one assembly mode.
pub fn enumerate_modes(params: &DesignParams, assembly: Assembly) -> Result<Vec<ModeSolution>, ModeError> {
    match assembly {
        Assembly::First => {
            let mut modes = vec![mode_a_solution(params), mode_b_solution(params)];
            modes.extend(special_rotation_modes(params)?);
            Ok(modes)
        }
        Assembly::Second => {
            let mut modes = assembly2_rot_branch(params)?;
            modes.extend(assembly2_curve_solutions(params));
            Ok(modes)
        }
    }
}

/// Looks up one branch.
pub fn mode_by_label(params: &DesignParams, branch: BranchLabel) -> Result<Option<ModeSolution>, ModeError> {
    Ok(enumerate_modes(params, branch.assembly())?.into_iter().find(|m| m.branch == branch))
}
