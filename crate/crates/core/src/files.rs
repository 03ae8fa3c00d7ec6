//! On-disk formats: the linkage description (JSON) and traced trajectories
//! (CSV with `#` header lines, or JSON).
//!
//! Floats are written in shortest round-trip form, so write → read → write
//! is byte-identical.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dq::{DualQuaternion, PlueckerLine};
use crate::error::{FileError, SampleSkip};
use crate::factor::{extract_linkage, DesignParams, Factorization, FreeParams, JointKind, LinkageDescription};
use crate::linkage::{Assembly, Trace};
use crate::modes::BranchLabel;
use crate::poly::MotionPolynomial;

const FACTOR_NAMES: [&str; 4] = ["P1", "P2", "P3", "P4"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignBlock {
    pub b: f64,
    pub c: f64,
    pub q1: f64,
    pub q2: f64,
    pub z1: f64,
    pub z2: f64,
    /// Only on the degenerate branch.
    pub z: Option<f64>,
    pub z3: f64,
    pub degenerate: bool,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorBlock {
    pub name: String,
    /// Coefficients by ascending degree, each in the order
    /// `1, i, j, k, ε, εi, εj, εk`.
    pub coeffs: Vec<[f64; 8]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointBlock {
    #[serde(rename = "type")]
    pub kind: String,
    /// Plücker coordinates: direction, then moment.
    pub axis: [f64; 6],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkageFile {
    pub design: DesignBlock,
    pub factors: Vec<FactorBlock>,
    pub joints: Vec<JointBlock>,
}

fn invalid(msg: impl Into<String>) -> FileError {
    FileError::Invalid(msg.into())
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1. + a.abs().max(b.abs()))
}

impl DesignBlock {
    pub fn from_params(params: &DesignParams, tol: f64) -> Self {
        Self {
            b: params.b(),
            c: params.c(),
            q1: params.q1(),
            q2: params.q2(),
            z1: params.z1(),
            z2: params.z2(),
            z: params.z(),
            z3: params.z3(),
            degenerate: params.is_degenerate(),
            tol,
        }
    }

    /// Rebuilds the design and checks that the derived entries agree with it.
    pub fn to_params(&self) -> Result<DesignParams, FileError> {
        if !(self.tol.is_finite() && self.tol > 0.) {
            return Err(invalid(format!("tol must be a positive finite number, got {}", self.tol)));
        }
        let free = match (self.degenerate, self.z) {
            (true, Some(z)) => FreeParams::Degenerate { z, z3: self.z3 },
            (true, None) => return Err(invalid("degenerate design needs `z`")),
            (false, None) => FreeParams::Generic { z1: self.z1, z2: self.z2 },
            (false, Some(_)) => return Err(invalid("`z` is only allowed on a degenerate design")),
        };
        let params = DesignParams::new(self.b, self.c, self.q1, self.q2, free)?;
        for (name, stored, derived) in [("z1", self.z1, params.z1()), ("z2", self.z2, params.z2()), ("z3", self.z3, params.z3())] {
            if !close(stored, derived, self.tol) {
                return Err(invalid(format!("{name} = {stored} is inconsistent with the design ({derived})")));
            }
        }
        Ok(params)
    }
}

impl LinkageFile {
    pub fn from_factorization(f: &Factorization, tol: f64) -> Result<Self, FileError> {
        let description = extract_linkage(f)?;
        let factors = f
            .factors()
            .into_iter()
            .zip(FACTOR_NAMES)
            .map(|(p, name)| FactorBlock {
                name: name.to_owned(),
                coeffs: p.coeffs().iter().map(|c| c.coeffs()).collect(),
            })
            .collect();
        let joints = description
            .joints
            .iter()
            .map(|j| JointBlock { kind: joint_code(j.kind).to_owned(), axis: j.axis.coords() })
            .collect();
        Ok(Self { design: DesignBlock::from_params(&f.params, tol), factors, joints })
    }

    /// Validates every block and re-verifies the factorization identity at
    /// the stored tolerance.
    pub fn to_model(&self) -> Result<(Factorization, LinkageDescription), FileError> {
        let params = self.design.to_params()?;
        let tol = self.design.tol;
        if self.factors.len() != 4 {
            return Err(invalid(format!("expected 4 factors, found {}", self.factors.len())));
        }
        let mut polys = Vec::with_capacity(4);
        for (block, name) in self.factors.iter().zip(FACTOR_NAMES) {
            if block.name != name {
                return Err(invalid(format!("expected factor {name}, found `{}`", block.name)));
            }
            if block.coeffs.iter().flatten().any(|v| !v.is_finite()) {
                return Err(invalid(format!("{name} has non-finite coefficients")));
            }
            if block.coeffs.len() != 2 {
                return Err(invalid(format!("{name} must be linear (2 coefficients), found {}", block.coeffs.len())));
            }
            polys.push(MotionPolynomial::new(block.coeffs.iter().map(|c| DualQuaternion::from_coeffs(*c)).collect()));
        }
        let polys: [MotionPolynomial; 4] = polys.try_into().expect("four factors");
        let f = Factorization::from_factors(params, polys, tol)?;
        for (p, name) in f.factors().into_iter().zip(FACTOR_NAMES) {
            if p.leading() != DualQuaternion::ONE {
                return Err(FileError::Mismatch(format!("{name} is not monic")));
            }
        }
        let expected = extract_linkage(&f)?;

        if self.joints.len() != expected.joints.len() {
            return Err(invalid(format!("expected {} joints, found {}", expected.joints.len(), self.joints.len())));
        }
        for (n, (block, joint)) in self.joints.iter().zip(&expected.joints).enumerate() {
            if block.kind != joint_code(joint.kind) {
                return Err(invalid(format!("joint {} must be of type {}", n + 1, joint_code(joint.kind))));
            }
            let [d0, d1, d2, m0, m1, m2] = block.axis;
            let axis = PlueckerLine::new([d0, d1, d2], [m0, m1, m2])?;
            if !axis.same_line(&joint.axis, tol.max(1e-12)) {
                return Err(FileError::Mismatch(format!("joint {} axis does not match the factor axes", n + 1)));
            }
        }
        Ok((f, expected))
    }

    pub fn from_json(s: &str) -> Result<Self, FileError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("finite floats serialize");
        s.push('\n');
        s
    }
}

fn joint_code(kind: JointKind) -> &'static str {
    match kind {
        JointKind::Revolute => "R",
        JointKind::Cylindrical => "C",
    }
}

/// SHA-256 of the compact JSON design block, in hex.
pub fn params_hash(params: &DesignParams) -> String {
    let json = serde_json::to_string(&DesignBlock::from_params(params, 0.)).expect("finite floats serialize");
    hex::encode(Sha256::digest(json.as_bytes()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SkipReason {
    Indeterminate,
    Complex,
}

impl From<SampleSkip> for SkipReason {
    fn from(s: SampleSkip) -> Self {
        match s {
            SampleSkip::Indeterminate => Self::Indeterminate,
            SampleSkip::Complex(_) => Self::Complex,
        }
    }
}

impl SkipReason {
    fn as_str(self) -> &'static str {
        match self {
            Self::Indeterminate => "indeterminate",
            Self::Complex => "complex",
        }
    }
}

impl FromStr for SkipReason {
    type Err = FileError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "indeterminate" => Ok(Self::Indeterminate),
            "complex" => Ok(Self::Complex),
            _ => Err(invalid(format!("unknown skip reason `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkippedSample {
    pub t: f64,
    pub reason: SkipReason,
}

/// A traced trajectory: header plus rows sorted by `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryFile {
    pub mode: String,
    pub assembly: u8,
    pub point: [f64; 3],
    pub params_hash: String,
    pub skipped: Vec<SkippedSample>,
    pub rows: Vec<TrajectoryRow>,
}

const CSV_COLUMNS: [&str; 4] = ["t", "x", "y", "z"];

impl TrajectoryFile {
    pub fn from_trace(branch: BranchLabel, point: [f64; 3], params: &DesignParams, trace: &Trace) -> Self {
        Self {
            mode: branch.to_string(),
            assembly: branch.assembly().index(),
            point,
            params_hash: params_hash(params),
            skipped: trace.skipped.iter().map(|&(t, s)| SkippedSample { t, reason: s.into() }).collect(),
            rows: trace
                .samples
                .iter()
                .map(|s| TrajectoryRow { t: s.t, x: s.point[0], y: s.point[1], z: s.point[2] })
                .collect(),
        }
    }

    pub fn branch(&self) -> Result<BranchLabel, FileError> {
        Ok(self.mode.parse()?)
    }

    pub fn points(&self) -> Vec<[f64; 3]> {
        self.rows.iter().map(|r| [r.x, r.y, r.z]).collect()
    }

    pub fn validate(&self) -> Result<(), FileError> {
        let branch = self.branch()?;
        match Assembly::from_index(self.assembly) {
            Some(a) if a == branch.assembly() => {}
            _ => return Err(invalid(format!("assembly {} does not match mode {branch}", self.assembly))),
        }
        if self.point.iter().any(|v| !v.is_finite()) {
            return Err(invalid("traced point must be finite"));
        }
        if self.params_hash.len() != 64 || !self.params_hash.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
            return Err(invalid("params_hash must be 64 lowercase hex digits"));
        }
        if self.skipped.iter().any(|s| !s.t.is_finite()) {
            return Err(invalid("skipped parameters must be finite"));
        }
        if self.rows.iter().any(|r| ![r.t, r.x, r.y, r.z].iter().all(|v| v.is_finite())) {
            return Err(invalid("rows must be finite"));
        }
        if self.rows.windows(2).any(|w| w[0].t > w[1].t) {
            return Err(invalid("rows must be sorted by t"));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("finite floats serialize");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, FileError> {
        let file: Self = serde_json::from_str(s)?;
        file.validate()?;
        Ok(file)
    }

    pub fn to_csv(&self) -> String {
        let [px, py, pz] = self.point;
        let skipped: Vec<String> = self.skipped.iter().map(|s| format!("{}:{}", s.t, s.reason.as_str())).collect();
        let mut out = String::new();
        writeln!(out, "# mode: {}", self.mode).unwrap();
        writeln!(out, "# assembly: {}", self.assembly).unwrap();
        writeln!(out, "# point: {px},{py},{pz}").unwrap();
        writeln!(out, "# params_hash: {}", self.params_hash).unwrap();
        if skipped.is_empty() {
            writeln!(out, "# skipped:").unwrap();
        } else {
            writeln!(out, "# skipped: {}", skipped.join(";")).unwrap();
        }
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(CSV_COLUMNS).expect("in-memory write");
        for r in &self.rows {
            w.serialize(r).expect("in-memory write");
        }
        let body = w.into_inner().expect("in-memory write");
        out.push_str(std::str::from_utf8(&body).expect("csv output is utf-8"));
        out
    }

    pub fn from_csv(s: &str) -> Result<Self, FileError> {
        let mut mode = None;
        let mut assembly = None;
        let mut point = None;
        let mut hash = None;
        let mut skipped = None;
        let mut body_start = s.len();
        let mut offset = 0;
        for line in s.split_inclusive('\n') {
            let Some(header) = line.strip_prefix('#') else {
                body_start = offset;
                break;
            };
            offset += line.len();
            let (key, value) = header
                .split_once(':')
                .ok_or_else(|| invalid(format!("malformed header line `{}`", line.trim_end())))?;
            let value = value.trim();
            let slot = match key.trim() {
                "mode" => &mut mode,
                "assembly" => &mut assembly,
                "point" => &mut point,
                "params_hash" => &mut hash,
                "skipped" => &mut skipped,
                other => return Err(invalid(format!("unknown header `{other}`"))),
            };
            if slot.replace(value.to_owned()).is_some() {
                return Err(invalid(format!("duplicate header `{}`", key.trim())));
            }
        }
        let require = |v: Option<String>, name: &str| v.ok_or_else(|| invalid(format!("missing header `{name}`")));
        let assembly = require(assembly, "assembly")?
            .parse::<u8>()
            .map_err(|e| invalid(format!("assembly: {e}")))?;
        let point = parse_point(&require(point, "point")?)?;
        let skipped = require(skipped, "skipped")?
            .split(';')
            .filter(|s| !s.is_empty())
            .map(|entry| {
                let (t, reason) = entry.split_once(':').ok_or_else(|| invalid(format!("malformed skipped entry `{entry}`")))?;
                let t = t.trim().parse::<f64>().map_err(|e| invalid(format!("skipped t: {e}")))?;
                Ok(SkippedSample { t, reason: reason.trim().parse()? })
            })
            .collect::<Result<Vec<_>, FileError>>()?;

        let mut reader = csv::Reader::from_reader(&s.as_bytes()[body_start..]);
        if reader.headers()?.iter().ne(CSV_COLUMNS) {
            return Err(invalid("CSV columns must be t,x,y,z"));
        }
        let rows = reader.deserialize().collect::<Result<Vec<TrajectoryRow>, _>>()?;
        let file = Self {
            mode: require(mode, "mode")?,
            assembly,
            point,
            params_hash: require(hash, "params_hash")?,
            skipped,
            rows,
        };
        file.validate()?;
        Ok(file)
    }
}

/// Parses `x,y,z` into a finite point.
pub fn parse_point(s: &str) -> Result<[f64; 3], FileError> {
    let parts = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| invalid(format!("point `{s}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    match parts[..] {
        [x, y, z] if parts.iter().all(|v| v.is_finite()) => Ok([x, y, z]),
        _ => Err(invalid(format!("point `{s}` must be three finite numbers x,y,z"))),
    }
}
