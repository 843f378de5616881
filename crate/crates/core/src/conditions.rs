//! Symbolic protection checks for a Pauli encoding under unread Pauli measurements.
//!
//! Everything here is decided by commutation structure alone. The noise
//! coefficients are opaque labels, so a verdict holds for any values of them,
//! including bath operators.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliGroup, PauliOp, DEFAULT_CLOSURE_CAP};

/// Logical operators `Z̄_1..Z̄_m, X̄_1..X̄_m` of an `m`-qubit encoding in `n` physical qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingSpec {
    n: usize,
    logical_z: Vec<PauliOp>,
    logical_x: Vec<PauliOp>,
}

impl EncodingSpec {
    /// Validates the logical algebra: all `Z̄` commute, all `X̄` commute,
    /// `Z̄_i` and `X̄_j` commute for `i != j` and anticommute for `i == j`.
    pub fn new(n: usize, logical_z: Vec<PauliOp>, logical_x: Vec<PauliOp>) -> Result<Self> {
        if logical_z.len() != logical_x.len() || logical_z.is_empty() {
            return Err(Error::InvalidEncoding(format!(
                "need matching nonempty Z and X lists, got {} and {}",
                logical_z.len(),
                logical_x.len()
            )));
        }
        for op in logical_z.iter().chain(&logical_x) {
            if op.num_qubits() != n {
                return Err(Error::DimensionMismatch { left: n, right: op.num_qubits() });
            }
            if !op.is_hermitian() || op.is_identity() {
                return Err(Error::InvalidEncoding(format!("{op} is not a nontrivial Hermitian Pauli")));
            }
        }
        let m = logical_z.len();
        for i in 0..m {
            for j in 0..m {
                if !logical_z[i].commutes_unchecked(&logical_z[j]) {
                    return Err(Error::InvalidEncoding(format!(
                        "{} and {} anticommute",
                        logical_z[i], logical_z[j]
                    )));
                }
                if !logical_x[i].commutes_unchecked(&logical_x[j]) {
                    return Err(Error::InvalidEncoding(format!(
                        "{} and {} anticommute",
                        logical_x[i], logical_x[j]
                    )));
                }
                let commute = logical_z[i].commutes_unchecked(&logical_x[j]);
                if (i == j) == commute {
                    let want = if i == j { "anticommute" } else { "commute" };
                    return Err(Error::InvalidEncoding(format!(
                        "{} and {} must {want}",
                        logical_z[i], logical_x[j]
                    )));
                }
            }
        }
        Ok(Self { n, logical_z, logical_x })
    }

    /// The three-qubit encoding `Z̄ = Z1*Z2`, `X̄ = X2*X3`.
    pub fn three_qubit() -> Self {
        Self::new(3, alloc::vec![op3("Z1*Z2")], alloc::vec![op3("X2*X3")])
            .expect("three-qubit encoding is valid")
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn num_logical(&self) -> usize {
        self.logical_z.len()
    }

    pub fn logical_z(&self) -> &[PauliOp] {
        &self.logical_z
    }

    pub fn logical_x(&self) -> &[PauliOp] {
        &self.logical_x
    }

    /// `Z̄_1..Z̄_m` followed by `X̄_1..X̄_m`.
    pub fn logical_ops(&self) -> Vec<PauliOp> {
        self.logical_z.iter().chain(&self.logical_x).copied().collect()
    }
}

fn op3(s: &str) -> PauliOp {
    PauliOp::parse(s, 3).expect("static operator")
}

/// The three-qubit measurement set `Z1, Z2*Z3, X3, X1*X2`.
pub fn three_qubit_measurements() -> Vec<PauliOp> {
    ["Z1", "Z2*Z3", "X3", "X1*X2"].iter().map(|s| op3(s)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTerm {
    pub op: PauliOp,
    pub label: String,
}

/// Noise decomposition `H = Σ a_l e_l` with symbolic coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSet {
    n: usize,
    terms: Vec<ErrorTerm>,
}

impl ErrorSet {
    /// Requires distinct operators modulo phase and exactly one identity term.
    pub fn new(n: usize, terms: Vec<ErrorTerm>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut identities = 0;
        for term in &terms {
            if term.op.num_qubits() != n {
                return Err(Error::DimensionMismatch { left: n, right: term.op.num_qubits() });
            }
            if !seen.insert(term.op.key()) {
                return Err(Error::InvalidErrorSet(format!("duplicate term {}", term.op)));
            }
            if term.op.is_identity() {
                identities += 1;
            }
        }
        if identities != 1 {
            return Err(Error::InvalidErrorSet("identity term must appear exactly once".to_string()));
        }
        Ok(Self { n, terms })
    }

    /// Labels operators `a_1, a_2, ...` and prepends the identity term `a_0` if missing.
    pub fn from_ops(n: usize, ops: &[PauliOp]) -> Result<Self> {
        let mut terms = Vec::with_capacity(ops.len() + 1);
        if !ops.iter().any(|op| op.is_identity()) {
            terms.push(ErrorTerm { op: PauliOp::identity(n), label: "a0".to_string() });
        }
        for (k, op) in ops.iter().enumerate() {
            let label = if op.is_identity() { "a0".to_string() } else { format!("a{}", k + 1) };
            terms.push(ErrorTerm { op: op.unsigned(), label });
        }
        Self::new(n, terms)
    }

    /// Identity plus every single-qubit Pauli: general one-local noise.
    pub fn one_local(n: usize) -> Self {
        let mut terms = alloc::vec![ErrorTerm { op: PauliOp::identity(n), label: "a0".to_string() }];
        for q in 0..n {
            for letter in [Pauli::X, Pauli::Y, Pauli::Z] {
                let op = PauliOp::single(n, q, letter).expect("qubit in range");
                terms.push(ErrorTerm { op, label: format!("a{}{:?}", q + 1, letter) });
            }
        }
        Self { n, terms }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[ErrorTerm] {
        &self.terms
    }

    pub fn ops(&self) -> impl Iterator<Item = &PauliOp> {
        self.terms.iter().map(|t| &t.op)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when only the identity term remains.
    pub fn is_trivial(&self) -> bool {
        self.terms.iter().all(|t| t.op.is_identity())
    }
}

fn check_dims(n: usize, ops: &[PauliOp]) -> Result<()> {
    for op in ops {
        if op.num_qubits() != n {
            return Err(Error::DimensionMismatch { left: n, right: op.num_qubits() });
        }
    }
    Ok(())
}

fn check_measurements(n: usize, measured: &[PauliOp]) -> Result<()> {
    check_dims(n, measured)?;
    if let Some(bad) = measured.iter().find(|c| !c.is_hermitian()) {
        return Err(Error::NotHermitian(*bad));
    }
    Ok(())
}

/// Applies the adjoint of every measurement channel to `H` symbolically.
///
/// A term survives `(• + c•c)/2` iff it commutes with `c`, and is annihilated
/// otherwise, so the surviving terms are those commuting with all of `measured`.
pub fn reduce_hamiltonian(measured: &[PauliOp], errors: &ErrorSet) -> Result<ErrorSet> {
    check_measurements(errors.n, measured)?;
    let terms = errors
        .terms
        .iter()
        .filter(|t| measured.iter().all(|c| c.commutes_unchecked(&t.op)))
        .cloned()
        .collect();
    Ok(ErrorSet { n: errors.n, terms })
}

/// Whether `-i[P†H, A]` vanishes for every choice of coefficients.
///
/// `observable` must commute with every measured operator; anything else is an error.
pub fn check_oqze_condition(observable: &PauliOp, measured: &[PauliOp], errors: &ErrorSet) -> Result<bool> {
    if observable.num_qubits() != errors.n {
        return Err(Error::DimensionMismatch { left: errors.n, right: observable.num_qubits() });
    }
    check_measurements(errors.n, measured)?;
    if let Some(c) = measured.iter().find(|c| !c.commutes_unchecked(observable)) {
        return Err(Error::NoncommutingObservable { operator: *observable, measured: *c });
    }
    let reduced = reduce_hamiltonian(measured, errors)?;
    let verdict = reduced.ops().all(|e| e.commutes_unchecked(observable));
    Ok(verdict)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogicalCommutation {
    pub holds: bool,
    /// `(measured, logical)` pairs that anticommute.
    pub violations: Vec<(PauliOp, PauliOp)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupOverlap {
    pub holds: bool,
    /// A non-identity element common to both groups, if any.
    pub witness: Option<PauliOp>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorDetection {
    pub holds: bool,
    /// Non-identity error operators that commute with every measurement.
    pub unsuppressed: Vec<PauliOp>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    /// Every measured operator commutes with every logical operator.
    pub logical_commutation: LogicalCommutation,
    /// `G(C) ∩ G(L)` is trivial.
    pub measurement_logical_overlap: GroupOverlap,
    /// Every non-identity error anticommutes with some measured operator.
    pub error_detection: ErrorDetection,
    /// `E ∩ G(L)` is trivial (standing assumption on the noise).
    pub error_logical_overlap: GroupOverlap,
    /// The sufficient Zeno condition holds for every logical operator.
    pub oqze_ok: bool,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.logical_commutation.holds
            && self.measurement_logical_overlap.holds
            && self.error_detection.holds
            && self.error_logical_overlap.holds
            && self.oqze_ok
    }

    /// Flat `key = value` record for machine consumption.
    pub fn key_values(&self) -> Vec<(String, String)> {
        let join = |ops: &mut dyn Iterator<Item = String>| ops.collect::<Vec<_>>().join(";");
        let opt = |w: &Option<PauliOp>| w.map(|p| p.to_string()).unwrap_or_default();
        alloc::vec![
            ("logical_commutation".into(), self.logical_commutation.holds.to_string()),
            (
                "logical_commutation_violations".into(),
                join(&mut self.logical_commutation.violations.iter().map(|(c, l)| format!("{c}|{l}"))),
            ),
            ("measurement_logical_overlap".into(), self.measurement_logical_overlap.holds.to_string()),
            ("measurement_logical_overlap_witness".into(), opt(&self.measurement_logical_overlap.witness)),
            ("error_detection".into(), self.error_detection.holds.to_string()),
            (
                "error_detection_unsuppressed".into(),
                join(&mut self.error_detection.unsuppressed.iter().map(|p| p.to_string())),
            ),
            ("error_logical_overlap".into(), self.error_logical_overlap.holds.to_string()),
            ("error_logical_overlap_witness".into(), opt(&self.error_logical_overlap.witness)),
            ("oqze".into(), self.oqze_ok.to_string()),
            ("all".into(), self.all_hold().to_string()),
        ]
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |ok: bool| if ok { "PASS" } else { "FAIL" };
        writeln!(f, "[{}] measurements commute with logical operators", mark(self.logical_commutation.holds))?;
        for (c, l) in &self.logical_commutation.violations {
            writeln!(f, "       {c} anticommutes with {l}")?;
        }
        writeln!(f, "[{}] G(C) and G(L) share only the identity", mark(self.measurement_logical_overlap.holds))?;
        if let Some(w) = &self.measurement_logical_overlap.witness {
            writeln!(f, "       shared element: {w}")?;
        }
        writeln!(f, "[{}] every error anticommutes with a measurement", mark(self.error_detection.holds))?;
        for e in &self.error_detection.unsuppressed {
            writeln!(f, "       unsuppressed: {e}")?;
        }
        writeln!(f, "[{}] E and G(L) share only the identity", mark(self.error_logical_overlap.holds))?;
        if let Some(w) = &self.error_logical_overlap.witness {
            writeln!(f, "       shared element: {w}")?;
        }
        writeln!(f, "[{}] -i[P'H, A] = 0 for all logical A", mark(self.oqze_ok))
    }
}

pub fn check_conditions(enc: &EncodingSpec, measured: &[PauliOp], errors: &ErrorSet) -> Result<ConditionReport> {
    check_conditions_capped(enc, measured, errors, DEFAULT_CLOSURE_CAP)
}

pub fn check_conditions_capped(
    enc: &EncodingSpec,
    measured: &[PauliOp],
    errors: &ErrorSet,
    closure_cap: usize,
) -> Result<ConditionReport> {
    let n = enc.n;
    if errors.n != n {
        return Err(Error::DimensionMismatch { left: n, right: errors.n });
    }
    check_measurements(n, measured)?;
    let logical = enc.logical_ops();

    let violations: Vec<(PauliOp, PauliOp)> = measured
        .iter()
        .flat_map(|c| logical.iter().filter(|l| !c.commutes_unchecked(l)).map(move |l| (*c, *l)))
        .collect();
    let logical_commutation = LogicalCommutation { holds: violations.is_empty(), violations };

    let logical_group = PauliGroup::closure_capped(n, &logical, closure_cap)?;
    let measured_group = PauliGroup::closure_capped(n, measured, closure_cap)?;
    let shared = measured_group.intersection(&logical_group);
    let measurement_logical_overlap = GroupOverlap { holds: shared.is_empty(), witness: shared.first().copied() };

    let unsuppressed: Vec<PauliOp> = errors
        .ops()
        .filter(|e| !e.is_identity() && measured.iter().all(|c| c.commutes_unchecked(e)))
        .copied()
        .collect();
    let error_detection = ErrorDetection { holds: unsuppressed.is_empty(), unsuppressed };

    let error_witness = errors.ops().find(|e| !e.is_identity() && logical_group.contains(e)).copied();
    let error_logical_overlap = GroupOverlap { holds: error_witness.is_none(), witness: error_witness };

    let mut oqze_ok = true;
    for l in &logical {
        match check_oqze_condition(l, measured, errors) {
            Ok(true) => {}
            Ok(false) | Err(Error::NoncommutingObservable { .. }) => oqze_ok = false,
            Err(e) => return Err(e),
        }
    }
    debug_assert!(!(logical_commutation.holds && error_detection.holds) || oqze_ok);

    Ok(ConditionReport {
        logical_commutation,
        measurement_logical_overlap,
        error_detection,
        error_logical_overlap,
        oqze_ok,
    })
}

/// Outcome of the two-local Abelian obstruction analysis for one qubit.
#[derive(Debug, Clone, PartialEq)]
pub enum ObstructionReport {
    /// `G(C)` is non-Abelian, so the argument does not apply.
    NotApplicable { anticommuting: (PauliOp, PauliOp) },
    /// Fewer than two Pauli axes of the qubit are touched by `C`, so general
    /// one-local noise there is not fully suppressed.
    Unsuppressed { qubit: usize, covered: Vec<Pauli> },
    /// Two commuting two-local measurements `first = σ_q σ'`, `second = σ''_q s`
    /// with `{σ', s} = 0` force `qubit` and `partner` into a maximally entangled pair.
    Obstructed { qubit: usize, partner: usize, first: PauliOp, second: PauliOp },
}

/// `qubit` is 0-based.
pub fn detect_abelian_obstruction(qubit: usize, measured: &[PauliOp]) -> Result<ObstructionReport> {
    let Some(first) = measured.first() else {
        return Ok(ObstructionReport::Unsuppressed { qubit, covered: Vec::new() });
    };
    let n = first.num_qubits();
    check_measurements(n, measured)?;
    if qubit >= n {
        return Err(Error::InvalidArgument(format!("qubit {} outside 1..={n}", qubit + 1)));
    }
    if let Some(c) = measured.iter().find(|c| c.locality() > 2) {
        return Err(Error::InvalidArgument(format!("{c} acts on more than two qubits")));
    }
    let group = PauliGroup::closure(n, measured)?;
    if let Some(pair) = group.anticommuting_pair() {
        return Ok(ObstructionReport::NotApplicable { anticommuting: pair });
    }

    let touching: Vec<&PauliOp> = measured.iter().filter(|c| c.letter(qubit) != Pauli::I).collect();
    let mut covered: Vec<Pauli> = touching.iter().map(|c| c.letter(qubit)).collect();
    covered.sort();
    covered.dedup();
    if covered.len() < 2 {
        return Ok(ObstructionReport::Unsuppressed { qubit, covered });
    }
    for (i, a) in touching.iter().enumerate() {
        for b in &touching[i + 1..] {
            if a.letter(qubit) == b.letter(qubit) {
                continue;
            }
            // Commuting with different letters on `qubit` forces both to be two-local
            // with anticommuting letters on one shared partner qubit.
            let partner_a = a.support().into_iter().find(|&q| q != qubit);
            let partner_b = b.support().into_iter().find(|&q| q != qubit);
            if let (Some(pa), Some(pb)) = (partner_a, partner_b) {
                if pa == pb {
                    return Ok(ObstructionReport::Obstructed { qubit, partner: pa, first: **a, second: **b });
                }
            }
        }
    }
    Ok(ObstructionReport::Unsuppressed { qubit, covered })
}
