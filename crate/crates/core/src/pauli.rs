//! Pauli operators in binary symplectic form.
//!
//! An operator on `n` qubits is stored as two bitmasks plus a phase exponent:
//! `i^phase * P_1 ⊗ ... ⊗ P_n`, where qubit `k` (0-based) carries `I`, `X`, `Z`
//! or `Y` according to bit `k` of `(x, z)`. `(1, 1)` is `Y` itself, so a
//! Hermitian operator always has phase 0 or 2.
//!
//! Qubits are 0-based internally and 1-based in text (`Z1*Z2`, `-Y1*X3`).

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Hard limit imposed by the `u64` bitmask storage.
pub const MAX_SYMBOLIC_QUBITS: usize = 64;

/// Default limit for dense conversion (a 64 x 64 matrix).
pub const DEFAULT_MAX_DENSE_QUBITS: usize = 6;

/// Default cap on the number of elements enumerated by [`PauliGroup::closure`].
pub const DEFAULT_CLOSURE_CAP: usize = 1 << 16;

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// 2x2 matrix of the letter.
    pub fn matrix(self) -> CMatrix {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let entries = match self {
            Pauli::I => [l, o, o, l],
            Pauli::X => [o, l, l, o],
            Pauli::Y => [o, -i, i, o],
            Pauli::Z => [l, o, o, -l],
        };
        DMatrix::from_row_slice(2, 2, &entries)
    }
}

/// Power of `i` picked up when multiplying single-qubit Paulis `a * b`,
/// as a signed exponent in {-1, 0, 1}.
fn product_phase(ax: bool, az: bool, bx: bool, bz: bool) -> i32 {
    let (ax, az, bx, bz) = (ax as i32, az as i32, bx as i32, bz as i32);
    match (ax, az) {
        (0, 0) => 0,
        (1, 1) => bz - bx,
        (1, 0) => bz * (2 * bx - 1),
        _ => bx * (1 - 2 * bz),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliOp {
    n: usize,
    x: u64,
    z: u64,
    phase: u8,
}

impl PauliOp {
    pub fn identity(n: usize) -> Self {
        Self::check_qubits(n);
        Self { n, x: 0, z: 0, phase: 0 }
    }

    /// Builds an operator from raw bitmasks; bit `k` refers to qubit `k` (0-based).
    pub fn from_bits(n: usize, x: u64, z: u64, phase: u8) -> Result<Self> {
        if n > MAX_SYMBOLIC_QUBITS {
            return Err(Error::TooManyQubits { qubits: n, limit: MAX_SYMBOLIC_QUBITS });
        }
        let mask = Self::mask(n);
        if x & !mask != 0 || z & !mask != 0 {
            return Err(Error::InvalidArgument(format!("bits set beyond qubit {n}")));
        }
        Ok(Self { n, x, z, phase: phase % 4 })
    }

    /// `letter` acting on 0-based `qubit`, identity elsewhere.
    pub fn single(n: usize, qubit: usize, letter: Pauli) -> Result<Self> {
        if qubit >= n {
            return Err(Error::InvalidArgument(format!(
                "qubit {} out of range for {n} qubits",
                qubit + 1
            )));
        }
        let (x, z) = letter.bits();
        Self::from_bits(n, (x as u64) << qubit, (z as u64) << qubit, 0)
    }

    /// Builds an operator from one letter per qubit.
    pub fn from_letters(letters: &[Pauli]) -> Result<Self> {
        let mut x = 0;
        let mut z = 0;
        for (k, letter) in letters.iter().enumerate() {
            let (bx, bz) = letter.bits();
            x |= (bx as u64) << k;
            z |= (bz as u64) << k;
        }
        Self::from_bits(letters.len(), x, z, 0)
    }

    /// Parses a Pauli string over `n` declared qubits, e.g. `"Z1*Z3"`, `"-Y1*X2"`, `"I"`.
    ///
    /// An optional `+`, `-`, `i`, `+i` or `-i` prefix sets the phase. Factors may
    /// be joined with `*`, whitespace, or nothing. Repeated qubits are multiplied
    /// left to right.
    pub fn parse(input: &str, n: usize) -> Result<Self> {
        let err = |reason: &str| Error::Parse { input: input.to_string(), reason: reason.to_string() };
        if n > MAX_SYMBOLIC_QUBITS {
            return Err(Error::TooManyQubits { qubits: n, limit: MAX_SYMBOLIC_QUBITS });
        }
        let trimmed = input.trim();
        let (mut phase, mut rest) = match trimmed {
            s if s.starts_with("-i") => (2u8 + 1, &s[2..]),
            s if s.starts_with("+i") => (1, &s[2..]),
            s if s.starts_with('i') => (1, &s[1..]),
            s if s.starts_with('-') => (2, &s[1..]),
            s if s.starts_with('+') => (0, &s[1..]),
            s => (0, s),
        };
        rest = rest.trim_start();
        if rest.is_empty() {
            return Err(err("empty operator"));
        }
        let mut acc = Self::identity(n);
        if rest == "I" || rest == "1" {
            acc.phase = phase % 4;
            return Ok(acc);
        }
        let chars: Vec<char> = rest.chars().collect();
        let mut pos = 0;
        let mut factors = 0;
        while pos < chars.len() {
            let c = chars[pos];
            if c == '*' || c.is_whitespace() {
                pos += 1;
                continue;
            }
            let letter = match c {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(err(&format!("unexpected character {c:?}"))),
            };
            pos += 1;
            let start = pos;
            while pos < chars.len() && chars[pos].is_ascii_digit() {
                pos += 1;
            }
            if start == pos {
                return Err(err(&format!("{c} is missing a qubit index")));
            }
            let digits: String = chars[start..pos].iter().collect();
            let index: usize = digits.parse().map_err(|_| err("bad qubit index"))?;
            if index == 0 || index > n {
                return Err(err(&format!("qubit {index} outside 1..={n}")));
            }
            let factor = Self::single(n, index - 1, letter)?;
            acc = acc.multiply(&factor)?;
            factors += 1;
        }
        if factors == 0 {
            return Err(err("no factors"));
        }
        phase = (phase + acc.phase) % 4;
        acc.phase = phase;
        Ok(acc)
    }

    fn check_qubits(n: usize) {
        assert!(n <= MAX_SYMBOLIC_QUBITS, "at most {MAX_SYMBOLIC_QUBITS} qubits supported");
    }

    fn mask(n: usize) -> u64 {
        if n == 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    /// Phase exponent `k` of the prefactor `i^k`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn letter(&self, qubit: usize) -> Pauli {
        Pauli::from_bits(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    /// Number of qubits acted on non-trivially.
    pub fn locality(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// 0-based qubits acted on non-trivially, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&k| (self.x | self.z) >> k & 1 == 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    /// Phase-stripped key used for group membership.
    pub fn key(&self) -> (u64, u64) {
        (self.x, self.z)
    }

    /// Same operator with phase 0.
    pub fn unsigned(&self) -> Self {
        Self { phase: 0, ..*self }
    }

    pub fn negated(&self) -> Self {
        Self { phase: (self.phase + 2) % 4, ..*self }
    }

    pub fn inverse(&self) -> Self {
        Self { phase: (4 - self.phase) % 4, ..*self }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    /// Group product `self * other` with exact phase.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut exponent = self.phase as i32 + other.phase as i32;
        let support = (self.x | self.z) & (other.x | other.z);
        for k in 0..self.n {
            if support >> k & 1 == 0 {
                continue;
            }
            exponent += product_phase(
                self.x >> k & 1 == 1,
                self.z >> k & 1 == 1,
                other.x >> k & 1 == 1,
                other.z >> k & 1 == 1,
            );
        }
        Ok(Self {
            n: self.n,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            phase: exponent.rem_euclid(4) as u8,
        })
    }

    /// Symplectic inner product test: true iff the operators commute.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Dense `2^n x 2^n` matrix built by Kronecker products; qubit 1 is the
    /// leftmost (most significant) factor.
    pub fn to_dense(&self) -> Result<CMatrix> {
        self.to_dense_limited(DEFAULT_MAX_DENSE_QUBITS)
    }

    pub fn to_dense_limited(&self, max_qubits: usize) -> Result<CMatrix> {
        if self.n > max_qubits {
            return Err(Error::TooManyQubits { qubits: self.n, limit: max_qubits });
        }
        let mut acc = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        for k in 0..self.n {
            acc = acc.kronecker(&self.letter(k).matrix());
        }
        let scale = match self.phase {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        Ok(acc * scale)
    }

    /// `(x, z)` masks in dense-index bit order (qubit 1 is the most significant bit).
    pub(crate) fn dense_masks(&self) -> (usize, usize) {
        let mut xm = 0usize;
        let mut zm = 0usize;
        for k in 0..self.n {
            let bit = self.n - 1 - k;
            xm |= ((self.x >> k & 1) as usize) << bit;
            zm |= ((self.z >> k & 1) as usize) << bit;
        }
        (xm, zm)
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.phase {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        })?;
        if self.is_identity() {
            return f.write_str("I");
        }
        let mut first = true;
        for k in 0..self.n {
            let letter = self.letter(k);
            if letter == Pauli::I {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            write!(f, "{}{}", letter.letter(), k + 1)?;
            first = false;
        }
        Ok(())
    }
}

/// Parses with the qubit count inferred from the highest index mentioned.
impl FromStr for PauliOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut highest = 0usize;
        let mut digits = String::new();
        for c in s.chars().chain(core::iter::once(' ')) {
            if c.is_ascii_digit() {
                digits.push(c);
            } else if !digits.is_empty() {
                highest = highest.max(digits.parse().unwrap_or(0));
                digits.clear();
            }
        }
        Self::parse(s, highest.max(1))
    }
}

/// Parses a list of Pauli strings over `n` qubits.
pub fn parse_list<S: AsRef<str>>(items: &[S], n: usize) -> Result<Vec<PauliOp>> {
    items.iter().map(|s| PauliOp::parse(s.as_ref(), n)).collect()
}

/// A Pauli group given by generators, with its elements enumerated modulo phase.
#[derive(Debug, Clone)]
pub struct PauliGroup {
    n: usize,
    generators: Vec<PauliOp>,
    elements: Vec<PauliOp>,
    keys: BTreeSet<(u64, u64)>,
}

impl PauliGroup {
    pub fn closure(n: usize, generators: &[PauliOp]) -> Result<Self> {
        Self::closure_capped(n, generators, DEFAULT_CLOSURE_CAP)
    }

    /// Enumerates the group generated by `generators` modulo phase. Fails if the
    /// element count would exceed `cap`.
    pub fn closure_capped(n: usize, generators: &[PauliOp], cap: usize) -> Result<Self> {
        for g in generators {
            if g.n != n {
                return Err(Error::DimensionMismatch { left: n, right: g.n });
            }
        }
        let mut elements = alloc::vec![PauliOp::identity(n)];
        let mut keys = BTreeSet::new();
        keys.insert((0u64, 0u64));
        for g in generators {
            if keys.contains(&g.key()) {
                continue;
            }
            if elements.len() * 2 > cap {
                return Err(Error::ClosureTooLarge { cap });
            }
            let extra: Vec<PauliOp> = elements
                .iter()
                .map(|e| e.multiply(&g.unsigned()).map(|p| p.unsigned()))
                .collect::<Result<_>>()?;
            for e in extra {
                keys.insert(e.key());
                elements.push(e);
            }
        }
        elements.sort_by_key(|e| e.key());
        Ok(Self { n, generators: generators.to_vec(), elements, keys })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliOp] {
        &self.generators
    }

    /// Phase-stripped elements in canonical `(x, z)` order.
    pub fn elements(&self) -> &[PauliOp] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Membership modulo phase.
    pub fn contains(&self, p: &PauliOp) -> bool {
        p.n == self.n && self.keys.contains(&p.key())
    }

    /// Returns an anticommuting pair of generators, or `None` when the group is Abelian.
    pub fn anticommuting_pair(&self) -> Option<(PauliOp, PauliOp)> {
        for (i, a) in self.generators.iter().enumerate() {
            for b in &self.generators[i + 1..] {
                if !a.commutes_unchecked(b) {
                    return Some((*a, *b));
                }
            }
        }
        None
    }

    pub fn is_abelian(&self) -> bool {
        self.anticommuting_pair().is_none()
    }

    /// Elements shared with `other` other than the identity.
    pub fn intersection(&self, other: &PauliGroup) -> Vec<PauliOp> {
        self.elements
            .iter()
            .filter(|e| !e.is_identity() && other.contains(e))
            .copied()
            .collect()
    }
}
