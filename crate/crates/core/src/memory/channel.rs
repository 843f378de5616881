//! Single-qubit logical channels in the Pauli transfer matrix picture.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{cplx, mean_and_stderr, trace_product, CMatrix};
use crate::pauli::Pauli;
use crate::simulator::DensityMatrix;

/// Order of the Pauli basis used for PTM rows and columns.
pub const PAULI_ORDER: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

/// Logical basis inputs, in the order expected by [`Ptm::from_basis_outputs`].
pub fn basis_inputs() -> [DensityMatrix; 4] {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let kets = [
        [cplx(1.0, 0.0), cplx(0.0, 0.0)],
        [cplx(0.0, 0.0), cplx(1.0, 0.0)],
        [cplx(h, 0.0), cplx(h, 0.0)],
        [cplx(h, 0.0), cplx(0.0, h)],
    ];
    kets.map(|k| DensityMatrix::from_pure(&k).expect("normalized"))
}

/// Pauli transfer matrix `R_ij = ½ Tr[σ_i E(σ_j)]` with `σ = (I, X, Y, Z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ptm(pub [[f64; 4]; 4]);

impl Ptm {
    pub fn identity() -> Self {
        let mut r = [[0.0; 4]; 4];
        for (i, row) in r.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Ptm(r)
    }

    /// Builds the PTM from the images of `|0⟩, |1⟩, |+⟩, |+i⟩`.
    pub fn from_basis_outputs(outputs: &[CMatrix; 4]) -> Self {
        let [e0, e1, ep, ei] = outputs;
        let e_id = e0 + e1;
        let images = [e_id.clone(), ep * cplx(2.0, 0.0) - &e_id, ei * cplx(2.0, 0.0) - &e_id, e0 - e1];
        let mut r = [[0.0; 4]; 4];
        for (i, sigma) in PAULI_ORDER.iter().enumerate() {
            let s = sigma.matrix();
            for (j, image) in images.iter().enumerate() {
                r[i][j] = 0.5 * trace_product(&s, image).re;
            }
        }
        Ptm(r)
    }

    pub fn entry(&self, row: Pauli, col: Pauli) -> f64 {
        self.0[pauli_index(row)][pauli_index(col)]
    }

    /// Applies the channel to a single-qubit operator through its Pauli expansion.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let coeffs: Vec<Complex64> = PAULI_ORDER.iter().map(|p| trace_product(&p.matrix(), rho) * 0.5).collect();
        let mut out = CMatrix::zeros(2, 2);
        for (i, p) in PAULI_ORDER.iter().enumerate() {
            let c: Complex64 = (0..4).map(|j| coeffs[j] * self.0[i][j]).sum();
            out += p.matrix() * c;
        }
        out
    }

    /// Choi matrix `Σ_ab |a⟩⟨b| ⊗ E(|a⟩⟨b|)`.
    pub fn choi(&self) -> CMatrix {
        let mut choi = CMatrix::zeros(4, 4);
        for a in 0..2 {
            for b in 0..2 {
                let mut unit = CMatrix::zeros(2, 2);
                unit[(a, b)] = cplx(1.0, 0.0);
                let image = self.apply(&unit);
                choi.view_mut((2 * a, 2 * b), (2, 2)).copy_from(&image);
            }
        }
        choi
    }

    /// Fails unless row 0 is `(1, 0, 0, 0)` and the Choi matrix is positive.
    pub fn check_cptp(&self) -> Result<()> {
        let row = self.0[0];
        let defect = (row[0] - 1.0).abs().max(row[1].abs()).max(row[2].abs()).max(row[3].abs());
        if defect > CPTP_TOLERANCE {
            return Err(Error::NotTracePreserving(defect));
        }
        let mut choi = self.choi();
        crate::linalg::hermitize(&mut choi);
        let min = crate::linalg::HermitianEigen::new(&choi)?.min_value();
        if min < -CPTP_TOLERANCE {
            return Err(Error::InvalidState(alloc::format!("logical map is not completely positive (Choi eigenvalue {min:.3e})")));
        }
        Ok(())
    }

    /// Entrywise mean of several PTMs.
    pub fn mean(samples: &[Ptm]) -> Result<Ptm> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("cannot average zero channels".into()));
        }
        let mut r = [[0.0; 4]; 4];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                let column: Vec<f64> = samples.iter().map(|s| s.0[i][j]).collect();
                *v = mean_and_stderr(&column).0;
            }
        }
        Ok(Ptm(r))
    }
}

fn pauli_index(p: Pauli) -> usize {
    match p {
        Pauli::I => 0,
        Pauli::X => 1,
        Pauli::Y => 2,
        Pauli::Z => 3,
    }
}

/// Largest off-diagonal PTM entry for which a channel still counts as a Pauli channel.
pub const PAULI_DIAGONAL_TOLERANCE: f64 = 1e-6;

/// Tolerance for the trace-preservation row and the Choi positivity check.
pub const CPTP_TOLERANCE: f64 = 1e-8;

/// Logical channel with its Pauli-twirled error probabilities.
///
/// The probabilities come from the PTM diagonal; `pauli_diagonal` records
/// whether the off-diagonal entries are negligible, i.e. whether the channel
/// really is the Pauli channel those numbers describe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogicalChannel {
    pub ptm: Ptm,
    pub fidelity: f64,
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
    pub pauli_diagonal: bool,
}

impl LogicalChannel {
    pub fn from_ptm(ptm: Ptm) -> Self {
        let [_, rxx, ryy, rzz] = [0, 1, 2, 3].map(|k| ptm.0[k][k]);
        let off_diagonal = (0..4)
            .flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| ptm.0[i][j].abs())
            .fold(0.0, f64::max);
        Self {
            ptm,
            fidelity: (1.0 + rxx + ryy + rzz) / 4.0,
            p_x: (1.0 + rxx - ryy - rzz) / 4.0,
            p_y: (1.0 - rxx + ryy - rzz) / 4.0,
            p_z: (1.0 - rxx - ryy + rzz) / 4.0,
            pauli_diagonal: off_diagonal <= PAULI_DIAGONAL_TOLERANCE,
        }
    }

    /// Like [`from_ptm`](Self::from_ptm) but rejects maps that are not CPTP.
    pub fn checked(ptm: Ptm) -> Result<Self> {
        ptm.check_cptp()?;
        Ok(Self::from_ptm(ptm))
    }

    /// `(F, p_X, p_Y, p_Z)`.
    pub fn probabilities(&self) -> [f64; 4] {
        [self.fidelity, self.p_x, self.p_y, self.p_z]
    }

    /// `max{p_X + p_Y, p_Z + p_Y}`, the quantity compared against the code threshold.
    pub fn threshold_metric(&self) -> f64 {
        (self.p_x + self.p_y).max(self.p_z + self.p_y)
    }
}

/// Sample-averaged logical channel with standard errors of the twirled probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelEstimate {
    pub channel: LogicalChannel,
    pub samples: usize,
    pub fidelity_stderr: f64,
    pub p_x_stderr: f64,
    pub p_y_stderr: f64,
    pub p_z_stderr: f64,
}

impl ChannelEstimate {
    pub fn from_samples(samples: &[Ptm]) -> Result<Self> {
        let channel = LogicalChannel::checked(Ptm::mean(samples)?)?;
        let per: Vec<LogicalChannel> = samples.iter().map(|p| LogicalChannel::from_ptm(*p)).collect();
        let se = |f: fn(&LogicalChannel) -> f64| mean_and_stderr(&per.iter().map(f).collect::<Vec<_>>()).1;
        Ok(Self {
            channel,
            samples: samples.len(),
            fidelity_stderr: se(|c| c.fidelity),
            p_x_stderr: se(|c| c.p_x),
            p_y_stderr: se(|c| c.p_y),
            p_z_stderr: se(|c| c.p_z),
        })
    }
}

impl fmt::Display for LogicalChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F = {:.6}, p_X = {:.3e}, p_Y = {:.3e}, p_Z = {:.3e}", self.fidelity, self.p_x, self.p_y, self.p_z)
    }
}
