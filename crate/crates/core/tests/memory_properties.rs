mod common;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zeno_core::linalg::{cplx, max_abs_diff, mean_and_stderr, CMatrix, ZERO};
use zeno_core::memory::{
    basis_inputs, decode, decode_branches, encode, extract_channel, sample_hamiltonians, sweep_error_probabilities,
    track_basis_states, LogicalChannel, MemoryProtocol, Ptm, RoundOutcome,
};
use zeno_core::pauli::PauliOp;
use zeno_core::simulator::{run_channels, run_protocol, unitary_step, DensityMatrix, Hamiltonian, MeasurementSchedule, NoiseModel};

fn op(s: &str) -> PauliOp {
    PauliOp::parse(s, 3).unwrap()
}

fn projector(c: &PauliOp, outcome: u8) -> CMatrix {
    let id = CMatrix::identity(8, 8);
    let sign = if outcome == 0 { 1.0 } else { -1.0 };
    (id + c.to_dense().unwrap() * cplx(sign, 0.0)) * cplx(0.5, 0.0)
}

fn assert_identity_ptm(ptm: &Ptm, tol: f64) {
    for i in 0..4 {
        for j in 0..4 {
            let expected = if i == j { 1.0 } else { 0.0 };
            assert!((ptm.0[i][j] - expected).abs() < tol, "R[{i}][{j}] = {}", ptm.0[i][j]);
        }
    }
}

#[test]
fn logical_state_freezes_without_noise() {
    for steps in [1usize, 10, 100] {
        let p = MemoryProtocol::three_qubit(0.0, steps as f64, 1.0).unwrap();
        assert_eq!(p.steps(), steps);
        assert_identity_ptm(&p.logical_ptm(&Hamiltonian::zero(3)).unwrap(), 1e-10);
    }
}

#[test]
fn physical_state_moves_between_rounds() {
    let sched = MeasurementSchedule::three_qubit(0.0).unwrap();
    let channels = sched.channels();
    let rho = encode(&basis_inputs()[2]).unwrap();
    let mut after_z = rho.matrix().clone();
    for ch in &channels[..2] {
        after_z = ch.apply(&after_z);
    }
    let mut after_x = after_z.clone();
    for ch in &channels[2..] {
        after_x = ch.apply(&after_x);
    }
    let f = DensityMatrix::new(after_z).unwrap().fidelity(&DensityMatrix::new(after_x).unwrap()).unwrap();
    assert!(f < 0.9, "fidelity {f}");
}

#[test]
fn ptm_reproduces_the_protocol_on_random_states() {
    let noise = NoiseModel::isotropic(1.0);
    let h = noise.sample_hamiltonian(3, 17).unwrap();
    let p = MemoryProtocol::three_qubit(0.3, 10.0, 0.6).unwrap();
    let ptm = p.logical_ptm(&h).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let rho = common::random_density(&mut rng, 2);
        let out = run_channels(&encode(&rho).unwrap(), &h, p.channels(), p.tau(), p.steps()).unwrap();
        let direct = decode(&out).unwrap();
        assert!(max_abs_diff(&ptm.apply(rho.matrix()), direct.matrix()) < 1e-8);
    }
}

#[test]
fn error_halves_when_steps_double() {
    let h = NoiseModel::isotropic(1.0).sample_hamiltonian(3, 99).unwrap();
    let err = |n: usize| {
        let p = MemoryProtocol::three_qubit(0.0, n as f64, 1.0).unwrap();
        1.0 - LogicalChannel::from_ptm(p.logical_ptm(&h).unwrap()).fidelity
    };
    for n in [256usize, 512, 1024] {
        let ratio = err(2 * n) / err(n);
        assert!((0.4..=0.6).contains(&ratio), "N = {n}: ratio {ratio}");
    }
}

fn apply(m: &CMatrix, psi: &[Complex64]) -> Vec<Complex64> {
    (0..8).map(|r| (0..8).map(|c| m[(r, c)] * psi[c]).sum()).collect()
}

fn encoded_ket(mu: usize) -> Vec<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut psi = vec![ZERO; 8];
    psi[mu << 1] = cplx(h, 0.0);
    psi[(mu << 1) | 1] = cplx(h, 0.0);
    psi
}

fn histories(rounds: usize) -> Vec<Vec<RoundOutcome>> {
    let mut all = vec![Vec::new()];
    for k in 0..rounds {
        let mut next = Vec::new();
        for h in &all {
            for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let mut h = h.clone();
                h.push(if k % 2 == 0 { RoundOutcome::Z { nu_z: a, nu_zz: b } } else { RoundOutcome::X { nu_x: a, nu_xx: b } });
                next.push(h);
            }
        }
        all = next;
    }
    all
}

#[test]
fn tracked_basis_states_match_projected_branches() {
    let round_ops = [[op("Z1"), op("Z2*Z3")], [op("X3"), op("X1*X2")]];
    let mut checked = 0;
    for rounds in 0..=4 {
        for history in histories(rounds) {
            let branch: Vec<Vec<Complex64>> = (0..2)
                .map(|mu| {
                    history.iter().enumerate().fold(encoded_ket(mu), |psi, (k, outcome)| {
                        let (a, b) = match *outcome {
                            RoundOutcome::Z { nu_z, nu_zz } => (nu_z, nu_zz),
                            RoundOutcome::X { nu_x, nu_xx } => (nu_x, nu_xx),
                        };
                        let ops = &round_ops[k % 2];
                        apply(&projector(&ops[1], b), &apply(&projector(&ops[0], a), &psi))
                    })
                })
                .collect();
            let norms: Vec<f64> = branch.iter().map(|v| v.iter().map(|a| a.norm_sqr()).sum()).collect();
            if norms[0] < 1e-20 && norms[1] < 1e-20 {
                continue;
            }
            let tracked = track_basis_states(&history).unwrap();
            let overlaps: Vec<Complex64> = (0..2)
                .map(|mu| tracked[mu].iter().zip(&branch[mu]).map(|(t, b)| t.conj() * b).sum())
                .collect();
            for mu in 0..2 {
                let residual: f64 =
                    tracked[mu].iter().zip(&branch[mu]).map(|(t, b)| (b - overlaps[mu] * t).norm_sqr()).sum();
                assert!(residual < 1e-24, "{history:?}, mu = {mu}");
            }
            // The same factor for both basis states: the logical state is untouched.
            assert!((overlaps[0] - overlaps[1]).norm() < 1e-12, "{history:?}: {overlaps:?}");
            checked += 1;
        }
    }
    assert!(checked > 50);
}

#[test]
fn every_frame_decodes_to_the_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rho = common::random_density(&mut rng, 2);
    let sched = MeasurementSchedule::three_qubit(0.0).unwrap();
    let out = run_protocol(&encode(&rho).unwrap(), &Hamiltonian::zero(3), &sched, 0.0, 1).unwrap();
    for branch in decode_branches(&out).unwrap() {
        assert!((branch.probability - 0.25).abs() < 1e-12, "{:?}", branch.frame);
        assert!(max_abs_diff(&branch.state.unwrap(), rho.matrix()) < 1e-12);
    }
}

#[test]
fn recorded_and_unread_intermediate_outcomes_agree() {
    let h = NoiseModel::isotropic(1.0).sample_hamiltonian(3, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let rho = common::random_density(&mut rng, 2);
    let (tau, periods) = (0.4, 2);
    let u = unitary_step(&h, tau / periods as f64);
    let ops = [op("Z1"), op("Z2*Z3"), op("X3"), op("X1*X2")];
    let mut branches = vec![encode(&rho).unwrap().into_matrix()];
    for _ in 0..periods {
        for c in &ops {
            branches = branches
                .iter()
                .flat_map(|s| (0..2).map(move |o| (s, o)))
                .map(|(s, o)| {
                    let p = projector(c, o);
                    &p * s * &p
                })
                .collect();
        }
        branches = branches.iter().map(|s| &u * s * u.adjoint()).collect();
    }
    let mut recorded = CMatrix::zeros(2, 2);
    for s in &branches {
        let weight = s.trace().re;
        if weight > 1e-14 {
            let normalized = DensityMatrix::new(s / cplx(weight, 0.0)).unwrap();
            recorded += decode(&normalized).unwrap().into_matrix() * cplx(weight, 0.0);
        }
    }
    let sched = MeasurementSchedule::three_qubit(0.0).unwrap();
    let unread = decode(&run_protocol(&encode(&rho).unwrap(), &h, &sched, tau, periods).unwrap()).unwrap();
    assert!(max_abs_diff(&recorded, unread.matrix()) < 1e-10);
}

#[test]
fn isotropic_average_is_nearly_pauli_diagonal() {
    let noise = NoiseModel::isotropic(1.0);
    let p = MemoryProtocol::three_qubit(0.0, 10.0, 0.5).unwrap();
    let ptms: Vec<Ptm> =
        sample_hamiltonians(&noise, 400, 1).unwrap().iter().map(|h| p.logical_ptm(h).unwrap()).collect();
    for i in 0..4 {
        for j in (0..4).filter(|&j| j != i) {
            let (mean, se) = mean_and_stderr(&ptms.iter().map(|m| m.0[i][j]).collect::<Vec<_>>());
            assert!(mean.abs() <= 4.0 * se + 1e-12, "R[{i}][{j}] = {mean:.3e} ± {se:.1e}");
        }
    }
}

#[test]
fn isotropic_noise_gives_equal_x_and_z_errors() {
    let p = MemoryProtocol::three_qubit(0.0, 100.0, 0.5).unwrap();
    let est = extract_channel(&p, &NoiseModel::isotropic(1.0), 200, 21).unwrap();
    let se = (est.p_x_stderr.powi(2) + est.p_z_stderr.powi(2)).sqrt();
    assert!((est.channel.p_x - est.channel.p_z).abs() < 2.0 * se);
}

#[test]
fn errors_grow_with_storage_time() {
    let template = MemoryProtocol::three_qubit(0.0, 0.0, 0.0).unwrap();
    let times: Vec<f64> = (1..=12).map(|k| 0.1 * k as f64).collect();
    let rows = sweep_error_probabilities(&template, &NoiseModel::isotropic(1.0), &[0.0, 10.0], &times, 100, 2).unwrap();
    for pair in rows.windows(2).filter(|w| w[0].frequency == w[1].frequency) {
        let (a, b) = (&pair[0].estimate, &pair[1].estimate);
        if a.channel.threshold_metric() > 0.104 {
            continue;
        }
        for (pa, pb, sa, sb) in [
            (a.channel.p_x, b.channel.p_x, a.p_x_stderr, b.p_x_stderr),
            (a.channel.p_y, b.channel.p_y, a.p_y_stderr, b.p_y_stderr),
            (a.channel.p_z, b.channel.p_z, a.p_z_stderr, b.p_z_stderr),
        ] {
            assert!(pb >= pa - 2.0 * (sa * sa + sb * sb).sqrt());
        }
    }
}

#[test]
fn tenfold_frequency_cuts_errors_tenfold() {
    let template = MemoryProtocol::three_qubit(0.0, 0.0, 0.0).unwrap();
    let rows = sweep_error_probabilities(&template, &NoiseModel::isotropic(1.0), &[100.0, 1000.0], &[0.5], 50, 3).unwrap();
    let err = |k: usize| 1.0 - rows[k].estimate.channel.fidelity;
    let ratio = err(1) / err(0);
    assert!((0.08..=0.12).contains(&ratio), "ratio {ratio}");
}

#[test]
fn rotation_oracle_for_a_bare_data_qubit() {
    for (a, tau) in [(1.0, 0.1), (0.5, 0.4), (2.0, 0.05)] {
        let noise = NoiseModel::Explicit(vec![(op("X2"), a)]);
        let p = MemoryProtocol::three_qubit(1.0, 20.0, tau).unwrap();
        let est = extract_channel(&p, &noise, 1, 0).unwrap();
        let expected = (a * tau).sin().powi(2);
        assert!((est.channel.p_x - expected).abs() < 1e-12);
        assert!(!est.channel.pauli_diagonal);
    }
}

#[test]
fn single_period_has_unprotected_error_probabilities() {
    let noise = NoiseModel::isotropic(1.0);
    for tau in [0.05, 0.1, 0.149] {
        let one = extract_channel(&MemoryProtocol::three_qubit(0.0, 10.0, tau).unwrap(), &noise, 20, 3).unwrap();
        let free = extract_channel(&MemoryProtocol::three_qubit(0.0, 0.0, tau).unwrap(), &noise, 20, 3).unwrap();
        for (a, b) in one.channel.probabilities().iter().zip(free.channel.probabilities()) {
            assert!((a - b).abs() < 1e-14, "tau = {tau}");
        }
        // The channels themselves differ off the diagonal.
        assert!((one.channel.ptm.0[1][2] - free.channel.ptm.0[1][2]).abs() > 1e-4);
    }
}
