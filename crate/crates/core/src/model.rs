//! Built-in Hamiltonian families with analytic eigenpairs.
//!
//! Every model exposes its spectrum through closed forms: energies
//! `E_j(gamma)`, unit-norm eigenstates `phi_j(gamma)`, and the Berry
//! connection `A_j = -i <phi_j | d/dgamma phi_j>`.  The matrix representation
//! is reconstructed from the projector sum `H = sum_j E_j |phi_j><phi_j|`, so
//! spectrum and matrix cannot drift apart.
//!
//! * `gauge-ladder`: `n` levels `E_j = E0 + j*spacing + tilt*gamma` with
//!   eigenstates `exp(i w_j gamma) e_j`; the connection is the constant `w_j`.
//! * `beta-ladder`: same ladder but the gauge rate carries an explicit beta
//!   coupling, `w_j + eta*beta`, so the connection depends on beta.
//! * `spin-cone`: a two-level moment on a cone of fixed polar angle; `gamma`
//!   is the azimuth.  Connections are `+-sin^2(theta/2)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported Hilbert space dimension.
pub const MAX_DIMENSION: usize = 64;

/// Berry connection sample: the value of `-i <phi_j | d/dgamma phi_j>` at a
/// given point, tagged with the level and the point it was taken at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Connection {
    pub value: f64,
    pub index: usize,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuantumModel {
    GaugeLadder {
        base_energy: f64,
        spacing: f64,
        tilt: f64,
        gauge_rates: Vec<f64>,
    },
    BetaLadder {
        base_energy: f64,
        spacing: f64,
        tilt: f64,
        gauge_rates: Vec<f64>,
        beta_coupling: f64,
    },
    SpinCone {
        cone_angle: f64,
        field: f64,
    },
}

impl QuantumModel {
    pub fn gauge_ladder(
        base_energy: f64,
        spacing: f64,
        tilt: f64,
        gauge_rates: Vec<f64>,
    ) -> Result<Self> {
        check_ladder(base_energy, spacing, tilt, &gauge_rates)?;
        Ok(QuantumModel::GaugeLadder { base_energy, spacing, tilt, gauge_rates })
    }

    pub fn beta_ladder(
        base_energy: f64,
        spacing: f64,
        tilt: f64,
        gauge_rates: Vec<f64>,
        beta_coupling: f64,
    ) -> Result<Self> {
        check_ladder(base_energy, spacing, tilt, &gauge_rates)?;
        if !beta_coupling.is_finite() {
            return Err(Error::domain("beta_coupling", "must be finite"));
        }
        Ok(QuantumModel::BetaLadder { base_energy, spacing, tilt, gauge_rates, beta_coupling })
    }

    pub fn spin_cone(cone_angle: f64, field: f64) -> Result<Self> {
        if !cone_angle.is_finite() || !(0.0..=std::f64::consts::PI).contains(&cone_angle) {
            return Err(Error::domain("cone_angle", format!("must lie in [0, pi], got {cone_angle}")));
        }
        if !field.is_finite() || field < 0.0 {
            return Err(Error::domain("field", format!("must be finite and nonnegative, got {field}")));
        }
        Ok(QuantumModel::SpinCone { cone_angle, field })
    }

    pub fn dim(&self) -> usize {
        match self {
            QuantumModel::GaugeLadder { gauge_rates, .. }
            | QuantumModel::BetaLadder { gauge_rates, .. } => gauge_rates.len(),
            QuantumModel::SpinCone { .. } => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            QuantumModel::GaugeLadder { .. } => "gauge-ladder",
            QuantumModel::BetaLadder { .. } => "beta-ladder",
            QuantumModel::SpinCone { .. } => "spin-cone",
        }
    }

    fn check_level(&self, j: usize) -> Result<()> {
        if j < self.dim() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: j, dimension: self.dim() })
        }
    }

    /// Effective gauge rate of level `j`; this is also the connection value
    /// for the ladder models.
    fn gauge_rate(&self, j: usize, beta: f64) -> f64 {
        match self {
            QuantumModel::GaugeLadder { gauge_rates, .. } => gauge_rates[j],
            QuantumModel::BetaLadder { gauge_rates, beta_coupling, .. } => {
                gauge_rates[j] + beta_coupling * beta
            }
            QuantumModel::SpinCone { .. } => unreachable!("ladder models only"),
        }
    }

    /// Instantaneous eigen-energy `E_j(gamma)`.  Levels are ordered by
    /// nondecreasing energy at `gamma = 0` (ties broken by ascending `j`),
    /// which the constructors guarantee via `spacing >= 0` / `field >= 0`.
    pub fn eigen_energy(&self, j: usize, gamma: f64) -> Result<f64> {
        self.check_level(j)?;
        check_finite("gamma", gamma)?;
        Ok(match self {
            QuantumModel::GaugeLadder { base_energy, spacing, tilt, .. }
            | QuantumModel::BetaLadder { base_energy, spacing, tilt, .. } => {
                base_energy + j as f64 * spacing + tilt * gamma
            }
            QuantumModel::SpinCone { field, .. } => {
                if j == 0 {
                    -field / 2.0
                } else {
                    field / 2.0
                }
            }
        })
    }

    /// Instantaneous eigenstate `phi_j(gamma)`, unit norm.
    pub fn basis_state(&self, j: usize, gamma: f64, beta: f64) -> Result<DVector<Complex64>> {
        self.check_level(j)?;
        check_finite("gamma", gamma)?;
        check_finite("beta", beta)?;
        let n = self.dim();
        Ok(match self {
            QuantumModel::GaugeLadder { .. } | QuantumModel::BetaLadder { .. } => {
                let phase = Complex64::from_polar(1.0, self.gauge_rate(j, beta) * gamma);
                DVector::from_fn(n, |row, _| if row == j { phase } else { Complex64::ZERO })
            }
            QuantumModel::SpinCone { cone_angle, .. } => {
                let (half_sin, half_cos) = (cone_angle / 2.0).sin_cos();
                let azimuth = Complex64::from_polar(1.0, gamma);
                if j == 0 {
                    // Aligned with the cone axis: ground state of the spin.
                    DVector::from_vec(vec![Complex64::from(half_cos), half_sin * azimuth])
                } else {
                    DVector::from_vec(vec![-half_sin * azimuth.conj(), Complex64::from(half_cos)])
                }
            }
        })
    }

    /// Analytic `d/dgamma phi_j(gamma)`.
    pub fn state_gamma_derivative(
        &self,
        j: usize,
        gamma: f64,
        beta: f64,
    ) -> Result<DVector<Complex64>> {
        self.check_level(j)?;
        check_finite("gamma", gamma)?;
        check_finite("beta", beta)?;
        let n = self.dim();
        Ok(match self {
            QuantumModel::GaugeLadder { .. } | QuantumModel::BetaLadder { .. } => {
                let w = self.gauge_rate(j, beta);
                let dphase = Complex64::from_polar(w, w * gamma + std::f64::consts::FRAC_PI_2);
                DVector::from_fn(n, |row, _| if row == j { dphase } else { Complex64::ZERO })
            }
            QuantumModel::SpinCone { cone_angle, .. } => {
                let half_sin = (cone_angle / 2.0).sin();
                let i = Complex64::I;
                let azimuth = Complex64::from_polar(1.0, gamma);
                if j == 0 {
                    DVector::from_vec(vec![Complex64::ZERO, i * half_sin * azimuth])
                } else {
                    DVector::from_vec(vec![i * half_sin * azimuth.conj(), Complex64::ZERO])
                }
            }
        })
    }

    /// Berry connection `A_j(gamma; beta) = -i <phi_j | d/dgamma phi_j>`.
    /// Real because the states stay unit norm.
    pub fn berry_connection(&self, j: usize, gamma: f64, beta: f64) -> Result<Connection> {
        self.check_level(j)?;
        check_finite("gamma", gamma)?;
        check_finite("beta", beta)?;
        let value = match self {
            QuantumModel::GaugeLadder { .. } | QuantumModel::BetaLadder { .. } => {
                self.gauge_rate(j, beta)
            }
            QuantumModel::SpinCone { cone_angle, .. } => {
                let s2 = (cone_angle / 2.0).sin().powi(2);
                if j == 0 {
                    s2
                } else {
                    -s2
                }
            }
        };
        Ok(Connection { value, index: j, gamma })
    }

    /// Partial derivative of the connection with respect to beta at fixed
    /// point; nonzero only for the beta-ladder.
    pub fn connection_beta_derivative(&self, j: usize, _gamma: f64, _beta: f64) -> Result<f64> {
        self.check_level(j)?;
        Ok(match self {
            QuantumModel::BetaLadder { beta_coupling, .. } => *beta_coupling,
            _ => 0.0,
        })
    }

    /// Matrix representation `H(gamma) = sum_j E_j |phi_j><phi_j|`.
    pub fn hamiltonian_matrix(&self, gamma: f64, beta: f64) -> Result<DMatrix<Complex64>> {
        let n = self.dim();
        let mut h = DMatrix::<Complex64>::zeros(n, n);
        for j in 0..n {
            let e = self.eigen_energy(j, gamma)?;
            let phi = self.basis_state(j, gamma, beta)?;
            for r in 0..n {
                for c in 0..n {
                    h[(r, c)] += Complex64::from(e) * phi[r] * phi[c].conj();
                }
            }
        }
        Ok(h)
    }
}

fn check_ladder(base_energy: f64, spacing: f64, tilt: f64, gauge_rates: &[f64]) -> Result<()> {
    let n = gauge_rates.len();
    if !(2..=MAX_DIMENSION).contains(&n) {
        return Err(Error::domain(
            "gauge_rates",
            format!("need between 2 and {MAX_DIMENSION} levels, got {n}"),
        ));
    }
    check_finite("base_energy", base_energy)?;
    check_finite("tilt", tilt)?;
    if !spacing.is_finite() || spacing < 0.0 {
        // Nonnegative spacing keeps the levels ordered at gamma = 0.
        return Err(Error::domain("spacing", format!("must be finite and nonnegative, got {spacing}")));
    }
    if let Some(w) = gauge_rates.iter().find(|w| !w.is_finite()) {
        return Err(Error::domain("gauge_rates", format!("must be finite, got {w}")));
    }
    Ok(())
}

fn check_finite(what: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(what, format!("must be finite, got {x}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ladder4() -> QuantumModel {
        QuantumModel::gauge_ladder(0.0, 1.0, 0.0, vec![0.3, 0.7, 1.1, 1.5]).unwrap()
    }

    fn sample_models() -> Vec<QuantumModel> {
        vec![
            ladder4(),
            QuantumModel::beta_ladder(0.5, 1.0, 0.2, vec![0.5, 1.0, 1.5], 0.5).unwrap(),
            QuantumModel::spin_cone(std::f64::consts::FRAC_PI_3, 1.0).unwrap(),
        ]
    }

    #[test]
    fn ladder_energy_is_affine_in_gamma() {
        let m = ladder4();
        assert_eq!(m.eigen_energy(3, 7.2).unwrap(), 3.0);
        let m = QuantumModel::gauge_ladder(1.0, 2.0, 0.5, vec![0.0, 0.0, 0.0]).unwrap();
        assert_eq!(m.eigen_energy(2, 4.0).unwrap(), 7.0);
    }

    #[test]
    fn spin_cone_energies_match_2x2_diagonalization() {
        // Oracle: closed-form eigenvalues of the reconstructed 2x2 Hermitian
        // matrix, (tr +- sqrt(tr^2 - 4 det)) / 2.
        let b = 0.7;
        let m = QuantumModel::spin_cone(1.1, b).unwrap();
        let h = m.hamiltonian_matrix(0.4, 1.0).unwrap();
        let tr = (h[(0, 0)] + h[(1, 1)]).re;
        let det = (h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(1, 0)]).re;
        let root = (tr * tr - 4.0 * det).sqrt();
        let lo = (tr - root) / 2.0;
        let hi = (tr + root) / 2.0;
        assert!((m.eigen_energy(0, 0.4).unwrap() - lo).abs() < 1e-12);
        assert!((m.eigen_energy(1, 0.4).unwrap() - hi).abs() < 1e-12);
        assert!((lo + b / 2.0).abs() < 1e-12);
    }

    #[test]
    fn level_index_out_of_range() {
        let m = ladder4();
        assert_eq!(m.eigen_energy(4, 0.0).unwrap_err().code(), "E_INDEX");
        assert!(m.basis_state(7, 0.0, 1.0).is_err());
    }

    #[test]
    fn ladder_state_is_phased_unit_vector() {
        let m = QuantumModel::gauge_ladder(0.0, 1.0, 0.0, vec![2.0, 0.0]).unwrap();
        let phi = m.basis_state(0, 0.0, 1.0).unwrap();
        assert_eq!(phi[0], Complex64::from(1.0));
        // One full gauge turn: w * gamma = 2 pi returns to the start.
        let phi = m.basis_state(0, std::f64::consts::PI, 1.0).unwrap();
        assert!((phi[0] - Complex64::from(1.0)).norm() < 1e-15);
        assert_eq!(phi[1], Complex64::ZERO);
    }

    #[test]
    fn spin_cone_state_at_zero_angle_is_e0() {
        let m = QuantumModel::spin_cone(0.0, 1.0).unwrap();
        let phi = m.basis_state(0, 0.3, 1.0).unwrap();
        assert_eq!(phi[0], Complex64::from(1.0));
        assert_eq!(phi[1], Complex64::ZERO);
    }

    #[test]
    fn states_stay_normalized_and_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in sample_models() {
            for _ in 0..1000 {
                let gamma = rng.gen_range(-20.0..20.0);
                let beta = rng.gen_range(0.1..3.0);
                let states: Vec<_> =
                    (0..m.dim()).map(|j| m.basis_state(j, gamma, beta).unwrap()).collect();
                for (j, phi) in states.iter().enumerate() {
                    assert!((phi.norm() - 1.0).abs() < 1e-12);
                    for psi in &states[j + 1..] {
                        assert!(phi.dotc(psi).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn connection_examples() {
        let m = QuantumModel::gauge_ladder(0.0, 1.0, 0.0, vec![0.0, 3.0]).unwrap();
        assert_eq!(m.berry_connection(1, 0.7, 1.0).unwrap().value, 3.0);

        let m = QuantumModel::beta_ladder(0.0, 1.0, 0.0, vec![1.0, 2.0], 0.5).unwrap();
        assert_eq!(m.berry_connection(0, 0.0, 2.0).unwrap().value, 2.0);
        assert_eq!(m.connection_beta_derivative(0, 0.0, 2.0).unwrap(), 0.5);

        // Degenerate cone (theta = 0): the azimuth loop encloses no solid angle.
        let m = QuantumModel::spin_cone(0.0, 1.0).unwrap();
        assert_eq!(m.berry_connection(0, 0.0, 1.0).unwrap().value, 0.0);

        let m = QuantumModel::spin_cone(std::f64::consts::FRAC_PI_2, 1.0).unwrap();
        let a0 = m.berry_connection(0, 0.0, 1.0).unwrap().value;
        let a1 = m.berry_connection(1, 0.0, 1.0).unwrap().value;
        assert!((a0 - 0.5).abs() < 1e-15);
        assert!((a1 + 0.5).abs() < 1e-15);
    }

    /// Finite-difference oracle for the connection:
    /// `-i <phi(g) | [phi(g+h) - phi(g-h)] / 2h>`, real part.
    fn connection_fd(m: &QuantumModel, j: usize, gamma: f64, beta: f64, h: f64) -> f64 {
        let phi = m.basis_state(j, gamma, beta).unwrap();
        let plus = m.basis_state(j, gamma + h, beta).unwrap();
        let minus = m.basis_state(j, gamma - h, beta).unwrap();
        let d = (plus - minus) / Complex64::from(2.0 * h);
        (-Complex64::I * phi.dotc(&d)).re
    }

    #[test]
    fn connection_matches_finite_difference_at_second_order() {
        for m in sample_models() {
            for j in 0..m.dim() {
                let exact = m.berry_connection(j, 0.9, 1.3).unwrap().value;
                let e1 = (connection_fd(&m, j, 0.9, 1.3, 1e-2) - exact).abs();
                let e2 = (connection_fd(&m, j, 0.9, 1.3, 5e-3) - exact).abs();
                // Truncation is A^3 h^2 / 6 for the ladder states (phase
                // rate A) and A h^2 / 6 for the cone states (unit rate,
                // amplitude A).
                let a = exact.abs();
                let bound = (a.max(a.powi(3)) / 6.0 * 1e-4).max(1e-9) * 1.5;
                assert!(e1 < bound, "{} level {j}: err {e1:e} vs bound {bound:e}", m.kind());
                if e1 > 1e-12 {
                    // Far enough above roundoff to see the h^2 slope.
                    let ratio = e1 / e2;
                    assert!((3.5..4.6).contains(&ratio), "{} level {j}: ratio {ratio}", m.kind());
                }
            }
        }
    }

    #[test]
    fn state_derivative_matches_finite_difference() {
        for m in sample_models() {
            for j in 0..m.dim() {
                let exact = m.state_gamma_derivative(j, 0.9, 1.3).unwrap();
                let plus = m.basis_state(j, 0.9 + 1e-6, 1.3).unwrap();
                let minus = m.basis_state(j, 0.9 - 1e-6, 1.3).unwrap();
                let fd = (plus - minus) / Complex64::from(2e-6);
                assert!((exact - fd).norm() < 1e-8, "{} level {j}", m.kind());
            }
        }
    }

    #[test]
    fn ladder_matrix_is_diagonal_for_any_gamma() {
        let m = ladder4();
        let h0 = m.hamiltonian_matrix(0.0, 1.0).unwrap();
        for j in 0..4 {
            assert_eq!(h0[(j, j)], Complex64::from(j as f64));
        }
        // Pure-phase eigenvectors leave the projectors untouched.
        let h = m.hamiltonian_matrix(5.3, 1.0).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                if r == c {
                    assert!((h[(r, c)] - h0[(r, c)]).norm() < 1e-12);
                } else {
                    assert_eq!(h[(r, c)], Complex64::ZERO);
                }
            }
        }
    }

    #[test]
    fn spin_cone_matrix_at_equator() {
        // theta = pi/2, gamma = 0: the moment points along +x and the ground
        // state is aligned with it, so H = -(field/2) * sigma_x.
        let m = QuantumModel::spin_cone(std::f64::consts::FRAC_PI_2, 1.0).unwrap();
        let h = m.hamiltonian_matrix(0.0, 1.0).unwrap();
        assert!(h[(0, 0)].norm() < 1e-15);
        assert!(h[(1, 1)].norm() < 1e-15);
        assert!((h[(0, 1)] - Complex64::from(-0.5)).norm() < 1e-15);
        assert!((h[(1, 0)] - Complex64::from(-0.5)).norm() < 1e-15);
    }

    #[test]
    fn matrix_is_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for m in sample_models() {
            for _ in 0..50 {
                let h = m.hamiltonian_matrix(rng.gen_range(-5.0..5.0), rng.gen_range(0.1..2.0)).unwrap();
                let diff = &h - h.adjoint();
                assert!(diff.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn numerical_eigendecomposition_recovers_analytic_pairs() {
        // Independent spectral route through nalgebra's Hermitian solver.
        for m in sample_models() {
            let (gamma, beta) = (1.7, 1.2);
            let h = m.hamiltonian_matrix(gamma, beta).unwrap();
            let eig = SymmetricEigen::new(h);
            let mut order: Vec<usize> = (0..m.dim()).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
            for (j, &k) in order.iter().enumerate() {
                let e = m.eigen_energy(j, gamma).unwrap();
                assert!((eig.eigenvalues[k] - e).abs() < 1e-10, "{} level {j}", m.kind());
                let phi = m.basis_state(j, gamma, beta).unwrap();
                let overlap = phi.dotc(&eig.eigenvectors.column(k).into_owned()).norm();
                assert!((overlap - 1.0).abs() < 1e-8, "{} level {j}: |<phi|v>| = {overlap}", m.kind());
            }
        }
    }

    #[test]
    fn constructor_rejects_bad_parameters() {
        assert!(QuantumModel::gauge_ladder(0.0, 1.0, 0.0, vec![1.0]).is_err());
        assert!(QuantumModel::gauge_ladder(0.0, -1.0, 0.0, vec![1.0, 2.0]).is_err());
        assert!(QuantumModel::gauge_ladder(f64::NAN, 1.0, 0.0, vec![1.0, 2.0]).is_err());
        assert!(QuantumModel::spin_cone(4.0, 1.0).is_err());
        assert!(QuantumModel::spin_cone(1.0, -1.0).is_err());
        assert!(QuantumModel::gauge_ladder(0.0, 1.0, 0.0, vec![0.0; 65]).is_err());
    }
}
