//! Kirkwood-Dirac quasiprobability distributions and non-classicality
//! measures.
//!
//! For a pair of two-outcome projective measurements A (on one environment
//! qubit, at time `tau_a`) and B (on another, at time 0) in a pure initial
//! state, the KD distribution is
//!
//!   q_ij = <psi0| B_j A_i(tau_a) |psi0>,    A_i(t) = e^{iHt} A_i e^{-iHt}
//!
//! and decomposes as q_ij = p_ij + (real + i imag) quantum modification
//! terms, where p is the ordered two-point-measurement distribution. The
//! modification terms vanish exactly when the evolved measurements commute,
//! which is the operational signature of Quantum Darwinism in this model.
//!
//! # Reference measurement setting
//!
//! `MeasurementSetting::reference` uses Z-basis projectors on E1 for A
//! and Y-basis projectors on E2 for B, with |000> as the initial state.
//! This combination was selected by evaluating N_AS for all basis pairs in
//! {X, Y, Z}^2 at omega = 1.5 and tau_a in {2.21, 3.66}: only (Z on E1,
//! Y on E2) reproduces the reference values (0.554, 0.988); the runner-up
//! (Y, Y) reaches at most 0.07.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, ModelParams};
use crate::numerics::{self, C64, DenseOperator, ONE, StateVector, embed_single};
use crate::tol;

/// Complex number as an explicit {re, im} record for JSON output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexEntry {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexEntry {
    fn from(c: C64) -> Self {
        ComplexEntry { re: c.re, im: c.im }
    }
}

impl From<ComplexEntry> for C64 {
    fn from(e: ComplexEntry) -> Self {
        C64::new(e.re, e.im)
    }
}

mod complex_table {
    use super::{C64, ComplexEntry};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(q: &[[C64; 2]; 2], s: S) -> Result<S::Ok, S::Error> {
        let table: [[ComplexEntry; 2]; 2] = [
            [q[0][0].into(), q[0][1].into()],
            [q[1][0].into(), q[1][1].into()],
        ];
        table.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[[C64; 2]; 2], D::Error> {
        let table = <[[ComplexEntry; 2]; 2]>::deserialize(d)?;
        Ok([
            [table[0][0].into(), table[0][1].into()],
            [table[1][0].into(), table[1][1].into()],
        ])
    }
}

/// A two-outcome single-qubit projective measurement, stored as the rank-1
/// projector of outcome 0; outcome 1 is the complement by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorPair {
    /// Normalized state |phi> with P_0 = |phi><phi|.
    axis: [C64; 2],
}

impl ProjectorPair {
    /// Projector pair onto |phi><phi| and its complement.
    pub fn from_state(axis: [C64; 2]) -> Result<Self> {
        let norm = (axis[0].norm_sqr() + axis[1].norm_sqr()).sqrt();
        if norm < 1e-6 {
            return Err(Error::InvalidSetting("projector axis has zero norm".into()));
        }
        Ok(ProjectorPair {
            axis: [axis[0] / norm, axis[1] / norm],
        })
    }

    /// Z basis: P_0 = |0><0|.
    pub fn z_basis() -> Self {
        ProjectorPair {
            axis: [ONE, numerics::ZERO],
        }
    }

    /// X basis: P_0 = |+><+|.
    pub fn x_basis() -> Self {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        ProjectorPair { axis: [s, s] }
    }

    /// Y basis: P_0 = |+i><+i|.
    pub fn y_basis() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ProjectorPair {
            axis: [C64::new(s, 0.0), C64::new(0.0, s)],
        }
    }

    /// The single-qubit state whose projector is outcome `i`.
    pub fn outcome_state(&self, i: usize) -> [C64; 2] {
        assert!(i < 2);
        if i == 0 {
            self.axis
        } else {
            // orthogonal complement of the axis
            [-self.axis[1].conj(), self.axis[0].conj()]
        }
    }

    /// The 2x2 projector of outcome `i`.
    pub fn outcome(&self, i: usize) -> DenseOperator {
        let v = self.outcome_state(i);
        let sv = StateVector::from_amplitudes(vec![v[0], v[1]]).expect("normalized axis");
        DenseOperator::outer(&sv)
    }
}

/// A full measurement configuration: two single-qubit measurements on
/// distinct environment qubits, at times `tau_a` and 0, plus a product
/// initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSetting {
    site_a: usize,
    projectors_a: ProjectorPair,
    time_a: f64,
    site_b: usize,
    projectors_b: ProjectorPair,
    initial_factors: Vec<[C64; 2]>,
}

impl MeasurementSetting {
    /// `initial_factors` holds one normalized single-qubit state per qubit
    /// (system first); sites index environment qubits, 1-based over the
    /// full register (site 1 = E1).
    pub fn new(
        site_a: usize,
        projectors_a: ProjectorPair,
        time_a: f64,
        site_b: usize,
        projectors_b: ProjectorPair,
        initial_factors: Vec<[C64; 2]>,
    ) -> Result<Self> {
        let n = initial_factors.len();
        if n < 3 {
            return Err(Error::InvalidSetting(
                "need at least system + two environment qubits".into(),
            ));
        }
        if site_a == site_b {
            return Err(Error::InvalidSetting("measurement sites must differ".into()));
        }
        for &site in [site_a, site_b].iter() {
            if site == 0 || site >= n {
                return Err(Error::InvalidSetting(format!(
                    "site {site} outside environment range 1..{}",
                    n - 1
                )));
            }
        }
        if time_a < 0.0 {
            return Err(Error::InvalidSetting("tau_a must be >= 0".into()));
        }
        for f in &initial_factors {
            let norm = (f[0].norm_sqr() + f[1].norm_sqr()).sqrt();
            if (norm - 1.0).abs() > tol::STRUCTURAL {
                return Err(Error::NotNormalized(norm));
            }
        }
        Ok(MeasurementSetting {
            site_a,
            projectors_a,
            time_a,
            site_b,
            projectors_b,
            initial_factors,
        })
    }

    /// The reference setting used throughout the benchmarks: A in the Z basis on
    /// E1, B in the Y basis on E2, initial state |000> (see module docs).
    pub fn reference(time_a: f64) -> Self {
        let zero = [ONE, numerics::ZERO];
        MeasurementSetting::new(
            1,
            ProjectorPair::z_basis(),
            time_a,
            2,
            ProjectorPair::y_basis(),
            vec![zero, zero, zero],
        )
        .expect("reference setting is valid")
    }

    pub fn with_time(&self, time_a: f64) -> Self {
        MeasurementSetting {
            time_a,
            ..self.clone()
        }
    }

    pub fn site_a(&self) -> usize {
        self.site_a
    }

    pub fn site_b(&self) -> usize {
        self.site_b
    }

    pub fn time_a(&self) -> f64 {
        self.time_a
    }

    pub fn projectors_a(&self) -> &ProjectorPair {
        &self.projectors_a
    }

    pub fn projectors_b(&self) -> &ProjectorPair {
        &self.projectors_b
    }

    pub fn n_qubits(&self) -> usize {
        self.initial_factors.len()
    }

    pub fn initial_factors(&self) -> &[[C64; 2]] {
        &self.initial_factors
    }

    pub fn initial_state(&self) -> StateVector {
        StateVector::product_state(&self.initial_factors).expect("factors validated")
    }

    /// Embedded projector of A outcome `i` on the full register.
    pub fn a_embedded(&self, i: usize) -> DenseOperator {
        embed_projector(&self.projectors_a.outcome(i), self.site_a, self.n_qubits())
            .expect("validated site")
    }

    /// Embedded projector of B outcome `j` on the full register.
    pub fn b_embedded(&self, j: usize) -> DenseOperator {
        embed_projector(&self.projectors_b.outcome(j), self.site_b, self.n_qubits())
            .expect("validated site")
    }

    fn check_params(&self, params: &ModelParams) -> Result<()> {
        if params.n_qubits() != self.n_qubits() {
            return Err(Error::DimensionMismatch(
                1 << params.n_qubits(),
                1 << self.n_qubits(),
            ));
        }
        Ok(())
    }
}

/// Embed a single-qubit rank-1 projector at `site`, identity elsewhere.
pub fn embed_projector(proj: &DenseOperator, site: usize, n_total: usize) -> Result<DenseOperator> {
    if !proj.is_projector(tol::COMPOSITIONAL) {
        let sq = proj * proj;
        return Err(Error::NotProjector(sq.max_abs_diff(proj)));
    }
    embed_single(proj, site, n_total)
}

/// 2x2 table of complex quasiprobabilities, indexed (i, j).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KDDistribution {
    #[serde(with = "complex_table")]
    pub q: [[C64; 2]; 2],
}

impl KDDistribution {
    pub fn total(&self) -> C64 {
        self.q[0][0] + self.q[0][1] + self.q[1][0] + self.q[1][1]
    }

    pub fn row_sum(&self, i: usize) -> C64 {
        self.q[i][0] + self.q[i][1]
    }

    pub fn col_sum(&self, j: usize) -> C64 {
        self.q[0][j] + self.q[1][j]
    }
}

/// 2x2 table of ordered two-point-measurement probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TPMDistribution {
    pub p: [[f64; 2]; 2],
}

impl TPMDistribution {
    pub fn total(&self) -> f64 {
        self.p[0][0] + self.p[0][1] + self.p[1][0] + self.p[1][1]
    }
}

/// Johansen quantum modification terms, per outcome pair (i, j).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModificationTerms {
    /// (1/2) Tr[(rho - rho'_i) B_j]
    pub real_term: [[f64; 2]; 2],
    /// (1/2) Tr[(rho - rho'_i) B_j^{pi/2}]
    pub imag_term: [[f64; 2]; 2],
}

impl ModificationTerms {
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max(self.real_term[i][j].abs()).max(self.imag_term[i][j].abs());
            }
        }
        m
    }
}

/// The three non-classicality measures of one KD distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonclassicalityReport {
    pub n_h: f64,
    pub n_as_re: f64,
    pub n_as_im: f64,
    pub n_as: f64,
    pub n_inf_re: f64,
    pub n_inf_im: f64,
    pub n_inf: f64,
}

/// KD distribution q_ij = <psi0| B_j A_i(tau_a) |psi0>.
pub fn kd_distribution(setting: &MeasurementSetting, params: &ModelParams) -> Result<KDDistribution> {
    setting.check_params(params)?;
    let u = model::hamiltonian_eigen(params).exp_i(setting.time_a());
    Ok(kd_with_evolution(setting, &u))
}

/// KD distribution with a caller-supplied e^{iH tau_a}; the sweep hot path
/// reuses one propagator across thousands of settings.
pub fn kd_with_evolution(setting: &MeasurementSetting, u: &DenseOperator) -> KDDistribution {
    let psi = setting.initial_state();
    let a0_t = evolve_op(&setting.a_embedded(0), u);
    let b0 = setting.b_embedded(0);
    kd_from_ops(&psi, &a0_t, &b0)
}

pub(crate) fn evolve_op(op: &DenseOperator, u: &DenseOperator) -> DenseOperator {
    &(u * op) * &u.dagger()
}

/// Assemble all four entries from the outcome-0 operators using
/// completeness: A_1 = I - A_0, B_1 = I - B_0.
fn kd_from_ops(psi: &StateVector, a0_t: &DenseOperator, b0: &DenseOperator) -> KDDistribution {
    let x = a0_t.apply(psi); // A_0(t)|psi>
    let bx = b0.apply(&x);
    let q00 = psi.inner(&bx);
    let a = psi.inner(&x); // <A_0(t)>
    let b = psi.inner(&b0.apply(psi)); // <B_0>
    let q01 = a - q00;
    let q10 = b - q00;
    let q11 = ONE - a - b + q00;
    KDDistribution {
        q: [[q00, q01], [q10, q11]],
    }
}

/// Two-point-measurement distribution p_ij = ||B_j A_i(tau_a) |psi0>||^2.
#[allow(clippy::needless_range_loop)]
pub fn tpm_distribution(setting: &MeasurementSetting, params: &ModelParams) -> Result<TPMDistribution> {
    setting.check_params(params)?;
    let u = model::hamiltonian_eigen(params).exp_i(setting.time_a());
    let psi = setting.initial_state();
    let mut p = [[0.0; 2]; 2];
    for i in 0..2 {
        let a_t = evolve_op(&setting.a_embedded(i), &u);
        let x = a_t.apply(&psi);
        for j in 0..2 {
            let y = setting.b_embedded(j).apply(&x);
            p[i][j] = y.vector().norm_squared();
        }
    }
    Ok(TPMDistribution { p })
}

/// Density matrix after a non-selective measurement of the projector:
/// rho' = A rho A + (I - A) rho (I - A) with rho = |psi><psi|.
pub fn nonselective_state(state: &StateVector, a_emb: &DenseOperator) -> Result<DenseOperator> {
    if !a_emb.is_projector(tol::COMPOSITIONAL) {
        let sq = a_emb * a_emb;
        return Err(Error::NotProjector(sq.max_abs_diff(a_emb)));
    }
    if state.dim() != a_emb.dim() {
        return Err(Error::DimensionMismatch(state.dim(), a_emb.dim()));
    }
    let x = a_emb.apply(state); // A|psi>
    let y = StateVector::from_vector_unchecked(state.vector() - x.vector(), state.n_qubits());
    Ok(&DenseOperator::outer(&x) + &DenseOperator::outer(&y))
}

/// Conjugate B by e^{i pi A / 2} for a projector A. Since A^2 = A, the
/// rotation is exactly I + (i - 1) A.
pub fn phase_adjusted(b_emb: &DenseOperator, a_emb: &DenseOperator) -> Result<DenseOperator> {
    if !a_emb.is_projector(tol::COMPOSITIONAL) {
        let sq = a_emb * a_emb;
        return Err(Error::NotProjector(sq.max_abs_diff(a_emb)));
    }
    if b_emb.dim() != a_emb.dim() {
        return Err(Error::DimensionMismatch(b_emb.dim(), a_emb.dim()));
    }
    let rot = &DenseOperator::identity(a_emb.n_qubits()) + &a_emb.scale(C64::new(-1.0, 1.0));
    Ok(&(&rot * b_emb) * &rot.dagger())
}

/// Johansen modification terms via the density-matrix route (non-selective
/// state plus phase-adjusted projector). This path is deliberately
/// independent of the expectation-value route in [`kd_distribution`], so
/// the identity q = p + terms cross-checks the two.
pub fn modification_terms(
    setting: &MeasurementSetting,
    params: &ModelParams,
) -> Result<ModificationTerms> {
    setting.check_params(params)?;
    let u = model::hamiltonian_eigen(params).exp_i(setting.time_a());
    let psi = setting.initial_state();
    let rho = DenseOperator::outer(&psi);
    let mut real_term = [[0.0; 2]; 2];
    let mut imag_term = [[0.0; 2]; 2];
    for i in 0..2 {
        let a_t = evolve_op(&setting.a_embedded(i), &u);
        let diff = &rho - &nonselective_state(&psi, &a_t)?;
        for j in 0..2 {
            let b = setting.b_embedded(j);
            let b_rot = phase_adjusted(&b, &a_t)?;
            real_term[i][j] = 0.5 * (&diff * &b).trace().re;
            imag_term[i][j] = 0.5 * (&diff * &b_rot).trace().re;
        }
    }
    Ok(ModificationTerms {
        real_term,
        imag_term,
    })
}

/// N_AS = sum |Re q| - 1 + sum |Im q|.
pub fn n_as(kd: &KDDistribution) -> f64 {
    let (re, im) = n_as_parts(kd);
    re + im
}

pub fn n_as_parts(kd: &KDDistribution) -> (f64, f64) {
    let mut re = -1.0;
    let mut im = 0.0;
    for row in &kd.q {
        for q in row {
            re += q.re.abs();
            im += q.im.abs();
        }
    }
    (re, im)
}

/// N_inf = max(0, -min Re q) + max |Im q|.
pub fn n_inf(kd: &KDDistribution) -> f64 {
    let (re, im) = n_inf_parts(kd);
    re + im
}

pub fn n_inf_parts(kd: &KDDistribution) -> (f64, f64) {
    let mut min_re = f64::INFINITY;
    let mut max_im = 0.0f64;
    for row in &kd.q {
        for q in row {
            min_re = min_re.min(q.re);
            max_im = max_im.max(q.im.abs());
        }
    }
    ((-min_re).max(0.0), max_im)
}

/// N_H = (1/2) sum_ij (|real term| + |imag term|).
pub fn n_h(mt: &ModificationTerms) -> f64 {
    let mut s = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            s += mt.real_term[i][j].abs() + mt.imag_term[i][j].abs();
        }
    }
    0.5 * s
}

/// All three measures for a consistent (kd, modification-terms) pair.
pub fn measures(kd: &KDDistribution, mt: &ModificationTerms) -> NonclassicalityReport {
    let (n_as_re, n_as_im) = n_as_parts(kd);
    let (n_inf_re, n_inf_im) = n_inf_parts(kd);
    NonclassicalityReport {
        n_h: n_h(mt),
        n_as_re,
        n_as_im,
        n_as: n_as_re + n_as_im,
        n_inf_re,
        n_inf_im,
        n_inf: n_inf_re + n_inf_im,
    }
}

/// Verify that q = p + modification terms (the defining identity between
/// the two computation routes); returns the maximum entrywise deviation.
pub fn decomposition_deviation(
    kd: &KDDistribution,
    tpm: &TPMDistribution,
    mt: &ModificationTerms,
) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let rebuilt = C64::new(tpm.p[i][j] + mt.real_term[i][j], mt.imag_term[i][j]);
            dev = dev.max((kd.q[i][j] - rebuilt).norm());
        }
    }
    dev
}

/// Evaluate one measure from the outcome-0 operators; used by the sweep
/// module so N_H does not pay for the full density-matrix route.
pub(crate) fn measure_from_ops(
    psi: &StateVector,
    a0_t: &DenseOperator,
    b0: &DenseOperator,
    kind: MeasureKind,
) -> f64 {
    match kind {
        MeasureKind::NAs => n_as(&kd_from_ops(psi, a0_t, b0)),
        MeasureKind::NInf => n_inf(&kd_from_ops(psi, a0_t, b0)),
        MeasureKind::NH => {
            // For projectors, with x_i = A_i(t)|psi>, y_i = |psi> - x_i:
            // Tr[(rho - rho'_i) B] = 2 Re <y_i|B|x_i>, and the pi/2 phase
            // rotation maps that to 2 Im <y_i|B|x_i>.
            let mut s = 0.0;
            for i in 0..2 {
                let x = if i == 0 {
                    a0_t.apply(psi)
                } else {
                    let x0 = a0_t.apply(psi);
                    StateVector::from_vector_unchecked(
                        psi.vector() - x0.vector(),
                        psi.n_qubits(),
                    )
                };
                let y = StateVector::from_vector_unchecked(
                    psi.vector() - x.vector(),
                    psi.n_qubits(),
                );
                for j in 0..2 {
                    let bx = if j == 0 {
                        b0.apply(&x)
                    } else {
                        let b0x = b0.apply(&x);
                        StateVector::from_vector_unchecked(
                            x.vector() - b0x.vector(),
                            x.n_qubits(),
                        )
                    };
                    let t = y.inner(&bx);
                    s += t.re.abs() + t.im.abs();
                }
            }
            0.5 * s
        }
    }
}

/// Which non-classicality measure a sweep records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    NAs,
    NH,
    NInf,
}

impl std::fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeasureKind::NAs => write!(f, "n_as"),
            MeasureKind::NH => write!(f, "n_h"),
            MeasureKind::NInf => write!(f, "n_inf"),
        }
    }
}

/// Full exact pipeline for one setting: q, p, modification terms, measures.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExactReport {
    pub tau_a: f64,
    pub kd: KDDistribution,
    pub tpm: TPMDistribution,
    pub terms: ModificationTerms,
    pub measures: NonclassicalityReport,
}

pub fn exact_report(setting: &MeasurementSetting, params: &ModelParams) -> Result<ExactReport> {
    let kd = kd_distribution(setting, params)?;
    let tpm = tpm_distribution(setting, params)?;
    let terms = modification_terms(setting, params)?;
    let measures = measures(&kd, &terms);
    Ok(ExactReport {
        tau_a: setting.time_a(),
        kd,
        tpm,
        terms,
        measures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::numerics::{I, ZERO, pauli};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    // Exact KD tables for the reference setting, frozen from an independent
    // dense-linear-algebra implementation of the same definitions.
    const Q00_221: (f64, f64) = (0.212986824102, 0.138516094061);
    const Q10_221: (f64, f64) = (0.287013175898, -0.138516094061);
    const Q00_366: (f64, f64) = (0.251864846602, -0.246877122512);
    const Q10_366: (f64, f64) = (0.248135153398, 0.246877122512);
    const NAS_221: f64 = 0.5540643762;
    const NAS_366: f64 = 0.9875084900;

    #[test]
    fn projector_pairs_resolve_identity() {
        for pair in [
            ProjectorPair::z_basis(),
            ProjectorPair::x_basis(),
            ProjectorPair::y_basis(),
            ProjectorPair::from_state([c(0.6, 0.0), c(0.0, 0.8)]).unwrap(),
        ] {
            let sum = &pair.outcome(0) + &pair.outcome(1);
            assert!(sum.max_abs_diff(&DenseOperator::identity(1)) < 1e-14);
            assert!(pair.outcome(0).is_projector(1e-14));
            assert!((&pair.outcome(0) * &pair.outcome(1)).max_abs() < 1e-14);
        }
    }

    #[test]
    fn projector_pair_normalizes_axis() {
        let pair = ProjectorPair::from_state([c(2.0, 0.0), c(0.0, 2.0)]).unwrap();
        let v = pair.outcome_state(0);
        assert!((v[0].norm_sqr() + v[1].norm_sqr() - 1.0).abs() < 1e-14);
        assert!(matches!(
            ProjectorPair::from_state([ZERO, ZERO]),
            Err(Error::InvalidSetting(_))
        ));
    }

    #[test]
    fn y_basis_projects_onto_circular_states() {
        // Outcome 0 of the Y pair is |+i> = (|0> + i|1>)/sqrt(2).
        let p0 = ProjectorPair::y_basis().outcome(0);
        let expect = &pauli::i2().scale(c(0.5, 0.0)) + &pauli::y().scale(c(0.5, 0.0));
        assert!(p0.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn embed_projector_structure() {
        let p = embed_projector(&ProjectorPair::z_basis().outcome(0), 1, 3).unwrap();
        assert!(p.is_projector(1e-14));
        assert!((p.trace() - c(4.0, 0.0)).norm() < 1e-14);
        assert!(matches!(
            embed_projector(&ProjectorPair::z_basis().outcome(0), 3, 3),
            Err(Error::QubitOutOfRange(3, 3))
        ));
    }

    #[test]
    fn setting_validation() {
        let zero = [ONE, ZERO];
        let factors = vec![zero, zero, zero];
        let z = ProjectorPair::z_basis;
        assert!(matches!(
            MeasurementSetting::new(1, z(), 0.0, 1, z(), factors.clone()),
            Err(Error::InvalidSetting(_))
        ));
        assert!(matches!(
            MeasurementSetting::new(0, z(), 0.0, 2, z(), factors.clone()),
            Err(Error::InvalidSetting(_))
        ));
        assert!(matches!(
            MeasurementSetting::new(1, z(), -1.0, 2, z(), factors),
            Err(Error::InvalidSetting(_))
        ));
    }

    #[test]
    fn kd_at_zero_time() {
        let kd = kd_distribution(
            &MeasurementSetting::reference(0.0),
            &ModelParams::reference(),
        )
        .unwrap();
        // Initially |000>: the Z measurement on E1 is deterministic and the
        // Y measurement on E2 is unbiased, so q = [[1/2, 1/2], [0, 0]].
        assert!((kd.q[0][0] - c(0.5, 0.0)).norm() < 1e-12);
        assert!((kd.q[0][1] - c(0.5, 0.0)).norm() < 1e-12);
        assert!(kd.q[1][0].norm() < 1e-12);
        assert!(kd.q[1][1].norm() < 1e-12);
    }

    #[test]
    fn kd_matches_frozen_reference_tables() {
        let params = ModelParams::reference();
        for (tau, q00, q10) in [(2.21, Q00_221, Q10_221), (3.66, Q00_366, Q10_366)] {
            let kd =
                kd_distribution(&MeasurementSetting::reference(tau), &params).unwrap();
            assert!((kd.q[0][0] - c(q00.0, q00.1)).norm() < 1e-9, "q00 at {tau}");
            assert!((kd.q[0][1] - c(q00.0, -q00.1)).norm() < 1e-9, "q01 at {tau}");
            assert!((kd.q[1][0] - c(q10.0, q10.1)).norm() < 1e-9, "q10 at {tau}");
            assert!((kd.q[1][1] - c(q10.0, -q10.1)).norm() < 1e-9, "q11 at {tau}");
            assert!((kd.total() - ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn n_as_matches_reference_values() {
        let params = ModelParams::reference();
        for (tau, expect) in [(0.0, 0.0), (2.21, NAS_221), (3.66, NAS_366)] {
            let kd =
                kd_distribution(&MeasurementSetting::reference(tau), &params).unwrap();
            assert!((n_as(&kd) - expect).abs() < 1e-9, "N_AS at tau = {tau}");
        }
    }

    #[test]
    fn marginals_are_real_probabilities() {
        let kd = kd_distribution(
            &MeasurementSetting::reference(2.21),
            &ModelParams::reference(),
        )
        .unwrap();
        for i in 0..2 {
            let r = kd.row_sum(i);
            let col = kd.col_sum(i);
            assert!(r.im.abs() < 1e-12 && (0.0..=1.0).contains(&r.re));
            assert!(col.im.abs() < 1e-12 && (0.0..=1.0).contains(&col.re));
        }
        assert!((kd.row_sum(0) + kd.row_sum(1) - ONE).norm() < 1e-12);
    }

    #[test]
    fn darwinistic_model_gives_classical_tables() {
        let params = ModelParams::reference().with_omega(0.0);
        for tau in [0.7, 2.21, 3.66, 11.0] {
            let setting = MeasurementSetting::reference(tau);
            let report = exact_report(&setting, &params).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    assert!(report.kd.q[i][j].im.abs() < 1e-12);
                    assert!(report.kd.q[i][j].re > -1e-12);
                    assert!((report.kd.q[i][j].re - report.tpm.p[i][j]).abs() < 1e-10);
                }
            }
            assert!(report.measures.n_as < 1e-10);
            assert!(report.measures.n_h < 1e-10);
            assert!(report.measures.n_inf < 1e-10);
        }
    }

    #[test]
    fn tpm_is_a_probability_distribution() {
        let tpm = tpm_distribution(
            &MeasurementSetting::reference(3.66),
            &ModelParams::reference(),
        )
        .unwrap();
        for row in &tpm.p {
            for &p in row {
                assert!((-1e-14..=1.0 + 1e-14).contains(&p));
            }
        }
        assert!((tpm.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nonselective_state_examples() {
        // Z measurement on |+> fully dephases: rho' = I/2.
        let plus = StateVector::from_amplitudes(vec![c(S, 0.0), c(S, 0.0)]).unwrap();
        let a = ProjectorPair::z_basis().outcome(0);
        let rho = nonselective_state(&plus, &a).unwrap();
        assert!(rho.max_abs_diff(&pauli::i2().scale(c(0.5, 0.0))) < 1e-14);

        // An eigenstate of the measured projector is left untouched.
        let zero = StateVector::zero_state(1);
        let rho = nonselective_state(&zero, &a).unwrap();
        assert!(rho.max_abs_diff(&DenseOperator::outer(&zero)) < 1e-14);
    }

    #[test]
    fn nonselective_state_is_a_density_matrix() {
        let params = ModelParams::reference();
        let setting = MeasurementSetting::reference(2.21);
        let u = crate::model::hamiltonian_eigen(&params).exp_i(setting.time_a());
        let a_t = evolve_op(&setting.a_embedded(0), &u);
        let rho = nonselective_state(&setting.initial_state(), &a_t).unwrap();
        assert!(rho.is_hermitian(1e-12));
        assert!((rho.trace() - ONE).norm() < 1e-12);
        // Measuring A on rho' gives the same statistics as on rho.
        let psi = setting.initial_state();
        let p_psi = psi.inner(&a_t.apply(&psi)).re;
        let p_rho = (&rho * &a_t).trace().re;
        assert!((p_psi - p_rho).abs() < 1e-12);
    }

    #[test]
    fn nonselective_rejects_non_projector() {
        let zero = StateVector::zero_state(1);
        assert!(matches!(
            nonselective_state(&zero, &pauli::x()),
            Err(Error::NotProjector(_))
        ));
    }

    #[test]
    fn phase_adjusted_oracle_value() {
        // A = |0><0|, B = |+><+|: conjugation by e^{i pi A / 2} = diag(i, 1)
        // maps the X projector to a Y projector, (I - Y)/2.
        let a = ProjectorPair::z_basis().outcome(0);
        let b = ProjectorPair::x_basis().outcome(0);
        let rot = phase_adjusted(&b, &a).unwrap();
        let expect = &pauli::i2().scale(c(0.5, 0.0)) - &pauli::y().scale(c(0.5, 0.0));
        assert!(rot.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn phase_adjusted_fixes_commuting_observables() {
        let a = ProjectorPair::z_basis().outcome(0);
        assert!(phase_adjusted(&a, &a).unwrap().max_abs_diff(&a) < 1e-14);
        let b1 = ProjectorPair::z_basis().outcome(1);
        assert!(phase_adjusted(&b1, &a).unwrap().max_abs_diff(&b1) < 1e-14);
    }

    #[test]
    fn phase_adjusted_preserves_spectrum() {
        // The rotation is unitary, so B^{pi/2} stays a projector.
        let a = ProjectorPair::z_basis().outcome(0);
        let b = ProjectorPair::y_basis().outcome(0);
        let rot = phase_adjusted(&b, &a).unwrap();
        assert!(rot.is_projector(1e-13));
        assert!(rot.is_hermitian(1e-13));
        assert!((rot.trace() - ONE).norm() < 1e-13);
    }

    #[test]
    fn kd_decomposes_into_tpm_plus_modification() {
        let params = ModelParams::reference();
        for tau in [0.0, 1.3, 2.21, 3.66, 7.9] {
            let setting = MeasurementSetting::reference(tau);
            let report = exact_report(&setting, &params).unwrap();
            let dev = decomposition_deviation(&report.kd, &report.tpm, &report.terms);
            assert!(dev < 1e-10, "decomposition deviation {dev} at tau = {tau}");
        }
    }

    #[test]
    fn modification_terms_vanish_at_zero_time() {
        // At tau = 0 the commuting environment projectors give classical
        // statistics, so both Johansen terms are zero.
        let terms = modification_terms(
            &MeasurementSetting::reference(0.0),
            &ModelParams::reference(),
        )
        .unwrap();
        assert!(terms.max_abs() < 1e-12);
    }

    #[test]
    fn imaginary_structure_identity() {
        // Row and column marginals of q are real, which forces all four
        // |Im q_ij| to coincide; hence N_AS^im = 4 N_inf^im identically.
        let params = ModelParams::reference();
        for tau in [0.9, 2.21, 3.66, 5.5] {
            let kd =
                kd_distribution(&MeasurementSetting::reference(tau), &params).unwrap();
            let m = measures(&kd, &ModificationTerms {
                real_term: [[0.0; 2]; 2],
                imag_term: [[0.0; 2]; 2],
            });
            assert!((m.n_as_im - 4.0 * m.n_inf_im).abs() < 1e-12);
            assert!(m.n_inf <= m.n_as + 1e-12);
        }
    }

    #[test]
    fn fast_measure_path_matches_reference_route() {
        let params = ModelParams::reference();
        let setting = MeasurementSetting::reference(2.21);
        let u = crate::model::hamiltonian_eigen(&params).exp_i(setting.time_a());
        let psi = setting.initial_state();
        let a0_t = evolve_op(&setting.a_embedded(0), &u);
        let b0 = setting.b_embedded(0);
        let report = exact_report(&setting, &params).unwrap();
        for (kind, expect) in [
            (MeasureKind::NAs, report.measures.n_as),
            (MeasureKind::NH, report.measures.n_h),
            (MeasureKind::NInf, report.measures.n_inf),
        ] {
            let fast = measure_from_ops(&psi, &a0_t, &b0, kind);
            assert!((fast - expect).abs() < 1e-12, "{kind} fast path");
        }
    }

    #[test]
    fn kd_serializes_with_named_parts() {
        let kd = KDDistribution {
            q: [[c(0.5, 0.0), c(0.5, 0.0)], [c(0.25, -0.125), I]],
        };
        let json = serde_json::to_string(&kd).unwrap();
        assert!(json.contains("\"re\":0.25") && json.contains("\"im\":-0.125"));
        let back: KDDistribution = serde_json::from_str(&json).unwrap();
        assert_eq!(back, kd);
    }

    #[test]
    fn settings_reject_mismatched_models() {
        let params = ModelParams::new(1.0, 1.5, vec![1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            kd_distribution(&MeasurementSetting::reference(1.0), &params),
            Err(Error::DimensionMismatch(_, _))
        ));
    }
}
