//! Cross-checks of commonly quoted closed forms against what the engine derives.
//!
//! Each check recomputes a formula from the series machinery and records
//! whether the quoted form agrees. Disagreements are reported, never patched.

use num_traits::{One, Zero};

use crate::poly::{factorial, int, rat, to_f64, Poly, Rational};
use crate::qes::{
    euler_operator, qes_condition, solve_exact_spectrum, CentrifugalParams, QesError, QesModel,
};
use crate::reference::reference_spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Agree,
    Discrepancy,
    /// Informational: a relation the quoted material leaves open.
    Note,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Agree => "agree",
            CheckStatus::Discrepancy => "discrepancy",
            CheckStatus::Note => "note",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationEntry {
    pub name: String,
    pub quoted: String,
    pub derived: String,
    pub status: CheckStatus,
    pub detail: String,
}

fn entry(name: &str, quoted: &str, derived: String, status: CheckStatus, detail: String) -> ValidationEntry {
    ValidationEntry {
        name: name.to_string(),
        quoted: quoted.to_string(),
        derived,
        status,
        detail,
    }
}

fn agree(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Agree
    } else {
        CheckStatus::Discrepancy
    }
}

/// Even-sector coefficient `c_k(Ẽ)` of the series for `m`.
fn even_coefficient(m: &QesModel, k: usize) -> Result<Poly, QesError> {
    let series = euler_operator(m)?.generate_series(&Rational::zero(), k)?;
    Ok(series.coeffs()[k].clone())
}

fn n2_termination(log: &mut Vec<ValidationEntry>) -> Result<(), QesError> {
    // Q_2 = 4! c_2 for beta = 2, gamma = 4 (sqrt(gamma) = 2) and n = 2
    let m = QesModel::sextic(2.0, 4.0, 2)?;
    let q2 = even_coefficient(&m, 2)?.scale(&Rational::from_integer(factorial(4)));
    let (b_over_sg, sg, n) = (int(1), int(2), int(2));
    let quoted = Poly::new(vec![-int(4) * &n * &sg, -int(2) * b_over_sg, Rational::one()]);
    log.push(entry(
        "n=2 termination polynomial",
        "Q2 = E~^2 - 2 beta E~ / sqrt(gamma) - 4 n sqrt(gamma)",
        format!("4! c2 = {} at beta=2, gamma=4", q2.display_with("E~")),
        agree(q2 == quoted),
        "coefficients compared exactly in Q".into(),
    ));
    Ok(())
}

fn n2_energies(log: &mut Vec<ValidationEntry>) -> Result<(), QesError> {
    let mut worst: f64 = 0.0;
    for (beta, gamma) in [(0.0, 1.0), (2.0, 4.0), (-1.5, 0.25), (3.0, 2.0)] {
        let s = solve_exact_spectrum(&QesModel::sextic(beta, gamma, 2)?)?;
        for c in &s.closed_form_checks {
            worst = worst.max(c.max_abs_diff);
        }
    }
    log.push(entry(
        "n=2 energies",
        "E+- = 3 beta / (2 sqrt(gamma)) +- sqrt(beta^2/gamma + 8 sqrt(gamma))",
        format!("roots of the termination polynomial, max |diff| = {worst:.3e} over 4 models"),
        agree(worst <= crate::qes::CLOSED_FORM_TOL),
        "agreement required to 1e-10".into(),
    ));
    Ok(())
}

fn n2_polynomials(log: &mut Vec<ValidationEntry>) -> Result<(), QesError> {
    // derived P2 = 1 + c1(E~) x^2 with c1 = -E~/2; the quoted form has +E~
    let m = QesModel::sextic(2.0, 4.0, 2)?;
    let c1 = even_coefficient(&m, 1)?;
    let s = solve_exact_spectrum(&m)?;
    let mut rows = Vec::new();
    let mut matches = true;
    for e in &s.entries {
        let derived = to_f64(&e.polynomial.coeff(2));
        let quoted = e.reduced_energy;
        matches &= (derived - quoted).abs() < 1e-10;
        rows.push(format!("E={:.9}: derived {derived:.9}, quoted {quoted:.9}", e.energy));
    }
    log.push(entry(
        "n=2 polynomials",
        "P2+- = 1 + [beta/sqrt(gamma) +- sqrt(beta^2/gamma + 8 sqrt(gamma))] x^2",
        format!("P2 = 1 + ({}) x^2, i.e. x^2 coefficient -E~/2", c1.display_with("E~")),
        agree(matches),
        format!(
            "the quoted bracket equals E~, so the quoted coefficient is -2 times the derived one; {}",
            rows.join("; ")
        ),
    ));
    Ok(())
}

fn barrier_checks(log: &mut Vec<ValidationEntry>) -> Result<(), QesError> {
    let m = QesModel::new(-11.0, 0.0, 1.0, 2.0, 2)?;
    let s = solve_exact_spectrum(&m)?;
    let c = &s.closed_form_checks[0];
    log.push(entry(
        "barrier n=2 energies",
        "E2+- = +- sqrt(32 a s)",
        format!("roots {:?} vs closed form {:?}", c.solved, c.closed_form),
        agree(c.agrees),
        format!("alpha=-11, sigma=2, gamma=1; max |diff| = {:.3e}", c.max_abs_diff),
    ));

    let a = m.gamma.sqrt();
    let proportional = s.entries.iter().all(|e| {
        let p = &e.polynomial;
        let ratio = to_f64(&p.coeff(2)) / to_f64(&p.coeff(0));
        (ratio - a / (-e.energy / 4.0)).abs() < 1e-12
    });
    log.push(entry(
        "barrier n=2 polynomials",
        "P2+- = a x^2 - E2+-/4",
        "1 - E x^2 / (2 (1 + 4l)), proportional to the quoted form when E^2 = 32 a s".into(),
        agree(proportional),
        "compared up to normalization".into(),
    ));

    let sg = m.gamma.sqrt();
    let root = (0.25 + m.sigma).sqrt();
    let quoted_n = 2.0 * (-m.alpha / (4.0 * sg) + 0.5 * root - 1.0);
    let derived_n = qes_condition(&m).implied_n;
    let reference = reference_spectrum(&m, 5.0, 1000, 2, 1e-11)
        .map(|r| r.eigenvalues)
        .unwrap_or_default();
    let confirmed = reference.len() == 2
        && s.entries
            .iter()
            .zip(&reference)
            .all(|(e, r)| (e.energy - r).abs() < 1e-3);
    log.push(entry(
        "barrier QES condition",
        "-alpha/(4 sqrt(gamma)) + 1/2 sqrt(1/4 + sigma) = n/2 + 1",
        "-alpha/(4 sqrt(gamma)) - 1/2 sqrt(1/4 + sigma) = n/2 + 1".into(),
        CheckStatus::Discrepancy,
        format!(
            "alpha=-11, sigma=2, gamma=1: quoted form implies n = {quoted_n}, derived form n = {derived_n}; \
             finite-difference levels {reference:?} {} the derived energies",
            if confirmed { "confirm" } else { "do not confirm" }
        ),
    ));

    let p = CentrifugalParams::from_model(&m)?;
    log.push(entry(
        "centrifugal parameter mu",
        "alpha = -4a(s + 1/2 + mu), mu not tied to n",
        format!("mu = {} for n = {}", p.mu, m.n),
        CheckStatus::Note,
        "on models satisfying the derived condition, mu = n/2".into(),
    ));
    Ok(())
}

fn double_well_checks(log: &mut Vec<ValidationEntry>) -> Result<(), QesError> {
    let m = QesModel::double_well();
    let s = solve_exact_spectrum(&m)?;
    let q3 = s.termination.scale(&Rational::from_integer(factorial(6)));
    let quoted_q3 = Poly::from_i64(&[0, -64, 0, 1]);
    log.push(entry(
        "double-well termination polynomial",
        "Q3(E) = E (E^2 - 64)",
        format!("6! c3 = {}", q3.display_with("E")),
        agree(q3 == quoted_q3 || q3 == -quoted_q3),
        "equal up to overall sign; roots -8, 0, 8".into(),
    ));
    let quoted = [
        Poly::from_i64(&[1, 0, 4, 0, 2]),
        Poly::new(vec![int(1), int(0), int(0), int(0), rat(-2, 3)]),
        Poly::from_i64(&[1, 0, -4, 0, 2]),
    ];
    let derived: Vec<Poly> = s.entries.iter().map(|e| e.polynomial.clone()).collect();
    log.push(entry(
        "double-well polynomials",
        "1 + 4x^2 + 2x^4, 1 - (2/3)x^4, 1 - 4x^2 + 2x^4",
        derived.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", "),
        agree(derived == quoted),
        "exact comparison".into(),
    ));
    Ok(())
}

fn odd_series(log: &mut Vec<ValidationEntry>) -> Result<(), QesError> {
    let series = euler_operator(&QesModel::double_well())?.generate_series(&int(1), 4)?;
    let quoted: Vec<Poly> = [
        (vec![1], 1),
        (vec![0, -1], 3),
        (vec![-36, 0, 1], 5),
        (vec![0, 76, 0, -1], 7),
        (vec![-3024, 0, 8, 0, 1], 9),
    ]
    .into_iter()
    .map(|(c, f)| Poly::from_i64(&c).scale(&Rational::from_integer(factorial(f)).recip()))
    .collect();
    log.push(entry(
        "odd series",
        "x - E x^3/3! + (E^2-36) x^5/5! + (76E-E^3) x^7/7! + (E^4+8E^2-3024) x^9/9!",
        "generated through order 4 from the odd indicial root".into(),
        agree(series.coeffs() == quoted.as_slice()),
        "exact comparison".into(),
    ));
    Ok(())
}

fn labeling(log: &mut Vec<ValidationEntry>) -> Result<(), QesError> {
    let op = euler_operator(&QesModel::double_well())?;
    let s = op.generate_series(&Rational::zero(), 2)?;
    let q2 = s.coeffs()[2].scale(&Rational::from_integer(factorial(4)));
    log.push(entry(
        "series denominator",
        "sum Q_k x^(2k) / 2k!",
        format!("read as (2k)!: Q2 = {}", q2.display_with("E")),
        CheckStatus::Note,
        "the denominator is read as (2k)!, which gives integer Q_k here; it only affects labels".into(),
    ));
    Ok(())
}

/// All cross-checks, in a fixed order.
pub fn validation_log() -> Result<Vec<ValidationEntry>, QesError> {
    let mut log = Vec::new();
    double_well_checks(&mut log)?;
    odd_series(&mut log)?;
    labeling(&mut log)?;
    n2_termination(&mut log)?;
    n2_energies(&mut log)?;
    n2_polynomials(&mut log)?;
    barrier_checks(&mut log)?;
    Ok(log)
}
