//! The five commands behind the binary. Each returns the JSON report it
//! printed plus the process exit code; invalid input surfaces as `Err` and
//! the driver maps it to exit 2. Exit codes are the machine contract:
//! 0 = success / YES, 1 = NO, 2 = invalid input, 3 = tolerance not met.

use std::path::{Path, PathBuf};

use num_traits::{One, Signed, Zero};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};

use hypmoment::dyadic::Dyadic;
use hypmoment::hamburger::ExtractError;
use hypmoment::hyp1::{decide_type1, construct_measure_type1, Type1Branch, Type1Failure, Type1Report};
use hypmoment::hyp2::{construct_measure_type2_general, decide_type2_general, HypStatus, Type2Failure};
use hypmoment::hyp3::{construct_measure_type3, decide_type3, Type3Branch, Type3Failure};
use hypmoment::measure::{plane_residual, PlaneMeasure, RealValue};
use hypmoment::oracle::{forward_moments, random_curve, random_curve_atoms};
use hypmoment::scalar::{parse_rat, Rat, Scalar};
use hypmoment::seq::{monos_up_to, BivSeq, Curve};

use crate::instance::{
    atoms_to_measure, domain_to_instance, parse_instance, parse_measure, to_json_bytes,
};

/// What a command produced: the report text for stdout and the exit code.
pub struct Outcome {
    pub stdout: String,
    pub exit: u8,
}

fn load_instance(path: &Path) -> Result<(BivSeq<Rat>, Curve), String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_instance(&text)
}

fn parse_tolerance(text: &str) -> Result<Rat, String> {
    let tol = parse_rat(text).map_err(|e| format!("tolerance: {e}"))?;
    if tol.is_negative() {
        return Err(format!("tolerance {text} is negative"));
    }
    Ok(tol)
}

/// Significant decimal digits carried by `prec` bits, with two guard digits.
fn digits_for(prec: u64) -> usize {
    (prec as usize) * 30103 / 100000 + 2
}

fn fmt_scalar<T: Scalar>(v: &T, prec: u64) -> String {
    v.to_dyadic(prec).to_decimal(digits_for(prec))
}

fn fmt_real(v: &RealValue, prec: u64) -> String {
    v.to_dyadic(prec).to_decimal(digits_for(prec))
}

fn fmt_rat_short(r: &Rat) -> String {
    if r.is_zero() {
        "0".to_string()
    } else {
        Dyadic::from_rat(r, 96).to_decimal(12)
    }
}

fn witness_json<T: Scalar>(w: &Option<(T, T)>, prec: u64) -> Value {
    match w {
        None => Value::Null,
        Some((t, u)) => json!({ "t": fmt_scalar(t, prec), "u": fmt_scalar(u, prec) }),
    }
}

fn violations_json(v: &[(usize, usize)]) -> Value {
    Value::Array(v.iter().map(|(i, j)| json!([i, j])).collect())
}

fn finish(report: Value, exit: u8, out: Option<&Path>) -> Result<Outcome, String> {
    let text = to_json_bytes(&report);
    if let Some(p) = out {
        std::fs::write(p, &text).map_err(|e| format!("cannot write {}: {e}", p.display()))?;
    }
    Ok(Outcome { stdout: text, exit })
}

fn certificate1(r: &Type1Report<Rat>) -> (&'static str, Option<Value>) {
    match (&r.branch, &r.failure) {
        (Some(Type1Branch::BothPd), _) => ("spanning-blocks-positive-definite", None),
        (Some(Type1Branch::Witness), _) => ("corner-witness-strong-hamburger", None),
        (None, Some(Type1Failure::RelationsViolated(v))) => {
            ("curve-relations-violated", Some(violations_json(v)))
        }
        (None, Some(Type1Failure::MomentMatrixNotPsd)) => {
            ("moment-matrix-not-positive-semidefinite", None)
        }
        (None, Some(Type1Failure::BorderedMatrixNotPsd)) => {
            ("bordered-matrix-not-positive-semidefinite", None)
        }
        (None, Some(Type1Failure::NoWitness)) => ("no-corner-pair-passes-strong-hamburger", None),
        _ => ("undetermined", None),
    }
}

fn decide_report(s: &BivSeq<Rat>, curve: &Curve, prec: u64) -> (Value, u8) {
    match curve {
        Curve::Hyp1 => {
            let r = decide_type1::<Rat>(s);
            let (cert, violations) = certificate1(&r);
            let mut report = json!({
                "certificate": cert,
                "exists": r.exists,
                "minimal_atoms": r.minimal_atoms,
                "precision_bits": prec,
                "rank_bordered": r.rank_n,
                "rank_moment_matrix": r.rank_m,
                "witness": witness_json(&r.witness, prec),
            });
            if let Some(v) = violations {
                report.as_object_mut().unwrap().insert("violations".into(), v);
            }
            (report, u8::from(!r.exists))
        }
        Curve::Hyp2 { a } => {
            let r = decide_type2_general(s, a);
            let (cert, violations) = match (&r.witness_status, &r.failure) {
                (Some(HypStatus::Flat), _) => ("corner-witness-flat", None),
                (Some(HypStatus::FullRank), _) => ("corner-witness-full-rank", None),
                (None, Some(Type2Failure::RelationsViolated(v))) => {
                    ("curve-relations-violated", Some(violations_json(v)))
                }
                (None, Some(Type2Failure::MomentMatrixNotPsd)) => {
                    ("moment-matrix-not-positive-semidefinite", None)
                }
                (None, Some(Type2Failure::NoWitness)) => ("no-feasible-corner-pair", None),
                _ => ("undetermined", None),
            };
            let mut report = json!({
                "certificate": cert,
                "exists": r.exists,
                "minimal_atoms": r.minimal_atoms,
                "precision_bits": prec,
                "rank_conic": r.rank_f_min,
                "rank_line": r.rank_h_min,
                "rank_moment_matrix": r.rank_m,
                "witness": witness_json(&r.witness, prec),
            });
            if let Some(v) = violations {
                report.as_object_mut().unwrap().insert("violations".into(), v);
            }
            (report, u8::from(!r.exists))
        }
        Curve::Hyp3 { a } => {
            let r = decide_type3(s, a);
            let (cert, violations) = match (&r.branch, &r.failure) {
                (Some(Type3Branch::ZeroDefect), _) => ("zero-defect-origin", None),
                (Some(Type3Branch::TwoContacts), _) => ("two-boundary-contacts", None),
                (Some(Type3Branch::SingleContact), _) => ("single-boundary-contact", None),
                (None, Some(Type3Failure::RelationsViolated(v))) => {
                    ("curve-relations-violated", Some(violations_json(v)))
                }
                (None, Some(Type3Failure::MomentMatrixNotPsd)) => {
                    ("moment-matrix-not-positive-semidefinite", None)
                }
                (None, Some(Type3Failure::SpanDeficient)) => ("conic-span-deficient", None),
                (None, Some(Type3Failure::NegativeDefect)) => ("negative-completion-defect", None),
                (None, Some(Type3Failure::NoWitness)) => ("no-feasible-corner-pair", None),
                _ => ("undetermined", None),
            };
            let mut report = json!({
                "certificate": cert,
                "exists": r.exists,
                "minimal_atoms": r.minimal_atoms,
                "precision_bits": prec,
                "rank_conic": r.rank_f_min,
                "rank_line": r.rank_h_min,
                "rank_moment_matrix": r.rank_m,
                "witness": witness_json(&r.witness, prec),
            });
            if let Some(v) = violations {
                report.as_object_mut().unwrap().insert("violations".into(), v);
            }
            (report, u8::from(!r.exists))
        }
    }
}

/// `decide`: existence, minimal atom count, witness, and certificate.
pub fn decide(path: &Path, precision: u64, out: Option<&Path>) -> Result<Outcome, String> {
    let (s, curve) = load_instance(path)?;
    let (report, exit) = decide_report(&s, &curve, precision);
    finish(report, exit, out)
}

fn atoms_json(mu: &PlaneMeasure, prec: u64) -> Value {
    Value::Array(
        mu.atoms
            .iter()
            .map(|a| {
                json!({
                    "weight": fmt_real(&a.weight, prec),
                    "x": fmt_real(&a.x, prec),
                    "y": fmt_real(&a.y, prec),
                })
            })
            .collect(),
    )
}

/// `solve`: construct a minimal representing measure, print it as decimal
/// strings at the working precision, and check the relative residual.
pub fn solve(
    path: &Path,
    precision: u64,
    tol_text: &str,
    out: Option<&Path>,
) -> Result<Outcome, String> {
    let (s, curve) = load_instance(path)?;
    let tol = parse_tolerance(tol_text)?;
    let built = match &curve {
        Curve::Hyp1 => construct_measure_type1(&s, precision),
        Curve::Hyp2 { a } => construct_measure_type2_general(&s, a, precision),
        Curve::Hyp3 { a } => construct_measure_type3(&s, a, precision),
    };
    match built {
        Err(ExtractError::NotRepresentable) => {
            let report = json!({
                "error": "the sequence has no representing measure on its curve",
                "exists": false,
            });
            finish(report, 1, out)
        }
        Err(e) => {
            let report = json!({
                "error": format!("construction failed at {precision} bits: {e}"),
                "exists": true,
            });
            finish(report, 3, out)
        }
        Ok(mu) => {
            let residual = plane_residual(&mu, &s, precision);
            let ok = residual.to_rat() <= tol;
            let report = json!({
                "atom_count": mu.len(),
                "atoms": atoms_json(&mu, precision),
                "exists": true,
                "precision_bits": precision,
                "residual": residual.to_decimal(12),
                "residual_ok": ok,
                "tolerance": tol_text,
            });
            finish(report, if ok { 0 } else { 3 }, out)
        }
    }
}

/// `verify`: recompute the moments of a measure file exactly and compare
/// them with the instance, entry by entry, against a relative tolerance.
pub fn verify(path: &Path, measure_path: &Path, tol_text: &str) -> Result<Outcome, String> {
    let (s, _curve) = load_instance(path)?;
    let text = std::fs::read_to_string(measure_path)
        .map_err(|e| format!("cannot read {}: {e}", measure_path.display()))?;
    let atoms = parse_measure(&text)?;
    let tol = parse_tolerance(tol_text)?;
    let recomputed = forward_moments(&atoms, s.k());
    let mut worst = Rat::zero();
    for (i, j) in monos_up_to(s.degree()) {
        let target = s.get(i, j);
        let diff = (recomputed.get(i, j).clone() - target.clone()).abs();
        let scale = target.abs().max(Rat::one());
        worst = worst.max(diff / scale);
    }
    let ok = worst <= tol;
    let report = json!({
        "atom_count": atoms.len(),
        "max_relative_error": fmt_rat_short(&worst),
        "tolerance": tol_text,
        "verified": ok,
    });
    finish(report, u8::from(!ok), None)
}

fn measure_path_for(instance_path: &Path) -> PathBuf {
    let name = instance_path.file_name().and_then(|s| s.to_str()).unwrap_or("instance.json");
    let stem = name.strip_suffix(".json").unwrap_or(name);
    instance_path.with_file_name(format!("{stem}.measure.json"))
}

/// `generate`: sample a reproducible random atomic measure on a curve and
/// emit its moment instance plus the ground-truth measure file.
#[allow(clippy::too_many_arguments)]
pub fn generate(
    curve_kind: &str,
    a_text: Option<&str>,
    n_line: usize,
    n_conic: usize,
    k: usize,
    seed: u64,
    height: i64,
    out: Option<&Path>,
) -> Result<Outcome, String> {
    if k < 3 {
        return Err(format!("half-degree {k} is below the supported minimum of 3"));
    }
    if n_line + n_conic == 0 {
        return Err("at least one atom is required".into());
    }
    if height < 1 {
        return Err(format!("height bound {height} must be positive"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let a = match a_text {
        Some(text) => Some(parse_rat(text).map_err(|e| format!("curve coefficient: {e}"))?),
        None => None,
    };
    let curve = match (curve_kind, a) {
        ("hyp1", None) => Curve::Hyp1,
        ("hyp1", Some(_)) => return Err("curve type \"hyp1\" takes no coefficient".into()),
        ("hyp2", Some(a)) => Curve::Hyp2 { a },
        ("hyp3", Some(a)) => Curve::Hyp3 { a },
        ("hyp2", None) => random_curve(&mut rng, 1),
        ("hyp3", None) => random_curve(&mut rng, 2),
        (other, _) => return Err(format!("unknown curve type {other:?}")),
    };
    curve.validate()?;
    let atoms = random_curve_atoms(&mut rng, &curve, n_line, n_conic, height);
    let s = forward_moments(&atoms, k);
    let instance = domain_to_instance(&s, &curve);
    let measure = atoms_to_measure(&atoms);
    match out {
        Some(p) => {
            let mp = measure_path_for(p);
            std::fs::write(p, to_json_bytes(&instance))
                .map_err(|e| format!("cannot write {}: {e}", p.display()))?;
            std::fs::write(&mp, to_json_bytes(&measure))
                .map_err(|e| format!("cannot write {}: {e}", mp.display()))?;
            let report = json!({
                "atom_count": atoms.len(),
                "degree": 2 * k,
                "instance_path": p.display().to_string(),
                "measure_path": mp.display().to_string(),
                "seed": seed,
            });
            Ok(Outcome { stdout: to_json_bytes(&report), exit: 0 })
        }
        None => {
            let report = json!({
                "instance": serde_json::to_value(&instance).unwrap(),
                "measure": serde_json::to_value(&measure).unwrap(),
                "seed": seed,
            });
            Ok(Outcome { stdout: to_json_bytes(&report), exit: 0 })
        }
    }
}

/// `transform`: apply the invertible affine substitution
/// `x' = a + b·x + c·y`, `y' = d + e·x + f·y` to the moments. The curve
/// block is copied through unchanged; the caller is responsible for maps
/// that preserve the support curve.
pub fn transform(path: &Path, coefs: &[String; 6], out: Option<&Path>) -> Result<Outcome, String> {
    let (s, curve) = load_instance(path)?;
    let mut parsed = Vec::with_capacity(6);
    for (idx, text) in coefs.iter().enumerate() {
        parsed.push(parse_rat(text).map_err(|e| format!("coefficient {}: {e}", idx + 1))?);
    }
    let s2 = s
        .affine_apply(&parsed[0], &parsed[1], &parsed[2], &parsed[3], &parsed[4], &parsed[5])
        .map_err(|e| e.to_string())?;
    let instance = domain_to_instance(&s2, &curve);
    match out {
        Some(p) => {
            std::fs::write(p, to_json_bytes(&instance))
                .map_err(|e| format!("cannot write {}: {e}", p.display()))?;
            let report = json!({
                "degree": instance.degree,
                "instance_path": p.display().to_string(),
            });
            Ok(Outcome { stdout: to_json_bytes(&report), exit: 0 })
        }
        None => Ok(Outcome { stdout: to_json_bytes(&instance), exit: 0 }),
    }
}
