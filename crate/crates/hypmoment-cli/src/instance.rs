//! On-disk JSON formats: problem instances carrying exact `"p/q"` moments
//! and measure files listing atoms as exact or decimal strings.
//!
//! Serialization is canonical — moments in degree-lexicographic order,
//! rationals reduced, pretty-printed with a trailing newline — so that
//! parse → serialize → parse is the identity and equal data produces equal
//! bytes.

use std::collections::BTreeMap;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use hypmoment::oracle::RatAtom;
use hypmoment::scalar::{parse_rat, Rat};
use hypmoment::seq::{monos_up_to, BivSeq, Curve};

/// Curve block of an instance file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    /// One of `"hyp1"`, `"hyp2"`, `"hyp3"`.
    #[serde(rename = "type")]
    pub kind: String,
    /// Curve coefficient: required for `hyp2`/`hyp3`, absent for `hyp1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
}

/// One moment entry `β_{i,j}` with an exact rational value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentEntry {
    pub i: usize,
    pub j: usize,
    pub value: String,
}

/// A truncated moment sequence together with its support curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    /// Truncation degree `2k`.
    pub degree: usize,
    pub curve: CurveSpec,
    pub moments: Vec<MomentEntry>,
}

/// One weighted atom of a measure file. Coordinates and weight are strings
/// holding either exact rationals (`"3/7"`) or decimals (`"1.25e-3"`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomEntry {
    pub x: String,
    pub y: String,
    pub weight: String,
}

/// An atomic measure on the plane. Extra top-level keys (precision or
/// residual metadata written by `solve`) are tolerated and ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureFile {
    pub atoms: Vec<AtomEntry>,
}

/// Parses instance JSON into a validated sequence and curve.
pub fn parse_instance(text: &str) -> Result<(BivSeq<Rat>, Curve), String> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| format!("invalid instance JSON: {e}"))?;
    instance_to_domain(&file)
}

/// Validates an [`InstanceFile`]: even degree at least 6, every index of
/// degree at most `2k` present exactly once, values exact rationals, and a
/// well-formed curve block.
pub fn instance_to_domain(file: &InstanceFile) -> Result<(BivSeq<Rat>, Curve), String> {
    if file.degree % 2 != 0 {
        return Err(format!("degree {} is odd; expected an even truncation degree", file.degree));
    }
    let k = file.degree / 2;
    if k < 3 {
        return Err(format!("degree {} is below the supported minimum of 6", file.degree));
    }
    let mut map: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
    for m in &file.moments {
        if m.i + m.j > file.degree {
            return Err(format!(
                "moment index ({}, {}) exceeds the declared degree {}",
                m.i, m.j, file.degree
            ));
        }
        let v = parse_rat(&m.value).map_err(|e| format!("moment ({}, {}): {e}", m.i, m.j))?;
        if map.insert((m.i, m.j), v).is_some() {
            return Err(format!("duplicate moment index ({}, {})", m.i, m.j));
        }
    }
    let s = BivSeq::from_map(k, &map).map_err(|e| e.to_string())?;
    let curve = curve_from_spec(&file.curve)?;
    Ok((s, curve))
}

/// Interprets a curve block, checking coefficient presence and value.
pub fn curve_from_spec(spec: &CurveSpec) -> Result<Curve, String> {
    let a = match &spec.a {
        Some(text) => Some(parse_rat(text).map_err(|e| format!("curve coefficient: {e}"))?),
        None => None,
    };
    let curve = match spec.kind.as_str() {
        "hyp1" => {
            if a.is_some() {
                return Err("curve type \"hyp1\" takes no coefficient".into());
            }
            Curve::Hyp1
        }
        "hyp2" => Curve::Hyp2 {
            a: a.ok_or_else(|| "curve type \"hyp2\" requires a coefficient \"a\"".to_string())?,
        },
        "hyp3" => Curve::Hyp3 {
            a: a.ok_or_else(|| "curve type \"hyp3\" requires a coefficient \"a\"".to_string())?,
        },
        other => return Err(format!("unknown curve type {other:?}")),
    };
    curve.validate()?;
    Ok(curve)
}

/// The canonical curve block for a curve value.
pub fn curve_to_spec(curve: &Curve) -> CurveSpec {
    match curve {
        Curve::Hyp1 => CurveSpec { kind: "hyp1".into(), a: None },
        Curve::Hyp2 { a } => CurveSpec { kind: "hyp2".into(), a: Some(a.to_string()) },
        Curve::Hyp3 { a } => CurveSpec { kind: "hyp3".into(), a: Some(a.to_string()) },
    }
}

/// The canonical instance file for a sequence: moments listed in
/// degree-lexicographic order with reduced rational strings.
pub fn domain_to_instance(s: &BivSeq<Rat>, curve: &Curve) -> InstanceFile {
    InstanceFile {
        degree: s.degree(),
        curve: curve_to_spec(curve),
        moments: monos_up_to(s.degree())
            .into_iter()
            .map(|(i, j)| MomentEntry { i, j, value: s.get(i, j).to_string() })
            .collect(),
    }
}

/// Canonical bytes of a serializable report or file: pretty-printed JSON
/// with a trailing newline.
pub fn to_json_bytes<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON serialization cannot fail");
    text.push('\n');
    text
}

/// Parses a measure file into exact rational atoms with positive weights.
pub fn parse_measure(text: &str) -> Result<Vec<RatAtom>, String> {
    let file: MeasureFile =
        serde_json::from_str(text).map_err(|e| format!("invalid measure JSON: {e}"))?;
    let mut atoms = Vec::with_capacity(file.atoms.len());
    for (idx, entry) in file.atoms.iter().enumerate() {
        let x = parse_rat(&entry.x).map_err(|e| format!("atom {idx}: {e}"))?;
        let y = parse_rat(&entry.y).map_err(|e| format!("atom {idx}: {e}"))?;
        let weight = parse_rat(&entry.weight).map_err(|e| format!("atom {idx}: {e}"))?;
        if !weight.is_positive() {
            return Err(format!("atom {idx}: weight {} is not positive", entry.weight));
        }
        atoms.push(RatAtom { x, y, weight });
    }
    Ok(atoms)
}

/// The canonical measure file for exact rational atoms.
pub fn atoms_to_measure(atoms: &[RatAtom]) -> MeasureFile {
    MeasureFile {
        atoms: atoms
            .iter()
            .map(|a| AtomEntry {
                x: a.x.to_string(),
                y: a.y.to_string(),
                weight: a.weight.to_string(),
            })
            .collect(),
    }
}
