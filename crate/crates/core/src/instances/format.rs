//! Canonical instance files.
//!
//! One UTF-8 JSON object per file with the fixed field order
//! `kind, p, scale, r_num, gamma_num, gamma_den, payload`. The geometric
//! fields are omitted for the purely combinatorial kinds. Every big integer
//! is a decimal string.

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::*;

#[derive(Serialize, Deserialize)]
struct Record<P> {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r_num: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma_num: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma_den: Option<String>,
    payload: P,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnnPayload {
    dim: usize,
    data: Vec<Vec<String>>,
    queries: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BcpPayload {
    dim: usize,
    a: Vec<Vec<String>>,
    b: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticePayload {
    n: usize,
    dim: usize,
    basis: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetFamilyPayload {
    d: usize,
    supersets: Vec<String>,
    subsets: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OvPayload {
    d: usize,
    a: Vec<String>,
    b: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CnfPayload {
    num_vars: usize,
    width: usize,
    clauses: Vec<Vec<i32>>,
}

fn encode_point(p: &ExactPoint) -> Vec<String> {
    p.coords().iter().map(BigInt::to_string).collect()
}

fn encode_points(ps: &[ExactPoint]) -> Vec<Vec<String>> {
    ps.iter().map(encode_point).collect()
}

fn encode_sets(sets: &[FixedBitSet]) -> Vec<String> {
    sets.iter().map(bits_to_string).collect()
}

fn record<P: Serialize>(kind: InstanceKind, params: Option<&GapParams>, payload: P) -> Record<P> {
    Record {
        kind: kind.as_str().to_string(),
        p: params.map(|g| g.p.as_str().to_string()),
        scale: params.map(|g| g.scale.to_string()),
        r_num: params.map(|g| g.r.to_string()),
        gamma_num: params.map(|g| g.gamma.numer().to_string()),
        gamma_den: params.map(|g| g.gamma.denom().to_string()),
        payload,
    }
}

fn to_text<P: Serialize>(rec: Record<P>) -> String {
    let mut text = serde_json::to_string_pretty(&rec).expect("records serialize");
    text.push('\n');
    text
}

/// Canonical encoding of an instance. Deterministic: equal instances give
/// byte-identical output.
pub fn serialize_instance(instance: &Instance) -> String {
    let kind = instance.kind();
    match instance {
        Instance::Ann(i) => to_text(record(
            kind,
            Some(&i.params),
            AnnPayload {
                dim: i.dim(),
                data: encode_points(&i.data),
                queries: encode_points(&i.queries),
            },
        )),
        Instance::Bcp(i) => to_text(record(
            kind,
            Some(&i.params),
            BcpPayload {
                dim: i.dim(),
                a: encode_points(&i.a),
                b: encode_points(&i.b),
            },
        )),
        Instance::Lattice01(i) => to_text(record(
            kind,
            Some(&i.params),
            LatticePayload {
                n: i.rank(),
                dim: i.dim(),
                basis: encode_points(&i.basis),
                target: i.target.as_ref().map(encode_point),
            },
        )),
        Instance::SubsetQuery(i) => to_text(record(
            kind,
            None,
            SetFamilyPayload {
                d: i.d,
                supersets: encode_sets(&i.supersets),
                subsets: encode_sets(&i.subsets),
            },
        )),
        Instance::Ov(i) => to_text(record(
            kind,
            None,
            OvPayload {
                d: i.d,
                a: encode_sets(&i.a),
                b: encode_sets(&i.b),
            },
        )),
        Instance::Cnf(i) => to_text(record(
            kind,
            None,
            CnfPayload {
                num_vars: i.num_vars,
                width: i.width,
                clauses: i
                    .clauses
                    .iter()
                    .map(|c| c.iter().map(|l| l.value()).collect())
                    .collect(),
            },
        )),
    }
}

fn big(field: &str, s: &str) -> Result<BigInt> {
    s.trim()
        .parse()
        .map_err(|_| Error::Malformed(format!("{field}: '{s}' is not a decimal integer")))
}

fn required<'a>(field: &str, v: &'a Option<String>) -> Result<&'a str> {
    v.as_deref()
        .ok_or_else(|| Error::Malformed(format!("missing field '{field}'")))
}

fn decode_params(rec: &Record<serde_json::Value>) -> Result<GapParams> {
    let p: NormKind = required("p", &rec.p)?.parse()?;
    let scale: u64 = required("scale", &rec.scale)?
        .trim()
        .parse()
        .map_err(|_| Error::Malformed("scale must be a positive integer".into()))?;
    let r = big("r_num", required("r_num", &rec.r_num)?)?;
    let num = big("gamma_num", required("gamma_num", &rec.gamma_num)?)?;
    let den = big("gamma_den", required("gamma_den", &rec.gamma_den)?)?;
    if den.is_zero() {
        return Err(Error::Malformed("gamma_den is zero".into()));
    }
    let gamma = Gamma::new(BigRational::new(num, den))?;
    let params = GapParams { p, scale, r, gamma };
    params.validate()?;
    Ok(params)
}

fn decode_point(what: &str, coords: &[String], dim: usize) -> Result<ExactPoint> {
    if coords.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: coords.len(),
        });
    }
    let coords = coords
        .iter()
        .map(|c| big(what, c))
        .collect::<Result<Vec<_>>>()?;
    ExactPoint::new(coords)
}

fn decode_points(what: &str, rows: &[Vec<String>], dim: usize) -> Result<Vec<ExactPoint>> {
    rows.iter().map(|r| decode_point(what, r, dim)).collect()
}

fn decode_sets(what: &str, rows: &[String], d: usize) -> Result<Vec<FixedBitSet>> {
    rows.iter()
        .map(|s| {
            if s.chars().count() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: s.chars().count(),
                });
            }
            bits_from_str(s).map_err(|e| Error::Malformed(format!("{what}: {e}")))
        })
        .collect()
}

fn payload<P: DeserializeOwned>(value: serde_json::Value) -> Result<P> {
    serde_json::from_value(value).map_err(|e| Error::Malformed(format!("payload: {e}")))
}

/// Parses and validates a canonical instance file.
pub fn parse_instance(bytes: &[u8]) -> Result<Instance> {
    let rec: Record<serde_json::Value> =
        serde_json::from_slice(bytes).map_err(|e| Error::Malformed(e.to_string()))?;
    let kind = InstanceKind::parse(&rec.kind)?;
    let instance = match kind {
        InstanceKind::Ann => {
            let params = decode_params(&rec)?;
            let pl: AnnPayload = payload(rec.payload)?;
            Instance::Ann(AnnInstance {
                params,
                data: decode_points("data", &pl.data, pl.dim)?,
                queries: decode_points("queries", &pl.queries, pl.dim)?,
            })
        }
        InstanceKind::Bcp => {
            let params = decode_params(&rec)?;
            let pl: BcpPayload = payload(rec.payload)?;
            Instance::Bcp(BcpInstance {
                params,
                a: decode_points("a", &pl.a, pl.dim)?,
                b: decode_points("b", &pl.b, pl.dim)?,
            })
        }
        InstanceKind::Lattice01 => {
            let params = decode_params(&rec)?;
            let pl: LatticePayload = payload(rec.payload)?;
            if pl.basis.len() != pl.n {
                return Err(Error::Malformed(format!(
                    "n = {} but {} basis vectors given",
                    pl.n,
                    pl.basis.len()
                )));
            }
            Instance::Lattice01(Lattice01Instance {
                params,
                basis: decode_points("basis", &pl.basis, pl.dim)?,
                target: pl
                    .target
                    .map(|t| decode_point("target", &t, pl.dim))
                    .transpose()?,
            })
        }
        InstanceKind::SubsetQuery => {
            let pl: SetFamilyPayload = payload(rec.payload)?;
            Instance::SubsetQuery(SetFamilyInstance {
                d: pl.d,
                supersets: decode_sets("supersets", &pl.supersets, pl.d)?,
                subsets: decode_sets("subsets", &pl.subsets, pl.d)?,
            })
        }
        InstanceKind::Ov => {
            let pl: OvPayload = payload(rec.payload)?;
            Instance::Ov(OvInstance {
                d: pl.d,
                a: decode_sets("a", &pl.a, pl.d)?,
                b: decode_sets("b", &pl.b, pl.d)?,
            })
        }
        InstanceKind::Cnf => {
            let pl: CnfPayload = payload(rec.payload)?;
            let clauses = pl
                .clauses
                .iter()
                .map(|c| c.iter().map(|&l| Literal::new(l)).collect())
                .collect::<Result<_>>()?;
            Instance::Cnf(CnfInstance {
                num_vars: pl.num_vars,
                width: pl.width,
                clauses,
            })
        }
    };
    instance.validate()?;
    Ok(instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::generate::*;
    use crate::metric::NormKind;

    fn pt(c: &[i64]) -> ExactPoint {
        ExactPoint::from_i64(c).unwrap()
    }

    fn roundtrip(inst: Instance) {
        let text = serialize_instance(&inst);
        let back = parse_instance(text.as_bytes()).unwrap();
        assert_eq!(back, inst);
        assert_eq!(serialize_instance(&back), text);
    }

    #[test]
    fn bcp_canonical_record() {
        let params = GapParams::new(NormKind::LInf, 1, 1, Gamma::integer(3).unwrap()).unwrap();
        let inst = BcpInstance::new(params, vec![pt(&[0, 3])], vec![pt(&[1, 1])]).unwrap();
        let text = serialize_instance(&inst.clone().into());
        let compact: String = text.split_whitespace().collect();
        assert_eq!(
            compact,
            r#"{"kind":"bcp","p":"inf","scale":"1","r_num":"1","gamma_num":"3","gamma_den":"1","payload":{"dim":2,"a":[["0","3"]],"b":[["1","1"]]}}"#
        );
        roundtrip(inst.into());
    }

    #[test]
    fn lattice_without_target_roundtrips() {
        let params = GapParams::new(NormKind::L2, 1, 2, Gamma::from_ratio(3, 2).unwrap()).unwrap();
        let inst = Lattice01Instance::new(params, vec![pt(&[2, 0]), pt(&[-1, 3])], None).unwrap();
        let text = serialize_instance(&inst.clone().into());
        assert!(!text.contains("target"));
        roundtrip(inst.into());
    }

    #[test]
    fn cnf_preserves_signs() {
        let inst = CnfInstance::from_dimacs(2, 2, &[&[1, 2], &[-1, -2]]).unwrap();
        roundtrip(inst.into());
    }

    #[test]
    fn rejects_dependent_basis() {
        let text = r#"{"kind":"lattice01","p":"inf","scale":"1","r_num":"1","gamma_num":"2","gamma_den":"1",
            "payload":{"n":2,"dim":2,"basis":[["1","0"],["2","0"]]}}"#;
        let err = parse_instance(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("dependent basis"), "{err}");
    }

    #[test]
    fn rejects_wrong_dimension() {
        let text = r#"{"kind":"bcp","p":"1","scale":"1","r_num":"1","gamma_num":"2","gamma_den":"1",
            "payload":{"dim":2,"a":[["1","0"]],"b":[["1","0","4"]]}}"#;
        let err = parse_instance(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, found: 3 }), "{err}");
    }

    #[test]
    fn rejects_malformed_inputs() {
        assert!(matches!(parse_instance(b"{not json"), Err(Error::Malformed(_))));
        let no_gamma = r#"{"kind":"bcp","p":"1","scale":"1","r_num":"1","payload":{"dim":1,"a":[["0"]],"b":[["0"]]}}"#;
        assert!(parse_instance(no_gamma.as_bytes()).is_err());
        let small_gamma = r#"{"kind":"bcp","p":"1","scale":"1","r_num":"1","gamma_num":"1","gamma_den":"1","payload":{"dim":1,"a":[["0"]],"b":[["0"]]}}"#;
        assert!(parse_instance(small_gamma.as_bytes()).is_err());
        let bad_kind = r#"{"kind":"tsp","payload":{}}"#;
        assert!(parse_instance(bad_kind.as_bytes()).is_err());
        let big_coord = r#"{"kind":"bcp","p":"inf","scale":"3","r_num":"1","gamma_num":"3","gamma_den":"1",
            "payload":{"dim":1,"a":[["123456789012345678901234567890"]],"b":[["-5"]]}}"#;
        assert!(parse_instance(big_coord.as_bytes()).is_ok());
    }

    #[test]
    fn random_instances_roundtrip() {
        for seed in 0..100u64 {
            let n = 2 + (seed % 6) as usize;
            let p = NormKind::ALL[(seed % 3) as usize];
            let lattice = generate_lattice01(
                &LatticeGen {
                    cvp: seed % 2 == 0,
                    ..LatticeGen::new(n, p, if seed % 4 < 2 { Label::Yes } else { Label::No })
                },
                seed,
            )
            .unwrap();
            roundtrip(lattice.into());
            let bcp = generate_bcp(&BcpGen::new(5, 3, p, Label::Yes), seed).unwrap();
            roundtrip(bcp.into());
            let sets = generate_subset_query(&SubsetQueryGen::new(4, 6, Label::Yes), seed).unwrap();
            roundtrip(sets.into());
            let cnf = generate_cnf(&CnfGen { n: 6, m: 10, k: 3 }, seed).unwrap();
            roundtrip(cnf.into());
        }
    }
}
