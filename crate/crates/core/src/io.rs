//! JSON encodings of points and Higgs data.
//!
//! A complex entry is a pair `[re, im]`. Exact files store each part as a
//! rational string (`"3"`, `"-2/5"`); approximate files store floats.

use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::higgs::{det_rational, HiggsData};
use crate::hyperpolygon::HyperpolygonPoint;
use crate::linalg::{Covector2, Vector2};
use crate::scalar::{parse_rational, GaussRat, Mode, Scalar};

/// A point read from a file, in the mode the file declares.
#[derive(Clone, Debug, PartialEq)]
pub enum PointFile {
    Exact(HyperpolygonPoint<GaussRat>),
    Approx(HyperpolygonPoint<Complex64>),
}

impl PointFile {
    pub fn mode(&self) -> Mode {
        match self {
            PointFile::Exact(_) => Mode::Exact,
            PointFile::Approx(_) => Mode::Approx,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            PointFile::Exact(p) => p.n(),
            PointFile::Approx(p) => p.n(),
        }
    }
}

pub fn scalar_to_json<F: Scalar>(x: &F) -> Value {
    match x.to_exact() {
        Some(q) if F::MODE == Mode::Exact => json!([q.re.to_string(), q.im.to_string()]),
        _ => {
            let c = x.to_complex();
            json!([c.re, c.im])
        }
    }
}

fn pair_to_json<F: Scalar>(a: &[F; 2]) -> Value {
    Value::Array(a.iter().map(scalar_to_json).collect())
}

pub fn point_to_json<F: Scalar>(p: &HyperpolygonPoint<F>) -> Value {
    json!({
        "n": p.n(),
        "mode": F::MODE.as_str(),
        "z": p.zs().iter().map(|z| pair_to_json(&z.0)).collect::<Vec<_>>(),
        "y": p.ys().iter().map(|y| pair_to_json(&y.0)).collect::<Vec<_>>(),
    })
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values built here always serialize");
    s.push('\n');
    s
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

fn rational_part(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s).map_err(malformed),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(i.into()))
            } else {
                // decimal text as written in the file, read exactly
                parse_rational(&n.to_string()).map_err(malformed)
            }
        }
        other => Err(malformed(format!(
            "expected a number or rational string, found {other}"
        ))),
    }
}

fn float_part(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| malformed(format!("number {n} out of range"))),
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| malformed(format!("not a float: {s:?}"))),
        other => Err(malformed(format!("expected a number, found {other}"))),
    }
}

fn complex_parts(v: &Value) -> Result<(&Value, &Value)> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok((re, im)),
        _ => Err(malformed(format!(
            "expected a complex entry [re, im], found {v}"
        ))),
    }
}

fn exact_scalar(v: &Value) -> Result<GaussRat> {
    let (re, im) = complex_parts(v)?;
    Ok(GaussRat::new(rational_part(re)?, rational_part(im)?))
}

fn approx_scalar(v: &Value) -> Result<Complex64> {
    let (re, im) = complex_parts(v)?;
    Ok(Complex64::new(float_part(re)?, float_part(im)?))
}

fn pairs<F, P>(v: &Value, key: &str, parse: P) -> Result<Vec<[F; 2]>>
where
    P: Fn(&Value) -> Result<F>,
{
    let list = v
        .get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| malformed(format!("missing array `{key}`")))?;
    list.iter()
        .enumerate()
        .map(|(i, entry)| match entry.as_array().map(Vec::as_slice) {
            Some([a, b]) => Ok([parse(a)?, parse(b)?]),
            _ => Err(malformed(format!(
                "`{key}[{i}]` must have two complex entries"
            ))),
        })
        .collect()
}

fn build_point<F: Scalar, P>(v: &Value, parse: P) -> Result<HyperpolygonPoint<F>>
where
    P: Fn(&Value) -> Result<F> + Copy,
{
    let z = pairs(v, "z", parse)?;
    let y = pairs(v, "y", parse)?;
    if let Some(n) = v.get("n") {
        let n = n
            .as_u64()
            .ok_or_else(|| malformed("`n` must be a non-negative integer"))?;
        if n as usize != z.len() || n as usize != y.len() {
            return Err(malformed(format!(
                "`n` = {n} but z has {} and y has {} entries",
                z.len(),
                y.len()
            )));
        }
    }
    let z = z.into_iter().map(|[a, b]| Vector2::new(a, b)).collect();
    let y = y.into_iter().map(|[a, b]| Covector2::new(a, b)).collect();
    HyperpolygonPoint::new(y, z)
}

pub fn point_from_json(v: &Value) -> Result<PointFile> {
    let mode = match v.get("mode") {
        None => Mode::Exact,
        Some(Value::String(s)) => s.parse().map_err(malformed)?,
        Some(other) => return Err(malformed(format!("`mode` must be a string, found {other}"))),
    };
    Ok(match mode {
        Mode::Exact => PointFile::Exact(build_point(v, exact_scalar)?),
        Mode::Approx => PointFile::Approx(build_point(v, approx_scalar)?),
    })
}

pub fn point_from_str(s: &str) -> Result<PointFile> {
    let v: Value = serde_json::from_str(s).map_err(|e| malformed(format!("invalid JSON: {e}")))?;
    point_from_json(&v)
}

/// The Higgs data, plus the reduced determinant in exact mode.
pub fn higgs_to_json<F: Scalar>(h: &HiggsData<F>) -> Result<Value> {
    let mut v = json!({
        "mode": F::MODE.as_str(),
        "n": h.n(),
        "points": h.points().as_slice().iter().map(scalar_to_json).collect::<Vec<_>>(),
        "alpha": h.weights().as_slice().iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        "lines": h.lines().iter().map(|l| pair_to_json(&l.0)).collect::<Vec<_>>(),
        "residues": h
            .residues()
            .iter()
            .map(|r| r.entries().iter().map(scalar_to_json).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    });
    if F::MODE == Mode::Exact {
        let det = det_rational(h)?;
        v["det"] = json!({
            "numerator": det.numerator().coeffs().iter().map(scalar_to_json).collect::<Vec<_>>(),
            "denominator": det.denominator().coeffs().iter().map(scalar_to_json).collect::<Vec<_>>(),
        });
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::higgs::{to_higgs, MarkedPoints};
    use crate::hyperpolygon::{sample_level_set, WeightVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_round_trip() {
        let p = HyperpolygonPoint::<GaussRat>::new(
            vec![
                Covector2::new(GaussRat::ratio(-2, 5), GaussRat::from_ints(0, 3)),
                Covector2::from_ints(1, 1),
                Covector2::from_ints(0, 0),
            ],
            vec![
                Vector2::from_ints(1, 0),
                Vector2::new(GaussRat::from_ints(1, -1), GaussRat::ratio(7, 3)),
                Vector2::from_ints(0, 1),
            ],
        )
        .unwrap();
        let text = to_pretty(&point_to_json(&p));
        assert!(text.contains("\"-2/5\""));
        assert_eq!(point_from_str(&text).unwrap(), PointFile::Exact(p));
    }

    #[test]
    fn approx_round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p: HyperpolygonPoint<Complex64> = sample_level_set(5, &mut rng).unwrap();
        let text = to_pretty(&point_to_json(&p));
        assert_eq!(point_from_str(&text).unwrap(), PointFile::Approx(p));
    }

    #[test]
    fn integers_and_decimals_are_accepted() {
        let text = r#"{"z": [[[1, 0], ["0", "0"]], [[0, 0], [1, 0]], [["1", 0], ["0.5", 0]]],
                       "y": [[[0, 0], [0, 0]], [[0, 0], [0, 0]], [[0, 0], [0, 0]]]}"#;
        let PointFile::Exact(p) = point_from_str(text).unwrap() else {
            panic!("default mode is exact")
        };
        assert_eq!(p.z(2).0[1], GaussRat::ratio(1, 2));
    }

    #[test]
    fn malformed_inputs() {
        for text in [
            "{",
            r#"{"z": [], "y": []}"#,
            r#"{"z": [[[1, 0]]], "y": [[[0, 0], [0, 0]]]}"#,
            r#"{"mode": "fuzzy", "z": [], "y": []}"#,
            r#"{"n": 2, "z": [[[1, 0], [0, 0]]], "y": [[[0, 0], [0, 0]]]}"#,
            r#"{"z": [[[0, 0], [0, 0]]], "y": [[[0, 0], [0, 0]]]}"#,
            r#"{"z": [[["x", 0], [0, 0]]], "y": [[[0, 0], [0, 0]]]}"#,
        ] {
            assert!(point_from_str(text).is_err(), "{text}");
        }
    }

    #[test]
    fn higgs_json_has_determinant_in_exact_mode() {
        let p = HyperpolygonPoint::<GaussRat>::from_ints(
            &[[0, 2], [-2, 0], [1, -1], [-1, -1]],
            &[[1, 0], [0, 1], [1, 1], [1, -1]],
        )
        .unwrap();
        let h = to_higgs(
            &p,
            &MarkedPoints::standard(4).unwrap(),
            &WeightVector::uniform(4, 1, 3).unwrap(),
        )
        .unwrap();
        let v = higgs_to_json(&h).unwrap();
        assert_eq!(v["alpha"][0], "1/3");
        assert_eq!(
            v["residues"][0],
            json!([["0", "0"], ["2", "0"], ["0", "0"], ["0", "0"]])
        );
        assert!(v["det"]["denominator"].as_array().unwrap().len() > 1);
    }
}
