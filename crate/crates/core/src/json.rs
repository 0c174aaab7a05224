//! JSON documents for Jacobi matrices, moment sequences, matrix polynomials
//! and step measures.
//!
//! A block is a p×p array of `[re, im]` pairs. Keys come out sorted (the
//! default `serde_json` map is ordered) and floats use shortest round-trip
//! rendering, so serialization is byte-stable and lossless.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::jacobi::{fixtures, BlockJacobiMatrix};
use crate::matkernel::{c, ComplexMatrix, HermitianMatrix, C64};
use crate::measures::StepMeasure;
use crate::moments::MomentSequence;
use crate::polys::MatrixPoly;

pub fn complex_to_value(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn block_to_value(m: &ComplexMatrix) -> Value {
    Value::Array(
        m.rows()
            .into_iter()
            .map(|row| Value::Array(row.into_iter().map(complex_to_value).collect()))
            .collect(),
    )
}

fn blocks_to_value<'a>(ms: impl IntoIterator<Item = &'a ComplexMatrix>) -> Value {
    Value::Array(ms.into_iter().map(block_to_value).collect())
}

fn bad(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("{path}: {msg}"))
}

fn number(v: &Value, path: &str) -> Result<f64> {
    let x = v.as_f64().ok_or_else(|| bad(path, "expected a number"))?;
    if !x.is_finite() {
        return Err(bad(path, "number is not finite"));
    }
    Ok(x)
}

pub fn complex_from_value(v: &Value, path: &str) -> Result<C64> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok(c(number(re, &format!("{path}[0]"))?, number(im, &format!("{path}[1]"))?)),
        _ => Err(bad(path, "expected a [re, im] pair")),
    }
}

pub fn block_from_value(v: &Value, p: usize, path: &str) -> Result<ComplexMatrix> {
    let rows = v.as_array().ok_or_else(|| bad(path, "expected an array of rows"))?;
    if rows.len() != p {
        return Err(bad(path, format!("expected {p} rows, found {}", rows.len())));
    }
    let mut m = ComplexMatrix::zeros(p);
    for (i, row) in rows.iter().enumerate() {
        let entries = row.as_array().ok_or_else(|| bad(&format!("{path}[{i}]"), "expected an array"))?;
        if entries.len() != p {
            return Err(bad(&format!("{path}[{i}]"), format!("expected {p} entries, found {}", entries.len())));
        }
        for (j, e) in entries.iter().enumerate() {
            m[(i, j)] = complex_from_value(e, &format!("{path}[{i}][{j}]"))?;
        }
    }
    Ok(m)
}

fn blocks_from_value(v: &Value, p: usize, path: &str) -> Result<Vec<ComplexMatrix>> {
    let items = v.as_array().ok_or_else(|| bad(path, "expected an array of blocks"))?;
    items
        .iter()
        .enumerate()
        .map(|(k, b)| block_from_value(b, p, &format!("{path}[{k}]")))
        .collect()
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| bad(what, "expected a JSON object"))
}

fn field<'a>(o: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    o.get(key).ok_or_else(|| bad(key, "missing field"))
}

fn read_p(o: &Map<String, Value>) -> Result<usize> {
    let p = field(o, "p")?.as_u64().ok_or_else(|| bad("p", "expected a positive integer"))?;
    if p == 0 || p > 64 {
        return Err(bad("p", format!("block dimension {p} out of range 1..=64")));
    }
    Ok(p as usize)
}

fn hermitian(m: ComplexMatrix, path: &str) -> Result<HermitianMatrix> {
    if !m.is_hermitian(crate::matkernel::HERMITIAN_TOL) {
        return Err(bad(path, "block is not Hermitian"));
    }
    Ok(m.hermitian_part())
}

/// A Jacobi document: the matrix plus an optional normalization `D_0`.
#[derive(Clone, Debug)]
pub struct JacobiDoc {
    pub jacobi: BlockJacobiMatrix,
    pub d0: Option<ComplexMatrix>,
}

/// `{"p", "n_blocks", "diag", "offdiag"}` plus optional `"d0"` and, for a
/// named fixture tail, `"generator"`.
pub fn jacobi_to_value(j: &BlockJacobiMatrix, d0: Option<&ComplexMatrix>) -> Value {
    let mut o = Map::new();
    o.insert("p".into(), json!(j.p()));
    o.insert("n_blocks".into(), json!(j.stored_diag().len()));
    o.insert("diag".into(), blocks_to_value(j.stored_diag()));
    o.insert("offdiag".into(), blocks_to_value(j.stored_offdiag()));
    if let Some(name) = j.generator_name() {
        o.insert("generator".into(), json!(name));
    }
    if let Some(d) = d0 {
        o.insert("d0".into(), block_to_value(d));
    }
    Value::Object(o)
}

pub fn jacobi_from_value(v: &Value) -> Result<JacobiDoc> {
    let o = object(v, "jacobi")?;
    let p = read_p(o)?;
    let diag = blocks_from_value(field(o, "diag")?, p, "diag")?;
    let offdiag = blocks_from_value(field(o, "offdiag")?, p, "offdiag")?;
    if let Some(n) = o.get("n_blocks") {
        let n = n.as_u64().ok_or_else(|| bad("n_blocks", "expected an integer"))?;
        if n as usize != diag.len() {
            return Err(bad("n_blocks", format!("says {n} but diag has {} blocks", diag.len())));
        }
    }
    for (k, a) in diag.iter().enumerate() {
        if !a.is_hermitian(crate::matkernel::HERMITIAN_TOL) {
            return Err(bad(&format!("diag[{k}]"), "block is not Hermitian"));
        }
    }
    let jacobi = match o.get("generator") {
        Some(g) => {
            let name = g.as_str().ok_or_else(|| bad("generator", "expected a string"))?;
            let fixture = fixtures::by_name(name).ok_or_else(|| bad("generator", format!("unknown generator {name:?}")))?;
            if fixture.p() != p {
                return Err(bad("generator", format!("{name} has p = {}, document says {p}", fixture.p())));
            }
            if diag.len() != offdiag.len() {
                return Err(bad("offdiag", "a generated tail needs as many off-diagonal as diagonal blocks"));
            }
            fixture.with_prefix(diag, offdiag)?
        }
        None => BlockJacobiMatrix::new(p, diag, offdiag)?,
    };
    let d0 = match o.get("d0") {
        Some(d) => Some(block_from_value(d, p, "d0")?),
        None => None,
    };
    Ok(JacobiDoc { jacobi, d0 })
}

/// `{"p", "S"}`.
pub fn moments_to_value(s: &MomentSequence) -> Value {
    json!({ "p": s.p(), "S": blocks_to_value(s.moments().iter().map(|m| m.as_matrix())) })
}

pub fn moments_from_value(v: &Value) -> Result<MomentSequence> {
    let o = object(v, "moments")?;
    let p = read_p(o)?;
    let raw = blocks_from_value(field(o, "S")?, p, "S")?;
    let s = raw
        .into_iter()
        .enumerate()
        .map(|(k, m)| hermitian(m, &format!("S[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    MomentSequence::new(p, s)
}

/// `{"p", "coeffs"}`, lowest degree first.
pub fn matrixpoly_to_value(poly: &MatrixPoly) -> Value {
    json!({ "p": poly.p(), "coeffs": blocks_to_value(poly.coeffs()) })
}

pub fn matrixpoly_from_value(v: &Value) -> Result<MatrixPoly> {
    let o = object(v, "matrixpoly")?;
    let p = read_p(o)?;
    MatrixPoly::new(p, blocks_from_value(field(o, "coeffs")?, p, "coeffs")?)
}

/// `{"p", "nodes", "weights"}`.
pub fn measure_to_value(m: &StepMeasure) -> Value {
    json!({
        "p": m.p(),
        "nodes": m.nodes(),
        "weights": blocks_to_value(m.weights().iter().map(|w| w.as_matrix())),
    })
}

pub fn measure_from_value(v: &Value) -> Result<StepMeasure> {
    let o = object(v, "measure")?;
    let p = read_p(o)?;
    let nodes = field(o, "nodes")?
        .as_array()
        .ok_or_else(|| bad("nodes", "expected an array of numbers"))?
        .iter()
        .enumerate()
        .map(|(k, x)| number(x, &format!("nodes[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    let weights = blocks_from_value(field(o, "weights")?, p, "weights")?
        .into_iter()
        .enumerate()
        .map(|(k, w)| hermitian(w, &format!("weights[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    StepMeasure::new(p, nodes, weights)
}

/// Pretty-printed with sorted keys and a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values built here always serialize");
    s.push('\n');
    s
}

pub fn parse(text: &str, what: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("{what}: malformed JSON: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::fixtures::*;
    use crate::moments::moments_from_jacobi;
    use proptest::prelude::*;

    #[test]
    fn jacobi_round_trip_is_bit_exact() {
        let a = ComplexMatrix::from_rows(&[vec![c(0.1, 0.0), c(1.0 / 3.0, 2e-300)], vec![c(1.0 / 3.0, -2e-300), c(-7.5, 0.0)]])
            .unwrap();
        let b = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(std::f64::consts::PI, 1e22), c(2.0, 0.0)]])
            .unwrap();
        let j = BlockJacobiMatrix::new(2, vec![a.clone(), a], vec![b]).unwrap();
        let text = render(&jacobi_to_value(&j, None));
        let back = jacobi_from_value(&parse(&text, "t").unwrap()).unwrap();
        assert_eq!(back.jacobi.stored_diag(), j.stored_diag());
        assert_eq!(back.jacobi.stored_offdiag(), j.stored_offdiag());
        assert!(back.d0.is_none());
        assert_eq!(render(&jacobi_to_value(&back.jacobi, None)), text);
    }

    #[test]
    fn generator_documents() {
        let text = r#"{"p": 1, "n_blocks": 0, "diag": [], "offdiag": [], "generator": "IND"}"#;
        let doc = jacobi_from_value(&parse(text, "t").unwrap()).unwrap();
        assert!(doc.jacobi.is_infinite());
        assert_eq!(doc.jacobi.offdiag_block(3).unwrap(), ComplexMatrix::scalar(1, c(16.0, 0.0)));
        let text = r#"{"p": 1, "n_blocks": 1, "diag": [[[[5, 0]]]], "offdiag": [[[[2, 0]]]], "generator": "CH"}"#;
        let doc = jacobi_from_value(&parse(text, "t").unwrap()).unwrap();
        assert_eq!(doc.jacobi.diag_block(0).unwrap()[(0, 0)], c(5.0, 0.0));
        assert_eq!(doc.jacobi.offdiag_block(1).unwrap()[(0, 0)], c(0.5, 0.0));
        let v = jacobi_to_value(&indeterminate(), Some(&ComplexMatrix::identity(1)));
        assert_eq!(v["generator"], "IND");
        assert!(v.get("d0").is_some());
    }

    #[test]
    fn rejects_malformed() {
        let cases = [
            (r#"[1]"#, "expected a JSON object"),
            (r#"{"p": 0, "diag": [], "offdiag": []}"#, "out of range"),
            (r#"{"p": 1, "diag": [[[1, 0]]], "offdiag": []}"#, "diag[0][0]: expected 1 entries"),
            (r#"{"p": 1, "diag": [[[[0, 1]]]], "offdiag": []}"#, "not Hermitian"),
            (r#"{"p": 1, "n_blocks": 2, "diag": [[[[0, 0]]]], "offdiag": []}"#, "n_blocks"),
            (r#"{"p": 1, "diag": [], "offdiag": [], "generator": "XX"}"#, "unknown generator"),
            (r#"{"p": 1, "diag": [[[[0, "a"]]]], "offdiag": []}"#, "expected a number"),
        ];
        for (text, needle) in cases {
            let err = jacobi_from_value(&parse(text, "t").unwrap()).unwrap_err();
            assert!(matches!(err, Error::InvalidInput(_)), "{text}: {err}");
            assert!(err.to_string().contains(needle), "{text}: {err}");
        }
        assert!(parse("{", "file.json").unwrap_err().to_string().contains("file.json"));
    }

    #[test]
    fn other_documents_round_trip() {
        let s = moments_from_jacobi(&direct_sum(), &ComplexMatrix::identity(2), 6).unwrap();
        let back = moments_from_value(&parse(&render(&moments_to_value(&s)), "t").unwrap()).unwrap();
        assert_eq!(back, s);
        let poly = MatrixPoly::new(1, vec![ComplexMatrix::scalar(1, c(0.5, -1.0)), ComplexMatrix::identity(1)]).unwrap();
        assert_eq!(matrixpoly_from_value(&matrixpoly_to_value(&poly)).unwrap(), poly);
        let m = StepMeasure::new(1, vec![-0.5, 0.5], vec![HermitianMatrix::diag(&[0.5]); 2]).unwrap();
        assert_eq!(measure_from_value(&measure_to_value(&m)).unwrap(), m);
        let bad_w = r#"{"p": 1, "nodes": [0], "weights": [[[[-1, 0]]]]}"#;
        assert!(measure_from_value(&parse(bad_w, "t").unwrap()).is_err());
    }

    proptest! {
        #[test]
        fn floats_round_trip(re in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO,
                             im in proptest::num::f64::NORMAL | proptest::num::f64::ZERO) {
            let z = c(re, im);
            let text = render(&complex_to_value(z));
            let back = complex_from_value(&parse(&text, "t").unwrap(), "z").unwrap();
            prop_assert_eq!(back.re.to_bits(), re.to_bits());
            prop_assert_eq!(back.im.to_bits(), im.to_bits());
        }
    }
}
