//! JSON payloads for representations, framed data, tuples, and parameter
//! vectors. Exact scalars serialize as `p/q+r/s*i` strings in lowest terms,
//! float scalars as `[re, im]` pairs, matrices as nested arrays, and
//! per-vertex data as name-keyed maps (BTree order keeps output
//! deterministic).

use std::collections::BTreeMap;

use num::rational::BigRational;
use num::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CoreError, Result};
use crate::framed::FramedRepresentation;
use crate::matrix::Matrix;
use crate::quiver::{DoubledQuiver, QuiverJson};
use crate::rep::Representation;
use crate::scalar::{GaussianRational, Mode, Scalar};
use crate::star::LocalSystemData;

pub fn scalar_to_json(s: &Scalar) -> Value {
    match s {
        Scalar::Exact(q) => Value::String(q.to_string()),
        Scalar::Float(z) => serde_json::json!([z.re, z.im]),
    }
}

pub fn scalar_from_json(mode: Mode, v: &Value) -> Result<Scalar> {
    match (mode, v) {
        (Mode::Exact, Value::String(s)) => Ok(Scalar::Exact(s.parse()?)),
        (Mode::Exact, Value::Number(n)) => {
            let i = n
                .as_i64()
                .ok_or_else(|| CoreError::ContractViolation("exact entries must be strings or integers".into()))?;
            Ok(Scalar::Exact(GaussianRational::from_integer(i)))
        }
        (Mode::Float, Value::Array(pair)) if pair.len() == 2 => {
            let re = pair[0].as_f64().ok_or_else(|| CoreError::ContractViolation("bad float".into()))?;
            let im = pair[1].as_f64().ok_or_else(|| CoreError::ContractViolation("bad float".into()))?;
            Ok(Scalar::Float(num::complex::Complex64::new(re, im)))
        }
        (Mode::Float, Value::Number(n)) => {
            let re = n.as_f64().ok_or_else(|| CoreError::ContractViolation("bad float".into()))?;
            Ok(Scalar::Float(num::complex::Complex64::new(re, 0.0)))
        }
        _ => Err(CoreError::ContractViolation("scalar does not match the declared mode".into())),
    }
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|r| Value::Array((0..m.cols()).map(|c| scalar_to_json(&m.get(r, c))).collect()))
        .collect();
    Value::Array(rows)
}

pub fn matrix_from_json(mode: Mode, rows: usize, cols: usize, v: &Value) -> Result<Matrix> {
    let Value::Array(row_vals) = v else {
        return Err(CoreError::ContractViolation("matrix must be an array of rows".into()));
    };
    if row_vals.len() != rows {
        return Err(CoreError::ShapeMismatch(format!(
            "matrix has {} rows, expected {rows}",
            row_vals.len()
        )));
    }
    let mut m = Matrix::zeros(mode, rows, cols);
    for (r, rv) in row_vals.iter().enumerate() {
        let Value::Array(entries) = rv else {
            return Err(CoreError::ContractViolation("matrix row must be an array".into()));
        };
        if entries.len() != cols {
            return Err(CoreError::ShapeMismatch(format!(
                "row {r} has {} entries, expected {cols}",
                entries.len()
            )));
        }
        for (c, e) in entries.iter().enumerate() {
            m.set(r, c, scalar_from_json(mode, e)?)?;
        }
    }
    Ok(m)
}

pub fn rational_to_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rational_from_string(s: &str) -> Result<BigRational> {
    let bad = || CoreError::ContractViolation(format!("cannot parse rational `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d == BigInt::from(0) {
            return Err(bad());
        }
        Ok(BigRational::new(n, d))
    } else {
        let n: BigInt = s.trim().parse().map_err(|_| bad())?;
        Ok(BigRational::from_integer(n))
    }
}

/// `{ "quiver": ..., "dims": {...}, "maps": {"id": [[..]], "id~": [[..]]},
///   "mode": "exact"|"float" }`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepresentationJson {
    pub quiver: QuiverJson,
    pub dims: BTreeMap<String, i64>,
    pub maps: BTreeMap<String, Value>,
    pub mode: Mode,
}

pub fn rep_to_json(rep: &Representation) -> RepresentationJson {
    let dq = &rep.dq;
    let mut dims = BTreeMap::new();
    for (i, name) in dq.base.vertices.iter().enumerate() {
        dims.insert(name.clone(), rep.dims[i]);
    }
    let mut maps = BTreeMap::new();
    for &h in &dq.order {
        maps.insert(dq.arrow_name(h), matrix_to_json(rep.map(h)));
    }
    RepresentationJson { quiver: dq.to_json(), dims, maps, mode: rep.mode() }
}

pub fn rep_from_json(j: &RepresentationJson) -> Result<Representation> {
    let dq = DoubledQuiver::from_json(&j.quiver)?;
    let dims = crate::quiver::vertex_map_from_json(&dq, &j.dims)?;
    let mut maps = Vec::with_capacity(dq.base.arrows.len());
    for k in 0..dq.base.arrows.len() {
        let h = crate::quiver::ArrowRef::forward(k);
        let mut pair = Vec::with_capacity(2);
        for href in [h, h.reverse()] {
            let name = dq.arrow_name(href);
            let v = j
                .maps
                .get(&name)
                .ok_or_else(|| CoreError::ContractViolation(format!("missing map for `{name}`")))?;
            let rows = dims[dq.head(href)] as usize;
            let cols = dims[dq.tail(href)] as usize;
            pair.push(matrix_from_json(j.mode, rows, cols, v)?);
        }
        let bwd = pair.pop().unwrap();
        let fwd = pair.pop().unwrap();
        maps.push((fwd, bwd));
    }
    Representation::new(dq, dims, maps)
}

/// `{ "base": ..., "w": {...}, "a": {...}, "b": {...} }`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FramedJson {
    pub base: RepresentationJson,
    pub w: BTreeMap<String, i64>,
    pub a: BTreeMap<String, Value>,
    pub b: BTreeMap<String, Value>,
}

pub fn framed_to_json(fr: &FramedRepresentation) -> FramedJson {
    let base = rep_to_json(&fr.base);
    let names = &fr.base.dq.base.vertices;
    let mut w = BTreeMap::new();
    let mut a = BTreeMap::new();
    let mut b = BTreeMap::new();
    for (i, name) in names.iter().enumerate() {
        w.insert(name.clone(), fr.w[i]);
        a.insert(name.clone(), matrix_to_json(&fr.a[i]));
        b.insert(name.clone(), matrix_to_json(&fr.b[i]));
    }
    FramedJson { base, w, a, b }
}

pub fn framed_from_json(j: &FramedJson) -> Result<FramedRepresentation> {
    let base = rep_from_json(&j.base)?;
    let dq = base.dq.clone();
    let w = crate::quiver::vertex_map_from_json(&dq, &j.w)?;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, name) in dq.base.vertices.iter().enumerate() {
        let av = j
            .a
            .get(name)
            .ok_or_else(|| CoreError::ContractViolation(format!("missing a[{name}]")))?;
        let bv = j
            .b
            .get(name)
            .ok_or_else(|| CoreError::ContractViolation(format!("missing b[{name}]")))?;
        a.push(matrix_from_json(base.mode(), base.dims[i] as usize, w[i] as usize, av)?);
        b.push(matrix_from_json(base.mode(), w[i] as usize, base.dims[i] as usize, bv)?);
    }
    FramedRepresentation::new(base, w, a, b)
}

/// `{ "r": 2, "matrices": [...], "ladders": [[...]], "flag_dims": [[...]],
///   "flags": optional, "beta": [["0/1", ...]] }`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TupleJson {
    pub r: usize,
    pub matrices: Vec<Value>,
    pub ladders: Vec<Vec<String>>,
    pub flag_dims: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flags: Option<Vec<Vec<Value>>>,
    pub beta: Vec<Vec<String>>,
}

pub fn tuple_to_json(d: &LocalSystemData) -> TupleJson {
    TupleJson {
        r: d.rank,
        matrices: d.matrices.iter().map(matrix_to_json).collect(),
        ladders: d
            .ladders
            .iter()
            .map(|l| l.iter().map(|x| x.to_string()).collect())
            .collect(),
        flag_dims: d.flag_dims.clone(),
        flags: d
            .flags
            .as_ref()
            .map(|fs| fs.iter().map(|arm| arm.iter().map(matrix_to_json).collect()).collect()),
        beta: d
            .beta
            .iter()
            .map(|b| b.iter().map(rational_to_string).collect())
            .collect(),
    }
}

pub fn tuple_from_json(j: &TupleJson) -> Result<LocalSystemData> {
    let matrices = j
        .matrices
        .iter()
        .map(|v| matrix_from_json(Mode::Exact, j.r, j.r, v))
        .collect::<Result<Vec<_>>>()?;
    let ladders = j
        .ladders
        .iter()
        .map(|l| l.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let flags = match &j.flags {
        None => None,
        Some(fs) => {
            let mut out = Vec::new();
            for (i, arm) in fs.iter().enumerate() {
                let mut arm_out = Vec::new();
                for (jj, v) in arm.iter().enumerate() {
                    let cols = *j
                        .flag_dims
                        .get(i)
                        .and_then(|fd| fd.get(jj))
                        .ok_or_else(|| CoreError::ContractViolation("flags exceed flag_dims".into()))?;
                    arm_out.push(matrix_from_json(Mode::Exact, j.r, cols as usize, v)?);
                }
                out.push(arm_out);
            }
            Some(out)
        }
    };
    let beta = j
        .beta
        .iter()
        .map(|b| b.iter().map(|s| rational_from_string(s)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalSystemData {
        rank: j.r,
        matrices,
        ladders,
        flag_dims: j.flag_dims.clone(),
        flags,
        beta,
    })
}

pub fn qvec_to_json(dq: &DoubledQuiver, q: &[GaussianRational]) -> BTreeMap<String, String> {
    dq.base
        .vertices
        .iter()
        .enumerate()
        .map(|(i, name)| (name.clone(), q[i].to_string()))
        .collect()
}

pub fn qvec_from_json(dq: &DoubledQuiver, m: &BTreeMap<String, String>) -> Result<Vec<GaussianRational>> {
    let strings = crate::quiver::vertex_map_from_json(dq, m)?;
    strings.iter().map(|s| s.parse()).collect()
}

pub fn theta_to_json(dq: &DoubledQuiver, t: &[BigRational]) -> BTreeMap<String, String> {
    dq.base
        .vertices
        .iter()
        .enumerate()
        .map(|(i, name)| (name.clone(), rational_to_string(&t[i])))
        .collect()
}

pub fn theta_from_json(dq: &DoubledQuiver, m: &BTreeMap<String, String>) -> Result<Vec<BigRational>> {
    let strings = crate::quiver::vertex_map_from_json(dq, m)?;
    strings.iter().map(|s| rational_from_string(s)).collect()
}

pub fn dims_from_json(dq: &DoubledQuiver, m: &BTreeMap<String, i64>) -> Result<Vec<i64>> {
    crate::quiver::vertex_map_from_json(dq, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{double, Quiver};

    #[test]
    fn representation_round_trip() {
        let q = Quiver::new(
            vec!["1".into(), "2".into()],
            vec![("h".into(), "1".into(), "2".into())],
        )
        .unwrap();
        let dq = double(q, None).unwrap();
        let rep = Representation::new(
            dq,
            vec![1, 2],
            vec![(
                Matrix::from_int_rows(&[&[1], &[2]]),
                Matrix::from_int_rows(&[&[3, 4]]),
            )],
        )
        .unwrap();
        let j = rep_to_json(&rep);
        let text = serde_json::to_string_pretty(&j).unwrap();
        let back: RepresentationJson = serde_json::from_str(&text).unwrap();
        let rep2 = rep_from_json(&back).unwrap();
        assert_eq!(rep, rep2);
    }

    #[test]
    fn representation_with_zero_dims_round_trips() {
        let q = Quiver::new(
            vec!["1".into(), "2".into()],
            vec![("h".into(), "1".into(), "2".into())],
        )
        .unwrap();
        let dq = double(q, None).unwrap();
        let rep = Representation::zero(dq, vec![1, 0], Mode::Exact).unwrap();
        let j = rep_to_json(&rep);
        let rep2 = rep_from_json(&j).unwrap();
        assert_eq!(rep, rep2);
    }

    #[test]
    fn float_representation_round_trips() {
        let q = Quiver::new(
            vec!["1".into(), "2".into()],
            vec![("h".into(), "1".into(), "2".into())],
        )
        .unwrap();
        let dq = double(q, None).unwrap();
        let rep = Representation::zero(dq, vec![2, 1], Mode::Exact)
            .unwrap()
            .to_float();
        let j = rep_to_json(&rep);
        assert_eq!(j.mode, Mode::Float);
        let rep2 = rep_from_json(&j).unwrap();
        assert_eq!(rep, rep2);
    }

    #[test]
    fn deterministic_output() {
        let q = Quiver::new(
            vec!["1".into(), "2".into()],
            vec![("h".into(), "1".into(), "2".into())],
        )
        .unwrap();
        let dq = double(q, None).unwrap();
        let rep = Representation::zero(dq, vec![1, 1], Mode::Exact).unwrap();
        let a = serde_json::to_string(&rep_to_json(&rep)).unwrap();
        let b = serde_json::to_string(&rep_to_json(&rep)).unwrap();
        assert_eq!(a, b);
    }
}
