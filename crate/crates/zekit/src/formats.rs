//! JSON file formats. Complex numbers are `[re, im]`, matrices are row-major
//! `{rows, cols, data}`.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use zekit_core::chansynth::Channel;
use zekit_core::klcodes::CodeCandidate;
use zekit_core::observables::Observable;
use zekit_core::opsys::OperatorSystem;
use zekit_core::{CMatrix, CVector, C64};

use crate::{Error, Result};

pub type ComplexJson = [f64; 2];

fn to_json(z: C64) -> ComplexJson {
    [z.re, z.im]
}

fn from_json(z: ComplexJson) -> C64 {
    C64::new(z[0], z[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<ComplexJson>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        let data = (0..m.rows()).flat_map(|r| (0..m.cols()).map(move |c| to_json(m[(r, c)]))).collect();
        Self { rows: m.rows(), cols: m.cols(), data }
    }
}

impl TryFrom<&MatrixJson> for CMatrix {
    type Error = Error;

    fn try_from(m: &MatrixJson) -> Result<Self> {
        if m.data.len() != m.rows * m.cols {
            return Err(Error::Format(format!("matrix claims {}x{} but has {} entries", m.rows, m.cols, m.data.len())));
        }
        Ok(CMatrix::from_fn(m.rows, m.cols, |r, c| from_json(m.data[r * m.cols + c])))
    }
}

fn matrices(ms: &[MatrixJson]) -> Result<Vec<CMatrix>> {
    ms.iter().map(CMatrix::try_from).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemJson {
    pub ambient_dim: usize,
    pub basis: Vec<MatrixJson>,
}

impl From<&OperatorSystem> for SystemJson {
    fn from(l: &OperatorSystem) -> Self {
        Self { ambient_dim: l.ambient_dim(), basis: l.basis_dense().iter().map(MatrixJson::from).collect() }
    }
}

impl TryFrom<&SystemJson> for OperatorSystem {
    type Error = Error;

    fn try_from(s: &SystemJson) -> Result<Self> {
        Ok(OperatorSystem::new(s.ambient_dim, matrices(&s.basis)?)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub d_a: usize,
    pub d_b: usize,
    pub kraus: Vec<MatrixJson>,
}

impl From<&Channel> for ChannelJson {
    fn from(ch: &Channel) -> Self {
        Self { d_a: ch.d_a(), d_b: ch.d_b(), kraus: ch.kraus().iter().map(MatrixJson::from).collect() }
    }
}

impl TryFrom<&ChannelJson> for Channel {
    type Error = Error;

    fn try_from(c: &ChannelJson) -> Result<Self> {
        let ch = Channel::new(matrices(&c.kraus)?)?;
        if ch.d_a() != c.d_a || ch.d_b() != c.d_b {
            return Err(Error::Format(format!("channel header {}->{} disagrees with its Kraus operators", c.d_a, c.d_b)));
        }
        Ok(ch)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableJson {
    pub ambient_dim: usize,
    pub effects: Vec<MatrixJson>,
}

impl From<&Observable> for ObservableJson {
    fn from(o: &Observable) -> Self {
        Self { ambient_dim: o.ambient_dim(), effects: o.effects().iter().map(MatrixJson::from).collect() }
    }
}

impl TryFrom<&ObservableJson> for Observable {
    type Error = Error;

    fn try_from(o: &ObservableJson) -> Result<Self> {
        let obs = Observable::new(matrices(&o.effects)?)?;
        if obs.ambient_dim() != o.ambient_dim {
            return Err(Error::Format(format!("observable header says dimension {}", o.ambient_dim)));
        }
        Ok(obs)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeJson {
    pub ambient_dim: usize,
    pub vectors: Vec<Vec<ComplexJson>>,
}

impl From<&CodeCandidate> for CodeJson {
    fn from(c: &CodeCandidate) -> Self {
        Self {
            ambient_dim: c.ambient_dim(),
            vectors: c.vectors().iter().map(|v| v.as_slice().iter().copied().map(to_json).collect()).collect(),
        }
    }
}

impl TryFrom<&CodeJson> for CodeCandidate {
    type Error = Error;

    fn try_from(c: &CodeJson) -> Result<Self> {
        let vectors: Vec<CVector> =
            c.vectors.iter().map(|v| CVector::new(v.iter().copied().map(from_json).collect())).collect();
        let code = CodeCandidate::new(vectors)?;
        if code.ambient_dim() != c.ambient_dim {
            return Err(Error::Format(format!("code header says dimension {}", c.ambient_dim)));
        }
        Ok(code)
    }
}

/// Reads and deserializes a JSON file.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| Error::Json(path.display().to_string(), e))
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Json(String::from("<output>"), e))?;
    s.push('\n');
    Ok(s)
}

/// Writes `value` as JSON to `path`, or to stdout when `path` is `None`.
pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    write_text(&to_json_string(value)?, path)
}

pub(crate) fn write_text(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(p.display().to_string(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use zekit_core::klcodes::pi_certificate;
    use zekit_core::opsys::n_theta;
    use zekit_core::Angle;

    #[test]
    fn matrix_round_trip() {
        let m = CMatrix::from_fn(2, 3, |r, c| C64::new(r as f64, c as f64 - 0.5));
        let j = MatrixJson::from(&m);
        assert_eq!(j.data[1], [0.0, 0.5]);
        assert_eq!(CMatrix::try_from(&j).unwrap(), m);
    }

    #[test]
    fn short_data_is_rejected() {
        let j = MatrixJson { rows: 2, cols: 2, data: vec![[1.0, 0.0]] };
        assert!(matches!(CMatrix::try_from(&j), Err(Error::Format(_))));
    }

    #[test]
    fn system_and_code_round_trip() {
        let l = n_theta(Angle::new(1, 3));
        let back = OperatorSystem::try_from(&SystemJson::from(&l)).unwrap();
        assert_eq!(back.basis_dense(), l.basis_dense());
        let c = pi_certificate();
        let text = serde_json::to_string(&CodeJson::from(&c)).unwrap();
        let parsed: CodeJson = serde_json::from_str(&text).unwrap();
        assert_eq!(CodeCandidate::try_from(&parsed).unwrap(), c);
    }
}
