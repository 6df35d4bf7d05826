//! JSON instance files.
//!
//! ```json
//! {
//!   "n": 2,
//!   "A": [1.0, 0.0, 0.0, 1.0],
//!   "b": [-1.0, 1.0],
//!   "f": {"type": "affine", "C": [0.5, 0.0, 0.0, 0.5], "d": [0.0, 0.0]},
//!   "planted": [1.0, 0.0],
//!   "seed": 7,
//!   "spec": {...}
//! }
//! ```
//!
//! Matrices are row-major. `f` may also be `{"type": "zero"}`. `planted`,
//! `seed` and `spec` are optional. Numbers are written as the shortest
//! decimal that round-trips the double exactly.

use std::fs;
use std::path::Path;

use icpkit::{GeneratorSpec, IcpError, IcpInstance, ImplicitMap, MapFamily, Matrix, PlantedInstance, Vector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot read or write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed instance JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid instance: {0}")]
    Invalid(String),
}

impl From<IcpError> for FileError {
    fn from(e: IcpError) -> Self {
        FileError::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MapFile {
    Zero,
    Affine {
        #[serde(rename = "C")]
        c: Vec<f64>,
        d: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MapFamilyEcho {
    Zero,
    ContractiveAffine { gamma: f64 },
}

/// Generator parameters echoed into generated files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecEcho {
    pub n: usize,
    pub seed: u64,
    pub matrix_family: String,
    pub f_family: MapFamilyEcho,
    pub active_fraction: f64,
    pub rng: String,
    pub active_set: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub f: MapFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planted: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<SpecEcho>,
}

impl InstanceFile {
    pub fn from_instance(inst: &IcpInstance, planted: Option<&Vector>) -> Result<Self, FileError> {
        let n = inst.dim();
        let f = match inst.f() {
            ImplicitMap::Zero => MapFile::Zero,
            ImplicitMap::Affine { c, d } => MapFile::Affine {
                c: c.row_major().to_vec(),
                d: d.to_vec(),
            },
            ImplicitMap::Custom(_) => {
                return Err(FileError::Invalid("custom implicit maps cannot be serialized".into()));
            }
        };
        Ok(InstanceFile {
            n,
            a: inst.a().row_major().to_vec(),
            b: inst.b().to_vec(),
            f,
            planted: planted.map(|p| p.to_vec()),
            seed: None,
            spec: None,
        })
    }

    pub fn from_planted(p: &PlantedInstance) -> Result<Self, FileError> {
        let mut file = InstanceFile::from_instance(&p.instance, Some(&p.planted))?;
        file.seed = Some(p.spec.seed);
        file.spec = Some(echo(&p.spec, &p.active_set));
        Ok(file)
    }

    pub fn to_instance(&self) -> Result<IcpInstance, FileError> {
        let n = self.n;
        if n == 0 {
            return Err(FileError::Invalid("n must be at least 1".into()));
        }
        let len_check = |name: &str, len: usize, want: usize| {
            if len == want {
                Ok(())
            } else {
                Err(FileError::Invalid(format!("{name} has {len} entries, expected {want}")))
            }
        };
        len_check("A", self.a.len(), n * n)?;
        len_check("b", self.b.len(), n)?;
        let f = match &self.f {
            MapFile::Zero => ImplicitMap::Zero,
            MapFile::Affine { c, d } => {
                len_check("C", c.len(), n * n)?;
                len_check("d", d.len(), n)?;
                ImplicitMap::affine(Matrix::from_row_major(n, c.clone())?, Vector::new(d.clone())?)?
            }
        };
        Ok(IcpInstance::new(
            Matrix::from_row_major(n, self.a.clone())?,
            Vector::new(self.b.clone())?,
            f,
        )?)
    }

    pub fn planted_vector(&self) -> Result<Option<Vector>, FileError> {
        match &self.planted {
            None => Ok(None),
            Some(p) if p.len() != self.n => Err(FileError::Invalid(format!(
                "planted has {} entries, expected {}",
                p.len(),
                self.n
            ))),
            Some(p) => Ok(Some(Vector::new(p.clone())?)),
        }
    }

    pub fn parse(text: &str) -> Result<Self, FileError> {
        let file: InstanceFile = serde_json::from_str(text)?;
        // Validate eagerly so a bad file fails at load time.
        file.to_instance()?;
        file.planted_vector()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance files serialize");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Self, FileError> {
        let text = fs::read_to_string(path).map_err(|source| FileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        InstanceFile::parse(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), FileError> {
        fs::write(path, self.to_json()).map_err(|source| FileError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

fn echo(spec: &GeneratorSpec, active_set: &[usize]) -> SpecEcho {
    SpecEcho {
        n: spec.n,
        seed: spec.seed,
        matrix_family: spec.matrix_family.name().to_string(),
        f_family: match spec.map_family {
            MapFamily::Zero => MapFamilyEcho::Zero,
            MapFamily::ContractiveAffine { gamma } => MapFamilyEcho::ContractiveAffine { gamma },
        },
        active_fraction: spec.active_fraction,
        rng: icpkit::generator::RNG_ALGORITHM.to_string(),
        active_set: active_set.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use icpkit::{generate_planted, natural_residual, MatrixFamily};

    fn planted() -> PlantedInstance {
        generate_planted(&GeneratorSpec {
            n: 3,
            seed: 5,
            matrix_family: MatrixFamily::Dense,
            map_family: MapFamily::ContractiveAffine { gamma: 0.5 },
            active_fraction: 0.5,
        })
        .unwrap()
    }

    #[test]
    fn round_trip_preserves_residuals_bitwise() {
        let p = planted();
        let text = InstanceFile::from_planted(&p).unwrap().to_json();
        let back = InstanceFile::parse(&text).unwrap();
        let inst = back.to_instance().unwrap();
        assert_eq!(back.planted_vector().unwrap().unwrap(), p.planted);
        let mut s = icpkit::SeededStream::new(99);
        for _ in 0..10 {
            let r = s.point(3, 2.0);
            let here = natural_residual(&p.instance, &r).unwrap();
            let there = natural_residual(&inst, &r).unwrap();
            assert!(here.iter().zip(there.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }

    #[test]
    fn parses_zero_map() {
        let file = InstanceFile::parse(r#"{"n":1,"A":[1],"b":[-1],"f":{"type":"zero"}}"#).unwrap();
        assert_eq!(file.f, MapFile::Zero);
        assert!(file.planted.is_none());
    }

    #[test]
    fn rejects_bad_files() {
        for text in [
            "{not json",
            r#"{"n":2,"A":[1,0,0],"b":[0,0],"f":{"type":"zero"}}"#,
            r#"{"n":1,"A":[1],"b":[0,1],"f":{"type":"zero"}}"#,
            r#"{"n":1,"A":[NaN],"b":[0],"f":{"type":"zero"}}"#,
            r#"{"n":1,"A":[1e999],"b":[0],"f":{"type":"zero"}}"#,
            r#"{"n":1,"A":[1],"b":[0],"f":{"type":"affine","C":[1,2],"d":[0]}}"#,
            r#"{"n":1,"A":[1],"b":[0],"f":{"type":"cubic"}}"#,
            r#"{"n":0,"A":[],"b":[],"f":{"type":"zero"}}"#,
            r#"{"n":1,"A":[1],"b":[0],"f":{"type":"zero"},"planted":[1,2]}"#,
        ] {
            assert!(InstanceFile::parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn spec_echo_is_written() {
        let json = InstanceFile::from_planted(&planted()).unwrap().to_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["spec"]["rng"], "xoshiro256starstar-splitmix64");
        assert_eq!(value["spec"]["f_family"]["type"], "contractive_affine");
        assert_eq!(value["seed"], 5);
    }
}
