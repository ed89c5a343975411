use std::path::Path;

use crate::{BayesNet, BnnError, Result};

/// Serializes `Vec<f64>` with 17 significant digits so parsing restores every bit.
pub mod f17_vec {
    use serde::de::Error as _;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};
    use serde_json::value::RawValue;

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            if !x.is_finite() {
                return Err(serde::ser::Error::custom(format!("non-finite value {x}")));
            }
            let raw = RawValue::from_string(format!("{x:.16e}")).map_err(serde::ser::Error::custom)?;
            seq.serialize_element(&raw)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(D::Error::custom("non-finite value"));
        }
        Ok(v)
    }
}

const FORMAT: &str = "rfsurrogate-bnn 1";

#[derive(serde::Serialize, serde::Deserialize)]
struct Envelope<T> {
    format: String,
    net: T,
}

impl BayesNet {
    pub fn to_json(&self) -> Result<String> {
        let env = Envelope {
            format: FORMAT.to_string(),
            net: self,
        };
        serde_json::to_string_pretty(&env).map_err(|e| BnnError::Checkpoint(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let env: Envelope<BayesNet> = serde_json::from_str(text).map_err(|e| BnnError::Checkpoint(e.to_string()))?;
        if env.format != FORMAT {
            return Err(BnnError::Checkpoint(format!("unknown checkpoint format {:?}", env.format)));
        }
        let net = env.net;
        net.config.validate()?;
        net.check_shapes()?;
        Ok(net)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| BnnError::Checkpoint(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BnnError::Checkpoint(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}
