use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Model, ModelError};
use crate::scalar::Scalar;

pub const FORMAT_NAME: &str = "floodcast-model";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize)]
struct EnvelopeOut<'a, F: Scalar> {
    format: &'static str,
    version: u32,
    scalar: &'static str,
    model: &'a Model<F>,
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "F: Scalar"))]
struct EnvelopeIn<F> {
    format: String,
    version: u32,
    scalar: String,
    model: Model<F>,
}

fn persist_err(path: &Path, reason: impl ToString) -> ModelError {
    ModelError::Persist {
        path: path.display().to_string(),
        reason: reason.to_string(),
    }
}

pub fn model_to_json<F: Scalar>(model: &Model<F>) -> String {
    let env = EnvelopeOut {
        format: FORMAT_NAME,
        version: FORMAT_VERSION,
        scalar: F::NAME,
        model,
    };
    serde_json::to_string(&env).expect("models serialize")
}

pub fn model_from_json<F: Scalar>(text: &str) -> Result<Model<F>, String> {
    let env: EnvelopeIn<F> = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if env.format != FORMAT_NAME {
        return Err(format!("not a {FORMAT_NAME} file (format {:?})", env.format));
    }
    if env.version != FORMAT_VERSION {
        return Err(format!("unsupported version {}", env.version));
    }
    if env.scalar != F::NAME {
        return Err(format!("stored scalar {} but {} requested", env.scalar, F::NAME));
    }
    Ok(env.model)
}

/// Writes a self-describing JSON document. Floats use shortest round-trip
/// formatting, so a reloaded model scores bit-for-bit identically.
pub fn save_model<F: Scalar>(model: &Model<F>, path: impl AsRef<Path>) -> Result<(), ModelError> {
    let path = path.as_ref();
    fs::write(path, model_to_json(model)).map_err(|e| persist_err(path, e))
}

pub fn load_model<F: Scalar>(path: impl AsRef<Path>) -> Result<Model<F>, ModelError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| persist_err(path, e))?;
    model_from_json(&text).map_err(|e| persist_err(path, e))
}

#[cfg(test)]
mod tests {
    use rand::Rng;

    use super::*;
    use crate::models::{fit_forest, fit_gbdt, fit_mlp, Classifier, ForestParams, GbdtParams, Matrix, MlpParams};
    use crate::seed;

    fn data<F: Scalar>() -> (Matrix<F>, Vec<u8>) {
        let mut rng = seed::rng(21);
        let rows: Vec<Vec<F>> = (0..80)
            .map(|_| (0..3).map(|_| F::lit(rng.random_range(-2.0..2.0))).collect())
            .collect();
        let y = rows
            .iter()
            .map(|r| u8::from(r[0].as_f64() + r[2].as_f64() > 0.3))
            .collect();
        (Matrix::from_vecs(&rows), y)
    }

    fn round_trip<F: Scalar>() {
        let (x, y) = data::<F>();
        let models = [
            Model::Forest(
                fit_forest(
                    &x,
                    &y,
                    &ForestParams {
                        n_trees: 5,
                        ..Default::default()
                    },
                    1,
                )
                .unwrap(),
            ),
            Model::Gbdt(
                fit_gbdt(
                    &x,
                    &y,
                    &GbdtParams {
                        n_rounds: 10,
                        ..Default::default()
                    },
                    1,
                )
                .unwrap(),
            ),
            Model::Mlp(
                fit_mlp(
                    &x,
                    &y,
                    &MlpParams {
                        hidden: vec![4],
                        epochs: 3,
                        ..Default::default()
                    },
                    1,
                )
                .unwrap(),
            ),
        ];
        let dir = tempfile::tempdir().unwrap();
        for (i, m) in models.iter().enumerate() {
            let p = dir.path().join(format!("m{i}.json"));
            save_model(m, &p).unwrap();
            let back: Model<F> = load_model(&p).unwrap();
            assert_eq!(&back, m);
            for r in x.rows() {
                assert_eq!(
                    back.score(r).unwrap().as_f64().to_bits(),
                    m.score(r).unwrap().as_f64().to_bits()
                );
            }
        }
    }

    #[test]
    fn round_trip_is_bitwise_f64() {
        round_trip::<f64>();
    }

    #[test]
    fn round_trip_is_bitwise_f32() {
        round_trip::<f32>();
    }

    #[test]
    fn rejects_wrong_scalar_and_version() {
        let (x, y) = data::<f64>();
        let m = Model::Gbdt(
            fit_gbdt(
                &x,
                &y,
                &GbdtParams {
                    n_rounds: 1,
                    ..Default::default()
                },
                0,
            )
            .unwrap(),
        );
        let text = model_to_json(&m);
        assert!(model_from_json::<f32>(&text).unwrap_err().contains("scalar"));
        let bumped = text.replacen("\"version\":1", "\"version\":99", 1);
        assert!(model_from_json::<f64>(&bumped).unwrap_err().contains("version"));
        assert!(model_from_json::<f64>("{}").is_err());
    }
}
