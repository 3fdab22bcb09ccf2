use std::path::Path;

use intensio::document::{CountermodelDoc, ModelDoc, NeighborhoodDoc, SigmaFrameDoc};
use intensio::duality::SigmaFrame;
use intensio::neighborhood::{rel_to_nbhd, NeighborhoodModel};
use intensio::relational::RelationalModel;
use serde_json::Value;

use crate::Failure;

pub enum Loaded {
    Relational(RelationalModel),
    Neighborhood(NeighborhoodModel),
    /// A countermodel document, possibly unwrapped from a search report.
    Countermodel {
        model: RelationalModel,
        formula: String,
        world: String,
    },
    Sigma(SigmaFrame),
}

impl Loaded {
    pub fn kind(&self) -> &'static str {
        match self {
            Loaded::Relational(_) => "relational model",
            Loaded::Neighborhood(_) => "neighborhood model",
            Loaded::Countermodel { .. } => "countermodel",
            Loaded::Sigma(_) => "two-sorted frame",
        }
    }

    pub fn relational(self) -> Result<RelationalModel, Failure> {
        match self {
            Loaded::Relational(m) | Loaded::Countermodel { model: m, .. } => Ok(m),
            other => Err(Failure::Invalid(format!("expected a relational model, got a {}", other.kind()))),
        }
    }

    pub fn neighborhood(self) -> Result<NeighborhoodModel, Failure> {
        match self {
            Loaded::Neighborhood(m) => Ok(m),
            Loaded::Relational(m) | Loaded::Countermodel { model: m, .. } => Ok(rel_to_nbhd(&m)),
            Loaded::Sigma(_) => Err(Failure::Invalid("expected a model, got a two-sorted frame".into())),
        }
    }
}

fn invalid(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Invalid(format!("{}: {e}", path.display()))
}

fn decode<T: serde::de::DeserializeOwned>(path: &Path, v: Value) -> Result<T, Failure> {
    serde_json::from_value(v).map_err(|e| invalid(path, e))
}

/// Neighborhood documents list sets of worlds where model documents list
/// relation names.
fn looks_like_neighborhoods(v: &Value) -> bool {
    v.get("groups")
        .and_then(Value::as_object)
        .into_iter()
        .flat_map(|gs| gs.values())
        .filter_map(Value::as_object)
        .flat_map(|ws| ws.values())
        .filter_map(Value::as_array)
        .flatten()
        .any(Value::is_array)
}

pub fn load(path: &Path) -> Result<Loaded, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(path, e))?;
    let mut v: Value = serde_json::from_str(&text).map_err(|e| invalid(path, e))?;
    if let Some(c) = v.get_mut("countermodel") {
        if c.is_null() {
            return Err(invalid(path, "the search report holds no countermodel"));
        }
        v = c.take();
    }
    if v.get("model").is_some() {
        let doc: CountermodelDoc = decode(path, v)?;
        let model = doc.model.to_model().map_err(|e| invalid(path, e))?;
        return Ok(Loaded::Countermodel {
            model,
            formula: doc.formula,
            world: doc.world,
        });
    }
    if v.get("atoms").is_some() {
        let doc: SigmaFrameDoc = decode(path, v)?;
        return Ok(Loaded::Sigma(doc.to_frame().map_err(|e| invalid(path, e))?));
    }
    if looks_like_neighborhoods(&v) {
        let doc: NeighborhoodDoc = decode(path, v)?;
        return Ok(Loaded::Neighborhood(doc.to_model().map_err(|e| invalid(path, e))?));
    }
    let doc: ModelDoc = decode(path, v)?;
    Ok(Loaded::Relational(doc.to_model().map_err(|e| invalid(path, e))?))
}
