//! JSON documents for models, neighborhood models, two-sorted frames and
//! countermodel reports.
//!
//! Worlds, relations and group elements are referred to by name. Worlds or
//! relations missing from a map have the empty image or extent.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::duality::SigmaFrame;
use crate::error::{Error, Result};
use crate::neighborhood::{NeighborhoodModel, Neighborhoods};
use crate::relational::{Intension, RelSet, RelationalFrame, RelationalModel, Relations};
use crate::search::CountermodelReport;
use crate::syntax::render_formula;
use crate::theories::{Family, Theory};
use crate::worldset::WorldSet;

type WorldMap<T> = BTreeMap<String, T>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub signature: String,
    pub worlds: Vec<String>,
    #[serde(default)]
    pub relations: BTreeMap<String, WorldMap<Vec<String>>>,
    #[serde(default)]
    pub groups: BTreeMap<String, WorldMap<Vec<String>>>,
    #[serde(default)]
    pub props: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeighborhoodDoc {
    pub signature: String,
    pub worlds: Vec<String>,
    #[serde(default)]
    pub groups: BTreeMap<String, WorldMap<Vec<Vec<String>>>>,
    #[serde(default)]
    pub props: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaFrameDoc {
    pub signature: String,
    pub atoms: usize,
    pub group_elements: Vec<String>,
    /// Operator symbol to table, indexed `Σ args[i]·m^i` by element position.
    #[serde(default)]
    pub ops: BTreeMap<String, Vec<usize>>,
    /// `box[a][i]`: atoms of `[a]x` where `x` holds the atoms set in `i`.
    #[serde(rename = "box")]
    pub boxes: Vec<Vec<Vec<usize>>>,
    pub dia: Vec<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceLine {
    pub formula: String,
    pub worlds: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountermodelDoc {
    pub formula: String,
    pub world: String,
    pub model: ModelDoc,
    pub trace: Vec<TraceLine>,
}

fn theory_of(signature: &str) -> Result<Theory> {
    signature
        .parse()
        .map_err(|_| Error::Document(format!("unknown signature '{signature}'")))
}

fn index_of(labels: &[String]) -> Result<HashMap<&str, usize>> {
    let mut index = HashMap::new();
    for (i, l) in labels.iter().enumerate() {
        if index.insert(l.as_str(), i).is_some() {
            return Err(Error::Document(format!("duplicate name '{l}'")));
        }
    }
    Ok(index)
}

fn lookup(index: &HashMap<&str, usize>, name: &str, what: &str) -> Result<usize> {
    index
        .get(name)
        .copied()
        .ok_or_else(|| Error::Document(format!("unknown {what} '{name}'")))
}

fn world_set(index: &HashMap<&str, usize>, names: &[String]) -> Result<WorldSet> {
    names.iter().map(|n| lookup(index, n, "world")).collect()
}

fn names_of(labels: &[String], s: WorldSet) -> Vec<String> {
    s.iter().map(|w| labels[w].clone()).collect()
}

fn props_from(index: &HashMap<&str, usize>, props: &BTreeMap<String, Vec<String>>) -> Result<BTreeMap<String, WorldSet>> {
    props
        .iter()
        .map(|(p, ws)| Ok((p.clone(), world_set(index, ws)?)))
        .collect()
}

fn props_to(labels: &[String], props: &BTreeMap<String, WorldSet>) -> BTreeMap<String, Vec<String>> {
    props.iter().map(|(p, s)| (p.clone(), names_of(labels, *s))).collect()
}

impl ModelDoc {
    pub fn from_model(m: &RelationalModel) -> ModelDoc {
        let fr = &m.frame;
        let labels = &fr.labels;
        let relations = (0..fr.relations.len())
            .map(|r| {
                let images = (0..fr.world_count())
                    .filter(|&w| !fr.relations.image(r, w).is_empty())
                    .map(|w| (labels[w].clone(), names_of(labels, fr.relations.image(r, w))))
                    .collect();
                (fr.relation_names[r].clone(), images)
            })
            .collect();
        let groups = m
            .group_val
            .iter()
            .map(|(g, f)| {
                let ext = f
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| !e.is_empty())
                    .map(|(w, e)| (labels[w].clone(), e.iter().map(|&r| fr.relation_names[r].clone()).collect()))
                    .collect();
                (g.clone(), ext)
            })
            .collect();
        ModelDoc {
            signature: fr.theory.name().into(),
            worlds: labels.clone(),
            relations,
            groups,
            props: props_to(labels, &m.prop_val),
        }
    }

    pub fn to_model(&self) -> Result<RelationalModel> {
        let theory = theory_of(&self.signature)?;
        let n = self.worlds.len();
        let windex = index_of(&self.worlds)?;
        let names: Vec<String> = self.relations.keys().cloned().collect();
        let rindex = index_of(&names)?;
        let mut images = Vec::with_capacity(names.len());
        for r in self.relations.values() {
            let mut img = vec![WorldSet::EMPTY; n];
            for (w, targets) in r {
                img[lookup(&windex, w, "world")?] = world_set(&windex, targets)?;
            }
            images.push(img);
        }
        let rels = Relations::from_images(n, images)?;
        let frame = RelationalFrame::new(theory, self.worlds.clone(), names.clone(), rels)?;
        let mut group_val = BTreeMap::new();
        for (g, ext) in &self.groups {
            let mut f = vec![RelSet::new(); n];
            for (w, rs) in ext {
                let w = lookup(&windex, w, "world")?;
                for r in rs {
                    f[w].insert(lookup(&rindex, r, "relation")?);
                }
            }
            group_val.insert(g.clone(), Intension(f));
        }
        RelationalModel::new(frame, props_from(&windex, &self.props)?, group_val)
    }
}

impl NeighborhoodDoc {
    pub fn from_model(m: &NeighborhoodModel) -> NeighborhoodDoc {
        let labels = &m.labels;
        let groups = m
            .group_val
            .iter()
            .map(|(g, nu)| {
                let per_world = nu
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, fam)| !fam.is_empty())
                    .map(|(w, fam)| (labels[w].clone(), fam.iter().map(|&x| names_of(labels, x)).collect()))
                    .collect();
                (g.clone(), per_world)
            })
            .collect();
        NeighborhoodDoc {
            signature: m.theory.name().into(),
            worlds: labels.clone(),
            groups,
            props: props_to(labels, &m.prop_val),
        }
    }

    pub fn to_model(&self) -> Result<NeighborhoodModel> {
        let theory = theory_of(&self.signature)?;
        let n = self.worlds.len();
        let windex = index_of(&self.worlds)?;
        let mut group_val = BTreeMap::new();
        for (g, per_world) in &self.groups {
            let mut nu = vec![Family::new(); n];
            for (w, fam) in per_world {
                let w = lookup(&windex, w, "world")?;
                for x in fam {
                    nu[w].insert(world_set(&windex, x)?);
                }
            }
            group_val.insert(g.clone(), Neighborhoods(nu));
        }
        NeighborhoodModel::new(theory, self.worlds.clone(), group_val, props_from(&windex, &self.props)?)
    }
}

fn atoms_of(x: u64) -> Vec<usize> {
    (0..64).filter(|i| x >> i & 1 == 1).collect()
}

impl SigmaFrameDoc {
    pub fn from_frame(sf: &SigmaFrame) -> SigmaFrameDoc {
        let size = sf.props.size();
        let rows = |v: &[u64]| {
            v.chunks(size)
                .map(|row| row.iter().map(|&x| atoms_of(x)).collect())
                .collect()
        };
        SigmaFrameDoc {
            signature: sf.theory.name().into(),
            atoms: sf.props.atoms,
            group_elements: sf.group_elements.clone(),
            ops: sf.ops.iter().map(|(op, t)| (op.symbol().to_string(), t.clone())).collect(),
            boxes: rows(&sf.boxes),
            dia: rows(&sf.dias),
        }
    }

    pub fn to_frame(&self) -> Result<SigmaFrame> {
        let theory = theory_of(&self.signature)?;
        let sig = theory.signature();
        let mut ops = BTreeMap::new();
        for (symbol, table) in &self.ops {
            let op = sig
                .lookup(symbol)
                .ok_or_else(|| Error::Document(format!("operator '{symbol}' is not in signature {sig}")))?;
            ops.insert(op, table.clone());
        }
        let atoms = self.atoms;
        let flat = |rows: &[Vec<Vec<usize>>], what: &str| -> Result<Vec<u64>> {
            if rows.len() != self.group_elements.len() {
                return Err(Error::Document(format!("'{what}' needs one row per group element")));
            }
            let mut out = Vec::new();
            for row in rows {
                for x in row {
                    let mut mask = 0u64;
                    for &i in x {
                        if i >= atoms {
                            return Err(Error::Document(format!("'{what}' mentions atom {i} of {atoms}")));
                        }
                        mask |= 1 << i;
                    }
                    out.push(mask);
                }
            }
            Ok(out)
        };
        SigmaFrame::new(
            theory,
            atoms,
            self.group_elements.clone(),
            ops,
            flat(&self.boxes, "box")?,
            flat(&self.dia, "dia")?,
        )
    }
}

impl CountermodelDoc {
    pub fn from_report(r: &CountermodelReport) -> CountermodelDoc {
        let labels = &r.model.frame.labels;
        CountermodelDoc {
            formula: render_formula(&r.formula),
            world: labels[r.world].clone(),
            model: ModelDoc::from_model(&r.model),
            trace: r
                .trace
                .iter()
                .map(|(f, s)| TraceLine {
                    formula: render_formula(f),
                    worlds: names_of(labels, *s),
                })
                .collect(),
        }
    }
}

pub fn model_from_json(text: &str) -> Result<RelationalModel> {
    serde_json::from_str::<ModelDoc>(text)?.to_model()
}

pub fn model_to_json(m: &RelationalModel) -> String {
    serde_json::to_string_pretty(&ModelDoc::from_model(m)).expect("documents serialize")
}

pub fn neighborhood_from_json(text: &str) -> Result<NeighborhoodModel> {
    serde_json::from_str::<NeighborhoodDoc>(text)?.to_model()
}

pub fn neighborhood_to_json(m: &NeighborhoodModel) -> String {
    serde_json::to_string_pretty(&NeighborhoodDoc::from_model(m)).expect("documents serialize")
}

pub fn sigma_frame_from_json(text: &str) -> Result<SigmaFrame> {
    serde_json::from_str::<SigmaFrameDoc>(text)?.to_frame()
}

pub fn sigma_frame_to_json(sf: &SigmaFrame) -> String {
    serde_json::to_string_pretty(&SigmaFrameDoc::from_frame(sf)).expect("documents serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Op;

    const SMALL: &str = r#"{
        "signature": "sl",
        "worlds": ["w", "v"],
        "relations": {"r": {"w": ["v"]}, "s": {}},
        "groups": {"a": {"w": ["r", "s"]}},
        "props": {"p": ["v"]}
    }"#;

    #[test]
    fn model_round_trip() {
        let m = model_from_json(SMALL).unwrap();
        assert_eq!(m.frame.relations.len(), 2);
        assert_eq!(m.group_val["a"].0[0].len(), 2);
        assert_eq!(model_from_json(&model_to_json(&m)).unwrap(), m);
    }

    #[test]
    fn bad_documents() {
        let unknown = SMALL.replace(r#""p": ["v"]"#, r#""p": ["u"]"#);
        assert!(matches!(model_from_json(&unknown), Err(Error::Document(_))));
        let sig = SMALL.replace(r#""sl""#, r#""lattice""#);
        assert!(matches!(model_from_json(&sig), Err(Error::Document(_))));
        assert!(matches!(model_from_json("{"), Err(Error::Json(_))));
        let extra = SMALL.replace(r#""signature""#, r#""colour": 1, "signature""#);
        assert!(model_from_json(&extra).is_err());
        let refl = SMALL.replace(r#""sl""#, r#""csl""#);
        assert!(matches!(model_from_json(&refl), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn neighborhood_round_trip() {
        let text = r#"{"signature": "empty", "worlds": ["x", "y"],
            "groups": {"a": {"x": [["x"], ["y"], []]}}, "props": {"p": ["x"]}}"#;
        let m = neighborhood_from_json(text).unwrap();
        assert_eq!(m.group_val["a"].0[0].len(), 3);
        assert_eq!(neighborhood_from_json(&neighborhood_to_json(&m)).unwrap(), m);
    }

    #[test]
    fn sigma_frame_round_trip() {
        let text = r#"{"signature": "empty", "atoms": 1, "group_elements": ["a"],
            "box": [[[0], [0]]], "dia": [[[], [0]]]}"#;
        let sf = sigma_frame_from_json(text).unwrap();
        assert_eq!(sf.dia(0, 1), 1);
        let again = sigma_frame_from_json(&sigma_frame_to_json(&sf)).unwrap();
        assert_eq!(again.boxes, sf.boxes);
        let short = text.replace("[[[0], [0]]]", "[]");
        assert!(sigma_frame_from_json(&short).is_err());
        assert!(sigma_frame_from_json(&text.replace("[[], [0]]", "[[], [1]]")).is_err());
        let sl = r#"{"signature": "sl", "atoms": 1, "group_elements": ["z"],
            "ops": {"+": [0], "0": [0]}, "box": [[[0], [0]]], "dia": [[[], []]]}"#;
        let sf = sigma_frame_from_json(sl).unwrap();
        assert_eq!(sf.ops.keys().copied().collect::<Vec<_>>(), vec![Op::Zero, Op::Plus]);
        assert!(sigma_frame_to_json(&sf).contains("\"+\""));
    }
}
