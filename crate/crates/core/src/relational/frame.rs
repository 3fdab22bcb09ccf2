use std::collections::{BTreeMap, BTreeSet};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::theories::Theory;
use crate::worldset::{WorldSet, MAX_WORLDS};

/// A set of relation ids.
pub type RelSet = BTreeSet<usize>;

/// A group intension: the extent (a set of relation ids) at every world.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Intension(pub Vec<RelSet>);

impl Intension {
    pub fn empty(world_count: usize) -> Self {
        Intension(vec![RelSet::new(); world_count])
    }

    /// The same extent at every world.
    pub fn constant(world_count: usize, extent: RelSet) -> Self {
        Intension(vec![extent; world_count])
    }

    pub fn extent(&self, w: usize) -> &RelSet {
        &self.0[w]
    }

    pub fn world_count(&self) -> usize {
        self.0.len()
    }
}

/// Table of agent relations, each given by its image at every world.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relations {
    world_count: usize,
    images: Vec<Vec<WorldSet>>,
}

impl Relations {
    pub fn new(world_count: usize) -> Self {
        Relations {
            world_count,
            images: Vec::new(),
        }
    }

    pub fn from_images(world_count: usize, images: Vec<Vec<WorldSet>>) -> Result<Self> {
        let mut rels = Relations::new(world_count);
        for r in images {
            rels.check_relation(&r)?;
            rels.images.push(r);
        }
        Ok(rels)
    }

    fn check_relation(&self, r: &[WorldSet]) -> Result<()> {
        if r.len() != self.world_count || r.iter().any(|s| !s.within(self.world_count)) {
            return Err(Error::InvalidModel(
                "relation image refers to a world outside the frame".into(),
            ));
        }
        Ok(())
    }

    pub fn world_count(&self) -> usize {
        self.world_count
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn image(&self, r: usize, w: usize) -> WorldSet {
        self.images[r][w]
    }

    pub fn relation(&self, r: usize) -> &[WorldSet] {
        &self.images[r]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[WorldSet]> {
        self.images.iter().map(Vec::as_slice)
    }

    pub fn find(&self, r: &[WorldSet]) -> Option<usize> {
        self.images.iter().position(|q| q.as_slice() == r)
    }

    /// Id of a relation with exactly these images, appending it if absent.
    pub fn materialize(&mut self, r: Vec<WorldSet>, caps: &Caps) -> Result<usize> {
        if let Some(id) = self.find(&r) {
            return Ok(id);
        }
        if self.images.len() >= caps.relations {
            return Err(Error::cap("relation", self.images.len() as u128 + 1, caps.relations as u128));
        }
        debug_assert!(self.check_relation(&r).is_ok());
        self.images.push(r);
        Ok(self.images.len() - 1)
    }

    pub fn identity(&self) -> Vec<WorldSet> {
        (0..self.world_count).map(WorldSet::singleton).collect()
    }

    pub fn is_reflexive(&self, r: usize) -> bool {
        (0..self.world_count).all(|w| self.images[r][w].contains(w))
    }

    /// The family of images `{r(w) | r ∈ f(w)}`.
    pub fn images_of(&self, f: &Intension, w: usize) -> BTreeSet<WorldSet> {
        f.0[w].iter().map(|&r| self.images[r][w]).collect()
    }

    pub fn all_ids(&self) -> RelSet {
        (0..self.images.len()).collect()
    }
}

/// A finite relational frame: worlds, agent relations, and the theory whose
/// operations interpret group terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationalFrame {
    pub theory: Theory,
    pub labels: Vec<String>,
    pub relation_names: Vec<String>,
    pub relations: Relations,
}

impl RelationalFrame {
    pub fn new(theory: Theory, labels: Vec<String>, relation_names: Vec<String>, relations: Relations) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidModel("a frame needs at least one world".into()));
        }
        if n > MAX_WORLDS {
            return Err(Error::InvalidModel(format!("at most {MAX_WORLDS} worlds are supported")));
        }
        if relations.world_count() != n {
            return Err(Error::InvalidModel("relation table has the wrong world count".into()));
        }
        if relation_names.len() != relations.len() {
            return Err(Error::InvalidModel("every relation needs exactly one name".into()));
        }
        let frame = RelationalFrame {
            theory,
            labels,
            relation_names,
            relations,
        };
        if let Some(problem) = theory.frame_violation(&frame.relations) {
            return Err(Error::InvalidModel(problem));
        }
        Ok(frame)
    }

    /// Frame with worlds `w0..` and relations `r0..`.
    pub fn unlabeled(theory: Theory, relations: Relations) -> Result<Self> {
        let labels = (0..relations.world_count()).map(|w| format!("w{w}")).collect();
        let names = (0..relations.len()).map(|r| format!("r{r}")).collect();
        RelationalFrame::new(theory, labels, names, relations)
    }

    pub fn world_count(&self) -> usize {
        self.labels.len()
    }

    pub fn full(&self) -> WorldSet {
        WorldSet::full(self.world_count())
    }

    pub fn world_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relation_names.iter().position(|l| l == name)
    }

    pub fn render_worlds(&self, s: WorldSet) -> String {
        let names: Vec<&str> = s.iter().map(|w| self.labels[w].as_str()).collect();
        format!("{{{}}}", names.join(", "))
    }
}

/// A frame together with proposition and group valuations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationalModel {
    pub frame: RelationalFrame,
    pub prop_val: BTreeMap<String, WorldSet>,
    pub group_val: BTreeMap<String, Intension>,
}

impl RelationalModel {
    pub fn new(
        frame: RelationalFrame,
        prop_val: BTreeMap<String, WorldSet>,
        group_val: BTreeMap<String, Intension>,
    ) -> Result<Self> {
        let n = frame.world_count();
        for (p, s) in &prop_val {
            if !s.within(n) {
                return Err(Error::InvalidModel(format!("proposition '{p}' names a world outside the frame")));
            }
        }
        for (g, f) in &group_val {
            if f.world_count() != n {
                return Err(Error::InvalidModel(format!("group '{g}' has the wrong number of worlds")));
            }
            if f.0.iter().flatten().any(|&r| r >= frame.relations.len()) {
                return Err(Error::InvalidModel(format!("group '{g}' refers to an unknown relation")));
            }
        }
        Ok(RelationalModel {
            frame,
            prop_val,
            group_val,
        })
    }

    pub fn world_count(&self) -> usize {
        self.frame.world_count()
    }

    pub fn theory(&self) -> Theory {
        self.frame.theory
    }
}
