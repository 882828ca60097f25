use std::collections::BTreeSet;

use super::Circuit;
use crate::error::{Error, Result};

/// Layers of gate indices with pairwise disjoint supports inside each layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layering {
    pub num_sites: usize,
    pub supports: Vec<Vec<usize>>,
    pub layers: Vec<Vec<usize>>,
}

impl Layering {
    /// Validates an explicit layering.
    pub fn from_layers(num_sites: usize, supports: Vec<Vec<usize>>, layers: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for layer in &layers {
            let mut used = BTreeSet::new();
            for &g in layer {
                let sup = supports.get(g).ok_or_else(|| Error::InvalidParameter(format!("gate index {g} out of range")))?;
                if !seen.insert(g) {
                    return Err(Error::InvalidParameter(format!("gate {g} appears twice")));
                }
                for &s in sup {
                    if s >= num_sites {
                        return Err(Error::SiteOutOfRange { site: s, len: num_sites });
                    }
                    if !used.insert(s) {
                        return Err(Error::InvalidParameter(format!("site {s} used twice in one layer")));
                    }
                }
            }
        }
        if seen.len() != supports.len() {
            return Err(Error::InvalidParameter("layering omits gates".into()));
        }
        Ok(Self { num_sites, supports, layers })
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layer_of(&self, gate: usize) -> Option<usize> {
        self.layers.iter().position(|l| l.contains(&gate))
    }
}

/// Greedy earliest-layer assignment: each gate goes one layer after the last
/// gate that touched any of its sites.
pub fn layerize(c: &Circuit) -> Layering {
    let mut last = vec![0usize; c.num_sites()];
    let mut layers: Vec<Vec<usize>> = Vec::new();
    for (g, gate) in c.gates.iter().enumerate() {
        let layer = gate.support.iter().map(|&s| last[s]).max().unwrap_or(0) + 1;
        for &s in &gate.support {
            last[s] = layer;
        }
        if layers.len() < layer {
            layers.resize(layer, Vec::new());
        }
        layers[layer - 1].push(g);
    }
    Layering { num_sites: c.num_sites(), supports: c.gates.iter().map(|g| g.support.clone()).collect(), layers }
}
