//! J-classes, ideals `I_m` and Green's L and R relations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transform::{all_maps, Family, PartialMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IdealSpec {
    pub fam: Family,
    pub n: usize,
    pub m: usize,
}

impl IdealSpec {
    pub fn new(fam: Family, n: usize, m: usize) -> Result<Self> {
        if n == 0 || n > crate::transform::MAX_N {
            return Err(Error::Usage(format!(
                "n must be positive and small, got {n}"
            )));
        }
        if m < fam.epsilon() || m > n {
            return Err(Error::Range(format!(
                "m = {m} outside [{}, {n}] for family {fam}",
                fam.epsilon()
            )));
        }
        Ok(IdealSpec { fam, n, m })
    }

    pub fn epsilon(&self) -> usize {
        self.fam.epsilon()
    }

    pub fn contains(&self, f: &PartialMap) -> bool {
        f.n() == self.n && f.member(self.fam) && f.rank() <= self.m
    }
}

impl std::fmt::Display for IdealSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.fam, self.n, self.m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JClass {
    pub rank: usize,
    pub count: usize,
    pub elements: Vec<PartialMap>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JChain {
    pub classes: Vec<JClass>,
}

impl JChain {
    pub fn len(&self) -> usize {
        self.classes.iter().map(|c| c.count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn class(&self, r: usize) -> Option<&JClass> {
        self.classes.iter().find(|c| c.rank == r)
    }

    pub fn elements(&self) -> impl Iterator<Item = &PartialMap> {
        self.classes.iter().flat_map(|c| c.elements.iter())
    }
}

pub fn ideal_elements(spec: &IdealSpec) -> JChain {
    let all = all_maps(spec.fam, spec.n);
    let classes = (spec.epsilon()..=spec.m)
        .map(|r| {
            let elements: Vec<PartialMap> = all.iter().filter(|f| f.rank() == r).copied().collect();
            JClass {
                rank: r,
                count: elements.len(),
                elements,
            }
        })
        .collect();
    JChain { classes }
}

pub fn depth_of_class(spec: &IdealSpec, r: usize) -> Result<usize> {
    if r < spec.epsilon() || r > spec.m {
        return Err(Error::Range(format!(
            "rank {r} outside [{}, {}]",
            spec.epsilon(),
            spec.m
        )));
    }
    Ok(spec.m - r + 1)
}

pub fn l_related(f: &PartialMap, g: &PartialMap) -> bool {
    f.n() == g.n() && f.image_mask() == g.image_mask()
}

/// Equal kernels: equal domains and the same partition of the domain.
pub fn r_related(f: &PartialMap, g: &PartialMap) -> bool {
    f.n() == g.n()
        && f.domain_mask() == g.domain_mask()
        && f.kernel_signature() == g.kernel_signature()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_needs_equal_domains() {
        let f = PartialMap::from_pairs(2, &[(1, 1)]).unwrap();
        let g = PartialMap::from_pairs(2, &[(2, 1)]).unwrap();
        assert!(l_related(&f, &g));
        assert!(!r_related(&f, &g));
    }
}
