//! Partial transformations of `[n]` and the three monoid families.
//!
//! Maps compose left to right: `x(fg) = (xf)g`. Points are stored 1-based with
//! `0` marking an undefined entry, so the derived ordering is lexicographic over
//! entries with "undefined" smallest.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported ground-set size.
pub const MAX_N: usize = 16;

/// Entry value meaning "undefined".
pub const UNDEF: u8 = 0;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialMap {
    n: u8,
    e: [u8; MAX_N],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    PT,
    T,
    I,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::PT, Family::T, Family::I];

    pub fn epsilon(self) -> usize {
        match self {
            Family::T => 1,
            Family::PT | Family::I => 0,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Family::PT => "PT",
            Family::T => "T",
            Family::I => "I",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "PT" => Ok(Family::PT),
            "T" => Ok(Family::T),
            "I" => Ok(Family::I),
            other => Err(Error::Usage(format!("unknown family `{other}`"))),
        }
    }
}

impl PartialMap {
    /// Builds a map from 1-based entries, `None` meaning undefined.
    pub fn new(n: usize, entries: &[Option<usize>]) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::Usage(format!("n must lie in [1, {MAX_N}], got {n}")));
        }
        if entries.len() != n {
            return Err(Error::Usage(format!(
                "expected {n} entries, got {}",
                entries.len()
            )));
        }
        let mut e = [UNDEF; MAX_N];
        for (i, v) in entries.iter().enumerate() {
            if let Some(v) = *v {
                if v == 0 || v > n {
                    return Err(Error::Usage(format!("entry {v} outside [1, {n}]")));
                }
                e[i] = v as u8;
            }
        }
        Ok(PartialMap { n: n as u8, e })
    }

    /// Builds a map from raw 1-based entries with `0` for undefined.
    pub fn from_raw(n: usize, raw: &[u8]) -> Result<Self> {
        let v: Vec<Option<usize>> = raw
            .iter()
            .map(|&x| if x == UNDEF { None } else { Some(x as usize) })
            .collect();
        Self::new(n, &v)
    }

    /// Builds a map from `(point, value)` pairs, both 1-based.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut v = vec![None; n];
        for &(x, y) in pairs {
            if x == 0 || x > n {
                return Err(Error::Usage(format!("point {x} outside [1, {n}]")));
            }
            v[x - 1] = Some(y);
        }
        Self::new(n, &v)
    }

    pub fn identity(n: usize) -> Self {
        let mut e = [UNDEF; MAX_N];
        for (i, slot) in e.iter_mut().enumerate().take(n) {
            *slot = (i + 1) as u8;
        }
        PartialMap { n: n as u8, e }
    }

    /// Identity restricted to the given 1-based points.
    pub fn partial_identity(n: usize, points: impl IntoIterator<Item = usize>) -> Self {
        let mut e = [UNDEF; MAX_N];
        for p in points {
            e[p - 1] = p as u8;
        }
        PartialMap { n: n as u8, e }
    }

    pub fn empty(n: usize) -> Self {
        PartialMap {
            n: n as u8,
            e: [UNDEF; MAX_N],
        }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Image of the 1-based point `x`, if defined.
    pub fn at(&self, x: usize) -> Option<usize> {
        match self.e[x - 1] {
            UNDEF => None,
            v => Some(v as usize),
        }
    }

    pub fn raw(&self) -> &[u8] {
        &self.e[..self.n as usize]
    }

    pub fn entries(&self) -> Vec<Option<usize>> {
        (1..=self.n()).map(|x| self.at(x)).collect()
    }

    /// Returns a copy with `x` sent to `y` (or undefined for `None`).
    pub fn with(&self, x: usize, y: Option<usize>) -> Self {
        let mut out = *self;
        out.e[x - 1] = y.map_or(UNDEF, |v| v as u8);
        out
    }

    pub fn compose(&self, g: &PartialMap) -> Result<PartialMap> {
        if self.n != g.n {
            return Err(Error::Usage(format!(
                "cannot compose maps on [{}] and [{}]",
                self.n, g.n
            )));
        }
        Ok(self.then(g))
    }

    /// Composition without the size check.
    #[inline]
    pub fn then(&self, g: &PartialMap) -> PartialMap {
        let mut e = [UNDEF; MAX_N];
        for i in 0..self.n as usize {
            let v = self.e[i];
            if v != UNDEF {
                e[i] = g.e[v as usize - 1];
            }
        }
        PartialMap { n: self.n, e }
    }

    pub fn image_mask(&self) -> u32 {
        let mut m = 0u32;
        for &v in self.raw() {
            if v != UNDEF {
                m |= 1 << (v - 1);
            }
        }
        m
    }

    pub fn domain_mask(&self) -> u32 {
        let mut m = 0u32;
        for (i, &v) in self.raw().iter().enumerate() {
            if v != UNDEF {
                m |= 1 << i;
            }
        }
        m
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.image_mask().count_ones() as usize
    }

    pub fn image(&self) -> Vec<usize> {
        mask_points(self.image_mask())
    }

    pub fn domain(&self) -> Vec<usize> {
        mask_points(self.domain_mask())
    }

    /// Kernel classes ordered by their least element.
    pub fn kernel_classes(&self) -> Vec<Vec<usize>> {
        let mut classes: Vec<(u8, Vec<usize>)> = Vec::new();
        for x in 1..=self.n() {
            let v = self.e[x - 1];
            if v == UNDEF {
                continue;
            }
            match classes.iter_mut().find(|(w, _)| *w == v) {
                Some((_, c)) => c.push(x),
                None => classes.push((v, vec![x])),
            }
        }
        classes.into_iter().map(|(_, c)| c).collect()
    }

    /// Preimage of the 1-based point `y`.
    pub fn preimage(&self, y: usize) -> Vec<usize> {
        (1..=self.n()).filter(|&x| self.at(x) == Some(y)).collect()
    }

    /// Kernel as a labelling of the domain by class index, undefined points
    /// labelled `u8::MAX`.
    pub fn kernel_signature(&self) -> [u8; MAX_N] {
        let mut sig = [u8::MAX; MAX_N];
        let mut seen = [u8::MAX; MAX_N + 1];
        let mut next = 0u8;
        for i in 0..self.n() {
            let v = self.e[i];
            if v == UNDEF {
                continue;
            }
            if seen[v as usize] == u8::MAX {
                seen[v as usize] = next;
                next += 1;
            }
            sig[i] = seen[v as usize];
        }
        sig
    }

    pub fn is_total(&self) -> bool {
        self.raw().iter().all(|&v| v != UNDEF)
    }

    pub fn is_injective(&self) -> bool {
        let defined = self.raw().iter().filter(|&&v| v != UNDEF).count();
        defined == self.rank()
    }

    pub fn member(&self, fam: Family) -> bool {
        match fam {
            Family::PT => true,
            Family::T => self.is_total(),
            Family::I => self.is_injective(),
        }
    }

    /// Inverse of an injective map.
    pub fn inverse(&self) -> Option<PartialMap> {
        if !self.is_injective() {
            return None;
        }
        let mut e = [UNDEF; MAX_N];
        for (i, &v) in self.raw().iter().enumerate() {
            if v != UNDEF {
                e[v as usize - 1] = (i + 1) as u8;
            }
        }
        Some(PartialMap { n: self.n, e })
    }
}

pub fn compose(f: &PartialMap, g: &PartialMap) -> Result<PartialMap> {
    f.compose(g)
}

pub fn rank(f: &PartialMap) -> usize {
    f.rank()
}

pub fn member(f: &PartialMap, fam: Family) -> bool {
    f.member(fam)
}

pub(crate) fn mask_points(mask: u32) -> Vec<usize> {
    (0..32)
        .filter(|b| mask & (1 << b) != 0)
        .map(|b| b + 1)
        .collect()
}

/// Every element of the family on `[n]`, in canonical order.
pub fn all_maps(fam: Family, n: usize) -> Vec<PartialMap> {
    let base = n + 1;
    let total = base.pow(n as u32);
    let mut out = Vec::new();
    let mut raw = vec![0u8; n];
    for code in 0..total {
        let mut c = code;
        for i in (0..n).rev() {
            raw[i] = (c % base) as u8;
            c /= base;
        }
        let mut e = [UNDEF; MAX_N];
        e[..n].copy_from_slice(&raw);
        let f = PartialMap { n: n as u8, e };
        if f.member(fam) {
            out.push(f);
        }
    }
    out
}

/// The J-class of rank `r` of the family's monoid on `[n]`, canonically ordered.
pub fn all_of_rank(fam: Family, n: usize, r: usize) -> Result<Vec<PartialMap>> {
    if n == 0 || n > MAX_N {
        return Err(Error::Usage(format!("n must lie in [1, {MAX_N}], got {n}")));
    }
    if r < fam.epsilon() || r > n {
        return Err(Error::Range(format!(
            "rank {r} outside [{}, {n}] for family {fam}",
            fam.epsilon()
        )));
    }
    Ok(all_maps(fam, n)
        .into_iter()
        .filter(|f| f.rank() == r)
        .collect())
}

/// Product of a nonempty sequence of maps.
pub fn product<'a>(maps: impl IntoIterator<Item = &'a PartialMap>) -> Option<PartialMap> {
    let mut it = maps.into_iter();
    let first = *it.next()?;
    Some(it.fold(first, |acc, g| acc.then(g)))
}

/// All factorisations `s = s1 s2` with both factors in the family and of rank
/// in `[lo, hi]`, factors drawn from `candidates` for `s1`.
pub fn factorizations_in(
    s: &PartialMap,
    candidates: &[PartialMap],
    fam: Family,
    lo: usize,
    hi: usize,
) -> Vec<(PartialMap, PartialMap)> {
    #[derive(Clone, Copy, PartialEq)]
    enum Slot {
        Free,
        Val(u8),
        Undef,
    }
    let n = s.n();
    let mut out = Vec::new();
    'outer: for s1 in candidates {
        let mut slots = [Slot::Free; MAX_N];
        for x in 0..n {
            let (sx, s1x) = (s.e[x], s1.e[x]);
            if sx != UNDEF {
                if s1x == UNDEF {
                    continue 'outer;
                }
                match slots[s1x as usize - 1] {
                    Slot::Free => slots[s1x as usize - 1] = Slot::Val(sx),
                    Slot::Val(v) if v == sx => {}
                    _ => continue 'outer,
                }
            } else if s1x != UNDEF {
                match slots[s1x as usize - 1] {
                    Slot::Free | Slot::Undef => slots[s1x as usize - 1] = Slot::Undef,
                    Slot::Val(_) => continue 'outer,
                }
            }
        }
        let mut e = [UNDEF; MAX_N];
        let mut free = Vec::new();
        for y in 0..n {
            match slots[y] {
                Slot::Val(v) => e[y] = v,
                Slot::Undef => e[y] = UNDEF,
                Slot::Free => free.push(y),
            }
        }
        let base = n + 1;
        let total = base.pow(free.len() as u32);
        for code in 0..total {
            let mut c = code;
            for &y in &free {
                e[y] = (c % base) as u8;
                c /= base;
            }
            let s2 = PartialMap { n: n as u8, e };
            let r2 = s2.rank();
            if r2 >= lo && r2 <= hi && s2.member(fam) {
                out.push((*s1, s2));
            }
        }
    }
    out
}

/// All factorisations of `s` inside the family with factor ranks in `[lo, hi]`.
pub fn factorizations(
    s: &PartialMap,
    fam: Family,
    lo: usize,
    hi: usize,
) -> Vec<(PartialMap, PartialMap)> {
    let candidates: Vec<PartialMap> = all_maps(fam, s.n())
        .into_iter()
        .filter(|f| (lo..=hi).contains(&f.rank()))
        .collect();
    factorizations_in(s, &candidates, fam, lo, hi)
}

impl fmt::Debug for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, &v) in self.raw().iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if v == UNDEF {
                f.write_str("-")?;
            } else {
                write!(f, "{v}")?;
            }
        }
        f.write_str("]")
    }
}

#[derive(Serialize, Deserialize)]
struct MapJson {
    n: usize,
    entries: Vec<Option<usize>>,
}

impl Serialize for PartialMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MapJson {
            n: self.n(),
            entries: self.entries(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PartialMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MapJson::deserialize(d)?;
        PartialMap::new(j.n, &j.entries).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_is_left_to_right() {
        let f = PartialMap::from_pairs(3, &[(1, 2)]).unwrap();
        let g = PartialMap::from_pairs(3, &[(2, 3)]).unwrap();
        assert_eq!(f.then(&g), PartialMap::from_pairs(3, &[(1, 3)]).unwrap());
        assert_eq!(g.then(&f), PartialMap::empty(3));
    }

    #[test]
    fn undefined_sorts_first() {
        let a = PartialMap::new(2, &[None, Some(1)]).unwrap();
        let b = PartialMap::new(2, &[Some(1), None]).unwrap();
        assert!(a < b);
    }

    #[test]
    fn json_round_trip() {
        let f = PartialMap::new(4, &[Some(1), Some(2), None, Some(3)]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"n":4,"entries":[1,2,null,3]}"#);
        let g: PartialMap = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn rejects_out_of_range_entries() {
        assert!(PartialMap::new(2, &[Some(3), None]).is_err());
        assert!(serde_json::from_str::<PartialMap>(r#"{"n":2,"entries":[0,1]}"#).is_err());
    }
}
