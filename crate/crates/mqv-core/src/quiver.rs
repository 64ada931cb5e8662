//! Quivers, doubles, orientation signs, and total orders on doubled arrows.
//!
//! The total order is part of the data: the pointwise value of the
//! multiplicative moment map depends on it, and order independence only
//! holds up to isomorphism. Arrow ids are stable strings so JSON round trips
//! preserve the order; the reversed copy of arrow `a` is written `a~`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// A plain arrow of the base quiver.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub id: String,
    /// Index of the outgoing (tail) vertex.
    pub out_v: usize,
    /// Index of the incoming (head) vertex.
    pub in_v: usize,
}

/// A finite quiver with named, ordered vertices. Parallel arrows and loops
/// are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn new(vertices: Vec<String>, arrows: Vec<(String, String, String)>) -> Result<Self> {
        let mut q = Quiver { vertices, arrows: Vec::new() };
        for (id, out_name, in_name) in arrows {
            let out_v = q.vertex_index(&out_name)?;
            let in_v = q.vertex_index(&in_name)?;
            if id.ends_with('~') {
                return Err(CoreError::ContractViolation(format!(
                    "arrow id `{id}` may not end with `~` (reserved for reversed arrows)"
                )));
            }
            q.arrows.push(Arrow { id, out_v, in_v });
        }
        let mut ids: Vec<&str> = q.arrows.iter().map(|a| a.id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != q.arrows.len() {
            return Err(CoreError::ContractViolation("duplicate arrow ids".into()));
        }
        Ok(q)
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| CoreError::UnknownVertex(name.to_string()))
    }

    pub fn arrow_index(&self, id: &str) -> Result<usize> {
        self.arrows
            .iter()
            .position(|a| a.id == id)
            .ok_or_else(|| CoreError::UnknownArrow(id.to_string()))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }
}

/// A doubled arrow: a base arrow taken forward or reversed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ArrowRef {
    pub arrow: usize,
    pub reversed: bool,
}

impl ArrowRef {
    pub fn forward(arrow: usize) -> Self {
        Self { arrow, reversed: false }
    }

    pub fn reverse(self) -> Self {
        Self { arrow: self.arrow, reversed: !self.reversed }
    }

    /// Orientation sign: +1 on original arrows, -1 on reversed ones.
    pub fn epsilon(self) -> i64 {
        if self.reversed { -1 } else { 1 }
    }
}

/// The double of a quiver together with a total order on the doubled arrows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubledQuiver {
    pub base: Quiver,
    /// Total order on H, earliest first.
    pub order: Vec<ArrowRef>,
}

impl DoubledQuiver {
    /// Head vertex of a doubled arrow.
    pub fn head(&self, h: ArrowRef) -> usize {
        let a = &self.base.arrows[h.arrow];
        if h.reversed { a.out_v } else { a.in_v }
    }

    /// Tail vertex of a doubled arrow.
    pub fn tail(&self, h: ArrowRef) -> usize {
        let a = &self.base.arrows[h.arrow];
        if h.reversed { a.in_v } else { a.out_v }
    }

    pub fn is_loop(&self, h: ArrowRef) -> bool {
        let a = &self.base.arrows[h.arrow];
        a.out_v == a.in_v
    }

    pub fn has_loop_at(&self, vertex: usize) -> bool {
        self.base.arrows.iter().any(|a| a.out_v == vertex && a.in_v == vertex)
    }

    pub fn has_loops(&self) -> bool {
        self.base.arrows.iter().any(|a| a.out_v == a.in_v)
    }

    /// Doubled arrows with head `vertex`, in the total order.
    pub fn incoming(&self, vertex: usize) -> Vec<ArrowRef> {
        self.order.iter().copied().filter(|&h| self.head(h) == vertex).collect()
    }

    /// True when every original arrow precedes every reversed one; the
    /// default order has this property and the phi+/phi- split requires it.
    pub fn is_omega_first(&self) -> bool {
        let first_reversed = self.order.iter().position(|h| h.reversed);
        match first_reversed {
            None => true,
            Some(k) => self.order[k..].iter().all(|h| h.reversed),
        }
    }

    /// The same property restricted to the arrows with head `vertex`, which
    /// is all the sigma/tau presentation at that vertex needs.
    pub fn is_omega_first_at(&self, vertex: usize) -> bool {
        let incoming = self.incoming(vertex);
        let first_reversed = incoming.iter().position(|h| h.reversed);
        match first_reversed {
            None => true,
            Some(k) => incoming[k..].iter().all(|h| h.reversed),
        }
    }

    pub fn arrow_name(&self, h: ArrowRef) -> String {
        let base = &self.base.arrows[h.arrow].id;
        if h.reversed { format!("{base}~") } else { base.clone() }
    }

    pub fn parse_arrow_name(&self, name: &str) -> Result<ArrowRef> {
        if let Some(stripped) = name.strip_suffix('~') {
            Ok(ArrowRef { arrow: self.base.arrow_index(stripped)?, reversed: true })
        } else {
            Ok(ArrowRef::forward(self.base.arrow_index(name)?))
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.base.vertex_count()
    }
}

/// Doubles a quiver. The default order lists all original arrows first
/// (in base order), then all reversed arrows.
pub fn double(base: Quiver, order: Option<Vec<ArrowRef>>) -> Result<DoubledQuiver> {
    let n = base.arrows.len();
    let order = match order {
        None => {
            let mut o: Vec<ArrowRef> = (0..n).map(ArrowRef::forward).collect();
            o.extend((0..n).map(|a| ArrowRef { arrow: a, reversed: true }));
            o
        }
        Some(o) => {
            let mut seen = vec![[false; 2]; n];
            if o.len() != 2 * n {
                return Err(CoreError::ContractViolation(
                    "order must list every doubled arrow exactly once".into(),
                ));
            }
            for h in &o {
                if h.arrow >= n || seen[h.arrow][h.reversed as usize] {
                    return Err(CoreError::ContractViolation(
                        "order is not a total order on the doubled arrows".into(),
                    ));
                }
                seen[h.arrow][h.reversed as usize] = true;
            }
            o
        }
    };
    Ok(DoubledQuiver { base, order })
}

/// A star-shaped quiver: central vertex `0`, arm vertices `i.j`, arrows
/// pointing toward the center.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarQuiver {
    pub quiver: Quiver,
    pub arm_lengths: Vec<usize>,
}

impl StarQuiver {
    pub fn center(&self) -> usize {
        0
    }

    /// Vertex `[i, j]` with arms indexed from 1 and 1 <= j <= l_i.
    pub fn arm_vertex(&self, arm: usize, j: usize) -> Result<usize> {
        self.quiver.vertex_index(&format!("{arm}.{j}"))
    }

    /// The arrow `a_{i,j} : [i, j+1] -> [i, j]` (with `[i, 0]` the center).
    pub fn arm_arrow(&self, arm: usize, j: usize) -> Result<usize> {
        self.quiver.arrow_index(&format!("a{arm}.{j}"))
    }

    pub fn arm_count(&self) -> usize {
        self.arm_lengths.len()
    }
}

/// Builds the star quiver with the given arm lengths. Arm `i` is the chain
/// `[i, l_i] -> ... -> [i, 1] -> 0`. A length-0 arm contributes no vertices
/// (its puncture carries a trivial flag).
pub fn build_star(arm_lengths: &[usize]) -> Result<StarQuiver> {
    if arm_lengths.is_empty() {
        return Err(CoreError::ContractViolation("a star needs at least one arm".into()));
    }
    let mut vertices = vec!["0".to_string()];
    for (i, &l) in arm_lengths.iter().enumerate() {
        for j in 1..=l {
            vertices.push(format!("{}.{}", i + 1, j));
        }
    }
    let mut arrows = Vec::new();
    for (i, &l) in arm_lengths.iter().enumerate() {
        let arm = i + 1;
        if l == 0 {
            continue;
        }
        arrows.push((format!("a{arm}.0"), format!("{arm}.1"), "0".to_string()));
        for j in 1..l {
            arrows.push((format!("a{arm}.{j}"), format!("{arm}.{}", j + 1), format!("{arm}.{j}")));
        }
    }
    let quiver = Quiver::new(vertices, arrows)?;
    Ok(StarQuiver { quiver, arm_lengths: arm_lengths.to_vec() })
}

/// JSON schema for quivers:
/// `{ "vertices": [...], "arrows": [{"id","out","in"}], "order": ["a", "a~", ...] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuiverJson {
    pub vertices: Vec<String>,
    pub arrows: Vec<ArrowJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArrowJson {
    pub id: String,
    pub out: String,
    #[serde(rename = "in")]
    pub in_: String,
}

impl DoubledQuiver {
    pub fn to_json(&self) -> QuiverJson {
        QuiverJson {
            vertices: self.base.vertices.clone(),
            arrows: self
                .base
                .arrows
                .iter()
                .map(|a| ArrowJson {
                    id: a.id.clone(),
                    out: self.base.vertices[a.out_v].clone(),
                    in_: self.base.vertices[a.in_v].clone(),
                })
                .collect(),
            order: Some(self.order.iter().map(|&h| self.arrow_name(h)).collect()),
        }
    }

    pub fn from_json(j: &QuiverJson) -> Result<Self> {
        let base = Quiver::new(
            j.vertices.clone(),
            j.arrows.iter().map(|a| (a.id.clone(), a.out.clone(), a.in_.clone())).collect(),
        )?;
        let dq = double(base, None)?;
        match &j.order {
            None => Ok(dq),
            Some(names) => {
                let refs = names
                    .iter()
                    .map(|n| dq.parse_arrow_name(n))
                    .collect::<Result<Vec<_>>>()?;
                double(dq.base, Some(refs))
            }
        }
    }
}

/// Map from vertex names to values, used by several JSON payloads.
pub fn vertex_map_from_json<T: Clone>(
    dq: &DoubledQuiver,
    map: &BTreeMap<String, T>,
) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(dq.vertex_count());
    for name in &dq.base.vertices {
        let v = map
            .get(name)
            .ok_or_else(|| CoreError::ContractViolation(format!("missing vertex `{name}` in map")))?;
        out.push(v.clone());
    }
    if map.len() != dq.vertex_count() {
        return Err(CoreError::ContractViolation("map mentions unknown vertices".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn a2() -> DoubledQuiver {
        let q = Quiver::new(
            vec!["1".into(), "2".into()],
            vec![("h".into(), "1".into(), "2".into())],
        )
        .unwrap();
        double(q, None).unwrap()
    }

    #[test]
    fn a2_double_has_two_arrows_with_opposite_signs() {
        let dq = a2();
        assert_eq!(dq.order.len(), 2);
        assert_eq!(dq.order[0].epsilon(), 1);
        assert_eq!(dq.order[1].epsilon(), -1);
        assert_eq!(dq.head(dq.order[0]), 1);
        assert_eq!(dq.head(dq.order[1]), 0);
        assert!(dq.is_omega_first());
    }

    #[test]
    fn jordan_quiver_double_has_two_loops() {
        let q = Quiver::new(vec!["v".into()], vec![("l".into(), "v".into(), "v".into())]).unwrap();
        let dq = double(q, None).unwrap();
        let at_v = dq.incoming(0);
        assert_eq!(at_v.len(), 2);
        assert_eq!(at_v[0].epsilon() + at_v[1].epsilon(), 0);
        assert!(dq.has_loop_at(0));
    }

    #[test]
    fn empty_arrow_set_doubles_to_empty() {
        let q = Quiver::new(vec!["x".into()], vec![]).unwrap();
        let dq = double(q, None).unwrap();
        assert!(dq.order.is_empty());
        assert!(dq.incoming(0).is_empty());
    }

    #[test]
    fn epsilon_sums_to_zero() {
        let dq = a2();
        let total: i64 = dq.order.iter().map(|h| h.epsilon()).sum();
        assert_eq!(total, 0);
    }

    #[test]
    fn bad_explicit_order_is_rejected() {
        let q = Quiver::new(
            vec!["1".into(), "2".into()],
            vec![("h".into(), "1".into(), "2".into())],
        )
        .unwrap();
        let bad = vec![ArrowRef::forward(0), ArrowRef::forward(0)];
        assert!(double(q, Some(bad)).is_err());
    }

    #[test]
    fn star_shapes() {
        let d4 = build_star(&[1, 1, 1]).unwrap();
        assert_eq!(d4.quiver.vertex_count(), 4);
        assert_eq!(d4.quiver.arrows.len(), 3);

        let a2 = build_star(&[1]).unwrap();
        assert_eq!(a2.quiver.vertex_count(), 2);

        let a5 = build_star(&[2, 2]).unwrap();
        assert_eq!(a5.quiver.vertex_count(), 5);
        // Chain through the center: 1.2 -> 1.1 -> 0 <- 2.1 <- 2.2.
        let a = d4.arm_arrow(1, 0).unwrap();
        assert_eq!(d4.quiver.arrows[a].in_v, 0);

        assert!(build_star(&[]).is_err());
        // A zero-length arm is legal: the puncture has a trivial flag.
        let trivial = build_star(&[0]).unwrap();
        assert_eq!(trivial.quiver.vertex_count(), 1);
        assert!(trivial.quiver.arrows.is_empty());
    }

    #[test]
    fn json_round_trip_preserves_order() {
        let dq = a2();
        let j = dq.to_json();
        let back = DoubledQuiver::from_json(&j).unwrap();
        assert_eq!(dq, back);
        // A custom order also survives.
        let custom = double(
            dq.base.clone(),
            Some(vec![ArrowRef { arrow: 0, reversed: true }, ArrowRef::forward(0)]),
        )
        .unwrap();
        let back = DoubledQuiver::from_json(&custom.to_json()).unwrap();
        assert_eq!(custom, back);
        assert!(!back.is_omega_first());
    }

    #[test]
    fn double_of_reversed_base_negates_epsilon() {
        // Reversing every base arrow and re-doubling yields the same doubled
        // arrow set with epsilon negated.
        let dq = a2();
        let reversed_base = Quiver::new(
            vec!["1".into(), "2".into()],
            vec![("h".into(), "2".into(), "1".into())],
        )
        .unwrap();
        let rdq = double(reversed_base, None).unwrap();
        // Same heads/tails as a set: forward arrow of rdq matches reversed of dq.
        assert_eq!(rdq.head(ArrowRef::forward(0)), dq.head(ArrowRef { arrow: 0, reversed: true }));
        assert_eq!(
            ArrowRef::forward(0).epsilon(),
            -(ArrowRef { arrow: 0, reversed: true }).epsilon()
        );
    }
}
