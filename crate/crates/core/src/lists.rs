//! Colour classes, list assignments and the λ-assignment test.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::lambda::Lambda;

/// Colours are opaque non-negative integers; class membership is always explicit.
pub type Color = u32;
pub type ColorSet = BTreeSet<Color>;

/// Hands out fresh colours in increasing order so constructions are reproducible.
#[derive(Clone, Debug, Default)]
pub struct Palette {
    next: Color,
}

impl Palette {
    pub fn starting_at(next: Color) -> Self {
        Palette { next }
    }

    pub fn fresh(&mut self) -> Color {
        let c = self.next;
        self.next += 1;
        c
    }

    pub fn fresh_n(&mut self, k: usize) -> Vec<Color> {
        (0..k).map(|_| self.fresh()).collect()
    }

    pub fn peek(&self) -> Color {
        self.next
    }
}

/// Ordered tuple of disjoint colour sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct ColourClasses {
    pub classes: Vec<ColorSet>,
}

impl ColourClasses {
    pub fn new(classes: Vec<ColorSet>) -> Self {
        ColourClasses { classes }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// First colour found in two classes, as `(i, j, colour)`.
    pub fn overlap(&self) -> Option<(usize, usize, Color)> {
        for i in 0..self.classes.len() {
            for j in i + 1..self.classes.len() {
                if let Some(&c) = self.classes[i].intersection(&self.classes[j]).next() {
                    return Some((i, j, c));
                }
            }
        }
        None
    }

    pub fn class_of(&self, c: Color) -> Option<usize> {
        self.classes.iter().position(|s| s.contains(&c))
    }
}

/// One colour list per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct ListAssignment {
    pub lists: Vec<ColorSet>,
}

impl ListAssignment {
    pub fn new(lists: Vec<ColorSet>) -> Self {
        ListAssignment { lists }
    }

    pub fn uniform(n: usize, list: &ColorSet) -> Self {
        ListAssignment {
            lists: vec![list.clone(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn get(&self, v: Vertex) -> &ColorSet {
        &self.lists[v]
    }

    pub fn universe(&self) -> ColorSet {
        self.lists.iter().flatten().copied().collect()
    }

    /// Fails unless there is exactly one list per vertex of `g`, all nonempty.
    pub fn check_carrier(&self, g: &Graph) -> Result<()> {
        if self.lists.len() != g.n() {
            return Err(Error::invalid(format!(
                "list assignment covers {} vertices, graph has {}",
                self.lists.len(),
                g.n()
            )));
        }
        if let Some(v) = self.lists.iter().position(|l| l.is_empty()) {
            return Err(Error::invalid(format!("vertex {v} has an empty list")));
        }
        Ok(())
    }
}

/// JSON form `{"classes": [[..]..], "lists": [[..] per vertex]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListsFile {
    #[serde(default)]
    pub classes: ColourClasses,
    pub lists: ListAssignment,
}

/// First reason a list assignment is not a (λ, C)-assignment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    ClassCount { classes: usize, parts: usize },
    ClassesOverlap { first: usize, second: usize, color: Color },
    Quota { vertex: Vertex, class: usize, have: usize, need: u32 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::ClassCount { classes, parts } => {
                write!(f, "{classes} colour classes for {parts} parts")
            }
            Violation::ClassesOverlap { first, second, color } => {
                write!(f, "classes {first} and {second} share colour {color}")
            }
            Violation::Quota { vertex, class, have, need } => write!(
                f,
                "vertex {vertex} has {have} colours of class {class}, needs {need}"
            ),
        }
    }
}

/// Checks that the classes are disjoint and that they can be matched to the parts of
/// `lam` so every vertex meets every quota.
///
/// Classes are matched to parts by capacity (the least number of class colours any
/// vertex has); sorting both sides descending gives an optimal matching.
pub fn is_valid_assignment(
    g: &Graph,
    l: &ListAssignment,
    lam: &Lambda,
    c: &ColourClasses,
) -> Result<std::result::Result<(), Violation>> {
    if l.len() != g.n() {
        return Err(Error::invalid(format!(
            "list assignment covers {} vertices, graph has {}",
            l.len(),
            g.n()
        )));
    }
    if c.len() != lam.len() {
        return Ok(Err(Violation::ClassCount {
            classes: c.len(),
            parts: lam.len(),
        }));
    }
    if let Some((first, second, color)) = c.overlap() {
        return Ok(Err(Violation::ClassesOverlap { first, second, color }));
    }
    // (capacity, class, vertex attaining it)
    let mut caps: Vec<(usize, usize, Vertex)> = c
        .classes
        .iter()
        .enumerate()
        .map(|(i, class)| {
            let (v, have) = l
                .lists
                .iter()
                .enumerate()
                .map(|(v, list)| (v, list.intersection(class).count()))
                .min_by_key(|&(v, have)| (have, v))
                .unwrap_or((0, usize::MAX));
            (have, i, v)
        })
        .collect();
    caps.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for (&(have, class, vertex), &need) in caps.iter().zip(lam.parts()) {
        if have < need as usize {
            return Ok(Err(Violation::Quota { vertex, class, have, need }));
        }
    }
    Ok(Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse_lambda;

    fn set(xs: &[Color]) -> ColorSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn singleton_classes_match_colourability() {
        let g = Graph::complete(3);
        let lam = parse_lambda("1*3").unwrap();
        let c = ColourClasses::new(vec![set(&[0]), set(&[1]), set(&[2])]);
        let l = ListAssignment::uniform(3, &set(&[0, 1, 2]));
        assert_eq!(is_valid_assignment(&g, &l, &lam, &c).unwrap(), Ok(()));
    }

    #[test]
    fn quota_violation_names_vertex_and_class() {
        let g = Graph::complete(3);
        let lam = parse_lambda("1,2").unwrap();
        let c = ColourClasses::new(vec![set(&[0]), set(&[5, 6, 7])]);
        let mut l = ListAssignment::uniform(3, &set(&[0, 5, 6]));
        l.lists[2].remove(&0);
        assert_eq!(
            is_valid_assignment(&g, &l, &lam, &c).unwrap(),
            Err(Violation::Quota { vertex: 2, class: 0, have: 0, need: 1 })
        );
    }

    #[test]
    fn overlapping_classes_rejected() {
        let g = Graph::complete(2);
        let lam = parse_lambda("1,1").unwrap();
        let c = ColourClasses::new(vec![set(&[0, 1]), set(&[1])]);
        let l = ListAssignment::uniform(2, &set(&[0, 1]));
        assert!(matches!(
            is_valid_assignment(&g, &l, &lam, &c).unwrap(),
            Err(Violation::ClassesOverlap { color: 1, .. })
        ));
    }

    #[test]
    fn missing_vertex_is_invalid_input() {
        let g = Graph::complete(3);
        let lam = parse_lambda("1").unwrap();
        let c = ColourClasses::new(vec![set(&[0])]);
        let l = ListAssignment::uniform(2, &set(&[0]));
        assert!(is_valid_assignment(&g, &l, &lam, &c).is_err());
    }
}
