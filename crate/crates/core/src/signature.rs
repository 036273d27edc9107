//! Dependency signatures: the subset of uncertain-input axes a value depends on.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Maximum number of uncertain inputs a graph may declare.
pub const MAX_AXES: usize = 64;

/// An ordered subset of the uncertain-input axes `{0, .., d-1}`.
///
/// Stored as a bit set; iteration is always in ascending axis order, which is
/// also the canonical axis order of tensors carrying this signature.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DependencySignature(u64);

impl DependencySignature {
    pub const EMPTY: Self = Self(0);

    pub fn single(axis: usize) -> Self {
        assert!(axis < MAX_AXES, "axis {axis} exceeds the {MAX_AXES}-axis limit");
        Self(1 << axis)
    }

    /// Signature containing every axis in `0..d`.
    pub fn full(d: usize) -> Self {
        assert!(d <= MAX_AXES, "{d} axes exceeds the {MAX_AXES}-axis limit");
        if d == MAX_AXES {
            Self(u64::MAX)
        } else {
            Self((1u64 << d) - 1)
        }
    }

    pub fn from_axes<I: IntoIterator<Item = usize>>(axes: I) -> Self {
        axes.into_iter()
            .fold(Self::EMPTY, |acc, a| acc.union(Self::single(a)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, axis: usize) -> bool {
        axis < MAX_AXES && self.0 & (1 << axis) != 0
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_strict_subset_of(self, other: Self) -> bool {
        self.is_subset_of(other) && self != other
    }

    /// Axes in ascending order.
    pub fn axes(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..MAX_AXES).filter(move |a| bits & (1 << a) != 0)
    }

    /// Number of distinct points in this signature's subspace.
    pub fn point_count(self, axis_sizes: &[usize]) -> usize {
        self.axes().map(|a| axis_sizes[a]).product()
    }

    /// Renders as `{u1,u3}` using one-based axis labels.
    pub fn label(self) -> String {
        let parts: Vec<String> = self.axes().map(|a| format!("u{}", a + 1)).collect();
        format!("{{{}}}", parts.join(","))
    }

    /// Renders with the axis names of a graph, e.g. `{M,S}`.
    pub fn label_with(self, names: &[&str]) -> String {
        let parts: Vec<&str> = self.axes().map(|a| names[a]).collect();
        format!("{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for DependencySignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let axes: Vec<usize> = self.axes().collect();
        write!(f, "Sig{axes:?}")
    }
}

impl fmt::Display for DependencySignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for DependencySignature {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.axes())
    }
}

impl<'de> Deserialize<'de> for DependencySignature {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let axes = Vec::<usize>::deserialize(deserializer)?;
        if let Some(bad) = axes.iter().find(|&&a| a >= MAX_AXES) {
            return Err(serde::de::Error::custom(format!("axis {bad} out of range")));
        }
        Ok(Self::from_axes(axes))
    }
}
