//! Declarative set description, mirrored 1:1 by the set-spec JSON files.

use serde::{Deserialize, Serialize};

/// Constructor kind of a [`SetSpec`] node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SetKind {
    Points,
    Subspace,
    Sphere,
    AxisBox,
    #[serde(rename = "IFS")]
    Ifs,
    ReciprocalSequence,
    Union,
    Product,
    Translate,
    Tile,
}

/// One similarity map `x ↦ ratio·x + offset` of an iterated function system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IfsMap {
    pub ratio: f64,
    pub offset: Vec<f64>,
}

/// Kind-specific parameters. Only the fields relevant to the node's kind are read.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SetParams {
    /// `Points`: explicit point list.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    /// `Subspace`: dimension of the subspace.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Ambient dimension (`Subspace`; padding target for `IFS` and `ReciprocalSequence`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// `Subspace`: coordinate axes spanning it (default `0..m`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// `AxisBox` corners; `lower == upper` on an axis gives a flat box (a segment, a square, ...).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub maps: Option<Vec<IfsMap>>,
    /// `IFS`: requested sampling mesh; the address depth is the smallest reaching it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mesh: Option<f64>,
    /// `Tile`: translation period.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<Vec<f64>>,
    /// `Translate`: shift vector.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<Vec<f64>>,
    /// Root only: explicit window `[lower, upper]` used by grid operations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<[Vec<f64>; 2]>,
    /// Root only: known Hausdorff dimension (metadata, never estimated).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hausdorff_dim: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetSpec {
    pub kind: SetKind,
    #[serde(default)]
    pub params: SetParams,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<SetSpec>,
}

impl SetSpec {
    fn leaf(kind: SetKind, params: SetParams) -> Self {
        Self { kind, params, children: Vec::new() }
    }

    pub fn points(points: Vec<Vec<f64>>) -> Self {
        Self::leaf(SetKind::Points, SetParams { points: Some(points), ..Default::default() })
    }

    /// The span of the first `m` coordinate axes of ℝⁿ.
    pub fn subspace(m: usize, n: usize) -> Self {
        Self::leaf(SetKind::Subspace, SetParams { m: Some(m), n: Some(n), ..Default::default() })
    }

    /// The span of the given coordinate axes of ℝⁿ.
    pub fn subspace_axes(axes: Vec<usize>, n: usize) -> Self {
        Self::leaf(
            SetKind::Subspace,
            SetParams { m: Some(axes.len()), n: Some(n), axes: Some(axes), ..Default::default() },
        )
    }

    pub fn sphere(center: Vec<f64>, radius: f64) -> Self {
        Self::leaf(SetKind::Sphere, SetParams { center: Some(center), radius: Some(radius), ..Default::default() })
    }

    pub fn axis_box(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        Self::leaf(SetKind::AxisBox, SetParams { lower: Some(lower), upper: Some(upper), ..Default::default() })
    }

    pub fn ifs(maps: Vec<(f64, Vec<f64>)>) -> Self {
        Self::leaf(
            SetKind::Ifs,
            SetParams {
                maps: Some(maps.into_iter().map(|(ratio, offset)| IfsMap { ratio, offset }).collect()),
                ..Default::default()
            },
        )
    }

    /// Middle-thirds Cantor set in `[0,1]`.
    pub fn cantor() -> Self {
        Self::ifs(vec![(1.0 / 3.0, vec![0.0]), (1.0 / 3.0, vec![2.0 / 3.0])])
    }

    /// `{1/j : j ∈ ℕ} ∪ {0}` on the first axis.
    pub fn reciprocal() -> Self {
        Self::leaf(SetKind::ReciprocalSequence, SetParams::default())
    }

    pub fn union(children: Vec<SetSpec>) -> Self {
        Self { kind: SetKind::Union, params: SetParams::default(), children }
    }

    pub fn product(children: Vec<SetSpec>) -> Self {
        Self { kind: SetKind::Product, params: SetParams::default(), children }
    }

    pub fn translate(child: SetSpec, offset: Vec<f64>) -> Self {
        Self {
            kind: SetKind::Translate,
            params: SetParams { offset: Some(offset), ..Default::default() },
            children: vec![child],
        }
    }

    pub fn tile(child: SetSpec, period: Vec<f64>) -> Self {
        Self {
            kind: SetKind::Tile,
            params: SetParams { period: Some(period), ..Default::default() },
            children: vec![child],
        }
    }

    /// Sets the ambient padding dimension (`IFS`, `ReciprocalSequence`).
    pub fn in_dim(mut self, n: usize) -> Self {
        self.params.n = Some(n);
        self
    }

    pub fn with_window(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        self.params.window = Some([lower, upper]);
        self
    }

    pub fn with_hausdorff_dim(mut self, d: f64) -> Self {
        self.params.hausdorff_dim = Some(d);
        self
    }

    pub fn from_json(text: &str) -> crate::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("set spec serializes")
    }
}
