//! Weighted graph data model `G = (V, E, m, ω)`.
//!
//! Vertices are reindexed densely (`0..n`) in sorted label order at
//! construction; every other module works with these indices. Graphs are
//! immutable once built and validated: symmetric positive edge weights,
//! positive vertex measure, connected.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper bound on the number of vertices a graph may have.
pub const DEFAULT_VERTEX_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Normalized,
    Combinatorial,
    Custom,
}

/// How the vertex measure `m` is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasurePolicy {
    /// `m(x) = Deg(x) = Σ_y ω(x, y)`.
    Normalized,
    /// `m(x) = 1`.
    Combinatorial,
    /// Explicit values, indexed like the builder's vertex insertion order.
    Custom(Vec<f64>),
}

impl MeasurePolicy {
    pub fn kind(&self) -> MeasureKind {
        match self {
            MeasurePolicy::Normalized => MeasureKind::Normalized,
            MeasurePolicy::Combinatorial => MeasureKind::Combinatorial,
            MeasurePolicy::Custom(_) => MeasureKind::Custom,
        }
    }

    pub fn parse(name: &str) -> Result<MeasurePolicy> {
        match name {
            "normalized" => Ok(MeasurePolicy::Normalized),
            "combinatorial" => Ok(MeasurePolicy::Combinatorial),
            other => Err(Error::InvalidParameter(format!(
                "unknown measure `{other}` (expected normalized or combinatorial)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    labels: Vec<String>,
    measure: Vec<f64>,
    degree: Vec<f64>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    kind: MeasureKind,
}

impl WeightedGraph {
    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn m(&self, x: usize) -> f64 {
        self.measure[x]
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    /// Weighted degree `Deg(x) = Σ_y ω(x, y)`.
    pub fn deg(&self, x: usize) -> f64 {
        self.degree[x]
    }

    pub fn measure_kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .binary_search_by(|l| l.as_str().cmp(label))
            .map_err(|_| Error::UnknownVertex(label.to_string()))
    }

    /// Neighbours of `x` with their edge weights, sorted by index.
    pub fn neighbors(&self, x: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[x]..self.offsets[x + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub fn neighbor_count(&self, x: usize) -> usize {
        self.offsets[x + 1] - self.offsets[x]
    }

    /// `ω(x, y)`, zero when the vertices are not adjacent.
    pub fn weight(&self, x: usize, y: usize) -> f64 {
        let range = self.offsets[x]..self.offsets[x + 1];
        match self.targets[range.clone()].binary_search(&y) {
            Ok(i) => self.weights[range.start + i],
            Err(_) => 0.0,
        }
    }

    /// Undirected edges `(x, y, ω)` with `x < y`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.num_vertices())
            .flat_map(move |x| self.neighbors(x).map(move |(y, w)| (x, y, w)))
            .filter(|&(x, y, _)| x < y)
    }

    pub fn check_vertex(&self, x: usize) -> Result<()> {
        if x < self.num_vertices() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(x.to_string()))
        }
    }

    /// Same topology and weights with a new vertex measure.
    pub fn with_measure(&self, measure: Vec<f64>) -> Result<WeightedGraph> {
        if measure.len() != self.num_vertices() {
            return Err(Error::InvalidParameter(format!(
                "measure has {} entries, graph has {} vertices",
                measure.len(),
                self.num_vertices()
            )));
        }
        check_measure(&self.labels, &measure)?;
        Ok(WeightedGraph {
            measure,
            kind: MeasureKind::Custom,
            ..self.clone()
        })
    }

    /// Multiplies every edge weight by `edge_factor` and every vertex
    /// measure by `measure_factor`.
    pub fn rescaled(&self, edge_factor: f64, measure_factor: f64) -> Result<WeightedGraph> {
        if !(edge_factor > 0.0 && measure_factor > 0.0) {
            return Err(Error::InvalidParameter(
                "scale factors must be positive".into(),
            ));
        }
        let kind = if edge_factor == measure_factor {
            self.kind
        } else {
            MeasureKind::Custom
        };
        Ok(WeightedGraph {
            measure: self.measure.iter().map(|m| m * measure_factor).collect(),
            degree: self.degree.iter().map(|d| d * edge_factor).collect(),
            weights: self.weights.iter().map(|w| w * edge_factor).collect(),
            kind,
            ..self.clone()
        })
    }

    pub fn max_degree_ratio(&self) -> f64 {
        (0..self.num_vertices())
            .map(|x| self.deg(x) / self.m(x))
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("graph document serializes")
    }

    pub fn to_doc(&self) -> GraphDoc {
        let custom = self.kind == MeasureKind::Custom;
        GraphDoc {
            vertices: self
                .labels
                .iter()
                .zip(&self.measure)
                .map(|(id, &m)| VertexDoc {
                    id: id.clone(),
                    m: custom.then_some(m),
                })
                .collect(),
            edges: self
                .edges()
                .map(|(x, y, w)| EdgeDoc {
                    u: self.labels[x].clone(),
                    v: self.labels[y].clone(),
                    w,
                })
                .collect(),
            measure: self.kind,
        }
    }

    /// Parses and validates a graph document; the measure named in the
    /// document is used.
    pub fn from_json(text: &str) -> Result<WeightedGraph> {
        let doc: GraphDoc = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        doc.into_graph(None)
    }

    /// Like [`WeightedGraph::from_json`] but overrides the document's measure.
    pub fn from_json_with(text: &str, measure: MeasureKind) -> Result<WeightedGraph> {
        let doc: GraphDoc = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        doc.into_graph(Some(measure))
    }

    /// Stable content digest (hex SHA-256 prefix of the canonical document).
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let bytes = serde_json::to_vec(&self.to_doc_with_measure()).expect("serializes");
        let hash = Sha256::digest(&bytes);
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    fn to_doc_with_measure(&self) -> GraphDoc {
        let mut doc = self.to_doc();
        for (v, &m) in doc.vertices.iter_mut().zip(&self.measure) {
            v.m = Some(m);
        }
        doc
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VertexDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub u: String,
    pub v: String,
    pub w: f64,
}

/// On-disk graph document.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
    pub measure: MeasureKind,
}

impl GraphDoc {
    pub fn into_graph(self, measure: Option<MeasureKind>) -> Result<WeightedGraph> {
        let kind = measure.unwrap_or(self.measure);
        let mut builder = GraphBuilder::new();
        let mut custom = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            if let Some(m) = v.m {
                if !m.is_finite() {
                    return Err(Error::Schema(format!(
                        "vertex {} has non-finite measure",
                        v.id
                    )));
                }
            }
            if kind == MeasureKind::Custom {
                custom.push(v.m.ok_or_else(|| {
                    Error::Schema(format!(
                        "measure is custom but vertex {} has no \"m\"",
                        v.id
                    ))
                })?);
            }
            builder.add_vertex(&v.id)?;
        }
        for e in self.edges {
            builder.add_edge(&e.u, &e.v, e.w)?;
        }
        let policy = match kind {
            MeasureKind::Normalized => MeasurePolicy::Normalized,
            MeasureKind::Combinatorial => MeasurePolicy::Combinatorial,
            MeasureKind::Custom => MeasurePolicy::Custom(custom),
        };
        builder.build(policy)
    }
}

/// Collects labelled vertices and undirected edges, then validates and
/// reindexes them into a [`WeightedGraph`].
#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    edges: BTreeMap<(usize, usize), f64>,
    cap: Option<usize>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_cap(cap: usize) -> Self {
        GraphBuilder {
            cap: Some(cap),
            ..Self::default()
        }
    }

    fn cap(&self) -> usize {
        self.cap.unwrap_or(DEFAULT_VERTEX_CAP)
    }

    /// Adds a vertex and returns its insertion index.
    pub fn add_vertex(&mut self, label: &str) -> Result<usize> {
        if self.index.contains_key(label) {
            return Err(Error::Schema(format!("duplicate vertex id {label}")));
        }
        if self.labels.len() >= self.cap() {
            return Err(Error::SizeCapExceeded {
                requested: self.labels.len() + 1,
                cap: self.cap(),
            });
        }
        let i = self.labels.len();
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), i);
        Ok(i)
    }

    /// Adds the undirected edge `{u, v}`. Listing both orientations is
    /// accepted only with bit-identical weights; repeating one orientation
    /// is an error. Zero weights mean "no edge" and are skipped.
    pub fn add_edge(&mut self, u: &str, v: &str, w: f64) -> Result<()> {
        let iu = *self
            .index
            .get(u)
            .ok_or_else(|| Error::Schema(format!("edge refers to unknown vertex {u}")))?;
        let iv = *self
            .index
            .get(v)
            .ok_or_else(|| Error::Schema(format!("edge refers to unknown vertex {v}")))?;
        self.add_edge_indices(iu, iv, w)
    }

    pub fn add_edge_indices(&mut self, iu: usize, iv: usize, w: f64) -> Result<()> {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::Schema(format!(
                "edge {}-{} has invalid weight {w}",
                self.labels[iu], self.labels[iv]
            )));
        }
        if iu == iv {
            return Err(Error::Schema(format!("self-loop at {}", self.labels[iu])));
        }
        if w == 0.0 {
            return Ok(());
        }
        if self.edges.contains_key(&(iu, iv)) {
            return Err(Error::Schema(format!(
                "duplicate edge {}-{}",
                self.labels[iu], self.labels[iv]
            )));
        }
        if let Some(&reverse) = self.edges.get(&(iv, iu)) {
            if reverse != w {
                return Err(Error::Asymmetry {
                    u: self.labels[iu].clone(),
                    v: self.labels[iv].clone(),
                    w_uv: w,
                    w_vu: reverse,
                });
            }
        }
        self.edges.insert((iu, iv), w);
        Ok(())
    }

    pub fn build(self, policy: MeasurePolicy) -> Result<WeightedGraph> {
        let n = self.labels.len();
        if n == 0 {
            return Err(Error::Schema("graph has no vertices".into()));
        }
        // sorted-label reindexing
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.labels[a].cmp(&self.labels[b]));
        let mut new_index = vec![0usize; n];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let labels: Vec<String> = order.iter().map(|&i| self.labels[i].clone()).collect();

        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (&(a, b), &w) in &self.edges {
            let (x, y) = (new_index[a], new_index[b]);
            if self.edges.contains_key(&(b, a)) && a > b {
                // both orientations listed; keep the one with a < b
                continue;
            }
            adjacency[x].push((y, w));
            adjacency[y].push((x, w));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        let mut degree = Vec::with_capacity(n);
        offsets.push(0);
        for adj in &mut adjacency {
            adj.sort_by_key(|&(y, _)| y);
            degree.push(adj.iter().map(|&(_, w)| w).sum());
            for &(y, w) in adj.iter() {
                targets.push(y);
                weights.push(w);
            }
            offsets.push(targets.len());
        }

        let kind = policy.kind();
        let measure = match policy {
            MeasurePolicy::Normalized => degree.clone(),
            MeasurePolicy::Combinatorial => vec![1.0; n],
            MeasurePolicy::Custom(values) => {
                if values.len() != n {
                    return Err(Error::Schema(format!(
                        "custom measure has {} values for {n} vertices",
                        values.len()
                    )));
                }
                order.iter().map(|&i| values[i]).collect()
            }
        };
        check_measure(&labels, &measure)?;

        let graph = WeightedGraph {
            labels,
            measure,
            degree,
            offsets,
            targets,
            weights,
            kind,
        };
        let components = count_components(&graph);
        if components != 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(graph)
    }
}

fn check_measure(labels: &[String], measure: &[f64]) -> Result<()> {
    for (label, &m) in labels.iter().zip(measure) {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::NonpositiveMeasure {
                vertex: label.clone(),
                value: m,
            });
        }
    }
    Ok(())
}

fn count_components(g: &WeightedGraph) -> usize {
    let n = g.num_vertices();
    let mut seen = vec![false; n];
    let mut components = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for (y, _) in g.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    components
}

/// A set of vertex indices of some host graph, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct VertexSubset {
    members: Vec<usize>,
    host_size: usize,
}

impl VertexSubset {
    pub fn new(g: &WeightedGraph, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let host_size = g.num_vertices();
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if let Some(&bad) = members.iter().find(|&&x| x >= host_size) {
            return Err(Error::UnknownVertex(bad.to_string()));
        }
        Ok(VertexSubset { members, host_size })
    }

    pub fn from_labels<S: AsRef<str>>(g: &WeightedGraph, labels: &[S]) -> Result<Self> {
        let indices = labels
            .iter()
            .map(|l| g.index_of(l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(g, indices)
    }

    pub fn all(g: &WeightedGraph) -> Self {
        VertexSubset {
            members: (0..g.num_vertices()).collect(),
            host_size: g.num_vertices(),
        }
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        VertexSubset {
            members: mask
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| i)
                .collect(),
            host_size: mask.len(),
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn host_size(&self) -> usize {
        self.host_size
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.host_size
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.host_size];
        for &x in &self.members {
            mask[x] = true;
        }
        mask
    }

    pub fn complement(&self) -> VertexSubset {
        let mask = self.mask();
        VertexSubset {
            members: (0..self.host_size).filter(|&x| !mask[x]).collect(),
            host_size: self.host_size,
        }
    }

    pub fn is_subset_of(&self, other: &VertexSubset) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }

    pub fn intersects(&self, other: &VertexSubset) -> bool {
        self.members.iter().any(|&x| other.contains(x))
    }

    pub fn labels<'g>(&self, g: &'g WeightedGraph) -> Vec<&'g str> {
        self.members.iter().map(|&x| g.label(x)).collect()
    }

    pub(crate) fn check_host(&self, g: &WeightedGraph) -> Result<()> {
        if self.host_size != g.num_vertices() {
            return Err(Error::InvalidParameter(format!(
                "subset belongs to a graph with {} vertices, not {}",
                self.host_size,
                g.num_vertices()
            )));
        }
        Ok(())
    }
}

/// `|U| = Σ_{x ∈ U} m(x)`.
pub fn volume(g: &WeightedGraph, subset: &VertexSubset) -> f64 {
    subset.members().iter().map(|&x| g.m(x)).sum()
}

/// All vertices within `radius` hops of `center`, including `center`.
pub fn ball(g: &WeightedGraph, center: usize, radius: usize) -> Result<VertexSubset> {
    g.check_vertex(center)?;
    let dist = hop_distances(g, center);
    VertexSubset::new(
        g,
        dist.iter()
            .enumerate()
            .filter(|(_, d)| matches!(d, Some(d) if *d <= radius))
            .map(|(i, _)| i),
    )
}

/// Unweighted BFS distances from `source`.
pub fn hop_distances(g: &WeightedGraph, source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.num_vertices()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(x) = queue.pop_front() {
        let d = dist[x].unwrap();
        for (y, _) in g.neighbors(x) {
            if dist[y].is_none() {
                dist[y] = Some(d + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

/// `D_ω = max over ordered adjacent pairs of m(x) / ω(x, y)`.
pub fn d_omega(g: &WeightedGraph) -> f64 {
    (0..g.num_vertices())
        .flat_map(|x| g.neighbors(x).map(move |(_, w)| g.m(x) / w))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(edges: &str, measure: &str) -> String {
        format!(
            r#"{{"vertices":[{{"id":"a"}},{{"id":"b"}},{{"id":"c"}}],"edges":{edges},"measure":"{measure}"}}"#
        )
    }

    #[test]
    fn two_vertices_normalized_and_combinatorial() {
        let text = r#"{"vertices":[{"id":"b"},{"id":"a"}],"edges":[{"u":"a","v":"b","w":1}],"measure":"normalized"}"#;
        let g = WeightedGraph::from_json(text).unwrap();
        assert_eq!(g.labels(), ["a", "b"]);
        assert_eq!(g.measure(), [1.0, 1.0]);
        assert_eq!(g.weight(0, 1), 1.0);
        let c = WeightedGraph::from_json_with(text, MeasureKind::Combinatorial).unwrap();
        assert_eq!(c.measure(), [1.0, 1.0]);
        assert_eq!(d_omega(&g), 1.0);
    }

    #[test]
    fn triangle_normalized_degrees() {
        let text = doc(
            r#"[{"u":"a","v":"b","w":1},{"u":"b","v":"c","w":2},{"u":"c","v":"a","w":3}]"#,
            "normalized",
        );
        let g = WeightedGraph::from_json(&text).unwrap();
        // a: 1+3, b: 1+2, c: 2+3
        assert_eq!(g.measure(), [4.0, 3.0, 5.0]);
    }

    #[test]
    fn rejects_bad_documents() {
        let asym = doc(
            r#"[{"u":"a","v":"b","w":1},{"u":"b","v":"a","w":2},{"u":"b","v":"c","w":1}]"#,
            "normalized",
        );
        assert!(matches!(
            WeightedGraph::from_json(&asym),
            Err(Error::Asymmetry { .. })
        ));

        let disconnected = doc(r#"[{"u":"a","v":"b","w":1}]"#, "combinatorial");
        assert_eq!(
            WeightedGraph::from_json(&disconnected),
            Err(Error::Disconnected { components: 2 })
        );

        let dup = doc(
            r#"[{"u":"a","v":"b","w":1},{"u":"a","v":"b","w":1},{"u":"b","v":"c","w":1}]"#,
            "normalized",
        );
        assert!(matches!(
            WeightedGraph::from_json(&dup),
            Err(Error::Schema(_))
        ));

        let negative_m = r#"{"vertices":[{"id":"a","m":1},{"id":"b","m":-1}],"edges":[{"u":"a","v":"b","w":1}],"measure":"custom"}"#;
        assert!(matches!(
            WeightedGraph::from_json(negative_m),
            Err(Error::NonpositiveMeasure { .. })
        ));

        let missing_m = r#"{"vertices":[{"id":"a","m":1},{"id":"b"}],"edges":[{"u":"a","v":"b","w":1}],"measure":"custom"}"#;
        assert!(matches!(
            WeightedGraph::from_json(missing_m),
            Err(Error::Schema(_))
        ));

        assert!(matches!(
            WeightedGraph::from_json("{\"vertices\":[]}"),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn both_orientations_with_equal_weight_is_one_edge() {
        let text = doc(
            r#"[{"u":"a","v":"b","w":1.5},{"u":"b","v":"a","w":1.5},{"u":"b","v":"c","w":1}]"#,
            "combinatorial",
        );
        let g = WeightedGraph::from_json(&text).unwrap();
        assert_eq!(g.num_edges(), 2);
        assert_eq!(g.deg(1), 2.5);
    }

    #[test]
    fn custom_measure_follows_labels() {
        let text = r#"{"vertices":[{"id":"z","m":3},{"id":"a","m":2}],"edges":[{"u":"a","v":"z","w":0.5}],"measure":"custom"}"#;
        let g = WeightedGraph::from_json(text).unwrap();
        assert_eq!(g.measure(), [2.0, 3.0]);
        assert_eq!(d_omega(&g), 6.0);
        let again = WeightedGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn subset_helpers() {
        let text = doc(
            r#"[{"u":"a","v":"b","w":1},{"u":"b","v":"c","w":1}]"#,
            "normalized",
        );
        let g = WeightedGraph::from_json(&text).unwrap();
        let u = VertexSubset::from_labels(&g, &["c", "a"]).unwrap();
        assert_eq!(u.members(), [0, 2]);
        assert_eq!(u.complement().members(), [1]);
        assert_eq!(volume(&g, &u), 2.0);
        assert_eq!(ball(&g, 0, 0).unwrap().members(), [0]);
        assert_eq!(ball(&g, 0, 1).unwrap().members(), [0, 1]);
        assert!(VertexSubset::new(&g, [7]).is_err());
        assert!(matches!(
            VertexSubset::from_labels(&g, &["q"]),
            Err(Error::UnknownVertex(_))
        ));
    }
}
