//! Browser bindings: each export takes a family description and returns a
//! JSON document for `www/main.js` to draw.

use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use graphcurv::curvature::{curvature_function, Dimension};
use graphcurv::generate::{generate_capped, Family};
use graphcurv::graph::{MeasurePolicy, WeightedGraph};
use graphcurv::harness::cheeger_lower_bound_check_with_curvature;
use graphcurv::isoperimetry::{cheeger_finite_exact, cheeger_sweep, ENUMERATION_CAP};
use graphcurv::semigroup::HeatKernel;
use graphcurv::spectral::lambda1_finite;

/// Largest graph the page will build.
pub const MAX_VERTICES: usize = 400;

#[derive(Serialize)]
struct Layout {
    name: String,
    labels: Vec<String>,
    x: Vec<f64>,
    y: Vec<f64>,
    edges: Vec<(usize, usize, f64)>,
}

fn build(family: &str, params: &str, measure: &str) -> Result<(Family, WeightedGraph), String> {
    let fam = Family::parse(family, params).map_err(|e| e.to_string())?;
    let policy = MeasurePolicy::parse(measure).map_err(|e| e.to_string())?;
    let g = generate_capped(fam, policy, MAX_VERTICES).map_err(|e| e.to_string())?;
    Ok((fam, g))
}

/// Lattice coordinates when the labels carry them, otherwise a
/// force-directed layout started from a circle.
fn layout(fam: Family, g: &WeightedGraph) -> Layout {
    let n = g.num_vertices();
    let coords: Option<Vec<Vec<f64>>> = match fam {
        Family::LatticeBall { d, .. } if d <= 2 => g
            .labels()
            .iter()
            .map(|l| {
                l.split(',')
                    .map(|c| c.parse::<f64>().ok())
                    .collect::<Option<Vec<f64>>>()
            })
            .collect(),
        Family::Path { .. } => Some((0..n).map(|i| vec![i as f64]).collect()),
        _ => None,
    };
    let (mut x, mut y): (Vec<f64>, Vec<f64>) = match coords {
        Some(c) => c
            .iter()
            .map(|p| (p[0], p.get(1).copied().unwrap_or(0.0)))
            .unzip(),
        None => force_layout(g),
    };
    normalize(&mut x, &mut y);
    Layout {
        name: fam.to_string(),
        labels: g.labels().to_vec(),
        x,
        y,
        edges: g.edges().collect(),
    }
}

fn force_layout(g: &WeightedGraph) -> (Vec<f64>, Vec<f64>) {
    let n = g.num_vertices();
    let mut x: Vec<f64> = (0..n)
        .map(|i| (std::f64::consts::TAU * i as f64 / n as f64).cos())
        .collect();
    let mut y: Vec<f64> = (0..n)
        .map(|i| (std::f64::consts::TAU * i as f64 / n as f64).sin())
        .collect();
    let k = (4.0 / n as f64).sqrt();
    let mut temp = 0.1;
    for _ in 0..300 {
        let mut dx = vec![0.0; n];
        let mut dy = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let (ex, ey) = (x[i] - x[j], y[i] - y[j]);
                    let d2 = (ex * ex + ey * ey).max(1e-9);
                    dx[i] += ex * k * k / d2;
                    dy[i] += ey * k * k / d2;
                }
            }
        }
        for (i, j, _) in g.edges() {
            let (ex, ey) = (x[i] - x[j], y[i] - y[j]);
            let d = (ex * ex + ey * ey).sqrt();
            let (fx, fy) = (ex * d / k, ey * d / k);
            dx[i] -= fx;
            dy[i] -= fy;
            dx[j] += fx;
            dy[j] += fy;
        }
        for i in 0..n {
            let len = (dx[i] * dx[i] + dy[i] * dy[i]).sqrt().max(1e-12);
            let step = len.min(temp);
            x[i] += dx[i] / len * step;
            y[i] += dy[i] / len * step;
        }
        temp *= 0.985;
    }
    (x, y)
}

fn normalize(x: &mut [f64], y: &mut [f64]) {
    let span = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, (hi - lo).max(1e-9))
    };
    let (x0, wx) = span(x);
    let (y0, wy) = span(y);
    let w = wx.max(wy);
    for v in x.iter_mut() {
        *v = (*v - x0 - wx / 2.0) / w;
    }
    for v in y.iter_mut() {
        *v = (*v - y0 - wy / 2.0) / w;
    }
}

pub fn curvature_field_json(
    family: &str,
    params: &str,
    measure: &str,
    dim: &str,
) -> Result<Value, String> {
    let (fam, g) = build(family, params, measure)?;
    let n: Dimension = dim.parse().map_err(|e: graphcurv::Error| e.to_string())?;
    let res = curvature_function(&g, n).map_err(|e| e.to_string())?;
    Ok(json!({
        "layout": layout(fam, &g),
        "n": n.to_string(),
        "curvature": res.per_vertex(),
        "global_k": res.global_k,
        "argmin": res.argmin,
    }))
}

pub fn heat_trajectory_json(
    family: &str,
    params: &str,
    measure: &str,
    source: usize,
    t_max: f64,
    frames: usize,
) -> Result<Value, String> {
    let (fam, g) = build(family, params, measure)?;
    if source >= g.num_vertices() {
        return Err(format!(
            "source {source} out of range (graph has {} vertices)",
            g.num_vertices()
        ));
    }
    if !(t_max > 0.0 && t_max.is_finite()) || frames < 2 {
        return Err("need t_max > 0 and at least two frames".into());
    }
    let kernel = HeatKernel::new(&g, None).map_err(|e| e.to_string())?;
    let mut f = vec![0.0; g.num_vertices()];
    f[source] = 1.0;
    let times: Vec<f64> = (0..frames)
        .map(|i| t_max * i as f64 / (frames - 1) as f64)
        .collect();
    let values: Vec<Vec<f64>> = times.iter().map(|&t| kernel.apply(&f, t).0).collect();
    Ok(json!({
        "layout": layout(fam, &g),
        "source": source,
        "times": times,
        "values": values,
        "mean": kernel.mean(&f),
    }))
}

pub fn cheeger_cut_json(family: &str, params: &str, measure: &str) -> Result<Value, String> {
    let (fam, g) = build(family, params, measure)?;
    let exact = g.num_vertices() <= ENUMERATION_CAP;
    let cut = if exact {
        cheeger_finite_exact(&g)
    } else {
        cheeger_sweep(&g)
    }
    .map_err(|e| e.to_string())?;
    let lambda1 = lambda1_finite(&g).map_err(|e| e.to_string())?.eigenvalue;
    let k = curvature_function(&g, Dimension::INFINITE)
        .map_err(|e| e.to_string())?
        .global_k;
    let bound = cheeger_lower_bound_check_with_curvature(&g, k).map_err(|e| e.to_string())?;
    // the classical two-sided estimate is stated for m = Deg
    let classical = measure == "normalized";
    Ok(json!({
        "layout": layout(fam, &g),
        "h": cut.value,
        "exact": exact,
        "subset": cut.subset.members(),
        "lambda1": lambda1,
        "cheeger_lower": classical.then_some(lambda1 / 2.0),
        "cheeger_upper": classical.then(|| (2.0 * lambda1).sqrt()),
        "global_k": k,
        "curvature_bound": serde_json::to_value(&bound).map_err(|e| e.to_string())?,
    }))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn curvature_field(
    family: &str,
    params: &str,
    measure: &str,
    dim: &str,
) -> Result<String, JsValue> {
    to_js(curvature_field_json(family, params, measure, dim))
}

#[wasm_bindgen]
pub fn heat_trajectory(
    family: &str,
    params: &str,
    measure: &str,
    source: usize,
    t_max: f64,
    frames: usize,
) -> Result<String, JsValue> {
    to_js(heat_trajectory_json(
        family, params, measure, source, t_max, frames,
    ))
}

#[wasm_bindgen]
pub fn cheeger_cut(family: &str, params: &str, measure: &str) -> Result<String, JsValue> {
    to_js(cheeger_cut_json(family, params, measure))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curvature_field_on_hypercube() {
        let v = curvature_field_json("hypercube", "d=3", "normalized", "inf").unwrap();
        assert!((v["global_k"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(v["curvature"].as_array().unwrap().len(), 8);
        let xs = v["layout"]["x"].as_array().unwrap();
        assert!(xs.iter().all(|x| x.as_f64().unwrap().abs() <= 0.5 + 1e-12));
    }

    #[test]
    fn lattice_layout_uses_coordinates() {
        let v = curvature_field_json("lattice_ball", "d=2,r=2", "normalized", "2").unwrap();
        assert_eq!(v["layout"]["labels"].as_array().unwrap().len(), 13);
        assert_eq!(v["n"], "2");
    }

    #[test]
    fn heat_frames_conserve_mass() {
        let v = heat_trajectory_json("cycle", "n=6", "normalized", 0, 3.0, 5).unwrap();
        let frames = v["values"].as_array().unwrap();
        assert_eq!(frames.len(), 5);
        for frame in frames {
            // every vertex of the cycle has m = 2
            let mass: f64 = frame
                .as_array()
                .unwrap()
                .iter()
                .map(|x| 2.0 * x.as_f64().unwrap())
                .sum();
            assert!((mass - 2.0).abs() < 1e-12);
        }
        assert!(heat_trajectory_json("cycle", "n=6", "normalized", 6, 3.0, 5).is_err());
    }

    #[test]
    fn cheeger_cut_two_vertex() {
        let v = cheeger_cut_json("two_vertex", "", "normalized").unwrap();
        assert_eq!(v["h"], 1.0);
        assert_eq!(v["exact"], true);
        assert_eq!(v["curvature_bound"]["status"], "pass");
    }

    #[test]
    fn bad_input_is_an_error() {
        assert!(curvature_field_json("moebius", "", "normalized", "inf").is_err());
        assert!(curvature_field_json("cycle", "n=5", "normalized", "-1").is_err());
        assert!(cheeger_cut_json("lattice_ball", "d=3,r=9", "normalized").is_err());
    }
}
