import init, { curvature_field, heat_trajectory, cheeger_cut } from "./pkg/graphcurv_demo.js";

const $ = (id) => document.getElementById(id);
const canvas = $("canvas");
const ctx = canvas.getContext("2d");
const FRAMES = 61;

const defaults = {
  hypercube: "d=3",
  cycle: "n=10",
  path: "n=8",
  complete: "n=6",
  lattice_ball: "d=2,r=4",
  tree_ball: "degree=3,r=3",
  random: "n=14,p=0.25,seed=1",
  two_vertex: "",
};

let heat = null;

function graphArgs() {
  return [$("family").value, $("params").value, $("measure").value];
}

function run(f) {
  $("error").textContent = "";
  try {
    return JSON.parse(f());
  } catch (e) {
    $("error").textContent = String(e);
    return null;
  }
}

// blue (low) .. white .. red (high)
function diverging(v, lo, hi) {
  const mid = (lo + hi) / 2;
  const half = Math.max((hi - lo) / 2, 1e-12);
  const s = Math.max(-1, Math.min(1, (v - mid) / half));
  const a = Math.round(255 * (1 - Math.abs(s)));
  return s < 0 ? `rgb(${a},${a},255)` : `rgb(255,${a},${a})`;
}

function sequential(v, hi) {
  const s = Math.max(0, Math.min(1, v / Math.max(hi, 1e-12)));
  const c = Math.round(255 * (1 - s));
  return `rgb(255,${c},${Math.round(c * 0.4)})`;
}

function draw(layout, colors, opts = {}) {
  const { x, y, edges, labels } = layout;
  const w = canvas.width, h = canvas.height, pad = 40;
  const scale = Math.min(w, h) - 2 * pad;
  const px = (i) => w / 2 + x[i] * scale;
  const py = (i) => h / 2 + y[i] * scale;
  ctx.clearRect(0, 0, w, h);
  for (const [i, j] of edges) {
    const cut = opts.cut && opts.cut.has(i) !== opts.cut.has(j);
    ctx.strokeStyle = cut ? "#d00" : "#999";
    ctx.lineWidth = cut ? 2.5 : 1;
    ctx.setLineDash(cut ? [6, 4] : []);
    ctx.beginPath();
    ctx.moveTo(px(i), py(i));
    ctx.lineTo(px(j), py(j));
    ctx.stroke();
  }
  ctx.setLineDash([]);
  const r = labels.length > 60 ? 5 : 9;
  for (let i = 0; i < labels.length; i++) {
    ctx.fillStyle = colors[i];
    ctx.strokeStyle = opts.highlight === i ? "#000" : "#555";
    ctx.lineWidth = opts.highlight === i ? 3 : 1;
    ctx.beginPath();
    ctx.arc(px(i), py(i), r, 0, 2 * Math.PI);
    ctx.fill();
    ctx.stroke();
  }
}

function showCurvature() {
  const res = run(() => curvature_field(...graphArgs(), $("dim").value));
  if (!res) return;
  heat = null;
  $("frame").disabled = true;
  const k = res.curvature;
  const lo = Math.min(...k, 0), hi = Math.max(...k, 0);
  const bound = Math.max(Math.abs(lo), Math.abs(hi));
  draw(res.layout, k.map((v) => diverging(v, -bound, bound)), { highlight: res.argmin });
  $("info").textContent =
    `${res.layout.name}, CD(${res.n}, K)\n` +
    `global K = ${res.global_k.toPrecision(12)} at vertex ${res.layout.labels[res.argmin]}\n` +
    `per-vertex range [${Math.min(...k).toPrecision(6)}, ${Math.max(...k).toPrecision(6)}] (blue negative, red positive)`;
}

function showHeatFrame() {
  if (!heat) return;
  const i = Number($("frame").value);
  const vals = heat.values[i];
  const hi = Math.max(...heat.values[0]);
  draw(heat.layout, vals.map((v) => sequential(v, hi)), { highlight: heat.source });
  const dev = Math.max(...vals.map((v) => Math.abs(v - heat.mean)));
  $("info").textContent =
    `${heat.layout.name}, P_t 1_{${heat.layout.labels[heat.source]}}\n` +
    `t = ${heat.times[i].toFixed(3)}   sup |P_t f - f_V| = ${dev.toExponential(4)}   f_V = ${heat.mean.toPrecision(6)}`;
}

function showHeat() {
  const res = run(() => heat_trajectory(...graphArgs(), Number($("source").value), Number($("tmax").value), FRAMES));
  if (!res) return;
  heat = res;
  $("frame").disabled = false;
  $("frame").max = FRAMES - 1;
  $("frame").value = 0;
  showHeatFrame();
}

function showCheeger() {
  const res = run(() => cheeger_cut(...graphArgs()));
  if (!res) return;
  heat = null;
  $("frame").disabled = true;
  const side = new Set(res.subset);
  draw(res.layout, res.layout.labels.map((_, i) => (side.has(i) ? "#fc8" : "#8cf")), { cut: side });
  const b = res.curvature_bound;
  const bound = b.status === "skipped"
    ? `curvature lower bound: skipped (K = ${res.global_k.toPrecision(6)})`
    : `curvature lower bound: h ≥ ${b.rhs.toPrecision(6)} (${b.status})`;
  $("info").textContent =
    `${res.layout.name}\n` +
    `h = ${res.h.toPrecision(12)} (${res.exact ? "exact enumeration" : "sweep upper bound"})\n` +
    `λ₁ = ${res.lambda1.toPrecision(12)}` +
    (res.cheeger_lower === null ? "\n" : `   λ₁/2 ≤ h ≤ √(2λ₁): ${res.cheeger_lower.toPrecision(6)} ≤ h ≤ ${res.cheeger_upper.toPrecision(6)}\n`) +
    bound;
}

await init();
$("family").addEventListener("change", () => {
  $("params").value = defaults[$("family").value] ?? "";
});
$("run-curvature").addEventListener("click", showCurvature);
$("run-heat").addEventListener("click", showHeat);
$("run-cheeger").addEventListener("click", showCheeger);
$("frame").addEventListener("input", showHeatFrame);
showCurvature();
