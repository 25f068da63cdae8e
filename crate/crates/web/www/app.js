import init, { analyze, rebundle, sample_review, explain_terms } from "./pkg/srmap_web.js";

const COLORS = { green: "#2e7d32", red: "#c62828", grey: "#9e9e9e" };
const $ = (id) => document.getElementById(id);

let result = null;
let selected = null;
let mapScreen = [];
let bundleScreen = [];

function fit(points, size, pad) {
  const xs = points.map((p) => p.x), ys = points.map((p) => p.y);
  const minX = Math.min(...xs), maxX = Math.max(...xs), minY = Math.min(...ys), maxY = Math.max(...ys);
  const span = Math.max(maxX - minX, maxY - minY) || 1;
  return (x, y) => [pad + ((x - minX) / span) * (size - 2 * pad), pad + ((y - minY) / span) * (size - 2 * pad)];
}

function drawMap() {
  const c = $("map"), g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  if (!result) return;
  const pts = result.map.points;
  const at = fit(pts, c.width, 24);
  const byKey = new Map(pts.map((p) => [p.key, p]));
  g.strokeStyle = "rgba(0,0,0,0.12)";
  for (const [a, b] of result.map.knn.edges) {
    const [x1, y1] = at(byKey.get(a).x, byKey.get(a).y), [x2, y2] = at(byKey.get(b).x, byKey.get(b).y);
    g.beginPath(); g.moveTo(x1, y1); g.lineTo(x2, y2); g.stroke();
  }
  mapScreen = pts.map((p) => {
    const [x, y] = at(p.x, p.y);
    g.fillStyle = COLORS[p.color];
    g.beginPath(); g.arc(x, y, p.key === selected ? 8 : 5, 0, 2 * Math.PI); g.fill();
    if (p.verdict) { g.strokeStyle = "#333"; g.lineWidth = 1; g.stroke(); }
    if (p.key === selected) { g.strokeStyle = "#ff9800"; g.lineWidth = 3; g.stroke(); g.lineWidth = 1; }
    return { key: p.key, x, y };
  });
}

// Uniform cubic B-spline through the control polygon, endpoints clamped.
function spline(g, pts) {
  const p = [pts[0], pts[0], ...pts, pts[pts.length - 1], pts[pts.length - 1]];
  g.beginPath();
  for (let i = 0; i + 3 < p.length; i++) {
    for (let s = 0; s <= 8; s++) {
      const t = s / 8, it = 1 - t;
      const b0 = (it * it * it) / 6, b1 = (3 * t * t * t - 6 * t * t + 4) / 6;
      const b2 = (-3 * t * t * t + 3 * t * t + 3 * t + 1) / 6, b3 = (t * t * t) / 6;
      const x = b0 * p[i][0] + b1 * p[i + 1][0] + b2 * p[i + 2][0] + b3 * p[i + 3][0];
      const y = b0 * p[i][1] + b1 * p[i + 1][1] + b2 * p[i + 2][1] + b3 * p[i + 3][1];
      if (i === 0 && s === 0) g.moveTo(x, y); else g.lineTo(x, y);
    }
  }
  g.stroke();
}

function drawBundles() {
  const c = $("bundles"), g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  if (!result) return;
  const r = c.width / 2 - 40, cx = c.width / 2, cy = c.height / 2;
  const at = ([x, y]) => [cx + r * x, cy + r * y];
  const colorOf = new Map(result.map.points.map((p) => [p.key, p.color]));
  for (const path of result.geometry.paths) {
    const hot = path.source === selected || path.target === selected;
    g.strokeStyle = hot ? "rgba(21,101,192,0.9)" : "rgba(21,101,192,0.18)";
    g.lineWidth = hot ? 2 : 1;
    spline(g, path.points.map(at));
  }
  g.lineWidth = 1;
  bundleScreen = result.geometry.leaves.map((l) => {
    const [x, y] = at([l.x, l.y]);
    g.fillStyle = COLORS[colorOf.get(l.key)];
    g.beginPath(); g.arc(x, y, l.key === selected ? 7 : 4, 0, 2 * Math.PI); g.fill();
    if (l.key === selected) { g.strokeStyle = "#ff9800"; g.lineWidth = 3; g.stroke(); g.lineWidth = 1; }
    return { key: l.key, x, y };
  });
}

function showDetail() {
  const el = $("detail");
  if (!result || !selected) { el.innerHTML = "<h2>Study</h2><p>Click a point in either view.</p>"; return; }
  const p = result.map.points.find((q) => q.key === selected);
  const d = result.decisions.decisions.find((q) => q.key === selected);
  const cites = result.bundles.citations.filter((e) => e.source === selected).map((e) => e.target);
  const citedBy = result.bundles.citations.filter((e) => e.target === selected).map((e) => e.source);
  const list = (xs) => (xs.length ? xs.join(", ") : "none");
  let html = `<h2>${p.key}: ${escapeHtml(p.title)}</h2><dl><dt>Status</dt><dd>${p.status}</dd>`;
  if (d) {
    const e = d.evidence;
    html += `<dt>Verdict</dt><dd>${d.verdict}</dd>
      <dt>Neighbors</dt><dd>included ${list(e.included_neighbors)}; excluded ${list(e.excluded_neighbors)}; to evaluate ${list(e.evaluating_neighbors)}</dd>
      <dt>Cites</dt><dd>included ${list(e.cited_included)}; excluded ${list(e.cited_excluded)}</dd>`;
  } else {
    html += `<dt>Cites</dt><dd>${list(cites)}</dd>`;
  }
  html += `<dt>Cited by</dt><dd>${list(citedBy)}</dd></dl>`;
  el.innerHTML = html;
}

function escapeHtml(s) {
  return s.replace(/[&<>"]/g, (ch) => ({ "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;" })[ch]);
}

function redraw() { drawMap(); drawBundles(); showDetail(); }

function pick(canvas, screen, ev) {
  const rect = canvas.getBoundingClientRect();
  const x = ((ev.clientX - rect.left) * canvas.width) / rect.width;
  const y = ((ev.clientY - rect.top) * canvas.height) / rect.height;
  let best = null, bestD = 14 * 14;
  for (const s of screen) {
    const d = (s.x - x) ** 2 + (s.y - y) ** 2;
    if (d < bestD) { best = s.key; bestD = d; }
  }
  selected = best;
  redraw();
}

function run() {
  const out = JSON.parse(analyze($("previous").value, $("new").value, +$("k").value, +$("seed").value, +$("beta").value));
  if (out.error) { $("status").textContent = out.error; return; }
  result = out;
  selected = null;
  const c = out.decisions.counts;
  $("status").textContent = `${out.map.points.length} studies, stress ${out.map.stress.toFixed(4)}\n` +
    `new studies: ${c.include} include, ${c.exclude} exclude, ${c.undefined} undefined` +
    (out.warnings.length ? `\n${out.warnings.length} warnings, first: ${out.warnings[0]}` : "");
  redraw();
}

function explain() {
  const out = JSON.parse(explain_terms($("text").value));
  $("terms").innerHTML = out.tokens
    .map((t) => (t.stop ? `<span class="stop">${t.token}</span>` : `<span title="${t.token}">${t.stem}</span>`))
    .join("");
}

await init();
$("sample").onclick = () => {
  const s = JSON.parse(sample_review(+$("seed").value, 63, 34, 13));
  $("previous").value = s.previous;
  $("new").value = s.new;
  run();
};
$("run").onclick = run;
$("beta").oninput = () => {
  $("betaval").textContent = (+$("beta").value).toFixed(2);
  if (!result) return;
  result.geometry = JSON.parse(rebundle(+$("beta").value));
  drawBundles();
};
$("map").onclick = (ev) => pick($("map"), mapScreen, ev);
$("bundles").onclick = (ev) => pick($("bundles"), bundleScreen, ev);
$("text").oninput = explain;
explain();
