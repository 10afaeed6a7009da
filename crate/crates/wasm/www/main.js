import init, { generate_and_score, perturbation_curve, compare_text } from "./pkg/commeval_demo.js";

const METRICS = [
  ["vi", "VI", "#1f77b4"],
  ["nmi", "NMI", "#ff7f0e"],
  ["f_measure", "F-measure", "#2ca02c"],
  ["nvd", "NVD", "#d62728"],
  ["ri", "RI", "#9467bd"],
  ["ari", "ARI", "#8c564b"],
  ["ji", "JI", "#e377c2"],
];

const $ = (id) => document.getElementById(id);
const fmt = (x) => (typeof x === "number" ? x.toFixed(6) : x);

function table(el, header, rows) {
  const tr = (cells, tag) => "<tr>" + cells.map((c) => `<${tag}>${fmt(c)}</${tag}>`).join("") + "</tr>";
  el.innerHTML = tr(header, "th") + rows.map((r) => tr(r, "td")).join("");
}

function failed(el, result) {
  if (result.error === undefined) return false;
  el.innerHTML = `<tr><td class="error">${result.error}</td></tr>`;
  return true;
}

function inputs() {
  return {
    nodes: Number($("g-nodes").value),
    mixing: Number($("g-mixing").value),
    perturb: Number($("g-perturb").value),
    seed: Number($("g-seed").value),
  };
}

function generate() {
  const p = inputs();
  $("g-mixing-v").textContent = p.mixing.toFixed(2);
  $("g-perturb-v").textContent = p.perturb.toFixed(2);
  const r = JSON.parse(generate_and_score(p.nodes, p.mixing, p.perturb, p.seed));
  if (failed($("g-metrics"), r)) {
    $("g-summary").textContent = "";
    $("g-rows").innerHTML = "";
    return;
  }
  $("g-summary").textContent =
    `${r.nodes} nodes, ${r.edges} edges, ${r.communities} planted communities, ${r.detected_communities} after perturbation`;
  const q = (x) => [x.modularity, x.modularity_density, x.mean_conductance, x.mean_intra_density];
  table($("g-metrics"), ["", "Q", "Qds", "mean conductance", "mean density"], [
    ["planted", ...q(r.ground)],
    ["perturbed", ...q(r.detected)],
  ]);
  $("g-metrics").innerHTML +=
    "<tr>" + METRICS.map(([k, name]) => `<th>${name}</th>`).join("") + "</tr>" +
    "<tr>" + METRICS.map(([k]) => `<td>${fmt(r.comparison[k])}</td>`).join("") + "</tr>";
  table($("g-rows"), ["community", "size", "intra", "inter", "density", "conductance"],
    r.rows.map((c) => [c.id, c.size, c.intra_edges, c.inter_edges, c.intra_density, c.conductance]));
}

function curve() {
  const p = inputs();
  const points = JSON.parse(perturbation_curve(p.nodes, p.mixing, p.seed, Number($("c-steps").value)));
  const canvas = $("c-plot");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (points.error !== undefined) {
    $("c-legend").innerHTML = `<span class="error">${points.error}</span>`;
    return;
  }
  const pad = 36;
  const w = canvas.width - 2 * pad;
  const h = canvas.height - 2 * pad;
  // VI is in nats and can exceed 1; scale the axis to the largest value.
  const top = Math.max(1, ...points.map((pt) => pt.vi));
  const x = (f) => pad + f * w;
  const y = (v) => pad + h - (v / top) * h;

  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w, h);
  ctx.fillStyle = "#444";
  ctx.fillText("0", pad - 10, pad + h + 12);
  ctx.fillText("1", pad + w - 3, pad + h + 12);
  ctx.fillText(top.toFixed(2), 2, pad + 4);
  ctx.fillText("perturbed share", pad + w / 2 - 35, pad + h + 24);

  for (const [key, , color] of METRICS) {
    ctx.strokeStyle = color;
    ctx.beginPath();
    points.forEach((pt, i) => (i ? ctx.lineTo : ctx.moveTo).call(ctx, x(pt.fraction), y(pt[key])));
    ctx.stroke();
  }
  $("c-legend").innerHTML = METRICS.map(([, name, color]) => `<span style="color:${color}">&#9632; ${name}</span>`).join(" ");
}

function compareText() {
  const r = JSON.parse(compare_text($("t-ground").value, $("t-detected").value));
  if (failed($("t-metrics"), r)) return;
  table($("t-metrics"), METRICS.map(([, name]) => name), [METRICS.map(([k]) => r[k])]);
}

await init();
for (const id of ["g-nodes", "g-mixing", "g-perturb", "g-seed"]) $(id).addEventListener("input", generate);
$("c-run").addEventListener("click", curve);
$("t-run").addEventListener("click", compareText);
generate();
curve();
compareText();
