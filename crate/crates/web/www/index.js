import init, { methodIds, intervalTable, errorCurve, halfWidthRatioCurve } from "./pkg/propci_web.js";

const COLORS = { 32: "#d62728", 64: "#2ca02c", 2048: "#1f77b4" };
const LAMBDA = [0.05, 100];
const POINTS = 200;

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const checkedSizes = (name) =>
  [...document.querySelectorAll(`input[name=${name}]:checked`)].map((el) => Number(el.value));

function fmt(v) {
  return Number.isFinite(v) ? Number(v.toPrecision(6)).toString() : "";
}

function fillSelect(select, ids, chosen) {
  select.innerHTML = ids.map((id) => `<option${id === chosen ? " selected" : ""}>${id}</option>`).join("");
}

// Run `work` after the status line has had a chance to repaint.
function busy(statusId, work) {
  $(statusId).textContent = "computing...";
  setTimeout(() => {
    try {
      work();
      $(statusId).textContent = "";
    } catch (e) {
      $(statusId).textContent = String(e.message ?? e);
    }
  }, 20);
}

function showIntervals() {
  const rows = JSON.parse(intervalTable(num("iv-x"), num("iv-n"), num("iv-alpha")));
  const head = "<tr><th>method</th><th>point</th><th>lower (raw)</th><th>upper (raw)</th><th>lower</th><th>upper</th><th>percent</th></tr>";
  $("iv-table").innerHTML =
    head +
    rows
      .map(
        (r) =>
          `<tr><td>${r.method}</td><td>${fmt(r.point)}</td><td>${fmt(r.lower_raw)}</td><td>${fmt(r.upper_raw)}</td>` +
          `<td>${fmt(r.lower)}</td><td>${fmt(r.upper)}</td><td>${r.percent}</td></tr>`,
      )
      .join("");
}

// Line chart with a log-scaled x axis; each series is {color, dashed, points: [[x, y], ...]}.
function plot(canvas, series, { yMax, hlines, yLabel }) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height;
  const m = { l: 60, r: 16, t: 14, b: 40 };
  const pw = W - m.l - m.r, ph = H - m.t - m.b;
  const [lx0, lx1] = LAMBDA.map(Math.log10);
  const sx = (x) => m.l + ((Math.log10(x) - lx0) / (lx1 - lx0)) * pw;
  const sy = (y) => m.t + ph - (y / yMax) * ph;

  ctx.clearRect(0, 0, W, H);
  ctx.font = "12px sans-serif";
  ctx.strokeStyle = "#444";
  ctx.setLineDash([]);
  ctx.strokeRect(m.l, m.t, pw, ph);
  ctx.fillStyle = "#222";
  ctx.textAlign = "center";
  for (let e = -1; e <= 2; e++) {
    const x = sx(10 ** e);
    ctx.beginPath(); ctx.moveTo(x, m.t + ph); ctx.lineTo(x, m.t + ph + 4); ctx.stroke();
    ctx.fillText(String(10 ** e), x, m.t + ph + 16);
  }
  ctx.fillText("λ = n p", m.l + pw / 2, H - 6);
  ctx.textAlign = "right";
  for (let k = 0; k <= 4; k++) {
    const v = (yMax * k) / 4, y = sy(v);
    ctx.beginPath(); ctx.moveTo(m.l - 4, y); ctx.lineTo(m.l, y); ctx.stroke();
    ctx.fillText(fmt(v), m.l - 6, y + 4);
  }
  ctx.save();
  ctx.translate(14, m.t + ph / 2); ctx.rotate(-Math.PI / 2); ctx.textAlign = "center";
  ctx.fillText(yLabel, 0, 0);
  ctx.restore();

  ctx.save();
  ctx.beginPath(); ctx.rect(m.l, m.t, pw, ph); ctx.clip();
  ctx.strokeStyle = "#888"; ctx.setLineDash([2, 3]);
  for (const h of hlines) {
    ctx.beginPath(); ctx.moveTo(m.l, sy(h)); ctx.lineTo(m.l + pw, sy(h)); ctx.stroke();
  }
  ctx.lineWidth = 1.5;
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.setLineDash(s.dashed ? [6, 4] : []);
    ctx.beginPath();
    let pen = false;
    for (const [x, y] of s.points) {
      if (!Number.isFinite(y)) { pen = false; continue; }
      pen ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y));
      pen = true;
    }
    ctx.stroke();
  }
  ctx.restore();

  ctx.setLineDash([]);
  ctx.textAlign = "left";
  let lx = m.l + 10;
  for (const s of series.filter((s) => !s.dashed)) {
    ctx.strokeStyle = s.color; ctx.beginPath(); ctx.moveTo(lx, m.t + 12); ctx.lineTo(lx + 20, m.t + 12); ctx.stroke();
    ctx.fillText(s.label, lx + 24, m.t + 16);
    lx += 90;
  }
  ctx.fillText("dashed: lower, solid: upper", lx + 10, m.t + 16);
}

// Split flat [x, lower, upper, ...] triples into a dashed and a solid series.
function pair(flat, n) {
  const lower = [], upper = [];
  for (let i = 0; i < flat.length; i += 3) {
    lower.push([flat[i], flat[i + 1]]);
    upper.push([flat[i], flat[i + 2]]);
  }
  const color = COLORS[n];
  return [
    { color, dashed: true, label: `n = ${n}`, points: lower },
    { color, dashed: false, label: `n = ${n}`, points: upper },
  ];
}

function showCurves() {
  const alpha = num("cv-alpha");
  const series = checkedSizes("cv-n").flatMap((n) =>
    pair(errorCurve($("cv-method").value, $("cv-regime").value, n, alpha, num("cv-ors"), LAMBDA[0], LAMBDA[1], POINTS), n),
  );
  const nominal = alpha / 2;
  plot($("cv-canvas"), series, {
    yMax: Math.max(4 * nominal, 1.8 * nominal),
    hlines: [nominal / 1.5, nominal, nominal * 1.5],
    yLabel: "one-sided error",
  });
}

function showRatios() {
  const series = checkedSizes("rt-n").flatMap((n) =>
    pair(halfWidthRatioCurve($("rt-method").value, $("rt-reference").value, n, 0.05, num("rt-ors"), LAMBDA[0], LAMBDA[1], POINTS), n),
  );
  const top = Math.max(1.5, ...series.flatMap((s) => s.points.map((p) => p[1]).filter(Number.isFinite)));
  plot($("rt-canvas"), series, { yMax: Math.min(top * 1.05, 4), hlines: [1], yLabel: "half-width ratio" });
}

async function main() {
  await init();
  const ids = JSON.parse(methodIds());
  fillSelect($("cv-method"), ids, "clopper_pearson_midp");
  fillSelect($("rt-method"), ids, "clopper_pearson");
  fillSelect($("rt-reference"), ids, "clopper_pearson_midp");
  const on = (form, status, work) =>
    $(form).addEventListener("submit", (e) => { e.preventDefault(); busy(status, work); });
  on("interval-form", "iv-status", showIntervals);
  on("curve-form", "cv-status", showCurves);
  on("ratio-form", "rt-status", showRatios);
  busy("iv-status", showIntervals);
  busy("cv-status", showCurves);
}

main();
