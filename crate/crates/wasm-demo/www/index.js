import init, {
  transmission_grid,
  rate_curve,
  threshold_curve,
  rate_breakdown,
} from "./pkg/cvqkd_wasm.js";

const MEASUREMENTS = ["collective", "heterodyne", "homodyne"];
const COLORS = { collective: "#1f77b4", heterodyne: "#d62728", homodyne: "#2ca02c" };
const PAD = { left: 56, right: 16, top: 16, bottom: 36 };

const $ = (id) => document.getElementById(id);

function frame(ctx, xr, yr, xlabel, ylabel) {
  const { width: w, height: h } = ctx.canvas;
  ctx.clearRect(0, 0, w, h);
  const px = (x) => PAD.left + ((x - xr[0]) / (xr[1] - xr[0])) * (w - PAD.left - PAD.right);
  const py = (y) => h - PAD.bottom - ((y - yr[0]) / (yr[1] - yr[0])) * (h - PAD.top - PAD.bottom);
  ctx.strokeStyle = "#888";
  ctx.fillStyle = "#333";
  ctx.font = "12px system-ui";
  ctx.strokeRect(PAD.left, PAD.top, w - PAD.left - PAD.right, h - PAD.top - PAD.bottom);
  for (let i = 0; i <= 5; i++) {
    const x = xr[0] + ((xr[1] - xr[0]) * i) / 5;
    const y = yr[0] + ((yr[1] - yr[0]) * i) / 5;
    ctx.fillText(x.toPrecision(2), px(x) - 10, h - PAD.bottom + 16);
    ctx.fillText(y.toPrecision(2), 4, py(y) + 4);
  }
  ctx.fillText(xlabel, w / 2 - 20, h - 4);
  ctx.save();
  ctx.translate(12, h / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(ylabel, -20, 0);
  ctx.restore();
  if (yr[0] < 0 && yr[1] > 0) {
    ctx.strokeStyle = "#bbb";
    ctx.beginPath();
    ctx.moveTo(px(xr[0]), py(0));
    ctx.lineTo(px(xr[1]), py(0));
    ctx.stroke();
  }
  return { px, py };
}

function polyline(ctx, xs, ys, px, py, color, dash = []) {
  ctx.strokeStyle = color;
  ctx.setLineDash(dash);
  ctx.lineWidth = 2;
  ctx.beginPath();
  let open = false;
  xs.forEach((x, i) => {
    const y = ys[i];
    if (!Number.isFinite(y)) { open = false; return; }
    open ? ctx.lineTo(px(x), py(y)) : ctx.moveTo(px(x), py(y));
    open = true;
  });
  ctx.stroke();
  ctx.setLineDash([]);
  ctx.lineWidth = 1;
}

function state() {
  const va = 1 + 10 ** Number($("logva").value);
  return { direction: $("direction").value, unit: $("unit").value, va };
}

let rateView = null;

function drawRates() {
  const { direction, unit, va } = state();
  $("va-label").textContent = `V_A = ${va.toPrecision(4)}`;
  const ts = Array.from(transmission_grid(0.005, 0.995, 400));
  const curves = MEASUREMENTS.map((m) => Array.from(rate_curve(direction, m, va, unit, ts)));
  const finite = curves.flat().filter(Number.isFinite);
  const lo = Math.min(0, ...finite);
  const hi = Math.max(0.1, ...finite);
  const ctx = $("rates").getContext("2d");
  const axes = frame(ctx, [0, 1], [Math.max(lo, -hi), hi], "T", `rate (${unit})`);
  curves.forEach((ys, i) => polyline(ctx, ts, ys, axes.px, axes.py, COLORS[MEASUREMENTS[i]]));
  MEASUREMENTS.forEach((m, i) => {
    ctx.fillStyle = COLORS[m];
    ctx.fillText(m, PAD.left + 10, PAD.top + 16 + 14 * i);
  });
  rateView = axes;
}

function drawThresholds() {
  const { direction } = state();
  const logs = Array.from({ length: 120 }, (_, i) => 0.05 + (6 * i) / 119);
  const vas = logs.map((l) => 1 + 10 ** l);
  const ctx = $("thresholds").getContext("2d");
  const axes = frame(ctx, [0, 6], [0, 1], "log10 V_A", "threshold T");
  for (const m of MEASUREMENTS) {
    const ys = Array.from(threshold_curve(direction, m, vas));
    polyline(ctx, logs, ys, axes.px, axes.py, COLORS[m]);
    const [limit] = threshold_curve(direction, m, [Infinity]);
    if (Number.isFinite(limit)) polyline(ctx, [0, 6], [limit, limit], axes.px, axes.py, COLORS[m], [4, 4]);
  }
}

function hover(ev) {
  if (!rateView) return;
  const canvas = $("rates");
  const rect = canvas.getBoundingClientRect();
  const x = ((ev.clientX - rect.left) * canvas.width) / rect.width;
  const t = (x - PAD.left) / (canvas.width - PAD.left - PAD.right);
  if (t <= 0 || t >= 1) return;
  const { direction, unit, va } = state();
  const parts = MEASUREMENTS.map((m) => {
    try {
      const [bob, eve, rate] = rate_breakdown(direction, m, t, va, unit);
      return `${m}: I_B=${bob.toFixed(4)} I_E=${eve.toFixed(4)} K=${rate.toFixed(4)}`;
    } catch (e) {
      return `${m}: ${e.message ?? e}`;
    }
  });
  $("readout").textContent = `T=${t.toFixed(3)}  ` + parts.join("  |  ");
}

function redraw() {
  drawRates();
  drawThresholds();
}

init()
  .then(() => {
    ["direction", "unit", "logva"].forEach((id) => $(id).addEventListener("input", redraw));
    $("rates").addEventListener("mousemove", hover);
    redraw();
  })
  .catch((e) => {
    $("readout").className = "err";
    $("readout").textContent = `failed to load wasm module: ${e}`;
  });
