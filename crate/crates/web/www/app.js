import init, { score, sweep, spacing } from "./pkg/melodic_measure_web.js";

const $ = (id) => document.getElementById(id);
const fmt = (x) => (x == null ? "–" : x.toFixed(3));
const COLORS = ["#3869b1", "#da7c30", "#3e9651", "#cc2529", "#6b4c9a"];

function run(out, f) {
  try {
    f();
  } catch (e) {
    $(out).innerHTML = `<p class="error">${e}</p>`;
  }
}

function clear(canvas) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.font = "12px system-ui";
  return ctx;
}

// Bars on a shared baseline; each bar is {value, color}.
function bars(canvas, items, labels) {
  const ctx = clear(canvas);
  const pad = 30, w = canvas.width - 2 * pad, h = canvas.height - 2 * pad;
  const max = Math.max(1e-9, ...items.map((b) => Math.abs(b.value)));
  const min = Math.min(0, ...items.map((b) => b.value));
  const span = max - min || 1;
  const zero = pad + h * (max / span);
  const bw = w / items.length;
  items.forEach((b, i) => {
    const y = pad + h * ((max - Math.max(b.value, 0)) / span);
    ctx.fillStyle = b.color;
    ctx.fillRect(pad + i * bw + 2, y, bw - 4, (Math.abs(b.value) / span) * h);
    ctx.fillStyle = "#333";
    if (labels) ctx.fillText(labels[i], pad + i * bw + 4, canvas.height - 8);
  });
  ctx.strokeStyle = "#888";
  ctx.beginPath();
  ctx.moveTo(pad, zero);
  ctx.lineTo(pad + w, zero);
  ctx.stroke();
}

function doScore() {
  run("score-out", () => {
    const r = JSON.parse(score($("freqs").value, $("grouping").value));
    const rows = [["L1", r.score.l1], ["L2", r.score.l2], ["L3", r.score.l3]]
      .map(([n, l]) => `<tr><th>${n}</th><td>${fmt(l.entropy)}</td><td>${fmt(l.energy)}</td><td>${fmt(l.ratio)}</td></tr>`)
      .join("");
    const sizes = r.check.partition.signature.join(", ");
    $("score-out").innerHTML =
      `<table><tr><th></th><th>entropy</th><th>energy</th><th>ratio</th></tr>${rows}</table>` +
      `<p><b>M = ${fmt(r.score.m)}</b> · t = [${r.decomposition.t}] · w = [${r.decomposition.w}] · d = ${r.decomposition.d}</p>` +
      `<p>Cluster sizes (${sizes}) vs expected (${r.check.expected.join(", ")}): ${r.check.passed ? "pass" : "fail"}</p>`;
    const items = [], labels = [];
    r.check.partition.clusters.forEach((c, k) =>
      c.forEach((v) => {
        items.push({ value: v, color: COLORS[k % COLORS.length] });
        labels.push(v);
      }),
    );
    bars($("score-canvas"), items, labels);
  });
}

function doSweep() {
  run("sweep-out", () => {
    const r = JSON.parse(sweep(Number($("level").value), Number($("start").value), $("grouping").value));
    const top = r.candidates.slice(0, 15);
    const rows = top
      .map(
        (c, i) =>
          `<tr class="pick${c.passed ? "" : " rejected"}" data-i="${i}"><td>${c.rank ?? "–"}</td>` +
          `<td>[${c.pattern.join(", ")}]</td><td>${fmt(c.m)}</td><td>${c.class_rank ?? "–"}</td></tr>`,
      )
      .join("");
    $("sweep-out").innerHTML =
      `<p>${r.enumerated} patterns, ${r.passing} pass the cluster check. Click a row to score it above.</p>` +
      `<table><tr><th>rank</th><th>pattern</th><th>M</th><th>within arrangements</th></tr>${rows}</table>`;
    $("sweep-out").querySelectorAll("tr.pick").forEach((tr) =>
      tr.addEventListener("click", () => {
        const c = top[Number(tr.dataset.i)];
        if (!c.frequencies) return;
        $("freqs").value = c.frequencies.join(", ");
        doScore();
      }),
    );
    const passing = r.candidates.filter((c) => c.passed);
    bars($("sweep-canvas"), passing.map((c, i) => ({ value: c.m, color: i === 0 ? COLORS[1] : COLORS[0] })));
  });
}

function doSpacing() {
  run("spacing-out", () => {
    const count = Number($("count").value), sum = Number($("sum").value);
    const r = JSON.parse(spacing(count, sum, Number($("beta").value)));
    const ranked = r.lab.ranked;
    $("spacing-out").innerHTML = ranked.length
      ? `<p>${ranked.length} multisets. Highest R = ${fmt(ranked[0].r)} for [${ranked[0].values.join(", ")}].</p>` +
        `<table><tr><th>R</th><th>spacings</th></tr>` +
        ranked.slice(0, 8).map((m) => `<tr><td>${fmt(m.r)}</td><td>[${m.values.join(", ")}]</td></tr>`).join("") +
        `</table>`
      : `<p>No multiset of ${count} grid spacings sums to ${sum}.</p>`;
    drawHistogram($("spacing-canvas"), r);
  });
}

// Histogram of the best multiset, with the surmise density scaled to
// expected counts per bin.
function drawHistogram(canvas, r) {
  const ctx = clear(canvas);
  const bins = r.lab.histogram;
  if (!bins.length) return;
  const pad = 30, w = canvas.width - 2 * pad, h = canvas.height - 2 * pad;
  const step = r.lab.step, n = r.lab.count, mean = r.mean;
  const xmax = r.lab.max_value + step;
  const scale = (n * step) / mean;
  const ymax = Math.max(...bins.map((b) => b.count), ...r.surmise.map(([, p]) => p * scale), 1);
  const X = (v) => pad + (v / xmax) * w;
  const Y = (c) => pad + h - (c / ymax) * h;
  ctx.fillStyle = COLORS[0];
  bins.forEach((b) => {
    ctx.fillRect(X(b.value - step / 2) + 1, Y(b.count), (step / xmax) * w - 2, (b.count / ymax) * h);
    ctx.fillStyle = "#333";
    ctx.fillText(b.value, X(b.value) - 6, canvas.height - 8);
    ctx.fillStyle = COLORS[0];
  });
  ctx.strokeStyle = COLORS[3];
  ctx.lineWidth = 2;
  ctx.beginPath();
  r.surmise.forEach(([s, p], i) => {
    const x = X(s * mean), y = Y(p * scale);
    if (x > pad + w) return;
    i ? ctx.lineTo(x, y) : ctx.moveTo(x, y);
  });
  ctx.stroke();
}

await init();
$("score-btn").addEventListener("click", doScore);
$("sweep-btn").addEventListener("click", doSweep);
$("spacing-btn").addEventListener("click", doSpacing);
$("grouping").addEventListener("change", () => { doScore(); doSweep(); });
doScore();
doSweep();
doSpacing();
