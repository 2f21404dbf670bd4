// Wires the page controls to the wasm exports generated into ./pkg.
import init, { fieldModulus, tripleDensity, capPair, arcLength } from "./pkg/curvext_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function report(err) {
  $("error").textContent = err ? String(err.message ?? err) : "";
}

// Greyscale-to-heat colour map on [0, 1].
function heat(v) {
  const r = Math.min(255, Math.round(765 * v));
  const g = Math.min(255, Math.max(0, Math.round(765 * v - 255)));
  const b = Math.min(255, Math.max(0, Math.round(765 * v - 510)));
  return [r, g, b];
}

// Draws row-major values with x slow; t increases upward on screen.
function paint(canvas, values, n) {
  canvas.width = n;
  canvas.height = n;
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(n, n);
  const max = values.reduce((m, v) => Math.max(m, v), 0) || 1;
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const [r, g, b] = heat(values[i * n + j] / max);
      const p = 4 * ((n - 1 - j) * n + i);
      img.data[p] = r;
      img.data[p + 1] = g;
      img.data[p + 2] = b;
      img.data[p + 3] = 255;
    }
  }
  ctx.putImageData(img, 0, 0);
  return max;
}

function updateArc() {
  try {
    $("length").textContent = arcLength($("curve").value).toFixed(6);
    report(null);
  } catch (e) {
    report(e);
  }
}

function runField() {
  try {
    const n = Math.round(num("n"));
    const half = num("half");
    const v = fieldModulus($("curve").value, $("density").value, $("measure").value, half, n);
    const max = paint($("field"), v, n);
    $("field-info").textContent = `window [-${half}, ${half}]², max |f̂σ| = ${max.toPrecision(6)}`;
    report(null);
  } catch (e) {
    report(e);
  }
}

function runTriple() {
  try {
    const n = Math.round(num("cells"));
    const out = tripleDensity($("curve").value, $("density").value, $("measure").value, n);
    const [x0, x1, t0, t1] = out.slice(0, 4);
    const max = paint($("triple"), out.slice(4), n);
    $("triple-info").textContent =
      `x ∈ [${x0.toFixed(3)}, ${x1.toFixed(3)}], t ∈ [${t0.toFixed(3)}, ${t1.toFixed(3)}], max = ${max.toPrecision(6)}`;
    report(null);
  } catch (e) {
    report(e);
  }
}

function runCaps() {
  try {
    const [d, i, n] = capPair($("curve").value, num("c1"), num("r1"), num("c2"), num("r2"));
    $("dist").textContent = d.toPrecision(6);
    $("inter").textContent = i.toPrecision(6);
    $("norm").textContent = n.toPrecision(6);
    report(null);
  } catch (e) {
    report(e);
  }
}

await init();
$("curve").addEventListener("change", () => { updateArc(); runCaps(); });
$("run-field").addEventListener("click", runField);
$("run-triple").addEventListener("click", runTriple);
for (const id of ["c1", "r1", "c2", "r2"]) $(id).addEventListener("input", runCaps);
updateArc();
runCaps();
runField();
