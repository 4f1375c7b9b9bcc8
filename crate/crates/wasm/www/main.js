import init, { coefficient, equidistribution, convergence } from "./pkg/boundary_rep_wasm.js";

const $ = (id) => document.getElementById(id);

function table(columns, rows) {
  const head = "<tr>" + columns.map((c) => `<th>${c}</th>`).join("") + "</tr>";
  const body = rows
    .map((r) => "<tr>" + r.map((x) => `<td>${x}</td>`).join("") + "</tr>")
    .join("");
  return `<table>${head}${body}</table>`;
}

function guard(out, f) {
  try {
    out.innerHTML = f();
  } catch (e) {
    out.innerHTML = `<p class="err">${e}</p>`;
  }
}

await init();

$("coef-run").onclick = () =>
  guard($("coef-out"), () => {
    const r = JSON.parse(coefficient($("coef-gamma").value, $("coef-u").value, $("coef-v").value));
    return table(["γ", "|γ|", "value", "exact"], [[r.gamma || "e", r.length, r.value.decimal, r.value.exact]]);
  });

$("eq-run").onclick = () =>
  guard($("eq-out"), () => {
    const rows = JSON.parse(equidistribution($("eq-u").value, $("eq-up").value, Number($("eq-t").value)));
    return table(
      ["t", "|S_t|", "count", "frequency", "target", "|error|", "transfer count agrees"],
      rows.map((r) => [r.t, r.s_t_size, r.count, r.freq.decimal, r.target.exact, r.abs_error.float.toExponential(3),
        r.transfer_agrees === null ? "" : r.transfer_agrees]),
    );
  });

$("cv-run").onclick = () =>
  guard($("cv-out"), () => {
    const rows = JSON.parse(
      convergence($("cv-u").value, $("cv-v").value, $("cv-w").value, Number($("cv-t").value)),
    );
    return table(
      ["t", "|S_t|", "value", "target", "|error|"],
      rows.map((r) => [r.t, r.s_t_size, r.value.decimal, r.target.exact, r.abs_error.float.toExponential(3)]),
    );
  });
