/**
 * SVG renderer for power/error-rate comparisons: one panel per (rho, n0)
 * combination, the shift delta on the x axis, one series per procedure with
 * markers and +-1 SE error bars. Output is deterministic for a given input.
 */

import { ResultRow, dataRows, distinctSorted } from "./csv.js";

export interface PanelSpec {
	metric: "FDR" | "FNR" | "POWER";
}

const SERIES_ORDER = [
	"bonferroni_fdr",
	"modified_bonferroni_fdr",
	"sidak_fdr",
	"modified_sidak_fdr",
];

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"];

const PANEL_WIDTH = 280;
const PANEL_HEIGHT = 190;
const MARGIN = { left: 52, right: 16, top: 28, bottom: 34 };
const LEGEND_HEIGHT = 26;

function fmt(value: number): string {
	return value.toFixed(2);
}

interface Scale {
	(value: number): number;
}

function linearScale(domain: [number, number], range: [number, number]): Scale {
	const span = domain[1] - domain[0] || 1;
	return (value) => range[0] + ((value - domain[0]) / span) * (range[1] - range[0]);
}

function escapeXml(text: string): string {
	return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderPowerPanels(rows: ResultRow[], spec: PanelSpec): string {
	if (!["FDR", "FNR", "POWER"].includes(spec.metric)) {
		throw new Error(`unsupported metric '${spec.metric}'`);
	}
	const data = dataRows(rows).filter((r) => r.metric === spec.metric);
	if (data.length === 0) {
		throw new Error(`empty selection: no ${spec.metric} rows in the input CSV`);
	}
	const rhos = distinctSorted(data.map((r) => r.rho));
	const n0s = distinctSorted(data.map((r) => r.n0));
	const present = new Set(data.map((r) => r.procedure));
	const series = [
		...SERIES_ORDER.filter((p) => present.has(p)),
		...[...present].filter((p) => !SERIES_ORDER.includes(p)).sort(),
	];
	const color = new Map(series.map((p, i) => [p, PALETTE[i % PALETTE.length]]));

	const width = MARGIN.left + rhos.length * PANEL_WIDTH + MARGIN.right;
	const height = LEGEND_HEIGHT + MARGIN.top + n0s.length * PANEL_HEIGHT + MARGIN.bottom;

	const parts: string[] = [];
	parts.push(
		`<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
	);
	parts.push(
		"<style>text{font-family:Helvetica,Arial,sans-serif;font-size:10px;fill:#222}" +
			".title{font-size:11px;font-weight:bold}.frame{fill:none;stroke:#444;stroke-width:1}" +
			".tick{stroke:#444;stroke-width:1}.errorbar{stroke-width:1.2}</style>",
	);
	parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);

	// legend
	let lx = MARGIN.left;
	parts.push('<g class="legend">');
	for (const procedure of series) {
		const c = color.get(procedure)!;
		parts.push(`<line x1="${lx}" y1="14" x2="${lx + 18}" y2="14" stroke="${c}" stroke-width="2"/>`);
		parts.push(`<text x="${lx + 22}" y="17">${escapeXml(procedure)}</text>`);
		lx += 30 + procedure.length * 6;
	}
	parts.push("</g>");

	for (let row = 0; row < n0s.length; row++) {
		for (let col = 0; col < rhos.length; col++) {
			const n0 = n0s[row];
			const rho = rhos[col];
			const cell = data.filter((r) => r.n0 === n0 && r.rho === rho);
			if (cell.length === 0) continue;
			const originX = MARGIN.left + col * PANEL_WIDTH;
			const originY = LEGEND_HEIGHT + MARGIN.top + row * PANEL_HEIGHT;
			const innerW = PANEL_WIDTH - 46;
			const innerH = PANEL_HEIGHT - 52;

			const deltas = distinctSorted(cell.map((r) => r.delta));
			const xDomain: [number, number] =
				deltas.length > 1 ? [deltas[0], deltas[deltas.length - 1]] : [deltas[0] - 0.5, deltas[0] + 0.5];
			const lows = cell.map((r) => r.mean - r.se);
			const highs = cell.map((r) => r.mean + r.se);
			let yMin = Math.min(...lows);
			let yMax = Math.max(...highs);
			if (yMax - yMin < 1e-9) {
				yMin -= 0.05;
				yMax += 0.05;
			}
			const yPad = (yMax - yMin) * 0.08;
			const x = linearScale(xDomain, [originX + 8, originX + innerW]);
			const y = linearScale([yMin - yPad, yMax + yPad], [originY + innerH, originY + 8]);

			parts.push(`<g class="panel" data-rho="${rho}" data-n0="${n0}">`);
			parts.push(
				`<rect class="frame" x="${originX}" y="${originY}" width="${innerW + 8}" height="${innerH + 8}"/>`,
			);
			parts.push(
				`<text class="title" x="${originX + 4}" y="${originY - 6}">rho=${rho}, n0=${n0}</text>`,
			);
			// x ticks at the observed deltas
			for (const d of deltas) {
				const tx = fmt(x(d));
				parts.push(
					`<line class="tick" x1="${tx}" y1="${fmt(originY + innerH + 8)}" x2="${tx}" y2="${fmt(originY + innerH + 12)}"/>`,
				);
				parts.push(
					`<text x="${tx}" y="${fmt(originY + innerH + 22)}" text-anchor="middle">${d}</text>`,
				);
			}
			// y ticks: 4 evenly spaced values
			for (let k = 0; k <= 3; k++) {
				const value = yMin - yPad + ((yMax + 2 * yPad - yMin) * k) / 3;
				const ty = fmt(y(value));
				parts.push(
					`<line class="tick" x1="${fmt(originX - 4)}" y1="${ty}" x2="${originX}" y2="${ty}"/>`,
				);
				parts.push(
					`<text x="${fmt(originX - 6)}" y="${ty}" text-anchor="end" dominant-baseline="middle">${value.toFixed(3)}</text>`,
				);
			}
			for (const procedure of series) {
				const pts = cell
					.filter((r) => r.procedure === procedure)
					.sort((a, b) => a.delta - b.delta);
				if (pts.length === 0) continue;
				const c = color.get(procedure)!;
				parts.push(`<g class="series" data-procedure="${escapeXml(procedure)}">`);
				if (pts.length > 1) {
					const coords = pts.map((r) => `${fmt(x(r.delta))},${fmt(y(r.mean))}`).join(" ");
					parts.push(`<polyline fill="none" stroke="${c}" stroke-width="1.5" points="${coords}"/>`);
				}
				for (const r of pts) {
					const cx = fmt(x(r.delta));
					parts.push(
						`<line class="errorbar" stroke="${c}" x1="${cx}" y1="${fmt(y(r.mean - r.se))}" x2="${cx}" y2="${fmt(y(r.mean + r.se))}"/>`,
					);
					parts.push(`<circle cx="${cx}" cy="${fmt(y(r.mean))}" r="2.4" fill="${c}"/>`);
				}
				parts.push("</g>");
			}
			parts.push("</g>");
		}
	}
	parts.push("</svg>");
	return parts.join("\n") + "\n";
}
