/**
 * Text report in the classic benchmark-table shape: one row per
 * (n0, delta) cell, column blocks Independent/Dependent x {Bonferroni, Sidak}
 * x {Original, Modified}, and a MaxSE footer. Values print with 4 decimals;
 * missing cells render blank and are reported as warnings, not crashes.
 */

import { ResultRow, dataRows, distinctSorted, maxSeFooters } from "./csv.js";

export interface Table2Report {
	text: string;
	warnings: string[];
}

const CANONICAL_ORDER = [
	"bonferroni_fdr",
	"modified_bonferroni_fdr",
	"sidak_fdr",
	"modified_sidak_fdr",
];

const FAMILY_HEADER: Record<string, string> = {
	bonferroni_fdr: "Bonferroni",
	modified_bonferroni_fdr: "Bonferroni",
	sidak_fdr: "Sidak",
	modified_sidak_fdr: "Sidak",
};

const VARIANT_HEADER: Record<string, string> = {
	bonferroni_fdr: "Original",
	modified_bonferroni_fdr: "Modified",
	sidak_fdr: "Original",
	modified_sidak_fdr: "Modified",
};

const CELL_WIDTH = 10;
const N0_WIDTH = 4;
const DELTA_WIDTH = 7;

function pad(value: string, width: number): string {
	return value.padStart(width);
}

function center(value: string, width: number): string {
	const extra = Math.max(width - value.length, 0);
	const left = Math.floor(extra / 2);
	return " ".repeat(left) + value + " ".repeat(extra - left);
}

/** Family names centered over runs of columns sharing the same family. */
function familyLineFor(procedures: string[]): string {
	let line = "";
	let i = 0;
	while (i < procedures.length) {
		const family = FAMILY_HEADER[procedures[i]] ?? procedures[i];
		let j = i;
		while (j < procedures.length && (FAMILY_HEADER[procedures[j]] ?? procedures[j]) === family) {
			j++;
		}
		line += center(family, (j - i) * CELL_WIDTH);
		i = j;
	}
	return line;
}

function blockTitle(rho: number): string {
	if (rho === 0) return "Independent (rho = 0)";
	return `Dependent (rho = ${rho})`;
}

export function formatTable2(rows: ResultRow[], metric = "FDR"): Table2Report {
	const warnings: string[] = [];
	const data = dataRows(rows).filter((r) => r.metric === metric);
	if (data.length === 0) {
		throw new Error(`no ${metric} rows in the input CSV`);
	}
	const footers = maxSeFooters(rows);
	const rhos = distinctSorted(data.map((r) => r.rho));
	const n0s = distinctSorted(data.map((r) => r.n0));
	const deltas = distinctSorted(data.map((r) => r.delta));
	const present = new Set(data.map((r) => r.procedure));
	const procedures = [
		...CANONICAL_ORDER.filter((p) => present.has(p)),
		...[...present].filter((p) => !CANONICAL_ORDER.includes(p)).sort(),
	];

	const byCell = new Map<string, ResultRow>();
	for (const row of data) {
		byCell.set(`${row.rho}|${row.n0}|${row.delta}|${row.procedure}`, row);
	}

	const blockWidth = procedures.length * CELL_WIDTH;
	const stub = " ".repeat(N0_WIDTH + DELTA_WIDTH);

	const lines: string[] = [];
	lines.push(
		stub + rhos.map((rho) => pad(blockTitle(rho), blockWidth)).join(""),
	);
	const familyLine = familyLineFor(procedures);
	lines.push(stub + rhos.map(() => familyLine).join(""));
	const variantLine = procedures
		.map((p) => pad(VARIANT_HEADER[p] ?? "", CELL_WIDTH))
		.join("");
	lines.push(pad("n0", N0_WIDTH) + pad("delta", DELTA_WIDTH) + rhos.map(() => variantLine).join(""));

	for (const n0 of n0s) {
		for (const delta of deltas) {
			let line = pad(String(n0), N0_WIDTH) + pad(String(delta), DELTA_WIDTH);
			for (const rho of rhos) {
				for (const procedure of procedures) {
					const cell = byCell.get(`${rho}|${n0}|${delta}|${procedure}`);
					if (cell === undefined) {
						warnings.push(`missing cell: rho=${rho} n0=${n0} delta=${delta} ${procedure}`);
						line += pad("", CELL_WIDTH);
					} else {
						line += pad(cell.mean.toFixed(4), CELL_WIDTH);
					}
				}
			}
			lines.push(line);
		}
	}

	if (footers.size > 0) {
		let line = pad("", N0_WIDTH) + pad("MaxSE", DELTA_WIDTH);
		for (const rho of rhos) {
			for (const procedure of procedures) {
				const value = footers.get(`${rho}|${procedure}`);
				if (value === undefined) {
					warnings.push(`missing MaxSE footer: rho=${rho} ${procedure}`);
					line += pad("", CELL_WIDTH);
				} else {
					line += pad(value.toFixed(4), CELL_WIDTH);
				}
			}
		}
		lines.push(line);
	}

	return { text: lines.join("\n") + "\n", warnings };
}
