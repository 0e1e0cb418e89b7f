/**
 * Strict parser for the simulation CSV emitted by the fdrcontrol CLI.
 *
 * Schema (fixed by the producer):
 *   scenario_id,n,n0,delta,rho,procedure,metric,mean,se,iterations,seed
 * MaxSE footer rows use scenario_id = -1, n0 = -1, delta = nan, metric MAXSE.
 *
 * No column inference: a missing required column is an error, so schema drift
 * between the components surfaces immediately.
 */

export interface ResultRow {
	scenarioId: number;
	n: number;
	n0: number;
	delta: number;
	rho: number;
	procedure: string;
	metric: string;
	mean: number;
	se: number;
	iterations: number;
	seed: number;
}

export const REQUIRED_COLUMNS = [
	"scenario_id",
	"n",
	"n0",
	"delta",
	"rho",
	"procedure",
	"metric",
	"mean",
	"se",
	"iterations",
	"seed",
] as const;

export class CsvSchemaError extends Error {}

function parseNumber(raw: string, column: string, line: number, allowNan = false): number {
	if (raw === "nan" || raw === "-nan") {
		if (allowNan) return Number.NaN;
		throw new CsvSchemaError(`line ${line}: column '${column}' must be a finite number, got nan`);
	}
	const value = Number(raw);
	if (Number.isNaN(value)) {
		throw new CsvSchemaError(`line ${line}: column '${column}' is not numeric: '${raw}'`);
	}
	return value;
}

function parseInteger(raw: string, column: string, line: number): number {
	const value = parseNumber(raw, column, line);
	if (!Number.isInteger(value)) {
		throw new CsvSchemaError(`line ${line}: column '${column}' must be an integer, got '${raw}'`);
	}
	return value;
}

export function parseResultsCsv(text: string): ResultRow[] {
	const lines = text.split(/\r?\n/).filter((ln) => ln.length > 0);
	if (lines.length === 0) {
		throw new CsvSchemaError("empty CSV: no header line");
	}
	const header = lines[0].split(",");
	const index = new Map<string, number>();
	header.forEach((name, i) => index.set(name, i));
	for (const column of REQUIRED_COLUMNS) {
		if (!index.has(column)) {
			throw new CsvSchemaError(`missing required column '${column}'`);
		}
	}
	const at = (fields: string[], column: string) => fields[index.get(column)!];
	const rows: ResultRow[] = [];
	for (let i = 1; i < lines.length; i++) {
		const fields = lines[i].split(",");
		if (fields.length !== header.length) {
			throw new CsvSchemaError(`line ${i + 1}: expected ${header.length} fields, got ${fields.length}`);
		}
		rows.push({
			scenarioId: parseInteger(at(fields, "scenario_id"), "scenario_id", i + 1),
			n: parseInteger(at(fields, "n"), "n", i + 1),
			n0: parseInteger(at(fields, "n0"), "n0", i + 1),
			delta: parseNumber(at(fields, "delta"), "delta", i + 1, true),
			rho: parseNumber(at(fields, "rho"), "rho", i + 1),
			procedure: at(fields, "procedure"),
			metric: at(fields, "metric"),
			mean: parseNumber(at(fields, "mean"), "mean", i + 1),
			se: parseNumber(at(fields, "se"), "se", i + 1),
			iterations: parseInteger(at(fields, "iterations"), "iterations", i + 1),
			seed: parseInteger(at(fields, "seed"), "seed", i + 1),
		});
	}
	return rows;
}

/** Data rows only (MaxSE footers excluded). */
export function dataRows(rows: ResultRow[]): ResultRow[] {
	return rows.filter((r) => r.metric !== "MAXSE");
}

/** MaxSE footer rows keyed by `${rho}|${procedure}`. */
export function maxSeFooters(rows: ResultRow[]): Map<string, number> {
	const out = new Map<string, number>();
	for (const row of rows) {
		if (row.metric === "MAXSE") {
			out.set(`${row.rho}|${row.procedure}`, row.mean);
		}
	}
	return out;
}

export function distinctSorted(values: number[]): number[] {
	return [...new Set(values)].sort((a, b) => a - b);
}
