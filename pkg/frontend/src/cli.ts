#!/usr/bin/env node
/**
 * Rendering CLI for fdrcontrol result CSVs. Read-only over its input.
 *
 *   render --csv results.csv --metric POWER --out fig1.svg
 *   report --csv t2.csv [--metric FDR] [--out table2.txt]
 *
 * Exit codes: 0 success, 2 usage error, 3 runtime error.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { parseResultsCsv } from "./csv.js";
import { renderPowerPanels } from "./panels.js";
import { formatTable2 } from "./table.js";

class UsageError extends Error {}

function parseFlags(argv: string[], allowed: string[]): Map<string, string> {
	const flags = new Map<string, string>();
	for (let i = 0; i < argv.length; i += 2) {
		const name = argv[i];
		if (!name.startsWith("--")) {
			throw new UsageError(`unexpected argument '${name}'`);
		}
		const key = name.slice(2);
		if (!allowed.includes(key)) {
			throw new UsageError(`unknown flag '--${key}'`);
		}
		const value = argv[i + 1];
		if (value === undefined) {
			throw new UsageError(`flag '--${key}' needs a value`);
		}
		flags.set(key, value);
	}
	return flags;
}

function required(flags: Map<string, string>, key: string): string {
	const value = flags.get(key);
	if (value === undefined) {
		throw new UsageError(`missing required flag '--${key}'`);
	}
	return value;
}

function runRender(argv: string[]): number {
	const flags = parseFlags(argv, ["csv", "metric", "out"]);
	const csvPath = required(flags, "csv");
	const metric = (flags.get("metric") ?? "POWER") as "FDR" | "FNR" | "POWER";
	const outPath = required(flags, "out");
	if (outPath.toLowerCase().endsWith(".png")) {
		throw new UsageError("PNG rasterization is unavailable headless; pass a .svg output path");
	}
	const rows = parseResultsCsv(readFileSync(csvPath, "utf-8"));
	const svg = renderPowerPanels(rows, { metric });
	writeFileSync(outPath, svg, "utf-8");
	return 0;
}

function runReport(argv: string[]): number {
	const flags = parseFlags(argv, ["csv", "metric", "out"]);
	const csvPath = required(flags, "csv");
	const rows = parseResultsCsv(readFileSync(csvPath, "utf-8"));
	const { text, warnings } = formatTable2(rows, flags.get("metric") ?? "FDR");
	for (const warning of warnings) {
		process.stderr.write(`warning: ${warning}\n`);
	}
	const outPath = flags.get("out");
	if (outPath === undefined) {
		process.stdout.write(text);
	} else {
		writeFileSync(outPath, text, "utf-8");
	}
	return 0;
}

export function main(argv: string[]): number {
	try {
		const [command, ...rest] = argv;
		if (command === "render") return runRender(rest);
		if (command === "report") return runReport(rest);
		throw new UsageError(`usage: fdrcontrol-reports <render|report> --csv <path> [...]`);
	} catch (err) {
		if (err instanceof UsageError) {
			process.stderr.write(`error: ${err.message}\n`);
			return 2;
		}
		process.stderr.write(`error: ${err instanceof Error ? err.message : String(err)}\n`);
		return 3;
	}
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
	process.exit(main(process.argv.slice(2)));
}
