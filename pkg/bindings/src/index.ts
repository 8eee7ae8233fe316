/**
 * Node bindings for the polyaug polygon-annotation augmentation tool.
 *
 * The boundary is text and bytes: PNG bytes in, PNG bytes out, YOLO-seg
 * label text in and out. Work is delegated to the polyaug CLI, so results
 * are byte-for-byte identical to running it directly with the same inputs,
 * transforms and seed.
 */

import { execFile } from "node:child_process";
import { mkdir, mkdtemp, readFile, rm, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import * as path from "node:path";
import { promisify } from "node:util";

const execFileAsync = promisify(execFile);

/** Stem used for the synthetic single-file dataset behind augment().
 *  Part of the contract: the CLI derives per-file randomness from
 *  (seed, stem), so a fixed stem keeps augment() reproducible. */
export const SINGLE_ITEM_STEM = "item";

export interface CliOptions {
	/** Python interpreter running the core (default: $POLYAUG_PYTHON or "python3"). */
	python?: string;
}

export interface AugmentOptions extends CliOptions {
	/** Retained-area threshold in [0, 1]; instances below it are dismissed. Default 0. */
	threshold?: number;
	/** Seed for randomized transform parameters (e.g. rotate ranges). Default 0. */
	seed?: number;
	/** Clamp out-of-range label coordinates instead of failing. */
	lenient?: boolean;
}

export interface AugmentResult {
	/** PNG bytes of the transformed image. */
	imageBytes: Buffer;
	/** YOLO-seg text of the surviving instances. */
	labelText: string;
	keptCount: number;
	dismissedCount: number;
}

export interface FileOutcome {
	stem: string;
	kept: number;
	dismissed: number;
}

export interface DatasetSummary {
	processed: number;
	failed: number;
	files: FileOutcome[];
	/** Per-file error lines for failed inputs, verbatim from the core. */
	errors: string[];
}

/** Raised when the core reports an error; message is the core's own text. */
export class AugmentError extends Error {
	constructor(
		message: string,
		readonly exitCode: number | null,
		readonly stderr: string,
	) {
		super(message);
		this.name = "AugmentError";
	}
}

interface RunResult {
	code: number;
	stdout: string;
	stderr: string;
}

function interpreter(options: CliOptions): string {
	return options.python ?? process.env.POLYAUG_PYTHON ?? "python3";
}

async function runCli(args: string[], options: CliOptions): Promise<RunResult> {
	try {
		const { stdout, stderr } = await execFileAsync(
			interpreter(options),
			["-m", "polyaug", ...args],
			{ maxBuffer: 64 * 1024 * 1024 },
		);
		return { code: 0, stdout, stderr };
	} catch (err) {
		const e = err as NodeJS.ErrnoException & {
			code?: number | string;
			stdout?: string;
			stderr?: string;
		};
		if (typeof e.code === "number" && e.stdout !== undefined) {
			return { code: e.code, stdout: e.stdout, stderr: e.stderr ?? "" };
		}
		throw new AugmentError(
			`failed to launch the polyaug CLI: ${e.message}`,
			null,
			e.stderr ?? "",
		);
	}
}

function normalizeTransforms(transforms: string | readonly string[]): string[] {
	const list =
		typeof transforms === "string"
			? transforms.split(/\s+/).filter((t) => t.length > 0)
			: [...transforms];
	return list;
}

function buildArgs(
	imagesDir: string,
	labelsDir: string,
	outDir: string,
	transforms: string | readonly string[],
	options: AugmentOptions,
): string[] {
	const args = [
		"augment",
		"--images",
		imagesDir,
		"--labels",
		labelsDir,
		"--out",
		outDir,
		"--threshold",
		String(options.threshold ?? 0),
		"--seed",
		String(options.seed ?? 0),
	];
	for (const t of normalizeTransforms(transforms)) {
		args.push("--transform", t);
	}
	if (options.lenient) {
		args.push("--lenient");
	}
	return args;
}

function parseSummary(stdout: string): FileOutcome[] {
	const outcomes: FileOutcome[] = [];
	const line = /^(.+): kept (\d+) dismissed (\d+)$/gm;
	for (const m of stdout.matchAll(line)) {
		outcomes.push({
			stem: m[1],
			kept: Number(m[2]),
			dismissed: Number(m[3]),
		});
	}
	return outcomes;
}

function coreErrorText(result: RunResult): string {
	const lines = result.stderr
		.split("\n")
		.map((l) => l.trim())
		.filter((l) => l.length > 0);
	return lines.at(-1) ?? `polyaug exited with code ${result.code}`;
}

/**
 * Augment one image plus its YOLO-seg label text.
 *
 * `transforms` uses the CLI's spec syntax ("vflip", "rotate=30",
 * "rotate=-30..30", "crop=x0,y0,w,h"), either one string (whitespace
 * separated) or an array applied in order.
 */
export async function augment(
	imageBytes: Uint8Array,
	labelText: string,
	transforms: string | readonly string[],
	options: AugmentOptions = {},
): Promise<AugmentResult> {
	const work = await mkdtemp(path.join(tmpdir(), "polyaug-"));
	try {
		const imagesDir = path.join(work, "images");
		const labelsDir = path.join(work, "labels");
		const outDir = path.join(work, "out");
		await mkdir(imagesDir);
		await mkdir(labelsDir);
		await writeFile(path.join(imagesDir, `${SINGLE_ITEM_STEM}.png`), imageBytes);
		await writeFile(path.join(labelsDir, `${SINGLE_ITEM_STEM}.txt`), labelText);

		const result = await runCli(
			buildArgs(imagesDir, labelsDir, outDir, transforms, options),
			options,
		);
		if (result.code !== 0) {
			throw new AugmentError(coreErrorText(result), result.code, result.stderr);
		}
		const summary = parseSummary(result.stdout).find(
			(o) => o.stem === SINGLE_ITEM_STEM,
		);
		if (!summary) {
			throw new AugmentError(
				"no per-file summary in CLI output",
				result.code,
				result.stderr,
			);
		}
		const outImage = await readFile(
			path.join(outDir, "images", `${SINGLE_ITEM_STEM}_aug.png`),
		);
		const outLabel = await readFile(
			path.join(outDir, "labels", `${SINGLE_ITEM_STEM}_aug.txt`),
			"utf8",
		);
		return {
			imageBytes: outImage,
			labelText: outLabel,
			keptCount: summary.kept,
			dismissedCount: summary.dismissed,
		};
	} finally {
		await rm(work, { recursive: true, force: true });
	}
}

/**
 * Augment a whole images/labels directory pair into `outDir`, mirroring the
 * CLI's batch behavior: failed files are reported and skipped, everything
 * else is written. Throws only on usage errors or launch failure.
 */
export async function augmentDataset(
	imagesDir: string,
	labelsDir: string,
	outDir: string,
	transforms: string | readonly string[],
	threshold = 0,
	seed = 0,
	options: CliOptions = {},
): Promise<DatasetSummary> {
	const result = await runCli(
		buildArgs(imagesDir, labelsDir, outDir, transforms, {
			...options,
			threshold,
			seed,
		}),
		options,
	);
	if (result.code !== 0 && result.code !== 1) {
		throw new AugmentError(coreErrorText(result), result.code, result.stderr);
	}
	const files = parseSummary(result.stdout);
	const errors = result.stderr
		.split("\n")
		.map((l) => l.trim())
		.filter((l) => /: ERROR /.test(l));
	return {
		processed: files.length + errors.length,
		failed: errors.length,
		files,
		errors,
	};
}
