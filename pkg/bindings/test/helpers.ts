/** Test-side fixture generators: a minimal PNG encoder, a seeded RNG and a
 *  YOLO-seg label generator, so parity tests need no runtime dependencies. */

import { execFile } from "node:child_process";
import { deflateSync } from "node:zlib";
import { promisify } from "node:util";

const execFileAsync = promisify(execFile);

export function mulberry32(seed: number): () => number {
	let a = seed >>> 0;
	return () => {
		a |= 0;
		a = (a + 0x6d2b79f5) | 0;
		let t = Math.imul(a ^ (a >>> 15), 1 | a);
		t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
		return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
	};
}

const CRC_TABLE = (() => {
	const table = new Uint32Array(256);
	for (let n = 0; n < 256; n++) {
		let c = n;
		for (let k = 0; k < 8; k++) {
			c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
		}
		table[n] = c >>> 0;
	}
	return table;
})();

function crc32(buf: Uint8Array): number {
	let c = 0xffffffff;
	for (const byte of buf) {
		c = CRC_TABLE[(c ^ byte) & 0xff] ^ (c >>> 8);
	}
	return (c ^ 0xffffffff) >>> 0;
}

function chunk(type: string, data: Uint8Array): Buffer {
	const head = Buffer.alloc(8);
	head.writeUInt32BE(data.length, 0);
	head.write(type, 4, "ascii");
	const crc = Buffer.alloc(4);
	crc.writeUInt32BE(crc32(Buffer.concat([head.subarray(4), data])), 0);
	return Buffer.concat([head, data, crc]);
}

/** Encode 8-bit RGB pixels (row-major, 3 bytes per pixel) as a PNG. */
export function encodePng(width: number, height: number, rgb: Uint8Array): Buffer {
	if (rgb.length !== width * height * 3) {
		throw new Error(`pixel buffer is ${rgb.length} bytes, expected ${width * height * 3}`);
	}
	const ihdr = Buffer.alloc(13);
	ihdr.writeUInt32BE(width, 0);
	ihdr.writeUInt32BE(height, 4);
	ihdr[8] = 8; // bit depth
	ihdr[9] = 2; // color type: truecolor
	const raw = Buffer.alloc(height * (1 + width * 3));
	for (let y = 0; y < height; y++) {
		const rowStart = y * (1 + width * 3);
		raw[rowStart] = 0; // filter: none
		rgb.subarray(y * width * 3, (y + 1) * width * 3).forEach((v, i) => {
			raw[rowStart + 1 + i] = v;
		});
	}
	return Buffer.concat([
		Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
		chunk("IHDR", ihdr),
		chunk("IDAT", deflateSync(raw)),
		chunk("IEND", new Uint8Array(0)),
	]);
}

export function randomImage(rand: () => number, width: number, height: number): Buffer {
	const rgb = new Uint8Array(width * height * 3);
	for (let i = 0; i < rgb.length; i++) {
		rgb[i] = Math.floor(rand() * 256);
	}
	return encodePng(width, height, rgb);
}

/** Random valid label text: convex polygons from sorted angles, inside [0, 1]. */
export function randomLabelText(rand: () => number, instances: number): string {
	const lines: string[] = [];
	for (let i = 0; i < instances; i++) {
		const n = 3 + Math.floor(rand() * 6);
		const cx = 0.3 + rand() * 0.4;
		const cy = 0.3 + rand() * 0.4;
		const rx = 0.05 + rand() * 0.2;
		const ry = 0.05 + rand() * 0.2;
		const angles = Array.from({ length: n }, () => rand() * 2 * Math.PI).sort(
			(a, b) => a - b,
		);
		const coords = angles.flatMap((t) => [
			cx + rx * Math.cos(t),
			cy + ry * Math.sin(t),
		]);
		const cls = Math.floor(rand() * 3);
		lines.push(`${cls} ${coords.map((v) => v.toFixed(6)).join(" ")}`);
	}
	return lines.length ? `${lines.join("\n")}\n` : "";
}

export interface CliRun {
	code: number;
	stdout: string;
	stderr: string;
}

/** Direct CLI invocation, for comparing the bindings against. */
export async function runCliDirect(args: string[]): Promise<CliRun> {
	const python = process.env.POLYAUG_PYTHON ?? "python3";
	try {
		const { stdout, stderr } = await execFileAsync(
			python,
			["-m", "polyaug", ...args],
			{ maxBuffer: 64 * 1024 * 1024 },
		);
		return { code: 0, stdout, stderr };
	} catch (err) {
		const e = err as { code?: number; stdout?: string; stderr?: string };
		return { code: e.code ?? -1, stdout: e.stdout ?? "", stderr: e.stderr ?? "" };
	}
}
