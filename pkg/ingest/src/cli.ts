#!/usr/bin/env node
/**
 * ffd-ingest convert --in DIR --out manifest.jsonl [--report stats.json]
 *                    [--format ffd|coco] [--fps 30] [--min-confidence 0.0]
 *                    [--check-reference]
 *
 * ffd mode walks IN/<fencer>/<action>/*.mat Kinect body recordings; coco
 * mode reads IN/*.json single-person keypoint files. --check-reference
 * verifies the converted corpus against the published dataset statistics
 * (video counts and frame ranges per action) and fails on any mismatch.
 */

import * as fs from "fs";
import * as path from "path";

import { CocoVideo, convertCocoVideo } from "./coco";
import { convertFfdDirectory } from "./convert";
import { checkAgainstReference, summarize, writeManifest, ManifestRecord } from "./manifest";

interface Args {
  [key: string]: string | boolean;
}

function parseArgs(argv: string[]): { command: string; args: Args } {
  const command = argv[0] ?? "";
  const args: Args = {};
  for (let i = 1; i < argv.length; i++) {
    const token = argv[i];
    if (!token.startsWith("--")) continue;
    const key = token.slice(2);
    const next = argv[i + 1];
    if (next !== undefined && !next.startsWith("--")) {
      args[key] = next;
      i++;
    } else {
      args[key] = true;
    }
  }
  return { command, args };
}

function fail(message: string): never {
  process.stderr.write(`error: ${message}\n`);
  process.exit(2);
}

export function main(argv: string[]): number {
  const { command, args } = parseArgs(argv);
  if (command !== "convert") {
    process.stderr.write(
      "usage: ffd-ingest convert --in DIR --out manifest.jsonl " +
      "[--report stats.json] [--format ffd|coco] [--check-reference]\n");
    return command === "" || command === "help" || command === "--help" ? 0 : 2;
  }
  const inputDir = args["in"];
  const outPath = args["out"];
  if (typeof inputDir !== "string") fail("--in DIR is required");
  if (typeof outPath !== "string") fail("--out FILE is required");
  if (!fs.existsSync(inputDir)) fail(`input directory not found: ${inputDir}`);
  const format = typeof args["format"] === "string" ? args["format"] : "ffd";
  const fps = typeof args["fps"] === "string" ? Number(args["fps"]) : 30;

  let records: ManifestRecord[];
  let skipped: { file: string; reason: string }[] = [];
  if (format === "ffd") {
    const result = convertFfdDirectory(inputDir as string, {
      fps,
      log: (msg) => process.stderr.write(msg + "\n"),
    });
    records = result.records;
    skipped = result.summary.skipped;
  } else if (format === "coco") {
    const threshold = typeof args["min-confidence"] === "string"
      ? Number(args["min-confidence"]) : 0.0;
    records = [];
    const files = fs.readdirSync(inputDir as string)
      .filter((f) => f.endsWith(".json")).sort();
    for (const file of files) {
      const body = JSON.parse(fs.readFileSync(path.join(inputDir as string, file), "utf-8"));
      const videos: CocoVideo[] = Array.isArray(body) ? body : [body];
      for (const video of videos) {
        records.push(convertCocoVideo(video, threshold));
      }
    }
  } else {
    fail(`unknown format ${format}; expected ffd or coco`);
  }

  const summary = summarize(records, skipped);
  fs.mkdirSync(path.dirname(path.resolve(outPath as string)), { recursive: true });
  fs.writeFileSync(outPath as string, writeManifest(records));
  if (typeof args["report"] === "string") {
    fs.writeFileSync(args["report"] as string, JSON.stringify(summary, null, 2) + "\n");
  }
  process.stderr.write(`wrote ${records.length} videos to ${outPath}` +
    (skipped.length ? ` (${skipped.length} skipped)` : "") + "\n");

  if (args["check-reference"]) {
    const problems = checkAgainstReference(summary);
    if (problems.length > 0) {
      for (const problem of problems) {
        process.stderr.write(`reference mismatch: ${problem}\n`);
      }
      return 1;
    }
    process.stderr.write("reference statistics check: ok\n");
  }
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
