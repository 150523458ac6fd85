import assert from "node:assert/strict";
import { spawnSync } from "child_process";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { test } from "node:test";

import { main } from "../src/cli";
import { kinectTrack, writeMat } from "./helpers";

function fixtureTree(videos: [string, string, string, number][]): string {
  const root = fs.mkdtempSync(path.join(os.tmpdir(), "ffd-cli-"));
  for (const [fencer, action, file, frames] of videos) {
    const dir = path.join(root, fencer, action);
    fs.mkdirSync(dir, { recursive: true });
    fs.writeFileSync(path.join(dir, file), writeMat([kinectTrack(frames)]));
  }
  return root;
}

const TREE: [string, string, string, number][] = [
  ["fencer_01", "R", "a.Body.mat", 40],
  ["fencer_01", "IS", "b.Body.mat", 49],
  ["fencer_02", "SB", "c.Body.mat", 30],
];

test("convert writes manifest and report", () => {
  const root = fixtureTree(TREE);
  const out = path.join(root, "manifest.jsonl");
  const report = path.join(root, "stats.json");
  const code = main(["convert", "--in", root, "--out", out, "--report", report]);
  assert.equal(code, 0);
  const lines = fs.readFileSync(out, "utf-8").trim().split("\n");
  assert.equal(lines.length, 3);
  for (const line of lines) {
    const record = JSON.parse(line);
    assert.equal(record.joints.length, 13);
    assert.ok(record.frames.length >= 28);
  }
  const stats = JSON.parse(fs.readFileSync(report, "utf-8"));
  assert.equal(stats.videos, 3);
  assert.equal(stats.perAction["R"].count, 1);
});

test("check-reference fails on a corpus that is not the full dataset", () => {
  const root = fixtureTree(TREE);
  const out = path.join(root, "manifest.jsonl");
  const code = main(["convert", "--in", root, "--out", out, "--check-reference"]);
  assert.equal(code, 1);
});

test("missing input directory exits 2", () => {
  const result = spawnSync(process.execPath, [
    path.join(__dirname, "..", "src", "cli.js"),
    "convert", "--in", "/nonexistent-dir", "--out", "/tmp/x.jsonl",
  ], { encoding: "utf-8" });
  assert.equal(result.status, 2);
  assert.match(result.stderr, /not found/);
});

test("converted manifest validates with the classifier pipeline", (t) => {
  const probe = spawnSync("python3", ["-c", "import fencenet"], { encoding: "utf-8" });
  if (probe.status !== 0) {
    t.skip("fencenet python package not importable");
    return;
  }
  const root = fixtureTree(TREE);
  const out = path.join(root, "manifest.jsonl");
  assert.equal(main(["convert", "--in", root, "--out", out]), 0);
  const result = spawnSync("python3", ["-m", "fencenet.cli", "validate", "--manifest", out],
    { encoding: "utf-8" });
  assert.equal(result.status, 0, result.stderr);
  const summary = JSON.parse(result.stdout);
  assert.equal(summary.videos, 3);
  assert.equal(summary.frames_min, 30);
});
