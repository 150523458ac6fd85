import assert from "node:assert/strict";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { test } from "node:test";

import { convertFfdDirectory, parseActionName, parseFencerName } from "../src/convert";
import { checkAgainstReference, summarize, writeManifest, FFD_REFERENCE } from "../src/manifest";
import { kinectTrack, writeMat } from "./helpers";

function makeFixtureTree(): string {
  const root = fs.mkdtempSync(path.join(os.tmpdir(), "ffd-fixture-"));
  const layout: [string, string, string, number][] = [
    ["fencer_01", "R", "2016-01-09_10-00-00.Body.mat", 40],
    ["fencer_01", "R", "2016-01-09_10-01-00.Body.mat", 44],
    ["fencer_01", "SB", "2016-01-09_10-02-00.Body.mat", 28],
    ["fencer_02", "step_forward", "2016-01-10_09-00-00.Body.mat", 33],
    ["fencer_02", "R", "2016-01-10_09-01-00.Body.mat", 52],
  ];
  for (const [fencer, action, file, frames] of layout) {
    const dir = path.join(root, fencer, action);
    fs.mkdirSync(dir, { recursive: true });
    fs.writeFileSync(path.join(dir, file), writeMat([kinectTrack(frames)], true));
  }
  // the known-empty recording: present on disk, absent from the manifest
  const emptyDir = path.join(root, "fencer_05", "SF");
  fs.mkdirSync(emptyDir, { recursive: true });
  fs.writeFileSync(path.join(emptyDir, "2016-01-09_12-51-53.Body.mat"),
    writeMat([{ name: "skeleton", dims: [0, 60], values: [] }]));
  return root;
}

test("name parsing", () => {
  assert.equal(parseFencerName("fencer_07"), 7);
  assert.equal(parseFencerName("p3"), 3);
  assert.equal(parseFencerName("10"), 10);
  assert.equal(parseFencerName("misc"), null);
  assert.equal(parseActionName("R"), "R");
  assert.equal(parseActionName("step_forward"), "SF");
  assert.equal(parseActionName("With Waiting"), "WW");
  assert.equal(parseActionName("unknown"), null);
});

test("converts a directory tree, skipping the empty recording", () => {
  const root = makeFixtureTree();
  const warnings: string[] = [];
  const { records, summary } = convertFfdDirectory(root, { log: (m) => warnings.push(m) });

  assert.equal(records.length, 5);
  assert.equal(summary.skipped.length, 1);
  assert.match(summary.skipped[0].file, /fencer_05/);
  assert.match(summary.skipped[0].reason, /empty body/);
  assert.ok(warnings.some((w) => w.includes("empty body")));

  // sorted by fencer, action order, id; all 13-joint x,y frames
  assert.deepEqual(records.map((r) => r.fencer_id), [1, 1, 1, 2, 2]);
  assert.equal(records[0].joints.length, 13);
  assert.equal(records[0].frames[0]!.length, 13);
  const sb = records.find((r) => r.action === "SB")!;
  assert.equal(sb.frames.length, 28);

  // summary statistics match the fixture
  assert.equal(summary.perAction["R"].count, 3);
  assert.equal(summary.perAction["R"].framesMin, 40);
  assert.equal(summary.perAction["R"].framesMax, 52);
});

test("conversion is byte-for-byte reproducible", () => {
  const root = makeFixtureTree();
  const a = writeManifest(convertFfdDirectory(root).records);
  const b = writeManifest(convertFfdDirectory(root).records);
  assert.equal(a, b);
});

test("reference check flags a non-matching corpus and passes a matching one", () => {
  const root = makeFixtureTree();
  const { summary } = convertFfdDirectory(root);
  const problems = checkAgainstReference(summary);
  assert.ok(problems.length > 0); // 5 fixture videos are not the full dataset

  // a synthetic summary built to the published statistics passes
  const fake = {
    videos: FFD_REFERENCE.videos,
    skipped: [],
    perAction: Object.fromEntries(Object.entries(FFD_REFERENCE.counts).map(([action, count]) => [
      action,
      {
        count,
        framesMin: FFD_REFERENCE.frames[action].min,
        framesMax: FFD_REFERENCE.frames[action].max,
        framesMean: 50,
      },
    ])),
  };
  assert.deepEqual(checkAgainstReference(fake), []);
});
