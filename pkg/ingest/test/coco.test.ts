import assert from "node:assert/strict";
import { test } from "node:test";

import { convertCocoVideo } from "../src/coco";
import { CANONICAL_JOINTS } from "../src/manifest";

function keypointRow(confidence = 0.9): number[] {
  const row: number[] = [];
  for (let k = 0; k < 17; k++) {
    row.push(10 * k, 10 * k + 5, confidence);
  }
  return row;
}

test("maps 17 COCO keypoints onto the 13 canonical joints", () => {
  const record = convertCocoVideo({
    video_id: "clip-1", fencer_id: 3, action: "JS", fps: 25,
    frames: [keypointRow(), keypointRow()],
  });
  assert.equal(record.joints.length, 13);
  assert.deepEqual(record.joints, [...CANONICAL_JOINTS]);
  assert.equal(record.frames.length, 2);
  // nose is COCO keypoint 0; left shoulder is keypoint 5
  assert.deepEqual(record.frames[0][0], [0, 5]);
  assert.deepEqual(record.frames[0][CANONICAL_JOINTS.indexOf("l_shoulder")], [50, 55]);
  // eyes and ears are gone: no canonical joint maps to keypoints 1-4
  assert.equal(record.frames[0].length, 13);
});

test("threshold zero introduces no nulls", () => {
  const record = convertCocoVideo({
    video_id: "clip-2", fencer_id: 1, action: "R",
    frames: [keypointRow(0.0)],
  }, 0.0);
  assert.ok(record.frames[0].every((pair) => pair !== null));
});

test("low-confidence keypoints become null pairs", () => {
  const row = keypointRow(0.9);
  row[0 * 3 + 2] = 0.1; // nose confidence below threshold
  const record = convertCocoVideo({
    video_id: "clip-3", fencer_id: 1, action: "WW", frames: [row],
  }, 0.5);
  assert.equal(record.frames[0][0], null);
  assert.ok(record.frames[0][1]);
});

test("annotation lists are ordered by image id", () => {
  const record = convertCocoVideo({
    video_id: "clip-4", fencer_id: 2, action: "SF",
    annotations: [
      { image_id: 10, keypoints: keypointRow() },
      { image_id: 2, keypoints: keypointRow() },
    ],
  });
  assert.equal(record.frames.length, 2);
});

test("multiple detections per frame demand pre-tracking", () => {
  assert.throws(() => convertCocoVideo({
    video_id: "clip-5", fencer_id: 2, action: "SB",
    annotations: [
      { image_id: 1, keypoints: keypointRow() },
      { image_id: 1, keypoints: keypointRow() },
    ],
  }), /tracker/);
});

test("unknown action is rejected", () => {
  assert.throws(() => convertCocoVideo({
    video_id: "clip-6", fencer_id: 2, action: "LUNGE", frames: [keypointRow()],
  }), /unknown action/);
});
