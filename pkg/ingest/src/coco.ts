/**
 * COCO keypoint output -> canonical manifest record.
 *
 * Expects one JSON document per video holding detections for a single
 * tracked person: either a `frames` array of 17*3 keypoint triples, or a
 * COCO-results-style `annotations` list with `image_id` + `keypoints`.
 * Two detections on one frame mean the input was not tracked, which is an
 * error here, not something to silently merge.
 */

import { ACTIONS, Action, CANONICAL_JOINTS, JointPair, ManifestRecord, isAction } from "./manifest";

const COCO_KEYPOINTS = [
  "nose", "left_eye", "right_eye", "left_ear", "right_ear",
  "left_shoulder", "right_shoulder", "left_elbow", "right_elbow",
  "left_wrist", "right_wrist", "left_hip", "right_hip",
  "left_knee", "right_knee", "left_ankle", "right_ankle",
] as const;

// canonical joint -> COCO keypoint index (eyes and ears are dropped)
const CANONICAL_FROM_COCO: Record<string, number> = {
  nose: 0,
  l_shoulder: 5, r_shoulder: 6,
  l_elbow: 7, r_elbow: 8,
  l_wrist: 9, r_wrist: 10,
  l_hip: 11, r_hip: 12,
  l_knee: 13, r_knee: 14,
  l_ankle: 15, r_ankle: 16,
};

export interface CocoVideo {
  video_id: string;
  fencer_id: number;
  action: string;
  fps?: number;
  front_side?: "left" | "right";
  frames?: number[][];
  annotations?: { image_id: number | string; keypoints: number[]; score?: number }[];
}

export function convertCocoVideo(video: CocoVideo, confidenceThreshold = 0.0): ManifestRecord {
  if (!isAction(video.action)) {
    throw new Error(`video ${video.video_id}: unknown action ${video.action}; ` +
      `expected one of ${ACTIONS.join(", ")}`);
  }
  let keypointRows: number[][];
  if (video.frames) {
    keypointRows = video.frames;
  } else if (video.annotations) {
    const byImage = new Map<string, number[]>();
    for (const ann of video.annotations) {
      const key = String(ann.image_id);
      if (byImage.has(key)) {
        throw new Error(`video ${video.video_id}: multiple detections on frame ${key}; ` +
          `run a person tracker first and keep one skeleton per frame`);
      }
      byImage.set(key, ann.keypoints);
    }
    const keys = [...byImage.keys()].sort((a, b) => {
      const na = Number(a);
      const nb = Number(b);
      return Number.isFinite(na) && Number.isFinite(nb) ? na - nb : a.localeCompare(b);
    });
    keypointRows = keys.map((k) => byImage.get(k)!);
  } else {
    throw new Error(`video ${video.video_id}: neither frames nor annotations present`);
  }

  const frames: JointPair[][] = keypointRows.map((row, t) => {
    if (row.length !== COCO_KEYPOINTS.length * 3) {
      throw new Error(`video ${video.video_id} frame ${t}: expected ` +
        `${COCO_KEYPOINTS.length * 3} keypoint values, got ${row.length}`);
    }
    return CANONICAL_JOINTS.map((name) => {
      const idx = CANONICAL_FROM_COCO[name];
      const x = row[idx * 3];
      const y = row[idx * 3 + 1];
      const conf = row[idx * 3 + 2];
      if (!Number.isFinite(x) || !Number.isFinite(y) || conf < confidenceThreshold) {
        return null;
      }
      return [x, y] as [number, number];
    });
  });

  return {
    video_id: video.video_id,
    fencer_id: video.fencer_id,
    action: video.action as Action,
    fps: video.fps ?? 30,
    joints: [...CANONICAL_JOINTS],
    frames,
    ...(video.front_side ? { front_side: video.front_side } : {}),
  };
}
