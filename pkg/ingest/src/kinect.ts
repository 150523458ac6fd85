/**
 * Kinect v1 skeleton frames -> canonical 13-joint x,y tracks.
 *
 * The 20-joint order follows the Kinect SDK skeleton enumeration
 * (HipCenter, Spine, ShoulderCenter, Head, then left/right arm, left/right
 * leg chains). Head stands in for the nose; hands, feet, spine and the
 * two center joints are dropped. Only x and y are exported.
 */

import { MatVariable } from "./mat";
import { CANONICAL_JOINTS, JointPair } from "./manifest";

export const KINECT_JOINTS = [
  "hip_center", "spine", "shoulder_center", "head",
  "shoulder_left", "elbow_left", "wrist_left", "hand_left",
  "shoulder_right", "elbow_right", "wrist_right", "hand_right",
  "hip_left", "knee_left", "ankle_left", "foot_left",
  "hip_right", "knee_right", "ankle_right", "foot_right",
] as const;

const KINECT_COUNT = 20;

// canonical joint -> Kinect skeleton index
const CANONICAL_FROM_KINECT: Record<string, number> = {
  nose: 3, // Head proxies the nose; Kinect has no face keypoints
  l_shoulder: 4, r_shoulder: 8,
  l_elbow: 5, r_elbow: 9,
  l_wrist: 6, r_wrist: 10,
  l_hip: 12, r_hip: 16,
  l_knee: 13, r_knee: 17,
  l_ankle: 14, r_ankle: 18,
};

export interface SkeletonFrames {
  /** [frame][kinectJoint][coord], coords x,y(,z...) */
  frames: number[][][];
  coordsPerJoint: number;
}

/**
 * Locate the skeleton track inside a parsed .mat file and normalize it to
 * frame-major order. Accepts [T, 20*C], [20*C, T], [T, 20, C] and
 * [20, C, T] layouts with C in 2..4 (x,y plus optional depth/confidence).
 */
export function extractSkeleton(variables: MatVariable[]): SkeletonFrames {
  const candidates: { frames: number[][][]; coords: number; score: number }[] = [];
  for (const variable of variables) {
    const arranged = arrange(variable);
    if (arranged) {
      candidates.push({ ...arranged, score: arranged.frames.length });
    }
  }
  if (candidates.length === 0) {
    throw new Error("no 20-joint skeleton variable found");
  }
  candidates.sort((a, b) => b.score - a.score);
  const best = candidates[0];
  return { frames: best.frames, coordsPerJoint: best.coords };
}

function arrange(variable: MatVariable): { frames: number[][][]; coords: number } | null {
  const { dims, data } = variable;

  if (dims.length === 2) {
    const [rows, cols] = dims;
    // column-major storage: element (r, c) sits at r + c*rows.
    // Frame-major [T, 20*C] layouts win over transposed ones and xyz over
    // xy, since shapes like [40, 60] are otherwise ambiguous. Zero-frame
    // layouts still match so empty recordings are reported as such.
    for (const coords of [3, 2, 4]) {
      if (cols === KINECT_COUNT * coords) {
        return { frames: framesFrom2d(data, rows, cols, coords, false), coords };
      }
    }
    for (const coords of [3, 2, 4]) {
      if (rows === KINECT_COUNT * coords && cols !== KINECT_COUNT * coords) {
        return { frames: framesFrom2d(data, rows, cols, coords, true), coords };
      }
    }
    return null;
  }

  if (dims.length === 3) {
    const [a, b, c] = dims;
    const at = (i: number, j: number, k: number) => data[i + j * a + k * a * b];
    if (b === KINECT_COUNT && c >= 2 && c <= 4) {
      // [T, 20, C]
      const frames: number[][][] = [];
      for (let t = 0; t < a; t++) {
        const joints: number[][] = [];
        for (let j = 0; j < KINECT_COUNT; j++) {
          const coords: number[] = [];
          for (let k = 0; k < c; k++) coords.push(at(t, j, k));
          joints.push(coords);
        }
        frames.push(joints);
      }
      return { frames, coords: c };
    }
    if (a === KINECT_COUNT && b >= 2 && b <= 4) {
      // [20, C, T]
      const frames: number[][][] = [];
      for (let t = 0; t < c; t++) {
        const joints: number[][] = [];
        for (let j = 0; j < KINECT_COUNT; j++) {
          const coords: number[] = [];
          for (let k = 0; k < b; k++) coords.push(at(j, k, t));
          joints.push(coords);
        }
        frames.push(joints);
      }
      return { frames, coords: b };
    }
  }
  return null;
}

function framesFrom2d(data: Float64Array, rows: number, cols: number,
                      coords: number, transposed: boolean): number[][][] {
  const frames: number[][][] = [];
  const numFrames = transposed ? cols : rows;
  const get = (t: number, flat: number) =>
    transposed ? data[flat + t * rows] : data[t + flat * rows];
  for (let t = 0; t < numFrames; t++) {
    const joints: number[][] = [];
    for (let j = 0; j < KINECT_COUNT; j++) {
      const point: number[] = [];
      for (let k = 0; k < coords; k++) {
        point.push(get(t, j * coords + k));
      }
      joints.push(point);
    }
    frames.push(joints);
  }
  return frames;
}

/** Kinect frames -> canonical 13-joint [x, y] rows; conversion is lossless in x,y. */
export function toCanonicalFrames(skeleton: SkeletonFrames): JointPair[][] {
  return skeleton.frames.map((joints) =>
    CANONICAL_JOINTS.map((name) => {
      const point = joints[CANONICAL_FROM_KINECT[name]];
      const x = point[0];
      const y = point[1];
      if (!Number.isFinite(x) || !Number.isFinite(y)) return null;
      return [x, y] as [number, number];
    }));
}
