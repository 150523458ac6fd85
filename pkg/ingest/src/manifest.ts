/**
 * Canonical manifest records: one JSON line per video, 13 joints in fixed
 * order, [x, y] pairs per frame with null marking a missing detection.
 * This is the interchange format the classifier pipeline consumes.
 */

export const CANONICAL_JOINTS = [
  "nose",
  "l_shoulder", "r_shoulder",
  "l_elbow", "r_elbow",
  "l_wrist", "r_wrist",
  "l_hip", "r_hip",
  "l_knee", "r_knee",
  "l_ankle", "r_ankle",
] as const;

export const ACTIONS = ["R", "IS", "WW", "JS", "SF", "SB"] as const;
export type Action = (typeof ACTIONS)[number];

export type JointPair = [number, number] | null;

export interface ManifestRecord {
  video_id: string;
  fencer_id: number;
  action: Action;
  fps: number;
  joints: string[];
  frames: JointPair[][];
  front_side?: "left" | "right";
}

export function isAction(value: string): value is Action {
  return (ACTIONS as readonly string[]).includes(value);
}

export function recordToLine(record: ManifestRecord): string {
  return JSON.stringify(record);
}

export function writeManifest(records: ManifestRecord[]): string {
  return records.map(recordToLine).join("\n") + (records.length ? "\n" : "");
}

export interface ActionStats {
  count: number;
  framesMin: number;
  framesMax: number;
  framesMean: number;
}

export interface ConversionSummary {
  videos: number;
  skipped: { file: string; reason: string }[];
  perAction: Record<string, ActionStats>;
}

export function summarize(records: ManifestRecord[],
                          skipped: { file: string; reason: string }[]): ConversionSummary {
  const perAction: Record<string, ActionStats> = {};
  for (const action of ACTIONS) {
    const lengths = records.filter((r) => r.action === action).map((r) => r.frames.length);
    if (lengths.length === 0) continue;
    const total = lengths.reduce((a, b) => a + b, 0);
    perAction[action] = {
      count: lengths.length,
      framesMin: Math.min(...lengths),
      framesMax: Math.max(...lengths),
      framesMean: Math.round((total / lengths.length) * 10) / 10,
    };
  }
  return { videos: records.length, skipped, perAction };
}

/**
 * Published reference statistics for the full fencing footwork dataset:
 * per-action video counts and frame-count extrema. `checkAgainstReference`
 * lets a conversion of the real dataset verify itself.
 */
export const FFD_REFERENCE = {
  videos: 652,
  counts: { R: 108, IS: 110, WW: 110, JS: 109, SF: 107, SB: 108 } as Record<string, number>,
  frames: {
    R: { min: 40, max: 68 },
    IS: { min: 49, max: 98 },
    WW: { min: 52, max: 92 },
    JS: { min: 51, max: 98 },
    SF: { min: 29, max: 80 },
    SB: { min: 28, max: 62 },
  } as Record<string, { min: number; max: number }>,
};

export function checkAgainstReference(summary: ConversionSummary): string[] {
  const problems: string[] = [];
  if (summary.videos !== FFD_REFERENCE.videos) {
    problems.push(`expected ${FFD_REFERENCE.videos} videos, got ${summary.videos}`);
  }
  for (const action of ACTIONS) {
    const stats = summary.perAction[action];
    const want = FFD_REFERENCE.counts[action];
    if (!stats) {
      problems.push(`no videos for action ${action}`);
      continue;
    }
    if (stats.count !== want) {
      problems.push(`${action}: expected ${want} videos, got ${stats.count}`);
    }
    const range = FFD_REFERENCE.frames[action];
    if (stats.framesMin !== range.min || stats.framesMax !== range.max) {
      problems.push(`${action}: frame range ${stats.framesMin}..${stats.framesMax}, ` +
        `expected ${range.min}..${range.max}`);
    }
  }
  return problems;
}
