/**
 * Directory-level conversion of Kinect body recordings.
 *
 * Expected layout: IN/<fencer>/<action>/<recording>.mat, where the fencer
 * directory carries a number ("fencer_05", "p5", "5") and the action
 * directory one of the six class codes or their long names. Empty-body
 * recordings are skipped with a logged warning instead of failing the run.
 * Output lines are sorted by (fencer, action, video id) so repeated
 * conversions are byte-identical.
 */

import * as fs from "fs";
import * as path from "path";

import { extractSkeleton, toCanonicalFrames } from "./kinect";
import {
  ACTIONS,
  Action,
  CANONICAL_JOINTS,
  ConversionSummary,
  ManifestRecord,
  summarize,
} from "./manifest";
import { parseMat } from "./mat";

const ACTION_ALIASES: Record<string, Action> = {
  r: "R", rapid: "R", rapid_lunge: "R",
  is: "IS", incremental: "IS", incremental_speed: "IS", incremental_speed_lunge: "IS",
  ww: "WW", waiting: "WW", with_waiting: "WW", with_waiting_lunge: "WW",
  js: "JS", jumping: "JS", jumping_sliding: "JS", jumping_sliding_lunge: "JS",
  sf: "SF", step_forward: "SF", forward: "SF",
  sb: "SB", step_backward: "SB", step_back: "SB", backward: "SB",
};

export function parseActionName(name: string): Action | null {
  return ACTION_ALIASES[name.toLowerCase().replace(/[-\s]+/g, "_")] ?? null;
}

export function parseFencerName(name: string): number | null {
  const match = name.match(/(\d+)/);
  return match ? parseInt(match[1], 10) : null;
}

export interface ConvertOptions {
  fps?: number;
  log?: (message: string) => void;
}

export interface ConvertResult {
  records: ManifestRecord[];
  summary: ConversionSummary;
}

export function convertFfdDirectory(inputDir: string, options: ConvertOptions = {}): ConvertResult {
  const fps = options.fps ?? 30;
  const log = options.log ?? (() => undefined);
  const records: ManifestRecord[] = [];
  const skipped: { file: string; reason: string }[] = [];

  for (const fencerEntry of sortedDirs(inputDir)) {
    const fencerId = parseFencerName(fencerEntry.name);
    if (fencerId === null) {
      log(`skipping directory without a fencer number: ${fencerEntry.name}`);
      continue;
    }
    for (const actionEntry of sortedDirs(path.join(inputDir, fencerEntry.name))) {
      const action = parseActionName(actionEntry.name);
      if (action === null) {
        log(`skipping directory without an action name: ${fencerEntry.name}/${actionEntry.name}`);
        continue;
      }
      const actionDir = path.join(inputDir, fencerEntry.name, actionEntry.name);
      const files = fs.readdirSync(actionDir)
        .filter((f) => f.toLowerCase().endsWith(".mat"))
        .sort();
      for (const file of files) {
        const fullPath = path.join(actionDir, file);
        const relative = path.relative(inputDir, fullPath);
        try {
          const record = convertBodyFile(fullPath, fencerId, action, fps);
          records.push(record);
        } catch (err) {
          const reason = err instanceof Error ? err.message : String(err);
          skipped.push({ file: relative, reason });
          log(`warning: skipped ${relative}: ${reason}`);
        }
      }
    }
  }

  records.sort((a, b) =>
    a.fencer_id - b.fencer_id
    || ACTIONS.indexOf(a.action) - ACTIONS.indexOf(b.action)
    || a.video_id.localeCompare(b.video_id));
  return { records, summary: summarize(records, skipped) };
}

export function convertBodyFile(filePath: string, fencerId: number, action: Action,
                                fps: number): ManifestRecord {
  const variables = parseMat(fs.readFileSync(filePath));
  const skeleton = extractSkeleton(variables);
  if (skeleton.frames.length === 0) {
    throw new Error("empty body recording");
  }
  const frames = toCanonicalFrames(skeleton);
  return {
    video_id: path.basename(filePath).replace(/\.mat$/i, ""),
    fencer_id: fencerId,
    action,
    fps,
    joints: [...CANONICAL_JOINTS],
    frames,
  };
}

function sortedDirs(dir: string): fs.Dirent[] {
  return fs.readdirSync(dir, { withFileTypes: true })
    .filter((e) => e.isDirectory())
    .sort((a, b) => a.name.localeCompare(b.name));
}
