export { parseMat, MatVariable } from "./mat";
export { extractSkeleton, toCanonicalFrames, KINECT_JOINTS, SkeletonFrames } from "./kinect";
export { convertCocoVideo, CocoVideo } from "./coco";
export { convertFfdDirectory, convertBodyFile, parseActionName, parseFencerName } from "./convert";
export {
  ACTIONS,
  Action,
  CANONICAL_JOINTS,
  ConversionSummary,
  FFD_REFERENCE,
  JointPair,
  ManifestRecord,
  checkAgainstReference,
  recordToLine,
  summarize,
  writeManifest,
} from "./manifest";
