/**
 * Test-only MAT-file (level 5) writer, independent of the reader under
 * test. Emits one or more double-precision matrices, optionally inside a
 * compressed element, always little-endian.
 */

import * as zlib from "zlib";

const MI_INT8 = 1;
const MI_INT32 = 5;
const MI_UINT32 = 6;
const MI_DOUBLE = 9;
const MI_MATRIX = 14;
const MI_COMPRESSED = 15;
const MX_DOUBLE = 6;

function tag(type: number, nbytes: number): Buffer {
  const buf = Buffer.alloc(8);
  buf.writeUInt32LE(type, 0);
  buf.writeUInt32LE(nbytes, 4);
  return buf;
}

function padTo8(buf: Buffer): Buffer {
  const rem = buf.length % 8;
  return rem === 0 ? buf : Buffer.concat([buf, Buffer.alloc(8 - rem)]);
}

export interface FixtureVariable {
  name: string;
  dims: number[];
  /** column-major values */
  values: number[] | Float64Array;
}

function matrixElement(variable: FixtureVariable): Buffer {
  const flags = Buffer.alloc(8);
  flags.writeUInt32LE(MX_DOUBLE, 0);
  const flagsEl = Buffer.concat([tag(MI_UINT32, 8), flags]);

  const dimsBody = Buffer.alloc(variable.dims.length * 4);
  variable.dims.forEach((d, i) => dimsBody.writeInt32LE(d, i * 4));
  const dimsEl = Buffer.concat([tag(MI_INT32, dimsBody.length), padTo8(dimsBody)]);

  const nameBody = Buffer.from(variable.name, "utf-8");
  const nameEl = Buffer.concat([tag(MI_INT8, nameBody.length), padTo8(nameBody)]);

  const values = Array.from(variable.values);
  const dataBody = Buffer.alloc(values.length * 8);
  values.forEach((v, i) => dataBody.writeDoubleLE(v, i * 8));
  const dataEl = Buffer.concat([tag(MI_DOUBLE, dataBody.length), padTo8(dataBody)]);

  const body = Buffer.concat([flagsEl, dimsEl, nameEl, dataEl]);
  return Buffer.concat([tag(MI_MATRIX, body.length), body]);
}

export function writeMat(variables: FixtureVariable[], compress = false): Buffer {
  const header = Buffer.alloc(128);
  header.write("MATLAB 5.0 MAT-file, test fixture", 0, "latin1");
  header.writeUInt16LE(0x0100, 124);
  header.write("IM", 126, "latin1");

  const elements = variables.map((v) => {
    const el = matrixElement(v);
    if (!compress) return el;
    const deflated = zlib.deflateSync(el);
    return Buffer.concat([tag(MI_COMPRESSED, deflated.length), padTo8(deflated)]);
  });
  return Buffer.concat([header, ...elements]);
}

/**
 * Column-major [T, 60] Kinect track: 20 joints x (x, y, z), a standing
 * figure drifting along +x so conversions have recognizable structure.
 */
export function kinectTrack(numFrames: number, offset = 0): FixtureVariable {
  const rows = numFrames;
  const cols = 60;
  const values = new Float64Array(rows * cols);
  for (let t = 0; t < numFrames; t++) {
    for (let j = 0; j < 20; j++) {
      const x = 100 + offset + j * 3 + t * 0.5;
      const y = 50 + j * 15;
      const z = 2.0;
      values[t + (j * 3 + 0) * rows] = x;
      values[t + (j * 3 + 1) * rows] = y;
      values[t + (j * 3 + 2) * rows] = z;
    }
  }
  return { name: "skeleton", dims: [rows, cols], values };
}
