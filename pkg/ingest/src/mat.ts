/**
 * Minimal MAT-file (level 5) reader: numeric N-D arrays, little- or
 * big-endian, plain or zlib-compressed elements. Cell arrays, structs,
 * sparse and char data are skipped rather than rejected, since skeleton
 * exports typically store one numeric matrix per variable.
 */

import * as zlib from "zlib";

export interface MatVariable {
  name: string;
  dims: number[];
  /** column-major element order, as stored in the file */
  data: Float64Array;
}

const MI_INT8 = 1;
const MI_UINT8 = 2;
const MI_INT16 = 3;
const MI_UINT16 = 4;
const MI_INT32 = 5;
const MI_UINT32 = 6;
const MI_SINGLE = 7;
const MI_DOUBLE = 9;
const MI_INT64 = 12;
const MI_UINT64 = 13;
const MI_MATRIX = 14;
const MI_COMPRESSED = 15;
const MI_UTF8 = 16;

const NUMERIC_CLASSES = new Set([6, 7, 8, 9, 10, 11, 12, 13, 14, 15]);

class Cursor {
  constructor(public buf: Buffer, public offset: number, public littleEndian: boolean) {}

  u16(at: number): number {
    return this.littleEndian ? this.buf.readUInt16LE(at) : this.buf.readUInt16BE(at);
  }

  u32(at: number): number {
    return this.littleEndian ? this.buf.readUInt32LE(at) : this.buf.readUInt32BE(at);
  }
}

function readNumeric(buf: Buffer, type: number, count: number, le: boolean): Float64Array {
  const out = new Float64Array(count);
  const read = (fn: string, size: number) => {
    for (let i = 0; i < count; i++) {
      out[i] = (buf as any)[fn](i * size);
    }
  };
  switch (type) {
    case MI_INT8: read("readInt8", 1); break;
    case MI_UINT8: case MI_UTF8: read("readUInt8", 1); break;
    case MI_INT16: read(le ? "readInt16LE" : "readInt16BE", 2); break;
    case MI_UINT16: read(le ? "readUInt16LE" : "readUInt16BE", 2); break;
    case MI_INT32: read(le ? "readInt32LE" : "readInt32BE", 4); break;
    case MI_UINT32: read(le ? "readUInt32LE" : "readUInt32BE", 4); break;
    case MI_SINGLE: read(le ? "readFloatLE" : "readFloatBE", 4); break;
    case MI_DOUBLE: read(le ? "readDoubleLE" : "readDoubleBE", 8); break;
    case MI_INT64:
      for (let i = 0; i < count; i++) {
        out[i] = Number(le ? buf.readBigInt64LE(i * 8) : buf.readBigInt64BE(i * 8));
      }
      break;
    case MI_UINT64:
      for (let i = 0; i < count; i++) {
        out[i] = Number(le ? buf.readBigUInt64LE(i * 8) : buf.readBigUInt64BE(i * 8));
      }
      break;
    default:
      throw new Error(`unsupported numeric element type ${type}`);
  }
  return out;
}

function elementSize(type: number): number {
  switch (type) {
    case MI_INT8: case MI_UINT8: case MI_UTF8: return 1;
    case MI_INT16: case MI_UINT16: return 2;
    case MI_INT32: case MI_UINT32: case MI_SINGLE: return 4;
    default: return 8;
  }
}

interface Element {
  type: number;
  body: Buffer;
  next: number;
}

/** Read one tagged data element, handling the packed small-element form. */
function readElement(cur: Cursor, at: number): Element {
  const first = cur.u32(at);
  const small = (first >>> 16) !== 0;
  if (small) {
    const type = first & 0xffff;
    const nbytes = first >>> 16;
    return { type, body: cur.buf.subarray(at + 4, at + 4 + nbytes), next: at + 8 };
  }
  const type = first;
  const nbytes = cur.u32(at + 4);
  const start = at + 8;
  const padded = Math.ceil(nbytes / 8) * 8;
  return { type, body: cur.buf.subarray(start, start + nbytes), next: start + padded };
}

function parseMatrix(cur: Cursor, body: Buffer): MatVariable | null {
  const inner = new Cursor(body, 0, cur.littleEndian);
  let at = 0;

  const flagsEl = readElement(inner, at);
  at = flagsEl.next;
  const flagsWord = inner.littleEndian ? flagsEl.body.readUInt32LE(0) : flagsEl.body.readUInt32BE(0);
  const klass = flagsWord & 0xff;
  const complex = (flagsWord & 0x0800) !== 0;

  const dimsEl = readElement(inner, at);
  at = dimsEl.next;
  const ndim = dimsEl.body.length / 4;
  const dims: number[] = [];
  for (let i = 0; i < ndim; i++) {
    dims.push(inner.littleEndian ? dimsEl.body.readInt32LE(i * 4) : dimsEl.body.readInt32BE(i * 4));
  }

  const nameEl = readElement(inner, at);
  at = nameEl.next;
  const name = nameEl.body.toString("utf-8").replace(/\0+$/, "");

  if (!NUMERIC_CLASSES.has(klass)) {
    return null; // cell/struct/char/sparse: not a skeleton matrix
  }

  const realEl = readElement(inner, at);
  const count = Math.floor(realEl.body.length / elementSize(realEl.type));
  const expected = dims.reduce((a, b) => a * b, 1);
  const data = readNumeric(realEl.body, realEl.type, Math.min(count, expected), inner.littleEndian);
  if (complex) {
    // imaginary part ignored; skeleton coordinates are real
  }
  if (data.length !== expected) {
    throw new Error(`variable ${name}: ${data.length} elements for dims [${dims}]`);
  }
  return { name, dims, data };
}

export function parseMat(buf: Buffer): MatVariable[] {
  if (buf.length < 128) {
    throw new Error("not a MAT-file: header too short");
  }
  const endian = buf.toString("latin1", 126, 128);
  let littleEndian: boolean;
  if (endian === "IM") littleEndian = true;
  else if (endian === "MI") littleEndian = false;
  else throw new Error("not a MAT-file: bad endian indicator");
  const cur = new Cursor(buf, 0, littleEndian);
  const version = cur.u16(124);
  if (version !== 0x0100) {
    throw new Error(`unsupported MAT-file version 0x${version.toString(16)}`);
  }

  const variables: MatVariable[] = [];
  let at = 128;
  while (at + 8 <= buf.length) {
    const el = readElement(cur, at);
    if (el.type === MI_COMPRESSED) {
      const inflated = zlib.inflateSync(el.body);
      const sub = new Cursor(inflated, 0, littleEndian);
      const subEl = readElement(sub, 0);
      if (subEl.type === MI_MATRIX) {
        const variable = parseMatrix(sub, subEl.body);
        if (variable) variables.push(variable);
      }
    } else if (el.type === MI_MATRIX) {
      const variable = parseMatrix(cur, el.body);
      if (variable) variables.push(variable);
    }
    // other top-level element types are skipped
    at = el.next;
  }
  return variables;
}
