/** The acceptance splice, byte-for-byte identical to the server core:
 * replace the partial token ending at the cursor with the insertion plus
 * one trailing space; the new cursor sits after that space.
 */

export interface SpliceResult {
  text: string;
  cursorBytes: number;
}

export function applySuggestion(
  text: string,
  cursorBytes: number,
  partialToken: string,
  insertText: string,
): SpliceResult {
  const encoder = new TextEncoder();
  const data = encoder.encode(text);
  const cursor = Math.max(0, Math.min(cursorBytes, data.length));
  const start = cursor - encoder.encode(partialToken).length;
  const insert = encoder.encode(insertText + " ");
  const out = new Uint8Array(start + insert.length + (data.length - cursor));
  out.set(data.subarray(0, start), 0);
  out.set(insert, start);
  out.set(data.subarray(cursor), start + insert.length);
  return {
    text: new TextDecoder().decode(out),
    cursorBytes: start + insert.length,
  };
}
