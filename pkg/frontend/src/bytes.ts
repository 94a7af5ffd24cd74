/** UTF-16 string index <-> UTF-8 byte offset conversions.
 *
 * The wire protocol addresses the query by UTF-8 byte offsets; the DOM
 * addresses it by UTF-16 code units.  All conversions walk code points so
 * surrogate pairs and multibyte characters stay aligned.
 */

const encoder = new TextEncoder();

export function byteLength(text: string): number {
  return encoder.encode(text).length;
}

/** Byte offset of the UTF-16 index `charIndex` (assumed on a code-point boundary). */
export function charToByte(text: string, charIndex: number): number {
  return encoder.encode(text.slice(0, charIndex)).length;
}

/** UTF-16 index for a byte offset, snapping down off mid-codepoint offsets. */
export function byteToChar(text: string, byteOffset: number): number {
  let bytes = 0;
  let chars = 0;
  for (const cp of text) {
    if (bytes >= byteOffset) break;
    const b = encoder.encode(cp).length;
    if (bytes + b > byteOffset) break;
    bytes += b;
    chars += cp.length;
  }
  return chars;
}
