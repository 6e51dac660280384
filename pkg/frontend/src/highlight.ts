/** Byte-span segmentation of the original text for highlight rendering.
 *
 * The service reports occurrence spans as UTF-8 byte offsets while JS
 * strings are UTF-16, so the text is segmented on its encoded bytes and
 * each piece decoded separately. Spans must be in range, non-overlapping and
 * aligned to character boundaries; the service guarantees all three, and
 * violations raise rather than render a wrong view.
 */

export interface HighlightSpan {
  /** Byte offset, inclusive. */
  start: number;
  /** Byte offset, exclusive. */
  end: number;
  /** Identifies the phrase the span belongs to. */
  key: string;
}

export interface Segment {
  text: string;
  /** null for plain text between highlights. */
  key: string | null;
}

export function segmentByByteSpans(text: string, spans: HighlightSpan[]): Segment[] {
  const bytes = new TextEncoder().encode(text);
  const ordered = [...spans].sort((a, b) => a.start - b.start || a.end - b.end);
  const decoder = new TextDecoder("utf-8", { fatal: true });
  const segments: Segment[] = [];
  let cursor = 0;
  for (const span of ordered) {
    if (span.start < cursor || span.end > bytes.length || span.start >= span.end) {
      throw new RangeError(`bad span [${span.start}, ${span.end}) at byte ${cursor}`);
    }
    if (span.start > cursor) {
      segments.push({ text: decoder.decode(bytes.subarray(cursor, span.start)), key: null });
    }
    segments.push({ text: decoder.decode(bytes.subarray(span.start, span.end)), key: span.key });
    cursor = span.end;
  }
  if (cursor < bytes.length) {
    segments.push({ text: decoder.decode(bytes.subarray(cursor)), key: null });
  }
  return segments;
}
