// Length-delimited JSON framing: 4-byte big-endian byte length, then the
// UTF-8 payload. Matches the backend's socket format exactly.

const MAX_MESSAGE_BYTES = 16 * 1024 * 1024;

export function encodeFrame(message: unknown): Uint8Array {
    const payload = new TextEncoder().encode(JSON.stringify(message));
    if (payload.byteLength > MAX_MESSAGE_BYTES) {
        throw new Error(`message too large: ${payload.byteLength} bytes`);
    }
    const frame = new Uint8Array(4 + payload.byteLength);
    new DataView(frame.buffer).setUint32(0, payload.byteLength, false);
    frame.set(payload, 4);
    return frame;
}

/** Incremental decoder: feed arbitrary chunks, get whole messages out. */
export class FrameDecoder {
    private pending: Uint8Array = new Uint8Array(0);

    push(chunk: Uint8Array): unknown[] {
        const merged = new Uint8Array(this.pending.byteLength + chunk.byteLength);
        merged.set(this.pending, 0);
        merged.set(chunk, this.pending.byteLength);
        this.pending = merged;

        const out: unknown[] = [];
        while (this.pending.byteLength >= 4) {
            const view = new DataView(
                this.pending.buffer,
                this.pending.byteOffset,
                this.pending.byteLength,
            );
            const length = view.getUint32(0, false);
            if (length > MAX_MESSAGE_BYTES) {
                throw new Error(`frame too large: ${length} bytes`);
            }
            if (this.pending.byteLength < 4 + length) break;
            const body = this.pending.slice(4, 4 + length);
            this.pending = this.pending.slice(4 + length);
            const parsed = JSON.parse(new TextDecoder().decode(body));
            if (typeof parsed !== "object" || parsed === null || !("type" in parsed)) {
                throw new Error("frame is not an object with a type field");
            }
            out.push(parsed);
        }
        return out;
    }

    get buffered(): number {
        return this.pending.byteLength;
    }
}
