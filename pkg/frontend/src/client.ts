import * as net from "node:net";
import { FrameDecoder, encodeFrame } from "./protocol.js";
import { ServerMessage, ClientMessage } from "./types.js";

export interface BackendClientHandlers {
    onMessage: (msg: ServerMessage) => void;
    onClose?: () => void;
    onError?: (err: Error) => void;
}

/**
 * TCP client for the explanation stream. Owns the socket and the framing;
 * everything above it deals in parsed messages.
 */
export class BackendClient {
    private socket: net.Socket | null = null;
    private decoder = new FrameDecoder();

    constructor(private handlers: BackendClientHandlers) {}

    connect(host: string, port: number): Promise<void> {
        return new Promise((resolve, reject) => {
            const socket = net.createConnection({ host, port }, () => resolve());
            socket.on("data", (chunk: Buffer) => {
                let messages: unknown[];
                try {
                    messages = this.decoder.push(new Uint8Array(chunk));
                } catch (err) {
                    this.handlers.onError?.(err as Error);
                    socket.destroy();
                    return;
                }
                for (const m of messages) {
                    this.handlers.onMessage(m as ServerMessage);
                }
            });
            socket.on("error", (err: Error) => {
                reject(err);
                this.handlers.onError?.(err);
            });
            socket.on("close", () => {
                this.socket = null;
                this.handlers.onClose?.();
            });
            this.socket = socket;
        });
    }

    send(msg: ClientMessage): void {
        if (!this.socket) throw new Error("not connected");
        this.socket.write(encodeFrame(msg));
    }

    setThreshold(kind: "rho" | "phi", value: number): void {
        this.send({ type: "set_threshold", kind, value });
    }

    requestMsx(step: number): void {
        this.send({ type: "msx_request", step });
    }

    close(): void {
        this.socket?.end();
        this.socket = null;
    }

    get connected(): boolean {
        return this.socket !== null;
    }
}
