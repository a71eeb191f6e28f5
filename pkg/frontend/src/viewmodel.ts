import {
    ServerMessage,
    StepRecordMsg,
    ThresholdAckMsg,
    MsxReplyMsg,
    ErrorMsg,
} from "./types.js";

export interface ThresholdSlider {
    /** Last value the server confirmed. */
    committed: number;
    /** Value sent but not yet acknowledged, if any. */
    pending: number | null;
}

export interface ThresholdAnnotation {
    kind: string;
    value: number;
    effectiveFromStep: number;
}

const DEFAULT_BUFFER = 2000;

/**
 * Client-side state for the dashboard: a bounded ring of step records plus
 * cursor and slider state. Pure data — rendering and transport live
 * elsewhere, which keeps this testable without a socket or a DOM.
 */
export class ViewModel {
    records: StepRecordMsg[] = [];
    mode: string | null = null;
    schemaVersion: number | null = null;
    connected = false;
    finished = false;
    lastError: string | null = null;

    hoverStep: number | null = null;
    selectedStep: number | null = null;

    sliders: Record<string, ThresholdSlider> = {
        rho: { committed: 0.25, pending: null },
        phi: { committed: 0.05, pending: null },
    };
    annotations: ThresholdAnnotation[] = [];
    msxReplies: MsxReplyMsg[] = [];

    constructor(private capacity: number = DEFAULT_BUFFER) {}

    ingest(msg: ServerMessage): void {
        switch (msg.type) {
            case "hello":
                this.mode = msg.mode;
                this.schemaVersion = msg.schema_version;
                this.connected = true;
                break;
            case "step_record":
                this.pushRecord(msg);
                break;
            case "threshold_ack":
                this.applyAck(msg);
                break;
            case "msx_reply":
                this.msxReplies.push(msg);
                break;
            case "error":
                this.applyError(msg);
                break;
        }
    }

    private pushRecord(record: StepRecordMsg): void {
        // Records normally arrive in step order; keep the buffer sorted even
        // if one shows up late so panel x-axes never jump around.
        const n = this.records.length;
        if (n === 0 || this.records[n - 1].step <= record.step) {
            this.records.push(record);
        } else {
            const at = this.records.findIndex((r) => r.step > record.step);
            this.records.splice(at, 0, record);
        }
        if (this.records.length > this.capacity) {
            this.records.splice(0, this.records.length - this.capacity);
        }
    }

    private applyAck(ack: ThresholdAckMsg): void {
        const slider = this.sliders[ack.kind];
        if (slider) {
            slider.committed = ack.value;
            slider.pending = null;
        }
        this.annotations.push({
            kind: ack.kind,
            value: ack.value,
            effectiveFromStep: ack.effective_from_step,
        });
    }

    private applyError(err: ErrorMsg): void {
        this.lastError = err.message;
        // A rejected request never changes server state, so any in-flight
        // slider value is dropped and the knob falls back to committed.
        this.revertPending();
    }

    /** Stage a slider move; the caller is responsible for sending it. */
    beginThresholdChange(kind: "rho" | "phi", value: number): void {
        this.sliders[kind].pending = value;
    }

    /** Connection dropped: pending slider state can no longer be trusted. */
    onDisconnect(): void {
        this.connected = false;
        this.revertPending();
    }

    private revertPending(): void {
        for (const slider of Object.values(this.sliders)) {
            slider.pending = null;
        }
    }

    /** The value a knob should display: in-flight if any, else committed. */
    displayedThreshold(kind: "rho" | "phi"): number {
        const s = this.sliders[kind];
        return s.pending !== null ? s.pending : s.committed;
    }

    setHover(step: number | null): void {
        this.hoverStep = step;
    }

    setSelected(step: number | null): void {
        this.selectedStep = step;
    }

    recordAt(step: number): StepRecordMsg | undefined {
        return this.records.find((r) => r.step === step);
    }

    get firstStep(): number | null {
        return this.records.length ? this.records[0].step : null;
    }

    get lastStep(): number | null {
        return this.records.length ? this.records[this.records.length - 1].step : null;
    }
}
