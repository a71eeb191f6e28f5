import { ViewModel } from "./viewmodel.js";
import {
    StepRecordMsg,
    ImportantInteractionEvent,
    ExtremumEvent,
    DominanceEvent,
    CHANNEL_NAMES,
    ACTION_NAMES,
} from "./types.js";
import { zscore } from "./zscore.js";
import { channelColor, STATE_COLORS } from "./colors.js";

// Render models are plain data: the browser layer turns them into SVG, and
// the tests inspect them directly. All five panels share one step axis.

export interface LineSeries {
    name: string;
    color: string;
    points: { step: number; value: number }[];
}

export interface Marker {
    step: number;
    color: string;
    label: string;
    shape: "triangle-up" | "triangle-down" | "dot";
}

export interface StatePanel {
    kind: "state";
    series: LineSeries[];
    empty: boolean;
}

export interface RewardPanel {
    kind: "reward";
    series: LineSeries[];
    extremumMarkers: Marker[];
    empty: boolean;
}

export interface ActionStrip {
    kind: "action";
    marks: { step: number; action: number; label: string }[];
    empty: boolean;
}

export interface InteractionStrip {
    kind: "interaction";
    markers: Marker[];
    /** Explanation texts for the selected step only. */
    selectedTexts: string[];
    empty: boolean;
}

export interface DominanceColumn {
    action: number;
    actionName: string;
    chosen: boolean;
    segments: { channel: string; color: string; value: number }[];
}

export interface DominancePanel {
    kind: "dominance";
    /** Step whose dominance breakdown is shown, or null with no data. */
    step: number | null;
    columns: DominanceColumn[];
    absolute: boolean;
    empty: boolean;
}

export interface PanelSet {
    state: StatePanel;
    reward: RewardPanel;
    action: ActionStrip;
    interaction: InteractionStrip;
    dominance: DominancePanel;
    /** Step highlighted in every panel at once, or null. */
    hoverStep: number | null;
}

const STATE_LABELS = [
    "arrival_rate",
    "servers",
    "dimmer",
    "response_time",
    "throughput",
];

export function buildStatePanel(records: StepRecordMsg[]): StatePanel {
    if (records.length === 0) {
        return { kind: "state", series: [], empty: true };
    }
    const series: LineSeries[] = [];
    const dim = records[0].observation.length;
    for (let i = 0; i < dim; i++) {
        const standardized = zscore(records.map((r) => r.observation[i]));
        series.push({
            name: STATE_LABELS[i] ?? `component_${i}`,
            color: STATE_COLORS[i % STATE_COLORS.length],
            points: records.map((r, k) => ({ step: r.step, value: standardized[k] })),
        });
    }
    return { kind: "state", series, empty: false };
}

function extremaOf(record: StepRecordMsg): ExtremumEvent[] {
    return record.events.filter(
        (e): e is ExtremumEvent => e.type === "reward_channel_extremum",
    );
}

function interactionsOf(record: StepRecordMsg): ImportantInteractionEvent[] {
    return record.events.filter(
        (e): e is ImportantInteractionEvent => e.type === "important_interaction",
    );
}

function dominanceOf(record: StepRecordMsg): DominanceEvent | undefined {
    return record.events.find(
        (e): e is DominanceEvent => e.type === "reward_channel_dominance",
    );
}

function scopeName(scope: number | "aggregate"): string {
    return scope === "aggregate" ? "aggregate" : CHANNEL_NAMES[scope] ?? `channel_${scope}`;
}

export function buildRewardPanel(records: StepRecordMsg[]): RewardPanel {
    if (records.length === 0) {
        return { kind: "reward", series: [], extremumMarkers: [], empty: true };
    }
    const nChannels = records[0].reward.length;
    const series: LineSeries[] = [];
    for (let c = 0; c < nChannels; c++) {
        const name = CHANNEL_NAMES[c] ?? `channel_${c}`;
        series.push({
            name,
            color: channelColor(name),
            points: records.map((r) => ({ step: r.step, value: r.reward[c] })),
        });
    }
    series.push({
        name: "total",
        color: channelColor("aggregate"),
        points: records.map((r) => ({ step: r.step, value: r.reward_total })),
    });

    const extremumMarkers: Marker[] = [];
    for (const r of records) {
        for (const e of extremaOf(r)) {
            extremumMarkers.push({
                step: r.step,
                color: channelColor(scopeName(e.scope)),
                label: e.text,
                shape: e.kind === "max" ? "triangle-up" : "triangle-down",
            });
        }
    }
    return { kind: "reward", series, extremumMarkers, empty: false };
}

export function buildActionStrip(records: StepRecordMsg[]): ActionStrip {
    if (records.length === 0) {
        return { kind: "action", marks: [], empty: true };
    }
    return {
        kind: "action",
        marks: records.map((r) => ({
            step: r.step,
            action: r.action,
            label: r.action_name,
        })),
        empty: false,
    };
}

export function buildInteractionStrip(
    records: StepRecordMsg[],
    selectedStep: number | null,
): InteractionStrip {
    if (records.length === 0) {
        return { kind: "interaction", markers: [], selectedTexts: [], empty: true };
    }
    const markers: Marker[] = [];
    const selectedTexts: string[] = [];
    for (const r of records) {
        for (const e of interactionsOf(r)) {
            markers.push({
                step: r.step,
                color: channelColor(CHANNEL_NAMES[e.channel_id] ?? `channel_${e.channel_id}`),
                label: e.text,
                shape: "dot",
            });
            if (selectedStep !== null && r.step === selectedStep) {
                selectedTexts.push(e.text);
            }
        }
    }
    return { kind: "interaction", markers, selectedTexts, empty: false };
}

/**
 * Dominance breakdown for one step: a stacked column per action, one
 * segment per channel. Relative values (worst action at zero) by default,
 * raw action-values on toggle.
 */
export function buildDominancePanel(
    record: StepRecordMsg | undefined,
    absolute: boolean,
): DominancePanel {
    const dom = record ? dominanceOf(record) : undefined;
    if (!record || !dom) {
        return { kind: "dominance", step: null, columns: [], absolute, empty: true };
    }
    const matrix = absolute ? dom.absolute : dom.relative;
    const nChannels = matrix.length;
    const nActions = matrix[0]?.length ?? 0;
    const columns: DominanceColumn[] = [];
    for (let a = 0; a < nActions; a++) {
        const segments = [];
        for (let c = 0; c < nChannels; c++) {
            const name = CHANNEL_NAMES[c] ?? `channel_${c}`;
            segments.push({ channel: name, color: channelColor(name), value: matrix[c][a] });
        }
        columns.push({
            action: a,
            actionName: ACTION_NAMES[a] ?? `action_${a}`,
            chosen: a === record.action,
            segments,
        });
    }
    return { kind: "dominance", step: record.step, columns, absolute, empty: false };
}

/**
 * Build all five panels from one buffer. Hovering (or, failing that,
 * selecting) a step re-targets the dominance breakdown and the interaction
 * texts, so pointing anywhere highlights the same step everywhere.
 */
export function renderPanels(vm: ViewModel, absoluteDominance = false): PanelSet {
    const records = vm.records;
    const focusStep =
        vm.hoverStep ?? vm.selectedStep ?? (records.length ? records[records.length - 1].step : null);
    const focusRecord = focusStep !== null ? vm.recordAt(focusStep) : undefined;
    return {
        state: buildStatePanel(records),
        reward: buildRewardPanel(records),
        action: buildActionStrip(records),
        interaction: buildInteractionStrip(records, focusStep),
        dominance: buildDominancePanel(focusRecord, absoluteDominance),
        hoverStep: vm.hoverStep,
    };
}
