import {
    StepRecordMsg,
    DineEvent,
    DominanceEvent,
    ImportantInteractionEvent,
    ExtremumEvent,
} from "../src/types.js";

export function makeDominance(step: number, q?: number[][]): DominanceEvent {
    const absolute = q ?? [
        [1.0, 0.5, 2.0, 0.2, 0.8],
        [0.3, 0.9, 0.1, 0.4, 0.6],
        [-0.2, -0.5, -0.1, -0.9, -0.3],
    ];
    const relative = absolute.map((row) => {
        const lo = Math.min(...row);
        return row.map((v) => v - lo);
    });
    return { type: "reward_channel_dominance", step, absolute, relative, text: "dominance" };
}

export function makeInteraction(
    step: number,
    channel = 1,
    chosen = 0,
    contrast = 2,
): ImportantInteractionEvent {
    return {
        type: "important_interaction",
        step,
        channel_id: channel,
        chosen_action: chosen,
        contrast_action: contrast,
        importance: 0.43,
        text: `interaction at ${step} channel ${channel}`,
    };
}

export function makeExtremum(
    step: number,
    scope: number | "aggregate" = 0,
    kind: "min" | "max" = "max",
): ExtremumEvent {
    return {
        type: "reward_channel_extremum",
        step,
        scope,
        kind,
        margin: 0.2,
        text: `extremum at ${step}`,
    };
}

export function makeRecord(step: number, events: DineEvent[] = []): StepRecordMsg {
    return {
        type: "step_record",
        step,
        state: {
            arrival_rate: 50 + step,
            active_servers: 2,
            booting_servers: 0,
            dimmer: 0.5,
            response_time: 0.1,
            throughput: 45,
            step_index: step,
        },
        observation: [50 + step, 2, 0.5, 0.1, 45],
        action: step % 5,
        action_name: ["NoAdaptation", "AddServer", "RemoveServer", "IncreaseDimmer", "DecreaseDimmer"][step % 5],
        legal: true,
        reward: [0.4, 1.2, -0.5],
        reward_total: 0.4 * 4 + 1.2 * 2 + -0.5 * 1,
        q_values: [
            [1, 0.5, 2, 0.2, 0.8],
            [0.3, 0.9, 0.1, 0.4, 0.6],
            [-0.2, -0.5, -0.1, -0.9, -0.3],
        ],
        q_aggregate: [1.1, 0.9, 2.0, -0.3, 1.1],
        events: [...events, makeDominance(step)],
        epsilon: 0.1,
        thresholds: { rho: 0.25, phi: 0.05 },
        model_ready: false,
    };
}
