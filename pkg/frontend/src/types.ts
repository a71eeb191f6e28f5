// Wire-protocol message shapes, mirroring the backend's JSON schema
// (length-delimited frames over TCP; schema_version announced in hello).

export interface SimStateMsg {
    arrival_rate: number;
    active_servers: number;
    booting_servers: number;
    dimmer: number;
    response_time: number;
    throughput: number;
    step_index: number;
}

export interface ImportantInteractionEvent {
    type: "important_interaction";
    step: number;
    channel_id: number;
    chosen_action: number;
    contrast_action: number;
    importance: number;
    text: string;
}

export interface ExtremumEvent {
    type: "reward_channel_extremum";
    step: number;
    scope: number | "aggregate";
    kind: "min" | "max";
    margin: number;
    text: string;
}

export interface DominanceEvent {
    type: "reward_channel_dominance";
    step: number;
    absolute: number[][];
    relative: number[][];
    text: string;
}

export type DineEvent = ImportantInteractionEvent | ExtremumEvent | DominanceEvent;

export interface StepRecordMsg {
    type: "step_record";
    step: number;
    state: SimStateMsg;
    observation: number[];
    action: number;
    action_name: string;
    legal: boolean;
    reward: number[];
    reward_total: number;
    q_values: number[][];
    q_aggregate: number[];
    events: DineEvent[];
    epsilon: number;
    thresholds: { rho: number; phi: number };
    model_ready: boolean;
}

export interface HelloMsg {
    type: "hello";
    schema_version: number;
    mode: "live" | "replay";
}

export interface ThresholdAckMsg {
    type: "threshold_ack";
    kind: "rho" | "phi";
    value: number;
    effective_from_step: number;
}

export interface MsxReplyMsg {
    type: "msx_reply";
    step: number;
    action: number;
    action_name: string;
    channels: number[];
    channel_names: string[];
}

export interface ErrorMsg {
    type: "error";
    message: string;
}

export type ServerMessage =
    | HelloMsg
    | StepRecordMsg
    | ThresholdAckMsg
    | MsxReplyMsg
    | ErrorMsg;

export interface SetThresholdMsg {
    type: "set_threshold";
    kind: "rho" | "phi";
    value: number;
}

export interface MsxRequestMsg {
    type: "msx_request";
    step: number;
}

export type ClientMessage =
    | SetThresholdMsg
    | MsxRequestMsg
    | { type: "pause" }
    | { type: "resume" };

export const CHANNEL_NAMES = ["user_satisfaction", "revenue", "costs"] as const;

export const ACTION_NAMES = [
    "NoAdaptation",
    "AddServer",
    "RemoveServer",
    "IncreaseDimmer",
    "DecreaseDimmer",
] as const;
