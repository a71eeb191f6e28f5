// One fixed color per reward channel, used consistently across every panel
// so a channel is recognizable at a glance.

export const CHANNEL_COLORS: Record<string, string> = {
    user_satisfaction: "#1f77b4",
    revenue: "#2ca02c",
    costs: "#d62728",
    aggregate: "#7f7f7f",
};

export const STATE_COLORS = [
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
];

export function channelColor(name: string): string {
    return CHANNEL_COLORS[name] ?? "#333333";
}
