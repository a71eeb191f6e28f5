// Browser entry point. Consumes the SSE stream from the bridge, keeps the
// view model up to date, and redraws the five panels as inline SVG.

import { ViewModel } from "./viewmodel.js";
import { renderPanels, LineSeries, Marker, PanelSet } from "./panels.js";
import { ServerMessage } from "./types.js";

const vm = new ViewModel(2000);
let absoluteDominance = false;
let dirty = false;

const W = 900;
const H = 160;
const PAD = 30;

function xScale(steps: number[], step: number): number {
    const lo = Math.min(...steps);
    const hi = Math.max(...steps);
    if (hi === lo) return W / 2;
    return PAD + ((step - lo) / (hi - lo)) * (W - 2 * PAD);
}

function linePath(series: LineSeries, steps: number[], lo: number, hi: number): string {
    const span = hi - lo || 1;
    return series.points
        .map((p, i) => {
            const x = xScale(steps, p.step);
            const y = H - PAD - ((p.value - lo) / span) * (H - 2 * PAD);
            return `${i === 0 ? "M" : "L"}${x.toFixed(1)},${y.toFixed(1)}`;
        })
        .join(" ");
}

function drawLines(el: SVGElement, series: LineSeries[], steps: number[], hover: number | null) {
    let lo = Infinity;
    let hi = -Infinity;
    for (const s of series) {
        for (const p of s.points) {
            if (p.value < lo) lo = p.value;
            if (p.value > hi) hi = p.value;
        }
    }
    if (!isFinite(lo)) {
        lo = 0;
        hi = 1;
    }
    let svg = "";
    for (const s of series) {
        svg += `<path d="${linePath(s, steps, lo, hi)}" fill="none" stroke="${s.color}" stroke-width="1.5"><title>${s.name}</title></path>`;
    }
    if (hover !== null && steps.length) {
        const x = xScale(steps, hover);
        svg += `<line x1="${x}" y1="0" x2="${x}" y2="${H}" stroke="#888" stroke-dasharray="3,3"/>`;
    }
    el.innerHTML = svg;
}

function drawMarkers(el: SVGElement, markers: Marker[], steps: number[], y: number) {
    let svg = el.innerHTML;
    for (const m of markers) {
        const x = xScale(steps, m.step);
        if (m.shape === "triangle-up") {
            svg += `<path d="M${x - 4},${y + 4} L${x + 4},${y + 4} L${x},${y - 4} Z" fill="${m.color}"><title>${m.label}</title></path>`;
        } else if (m.shape === "triangle-down") {
            svg += `<path d="M${x - 4},${y - 4} L${x + 4},${y - 4} L${x},${y + 4} Z" fill="${m.color}"><title>${m.label}</title></path>`;
        } else {
            svg += `<circle cx="${x}" cy="${y}" r="4" fill="${m.color}"><title>${m.label}</title></circle>`;
        }
    }
    el.innerHTML = svg;
}

function panel(id: string): SVGElement {
    return document.getElementById(id) as unknown as SVGElement;
}

function redraw() {
    const panels: PanelSet = renderPanels(vm, absoluteDominance);
    const steps = vm.records.map((r) => r.step);
    const hover = panels.hoverStep;

    drawLines(panel("state-panel"), panels.state.series, steps, hover);
    drawLines(panel("reward-panel"), panels.reward.series, steps, hover);
    drawMarkers(panel("reward-panel"), panels.reward.extremumMarkers, steps, H / 2);

    // Threshold changes are pinned to the time axis from their effective step.
    if (steps.length) {
        let annoSvg = "";
        for (const a of vm.annotations) {
            if (a.effectiveFromStep < steps[0] || a.effectiveFromStep > steps[steps.length - 1]) {
                continue;
            }
            const x = xScale(steps, a.effectiveFromStep);
            annoSvg += `<line x1="${x}" y1="0" x2="${x}" y2="${H}" stroke="#b8860b"/>` +
                `<text x="${x + 2}" y="12" font-size="9" fill="#b8860b">${a.kind}=${a.value}</text>`;
        }
        panel("reward-panel").innerHTML += annoSvg;
    }

    const actionEl = panel("action-panel");
    let actionSvg = "";
    for (const mark of panels.action.marks) {
        const x = xScale(steps, mark.step);
        const y = H - PAD - mark.action * ((H - 2 * PAD) / 5);
        actionSvg += `<rect x="${x - 2}" y="${y - 2}" width="4" height="4" fill="#444"><title>${mark.label}</title></rect>`;
    }
    if (hover !== null && steps.length) {
        const x = xScale(steps, hover);
        actionSvg += `<line x1="${x}" y1="0" x2="${x}" y2="${H}" stroke="#888" stroke-dasharray="3,3"/>`;
    }
    actionEl.innerHTML = actionSvg;

    const interEl = panel("interaction-panel");
    interEl.innerHTML = "";
    drawMarkers(interEl, panels.interaction.markers, steps, H / 2);
    if (hover !== null && steps.length) {
        const x = xScale(steps, hover);
        interEl.innerHTML += `<line x1="${x}" y1="0" x2="${x}" y2="${H}" stroke="#888" stroke-dasharray="3,3"/>`;
    }

    // Dominance: one stacked column per action for the focused step.
    const domEl = panel("dominance-panel");
    let domSvg = "";
    const dom = panels.dominance;
    if (!dom.empty) {
        const maxStack = Math.max(
            1,
            ...dom.columns.map((c) => c.segments.reduce((a, s) => a + Math.abs(s.value), 0)),
        );
        const slot = (W - 2 * PAD) / dom.columns.length;
        dom.columns.forEach((col, i) => {
            const x = PAD + i * slot + slot / 2;
            let yCursor = H - PAD;
            for (const seg of col.segments) {
                const h = (Math.abs(seg.value) / maxStack) * (H - 2 * PAD);
                yCursor -= h;
                domSvg += `<rect x="${x - 14}" y="${yCursor}" width="28" height="${h}" fill="${seg.color}" opacity="0.85"><title>${seg.channel}: ${seg.value.toFixed(3)}</title></rect>`;
            }
            if (col.chosen) {
                domSvg += `<rect x="${x - 16}" y="${PAD - 4}" width="32" height="${H - 2 * PAD + 8}" fill="none" stroke="#222" stroke-dasharray="4,2"/>`;
            }
            domSvg += `<text x="${x}" y="${H - 8}" font-size="9" text-anchor="middle">${col.actionName}</text>`;
        });
        domSvg += `<text x="${PAD}" y="14" font-size="10">step ${dom.step} (${dom.absolute ? "absolute" : "relative"})</text>`;
    }
    domEl.innerHTML = domSvg;

    const status = document.getElementById("status")!;
    status.textContent = vm.connected
        ? `mode: ${vm.mode ?? "?"} | steps: ${vm.records.length} | ρ=${vm.displayedThreshold("rho").toFixed(2)} φ=${vm.displayedThreshold("phi").toFixed(2)}` +
          (vm.lastError ? ` | error: ${vm.lastError}` : "")
        : "disconnected";

    const hoverInfo = document.getElementById("hover-info")!;
    if (hover !== null) {
        const rec = vm.recordAt(hover);
        const texts = panels.interaction.selectedTexts;
        hoverInfo.textContent = rec
            ? `step ${hover}: action=${rec.action_name} total=${rec.reward_total.toFixed(2)}` +
              (texts.length ? ` | ${texts.join("; ")}` : "")
            : "";
    } else {
        hoverInfo.textContent = "";
    }
}

function scheduleRedraw() {
    if (dirty) return;
    dirty = true;
    requestAnimationFrame(() => {
        dirty = false;
        redraw();
    });
}

function postControl(payload: unknown) {
    fetch("/control", { method: "POST", body: JSON.stringify(payload) }).catch(() => {
        vm.onDisconnect();
        scheduleRedraw();
    });
}

function wireSlider(kind: "rho" | "phi", inputId: string) {
    const input = document.getElementById(inputId) as HTMLInputElement;
    input.addEventListener("change", () => {
        const value = parseFloat(input.value);
        vm.beginThresholdChange(kind, value);
        postControl({ type: "set_threshold", kind, value });
        scheduleRedraw();
    });
}

function wireHover() {
    for (const id of [
        "state-panel",
        "reward-panel",
        "action-panel",
        "interaction-panel",
        "dominance-panel",
    ]) {
        const el = document.getElementById(id)!;
        el.addEventListener("mousemove", (ev: MouseEvent) => {
            if (!vm.records.length) return;
            const rect = el.getBoundingClientRect();
            const frac = (ev.clientX - rect.left - PAD) / (rect.width - 2 * PAD);
            const lo = vm.firstStep!;
            const hi = vm.lastStep!;
            const step = Math.round(lo + Math.max(0, Math.min(1, frac)) * (hi - lo));
            vm.setHover(step);
            scheduleRedraw();
        });
        el.addEventListener("mouseleave", () => {
            vm.setHover(null);
            scheduleRedraw();
        });
    }
}

function start() {
    const source = new EventSource("/events");
    source.onmessage = (ev) => {
        vm.ingest(JSON.parse(ev.data) as ServerMessage);
        scheduleRedraw();
    };
    source.onerror = () => {
        vm.onDisconnect();
        scheduleRedraw();
    };

    wireSlider("rho", "rho-slider");
    wireSlider("phi", "phi-slider");
    wireHover();

    const toggle = document.getElementById("absolute-toggle") as HTMLInputElement;
    toggle.addEventListener("change", () => {
        absoluteDominance = toggle.checked;
        scheduleRedraw();
    });
}

start();
