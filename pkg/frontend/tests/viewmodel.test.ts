import { describe, it, expect } from "vitest";
import { ViewModel } from "../src/viewmodel.js";
import { makeRecord } from "./helpers.js";

describe("ViewModel", () => {
    it("adopts mode and schema from hello", () => {
        const vm = new ViewModel();
        expect(vm.connected).toBe(false);
        vm.ingest({ type: "hello", schema_version: 1, mode: "replay" });
        expect(vm.mode).toBe("replay");
        expect(vm.schemaVersion).toBe(1);
        expect(vm.connected).toBe(true);
    });

    it("keeps records ordered by step", () => {
        const vm = new ViewModel();
        for (const s of [0, 1, 2, 4]) vm.ingest(makeRecord(s));
        vm.ingest(makeRecord(3)); // late arrival
        expect(vm.records.map((r) => r.step)).toEqual([0, 1, 2, 3, 4]);
    });

    it("evicts the oldest records beyond capacity", () => {
        const vm = new ViewModel(5);
        for (let s = 0; s < 12; s++) vm.ingest(makeRecord(s));
        expect(vm.records.length).toBe(5);
        expect(vm.firstStep).toBe(7);
        expect(vm.lastStep).toBe(11);
    });

    it("commits a slider only on threshold_ack and records the annotation", () => {
        const vm = new ViewModel();
        vm.beginThresholdChange("rho", 0.9);
        expect(vm.displayedThreshold("rho")).toBe(0.9);
        expect(vm.sliders.rho.committed).toBe(0.25);

        vm.ingest({ type: "threshold_ack", kind: "rho", value: 0.9, effective_from_step: 17 });
        expect(vm.sliders.rho.committed).toBe(0.9);
        expect(vm.sliders.rho.pending).toBeNull();
        expect(vm.annotations).toEqual([
            { kind: "rho", value: 0.9, effectiveFromStep: 17 },
        ]);
    });

    it("reverts a pending slider when the server rejects the request", () => {
        const vm = new ViewModel();
        vm.beginThresholdChange("phi", 0.7);
        vm.ingest({ type: "error", message: "threshold out of range" });
        expect(vm.displayedThreshold("phi")).toBe(0.05);
        expect(vm.lastError).toBe("threshold out of range");
        expect(vm.annotations).toEqual([]);
    });

    it("reverts pending sliders on disconnect", () => {
        const vm = new ViewModel();
        vm.ingest({ type: "hello", schema_version: 1, mode: "live" });
        vm.beginThresholdChange("rho", 1.0);
        vm.onDisconnect();
        expect(vm.connected).toBe(false);
        expect(vm.displayedThreshold("rho")).toBe(0.25);
    });

    it("an ack for one knob leaves the other untouched", () => {
        const vm = new ViewModel();
        vm.beginThresholdChange("rho", 0.6);
        vm.beginThresholdChange("phi", 0.3);
        vm.ingest({ type: "threshold_ack", kind: "phi", value: 0.3, effective_from_step: 2 });
        expect(vm.sliders.phi.committed).toBe(0.3);
        expect(vm.sliders.rho.pending).toBe(0.6);
        expect(vm.sliders.rho.committed).toBe(0.25);
    });

    it("collects msx replies and finds records by step", () => {
        const vm = new ViewModel();
        vm.ingest(makeRecord(3));
        vm.ingest({
            type: "msx_reply",
            step: 3,
            action: 2,
            action_name: "RemoveServer",
            channels: [1],
            channel_names: ["revenue"],
        });
        expect(vm.msxReplies.length).toBe(1);
        expect(vm.recordAt(3)?.step).toBe(3);
        expect(vm.recordAt(99)).toBeUndefined();
    });

    it("tracks hover and selection independently", () => {
        const vm = new ViewModel();
        vm.ingest(makeRecord(1));
        vm.setSelected(1);
        vm.setHover(1);
        vm.setHover(null);
        expect(vm.hoverStep).toBeNull();
        expect(vm.selectedStep).toBe(1);
    });
});
