import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { ServiceClient } from "../src/api.js";
import { SessionView, validateParams, DEFAULT_PARAMS } from "../src/state.js";
import { renderResults } from "../src/views.js";
import { MockServiceTransport } from "./mockService.js";

const csv = readFileSync(new URL("./fixtures/suppliers.csv", import.meta.url), "utf8");
const prefs = readFileSync(new URL("./fixtures/judgments.txt", import.meta.url), "utf8");

async function loadedView(): Promise<SessionView> {
  const view = new SessionView(new ServiceClient(new MockServiceTransport()));
  await view.start();
  await view.loadTable(csv);
  await view.loadStatements(prefs.trim().split("\n"));
  return view;
}

describe("stale-report guard", () => {
  it("greys out reports computed at an older revision", async () => {
    const view = await loadedView();
    await view.solve({ mode: "select-consistent", p: 10 });
    expect(view.reportIsStale).toBe(false);
    expect(renderResults(view)).toContain("fresh");

    await view.addStatement("a1 > a2");  // bumps the revision
    expect(view.reportIsStale).toBe(true);
    expect(view.displayableReport).toBeNull();
    const html = renderResults(view);
    expect(html).toContain("stale");
    expect(html).toContain("re-solve to refresh");
  });

  it("a re-solve at the new revision is fresh again", async () => {
    const view = await loadedView();
    await view.solve({ mode: "select-consistent", p: 10 });
    await view.removeStatement(7);
    await view.addStatement("a4 > a7");
    await view.solve({ mode: "select-consistent", p: 10 });
    expect(view.reportIsStale).toBe(false);
  });
});

describe("parameter validation", () => {
  it("accepts the defaults", () => {
    expect(validateParams(DEFAULT_PARAMS)).toEqual([]);
  });

  it("rejects nonpositive epsilon client-side", () => {
    const problems = validateParams({ ...DEFAULT_PARAMS, epsilon: 0 });
    expect(problems.some((p) => p.field === "epsilon")).toBe(true);
  });

  it("rejects bad gamma and negative weights", () => {
    expect(validateParams({ ...DEFAULT_PARAMS, gamma: 0 })).not.toEqual([]);
    expect(validateParams({ ...DEFAULT_PARAMS, p: -1 })).not.toEqual([]);
    expect(validateParams({ ...DEFAULT_PARAMS, C: -0.5 })).not.toEqual([]);
  });

  it("solve refuses invalid params without calling the service", async () => {
    const view = await loadedView();
    await expect(view.solve({ epsilon: -1 })).rejects.toThrow(/margin/);
    expect(view.history).toHaveLength(0);
  });
});
