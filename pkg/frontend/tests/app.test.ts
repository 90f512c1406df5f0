import { describe, expect, it } from "vitest";

import { parseRoute, resolveBaseUrl } from "../src/app.js";

describe("routing", () => {
  it("maps hashes onto the four views", () => {
    expect(parseRoute("")).toEqual({ view: "executions" });
    expect(parseRoute("#/")).toEqual({ view: "executions" });
    expect(parseRoute("#/new")).toEqual({ view: "wizard" });
    expect(parseRoute("#/monitor")).toEqual({ view: "monitor" });
    expect(parseRoute("#/executions/we-123abc")).toEqual({
      view: "detail",
      weid: "we-123abc",
    });
  });

  it("falls back to the execution list for unknown hashes", () => {
    expect(parseRoute("#/bogus/route")).toEqual({ view: "executions" });
  });
});

describe("base URL", () => {
  it("honours the single ?api= setting and defaults to the CLI bind", () => {
    expect(resolveBaseUrl("?api=http://10.0.0.5:9000")).toBe("http://10.0.0.5:9000");
    expect(resolveBaseUrl("")).toBe("http://127.0.0.1:8100");
  });
});
