import { describe, expect, it } from "vitest";

import {
  DEFAULT_LAMBDA_GRID,
  defaultState,
  parseState,
  serializeState,
} from "../src/state.js";

describe("serializeState / parseState", () => {
  it("round-trips a fully populated state", () => {
    const state = defaultState();
    state.instance = { G: 1, A: 0, E: 1.5 };
    state.p = 1;
    state.normalization = "marginal_sigma";
    state.variant = "longest_path";
    state.lambda = 0.5;
    state.timeBudget = 4.5;
    state.lambdas = [0, 1, 10];
    state.seed = 7;

    const back = parseState(serializeState(state).toString());
    expect(back).toEqual(state);
  });

  it("round-trips a null budget by omitting the key", () => {
    const state = defaultState();
    state.timeBudget = null;
    const params = serializeState(state);
    expect(params.has("budget")).toBe(false);
    expect(parseState(params.toString()).timeBudget).toBeNull();
  });

  it("writes instance keys sorted for stable URLs", () => {
    const state = defaultState();
    state.instance = { S: -100, A: 0, G: 1 };
    const encoded = serializeState(state).toString();
    const order = [...encoded.matchAll(/i\.(\w+)=/g)].map((m) => m[1]);
    expect(order).toEqual(["A", "G", "S"]);
  });

  it("keeps defaults when fields are junk", () => {
    const back = parseState(
      "p=0.2&norm=banana&variant=nope&lam=-3&seed=2.5&i.E=abc",
    );
    const fallback = defaultState();
    expect(back.p).toBe(fallback.p);
    expect(back.normalization).toBe(fallback.normalization);
    expect(back.variant).toBe(fallback.variant);
    expect(back.lambda).toBe(fallback.lambda);
    expect(back.seed).toBe(fallback.seed);
    expect(back.instance).toEqual({});
  });

  it("parses the grid sorted and deduplicated", () => {
    const back = parseState("grid=5,0,1,1,junk,-2");
    expect(back.lambdas).toEqual([0, 1, 5]);
  });

  it("keeps the default grid when every grid entry is junk", () => {
    const back = parseState("grid=a,b");
    expect(back.lambdas).toEqual([...DEFAULT_LAMBDA_GRID]);
  });

  it("does not mutate the base state it extends", () => {
    const base = defaultState();
    base.instance = { E: 1 };
    const back = parseState("i.E=9&i.J=2", base);
    expect(back.instance).toEqual({ E: 9, J: 2 });
    expect(base.instance).toEqual({ E: 1 });
  });
});
