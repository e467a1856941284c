/** Contract tests against a real gateway process.
 *
 * A scenario stream is generated and served exactly as an operator
 * station would see it; every assertion goes through the public HTTP
 * surface.  Tests in this file run in order and share the server.
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { acknowledgeGroup, buildBoard } from "../src/alarmBoard";
import { GatewayClient, GatewayError } from "../src/api";
import { submitFeedback } from "../src/cardReader";
import { ConsoleStore } from "../src/store";
import type { PresentationUnit } from "../src/types";

const PORT = 8917;
const BASE = `http://127.0.0.1:${PORT}`;
const SCENARIO = ["--seed", "11", "--duration-s", "30000", "--reel-duration-s", "600"];

let workdir: string;
let server: ChildProcess | null = null;
let serverLog = "";
let client: GatewayClient;
let cardA = "";
let cardB = "";

function malfunction(description: string) {
  return {
    description,
    cause: "press felt wash cycle left residue",
    locations: ["press_section"],
    error_codes: ["W300"],
    situations: ["felt_wash"],
  };
}

async function waitForHealth(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastError = "";
  while (Date.now() < deadline) {
    try {
      await client.health();
      return;
    } catch (err) {
      lastError = String(err);
      await new Promise((r) => setTimeout(r, 500));
    }
  }
  throw new Error(
    `gateway did not come up: ${lastError}\nserver output:\n${serverLog}`,
  );
}

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), "console-int-"));
  const log = join(workdir, "stream.ndjson");
  const sim = spawnSync("millassist", ["sim", ...SCENARIO, "--out", log], {
    encoding: "utf8",
    timeout: 90_000,
  });
  if (sim.status !== 0) {
    throw new Error(`sim failed: ${sim.stderr}`);
  }
  server = spawn(
    "millassist",
    ["serve", ...SCENARIO, "--log", log, "--port", String(PORT)],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  server.stdout?.on("data", (chunk) => (serverLog += chunk));
  server.stderr?.on("data", (chunk) => (serverLog += chunk));
  client = new GatewayClient(BASE);
  await waitForHealth(90_000);

  await client.registerUser("op1", "operator");
  await client.registerUser("ed1", "editor");
  cardA = (
    await client.createCard(
      malfunction("Felt wash leaves streaks on the sheet"),
      [{ text: "Rinse the felt a second time", media: null }],
      "op1",
    )
  ).card_id;
  cardB = (
    await client.createCard(
      malfunction("Felt wash overruns its slot"),
      [{ text: "Shorten the wash program", media: null }],
      "op1",
    )
  ).card_id;
  // B approved later, so a score tie ranks B first
  await client.approveCard(cardA, "ed1", 1000);
  await client.approveCard(cardB, "ed1", 2000);
});

afterAll(() => {
  server?.kill();
  rmSync(workdir, { recursive: true, force: true });
});

describe("alarm board contract", () => {
  it("shows one row per presentation unit with correct counts", async () => {
    const { units, total } = await client.alarmGroups();
    expect(units.length).toBeGreaterThan(0);
    expect(total).toBe(units.length);

    const board = buildBoard(units, Date.now());
    expect(board.rows).toHaveLength(units.length);
    const seen = new Set(board.rows.map((r) => r.groupId));
    expect(seen.size).toBe(units.length);

    for (const unit of units) {
      const row = board.rows.find((r) => r.groupId === unit.group_id)!;
      expect(row.count).toBe(unit.count);
      expect(row.members).toHaveLength(unit.count);
      expect(row.badge).toBe(unit.count > 1 ? `×${unit.count}` : null);
    }
    // the stream's chatter bursts must arrive folded, not as raw rows
    const folded = board.rows.filter((r) => r.count > 1);
    expect(folded.length).toBeGreaterThan(0);
  });

  it("acknowledge round-trips and survives a refetch", async () => {
    const { units } = await client.alarmGroups();
    const target = units.find((u) => u.plan.acknowledged_at === null)!;
    expect(target).toBeDefined();

    const outcome = await acknowledgeGroup(client, units, target.group_id, 123_456);
    expect(outcome.ok).toBe(true);

    const fresh = await client.alarmGroups();
    const refetched = fresh.units.find(
      (u: PresentationUnit) => u.group_id === target.group_id,
    )!;
    expect(refetched.plan.acknowledged_at).toBe(123_456);
  });
});

describe("assist contract", () => {
  const trigger = {
    kind: "recognized_situation" as const,
    timestamp: 5000,
    location: "press_section",
    situation_label: "felt_wash",
  };

  it("feedback updates the ranking seen on the next fetch", async () => {
    const first = await client.trigger(trigger);
    expect(first.candidates.map(([id]) => id)).toEqual([cardB, cardA]);

    const sent = await submitFeedback(
      client,
      {
        recommendationId: first.recommendation_id,
        cardId: cardA,
        verdict: "confirm",
        author: "op1",
        text: "",
      },
      6000,
    );
    expect(sent.ok).toBe(true);
    if (sent.ok) {
      expect(sent.result.confirms).toBe(1);
      expect(sent.result.score).toBeCloseTo(2 / 3, 5);
    }

    const second = await client.trigger({ ...trigger, timestamp: 7000 });
    expect(second.candidates.map(([id]) => id)).toEqual([cardA, cardB]);
    expect(second.candidates[0]?.[1]).toBeCloseTo(2 / 3, 5);
    expect(second.candidates[1]?.[1]).toBeCloseTo(0.5, 5);
  });

  it("marks the recommendation acted once feedback lands", async () => {
    const recs = await client.recommendations();
    const dispositions = recs.map((r) => r.disposition);
    expect(dispositions).toContain("acted");
    expect(dispositions).toContain("open");
  });
});

describe("reload", () => {
  it("reconstructs the console from the gateway alone", async () => {
    const one = new ConsoleStore();
    await one.loadAll(client);
    // a second store with no shared state must land on the same picture
    const two = new ConsoleStore();
    await two.loadAll(client);

    expect(one.units).toEqual(two.units);
    expect(one.metrics).toEqual(two.metrics);
    expect(one.recommendations).toEqual(two.recommendations);
    expect([...one.acknowledged].sort()).toEqual([...two.acknowledged].sort());

    // the earlier ack is server state now, not console memory
    expect(one.acknowledged.size).toBeGreaterThan(0);
    expect(one.units.length).toBeGreaterThan(0);
    expect(one.recommendations.length).toBeGreaterThan(0);
  });
});

describe("error contract", () => {
  it("reports untrained parameters with the stable code", async () => {
    await expect(
      client.forecast("reel-000001", "tensile_strength"),
    ).rejects.toMatchObject({
      name: "GatewayError",
      code: "NOT_TRAINED",
      status: 409,
    });
  });

  it("reports unknown groups as NOT_FOUND with status 404", async () => {
    try {
      await client.acknowledge("no-such-group", 1);
      expect.unreachable("acknowledge must fail");
    } catch (err) {
      expect(err).toBeInstanceOf(GatewayError);
      const ge = err as GatewayError;
      expect(ge.code).toBe("NOT_FOUND");
      expect(ge.status).toBe(404);
    }
  });
});
