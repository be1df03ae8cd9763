// @vitest-environment jsdom
//
// End-to-end against a real stub-backed service instance: spawns the
// python service on a scratch port, then drives the actual views over
// HTTP. Skipped when the python package is not installed.
import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ScholarQAClient } from "../src/api.js";
import { renderAnnotateView, renderAskView } from "../src/views.js";

const PORT = 8733;
const BASE = `http://127.0.0.1:${PORT}`;
const CORPUS = resolve(__dirname, "../../tests/fixtures/corpus_60.jsonl");

let service: ChildProcess | null = null;
let available = false;

async function waitForHealth(timeoutMs: number): Promise<boolean> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/v1/healthz`);
      if (response.ok) return true;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  return false;
}

beforeAll(async () => {
  const dataDir = mkdtempSync(join(tmpdir(), "scholarqa-web-"));
  const bootstrap = [
    "import sys, uvicorn",
    "from pathlib import Path",
    "from scholarqa.service import ServiceConfig, create_app",
    `cfg = ServiceConfig(corpus_path=Path(sys.argv[1]), data_dir=Path(sys.argv[2]))`,
    `uvicorn.run(create_app(cfg), host='127.0.0.1', port=${PORT}, log_level='warning')`,
  ].join("\n");
  service = spawn("python3", ["-c", bootstrap, CORPUS, dataDir], {
    stdio: "ignore",
  });
  service.on("error", () => {
    service = null;
  });
  available = await waitForHealth(20000);
});

afterAll(() => {
  service?.kill();
});

function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 50));
}

async function until(predicate: () => boolean, timeoutMs = 10000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (!predicate()) {
    if (Date.now() > deadline) throw new Error("condition never became true");
    await flush();
  }
}

describe("against a live stub-backed service", () => {
  it("ask flow renders five citation cards whose links equal the payload urls", async (ctx) => {
    if (!available) return ctx.skip();
    const client = new ScholarQAClient(BASE);
    const payload = await client.ask(
      "What are the current research challenges in chemistry?",
    );
    expect(payload.citations).toHaveLength(5);

    document.body.innerHTML = '<main id="app"></main>';
    const root = document.getElementById("app")!;
    renderAskView(root, client);
    const input = root.querySelector<HTMLInputElement>(".question-input")!;
    input.value = "What are the current research challenges in chemistry?";
    input.dispatchEvent(new Event("input"));
    root.querySelector("form")!.dispatchEvent(new Event("submit"));
    await until(() => root.querySelectorAll(".citation-card").length > 0);

    const links = [...root.querySelectorAll(".citation-link")].map((a) =>
      a.getAttribute("href"),
    );
    expect(links).toEqual(payload.citations.map((c) => c.url));
    expect(root.querySelector(".insufficiency-banner")).toBeNull();
  });

  it("insufficiency banner shows for unanswerable questions", async (ctx) => {
    if (!available) return ctx.skip();
    document.body.innerHTML = '<main id="app"></main>';
    const root = document.getElementById("app")!;
    renderAskView(root, new ScholarQAClient(BASE));
    const input = root.querySelector<HTMLInputElement>(".question-input")!;
    input.value = "Zorblax kumquat synergy?";
    input.dispatchEvent(new Event("input"));
    root.querySelector("form")!.dispatchEvent(new Event("submit"));
    await until(() => root.querySelector(".insufficiency-banner") !== null);
    expect(root.querySelectorAll(".citation-card")).toHaveLength(0);
  });

  it("annotation flow posts eight in-range scores and advances the queue", async (ctx) => {
    if (!available) return ctx.skip();
    const client = new ScholarQAClient(BASE);
    // make sure at least two answers exist
    await client.ask("What role does data availability play in advancing geology?");
    await client.ask("Which factors limit the reproducibility of findings in physics?");
    const expectedQueue = (await client.listAnswers())
      .map((s) => s.answer_id)
      .sort();
    expect(expectedQueue.length).toBeGreaterThanOrEqual(2);

    document.body.innerHTML = '<main id="app"></main>';
    const root = document.getElementById("app")!;
    const storage = {
      getItem: (k: string) => (k === "annotator_id" ? "ann-live" : null),
      setItem: () => undefined,
    };
    await renderAnnotateView(root, client, storage);
    await until(() => root.querySelector(".queue-progress") !== null);
    expect(root.querySelector(".queue-progress")!.textContent).toBe(
      `Answer 1 of ${expectedQueue.length}`,
    );

    for (const input of root.querySelectorAll<HTMLInputElement>(".score-input")) {
      input.value = "8";
      input.dispatchEvent(new Event("input"));
    }
    const submit = root.querySelector<HTMLButtonElement>(".submit-annotation")!;
    expect(submit.disabled).toBe(false);
    submit.click();
    await until(
      () =>
        root.querySelector(".queue-progress")?.textContent ===
        `Answer 2 of ${expectedQueue.length}`,
    );

    // the annotation landed server-side for the first answer in id order
    const health = await (await fetch(`${BASE}/v1/healthz`)).json();
    expect(health.annotations).toBeGreaterThanOrEqual(1);
  });
});
