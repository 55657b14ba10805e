// @vitest-environment jsdom

// Scripted end-to-end of the two evaluation cases, driven through the real
// DOM app: Case 1 walks every feature (install, create with microphone,
// library, PDF download, delete); Case 2 creates a story with the network
// cut mid-write and must finish all tasks without a single request going out.

import "fake-indexeddb/auto";
import { beforeAll, describe, expect, it, vi } from "vitest";

import { Api } from "../src/api";
import { App } from "../src/app";
import { VoiceInput } from "../src/speech";
import { openLibrary } from "../src/storage";
import type { CatalogDoc, StoryDoc } from "../src/types";
import type { RecognitionEventLike, RecognitionLike } from "../src/speech";

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const here = dirname(fileURLToPath(import.meta.url));
const catalog = JSON.parse(
  readFileSync(join(here, "../../conformance/session-vectors.json"), "utf-8"),
).catalog as CatalogDoc;

if (typeof crypto.randomUUID !== "function") {
  // some DOM test environments ship crypto without randomUUID
  (crypto as { randomUUID?: () => string }).randomUUID = () =>
    "xxxxxxxx-xxxx-4xxx-8xxx-xxxxxxxxxxxx".replace(/x/g, () =>
      Math.floor(Math.random() * 16).toString(16),
    ) as never;
}

class FakeServer {
  offline = false;
  requests = 0;
  readonly stories = new Map<string, StoryDoc>();

  fetch = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    if (this.offline) throw new TypeError("fetch failed");
    this.requests += 1;
    const path = String(input);
    const method = init?.method ?? "GET";

    if (path === "/api/v1/catalog") return json(catalog);
    if (path === "/api/v1/config") return json({ require_ending: false });
    if (path === "/api/v1/stories" && method === "POST") {
      const doc = JSON.parse(String(init?.body)) as StoryDoc;
      if (this.stories.has(doc.id)) {
        return json({ status: 409, code: "duplicate_id", message: "dup" }, 409);
      }
      this.stories.set(doc.id, doc);
      return json(doc, 201);
    }
    const storyMatch = path.match(/^\/api\/v1\/stories\/([^/]+)$/);
    if (storyMatch && method === "DELETE") {
      return this.stories.delete(storyMatch[1])
        ? new Response(null, { status: 204 })
        : json({ status: 404, code: "not_found", message: "missing" }, 404);
    }
    return json({ status: 404, code: "not_found", message: path }, 404);
  };
}

function json(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

class FakeRecognition implements RecognitionLike {
  static current: FakeRecognition | null = null;
  lang = "";
  continuous = false;
  interimResults = true;
  onresult: ((event: RecognitionEventLike) => void) | null = null;
  onend: (() => void) | null = null;

  constructor() {
    FakeRecognition.current = this;
  }

  start(): void {}
  stop(): void {
    this.onend?.();
  }

  speak(transcript: string): void {
    this.onresult?.({ resultIndex: 0, results: [{ isFinal: true, 0: { transcript } }] });
  }
}

// -- DOM driving helpers -------------------------------------------------------

const root = document.createElement("div");
document.body.appendChild(root);

function find(testId: string): HTMLElement {
  const node = root.querySelector(`[data-testid="${testId}"]`);
  if (!node) throw new Error(`no element with data-testid=${testId}`);
  return node as HTMLElement;
}

function click(testId: string): void {
  find(testId).click();
}

function type(testId: string, text: string): void {
  const box = find(testId) as HTMLInputElement | HTMLTextAreaElement;
  box.value = text;
  box.dispatchEvent(new window.Event("input", { bubbles: true }));
}

function path(): string {
  return window.location.pathname;
}

async function settled(): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, 0));
}

// reject the current card repeatedly until the given card id is showing
function rejectUntilCard(id: number): void {
  for (let guard = 0; guard < 32; guard += 1) {
    const progress = find("card-progress").textContent ?? "";
    const current = Number(progress.match(/Carta (\d+)/)?.[1]);
    if (current === id) return;
    click("reject");
  }
  throw new Error(`never reached card ${id}`);
}

function rejectRemainingCards(): void {
  for (let guard = 0; guard < 32 && path() === "/cards"; guard += 1) {
    if (!root.querySelector('[data-testid="reject"]')) break;
    click("reject");
  }
}

const server = new FakeServer();
const online = { value: true };
const pdfOpens: string[] = [];
let app: App;

beforeAll(async () => {
  window.history.replaceState({}, "", "/");
  app = new App({
    root,
    api: new Api(server.fetch as typeof fetch),
    library: await openLibrary(),
    voice: new VoiceInput(FakeRecognition),
    win: window,
    isOnline: () => online.value,
    openPdf: (url) => pdfOpens.push(url),
  });
  await app.boot();
});

describe("case 1: guided tour of every feature", () => {
  it("a) shows the install affordance when the browser offers it", async () => {
    const prompt = vi.fn().mockResolvedValue(undefined);
    const event = new window.Event("beforeinstallprompt") as Event & {
      prompt: () => Promise<void>;
    };
    event.prompt = prompt;
    window.dispatchEvent(event);
    click("install-app");
    expect(prompt).toHaveBeenCalledTimes(1);
  });

  it("b) start creation through welcome and instructions", () => {
    click("next"); // welcome -> instructions
    expect(path()).toBe("/instructions");
    click("next"); // second instruction page
    click("start");
    expect(path()).toBe("/situation");
  });

  it("c) choose the first initial situation", () => {
    click(`situation-${catalog.situations[0].id}`);
    expect(path()).toBe("/characters");
  });

  it("d) choose the prince and the donkey, marked when selected", () => {
    const prince = catalog.characters.find((c) => c.name === "Prince")!.id;
    const donkey = catalog.characters.find((c) => c.name === "Donkey")!.id;
    click(`character-${prince}`);
    click(`character-${donkey}`);
    expect(find(`character-${prince}`).className).toContain("selected");
    expect(find(`character-${donkey}`).className).toContain("selected");
    click("continue");
    expect(path()).toBe("/cards");
    expect(find("card-title").textContent).toBe("Estrangement from the family");
  });

  it("e-h) write cards 1, 3 (by microphone), 10 and 19, rejecting the rest", () => {
    // card 1, typed; the in-card reject first reverts the box without committing
    click("write");
    type("write-box", "texto que se descarta");
    click("card-reject");
    expect(find("card-description").textContent).toContain("leaves home");
    click("write");
    type("write-box", "La primera carta, escrita a mano.");
    click("ok");
    expect(find("card-progress").textContent).toContain("Carta 2");

    rejectUntilCard(3);
    click("write");
    // trash clears anything already typed, then the microphone dictates
    type("write-box", "borrador");
    click("trash");
    click("microphone");
    FakeRecognition.current!.speak("La tercera carta, dictada con el micrófono.");
    click("microphone"); // pressing again turns voice recognition off
    click("ok");
    expect(find("card-progress").textContent).toContain("Carta 4");

    rejectUntilCard(10);
    click("write");
    type("write-box", "La carta diez, con el texto indicado.");
    click("ok");

    rejectUntilCard(19);
    click("write");
    type("write-box", "La carta diecinueve, con el texto indicado.");
    click("ok");

    rejectRemainingCards();
    expect(path()).toBe("/title");
  });

  it("i) type the title and view the result", () => {
    type("title-input", "Wonderful Story");
    click("view-result");
    expect(path()).toBe("/result");
    expect(find("story-title").textContent).toBe("Wonderful Story");
    const body = find("story-body").textContent ?? "";
    expect(body).toContain("La primera carta, escrita a mano.");
    expect(body).toContain("dictada con el micrófono");
  });

  it("j) save it in the library", async () => {
    click("save-library");
    await vi.waitFor(() => expect(path()).toBe("/library"));
    await vi.waitFor(() => expect(root.querySelector('[data-testid="library-list"]')).toBeTruthy());
    expect(find("library-list").textContent).toContain("Wonderful Story");
  });

  it("k) open the story and download it as pdf", async () => {
    const open = root.querySelector('[data-testid^="open-"]') as HTMLElement;
    const storyId = open.getAttribute("data-testid")!.slice("open-".length);
    open.click();
    await vi.waitFor(() => expect(find("story-title").textContent).toBe("Wonderful Story"));
    click("download-pdf");
    await vi.waitFor(() => expect(pdfOpens).toHaveLength(1));
    expect(pdfOpens[0]).toBe(`/api/v1/stories/${storyId}/pdf`);
    expect(server.stories.get(storyId)?.fragments.map((f) => f.function_id)).toEqual(
      [1, 3, 10, 19],
    );
  });

  it("l) exit the view and delete it", async () => {
    click("exit");
    await vi.waitFor(() => expect(root.querySelector('[data-testid^="delete-"]')).toBeTruthy());
    (root.querySelector('[data-testid^="delete-"]') as HTMLElement).click();
    await vi.waitFor(() =>
      expect(root.querySelector('[data-testid="library-empty"]')).toBeTruthy(),
    );
  });
});

describe("case 2: the connection drops mid-write", () => {
  let requestsWhenCut = 0;

  it("reaches the cards with the second situation and both characters", async () => {
    click("menu-button");
    click("menu-home");
    expect(path()).toBe("/");
    click("next");
    click("next");
    click("start");
    click(`situation-${catalog.situations[1].id}`);
    click(`character-${catalog.characters.find((c) => c.name === "Prince")!.id}`);
    click(`character-${catalog.characters.find((c) => c.name === "Donkey")!.id}`);
    click("continue");
    expect(path()).toBe("/cards");
  });

  it("writes card 2 while the network disappears mid-typing", () => {
    click("reject"); // card 1
    click("write");
    type("write-box", "La segunda carta, escrita");
    // the internet connection is cut right here, in the middle of writing
    server.offline = true;
    online.value = false;
    requestsWhenCut = server.requests;
    type("write-box", "La segunda carta, escrita sin conexión.");
    click("ok");
    expect(find("card-progress").textContent).toContain("Carta 3");
  });

  it("finishes cards 5 and 12 and the title entirely offline", () => {
    rejectUntilCard(5);
    click("write");
    type("write-box", "La quinta carta, con el texto indicado.");
    click("ok");
    rejectUntilCard(12);
    click("write");
    type("write-box", "La carta doce, con el texto indicado.");
    click("ok");
    rejectRemainingCards();
    expect(path()).toBe("/title");
    type("title-input", "Wonderful Tale 2");
    click("view-result");
    expect(path()).toBe("/result");
  });

  it("saves locally, PDF is disabled with a notice, salir returns home", async () => {
    // PDF generation lives on the server, so offline it must be disabled
    const pdfButton = find("download-pdf") as HTMLButtonElement;
    expect(pdfButton.disabled).toBe(true);
    expect(find("pdf-offline-notice").textContent).toContain("servidor");

    click("save-library");
    await vi.waitFor(() => expect(path()).toBe("/library"));
    await vi.waitFor(() => expect(root.querySelector('[data-testid="library-list"]')).toBeTruthy());
    expect(find("library-list").textContent).toContain("Wonderful Tale 2");

    const open = root.querySelector('[data-testid^="open-"]') as HTMLElement;
    open.click();
    await vi.waitFor(() => expect(find("story-title").textContent).toBe("Wonderful Tale 2"));
    expect((find("download-pdf") as HTMLButtonElement).disabled).toBe(true);

    click("exit"); // "salir"
    await settled();
    expect(path()).toBe("/library");

    // not one request left the device after the cut
    expect(server.requests).toBe(requestsWhenCut);

    const saved = [...(await (await openLibrary()).list())].find(
      (s) => s.title === "Wonderful Tale 2",
    );
    expect(saved?.fragments.map((f) => f.function_id)).toEqual([2, 5, 12]);
  });
});
