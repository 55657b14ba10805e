// Browser bootstrap: register the worker, open the local library, start the app.

import { Api } from "./api";
import { App } from "./app";
import { VoiceInput, detectRecognitionCtor } from "./speech";
import { openLibrary } from "./storage";

async function start(): Promise<void> {
  if ("serviceWorker" in navigator) {
    // registration failures (e.g. insecure context) degrade to online-only
    navigator.serviceWorker.register("/sw.js").catch(() => undefined);
  }
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  const app = new App({
    root,
    api: new Api(),
    library: await openLibrary(),
    voice: new VoiceInput(detectRecognitionCtor()),
    win: window,
  });
  await app.boot();
}

window.addEventListener("load", () => {
  void start();
});
