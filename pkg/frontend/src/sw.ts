// Service worker: precaches the shell and catalog at install, then serves
// GET requests cache-first with network fallback. Navigations fall back to
// the cached shell so client-side routes keep working offline.

import { cacheFirst, precache, type CacheLike } from "./cachePolicy";
import { CACHE_NAME, PRECACHE_KEYS } from "./precacheList";

declare const self: ServiceWorkerGlobalScope;

function openCache(): Promise<CacheLike> {
  return self.caches.open(CACHE_NAME) as unknown as Promise<CacheLike>;
}

self.addEventListener("install", (event: ExtendableEvent) => {
  event.waitUntil(
    openCache()
      .then((cache) => precache(PRECACHE_KEYS, cache, (key) => self.fetch(key)))
      .then(() => self.skipWaiting()),
  );
});

self.addEventListener("activate", (event: ExtendableEvent) => {
  event.waitUntil(self.clients.claim());
});

self.addEventListener("fetch", (event: FetchEvent) => {
  const request = event.request;
  if (request.method !== "GET") return;
  const url = new URL(request.url);
  if (url.origin !== self.location.origin) return;

  if (request.mode === "navigate") {
    // app-shell pattern: any navigation renders the cached shell offline
    event.respondWith(
      openCache().then(async (cache) => {
        const shell = (await cache.match("/")) ?? (await cache.match("/index.html"));
        if (shell) return shell;
        return self.fetch(request);
      }),
    );
    return;
  }

  event.respondWith(
    openCache().then(async (cache) => {
      const { response } = await cacheFirst(
        url.pathname,
        cache,
        () => self.fetch(request),
      );
      return response;
    }),
  );
});
