// Keys warmed at install time: the app shell plus the catalog, which is
// everything one full offline pass of the creation flow needs.

export const CACHE_NAME = "cuentoterapp-v1";

export const PRECACHE_KEYS = [
  "/",
  "/index.html",
  "/styles.css",
  "/app.js",
  "/manifest.webmanifest",
  "/icons/icon-192.png",
  "/icons/icon-512.png",
  "/api/v1/catalog",
];
