// Cache-first resolution, kept free of service-worker globals so the policy
// can be exercised against the same vectors as the server-side gateway
// (../../conformance/gateway-vectors.json). The rules:
//
//   - a cached response is served without touching the network;
//   - on a miss the network is consulted, and only an ok response is cached;
//   - a miss while offline surfaces as OfflineMissError;
//   - failed fetches never create cache entries.

export type FetchLike = (key: string) => Promise<Response>;

export interface CacheLike {
  match(key: string): Promise<Response | undefined>;
  put(key: string, response: Response): Promise<void>;
  delete(key: string): Promise<boolean>;
}

export class OfflineMissError extends Error {
  constructor(readonly key: string) {
    super(`${key}: not cached and network unavailable`);
    this.name = "OfflineMissError";
  }
}

export interface Resolution {
  response: Response;
  origin: "local" | "network";
}

export async function cacheFirst(
  key: string,
  cache: CacheLike,
  fetchFn: FetchLike,
): Promise<Resolution> {
  const hit = await cache.match(key);
  if (hit) {
    return { response: hit, origin: "local" };
  }
  let response: Response;
  try {
    response = await fetchFn(key);
  } catch (error) {
    throw new OfflineMissError(key);
  }
  if (response.ok) {
    await cache.put(key, response.clone());
  }
  return { response, origin: "network" };
}

export interface PrecacheReport {
  fetched: string[];
  failedKeys: string[];
}

export async function precache(
  keys: string[],
  cache: CacheLike,
  fetchFn: FetchLike,
): Promise<PrecacheReport> {
  const fetched: string[] = [];
  const failedKeys: string[] = [];
  for (const key of keys) {
    try {
      const { response } = await cacheFirst(key, cache, fetchFn);
      if (response.ok) {
        fetched.push(key);
      } else {
        failedKeys.push(key);
      }
    } catch {
      failedKeys.push(key);
    }
  }
  return { fetched, failedKeys };
}
