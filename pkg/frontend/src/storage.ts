// Browser-local story library on IndexedDB, with an in-memory fallback so
// the app still works on engines without it (progressive enhancement).
// Ordering matches the server library contract: newest created_at first,
// ties broken by id ascending.

import type { StoryDoc } from "./types";

const DB_NAME = "cuentoterapp";
const DB_VERSION = 1;
const STORE = "stories";

export interface Library {
  save(story: StoryDoc): Promise<void>;
  list(): Promise<StoryDoc[]>;
  get(id: string): Promise<StoryDoc | null>;
  remove(id: string): Promise<boolean>;
}

export function sortStories(stories: StoryDoc[]): StoryDoc[] {
  return [...stories].sort((a, b) => {
    if (a.created_at !== b.created_at) {
      return a.created_at < b.created_at ? 1 : -1;
    }
    return a.id < b.id ? -1 : a.id > b.id ? 1 : 0;
  });
}

class MemoryLibrary implements Library {
  private readonly stories = new Map<string, StoryDoc>();

  async save(story: StoryDoc): Promise<void> {
    this.stories.set(story.id, structuredClone(story));
  }

  async list(): Promise<StoryDoc[]> {
    return sortStories([...this.stories.values()]);
  }

  async get(id: string): Promise<StoryDoc | null> {
    const story = this.stories.get(id);
    return story ? structuredClone(story) : null;
  }

  async remove(id: string): Promise<boolean> {
    return this.stories.delete(id);
  }
}

class IdbLibrary implements Library {
  constructor(private readonly db: IDBDatabase) {}

  private tx(mode: IDBTransactionMode): IDBObjectStore {
    return this.db.transaction(STORE, mode).objectStore(STORE);
  }

  private request<T>(request: IDBRequest<T>): Promise<T> {
    return new Promise((resolve, reject) => {
      request.onsuccess = () => resolve(request.result);
      request.onerror = () => reject(request.error);
    });
  }

  async save(story: StoryDoc): Promise<void> {
    await this.request(this.tx("readwrite").put(story));
  }

  async list(): Promise<StoryDoc[]> {
    const all = await this.request(this.tx("readonly").getAll());
    return sortStories(all as StoryDoc[]);
  }

  async get(id: string): Promise<StoryDoc | null> {
    const story = await this.request(this.tx("readonly").get(id));
    return (story as StoryDoc | undefined) ?? null;
  }

  async remove(id: string): Promise<boolean> {
    const existing = await this.get(id);
    if (!existing) return false;
    await this.request(this.tx("readwrite").delete(id));
    return true;
  }
}

export async function openLibrary(
  idbFactory: IDBFactory | undefined = globalThis.indexedDB,
): Promise<Library> {
  if (!idbFactory) {
    return new MemoryLibrary();
  }
  const db = await new Promise<IDBDatabase>((resolve, reject) => {
    const request = idbFactory.open(DB_NAME, DB_VERSION);
    request.onupgradeneeded = () => {
      const db = request.result;
      if (!db.objectStoreNames.contains(STORE)) {
        db.createObjectStore(STORE, { keyPath: "id" });
      }
    };
    request.onsuccess = () => resolve(request.result);
    request.onerror = () => reject(request.error);
  });
  return new IdbLibrary(db);
}
