// Client-side session state machine.
//
// This mirrors the server's story-grammar contract exactly: cards are offered
// in canonical order 1..31, a card is either written or rejected, phases only
// move forward, and the finished fragment list is always a strictly
// increasing subsequence of the catalog. The shared vectors in
// ../../conformance/session-vectors.json pin both implementations to the
// same behaviour.

import type { CatalogDoc, FunctionCard, StoryDoc, StoryFragment } from "./types";

export type Phase =
  | "situation_choice"
  | "character_choice"
  | "function_cards"
  | "title_entry"
  | "done";

export type ErrorKind =
  | "wrong_phase"
  | "unknown_situation"
  | "unknown_character"
  | "duplicate_character"
  | "empty_selection"
  | "empty_text"
  | "empty_title"
  | "ending_required";

export class SessionError extends Error {
  constructor(readonly kind: ErrorKind, message: string) {
    super(message);
    this.name = "SessionError";
  }
}

export type Decision =
  | { kind: "unseen" }
  | { kind: "written"; text: string }
  | { kind: "rejected" };

export interface Session {
  readonly catalog: CatalogDoc;
  readonly requireEnding: boolean;
  readonly phase: Phase;
  readonly situationId: number | null;
  readonly characterIds: readonly number[];
  readonly decisions: readonly Decision[];
  readonly cursor: number;
  readonly title: string | null;
}

export const TITLE_PROMPT = "title_prompt" as const;

export function newSession(catalog: CatalogDoc, requireEnding = false): Session {
  return {
    catalog,
    requireEnding,
    phase: "situation_choice",
    situationId: null,
    characterIds: [],
    decisions: catalog.functions.map(() => ({ kind: "unseen" })),
    cursor: 1,
    title: null,
  };
}

function requirePhase(session: Session, ...allowed: Phase[]): void {
  if (!allowed.includes(session.phase)) {
    throw new SessionError(
      "wrong_phase",
      `operation requires phase ${allowed.join(" or ")}, session is in ${session.phase}`,
    );
  }
}

export function chooseSituation(session: Session, situationId: number): Session {
  requirePhase(session, "situation_choice");
  if (!session.catalog.situations.some((s) => s.id === situationId)) {
    throw new SessionError("unknown_situation", `unknown situation id ${situationId}`);
  }
  return { ...session, situationId, phase: "character_choice" };
}

export function chooseCharacters(session: Session, characterIds: number[]): Session {
  requirePhase(session, "character_choice");
  if (characterIds.length === 0) {
    throw new SessionError("empty_selection", "a story needs at least one character");
  }
  const seen = new Set<number>();
  for (const id of characterIds) {
    if (seen.has(id)) {
      throw new SessionError("duplicate_character", `character id ${id} selected twice`);
    }
    seen.add(id);
    if (!session.catalog.characters.some((c) => c.id === id)) {
      throw new SessionError("unknown_character", `unknown character id ${id}`);
    }
  }
  return {
    ...session,
    characterIds: [...characterIds],
    phase: "function_cards",
    cursor: 1,
  };
}

export function currentCard(session: Session): FunctionCard | typeof TITLE_PROMPT {
  requirePhase(session, "function_cards", "title_entry");
  if (session.phase === "title_entry") return TITLE_PROMPT;
  return session.catalog.functions[session.cursor - 1];
}

function advance(session: Session, decision: Decision): Session {
  const decisions = [...session.decisions];
  decisions[session.cursor - 1] = decision;
  const cursor = session.cursor + 1;
  const phase: Phase =
    cursor > session.catalog.functions.length ? "title_entry" : "function_cards";
  return { ...session, decisions, cursor, phase };
}

export function writeFragment(session: Session, text: string): Session {
  requirePhase(session, "function_cards");
  if (text.trim() === "") {
    throw new SessionError("empty_text", "fragment text is empty");
  }
  return advance(session, { kind: "written", text });
}

export function rejectCard(session: Session): Session {
  requirePhase(session, "function_cards");
  if (session.requireEnding && session.cursor === session.catalog.functions.length) {
    throw new SessionError(
      "ending_required",
      "the final function card is mandatory for this session",
    );
  }
  return advance(session, { kind: "rejected" });
}

export function setTitle(session: Session, title: string): Session {
  requirePhase(session, "title_entry");
  const trimmed = title.trim();
  if (trimmed === "") {
    throw new SessionError("empty_title", "story title is empty");
  }
  return { ...session, title: trimmed, phase: "done" };
}

export function nowIso(): string {
  // seconds precision, matching the server's created_at contract
  return new Date().toISOString().replace(/\.\d{3}Z$/, "Z");
}

export function finalize(
  session: Session,
  options: { id?: string; createdAt?: string } = {},
): StoryDoc {
  requirePhase(session, "done");
  const fragments: StoryFragment[] = [];
  session.decisions.forEach((decision, index) => {
    if (decision.kind === "written") {
      fragments.push({ function_id: index + 1, text: decision.text });
    }
  });
  return {
    schema_version: 1,
    id: options.id ?? crypto.randomUUID(),
    title: session.title ?? "",
    situation_id: session.situationId ?? 0,
    character_ids: [...session.characterIds],
    fragments,
    created_at: options.createdAt ?? nowIso(),
    finalized: true,
  };
}

/** First position where the ids stop being strictly increasing, else null. */
export function validateSequence(catalog: CatalogDoc, ids: number[]): number | null {
  for (const id of ids) {
    if (id < 1 || id > catalog.functions.length) {
      throw new RangeError(`unknown function id ${id}`);
    }
  }
  let previous = 0;
  for (let position = 0; position < ids.length; position += 1) {
    if (ids[position] <= previous) return position;
    previous = ids[position];
  }
  return null;
}
