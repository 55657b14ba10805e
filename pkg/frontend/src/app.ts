// The single-page client: welcome/instructions, situation and character
// choice, the write/reject card walk, title entry, result actions, and the
// local library. All state transitions go through the session engine; the
// in-card "Reject" that reverts the write box to the description view is
// UI-local and never touches the engine.

import { Api } from "./api";
import {
  Session,
  SessionError,
  TITLE_PROMPT,
  chooseCharacters,
  chooseSituation,
  currentCard,
  finalize,
  newSession,
  rejectCard,
  setTitle,
  writeFragment,
} from "./engine";
import type { Library } from "./storage";
import type { VoiceInput } from "./speech";
import type { CatalogDoc, StoryDoc } from "./types";

export interface AppDeps {
  root: HTMLElement;
  api: Api;
  library: Library;
  voice: VoiceInput;
  win: Window;
  isOnline?: () => boolean;
  openPdf?: (url: string) => void;
}

interface InstallPromptEvent extends Event {
  prompt(): Promise<void>;
}

const INSTRUCTION_PAGES = [
  "Bienvenido. Esta aplicación acompaña los talleres de cuentoterapia: " +
    "crearás un cuento eligiendo una situación inicial, unos personajes y " +
    "escribiendo carta a carta.",
  "Cada carta propone un momento del cuento. Puedes ESCRIBIR lo que pasa o " +
    "RECHAZAR la carta para saltarla. Al final pondrás un título y podrás " +
    "guardar el cuento en tu biblioteca o descargarlo en PDF.",
];

export class App {
  private readonly root: HTMLElement;
  private readonly api: Api;
  private readonly library: Library;
  private readonly voice: VoiceInput;
  private readonly win: Window;
  private readonly isOnline: () => boolean;
  private readonly openPdf: (url: string) => void;

  private catalog: CatalogDoc | null = null;
  private requireEnding = false;
  private session: Session | null = null;
  private result: StoryDoc | null = null;

  private instructionPage = 0;
  private menuOpen = false;
  private writing = false;
  private boxText = "";
  private notice = "";
  private installPrompt: InstallPromptEvent | null = null;

  constructor(deps: AppDeps) {
    this.root = deps.root;
    this.api = deps.api;
    this.library = deps.library;
    this.voice = deps.voice;
    this.win = deps.win;
    this.isOnline = deps.isOnline ?? (() => deps.win.navigator.onLine);
    this.openPdf = deps.openPdf ?? ((url) => deps.win.location.assign(url));
  }

  async boot(): Promise<void> {
    this.win.addEventListener("popstate", () => this.render());
    this.win.addEventListener("beforeinstallprompt", (event) => {
      event.preventDefault();
      this.installPrompt = event as InstallPromptEvent;
      this.render();
    });
    try {
      this.catalog = await this.api.fetchCatalog();
    } catch {
      this.renderFatal("No se pudo cargar el catálogo. Revisa la conexión y recarga.");
      return;
    }
    try {
      this.requireEnding = (await this.api.fetchConfig()).require_ending;
    } catch {
      this.requireEnding = false; // older servers: default remains off
    }
    this.render();
  }

  // -- navigation ------------------------------------------------------------

  navigate(path: string): void {
    this.win.history.pushState({}, "", path);
    this.menuOpen = false;
    this.notice = "";
    this.render();
  }

  private path(): string {
    return this.win.location.pathname;
  }

  private startCreation(): void {
    if (!this.catalog) return;
    this.session = newSession(this.catalog, this.requireEnding);
    this.result = null;
    this.writing = false;
    this.boxText = "";
    this.navigate("/situation");
  }

  private resetToHome(): void {
    this.session = null;
    this.result = null;
    this.writing = false;
    this.boxText = "";
    this.navigate("/");
  }

  // -- rendering ---------------------------------------------------------------

  render(): void {
    const path = this.path();
    this.root.textContent = "";
    this.root.appendChild(this.header());
    const main = el("main", { class: "screen" });
    this.root.appendChild(main);

    if (!this.catalog) {
      main.appendChild(el("p", {}, "Cargando catálogo…"));
      return;
    }
    if (path === "/" || path === "/welcome") this.welcomeScreen(main);
    else if (path === "/instructions") this.instructionsScreen(main);
    else if (path === "/situation") this.situationScreen(main);
    else if (path === "/characters") this.charactersScreen(main);
    else if (path === "/cards") this.cardsScreen(main);
    else if (path === "/title") this.titleScreen(main);
    else if (path === "/result") this.resultScreen(main);
    else if (path === "/library") void this.libraryScreen(main);
    else if (path.startsWith("/library/")) void this.readScreen(main, path.slice("/library/".length));
    else this.welcomeScreen(main);

    if (this.notice) {
      main.appendChild(el("p", { class: "notice", "data-testid": "notice" }, this.notice));
    }
  }

  private renderFatal(message: string): void {
    this.root.textContent = "";
    this.root.appendChild(el("p", { class: "notice" }, message));
  }

  private header(): HTMLElement {
    const menuButton = el(
      "button",
      { class: "menu-button", "data-testid": "menu-button", "aria-label": "Menú" },
      "☰",
    );
    menuButton.addEventListener("click", () => {
      this.menuOpen = !this.menuOpen;
      this.render();
    });
    const header = el("header", {}, menuButton, el("h1", {}, "CuentoterApp"));
    if (this.menuOpen) {
      header.appendChild(
        el(
          "nav",
          { class: "menu", "data-testid": "menu" },
          this.menuEntry("Inicio", "menu-home", () => this.resetToHome()),
          this.menuEntry("Biblioteca", "menu-library", () => this.navigate("/library")),
          this.menuEntry("Instrucciones", "menu-instructions", () => {
            this.instructionPage = 0;
            this.navigate("/instructions");
          }),
        ),
      );
    }
    return header;
  }

  private menuEntry(label: string, testId: string, onClick: () => void): HTMLElement {
    const button = el("button", { "data-testid": testId }, label);
    button.addEventListener("click", onClick);
    return button;
  }

  // -- screens --------------------------------------------------------------------

  private welcomeScreen(main: HTMLElement): void {
    main.appendChild(el("h2", {}, "Bienvenido a CuentoterApp"));
    main.appendChild(
      el("p", {}, "Crea cuentos paso a paso, con o sin conexión, y guárdalos en tu biblioteca."),
    );
    if (this.installPrompt) {
      const install = el("button", { "data-testid": "install-app" }, "Instalar aplicación");
      install.addEventListener("click", () => {
        void this.installPrompt?.prompt();
        this.installPrompt = null;
        this.render();
      });
      main.appendChild(install);
    }
    const next = el("button", { class: "primary", "data-testid": "next" }, "SIGUIENTE");
    next.addEventListener("click", () => {
      this.instructionPage = 0;
      this.navigate("/instructions");
    });
    main.appendChild(next);
  }

  private instructionsScreen(main: HTMLElement): void {
    main.appendChild(el("h2", {}, "Instrucciones"));
    main.appendChild(
      el("p", { "data-testid": "instruction-text" }, INSTRUCTION_PAGES[this.instructionPage]),
    );
    const controls = el("div", { class: "controls" });
    if (this.instructionPage > 0) {
      const previous = el("button", { "data-testid": "previous" }, "ANTERIOR");
      previous.addEventListener("click", () => {
        this.instructionPage -= 1;
        this.render();
      });
      controls.appendChild(previous);
    }
    if (this.instructionPage < INSTRUCTION_PAGES.length - 1) {
      const next = el("button", { "data-testid": "next" }, "SIGUIENTE");
      next.addEventListener("click", () => {
        this.instructionPage += 1;
        this.render();
      });
      controls.appendChild(next);
    } else {
      const start = el("button", { class: "primary", "data-testid": "start" }, "EMPEZAR");
      start.addEventListener("click", () => this.startCreation());
      controls.appendChild(start);
    }
    main.appendChild(controls);
  }

  private situationScreen(main: HTMLElement): void {
    if (!this.session || this.session.phase !== "situation_choice") {
      this.guardRedirect(main);
      return;
    }
    main.appendChild(el("h2", {}, "Elige la situación inicial"));
    const grid = el("div", { class: "card-grid" });
    for (const situation of this.session.catalog.situations) {
      const card = el(
        "button",
        { class: "situation-card", "data-testid": `situation-${situation.id}` },
        el("img", { src: `/${situation.image}`, alt: "" }),
        el("h3", {}, situation.title),
        el("p", {}, situation.description),
      );
      card.addEventListener("click", () => {
        this.apply(() => chooseSituation(this.session!, situation.id));
        this.navigate("/characters");
      });
      grid.appendChild(card);
    }
    main.appendChild(grid);
  }

  private charactersScreen(main: HTMLElement): void {
    if (!this.session || this.session.phase !== "character_choice") {
      this.guardRedirect(main);
      return;
    }
    main.appendChild(el("h2", {}, "Elige los personajes"));
    main.appendChild(el("p", {}, "Pulsa todos los que quieras añadir; los elegidos se marcan en verde."));
    const picked = new Set<number>(this.pickedCharacters);
    const grid = el("div", { class: "chip-grid" });
    for (const character of this.session.catalog.characters) {
      const chip = el(
        "button",
        {
          class: picked.has(character.id) ? "chip selected" : "chip",
          "data-testid": `character-${character.id}`,
        },
        character.name,
      );
      chip.addEventListener("click", () => {
        if (picked.has(character.id)) picked.delete(character.id);
        else picked.add(character.id);
        this.pickedCharacters = [...picked];
        this.render();
      });
      grid.appendChild(chip);
    }
    main.appendChild(grid);
    const go = el("button", { class: "primary", "data-testid": "continue" }, "CONTINUAR");
    go.addEventListener("click", () => {
      const ok = this.apply(() => chooseCharacters(this.session!, this.pickedCharacters));
      if (ok) {
        this.pickedCharacters = [];
        this.navigate("/cards");
      }
    });
    main.appendChild(go);
  }

  private pickedCharacters: number[] = [];

  private cardsScreen(main: HTMLElement): void {
    if (!this.session || this.session.phase !== "function_cards") {
      if (this.session && this.session.phase === "title_entry") {
        this.navigate("/title");
        return;
      }
      this.guardRedirect(main);
      return;
    }
    const card = currentCard(this.session);
    if (card === TITLE_PROMPT) {
      this.navigate("/title");
      return;
    }
    main.appendChild(
      el("p", { class: "progress", "data-testid": "card-progress" },
         `Carta ${card.id} de ${this.session.catalog.functions.length}`),
    );
    main.appendChild(el("h2", { "data-testid": "card-title" }, card.title));

    if (!this.writing) {
      main.appendChild(el("p", { "data-testid": "card-description" }, card.description));
      const write = el("button", { class: "primary", "data-testid": "write" }, "ESCRIBIR");
      write.addEventListener("click", () => {
        this.writing = true;
        this.render();
      });
      const reject = el("button", { "data-testid": "reject" }, "RECHAZAR");
      reject.addEventListener("click", () => {
        if (this.apply(() => rejectCard(this.session!))) this.render();
      });
      main.appendChild(el("div", { class: "controls" }, write, reject));
      return;
    }

    const box = el("textarea", {
      "data-testid": "write-box",
      placeholder: "Escribe aquí esta parte del cuento…",
    }) as HTMLTextAreaElement;
    box.value = this.boxText;
    box.addEventListener("input", () => {
      this.boxText = box.value;
    });
    main.appendChild(box);

    const controls = el("div", { class: "controls" });
    if (this.voice.supported) {
      const mic = el(
        "button",
        {
          class: this.voice.active ? "mic active" : "mic",
          "data-testid": "microphone",
          "aria-label": "Micrófono",
        },
        this.voice.active ? "■ Detener" : "🎤 Hablar",
      );
      mic.addEventListener("click", () => {
        this.voice.toggle((text) => {
          // voice transcripts append to whatever is already typed
          this.boxText = this.boxText ? `${this.boxText} ${text}` : text;
          box.value = this.boxText;
        });
        this.render();
      });
      controls.appendChild(mic);
    }
    const trash = el("button", { "data-testid": "trash", "aria-label": "Borrar texto" }, "🗑 Borrar");
    trash.addEventListener("click", () => {
      this.boxText = "";
      box.value = "";
    });
    controls.appendChild(trash);

    const ok = el("button", { class: "primary", "data-testid": "ok" }, "OK");
    ok.addEventListener("click", () => {
      const committed = this.apply(() => writeFragment(this.session!, this.boxText));
      if (committed) {
        this.voice.stop();
        this.writing = false;
        this.boxText = "";
        this.render();
      }
    });
    controls.appendChild(ok);

    const back = el("button", { "data-testid": "card-reject" }, "Rechazar");
    back.addEventListener("click", () => {
      // UI-local revert: nothing was committed, so nothing is undone
      this.voice.stop();
      this.writing = false;
      this.boxText = "";
      this.render();
    });
    controls.appendChild(back);
    main.appendChild(controls);
  }

  private titleScreen(main: HTMLElement): void {
    if (!this.session || this.session.phase !== "title_entry") {
      this.guardRedirect(main);
      return;
    }
    main.appendChild(el("h2", {}, "Título del cuento"));
    const input = el("input", {
      type: "text",
      "data-testid": "title-input",
      placeholder: "Escribe el título…",
    }) as HTMLInputElement;
    input.value = this.boxText;
    input.addEventListener("input", () => {
      this.boxText = input.value;
    });
    main.appendChild(input);
    const view = el("button", { class: "primary", "data-testid": "view-result" }, "Ver resultado");
    view.addEventListener("click", () => {
      const done = this.apply(() => setTitle(this.session!, this.boxText));
      if (done) {
        this.result = finalize(this.session!);
        this.boxText = "";
        this.navigate("/result");
      }
    });
    main.appendChild(view);
  }

  private resultScreen(main: HTMLElement): void {
    if (!this.result || !this.catalog) {
      this.guardRedirect(main);
      return;
    }
    this.storyView(main, this.result);
    const controls = el("div", { class: "controls" });
    const exit = el("button", { "data-testid": "exit" }, "Salir");
    exit.addEventListener("click", () => this.resetToHome());
    controls.appendChild(exit);
    controls.appendChild(this.pdfButton(this.result));
    const save = el("button", { class: "primary", "data-testid": "save-library" }, "Guardar en biblioteca");
    save.addEventListener("click", () => {
      void this.library.save(this.result!).then(() => this.navigate("/library"));
    });
    controls.appendChild(save);
    main.appendChild(controls);
  }

  private async libraryScreen(main: HTMLElement): Promise<void> {
    main.appendChild(el("h2", {}, "Biblioteca"));
    const stories = await this.library.list();
    if (stories.length === 0) {
      main.appendChild(el("p", { "data-testid": "library-empty" }, "Todavía no hay cuentos guardados."));
      return;
    }
    const list = el("ul", { class: "library-list", "data-testid": "library-list" });
    for (const story of stories) {
      const open = el("button", { class: "story-link", "data-testid": `open-${story.id}` }, story.title);
      open.addEventListener("click", () => this.navigate(`/library/${story.id}`));
      const remove = el(
        "button",
        { class: "trash", "data-testid": `delete-${story.id}`, "aria-label": "Eliminar" },
        "🗑",
      );
      remove.addEventListener("click", () => {
        void this.library.remove(story.id).then(() => this.render());
      });
      list.appendChild(el("li", {}, open, el("span", { class: "date" }, story.created_at), remove));
    }
    main.appendChild(list);
  }

  private async readScreen(main: HTMLElement, id: string): Promise<void> {
    const story = await this.library.get(id);
    if (!story) {
      main.appendChild(el("p", {}, "Ese cuento ya no está en la biblioteca."));
      return;
    }
    this.storyView(main, story);
    const controls = el("div", { class: "controls" });
    const back = el("button", { "data-testid": "exit" }, "Salir");
    back.addEventListener("click", () => this.navigate("/library"));
    controls.appendChild(back);
    controls.appendChild(this.pdfButton(story));
    main.appendChild(controls);
  }

  private storyView(main: HTMLElement, story: StoryDoc): void {
    const catalog = this.catalog!;
    main.appendChild(el("h2", { "data-testid": "story-title" }, story.title));
    const situation = catalog.situations.find((s) => s.id === story.situation_id);
    if (situation) {
      main.appendChild(el("h3", { "data-testid": "story-situation" }, situation.title));
    }
    const names = story.character_ids
      .map((id) => catalog.characters.find((c) => c.id === id)?.name ?? `#${id}`)
      .join(", ");
    main.appendChild(el("p", { class: "characters", "data-testid": "story-characters" }, names));
    const body = el("div", { class: "story-body", "data-testid": "story-body" });
    for (const fragment of story.fragments) {
      const card = catalog.functions.find((f) => f.id === fragment.function_id);
      body.appendChild(el("h4", {}, card ? card.title : `Carta ${fragment.function_id}`));
      body.appendChild(el("p", {}, fragment.text));
    }
    main.appendChild(body);
  }

  private pdfButton(story: StoryDoc): HTMLElement {
    if (!this.isOnline()) {
      const disabled = el(
        "button",
        { disabled: "disabled", "data-testid": "download-pdf" },
        "Descargar PDF",
      );
      const wrap = el("span", { class: "pdf-offline" }, disabled,
        el("small", { "data-testid": "pdf-offline-notice" },
           " El PDF se genera en el servidor; vuelve a intentarlo con conexión."));
      return wrap;
    }
    const download = el("button", { "data-testid": "download-pdf" }, "Descargar PDF");
    download.addEventListener("click", () => {
      // the renderer lives server-side: make sure the story exists there,
      // then open the download
      void this.api
        .saveStory(story)
        .then((stored) => this.openPdf(this.api.pdfUrl(stored.id)))
        .catch(() => {
          this.notice = "No se pudo preparar el PDF. Inténtalo de nuevo.";
          this.render();
        });
    });
    return download;
  }

  private guardRedirect(main: HTMLElement): void {
    main.appendChild(el("p", {}, "Esta pantalla pertenece a la creación de un cuento."));
    const home = el("button", { "data-testid": "go-home" }, "Ir al inicio");
    home.addEventListener("click", () => this.resetToHome());
    main.appendChild(home);
  }

  // -- engine bridge -------------------------------------------------------------

  private apply(step: () => Session): boolean {
    try {
      this.session = step();
      this.notice = "";
      return true;
    } catch (error) {
      if (error instanceof SessionError) {
        this.notice = noticeFor(error);
        this.render();
        return false;
      }
      throw error;
    }
  }
}

function noticeFor(error: SessionError): string {
  switch (error.kind) {
    case "empty_selection":
      return "Elige al menos un personaje.";
    case "empty_text":
      return "Escribe algo antes de aceptar la carta.";
    case "empty_title":
      return "El cuento necesita un título.";
    case "ending_required":
      return "La última carta es obligatoria: todo cuento necesita un final.";
    default:
      return "Esa acción no está disponible ahora mismo.";
  }
}

type Child = Node | string;

function el(tag: string, attrs: Record<string, string> = {}, ...children: Child[]): HTMLElement {
  const node = document.createElement(tag);
  for (const [name, value] of Object.entries(attrs)) {
    if (name === "disabled") (node as HTMLButtonElement).disabled = true;
    else node.setAttribute(name, value);
  }
  for (const child of children) {
    node.appendChild(typeof child === "string" ? document.createTextNode(child) : child);
  }
  return node;
}
