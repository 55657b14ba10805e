// Voice input via the browser speech-recognition capability. The feature is
// optional: when the engine lacks it the microphone button is simply hidden
// and typing keeps working (progressive enhancement).

interface RecognitionAlternativeLike {
  transcript: string;
}

interface RecognitionResultLike {
  isFinal: boolean;
  0: RecognitionAlternativeLike;
}

export interface RecognitionEventLike {
  resultIndex: number;
  results: ArrayLike<RecognitionResultLike>;
}

export interface RecognitionLike {
  lang: string;
  continuous: boolean;
  interimResults: boolean;
  onresult: ((event: RecognitionEventLike) => void) | null;
  onend: (() => void) | null;
  start(): void;
  stop(): void;
}

export type RecognitionCtor = new () => RecognitionLike;

export function detectRecognitionCtor(
  scope: Record<string, unknown> = globalThis as unknown as Record<string, unknown>,
): RecognitionCtor | null {
  const ctor = scope["SpeechRecognition"] ?? scope["webkitSpeechRecognition"];
  return (ctor as RecognitionCtor | undefined) ?? null;
}

// One microphone toggle: while active, every final transcript is appended to
// the text box through the callback; toggling off stops the recognizer.
export class VoiceInput {
  private recognition: RecognitionLike | null = null;
  private listening = false;

  constructor(
    private readonly ctor: RecognitionCtor | null,
    private readonly lang = "es-ES",
  ) {}

  get supported(): boolean {
    return this.ctor !== null;
  }

  get active(): boolean {
    return this.listening;
  }

  toggle(onText: (text: string) => void): boolean {
    if (this.listening) {
      this.stop();
      return false;
    }
    this.start(onText);
    return this.listening;
  }

  start(onText: (text: string) => void): void {
    if (!this.ctor || this.listening) return;
    const recognition = new this.ctor();
    recognition.lang = this.lang;
    recognition.continuous = true;
    recognition.interimResults = false;
    recognition.onresult = (event) => {
      for (let i = event.resultIndex; i < event.results.length; i += 1) {
        const result = event.results[i];
        if (result.isFinal) onText(result[0].transcript);
      }
    };
    recognition.onend = () => {
      // browsers stop recognizers on silence; reflect reality in the flag
      if (this.recognition === recognition) this.listening = false;
    };
    this.recognition = recognition;
    this.listening = true;
    recognition.start();
  }

  stop(): void {
    if (!this.recognition) return;
    const recognition = this.recognition;
    this.recognition = null;
    this.listening = false;
    recognition.stop();
  }
}
