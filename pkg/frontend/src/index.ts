// Client bindings for the gramtok HTTP service: encode source code into
// grammar-rule/subword token sequences, decode them back, validate prefixes,
// and run edit-distance analyses from Node or the browser.

/** Must match the core package's version; checked against /health. */
export const VERSION = "0.1.0";

export type EncodeModeName = "exact" | "canonical";
export type PrefixStatusName = "open" | "complete" | "invalid";

export interface VocabInfo {
  language: string;
  m: number;
  s: number;
  k: number;
  total: number;
  digest: string;
}

export interface HealthInfo {
  status: string;
  version: string;
  language: string;
}

export interface EncodeResult {
  id: string | null;
  mode: EncodeModeName;
  ids: number[];
  classes: string[];
}

export interface PrefixState {
  status: PrefixStatusName;
  position: number;
  reason: string | null;
  pending: string[];
}

export interface PairInput {
  problem_id: string;
  wrong_code: string;
  correct_code: string;
  outcome?: boolean | null;
}

export interface PairsReportOptions {
  threshold?: number;
  cut?: number | null;
  chisq?: boolean;
}

/**
 * Error raised when the service reports a data error. `name` carries the
 * stable core error identifier (e.g. "SyntaxInvalid", "IncompleteSequence"),
 * so callers can match on it without parsing messages.
 */
export class GramtokServiceError extends Error {
  readonly position: number | null;
  readonly status: number;

  constructor(name: string, message: string, status: number, position: number | null) {
    super(message);
    this.name = name;
    this.status = status;
    this.position = position;
  }
}

interface ErrorPayload {
  error?: { name?: string; message?: string; position?: number | null };
}

export class GramtokClient {
  private readonly baseUrl: string;

  constructor(baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  /** Service liveness plus the server-side package version. */
  async health(): Promise<HealthInfo> {
    return this.get("/health");
  }

  /** Sizes and digest of the vocabulary the service is running with. */
  async vocabInfo(): Promise<VocabInfo> {
    return this.get("/vocab/info");
  }

  /** Encode source text into the mixed rule/terminal token sequence. */
  async encode(
    text: string,
    mode: EncodeModeName = "exact",
    id?: string,
  ): Promise<EncodeResult> {
    return this.post("/encode", { text, mode, id: id ?? null });
  }

  /** Decode an exact-mode sequence back to the original source text. */
  async decode(ids: number[]): Promise<string> {
    const body = await this.post<{ text: string }>("/decode", { ids });
    return body.text;
  }

  /** Structure-check a token ID prefix without decoding. */
  async validPrefix(ids: number[]): Promise<PrefixState> {
    return this.post("/prefix", { ids });
  }

  /** One rendered line per token: index, ID, class, symbol. */
  async explain(ids: number[]): Promise<string[]> {
    const body = await this.post<{ lines: string[] }>("/explain", { ids });
    return body.lines;
  }

  /** Token-level edit distance between two ID sequences. */
  async levenshtein(a: number[], b: number[]): Promise<number> {
    const body = await this.post<{ distance: number }>("/levenshtein", { a, b });
    return body.distance;
  }

  /** Edit-distance report over error/correct code pairs. */
  async pairsReport(
    pairs: PairInput[],
    options: PairsReportOptions = {},
  ): Promise<Record<string, unknown>> {
    return this.post("/pairs/report", {
      pairs,
      threshold: options.threshold ?? 50,
      cut: options.cut ?? null,
      chisq: options.chisq ?? false,
    });
  }

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(this.baseUrl + path);
    return this.unwrap(response);
  }

  private async post<T>(path: string, payload: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
    return this.unwrap(response);
  }

  private async unwrap<T>(response: Response): Promise<T> {
    if (response.ok) {
      return (await response.json()) as T;
    }
    let payload: ErrorPayload = {};
    try {
      payload = (await response.json()) as ErrorPayload;
    } catch {
      // non-JSON error body; fall through to the generic error below
    }
    const error = payload.error;
    if (error && error.name) {
      throw new GramtokServiceError(
        error.name,
        error.message ?? error.name,
        response.status,
        error.position ?? null,
      );
    }
    throw new GramtokServiceError(
      response.status === 422 ? "ValidationError" : "HttpError",
      `HTTP ${response.status}`,
      response.status,
      null,
    );
  }
}
