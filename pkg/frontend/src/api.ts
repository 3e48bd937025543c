// Typed client for the antwatch service.  Every mutation the UI makes
// goes through here; nothing else talks to the network.

import type {
  CorrectionRequest,
  CorrectionResult,
  ErrorPayload,
  OverlayPayload,
  PredictionPayload,
  SessionInfo,
  Variant,
  WalkPayload,
  WalkRequest,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    public readonly detail: string,
  ) {
    super(`${code}: ${detail}`);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function raise(response: Response): Promise<never> {
  let code = `http-${response.status}`;
  let detail = response.statusText;
  try {
    const body = (await response.json()) as ErrorPayload;
    if (body.error) {
      code = body.error;
      detail = body.detail;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, code, detail);
}

export class ServiceClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = fetch,
  ) {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) await raise(response);
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.json<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  createSession(artifactDir?: string): Promise<SessionInfo> {
    return this.post("/sessions", artifactDir ? { artifact_dir: artifactDir } : {});
  }

  sessionInfo(sessionId: string): Promise<SessionInfo> {
    return this.json(`/sessions/${sessionId}`);
  }

  setCursor(sessionId: string, frame: number): Promise<{ cursor: number }> {
    return this.json(`/sessions/${sessionId}/cursor`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ frame }),
    });
  }

  async frameBytes(sessionId: string, index: number, variant: Variant): Promise<Uint8Array> {
    const url = `${this.baseUrl}/sessions/${sessionId}/frames/${index}?variant=${variant}`;
    const response = await this.fetchFn(url);
    if (!response.ok) await raise(response);
    return new Uint8Array(await response.arrayBuffer());
  }

  overlays(sessionId: string, index: number): Promise<OverlayPayload> {
    return this.json(`/sessions/${sessionId}/frames/${index}/overlays`);
  }

  postWalk(sessionId: string, request: WalkRequest): Promise<WalkPayload> {
    return this.post(`/sessions/${sessionId}/walks`, request);
  }

  postCorrection(sessionId: string, request: CorrectionRequest): Promise<CorrectionResult> {
    return this.post(`/sessions/${sessionId}/corrections`, request);
  }

  persist(sessionId: string): Promise<{ digest: string; path: string }> {
    return this.post(`/sessions/${sessionId}/persist`, {});
  }

  prediction(sessionId: string, index: number, track = 0): Promise<PredictionPayload> {
    return this.json(`/sessions/${sessionId}/predictions/${index}?track=${track}`);
  }
}
