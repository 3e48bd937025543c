// Client-side session state.  Every field mirrors the server after the
// matching request is acknowledged; nothing here mutates the model
// except through the corrections endpoint.

import { ApiError } from "./api.js";
import type {
  CorrectionAction,
  CorrectionEntry,
  CorrectionRequest,
  CorrectionResult,
  OverlayPayload,
  SessionInfo,
  Variant,
  WalkPayload,
  WalkRequest,
} from "./types.js";

// Structural slice of ServiceClient; tests substitute a fake.
export interface SessionApi {
  createSession(artifactDir?: string): Promise<SessionInfo>;
  sessionInfo(sessionId: string): Promise<SessionInfo>;
  setCursor(sessionId: string, frame: number): Promise<{ cursor: number }>;
  frameBytes(sessionId: string, index: number, variant: Variant): Promise<Uint8Array>;
  overlays(sessionId: string, index: number): Promise<OverlayPayload>;
  postWalk(sessionId: string, request: WalkRequest): Promise<WalkPayload>;
  postCorrection(sessionId: string, request: CorrectionRequest): Promise<CorrectionResult>;
}

export interface Notice {
  kind: "error" | "info";
  text: string;
}

export class ViewState {
  sessionId = "";
  cursor = 0;
  frames = 0;
  trained = false;
  digest = "";
  variant: Variant = "regular";
  selected: { x: number; y: number } | null = null;
  tree: WalkPayload | null = null;
  corrections: CorrectionEntry[] = [];
  notices: Notice[] = [];

  walkMode: "system" | "user" = "user";
  walkDepth = 4;
  walkThreshold = 1e-3;

  constructor(private readonly api: SessionApi) {}

  private adopt(info: SessionInfo): void {
    this.sessionId = info.session_id;
    this.cursor = info.cursor;
    this.frames = info.frames;
    this.trained = info.trained;
    this.digest = info.digest;
    if (info.corrections) this.corrections = info.corrections;
  }

  notify(kind: Notice["kind"], text: string): void {
    this.notices.push({ kind, text });
  }

  async open(artifactDir?: string): Promise<void> {
    this.adopt(await this.api.createSession(artifactDir));
  }

  // Poll the server view; called after every correcting action so the
  // history panel and digest always show what the server recorded.
  async refresh(): Promise<void> {
    this.adopt(await this.api.sessionInfo(this.sessionId));
  }

  async setFrame(frame: number): Promise<void> {
    const ack = await this.api.setCursor(this.sessionId, frame);
    this.cursor = ack.cursor;
  }

  frame(): Promise<Uint8Array> {
    return this.api.frameBytes(this.sessionId, this.cursor, this.variant);
  }

  // Flips regular/extruded and re-requests the same frame index.
  toggleVariant(): Promise<Uint8Array> {
    this.variant = this.variant === "regular" ? "extruded" : "regular";
    return this.frame();
  }

  overlays(): Promise<OverlayPayload> {
    return this.api.overlays(this.sessionId, this.cursor);
  }

  async requestWalk(x: number, y: number): Promise<WalkPayload> {
    this.selected = { x, y };
    this.tree = await this.api.postWalk(this.sessionId, {
      x,
      y,
      mode: this.walkMode,
      depth: this.walkDepth,
      threshold: this.walkThreshold,
    });
    return this.tree;
  }

  private async refetchWalk(): Promise<void> {
    if (!this.selected) return;
    this.tree = await this.api.postWalk(this.sessionId, {
      x: this.selected.x,
      y: this.selected.y,
      mode: this.walkMode,
      depth: this.walkDepth,
      threshold: this.walkThreshold,
    });
  }

  // Prune or boost a node of the current tree.  On success the tree is
  // re-fetched whenever the model changed (the server marked it stale)
  // and the session view is refreshed so the history matches.  A
  // stale-branch conflict re-fetches once and surfaces a notice; there
  // is no retry loop.
  async applyCorrection(
    nodeId: number,
    action: CorrectionAction,
    factor = 2.0,
  ): Promise<CorrectionResult | null> {
    let result: CorrectionResult;
    try {
      result = await this.api.postCorrection(this.sessionId, {
        node_id: nodeId,
        action,
        factor,
      });
    } catch (error) {
      if (error instanceof ApiError && error.code.startsWith("stale")) {
        this.notify("info", `tree was stale (${error.detail}); re-fetched`);
        await this.refetchWalk();
        return null;
      }
      throw error;
    }
    this.digest = result.digest;
    await this.refresh();
    if (!result.noop) await this.refetchWalk();
    return result;
  }
}
