import { PolicyClient } from "./api.js";
import {
  Edit,
  EdgeJson,
  PolicyView,
  Report,
  Stage,
  StatefulResult,
} from "./types.js";

// Client-side session state for the refinement loop. The rules are
// deliberately conservative:
//   - edits are staged, previewed through /whatif, and only applied to
//     the server on an explicit commit; nothing auto-commits
//   - pending edits survive until commit or discard
//   - a revision mismatch means another tab (or a race) moved the
//     session; we refetch instead of trusting the local copy

export class SessionState {
  stage: Stage = "invariants";
  selectedEntity: string | null = null;
  selectedEdge: EdgeJson | null = null;

  pendingEdits: Edit[] = [];
  /** report of the last what-if preview (or of the committed policy) */
  lastReport: Report | null = null;
  /** graph of the last what-if preview, for optimistic rendering */
  previewGraph: PolicyView["graph"] | null = null;

  private sessionId: string | null = null;
  private revision = -1;
  private committed: PolicyView | null = null;
  private statefulResult: StatefulResult | null = null;

  constructor(private readonly client: PolicyClient) {}

  get id(): string {
    if (this.sessionId === null) throw new Error("no session loaded");
    return this.sessionId;
  }

  get currentRevision(): number {
    return this.revision;
  }

  get policy(): PolicyView {
    if (this.committed === null) throw new Error("no session loaded");
    return this.committed;
  }

  get stateful(): StatefulResult | null {
    return this.statefulResult;
  }

  async load(scenario: unknown): Promise<PolicyView> {
    const created = await this.client.createSession(scenario);
    this.sessionId = created.id;
    return this.refetch();
  }

  async refetch(): Promise<PolicyView> {
    const view = await this.client.getPolicy(this.id);
    this.committed = view;
    this.revision = view.revision;
    this.lastReport = view.report;
    this.previewGraph = null;
    this.stage = "policy";
    return view;
  }

  /** Stage an edit and preview its effect. The session is not mutated. */
  async stageEdit(edit: Edit): Promise<Report> {
    this.pendingEdits.push(edit);
    const preview = await this.client.whatIf(this.id, this.pendingEdits);
    if (preview.revision !== this.revision) {
      // someone else committed; our preview was computed against a
      // newer base, so resync before showing anything
      await this.refetch();
      return this.stagePreview();
    }
    this.lastReport = preview.report;
    this.previewGraph = preview.graph;
    return preview.report;
  }

  private async stagePreview(): Promise<Report> {
    const preview = await this.client.whatIf(this.id, this.pendingEdits);
    this.lastReport = preview.report;
    this.previewGraph = preview.graph;
    return preview.report;
  }

  /** Apply all pending edits to the server; clears the staging area. */
  async commitPending(): Promise<PolicyView> {
    if (this.pendingEdits.length === 0) return this.policy;
    const view = await this.client.applyEdits(this.id, this.pendingEdits);
    this.pendingEdits = [];
    this.committed = view;
    this.revision = view.revision;
    this.lastReport = view.report;
    this.previewGraph = null;
    this.statefulResult = null;
    return view;
  }

  discardPending(): void {
    this.pendingEdits = [];
    this.previewGraph = null;
    this.lastReport = this.committed?.report ?? null;
  }

  async computeStateful(preferences?: Edit[]): Promise<StatefulResult> {
    const result = await this.client.computeStateful(this.id, preferences);
    this.statefulResult = result;
    this.revision = result.revision;
    this.stage = "stateful";
    return result;
  }

  async previewConfig(format: "iptables" | "openflow" | "dot"): Promise<string> {
    const text = await this.client.getConfig(this.id, format);
    this.stage = "configs";
    return text;
  }
}
