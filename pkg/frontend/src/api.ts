// Typed client for the annotation service HTTP API.

export type Mode = "M" | "S";

export interface TagInfo {
  code: string;
  slot: string;
  description: string;
  example: string;
}

export interface TagGroup {
  word_class: string;
  tags: TagInfo[];
}

export type TagsetResponse =
  | { kind: "M"; groups: TagGroup[] }
  | { kind: "S"; tags: TagInfo[] };

export interface AssignmentResponse {
  assignment_id: string;
  sentence_id: string;
  surface: string;
  tokens: string[];
  mode: Mode;
}

export interface Finding {
  severity: "ERROR" | "WARNING";
  rule: string;
  item_index: number;
  message: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public findings: Finding[] = [],
  ) {
    super(message);
  }
}

async function raise(response: Response): Promise<never> {
  let message = `${response.status}`;
  let findings: Finding[] = [];
  try {
    const body = await response.json();
    const detail = body.detail;
    if (typeof detail === "string") {
      message = detail;
    } else if (detail && typeof detail === "object") {
      message = detail.message ?? message;
      findings = detail.findings ?? [];
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, message, findings);
}

export class ApiClient {
  token: string | null = null;

  constructor(
    private baseUrl: string = "",
    private fetchFn: typeof fetch = fetch,
  ) {}

  private headers(): Record<string, string> {
    const h: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) h["Authorization"] = `Bearer ${this.token}`;
    return h;
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchFn(this.baseUrl + path, {
      ...init,
      headers: this.headers(),
    });
    if (!response.ok && response.status !== 204) await raise(response);
    return response;
  }

  async register(name: string, passphrase: string): Promise<string> {
    const r = await this.request("/api/experts", {
      method: "POST",
      body: JSON.stringify({ name, passphrase }),
    });
    return (await r.json()).expert_id;
  }

  async login(name: string, passphrase: string): Promise<void> {
    const r = await this.request("/api/sessions", {
      method: "POST",
      body: JSON.stringify({ name, passphrase }),
    });
    this.token = (await r.json()).token;
  }

  async tagset(kind: Mode): Promise<TagsetResponse> {
    const r = await this.request(`/api/tagset?kind=${kind}`);
    return r.json();
  }

  async nextAssignment(mode: Mode): Promise<AssignmentResponse | null> {
    const r = await this.request(`/api/assignments/next?mode=${mode}`);
    if (r.status === 204) return null;
    return r.json();
  }

  async submit(assignmentId: string, line: string): Promise<string> {
    const r = await this.request("/api/annotations", {
      method: "POST",
      body: JSON.stringify({ assignment_id: assignmentId, line }),
    });
    return (await r.json()).annotation_id;
  }

  async confirm(annotationId: string): Promise<void> {
    await this.request(`/api/annotations/${annotationId}/confirm`, {
      method: "POST",
    });
  }
}
