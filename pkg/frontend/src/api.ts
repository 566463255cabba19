/** Typed client for the gdpdesk HTTP API. The UI never computes GDP
 *  values itself; everything rendered comes verbatim from these payloads. */

export interface InstanceDescriptor {
  airport: string;
  record_count: number;
  context_size: number;
  temperature: number;
  backend: string;
}

export interface Bullet {
  label: string;
  value: string;
}

export interface StructuredAnswer {
  bullets: Bullet[];
  narrative: string | null;
  sources: string[];
  answer_mode: string;
  disclaimer: string;
}

export interface AdvisoryRecord {
  id: string;
  airport: string;
  kind: string;
  issue_date: string;
  rates: number[];
  delays: { max_delay: number; avg_delay: number } | null;
  scope: {
    description: string;
    includes_contiguous_us: boolean;
    extra_regions: string[];
  } | null;
  raw_text: string;
}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

export interface ApiClient {
  listInstances(): Promise<InstanceDescriptor[]>;
  query(airport: string, text: string): Promise<StructuredAnswer>;
  advisory(id: string): Promise<AdvisoryRecord>;
}

async function parseOrThrow<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = `request failed (${response.status})`;
    try {
      const body = await response.json();
      if (typeof body.detail === 'string') detail = body.detail;
    } catch {
      /* non-JSON error body; keep the generic message */
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export function createClient(baseUrl = ''): ApiClient {
  return {
    async listInstances() {
      const body = await parseOrThrow<{ instances: InstanceDescriptor[] }>(
        await fetch(`${baseUrl}/instances`),
      );
      return body.instances;
    },

    async query(airport, text) {
      return parseOrThrow<StructuredAnswer>(
        await fetch(`${baseUrl}/instances/${encodeURIComponent(airport)}/query`, {
          method: 'POST',
          headers: { 'Content-Type': 'application/json' },
          body: JSON.stringify({ text }),
        }),
      );
    },

    async advisory(id) {
      const body = await parseOrThrow<{ record: AdvisoryRecord }>(
        await fetch(`${baseUrl}/advisories/${encodeURIComponent(id)}`),
      );
      return body.record;
    },
  };
}
