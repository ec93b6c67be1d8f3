// Recorded API fixtures and a stub fetch implementing the v1 contract.
// The golden report below is a verbatim response from the real service
// analyzing the bundled synthetic six-task session.

import type { RiskReport } from '../src/types';

export const GOLDEN_REPORT: RiskReport = {
  disclaimer:
    'This screening result is informational only and is not intended for ' +
    'clinical use. It is not a diagnosis. Only a qualified clinician can ' +
    "diagnose Parkinson's disease; please share these results with a " +
    'doctor if you have concerns.',
  generated_at: '2026-08-08T16:11:17.454792+00:00',
  modality_scores: [
    { modality: 'speech', raw_score: 0.8139991987575227, severity_bucket: 'severe' },
    { modality: 'face', raw_score: 0.7574599475234562, severity_bucket: 'moderate' },
    { modality: 'motor', raw_score: 2.9882218374506038, severity_bucket: 'moderate' },
  ],
  not_assessed: [],
  overall_likelihood: 0.7728382018812099,
  resources: [
    {
      kind: 'neurologist',
      region_code: '*',
      title: 'International Parkinson and Movement Disorder Society — Directory',
      url: 'https://www.movementdisorders.org',
    },
    {
      kind: 'support_group',
      region_code: '*',
      title: 'World Parkinson Coalition — Global Community',
      url: 'https://www.worldpdcoalition.org',
    },
    {
      kind: 'exercise',
      region_code: '*',
      title: "Parkinson's-focused exercise guidance (PD Warrior overview)",
      url: 'https://www.parkinson.org/library/fact-sheets/exercise',
    },
    {
      kind: 'diet',
      region_code: '*',
      title: "Nutrition and Parkinson's — overview for patients",
      url: 'https://www.parkinson.org/living-with-parkinsons/management/diet-nutrition',
    },
    {
      kind: 'external',
      region_code: '*',
      title: "Michael J. Fox Foundation — Understanding Parkinson's",
      url: 'https://www.michaeljfox.org/understanding-parkinsons',
    },
  ],
  session_id: 'golden',
};

/** A speech-only session whose analysis produced no usable modality. */
export const EMPTY_REPORT: RiskReport = {
  disclaimer: GOLDEN_REPORT.disclaimer,
  generated_at: '2026-08-08T16:20:00+00:00',
  modality_scores: [],
  not_assessed: ['speech', 'face', 'motor'],
  resources: GOLDEN_REPORT.resources.slice(0, 2),
  session_id: 'empty',
};

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

function apiError(status: number, code: string, detail: string): Response {
  return json(status, { error: { code, detail } });
}

export interface FixtureServerOptions {
  /** how many report GETs return not_analyzed before the report appears */
  notAnalyzedTimes?: number;
  report?: RiskReport;
}

/**
 * In-memory stand-in for the screening service, faithful to the v1 routes
 * and error codes. Install with `vi.stubGlobal('fetch', server.fetch)`.
 */
export function fixtureServer(options: FixtureServerOptions = {}) {
  const report = options.report ?? GOLDEN_REPORT;
  let remainingNotAnalyzed = options.notAnalyzedTimes ?? 0;
  const uploads = new Map<string, string[]>();
  const analyzed = new Set<string>();
  let sessionCounter = 0;

  const calls: { method: string; path: string }[] = [];

  async function handle(input: RequestInfo | URL, init?: RequestInit): Promise<Response> {
    const url = typeof input === 'string' ? input : input instanceof URL ? input.href : input.url;
    const method = (init?.method ?? 'GET').toUpperCase();
    const path = url.replace(/^https?:\/\/[^/]+/, '');
    calls.push({ method, path });

    if (method === 'GET' && path === '/healthz') return json(200, { status: 'ok' });

    if (method === 'POST' && path === '/api/v1/sessions') {
      sessionCounter += 1;
      const id = `sess-${sessionCounter}`;
      uploads.set(id, []);
      return json(201, { session_id: id });
    }

    const uploadMatch = path.match(/^\/api\/v1\/sessions\/([^/]+)\/tasks\/([^/]+)$/);
    if (method === 'PUT' && uploadMatch) {
      const [, id, task] = uploadMatch;
      if (!uploads.has(id)) return apiError(404, 'unknown_session', id);
      const valid = [
        'speech',
        'face_disgust',
        'face_smile',
        'face_surprise',
        'motor_left',
        'motor_right',
      ];
      if (!valid.includes(task)) return apiError(400, 'invalid_task', task);
      const body = init?.body;
      const size =
        body instanceof Blob
          ? body.size
          : body instanceof ArrayBuffer
            ? body.byteLength
            : String(body ?? '').length;
      if (size === 0) return apiError(422, 'validation_failed', 'empty artifact');
      uploads.get(id)!.push(task);
      return new Response(null, { status: 204 });
    }

    const analyzeMatch = path.match(/^\/api\/v1\/sessions\/([^/]+)\/analyze$/);
    if (method === 'POST' && analyzeMatch) {
      const id = analyzeMatch[1];
      if (!uploads.has(id)) return apiError(404, 'unknown_session', id);
      if (uploads.get(id)!.length === 0) return apiError(409, 'not_ready', 'no artifacts');
      analyzed.add(id);
      return json(200, { ...report, session_id: id });
    }

    const reportMatch = path.match(/^\/api\/v1\/sessions\/([^/]+)\/report$/);
    if (method === 'GET' && reportMatch) {
      const id = reportMatch[1];
      if (!uploads.has(id) && id !== report.session_id) {
        return apiError(404, 'unknown_session', id);
      }
      if (remainingNotAnalyzed > 0) {
        remainingNotAnalyzed -= 1;
        return apiError(404, 'not_analyzed', 'pending');
      }
      if (!analyzed.has(id) && uploads.has(id) && uploads.get(id)!.length === 0) {
        return apiError(404, 'not_analyzed', 'pending');
      }
      return json(200, { ...report, session_id: id });
    }

    return apiError(404, 'unknown_route', path);
  }

  return { fetch: handle, calls, uploads };
}
