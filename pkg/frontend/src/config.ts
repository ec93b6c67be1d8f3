// Single configuration knob: where the screening service lives.
// Priority: ?api= query parameter, then <meta name="pdscreen-api">, then
// same-origin (the dev server proxies /api to the backend).

export function apiBaseUrl(): string {
  if (typeof window === 'undefined') return '';
  const fromQuery = new URLSearchParams(window.location.search).get('api');
  if (fromQuery) return fromQuery.replace(/\/$/, '');
  const meta = document.querySelector('meta[name="pdscreen-api"]');
  const fromMeta = meta?.getAttribute('content');
  if (fromMeta) return fromMeta.replace(/\/$/, '');
  return '';
}
