// Report rendering: a likelihood gauge with a plain-language sentence,
// per-modality severity chips (or "not assessed"), resources grouped by
// kind, and a disclaimer banner that is present in every state.

import type { Modality, ResourceEntry, RiskReport, SeverityBucket } from './types';

const MODALITY_LABELS: Record<Modality, string> = {
  speech: 'Voice',
  face: 'Facial expression',
  motor: 'Hand movement',
};

const SEVERITY_PHRASES: Record<SeverityBucket, string> = {
  none: 'no signs detected',
  slight: 'slight signs',
  mild: 'mild signs',
  moderate: 'moderate signs',
  severe: 'strong signs',
};

const KIND_LABELS: Record<ResourceEntry['kind'], string> = {
  neurologist: 'Find a neurologist',
  support_group: 'Support groups',
  exercise: 'Exercise',
  diet: 'Diet',
  external: 'Learn more',
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function likelihoodSentence(value: number): string {
  const pct = Math.round(value * 100);
  if (value < 0.2) return `Your recordings show few signs of Parkinsonism (${pct}%).`;
  if (value < 0.5) return `Your recordings show some signs worth monitoring (${pct}%).`;
  if (value < 0.8) return `Your recordings show noticeable signs of Parkinsonism (${pct}%).`;
  return `Your recordings show strong signs of Parkinsonism (${pct}%).`;
}

function renderGauge(likelihood: number | undefined): HTMLElement {
  const wrap = el('div', 'gauge-block');
  if (likelihood === undefined) {
    const empty = el('div', 'gauge gauge-empty');
    empty.setAttribute('data-testid', 'gauge-insufficient');
    empty.append(el('span', 'gauge-label', 'insufficient data'));
    wrap.append(
      empty,
      el(
        'p',
        'gauge-sentence',
        'Not enough data was collected to estimate an overall likelihood.',
      ),
    );
    return wrap;
  }
  const pct = Math.round(likelihood * 100);
  const gauge = el('div', 'gauge');
  gauge.setAttribute('data-testid', 'gauge');
  gauge.setAttribute('role', 'meter');
  gauge.setAttribute('aria-valuemin', '0');
  gauge.setAttribute('aria-valuemax', '100');
  gauge.setAttribute('aria-valuenow', String(pct));
  const fill = el('div', 'gauge-fill');
  fill.style.width = `${pct}%`;
  gauge.append(fill, el('span', 'gauge-label', `${pct}%`));
  wrap.append(gauge, el('p', 'gauge-sentence', likelihoodSentence(likelihood)));
  return wrap;
}

function renderChips(report: RiskReport): HTMLElement {
  const list = el('div', 'chips');
  list.setAttribute('data-testid', 'severity-chips');
  const scored = new Map(report.modality_scores.map((s) => [s.modality, s]));
  for (const modality of ['speech', 'face', 'motor'] as Modality[]) {
    const score = scored.get(modality);
    const chip = el('span', 'chip');
    chip.setAttribute('data-modality', modality);
    if (score) {
      chip.classList.add(`chip-${score.severity_bucket}`);
      chip.setAttribute('data-testid', 'severity-chip');
      chip.textContent = `${MODALITY_LABELS[modality]}: ${SEVERITY_PHRASES[score.severity_bucket]}`;
    } else {
      chip.classList.add('chip-missing');
      chip.setAttribute('data-testid', 'not-assessed-chip');
      chip.textContent = `${MODALITY_LABELS[modality]}: not assessed`;
    }
    list.append(chip);
  }
  return list;
}

function renderResources(resources: ResourceEntry[]): HTMLElement {
  const section = el('section', 'resources');
  section.setAttribute('data-testid', 'resources');
  section.append(el('h2', undefined, 'Resources'));
  if (resources.length === 0) {
    section.append(
      el(
        'p',
        'resources-empty',
        'No regional resources found; please consult your local health services.',
      ),
    );
    return section;
  }
  const byKind = new Map<string, ResourceEntry[]>();
  for (const entry of resources) {
    const bucket = byKind.get(entry.kind) ?? [];
    bucket.push(entry);
    byKind.set(entry.kind, bucket);
  }
  for (const [kind, entries] of byKind) {
    const group = el('div', 'resource-group');
    group.append(el('h3', undefined, KIND_LABELS[kind as ResourceEntry['kind']] ?? kind));
    const ul = el('ul');
    for (const entry of entries) {
      const li = el('li');
      if (entry.url) {
        const a = el('a', undefined, entry.title) as HTMLAnchorElement;
        a.href = entry.url;
        a.rel = 'noopener';
        a.target = '_blank';
        li.append(a);
      } else {
        li.textContent = entry.title;
      }
      if (entry.contact) li.append(el('span', 'contact', ` (${entry.contact})`));
      ul.append(li);
    }
    group.append(ul);
    section.append(group);
  }
  return section;
}

export function renderDisclaimerBanner(text: string): HTMLElement {
  const banner = el('aside', 'disclaimer-banner', text);
  banner.setAttribute('data-testid', 'disclaimer');
  banner.setAttribute('role', 'note');
  return banner;
}

/** Build the full report view. Every path includes the disclaimer banner. */
export function renderReport(report: RiskReport): HTMLElement {
  const root = el('div', 'report');
  root.setAttribute('data-testid', 'report');
  root.append(el('h1', undefined, 'Your screening results'));
  root.append(renderGauge(report.overall_likelihood));
  root.append(renderChips(report));
  root.append(renderResources(report.resources));
  root.append(renderDisclaimerBanner(report.disclaimer));
  return root;
}

/** Interim view while the report is not ready yet; disclaimer still shown. */
export function renderPolling(disclaimerText: string): HTMLElement {
  const root = el('div', 'report report-pending');
  root.setAttribute('data-testid', 'report-pending');
  root.append(el('h1', undefined, 'Analyzing your recordings…'));
  root.append(el('p', undefined, 'This usually takes a few seconds.'));
  root.append(renderDisclaimerBanner(disclaimerText));
  return root;
}
