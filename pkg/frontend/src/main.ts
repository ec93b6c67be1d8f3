// Application shell: welcome -> six-task guided flow -> analyze -> report.

import { ApiError, ScreeningApi } from './api';
import { apiBaseUrl } from './config';
import { MicRecorder } from './recorder';
import { renderDisclaimerBanner, renderPolling, renderReport } from './report';
import { TASK_INSTRUCTIONS, TaskFlow, type TaskStatus } from './taskflow';
import type { TaskName } from './types';

const UI_DISCLAIMER =
  'This tool provides a preliminary screening only and is not intended ' +
  'for clinical use. It cannot diagnose Parkinson’s disease.';

const STATUS_LABELS: Record<TaskStatus, string> = {
  pending: 'pending',
  recorded: 'recorded',
  uploaded: 'uploaded ✓',
  failed: 'failed ✕',
  skipped: 'skipped',
};

interface AppState {
  api: ScreeningApi;
  flow: TaskFlow;
  sessionId: string | null;
  recorder: MicRecorder;
  recording: boolean;
  pendingWav: ArrayBuffer | null;
  taskMessage: string;
}

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

function button(label: string, onClick: () => void, className = 'btn'): HTMLButtonElement {
  const b = el('button', className, label);
  b.addEventListener('click', onClick);
  return b;
}

export function createApp(root: HTMLElement, api: ScreeningApi = new ScreeningApi(apiBaseUrl())) {
  const state: AppState = {
    api,
    flow: new TaskFlow(),
    sessionId: null,
    recorder: new MicRecorder(),
    recording: false,
    pendingWav: null,
    taskMessage: '',
  };

  function restart() {
    state.flow = new TaskFlow();
    state.sessionId = null;
    state.pendingWav = null;
    state.taskMessage = '';
    renderWelcome();
  }

  function renderWelcome() {
    root.replaceChildren();
    const card = el('div', 'card');
    card.append(
      el('h1', undefined, 'Parkinson’s screening'),
      el(
        'p',
        undefined,
        'Six short tasks: read one sentence aloud, mimic three facial ' +
          'expressions, and finger-tap with each hand. You can skip any task.',
      ),
      button('Start', async () => {
        try {
          state.sessionId = await state.api.createSession();
          renderTask();
        } catch (err) {
          card.append(el('p', 'error', `Could not reach the screening service: ${err}`));
        }
      }, 'btn btn-primary'),
      renderDisclaimerBanner(UI_DISCLAIMER),
    );
    root.append(card);
  }

  function progressStrip(): HTMLElement {
    const strip = el('ol', 'progress');
    for (const task of state.flow.tasks) {
      const item = el('li', `progress-item status-${state.flow.status(task)}`);
      item.setAttribute('data-task', task);
      item.textContent = `${TASK_INSTRUCTIONS[task].title} — ${STATUS_LABELS[state.flow.status(task)]}`;
      if (task === state.flow.currentTask) item.classList.add('current');
      strip.append(item);
    }
    return strip;
  }

  async function uploadCurrent(task: TaskName, payload: Blob | ArrayBuffer) {
    if (!state.sessionId) return;
    try {
      state.taskMessage = 'uploading…';
      renderTask();
      await state.api.uploadArtifact(state.sessionId, task, payload);
      state.flow.setStatus(task, 'uploaded');
      state.taskMessage = '';
    } catch (err) {
      state.flow.setStatus(task, 'failed');
      state.taskMessage =
        err instanceof ApiError && err.status === 422
          ? `This file was rejected: ${err.message}. Try re-recording or picking another file.`
          : `Upload failed: ${err}. Check your connection and retry.`;
    }
    renderTask();
  }

  function speechControls(task: TaskName, controls: HTMLElement) {
    if (!state.recording) {
      controls.append(
        button('Record', async () => {
          try {
            await state.recorder.start();
            state.recording = true;
            state.taskMessage = 'recording… read the sentence, then stop.';
          } catch {
            state.taskMessage =
              'Microphone unavailable or permission denied; upload a WAV file instead.';
          }
          renderTask();
        }, 'btn btn-primary'),
      );
    } else {
      controls.append(
        button('Stop & upload', async () => {
          const rec = await state.recorder.stop();
          state.recording = false;
          state.flow.setStatus(task, 'recorded');
          await uploadCurrent(task, rec.wav);
        }, 'btn btn-primary'),
      );
    }
    const picker = el('input') as HTMLInputElement;
    picker.type = 'file';
    picker.accept = '.wav,audio/wav';
    picker.setAttribute('data-testid', 'file-input');
    picker.addEventListener('change', () => {
      const file = picker.files?.[0];
      if (file) void uploadCurrent(task, file);
    });
    controls.append(el('span', 'or', 'or'), picker);
  }

  function trackControls(task: TaskName, controls: HTMLElement) {
    const picker = el('input') as HTMLInputElement;
    picker.type = 'file';
    picker.accept = '.ljsonl,application/jsonl';
    picker.setAttribute('data-testid', 'file-input');
    picker.addEventListener('change', () => {
      const file = picker.files?.[0];
      if (file) void uploadCurrent(task, file);
    });
    controls.append(
      el(
        'p',
        'hint',
        'Record with the companion capture helper, then pick the .ljsonl ' +
          'landmark file here.',
      ),
      picker,
    );
  }

  function renderTask() {
    const task = state.flow.currentTask;
    if (task === null) {
      renderReadyToAnalyze();
      return;
    }
    root.replaceChildren();
    const card = el('div', 'card');
    card.setAttribute('data-testid', `task-${task}`);
    const spec = TASK_INSTRUCTIONS[task];
    card.append(el('h1', undefined, spec.title), el('p', 'instruction', spec.instruction));

    const controls = el('div', 'controls');
    if (task === 'speech') speechControls(task, controls);
    else trackControls(task, controls);
    card.append(controls);

    if (state.taskMessage) card.append(el('p', 'task-message', state.taskMessage));

    const nav = el('div', 'nav');
    if (state.flow.status(task) === 'uploaded') {
      nav.append(
        button('Re-record', () => {
          state.flow.setStatus(task, 'pending');
          renderTask();
        }),
      );
    }
    const next = button('Next', () => {
      state.flow.advance();
      state.taskMessage = '';
      renderTask();
    }, 'btn btn-primary');
    next.disabled = !state.flow.canAdvance();
    next.setAttribute('data-testid', 'next');
    const skip = button('Skip this task', () => {
      state.flow.skip();
      state.taskMessage = '';
      renderTask();
    });
    skip.setAttribute('data-testid', 'skip');
    nav.append(skip, next);
    card.append(nav, progressStrip(), renderDisclaimerBanner(UI_DISCLAIMER));
    root.append(card);
  }

  function renderReadyToAnalyze() {
    root.replaceChildren();
    const card = el('div', 'card');
    card.setAttribute('data-testid', 'analyze-screen');
    card.append(el('h1', undefined, 'All tasks done'));
    card.append(
      el(
        'p',
        undefined,
        `${state.flow.uploadedCount()} of ${state.flow.tasks.length} tasks uploaded.`,
      ),
    );
    const analyze = button('Analyze', () => void runAnalysis(), 'btn btn-primary');
    analyze.disabled = !state.flow.canAnalyze();
    analyze.setAttribute('data-testid', 'analyze');
    if (!state.flow.canAnalyze()) {
      card.append(el('p', 'error', 'At least one task must be uploaded before analysis.'));
    }
    card.append(analyze, progressStrip(), renderDisclaimerBanner(UI_DISCLAIMER));
    root.append(card);
  }

  async function runAnalysis() {
    if (!state.sessionId) return;
    root.replaceChildren(renderPolling(UI_DISCLAIMER));
    try {
      const report = await state.api.analyze(state.sessionId);
      root.replaceChildren(renderReport(report));
      appendRestart();
    } catch (err) {
      if (err instanceof ApiError && err.code === 'unknown_session') {
        restart();
        return;
      }
      // not ready yet or transient: fall back to polling with backoff
      try {
        const report = await state.api.pollReport(state.sessionId);
        root.replaceChildren(renderReport(report));
        appendRestart();
      } catch (pollErr) {
        const card = el('div', 'card');
        card.append(
          el('h1', undefined, 'Analysis failed'),
          el('p', 'error', String(pollErr)),
          button('Start over', restart, 'btn btn-primary'),
          renderDisclaimerBanner(UI_DISCLAIMER),
        );
        root.replaceChildren(card);
      }
    }
  }

  function appendRestart() {
    const bar = el('div', 'nav');
    bar.append(button('Start a new screening', restart));
    root.append(bar);
  }

  renderWelcome();
  return { state, restart };
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  createApp(document.getElementById('app') as HTMLElement);
}
