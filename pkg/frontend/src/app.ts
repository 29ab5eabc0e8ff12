// DOM wiring: start screen, task screen with overlay viewer and chip input,
// completion screen, and a read-only tally view.

import { AnnotationApi } from './api.js';
import { SessionFlow } from './flow.js';
import type { AnnotationTask, TallyTable } from './types.js';

const SESSION_KEY = 'perceptlab.session';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === 'class') node.className = value;
    else node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

export function mountApp(root: HTMLElement, baseUrl = ''): void {
  const api = new AnnotationApi(baseUrl);
  const flow = new SessionFlow(api);

  const stored = window.localStorage.getItem(SESSION_KEY);
  if (stored) {
    flow
      .resume(stored)
      .then(() => renderCurrent())
      .catch(() => {
        window.localStorage.removeItem(SESSION_KEY);
        renderStart();
      });
  } else {
    renderStart();
  }

  function renderStart(): void {
    root.replaceChildren();
    const input = el('input', { placeholder: 'annotator id', autofocus: 'true' });
    const button = el('button', {}, 'Start session');
    const error = el('p', { class: 'error' });
    button.addEventListener('click', async () => {
      if (!input.value.trim()) return;
      button.disabled = true;
      try {
        await flow.start(input.value.trim());
        if (flow.session) window.localStorage.setItem(SESSION_KEY, flow.session);
        renderCurrent();
      } catch (exc) {
        error.textContent = String(exc);
        button.disabled = false;
      }
    });
    root.append(
      el('h1', {}, 'perceptlab annotator'),
      el('p', {}, 'Name the objects the heatmap highlights; an object counts once per image.'),
      el('div', { class: 'start-form' }, input, button),
      error,
    );
  }

  function renderCurrent(): void {
    const state = flow.current;
    if (state.phase === 'task' && state.task) renderTask(state.task);
    else if (state.phase === 'done') renderDone();
    else renderStart();
  }

  function renderTask(task: AnnotationTask): void {
    root.replaceChildren();
    const { progress } = flow.current;

    const header = el(
      'div',
      { class: 'task-header' },
      el('span', { class: 'badge' }, task.attribute),
      el('span', { class: `badge ${task.polarity}` }, task.polarity === 'high' ? 'top ranked (+)' : 'bottom ranked (-)'),
      el('span', { class: 'progress' }, `${progress.done} / ${progress.total}`),
    );

    // Original underneath, overlay above with live opacity: the slider works
    // however the overlay PNGs were blended server-side.
    const original = el('img', { src: api.mediaUrl(task.original_url), class: 'layer' });
    const overlay = el('img', { src: api.mediaUrl(task.overlay_url), class: 'layer overlay' });
    overlay.style.opacity = '0.5';
    const viewer = el('div', { class: 'viewer' }, original, overlay);

    const retry = el('button', { class: 'retry hidden' }, 'Retry loading images');
    const markFailed = () => retry.classList.remove('hidden');
    original.addEventListener('error', markFailed);
    overlay.addEventListener('error', markFailed);
    retry.addEventListener('click', () => {
      retry.classList.add('hidden');
      original.src = `${api.mediaUrl(task.original_url)}?retry=${Date.now()}`;
      overlay.src = `${api.mediaUrl(task.overlay_url)}?retry=${Date.now()}`;
    });

    const alpha = el('input', { type: 'range', min: '0', max: '1', step: '0.05', value: '0.5' });
    alpha.addEventListener('input', () => {
      overlay.style.opacity = alpha.value;
    });
    const toggle = el('button', {}, 'Toggle overlay (t)');
    let overlayVisible = true;
    const doToggle = () => {
      overlayVisible = !overlayVisible;
      overlay.style.visibility = overlayVisible ? 'visible' : 'hidden';
    };
    toggle.addEventListener('click', doToggle);

    const chipRow = el('div', { class: 'chips' });
    const input = el('input', {
      placeholder: 'object, another object…  (Enter adds, Ctrl+Enter submits)',
      list: 'label-suggestions',
      autofocus: 'true',
    });
    const datalist = el('datalist', { id: 'label-suggestions' });
    input.addEventListener('input', () => {
      datalist.replaceChildren(
        ...flow.suggestions.suggest(input.value).map((label) => el('option', { value: label })),
      );
    });
    const noObject = el('input', { type: 'checkbox', id: 'no-object' });
    noObject.addEventListener('change', () => {
      flow.noObject = noObject.checked;
      submit.disabled = !flow.canSubmit;
    });

    const submit = el('button', { class: 'submit' }, 'Submit & next');
    submit.disabled = true;
    const error = el('p', { class: 'error' });

    const refreshChips = () => {
      chipRow.replaceChildren(
        ...flow.chips.values().map((label) => {
          const chip = el('span', { class: 'chip' }, label, ' ✕');
          chip.addEventListener('click', () => {
            flow.chips.remove(label);
            refreshChips();
          });
          return chip;
        }),
      );
      submit.disabled = !flow.canSubmit;
    };

    const addFromInput = () => {
      flow.chips.addFromInput(input.value);
      input.value = '';
      refreshChips();
    };
    input.addEventListener('keydown', (event) => {
      if (event.key === 'Enter' && !event.ctrlKey) {
        event.preventDefault();
        addFromInput();
      } else if (event.key === 'Enter' && event.ctrlKey) {
        event.preventDefault();
        addFromInput();
        void doSubmit();
      }
    });

    async function doSubmit(): Promise<void> {
      if (!flow.canSubmit) return;
      submit.disabled = true;
      try {
        await flow.submitAndAdvance();
        if (flow.current.error) {
          error.textContent = flow.current.error;
          submit.disabled = false;
          return;
        }
        renderCurrent();
      } catch (exc) {
        // Network failure: chips are untouched, the submission is retriable.
        error.textContent = `Submission failed, nothing lost - retry. (${String(exc)})`;
        submit.disabled = !flow.canSubmit;
      }
    }
    submit.addEventListener('click', () => void doSubmit());

    document.onkeydown = (event) => {
      if (event.target === input) return;
      if (event.key === 't') doToggle();
      if (event.key === 'Enter' && event.ctrlKey) void doSubmit();
    };

    root.append(
      header,
      viewer,
      retry,
      el('div', { class: 'controls' }, el('label', {}, 'overlay strength '), alpha, toggle),
      chipRow,
      el('div', { class: 'entry' }, input, el('label', { for: 'no-object' }, noObject, ' no identifiable object')),
      submit,
      error,
      datalist,
    );
    refreshChips();
  }

  function renderDone(): void {
    root.replaceChildren();
    const { progress } = flow.current;
    const tallyLink = el('button', {}, 'View tally tables');
    tallyLink.addEventListener('click', () => void renderTally());
    const restart = el('button', {}, 'Start another session');
    restart.addEventListener('click', () => {
      window.localStorage.removeItem(SESSION_KEY);
      renderStart();
    });
    root.append(
      el('h1', {}, 'Session complete'),
      el('p', {}, `${progress.done} of ${progress.total} tasks annotated.`),
      el('div', { class: 'start-form' }, tallyLink, restart),
    );
  }

  async function renderTally(): Promise<void> {
    const { tables } = await api.tally();
    root.replaceChildren(el('h1', {}, 'Object tallies'));
    if (tables.length === 0) {
      root.append(el('p', {}, 'No annotations recorded yet.'));
    }
    for (const table of tables) {
      root.append(renderTable(table));
    }
    const back = el('button', {}, 'Back');
    back.addEventListener('click', renderCurrent);
    root.append(back);
  }

  function renderTable(table: TallyTable): HTMLElement {
    const sign = table.polarity === 'high' ? '+' : '-';
    const rows = table.rows.map((row) =>
      el('tr', {}, el('td', {}, row.object), el('td', { class: 'num' }, String(row.count))),
    );
    return el(
      'section',
      { class: 'tally' },
      el('h2', {}, `${table.attribute} (${sign}) — ${table.model}`),
      el(
        'table',
        {},
        el('thead', {}, el('tr', {}, el('th', {}, 'object'), el('th', {}, 'count'))),
        el('tbody', {}, ...rows),
      ),
    );
  }
}

declare global {
  interface Window {
    PERCEPTLAB_API_BASE?: string;
  }
}

const rootElement = typeof document !== 'undefined' ? document.getElementById('app') : null;
if (rootElement) {
  mountApp(rootElement, window.PERCEPTLAB_API_BASE ?? '');
}
