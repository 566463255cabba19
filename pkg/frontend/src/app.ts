/** Single-page operator UI: pick an instance, ask a question, read the
 *  structured answer. Identifying information (airport, impacting
 *  condition, window) sits at the top of the result, followed by the
 *  hourly rate strip, delay metrics, and scope panel. */

import {
  ApiClient,
  ApiError,
  AdvisoryRecord,
  InstanceDescriptor,
  StructuredAnswer,
} from './api.js';

export const BULLET_LABELS = [
  'date',
  'start time',
  'end time',
  'program rate',
  'runway configuration',
  'impacting condition',
] as const;

export const DISCLAIMER_TEXT =
  'This tool summarizes historical Ground Delay Program advisories. ' +
  'It is not a predictive tool and does not recommend traffic management actions.';

const NWS_TERMINAL_WEATHER_URL = 'https://www.weather.gov/taw/';
const FAA_OIS_URL = 'https://www.fly.faa.gov/ois/';

export interface ViewState {
  instances: InstanceDescriptor[];
  selected: string | null;
  queryText: string;
  lastAnswer: StructuredAnswer | null;
  lastSource: AdvisoryRecord | null;
  loading: boolean;
  errorBanner: string | null;
}

export interface App {
  state: ViewState;
  init(): Promise<void>;
  submit(): Promise<void>;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text !== undefined) node.textContent = text;
  return node;
}

function role(root: HTMLElement, name: string): HTMLElement {
  const node = root.querySelector<HTMLElement>(`[data-role="${name}"]`);
  if (!node) throw new Error(`missing element: ${name}`);
  return node;
}

export function createApp(root: HTMLElement, client: ApiClient): App {
  const state: ViewState = {
    instances: [],
    selected: null,
    queryText: '',
    lastAnswer: null,
    lastSource: null,
    loading: false,
    errorBanner: null,
  };

  root.innerHTML = `
    <header>
      <h1>GDP advisory summaries</h1>
      <p data-role="disclaimer" class="disclaimer"></p>
    </header>
    <div data-role="error-banner" class="banner" hidden></div>
    <section class="controls">
      <label for="instance-select">Airport instance</label>
      <select id="instance-select" data-role="instance-select"></select>
      <input data-role="query-input" class="query-input" type="text"
             placeholder="Ask about historical GDPs, e.g. 'which gdp had the highest max delay'" />
      <button data-role="submit" type="button" disabled>Ask</button>
    </section>
    <section class="links">
      <a data-role="link-weather" href="${NWS_TERMINAL_WEATHER_URL}"
         target="_blank" rel="noopener">National Weather Service Terminal Weather Dashboard</a>
      <a data-role="link-ois" href="${FAA_OIS_URL}"
         target="_blank" rel="noopener">FAA Operational Information System (OIS)</a>
    </section>
    <section data-role="result" class="result" hidden>
      <div data-role="result-top" class="result-top"></div>
      <div class="panel">
        <h2>Hourly program rate</h2>
        <div data-role="rate-strip" class="rate-strip"></div>
      </div>
      <div class="panel">
        <h2>Delay metrics</h2>
        <dl data-role="delay-metrics"></dl>
      </div>
      <div class="panel">
        <h2>Scope</h2>
        <p data-role="scope-panel"></p>
      </div>
      <div class="panel">
        <h2>Answer</h2>
        <ul data-role="bullets"></ul>
        <p data-role="narrative"></p>
        <p data-role="sources" class="sources"></p>
      </div>
    </section>
  `;

  role(root, 'disclaimer').textContent = DISCLAIMER_TEXT;

  const select = role(root, 'instance-select') as HTMLSelectElement;
  const input = role(root, 'query-input') as HTMLInputElement;
  const submitButton = role(root, 'submit') as HTMLButtonElement;
  const banner = role(root, 'error-banner');
  const result = role(root, 'result');

  function renderBanner(): void {
    banner.hidden = state.errorBanner === null;
    banner.textContent = state.errorBanner ?? '';
  }

  function renderControls(): void {
    const noInstances = state.instances.length === 0;
    select.disabled = noInstances || state.loading;
    input.disabled = state.loading;
    submitButton.disabled =
      state.loading || noInstances || state.selected === null || state.queryText.trim() === '';
  }

  function renderInstances(): void {
    select.innerHTML = '';
    if (state.instances.length === 0) {
      select.append(el('option', {}, 'no instances configured'));
    }
    for (const instance of state.instances) {
      const label = `${instance.airport} (${instance.record_count} advisories)`;
      select.append(el('option', { value: instance.airport }, label));
    }
    if (state.selected) select.value = state.selected;
  }

  function renderResult(): void {
    const answer = state.lastAnswer;
    result.hidden = answer === null;
    if (!answer) return;

    const bulletValues = new Map(answer.bullets.map((b) => [b.label, b.value]));

    // identifying information first: airport, condition, window
    const top = role(root, 'result-top');
    top.innerHTML = '';
    top.append(
      el('span', { 'data-role': 'top-airport', class: 'top-item' }, state.selected ?? ''),
      el('span', { 'data-role': 'top-condition', class: 'top-item' },
        bulletValues.get('impacting condition') ?? 'unavailable'),
      el('span', { 'data-role': 'top-window', class: 'top-item' },
        `${bulletValues.get('start time') ?? '?'} → ${bulletValues.get('end time') ?? '?'}`),
    );

    const strip = role(root, 'rate-strip');
    strip.innerHTML = '';
    const rates = state.lastSource?.rates ?? [];
    if (rates.length === 0) {
      strip.append(el('p', {}, 'no rate schedule'));
    } else {
      const peak = Math.max(...rates);
      for (const rate of rates) {
        const bar = el('div', { class: 'rate-bar', 'data-role': 'rate-bar' }, String(rate));
        bar.style.height = `${peak > 0 ? Math.round((rate / peak) * 100) : 0}%`;
        strip.append(bar);
      }
    }

    const metrics = role(root, 'delay-metrics');
    metrics.innerHTML = '';
    const delays = state.lastSource?.delays ?? null;
    if (delays) {
      metrics.append(
        el('dt', {}, 'maximum delay'),
        el('dd', { 'data-role': 'max-delay' }, `${delays.max_delay} minutes`),
        el('dt', {}, 'average delay'),
        el('dd', { 'data-role': 'avg-delay' }, `${delays.avg_delay} minutes`),
      );
    } else {
      metrics.append(el('dd', {}, 'unavailable'));
    }

    role(root, 'scope-panel').textContent =
      state.lastSource?.scope?.description ?? 'unavailable';

    const bullets = role(root, 'bullets');
    bullets.innerHTML = '';
    for (const label of BULLET_LABELS) {
      const item = el('li', { 'data-role': 'bullet', 'data-label': label });
      item.append(
        el('span', { class: 'bullet-label' }, label),
        el('span', { class: 'bullet-value' }, bulletValues.get(label) ?? 'unavailable'),
      );
      bullets.append(item);
    }

    role(root, 'narrative').textContent = answer.narrative ?? '';
    role(root, 'sources').textContent =
      answer.sources.length > 0 ? `sources: ${answer.sources.join(', ')}` : '';
  }

  function renderAll(): void {
    renderBanner();
    renderInstances();
    renderControls();
    renderResult();
  }

  select.addEventListener('change', () => {
    state.selected = select.value || null;
    renderControls();
  });
  input.addEventListener('input', () => {
    state.queryText = input.value;
    renderControls();
  });

  async function init(): Promise<void> {
    try {
      state.instances = await client.listInstances();
      state.selected = state.instances.length > 0 ? state.instances[0].airport : null;
      state.errorBanner = null;
    } catch (error) {
      state.instances = [];
      state.selected = null;
      state.errorBanner =
        error instanceof ApiError ? error.message : 'service unreachable';
    }
    renderAll();
  }

  async function submit(): Promise<void> {
    if (state.loading || !state.selected || state.queryText.trim() === '') return;
    state.loading = true;
    state.errorBanner = null;
    renderBanner();
    renderControls();
    try {
      const answer = await client.query(state.selected, state.queryText.trim());
      let source: AdvisoryRecord | null = null;
      if (answer.sources.length > 0) {
        try {
          source = await client.advisory(answer.sources[0]);
        } catch {
          source = null;   // answer still renders; panels fall back to unavailable
        }
      }
      state.lastAnswer = answer;
      state.lastSource = source;
    } catch (error) {
      state.errorBanner =
        error instanceof ApiError ? error.message : 'query failed';
    } finally {
      state.loading = false;
    }
    renderAll();
  }

  submitButton.addEventListener('click', () => {
    void submit();
  });
  input.addEventListener('keydown', (event) => {
    if (event.key === 'Enter') void submit();
  });

  renderAll();
  return { state, init, submit };
}
