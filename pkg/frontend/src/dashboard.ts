// Educator console: course config editor (schema-driven form), document
// upload, and report charts. The UI computes no metric itself; every number
// displayed comes straight out of the report JSON.

import type { ApiClient } from './api.js';
import { barChart, cdfChart, toCsv } from './charts.js';
import { clear, el } from './dom.js';
import type { CourseConfig, UsageReport } from './types.js';

export function formatPercent(ratio: number): string {
  return `${(ratio * 100).toFixed(2)}%`;
}

export function durationBucketLabels(edges: number[]): string[] {
  return edges.map((edge, i) => (i + 1 < edges.length ? `${edge}–${edges[i + 1]}m` : `${edge}m+`));
}

interface FieldSpec {
  key: keyof CourseConfig;
  label: string;
  kind: 'text' | 'textarea' | 'lines' | 'number' | 'select';
  options?: string[];
}

// form generated from this schema, so config evolution is a schema edit
const CONFIG_FIELDS: FieldSpec[] = [
  { key: 'name', label: 'Course name', kind: 'text' },
  { key: 'description', label: 'Description', kind: 'textarea' },
  { key: 'audience_note', label: 'Audience note', kind: 'textarea' },
  { key: 'educator_rules', label: 'Rules (one per line)', kind: 'lines' },
  {
    key: 'follow_up_policy',
    label: 'Follow-up questions',
    kind: 'select',
    options: ['never', 'model_decides', 'always'],
  },
  { key: 'threshold_low', label: 'Homework threshold (low)', kind: 'number' },
  { key: 'threshold_high', label: 'Homework threshold (high)', kind: 'number' },
  { key: 'history_max_rounds', label: 'History rounds in prompt', kind: 'number' },
  { key: 'prompt_char_budget', label: 'Prompt character budget', kind: 'number' },
  { key: 'tz_offset_hours', label: 'Timezone offset (hours)', kind: 'number' },
];

export class DashboardView {
  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private courseId: string,
  ) {}

  async init(): Promise<void> {
    const [config, report] = await Promise.all([
      this.api.getCourse(this.courseId),
      this.api.getUsageReport(this.courseId),
    ]);
    clear(this.root);
    this.root.append(this.renderConfigEditor(config));
    this.root.append(this.renderUpload());
    this.root.append(renderReport(report));
  }

  renderConfigEditor(config: CourseConfig): HTMLElement {
    const form = el('form', { class: 'config-editor' });
    form.append(el('h2', { text: `Course settings: ${config.course_id}` }));
    const inputs = new Map<string, HTMLInputElement | HTMLTextAreaElement | HTMLSelectElement>();

    for (const field of CONFIG_FIELDS) {
      const row = el('label', { class: 'config-row' }, [el('span', { text: field.label })]);
      const value = config[field.key];
      let input: HTMLInputElement | HTMLTextAreaElement | HTMLSelectElement;
      if (field.kind === 'select') {
        input = el('select', { 'data-key': field.key });
        for (const option of field.options ?? []) {
          const optionEl = el('option', { value: option, text: option });
          if (option === value) optionEl.selected = true;
          input.append(optionEl);
        }
      } else if (field.kind === 'textarea' || field.kind === 'lines') {
        input = el('textarea', { 'data-key': field.key, rows: '3' });
        input.value = field.kind === 'lines' ? (value as string[]).join('\n') : String(value ?? '');
      } else {
        input = el('input', {
          'data-key': field.key,
          type: field.kind === 'number' ? 'number' : 'text',
          step: 'any',
        });
        input.value = String(value ?? '');
      }
      inputs.set(field.key, input);
      row.append(input);
      form.append(row);
    }

    const errorBox = el('p', { class: 'config-error', role: 'alert' });
    const submit = el('button', { type: 'submit', text: 'Save settings' });
    form.append(errorBox, submit);

    const validate = (): string | null => {
      const low = Number(inputs.get('threshold_low')!.value);
      const high = Number(inputs.get('threshold_high')!.value);
      if (!(low < high)) return 'threshold_low must be below threshold_high';
      if (Number(inputs.get('history_max_rounds')!.value) < 1)
        return 'history_max_rounds must be at least 1';
      if (Number(inputs.get('prompt_char_budget')!.value) < 1)
        return 'prompt_char_budget must be positive';
      return null;
    };
    const refresh = () => {
      const problem = validate();
      errorBox.textContent = problem ?? '';
      submit.disabled = problem !== null; // never submit a schema-invalid draft
    };
    form.addEventListener('input', refresh);
    refresh();

    form.addEventListener('submit', (event) => {
      event.preventDefault();
      if (validate() !== null) return;
      const draft: Record<string, unknown> = { course_id: this.courseId };
      for (const field of CONFIG_FIELDS) {
        const raw = inputs.get(field.key)!.value;
        if (field.kind === 'number') draft[field.key] = Number(raw);
        else if (field.kind === 'lines')
          draft[field.key] = raw.split('\n').map((s) => s.trim()).filter(Boolean);
        else draft[field.key] = raw;
      }
      void this.api
        .putConfig(this.courseId, draft as Partial<CourseConfig>)
        .then(() => (errorBox.textContent = 'Saved.'))
        .catch((error) => (errorBox.textContent = String(error)));
    });
    return form;
  }

  private renderUpload(): HTMLElement {
    const form = el('form', { class: 'upload-form' }, [el('h2', { text: 'Upload document' })]);
    const title = el('input', { type: 'text', placeholder: 'Title', class: 'doc-title' });
    const kind = el('select', { class: 'doc-kind' });
    for (const k of ['lecture', 'homework', 'quiz', 'exam', 'other']) {
      kind.append(el('option', { value: k, text: k }));
    }
    const text = el('textarea', { rows: '4', placeholder: 'Document text', class: 'doc-text' });
    const status = el('span', { class: 'upload-status' });
    const submit = el('button', { type: 'submit', text: 'Ingest' });
    form.append(title, kind, text, submit, status);
    form.addEventListener('submit', (event) => {
      event.preventDefault();
      void this.api
        .uploadDocument(this.courseId, { title: title.value, kind: kind.value, text: text.value })
        .then((r) => (status.textContent = `Ingested ${r.document_id}`))
        .catch((error) => (status.textContent = String(error)));
    });
    return form;
  }
}

export function renderReport(report: UsageReport): HTMLElement {
  const box = el('section', { class: 'report' });
  box.append(el('h2', { text: 'Usage report' }));

  if (report.empty) {
    box.append(
      el('p', { class: 'empty-state', text: 'No conversations recorded yet; charts will appear once students start asking questions.' }),
    );
    return box;
  }

  const tenMinuteEdgeIndex = report.durations.edges.indexOf(10) - 1;
  const withinTen =
    tenMinuteEdgeIndex >= 0 ? report.durations.cumulative[tenMinuteEdgeIndex] : report.within_10_min_ratio;
  const cards: [string, string, string][] = [
    ['conversations', 'Conversations', String(report.conversations)],
    ['users', 'Users', String(report.users)],
    ['within-10-min', 'Within 10 minutes', formatPercent(withinTen)],
    ['within-3-rounds', 'Within 3 rounds', formatPercent(report.within_3_rounds_ratio)],
    ['no-question', 'No questions asked', formatPercent(report.no_question_ratio)],
    ['single-round', 'Single round', formatPercent(report.single_round_ratio)],
    ['follow-up-emitted', 'Replies with follow-up', formatPercent(report.follow_up_emitted_ratio)],
    [
      'follow-up-answered',
      'Follow-ups answered',
      report.follow_up_answered_ratio === null ? '—' : formatPercent(report.follow_up_answered_ratio),
    ],
  ];
  const cardBox = el('div', { class: 'stat-cards' });
  for (const [id, label, value] of cards) {
    cardBox.append(
      el('div', { class: 'stat-card', 'data-stat': id }, [
        el('strong', { class: 'stat-value', text: value }),
        el('small', { text: label }),
      ]),
    );
  }
  box.append(cardBox);

  const total = report.conversations;
  box.append(
    chartPanel(
      'durations',
      'Conversations by duration',
      barChart({
        labels: durationBucketLabels(report.durations.edges),
        values: report.durations.counts,
      }),
      toCsv(
        ['bucket', 'count', 'cumulative'],
        report.durations.counts.map((count, i) => [
          durationBucketLabels(report.durations.edges)[i],
          count,
          report.durations.cumulative[i],
        ]),
      ),
    ),
  );

  const roundKeys = Object.keys(report.rounds_histogram).sort((a, b) => Number(a) - Number(b));
  box.append(
    chartPanel(
      'rounds',
      'Dialogue rounds per conversation',
      barChart({ labels: roundKeys, values: roundKeys.map((k) => report.rounds_histogram[k]) }),
      toCsv(['rounds', 'count'], roundKeys.map((k) => [k, report.rounds_histogram[k]])),
    ),
  );

  const weekKeys = Object.keys(report.weekly_conversations).sort((a, b) => Number(a) - Number(b));
  box.append(
    chartPanel(
      'weekly',
      'Conversation initiations by week',
      barChart({ labels: weekKeys, values: weekKeys.map((k) => report.weekly_conversations[k]) }),
      toCsv(['week', 'conversations'], weekKeys.map((k) => [k, report.weekly_conversations[k]])),
    ),
  );

  box.append(
    chartPanel(
      'hourly',
      'Conversation initiations by hour',
      barChart({
        labels: report.hourly_conversations.map((_, h) => String(h)),
        values: report.hourly_conversations,
        width: 660,
      }),
      toCsv(
        ['hour', 'conversations', 'cdf'],
        report.hourly_conversations.map((count, h) => [h, count, report.hourly_cdf[h]]),
      ),
    ),
  );
  const cdfPanel = el('div', { class: 'chart-panel', 'data-chart': 'hourly-cdf' }, [
    el('h3', { text: 'Hourly cumulative distribution' }),
    cdfChart(report.hourly_cdf, 660),
  ]);
  box.append(cdfPanel);

  const modes = ['general', 'homework', 'practice'];
  box.append(
    chartPanel(
      'modes',
      'Conversations by mode',
      barChart({
        labels: modes,
        values: modes.map((m) => report.mode_shares[m] ?? 0),
        format: formatPercent,
      }),
      toCsv(
        ['mode', 'share', 'conversations_share_of_total'],
        modes.map((m) => [m, report.mode_shares[m] ?? 0, Math.round((report.mode_shares[m] ?? 0) * total)]),
      ),
    ),
  );
  return box;
}

function chartPanel(id: string, title: string, chart: SVGSVGElement, csv: string): HTMLElement {
  const download = el('button', { class: 'csv-download', type: 'button', text: 'Download CSV' });
  download.dataset.csv = csv;
  download.addEventListener('click', () => {
    const blob = new Blob([csv], { type: 'text/csv' });
    const link = el('a', { href: URL.createObjectURL(blob), download: `${id}.csv` });
    link.click();
    URL.revokeObjectURL(link.href);
  });
  return el('div', { class: 'chart-panel', 'data-chart': id }, [
    el('h3', { text: title }),
    chart,
    download,
  ]);
}
