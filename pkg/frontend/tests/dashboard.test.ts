import { readFileSync } from 'node:fs';
import { join } from 'node:path';

import { beforeEach, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { DashboardView, durationBucketLabels, formatPercent, renderReport } from '../src/dashboard.js';
import type { CourseConfig, UsageReport } from '../src/types.js';

const referenceReport: UsageReport = JSON.parse(
  readFileSync(join(__dirname, 'fixtures', 'report.json'), 'utf-8'),
);

beforeEach(() => {
  document.body.innerHTML = '<div id="app"></div>';
});

describe('renderReport with the reference synthetic report', () => {
  it('renders the under-10-minutes stat as 64.58%', () => {
    const box = renderReport(referenceReport);
    const card = box.querySelector('[data-stat="within-10-min"] .stat-value');
    expect(card?.textContent).toBe('64.58%');
  });

  it('shows the other headline ratios exactly as reported', () => {
    const box = renderReport(referenceReport);
    const value = (id: string) => box.querySelector(`[data-stat="${id}"] .stat-value`)?.textContent;
    expect(value('within-3-rounds')).toBe(formatPercent(referenceReport.within_3_rounds_ratio));
    expect(value('no-question')).toBe(formatPercent(referenceReport.no_question_ratio));
    expect(value('single-round')).toBe(formatPercent(referenceReport.single_round_ratio));
    expect(value('follow-up-emitted')).toBe(formatPercent(referenceReport.follow_up_emitted_ratio));
    expect(value('conversations')).toBe(String(referenceReport.conversations));
  });

  it('renders a monotone hourly CDF ending at 1.0', () => {
    const box = renderReport(referenceReport);
    const points = [...box.querySelectorAll('[data-chart="hourly-cdf"] .cdf-point')];
    expect(points).toHaveLength(24);
    const values = points.map((p) => Number(p.getAttribute('data-value')));
    for (let i = 1; i < values.length; i++) {
      expect(values[i]).toBeGreaterThanOrEqual(values[i - 1]);
    }
    expect(values[values.length - 1]).toBe(1.0);
  });

  it('every chart bar carries the exact report JSON value', () => {
    const box = renderReport(referenceReport);
    const durationBars = [
      ...box.querySelectorAll('[data-chart="durations"] .bar'),
    ].map((b) => Number(b.getAttribute('data-value')));
    expect(durationBars).toEqual(referenceReport.durations.counts);

    const hourlyBars = [...box.querySelectorAll('[data-chart="hourly"] .bar')].map((b) =>
      Number(b.getAttribute('data-value')),
    );
    expect(hourlyBars).toEqual(referenceReport.hourly_conversations);

    const modeBars = [...box.querySelectorAll('[data-chart="modes"] .bar')].map((b) => ({
      label: b.getAttribute('data-label'),
      value: Number(b.getAttribute('data-value')),
    }));
    expect(modeBars).toEqual(
      ['general', 'homework', 'practice'].map((mode) => ({
        label: mode,
        value: referenceReport.mode_shares[mode],
      })),
    );
    const homeworkBar = modeBars.find((b) => b.label === 'homework')!;
    expect(homeworkBar.value).toBeCloseTo(0.5379, 10);
  });

  it('offers a CSV download per chart whose content matches the report', () => {
    const box = renderReport(referenceReport);
    const csv = box.querySelector<HTMLButtonElement>('[data-chart="rounds"] .csv-download')!
      .dataset.csv!;
    const lines = csv.trim().split('\n');
    expect(lines[0]).toBe('rounds,count');
    const zeroLine = lines.find((l) => l.startsWith('0,'));
    expect(zeroLine).toBe(`0,${referenceReport.rounds_histogram['0']}`);
  });

  it('renders an empty state for a zeroed report without chart errors', () => {
    const empty: UsageReport = {
      ...referenceReport,
      empty: true,
      conversations: 0,
      users: 0,
      hourly_cdf: new Array(24).fill(0),
    };
    const box = renderReport(empty);
    expect(box.querySelector('.empty-state')).not.toBeNull();
    expect(box.querySelectorAll('.chart-panel')).toHaveLength(0);
  });

  it('labels duration buckets from the edges', () => {
    expect(durationBucketLabels([0, 5, 10])).toEqual(['0–5m', '5–10m', '10m+']);
  });
});

describe('config editor', () => {
  const config: CourseConfig = {
    course_id: 'cs101',
    name: 'Intro CS',
    description: 'desc',
    audience_note: '',
    educator_rules: ['Be kind.'],
    time_guidance: [],
    mode_instructions: {},
    follow_up_policy: 'model_decides',
    threshold_low: 0.6,
    threshold_high: 0.9,
    history_max_rounds: 6,
    prompt_char_budget: 24000,
    tz_offset_hours: 0,
  };

  it('blocks submission while the draft is schema-invalid client-side', () => {
    const view = new DashboardView(document.getElementById('app')!, new ApiClient(), 'cs101');
    const form = view.renderConfigEditor(config);
    document.body.append(form);
    const submit = form.querySelector<HTMLButtonElement>('button[type="submit"]')!;
    expect(submit.disabled).toBe(false);

    const low = form.querySelector<HTMLInputElement>('input[data-key="threshold_low"]')!;
    low.value = '0.95'; // above threshold_high
    form.dispatchEvent(new Event('input'));
    expect(submit.disabled).toBe(true);
    expect(form.querySelector('.config-error')?.textContent).toContain('threshold_low');

    low.value = '0.5';
    form.dispatchEvent(new Event('input'));
    expect(submit.disabled).toBe(false);
  });
});
