// Hand-rendered SVG charts. Every bar and point carries the exact value from
// the report JSON in a data attribute, so tests (and curious users) can check
// that the UI added no arithmetic of its own.

const SVG_NS = 'http://www.w3.org/2000/svg';

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  return node;
}

export interface BarChartOptions {
  labels: string[];
  values: number[];
  format?: (value: number) => string;
  width?: number;
  height?: number;
}

export function barChart(options: BarChartOptions): SVGSVGElement {
  const { labels, values } = options;
  const format = options.format ?? ((v: number) => String(v));
  const width = options.width ?? 440;
  const height = options.height ?? 180;
  const svg = svgEl('svg', {
    viewBox: `0 0 ${width} ${height}`,
    width: String(width),
    height: String(height),
    class: 'chart bar-chart',
  });
  const max = Math.max(...values, 0) || 1;
  const plotHeight = height - 36;
  const slot = width / Math.max(labels.length, 1);
  const barWidth = Math.max(slot * 0.7, 2);

  values.forEach((value, i) => {
    const barHeight = (value / max) * (plotHeight - 18);
    const x = i * slot + (slot - barWidth) / 2;
    const y = plotHeight - barHeight;
    const bar = svgEl('rect', {
      x: x.toFixed(1),
      y: y.toFixed(1),
      width: barWidth.toFixed(1),
      height: barHeight.toFixed(1),
      class: 'bar',
      'data-label': labels[i],
      'data-value': String(value),
    });
    svg.append(bar);
    const valueText = svgEl('text', {
      x: (i * slot + slot / 2).toFixed(1),
      y: (y - 4).toFixed(1),
      'text-anchor': 'middle',
      class: 'bar-value',
      'data-value': String(value),
    });
    valueText.textContent = format(value);
    svg.append(valueText);
    const label = svgEl('text', {
      x: (i * slot + slot / 2).toFixed(1),
      y: String(height - 6),
      'text-anchor': 'middle',
      class: 'bar-label',
    });
    label.textContent = labels[i];
    svg.append(label);
  });
  return svg;
}

export function cdfChart(values: number[], width = 440, height = 160): SVGSVGElement {
  const svg = svgEl('svg', {
    viewBox: `0 0 ${width} ${height}`,
    width: String(width),
    height: String(height),
    class: 'chart cdf-chart',
  });
  const plotHeight = height - 24;
  const step = width / Math.max(values.length - 1, 1);
  const points = values
    .map((v, i) => `${(i * step).toFixed(1)},${(plotHeight - v * (plotHeight - 8)).toFixed(1)}`)
    .join(' ');
  const line = svgEl('polyline', { points, class: 'cdf-line', fill: 'none' });
  svg.append(line);
  values.forEach((v, i) => {
    svg.append(
      svgEl('circle', {
        cx: (i * step).toFixed(1),
        cy: (plotHeight - v * (plotHeight - 8)).toFixed(1),
        r: '2',
        class: 'cdf-point',
        'data-hour': String(i),
        'data-value': String(v),
      }),
    );
  });
  return svg;
}

export function toCsv(header: string[], rows: (string | number)[][]): string {
  const lines = [header.join(',')];
  for (const row of rows) lines.push(row.join(','));
  return lines.join('\n') + '\n';
}
