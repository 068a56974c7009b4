// Rendering of one structured assistant response: segments, reference links,
// follow-up highlight, and the standing disclaimer footer.

import { el } from './dom.js';
import type { StructuredResponse } from './types.js';

export interface ResponseHandlers {
  onAnswerFollowUp?: (question: string) => void;
}

export function renderResponse(
  response: StructuredResponse,
  handlers: ResponseHandlers = {},
): HTMLElement {
  const bubble = el('div', { class: 'bubble assistant' });

  for (const segment of response.segments) {
    if (segment.kind === 'code') {
      const code = el('code', { text: segment.content });
      if (segment.language.trim()) code.dataset.language = segment.language.trim();
      bubble.append(el('pre', { class: 'segment code' }, [code]));
    } else if (segment.kind === 'diagram_placeholder') {
      bubble.append(
        el('div', { class: 'segment diagram' }, [
          el('span', { class: 'diagram-label', text: 'diagram' }),
          el('pre', {}, [el('code', { text: segment.content })]),
        ]),
      );
    } else {
      // unknown kinds render as plain text for forward compatibility
      bubble.append(el('p', { class: 'segment text', text: segment.content }));
    }
  }

  if (response.references.length > 0) {
    const links = response.references.map((ref) =>
      el('a', { class: 'reference', href: ref.link, 'data-document-id': ref.document_id }, [
        ref.title,
      ]),
    );
    bubble.append(el('div', { class: 'references' }, [el('span', { text: 'Sources: ' }), ...links]));
  }

  if (response.follow_up_question) {
    const question = response.follow_up_question;
    const chip = el('button', { class: 'follow-up-chip', type: 'button' }, [question]);
    chip.addEventListener('click', () => handlers.onAnswerFollowUp?.(question));
    bubble.append(el('div', { class: 'follow-up' }, [chip]));
  }

  bubble.append(el('footer', { class: 'disclaimer', text: response.disclaimer }));
  return bubble;
}
