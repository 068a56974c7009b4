// Student chat: mode cards, document picker, question input, advisory banner
// with one-click mode switch, and the share toggle. Mode and advisory state
// always mirror the last dispatch decision returned by the API.

import type { ApiClient } from './api.js';
import { clear, el } from './dom.js';
import { renderResponse } from './response.js';
import type { DocumentInfo, Mode, TurnResult } from './types.js';

const MODE_LABELS: Record<Mode, string> = {
  general: 'General',
  homework: 'Homework',
  practice: 'Practice',
};

const MODE_HINTS: Record<Mode, string> = {
  general: 'Ask anything about the course.',
  homework: 'Hints and guidance for homework, never direct answers.',
  practice: 'Generate practice exercises from quizzes and exams.',
};

const MODE_KINDS: Record<Mode, string[]> = {
  general: [],
  homework: ['homework'],
  practice: ['quiz', 'exam'],
};

export class ChatView {
  conversationId: string | null = null;
  activeMode: Mode = 'general';
  selectedDocuments: string[] = [];
  documents: DocumentInfo[] = [];
  shared = false;
  private lastQuestion = '';

  private cardsBox!: HTMLElement;
  private docsBox!: HTMLElement;
  private messagesBox!: HTMLElement;
  private input!: HTMLTextAreaElement;
  private shareButton!: HTMLButtonElement;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private courseId: string,
  ) {}

  async init(): Promise<void> {
    this.documents = await this.api.listDocuments(this.courseId);
    this.render();
  }

  private render(): void {
    clear(this.root);
    this.cardsBox = el('div', { class: 'mode-cards' });
    this.docsBox = el('div', { class: 'doc-picker' });
    this.messagesBox = el('div', { class: 'messages' });
    this.input = el('textarea', {
      class: 'question-input',
      placeholder: 'Ask a question…',
      rows: '2',
    });
    const send = el('button', { class: 'send', type: 'button', text: 'Send' });
    send.addEventListener('click', () => void this.send());
    this.input.addEventListener('keydown', (event) => {
      if (event.key === 'Enter' && !event.shiftKey) {
        event.preventDefault();
        void this.send();
      }
    });
    this.shareButton = el('button', {
      class: 'share',
      type: 'button',
      text: 'Share',
      title: 'Create a read-only link to this conversation',
    });
    this.shareButton.addEventListener('click', () => void this.toggleShare());

    this.root.append(
      this.cardsBox,
      this.docsBox,
      this.messagesBox,
      el('div', { class: 'composer' }, [this.input, send, this.shareButton]),
    );
    this.renderModeCards();
    this.renderDocPicker();
  }

  renderModeCards(): void {
    clear(this.cardsBox);
    for (const mode of ['general', 'homework', 'practice'] as Mode[]) {
      const available =
        mode === 'general' || this.documents.some((d) => MODE_KINDS[mode].includes(d.kind));
      const card = el('button', {
        class: `mode-card${mode === this.activeMode ? ' active' : ''}`,
        type: 'button',
        'data-mode': mode,
      });
      card.append(el('strong', { text: MODE_LABELS[mode] }));
      card.append(el('small', { text: MODE_HINTS[mode] }));
      const matching = this.documents.filter((d) => MODE_KINDS[mode].includes(d.kind));
      if (matching.length > 0) {
        card.append(
          el('small', { class: 'card-docs', text: matching.map((d) => d.title).join(', ') }),
        );
      }
      if (!available) {
        card.disabled = true;
        card.title = 'No matching course documents yet';
      } else {
        card.addEventListener('click', () => this.selectMode(mode));
      }
      this.cardsBox.append(card);
    }
  }

  private renderDocPicker(): void {
    clear(this.docsBox);
    if (this.documents.length === 0) return;
    this.docsBox.append(el('span', { class: 'picker-label', text: 'Focus on: ' }));
    for (const doc of this.documents) {
      const label = el('label', { class: 'doc-option' });
      const checkbox = el('input', { type: 'checkbox', 'data-document-id': doc.id });
      checkbox.checked = this.selectedDocuments.includes(doc.id);
      checkbox.addEventListener('change', () => {
        this.selectedDocuments = checkbox.checked
          ? [...this.selectedDocuments, doc.id]
          : this.selectedDocuments.filter((id) => id !== doc.id);
      });
      label.append(checkbox, ` ${doc.title} (${doc.kind})`);
      this.docsBox.append(label);
    }
  }

  selectMode(mode: Mode): void {
    this.activeMode = mode;
    // picking a card also focuses its matching documents
    this.selectedDocuments = this.documents
      .filter((d) => MODE_KINDS[mode].includes(d.kind))
      .map((d) => d.id);
    this.renderModeCards();
    this.renderDocPicker();
  }

  async send(text?: string): Promise<TurnResult | null> {
    const question = (text ?? this.input.value).trim();
    if (!question) return null;
    this.lastQuestion = question;
    this.input.value = '';
    this.messagesBox.append(el('div', { class: 'bubble user', text: question }));

    if (this.conversationId === null) {
      this.conversationId = await this.api.startConversation(this.courseId, this.activeMode);
    }
    let turn: TurnResult;
    try {
      turn = await this.api.postMessage(
        this.conversationId,
        question,
        this.selectedDocuments,
        this.activeMode,
      );
    } catch (error) {
      this.messagesBox.append(
        el('div', { class: 'bubble error', text: `The assistant could not respond: ${String(error)}` }),
      );
      return null;
    }
    this.renderTurn(turn);
    return turn;
  }

  renderTurn(turn: TurnResult): void {
    this.activeMode = turn.mode; // mirror the dispatch decision
    this.renderModeCards();
    this.messagesBox.append(
      renderResponse(turn.response, {
        onAnswerFollowUp: (question) => {
          this.input.placeholder = `Answering: ${question}`;
          this.input.focus();
        },
      }),
    );
    if (turn.advisory_shown) {
      this.messagesBox.append(this.renderAdvisoryBanner());
    }
  }

  private renderAdvisoryBanner(): HTMLElement {
    const banner = el('div', { class: 'advisory-banner', role: 'alert' }, [
      el('span', {
        text: 'This looks like a homework question. Homework mode gives hints that protect your learning.',
      }),
    ]);
    const switchButton = el('button', {
      class: 'switch-mode',
      type: 'button',
      text: 'Switch to homework mode',
    });
    switchButton.addEventListener('click', () => {
      // one click: switch mode and resubmit the same question
      this.selectMode('homework');
      banner.remove();
      void this.send(this.lastQuestion);
    });
    banner.append(switchButton);
    return banner;
  }

  private async toggleShare(): Promise<void> {
    if (this.conversationId === null) return;
    this.shared = !this.shared;
    await this.api.setShared(this.conversationId, this.shared);
    this.shareButton.textContent = this.shared ? 'Unshare' : 'Share';
    if (this.shared) {
      this.messagesBox.append(
        el('div', {
          class: 'share-note',
          text: `Read-only link: ${this.api.baseUrl}/shared/${this.conversationId}`,
        }),
      );
    }
  }
}
