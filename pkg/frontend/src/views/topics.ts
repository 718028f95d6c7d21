import type { Api } from '../api.js';
import { ApiRequestError } from '../api.js';
import type { StanceLabel, TopicCard } from '../types.js';

const LABELS: StanceLabel[] = ['AGAINST', 'FAVOR', 'NONE'];

// Topic acceptance: per language, each card lists a topic's top words; the
// preview shows how many tweets the accepted topics would recover per label.
export class TopicsView {
    readonly element: HTMLElement;
    private topics: Record<string, TopicCard[]> = {};

    constructor(
        private readonly api: Api,
        private readonly onStatus: (msg: string) => void = () => undefined,
    ) {
        this.element = document.createElement('section');
        this.element.className = 'topics-view';
        this.element.innerHTML = `
          <div class="toolbar">
            <label>language <select data-language></select></label>
            <label>min share <input type="number" step="0.1" min="0" max="1" value="0.5" data-minshare></label>
            <button type="button" data-submit>Save selection</button>
          </div>
          <div class="topic-cards" data-cards></div>
          <div class="topic-preview" data-preview>preview: –</div>`;
        this.element.querySelector('[data-submit]')!.addEventListener('click', () => void this.submit());
        this.element
            .querySelector('[data-language]')!
            .addEventListener('change', () => this.renderCards());
    }

    async load(): Promise<void> {
        const body = await this.api.topics();
        this.topics = body.topics;
        const select = this.element.querySelector<HTMLSelectElement>('[data-language]')!;
        select.innerHTML = Object.keys(this.topics)
            .sort()
            .map((lang) => `<option value="${lang}">${lang}</option>`)
            .join('');
        this.renderCards();
        this.renderPreview(body.preview);
    }

    language(): string {
        return this.element.querySelector<HTMLSelectElement>('[data-language]')!.value;
    }

    acceptedTopics(): number[] {
        return Array.from(
            this.element.querySelectorAll<HTMLInputElement>('input[type="checkbox"]:checked'),
        ).map((box) => Number(box.value));
    }

    async submit(): Promise<void> {
        const minShare = Number(
            this.element.querySelector<HTMLInputElement>('[data-minshare]')!.value,
        );
        try {
            const response = await this.api.selectTopics(this.language(), this.acceptedTopics(), minShare);
            this.renderPreview(response.preview);
            this.onStatus(`topics saved (v${response.state_version})`);
        } catch (error) {
            if (error instanceof ApiRequestError) {
                this.onStatus(`failed: ${error.message} ${error.details.join(', ')}`);
            } else {
                throw error;
            }
        }
    }

    private renderCards(): void {
        const cards = this.element.querySelector<HTMLElement>('[data-cards]')!;
        const lang = this.language();
        const list = this.topics[lang] ?? [];
        cards.innerHTML = list
            .map((card) => {
                const words = card.top_words.map(([word]) => word).join(' ');
                return `
              <label class="topic-card" data-topic="${card.topic}">
                <input type="checkbox" value="${card.topic}" ${card.accepted ? 'checked' : ''}>
                <strong>topic ${card.topic}</strong>
                <span class="words">${words}</span>
              </label>`;
            })
            .join('');
    }

    renderPreview(preview: Record<StanceLabel, number>): void {
        const el = this.element.querySelector<HTMLElement>('[data-preview]')!;
        el.innerHTML =
            'recoverable: ' +
            LABELS.map(
                (label) => `<span data-preview-label="${label}">${label} ${preview[label] ?? 0}</span>`,
            ).join(' · ');
    }
}
