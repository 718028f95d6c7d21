import type { Api } from '../api.js';
import { ApiRequestError } from '../api.js';
import type { BalanceWidget } from './balance.js';
import type { HashtagRow } from '../types.js';

// Checklist over the ranked hashtag candidates. Submitting replaces the
// accepted set atomically; the preview panel re-renders from the response.
export class HashtagsView {
    readonly element: HTMLElement;
    private rows: HashtagRow[] = [];

    constructor(
        private readonly api: Api,
        private readonly balance: BalanceWidget,
        private readonly onStatus: (msg: string) => void = () => undefined,
    ) {
        this.element = document.createElement('section');
        this.element.className = 'hashtags-view';
        this.element.innerHTML = `
          <div class="toolbar">
            <label>min frequency <input type="number" value="2" min="1" data-minfreq></label>
            <button type="button" data-reload>Reload</button>
            <button type="button" data-submit>Save selection</button>
          </div>
          <ul class="hashtag-list" data-list></ul>`;
        this.element.querySelector('[data-reload]')!.addEventListener('click', () => void this.load());
        this.element.querySelector('[data-submit]')!.addEventListener('click', () => void this.submit());
    }

    async load(): Promise<void> {
        const input = this.element.querySelector<HTMLInputElement>('[data-minfreq]')!;
        const body = await this.api.hashtags(Number(input.value) || 1);
        this.rows = body.hashtags;
        this.render();
    }

    selectedTags(): string[] {
        return Array.from(
            this.element.querySelectorAll<HTMLInputElement>('input[type="checkbox"]:checked'),
        ).map((box) => box.value);
    }

    async submit(): Promise<void> {
        try {
            const response = await this.api.selectHashtags(this.selectedTags());
            this.balance.setDistribution(response.distribution);
            this.onStatus(
                `lexicon: ${response.lexicon.hashtags.length} hashtags (v${response.state_version})`,
            );
        } catch (error) {
            if (error instanceof ApiRequestError) {
                this.flagUnknown(error.details);
                this.onStatus(`failed: ${error.message}`);
            } else {
                throw error;
            }
        }
    }

    private flagUnknown(tags: string[]): void {
        for (const item of this.element.querySelectorAll<HTMLElement>('[data-tag]')) {
            item.classList.toggle('error', tags.includes(item.dataset.tag ?? ''));
        }
    }

    private render(): void {
        const list = this.element.querySelector<HTMLElement>('[data-list]')!;
        list.innerHTML = this.rows
            .map(
                (row) => `
          <li data-tag="${row.tag}">
            <label>
              <input type="checkbox" value="${row.tag}" ${row.accepted ? 'checked' : ''}>
              #${row.tag} <span class="count">${row.count}</span>
            </label>
          </li>`,
            )
            .join('');
    }
}
