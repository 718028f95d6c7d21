import type { Api } from '../api.js';
import { ApiRequestError } from '../api.js';
import type { BalanceWidget } from './balance.js';
import type { StanceLabel, UserCard } from '../types.js';

const KEY_TO_LABEL: Record<string, StanceLabel> = { f: 'FAVOR', a: 'AGAINST', n: 'NONE' };

// Keyboard-first annotation queue: F / A / N label the shown account,
// S skips it. The card renders the raw timeline sample; the balance widget
// refreshes from the mutation response, never from local math.
export class AnnotateView {
    readonly element: HTMLElement;
    private queue: UserCard[] = [];
    private position = 0;
    private busy = false;

    constructor(
        private readonly api: Api,
        private readonly balance: BalanceWidget,
        private readonly onStatus: (msg: string) => void = () => undefined,
    ) {
        this.element = document.createElement('section');
        this.element.className = 'annotate-view';
        this.element.innerHTML = `
          <div class="hint">Keys: <kbd>F</kbd> favor · <kbd>A</kbd> against · <kbd>N</kbd> none · <kbd>S</kbd> skip</div>
          <article class="user-card" data-card tabindex="0" aria-live="polite"></article>`;
    }

    async load(): Promise<void> {
        const body = await this.api.users(100, 0);
        this.queue = body.users;
        this.position = 0;
        this.render();
    }

    current(): UserCard | null {
        return this.queue[this.position] ?? null;
    }

    handleKey(key: string): void {
        const normalized = key.toLowerCase();
        if (normalized === 's') {
            this.advance();
            return;
        }
        const label = KEY_TO_LABEL[normalized];
        if (label) void this.submit(label);
    }

    async submit(label: StanceLabel): Promise<void> {
        const user = this.current();
        if (!user || this.busy) return;
        this.busy = true;
        const card = this.card();
        card.classList.add('pending');
        try {
            const response = await this.api.labelUser(user.author_id, label);
            user.label = response.label;
            this.balance.setDistribution(response.distribution);
            this.balance.setPropagationPreview(response.propagation_preview);
            this.onStatus(`${response.author_id} → ${response.label} (v${response.state_version})`);
            this.advance();
        } catch (error) {
            if (error instanceof ApiRequestError) {
                // Roll back the optimistic state; flag and move on.
                card.classList.add('error');
                this.onStatus(`failed: ${error.message}`);
                this.advance();
            } else {
                throw error;
            }
        } finally {
            card.classList.remove('pending');
            this.busy = false;
        }
    }

    advance(): void {
        if (this.position < this.queue.length) this.position += 1;
        this.render();
    }

    private card(): HTMLElement {
        const el = this.element.querySelector<HTMLElement>('[data-card]');
        if (!el) throw new Error('annotate view lost its card element');
        return el;
    }

    private render(): void {
        const card = this.card();
        card.classList.remove('error');
        const user = this.current();
        if (!user) {
            card.innerHTML = '<p class="done">Queue finished.</p>';
            return;
        }
        const sample = user.sample
            .map((text) => `<li>${escapeHtml(text)}</li>`)
            .join('');
        card.innerHTML = `
          <header>
            <strong data-author>${escapeHtml(user.author_id)}</strong>
            <span class="stats">${user.tweet_count} tweets · retweeted by ${user.retweeted_by_count}</span>
            <span class="current-label" data-current-label>${user.label ?? 'unlabeled'}</span>
          </header>
          <ol class="timeline">${sample}</ol>`;
        card.focus?.();
    }
}

function escapeHtml(text: string): string {
    return text
        .replaceAll('&', '&amp;')
        .replaceAll('<', '&lt;')
        .replaceAll('>', '&gt;');
}
