import { Api } from './api.js';
import { AnnotateView } from './views/annotate.js';
import { BalanceWidget } from './views/balance.js';
import { HashtagsView } from './views/hashtags.js';
import { TopicsView } from './views/topics.js';

type TabName = 'annotate' | 'hashtags' | 'topics';

export interface App {
    annotate: AnnotateView;
    hashtags: HashtagsView;
    topics: TopicsView;
    balance: BalanceWidget;
    showTab(tab: TabName): void;
}

// Assembles the single-page app inside `root`. The API client is injected so
// tests can drive the full UI against recorded responses.
export async function createApp(root: HTMLElement, api: Api): Promise<App> {
    root.innerHTML = `
      <header class="topbar">
        <h1>Stance corpus curation</h1>
        <nav>
          <button type="button" data-tab="annotate" class="active">Annotate</button>
          <button type="button" data-tab="hashtags">Hashtags</button>
          <button type="button" data-tab="topics">Topics</button>
        </nav>
        <div class="status" data-status aria-live="polite"></div>
      </header>
      <main data-main></main>
      <aside data-balance></aside>`;

    const status = (msg: string) => {
        root.querySelector<HTMLElement>('[data-status]')!.textContent = msg;
    };
    const balance = new BalanceWidget(root.querySelector<HTMLElement>('[data-balance]')!);
    const annotate = new AnnotateView(api, balance, status);
    const hashtags = new HashtagsView(api, balance, status);
    const topics = new TopicsView(api, status);

    const main = root.querySelector<HTMLElement>('[data-main]')!;
    const views: Record<TabName, HTMLElement> = {
        annotate: annotate.element,
        hashtags: hashtags.element,
        topics: topics.element,
    };
    let active: TabName = 'annotate';

    function showTab(tab: TabName): void {
        active = tab;
        main.replaceChildren(views[tab]);
        for (const button of root.querySelectorAll<HTMLElement>('[data-tab]')) {
            button.classList.toggle('active', button.dataset.tab === tab);
        }
    }

    for (const button of root.querySelectorAll<HTMLElement>('[data-tab]')) {
        button.addEventListener('click', () => showTab(button.dataset.tab as TabName));
    }

    // Full keyboard operability of the annotation queue: keys act whenever
    // the annotate tab is visible and focus is not inside a form control.
    root.ownerDocument.addEventListener('keydown', (event) => {
        if (!root.isConnected || active !== 'annotate') return;
        const target = event.target as HTMLElement | null;
        if (target && ['INPUT', 'SELECT', 'TEXTAREA'].includes(target.tagName)) return;
        if (['f', 'a', 'n', 's'].includes(event.key.toLowerCase())) {
            event.preventDefault();
            annotate.handleKey(event.key);
        }
    });

    showTab('annotate');
    await annotate.load();
    try {
        balance.setDistribution(await api.distribution());
    } catch {
        // distribution starts empty on a fresh workspace; leave zeros
    }
    return { annotate, hashtags, topics, balance, showTab };
}
