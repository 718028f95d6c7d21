import { beforeEach, describe, expect, it } from 'vitest';
import { Api } from '../src/api.js';
import { createApp } from '../src/app.js';
import { fakeServer, fixture, flush, mount } from './helpers.js';

const ROUTES = {
    'GET /api/users': 'users',
    'GET /api/distribution': 'distribution',
    'GET /api/topics': 'topics',
    'POST /api/topics/selection': 'topic_selection',
};

describe('topic acceptance flow', () => {
    beforeEach(() => {
        document.body.innerHTML = '';
    });

    async function openTopics(routes = ROUTES) {
        const server = fakeServer(routes);
        const app = await createApp(mount(), new Api('', server.fetch));
        app.showTab('topics');
        await app.topics.load();
        return { server, app };
    }

    it('renders one card per topic with its top words', async () => {
        await openTopics();
        const recorded = fixture('topics').body as {
            topics: Record<string, Array<{ topic: number; top_words: Array<[string, number]> }>>;
        };
        const language = document.querySelector<HTMLSelectElement>('[data-language]')!.value;
        const cards = document.querySelectorAll('.topic-card');
        expect(cards.length).toBe(recorded.topics[language].length);
        expect(cards[0].textContent).toContain(recorded.topics[language][0].top_words[0][0]);
    });

    it('submitting a selection renders the returned per-label preview', async () => {
        const { server } = await openTopics();
        const boxes = document.querySelectorAll<HTMLInputElement>('.topic-card input');
        boxes[0].checked = true;
        boxes[1].checked = true;
        document.querySelector<HTMLButtonElement>('[data-submit]')?.click();
        await flush();
        const post = server.calls.find((c) => c.method === 'POST');
        expect(post?.body).toMatchObject({ accepted: [0, 1], min_share: 0.5 });
        const recorded = fixture('topic_selection').body as { preview: Record<string, number> };
        for (const label of ['AGAINST', 'FAVOR', 'NONE']) {
            expect(
                document.querySelector(`[data-preview-label="${label}"]`)?.textContent,
            ).toContain(String(recorded.preview[label]));
        }
    });

    it('an empty selection renders the zero preview', async () => {
        await openTopics({ ...ROUTES, 'POST /api/topics/selection': 'topic_selection_empty' });
        for (const box of document.querySelectorAll<HTMLInputElement>('.topic-card input')) {
            box.checked = false;
        }
        document.querySelector<HTMLButtonElement>('[data-submit]')?.click();
        await flush();
        const recorded = fixture('topic_selection_empty').body as { preview: Record<string, number> };
        expect(Object.values(recorded.preview)).toEqual([0, 0, 0]);
        for (const label of ['AGAINST', 'FAVOR', 'NONE']) {
            expect(
                document.querySelector(`[data-preview-label="${label}"]`)?.textContent,
            ).toContain('0');
        }
    });
});
