// Test plumbing: a fetch stand-in replaying the recorded API fixtures, so
// the whole suite runs without the core service ever being built or started.

import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';
import type { FetchLike } from '../src/api.js';

const FIXTURE_DIR = join(dirname(fileURLToPath(import.meta.url)), 'fixtures');

export interface RecordedResponse {
    status: number;
    body: unknown;
}

export function fixture(name: string): RecordedResponse {
    const raw = readFileSync(join(FIXTURE_DIR, `${name}.json`), 'utf-8');
    return JSON.parse(raw) as RecordedResponse;
}

export interface LoggedCall {
    method: string;
    path: string;
    body?: unknown;
}

export interface FakeServer {
    fetch: FetchLike;
    calls: LoggedCall[];
}

// Routes map "METHOD /path" (exact or prefix) to a fixture name or literal
// recorded response. Longest matching key wins.
export function fakeServer(routes: Record<string, string | RecordedResponse>): FakeServer {
    const calls: LoggedCall[] = [];
    const fetchFn: FetchLike = async (input, init) => {
        const method = init?.method ?? 'GET';
        const key = `${method} ${input}`;
        const match = Object.keys(routes)
            .filter((candidate) => key === candidate || key.startsWith(candidate))
            .sort((a, b) => b.length - a.length)[0];
        if (!match) throw new Error(`no route for ${key}`);
        calls.push({
            method,
            path: String(input),
            body: init?.body ? JSON.parse(String(init.body)) : undefined,
        });
        const spec = routes[match];
        const recorded = typeof spec === 'string' ? fixture(spec) : spec;
        return new Response(JSON.stringify(recorded.body), {
            status: recorded.status,
            headers: { 'content-type': 'application/json' },
        });
    };
    return { fetch: fetchFn, calls };
}

export function mount(): HTMLElement {
    document.body.innerHTML = '<div id="app"></div>';
    return document.getElementById('app') as HTMLElement;
}

export function pressKey(key: string): void {
    document.dispatchEvent(new KeyboardEvent('keydown', { key, bubbles: true }));
}

export function flush(): Promise<void> {
    return new Promise((resolve) => setTimeout(resolve, 0));
}
