import type {
    Distribution,
    HashtagRow,
    HashtagSelectionResponse,
    LabelResponse,
    StanceLabel,
    StateSummary,
    TopicSelectionResponse,
    TopicsResponse,
    UserCard,
} from './types.js';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiRequestError extends Error {
    constructor(
        public readonly status: number,
        message: string,
        public readonly details: string[] = [],
    ) {
        super(message);
    }
}

async function parse<T>(response: Response): Promise<T> {
    if (!response.ok) {
        let message = `HTTP ${response.status}`;
        let details: string[] = [];
        try {
            const body = await response.json();
            message = body.message ?? message;
            details = body.details ?? [];
        } catch {
            // non-JSON error body: keep the status line
        }
        throw new ApiRequestError(response.status, message, details);
    }
    return (await response.json()) as T;
}

// Thin typed client. The fetch implementation is injectable so the test
// suite can replay recorded responses without the service running.
export class Api {
    constructor(
        private readonly base: string = '',
        private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
    ) {}

    private get<T>(path: string): Promise<T> {
        return this.fetchFn(this.base + path).then((r) => parse<T>(r));
    }

    private post<T>(path: string, body: unknown): Promise<T> {
        return this.fetchFn(this.base + path, {
            method: 'POST',
            headers: { 'content-type': 'application/json' },
            body: JSON.stringify(body),
        }).then((r) => parse<T>(r));
    }

    state(): Promise<StateSummary> {
        return this.get('/api/state');
    }

    users(limit = 50, offset = 0): Promise<{ users: UserCard[] }> {
        return this.get(`/api/users?limit=${limit}&offset=${offset}`);
    }

    labelUser(authorId: string, label: StanceLabel): Promise<LabelResponse> {
        return this.post(`/api/users/${encodeURIComponent(authorId)}/label`, { label });
    }

    hashtags(minFreq = 1): Promise<{ hashtags: HashtagRow[] }> {
        return this.get(`/api/hashtags?min_freq=${minFreq}`);
    }

    selectHashtags(accepted: string[]): Promise<HashtagSelectionResponse> {
        return this.post('/api/hashtags/selection', { accepted });
    }

    topics(): Promise<TopicsResponse> {
        return this.get('/api/topics');
    }

    selectTopics(language: string, accepted: number[], minShare: number): Promise<TopicSelectionResponse> {
        return this.post('/api/topics/selection', {
            language,
            accepted,
            min_share: minShare,
        });
    }

    distribution(): Promise<Distribution> {
        return this.get('/api/distribution');
    }
}
