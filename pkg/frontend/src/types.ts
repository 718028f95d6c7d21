// Request/response payloads of the curation API. These mirror the server's
// JSON exactly; the UI never derives labels or counts on its own.

export type StanceLabel = 'FAVOR' | 'AGAINST' | 'NONE';

export interface Distribution {
    counts: Record<StanceLabel, number>;
    total: number;
}

export interface StateSummary {
    version: number;
    tweets: number;
    authors: number;
    manual_labels: number;
    accepted_hashtags: string[];
    accepted_topics: Record<string, number[]>;
    topic_model_languages: string[];
}

export interface UserCard {
    author_id: string;
    tweet_count: number;
    retweeted_by_count: number;
    sample: string[];
    label: StanceLabel | null;
}

export interface LabelResponse {
    author_id: string;
    label: StanceLabel;
    state_version: number;
    propagation_preview: Record<StanceLabel, number>;
    distribution: Distribution;
}

export interface HashtagRow {
    tag: string;
    count: number;
    accepted: boolean;
}

export interface HashtagSelectionResponse {
    state_version: number;
    lexicon: { hashtags: string[]; keywords: string[] };
    distribution: Distribution;
}

export interface TopicCard {
    topic: number;
    top_words: Array<[string, number]>;
    accepted: boolean;
}

export interface TopicsResponse {
    topics: Record<string, TopicCard[]>;
    preview: Record<StanceLabel, number>;
}

export interface TopicSelectionResponse {
    state_version: number;
    preview: Record<StanceLabel, number>;
}

export interface ApiError {
    code: number;
    message: string;
    details: string[];
}
