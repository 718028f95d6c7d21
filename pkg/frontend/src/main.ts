import { Api } from './api.js';
import { createApp } from './app.js';

// Served by the core service under /ui; the API lives on the same origin.
window.addEventListener('DOMContentLoaded', () => {
    const root = document.getElementById('app');
    if (!root) throw new Error('missing #app container');
    void createApp(root, new Api());
});
