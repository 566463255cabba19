import { createClient } from './api.js';
import { createApp } from './app.js';

const root = document.getElementById('app');
if (!root) throw new Error('missing #app mount point');

// same-origin by default; override with <meta name="gdpdesk-api" content="...">
const meta = document.querySelector<HTMLMetaElement>('meta[name="gdpdesk-api"]');
const app = createApp(root, createClient(meta?.content ?? ''));
void app.init();
