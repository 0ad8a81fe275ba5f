/**
 * Bootstrap: resolve the API base URL and mount the app.
 *
 * Base URL resolution order: ?api= query parameter, then the
 * friendrec.apiBase localStorage key, then same-origin (the bundle being
 * served by the service's static passthrough).
 */

import { App } from './app.js';

function resolveBaseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get('api');
  if (fromQuery) {
    window.localStorage.setItem('friendrec.apiBase', fromQuery);
    return fromQuery;
  }
  return window.localStorage.getItem('friendrec.apiBase') ?? '';
}

const root = document.getElementById('app');
if (root) {
  const app = new App(root, resolveBaseUrl());
  void app.init();
}
