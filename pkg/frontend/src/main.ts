/** Browser bootstrap: mount the app on #app against the same-origin proxy. */

import { ApiClient } from './api.js';
import { App } from './app.js';

const root = document.querySelector<HTMLElement>('#app');
if (root) {
  const stored = window.localStorage.getItem('morpes.user');
  const userId = stored ?? `guest-${Math.random().toString(36).slice(2, 10)}`;
  window.localStorage.setItem('morpes.user', userId);
  new App({
    root,
    api: new ApiClient({ baseUrl: '' }),
    userId,
  });
}
