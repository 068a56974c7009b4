// Entry point: hash routing between the course list, student chat, and the
// educator console. Served statically (e.g. at /ui/) next to the API.

import { ApiClient } from './api.js';
import { ChatView } from './chat.js';
import { DashboardView } from './dashboard.js';
import { clear, el } from './dom.js';

function userRef(): string {
  let ref = localStorage.getItem('courseaide-user');
  if (!ref) {
    ref = `web-${Math.random().toString(36).slice(2, 10)}`;
    localStorage.setItem('courseaide-user', ref);
  }
  return ref;
}

async function route(root: HTMLElement): Promise<void> {
  const hash = window.location.hash.replace(/^#\/?/, '');
  const [courseId, page] = hash.split('/');
  clear(root);

  if (!courseId) {
    const api = new ApiClient('', userRef());
    const courses = await api.listCourses();
    root.append(el('h1', { text: 'Courses' }));
    for (const course of courses) {
      root.append(
        el('div', { class: 'course-row' }, [
          el('a', { href: `#/${course.course_id}/chat`, text: `${course.name || course.course_id}: chat` }),
          ' · ',
          el('a', { href: `#/${course.course_id}/dashboard`, text: 'educator console' }),
        ]),
      );
    }
    return;
  }

  if (page === 'dashboard') {
    const api = new ApiClient('', userRef(), 'educator');
    await new DashboardView(root, api, courseId).init();
  } else {
    const api = new ApiClient('', userRef());
    await new ChatView(root, api, courseId).init();
  }
}

const root = document.getElementById('app');
if (root) {
  window.addEventListener('hashchange', () => void route(root));
  void route(root);
}
