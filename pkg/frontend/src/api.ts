// Typed client for the backend HTTP API. Every state change in the UI goes
// through these calls; there are no hidden endpoints.

import type {
  CourseConfig,
  CourseSummary,
  DocumentInfo,
  FollowUpCourseStats,
  Mode,
  TurnResult,
  UsageReport,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    detail: string,
  ) {
    super(detail);
  }
}

export class ApiClient {
  constructor(
    public baseUrl = '',
    public user = 'anonymous',
    public role: 'student' | 'educator' = 'student',
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: {
        'Content-Type': 'application/json',
        'X-User': this.user,
        'X-Role': this.role,
      },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const data = text ? JSON.parse(text) : {};
    if (!response.ok) {
      throw new ApiError(response.status, data?.error ?? 'error', data?.detail ?? response.statusText);
    }
    return data as T;
  }

  async listCourses(): Promise<CourseSummary[]> {
    const data = await this.request<{ courses: CourseSummary[] }>('GET', '/courses');
    return data.courses;
  }

  getCourse(courseId: string): Promise<CourseConfig> {
    return this.request('GET', `/courses/${courseId}`);
  }

  putConfig(courseId: string, config: Partial<CourseConfig>): Promise<CourseConfig> {
    return this.request('PUT', `/courses/${courseId}/config`, config);
  }

  async listDocuments(courseId: string): Promise<DocumentInfo[]> {
    const data = await this.request<{ documents: DocumentInfo[] }>(
      'GET',
      `/courses/${courseId}/documents`,
    );
    return data.documents;
  }

  uploadDocument(
    courseId: string,
    doc: { title: string; kind: string; text: string },
  ): Promise<{ document_id: string }> {
    return this.request('POST', `/courses/${courseId}/documents`, doc);
  }

  async startConversation(courseId: string, mode: Mode): Promise<string> {
    const data = await this.request<{ conversation_id: string }>(
      'POST',
      `/courses/${courseId}/conversations`,
      { user_ref: this.user, mode },
    );
    return data.conversation_id;
  }

  postMessage(
    conversationId: string,
    text: string,
    selectedDocuments: string[],
    explicitMode: Mode | null,
  ): Promise<TurnResult> {
    return this.request('POST', `/conversations/${conversationId}/messages`, {
      text,
      selected_documents: selectedDocuments,
      explicit_mode: explicitMode,
    });
  }

  setShared(conversationId: string, shared: boolean): Promise<{ shared: boolean }> {
    return this.request('POST', `/conversations/${conversationId}/share`, { shared });
  }

  getUsageReport(
    courseId: string,
    params: { semester_start?: string; tz_offset?: number; developers?: boolean } = {},
  ): Promise<UsageReport> {
    const query = new URLSearchParams();
    if (params.semester_start) query.set('semester_start', params.semester_start);
    if (params.tz_offset !== undefined) query.set('tz_offset', String(params.tz_offset));
    if (params.developers) query.set('developers', 'true');
    const suffix = query.toString() ? `?${query}` : '';
    return this.request('GET', `/courses/${courseId}/analytics/usage${suffix}`);
  }

  getFollowUpReport(courseId: string): Promise<Record<string, FollowUpCourseStats>> {
    return this.request('GET', `/courses/${courseId}/analytics/follow_up`);
  }
}
