// Wire types mirroring the backend's documented JSON schemas.

export type Mode = 'general' | 'homework' | 'practice';

export interface CourseSummary {
  course_id: string;
  name: string;
  description: string;
}

export interface CourseConfig {
  course_id: string;
  name: string;
  description: string;
  audience_note: string;
  educator_rules: string[];
  time_guidance: { active_from: string; active_to: string; text: string }[];
  mode_instructions: Record<string, string>;
  follow_up_policy: 'never' | 'model_decides' | 'always';
  threshold_low: number;
  threshold_high: number;
  history_max_rounds: number;
  prompt_char_budget: number;
  tz_offset_hours: number;
}

export interface DocumentInfo {
  id: string;
  title: string;
  kind: 'lecture' | 'homework' | 'quiz' | 'exam' | 'other';
  uploaded_at: string;
  chunks: number;
}

export interface Segment {
  kind: string; // "text" | "code" | "diagram_placeholder" | forward-compatible
  content: string;
  language: string;
}

export interface Reference {
  document_id: string;
  title: string;
  chunk_id: string;
  link: string;
}

export interface StructuredResponse {
  segments: Segment[];
  references: Reference[];
  follow_up_question: string | null;
  disclaimer: string;
}

export interface TurnResult {
  conversation_id: string;
  message_id: string;
  mode: Mode;
  advisory_shown: boolean;
  rounds: number;
  response: StructuredResponse;
}

export interface DurationBuckets {
  edges: number[];
  counts: number[];
  cumulative: number[];
}

export interface CourseStats {
  users: number;
  conversations: number;
  conversations_per_user: number;
}

export interface UsageReport {
  empty: boolean;
  conversations: number;
  users: number;
  conversations_per_user: number;
  per_course: Record<string, CourseStats>;
  durations: DurationBuckets;
  within_10_min_ratio: number;
  rounds_histogram: Record<string, number>;
  within_3_rounds_ratio: number;
  no_question_ratio: number;
  single_round_ratio: number;
  mode_shares: Record<string, number>;
  rounds_by_mode: Record<string, Record<string, number>>;
  weekly_conversations: Record<string, number>;
  weekly_questions: Record<string, number>;
  hourly_conversations: number[];
  hourly_questions: number[];
  hourly_cdf: number[];
  follow_up_emitted_ratio: number;
  follow_up_answered_ratio: number | null;
  semester_start: string;
  tz_offset_hours: number;
}

export interface FollowUpCourseStats {
  conversations: number;
  emitted: number;
  answered: number;
  emitted_ratio: number;
  answered_ratio: number | null;
}
