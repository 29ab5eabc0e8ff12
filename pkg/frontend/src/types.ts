// Payload shapes of the annotation service API.

export type Polarity = 'high' | 'low';

export interface SessionInfo {
  session_id: string;
  annotator_id: string;
  total: number;
  done: number;
}

export interface AnnotationTask {
  task_id: string;
  image_id: string;
  attribute: string;
  polarity: Polarity;
  method: string;
  sign: 'positive' | 'negative';
  overlay_url: string;
  original_url: string;
  status: 'pending' | 'done';
}

export interface Progress {
  done: number;
  total: number;
}

export type NextTaskResponse =
  | ({ done: false; progress: Progress } & AnnotationTask)
  | { done: true; progress: Progress };

export interface AnnotationRecord {
  task_id: string;
  image_id: string;
  attribute: string;
  polarity: Polarity;
  model: string;
  annotator_id: string;
  labels: string[];
  timestamp: string;
}

export interface TallyRow {
  object: string;
  count: number;
}

export interface TallyTable {
  attribute: string;
  polarity: Polarity;
  model: string;
  rows: TallyRow[];
}

export interface TallyResponse {
  tables: TallyTable[];
}

export type SubmitResult =
  | { status: 'submitted'; record: AnnotationRecord }
  | { status: 'conflict' }
  | { status: 'invalid'; detail: string };
