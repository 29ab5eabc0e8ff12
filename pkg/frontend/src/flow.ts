// The annotation task flow: one in-flight submission at a time, advance only
// on server acknowledgment, and the server is always the source of truth for
// which task comes next (so a page refresh resumes correctly).

import type { AnnotationApi } from './api.js';
import { ChipList, SuggestionIndex } from './labels.js';
import type { AnnotationTask, Progress } from './types.js';

export type FlowPhase = 'idle' | 'task' | 'done' | 'error';

export interface FlowState {
  phase: FlowPhase;
  task: AnnotationTask | null;
  progress: Progress;
  error: string | null;
}

export class SessionFlow {
  readonly chips = new ChipList();
  readonly suggestions = new SuggestionIndex();
  noObject = false;

  private sessionId: string | null = null;
  private state: FlowState = { phase: 'idle', task: null, progress: { done: 0, total: 0 }, error: null };
  private submitting = false;

  constructor(private readonly api: AnnotationApi) {}

  get current(): FlowState {
    return this.state;
  }

  async start(annotatorId: string, method = 'gradcam'): Promise<FlowState> {
    const session = await this.api.createSession(annotatorId, method);
    this.sessionId = session.session_id;
    return this.refresh();
  }

  /** Attach to an existing session (page reload); the next pending task comes from the server. */
  async resume(sessionId: string): Promise<FlowState> {
    this.sessionId = sessionId;
    return this.refresh();
  }

  get session(): string | null {
    return this.sessionId;
  }

  async refresh(): Promise<FlowState> {
    if (!this.sessionId) throw new Error('no session started');
    const next = await this.api.nextTask(this.sessionId);
    if (next.done) {
      this.state = { phase: 'done', task: null, progress: next.progress, error: null };
    } else {
      const { done: _done, progress, ...task } = next;
      this.state = { phase: 'task', task: task as AnnotationTask, progress, error: null };
    }
    return this.state;
  }

  get canSubmit(): boolean {
    return this.state.phase === 'task' && !this.submitting && (this.chips.size > 0 || this.noObject);
  }

  /**
   * Submit the chip list for the current task and advance.
   *
   * Exactly the visible chips are sent (set semantics enforced by ChipList).
   * On success the chips clear and feed the autocomplete vocabulary; on a
   * conflict (task already done elsewhere) we advance without creating a
   * duplicate record; on a network failure the chips stay untouched so the
   * submission can be retried.
   */
  async submitAndAdvance(): Promise<FlowState> {
    const { task } = this.state;
    if (!this.sessionId || !task) throw new Error('no active task');
    if (this.submitting) throw new Error('a submission is already in flight');
    if (this.chips.size === 0 && !this.noObject) {
      throw new Error('enter at least one label, or tick "no identifiable object"');
    }

    this.submitting = true;
    try {
      const result = await this.api.submit(this.sessionId, task.task_id, this.chips.values(), this.noObject);
      if (result.status === 'invalid') {
        this.state = { ...this.state, error: result.detail };
        return this.state;
      }
      if (result.status === 'submitted') {
        this.suggestions.addAll(result.record.labels);
      }
      // 'submitted' and 'conflict' both advance; the record (if any) is safe.
      this.chips.clear();
      this.noObject = false;
      return await this.refresh();
    } finally {
      this.submitting = false;
    }
  }
}
