// Task flow state: the six guided tasks in their fixed order, each with an
// upload status. The participant can only move past a task once it is
// uploaded or explicitly skipped, and Analyze unlocks after at least one
// upload.

import { TASK_ORDER, type TaskName } from './types';

export type TaskStatus = 'pending' | 'recorded' | 'uploaded' | 'failed' | 'skipped';

export const PANGRAM = 'the quick brown fox jumps over the lazy dog';

export const TASK_INSTRUCTIONS: Record<TaskName, { title: string; instruction: string }> = {
  speech: {
    title: 'Speech',
    instruction: `Read this sentence aloud at a comfortable pace: "${PANGRAM}"`,
  },
  face_disgust: {
    title: 'Expression: disgust',
    instruction: 'Mimic a DISGUST expression, hold it for a moment, then relax.',
  },
  face_smile: {
    title: 'Expression: smile',
    instruction: 'Mimic a SMILE, as big as you comfortably can, then relax.',
  },
  face_surprise: {
    title: 'Expression: surprise',
    instruction: 'Mimic a SURPRISE expression, then relax.',
  },
  motor_left: {
    title: 'Finger tapping: left hand',
    instruction:
      'Tap your LEFT thumb and index finger together as fast and as big as possible for 10 seconds.',
  },
  motor_right: {
    title: 'Finger tapping: right hand',
    instruction:
      'Tap your RIGHT thumb and index finger together as fast and as big as possible for 10 seconds.',
  },
};

export class TaskFlow {
  readonly tasks: TaskName[] = [...TASK_ORDER];
  private statuses = new Map<TaskName, TaskStatus>();
  private index = 0;

  constructor() {
    for (const task of this.tasks) this.statuses.set(task, 'pending');
  }

  get currentTask(): TaskName | null {
    return this.index < this.tasks.length ? this.tasks[this.index] : null;
  }

  status(task: TaskName): TaskStatus {
    return this.statuses.get(task) ?? 'pending';
  }

  setStatus(task: TaskName, status: TaskStatus): void {
    this.statuses.set(task, status);
  }

  /** Moving on requires the current task to be uploaded or skipped. */
  canAdvance(): boolean {
    const task = this.currentTask;
    if (task === null) return false;
    const status = this.status(task);
    return status === 'uploaded' || status === 'skipped';
  }

  advance(): TaskName | null {
    if (!this.canAdvance()) throw new Error('current task not finished');
    this.index += 1;
    return this.currentTask;
  }

  skip(): TaskName | null {
    const task = this.currentTask;
    if (task === null) return null;
    if (this.status(task) !== 'uploaded') this.setStatus(task, 'skipped');
    this.index += 1;
    return this.currentTask;
  }

  goTo(task: TaskName): void {
    const i = this.tasks.indexOf(task);
    if (i >= 0) this.index = i;
  }

  uploadedCount(): number {
    return this.tasks.filter((t) => this.status(t) === 'uploaded').length;
  }

  /** At least one task must be uploaded before analysis makes sense. */
  canAnalyze(): boolean {
    return this.uploadedCount() >= 1;
  }

  allDone(): boolean {
    return this.tasks.every((t) => {
      const s = this.status(t);
      return s === 'uploaded' || s === 'skipped';
    });
  }
}
