import { describe, expect, it } from 'vitest';

import { PANGRAM, TASK_INSTRUCTIONS, TaskFlow } from '../src/taskflow';
import { TASK_ORDER } from '../src/types';

describe('TaskFlow', () => {
  it('presents the six tasks in the prescribed order', () => {
    const flow = new TaskFlow();
    expect(flow.tasks).toEqual([
      'speech',
      'face_disgust',
      'face_smile',
      'face_surprise',
      'motor_left',
      'motor_right',
    ]);
    expect(flow.currentTask).toBe('speech');
  });

  it('blocks advancing until the current task is uploaded or skipped', () => {
    const flow = new TaskFlow();
    expect(flow.canAdvance()).toBe(false);
    expect(() => flow.advance()).toThrow();

    flow.setStatus('speech', 'recorded');
    expect(flow.canAdvance()).toBe(false);

    flow.setStatus('speech', 'uploaded');
    expect(flow.canAdvance()).toBe(true);
    expect(flow.advance()).toBe('face_disgust');
  });

  it('skip moves on and marks the task skipped', () => {
    const flow = new TaskFlow();
    expect(flow.skip()).toBe('face_disgust');
    expect(flow.status('speech')).toBe('skipped');
  });

  it('analyze unlocks only after at least one upload', () => {
    const flow = new TaskFlow();
    for (const task of TASK_ORDER) {
      expect(flow.canAnalyze()).toBe(false);
      flow.goTo(task);
      flow.skip();
    }
    expect(flow.allDone()).toBe(true);
    expect(flow.canAnalyze()).toBe(false);

    const again = new TaskFlow();
    again.setStatus('speech', 'uploaded');
    expect(again.canAnalyze()).toBe(true);
  });

  it('failed uploads keep the gate closed', () => {
    const flow = new TaskFlow();
    flow.setStatus('speech', 'failed');
    expect(flow.canAdvance()).toBe(false);
    expect(flow.canAnalyze()).toBe(false);
  });

  it('shows the pangram verbatim in the speech instruction', () => {
    expect(PANGRAM).toBe('the quick brown fox jumps over the lazy dog');
    expect(TASK_INSTRUCTIONS.speech.instruction).toContain(PANGRAM);
  });

  it('face tasks name their target expression', () => {
    expect(TASK_INSTRUCTIONS.face_disgust.instruction.toLowerCase()).toContain('disgust');
    expect(TASK_INSTRUCTIONS.face_smile.instruction.toLowerCase()).toContain('smile');
    expect(TASK_INSTRUCTIONS.face_surprise.instruction.toLowerCase()).toContain('surprise');
  });

  it('motor tasks carry the speed-and-size instruction per hand', () => {
    for (const task of ['motor_left', 'motor_right'] as const) {
      expect(TASK_INSTRUCTIONS[task].instruction).toContain('as fast and as big as possible');
    }
    expect(TASK_INSTRUCTIONS.motor_left.instruction).toContain('LEFT');
    expect(TASK_INSTRUCTIONS.motor_right.instruction).toContain('RIGHT');
  });
});
