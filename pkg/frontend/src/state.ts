/**
 * Pure projections of server responses into what the screens render.
 *
 * Nothing here talks to the network or the DOM; every function maps an
 * API payload (plus at most a cursor) to display data, so a refresh that
 * refetches the queue reconstructs the exact same view.
 */
import type {
  AdjudicatorTask,
  AgreementReport,
  AnnotatorQueue,
  AnnotatorTask,
  Verdict,
  VerdictAck,
} from "./api.js";

export function verdictLabel(verdict: Verdict | null): string {
  if (verdict === 1) return "supported";
  if (verdict === 0) return "unsupported";
  return "—";
}

export interface Progress {
  done: number;
  total: number;
  /** 0..1; a queue with no tasks counts as finished */
  fraction: number;
}

export function progress(queue: AnnotatorQueue): Progress {
  const done = queue.total - queue.remaining;
  return {
    done,
    total: queue.total,
    fraction: queue.total === 0 ? 1 : done / queue.total,
  };
}

/** Tasks still awaiting this annotator's verdict, in server order. */
export function pendingTasks(queue: AnnotatorQueue): AnnotatorTask[] {
  return queue.tasks.filter((t) => t.my_verdict === null);
}

export function nextTask(queue: AnnotatorQueue): AnnotatorTask | null {
  const pending = pendingTasks(queue);
  return pending.length > 0 ? pending[0] : null;
}

/**
 * Fold a verdict acknowledgment into the queue. The ack is the server's
 * word, so the projection mirrors it: mark the task, recount progress.
 * Unknown task ids and repeated acks leave the queue unchanged.
 */
export function applyAck(queue: AnnotatorQueue, ack: VerdictAck): AnnotatorQueue {
  const tasks = queue.tasks.map((t) =>
    t.id === ack.task_id ? { ...t, my_verdict: ack.my_verdict } : t,
  );
  const remaining = tasks.filter((t) => t.my_verdict === null).length;
  return { ...queue, tasks, remaining, done: remaining === 0 };
}

export interface Disagreement {
  supported: string[];
  unsupported: string[];
}

/** Who said what, for the adjudicator's breakdown panel. */
export function disagreement(task: AdjudicatorTask): Disagreement {
  const supported: string[] = [];
  const unsupported: string[] = [];
  for (const name of Object.keys(task.verdicts).sort()) {
    (task.verdicts[name] === 1 ? supported : unsupported).push(name);
  }
  return { supported, unsupported };
}

export interface ReportRow {
  pipeline: string;
  n: number;
  kappa: string;
  labelAccuracy: string;
  annotatorAccuracy: string;
  adjudicated: number;
}

const pct = (x: number) => `${(100 * x).toFixed(1)}%`;

/** Report payload -> table rows, pipelines in alphabetical order. */
export function reportRows(report: AgreementReport): ReportRow[] {
  return Object.keys(report.pipelines)
    .sort()
    .map((pipeline) => {
      const entry = report.pipelines[pipeline];
      return {
        pipeline,
        n: entry.n,
        kappa: entry.kappa.toFixed(3),
        labelAccuracy: pct(entry.synthetic_label_accuracy),
        annotatorAccuracy: pct(entry.annotator_accuracy_mean),
        adjudicated: entry.adjudicated,
      };
    });
}
