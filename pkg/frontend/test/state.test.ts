import { describe, expect, it } from "vitest";

import type { AgreementReport, AnnotatorQueue } from "../src/api.js";
import {
  applyAck,
  disagreement,
  nextTask,
  pendingTasks,
  progress,
  reportRows,
  verdictLabel,
} from "../src/state.js";

function queueOf(verdicts: Array<0 | 1 | null>): AnnotatorQueue {
  const tasks = verdicts.map((v, i) => ({
    id: `t${i}`,
    document: `doc ${i}`,
    claim: `claim ${i}`,
    my_verdict: v,
  }));
  const remaining = tasks.filter((t) => t.my_verdict === null).length;
  return {
    role: "annotator",
    annotator: "ana",
    tasks,
    total: tasks.length,
    remaining,
    done: remaining === 0,
  };
}

describe("labels", () => {
  it("renders the three verdict states", () => {
    expect(verdictLabel(1)).toBe("supported");
    expect(verdictLabel(0)).toBe("unsupported");
    expect(verdictLabel(null)).toBe("—");
  });
});

describe("queue projections", () => {
  it("counts progress", () => {
    expect(progress(queueOf([1, null, 0, null]))).toEqual({
      done: 2,
      total: 4,
      fraction: 0.5,
    });
  });

  it("treats an empty queue as finished", () => {
    expect(progress(queueOf([])).fraction).toBe(1);
  });

  it("lists pending tasks in server order", () => {
    const pending = pendingTasks(queueOf([1, null, 0, null]));
    expect(pending.map((t) => t.id)).toEqual(["t1", "t3"]);
  });

  it("picks the first pending task as next", () => {
    expect(nextTask(queueOf([1, null, null]))?.id).toBe("t1");
    expect(nextTask(queueOf([1, 0]))).toBeNull();
  });
});

describe("applyAck", () => {
  it("marks the task and recounts", () => {
    const queue = queueOf([null, null]);
    const after = applyAck(queue, { ok: true, task_id: "t0", my_verdict: 1 });
    expect(after.tasks[0].my_verdict).toBe(1);
    expect(after.remaining).toBe(1);
    expect(after.done).toBe(false);
    // original untouched: projections are pure
    expect(queue.tasks[0].my_verdict).toBeNull();
  });

  it("completes the queue on the last ack", () => {
    const after = applyAck(queueOf([1, null]), {
      ok: true,
      task_id: "t1",
      my_verdict: 0,
    });
    expect(after.remaining).toBe(0);
    expect(after.done).toBe(true);
  });

  it("is idempotent and ignores unknown ids", () => {
    const queue = queueOf([1, null]);
    const again = applyAck(queue, { ok: true, task_id: "t0", my_verdict: 1 });
    expect(again.tasks).toEqual(queue.tasks);
    const unknown = applyAck(queue, { ok: true, task_id: "zz", my_verdict: 0 });
    expect(unknown.tasks).toEqual(queue.tasks);
    expect(unknown.remaining).toBe(1);
  });
});

describe("disagreement breakdown", () => {
  it("splits annotators by verdict, sorted by name", () => {
    const split = disagreement({
      id: "a7",
      document: "d",
      claim: "c",
      status: "adjudicating",
      verdicts: { cam: 0, ana: 1, bob: 1 },
      final: null,
    });
    expect(split.supported).toEqual(["ana", "bob"]);
    expect(split.unsupported).toEqual(["cam"]);
  });

  it("handles a one-sided (post-adjudication) spread", () => {
    const split = disagreement({
      id: "a1",
      document: "d",
      claim: "c",
      status: "resolved",
      verdicts: { ana: 1, bob: 1, cam: 1 },
      final: 1,
    });
    expect(split.supported).toEqual(["ana", "bob", "cam"]);
    expect(split.unsupported).toEqual([]);
  });
});

describe("report rows", () => {
  const report: AgreementReport = {
    n_tasks: 10,
    annotators: ["ana", "bob", "cam"],
    pipelines: {
      "D2C": {
        n: 5,
        kappa: 0.7012,
        synthetic_label_accuracy: 0.78,
        annotator_accuracy_mean: 0.8667,
        per_annotator_accuracy: { ana: 0.9, bob: 0.9, cam: 0.8 },
        adjudicated: 1,
      },
      "C2D": {
        n: 5,
        kappa: 0.51,
        synthetic_label_accuracy: 0.8,
        annotator_accuracy_mean: 0.9333,
        per_annotator_accuracy: { ana: 1.0, bob: 0.9, cam: 0.9 },
        adjudicated: 0,
      },
    },
  };

  it("orders pipelines alphabetically and formats the figures", () => {
    const rows = reportRows(report);
    expect(rows.map((r) => r.pipeline)).toEqual(["C2D", "D2C"]);
    expect(rows[0]).toEqual({
      pipeline: "C2D",
      n: 5,
      kappa: "0.510",
      labelAccuracy: "80.0%",
      annotatorAccuracy: "93.3%",
      adjudicated: 0,
    });
    expect(rows[1].kappa).toBe("0.701");
    expect(rows[1].labelAccuracy).toBe("78.0%");
  });
});
