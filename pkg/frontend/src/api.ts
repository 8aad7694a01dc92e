/** REST client for the story service, plus 1s job polling. */

import type { Job, StoryDocument } from "./types.js";

const POLL_INTERVAL_MS = 1000;

async function checkOk(resp: Response): Promise<Response> {
  if (!resp.ok) {
    let detail = `${resp.status}`;
    try {
      const body = await resp.json();
      if (body && typeof body.error === "string") {
        detail = body.error;
      }
    } catch {
      // keep the status text
    }
    throw new Error(detail);
  }
  return resp;
}

export async function createStoryJob(query: string): Promise<string> {
  const resp = await checkOk(
    await fetch("/api/stories", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ query }),
    }),
  );
  const body = (await resp.json()) as { job_id: string };
  return body.job_id;
}

export async function getJob(jobId: string): Promise<Job> {
  const resp = await checkOk(await fetch(`/api/jobs/${jobId}`));
  return (await resp.json()) as Job;
}

export async function getStory(storyId: string): Promise<StoryDocument> {
  const resp = await checkOk(await fetch(`/api/stories/${storyId}`));
  return (await resp.json()) as StoryDocument;
}

/** Polls until the job terminates; resolves with the ready story. */
export function pollJob(jobId: string, onUpdate: (job: Job) => void): Promise<StoryDocument> {
  return new Promise((resolve, reject) => {
    const tick = async () => {
      let job: Job;
      try {
        job = await getJob(jobId);
      } catch (err) {
        reject(err);
        return;
      }
      onUpdate(job);
      if (job.state === "ready" && job.story_id) {
        resolve(await getStory(job.story_id));
        return;
      }
      if (job.state === "failed") {
        reject(new Error(job.error_detail ?? "story generation failed"));
        return;
      }
      setTimeout(tick, POLL_INTERVAL_MS);
    };
    void tick();
  });
}
