/** Loads the shared story fixtures produced by the pipeline. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { StoryDocument } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));
const fixturesDir = join(here, "..", "..", "fixtures");

export function loadGoldenStory(): StoryDocument {
  return JSON.parse(readFileSync(join(fixturesDir, "golden", "homeschooling_story.json"), "utf-8"));
}

export function loadTiktokStory(): StoryDocument {
  return JSON.parse(readFileSync(join(fixturesDir, "tiktok_story.json"), "utf-8"));
}
