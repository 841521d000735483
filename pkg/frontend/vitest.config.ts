import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    // server-backed tests spawn the real REST service, so give the
    // hooks room to boot it
    testTimeout: 30_000,
    hookTimeout: 30_000,
    environment: "node",
  },
});
