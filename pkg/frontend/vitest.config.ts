import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    environment: "node", // DOM-dependent files opt in via @vitest-environment
  },
});
