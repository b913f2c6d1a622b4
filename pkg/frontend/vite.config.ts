import { defineConfig } from "vite";

// relative base so dist/ works both standalone and mounted by the service
export default defineConfig({
  base: "./",
});
