/// <reference types="vitest" />
import { defineConfig } from 'vite';

export default defineConfig({
  server: {
    port: 5173,
    // same-origin in dev: forward API calls to a locally running service
    proxy: {
      '/api': 'http://127.0.0.1:8710',
      '/healthz': 'http://127.0.0.1:8710',
    },
  },
  test: {
    environment: 'jsdom',
    include: ['tests/**/*.test.ts'],
  },
});
