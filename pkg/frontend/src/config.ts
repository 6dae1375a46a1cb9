// Service endpoint resolution: build-time default, overridable per session
// via the settings field. Nothing persists beyond the browser session.

export const DEFAULT_BASE_URL = "http://127.0.0.1:8321";

const STORAGE_KEY = "triage-calculator.base-url";

export function getBaseUrl(): string {
  try {
    return sessionStorage.getItem(STORAGE_KEY) ?? DEFAULT_BASE_URL;
  } catch {
    return DEFAULT_BASE_URL;
  }
}

export function setBaseUrl(url: string): void {
  try {
    if (url && url !== DEFAULT_BASE_URL) {
      sessionStorage.setItem(STORAGE_KEY, url.replace(/\/+$/, ""));
    } else {
      sessionStorage.removeItem(STORAGE_KEY);
    }
  } catch {
    // session storage unavailable (private mode); fall back to in-memory default
  }
}
