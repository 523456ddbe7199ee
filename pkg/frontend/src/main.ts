// Application shell: screens, auth, settings, progress, and the live
// adaptation refresh. All game rules live server-side; this file only moves
// data between the API and the DOM.

import { ApiClient, ApiError, SessionExpired } from "./api.js";
import {
  DEFAULT_PREFERENCES,
  Preferences,
  renderAdaptation,
} from "./adaptation.js";
import { effectiveOrientation, OrientationOverride } from "./orientation.js";
import { PlayController } from "./playloop.js";
import { initialViewState, Screen } from "./state.js";

const api = new ApiClient();
const state = initialViewState();
let preferences: Preferences = { ...DEFAULT_PREFERENCES };
let orientationOverride: OrientationOverride = "auto";

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) {
    throw new Error(`missing element #${id}`);
  }
  return found as T;
}

const app = el<HTMLElement>("app");
const weatherIcon = el<HTMLElement>("weather-icon");
const nav = el<HTMLElement>("nav");
const authError = el<HTMLParagraphElement>("auth-error");
const reviewBadge = el<HTMLSpanElement>("review-badge");
const emptyReview = el<HTMLParagraphElement>("empty-review");
const levelupDialog = el<HTMLDialogElement>("levelup-dialog");

const screens: Record<Screen, HTMLElement> = {
  auth: el("screen-auth"),
  play: el("screen-play"),
  review: el("screen-play"), // review reuses the play surface in review mode
  settings: el("screen-settings"),
  progress: el("screen-progress"),
};

const play = new PlayController(
  api,
  {
    questionText: el("question-text"),
    countdownBar: el<HTMLProgressElement>("countdown-bar"),
    countdownLabel: el("countdown-label"),
    answerInput: el<HTMLInputElement>("answer-input"),
    outcome: el("outcome"),
    unitBanner: el("unit-banner"),
  },
  {
    onAnswered(result) {
      reviewBadge.textContent = result.review_queue_size ? `(${result.review_queue_size})` : "";
      if (result.adaptation) {
        state.lastActions = result.adaptation;
        renderAdaptation(result.adaptation, preferences, app, weatherIcon);
      }
    },
    onLevelUpOffer() {
      levelupDialog.showModal();
    },
    onEmptyReview() {
      emptyReview.hidden = false;
    },
    onSessionExpired() {
      logout();
    },
    onCountdown(remainingMs) {
      state.countdownMs = remainingMs;
    },
  },
);

function showScreen(screen: Screen): void {
  play.leave();
  state.screen = screen;
  for (const [name, element] of Object.entries(screens)) {
    element.hidden = name !== screen && !(screen === "review" && name === "play");
  }
  screens[screen].hidden = false;
  nav.hidden = screen === "auth";
  emptyReview.hidden = true;
  if (screen === "play" || screen === "review") {
    el("play-mode-label").textContent =
      screen === "review" ? "Review mode: redo your misses" : `Standard mode`;
    void refreshAdaptation().then(() => play.start(screen === "review" ? "review" : "standard"));
  }
  if (screen === "progress") {
    void renderProgress();
  }
}

async function refreshAdaptation(): Promise<void> {
  const orientation = effectiveOrientation(
    orientationOverride, window.innerWidth, window.innerHeight);
  try {
    const body = await api.adaptation(orientation);
    preferences = body.preferences;
    state.lastActions = body.actions;
    renderAdaptation(body.actions, preferences, app, weatherIcon);
    syncSettingsForm();
  } catch (error) {
    if (error instanceof SessionExpired) {
      logout();
      return;
    }
    console.warn("adaptation fetch failed, keeping current styles", error);
  }
}

function syncSettingsForm(): void {
  el<HTMLInputElement>("pref-font").value = preferences.font_color.toLowerCase();
  el<HTMLInputElement>("pref-background").value = preferences.background_color.toLowerCase();
  el<HTMLInputElement>("pref-button-font").value = preferences.button_font_color.toLowerCase();
  el<HTMLInputElement>("pref-button-background").value =
    preferences.button_background_color.toLowerCase();
  el<HTMLInputElement>("pref-time-based").checked = preferences.time_based_background;
}

async function renderProgress(): Promise<void> {
  try {
    const body = await api.progress();
    const rows = body.levels
      .map((record) => {
        const units = record.units
          .map((u) => `<li>Unit ${u.unit_index}: ${u.complete ? `${u.accuracy}%` : "in progress"}</li>`)
          .join("");
        return `<h3>Level ${record.level} (${record.total_correct} correct)</h3><ul>${units}</ul>`;
      })
      .join("");
    el("progress-body").innerHTML = `
      <p>${body.username} — level ${body.current_level},
         ${body.review_queue_size} to review</p>${rows}`;
  } catch (error) {
    if (error instanceof SessionExpired) {
      logout();
    }
  }
}

function logout(): void {
  api.token = null;
  state.token = null;
  showScreen("auth");
}

async function authenticate(register: boolean): Promise<void> {
  const username = el<HTMLInputElement>("auth-username").value.trim();
  const password = el<HTMLInputElement>("auth-password").value;
  const age = Number.parseInt(el<HTMLInputElement>("auth-age").value, 10);
  authError.textContent = "";
  try {
    if (register) {
      await api.register(username, password, Number.isNaN(age) ? 0 : age);
    }
    await api.login(username, password);
    state.token = api.token;
    showScreen("play");
  } catch (error) {
    authError.textContent = error instanceof ApiError ? error.message : "network error";
  }
}

function wireEvents(): void {
  el<HTMLFormElement>("auth-form").addEventListener("submit", (event) => {
    event.preventDefault();
    void authenticate(false);
  });
  el<HTMLButtonElement>("register-button").addEventListener("click", () => {
    void authenticate(true);
  });

  nav.querySelectorAll<HTMLButtonElement>("button[data-screen]").forEach((button) => {
    button.addEventListener("click", () => showScreen(button.dataset.screen as Screen));
  });
  el<HTMLButtonElement>("logout").addEventListener("click", logout);

  const orientationToggle = el<HTMLButtonElement>("orientation-toggle");
  orientationToggle.addEventListener("click", () => {
    orientationOverride =
      orientationOverride === "auto" ? "portrait"
      : orientationOverride === "portrait" ? "landscape" : "auto";
    orientationToggle.textContent =
      orientationOverride === "auto" ? "Auto" : orientationOverride;
    void refreshAdaptation();
  });
  window.addEventListener("resize", () => {
    if (state.screen !== "auth" && orientationOverride === "auto") {
      void refreshAdaptation();
    }
  });

  el<HTMLFormElement>("answer-form").addEventListener("submit", (event) => {
    event.preventDefault();
    void play.submitFromInput();
  });

  el<HTMLButtonElement>("levelup-accept").addEventListener("click", () => {
    void api.levelChoice(true).finally(() => {
      levelupDialog.close();
      play.resumeAfterLevelChoice();
    });
  });
  el<HTMLButtonElement>("levelup-decline").addEventListener("click", () => {
    void api.levelChoice(false).finally(() => {
      levelupDialog.close();
      play.resumeAfterLevelChoice();
    });
  });

  el<HTMLFormElement>("settings-form").addEventListener("submit", (event) => {
    event.preventDefault();
    const next: Preferences = {
      font_color: el<HTMLInputElement>("pref-font").value.toUpperCase(),
      background_color: el<HTMLInputElement>("pref-background").value.toUpperCase(),
      button_font_color: el<HTMLInputElement>("pref-button-font").value.toUpperCase(),
      button_background_color: el<HTMLInputElement>("pref-button-background").value.toUpperCase(),
      time_based_background: el<HTMLInputElement>("pref-time-based").checked,
    };
    void api
      .saveSettings(next)
      .then(() => {
        preferences = next;
        el("settings-status").textContent = "Saved.";
        return refreshAdaptation();
      })
      .catch((error) => {
        el("settings-status").textContent =
          error instanceof ApiError ? error.message : "network error";
      });
  });
}

wireEvents();
showScreen("auth");
