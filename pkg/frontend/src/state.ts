import type { ActionSet } from "./adaptation.js";
import type { QuestionPayload } from "./api.js";

export type Screen = "auth" | "play" | "review" | "settings" | "progress";

// What the shell tracks between renders. The countdown never exceeds the
// 10-second question budget, and the page always reflects lastActions.
export interface ViewState {
  token: string | null;
  screen: Screen;
  activeQuestion: QuestionPayload | null;
  countdownMs: number;
  lastActions: ActionSet;
}

export function initialViewState(): ViewState {
  return {
    token: null,
    screen: "auth",
    activeQuestion: null,
    countdownMs: 0,
    lastActions: {},
  };
}
