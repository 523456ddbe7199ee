// The play screen: fetch a question, run the 10-second countdown, submit on
// answer or expiry, surface unit completions and level-up offers.

import type { AnswerResponse, NextResponse, QuestionPayload } from "./api.js";
import { SessionExpired } from "./api.js";
import { Countdown } from "./countdown.js";

export const QUESTION_BUDGET_MS = 10_000;

export interface PlayApi {
  next(mode: "standard" | "review"): Promise<NextResponse | null>;
  answer(questionId: string, answer: number | null, elapsedMs: number): Promise<AnswerResponse>;
}

export interface PlayElements {
  questionText: HTMLElement;
  countdownBar: HTMLProgressElement;
  countdownLabel: HTMLElement;
  answerInput: HTMLInputElement;
  outcome: HTMLElement;
  unitBanner: HTMLElement;
}

export interface PlayHooks {
  onAnswered(result: AnswerResponse): void;
  onLevelUpOffer(): void;
  onEmptyReview(): void;
  onSessionExpired(): void;
  onCountdown?(remainingMs: number): void;
}

export class PlayController {
  mode: "standard" | "review" = "standard";
  active: QuestionPayload | null = null;
  readonly countdown: Countdown;
  private submitting = false;

  constructor(
    private readonly api: PlayApi,
    private readonly el: PlayElements,
    private readonly hooks: PlayHooks,
    private readonly retryDelayMs = 1000,
    private readonly nextDelayMs = 800,
  ) {
    this.countdown = new Countdown(
      QUESTION_BUDGET_MS,
      (remaining) => this.renderCountdown(remaining),
      () => void this.submit(null),  // expiry: submit with no answer
    );
  }

  private renderCountdown(remainingMs: number): void {
    this.el.countdownBar.value = remainingMs;
    this.el.countdownLabel.textContent = `${(remainingMs / 1000).toFixed(1)} s`;
    this.hooks.onCountdown?.(remainingMs);
  }

  async start(mode: "standard" | "review"): Promise<void> {
    this.mode = mode;
    await this.fetchQuestion();
  }

  private async fetchQuestion(): Promise<void> {
    try {
      const next = await this.api.next(this.mode);
      if (next === null) {
        this.active = null;
        this.hooks.onEmptyReview();
        return;
      }
      this.active = next.question;
      this.el.questionText.textContent = `${next.question.text} = ?`;
      this.el.answerInput.value = "";
      this.el.outcome.textContent = "";
      this.countdown.start();
    } catch (error) {
      if (error instanceof SessionExpired) {
        this.hooks.onSessionExpired();
        return;
      }
      // network trouble: try again shortly, nothing is lost server-side
      setTimeout(() => void this.fetchQuestion(), this.retryDelayMs);
    }
  }

  async submitFromInput(): Promise<void> {
    const raw = this.el.answerInput.value.trim();
    const parsed = raw === "" ? null : Number.parseInt(raw, 10);
    await this.submit(Number.isNaN(parsed as number) ? null : parsed);
  }

  async submit(answer: number | null): Promise<void> {
    if (this.active === null || this.submitting) {
      return;
    }
    this.submitting = true;
    const question = this.active;
    const elapsed = QUESTION_BUDGET_MS - this.countdown.remainingMs;
    this.countdown.pause();
    try {
      const result = await this.api.answer(question.id, answer, elapsed);
      this.submitting = false;
      this.active = null;
      this.countdown.stop();
      this.showResult(result);
    } catch (error) {
      this.submitting = false;
      if (error instanceof SessionExpired) {
        this.hooks.onSessionExpired();
        return;
      }
      // paused countdown + retry: the server clock keeps running, ours stops
      setTimeout(() => void this.submit(answer), this.retryDelayMs);
    }
  }

  private showResult(result: AnswerResponse): void {
    const labels = {
      correct: "Correct!",
      incorrect: `Not quite — it was ${result.correct_answer}`,
      timeout: `Time! The answer was ${result.correct_answer}`,
    } as const;
    this.el.outcome.textContent = labels[result.outcome];
    this.el.outcome.dataset.outcome = result.outcome;
    if (result.unit_complete) {
      this.el.unitBanner.hidden = false;
      this.el.unitBanner.textContent =
        `Unit ${result.unit?.unit_index} done: ${result.unit_accuracy}% accuracy`;
    }
    this.hooks.onAnswered(result);
    if (result.unit_complete && result.level_up_eligible) {
      this.hooks.onLevelUpOffer();
      return; // the dialog decides when play resumes
    }
    setTimeout(() => void this.fetchQuestion(), this.nextDelayMs);
  }

  resumeAfterLevelChoice(): void {
    setTimeout(() => void this.fetchQuestion(), this.nextDelayMs);
  }

  leave(): void {
    this.countdown.stop();
    this.active = null;
  }
}
