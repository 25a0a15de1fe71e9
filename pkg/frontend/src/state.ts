// Pure view state and transitions. No DOM, no fetch: everything here is
// directly unit-testable, and main.ts is a thin shell around it.

import type { Challenge, ReviewData, Stats, TriState } from './api.js';

export type Phase = 'idle' | 'loading' | 'loaded' | 'bridge-error';

export interface FormState {
  identity: TriState | null;
  hashMatch: TriState | null;
  authentic: TriState | null;
  comment: string;
  challenge: Challenge;
  challengeAnswer: string;
  submitting: boolean;
  notice: { kind: 'success' | 'error'; text: string } | null;
}

export interface AppState {
  address: string;
  phase: Phase;
  review: ReviewData | null;
  bridgeError: string | null;
  form: FormState;
}

export function initialState(): AppState {
  return {
    address: '',
    phase: 'idle',
    review: null,
    bridgeError: null,
    form: emptyForm({ challenge_id: '', puzzle: '' }),
  };
}

function emptyForm(challenge: Challenge): FormState {
  return {
    identity: null,
    hashMatch: null,
    authentic: null,
    comment: '',
    challenge,
    challengeAnswer: '',
    submitting: false,
    notice: null,
  };
}

export function loading(state: AppState, address: string): AppState {
  return { ...state, address, phase: 'loading', bridgeError: null };
}

export function reviewLoaded(state: AppState, review: ReviewData): AppState {
  return {
    ...state,
    phase: 'loaded',
    review,
    bridgeError: null,
    form: emptyForm(review.challenge),
  };
}

export function bridgeFailed(state: AppState, message: string): AppState {
  return { ...state, phase: 'bridge-error', bridgeError: message, review: null };
}

export function setAnswer(
  state: AppState,
  question: 'identity' | 'hashMatch' | 'authentic',
  value: TriState,
): AppState {
  return { ...state, form: { ...state.form, [question]: value, notice: null } };
}

export function setComment(state: AppState, comment: string): AppState {
  return { ...state, form: { ...state.form, comment } };
}

export function setChallengeAnswer(state: AppState, answer: string): AppState {
  return { ...state, form: { ...state.form, challengeAnswer: answer } };
}

export function submitStarted(state: AppState): AppState {
  return { ...state, form: { ...state.form, submitting: true, notice: null } };
}

export function submitSucceeded(state: AppState, stats: Stats): AppState {
  if (!state.review) return state;
  // Optimistic stats refresh; the follow-up review reload replaces the rest.
  const review = { ...state.review, stats };
  return {
    ...state,
    review,
    form: {
      ...emptyForm(state.form.challenge),
      notice: { kind: 'success', text: 'Rating stored. Thank you for verifying.' },
    },
  };
}

export function submitFailed(
  state: AppState,
  detail: string,
  freshChallenge: Challenge | null,
): AppState {
  // Server rejection: show it verbatim, keep every answer the user chose.
  return {
    ...state,
    form: {
      ...state.form,
      submitting: false,
      challenge: freshChallenge ?? state.form.challenge,
      challengeAnswer: freshChallenge ? '' : state.form.challengeAnswer,
      notice: { kind: 'error', text: detail },
    },
  };
}

// The form is blocked entirely when the lookup is inconsistent or empty; the
// submit button additionally waits for all three answers and the challenge.
export function formBlocked(review: ReviewData | null): boolean {
  if (!review || !review.found) return true;
  return review.discrepancies.length > 0;
}

export function allAnswered(form: FormState): boolean {
  return form.identity !== null && form.hashMatch !== null && form.authentic !== null;
}

export function canSubmit(state: AppState): boolean {
  return (
    !formBlocked(state.review) &&
    allAnswered(state.form) &&
    state.form.challengeAnswer.trim().length > 0 &&
    !state.form.submitting
  );
}

export function betaRatioLabel(review: ReviewData): string {
  return review.beta_ratio === null ? 'n/a (no ratings)' : review.beta_ratio;
}
