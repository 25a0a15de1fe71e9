// DOM shell: owns the root element, delegates everything else to the pure
// state/render modules and the bridge API client.

import { BridgeApi, BridgeUnreachable, SubmitRejected, TriState } from './api.js';
import { renderApp } from './render.js';
import {
  AppState,
  bridgeFailed,
  canSubmit,
  initialState,
  loading,
  reviewLoaded,
  setAnswer,
  setChallengeAnswer,
  setComment,
  submitFailed,
  submitStarted,
  submitSucceeded,
} from './state.js';

const api = new BridgeApi('');
let state: AppState = initialState();
const root = document.getElementById('app') as HTMLElement;

function update(next: AppState): void {
  state = next;
  root.innerHTML = renderApp(state);
  wire();
}

async function loadReview(address: string): Promise<void> {
  update(loading(state, address));
  try {
    const review = await api.loadReview(address);
    update(reviewLoaded(state, review));
  } catch (err) {
    if (err instanceof BridgeUnreachable) {
      update(bridgeFailed(state, err.message));
    } else {
      update(bridgeFailed(state, String(err)));
    }
  }
}

async function submit(): Promise<void> {
  if (!canSubmit(state) || !state.review) return;
  const form = state.form;
  update(submitStarted(state));
  try {
    const result = await api.submitRating({
      address: state.review.address,
      identity: form.identity as TriState,
      hash_match: form.hashMatch as TriState,
      authentic: form.authentic as TriState,
      comment: form.comment,
      challenge_id: form.challenge.challenge_id,
      challenge_answer: form.challengeAnswer,
    });
    update(submitSucceeded(state, result.stats));
    await loadReview(state.address);
  } catch (err) {
    if (err instanceof SubmitRejected) {
      update(submitFailed(state, err.detail, err.freshChallenge));
    } else {
      update(bridgeFailed(state, String(err)));
    }
  }
}

function wire(): void {
  const search = document.getElementById('search-form') as HTMLFormElement | null;
  search?.addEventListener('submit', (event) => {
    event.preventDefault();
    const input = document.getElementById('address-input') as HTMLInputElement;
    if (input.value.trim()) void loadReview(input.value.trim());
  });

  const rateForm = document.getElementById('rate-form') as HTMLFormElement | null;
  if (rateForm) {
    rateForm.addEventListener('submit', (event) => {
      event.preventDefault();
      void submit();
    });
    for (const field of ['identity', 'hashMatch', 'authentic'] as const) {
      for (const radio of rateForm.querySelectorAll<HTMLInputElement>(`input[name="${field}"]`)) {
        radio.addEventListener('change', () => {
          update(setAnswer(state, field, radio.value as TriState));
        });
      }
    }
    const comment = rateForm.querySelector<HTMLTextAreaElement>('textarea[name="comment"]');
    comment?.addEventListener('input', () => {
      state = setComment(state, comment.value); // no re-render while typing
    });
    const answer = rateForm.querySelector<HTMLInputElement>('input[name="challenge-answer"]');
    answer?.addEventListener('input', () => {
      state = setChallengeAnswer(state, answer.value);
      const button = rateForm.querySelector<HTMLButtonElement>('button[type="submit"]');
      if (button) button.disabled = !canSubmit(state);
    });
  }

  wireFilePicker();
}

// content-hash attestments: the owner's card names a SHA-256 digest; the
// locally supplied file plays only when its digest matches.
function wireFilePicker(): void {
  const picker = document.getElementById('attestment-file') as HTMLInputElement | null;
  if (!picker) return;
  picker.addEventListener('change', async () => {
    const status = document.getElementById('attestment-file-status') as HTMLElement;
    const player = document.getElementById('attestment-local-player') as HTMLVideoElement;
    const file = picker.files?.[0];
    const expected = state.review?.attestment?.value;
    if (!file || !expected) return;
    status.textContent = 'Hashing…';
    const digestBuffer = await crypto.subtle.digest('SHA-256', await file.arrayBuffer());
    const digest = Array.from(new Uint8Array(digestBuffer))
      .map((b) => b.toString(16).padStart(2, '0'))
      .join('');
    if (digest === expected) {
      status.textContent = 'Digest matches the identity card.';
      player.src = URL.createObjectURL(file);
      player.hidden = false;
    } else {
      status.textContent = `Digest mismatch: this is not the attested file (got ${digest.slice(0, 16)}…).`;
      player.hidden = true;
      player.removeAttribute('src');
    }
  });
}

update(state);
const params = new URLSearchParams(window.location.search);
const preset = params.get('address');
if (preset) void loadReview(preset);
