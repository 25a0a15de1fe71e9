// DOM shell: owns the root element, delegates everything else to the pure
// state/render modules and the bridge API client.
import { BridgeApi, BridgeUnreachable, SubmitRejected } from './api.js';
import { renderApp } from './render.js';
import { bridgeFailed, canSubmit, initialState, loading, reviewLoaded, setAnswer, setChallengeAnswer, setComment, submitFailed, submitStarted, submitSucceeded, } from './state.js';
const api = new BridgeApi('');
let state = initialState();
const root = document.getElementById('app');
function update(next) {
    state = next;
    root.innerHTML = renderApp(state);
    wire();
}
async function loadReview(address) {
    update(loading(state, address));
    try {
        const review = await api.loadReview(address);
        update(reviewLoaded(state, review));
    }
    catch (err) {
        if (err instanceof BridgeUnreachable) {
            update(bridgeFailed(state, err.message));
        }
        else {
            update(bridgeFailed(state, String(err)));
        }
    }
}
async function submit() {
    if (!canSubmit(state) || !state.review)
        return;
    const form = state.form;
    update(submitStarted(state));
    try {
        const result = await api.submitRating({
            address: state.review.address,
            identity: form.identity,
            hash_match: form.hashMatch,
            authentic: form.authentic,
            comment: form.comment,
            challenge_id: form.challenge.challenge_id,
            challenge_answer: form.challengeAnswer,
        });
        update(submitSucceeded(state, result.stats));
        await loadReview(state.address);
    }
    catch (err) {
        if (err instanceof SubmitRejected) {
            update(submitFailed(state, err.detail, err.freshChallenge));
        }
        else {
            update(bridgeFailed(state, String(err)));
        }
    }
}
function wire() {
    const search = document.getElementById('search-form');
    search?.addEventListener('submit', (event) => {
        event.preventDefault();
        const input = document.getElementById('address-input');
        if (input.value.trim())
            void loadReview(input.value.trim());
    });
    const rateForm = document.getElementById('rate-form');
    if (rateForm) {
        rateForm.addEventListener('submit', (event) => {
            event.preventDefault();
            void submit();
        });
        for (const field of ['identity', 'hashMatch', 'authentic']) {
            for (const radio of rateForm.querySelectorAll(`input[name="${field}"]`)) {
                radio.addEventListener('change', () => {
                    update(setAnswer(state, field, radio.value));
                });
            }
        }
        const comment = rateForm.querySelector('textarea[name="comment"]');
        comment?.addEventListener('input', () => {
            state = setComment(state, comment.value); // no re-render while typing
        });
        const answer = rateForm.querySelector('input[name="challenge-answer"]');
        answer?.addEventListener('input', () => {
            state = setChallengeAnswer(state, answer.value);
            const button = rateForm.querySelector('button[type="submit"]');
            if (button)
                button.disabled = !canSubmit(state);
        });
    }
    wireFilePicker();
}
// content-hash attestments: the owner's card names a SHA-256 digest; the
// locally supplied file plays only when its digest matches.
function wireFilePicker() {
    const picker = document.getElementById('attestment-file');
    if (!picker)
        return;
    picker.addEventListener('change', async () => {
        const status = document.getElementById('attestment-file-status');
        const player = document.getElementById('attestment-local-player');
        const file = picker.files?.[0];
        const expected = state.review?.attestment?.value;
        if (!file || !expected)
            return;
        status.textContent = 'Hashing…';
        const digestBuffer = await crypto.subtle.digest('SHA-256', await file.arrayBuffer());
        const digest = Array.from(new Uint8Array(digestBuffer))
            .map((b) => b.toString(16).padStart(2, '0'))
            .join('');
        if (digest === expected) {
            status.textContent = 'Digest matches the identity card.';
            player.src = URL.createObjectURL(file);
            player.hidden = false;
        }
        else {
            status.textContent = `Digest mismatch: this is not the attested file (got ${digest.slice(0, 16)}…).`;
            player.hidden = true;
            player.removeAttribute('src');
        }
    });
}
update(state);
const params = new URLSearchParams(window.location.search);
const preset = params.get('address');
if (preset)
    void loadReview(preset);
