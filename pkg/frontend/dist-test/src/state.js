// Pure view state and transitions. No DOM, no fetch: everything here is
// directly unit-testable, and main.ts is a thin shell around it.
export function initialState() {
    return {
        address: '',
        phase: 'idle',
        review: null,
        bridgeError: null,
        form: emptyForm({ challenge_id: '', puzzle: '' }),
    };
}
function emptyForm(challenge) {
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
export function loading(state, address) {
    return { ...state, address, phase: 'loading', bridgeError: null };
}
export function reviewLoaded(state, review) {
    return {
        ...state,
        phase: 'loaded',
        review,
        bridgeError: null,
        form: emptyForm(review.challenge),
    };
}
export function bridgeFailed(state, message) {
    return { ...state, phase: 'bridge-error', bridgeError: message, review: null };
}
export function setAnswer(state, question, value) {
    return { ...state, form: { ...state.form, [question]: value, notice: null } };
}
export function setComment(state, comment) {
    return { ...state, form: { ...state.form, comment } };
}
export function setChallengeAnswer(state, answer) {
    return { ...state, form: { ...state.form, challengeAnswer: answer } };
}
export function submitStarted(state) {
    return { ...state, form: { ...state.form, submitting: true, notice: null } };
}
export function submitSucceeded(state, stats) {
    if (!state.review)
        return state;
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
export function submitFailed(state, detail, freshChallenge) {
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
export function formBlocked(review) {
    if (!review || !review.found)
        return true;
    return review.discrepancies.length > 0;
}
export function allAnswered(form) {
    return form.identity !== null && form.hashMatch !== null && form.authentic !== null;
}
export function canSubmit(state) {
    return (!formBlocked(state.review) &&
        allAnswered(state.form) &&
        state.form.challengeAnswer.trim().length > 0 &&
        !state.form.submitting);
}
export function betaRatioLabel(review) {
    return review.beta_ratio === null ? 'n/a (no ratings)' : review.beta_ratio;
}
