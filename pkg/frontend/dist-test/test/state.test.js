import assert from 'node:assert/strict';
import { test } from 'node:test';
import { allAnswered, canSubmit, formBlocked, initialState, loading, reviewLoaded, setAnswer, setChallengeAnswer, setComment, submitFailed, submitStarted, submitSucceeded, } from '../src/state.js';
import { forgedStatsFixture, notFoundFixture, reviewFixture } from './fixtures.js';
function loadedState(review = reviewFixture()) {
    return reviewLoaded(loading(initialState(), review.address), review);
}
test('loading a review resets the form and adopts the challenge', () => {
    const state = loadedState();
    assert.equal(state.phase, 'loaded');
    assert.equal(state.form.challenge.challenge_id, 'ch-1');
    assert.equal(state.form.identity, null);
    assert.equal(canSubmit(state), false);
});
test('submit stays disabled until all three questions are answered', () => {
    let state = loadedState();
    state = setChallengeAnswer(state, '5');
    state = setAnswer(state, 'identity', 'yes');
    state = setAnswer(state, 'hashMatch', 'yes');
    assert.equal(allAnswered(state.form), false);
    assert.equal(canSubmit(state), false);
    state = setAnswer(state, 'authentic', 'yes');
    assert.equal(allAnswered(state.form), true);
    assert.equal(canSubmit(state), true);
});
test('an empty challenge answer blocks submission', () => {
    let state = loadedState();
    state = setAnswer(state, 'identity', 'yes');
    state = setAnswer(state, 'hashMatch', 'no');
    state = setAnswer(state, 'authentic', 'unsure');
    assert.equal(canSubmit(state), false);
    state = setChallengeAnswer(state, '  ');
    assert.equal(canSubmit(state), false);
    state = setChallengeAnswer(state, '5');
    assert.equal(canSubmit(state), true);
});
test('discrepancies block the form entirely', () => {
    let state = loadedState(forgedStatsFixture());
    assert.equal(formBlocked(state.review), true);
    state = setAnswer(state, 'identity', 'yes');
    state = setAnswer(state, 'hashMatch', 'yes');
    state = setAnswer(state, 'authentic', 'yes');
    state = setChallengeAnswer(state, '5');
    assert.equal(canSubmit(state), false);
});
test('a not-found review blocks the form', () => {
    const state = loadedState(notFoundFixture('ghost@example.com'));
    assert.equal(formBlocked(state.review), true);
});
test('successful submission updates stats and clears the answers', () => {
    let state = loadedState();
    state = setAnswer(state, 'identity', 'yes');
    state = setAnswer(state, 'hashMatch', 'yes');
    state = setAnswer(state, 'authentic', 'yes');
    state = setChallengeAnswer(state, '5');
    state = submitStarted(state);
    state = submitSucceeded(state, { s1: 1, s2: 1, s3: 0, s4: 1, s5: 0, s6: 1, s7: 0 });
    assert.equal(state.review?.stats.s1, 1);
    assert.equal(state.form.identity, null);
    assert.equal(state.form.notice?.kind, 'success');
});
test('rejection preserves the answers and swaps in the fresh challenge', () => {
    let state = loadedState();
    state = setAnswer(state, 'identity', 'yes');
    state = setAnswer(state, 'hashMatch', 'unsure');
    state = setAnswer(state, 'authentic', 'yes');
    state = setComment(state, 'pretty sure');
    state = setChallengeAnswer(state, 'wrong');
    state = submitStarted(state);
    state = submitFailed(state, 'challenge missing, expired, or answered incorrectly', {
        challenge_id: 'ch-2',
        puzzle: 'What is 4 + 4?',
    });
    assert.equal(state.form.identity, 'yes');
    assert.equal(state.form.hashMatch, 'unsure');
    assert.equal(state.form.comment, 'pretty sure');
    assert.equal(state.form.challenge.challenge_id, 'ch-2');
    assert.equal(state.form.challengeAnswer, '');
    assert.equal(state.form.notice?.kind, 'error');
    assert.match(state.form.notice?.text ?? '', /challenge/);
});
