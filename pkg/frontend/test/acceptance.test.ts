// Secondary acceptance flow against a faithful fake bridge:
//   1. load_review renders a registered card with the bridge-recomputed fingerprint
//   2. submitting (yes, yes, yes) increments the displayed S1
//   3. the forged-stats scenario shows the discrepancy banner and disables the form

import assert from 'node:assert/strict';
import { createServer, type Server } from 'node:http';
import { after, before, test } from 'node:test';

import { BridgeApi, SubmitRejected, type ReviewData, type Stats } from '../src/api.js';
import { renderApp } from '../src/render.js';
import {
  initialState,
  loading,
  reviewLoaded,
  setAnswer,
  setChallengeAnswer,
  submitSucceeded,
  submitFailed,
  type AppState,
} from '../src/state.js';
import { forgedStatsFixture, reviewFixture } from './fixtures.js';

// In-memory bridge double: one registered card, one challenge series, stats
// that move when a rating is accepted, plus a forged-stats address.
class FakeBridge {
  server: Server;
  url = '';
  private stats: Stats = { s1: 0, s2: 0, s3: 0, s4: 0, s5: 0, s6: 0, s7: 0 };
  private challengeCounter = 0;
  private validChallenges = new Map<string, string>();

  constructor() {
    this.server = createServer((req, res) => void this.handle(req, res));
  }

  private freshChallenge() {
    this.challengeCounter += 1;
    const id = `ch-${this.challengeCounter}`;
    const a = 2 + this.challengeCounter;
    this.validChallenges.set(id, String(a + 3));
    return { challenge_id: id, puzzle: `What is ${a} + 3?` };
  }

  private review(address: string): ReviewData {
    if (address === 'forged@example.com') {
      return { ...forgedStatsFixture(), address, challenge: this.freshChallenge() };
    }
    const ratio = this.stats.s1 === 0 ? null : `${this.stats.s2 - this.stats.s3}/${this.stats.s1}`;
    return reviewFixture({
      address,
      stats: { ...this.stats },
      beta_ratio: ratio,
      challenge: this.freshChallenge(),
    });
  }

  private async handle(req: import('node:http').IncomingMessage, res: import('node:http').ServerResponse) {
    const url = new URL(req.url ?? '/', 'http://localhost');
    const send = (status: number, body: unknown) => {
      const payload = JSON.stringify(body);
      res.writeHead(status, { 'Content-Type': 'application/json' });
      res.end(payload);
    };
    if (req.method === 'GET' && url.pathname === '/local/review') {
      send(200, this.review(url.searchParams.get('address') ?? ''));
      return;
    }
    if (req.method === 'POST' && url.pathname === '/local/rate') {
      const chunks: Buffer[] = [];
      for await (const chunk of req) chunks.push(chunk as Buffer);
      const body = JSON.parse(Buffer.concat(chunks).toString());
      if (body.address === 'forged@example.com') {
        send(409, { error: 'invalid_response', detail: 'current lookup has discrepancies; not rating' });
        return;
      }
      const expected = this.validChallenges.get(body.challenge_id);
      this.validChallenges.delete(body.challenge_id);
      if (expected === undefined || expected !== String(body.challenge_answer).trim()) {
        send(400, {
          error: 'bad_challenge',
          detail: 'challenge missing, expired, or answered incorrectly',
          challenge: this.freshChallenge(),
        });
        return;
      }
      const bump = (answer: string) => (answer === 'yes' ? 1 : 0);
      const drop = (answer: string) => (answer === 'no' ? 1 : 0);
      this.stats = {
        s1: this.stats.s1 + 1,
        s2: this.stats.s2 + bump(body.identity),
        s3: this.stats.s3 + drop(body.identity),
        s4: this.stats.s4 + bump(body.hash_match),
        s5: this.stats.s5 + drop(body.hash_match),
        s6: this.stats.s6 + bump(body.authentic),
        s7: this.stats.s7 + drop(body.authentic),
      };
      send(200, { accepted: true, stats: { ...this.stats } });
      return;
    }
    send(404, { error: 'not_found' });
  }

  listen(): Promise<void> {
    return new Promise((resolve) => {
      this.server.listen(0, '127.0.0.1', () => {
        const addr = this.server.address();
        if (addr && typeof addr === 'object') this.url = `http://127.0.0.1:${addr.port}`;
        resolve();
      });
    });
  }

  close(): Promise<void> {
    return new Promise((resolve) => this.server.close(() => resolve()));
  }
}

const bridge = new FakeBridge();
let api: BridgeApi;

before(async () => {
  await bridge.listen();
  api = new BridgeApi(bridge.url);
});

after(async () => {
  await bridge.close();
});

function solve(puzzle: string): string {
  const numbers = puzzle.match(/\d+/g)!.map(Number);
  return String(numbers[0]! + numbers[1]!);
}

async function loadedState(address: string): Promise<AppState> {
  const review = await api.loadReview(address);
  return reviewLoaded(loading(initialState(), address), review);
}

test('load_review renders the card with the bridge-recomputed fingerprint', async () => {
  const state = await loadedState('alice@example.com');
  const html = renderApp(state);
  assert.match(html, /alice@example\.com/);
  assert.match(html, /data-test="fingerprint">0011 2233 4455 6677 8899 aabb ccdd eeff</);
  assert.match(html, /data-test="stat-s1">0</);
});

test('submitting (yes, yes, yes) increments the displayed S1', async () => {
  let state = await loadedState('alice@example.com');
  const before = state.review!.stats.s1;
  state = setAnswer(state, 'identity', 'yes');
  state = setAnswer(state, 'hashMatch', 'yes');
  state = setAnswer(state, 'authentic', 'yes');
  state = setChallengeAnswer(state, solve(state.form.challenge.puzzle));
  const result = await api.submitRating({
    address: state.review!.address,
    identity: 'yes',
    hash_match: 'yes',
    authentic: 'yes',
    comment: 'verified',
    challenge_id: state.form.challenge.challenge_id,
    challenge_answer: state.form.challengeAnswer,
  });
  state = submitSucceeded(state, result.stats);
  assert.equal(state.review!.stats.s1, before + 1);
  assert.match(renderApp(state), new RegExp(`data-test="stat-s1">${before + 1}<`));
  // and the refreshed review from the bridge agrees
  const refreshed = await api.loadReview('alice@example.com');
  assert.equal(refreshed.stats.s1, before + 1);
});

test('forged stats show the discrepancy banner and disable the form', async () => {
  const state = await loadedState('forged@example.com');
  const html = renderApp(state);
  assert.match(html, /data-test="discrepancy-banner"/);
  assert.match(html, /stats-mismatch/);
  assert.match(html.slice(html.indexOf('id="rate-form"')), /data-test="submit" disabled/);
});

test('a wrong challenge answer is rejected verbatim and yields a fresh puzzle', async () => {
  let state = await loadedState('alice@example.com');
  state = setAnswer(state, 'identity', 'yes');
  state = setAnswer(state, 'hashMatch', 'yes');
  state = setAnswer(state, 'authentic', 'yes');
  state = setChallengeAnswer(state, '999');
  try {
    await api.submitRating({
      address: state.review!.address,
      identity: 'yes',
      hash_match: 'yes',
      authentic: 'yes',
      comment: '',
      challenge_id: state.form.challenge.challenge_id,
      challenge_answer: '999',
    });
    assert.fail('expected rejection');
  } catch (err) {
    assert.ok(err instanceof SubmitRejected);
    state = submitFailed(state, err.detail, err.freshChallenge);
  }
  assert.equal(state.form.notice?.kind, 'error');
  assert.equal(state.form.identity, 'yes'); // form preserved
  assert.notEqual(state.form.challenge.challenge_id, '');
});

test('bridge-unreachable is a distinct blocking failure', async () => {
  const dead = new BridgeApi('http://127.0.0.1:9');
  await assert.rejects(dead.loadReview('x@example.com'), /bridge unreachable/);
});
