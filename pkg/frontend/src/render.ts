// HTML templates as pure functions of state, so the whole view layer can be
// asserted on without a DOM. main.ts swaps the resulting markup in and wires
// the event handlers by element id/name.

import type { RatingRow, ReviewData } from './api.js';
import { AppState, allAnswered, betaRatioLabel, canSubmit, formBlocked } from './state.js';

const GUIDELINE_LABELS: Record<string, string> = {
  'single-take': 'Shot in a single take',
  'id-shown': 'Photo ID shown',
  'spoken-in-groups': 'Digits spoken in short groups',
  'background-audio': 'Background noise or music present',
  'visual-hash-shown': 'Hash shown visually',
  'card-rotated-or-glass-written': 'Card rotated or written on glass',
  'horizontally-flipped': 'Video horizontally flipped',
};

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}

export function renderApp(state: AppState): string {
  const parts = [renderSearch(state)];
  if (state.phase === 'bridge-error') {
    parts.push(
      `<div class="banner banner-blocking" data-test="bridge-error">` +
        `Bridge unreachable: ${escapeHtml(state.bridgeError ?? '')}. ` +
        `Start it with <code>amakey bridge</code> and reload.</div>`,
    );
    return parts.join('\n');
  }
  if (state.phase === 'loading') {
    parts.push('<p class="muted">Checking with the local bridge&hellip;</p>');
    return parts.join('\n');
  }
  if (state.phase === 'loaded' && state.review) {
    parts.push(renderReview(state));
  }
  return parts.join('\n');
}

function renderSearch(state: AppState): string {
  return (
    `<form id="search-form" class="search">` +
    `<input id="address-input" name="address" placeholder="contact address, e.g. alice@example.com"` +
    ` value="${escapeHtml(state.address)}" autocomplete="off">` +
    `<button type="submit">Review</button></form>`
  );
}

function renderReview(state: AppState): string {
  const review = state.review!;
  if (!review.found) {
    return (
      `<div class="empty-state" data-test="not-found">` +
      `<h2>No key registered</h2>` +
      `<p>${escapeHtml(review.address)} has no verified identity card on this keyserver.</p></div>`
    );
  }
  return [
    renderBanners(review),
    renderCardSummary(review),
    renderAttestment(review),
    renderStats(review),
    renderForm(state),
    renderRatings(review.ratings ?? []),
  ].join('\n');
}

function renderBanners(review: ReviewData): string {
  const chunks: string[] = [];
  if (review.discrepancies.length > 0) {
    const items = review.discrepancies
      .map((d) => `<li><strong>${escapeHtml(d.kind)}</strong>: ${escapeHtml(d.detail)}</li>`)
      .join('');
    chunks.push(
      `<div class="banner banner-danger" data-test="discrepancy-banner">` +
        `<strong>This response failed verification.</strong> The keyserver's answer does not ` +
        `check out; do not trust this key and do not rate it.<ul>${items}</ul></div>`,
    );
  }
  for (const warning of review.warnings) {
    chunks.push(`<div class="banner banner-warn">${escapeHtml(warning)}</div>`);
  }
  return chunks.join('\n');
}

function renderCardSummary(review: ReviewData): string {
  const name = review.display_name ? escapeHtml(review.display_name) : '(no display name)';
  return (
    `<section class="card-summary"><h2>${escapeHtml(review.address)}</h2>` +
    `<p class="muted">${name} &middot; outcome: <span data-test="outcome">${escapeHtml(review.outcome)}</span></p>` +
    `<p>Fingerprint (recomputed locally):</p>` +
    `<p class="fingerprint" data-test="fingerprint">${escapeHtml(review.fingerprint_grouped ?? '')}</p></section>`
  );
}

function renderAttestment(review: ReviewData): string {
  const attestment = review.attestment;
  if (!attestment) return '';
  const guidelines = Object.entries(attestment.guidelines)
    .map(([flag, met]) => {
      const label = GUIDELINE_LABELS[flag] ?? flag;
      return `<li class="${met ? 'met' : 'unmet'}">${met ? '&#10003;' : '&#9675;'} ${escapeHtml(label)}</li>`;
    })
    .join('');
  let media: string;
  if (attestment.kind === 'hosted-url') {
    media =
      `<video controls preload="metadata" src="${escapeHtml(attestment.value)}" data-test="player"></video>` +
      `<p class="muted"><a href="${escapeHtml(attestment.value)}" target="_blank" rel="noreferrer noopener">open the attestment directly</a></p>`;
  } else {
    media =
      `<p>This attestment is referenced by its file digest:</p>` +
      `<p class="fingerprint">${escapeHtml(attestment.value)}</p>` +
      `<p>Pick the video file you received; it plays only if its SHA-256 digest matches.</p>` +
      `<input type="file" id="attestment-file" accept="video/*">` +
      `<p id="attestment-file-status" class="muted"></p>` +
      `<video controls id="attestment-local-player" hidden></video>`;
  }
  return `<section class="attestment"><h3>Media attestment</h3>${media}<h4>Recording guidelines declared by the owner</h4><ul class="guidelines">${guidelines}</ul></section>`;
}

function renderStats(review: ReviewData): string {
  const s = review.stats;
  const cells = [
    ['Total ratings', s.s1, 'stat-s1'],
    ['Identity confirmed', s.s2, 'stat-s2'],
    ['Identity denied', s.s3, 'stat-s3'],
    ['Hash confirmed', s.s4, 'stat-s4'],
    ['Hash denied', s.s5, 'stat-s5'],
    ['Authentic confirmed', s.s6, 'stat-s6'],
    ['Authentic denied', s.s7, 'stat-s7'],
  ]
    .map(
      ([label, value, test]) =>
        `<div class="stat"><span class="stat-value" data-test="${test}">${value}</span>` +
        `<span class="stat-label">${label}</span></div>`,
    )
    .join('');
  return (
    `<section class="stats"><h3>Community ratings (recomputed locally)</h3>` +
    `<div class="stat-grid">${cells}</div>` +
    `<p class="muted">worst agreement margin / total: <span data-test="beta-ratio">${escapeHtml(
      betaRatioLabel(review),
    )}</span></p></section>`
  );
}

const QUESTION_FIELDS = ['identity', 'hashMatch', 'authentic'] as const;

function renderForm(state: AppState): string {
  const review = state.review!;
  const blocked = formBlocked(review);
  const disabledAttr = blocked ? ' disabled' : '';
  const questions = review.questions
    .map((question, index) => {
      const field = QUESTION_FIELDS[index] ?? `q${index}`;
      const selected = state.form[field as (typeof QUESTION_FIELDS)[number]];
      const options = (['yes', 'no', 'unsure'] as const)
        .map(
          (value) =>
            `<label><input type="radio" name="${field}" value="${value}"` +
            `${selected === value ? ' checked' : ''}${disabledAttr}> ${value}</label>`,
        )
        .join(' ');
      return `<fieldset class="question"><legend>${escapeHtml(question)}</legend>${options}</fieldset>`;
    })
    .join('\n');
  const notice = state.form.notice
    ? `<p class="notice notice-${state.form.notice.kind}" data-test="notice">${escapeHtml(state.form.notice.text)}</p>`
    : '';
  const submitDisabled = canSubmit(state) ? '' : ' disabled';
  const hint = blocked
    ? '<p class="muted">Rating is disabled while the response fails verification.</p>'
    : allAnswered(state.form)
      ? ''
      : '<p class="muted">Answer all three questions to enable submission.</p>';
  return (
    `<section class="rate"><h3>Rate this attestment</h3><form id="rate-form" data-test="rate-form">` +
    questions +
    `<label class="comment">Additional comments?<textarea name="comment"${disabledAttr}>` +
    `${escapeHtml(state.form.comment)}</textarea></label>` +
    `<label class="challenge">${escapeHtml(state.form.challenge.puzzle)} ` +
    `<input name="challenge-answer" value="${escapeHtml(state.form.challengeAnswer)}"${disabledAttr}></label>` +
    `<button type="submit" data-test="submit"${submitDisabled}>Submit signed rating</button>` +
    `${notice}${hint}</form></section>`
  );
}

function renderRatings(rows: RatingRow[]): string {
  if (rows.length === 0) {
    return '<section class="ratings"><h3>Prior ratings</h3><p class="muted">None yet.</p></section>';
  }
  const items = rows
    .map((row) => {
      const badge = row.verified
        ? '<span class="badge badge-ok" title="signature verified against the rater&#39;s registered key">verified</span>'
        : '<span class="badge badge-bad">unverified</span>';
      const comment = row.comment ? `<p>${escapeHtml(row.comment)}</p>` : '';
      return (
        `<li class="rating-row">${badge} <strong>${escapeHtml(row.rater)}</strong>` +
        ` &middot; identity: ${row.identity} &middot; hash: ${row.hash_match} &middot; authentic: ${row.authentic}` +
        ` <span class="muted">${escapeHtml(row.rated_at)}</span>${comment}</li>`
      );
    })
    .join('');
  // Shown after the rating form on purpose: the rater should judge the video
  // before seeing how everyone else voted.
  return `<section class="ratings"><h3>Prior ratings</h3><ul>${items}</ul></section>`;
}
