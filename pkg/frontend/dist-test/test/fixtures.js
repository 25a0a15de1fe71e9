// Canned bridge payloads mirroring the real /local/review schema.
export const QUESTIONS = [
    'Can you recognize the person in this video as the actual owner of the contact address?',
    'Does the hash communicated in the video match the hash given in the identity card?',
    'Does the video meet all mandatory guidelines and appear authentic?',
];
export function zeroStats() {
    return { s1: 0, s2: 0, s3: 0, s4: 0, s5: 0, s6: 0, s7: 0 };
}
export function reviewFixture(overrides = {}) {
    return {
        found: true,
        address: 'alice@example.com',
        scheme: 'email',
        outcome: 'needs-human-review',
        questions: [...QUESTIONS],
        discrepancies: [],
        warnings: [],
        stats: zeroStats(),
        beta_ratio: null,
        challenge: { challenge_id: 'ch-1', puzzle: 'What is 2 + 3?' },
        display_name: 'Alice',
        fingerprint: '00112233445566778899aabbccddeeff',
        fingerprint_grouped: '0011 2233 4455 6677 8899 aabb ccdd eeff',
        attestment: {
            kind: 'hosted-url',
            value: 'https://videos.example.com/alice.mp4',
            guidelines: {
                'single-take': true,
                'id-shown': true,
                'spoken-in-groups': true,
                'background-audio': false,
                'visual-hash-shown': true,
                'card-rotated-or-glass-written': false,
                'horizontally-flipped': false,
            },
        },
        ratings: [],
        ...overrides,
    };
}
export function notFoundFixture(address) {
    return {
        found: false,
        address,
        scheme: 'email',
        outcome: 'not-found',
        questions: [...QUESTIONS],
        discrepancies: [],
        warnings: [],
        stats: zeroStats(),
        beta_ratio: null,
        challenge: { challenge_id: 'ch-nf', puzzle: 'What is 1 + 1?' },
    };
}
export function forgedStatsFixture() {
    return reviewFixture({
        outcome: 'invalid',
        discrepancies: [
            {
                kind: 'stats-mismatch',
                detail: 'server claimed (10, 10, 0, 10, 0, 10, 0), recomputed (0, 0, 0, 0, 0, 0, 0)',
            },
        ],
    });
}
