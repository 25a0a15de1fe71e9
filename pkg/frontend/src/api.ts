// Bridge API client. The UI talks only to the loopback bridge; the bridge
// holds the signing key and recomputes every value it hands us.

export type TriState = 'yes' | 'no' | 'unsure';

export interface Discrepancy {
  kind: string;
  detail: string;
}

export interface RatingRow {
  rater: string;
  identity: TriState;
  hash_match: TriState;
  authentic: TriState;
  comment: string;
  rated_at: string;
  verified: boolean;
}

export interface Stats {
  s1: number;
  s2: number;
  s3: number;
  s4: number;
  s5: number;
  s6: number;
  s7: number;
}

export interface Challenge {
  challenge_id: string;
  puzzle: string;
}

export interface ReviewData {
  found: boolean;
  address: string;
  scheme: string;
  outcome: string;
  questions: string[];
  discrepancies: Discrepancy[];
  warnings: string[];
  stats: Stats;
  beta_ratio: string | null;
  challenge: Challenge;
  display_name?: string;
  fingerprint?: string;
  fingerprint_grouped?: string;
  attestment?: {
    kind: 'hosted-url' | 'content-hash';
    value: string;
    guidelines: Record<string, boolean>;
  };
  ratings?: RatingRow[];
}

export interface SubmitResult {
  accepted: true;
  stats: Stats;
}

export class BridgeUnreachable extends Error {}

export class SubmitRejected extends Error {
  constructor(
    public code: string,
    public detail: string,
    public freshChallenge: Challenge | null,
  ) {
    super(detail || code);
  }
}

export interface RatePayload {
  address: string;
  identity: TriState;
  hash_match: TriState;
  authentic: TriState;
  comment: string;
  challenge_id: string;
  challenge_answer: string;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class BridgeApi {
  constructor(
    private baseUrl: string = '',
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async loadReview(address: string): Promise<ReviewData> {
    let response: Response;
    try {
      response = await this.fetchFn(
        `${this.baseUrl}/local/review?address=${encodeURIComponent(address)}`,
      );
    } catch (err) {
      throw new BridgeUnreachable(`bridge unreachable: ${String(err)}`);
    }
    const body = await response.json().catch(() => null);
    if (!response.ok || body === null) {
      if (response.status >= 500) {
        throw new BridgeUnreachable(`bridge error ${response.status}`);
      }
      throw new Error((body && body.detail) || `review failed (${response.status})`);
    }
    return body as ReviewData;
  }

  async submitRating(payload: RatePayload): Promise<SubmitResult> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}/local/rate`, {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify(payload),
      });
    } catch (err) {
      throw new BridgeUnreachable(`bridge unreachable: ${String(err)}`);
    }
    const body = await response.json().catch(() => null);
    if (!response.ok || body === null) {
      const code = (body && body.error) || `http_${response.status}`;
      const detail = (body && body.detail) || 'rating rejected';
      const fresh = body && body.challenge ? (body.challenge as Challenge) : null;
      throw new SubmitRejected(code, detail, fresh);
    }
    return body as SubmitResult;
  }
}
