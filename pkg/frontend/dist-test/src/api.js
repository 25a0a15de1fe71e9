// Bridge API client. The UI talks only to the loopback bridge; the bridge
// holds the signing key and recomputes every value it hands us.
export class BridgeUnreachable extends Error {
}
export class SubmitRejected extends Error {
    constructor(code, detail, freshChallenge) {
        super(detail || code);
        this.code = code;
        this.detail = detail;
        this.freshChallenge = freshChallenge;
    }
}
export class BridgeApi {
    constructor(baseUrl = '', fetchFn = (input, init) => fetch(input, init)) {
        this.baseUrl = baseUrl;
        this.fetchFn = fetchFn;
    }
    async loadReview(address) {
        let response;
        try {
            response = await this.fetchFn(`${this.baseUrl}/local/review?address=${encodeURIComponent(address)}`);
        }
        catch (err) {
            throw new BridgeUnreachable(`bridge unreachable: ${String(err)}`);
        }
        const body = await response.json().catch(() => null);
        if (!response.ok || body === null) {
            if (response.status >= 500) {
                throw new BridgeUnreachable(`bridge error ${response.status}`);
            }
            throw new Error((body && body.detail) || `review failed (${response.status})`);
        }
        return body;
    }
    async submitRating(payload) {
        let response;
        try {
            response = await this.fetchFn(`${this.baseUrl}/local/rate`, {
                method: 'POST',
                headers: { 'Content-Type': 'application/json' },
                body: JSON.stringify(payload),
            });
        }
        catch (err) {
            throw new BridgeUnreachable(`bridge unreachable: ${String(err)}`);
        }
        const body = await response.json().catch(() => null);
        if (!response.ok || body === null) {
            const code = (body && body.error) || `http_${response.status}`;
            const detail = (body && body.detail) || 'rating rejected';
            const fresh = body && body.challenge ? body.challenge : null;
            throw new SubmitRejected(code, detail, fresh);
        }
        return body;
    }
}
