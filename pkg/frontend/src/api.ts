// Thin client for the prediction service. The UI never computes
// predictions itself; everything comes from these two endpoints.

export interface SchemaResponse {
  schema_hash: string;
  features: string[];
  training_means: Record<string, number>;
  foreground: string[];
}

export interface PredictionResponse {
  predicted_seconds: number;
  rendered: string;
  schema_hash: string;
}

export class ApiError extends Error {
  status: number;

  constructor(status: number, message: string) {
    super(message);
    this.status = status;
  }
}

export type FetchLike = (
  url: string,
  init?: RequestInit
) => Promise<Response>;

export class ApiClient {
  private baseUrl: string;
  private fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn: FetchLike = fetch) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  async getSchema(): Promise<SchemaResponse> {
    const response = await this.fetchFn(`${this.baseUrl}/schema`);
    if (!response.ok) {
      throw new ApiError(response.status, `schema request failed (${response.status})`);
    }
    return response.json();
  }

  async predict(features: Record<string, number>): Promise<PredictionResponse> {
    const response = await this.fetchFn(`${this.baseUrl}/predict`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ features }),
    });
    if (!response.ok) {
      let message = `prediction failed (${response.status})`;
      try {
        const body = await response.json();
        if (body && typeof body.error === "string") {
          message = body.error;
        }
      } catch {
        // non-JSON error body; keep the status message
      }
      throw new ApiError(response.status, message);
    }
    return response.json();
  }
}
