/** Wire types of the review server's JSON API. */

export interface ReviewItem {
  id: string;
  text_normalized: string;
  duration_s: number | null;
  consistency_z: number | null;
  rms_dbfs?: number | null;
  snr_db?: number | null;
  clipping_ratio?: number | null;
  status: string;
}

export interface QueuePage {
  items: ReviewItem[];
  total: number;
  offset: number;
  limit: number;
}

export type DecisionAction = "accept" | "reject" | "edit_text";

export interface DecisionRequest {
  record_id: string;
  action: DecisionAction;
  edited_text?: string;
  reviewer?: string;
}

export interface DecisionResult {
  id: string;
  status: string;
  applied?: number;
}

export interface ApiErrorBody {
  category: string;
  message: string;
  id?: string;
}
