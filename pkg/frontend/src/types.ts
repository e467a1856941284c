/** Wire types for the gateway's JSON payloads, field for field. */

export interface ErrorBody {
  code: string;
  message: string;
}

export interface Envelope<T> {
  schema_version: number;
  request_id: string;
  payload?: T;
  error?: ErrorBody;
}

export interface RepresentativeAlarm {
  alarm_id: string;
  tag: string;
  error_code: string;
  severity: string;
  timestamp: number;
}

export interface NotificationPlan {
  group_id: string;
  importance: string;
  notify_at: number[];
  listed: boolean;
  acknowledged_at: number | null;
}

export type GroupKind = "chatter" | "sequence" | "singleton";
export type UnitStatus = "pass" | "hold" | "unfiltered";

export interface PresentationUnit {
  group_id: string;
  kind: GroupKind;
  representative: RepresentativeAlarm;
  members: string[];
  count: number;
  first_ts: number;
  last_ts: number;
  status: UnitStatus;
  card_ids: string[];
  importance: string;
  plan: NotificationPlan;
}

export interface FloodMetrics {
  window_ms: number;
  raw_alarms: number;
  presentation_units: number;
  groups_formed: number;
  rate_per_10min: number;
  suppression_ratio: number;
}

export type QualityClass = "low" | "in_specification" | "high";

export interface Forecast {
  reel_id: string;
  parameter: string;
  point_estimate: number;
  interval: [number, number];
  class: QualityClass;
  anomaly_flag: boolean;
  model_version: string;
}

export interface ChangePoint {
  parameter: string;
  detected_at: number;
  statistic: number;
  direction: "up" | "down";
}

export interface Malfunction {
  description: string;
  cause: string;
  locations: string[];
  error_codes: string[];
  situations: string[];
}

export interface SolutionStep {
  text: string;
  media: string | null;
}

export interface CardVersion {
  card_id: string;
  version: number;
  status: string;
  malfunction: Malfunction;
  solutions: SolutionStep[];
  author: string;
  editor_of_record: string | null;
  approved_at: number | null;
  content_hash: string;
}

export interface CardComment {
  author: string;
  timestamp: number;
  text: string;
}

export interface CardDetail {
  card: CardVersion;
  comments: CardComment[];
  status: string;
}

export type TriggerKind =
  | "pcs_alarm"
  | "web_break"
  | "recognized_situation"
  | "quality_deviation";

export interface TriggerRequest {
  kind: TriggerKind;
  timestamp: number;
  location: string;
  alarm_group_id?: string | null;
  situation_label?: string | null;
  forecast_id?: string | null;
  error_codes?: string[];
}

export interface Recommendation {
  recommendation_id: string;
  trigger: TriggerRequest;
  situation_label: string;
  candidates: [string, number][];
  created_at: number;
  disposition: "open" | "acted" | "dismissed";
}

export type Verdict = "confirm" | "reject" | "correct" | "supplement";

export interface FeedbackRequest {
  recommendation_id: string;
  card_id: string;
  verdict: Verdict;
  author: string;
  timestamp: number;
  text?: string;
}

export interface FeedbackResult {
  recorded: boolean;
  proposal_id: string | null;
  card_id: string;
  confirms: number;
  rejects: number;
  score: number;
}

export interface StatsRow {
  card_id: string;
  situation: string;
  confirms: number;
  rejects: number;
  score: number;
}

export interface JournalEntry {
  seq: number;
  type: string;
  payload: Record<string, unknown>;
}
