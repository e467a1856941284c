export * from "./types";
export { GatewayClient, GatewayError, type FetchLike } from "./api";
export {
  JournalStream,
  type SocketFactory,
  type SocketLike,
  type StreamState,
} from "./stream";
export { ConsoleStore, InvariantError, type ConsoleView } from "./store";
export {
  acknowledgeGroup,
  boardRow,
  buildBoard,
  type Board,
  type BoardRow,
} from "./alarmBoard";
export {
  buildTrendChart,
  CLASS_COLORS,
  type TrendChart,
  type TrendPoint,
} from "./qualityTrends";
export {
  candidateList,
  cardView,
  checkDraft,
  FEEDBACK_VERDICTS,
  submitFeedback,
  TEXT_REQUIRED,
  type CandidateList,
  type CardView,
  type FeedbackDraft,
} from "./cardReader";
export {
  renderBoard,
  renderCandidates,
  renderCard,
  renderTrend,
} from "./render";
