/** Client-side session state and the event payload shape the proxy expects. */

export type EventKind = 'click' | 'dwell';

export interface PendingEvent {
  user_id: string;
  session_id: string;
  page_url: string;
  segment_id: string;
  kind: EventKind;
  dwell_ms: number;
  at: number;
}

export interface ClientState {
  userId: string;
  sessionToken: string | null;
  pageUrl: string | null;
  currentShot: number;
  totalShotsKnown: number | null;
  endReached: boolean;
}

export function initialState(userId: string): ClientState {
  return {
    userId,
    sessionToken: null,
    pageUrl: null,
    currentShot: 0,
    totalShotsKnown: null,
    endReached: false,
  };
}
