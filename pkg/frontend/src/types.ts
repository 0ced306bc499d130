/**
 * Shapes of the JSON documents the service exchanges.
 *
 * These mirror the server's serializers field for field. The client never
 * derives rule outcomes from them; it renders what the server sent.
 */

export interface ConstraintDoc {
  id: string;
  text: string;
}

export interface PropertyDoc {
  id: string;
  text: string;
  constraints: ConstraintDoc[];
}

export interface RequirementDoc {
  id: string;
  text: string;
  properties: PropertyDoc[];
}

export interface RelationDoc {
  id: string;
  source: string;
  target: string;
  kind: string;
  origin: string;
}

export interface RequirementsModelDoc {
  requirements: RequirementDoc[];
  relations: RelationDoc[];
}

export interface TraceDoc {
  id: string;
  kind: string;
  requirement: string;
  elements: string[];
}

export interface TraceModelDoc {
  traces: TraceDoc[];
}

export interface ArchElementDoc {
  id: string;
  name: string;
  kind: string;
  parent: string | null;
}

export interface ArchitectureModelDoc {
  elements: ArchElementDoc[];
}

export interface ChangeDoc {
  type: string;
  target: string;
  rationale: string;
  payload: Record<string, unknown> | null;
}

export interface PathNodeDoc {
  requirement: string;
  status: string;
  accepted_change: ChangeDoc | null;
}

export interface PathEdgeDoc {
  relation: RelationDoc;
  from_requirement: string;
  to_requirement: string;
  chosen: string;
}

export interface PathDoc {
  nodes: Record<string, PathNodeDoc>;
  edges: PathEdgeDoc[];
  complete: boolean;
}

export interface PendingDecisionDoc {
  id: string;
  from_requirement: string;
  to_requirement: string;
  relation: RelationDoc;
  direction: string;
  change_type: string;
  alternatives: string[];
  unspecified_cell: boolean;
}

export interface ChoiceDoc {
  sequence: number;
  decision: string;
  pick: string;
  justification: string | null;
}

export interface AnnotationDoc {
  code: string;
  message: string;
  relation: string | null;
}

export interface SessionDoc {
  id: string;
  complete: boolean;
  change: ChangeDoc;
  path: PathDoc;
  pending: PendingDecisionDoc[];
  choices: ChoiceDoc[];
  annotations: AnnotationDoc[];
}

export interface SessionCreatedDoc {
  id: string;
  complete: boolean;
  pending: PendingDecisionDoc[];
}

export interface SessionListDoc {
  sessions: string[];
}

export interface NoticeDoc {
  code: string;
  location: string;
  message: string;
  severity: string;
}

export interface CandidateDoc {
  element: string;
  kind: string;
  trace_id: string;
  via_requirement: string;
}

export interface ImpactReportDoc {
  change: ChangeDoc;
  rationale: string;
  path: PathDoc;
  selected: string | null;
  outcome: string;
  reason: string;
  terminals: string[];
  candidates: CandidateDoc[];
  notices: NoticeDoc[];
}

// Request vocabulary for the proposal form. These are field values the API
// accepts, not rule content; the server rejects anything else.
export const CHANGE_TYPES = [
  "AddRequirement",
  "DeleteRequirement",
  "AddProperty",
  "DeleteProperty",
  "ChangeProperty",
  "AddConstraintToProperty",
  "DeleteConstraintOfProperty",
  "ChangeConstraintOfProperty",
  "AddRelation",
  "DeleteRelation",
  "ChangeRelation",
] as const;

export const RATIONALES = ["DomainChange", "Refactoring"] as const;
