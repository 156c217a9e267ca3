import { z } from "zod";

// Wire types for the policy service. Every response is validated on
// receipt: the UI renders service-computed truth only, so a payload
// that fails to parse is a bug worth surfacing immediately.

export const EdgeSchema = z.object({ from: z.string(), to: z.string() });
export type EdgeJson = z.infer<typeof EdgeSchema>;

export const GraphSchema = z.object({
  nodes: z.array(z.string()),
  edges: z.array(EdgeSchema),
});
export type GraphJson = z.infer<typeof GraphSchema>;

export const ReportResultSchema = z.object({
  label: z.string(),
  template: z.string(),
  holds: z.boolean(),
  offending: z.array(EdgeSchema),
});
export type ReportResult = z.infer<typeof ReportResultSchema>;

export const ReportSchema = z.object({
  overall: z.boolean(),
  results: z.array(ReportResultSchema),
});
export type Report = z.infer<typeof ReportSchema>;

export const AttributeViewSchema = z.object({
  label: z.string(),
  template: z.string(),
  attrs: z.record(
    z.object({ value: z.unknown(), declared: z.boolean() }),
  ),
});
export type AttributeView = z.infer<typeof AttributeViewSchema>;

export const PolicyViewSchema = z.object({
  id: z.string(),
  revision: z.number().int(),
  graph: GraphSchema,
  report: ReportSchema,
  attributes: z.array(AttributeViewSchema),
});
export type PolicyView = z.infer<typeof PolicyViewSchema>;

export const WhatIfSchema = z.object({
  id: z.string(),
  revision: z.number().int(),
  graph: GraphSchema,
  report: ReportSchema,
});
export type WhatIfResult = z.infer<typeof WhatIfSchema>;

export const StatefulGraphSchema = GraphSchema.extend({
  stateful: z.array(EdgeSchema),
});
export type StatefulGraphJson = z.infer<typeof StatefulGraphSchema>;

export const StatefulCriterionSchema = z.object({
  label: z.string(),
  template: z.string(),
  criterion: z.string(),
  ok: z.boolean(),
  offending: z.array(EdgeSchema),
});

export const StatefulReportSchema = z.object({
  overall: z.boolean(),
  results: z.array(StatefulCriterionSchema),
});
export type StatefulReport = z.infer<typeof StatefulReportSchema>;

export const StatefulResultSchema = z.object({
  id: z.string(),
  revision: z.number().int(),
  stateful: StatefulGraphSchema,
  report: StatefulReportSchema,
});
export type StatefulResult = z.infer<typeof StatefulResultSchema>;

export const SessionCreatedSchema = z.object({
  id: z.string(),
  revision: z.number().int(),
});
export type SessionCreated = z.infer<typeof SessionCreatedSchema>;

export interface Edit {
  op: "add" | "remove";
  from: string;
  to: string;
}

export type ConfigFormat = "iptables" | "openflow" | "dot";

export type Stage = "invariants" | "policy" | "stateful" | "configs";
