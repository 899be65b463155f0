"""Commented starter documents emitted by ``faircase init``.

Every template parses cleanly with its own parser, so a freshly initialized
file is immediately usable.
"""

from __future__ import annotations

CASE_TEMPLATE = """\
# Assurance case skeleton. Element kinds: goal, context, strategy,
# property_claim, evidence. Exactly one root goal per case.
case_id: example-case
title: Example fairness assurance case
root: G1
elements:
  - id: G1
    kind: goal
    text: The system promotes fair and equitable outcomes within the intended context
  - id: C1
    kind: context
    text: "Scope: automated scoring of short financial news items"
  - id: S1
    kind: strategy
    text: Argue over group fairness metrics computed on evaluation data
  - id: P1
    kind: property_claim
    text: Selection rates are comparable across sensitive groups
    # Optional classification of the claim:
    taxonomy:
      comp: model          # data | model | interaction
      level: Assessment    # Stage | Component | Assessment | Implication
  - id: E1
    kind: evidence
    text: Demographic parity difference stays under the agreed threshold
    # Quality annotations: unassessed | low | medium | high
    evidence_meta:
      relevance: unassessed
      completeness: unassessed
      admissibility: unassessed
      accuracy: unassessed
links:
  # Allowed links: goal->strategy, goal->property_claim,
  # strategy->property_claim, property_claim->property_claim,
  # property_claim->evidence, context->goal/strategy/property_claim.
  - {from: C1, to: G1}
  - {from: G1, to: S1}
  - {from: S1, to: P1}
  - {from: P1, to: E1}
"""

LOG_TEMPLATE = """\
# Fairness experiment log. Required: general/experiment_id, model/name.
schema_version: 1
general:
  experiment_id: example-experiment
  title: Group fairness evaluation
  timestamp: "2026-01-01T00:00:00+00:00"
  authors:
    - Example Author
  description: Describe the experimental setup here.
data:
  sample:
    name: evaluation-set
    size: 200
    source: internal
    notes: Balanced draw from the labeled pool.
  variables:
    - name: group
      kind: nominal        # nominal | continuous
      summary: Sensitive attribute used for the per-group split.
  sensitive_characteristics:
    - group
model:
  name: example-model
  version: "1.0"
  sample_data:             # overall confusion counts
    tps: 40
    fps: 10
    tns: 40
    fns: 10
bias_metrics:
  groups:
    - group_name: overall
      metrics:
        - name: demographic_parity_difference
          description: Max minus min selection rate across groups.
          value: 0.05
          thresholds: 0.1  # scalar bound, or interval [lo, hi]
          bigger_is_better: false
# Optional declared RAID records:
# risks:
#   - kind: Risk           # Risk | Assumption | Issue | Dependency
#     title: Short risk title
#     description: Longer description.
#     severity: medium     # low | medium | high
"""

BINDINGS_TEMPLATE = """\
# Evidence bindings: point each evidence element at a field inside an
# artifact and attach one or more checks (all must pass).
- evidence_id: E1
  artifact: example-experiment.yaml
  path: bias_metrics/groups/0/metrics/0
  checks:
    - type: exists
    - type: metric_gate          # reads the metric and applies its thresholds
    - type: fresh_within
      max_age: 30d               # Nd / Nh / Nm / Ns or plain seconds
# Other check types:
#   - type: equals
#     expected: 0.05
"""

CARD_TEMPLATE = """\
# Model card with the nine standard sections. All sections except
# quantitative_analyses hold field/value text pairs.
sections:
  model_details:
    - field: name
      value: example-model
    - field: version
      value: "1.0"
  intended_use:
    - field: primary_use
      value: Describe intended uses here.
  factors:
    - field: groups
      value: Sensitive groups considered in evaluation.
  metrics:
    - field: chosen_metrics
      value: Accuracy and group fairness notions.
  evaluation_data:
    - field: dataset
      value: Name the evaluation dataset.
  training_data:
    - field: dataset
      value: Name the training dataset.
  quantitative_analyses: []      # filled by `faircase sync`
  ethical_considerations:
    - field: notes
      value: Record ethical considerations here.
  caveats_recommendations:
    - field: notes
      value: Record caveats and recommendations here.
"""

TEMPLATES = {
    "case": CASE_TEMPLATE,
    "log": LOG_TEMPLATE,
    "bindings": BINDINGS_TEMPLATE,
    "card": CARD_TEMPLATE,
}
