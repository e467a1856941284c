"""Operator assistance platform for recycled-paper production at desk scale.

Subpackages:
    sim       - seeded synthetic paper-mill scenario generator with ground truth
    store     - append-only event store with time-window queries and feature alignment
    alarms    - alarm flood filters: chatter suppression, sequence mining, grouping
    forecast  - soft sensor: tree-ensemble quality forecasting, change detection
    knowledge - versioned, editor-approved knowledge cards with causal links
    assist    - trigger-to-recommendation loop that learns from operator feedback
    gateway   - HTTP service and CLI binding everything together
    report    - figure rendering for evaluation and flood reports
"""

__version__ = "0.1.0"

SCHEMA_VERSION = 1
