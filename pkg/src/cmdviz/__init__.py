"""Cognitive Move Diagrams: cluster agents per step, track group moves, draw them."""

__version__ = "0.1.0"

from .cluster import (
    DEFAULT_CONFIG,
    Cluster,
    ClusterConfig,
    ClusterPartition,
    cluster_step,
    distance,
    linkage_distance,
)
from .encode import DiagramModel, encode, encode_scheme1, encode_scheme2, encode_scheme3
from .errors import CmdVizError, ConfigError, ParseError, UsageError, ValidationError
from .group import GroupMove, GroupState, group_moves, group_state, transition_counts
from .ingest import IngestReport, parse_csv, parse_json, write_csv, write_json
from .model import AgentMove, AgentState, Experiment, Step, agent_moves, agent_states
from .pipeline import Analysis, analyze
from .reduce import PcaModel, fit_pca, project
from .render import RenderConfig, render_dot, render_svg
from .synth import SynthSpec, generate
