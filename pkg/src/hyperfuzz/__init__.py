"""hyperfuzz: grey-box fuzzing for information-leak (noninterference) bugs.

A target is fed pairs of byte strings (public, secret).  Two executions that
agree on the public part but differ in output have leaked the secret; the
package generates such inputs, filters nondeterminism with a rerun check, and
reports each confirmed leak as a replayable hypertest.
"""

from .campaign import (
    CampaignConfig,
    CampaignResult,
    CampaignStats,
    ConfigError,
    QueueEntry,
    build_executor,
    run_campaign,
)
from .coverage import CoverageMap, bucket_of, is_interesting
from .executor import (
    ExecStatus,
    ExecutionResult,
    ExternalExecutor,
    InProcessExecutor,
    MemoryArena,
    derive_fill_pattern,
    splitmix64_next,
)
from .hashing import Hash64, hash64, hash_hex
from .model import (
    MAX_PART_LEN,
    EncodingError,
    HyperInput,
    Hypertest,
    ObservationEntry,
    SecurityLabel,
    decode,
    encode,
)
from .mutation import MutationPhase, MutatorKind, choose_phase, mutate
from .oracle import (
    GuardExceededError,
    HypertestReport,
    LeakTable,
    Verdict,
    VerdictKind,
    flakiness_check,
    self_composition_oracle,
    self_composition_scan,
)
from .targets import BuiltinTarget, LeakClass, evaluate_builtin, get_target, target_names

__version__ = "0.1.0"

__all__ = [
    "BuiltinTarget",
    "CampaignConfig",
    "CampaignResult",
    "CampaignStats",
    "ConfigError",
    "CoverageMap",
    "EncodingError",
    "ExecStatus",
    "ExecutionResult",
    "ExternalExecutor",
    "GuardExceededError",
    "Hash64",
    "HyperInput",
    "Hypertest",
    "HypertestReport",
    "InProcessExecutor",
    "LeakClass",
    "LeakTable",
    "MAX_PART_LEN",
    "MemoryArena",
    "MutationPhase",
    "MutatorKind",
    "ObservationEntry",
    "QueueEntry",
    "SecurityLabel",
    "Verdict",
    "VerdictKind",
    "build_executor",
    "bucket_of",
    "choose_phase",
    "decode",
    "derive_fill_pattern",
    "encode",
    "evaluate_builtin",
    "flakiness_check",
    "get_target",
    "hash64",
    "hash_hex",
    "is_interesting",
    "mutate",
    "run_campaign",
    "self_composition_oracle",
    "self_composition_scan",
    "splitmix64_next",
    "target_names",
]
