"""Runtime verification of data minimisation for deterministic black-box
programs: trace-level property checks, incremental three-valued monitors,
whole-domain pre-deployment testing, and input-minimiser synthesis.
"""

from .errors import (
    BudgetExceeded,
    DeterminismViolation,
    DomainMismatch,
    InputOutsideDomain,
    MinimonError,
    ParseError,
    ProgramFailure,
    UnknownBuiltin,
)
from .minimiser import (
    ComposedProgram,
    MinimiserTable,
    PartitionMap,
    ValidationReport,
    compose,
    load_minimiser,
    save_minimiser,
    synthesize,
    validate_preprocessor,
)
from .monitor import Monitor, MonitorConfig, Verdict, monitor_eval, prefix_verdicts
from .programs import (
    BuiltinProgram,
    CommandProgram,
    Program,
    TableProgram,
    make_builtin,
)
from .properties import (
    Mode,
    Witness,
    covers_domain,
    find_witness,
    is_mono_minimal,
    is_strong_dist_minimal,
    mono_witness,
    single_diff_source,
    strong_dist_witness,
)
from .tester import (
    CollisionWitness,
    FunctionTable,
    IndistinguishablePair,
    TestReport,
    build_table,
    run_test,
    table_dist_minimal,
    table_mono_minimal,
    table_strong_dist_minimal,
)
from .trace import (
    Event,
    InputDomain,
    Trace,
    load_domain,
    load_trace,
    parse_trace,
    serialize_trace,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "BuiltinProgram",
    "CollisionWitness",
    "CommandProgram",
    "ComposedProgram",
    "DeterminismViolation",
    "DomainMismatch",
    "Event",
    "FunctionTable",
    "IndistinguishablePair",
    "InputDomain",
    "InputOutsideDomain",
    "MinimiserTable",
    "MinimonError",
    "Mode",
    "Monitor",
    "MonitorConfig",
    "ParseError",
    "PartitionMap",
    "Program",
    "ProgramFailure",
    "TableProgram",
    "TestReport",
    "Trace",
    "UnknownBuiltin",
    "ValidationReport",
    "Verdict",
    "Witness",
    "build_table",
    "compose",
    "covers_domain",
    "find_witness",
    "is_mono_minimal",
    "is_strong_dist_minimal",
    "load_domain",
    "load_minimiser",
    "load_trace",
    "make_builtin",
    "mono_witness",
    "monitor_eval",
    "parse_trace",
    "prefix_verdicts",
    "run_test",
    "save_minimiser",
    "serialize_trace",
    "single_diff_source",
    "strong_dist_witness",
    "synthesize",
    "table_dist_minimal",
    "table_mono_minimal",
    "table_strong_dist_minimal",
    "validate_preprocessor",
]
