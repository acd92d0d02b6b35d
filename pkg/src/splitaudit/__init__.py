"""splitaudit: auditing for user-item interaction logs and evaluation splits."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    AuditError,
    DegenerateSplit,
    EmptyEvaluation,
    EmptyLog,
    EmptyReference,
    EmptySample,
    EmptyTargets,
    InvalidRange,
    MalformedDocument,
    MalformedRow,
    MissingColumn,
    ProvenanceMismatch,
    SchemaVersionMismatch,
    TypeMismatch,
)
from .log import Interaction, InteractionLog, ValidationReport, Violation, validate_log  # noqa: F401
from .ingest import ColumnMapping, parse_log  # noqa: F401
from .preprocess import (  # noqa: F401
    PreprocessSpec,
    apply_preprocessing,
    drop_consecutive_repeats,
    n_core_filter,
    shuffle_collision_order,
)
from .split import (  # noqa: F401
    SplitBundle,
    SplitDescription,
    SplitSpec,
    describe_split,
    global_temporal_split,
    leave_one_out_split,
    load_bundle,
    make_split,
    save_bundle,
)
from .stats import (  # noqa: F401
    ComparisonTable,
    CoreStatsReport,
    DistributionSummary,
    RepeatReport,
    TemporalStatsReport,
    TimelineReport,
    compare_stats,
    core_stats,
    distribution_summary,
    repeat_stats,
    temporal_stats,
    timeline,
)
from .diagnostics import (  # noqa: F401
    ColdStartReport,
    LeakageReport,
    ShiftReport,
    SplitComparisonMatrix,
    cold_start,
    compare_splits,
    distribution_shift,
    ks_statistic,
    leakage,
)
from .report import (  # noqa: F401
    Card,
    SummaryReport,
    ThresholdConfig,
    render_markdown,
    summarize,
)
from .serialize import SCHEMA_VERSION, from_json, to_json  # noqa: F401
