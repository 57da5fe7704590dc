"""morpes: a personalizing re-rendering proxy for small screens.

Pages are fetched, split into DOM-derived segments, scored against the
requesting user's term profile on five dimensions, and served as a
sequence of shots whose first screen carries the most relevant content.
"""

from .composer import (
    DEFAULT_TEMPLATES,
    RankedEntry,
    RankedSegments,
    Shot,
    ShotPlan,
    Template,
    compose_shots,
    next_shot,
    render_shot,
    select_template,
    sort_segments,
)
from .errors import (
    ContentTypeError,
    EmptyGroupError,
    EmptyPageError,
    EventMismatchError,
    FetchError,
    InvalidUserError,
    MorpesError,
    NoMoreShotsError,
    NotFoundError,
    RenderError,
    StoreError,
    TemplateNotFoundError,
)
from .evaluator import (
    DimensionWeights,
    PageScores,
    SegmentScore,
    evaluate_segment,
    freshness_weight,
    image_weight,
    link_weight,
    score_page,
    theme_weight,
    visual_weight,
)
from .metrics import (
    AggregateReport,
    SessionMetrics,
    SessionRecord,
    aggregate_report,
    compute_session_metrics,
)
from .profile import (
    InteractionEvent,
    Profile,
    ProfileStore,
    ProfileTerm,
    UpdateParams,
    build_profile,
    update_profile,
)
from .segmenter import (
    Image,
    Link,
    RawPage,
    Segment,
    SegmentSet,
    SegmentationParams,
    extract_features,
    fetch_page,
    segment_page,
)
from .service import ServiceConfig, create_app, load_config, run_service

__version__ = "0.1.0"
