"""
Normative EEG brain networks from cross-spectral cohorts
"""

__project_name__ = 'eegnorm'
__description__ = 'Normative EEG brain networks from cross-spectral cohorts'
__homepage__ = 'https://github.com/plotski/eegnorm'
__version__ = '0.1.0'
__author__ = 'plotski'
__author_email__ = 'plotski@example.org'

# isort:skip_file

from ._errors import *

from ._cohort import (
    DEFAULT_BANDS,
    DEFAULT_CHANNELS,
    Band,
    BandDefinition,
    ChannelMontage,
    CrossSpectrumTensor,
    DatasetManifest,
    FrequencyGrid,
    ManifestEntry,
    Sex,
    SubjectRecord,
    Violation,
    band,
    band_indexes,
    band_slice,
    import_csv,
    load_dataset,
    point_label,
    read_tensor,
    read_tensor_header,
    save_dataset,
    validate_tensor,
    write_tensor,
    write_tensor_csv,
)
from ._preprocess import (
    AvgRefOperator,
    GlobalScaleFactor,
    apply_gsf,
    average_reference,
    band_coherence,
    coherence,
    coherence_spectrum,
    estimate_gsf,
    harmonize,
)
from ._graph import (
    NC_NAMES,
    NCVector,
    Partition,
    PathLength,
    WeightedNetwork,
    betweenness_centralities,
    betweenness_centrality,
    char_path_length,
    clustering_coefficient,
    clustering_coefficients,
    compute_ncs,
    global_efficiency,
    local_efficiencies,
    local_efficiency,
    louvain_modularity,
    modularity,
    nc_table,
    network_filename,
    participation_coefficient,
    participation_coefficients,
    read_nc_table,
    read_network,
    shortest_path_lengths,
    threshold,
    write_nc_table,
    write_network,
)
from ._normcurves import (
    BCTFamily,
    FitDiagnostics,
    GamlssConfig,
    NormativeCurveSet,
    SplineModel,
    bct_cdf,
    bct_quantile,
    fit_all,
    fit_gamlss,
    normative_mean_ncs,
    percentile_table,
    support_offset,
)
from ._generator import (
    ARCHITECTURES,
    INPUT_NAMES,
    CVReport,
    DecoderModel,
    EmbeddingReport,
    ExampleSet,
    Metrics,
    TrainConfig,
    TrainingExample,
    TrainResult,
    architecture_hidden,
    architecture_sweep,
    build_model,
    compare_generated_ncs,
    evaluate,
    flatten_network,
    forward,
    kfold_cv,
    lifespan_ages,
    loss_and_gradients,
    predict_network,
    select_embedding,
    train,
    unflatten_network,
)
from ._deviation import (
    CohortReport,
    DeviationRecord,
    NormContext,
    cohort_report,
    mean_strength,
    mfcs_deviation,
    nc_deviation,
    read_records,
    score_subject,
    write_records,
)
from ._synth import EffectSpec, SynthCohort, SynthConfig, generate, latent_coherence

from ._config import RunConfig, load_config
from ._stages import PIPELINE, Stage, stage, stages
