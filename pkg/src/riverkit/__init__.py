"""riverkit: river width estimation and water segmentation evaluation on satellite rasters.

Core pieces:

* :mod:`riverkit.raster` -- grid geometry, multiband rasters, normalization,
  nearest/bilinear grid-to-grid resampling
* :mod:`riverkit.geoio` -- GeoTIFF and npy-stack readers/writers
* :mod:`riverkit.segmentation` -- NDWI, Otsu thresholding, mask metrics,
  BCE evaluation, false-positive attribution
* :mod:`riverkit.centerline` -- reach/node geometry, transects, grid traversal
* :mod:`riverkit.width` -- per-node width estimation and error statistics
* :mod:`riverkit.synth` -- synthetic river scenes with analytic ground truth
* :mod:`riverkit.ingest` -- dataset manifests and reach-exclusive splits
* :mod:`riverkit.cli` -- the ``riverkit`` command line tool
"""

__version__ = "0.1.0"

from .errors import ValidationError
from .raster import (
    GridGeometry,
    Raster,
    WaterMask,
    minmax_normalize,
    resample_band,
    resample_mask,
)
from .geoio import (
    load_raster,
    read_mask,
    write_field_geotiff,
    write_mask_geotiff,
    write_npy_stack,
)
from .segmentation import (
    FpAttribution,
    ScalarField,
    SegMetrics,
    bce_loss,
    fp_attribution,
    ndwi,
    ndwi_from_raster,
    otsu_threshold,
    seg_metrics,
    threshold_mask,
)
from .centerline import (
    Node,
    Reach,
    Transect,
    make_transect,
    node_tangent,
    parse_centerlines,
    transect_pixels,
    transect_samples,
)
from .width import (
    WidthEstimate,
    WidthErrorStats,
    node_width,
    pixel_error_bound,
    width_error_stats,
    widths_for_scene,
)
from .synth import Radiometry, RiverShape, SynthScene, SynthSpec, gen_scene, sweep
from .ingest import (
    SceneRecord,
    SplitAssignment,
    assign_scene_splits,
    load_manifest,
    split_by_reach,
    validate_exclusivity,
)

__all__ = [name for name in dir() if not name.startswith("_")]
