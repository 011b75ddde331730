from typing import Optional

from config.settings import settings
from config.logger import get_logger
from .extractor import ConvExtractor, ExtractorSpec, build_extractor, load_weights

logger = get_logger(__name__)


def create_extractor(
    weights_path: Optional[str] = None, seed: Optional[int] = None
) -> ConvExtractor:
    """
    Factory function to create the extractor from explicit arguments or settings.

    A weights file wins over seeded weights.
    """
    ext = settings.extractor
    weights_path = weights_path or ext.weights_path
    if weights_path:
        logger.info(f"Creating extractor from weights file: {weights_path}")
        return load_weights(weights_path)

    seed = ext.seed if seed is None else seed
    spec = ExtractorSpec.desk(ext.widths, ext.kernel_size, ext.stride)
    logger.info(f"Creating seeded extractor: widths={ext.widths}, seed={seed}")
    return build_extractor(spec, seed)
