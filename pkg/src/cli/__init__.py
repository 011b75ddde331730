from .main import app
from .run_config import RunConfig, load_config_file, resolve_run_config
from .errors import CliError, ConfigFileError

__all__ = [
    "app",
    "RunConfig",
    "load_config_file",
    "resolve_run_config",
    "CliError",
    "ConfigFileError",
]
