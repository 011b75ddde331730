class CliError(Exception):
    """Base class for command-line errors."""

    pass


class ConfigFileError(CliError):
    """The --config file is missing or unreadable."""

    pass
