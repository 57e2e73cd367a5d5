"""Exception hierarchy shared by the toolkit.

DataError covers malformed inputs and contract violations discovered in
user-supplied files or arrays (CLI exit code 2); ConfigError covers bad
experiment configuration and usage (CLI exit code 1).
"""


class StyloError(Exception):
    pass


class DataError(StyloError):
    pass


class ConfigError(StyloError):
    pass
