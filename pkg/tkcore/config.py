"""
Runtime configuration.

Values can be overridden in ``~/.astropy/config/tkcore.cfg`` or temporarily
with ``conf.set_temp``.
"""
from astropy import config as _config

__all__ = ['Conf', 'conf']


class Conf(_config.ConfigNamespace):
    """
    Configuration parameters for `tkcore`.
    """
    exhaustive_check_limit = _config.ConfigItem(
        1_000_000,
        "Verification checks every (vertex, window) pair when their number is "
        "at most this; otherwise it samples.")
    sampled_checks = _config.ConfigItem(
        100_000, "Number of sampled (vertex, window) checks in non-exhaustive verification.")
    query_workers = _config.ConfigItem(
        1, "Default number of worker threads for batch queries.")
    bench_query_count = _config.ConfigItem(
        1000, "Number of random queries per benchmark row.")
    bench_oracle_samples = _config.ConfigItem(
        200, "Number of benchmark queries checked against the brute-force oracle.")
    default_seed = _config.ConfigItem(0, "Default seed for generated graphs and workloads.")
    default_k_percentages = _config.ConfigItem(
        "50,60,70,80,90", "Percentages of k_max benchmarked when no k list is given.")


conf = Conf()
