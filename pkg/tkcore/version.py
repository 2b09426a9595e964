# NOTE: _dev.scm_version is only present in a git checkout with setuptools_scm
# installed; wheels and sdists fall back on the generated _version module.
import re

try:
    try:
        from ._dev.scm_version import version
    except ImportError:
        from ._version import version
except Exception:
    import warnings

    warnings.warn(
        f'could not determine {__name__.split(".")[0]} package version; '
        'this indicates a broken installation')
    del warnings

    version = '0.0.0'


def _split_version(version):
    # Only the leading numeric release segment matters, suffixes are ignored.
    pieces = [0, 0, 0]
    match = re.match(r"(\d+)(?:\.(\d+))?(?:\.(\d+))?", version)
    if match:
        for j, piece in enumerate(match.groups()):
            if piece is not None:
                pieces[j] = int(piece)
    return pieces


major, minor, bugfix = _split_version(version)

del _split_version

release = 'dev' not in version
