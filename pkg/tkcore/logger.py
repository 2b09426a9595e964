"""
The package logger.

``tkcore.log`` is an `astropy.logger.AstropyLogger`, so its level, colour and
file output follow the ``[logger]`` section of the astropy configuration.
"""
import logging

from astropy.logger import AstropyLogger

__all__ = ['TkcoreLogger']


class TkcoreLogger(AstropyLogger):
    """
    Logger for the ``tkcore`` package.

    Records carry the name of the module that emitted them in their ``origin``
    attribute, as astropy's handler expects.
    """

    def makeRecord(self, name, level, pathname, lineno, msg, args, exc_info,
                   func=None, extra=None, sinfo=None):
        if extra is None:
            extra = {}
        if 'origin' not in extra:
            extra['origin'] = name
        return super().makeRecord(name, level, pathname, lineno, msg, args, exc_info,
                                  func=func, extra=extra, sinfo=sinfo)


def _init_log():
    """
    Create the ``tkcore`` logger without changing the global logger class.
    """
    orig_logger_cls = logging.getLoggerClass()
    logging.setLoggerClass(TkcoreLogger)
    try:
        log = logging.getLogger('tkcore')
        log._set_defaults()
    finally:
        logging.setLoggerClass(orig_logger_cls)
    return log
