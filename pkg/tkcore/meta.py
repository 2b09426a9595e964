import abc

__all__ = ["GraphMeta", "TemporalIndexABC"]


class TemporalIndexABC(abc.ABC):
    """
    Common API of the temporal k-core component search indexes.

    Both `~tkcore.pecb.PECBIndex` and `~tkcore.ctmsf.CTMSFIndex` answer the
    same queries for one fixed ``k`` so they can be swapped freely by the
    command line tools.
    """

    @abc.abstractproperty
    def kind(self):
        """Short name of the index kind, as used on the command line."""

    @abc.abstractproperty
    def k(self):
        pass

    @abc.abstractproperty
    def n_vertices(self):
        pass

    @abc.abstractproperty
    def t_max(self):
        pass

    @abc.abstractproperty
    def labels(self):
        """Original vertex label of every dense vertex id."""

    @abc.abstractproperty
    def times(self):
        """Input timestamp of every time ``1 .. t_max``."""

    @abc.abstractmethod
    def search(self, u, ts, te):
        """
        Answer one query and report the work it took.

        Returns
        -------
        result: `tuple` of `int`
            Sorted dense vertex ids, empty when ``u`` is not in the core.
        visited: `int`
            Forest nodes (or vertices) expanded.
        searches: `int`
            Binary searches over versioned records.
        """

    def query(self, u, ts, te):
        """
        Vertices of the temporal k-core component of ``u`` in ``[ts, te]``.

        Returns
        -------
        result: `tuple` of `int`
            Sorted dense vertex ids, empty when ``u`` is not in the core.
        """
        return self.search(u, ts, te)[0]

    @abc.abstractmethod
    def serialize(self, sink):
        """Write the index to a binary file object or path."""

    @property
    def nbytes(self):
        """Size in bytes of the serialized index."""
        from io import BytesIO

        buffer = BytesIO()
        self.serialize(buffer)
        return buffer.tell()


class GraphMeta(dict):
    """
    Provenance of a temporal graph.

    A plain `dict` so that any key can be recorded; the keys written by
    `tkcore` are ``"source"``, ``"self_loops_dropped"``, ``"timestamp_mapping"``,
    ``"time_axis"`` and ``"aggregation"``.
    """

    def __init__(self, header=None):
        super().__init__(header or {})

    def derive(self, **updates):
        """Return a copy with ``updates`` applied."""
        new = self.__class__(self)
        new.update(updates)
        return new

    @property
    def source(self):
        return self.get("source")

    @property
    def self_loops_dropped(self):
        return self.get("self_loops_dropped", 0)

    @property
    def timestamp_mapping(self):
        """Raw timestamp to normalized timestamp, if the graph was normalized."""
        return self.get("timestamp_mapping")

    @property
    def time_axis(self):
        """Raw timestamp of every compressed time, if kept for query translation."""
        return self.get("time_axis")
