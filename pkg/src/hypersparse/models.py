import enum

from .hypergraph import WeightScheme


class ModelKind(enum.Enum):
    """The four regression models and their per-edge penalty.

    ``penalty`` names the function of the stacked block ``z_k = f[e_k] - mu_k``
    that is weighted by ``lambda * w(e_k)``.
    """

    DENSE = "dense"
    HYPEREDGE_SELECTION = "edge"
    NODE_SELECTION = "node"
    JOINT_SELECTION = "joint"

    @classmethod
    def parse(cls, value):
        if isinstance(value, ModelKind):
            return value
        aliases = {"dense": cls.DENSE, "none": cls.DENSE,
                   "edge": cls.HYPEREDGE_SELECTION, "hyperedge": cls.HYPEREDGE_SELECTION,
                   "node": cls.NODE_SELECTION, "joint": cls.JOINT_SELECTION}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown model {value!r}") from None

    @property
    def penalty(self) -> str:
        return {"dense": "sq", "edge": "linf", "node": "sql1", "joint": "l1"}[self.value]

    @property
    def default_weights(self) -> WeightScheme:
        if self is ModelKind.HYPEREDGE_SELECTION:
            return WeightScheme.UNIT
        return WeightScheme.INVERSE_CARDINALITY

    @property
    def sparse(self) -> bool:
        return self is not ModelKind.DENSE
