from enum import Enum


class GraspStrategy(str, Enum):
    PINCH2 = "Pinch2"
    TRIPOD3 = "Tripod3"
    WHOLE_HAND = "WholeHand"
    BIMANUAL = "Bimanual"

    @property
    def bimanual(self) -> bool:
        return self is GraspStrategy.BIMANUAL

    @property
    def active_hands(self) -> tuple:
        """Hand mask; single-hand strategies use hand 0."""
        return (True, True) if self.bimanual else (True, False)

    @classmethod
    def parse(cls, value) -> "GraspStrategy":
        if isinstance(value, cls):
            return value
        for s in cls:
            if value in (s.value, s.name, s.value.lower()):
                return s
        raise ValueError(f"unknown grasp strategy {value!r}; "
                         f"expected one of {[s.value for s in cls]}")

    def __str__(self):
        return self.value
