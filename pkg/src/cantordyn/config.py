import os
from dataclasses import dataclass


@dataclass(frozen=True)
class Settings:
    # caps every "deepen until it works" search loop
    max_depth: int = 16

    @classmethod
    def from_env(cls) -> "Settings":
        raw = os.environ.get("CANTORDYN_MAX_DEPTH")
        if raw is None:
            return cls()
        depth = int(raw)
        if depth < 1:
            raise ValueError("CANTORDYN_MAX_DEPTH must be positive")
        return cls(max_depth=depth)


def max_depth() -> int:
    return Settings.from_env().max_depth
