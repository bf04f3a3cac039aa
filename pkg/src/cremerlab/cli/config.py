"""Run configuration: ``key = value`` files with one section per subcommand.

A ``[global]`` section applies to every subcommand; a section named after the
subcommand overrides it; explicit command-line flags override both.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

from ..errors import BadInput

DEFAULTS = {
    "global": {"prec": "256", "format": "json", "toy": "false", "jobs": "1"},
    "forge": {"depth": "3", "materialize": "2", "bit_budget": str(1 << 20)},
    "escape": {"radius": "0.4", "direction": "fwd"},
    "arith": {"angle": "golden", "bruno": "10"},
    "orbit": {"budget": "1000", "direction": "forward", "radius": "1"},
    "perk": {"k": "1", "radius": "1", "tol": "1e-10", "rings": "3", "grid": "16"},
    "linearize": {"N": "6", "y_trunc": "6"},
}


@dataclass
class RunConfig:
    sections: dict = field(default_factory=dict)

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise BadInput(f"bad config file: {exc}") from None
        return cls({s: dict(cp.items(s)) for s in cp.sections()})

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.from_text(fh.read())
        except OSError as exc:
            raise BadInput(f"cannot read config {path}: {exc}") from None

    def to_text(self) -> str:
        lines = []
        for s in sorted(self.sections):
            lines.append(f"[{s}]")
            for k in sorted(self.sections[s]):
                lines.append(f"{k} = {self.sections[s][k]}")
            lines.append("")
        return "\n".join(lines)

    def for_command(self, cmd: str) -> dict:
        out = dict(self.sections.get("global", {}))
        out.update(self.sections.get(cmd, {}))
        return out

    @classmethod
    def defaults(cls) -> "RunConfig":
        return cls({k: dict(v) for k, v in DEFAULTS.items()})
