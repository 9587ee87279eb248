import hashlib
from dataclasses import dataclass, field

from .. import config
from .json_io import write_json


def file_digest(path) -> str:
    """sha256 of the file bytes."""
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    """Everything needed to re-run a subcommand and get the same bytes out."""

    subcommand: str
    params: dict
    input_digests: dict = field(default_factory=dict)
    version: str = config.VERSION
    outputs: list = field(default_factory=list)

    @classmethod
    def for_inputs(cls, subcommand, params, inputs=()):
        digests = {str(path): file_digest(path) for path in inputs if path}
        return cls(subcommand, dict(params), digests)

    def add_output(self, path):
        self.outputs.append(str(path))

    def to_dict(self):
        return {
            "subcommand": self.subcommand,
            "params": self.params,
            "input_digests": self.input_digests,
            "version": self.version,
            "outputs": list(self.outputs),
        }

    def sidecar_path(self, output_path):
        return f"{output_path}.manifest.json"

    def write_sidecar(self, output_path):
        return write_json(self.sidecar_path(output_path), self.to_dict())
