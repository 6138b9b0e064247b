"""JSON schemas for the command-line outputs and domain files."""
from importlib import resources
import json


def load_schema(name):
    """Load ``<name>.schema.json`` shipped with the package."""
    text = resources.files(__name__).joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)
